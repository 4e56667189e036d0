//! C ABI for the siqm library: opaque entry handles, status codes, and flat
//! buffers, so other languages can bind without knowing Rust layouts.
//!
//! Conventions: every fallible call returns a [`SiqmStatus`]; on any
//! non-`Ok` status the thread-local error message is set and can be fetched
//! with [`siqm_last_error_message`] (free it with [`siqm_string_free`]).
//! Output buffers are caller-allocated; their required lengths are stated on
//! each function. The generated header lives at `include/siqm.h`.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::ptr;

use siqm::catalog::{self, CatalogError, SuperpotentialEntry};
use siqm::grid::{GridFunction, GridSpec};
use siqm::oracle;
use siqm::partner;
use siqm::sicheck;
use siqm::symexpr::ParameterBinding;

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiqmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    UnknownEntry = 3,
    ConstraintViolation = 4,
    /// Pole, non-normalizable state, or unbound level.
    PhysicsError = 5,
    InvalidGrid = 6,
    InvalidArgument = 7,
    InternalError = 8,
}

/// Opaque superpotential handle.
pub struct SiqmEntry {
    inner: SuperpotentialEntry,
}

/// Shape-invariance residual summary (see `sicheck`).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SiqmSiReport {
    pub spread: f64,
    pub inferred_shift: f64,
    pub expected_shift: f64,
    pub pass: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let cstring = CString::new(message)
        .unwrap_or_else(|_| CString::new("error message contained NUL").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(cstring));
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn fail(status: SiqmStatus, message: impl Into<String>) -> SiqmStatus {
    set_error(message.into());
    status
}

fn catalog_status(err: &CatalogError) -> SiqmStatus {
    match err {
        CatalogError::UnknownEntry { .. } => SiqmStatus::UnknownEntry,
        CatalogError::ConstraintViolation { .. } => SiqmStatus::ConstraintViolation,
        CatalogError::UnknownParameter { .. } => SiqmStatus::InvalidArgument,
        CatalogError::NotConventional { .. } => SiqmStatus::InvalidArgument,
    }
}

/// Last error message for this thread as a newly-allocated C string, or NULL
/// when the previous call succeeded. Free with [`siqm_string_free`].
#[no_mangle]
pub extern "C" fn siqm_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(msg) => msg.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// Free a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a pointer previously returned by
/// [`siqm_last_error_message`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn siqm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn siqm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Open a catalog entry by name with auxiliary parameter overrides
/// (`param_names[i]` = `param_values[i]`, `n_params` pairs; pass 0 pairs to
/// use entry defaults). On success writes an owned handle to `*out`; release
/// it with [`siqm_entry_free`].
///
/// # Safety
/// `name` must be a NUL-terminated string; `param_names`/`param_values`
/// must hold `n_params` valid entries (or be NULL when `n_params` is 0);
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn siqm_entry_open(
    name: *const c_char,
    param_names: *const *const c_char,
    param_values: *const f64,
    n_params: usize,
    out: *mut *mut SiqmEntry,
) -> SiqmStatus {
    clear_error();
    if name.is_null() || out.is_null() {
        return fail(SiqmStatus::NullPointer, "name/out must not be NULL");
    }
    if n_params > 0 && (param_names.is_null() || param_values.is_null()) {
        return fail(
            SiqmStatus::NullPointer,
            "param arrays must not be NULL when n_params > 0",
        );
    }
    let name = match CStr::from_ptr(name).to_str() {
        Ok(s) => s,
        Err(_) => return fail(SiqmStatus::InvalidUtf8, "entry name is not UTF-8"),
    };
    let mut aux = ParameterBinding::new();
    for i in 0..n_params {
        let pname = *param_names.add(i);
        if pname.is_null() {
            return fail(SiqmStatus::NullPointer, format!("param name {i} is NULL"));
        }
        let pname = match CStr::from_ptr(pname).to_str() {
            Ok(s) => s,
            Err(_) => {
                return fail(SiqmStatus::InvalidUtf8, format!("param name {i} is not UTF-8"))
            }
        };
        aux.set(pname, *param_values.add(i));
    }
    match catalog::get_entry(name, &aux) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(SiqmEntry { inner }));
            SiqmStatus::Ok
        }
        Err(e) => fail(catalog_status(&e), e.to_string()),
    }
}

/// Release an entry handle (NULL is a no-op).
///
/// # Safety
/// `entry` must be NULL or a handle from [`siqm_entry_open`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn siqm_entry_free(entry: *mut SiqmEntry) {
    if !entry.is_null() {
        drop(Box::from_raw(entry));
    }
}

unsafe fn entry_ref<'a>(entry: *const SiqmEntry) -> Option<&'a SuperpotentialEntry> {
    entry.as_ref().map(|e| &e.inner)
}

/// Evaluate the superpotential at `n` abscissas into `w_out` (length `n`).
///
/// # Safety
/// `entry` must be a live handle; `xs` and `w_out` must hold `n` elements.
#[no_mangle]
pub unsafe extern "C" fn siqm_entry_eval_w(
    entry: *const SiqmEntry,
    a: f64,
    hbar: f64,
    xs: *const f64,
    n: usize,
    w_out: *mut f64,
) -> SiqmStatus {
    clear_error();
    let Some(entry) = entry_ref(entry) else {
        return fail(SiqmStatus::NullPointer, "entry is NULL");
    };
    if n > 0 && (xs.is_null() || w_out.is_null()) {
        return fail(SiqmStatus::NullPointer, "xs/w_out must not be NULL");
    }
    for i in 0..n {
        match entry.eval_w(*xs.add(i), a, hbar) {
            Ok(v) => *w_out.add(i) = v,
            Err(e) => return fail(SiqmStatus::PhysicsError, e.to_string()),
        }
    }
    SiqmStatus::Ok
}

/// Sample the partner potentials on a uniform `n`-point grid over
/// `[xmin, xmax]` into `v_minus_out` / `v_plus_out` (length `n` each; either
/// may be NULL to skip it).
///
/// # Safety
/// `entry` must be a live handle; non-NULL outputs must hold `n` elements.
#[no_mangle]
pub unsafe extern "C" fn siqm_entry_partner_potentials(
    entry: *const SiqmEntry,
    a: f64,
    hbar: f64,
    xmin: f64,
    xmax: f64,
    n: usize,
    v_minus_out: *mut f64,
    v_plus_out: *mut f64,
) -> SiqmStatus {
    clear_error();
    let Some(entry) = entry_ref(entry) else {
        return fail(SiqmStatus::NullPointer, "entry is NULL");
    };
    let grid = match GridSpec::new(xmin, xmax, n) {
        Ok(g) => g,
        Err(e) => return fail(SiqmStatus::InvalidGrid, e.to_string()),
    };
    match partner::partner_potentials(entry, a, hbar, &grid) {
        Ok((vm, vp)) => {
            if !v_minus_out.is_null() {
                ptr::copy_nonoverlapping(vm.values().as_ptr(), v_minus_out, n);
            }
            if !v_plus_out.is_null() {
                ptr::copy_nonoverlapping(vp.values().as_ptr(), v_plus_out, n);
            }
            SiqmStatus::Ok
        }
        Err(e) => fail(SiqmStatus::PhysicsError, e.to_string()),
    }
}

/// Analytic energies `E_n = g(a + n hbar) - g(a)` for `n = 0..n_levels` into
/// `energies_out` (length `n_levels`); the bound-level count goes to
/// `*bound_count_out` when non-NULL.
///
/// # Safety
/// `entry` must be a live handle; `energies_out` must hold `n_levels`
/// elements when `n_levels > 0`.
#[no_mangle]
pub unsafe extern "C" fn siqm_entry_analytic_spectrum(
    entry: *const SiqmEntry,
    a: f64,
    hbar: f64,
    n_levels: usize,
    energies_out: *mut f64,
    bound_count_out: *mut usize,
) -> SiqmStatus {
    clear_error();
    let Some(entry) = entry_ref(entry) else {
        return fail(SiqmStatus::NullPointer, "entry is NULL");
    };
    if n_levels == 0 {
        return fail(SiqmStatus::InvalidArgument, "n_levels must be >= 1");
    }
    if energies_out.is_null() {
        return fail(SiqmStatus::NullPointer, "energies_out must not be NULL");
    }
    match sicheck::analytic_spectrum(entry, a, hbar, n_levels - 1) {
        Ok(report) => {
            ptr::copy_nonoverlapping(
                report.analytic_energies.as_ptr(),
                energies_out,
                n_levels,
            );
            if !bound_count_out.is_null() {
                *bound_count_out = report.bound_count;
            }
            SiqmStatus::Ok
        }
        Err(e) => fail(SiqmStatus::PhysicsError, e.to_string()),
    }
}

/// Shape-invariance residual summary over a uniform grid.
///
/// # Safety
/// `entry` must be a live handle; `report_out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn siqm_entry_si_check(
    entry: *const SiqmEntry,
    a: f64,
    hbar: f64,
    xmin: f64,
    xmax: f64,
    n: usize,
    report_out: *mut SiqmSiReport,
) -> SiqmStatus {
    clear_error();
    let Some(entry) = entry_ref(entry) else {
        return fail(SiqmStatus::NullPointer, "entry is NULL");
    };
    if report_out.is_null() {
        return fail(SiqmStatus::NullPointer, "report_out must not be NULL");
    }
    let grid = match GridSpec::new(xmin, xmax, n) {
        Ok(g) => g,
        Err(e) => return fail(SiqmStatus::InvalidGrid, e.to_string()),
    };
    match sicheck::si_residual(entry, a, hbar, &grid) {
        Ok(r) => {
            *report_out = SiqmSiReport {
                spread: r.spread,
                inferred_shift: r.inferred_shift,
                expected_shift: r.expected_shift,
                pass: r.pass,
            };
            SiqmStatus::Ok
        }
        Err(e) => fail(SiqmStatus::PhysicsError, e.to_string()),
    }
}

/// Lowest `k` eigenvalues of `H = -hbar^2 d^2/dx^2 + V` for potential
/// samples `v` on a uniform grid (`n` points, spacing `dx`, starting at
/// `xmin`), written ascending into `eigs_out` (length `k`).
///
/// # Safety
/// `v` must hold `n` elements and `eigs_out` must hold `k`.
#[no_mangle]
pub unsafe extern "C" fn siqm_oracle_lowest(
    v: *const f64,
    n: usize,
    xmin: f64,
    dx: f64,
    hbar: f64,
    k: usize,
    eigs_out: *mut f64,
) -> SiqmStatus {
    clear_error();
    if v.is_null() || eigs_out.is_null() {
        return fail(SiqmStatus::NullPointer, "v/eigs_out must not be NULL");
    }
    let values = std::slice::from_raw_parts(v, n).to_vec();
    let grid = match GridFunction::new(xmin, dx, values, "V") {
        Ok(g) => g,
        Err(e) => return fail(SiqmStatus::InvalidGrid, e.to_string()),
    };
    let h = match oracle::discretize(&grid, hbar) {
        Ok(h) => h,
        Err(e) => return fail(SiqmStatus::InvalidGrid, e.to_string()),
    };
    match oracle::eigen_lowest(&h, k) {
        Ok(eigs) => {
            ptr::copy_nonoverlapping(eigs.as_ptr(), eigs_out, k);
            SiqmStatus::Ok
        }
        Err(e) => fail(SiqmStatus::InvalidArgument, e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    unsafe fn open(name: &str, params: &[(&str, f64)]) -> (SiqmStatus, *mut SiqmEntry) {
        let cname = CString::new(name).unwrap();
        let names: Vec<CString> = params
            .iter()
            .map(|(n, _)| CString::new(*n).unwrap())
            .collect();
        let name_ptrs: Vec<*const c_char> = names.iter().map(|c| c.as_ptr()).collect();
        let values: Vec<f64> = params.iter().map(|(_, v)| *v).collect();
        let mut handle: *mut SiqmEntry = ptr::null_mut();
        let status = siqm_entry_open(
            cname.as_ptr(),
            if params.is_empty() {
                ptr::null()
            } else {
                name_ptrs.as_ptr()
            },
            if params.is_empty() {
                ptr::null()
            } else {
                values.as_ptr()
            },
            params.len(),
            &mut handle,
        );
        (status, handle)
    }

    fn take_error() -> String {
        let raw = siqm_last_error_message();
        assert!(!raw.is_null());
        let msg = unsafe { CStr::from_ptr(raw) }.to_str().unwrap().to_owned();
        unsafe { siqm_string_free(raw) };
        msg
    }

    #[test]
    fn open_eval_and_free() {
        unsafe {
            let (status, handle) = open("extended-morse", &[]);
            assert_eq!(status, SiqmStatus::Ok);
            let xs = [0.0f64];
            let mut w = [0.0f64];
            let status = siqm_entry_eval_w(handle, 2.0, 1.0, xs.as_ptr(), 1, w.as_mut_ptr());
            assert_eq!(status, SiqmStatus::Ok);
            assert!((w[0] + 7.0 / 6.0).abs() < 1e-14);
            siqm_entry_free(handle);
        }
    }

    #[test]
    fn spectrum_through_the_c_surface() {
        unsafe {
            let (status, handle) = open("extended-morse", &[("P", 3.0), ("Q", 5.0)]);
            assert_eq!(status, SiqmStatus::Ok);
            let mut energies = [0.0f64; 4];
            let mut bound = 0usize;
            let status = siqm_entry_analytic_spectrum(
                handle,
                2.0,
                1.0,
                4,
                energies.as_mut_ptr(),
                &mut bound,
            );
            assert_eq!(status, SiqmStatus::Ok);
            assert_eq!(energies, [0.0, 5.0, 8.0, 9.0]);
            assert_eq!(bound, 3);
            siqm_entry_free(handle);
        }
    }

    #[test]
    fn si_check_reports_the_shift() {
        unsafe {
            let (status, handle) = open("extended-morse", &[]);
            assert_eq!(status, SiqmStatus::Ok);
            let mut report = SiqmSiReport {
                spread: f64::NAN,
                inferred_shift: f64::NAN,
                expected_shift: f64::NAN,
                pass: false,
            };
            let status = siqm_entry_si_check(handle, 2.0, 1.0, -5.0, 5.0, 201, &mut report);
            assert_eq!(status, SiqmStatus::Ok);
            assert!(report.pass);
            assert!((report.inferred_shift - 5.0).abs() < 1e-10);
            siqm_entry_free(handle);
        }
    }

    #[test]
    fn partner_and_oracle_round_trip() {
        unsafe {
            let (status, handle) = open("extended-morse", &[]);
            assert_eq!(status, SiqmStatus::Ok);
            let n = 4001usize;
            let mut vm = vec![0.0f64; n];
            let status = siqm_entry_partner_potentials(
                handle,
                2.0,
                1.0,
                -8.0,
                12.0,
                n,
                vm.as_mut_ptr(),
                ptr::null_mut(),
            );
            assert_eq!(status, SiqmStatus::Ok);
            let mut eigs = [0.0f64; 3];
            let dx = 20.0 / (n as f64 - 1.0);
            let status =
                siqm_oracle_lowest(vm.as_ptr(), n, -8.0, dx, 1.0, 3, eigs.as_mut_ptr());
            assert_eq!(status, SiqmStatus::Ok);
            for (e, expected) in eigs.iter().zip([0.0, 5.0, 8.0]) {
                assert!((e - expected).abs() < 1e-3, "{e} vs {expected}");
            }
            siqm_entry_free(handle);
        }
    }

    #[test]
    fn unknown_entry_sets_status_and_message() {
        unsafe {
            let (status, handle) = open("nosuch", &[]);
            assert_eq!(status, SiqmStatus::UnknownEntry);
            assert!(handle.is_null());
            assert!(take_error().contains("nosuch"));
        }
    }

    #[test]
    fn constraint_violation_is_distinguished() {
        unsafe {
            let (status, handle) = open("extended-morse", &[("Q", -1.0)]);
            assert_eq!(status, SiqmStatus::ConstraintViolation);
            assert!(handle.is_null());
            assert!(take_error().contains("Q"));
        }
    }

    #[test]
    fn null_pointers_are_rejected() {
        unsafe {
            let mut out: *mut SiqmEntry = ptr::null_mut();
            let status = siqm_entry_open(ptr::null(), ptr::null(), ptr::null(), 0, &mut out);
            assert_eq!(status, SiqmStatus::NullPointer);
        }
    }

    #[test]
    fn physics_error_surfaces_from_eval() {
        unsafe {
            let (status, handle) = open("coulomb", &[]);
            assert_eq!(status, SiqmStatus::Ok);
            let xs = [0.0f64]; // pole of -a/r
            let mut w = [0.0f64];
            let status = siqm_entry_eval_w(handle, 1.0, 1.0, xs.as_ptr(), 1, w.as_mut_ptr());
            assert_eq!(status, SiqmStatus::PhysicsError);
            siqm_entry_free(handle);
        }
    }

    #[test]
    fn version_string_is_nul_terminated() {
        let v = siqm_version();
        let s = unsafe { CStr::from_ptr(v) }.to_str().unwrap();
        assert_eq!(s, env!("CARGO_PKG_VERSION"));
    }

    #[test]
    fn header_is_generated_with_the_surface() {
        let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("include")
            .join("siqm.h");
        let text = std::fs::read_to_string(header).expect("header generated by build.rs");
        for symbol in [
            "siqm_entry_open",
            "siqm_entry_free",
            "siqm_entry_eval_w",
            "siqm_entry_partner_potentials",
            "siqm_entry_analytic_spectrum",
            "siqm_entry_si_check",
            "siqm_oracle_lowest",
            "siqm_last_error_message",
            "siqm_string_free",
            "siqm_version",
            "SiqmStatus",
            "SiqmSiReport",
        ] {
            assert!(text.contains(symbol), "header missing {symbol}");
        }
    }
}
