//! Command orchestration behind the `siqm` binary: configuration merging,
//! catalog browsing/validation, CSV emission of potentials and wavefunctions,
//! spectrum reports with the optional eigensolver cross-check, and the
//! shape-invariance / series checks.
//!
//! # Output conventions
//!
//! CSV: comma separator, `.` decimal point, 17 significant digits
//! (`{:.16e}`), LF line endings, mandatory header. Doubles round-trip
//! exactly, so golden files stay byte-stable. JSON reports carry a
//! `schema_version` field (currently 1) and serialize with a fixed field
//! order. Identical configurations produce byte-identical output.
//!
//! # Exit codes
//!
//! 0 success / check passed; 1 check failure; 2 usage error;
//! 3 physics-domain error (pole on grid, non-normalizable state, level
//! outside the bound spectrum).

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::catalog::{self, CatalogError, SuperpotentialEntry};
use crate::grid::{GridError, GridSpec};
use crate::hbarseries;
use crate::oracle::{self, OracleError};
use crate::partner::{self, PartnerError};
use crate::sicheck::{self, SiError};
use crate::symexpr::{parse, ParameterBinding, ParseError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PHYSICS: i32 = 3;

/// Environment variable holding a grid default as `xmin:xmax:n`.
pub const GRID_ENV_VAR: &str = "SIQM_DEFAULT_GRID";

/// Default comparison tolerance between analytic and oracle spectra.
pub const DEFAULT_ORACLE_TOL: f64 = 1e-3;

/// Error carrying the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn physics(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_PHYSICS,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}

impl From<CatalogError> for CliError {
    fn from(e: CatalogError) -> Self {
        CliError::usage(e.to_string())
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::usage(e.to_string())
    }
}

impl From<GridError> for CliError {
    fn from(e: GridError) -> Self {
        CliError::usage(e.to_string())
    }
}

impl From<PartnerError> for CliError {
    fn from(e: PartnerError) -> Self {
        match e {
            PartnerError::Grid(g) => g.into(),
            PartnerError::InvalidHbar(_) => CliError::usage(e.to_string()),
            _ => CliError::physics(e.to_string()),
        }
    }
}

impl From<SiError> for CliError {
    fn from(e: SiError) -> Self {
        match e {
            SiError::Grid(g) => g.into(),
            SiError::InvalidHbar(_) => CliError::usage(e.to_string()),
            _ => CliError::physics(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        CliError::usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: format!("i/o error: {e}"),
        }
    }
}

/// Raw options shared by the physics commands, as collected from flags.
#[derive(Debug, Clone, Default)]
pub struct CommonArgs {
    pub entry: Option<String>,
    pub params: Vec<(String, f64)>,
    pub hbar: Option<f64>,
    pub xmin: Option<f64>,
    pub xmax: Option<f64>,
    pub n: Option<usize>,
    pub levels: Option<usize>,
    pub tolerance: Option<f64>,
    pub out: Option<PathBuf>,
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
struct FileGrid {
    xmin: Option<f64>,
    xmax: Option<f64>,
    n: Option<usize>,
}

/// JSON configuration file; any present field overrides the matching flag
/// (with a warning on stderr naming the override).
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    entry: Option<String>,
    params: Option<BTreeMap<String, f64>>,
    hbar: Option<f64>,
    grid: Option<FileGrid>,
    levels: Option<usize>,
    tolerance: Option<f64>,
    out: Option<PathBuf>,
}

/// Fully resolved configuration for one command invocation.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub entry_name: String,
    pub a: f64,
    pub hbar: f64,
    pub params: BTreeMap<String, f64>,
    pub xmin: f64,
    pub xmax: f64,
    pub n: usize,
    pub levels: usize,
    pub tolerance: f64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

/// What the grid default should suit when nothing else specifies it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridPurpose {
    /// Potential sampling and eigensolver runs (dx ~ 5e-3 on the default
    /// Morse-family window).
    Potential,
    /// Ladder-built wavefunctions (dx ~ 1e-3; derivative error compounds).
    Wavefunctions,
    /// Shape-invariance residual sampling (coarse is fine).
    SiCheck,
}

fn parse_env_grid(raw: &str) -> Result<FileGrid, CliError> {
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::usage(format!(
            "{GRID_ENV_VAR} must be `xmin:xmax:n` (got `{raw}`)"
        )));
    }
    let xmin: f64 = parts[0]
        .parse()
        .map_err(|_| CliError::usage(format!("{GRID_ENV_VAR}: bad xmin `{}`", parts[0])))?;
    let xmax: f64 = parts[1]
        .parse()
        .map_err(|_| CliError::usage(format!("{GRID_ENV_VAR}: bad xmax `{}`", parts[1])))?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| CliError::usage(format!("{GRID_ENV_VAR}: bad n `{}`", parts[2])))?;
    Ok(FileGrid {
        xmin: Some(xmin),
        xmax: Some(xmax),
        n: Some(n),
    })
}

fn load_file_config(path: &PathBuf) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("bad config {}: {e}", path.display())))
}

fn warn(msg: &str) {
    eprintln!("warning: {msg}");
}

/// Merge flags, optional JSON config file (file wins, with a warning), the
/// grid environment variable, and per-entry defaults into a [`RunConfig`]
/// plus the resolved catalog entry.
pub fn resolve(
    args: &CommonArgs,
    purpose: GridPurpose,
) -> Result<(SuperpotentialEntry, RunConfig), CliError> {
    let file = match &args.config {
        Some(path) => load_file_config(path)?,
        None => FileConfig::default(),
    };

    let entry_name = match (&file.entry, &args.entry) {
        (Some(f), Some(c)) => {
            if f != c {
                warn(&format!("config file entry `{f}` overrides flag `{c}`"));
            }
            f.clone()
        }
        (Some(f), None) => f.clone(),
        (None, Some(c)) => c.clone(),
        (None, None) => catalog::EXTENDED_MORSE.to_owned(),
    };

    // Parameters: flags first, then file entries override by name.
    let mut params: BTreeMap<String, f64> = BTreeMap::new();
    for (k, v) in &args.params {
        if params.insert(k.clone(), *v).is_some() {
            return Err(CliError::usage(format!("duplicate --param {k}")));
        }
    }
    if let Some(fp) = &file.params {
        for (k, v) in fp {
            if let Some(old) = params.insert(k.clone(), *v) {
                if old != *v {
                    warn(&format!(
                        "config file value {k} = {v} overrides flag value {old}"
                    ));
                }
            }
        }
    }

    let hbar = match (file.hbar, args.hbar) {
        (Some(f), Some(c)) => {
            if f != c {
                warn(&format!("config file hbar = {f} overrides flag value {c}"));
            }
            f
        }
        (Some(f), None) => f,
        (None, Some(c)) => c,
        (None, None) => 1.0,
    };

    // a and hbar ride along in --param space; split them off before aux
    // validation.
    let a_param = params.remove("a");
    if let Some(h) = params.remove("hbar") {
        if args.hbar.is_some() || file.hbar.is_some() {
            warn("both --hbar and --param hbar given; using --param value");
        }
        return resolve_with(
            args, purpose, &file, entry_name, params, a_param, h,
        );
    }
    resolve_with(args, purpose, &file, entry_name, params, a_param, hbar)
}

fn resolve_with(
    args: &CommonArgs,
    purpose: GridPurpose,
    file: &FileConfig,
    entry_name: String,
    params: BTreeMap<String, f64>,
    a_param: Option<f64>,
    hbar: f64,
) -> Result<(SuperpotentialEntry, RunConfig), CliError> {
    let mut aux = ParameterBinding::new();
    for (k, v) in &params {
        aux.set(k, *v);
    }
    let entry = catalog::get_entry(&entry_name, &aux)?;
    let a = a_param.unwrap_or_else(|| entry.default_a());

    let env_grid = match std::env::var(GRID_ENV_VAR) {
        Ok(raw) => parse_env_grid(&raw)?,
        Err(_) => FileGrid::default(),
    };
    let file_grid = file.grid.clone().unwrap_or_default();
    let (dlo, dhi, dn) = default_grid_for(&entry, purpose);
    let pick_f = |file_v: Option<f64>, flag_v: Option<f64>, env_v: Option<f64>, name: &str, d: f64| {
        if let (Some(f), Some(c)) = (file_v, flag_v) {
            if f != c {
                warn(&format!("config file {name} = {f} overrides flag value {c}"));
            }
        }
        file_v.or(flag_v).or(env_v).unwrap_or(d)
    };
    let xmin = pick_f(file_grid.xmin, args.xmin, env_grid.xmin, "xmin", dlo);
    let xmax = pick_f(file_grid.xmax, args.xmax, env_grid.xmax, "xmax", dhi);
    let n = {
        if let (Some(f), Some(c)) = (file_grid.n, args.n) {
            if f != c {
                warn(&format!("config file n = {f} overrides flag value {c}"));
            }
        }
        file_grid.n.or(args.n).or(env_grid.n).unwrap_or(dn)
    };

    let levels = {
        if let (Some(f), Some(c)) = (file.levels, args.levels) {
            if f != c {
                warn(&format!("config file levels = {f} overrides flag value {c}"));
            }
        }
        file.levels.or(args.levels).unwrap_or(3)
    };
    let tolerance = file
        .tolerance
        .or(args.tolerance)
        .unwrap_or(DEFAULT_ORACLE_TOL);
    let out = file.out.clone().or_else(|| args.out.clone());

    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(xmin < xmax) {
        return Err(CliError::usage(format!(
            "grid bounds must satisfy xmin < xmax (got [{xmin}, {xmax}])"
        )));
    }
    if n < 50 {
        return Err(CliError::usage(format!("grid needs n >= 50 (got {n})")));
    }
    if levels < 1 {
        return Err(CliError::usage("levels must be >= 1"));
    }

    Ok((
        entry,
        RunConfig {
            entry_name,
            a,
            hbar,
            params,
            xmin,
            xmax,
            n,
            levels,
            tolerance,
            out,
        },
    ))
}

fn default_grid_for(entry: &SuperpotentialEntry, purpose: GridPurpose) -> (f64, f64, usize) {
    if purpose == GridPurpose::SiCheck {
        let (lo, hi) = entry.default_check_interval();
        return (lo, hi, 201);
    }
    let (lo, hi) = entry.default_oracle_interval();
    let (lo, hi) = match entry.domain() {
        crate::catalog::SpatialDomain::Interval { lo: dlo, hi: dhi } => {
            let inset = 0.002 * (dhi - dlo);
            (dlo + inset, dhi - inset)
        }
        _ => (lo, hi),
    };
    let span = hi - lo;
    let n = match purpose {
        // dx ~ 5e-3 for eigensolver work, ~1e-3 for ladder wavefunctions.
        GridPurpose::Potential => (span / 5e-3).round() as usize + 1,
        GridPurpose::Wavefunctions => (span / 1e-3).round() as usize + 1,
        GridPurpose::SiCheck => unreachable!(),
    };
    (lo, hi, n)
}

fn grid_spec(cfg: &RunConfig) -> Result<GridSpec, CliError> {
    Ok(GridSpec::new(cfg.xmin, cfg.xmax, cfg.n)?)
}

/// 17-significant-digit float formatting used by all CSV output.
pub fn fmt_csv(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_output(out: &Option<PathBuf>, payload: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, payload)
                .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(payload.as_bytes())?;
        }
    }
    Ok(())
}

fn to_json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

// ---------------------------------------------------------------------------
// catalog
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
struct CatalogParamDoc {
    name: String,
    default: f64,
    constraint: String,
}

#[derive(Debug, Serialize)]
struct CatalogEntryDoc {
    name: String,
    w: String,
    g: String,
    domain: String,
    parametrization: crate::catalog::AdditiveParametrization,
    hbar_dependent: bool,
    parameters: Vec<CatalogParamDoc>,
    default_a: f64,
    notes: String,
}

#[derive(Debug, Serialize)]
struct CatalogDoc {
    schema_version: u32,
    entries: Vec<CatalogEntryDoc>,
}

fn catalog_doc() -> CatalogDoc {
    let entries = catalog::names()
        .into_iter()
        .map(|name| {
            let entry = catalog::get_entry(name, &ParameterBinding::new())
                .expect("registry entries build with defaults");
            CatalogEntryDoc {
                name: name.to_owned(),
                w: entry.w().to_string(),
                g: entry.g().to_string(),
                domain: entry.domain().describe(),
                parametrization: entry.parametrization(),
                hbar_dependent: entry.hbar_dependent(),
                parameters: entry
                    .param_specs()
                    .iter()
                    .map(|s| CatalogParamDoc {
                        name: s.name.to_owned(),
                        default: s.default,
                        constraint: s.constraint.describe(s.name),
                    })
                    .collect(),
                default_a: entry.default_a(),
                notes: entry.notes().to_owned(),
            }
        })
        .collect();
    CatalogDoc {
        schema_version: 1,
        entries,
    }
}

/// `catalog list`: print every entry (text table or the JSON document).
pub fn cmd_catalog_list(json: bool, out: &Option<PathBuf>) -> Result<i32, CliError> {
    let doc = catalog_doc();
    let payload = if json {
        to_json_line(&doc)
    } else {
        let mut text = String::new();
        for e in &doc.entries {
            text.push_str(&format!(
                "{name}\n  W = {w}\n  g = {g}\n  domain: {domain}\n",
                name = e.name,
                w = e.w,
                g = e.g,
                domain = e.domain
            ));
            for p in &e.parameters {
                text.push_str(&format!(
                    "  param {name} (default {default}): {constraint}\n",
                    name = p.name,
                    default = p.default,
                    constraint = p.constraint
                ));
            }
            text.push_str(&format!("  notes: {}\n\n", e.notes));
        }
        text
    };
    write_output(out, &payload)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct ValidateReport {
    schema_version: u32,
    samples_per_entry: usize,
    seed: u64,
    results: Vec<crate::catalog::ResidualReport>,
    skipped: Vec<String>,
    pass: bool,
}

/// `catalog validate`: run the conventional-PDE residual gate over random
/// in-domain samples.
pub fn cmd_catalog_validate(
    name: Option<&str>,
    samples: usize,
    seed: u64,
    out: &Option<PathBuf>,
) -> Result<i32, CliError> {
    let targets: Vec<&str> = match name {
        Some(n) => {
            if n == catalog::EXTENDED_MORSE {
                return Err(CliError::usage(format!(
                    "`{n}` carries explicit hbar dependence; use `check --si` instead"
                )));
            }
            if !catalog::names().contains(&n) {
                return Err(CliError::usage(format!("unknown catalog entry `{n}`")));
            }
            vec![catalog::names().into_iter().find(|x| *x == n).unwrap()]
        }
        None => catalog::names()
            .into_iter()
            .filter(|n| *n != catalog::EXTENDED_MORSE)
            .collect(),
    };
    let mut results = Vec::new();
    let mut skipped = Vec::new();
    if name.is_none() {
        skipped.push(format!(
            "{}: hbar-dependent, verified by `check --si`",
            catalog::EXTENDED_MORSE
        ));
    }
    let mut pass = true;
    for target in targets {
        let entry = catalog::get_entry(target, &ParameterBinding::new())?;
        let points = catalog::sample_points(&entry, samples, seed);
        let report = catalog::validate_conventional(&entry, &points)?;
        pass &= report.pass;
        results.push(report);
    }
    let report = ValidateReport {
        schema_version: 1,
        samples_per_entry: samples,
        seed,
        results,
        skipped,
        pass,
    };
    write_output(out, &to_json_line(&report))?;
    Ok(if pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

// ---------------------------------------------------------------------------
// potential / wavefunctions
// ---------------------------------------------------------------------------

/// `potential`: CSV columns `x,W,V_minus,V_plus` over the grid.
pub fn cmd_potential(args: &CommonArgs) -> Result<i32, CliError> {
    let (entry, cfg) = resolve(args, GridPurpose::Potential)?;
    let grid = grid_spec(&cfg)?;
    let (v_minus, v_plus) = partner::partner_potentials(&entry, cfg.a, cfg.hbar, &grid)?;
    let binding = entry.binding_for(cfg.a, cfg.hbar);
    let mut csv = String::with_capacity(grid.n * 80);
    csv.push_str("x,W,V_minus,V_plus\n");
    for (i, x) in grid.points().enumerate() {
        let w = entry.w().eval(x, &binding).map_err(|e| {
            CliError::physics(format!("pole inside grid at x = {x}: {e}"))
        })?;
        csv.push_str(&format!(
            "{},{},{},{}\n",
            fmt_csv(x),
            fmt_csv(w),
            fmt_csv(v_minus.values()[i]),
            fmt_csv(v_plus.values()[i])
        ));
    }
    write_output(&cfg.out, &csv)?;
    Ok(EXIT_OK)
}

/// `wavefunctions`: CSV columns `x,psi_0..psi_k` for the lowest `levels`
/// ladder-built bound states.
pub fn cmd_wavefunctions(args: &CommonArgs) -> Result<i32, CliError> {
    let (entry, cfg) = resolve(args, GridPurpose::Wavefunctions)?;
    let grid = grid_spec(&cfg)?;
    let set = partner::excited_states(&entry, cfg.a, cfg.hbar, cfg.levels - 1, &grid)?;
    let mut csv = String::with_capacity(grid.n * 30 * (set.len() + 1));
    csv.push('x');
    for n in 0..set.len() {
        csv.push_str(&format!(",psi_{n}"));
    }
    csv.push('\n');
    for (i, x) in grid.points().enumerate() {
        csv.push_str(&fmt_csv(x));
        for state in &set.states {
            csv.push(',');
            csv.push_str(&fmt_csv(state.psi.values()[i]));
        }
        csv.push('\n');
    }
    write_output(&cfg.out, &csv)?;
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

/// `spectrum`: JSON report of analytic energies; with `use_oracle`, the
/// eigensolver energies and deltas are attached and gate the exit code.
pub fn cmd_spectrum(args: &CommonArgs, use_oracle: bool) -> Result<i32, CliError> {
    let (entry, cfg) = resolve(args, GridPurpose::Potential)?;
    let n_max = cfg.levels - 1;
    let mut report = sicheck::analytic_spectrum(&entry, cfg.a, cfg.hbar, n_max)?;
    if cfg.levels > report.bound_count {
        report.warning = Some(format!(
            "requested {} levels but only {} are bound; oracle comparison covers bound levels",
            cfg.levels, report.bound_count
        ));
    }
    let mut code = EXIT_OK;
    if use_oracle {
        let grid = grid_spec(&cfg)?;
        let (v_minus, _) = partner::partner_potentials(&entry, cfg.a, cfg.hbar, &grid)?;
        let h = oracle::discretize(&v_minus, cfg.hbar)?;
        let eigs = oracle::eigen_lowest(&h, cfg.levels)?;
        let warning = report.warning.clone();
        report = oracle::compare_spectra(&report, &eigs, cfg.tolerance);
        if report.warning.is_none() {
            report.warning = warning;
        }
        if report.oracle_pass != Some(true) {
            code = EXIT_CHECK_FAILED;
        }
    }
    write_output(&cfg.out, &to_json_line(&report))?;
    Ok(code)
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

/// `check --si`: shape-invariance residual report for a catalog entry or a
/// user-supplied `W`/`g` pair.
pub fn cmd_check_si(
    args: &CommonArgs,
    w_expr: Option<&str>,
    g_expr: Option<&str>,
) -> Result<i32, CliError> {
    let (entry, cfg) = match (w_expr, g_expr) {
        (None, None) => resolve(args, GridPurpose::SiCheck)?,
        (Some(w_text), Some(g_text)) => {
            let w = parse(w_text)?;
            let g = parse(g_text)?;
            let mut aux = ParameterBinding::new();
            for (k, v) in &args.params {
                if k != "a" && k != "hbar" {
                    aux.set(k, *v);
                }
            }
            let custom = catalog::custom_entry(
                "custom",
                w,
                g,
                crate::catalog::SpatialDomain::FullLine,
                aux,
            );
            let a = args
                .params
                .iter()
                .find(|(k, _)| k == "a")
                .map(|(_, v)| *v)
                .unwrap_or(1.0);
            let cfg = RunConfig {
                entry_name: "custom".to_owned(),
                a,
                hbar: args.hbar.unwrap_or(1.0),
                params: args.params.iter().cloned().collect(),
                xmin: args.xmin.unwrap_or(-4.0),
                xmax: args.xmax.unwrap_or(4.0),
                n: args.n.unwrap_or(201),
                levels: 1,
                tolerance: args.tolerance.unwrap_or(DEFAULT_ORACLE_TOL),
                out: args.out.clone(),
            };
            (custom, cfg)
        }
        _ => {
            return Err(CliError::usage(
                "custom checks need both --w-expr and --g-expr",
            ))
        }
    };
    let grid = GridSpec::new(cfg.xmin, cfg.xmax, cfg.n)?;
    let report = sicheck::si_residual(&entry, cfg.a, cfg.hbar, &grid)?;
    let pass = report.pass;
    write_output(&cfg.out, &to_json_line(&report))?;
    Ok(if pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

#[derive(Debug, Serialize)]
struct OrderResidual {
    order: usize,
    max_residual: f64,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct SeriesCheckReport {
    schema_version: u32,
    entry: String,
    orders: Vec<OrderResidual>,
    samples: usize,
    seed: u64,
    tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
    pass: bool,
}

/// `check --series --orders J`: residuals of the order-by-order equations.
///
/// For the extended Morse entry the closed-form terms are checked for
/// j = 1..=J; an hbar-independent entry only satisfies the first-order
/// equation, so J is clamped to 1 with a note.
pub fn cmd_check_series(args: &CommonArgs, orders: usize, seed: u64) -> Result<i32, CliError> {
    if orders < 1 {
        return Err(CliError::usage("--orders must be >= 1"));
    }
    let (entry, cfg) = resolve(args, GridPurpose::SiCheck)?;
    let samples_n = 100;
    let points = catalog::sample_points(&entry, samples_n, seed);
    const TOL: f64 = 1e-9;

    let (family, max_order, note) = if entry.hbar_dependent() {
        let p = entry.aux().get("P").expect("extended aux has P");
        let q = entry.aux().get("Q").expect("extended aux has Q");
        let alpha = entry.aux().get("alpha").expect("extended aux has alpha");
        (
            hbarseries::extended_morse_family(p, q, alpha, orders.max(1)),
            orders,
            None,
        )
    } else {
        // Kernel-only family: W_0 from the entry with auxiliaries folded in.
        let binding = entry.binding_for(0.0, 0.0);
        let mut aux_only = ParameterBinding::new();
        for (k, v) in binding.iter() {
            if k != "a" {
                aux_only.set(k, v);
            }
        }
        let w0 = entry.w().substitute(&aux_only);
        let g = entry.g().substitute(&aux_only);
        let family = hbarseries::SeriesFamily {
            terms: vec![hbarseries::SeriesTerm { order: 0, expr: w0 }],
            g,
            p: 0.0,
            q: 0.0,
            alpha: 0.0,
        };
        let note = (orders > 1).then(|| {
            format!(
                "`{}` is hbar-independent; only the first-order equation applies, \
                 --orders clamped from {orders} to 1",
                entry.name()
            )
        });
        (family, 1, note)
    };

    let mut results = Vec::new();
    let mut pass = true;
    for j in 1..=max_order {
        let r = family
            .pde_residual(j, &points)
            .map_err(|e| CliError::physics(e.to_string()))?;
        let ok = r < TOL;
        pass &= ok;
        results.push(OrderResidual {
            order: j,
            max_residual: r,
            pass: ok,
        });
    }
    let report = SeriesCheckReport {
        schema_version: 1,
        entry: cfg.entry_name.clone(),
        orders: results,
        samples: samples_n,
        seed,
        tolerance: TOL,
        note,
        pass,
    };
    write_output(&cfg.out, &to_json_line(&report))?;
    Ok(if pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_floats_round_trip() {
        for v in [0.0, -7.0 / 6.0, 1.0 / 3.0, 12345.678901234567, 1e-300] {
            let s = fmt_csv(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, v, "{s}");
        }
    }

    #[test]
    fn env_grid_parsing() {
        let g = parse_env_grid("-8:12:4001").unwrap();
        assert_eq!(g.xmin, Some(-8.0));
        assert_eq!(g.xmax, Some(12.0));
        assert_eq!(g.n, Some(4001));
        assert!(parse_env_grid("1:2").is_err());
        assert!(parse_env_grid("a:2:3").is_err());
    }

    #[test]
    fn resolve_applies_entry_defaults() {
        let args = CommonArgs::default();
        let (entry, cfg) = resolve(&args, GridPurpose::Potential).unwrap();
        assert_eq!(entry.name(), catalog::EXTENDED_MORSE);
        assert_eq!(cfg.a, 2.0);
        assert_eq!(cfg.hbar, 1.0);
        assert_eq!(cfg.n, 4001);
        assert_eq!(cfg.xmin, -8.0);
        assert_eq!(cfg.xmax, 12.0);
    }

    #[test]
    fn resolve_rejects_bad_grids() {
        let args = CommonArgs {
            xmin: Some(5.0),
            xmax: Some(-5.0),
            ..Default::default()
        };
        let err = resolve(&args, GridPurpose::Potential).unwrap_err();
        assert_eq!(err.code, EXIT_USAGE);
        let args = CommonArgs {
            n: Some(10),
            ..Default::default()
        };
        assert_eq!(
            resolve(&args, GridPurpose::Potential).unwrap_err().code,
            EXIT_USAGE
        );
    }

    #[test]
    fn unknown_entry_is_usage_error() {
        let args = CommonArgs {
            entry: Some("nosuch".to_owned()),
            ..Default::default()
        };
        let err = resolve(&args, GridPurpose::Potential).unwrap_err();
        assert_eq!(err.code, EXIT_USAGE);
    }

    #[test]
    fn physics_errors_map_to_exit_three() {
        let err: CliError = PartnerError::LevelNotBound {
            level: 3,
            energy: 9.0,
        }
        .into();
        assert_eq!(err.code, EXIT_PHYSICS);
    }
}
