//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with the measured quantity and the bound it is held to. Tolerances are
//! pinned in the assertions, not configurable.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use siqm::catalog::{self, get_entry, make_extended_morse, SuperpotentialEntry};
use siqm::grid::{GridFunction, GridSpec};
use siqm::hbarseries;
use siqm::oracle::{discretize, eigen_lowest};
use siqm::partner::{
    self, count_nodes, enforce_sign_convention, node_positions, partner_potentials,
};
use siqm::sicheck::{analytic_spectrum, si_residual};
use siqm::symexpr::ParameterBinding;

fn report(id: &str, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("acceptance {id} {name}: {verdict} ({detail})");
    assert!(pass, "{name}: {detail}");
}

fn example_entry() -> SuperpotentialEntry {
    make_extended_morse(3.0, 5.0, 5.0, 1.0).unwrap()
}

fn v_minus_on(entry: &SuperpotentialEntry, xmin: f64, xmax: f64, dx: f64) -> GridFunction {
    let n = ((xmax - xmin) / dx).round() as usize + 1;
    let grid = GridSpec::new(xmin, xmax, n).unwrap();
    partner_potentials(entry, 2.0, 1.0, &grid).unwrap().0
}

#[test]
fn a01_bound_spectrum_matches_the_oracle() {
    let entry = example_entry();
    let spectrum = analytic_spectrum(&entry, 2.0, 1.0, 2).unwrap();
    assert_eq!(spectrum.analytic_energies, vec![0.0, 5.0, 8.0]);
    assert_eq!(spectrum.bound_count, 3);
    let start = Instant::now();
    let v = v_minus_on(&entry, -8.0, 12.0, 5e-3);
    let eigs = eigen_lowest(&discretize(&v, 1.0).unwrap(), 3).unwrap();
    let elapsed = start.elapsed();
    let max_delta = eigs
        .iter()
        .zip(&spectrum.analytic_energies)
        .map(|(n, a)| (n - a).abs())
        .fold(0.0f64, f64::max);
    report(
        "01",
        "bound-spectrum-oracle",
        max_delta < 1e-3 && elapsed.as_secs_f64() < 10.0,
        &format!(
            "analytic {{0, 5, 8}} exact; max oracle delta {max_delta:.2e} < 1e-3; \
             solve took {:.2}s < 10s",
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn a02_no_fourth_bound_state() {
    let entry = example_entry();
    let narrow = discretize(&v_minus_on(&entry, -8.0, 12.0, 5e-3), 1.0).unwrap();
    let wide = discretize(&v_minus_on(&entry, -12.0, 16.0, 5e-3), 1.0).unwrap();
    let c_narrow = narrow.count_below(8.95);
    let c_wide = wide.count_below(8.95);
    report(
        "02",
        "no-fourth-bound-state",
        c_narrow == 3 && c_wide == 3,
        &format!("eigenvalues below 8.95: {c_narrow} on [-8,12], {c_wide} on [-12,16]"),
    );
}

#[test]
fn a03_shape_invariance_residual_is_flat() {
    let grid = GridSpec::new(-5.0, 5.0, 201).unwrap();
    let entry = example_entry();
    let example = si_residual(&entry, 2.0, 1.0, &grid).unwrap();
    let mut ok = example.pass
        && example.spread < 1e-10
        && (example.inferred_shift - 5.0).abs() < 1e-10;
    let mut worst_spread = example.spread;
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..20 {
        let alpha = rng.gen_range(3.0..7.0);
        let coupling = rng.gen_range(0.5..4.0); // alpha - a
        let a = alpha - coupling;
        let hbar = rng.gen_range(0.1..1.2);
        let p = rng.gen_range(-5.0..5.0);
        let q = rng.gen_range(0.2..10.0);
        let entry = make_extended_morse(p, q, alpha, hbar).unwrap();
        let r = si_residual(&entry, a, hbar, &grid).unwrap();
        let expected = hbar * (2.0 * coupling - hbar);
        ok &= r.pass
            && r.spread < 1e-10 * (1.0 + r.inferred_shift.abs())
            && (r.inferred_shift - expected).abs() < 1e-10 * (1.0 + expected.abs());
        worst_spread = worst_spread.max(r.spread);
    }
    report(
        "03",
        "shape-invariance-residual",
        ok,
        &format!(
            "example shift {:.12} (expected 5), spread {:.2e}; 20 random parameter draws hold, \
             worst spread {worst_spread:.2e}",
            example.inferred_shift, example.spread
        ),
    );
}

#[test]
fn a04_series_equations_hold_through_order_eight() {
    let family = hbarseries::extended_morse_family(3.0, 5.0, 5.0, 8);
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let samples: Vec<(f64, f64)> = (0..100)
        .map(|_| (rng.gen_range(-0.5..6.0), rng.gen_range(0.5..3.5)))
        .collect();
    let mut worst = 0.0f64;
    for j in 1..=8 {
        worst = worst.max(family.pde_residual(j, &samples).unwrap());
    }
    report(
        "04",
        "order-by-order-equations",
        worst < 1e-9,
        &format!("max residual over j = 1..8 at 100 samples: {worst:.2e} < 1e-9"),
    );
}

#[test]
fn a05_partial_sums_resum_to_the_closed_form() {
    let err30 = hbarseries::partial_sum_error(30, 2.0, 2.0, 3.0, 5.0, 5.0, 1.0).unwrap();
    let expected_ratio = 5.0 * (-4.0f64).exp();
    let mut ratios_ok = true;
    let mut worst_rel = 0.0f64;
    for k in 2..=6 {
        let e0 = hbarseries::partial_sum_error(k, 2.0, 2.0, 3.0, 5.0, 5.0, 1.0).unwrap();
        let e1 = hbarseries::partial_sum_error(k + 1, 2.0, 2.0, 3.0, 5.0, 5.0, 1.0).unwrap();
        let rel = ((e1 / e0) / expected_ratio - 1.0).abs();
        worst_rel = worst_rel.max(rel);
        ratios_ok &= rel < 0.1;
    }
    report(
        "05",
        "geometric-resummation",
        err30 < 1e-6 && ratios_ok,
        &format!(
            "error at K=30 is {err30:.2e} < 1e-6; successive-error ratio within \
             {worst_rel:.1e} of {expected_ratio:.4} (bound 10%)"
        ),
    );
}

#[test]
fn a06_conventional_catalog_passes_the_pde_gate() {
    let mut worst = 0.0f64;
    let mut ok = true;
    for name in catalog::names() {
        if name == catalog::EXTENDED_MORSE {
            continue;
        }
        let entry = get_entry(name, &ParameterBinding::new()).unwrap();
        let samples = catalog::sample_points(&entry, 200, 41);
        let r = catalog::validate_conventional(&entry, &samples).unwrap();
        ok &= r.pass && r.flagged.is_empty();
        worst = worst.max(r.max_first_order).max(r.max_mixed_third);
    }
    report(
        "06",
        "conventional-catalog-gate",
        ok,
        &format!("10 entries x 200 samples; worst residual {worst:.2e} < 1e-10"),
    );
}

// Closed forms printed for the example parameters (hbar = 1), used as the
// pointwise reference for the ladder construction.
fn closed_psi(level: usize, x: f64) -> f64 {
    let t = x.exp();
    let s5 = 5.0f64.sqrt();
    let pi = std::f64::consts::PI;
    let angular = (t / s5).atan();
    match level {
        0 => {
            40.0 / (t * t + 5.0).powi(3)
                * (105.0 / (1.0 + (-s5 * pi).exp())).sqrt()
                * (3.0 * x - s5 * angular).exp()
        }
        1 => {
            20.0 * (t * t + 2.0 * t - 5.0) / (t * t + 5.0).powi(3)
                * (70.0 / (1.0 + (s5 * pi).exp())).sqrt()
                * (2.0 * x - s5 * angular + s5 * pi / 2.0).exp()
        }
        2 => {
            4.0 * (3.0 * t.powi(4) + 20.0 * t.powi(3) - 20.0 * t * t - 100.0 * t + 75.0)
                / (t * t + 5.0).powi(3)
                * (5.0 / (1.0 + (s5 * pi).exp())).sqrt()
                * (x - s5 * angular + s5 * pi / 2.0).exp()
        }
        _ => unreachable!(),
    }
}

#[test]
fn a07_ladder_states_match_closed_forms() {
    let grid = GridSpec::new(-8.0, 12.0, 20001).unwrap();
    let set = partner::excited_states(&example_entry(), 2.0, 1.0, 2, &grid).unwrap();
    let mut worst_dev = 0.0f64;
    let mut nodes_ok = true;
    for (n, state) in set.states.iter().enumerate() {
        let mut reference =
            GridFunction::sample(&grid, "ref", |x| Ok::<_, ()>(closed_psi(n, x))).unwrap();
        reference.normalize();
        enforce_sign_convention(&mut reference);
        let dev = state
            .psi
            .values()
            .iter()
            .zip(reference.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        worst_dev = worst_dev.max(dev);
        nodes_ok &= count_nodes(&state.psi) == n;
    }
    let gram = set.gram();
    let mut gram_dev = 0.0f64;
    for (i, row) in gram.iter().enumerate() {
        for (j, value) in row.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            gram_dev = gram_dev.max((value - target).abs());
        }
    }
    let nodes = node_positions(&set.states[1].psi);
    let node_target = (6.0f64.sqrt() - 1.0).ln();
    let node_err = if nodes.len() == 1 {
        (nodes[0] - node_target).abs()
    } else {
        f64::INFINITY
    };
    report(
        "07",
        "ladder-vs-closed-forms",
        worst_dev < 1e-6 && gram_dev < 1e-6 && nodes_ok && node_err < 1e-4,
        &format!(
            "pointwise deviation {worst_dev:.2e} < 1e-6; Gram deviation {gram_dev:.2e} < 1e-6; \
             node counts 0/1/2; first-excited node off by {node_err:.2e} < 1e-4"
        ),
    );
}

#[test]
fn a08_partner_spectra_shift_by_one_level() {
    let entry = example_entry();
    let grid = GridSpec::new(-8.0, 12.0, 4001).unwrap();
    let (vm, vp) = partner_potentials(&entry, 2.0, 1.0, &grid).unwrap();
    let em = eigen_lowest(&discretize(&vm, 1.0).unwrap(), 3).unwrap();
    let ep = eigen_lowest(&discretize(&vp, 1.0).unwrap(), 2).unwrap();
    let d0 = (ep[0] - em[1]).abs();
    let d1 = (ep[1] - em[2]).abs();
    report(
        "08",
        "partner-isospectrality",
        d0 < 1e-3 && d1 < 1e-3,
        &format!("|E+_0 - E-_1| = {d0:.2e}, |E+_1 - E-_2| = {d1:.2e} (bound 1e-3)"),
    );
}

#[test]
fn a09_small_hbar_limit_reaches_the_kernel() {
    // sup over [-2, 6] of |W(hbar = 1e-3) - W_kernel|, demanded < 1e-5.
    // The gap is hbar^2 (2P e^x - 2(alpha-a) Q + Q e^{-x})/(e^{2x} + Q hbar^2),
    // whose supremum on this window sits at the left edge and evaluates to
    // 4.23e-4 at hbar = 1e-3; see the companion scaling test.
    let entry = example_entry();
    let kernel = get_entry("morse", &ParameterBinding::new()).unwrap();
    let hbar = 1e-3;
    let mut sup = 0.0f64;
    let n = 8001;
    for i in 0..n {
        let x = -2.0 + 8.0 * i as f64 / (n - 1) as f64;
        let w_ext = entry.eval_w(x, 2.0, hbar).unwrap();
        let w_kernel = kernel.eval_w(x, 2.0, hbar).unwrap();
        sup = sup.max((w_ext - w_kernel).abs());
    }
    report(
        "09",
        "small-hbar-limit",
        sup < 1e-5,
        &format!("sup |W(hbar=1e-3) - W_kernel| over [-2, 6] = {sup:.3e}, bound 1e-5"),
    );
}

#[test]
fn classical_limit_is_quadratic_in_hbar() {
    // Companion to the criterion above: the gap to the kernel scales as
    // hbar^2, so the limit itself holds even where the fixed bound does not.
    let kernel = get_entry("morse", &ParameterBinding::new()).unwrap();
    let sup_for = |hbar: f64| -> f64 {
        let entry = example_entry();
        let mut sup = 0.0f64;
        for i in 0..2001 {
            let x = -2.0 + 8.0 * i as f64 / 2000.0;
            let w_ext = entry.eval_w(x, 2.0, hbar).unwrap();
            let w_kernel = kernel.eval_w(x, 2.0, hbar).unwrap();
            sup = sup.max((w_ext - w_kernel).abs());
        }
        sup
    };
    let s3 = sup_for(1e-3);
    let s4 = sup_for(1e-4);
    let s5 = sup_for(1e-5);
    let r1 = s3 / s4;
    let r2 = s4 / s5;
    assert!(
        (r1 - 100.0).abs() < 2.0 && (r2 - 100.0).abs() < 2.0,
        "quadratic scaling broken: {s3:.3e} / {s4:.3e} / {s5:.3e}"
    );
    assert!(s4 < 1e-5, "sup at hbar = 1e-4 is {s4:.3e}");
}

#[test]
fn a10_deformation_preserves_the_spectrum() {
    // Large P slows the left-side approach to the threshold (V(-8) is still
    // ~0.05 below it for P = 10, Q = 1), which leaves the n = 2 state with
    // visible amplitude at a wall at -8. The walls go at [-12, 16], where
    // every deformation has flattened out, and dx = 2.5e-3 keeps the
    // stencil error of the stiff P = 10 wells below the tolerance.
    let mut potentials = Vec::new();
    let mut worst_delta = 0.0f64;
    let mut spectra_ok = true;
    for p in [0.0, 3.0, 10.0] {
        for q in [1.0, 5.0] {
            let entry = make_extended_morse(p, q, 5.0, 1.0).unwrap();
            let v = v_minus_on(&entry, -12.0, 16.0, 2.5e-3);
            let eigs = eigen_lowest(&discretize(&v, 1.0).unwrap(), 3).unwrap();
            for (e, target) in eigs.iter().zip([0.0, 5.0, 8.0]) {
                let delta = (e - target).abs();
                worst_delta = worst_delta.max(delta);
                spectra_ok &= delta < 1e-3;
            }
            potentials.push(((p, q), v));
        }
    }
    let mut min_pair_gap = f64::INFINITY;
    for i in 0..potentials.len() {
        for j in i + 1..potentials.len() {
            let gap = potentials[i]
                .1
                .values()
                .iter()
                .zip(potentials[j].1.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            min_pair_gap = min_pair_gap.min(gap);
        }
    }
    report(
        "10",
        "isospectral-deformation",
        spectra_ok && min_pair_gap > 0.1,
        &format!(
            "6 deformations all give {{0, 5, 8}} within {worst_delta:.2e} (bound 1e-3); \
             every pair of potentials differs somewhere by > {min_pair_gap:.2} (bound 0.1)"
        ),
    );
}

#[test]
fn a11_oracle_sanity_checks() {
    // Harmonic well: V = x^2 - 1 on [-10, 10].
    let spec = GridSpec::new(-10.0, 10.0, 4001).unwrap();
    let v = GridFunction::sample(&spec, "harmonic", |x| Ok::<_, ()>(x * x - 1.0)).unwrap();
    let eigs = eigen_lowest(&discretize(&v, 1.0).unwrap(), 4).unwrap();
    let harmonic_err = eigs
        .iter()
        .zip([0.0, 2.0, 4.0, 6.0])
        .map(|(e, t)| (e - t).abs())
        .fold(0.0f64, f64::max);

    // Dirichlet box on (0, pi).
    let nbox = 2000usize;
    let dx = std::f64::consts::PI / (nbox + 1) as f64;
    let vbox = GridFunction::new(dx, dx, vec![0.0; nbox], "box").unwrap();
    let beigs = eigen_lowest(&discretize(&vbox, 1.0).unwrap(), 3).unwrap();
    let box_err = beigs
        .iter()
        .zip([1.0, 4.0, 9.0])
        .map(|(e, t)| (e - t).abs())
        .fold(0.0f64, f64::max);

    // Second-order convergence: halving dx shrinks the harmonic error ~4x.
    let err_for = |n: usize| {
        let spec = GridSpec::new(-10.0, 10.0, n).unwrap();
        let v = GridFunction::sample(&spec, "harmonic", |x| Ok::<_, ()>(x * x - 1.0)).unwrap();
        let e = eigen_lowest(&discretize(&v, 1.0).unwrap(), 4).unwrap();
        (e[3] - 6.0).abs()
    };
    let ratio = err_for(2001) / err_for(4001);

    report(
        "11",
        "oracle-sanity",
        harmonic_err < 1e-4 && box_err < 1e-3 && (3.0..5.0).contains(&ratio),
        &format!(
            "harmonic levels off by {harmonic_err:.2e} < 1e-4; box levels off by \
             {box_err:.2e} < 1e-3; halving dx shrinks the error {ratio:.2}x (expected ~4)"
        ),
    );
}
