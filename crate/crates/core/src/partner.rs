//! SUSY partner machinery: partner potentials `V∓ = W² ∓ ℏW'`, the ladder
//! operators `A± = ∓ℏ d/dx + W`, the zero-mode ground state of `A⁻`, and
//! excited states built by the raising chain.
//!
//! Wavefunctions live on uniform grids. Derivatives use 4th-order stencils
//! and the ground-state integral a 4th-order cumulative rule: the raising
//! chain compounds derivative error, and 2nd-order stencils cannot reach the
//! 1e-6 pointwise targets at dx = 1e-3.

pub use crate::grid::{GridFunction, GridSpec};

use thiserror::Error;

use crate::catalog::SuperpotentialEntry;
use crate::grid::GridError;
use crate::sicheck::{self, SiError};

/// A ground-state tail is considered decayed when the edge sample is below
/// this fraction of the peak. Half-line states with power-law walls (e.g.
/// r^(l+1) near r = 0) sit near 1e-2 on default grids; runaway tails of
/// non-normalizable states sit near 1.
pub const EDGE_DECAY_RATIO: f64 = 0.05;

/// Grid spacing above which ladder applications record an accuracy warning.
pub const COARSE_DX: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PartnerError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("grid extends outside the entry domain: x = {x} not in {domain}")]
    OutsideDomain { x: f64, domain: String },
    #[error("pole inside grid at x = {x}: {detail}")]
    PoleOnGrid { x: f64, detail: String },
    #[error(
        "ground state not normalizable on this grid: {tail} tail does not decay \
         (edge-to-peak ratio {ratio:.3e}, limit {limit:.1e})"
    )]
    NotNormalizable {
        tail: &'static str,
        ratio: f64,
        limit: f64,
    },
    #[error(
        "level {level} at energy E = {energy} is not bound: \
         its eigenfunction is not square integrable"
    )]
    LevelNotBound { level: usize, energy: f64 },
    #[error(
        "psi_{level} is not normalizable on this grid: its chain seed at \
         a = {shifted_a} has a {tail} tail that does not decay \
         (edge-to-peak ratio {ratio:.3e}, limit {limit:.1e})"
    )]
    ChainSeedNotNormalizable {
        level: usize,
        shifted_a: f64,
        tail: &'static str,
        ratio: f64,
        limit: f64,
    },
    #[error(transparent)]
    Si(#[from] SiError),
    #[error("hbar must be positive (got {0})")]
    InvalidHbar(f64),
}

/// Which ladder operator to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderSign {
    /// `A⁺ = -ℏ d/dx + W`
    Raise,
    /// `A⁻ = +ℏ d/dx + W`
    Lower,
}

/// A normalized bound state with its analytic energy.
#[derive(Debug, Clone)]
pub struct BoundState {
    pub psi: GridFunction,
    pub energy: f64,
}

/// Ladder-built states `psi_0 ..= psi_n`, each L2-normalized and sign-fixed.
#[derive(Debug, Clone)]
pub struct WavefunctionSet {
    pub states: Vec<BoundState>,
    pub norm_tolerance: f64,
}

impl WavefunctionSet {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Trapezoid Gram matrix of the stored states.
    pub fn gram(&self) -> Vec<Vec<f64>> {
        let n = self.states.len();
        let mut out = vec![vec![0.0; n]; n];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.states[i]
                    .psi
                    .inner(&self.states[j].psi)
                    .expect("set members share one grid");
            }
        }
        out
    }
}

fn ensure_inside_domain(entry: &SuperpotentialEntry, grid: &GridSpec) -> Result<(), PartnerError> {
    for x in [grid.xmin, grid.xmax] {
        if !entry.domain().contains(x) {
            return Err(PartnerError::OutsideDomain {
                x,
                domain: entry.domain().describe(),
            });
        }
    }
    Ok(())
}

fn sample_expr(
    entry: &SuperpotentialEntry,
    expr: &crate::symexpr::Expr,
    a: f64,
    hbar: f64,
    grid: &GridSpec,
    label: &str,
) -> Result<GridFunction, PartnerError> {
    let binding = entry.binding_for(a, hbar);
    let mut gf = GridFunction::sample(grid, label, |x| expr.eval(x, &binding)).map_err(
        |(x, e)| PartnerError::PoleOnGrid {
            x,
            detail: e.to_string(),
        },
    )?;
    gf.binding = Some(binding);
    Ok(gf)
}

/// Evaluate the partner potentials `V∓ = W² ∓ ℏ W'` on the grid, with `W'`
/// taken analytically.
pub fn partner_potentials(
    entry: &SuperpotentialEntry,
    a: f64,
    hbar: f64,
    grid: &GridSpec,
) -> Result<(GridFunction, GridFunction), PartnerError> {
    if hbar <= 0.0 {
        return Err(PartnerError::InvalidHbar(hbar));
    }
    ensure_inside_domain(entry, grid)?;
    let w = sample_expr(entry, entry.w(), a, hbar, grid, "W")?;
    let wx = sample_expr(entry, &entry.w().diff_x(), a, hbar, grid, "W'")?;
    let minus: Vec<f64> = w
        .values()
        .iter()
        .zip(wx.values())
        .map(|(w, d)| w * w - hbar * d)
        .collect();
    let plus: Vec<f64> = w
        .values()
        .iter()
        .zip(wx.values())
        .map(|(w, d)| w * w + hbar * d)
        .collect();
    let mut v_minus = GridFunction::new(grid.xmin, grid.dx(), minus, "V_minus")?;
    let mut v_plus = GridFunction::new(grid.xmin, grid.dx(), plus, "V_plus")?;
    v_minus.binding = Some(entry.binding_for(a, hbar));
    v_plus.binding = Some(entry.binding_for(a, hbar));
    Ok((v_minus, v_plus))
}

/// Zero mode of `A⁻`: `psi_0 ∝ exp(-∫ W / ℏ)`, normalized on the grid.
///
/// The integral runs from the left grid edge; its arbitrary lower limit is
/// absorbed by normalization. Both tails must decay on the grid, otherwise
/// the state is reported as not normalizable (with the failing tail named).
pub fn ground_state(
    entry: &SuperpotentialEntry,
    a: f64,
    hbar: f64,
    grid: &GridSpec,
) -> Result<GridFunction, PartnerError> {
    if hbar <= 0.0 {
        return Err(PartnerError::InvalidHbar(hbar));
    }
    ensure_inside_domain(entry, grid)?;
    let w = sample_expr(entry, entry.w(), a, hbar, grid, "W")?;
    let integral = w.cumulative_integral();
    let min_i = integral.iter().copied().fold(f64::INFINITY, f64::min);
    let values: Vec<f64> = integral
        .iter()
        .map(|i| (-(i - min_i) / hbar).exp())
        .collect();
    // exp(-(I - min I)/hbar) peaks at exactly 1.
    let left = values[0];
    let right = *values.last().expect("grid non-empty");
    if left > EDGE_DECAY_RATIO {
        return Err(PartnerError::NotNormalizable {
            tail: "left",
            ratio: left,
            limit: EDGE_DECAY_RATIO,
        });
    }
    if right > EDGE_DECAY_RATIO {
        return Err(PartnerError::NotNormalizable {
            tail: "right",
            ratio: right,
            limit: EDGE_DECAY_RATIO,
        });
    }
    let mut psi = GridFunction::new(grid.xmin, grid.dx(), values, "psi_0")?;
    psi.binding = Some(entry.binding_for(a, hbar));
    psi.normalize();
    Ok(psi)
}

/// Apply a ladder operator: `(∓ℏ d/dx + W) psi` with 4th-order grid
/// derivatives (one-sided at the edges).
pub fn apply_a(
    entry: &SuperpotentialEntry,
    a: f64,
    hbar: f64,
    sign: LadderSign,
    psi: &GridFunction,
) -> Result<GridFunction, PartnerError> {
    if hbar <= 0.0 {
        return Err(PartnerError::InvalidHbar(hbar));
    }
    let grid = GridSpec::new(psi.x0(), psi.last_x(), psi.len())?;
    let w = sample_expr(entry, entry.w(), a, hbar, &grid, "W")?;
    let dpsi = psi.derivative();
    let values: Vec<f64> = (0..psi.len())
        .map(|i| {
            let drift = w.values()[i] * psi.values()[i];
            match sign {
                LadderSign::Raise => -hbar * dpsi.values()[i] + drift,
                LadderSign::Lower => hbar * dpsi.values()[i] + drift,
            }
        })
        .collect();
    let label = match sign {
        LadderSign::Raise => format!("A+[{}]", psi.label),
        LadderSign::Lower => format!("A-[{}]", psi.label),
    };
    let mut out = GridFunction::new(psi.x0(), psi.dx(), values, &label)?;
    out.binding = Some(entry.binding_for(a, hbar));
    out.warnings = psi.warnings.clone();
    if psi.dx() > COARSE_DX {
        out.warnings.push(format!(
            "grid spacing {} exceeds {COARSE_DX}; ladder derivative accuracy degraded",
            psi.dx()
        ));
    }
    Ok(out)
}

/// Build `psi_0 ..= psi_{n_max}` by the raising chain
/// `psi_n(a) ∝ A⁺(a_0)…A⁺(a_{n-1}) psi_0(a_n)` with `a_k = a + k ℏ`,
/// dividing by `sqrt(g(a_n) - g(a_k))` at every step.
///
/// Fails when level `n_max` is not below the bound-state count implied by
/// `g` and the continuum threshold.
pub fn excited_states(
    entry: &SuperpotentialEntry,
    a: f64,
    hbar: f64,
    n_max: usize,
    grid: &GridSpec,
) -> Result<WavefunctionSet, PartnerError> {
    if hbar <= 0.0 {
        return Err(PartnerError::InvalidHbar(hbar));
    }
    let spectrum = sicheck::analytic_spectrum(entry, a, hbar, n_max + 1)?;
    if spectrum.bound_count <= n_max {
        let level = spectrum.bound_count;
        return Err(PartnerError::LevelNotBound {
            level,
            energy: spectrum.analytic_energies[level],
        });
    }
    let g_at = |aa: f64| -> Result<f64, PartnerError> {
        entry.eval_g(aa, hbar).map_err(|e| SiError::GEval(e).into())
    };
    let mut states = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let a_n = a + n as f64 * hbar;
        let g_n = g_at(a_n)?;
        let mut phi = ground_state(entry, a_n, hbar, grid).map_err(|e| match e {
            PartnerError::NotNormalizable { tail, ratio, limit } => {
                PartnerError::ChainSeedNotNormalizable {
                    level: n,
                    shifted_a: a_n,
                    tail,
                    ratio,
                    limit,
                }
            }
            other => other,
        })?;
        for k in (0..n).rev() {
            let a_k = a + k as f64 * hbar;
            phi = apply_a(entry, a_k, hbar, LadderSign::Raise, &phi)?;
            let step_energy = g_n - g_at(a_k)?;
            debug_assert!(step_energy > 0.0, "bound ladder energies are positive");
            let scale = step_energy.sqrt().recip();
            for v in phi.values_mut() {
                *v *= scale;
            }
        }
        phi.normalize();
        enforce_sign_convention(&mut phi);
        phi.label = format!("psi_{n}");
        states.push(BoundState {
            psi: phi,
            energy: spectrum.analytic_energies[n],
        });
    }
    Ok(WavefunctionSet {
        states,
        norm_tolerance: 1e-6,
    })
}

/// Fix the overall sign so the value at the leftmost interior maximum of
/// |psi| is positive. Tail samples below 1e-8 of the peak are ignored so
/// floating-point noise cannot fake a maximum.
pub fn enforce_sign_convention(psi: &mut GridFunction) {
    let peak = psi.max_abs();
    if peak == 0.0 {
        return;
    }
    let floor = 1e-8 * peak;
    let vals = psi.values();
    let n = vals.len();
    let mut anchor = None;
    for i in 1..n - 1 {
        let v = vals[i].abs();
        if v >= floor && v >= vals[i - 1].abs() && v >= vals[i + 1].abs() {
            anchor = Some(i);
            break;
        }
    }
    let anchor = anchor.unwrap_or_else(|| {
        vals.iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .expect("non-empty grid")
    });
    if psi.values()[anchor] < 0.0 {
        for v in psi.values_mut() {
            *v = -*v;
        }
    }
}

/// Count sign changes, skipping samples below 1e-9 of the peak so decayed
/// tails do not contribute noise crossings.
pub fn count_nodes(psi: &GridFunction) -> usize {
    let floor = 1e-9 * psi.max_abs();
    let mut count = 0;
    let mut last: Option<f64> = None;
    for &v in psi.values() {
        if v.abs() <= floor {
            continue;
        }
        if let Some(prev) = last {
            if prev * v < 0.0 {
                count += 1;
            }
        }
        last = Some(v);
    }
    count
}

/// Positions of sign changes, linearly interpolated between the bracketing
/// significant samples.
pub fn node_positions(psi: &GridFunction) -> Vec<f64> {
    let floor = 1e-9 * psi.max_abs();
    let mut out = Vec::new();
    let mut last: Option<(usize, f64)> = None;
    for (i, &v) in psi.values().iter().enumerate() {
        if v.abs() <= floor {
            continue;
        }
        if let Some((j, prev)) = last {
            if prev * v < 0.0 {
                let xj = psi.x(j);
                let xi = psi.x(i);
                out.push(xj + (xi - xj) * prev / (prev - v));
            }
        }
        last = Some((i, v));
    }
    out
}
