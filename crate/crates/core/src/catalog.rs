//! Superpotential catalog: the ten conventional entries in additive-parameter
//! form together with their `g(a)`, plus the extended Morse superpotential.
//!
//! Every entry is expressed in terms of the additive parameter `a` (shifted
//! as `a -> a + hbar`), the spatial variable `x`, and auxiliary parameters.
//! Entries whose textbook coupling decreases under the shift are stored in
//! reflected form `A = alpha - a`, so that the same `a -> a + hbar` rule
//! applies everywhere. The choice of direction per entry is locked in by
//! [`validate_conventional`]: the wrong direction leaves an x-dependent
//! residual in the first shape-invariance equation.

use serde::Serialize;
use thiserror::Error;

use crate::symexpr::{parse, EvalError, Expr, ParameterBinding};

/// Tolerance for the two shape-invariance PDE residuals of conventional
/// entries. Both vanish algebraically; anything above round-off is a bug.
pub const PDE_RESIDUAL_TOL: f64 = 1e-10;

/// Spatial domain on which an entry's potentials live.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpatialDomain {
    FullLine,
    /// r > 0.
    HalfLine,
    /// Open interval (lo, hi).
    Interval { lo: f64, hi: f64 },
}

impl SpatialDomain {
    pub fn contains(&self, x: f64) -> bool {
        match self {
            SpatialDomain::FullLine => true,
            SpatialDomain::HalfLine => x > 0.0,
            SpatialDomain::Interval { lo, hi } => x > *lo && x < *hi,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            SpatialDomain::FullLine => "x in (-inf, inf)".to_owned(),
            SpatialDomain::HalfLine => "r in (0, inf)".to_owned(),
            SpatialDomain::Interval { lo, hi } => format!("x in ({lo}, {hi})"),
        }
    }
}

/// How the entry's textbook coupling maps onto the additive parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AdditiveParametrization {
    /// The coupling is `a` itself and grows with each shift.
    Direct,
    /// The coupling is `alpha - a` and shrinks with each shift.
    Reflected,
    /// `a` does not occur in W; only `g` moves under the shift.
    Inert,
}

/// Hard admissibility constraint on one auxiliary parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    Positive,
    Unconstrained,
}

impl Constraint {
    fn admits(&self, value: f64) -> bool {
        match self {
            Constraint::Positive => value > 0.0,
            Constraint::Unconstrained => true,
        }
    }

    pub fn describe(&self, name: &str) -> String {
        match self {
            Constraint::Positive => format!("require {name} > 0"),
            Constraint::Unconstrained => format!("{name} unconstrained"),
        }
    }
}

/// Auxiliary parameter slot: name, default, and hard constraint.
#[derive(Debug, Clone, Copy)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: f64,
    pub constraint: Constraint,
}

/// Ranges used when drawing random in-domain samples for residual checks.
#[derive(Debug, Clone, Copy)]
pub struct SampleRegion {
    pub x_lo: f64,
    pub x_hi: f64,
    pub a_lo: f64,
    pub a_hi: f64,
}

/// A named superpotential with its shape-invariance data.
#[derive(Debug, Clone)]
pub struct SuperpotentialEntry {
    name: String,
    w: Expr,
    g: Expr,
    aux: ParameterBinding,
    param_specs: &'static [ParamSpec],
    domain: SpatialDomain,
    parametrization: AdditiveParametrization,
    hbar_dependent: bool,
    pinned_hbar: Option<f64>,
    sample_region: SampleRegion,
    default_a: f64,
    notes: &'static str,
}

impl SuperpotentialEntry {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn w(&self) -> &Expr {
        &self.w
    }

    pub fn g(&self) -> &Expr {
        &self.g
    }

    pub fn aux(&self) -> &ParameterBinding {
        &self.aux
    }

    pub fn domain(&self) -> SpatialDomain {
        self.domain
    }

    pub fn parametrization(&self) -> AdditiveParametrization {
        self.parametrization
    }

    pub fn hbar_dependent(&self) -> bool {
        self.hbar_dependent
    }

    /// `hbar` recorded at construction time (extended entries only); used as
    /// a default by front ends, never overriding an explicit argument.
    pub fn pinned_hbar(&self) -> Option<f64> {
        self.pinned_hbar
    }

    pub fn sample_region(&self) -> SampleRegion {
        self.sample_region
    }

    /// Additive-parameter value used by front ends when none is given.
    pub fn default_a(&self) -> f64 {
        self.default_a
    }

    /// Soft admissibility notes (conditions that affect normalizability or
    /// bound-state count but are reported rather than rejected).
    pub fn notes(&self) -> &'static str {
        self.notes
    }

    pub fn param_specs(&self) -> &'static [ParamSpec] {
        self.param_specs
    }

    /// Full binding for evaluating `w` or `g`: auxiliary values plus the
    /// additive parameter and `hbar`.
    pub fn binding_for(&self, a: f64, hbar: f64) -> ParameterBinding {
        let mut b = self.aux.clone();
        b.set("a", a);
        b.set("hbar", hbar);
        b
    }

    pub fn eval_w(&self, x: f64, a: f64, hbar: f64) -> Result<f64, EvalError> {
        self.w.eval(x, &self.binding_for(a, hbar))
    }

    /// `g` never depends on `x`; evaluate it at the domain-safe point 1.
    pub fn eval_g(&self, a: f64, hbar: f64) -> Result<f64, EvalError> {
        self.g.eval(1.0, &self.binding_for(a, hbar))
    }

    /// Interval used by default for shape-invariance residual grids: inside
    /// the domain, clear of the poles at its edges.
    pub fn default_check_interval(&self) -> (f64, f64) {
        match self.domain {
            SpatialDomain::FullLine => (-5.0, 5.0),
            SpatialDomain::HalfLine => (0.4, 8.0),
            SpatialDomain::Interval { lo, hi } => (lo + 0.15, hi - 0.15),
        }
    }

    /// Interval used by default when handing potentials to the eigensolver.
    pub fn default_oracle_interval(&self) -> (f64, f64) {
        match self.domain {
            SpatialDomain::FullLine => (-8.0, 12.0),
            SpatialDomain::HalfLine => (0.005, 40.0),
            SpatialDomain::Interval { lo, hi } => (lo, hi),
        }
    }
}

/// Catalog construction/validation errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("unknown catalog entry `{name}`")]
    UnknownEntry { name: String },
    #[error("constraint violated for `{entry}`: {constraint} (got {param} = {value}){hint}")]
    ConstraintViolation {
        entry: String,
        param: String,
        constraint: String,
        value: f64,
        hint: String,
    },
    #[error("`{name}` carries explicit hbar dependence; the conventional PDE check does not apply")]
    NotConventional { name: String },
    #[error("unknown parameter `{param}` for entry `{entry}`")]
    UnknownParameter { entry: String, param: String },
}

struct EntryDef {
    name: &'static str,
    w: &'static str,
    g: &'static str,
    params: &'static [ParamSpec],
    domain: SpatialDomain,
    parametrization: AdditiveParametrization,
    sample_region: SampleRegion,
    default_a: f64,
    notes: &'static str,
}

const PI: f64 = std::f64::consts::PI;

static DEFS: &[EntryDef] = &[
    EntryDef {
        name: "harmonic",
        w: "0.5*omega*x",
        g: "omega*a",
        params: &[ParamSpec {
            name: "omega",
            default: 2.0,
            constraint: Constraint::Positive,
        }],
        domain: SpatialDomain::FullLine,
        parametrization: AdditiveParametrization::Inert,
        sample_region: SampleRegion {
            x_lo: -4.0,
            x_hi: 4.0,
            a_lo: 0.0,
            a_hi: 3.0,
        },
        default_a: 0.0,
        notes: "all levels bound",
    },
    EntryDef {
        name: "coulomb",
        w: "e2/(2*a) - a/x",
        g: "-e2^2/(4*a^2)",
        params: &[ParamSpec {
            name: "e2",
            default: 2.0,
            constraint: Constraint::Positive,
        }],
        domain: SpatialDomain::HalfLine,
        parametrization: AdditiveParametrization::Direct,
        sample_region: SampleRegion {
            x_lo: 0.3,
            x_hi: 8.0,
            a_lo: 1.0,
            a_hi: 4.0,
        },
        default_a: 2.0,
        notes: "a = l + 1 with a > 0; infinitely many bound levels; \
                near the origin psi_0 ~ r^a, so a >= 2 keeps grid solvers accurate",
    },
    EntryDef {
        name: "oscillator3d",
        w: "0.5*omega*x - a/x",
        g: "2*omega*a",
        params: &[ParamSpec {
            name: "omega",
            default: 2.0,
            constraint: Constraint::Positive,
        }],
        domain: SpatialDomain::HalfLine,
        parametrization: AdditiveParametrization::Direct,
        sample_region: SampleRegion {
            x_lo: 0.3,
            x_hi: 8.0,
            a_lo: 1.0,
            a_hi: 4.0,
        },
        default_a: 2.0,
        notes: "a = l + 1 with a > 0; all levels bound",
    },
    EntryDef {
        name: "morse",
        w: "(alpha - a) - B*exp(-x)",
        g: "-(alpha - a)^2",
        params: &[
            ParamSpec {
                name: "B",
                default: 1.0,
                constraint: Constraint::Positive,
            },
            ParamSpec {
                name: "alpha",
                default: 5.0,
                constraint: Constraint::Unconstrained,
            },
        ],
        domain: SpatialDomain::FullLine,
        parametrization: AdditiveParametrization::Reflected,
        sample_region: SampleRegion {
            x_lo: -2.0,
            x_hi: 6.0,
            a_lo: 0.5,
            a_hi: 3.0,
        },
        default_a: 2.0,
        notes: "unbroken supersymmetry requires alpha - a > 0",
    },
    EntryDef {
        name: "rosen-morse-1",
        w: "-a*cot(x) - B/a",
        g: "a^2 - B^2/a^2",
        params: &[ParamSpec {
            name: "B",
            default: 1.0,
            constraint: Constraint::Positive,
        }],
        domain: SpatialDomain::Interval { lo: 0.0, hi: PI },
        parametrization: AdditiveParametrization::Direct,
        sample_region: SampleRegion {
            x_lo: 0.15,
            x_hi: PI - 0.15,
            a_lo: 0.5,
            a_hi: 3.0,
        },
        default_a: 2.0,
        notes: "a > 0; all levels bound on the interval",
    },
    EntryDef {
        name: "rosen-morse-2",
        w: "(alpha - a)*tanh(x) + B/(alpha - a)",
        g: "-(alpha - a)^2 - B^2/(alpha - a)^2",
        params: &[
            ParamSpec {
                name: "B",
                default: 1.0,
                constraint: Constraint::Positive,
            },
            ParamSpec {
                name: "alpha",
                default: 5.0,
                constraint: Constraint::Unconstrained,
            },
        ],
        domain: SpatialDomain::FullLine,
        parametrization: AdditiveParametrization::Reflected,
        sample_region: SampleRegion {
            x_lo: -4.0,
            x_hi: 4.0,
            a_lo: 0.5,
            a_hi: 3.0,
        },
        default_a: 2.0,
        notes: "unbroken supersymmetry requires 0 < B < (alpha - a)^2",
    },
    EntryDef {
        name: "eckart",
        w: "-a*coth(x) + B/a",
        g: "-a^2 - B^2/a^2",
        params: &[ParamSpec {
            name: "B",
            default: 22.0,
            constraint: Constraint::Positive,
        }],
        domain: SpatialDomain::HalfLine,
        parametrization: AdditiveParametrization::Direct,
        sample_region: SampleRegion {
            x_lo: 0.3,
            x_hi: 8.0,
            a_lo: 0.5,
            a_hi: 2.0,
        },
        default_a: 3.0,
        notes: "bound levels require B > a^2; the potential carries a Coulomb-like \
                -2B/r core, so grid solvers want a fine spacing near the origin",
    },
    EntryDef {
        name: "scarf-1",
        w: "a*tan(x) - B*sec(x)",
        g: "a^2",
        params: &[ParamSpec {
            name: "B",
            default: 0.5,
            constraint: Constraint::Positive,
        }],
        domain: SpatialDomain::Interval {
            lo: -PI / 2.0,
            hi: PI / 2.0,
        },
        parametrization: AdditiveParametrization::Direct,
        sample_region: SampleRegion {
            x_lo: -PI / 2.0 + 0.15,
            x_hi: PI / 2.0 - 0.15,
            a_lo: 0.8,
            a_hi: 3.0,
        },
        default_a: 2.0,
        notes: "normalizable ground state requires a > B > 0; \
                wavefunctions vanish like d^(a -+ B) at the walls",
    },
    EntryDef {
        name: "scarf-2",
        w: "(alpha - a)*tanh(x) + B*sech(x)",
        g: "-(alpha - a)^2",
        params: &[
            ParamSpec {
                name: "B",
                default: 1.0,
                constraint: Constraint::Positive,
            },
            ParamSpec {
                name: "alpha",
                default: 5.0,
                constraint: Constraint::Unconstrained,
            },
        ],
        domain: SpatialDomain::FullLine,
        parametrization: AdditiveParametrization::Reflected,
        sample_region: SampleRegion {
            x_lo: -4.0,
            x_hi: 4.0,
            a_lo: 0.5,
            a_hi: 3.0,
        },
        default_a: 2.0,
        notes: "unbroken supersymmetry requires alpha - a > 0",
    },
    EntryDef {
        name: "gen-poschl-teller",
        w: "(alpha - a)*coth(x) - B*csch(x)",
        g: "-(alpha - a)^2",
        params: &[
            ParamSpec {
                name: "B",
                default: 5.0,
                constraint: Constraint::Positive,
            },
            ParamSpec {
                name: "alpha",
                default: 5.0,
                constraint: Constraint::Unconstrained,
            },
        ],
        domain: SpatialDomain::HalfLine,
        parametrization: AdditiveParametrization::Reflected,
        sample_region: SampleRegion {
            x_lo: 0.3,
            x_hi: 8.0,
            a_lo: 0.5,
            a_hi: 2.5,
        },
        default_a: 2.0,
        notes: "normalizable ground state requires B > alpha - a > 0",
    },
];

// The extended entry is stored in a rearrangement of its textbook form,
//   (alpha - a) - exp(-x) + hbar^2*(2*P*exp(x) - 2*(alpha - a)*Q + Q*exp(-x))
//                           / (exp(2*x) + Q*hbar^2),
// obtained by folding the kernel's exp(-x) into the fraction. The two forms
// are algebraically identical; the folded one evaluates without the large
// cancellations the textbook form hits for x << 0 (see tests).
const EXTENDED_MORSE_W: &str =
    "(alpha - a) + ((2*hbar^2*P - 1)*exp(x) - 2*(alpha - a)*Q*hbar^2)/(exp(2*x) + Q*hbar^2)";
const EXTENDED_MORSE_G: &str = "-(alpha - a)^2";

static EXTENDED_MORSE_PARAMS: &[ParamSpec] = &[
    ParamSpec {
        name: "P",
        default: 3.0,
        constraint: Constraint::Unconstrained,
    },
    ParamSpec {
        name: "Q",
        default: 5.0,
        constraint: Constraint::Positive,
    },
    ParamSpec {
        name: "alpha",
        default: 5.0,
        constraint: Constraint::Unconstrained,
    },
];

pub const EXTENDED_MORSE: &str = "extended-morse";

/// Names of every catalog entry, conventional entries first.
pub fn names() -> Vec<&'static str> {
    let mut out: Vec<&'static str> = DEFS.iter().map(|d| d.name).collect();
    out.push(EXTENDED_MORSE);
    out
}

fn resolve_aux(
    entry: &str,
    specs: &'static [ParamSpec],
    aux: &ParameterBinding,
) -> Result<ParameterBinding, CatalogError> {
    for (name, _) in aux.iter() {
        if !specs.iter().any(|s| s.name == name) {
            return Err(CatalogError::UnknownParameter {
                entry: entry.to_owned(),
                param: name.to_owned(),
            });
        }
    }
    let mut resolved = ParameterBinding::new();
    for spec in specs {
        let value = aux.get(spec.name).unwrap_or(spec.default);
        if !spec.constraint.admits(value) {
            let hint = if entry == EXTENDED_MORSE && spec.name == "Q" {
                "; the denominator exp(2*x) + Q*hbar^2 would vanish on the real line".to_owned()
            } else {
                String::new()
            };
            return Err(CatalogError::ConstraintViolation {
                entry: entry.to_owned(),
                param: spec.name.to_owned(),
                constraint: spec.constraint.describe(spec.name),
                value,
                hint,
            });
        }
        resolved.set(spec.name, value);
    }
    Ok(resolved)
}

/// Look up a catalog entry by name, filling missing auxiliary parameters
/// from the entry defaults and validating hard constraints.
pub fn get_entry(name: &str, aux: &ParameterBinding) -> Result<SuperpotentialEntry, CatalogError> {
    if name == EXTENDED_MORSE {
        let resolved = resolve_aux(name, EXTENDED_MORSE_PARAMS, aux)?;
        return Ok(extended_morse_from_aux(resolved, None));
    }
    let def = DEFS
        .iter()
        .find(|d| d.name == name)
        .ok_or_else(|| CatalogError::UnknownEntry {
            name: name.to_owned(),
        })?;
    let resolved = resolve_aux(name, def.params, aux)?;
    Ok(SuperpotentialEntry {
        name: def.name.to_owned(),
        w: parse(def.w).expect("catalog W text parses"),
        g: parse(def.g).expect("catalog g text parses"),
        aux: resolved,
        param_specs: def.params,
        domain: def.domain,
        parametrization: def.parametrization,
        hbar_dependent: false,
        pinned_hbar: None,
        sample_region: def.sample_region,
        default_a: def.default_a,
        notes: def.notes,
    })
}

fn extended_morse_from_aux(
    aux: ParameterBinding,
    pinned_hbar: Option<f64>,
) -> SuperpotentialEntry {
    SuperpotentialEntry {
        name: EXTENDED_MORSE.to_owned(),
        w: parse(EXTENDED_MORSE_W).expect("extended W text parses"),
        g: parse(EXTENDED_MORSE_G).expect("extended g text parses"),
        aux,
        param_specs: EXTENDED_MORSE_PARAMS,
        domain: SpatialDomain::FullLine,
        parametrization: AdditiveParametrization::Reflected,
        hbar_dependent: true,
        pinned_hbar,
        sample_region: SampleRegion {
            x_lo: -0.5,
            x_hi: 6.0,
            a_lo: 0.5,
            a_hi: 3.5,
        },
        default_a: 2.0,
        notes: "requires Q > 0; normalizable ground state requires alpha - a > 0; \
                spectrum is independent of P and Q",
    }
}

/// Build the extended Morse superpotential for given deformation parameters.
///
/// `Q <= 0` is rejected: the denominator `exp(2x) + Q*hbar^2` would vanish at
/// `x = ln(-Q*hbar^2)/2`, putting a pole on the real line. `hbar` must be
/// positive (it is the parameter shift as well as an explicit coefficient).
pub fn make_extended_morse(
    p: f64,
    q: f64,
    alpha: f64,
    hbar: f64,
) -> Result<SuperpotentialEntry, CatalogError> {
    let mut aux = ParameterBinding::new();
    aux.set("P", p);
    aux.set("Q", q);
    aux.set("alpha", alpha);
    let resolved = resolve_aux(EXTENDED_MORSE, EXTENDED_MORSE_PARAMS, &aux)?;
    if hbar <= 0.0 {
        return Err(CatalogError::ConstraintViolation {
            entry: EXTENDED_MORSE.to_owned(),
            param: "hbar".to_owned(),
            constraint: "require hbar > 0".to_owned(),
            value: hbar,
            hint: String::new(),
        });
    }
    Ok(extended_morse_from_aux(resolved, Some(hbar)))
}

/// Build an ad-hoc entry from explicit `W` and `g` expressions.
///
/// Used for user-supplied superpotentials (CLI `--w-expr`/`--g-expr`) and for
/// deliberately broken inputs in tests. No constraints are attached; any
/// parameter other than `a`, `hbar`, and `x` must be bound through `aux`.
pub fn custom_entry(
    name: &str,
    w: Expr,
    g: Expr,
    domain: SpatialDomain,
    aux: ParameterBinding,
) -> SuperpotentialEntry {
    let hbar_dependent = w.contains_param("hbar");
    let sample_region = match domain {
        SpatialDomain::FullLine => SampleRegion {
            x_lo: -4.0,
            x_hi: 4.0,
            a_lo: 0.5,
            a_hi: 3.0,
        },
        SpatialDomain::HalfLine => SampleRegion {
            x_lo: 0.3,
            x_hi: 8.0,
            a_lo: 0.5,
            a_hi: 3.0,
        },
        SpatialDomain::Interval { lo, hi } => SampleRegion {
            x_lo: lo + 0.15,
            x_hi: hi - 0.15,
            a_lo: 0.5,
            a_hi: 3.0,
        },
    };
    SuperpotentialEntry {
        name: name.to_owned(),
        w,
        g,
        aux,
        param_specs: &[],
        domain,
        parametrization: AdditiveParametrization::Direct,
        hbar_dependent,
        pinned_hbar: None,
        sample_region,
        default_a: 1.0,
        notes: "user supplied",
    }
}

/// One sample skipped by [`validate_conventional`] because evaluation hit a
/// pole or left the real domain.
#[derive(Debug, Clone, Serialize)]
pub struct FlaggedSample {
    pub x: f64,
    pub a: f64,
    pub reason: String,
}

/// Residuals of the two conventional shape-invariance PDEs over a sample set.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub entry: String,
    /// max |W dW/da - dW/dx + (dg/da)/2| over clean samples.
    pub max_first_order: f64,
    /// max |d^3 W / da^2 dx| over clean samples.
    pub max_mixed_third: f64,
    pub samples_checked: usize,
    pub flagged: Vec<FlaggedSample>,
    pub tolerance: f64,
    pub pass: bool,
}

/// Evaluate the two PDE residuals that characterize conventional entries at
/// the given `(x, a)` samples.
///
/// Samples that hit a pole are flagged and skipped, not fatal. The check
/// passes when both residual maxima over clean samples stay below
/// [`PDE_RESIDUAL_TOL`].
pub fn validate_conventional(
    entry: &SuperpotentialEntry,
    samples: &[(f64, f64)],
) -> Result<ResidualReport, CatalogError> {
    if entry.hbar_dependent() {
        return Err(CatalogError::NotConventional {
            name: entry.name().to_owned(),
        });
    }
    let w = entry.w();
    let w_a = w.diff_param("a");
    let w_x = w.diff_x();
    let dg = entry.g().diff_param("a");
    let mixed_third = w_a.diff_param("a").diff_x();

    let mut max_first = 0.0f64;
    let mut max_third = 0.0f64;
    let mut flagged = Vec::new();
    let mut checked = 0usize;
    for &(x, a) in samples {
        let binding = entry.binding_for(a, 0.0);
        let evaluated = (|| -> Result<(f64, f64), EvalError> {
            let wv = w.eval(x, &binding)?;
            let wav = w_a.eval(x, &binding)?;
            let wxv = w_x.eval(x, &binding)?;
            let dgv = dg.eval(x, &binding)?;
            let r1 = wv * wav - wxv + 0.5 * dgv;
            let r3 = mixed_third.eval(x, &binding)?;
            Ok((r1.abs(), r3.abs()))
        })();
        match evaluated {
            Ok((r1, r3)) => {
                max_first = max_first.max(r1);
                max_third = max_third.max(r3);
                checked += 1;
            }
            Err(err) => flagged.push(FlaggedSample {
                x,
                a,
                reason: err.to_string(),
            }),
        }
    }
    let pass = checked > 0 && max_first < PDE_RESIDUAL_TOL && max_mixed_ok(max_third);
    Ok(ResidualReport {
        entry: entry.name().to_owned(),
        max_first_order: max_first,
        max_mixed_third: max_third,
        samples_checked: checked,
        flagged,
        tolerance: PDE_RESIDUAL_TOL,
        pass,
    })
}

fn max_mixed_ok(max_third: f64) -> bool {
    max_third < PDE_RESIDUAL_TOL
}

/// Draw `count` random `(x, a)` samples from the entry's sample region.
pub fn sample_points(entry: &SuperpotentialEntry, count: usize, seed: u64) -> Vec<(f64, f64)> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let r = entry.sample_region();
    (0..count)
        .map(|_| {
            (
                rng.gen_range(r.x_lo..r.x_hi),
                rng.gen_range(r.a_lo..r.a_hi),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn empty() -> ParameterBinding {
        ParameterBinding::new()
    }

    #[test]
    fn catalog_has_eleven_entries() {
        assert_eq!(names().len(), 11);
    }

    #[test]
    fn harmonic_entry_matches_table_form() {
        let e = get_entry("harmonic", &empty()).unwrap();
        // W = omega*x/2 with omega = 2 -> W(x) = x; g(a) = omega*a.
        assert_eq!(e.eval_w(1.5, 0.0, 1.0).unwrap(), 1.5);
        assert_eq!(e.eval_g(3.0, 1.0).unwrap(), 6.0);
        assert_eq!(e.domain(), SpatialDomain::FullLine);
    }

    #[test]
    fn morse_entry_matches_table_form() {
        let e = get_entry("morse", &empty()).unwrap();
        // W = (alpha - a) - B e^{-x}; defaults alpha=5, B=1.
        let v = e.eval_w(0.0, 2.0, 1.0).unwrap();
        assert!((v - 2.0).abs() < 1e-15);
        // g = -(alpha - a)^2
        assert!((e.eval_g(2.0, 1.0).unwrap() + 9.0).abs() < 1e-15);
    }

    #[test]
    fn unknown_entry_is_an_error() {
        assert!(matches!(
            get_entry("nosuch", &empty()),
            Err(CatalogError::UnknownEntry { .. })
        ));
    }

    #[test]
    fn extended_morse_value_at_origin() {
        // P=3, Q=5, alpha=5, hbar=1, a=2, x=0 -> -7/6.
        let e = make_extended_morse(3.0, 5.0, 5.0, 1.0).unwrap();
        let v = e.eval_w(0.0, 2.0, 1.0).unwrap();
        assert!((v - (-7.0 / 6.0)).abs() < 1e-14, "got {v}");
    }

    #[test]
    fn extended_morse_rejects_nonpositive_q() {
        let err = make_extended_morse(3.0, -1.0, 5.0, 1.0).unwrap_err();
        match err {
            CatalogError::ConstraintViolation { param, .. } => assert_eq!(param, "Q"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn extended_morse_reduces_to_kernel_as_hbar_vanishes() {
        let e = get_entry(EXTENDED_MORSE, &empty()).unwrap();
        for &x in &[-2.0, -0.5, 0.0, 1.0, 4.0] {
            let w = e.eval_w(x, 2.0, 1e-8).unwrap();
            let kernel = 3.0 - f64::exp(-x);
            assert!((w - kernel).abs() < 1e-12, "x={x}: {w} vs {kernel}");
        }
    }

    #[test]
    fn extended_morse_asymptotics_are_reflected() {
        let e = get_entry(EXTENDED_MORSE, &empty()).unwrap();
        let right = e.eval_w(20.0, 2.0, 1.0).unwrap();
        let left = e.eval_w(-20.0, 2.0, 1.0).unwrap();
        assert!((right - 3.0).abs() < 1e-6, "W(+20) = {right}");
        assert!((left + 3.0).abs() < 1e-6, "W(-20) = {left}");
        // Approach at finite distance: W(+10) ~ alpha - a within 1e-3.
        let w10 = e.eval_w(10.0, 2.0, 1.0).unwrap();
        assert!((w10 - 3.0).abs() < 1e-3);
    }

    #[test]
    fn extended_w_changes_sign_when_susy_is_unbroken() {
        // Opposite-sign asymptotes for alpha - a > 0, independent of P, Q.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(19);
        for _ in 0..10 {
            let alpha = rng.gen_range(3.0..7.0);
            let coupling = rng.gen_range(0.5..4.0);
            let a = alpha - coupling;
            let p = rng.gen_range(-5.0..5.0);
            let q = rng.gen_range(0.2..10.0);
            let hbar = rng.gen_range(0.2..1.5);
            let e = make_extended_morse(p, q, alpha, hbar).unwrap();
            let left = e.eval_w(-20.0, a, hbar).unwrap();
            let right = e.eval_w(20.0, a, hbar).unwrap();
            assert!(left < 0.0 && right > 0.0, "W(-20)={left}, W(20)={right}");
            assert!((left.abs() - coupling).abs() < 1e-6);
            assert!((right.abs() - coupling).abs() < 1e-6);
        }
    }

    #[test]
    fn folded_extended_form_equals_textbook_form() {
        let textbook = parse(
            "(alpha - a) - exp(-x) + hbar^2*(2*P*exp(x) - 2*(alpha - a)*Q + Q*exp(-x))\
             /(exp(2*x) + Q*hbar^2)",
        )
        .unwrap();
        let e = get_entry(EXTENDED_MORSE, &empty()).unwrap();
        for &x in &[-5.0, -2.0, -0.5, 0.0, 0.7, 2.0, 5.0] {
            for &hbar in &[0.3, 1.0] {
                let b = e.binding_for(2.2, hbar);
                let lhs = e.w().eval(x, &b).unwrap();
                let rhs = textbook.eval(x, &b).unwrap();
                assert!(
                    (lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()),
                    "x={x}, hbar={hbar}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn all_conventional_entries_pass_the_pde_gate() {
        for def in DEFS {
            let entry = get_entry(def.name, &empty()).unwrap();
            let samples = sample_points(&entry, 200, 7);
            let report = validate_conventional(&entry, &samples).unwrap();
            assert!(
                report.pass,
                "{}: first-order {:.3e}, mixed-third {:.3e}, {} flagged",
                def.name,
                report.max_first_order,
                report.max_mixed_third,
                report.flagged.len()
            );
            assert!(report.flagged.is_empty(), "{} flagged samples", def.name);
        }
    }

    #[test]
    fn scarf_1_residual_is_zero() {
        // W a tan x - B sec x with g = a^2: W dW/da - dW/dx = -a, (dg/da)/2 = a.
        let entry = get_entry("scarf-1", &empty()).unwrap();
        let report = validate_conventional(&entry, &[(0.3, 1.2), (-0.8, 2.0)]).unwrap();
        assert!(report.pass);
    }

    #[test]
    fn sign_flipped_g_fails_the_gate() {
        let mut entry = get_entry("morse", &empty()).unwrap();
        entry.g = parse("(alpha - a)^2").unwrap();
        let report = validate_conventional(&entry, &[(0.5, 2.0)]).unwrap();
        assert!(!report.pass);
        // Residual is -2(alpha - a) = -6 at a = 2.
        assert!((report.max_first_order - 6.0).abs() < 1e-12);
    }

    #[test]
    fn validate_rejects_extended_entry() {
        let entry = get_entry(EXTENDED_MORSE, &empty()).unwrap();
        assert!(matches!(
            validate_conventional(&entry, &[(0.0, 2.0)]),
            Err(CatalogError::NotConventional { .. })
        ));
    }

    #[test]
    fn pole_samples_are_flagged_not_fatal() {
        let entry = get_entry("rosen-morse-1", &empty()).unwrap();
        // x = 0 sits on the cot pole.
        let report = validate_conventional(&entry, &[(0.0, 1.0), (1.0, 1.0)]).unwrap();
        assert_eq!(report.flagged.len(), 1);
        assert_eq!(report.samples_checked, 1);
        assert!(report.pass);
    }

    #[test]
    fn unknown_parameter_rejected() {
        let mut aux = ParameterBinding::new();
        aux.set("nope", 1.0);
        assert!(matches!(
            get_entry("harmonic", &aux),
            Err(CatalogError::UnknownParameter { .. })
        ));
    }
}
