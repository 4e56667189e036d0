//! Power-series machinery for hbar-dependent superpotentials built on the
//! Morse kernel: closed-form series terms, residuals of the order-by-order
//! equations, and partial-sum convergence to the closed form.
//!
//! Writing `W(x, a, h) = sum_j h^j W_j(x, a)` and expanding the
//! shape-invariance condition in powers of `h` gives one equation per order:
//!
//! * `j = 1`: `2 dW0/dx - d(W0^2 + g)/da = 0` (the conventional first-order
//!   equation, so any conventional kernel satisfies it),
//! * `j = 2`: `dW1/dx - d(W0 W1)/da = 0`,
//! * `j >= 3`:
//!   `2 dW_{j-1}/dx`
//!   `- sum_{s=1}^{j-1} sum_{k=0}^{s} (1/(j-s)!) d^{j-s}(W_k W_{s-k})/da^{j-s}`
//!   `+ sum_{k=2}^{j-1} (1/(k-1)!) d^k W_{j-k}/(da^{k-1} dx)`
//!   `+ ((j-2)/j!) d^j W_0/(da^{j-1} dx) = 0`.
//!
//! The equations are evaluated as residuals of given candidate terms with
//! exact symbolic derivatives; they are not solved symbolically. For the
//! Morse kernel the odd terms vanish and the even terms form a geometric
//! family whose resummation is checked by [`partial_sum_error`].

use thiserror::Error;

use crate::symexpr::{Expr, ParameterBinding};

/// One term of the hbar power series: order `j` and the expression
/// `W_j(x, a)` (deformation parameters folded in as constants).
#[derive(Debug, Clone)]
pub struct SeriesTerm {
    pub order: usize,
    pub expr: Expr,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("missing series term of order {order}")]
    MissingTerm { order: usize },
    #[error("the order-by-order equations start at j = 1 (got j = {0})")]
    InvalidOrder(usize),
    #[error("sample (x = {x}, a = {a}) failed to evaluate: {detail}")]
    SampleFailed { x: f64, a: f64, detail: String },
    #[error(
        "x = {x} is outside the convergence region: the geometric ratio \
         |Q*hbar^2*exp(-2x)| = {ratio:.6} must be < 1, i.e. x > ln(Q*hbar^2)/2 = {bound:.6}"
    )]
    OutsideConvergence { x: f64, ratio: f64, bound: f64 },
}

/// Closed-form series term for the extended Morse construction.
///
/// `W_0` is the Morse kernel `(alpha - a) - exp(-x)`; odd orders vanish;
/// `W_{2k} = (-Q)^(k-1) exp(-(2k-1)x) (2P + Q exp(-2x) - 2(alpha-a) Q exp(-x))`.
pub fn w_term(j: usize, p: f64, q: f64, alpha: f64) -> SeriesTerm {
    let expr = if j == 0 {
        Expr::sub(morse_coupling(alpha), exp_kx(-1.0))
    } else if j % 2 == 1 {
        Expr::zero()
    } else {
        let k = (j / 2) as i32;
        Expr::mul(
            Expr::mul(
                Expr::constant((-q).powi(k - 1)),
                exp_kx(-(2.0 * k as f64 - 1.0)),
            ),
            w2_bracket(p, q, alpha),
        )
    };
    SeriesTerm { order: j, expr }
}

fn morse_coupling(alpha: f64) -> Expr {
    Expr::sub(Expr::constant(alpha), Expr::param("a"))
}

fn exp_kx(k: f64) -> Expr {
    Expr::exp(Expr::mul(Expr::constant(k), Expr::var()))
}

// 2P + Q e^{-2x} - 2 (alpha - a) Q e^{-x}
fn w2_bracket(p: f64, q: f64, alpha: f64) -> Expr {
    Expr::sub(
        Expr::add(
            Expr::constant(2.0 * p),
            Expr::mul(Expr::constant(q), exp_kx(-2.0)),
        ),
        Expr::mul(
            Expr::mul(Expr::constant(2.0 * q), morse_coupling(alpha)),
            exp_kx(-1.0),
        ),
    )
}

/// Textbook closed form of the resummed superpotential with `hbar` folded in
/// as a constant:
/// `(alpha-a) - e^{-x} + hbar^2 (2P e^x - 2(alpha-a)Q + Q e^{-x}) / (e^{2x} + Q hbar^2)`.
///
/// At `hbar = 0` the extension term folds away structurally, so the closed
/// form and `W_0` evaluate through identical operations.
pub fn closed_form_w(p: f64, q: f64, alpha: f64, hbar: f64) -> Expr {
    let kernel = w_term(0, p, q, alpha).expr;
    let numerator = Expr::add(
        Expr::sub(
            Expr::mul(Expr::constant(2.0 * p), exp_kx(1.0)),
            Expr::mul(Expr::constant(2.0 * q), morse_coupling(alpha)),
        ),
        Expr::mul(Expr::constant(q), exp_kx(-1.0)),
    );
    let denominator = Expr::add(exp_kx(2.0), Expr::constant(q * hbar * hbar));
    Expr::add(
        kernel,
        Expr::div(
            Expr::mul(Expr::constant(hbar * hbar), numerator),
            denominator,
        ),
    )
}

/// Series data for one kernel: the terms, the kernel's `g(a)`, and the
/// deformation constants they were built with.
#[derive(Debug, Clone)]
pub struct SeriesFamily {
    pub terms: Vec<SeriesTerm>,
    pub g: Expr,
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
}

/// Terms `W_0 ..= W_max_order` of the extended Morse family with
/// `g(a) = -(alpha - a)^2`.
pub fn extended_morse_family(p: f64, q: f64, alpha: f64, max_order: usize) -> SeriesFamily {
    let terms = (0..=max_order).map(|j| w_term(j, p, q, alpha)).collect();
    let g = Expr::neg(Expr::pow(morse_coupling(alpha), Expr::constant(2.0)));
    SeriesFamily {
        terms,
        g,
        p,
        q,
        alpha,
    }
}

impl SeriesFamily {
    pub fn pde_residual(&self, j: usize, samples: &[(f64, f64)]) -> Result<f64, SeriesError> {
        pde_residual(j, &self.terms, &self.g, samples)
    }
}

fn diff_a_n(expr: &Expr, n: usize) -> Expr {
    let mut out = expr.clone();
    for _ in 0..n {
        out = out.diff_param("a");
    }
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn term_at(terms: &[SeriesTerm], order: usize) -> Result<&Expr, SeriesError> {
    terms
        .iter()
        .find(|t| t.order == order)
        .map(|t| &t.expr)
        .ok_or(SeriesError::MissingTerm { order })
}

/// Build the order-`j` equation symbolically from the supplied terms
/// (`j = 1` additionally uses `g`), then return the maximum absolute residual
/// over the `(x, a)` samples.
pub fn pde_residual(
    j: usize,
    terms: &[SeriesTerm],
    g: &Expr,
    samples: &[(f64, f64)],
) -> Result<f64, SeriesError> {
    if j == 0 {
        return Err(SeriesError::InvalidOrder(0));
    }
    let residual = match j {
        1 => {
            let w0 = term_at(terms, 0)?;
            Expr::sub(
                Expr::mul(Expr::constant(2.0), w0.diff_x()),
                Expr::add(Expr::pow(w0.clone(), Expr::constant(2.0)), g.clone())
                    .diff_param("a"),
            )
        }
        2 => {
            let w0 = term_at(terms, 0)?;
            let w1 = term_at(terms, 1)?;
            Expr::sub(
                w1.diff_x(),
                Expr::mul(w0.clone(), w1.clone()).diff_param("a"),
            )
        }
        _ => {
            let mut acc = Expr::mul(Expr::constant(2.0), term_at(terms, j - 1)?.diff_x());
            for s in 1..=j - 1 {
                let weight = 1.0 / factorial(j - s);
                for k in 0..=s {
                    let product = Expr::mul(
                        term_at(terms, k)?.clone(),
                        term_at(terms, s - k)?.clone(),
                    );
                    acc = Expr::sub(
                        acc,
                        Expr::mul(Expr::constant(weight), diff_a_n(&product, j - s)),
                    );
                }
            }
            for k in 2..=j - 1 {
                let weight = 1.0 / factorial(k - 1);
                acc = Expr::add(
                    acc,
                    Expr::mul(
                        Expr::constant(weight),
                        diff_a_n(term_at(terms, j - k)?, k - 1).diff_x(),
                    ),
                );
            }
            let w0 = term_at(terms, 0)?;
            let weight = (j as f64 - 2.0) / factorial(j);
            Expr::add(
                acc,
                Expr::mul(Expr::constant(weight), diff_a_n(w0, j - 1).diff_x()),
            )
        }
    };
    eval_max_abs(&residual, samples)
}

fn eval_max_abs(expr: &Expr, samples: &[(f64, f64)]) -> Result<f64, SeriesError> {
    let mut max = 0.0f64;
    for &(x, a) in samples {
        let mut binding = ParameterBinding::new();
        binding.set("a", a);
        let v = expr
            .eval(x, &binding)
            .map_err(|e| SeriesError::SampleFailed {
                x,
                a,
                detail: e.to_string(),
            })?;
        max = max.max(v.abs());
    }
    Ok(max)
}

/// Absolute gap between the partial sum `sum_{j<=2K} hbar^j W_j(x, a)` and
/// the closed form, inside the geometric convergence region
/// `|Q hbar^2 e^{-2x}| < 1`.
///
/// The gap is `|hbar^2 W_2| r^K / (1 + r)` with ratio `r = Q hbar^2 e^{-2x}`,
/// so it decreases in `K` and successive gaps shrink by `r`.
pub fn partial_sum_error(
    k_pairs: usize,
    x: f64,
    a: f64,
    p: f64,
    q: f64,
    alpha: f64,
    hbar: f64,
) -> Result<f64, SeriesError> {
    let ratio = (q * hbar * hbar * (-2.0 * x).exp()).abs();
    // Negated comparison so an overflowed (infinite) ratio also lands here.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(ratio < 1.0) {
        let bound = 0.5 * (q * hbar * hbar).abs().ln();
        return Err(SeriesError::OutsideConvergence { x, ratio, bound });
    }
    let mut binding = ParameterBinding::new();
    binding.set("a", a);
    let fail = |detail: String| SeriesError::SampleFailed { x, a, detail };
    let mut sum = 0.0;
    for j in (0..=2 * k_pairs).step_by(2) {
        let term = w_term(j, p, q, alpha);
        let v = term.expr.eval(x, &binding).map_err(|e| fail(e.to_string()))?;
        sum += hbar.powi(j as i32) * v;
    }
    let closed = closed_form_w(p, q, alpha, hbar)
        .eval(x, &binding)
        .map_err(|e| fail(e.to_string()))?;
    Ok((sum - closed).abs())
}
