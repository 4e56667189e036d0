//! Uniform-grid function carrier plus the quadrature and finite-difference
//! stencils shared by the SUSY machinery and the eigensolver.

use serde::Serialize;
use thiserror::Error;

use crate::symexpr::ParameterBinding;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("grid spacing must be positive (got {0})")]
    NonPositiveSpacing(f64),
    #[error("grid needs at least {min} points (got {n})")]
    TooFewPoints { n: usize, min: usize },
    #[error("grid bounds must satisfy xmin < xmax (got [{xmin}, {xmax}])")]
    EmptyInterval { xmin: f64, xmax: f64 },
    #[error("non-finite value at index {index}")]
    NonFiniteValue { index: usize },
    #[error("grids do not match: {0}")]
    Mismatch(String),
}

/// Requested uniform grid: `n` points from `xmin` to `xmax` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub xmin: f64,
    pub xmax: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(xmin: f64, xmax: f64, n: usize) -> Result<Self, GridError> {
        // Negated comparison so NaN bounds are rejected too.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(xmin < xmax) {
            return Err(GridError::EmptyInterval { xmin, xmax });
        }
        if n < 3 {
            return Err(GridError::TooFewPoints { n, min: 3 });
        }
        Ok(GridSpec { xmin, xmax, n })
    }

    pub fn dx(&self) -> f64 {
        (self.xmax - self.xmin) / (self.n - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.xmin + i as f64 * self.dx()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.x(i))
    }
}

/// Samples of a real function on a uniform grid, with provenance metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    x0: f64,
    dx: f64,
    values: Vec<f64>,
    pub label: String,
    /// Parameter binding the samples were produced with, when known.
    pub binding: Option<ParameterBinding>,
    pub warnings: Vec<String>,
}

impl GridFunction {
    pub fn new(x0: f64, dx: f64, values: Vec<f64>, label: &str) -> Result<Self, GridError> {
        // Negated comparison so a NaN spacing is rejected too.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(dx > 0.0) {
            return Err(GridError::NonPositiveSpacing(dx));
        }
        if values.len() < 3 {
            return Err(GridError::TooFewPoints {
                n: values.len(),
                min: 3,
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(GridError::NonFiniteValue { index });
        }
        Ok(GridFunction {
            x0,
            dx,
            values,
            label: label.to_owned(),
            binding: None,
            warnings: Vec::new(),
        })
    }

    /// Sample a closure over a grid spec; the closure's error is returned
    /// with the offending abscissa attached.
    ///
    /// The closure must return finite values or an error (as `Expr::eval`
    /// does); a non-finite `Ok` is a caller bug and panics.
    pub fn sample<E>(
        spec: &GridSpec,
        label: &str,
        mut f: impl FnMut(f64) -> Result<f64, E>,
    ) -> Result<Self, (f64, E)> {
        let mut values = Vec::with_capacity(spec.n);
        for x in spec.points() {
            values.push(f(x).map_err(|e| (x, e))?);
        }
        Ok(GridFunction::new(spec.xmin, spec.dx(), values, label)
            .expect("sampler must produce finite values on a valid spec"))
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    pub fn last_x(&self) -> f64 {
        self.x(self.values.len() - 1)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, v)| (self.x(i), *v))
    }

    pub fn same_grid(&self, other: &GridFunction) -> bool {
        self.len() == other.len()
            && (self.x0 - other.x0).abs() <= 1e-12 * (1.0 + self.x0.abs())
            && (self.dx - other.dx).abs() <= 1e-12 * self.dx
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Composite-trapezoid inner product <self, other>.
    pub fn inner(&self, other: &GridFunction) -> Result<f64, GridError> {
        if !self.same_grid(other) {
            return Err(GridError::Mismatch(format!(
                "{} vs {}",
                self.label, other.label
            )));
        }
        Ok(trapezoid_inner(&self.values, &other.values, self.dx))
    }

    /// L2 norm by composite trapezoid.
    pub fn norm(&self) -> f64 {
        trapezoid_inner(&self.values, &self.values, self.dx).sqrt()
    }

    /// Scale so the L2 norm is 1.
    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for v in &mut self.values {
                *v /= n;
            }
        }
    }

    /// First derivative by 4th-order stencils (one-sided at the edges).
    pub fn derivative(&self) -> GridFunction {
        let d = derivative_4th(&self.values, self.dx);
        GridFunction {
            x0: self.x0,
            dx: self.dx,
            values: d,
            label: format!("d/dx {}", self.label),
            binding: self.binding.clone(),
            warnings: self.warnings.clone(),
        }
    }

    /// Cumulative integral from the left grid edge by 4th-order rules;
    /// `output[0] = 0`.
    pub fn cumulative_integral(&self) -> Vec<f64> {
        cumulative_integral_4th(&self.values, self.dx)
    }
}

fn trapezoid_inner(a: &[f64], b: &[f64], dx: f64) -> f64 {
    let n = a.len();
    let mut sum = 0.5 * (a[0] * b[0] + a[n - 1] * b[n - 1]);
    for i in 1..n - 1 {
        sum += a[i] * b[i];
    }
    sum * dx
}

/// 4th-order first derivative on a uniform grid; 5-point one-sided stencils
/// at the two points nearest each edge.
pub fn derivative_4th(f: &[f64], dx: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 5, "need at least 5 points for 4th-order stencils");
    let mut d = vec![0.0; n];
    let c = 1.0 / (12.0 * dx);
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * c;
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * c;
    for i in 2..n - 2 {
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) * c;
    }
    d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) * c;
    d[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4]
        + 3.0 * f[n - 5])
        * c;
    d
}

/// Cumulative integral with 4th-order per-interval closed rules: the interior
/// uses `dx/24*(-f[k-1] + 13 f[k] + 13 f[k+1] - f[k+2])`, the edge intervals
/// the matching one-sided rule.
pub fn cumulative_integral_4th(f: &[f64], dx: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 4, "need at least 4 points for 4th-order integration");
    let mut out = vec![0.0; n];
    let h = dx / 24.0;
    out[1] = h * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
    for k in 1..n - 2 {
        out[k + 1] = out[k] + h * (-f[k - 1] + 13.0 * f[k] + 13.0 * f[k + 1] - f[k + 2]);
    }
    out[n - 1] =
        out[n - 2] + h * (f[n - 4] - 5.0 * f[n - 3] + 19.0 * f[n - 2] + 9.0 * f[n - 1]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validates_bounds() {
        assert!(GridSpec::new(1.0, 1.0, 100).is_err());
        assert!(GridSpec::new(0.0, 1.0, 2).is_err());
        let s = GridSpec::new(0.0, 1.0, 101).unwrap();
        assert!((s.dx() - 0.01).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_finite_values() {
        let r = GridFunction::new(0.0, 0.1, vec![1.0, f64::NAN, 2.0], "bad");
        assert!(matches!(r, Err(GridError::NonFiniteValue { index: 1 })));
    }

    #[test]
    fn derivative_is_fourth_order() {
        // f = sin on [0, 2]; halving dx should shrink the max error ~16x.
        let err_for = |n: usize| {
            let spec = GridSpec::new(0.0, 2.0, n).unwrap();
            let g = GridFunction::sample(&spec, "sin", |x| Ok::<_, ()>(x.sin())).unwrap();
            let d = g.derivative();
            d.points()
                .map(|(x, v)| (v - x.cos()).abs())
                .fold(0.0f64, f64::max)
        };
        let e1 = err_for(201);
        let e2 = err_for(401);
        assert!(e1 / e2 > 10.0, "e1={e1:.3e}, e2={e2:.3e}");
        assert!(e1 < 1e-7);
    }

    #[test]
    fn cumulative_integral_is_fourth_order() {
        let err_for = |n: usize| {
            let spec = GridSpec::new(0.0, 2.0, n).unwrap();
            let g = GridFunction::sample(&spec, "exp", |x| Ok::<_, ()>(x.exp())).unwrap();
            let integral = g.cumulative_integral();
            let mut max = 0.0f64;
            for (i, x) in spec.points().enumerate() {
                max = max.max((integral[i] - (x.exp() - 1.0)).abs());
            }
            max
        };
        let e1 = err_for(201);
        let e2 = err_for(401);
        assert!(e1 / e2 > 10.0, "e1={e1:.3e}, e2={e2:.3e}");
        assert!(e1 < 1e-8);
    }

    #[test]
    fn norm_of_unit_gaussian_is_one() {
        let spec = GridSpec::new(-10.0, 10.0, 2001).unwrap();
        let c = std::f64::consts::PI.powf(-0.25);
        let g = GridFunction::sample(&spec, "gauss", |x| {
            Ok::<_, ()>(c * (-0.5 * x * x).exp())
        })
        .unwrap();
        assert!((g.norm() - 1.0).abs() < 1e-12);
    }
}
