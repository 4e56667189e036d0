//! Shape-invariant quantum mechanics toolkit.
//!
//! The crate is organized around the pipeline superpotential -> partner
//! potentials -> spectra/wavefunctions, with every analytic claim
//! cross-checkable against an independent finite-difference eigensolver:
//!
//! * [`symexpr`] — expression trees, parsing, analytic differentiation,
//!   numeric evaluation.
//! * [`catalog`] — the conventional superpotentials in additive-parameter
//!   form plus the extended Morse construction.
//! * [`partner`] — partner potentials, ladder operators, ground and excited
//!   states on grids.
//! * [`sicheck`] — shape-invariance residuals and analytic spectra.
//! * [`hbarseries`] — series terms, order-by-order equations, resummation.
//! * [`oracle`] — tridiagonal discretization and Sturm-bisection eigenvalues.
//! * [`cli`] — command orchestration for the `siqm` binary.

pub mod catalog;
pub mod cli;
pub mod grid;
pub mod hbarseries;
pub mod oracle;
pub mod partner;
pub mod sicheck;
pub mod symexpr;
