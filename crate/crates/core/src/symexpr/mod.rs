//! Symbolic expression core: parsing, analytic differentiation, and numeric
//! evaluation of the expressions that carry superpotentials and their `g(a)`.
//!
//! # Grammar
//!
//! Infix arithmetic with the usual precedence (`^` binds tightest and is
//! right-associative, then unary minus, then `*` `/`, then `+` `-`):
//!
//! ```text
//! expr   := term  (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | func '(' expr ')' | name | '(' expr ')'
//! number := digits ['.' digits] [('e'|'E') ['+'|'-'] digits]
//! name   := [A-Za-z_][A-Za-z0-9_]*
//! ```
//!
//! The name `x` is reserved for the spatial variable; every other name is a
//! free parameter. Recognized functions: `exp`, `log`, `sin`, `cos`, `tan`,
//! `cot`, `sec`, `tanh`, `coth`, `sech`, `csch`, `arctan` (alias `atan`),
//! `sqrt`. Any other name applied to an argument list is an unknown-function
//! error.
//!
//! Expressions are immutable once built; differentiation and evaluation are
//! pure functions, so values can be shared freely across threads.
//!
//! Simplification is deliberately limited to constant folding and the trivial
//! identities `e + 0`, `0 + e`, `e - 0`, `0*e`, `1*e`, `e/1`, `e^1`, and
//! double negation. Everything downstream checks values numerically, so a
//! rewrite engine would add risk without adding information.

mod parser;

pub use parser::{parse, ParseError};

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Elementary functions available to expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Tan,
    Cot,
    Sec,
    Tanh,
    Coth,
    Sech,
    Csch,
    Atan,
    Sqrt,
}

impl Func {
    /// Name used by the parser and printer.
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Cot => "cot",
            Func::Sec => "sec",
            Func::Tanh => "tanh",
            Func::Coth => "coth",
            Func::Sech => "sech",
            Func::Csch => "csch",
            Func::Atan => "arctan",
            Func::Sqrt => "sqrt",
        }
    }

    pub(crate) fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "cot" => Func::Cot,
            "sec" => Func::Sec,
            "tanh" => Func::Tanh,
            "coth" => Func::Coth,
            "sech" => Func::Sech,
            "csch" => Func::Csch,
            "arctan" | "atan" => Func::Atan,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

/// Expression tree over constants, named parameters, and the spatial
/// variable `x`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Param(String),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Differentiation target: the spatial variable or a named parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffVar<'a> {
    X,
    Param(&'a str),
}

/// Error raised when numeric evaluation leaves the real domain.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound parameter `{name}`")]
    UnboundParameter { name: String },
    #[error("domain error at x = {x}: {what}")]
    Domain { what: String, x: f64 },
    #[error("non-finite value at x = {x} while evaluating {what}")]
    NonFinite { what: String, x: f64 },
}

/// Total map from parameter names to values.
///
/// Duplicate names are rejected at construction so a binding is always a
/// function, never a multimap.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParameterBinding {
    values: BTreeMap<String, f64>,
}

/// Error from [`ParameterBinding`] construction.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("duplicate parameter `{name}` in binding")]
pub struct DuplicateParameter {
    pub name: String,
}

impl ParameterBinding {
    pub fn new() -> Self {
        Self::default()
    }

    /// Build from `(name, value)` pairs, rejecting duplicates.
    pub fn from_pairs<I, S>(pairs: I) -> Result<Self, DuplicateParameter>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut binding = Self::new();
        for (name, value) in pairs {
            binding.insert(name.into(), value)?;
        }
        Ok(binding)
    }

    /// Insert a new name; duplicates are an error.
    pub fn insert(&mut self, name: String, value: f64) -> Result<(), DuplicateParameter> {
        if self.values.contains_key(&name) {
            return Err(DuplicateParameter { name });
        }
        self.values.insert(name, value);
        Ok(())
    }

    /// Insert or overwrite a name (used when operations pin `a` and `hbar`).
    pub fn set(&mut self, name: &str, value: f64) {
        self.values.insert(name.to_owned(), value);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.values.contains_key(name)
    }

    /// Union with `other`; values in `self` win on conflict.
    pub fn merged_over(&self, other: &ParameterBinding) -> ParameterBinding {
        let mut values = other.values.clone();
        for (k, v) in &self.values {
            values.insert(k.clone(), *v);
        }
        ParameterBinding { values }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }
}

fn boxed(e: Expr) -> Box<Expr> {
    Box::new(e)
}

// The constructor names deliberately mirror the operators they build; the
// `std::ops` traits are not implemented because construction returns folded
// trees, not wrapper nodes.
#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn param(name: &str) -> Expr {
        Expr::Param(name.to_owned())
    }

    pub fn var() -> Expr {
        Expr::Var
    }

    pub fn zero() -> Expr {
        Expr::Const(0.0)
    }

    pub fn one() -> Expr {
        Expr::Const(1.0)
    }

    fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    fn is_const(&self, c: f64) -> bool {
        matches!(self, Expr::Const(v) if *v == c)
    }

    pub fn neg(e: Expr) -> Expr {
        match e {
            Expr::Const(c) => Expr::Const(-c),
            Expr::Neg(inner) => *inner,
            other => Expr::Neg(boxed(other)),
        }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            let v = x + y;
            if v.is_finite() {
                return Expr::Const(v);
            }
        }
        if a.is_const(0.0) {
            return b;
        }
        if b.is_const(0.0) {
            return a;
        }
        Expr::Add(boxed(a), boxed(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            let v = x - y;
            if v.is_finite() {
                return Expr::Const(v);
            }
        }
        if b.is_const(0.0) {
            return a;
        }
        if a.is_const(0.0) {
            return Expr::neg(b);
        }
        Expr::Sub(boxed(a), boxed(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            let v = x * y;
            if v.is_finite() {
                return Expr::Const(v);
            }
        }
        if a.is_const(0.0) || b.is_const(0.0) {
            return Expr::zero();
        }
        if a.is_const(1.0) {
            return b;
        }
        if b.is_const(1.0) {
            return a;
        }
        Expr::Mul(boxed(a), boxed(b))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            if y != 0.0 {
                let v = x / y;
                if v.is_finite() {
                    return Expr::Const(v);
                }
            }
        }
        if a.is_const(0.0) {
            return Expr::zero();
        }
        if b.is_const(1.0) {
            return a;
        }
        Expr::Div(boxed(a), boxed(b))
    }

    pub fn pow(base: Expr, exponent: Expr) -> Expr {
        if let (Some(x), Some(y)) = (base.as_const(), exponent.as_const()) {
            let v = x.powf(y);
            if v.is_finite() {
                return Expr::Const(v);
            }
        }
        if exponent.is_const(1.0) {
            return base;
        }
        Expr::Pow(boxed(base), boxed(exponent))
    }

    pub fn call(func: Func, arg: Expr) -> Expr {
        Expr::Call(func, boxed(arg))
    }

    pub fn exp(e: Expr) -> Expr {
        Expr::call(Func::Exp, e)
    }

    /// Free parameter names, sorted.
    pub fn free_params(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Const(_) | Expr::Var => {}
            Expr::Param(name) => {
                out.insert(name.clone());
            }
            Expr::Neg(e) | Expr::Call(_, e) => e.collect_params(out),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => {
                a.collect_params(out);
                b.collect_params(out);
            }
        }
    }

    pub fn contains_var(&self) -> bool {
        match self {
            Expr::Var => true,
            Expr::Const(_) | Expr::Param(_) => false,
            Expr::Neg(e) | Expr::Call(_, e) => e.contains_var(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => a.contains_var() || b.contains_var(),
        }
    }

    pub fn contains_param(&self, name: &str) -> bool {
        match self {
            Expr::Param(p) => p == name,
            Expr::Const(_) | Expr::Var => false,
            Expr::Neg(e) | Expr::Call(_, e) => e.contains_param(name),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => a.contains_param(name) || b.contains_param(name),
        }
    }

    /// Replace bound parameters by constants (folding through the smart
    /// constructors); unbound parameters are left in place.
    pub fn substitute(&self, binding: &ParameterBinding) -> Expr {
        match self {
            Expr::Const(_) | Expr::Var => self.clone(),
            Expr::Param(name) => match binding.get(name) {
                Some(v) => Expr::Const(v),
                None => self.clone(),
            },
            Expr::Neg(e) => Expr::neg(e.substitute(binding)),
            Expr::Add(a, b) => Expr::add(a.substitute(binding), b.substitute(binding)),
            Expr::Sub(a, b) => Expr::sub(a.substitute(binding), b.substitute(binding)),
            Expr::Mul(a, b) => Expr::mul(a.substitute(binding), b.substitute(binding)),
            Expr::Div(a, b) => Expr::div(a.substitute(binding), b.substitute(binding)),
            Expr::Pow(a, b) => Expr::pow(a.substitute(binding), b.substitute(binding)),
            Expr::Call(f, e) => Expr::call(*f, e.substitute(binding)),
        }
    }

    /// Analytic derivative with respect to `x`.
    pub fn diff_x(&self) -> Expr {
        self.diff(DiffVar::X)
    }

    /// Analytic derivative with respect to a named parameter.
    ///
    /// A parameter that does not occur in the expression yields the zero
    /// expression.
    pub fn diff_param(&self, name: &str) -> Expr {
        self.diff(DiffVar::Param(name))
    }

    /// Analytic derivative; closed over the same node set.
    pub fn diff(&self, wrt: DiffVar<'_>) -> Expr {
        match self {
            Expr::Const(_) => Expr::zero(),
            Expr::Var => match wrt {
                DiffVar::X => Expr::one(),
                DiffVar::Param(_) => Expr::zero(),
            },
            Expr::Param(p) => match wrt {
                DiffVar::Param(name) if p == name => Expr::one(),
                _ => Expr::zero(),
            },
            Expr::Neg(e) => Expr::neg(e.diff(wrt)),
            Expr::Add(a, b) => Expr::add(a.diff(wrt), b.diff(wrt)),
            Expr::Sub(a, b) => Expr::sub(a.diff(wrt), b.diff(wrt)),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.diff(wrt), (**b).clone()),
                Expr::mul((**a).clone(), b.diff(wrt)),
            ),
            Expr::Div(a, b) => Expr::div(
                Expr::sub(
                    Expr::mul(a.diff(wrt), (**b).clone()),
                    Expr::mul((**a).clone(), b.diff(wrt)),
                ),
                Expr::pow((**b).clone(), Expr::constant(2.0)),
            ),
            Expr::Pow(base, exponent) => {
                if let Expr::Const(c) = **exponent {
                    // d(u^c) = c*u^(c-1)*u'
                    Expr::mul(
                        Expr::mul(
                            Expr::constant(c),
                            Expr::pow((**base).clone(), Expr::constant(c - 1.0)),
                        ),
                        base.diff(wrt),
                    )
                } else {
                    // d(u^v) = u^v * (v'*log(u) + v*u'/u)
                    Expr::mul(
                        self.clone(),
                        Expr::add(
                            Expr::mul(
                                exponent.diff(wrt),
                                Expr::call(Func::Log, (**base).clone()),
                            ),
                            Expr::div(
                                Expr::mul((**exponent).clone(), base.diff(wrt)),
                                (**base).clone(),
                            ),
                        ),
                    )
                }
            }
            Expr::Call(func, arg) => {
                let u = (**arg).clone();
                let outer = match func {
                    Func::Exp => Expr::exp(u),
                    Func::Log => Expr::div(Expr::one(), u),
                    Func::Sin => Expr::call(Func::Cos, u),
                    Func::Cos => Expr::neg(Expr::call(Func::Sin, u)),
                    Func::Tan => Expr::pow(Expr::call(Func::Sec, u), Expr::constant(2.0)),
                    Func::Cot => Expr::neg(Expr::add(
                        Expr::one(),
                        Expr::pow(Expr::call(Func::Cot, u), Expr::constant(2.0)),
                    )),
                    Func::Sec => Expr::mul(
                        Expr::call(Func::Sec, u.clone()),
                        Expr::call(Func::Tan, u),
                    ),
                    Func::Tanh => Expr::pow(Expr::call(Func::Sech, u), Expr::constant(2.0)),
                    Func::Coth => Expr::neg(Expr::pow(
                        Expr::call(Func::Csch, u),
                        Expr::constant(2.0),
                    )),
                    Func::Sech => Expr::neg(Expr::mul(
                        Expr::call(Func::Sech, u.clone()),
                        Expr::call(Func::Tanh, u),
                    )),
                    Func::Csch => Expr::neg(Expr::mul(
                        Expr::call(Func::Csch, u.clone()),
                        Expr::call(Func::Coth, u),
                    )),
                    Func::Atan => Expr::div(
                        Expr::one(),
                        Expr::add(Expr::one(), Expr::pow(u, Expr::constant(2.0))),
                    ),
                    Func::Sqrt => Expr::div(
                        Expr::one(),
                        Expr::mul(Expr::constant(2.0), Expr::call(Func::Sqrt, u)),
                    ),
                };
                Expr::mul(outer, arg.diff(wrt))
            }
        }
    }

    /// Evaluate at spatial point `x` under a total parameter binding.
    ///
    /// Poles, branch violations, and overflow are signaled as errors; a
    /// successful return is always finite.
    pub fn eval(&self, x: f64, binding: &ParameterBinding) -> Result<f64, EvalError> {
        let v = self.eval_inner(x, binding)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite {
                what: self.to_string(),
                x,
            })
        }
    }

    fn eval_inner(&self, x: f64, binding: &ParameterBinding) -> Result<f64, EvalError> {
        let check = |v: f64, what: &dyn Fn() -> String| -> Result<f64, EvalError> {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(EvalError::NonFinite { what: what(), x })
            }
        };
        match self {
            Expr::Const(c) => Ok(*c),
            Expr::Var => Ok(x),
            Expr::Param(name) => binding.get(name).ok_or_else(|| EvalError::UnboundParameter {
                name: name.clone(),
            }),
            Expr::Neg(e) => Ok(-e.eval_inner(x, binding)?),
            Expr::Add(a, b) => check(
                a.eval_inner(x, binding)? + b.eval_inner(x, binding)?,
                &|| self.to_string(),
            ),
            Expr::Sub(a, b) => check(
                a.eval_inner(x, binding)? - b.eval_inner(x, binding)?,
                &|| self.to_string(),
            ),
            Expr::Mul(a, b) => check(
                a.eval_inner(x, binding)? * b.eval_inner(x, binding)?,
                &|| self.to_string(),
            ),
            Expr::Div(a, b) => {
                let num = a.eval_inner(x, binding)?;
                let den = b.eval_inner(x, binding)?;
                if den == 0.0 {
                    return Err(EvalError::Domain {
                        what: "division by zero".to_owned(),
                        x,
                    });
                }
                check(num / den, &|| self.to_string())
            }
            Expr::Pow(base, exponent) => {
                let b = base.eval_inner(x, binding)?;
                let e = exponent.eval_inner(x, binding)?;
                if b < 0.0 && e.fract() != 0.0 {
                    return Err(EvalError::Domain {
                        what: format!("fractional power {e} of negative base {b}"),
                        x,
                    });
                }
                if b == 0.0 && e < 0.0 {
                    return Err(EvalError::Domain {
                        what: "negative power of zero".to_owned(),
                        x,
                    });
                }
                check(b.powf(e), &|| self.to_string())
            }
            Expr::Call(func, arg) => {
                let u = arg.eval_inner(x, binding)?;
                let pole = |name: &str| EvalError::Domain {
                    what: format!("{name} pole at argument {u}"),
                    x,
                };
                let v = match func {
                    Func::Exp => u.exp(),
                    Func::Log => {
                        if u <= 0.0 {
                            return Err(EvalError::Domain {
                                what: format!("log of non-positive argument {u}"),
                                x,
                            });
                        }
                        u.ln()
                    }
                    Func::Sin => u.sin(),
                    Func::Cos => u.cos(),
                    Func::Tan => {
                        let c = u.cos();
                        if c == 0.0 {
                            return Err(pole("tan"));
                        }
                        u.sin() / c
                    }
                    Func::Cot => {
                        let s = u.sin();
                        if s == 0.0 {
                            return Err(pole("cot"));
                        }
                        u.cos() / s
                    }
                    Func::Sec => {
                        let c = u.cos();
                        if c == 0.0 {
                            return Err(pole("sec"));
                        }
                        1.0 / c
                    }
                    Func::Tanh => u.tanh(),
                    Func::Coth => {
                        let s = u.sinh();
                        if s == 0.0 {
                            return Err(pole("coth"));
                        }
                        u.cosh() / s
                    }
                    Func::Sech => 1.0 / u.cosh(),
                    Func::Csch => {
                        let s = u.sinh();
                        if s == 0.0 {
                            return Err(pole("csch"));
                        }
                        1.0 / s
                    }
                    Func::Atan => u.atan(),
                    Func::Sqrt => {
                        if u < 0.0 {
                            return Err(EvalError::Domain {
                                what: format!("sqrt of negative argument {u}"),
                                x,
                            });
                        }
                        u.sqrt()
                    }
                };
                check(v, &|| format!("{}({u})", func.name()))
            }
        }
    }
}

// Printing uses the precedence ladder atoms=5, `^`=4, unary minus=3,
// `*` `/`=2, `+` `-`=1 and parenthesizes so that reparsing reproduces the
// tree exactly (binary operators reassociate to the left in the grammar).
fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Const(c) if *c < 0.0 => 3,
        Expr::Const(_) | Expr::Param(_) | Expr::Var | Expr::Call(..) => 5,
        Expr::Pow(..) => 4,
        Expr::Neg(_) => 3,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Add(..) | Expr::Sub(..) => 1,
    }
}

fn fmt_child(e: &Expr, min_prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if precedence(e) < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Param(name) => write!(f, "{name}"),
            Expr::Var => write!(f, "x"),
            Expr::Neg(e) => {
                write!(f, "-")?;
                fmt_child(e, 4, f)
            }
            Expr::Add(a, b) => {
                fmt_child(a, 1, f)?;
                write!(f, " + ")?;
                fmt_child(b, 2, f)
            }
            Expr::Sub(a, b) => {
                fmt_child(a, 1, f)?;
                write!(f, " - ")?;
                fmt_child(b, 2, f)
            }
            Expr::Mul(a, b) => {
                fmt_child(a, 2, f)?;
                write!(f, "*")?;
                fmt_child(b, 3, f)
            }
            Expr::Div(a, b) => {
                fmt_child(a, 2, f)?;
                write!(f, "/")?;
                fmt_child(b, 3, f)
            }
            Expr::Pow(base, exponent) => {
                fmt_child(base, 5, f)?;
                write!(f, "^")?;
                fmt_child(exponent, 3, f)
            }
            Expr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}
