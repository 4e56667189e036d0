//! Property tests for the expression core: print/parse round trip, analytic
//! derivatives against finite differences, and structural zero derivatives.

use proptest::prelude::*;

use siqm::symexpr::{parse, Expr, Func, ParameterBinding};

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-12i32..=12).prop_map(|q| Expr::constant(q as f64 / 4.0)),
        Just(Expr::var()),
        Just(Expr::param("a")),
        Just(Expr::param("b")),
    ]
}

/// Expressions restricted to functions that are smooth on the whole line, so
/// finite differences are meaningful almost everywhere.
fn smooth_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(3, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::div(a, b)),
            inner.clone().prop_map(Expr::neg),
            (inner.clone(), 2u32..=3).prop_map(|(a, k)| Expr::pow(a, Expr::constant(k as f64))),
            inner.clone().prop_map(|e| Expr::call(Func::Exp, e)),
            inner.clone().prop_map(|e| Expr::call(Func::Sin, e)),
            inner.clone().prop_map(|e| Expr::call(Func::Cos, e)),
            inner.clone().prop_map(|e| Expr::call(Func::Tanh, e)),
            inner.clone().prop_map(|e| Expr::call(Func::Sech, e)),
            inner.clone().prop_map(|e| Expr::call(Func::Atan, e)),
        ]
    })
}

/// Full grammar, including pole-carrying functions (round trip only).
fn any_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(3, 24, 2, |inner| {
        let funcs = prop_oneof![
            Just(Func::Exp),
            Just(Func::Log),
            Just(Func::Sin),
            Just(Func::Cos),
            Just(Func::Tan),
            Just(Func::Cot),
            Just(Func::Sec),
            Just(Func::Tanh),
            Just(Func::Coth),
            Just(Func::Sech),
            Just(Func::Csch),
            Just(Func::Atan),
            Just(Func::Sqrt),
        ];
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::div(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::pow(a, b)),
            inner.clone().prop_map(Expr::neg),
            (funcs, inner.clone()).prop_map(|(f, e)| Expr::call(f, e)),
        ]
    })
}

fn binding() -> ParameterBinding {
    ParameterBinding::from_pairs([("a".to_string(), 0.7), ("b".to_string(), -1.3)]).unwrap()
}

/// Five-point centered first derivative.
fn fd5(e: &Expr, x: f64, h: f64, b: &ParameterBinding) -> Option<f64> {
    let f = |t: f64| -> Option<f64> {
        let v = e.eval(t, b).ok()?;
        (v.abs() <= 1e4).then_some(v)
    };
    let m2 = f(x - 2.0 * h)?;
    let m1 = f(x - h)?;
    let p1 = f(x + h)?;
    let p2 = f(x + 2.0 * h)?;
    Some((m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h))
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 160,
        max_global_rejects: 20000,
        ..ProptestConfig::default()
    })]

    #[test]
    fn print_then_parse_is_identity(e in any_expr()) {
        let printed = e.to_string();
        let reparsed = parse(&printed);
        prop_assert!(reparsed.is_ok(), "`{printed}` failed to reparse: {reparsed:?}");
        prop_assert_eq!(reparsed.unwrap(), e, "round trip changed `{}`", printed);
    }

    #[test]
    fn analytic_derivative_matches_finite_differences(
        e in smooth_expr(),
        xi in 0usize..3,
    ) {
        let x = [-1.1, 0.3, 0.9][xi];
        let b = binding();
        let d = e.diff_x();
        let dv = d.eval(x, &b);
        prop_assume!(dv.is_ok());
        let dv = dv.unwrap();
        prop_assume!(dv.abs() <= 1e6);
        let coarse = fd5(&e, x, 2e-3, &b);
        let fine = fd5(&e, x, 1e-3, &b);
        prop_assume!(coarse.is_some() && fine.is_some());
        let (coarse, fine) = (coarse.unwrap(), fine.unwrap());
        // Keep only points where the finite difference itself has converged;
        // disagreement means a pole or wild curvature inside the stencil.
        prop_assume!((coarse - fine).abs() <= 1e-6 * (1.0 + fine.abs()));
        prop_assert!(
            (dv - fine).abs() <= 1e-6 * (1.0 + dv.abs()),
            "analytic {dv} vs finite difference {fine} for `{e}` at x = {x}"
        );
    }

    #[test]
    fn derivative_wrt_absent_parameter_is_the_zero_expression(e in any_expr()) {
        prop_assert_eq!(e.diff_param("zeta"), Expr::zero());
    }

    #[test]
    fn evaluation_is_finite_or_signaled(e in any_expr(), xi in 0usize..4) {
        let x = [-2.0, -0.4, 0.1, 1.7][xi];
        if let Ok(v) = e.eval(x, &binding()) {
            prop_assert!(v.is_finite(), "silent non-finite from `{e}` at {x}");
        }
    }
}
