mod common;

use lieinv::expr::{parse, Expr};
use lieinv::rational::ratio;
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0i64..20, 1i64..6).prop_map(|(n, d)| Expr::Const(ratio(n, d))),
        (0usize..4).prop_map(Expr::Var),
        Just(Expr::ImaginaryUnit),
        Just(Expr::Param("alpha".into())),
    ]
}

fn tree() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(5, 48, 2, |inner| {
        let b = |e: Expr| Box::new(e);
        prop_oneof![
            inner.clone().prop_map(move |a| Expr::Neg(b(a))),
            inner.clone().prop_map(move |a| Expr::Exp(b(a))),
            inner.clone().prop_map(move |a| Expr::Ln(b(a))),
            inner.clone().prop_map(move |a| Expr::Arctan(b(a))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Add(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Sub(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Mul(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Div(b(x), b(y))),
            (inner.clone(), inner).prop_map(move |(x, y)| Expr::Pow(b(x), b(y))),
        ]
    })
}

proptest! {
    #[test]
    fn printing_then_parsing_is_identity(e in tree()) {
        let text = e.to_string();
        let back = parse(&text, 4, &["alpha"]).map_err(|err| TestCaseError::fail(format!("{text}: {err}")))?;
        prop_assert_eq!(back, e, "printed as {}", text);
    }

    #[test]
    fn parser_never_panics(s in "[-+*/^() x0-9a-z.]{0,24}") {
        let _ = parse(&s, 6, &["alpha"]);
    }
}

#[test]
fn symbolic_partials_match_finite_differences() {
    let (checked, bad) = common::derivative_mismatches(3, 1e-6, 1e-5);
    assert!(checked > 1000, "only {checked} partials compared");
    assert!(bad.is_empty(), "{}", bad.join("\n"));
}
