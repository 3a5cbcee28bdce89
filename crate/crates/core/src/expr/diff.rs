use super::Expr;
use super::Expr::*;

/// Symbolic partial derivative with respect to `Var(k)`.
pub fn differentiate(e: &Expr, k: usize) -> Expr {
    if !e.depends_on(k) {
        return Expr::zero();
    }
    match e {
        Const(_) | ImaginaryUnit | Param(_) => Expr::zero(),
        Var(j) => {
            if *j == k {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Neg(a) => Expr::neg(differentiate(a, k)),
        Add(a, b) => Expr::add(differentiate(a, k), differentiate(b, k)),
        Sub(a, b) => Expr::sub(differentiate(a, k), differentiate(b, k)),
        Mul(a, b) => Expr::add(
            Expr::mul(differentiate(a, k), (**b).clone()),
            Expr::mul((**a).clone(), differentiate(b, k)),
        ),
        Div(a, b) => {
            // (a' b - a b') / b^2
            let num = Expr::sub(
                Expr::mul(differentiate(a, k), (**b).clone()),
                Expr::mul((**a).clone(), differentiate(b, k)),
            );
            Expr::div(num, Expr::pow((**b).clone(), Expr::int(2)))
        }
        Pow(u, v) => {
            let du = differentiate(u, k);
            let dv = differentiate(v, k);
            if dv.is_zero() {
                // v u^(v-1) u'
                let lowered = Expr::pow((**u).clone(), Expr::sub((**v).clone(), Expr::one()));
                Expr::mul(Expr::mul((**v).clone(), lowered), du)
            } else {
                let log_term = Expr::mul(dv, Ln(u.clone()));
                let pow_term = Expr::div(Expr::mul((**v).clone(), du), (**u).clone());
                Expr::mul(e.clone(), Expr::add(log_term, pow_term))
            }
        }
        Exp(a) => Expr::mul(e.clone(), differentiate(a, k)),
        Ln(a) => Expr::div(differentiate(a, k), (**a).clone()),
        Arctan(a) => {
            let denom = Expr::add(Expr::one(), Expr::pow((**a).clone(), Expr::int(2)));
            Expr::div(differentiate(a, k), denom)
        }
    }
}

/// `[∂F/∂x1, …, ∂F/∂x{dim}]`.
pub fn gradient_exprs(e: &Expr, dim: usize) -> Vec<Expr> {
    (0..dim).map(|k| differentiate(e, k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{evaluate, parse, Assignment};
    use num_complex::Complex64;

    fn at(point: &[f64]) -> Assignment {
        Assignment::new(point.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    fn check_against_fd(src: &str, point: &[f64]) {
        let e = parse(src, point.len(), &[]).unwrap();
        let a = at(point);
        for k in 0..point.len() {
            let d = evaluate(&differentiate(&e, k), &a).unwrap();
            let h = 1e-6;
            let mut plus = point.to_vec();
            let mut minus = point.to_vec();
            plus[k] += h;
            minus[k] -= h;
            let fd = (evaluate(&e, &at(&plus)).unwrap() - evaluate(&e, &at(&minus)).unwrap()) / (2.0 * h);
            let scale = 1f64.max(d.norm());
            assert!((d - fd).norm() < 1e-6 * scale, "{src} d/dx{}: {d} vs {fd}", k + 1);
        }
    }

    #[test]
    fn rules_agree_with_finite_differences() {
        check_against_fd("x1^2*x2 - x3/x1", &[1.3, -0.7, 2.1]);
        check_against_fd("exp(x1/x2)*ln(x3)", &[0.4, 1.9, 2.5]);
        check_against_fd("arctan(x1/x2) + x3^(3/2)", &[-1.2, 0.8, 1.7]);
        check_against_fd("x1^x2", &[1.6, 0.3]);
        check_against_fd("(x1^2 + x2^2)^(-1/2)*x1", &[0.9, -1.4]);
    }

    #[test]
    fn constants_differentiate_to_zero() {
        let e = parse("alpha*x1 + 3", 2, &["alpha"]).unwrap();
        assert!(differentiate(&e, 1).is_zero());
        assert_eq!(differentiate(&e, 0), Expr::param("alpha"));
    }

    #[test]
    fn gradient_has_one_entry_per_variable() {
        let e = parse("x1*x2", 4, &[]).unwrap();
        let g = gradient_exprs(&e, 4);
        assert_eq!(g, vec![Var(1), Var(0), Expr::zero(), Expr::zero()]);
    }
}
