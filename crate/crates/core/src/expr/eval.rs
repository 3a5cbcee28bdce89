use super::diff::differentiate;
use super::Expr;
use super::Expr::*;
use crate::rational::to_f64;
use num_complex::Complex64;
use rand::Rng;
use std::collections::BTreeMap;
use thiserror::Error;

/// Magnitude below which a denominator, logarithm argument or power base
/// counts as zero.
pub const SINGULAR_EPS: f64 = 1e-12;
pub const SAMPLE_ATTEMPTS: usize = 100;
/// Default lower bound on `|avoid|` at sampled points.
pub const AVOID_EPS: f64 = 1e-6;

pub type ComplexSample = Complex64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("not a rational constant: {0}")]
    NotRational(String),
    #[error("singular point: {0}")]
    Singular(String),
    #[error("unbound parameter '{0}'")]
    UnboundParam(String),
    #[error("variable x{} not in point of length {len}", .index + 1)]
    MissingVariable { index: usize, len: usize },
    #[error("non-finite value")]
    NonFinite,
    #[error("no admissible point after {0} attempts")]
    SamplingExhausted(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub point: Vec<Complex64>,
    pub params: BTreeMap<String, Complex64>,
}

impl Assignment {
    pub fn new(point: Vec<Complex64>) -> Self {
        Assignment { point, params: BTreeMap::new() }
    }

    pub fn real(point: &[f64]) -> Self {
        Assignment::new(point.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn with_params(mut self, params: BTreeMap<String, Complex64>) -> Self {
        self.params = params;
        self
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), Complex64::new(value, 0.0));
        self
    }
}

fn checked(z: Complex64) -> Result<Complex64, EvalError> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(EvalError::NonFinite)
    }
}

fn eval_inner(e: &Expr, a: &Assignment) -> Result<Complex64, EvalError> {
    let z = match e {
        Const(c) => Complex64::new(to_f64(c), 0.0),
        ImaginaryUnit => Complex64::i(),
        Var(k) => *a
            .point
            .get(*k)
            .ok_or(EvalError::MissingVariable { index: *k, len: a.point.len() })?,
        Param(p) => *a.params.get(p).ok_or_else(|| EvalError::UnboundParam(p.clone()))?,
        Neg(x) => -eval_inner(x, a)?,
        Add(x, y) => eval_inner(x, a)? + eval_inner(y, a)?,
        Sub(x, y) => eval_inner(x, a)? - eval_inner(y, a)?,
        Mul(x, y) => eval_inner(x, a)? * eval_inner(y, a)?,
        Div(x, y) => {
            let d = eval_inner(y, a)?;
            if d.norm() < SINGULAR_EPS {
                return Err(EvalError::Singular(format!("division by {y}")));
            }
            eval_inner(x, a)? / d
        }
        Pow(u, v) => {
            let base = eval_inner(u, a)?;
            let ex = eval_inner(v, a)?;
            power(base, ex, u)?
        }
        Exp(x) => eval_inner(x, a)?.exp(),
        Ln(x) => {
            let z = eval_inner(x, a)?;
            if z.norm() < SINGULAR_EPS {
                return Err(EvalError::Singular(format!("ln of {x}")));
            }
            z.ln()
        }
        Arctan(x) => {
            let z = eval_inner(x, a)?;
            let iz = Complex64::i() * z;
            let den = Complex64::new(1.0, 0.0) - iz;
            let num = Complex64::new(1.0, 0.0) + iz;
            if den.norm() < SINGULAR_EPS || num.norm() < SINGULAR_EPS {
                return Err(EvalError::Singular(format!("arctan of {x}")));
            }
            (num / den).ln() / Complex64::new(0.0, 2.0)
        }
    };
    checked(z)
}

fn power(base: Complex64, ex: Complex64, base_expr: &Expr) -> Result<Complex64, EvalError> {
    let integral = ex.im == 0.0 && ex.re.fract() == 0.0 && ex.re.abs() <= 1024.0;
    if integral {
        let n = ex.re as i32;
        if n < 0 && base.norm() < SINGULAR_EPS {
            return Err(EvalError::Singular(format!("{base_expr} to a negative power")));
        }
        return Ok(base.powi(n));
    }
    if base.norm() < SINGULAR_EPS {
        return Err(EvalError::Singular(format!("{base_expr} to a non-integer power")));
    }
    Ok((ex * base.ln()).exp())
}

/// Complex value with principal branches for `ln`, `^` and `arctan`.
pub fn evaluate(e: &Expr, a: &Assignment) -> Result<ComplexSample, EvalError> {
    eval_inner(e, a)
}

pub fn gradient(e: &Expr, a: &Assignment) -> Result<Vec<ComplexSample>, EvalError> {
    (0..a.point.len()).map(|k| evaluate(&differentiate(e, k), a)).collect()
}

fn admissible(avoid: &[Expr], a: &Assignment, eps: f64) -> bool {
    avoid.iter().all(|e| evaluate(e, a).is_ok_and(|z| z.norm() >= eps))
}

/// Random real point with coordinates in `[-10,-0.1] ∪ [0.1,10]` at which
/// every `avoid` expression has magnitude at least `1e-6`.
pub fn sample_point<R: Rng + ?Sized>(
    n: usize,
    avoid: &[Expr],
    params: &BTreeMap<String, Complex64>,
    rng: &mut R,
) -> Result<Assignment, EvalError> {
    sample_point_with(n, avoid, params, rng, AVOID_EPS)
}

pub fn sample_point_with<R: Rng + ?Sized>(
    n: usize,
    avoid: &[Expr],
    params: &BTreeMap<String, Complex64>,
    rng: &mut R,
    eps: f64,
) -> Result<Assignment, EvalError> {
    for _ in 0..SAMPLE_ATTEMPTS {
        let point = (0..n)
            .map(|_| {
                let mag: f64 = rng.gen_range(0.1..=10.0);
                let x = if rng.gen_bool(0.5) { mag } else { -mag };
                Complex64::new(x, 0.0)
            })
            .collect();
        let a = Assignment { point, params: params.clone() };
        if admissible(avoid, &a, eps) {
            return Ok(a);
        }
    }
    Err(EvalError::SamplingExhausted(SAMPLE_ATTEMPTS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * 1f64.max(b.norm())
    }

    #[test]
    fn elementary_values() {
        let sq = parse("x1^2", 1, &[]).unwrap();
        assert_eq!(evaluate(&sq, &Assignment::real(&[3.0])).unwrap(), Complex64::new(9.0, 0.0));
        let e0 = parse("exp(0)", 1, &[]).unwrap();
        assert_eq!(evaluate(&e0, &Assignment::real(&[1.0])).unwrap(), Complex64::new(1.0, 0.0));
        let i1 = parse("x2*exp(-lambda*x1/x2)", 6, &["lambda"]).unwrap();
        let a = Assignment::real(&[0.0, 1.0, 0.0, 0.0, 0.0, 0.0]).with_param("lambda", 1.0);
        assert_eq!(evaluate(&i1, &a).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn singularities_are_errors() {
        let a = Assignment::real(&[0.0, 1.0]);
        for src in ["x2/x1", "ln(x1)", "x1^(1/2)", "x1^(-2)"] {
            let e = parse(src, 2, &[]).unwrap();
            assert!(matches!(evaluate(&e, &a), Err(EvalError::Singular(_))), "{src}");
        }
        assert_eq!(evaluate(&parse("x1^3", 2, &[]).unwrap(), &a).unwrap(), Complex64::new(0.0, 0.0));
        let overflow = parse("exp(exp(x2*10))", 2, &[]).unwrap();
        assert_eq!(evaluate(&overflow, &a), Err(EvalError::NonFinite));
        let unbound = parse("alpha*x1", 2, &["alpha"]).unwrap();
        assert_eq!(evaluate(&unbound, &a), Err(EvalError::UnboundParam("alpha".into())));
    }

    #[test]
    fn arctan_matches_real_atan() {
        let e = parse("arctan(x1)", 1, &[]).unwrap();
        for x in [-3.0, -0.2, 0.5, 7.0] {
            let z = evaluate(&e, &Assignment::real(&[x])).unwrap();
            assert!((z.re - f64::atan(x)).abs() < 1e-14 && z.im.abs() < 1e-14);
        }
    }

    #[test]
    fn complex_power_shape() {
        // |(x4+i x5)/(x4-i x5)| = 1 so the ip power is real for real p
        let e = parse("(x4^2+x5^2)*((x4+i*x5)/(x4-i*x5))^(i*p)", 6, &["p"]).unwrap();
        let a = Assignment::real(&[1.0, 1.0, 1.0, 0.6, -1.3, 1.0]).with_param("p", 0.7);
        let z = evaluate(&e, &a).unwrap();
        assert!(z.im.abs() < 1e-12);
        let theta = f64::atan2(-1.3, 0.6);
        let expected = (0.36 + 1.69) * (-2.0 * 0.7 * theta).exp();
        assert!((z.re - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn gradients_by_hand() {
        let e = parse("x1+x2", 4, &[]).unwrap();
        let g = gradient(&e, &Assignment::real(&[0.3, 0.4, 0.5, 0.6])).unwrap();
        assert_eq!(g.iter().map(|z| z.re).collect::<Vec<_>>(), vec![1.0, 1.0, 0.0, 0.0]);

        let e = parse("x1*x4-x2*x3", 6, &[]).unwrap();
        let g = gradient(&e, &Assignment::real(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0])).unwrap();
        assert_eq!(g.iter().map(|z| z.re).collect::<Vec<_>>(), vec![4.0, -3.0, -2.0, 1.0, 0.0, 0.0]);

        let e = parse("ln(x1)", 3, &[]).unwrap();
        let g = gradient(&e, &Assignment::real(&[2.0, 1.0, 1.0])).unwrap();
        assert_eq!(g[0], Complex64::new(0.5, 0.0));
    }

    #[test]
    fn hand_derived_partials() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let i1 = parse("x2*exp(-lambda*x1/x2)", 6, &["lambda"]).unwrap();
        let expected = parse("exp(-lambda*x1/x2)*(1 + lambda*x1/x2)", 6, &["lambda"]).unwrap();
        let at = parse("arctan(x4/x5)", 6, &[]).unwrap();
        let at_expected = parse("x5/(x4^2+x5^2)", 6, &[]).unwrap();
        let mut params = BTreeMap::new();
        params.insert("lambda".to_string(), Complex64::new(0.8, 0.0));
        for _ in 0..10 {
            let a = sample_point(6, &[Expr::var(1), Expr::var(4)], &params, &mut rng).unwrap();
            let d = evaluate(&differentiate(&i1, 1), &a).unwrap();
            assert!(close(d, evaluate(&expected, &a).unwrap(), 1e-12));
            let d = evaluate(&differentiate(&at, 3), &a).unwrap();
            assert!(close(d, evaluate(&at_expected, &a).unwrap(), 1e-12));
        }
    }

    #[test]
    fn linearity_and_determinism() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let e1 = parse("x1*exp(x2/x3)", 3, &[]).unwrap();
        let e2 = parse("arctan(x1)-ln(x3)", 3, &[]).unwrap();
        let combo = parse("2/3*(x1*exp(x2/x3)) - 5*(arctan(x1)-ln(x3))", 3, &[]).unwrap();
        for _ in 0..10 {
            let a = sample_point(3, &[Expr::var(2)], &BTreeMap::new(), &mut rng).unwrap();
            let lhs = evaluate(&combo, &a).unwrap();
            let rhs = evaluate(&e1, &a).unwrap() * (2.0 / 3.0) - evaluate(&e2, &a).unwrap() * 5.0;
            assert!(close(lhs, rhs, 1e-12));
            assert_eq!(evaluate(&combo, &a).unwrap().re.to_bits(), lhs.re.to_bits());
        }
    }

    #[test]
    fn sampled_points_respect_bounds_and_avoidance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a = sample_point(3, &[], &BTreeMap::new(), &mut rng).unwrap();
            assert!(a.point.iter().all(|z| (0.1..=10.0).contains(&z.re.abs()) && z.im == 0.0));
        }
        let near = parse("x1 - x2", 2, &[]).unwrap();
        let a = sample_point_with(2, std::slice::from_ref(&near), &BTreeMap::new(), &mut rng, 1.0).unwrap();
        assert!(evaluate(&near, &a).unwrap().norm() >= 1.0);
        let never = parse("x1 - x1", 2, &[]).unwrap();
        assert_eq!(
            sample_point(2, &[never], &BTreeMap::new(), &mut rng),
            Err(EvalError::SamplingExhausted(SAMPLE_ATTEMPTS))
        );
    }
}
