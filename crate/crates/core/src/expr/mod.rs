//! Expressions for candidate invariants.
//!
//! Trees are built by the parser (see [`parse`]) or by the smart
//! constructors below, which fold the trivial cases `0 + e`, `1 · e`,
//! `0 · e` so that symbolic derivatives do not fill up with dead branches.
//! No other simplification is attempted.
//!
//! Variables are zero-based: `Var(0)` prints as `x1`.

mod diff;
mod eval;
mod parse;

pub use diff::{differentiate, gradient_exprs};
pub use eval::{
    evaluate, gradient, sample_point, sample_point_with, Assignment, ComplexSample, EvalError, AVOID_EPS,
    SAMPLE_ATTEMPTS, SINGULAR_EPS,
};
pub use parse::{parse, ParseError};

use crate::rational::{format_rational, pow_int, Rational};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(Rational),
    ImaginaryUnit,
    Var(usize),
    Param(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
    Ln(Box<Expr>),
    Arctan(Box<Expr>),
}

use Expr::*;

impl Expr {
    pub fn int(n: i64) -> Expr {
        Const(Rational::from_integer(n.into()))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn var(k: usize) -> Expr {
        Var(k)
    }

    pub fn param(name: &str) -> Expr {
        Param(name.to_string())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Const(c) if c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Const(c) if c.is_one())
    }

    /// Integer value of a literal such as `3` or `-(3)`.
    pub fn as_integer(&self) -> Option<i64> {
        match self {
            Const(c) if c.is_integer() => c.to_integer().to_i64(),
            Neg(e) => e.as_integer().map(|v| -v),
            _ => None,
        }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        if a.is_zero() {
            b
        } else if b.is_zero() {
            a
        } else {
            Add(Box::new(a), Box::new(b))
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        if b.is_zero() {
            a
        } else if a.is_zero() {
            Expr::neg(b)
        } else {
            Sub(Box::new(a), Box::new(b))
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        if a.is_zero() || b.is_zero() {
            Expr::zero()
        } else if a.is_one() {
            b
        } else if b.is_one() {
            a
        } else {
            Mul(Box::new(a), Box::new(b))
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        if a.is_zero() {
            Expr::zero()
        } else if b.is_one() {
            a
        } else {
            Div(Box::new(a), Box::new(b))
        }
    }

    pub fn neg(a: Expr) -> Expr {
        match a {
            Const(c) if c.is_zero() => Expr::zero(),
            Neg(inner) => *inner,
            other => Neg(Box::new(other)),
        }
    }

    pub fn pow(a: Expr, b: Expr) -> Expr {
        if b.is_one() {
            a
        } else {
            Pow(Box::new(a), Box::new(b))
        }
    }

    /// Highest variable index used, plus one.
    pub fn min_dim(&self) -> usize {
        let mut vars = BTreeSet::new();
        self.collect_vars(&mut vars);
        vars.last().map_or(0, |k| k + 1)
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        self.visit(&mut |e| {
            if let Var(k) = e {
                out.insert(*k);
            }
        });
    }

    pub fn params(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Param(p) = e {
                out.insert(p.clone());
            }
        });
        out
    }

    pub fn depends_on(&self, k: usize) -> bool {
        let mut found = false;
        self.visit(&mut |e| found |= matches!(e, Var(j) if *j == k));
        found
    }

    pub fn node_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Pre-order traversal.
    pub fn visit<F: FnMut(&Expr)>(&self, f: &mut F) {
        f(self);
        match self {
            Const(_) | ImaginaryUnit | Var(_) | Param(_) => {}
            Neg(a) | Exp(a) | Ln(a) | Arctan(a) => a.visit(f),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) | Pow(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    /// Subexpressions whose vanishing makes the expression singular:
    /// denominators, logarithm arguments and power bases.
    pub fn singular_subexpressions(&self) -> Vec<Expr> {
        let mut out: Vec<Expr> = Vec::new();
        self.visit(&mut |e| {
            let s = match e {
                Div(_, d) => Some(d.as_ref()),
                Ln(a) => Some(a.as_ref()),
                Pow(b, ex) => {
                    // nonnegative integer powers are entire
                    if ex.as_integer().is_some_and(|v| v >= 0) { None } else { Some(b.as_ref()) }
                }
                _ => None,
            };
            if let Some(s) = s {
                if !matches!(s, Const(_)) && !out.contains(s) {
                    out.push(s.clone());
                }
            }
        });
        out
    }

    /// Exact value for parameter/constant-only expressions with integer
    /// exponents; used for structure constants and constraints.
    pub fn eval_rational(&self, params: &BTreeMap<String, Rational>) -> Result<Rational, EvalError> {
        match self {
            Const(c) => Ok(c.clone()),
            Param(p) => params.get(p).cloned().ok_or_else(|| EvalError::UnboundParam(p.clone())),
            Neg(a) => Ok(-a.eval_rational(params)?),
            Add(a, b) => Ok(a.eval_rational(params)? + b.eval_rational(params)?),
            Sub(a, b) => Ok(a.eval_rational(params)? - b.eval_rational(params)?),
            Mul(a, b) => Ok(a.eval_rational(params)? * b.eval_rational(params)?),
            Div(a, b) => {
                let d = b.eval_rational(params)?;
                if d.is_zero() {
                    return Err(EvalError::Singular("division by zero".into()));
                }
                Ok(a.eval_rational(params)? / d)
            }
            Pow(a, b) => {
                let base = a.eval_rational(params)?;
                let ex = b.eval_rational(params)?;
                let n = if ex.is_integer() { ex.to_integer().to_i64() } else { None };
                let n = n.filter(|v| v.abs() <= 64).ok_or_else(|| EvalError::NotRational(self.to_string()))?;
                pow_int(&base, n).ok_or_else(|| EvalError::Singular("zero to a negative power".into()))
            }
            Var(_) | ImaginaryUnit | Exp(_) | Ln(_) | Arctan(_) => Err(EvalError::NotRational(self.to_string())),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Add(..) | Sub(..) => 1,
            Mul(..) | Div(..) => 2,
            Pow(..) => 3,
            Neg(_) => 4,
            Const(c) if c.is_negative() => 0,
            _ => 5,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            self.fmt_prec(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Const(c) => write!(f, "{}", format_rational(c)),
            ImaginaryUnit => write!(f, "i"),
            Var(k) => write!(f, "x{}", k + 1),
            Param(p) => write!(f, "{p}"),
            Neg(a) => {
                write!(f, "-")?;
                a.fmt_prec(f, 4)
            }
            Add(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " + ")?;
                b.fmt_prec(f, 2)
            }
            Sub(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " - ")?;
                b.fmt_prec(f, 2)
            }
            Mul(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "*")?;
                b.fmt_prec(f, 3)
            }
            Div(a, b) => {
                let (l, r) = (Prec(a, 2).to_string(), Prec(b, 3).to_string());
                // `2/3` would lex as a single literal
                let digits = l.ends_with(|c: char| c.is_ascii_digit()) && r.starts_with(|c: char| c.is_ascii_digit());
                write!(f, "{l}{}{r}", if digits { " / " } else { "/" })
            }
            Pow(a, b) => {
                a.fmt_prec(f, 4)?;
                write!(f, "^")?;
                b.fmt_prec(f, 3)
            }
            Exp(a) => fmt_call(f, "exp", a),
            Ln(a) => fmt_call(f, "ln", a),
            Arctan(a) => fmt_call(f, "arctan", a),
        }
    }
}

struct Prec<'a>(&'a Expr, u8);

impl fmt::Display for Prec<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt_prec(f, self.1)
    }
}

fn fmt_call(f: &mut fmt::Formatter<'_>, name: &str, arg: &Expr) -> fmt::Result {
    write!(f, "{name}(")?;
    arg.fmt_prec(f, 0)?;
    write!(f, ")")
}

/// Prints in the concrete syntax accepted by [`parse`].
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smart_constructors_fold_trivia() {
        assert_eq!(Expr::add(Expr::zero(), Expr::var(0)), Expr::var(0));
        assert_eq!(Expr::mul(Expr::var(0), Expr::zero()), Expr::zero());
        assert_eq!(Expr::mul(Expr::one(), Expr::var(2)), Expr::var(2));
        assert_eq!(Expr::neg(Expr::neg(Expr::var(1))), Expr::var(1));
        assert_eq!(Expr::sub(Expr::zero(), Expr::var(1)), Expr::neg(Expr::var(1)));
    }

    #[test]
    fn display_parenthesizes_minimally() {
        let p = |s: &str| parse(s, 6, &["alpha"]).unwrap().to_string();
        assert_eq!(p("x2*x1^(-alpha)"), "x2*x1^-alpha");
        assert_eq!(p("(x1+x2)*x3"), "(x1 + x2)*x3");
        assert_eq!(p("x1-(x2-x3)"), "x1 - (x2 - x3)");
        assert_eq!(p("x1^x2^x3"), "x1^x2^x3");
        assert_eq!(p("(x1^x2)^x3"), "(x1^x2)^x3");
        assert_eq!(p("-(x1^2)"), "-(x1^2)");
        assert_eq!(p("exp(-x1/x2)"), "exp(-x1/x2)");
        assert_eq!(p("2 / 3"), "2 / 3");
        assert_eq!(p("x1^2 / 3"), "x1^2 / 3");
        assert_eq!(p("x1^2/3"), "x1^2/3");
    }

    #[test]
    fn negative_constants_print_in_parens() {
        let e = Expr::mul(Const(crate::rational::rat(-3)), Expr::var(0));
        assert_eq!(e.to_string(), "(-3)*x1");
    }

    #[test]
    fn singular_parts() {
        let e = parse("x2*exp(-lambda*x1/x2) + ln(x3) + x4^2 + x5^(1/2)", 6, &["lambda"]).unwrap();
        let s = e.singular_subexpressions();
        assert_eq!(s, vec![Var(1), Var(2), Var(4)]);
    }

    #[test]
    fn rational_evaluation() {
        let mut params = BTreeMap::new();
        params.insert("alpha".to_string(), crate::rational::ratio(1, 2));
        let e = parse("alpha/2 + (1-alpha)^2 - 3", 6, &["alpha"]).unwrap();
        assert_eq!(e.eval_rational(&params).unwrap(), crate::rational::ratio(-5, 2));
        assert!(parse("x1", 6, &[]).unwrap().eval_rational(&params).is_err());
    }
}
