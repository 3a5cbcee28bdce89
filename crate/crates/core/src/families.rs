//! The two infinite families of solvable extensions.
//!
//! Both are built as `n ⊕ ⟨Z⟩` with `Z = X_{2m+2}` acting on the
//! nilradical `n` by a matrix `D`: `[X_i, Z] = Σ_k D[i][k] X_k`. The map
//! `X ↦ [X, Z]` must be a derivation of `n`, which is exactly the Jacobi
//! identity of the extension.
//!
//! * `theorem2`, the filiform chain: `n = g_{2m} ⊕ 𝕂` with `[X_1, X_i] = X_{i+1}`,
//!   `2 ≤ i ≤ 2m−1`, and `X_{2m+1}` abelian. The invariant count is `2m − 2`.
//! * `theorem3`: `n = n_α`, a deformation of the Heisenberg algebra
//!   with center `X_1`:
//!   `[X_{2+j}, X_{2m+1−j}] = X_1` for `0 ≤ j ≤ m−1` and
//!   `[X_{2+j}, X_{2m+1}] = α_j X_{1+j}` for `1 ≤ j ≤ 2m−2`.
//!   The extension has no invariants when `Z` moves `X_1`, and two,
//!   one being `x_1`, otherwise.
//!
//! The constraint on the `α_j` is `α_j + α_{2m−j} = 0` for
//! `2 ≤ j ≤ m−1`. For `j = 1` the partner index `2m−1` is out of range and
//! `α_1` is free; this is what the Jacobi identity requires
//! (`g_{5,5}` and `g_{5,6}` are the cases `m = 2`, `α = (1, 0)`, `(1, 1)`).

use crate::algebra::{AlgebraError, JacobiViolation, StructureConstants};
use crate::coadjoint::{self, RankCertificate, DEFAULT_TRIALS};
use crate::expr::Expr;
use crate::linalg;
use crate::rational::{format_rational, pow_int, random_nonzero_rational, rat, Rational};
use crate::verify::{self, Params, VerifyError};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

pub type Matrix = Vec<Vec<Rational>>;

/// Redraws allowed when sampling a derivation with a required property.
pub const SAMPLE_ATTEMPTS: usize = 200;

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("m must be at least 2, got {0}")]
    MTooSmall(usize),
    #[error("expected {expected} {what}, got {found}")]
    Shape { what: &'static str, expected: usize, found: usize },
    #[error("alpha_{j} + alpha_{partner} = {sum}, must vanish")]
    AlphaConstraint { j: usize, partner: usize, sum: String },
    #[error("derivation check failed: {}", describe_violations(.0))]
    NotDerivation(Vec<JacobiViolation>),
    #[error("no derivation with the requested properties after {0} draws")]
    NoSample(usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

fn describe_violations(v: &[JacobiViolation]) -> String {
    match v.first() {
        Some(first) => format!("{} Jacobi triple(s), first {first}", v.len()),
        None => "no violations".into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem2Input {
    pub m: usize,
    pub derivation: Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem3Input {
    pub m: usize,
    /// `α_1, …, α_{2m−2}`.
    pub alphas: Vec<Rational>,
    pub derivation: Matrix,
}

fn check_m(m: usize) -> Result<(), FamilyError> {
    if m < 2 { Err(FamilyError::MTooSmall(m)) } else { Ok(()) }
}

fn check_square(d: &Matrix, n: usize) -> Result<(), FamilyError> {
    if d.len() != n {
        return Err(FamilyError::Shape { what: "derivation rows", expected: n, found: d.len() });
    }
    if let Some(row) = d.iter().find(|r| r.len() != n) {
        return Err(FamilyError::Shape { what: "derivation columns", expected: n, found: row.len() });
    }
    Ok(())
}

/// `g_{2m} ⊕ 𝕂`, dimension `2m + 1`.
pub fn theorem2_nilradical(m: usize) -> Result<StructureConstants, FamilyError> {
    check_m(m)?;
    let mut sc = StructureConstants::new(2 * m + 1);
    for i in 1..2 * m - 1 {
        sc.add_term(0, i, i + 1, rat(1))?;
    }
    Ok(sc)
}

pub fn check_alphas(m: usize, alphas: &[Rational]) -> Result<(), FamilyError> {
    check_m(m)?;
    if alphas.len() != 2 * m - 2 {
        return Err(FamilyError::Shape { what: "alphas", expected: 2 * m - 2, found: alphas.len() });
    }
    for j in 2..m {
        let sum = &alphas[j - 1] + &alphas[2 * m - j - 1];
        if !sum.is_zero() {
            return Err(FamilyError::AlphaConstraint { j, partner: 2 * m - j, sum: format_rational(&sum) });
        }
    }
    Ok(())
}

/// `n_α` without the constraint check; used to exhibit the Jacobi failures
/// the constraint rules out.
pub fn theorem3_nilradical_unchecked(m: usize, alphas: &[Rational]) -> StructureConstants {
    let n = 2 * m + 1;
    let mut sc = StructureConstants::new(n);
    for j in 0..m {
        sc.add_term(1 + j, n - 1 - j, 0, rat(1)).expect("indices in range");
    }
    for (j, a) in alphas.iter().enumerate().map(|(j, a)| (j + 1, a)) {
        if !a.is_zero() {
            sc.add_term(1 + j, n - 1, j, a.clone()).expect("indices in range");
        }
    }
    sc
}

pub fn theorem3_nilradical(m: usize, alphas: &[Rational]) -> Result<StructureConstants, FamilyError> {
    check_alphas(m, alphas)?;
    let sc = theorem3_nilradical_unchecked(m, alphas);
    sc.ensure_valid()?;
    Ok(sc)
}

/// `n ⊕ ⟨Z⟩` with `[X_i, Z] = Σ_k d[i][k] X_k`, Jacobi-checked.
pub fn extend(nil: &StructureConstants, d: &Matrix) -> Result<StructureConstants, FamilyError> {
    let n = nil.dim();
    check_square(d, n)?;
    let mut sc = StructureConstants::new(n + 1);
    for (i, j, v) in nil.nonzero_brackets() {
        sc.set_bracket(i, j, v.iter().cloned().chain(std::iter::once(Rational::zero())).collect())?;
    }
    for (i, row) in d.iter().enumerate() {
        for (k, c) in row.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            sc.add_term(i, n, k, c.clone())?;
        }
    }
    let v = crate::algebra::validate_jacobi(&sc);
    if v.is_empty() { Ok(sc) } else { Err(FamilyError::NotDerivation(v)) }
}

pub fn build_theorem2(input: &Theorem2Input) -> Result<StructureConstants, FamilyError> {
    extend(&theorem2_nilradical(input.m)?, &input.derivation)
}

pub fn build_theorem3(input: &Theorem3Input) -> Result<StructureConstants, FamilyError> {
    extend(&theorem3_nilradical(input.m, &input.alphas)?, &input.derivation)
}

fn derivation_equations(nil: &StructureConstants) -> Vec<Vec<Rational>> {
    // unknown D[i][k] sits at column i*n + k
    let n = nil.dim();
    let mut rows = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for l in 0..n {
                let mut row = vec![Rational::zero(); n * n];
                for i in 0..n {
                    let c = nil.constant(a, b, i);
                    if !c.is_zero() {
                        row[i * n + l] += c;
                    }
                }
                for k in 0..n {
                    let c = nil.constant(k, b, l);
                    if !c.is_zero() {
                        row[a * n + k] -= &c;
                    }
                    let c = nil.constant(a, k, l);
                    if !c.is_zero() {
                        row[b * n + k] -= c;
                    }
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    rows
}

fn to_matrix(v: &[Rational], n: usize) -> Matrix {
    v.chunks(n).map(<[Rational]>::to_vec).collect()
}

/// Basis of the derivation algebra of `nil`.
pub fn derivation_basis(nil: &StructureConstants) -> Vec<Matrix> {
    let n = nil.dim();
    linalg::nullspace(derivation_equations(nil), n * n).iter().map(|v| to_matrix(v, n)).collect()
}

/// Derivations that kill `X_1`.
pub fn derivation_basis_fixing_x1(nil: &StructureConstants) -> Vec<Matrix> {
    let n = nil.dim();
    let mut eqs = derivation_equations(nil);
    for k in 0..n {
        let mut row = vec![Rational::zero(); n * n];
        row[k] = rat(1);
        eqs.push(row);
    }
    linalg::nullspace(eqs, n * n).iter().map(|v| to_matrix(v, n)).collect()
}

/// Random combination of `basis` with coefficients `a/b`, `0 < |a| ≤ 5`, `b ≤ 3`.
pub fn random_combination(basis: &[Matrix], n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let mut d = vec![vec![Rational::zero(); n]; n];
    for b in basis {
        let c = random_nonzero_rational(rng, 5, 3);
        for (row, brow) in d.iter_mut().zip(b) {
            for (x, y) in row.iter_mut().zip(brow) {
                *x += &c * y;
            }
        }
    }
    d
}

pub fn is_derivation(nil: &StructureConstants, d: &Matrix) -> bool {
    let n = nil.dim();
    if check_square(d, n).is_err() {
        return false;
    }
    let flat: Vec<Rational> = d.iter().flatten().cloned().collect();
    derivation_equations(nil).iter().all(|row| {
        row.iter().zip(&flat).fold(Rational::zero(), |acc, (a, b)| acc + a * b).is_zero()
    })
}

/// `[X_{2m}, Z] ≠ 0` or `[X_{2m+1}, Z] ≠ 0`.
pub fn theorem2_hypothesis(m: usize, d: &Matrix) -> bool {
    [2 * m - 1, 2 * m].iter().any(|&i| d.get(i).is_some_and(|r| r.iter().any(|x| !x.is_zero())))
}

/// Whether `Z` moves `X_1`.
pub fn acts_on_x1(d: &Matrix) -> bool {
    d.first().is_some_and(|r| r.iter().any(|x| !x.is_zero()))
}

/// A generic `theorem2` derivation: non-nilpotent (so the nilradical is
/// exactly `g_{2m} ⊕ 𝕂`) and satisfying [`theorem2_hypothesis`].
pub fn random_theorem2(m: usize, rng: &mut ChaCha8Rng) -> Result<Theorem2Input, FamilyError> {
    let nil = theorem2_nilradical(m)?;
    let basis = derivation_basis(&nil);
    for _ in 0..SAMPLE_ATTEMPTS {
        let d = random_combination(&basis, nil.dim(), rng);
        if theorem2_hypothesis(m, &d) && !linalg::is_nilpotent_matrix(&d) {
            return Ok(Theorem2Input { m, derivation: d });
        }
    }
    Err(FamilyError::NoSample(SAMPLE_ATTEMPTS))
}

/// Admissible `α`: free entries drawn from `{−2, …, 2}`, with
/// `α_{2m−j} = −α_j` for `2 ≤ j ≤ m−1`.
pub fn random_alphas(m: usize, rng: &mut ChaCha8Rng) -> Vec<Rational> {
    let mut a: Vec<Rational> = (0..2 * m - 2).map(|_| rat(rng.gen_range(-2..=2))).collect();
    for j in 2..m {
        a[2 * m - j - 1] = -a[j - 1].clone();
    }
    a
}

/// A `theorem3` instance with non-nilpotent `D`. `x1_action` forces the
/// case: `Some(true)` requires `D X_1 ≠ 0`, `Some(false)` requires `D X_1 = 0`.
/// `alphas` are redrawn when no such derivation turns up.
pub fn random_theorem3(
    m: usize,
    alphas: Option<Vec<Rational>>,
    x1_action: Option<bool>,
    rng: &mut ChaCha8Rng,
) -> Result<Theorem3Input, FamilyError> {
    check_m(m)?;
    let fixed = alphas.is_some();
    let mut alphas = alphas.unwrap_or_else(|| random_alphas(m, rng));
    for _ in 0..SAMPLE_ATTEMPTS / 10 {
        let nil = theorem3_nilradical(m, &alphas)?;
        let basis = if x1_action == Some(false) { derivation_basis_fixing_x1(&nil) } else { derivation_basis(&nil) };
        for _ in 0..10 {
            let d = random_combination(&basis, nil.dim(), rng);
            if linalg::is_nilpotent_matrix(&d) || x1_action.is_some_and(|want| acts_on_x1(&d) != want) {
                continue;
            }
            return Ok(Theorem3Input { m, alphas, derivation: d });
        }
        if fixed {
            break;
        }
        alphas = random_alphas(m, rng);
    }
    Err(FamilyError::NoSample(SAMPLE_ATTEMPTS))
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem2Report {
    pub m: usize,
    pub dim: usize,
    pub generic_rank: usize,
    pub computed: usize,
    pub expected: usize,
    pub hypothesis_holds: bool,
    /// `D` nilpotent means the whole extension is nilpotent.
    pub derivation_nilpotent: bool,
    pub rank_certificate: RankCertificate,
    pub agrees: bool,
}

pub fn check_theorem2_count(input: &Theorem2Input, seed: u64) -> Result<Theorem2Report, FamilyError> {
    let sc = build_theorem2(input)?;
    let (computed, cert) = coadjoint::invariant_count_certificate(&sc, DEFAULT_TRIALS, seed)?;
    let expected = 2 * input.m - 2;
    Ok(Theorem2Report {
        m: input.m,
        dim: sc.dim(),
        generic_rank: cert.rank,
        computed,
        expected,
        hypothesis_holds: theorem2_hypothesis(input.m, &input.derivation),
        derivation_nilpotent: linalg::is_nilpotent_matrix(&input.derivation),
        agrees: computed == expected && cert.rank == 4,
        rank_certificate: cert,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DetPoint {
    pub point: Vec<String>,
    pub det: String,
    pub predicted: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct DetIdentityReport {
    pub m: usize,
    pub points: Vec<DetPoint>,
    pub holds: bool,
}

/// `det A = x_1^{2m} (Σ_k C_{1,2m+2}^k x_k)^2`, exactly, at random points.
pub fn check_det_identity(
    sc: &StructureConstants,
    m: usize,
    n_points: usize,
    seed: u64,
) -> Result<DetIdentityReport, FamilyError> {
    check_m(m)?;
    let n = 2 * m + 2;
    if sc.dim() != n {
        return Err(FamilyError::Shape { what: "algebra dimension", expected: n, found: sc.dim() });
    }
    let a = coadjoint::commutator_matrix(sc)?;
    let action = sc.bracket_basis(0, n - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::new();
    let mut holds = true;
    for _ in 0..n_points {
        let p = coadjoint::random_rational_point(n, &mut rng);
        let det = linalg::det(&a.evaluate(&p));
        let lin = action.iter().zip(&p).fold(Rational::zero(), |acc, (c, x)| acc + c * x);
        let x1 = pow_int(&p[0], 2 * m as i64).expect("nonnegative power");
        let predicted = x1 * &lin * &lin;
        holds &= det == predicted;
        points.push(DetPoint {
            point: p.iter().map(format_rational).collect(),
            det: format_rational(&det),
            predicted: format_rational(&predicted),
        });
    }
    Ok(DetIdentityReport { m, points, holds })
}

#[derive(Debug, Clone, Serialize)]
pub struct DichotomyReport {
    pub m: usize,
    pub case: u8,
    pub invariant_count: usize,
    pub expected: usize,
    /// Only meaningful in case 2.
    pub center_invariant_passes: bool,
    pub rank_certificate: RankCertificate,
    pub agrees: bool,
}

pub fn check_theorem3_dichotomy(input: &Theorem3Input, seed: u64) -> Result<DichotomyReport, FamilyError> {
    let sc = build_theorem3(input)?;
    let (count, cert) = coadjoint::invariant_count_certificate(&sc, DEFAULT_TRIALS, seed)?;
    let case = if acts_on_x1(&input.derivation) { 1 } else { 2 };
    let expected = if case == 1 { 0 } else { 2 };
    let center_invariant_passes = if case == 2 {
        verify::check_invariant(&sc, &Expr::var(0), &Params::new(), 20, 1e-8, seed)?.verdict.passed()
    } else {
        false
    };
    Ok(DichotomyReport {
        m: input.m,
        case,
        invariant_count: count,
        expected,
        center_invariant_passes,
        agrees: count == expected && (case == 1 || center_invariant_passes),
        rank_certificate: cert,
    })
}

pub fn matrix_strings(d: &Matrix) -> Vec<Vec<String>> {
    d.iter().map(|r| r.iter().map(format_rational).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn diag(v: &[Rational]) -> Matrix {
        let n = v.len();
        (0..n).map(|i| (0..n).map(|k| if i == k { v[i].clone() } else { Rational::zero() }).collect()).collect()
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn theorem2_diagonal_grading() {
        // X_i with i ≥ 2 has weight a + (i−2)b, X_1 weight b, X_{2m+1} free
        let (a, b, c) = (ratio(1, 3), ratio(2, 5), ratio(-7, 2));
        for m in 2..=4 {
            let mut w = vec![b.clone()];
            for i in 0..2 * m - 1 {
                w.push(&a + &b * rat(i as i64));
            }
            w.push(c.clone());
            let input = Theorem2Input { m, derivation: diag(&w) };
            let r = check_theorem2_count(&input, 7).unwrap();
            assert_eq!((r.generic_rank, r.computed), (4, 2 * m - 2), "m = {m}");
            assert!(r.hypothesis_holds && !r.derivation_nilpotent);
        }
    }

    #[test]
    fn zero_derivation_is_flagged() {
        let input = Theorem2Input { m: 2, derivation: vec![vec![Rational::zero(); 5]; 5] };
        let r = check_theorem2_count(&input, 0).unwrap();
        assert!(r.derivation_nilpotent && !r.hypothesis_holds);
    }

    #[test]
    fn non_derivations_are_rejected() {
        let mut d = vec![vec![Rational::zero(); 5]; 5];
        d[1][1] = rat(1);
        let err = build_theorem2(&Theorem2Input { m: 2, derivation: d }).unwrap_err();
        assert!(matches!(err, FamilyError::NotDerivation(ref v) if !v.is_empty()));
        assert!(matches!(
            build_theorem2(&Theorem2Input { m: 2, derivation: vec![] }),
            Err(FamilyError::Shape { .. })
        ));
        assert!(matches!(theorem2_nilradical(1), Err(FamilyError::MTooSmall(1))));
    }

    #[test]
    fn derivation_bases_are_derivations() {
        let nil = theorem3_nilradical(3, &random_alphas(3, &mut rng(1))).unwrap();
        let basis = derivation_basis(&nil);
        assert!(!basis.is_empty());
        for d in &basis {
            assert!(is_derivation(&nil, d));
            extend(&nil, d).unwrap();
        }
        for d in derivation_basis_fixing_x1(&nil) {
            assert!(!acts_on_x1(&d));
        }
    }

    #[test]
    fn alpha_constraint_matches_jacobi() {
        // m = 3: the only coupled pair is (α_2, α_4)
        let ok = [rat(5), rat(1), rat(-3), rat(-1)];
        theorem3_nilradical(3, &ok).unwrap();
        let bad = [rat(0), rat(1), rat(0), rat(1)];
        assert!(matches!(theorem3_nilradical(3, &bad), Err(FamilyError::AlphaConstraint { j: 2, partner: 4, .. })));
        assert!(!crate::algebra::validate_jacobi(&theorem3_nilradical_unchecked(3, &bad)).is_empty());
        // m = 2 has no coupled pair
        theorem3_nilradical(2, &[rat(1), rat(1)]).unwrap();
        assert!(matches!(theorem3_nilradical(2, &[rat(1)]), Err(FamilyError::Shape { .. })));
    }

    #[test]
    fn m2_nilradicals_are_the_heisenberg_deformations() {
        let g56 = theorem3_nilradical(2, &[rat(1), rat(1)]).unwrap();
        assert_eq!(g56.to_string(), "[X2,X5]=(1)X1, [X3,X4]=(1)X1, [X3,X5]=(1)X2, [X4,X5]=(1)X3");
    }

    #[test]
    fn dichotomy_both_cases() {
        let mut r = rng(3);
        for m in 2..=3 {
            for want in [true, false] {
                let input = random_theorem3(m, Some(vec![Rational::zero(); 2 * m - 2]), Some(want), &mut r).unwrap();
                let rep = check_theorem3_dichotomy(&input, 11).unwrap();
                assert_eq!(rep.case, if want { 1 } else { 2 });
                assert!(rep.agrees, "{rep:?}");
            }
        }
    }

    #[test]
    fn det_identity_exact() {
        let mut r = rng(4);
        for m in 2..=3 {
            let input = random_theorem3(m, None, None, &mut r).unwrap();
            let sc = build_theorem3(&input).unwrap();
            assert!(check_det_identity(&sc, m, 4, 5).unwrap().holds);
        }
        // no action on X_1: both sides vanish
        let input = random_theorem3(2, Some(vec![rat(0), rat(0)]), Some(false), &mut r).unwrap();
        let rep = check_det_identity(&build_theorem3(&input).unwrap(), 2, 3, 1).unwrap();
        assert!(rep.holds && rep.points.iter().all(|p| p.det == "0"));
    }
}
