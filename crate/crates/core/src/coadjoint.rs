//! Coadjoint realization of a Lie algebra on functions over g*.
//!
//! The commutator matrix has entries `A_ij = Σ_k C_ij^k x_k`. Its generic
//! rank gives the number of functionally independent invariants,
//! `N = dim g − rank`. The operator attached to `X_i` is
//! `X̂_i = −Σ_{j,k} C_ij^k x_k ∂/∂x_j`, i.e. row `i` of the matrix negated.
//!
//! The generic rank is the maximum exact rank over random rational points.
//! Rank drops happen on a proper algebraic subset, which random points miss
//! with probability one; the point achieving the maximum is kept as a
//! certificate.

use crate::algebra::{AlgebraError, StructureConstants};
use crate::linalg;
use crate::rational::{format_rational, random_nonzero_rational, Rational};
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::ops::Neg;

pub const DEFAULT_TRIALS: usize = 5;

/// `Σ_k coeffs[k] x_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearForm {
    pub coeffs: Vec<Rational>,
}

impl LinearForm {
    pub fn zero(n: usize) -> Self {
        Self { coeffs: vec![Rational::zero(); n] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        self.coeffs.iter().zip(point).fold(Rational::zero(), |acc, (c, x)| acc + c * x)
    }

    pub fn eval_f64(&self, point: &[num_complex::Complex64]) -> num_complex::Complex64 {
        self.coeffs
            .iter()
            .zip(point)
            .fold(num_complex::Complex64::new(0.0, 0.0), |acc, (c, x)| acc + crate::rational::to_f64(c) * x)
    }
}

impl Neg for &LinearForm {
    type Output = LinearForm;
    fn neg(self) -> LinearForm {
        LinearForm { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }
}

impl std::fmt::Display for LinearForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| format!("({})*x{}", format_rational(c), k + 1))
            .collect();
        if terms.is_empty() { write!(f, "0") } else { write!(f, "{}", terms.join(" + ")) }
    }
}

/// Skew-symmetric matrix of linear forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoadjointMatrix {
    dim: usize,
    entries: Vec<Vec<LinearForm>>,
}

impl CoadjointMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> &LinearForm {
        &self.entries[i][j]
    }

    pub fn evaluate(&self, point: &[Rational]) -> Vec<Vec<Rational>> {
        self.entries.iter().map(|row| row.iter().map(|f| f.eval(point)).collect()).collect()
    }

    pub fn is_skew_symmetric(&self) -> bool {
        (0..self.dim).all(|i| {
            self.entries[i][i].is_zero() && (0..self.dim).all(|j| self.entries[i][j] == -&self.entries[j][i])
        })
    }
}

pub fn commutator_matrix(sc: &StructureConstants) -> Result<CoadjointMatrix, AlgebraError> {
    sc.ensure_valid()?;
    Ok(commutator_matrix_unchecked(sc))
}

/// Builds the matrix without the Jacobi gate; used by the auditing code to
/// inspect rows that are already known to be broken.
pub fn commutator_matrix_unchecked(sc: &StructureConstants) -> CoadjointMatrix {
    let n = sc.dim();
    let entries = (0..n)
        .map(|i| (0..n).map(|j| LinearForm { coeffs: sc.bracket_basis(i, j) }).collect())
        .collect();
    CoadjointMatrix { dim: n, entries }
}

/// Rank of the commutator matrix at a random point, plus the point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankCertificate {
    pub rank: usize,
    pub witness: Vec<Rational>,
    pub trials: usize,
    pub seed: u64,
}

impl RankCertificate {
    pub fn witness_strings(&self) -> Vec<String> {
        self.witness.iter().map(format_rational).collect()
    }
}

impl Serialize for RankCertificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("RankCertificate", 4)?;
        st.serialize_field("rank", &self.rank)?;
        st.serialize_field("witness", &self.witness_strings())?;
        st.serialize_field("trials", &self.trials)?;
        st.serialize_field("seed", &self.seed)?;
        st.end()
    }
}

/// Coordinates `a/b` with `a ∈ [−100, 100] \ {0}`, `b ∈ [1, 10]`.
pub fn random_rational_point(n: usize, rng: &mut ChaCha8Rng) -> Vec<Rational> {
    (0..n).map(|_| random_nonzero_rational(rng, 100, 10)).collect()
}

pub fn generic_rank_certificate(m: &CoadjointMatrix, trials: usize, seed: u64) -> RankCertificate {
    let trials = trials.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(usize, Vec<Rational>)> = None;
    for _ in 0..trials {
        let p = random_rational_point(m.dim, &mut rng);
        let r = linalg::rank(&m.evaluate(&p));
        if best.as_ref().is_none_or(|(b, _)| r > *b) {
            best = Some((r, p));
        }
        if r == m.dim {
            break;
        }
    }
    let (rank, witness) = best.expect("at least one trial");
    RankCertificate { rank, witness, trials, seed }
}

pub fn generic_rank(m: &CoadjointMatrix, trials: usize, seed: u64) -> usize {
    generic_rank_certificate(m, trials, seed).rank
}

/// `N = dim g − generic rank`.
pub fn invariant_count(sc: &StructureConstants, trials: usize, seed: u64) -> Result<usize, AlgebraError> {
    let m = commutator_matrix(sc)?;
    Ok(sc.dim() - generic_rank(&m, trials, seed))
}

pub fn invariant_count_certificate(
    sc: &StructureConstants,
    trials: usize,
    seed: u64,
) -> Result<(usize, RankCertificate), AlgebraError> {
    let m = commutator_matrix(sc)?;
    let cert = generic_rank_certificate(&m, trials, seed);
    Ok((sc.dim() - cert.rank, cert))
}

/// The operator `X̂_i`: component `j` multiplies `∂/∂x_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorField {
    pub index: usize,
    pub components: Vec<LinearForm>,
}

impl VectorField {
    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(LinearForm::is_zero)
    }

    /// Applies the field to a linear form, giving a quadratic form evaluated at `point`.
    fn apply_linear(&self, form: &LinearForm, point: &[Rational]) -> Rational {
        self.components
            .iter()
            .zip(&form.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .fold(Rational::zero(), |acc, (comp, c)| acc + comp.eval(point) * c)
    }
}

pub fn vector_fields(sc: &StructureConstants) -> Result<Vec<VectorField>, AlgebraError> {
    let m = commutator_matrix(sc)?;
    Ok((0..sc.dim())
        .map(|i| VectorField { index: i, components: m.entries[i].iter().map(|f| -f).collect() })
        .collect())
}

/// `([X̂_i, X̂_j] + Σ_k C_ij^k X̂_k)(x_l)` at `point`, for every `l`.
///
/// With `X̂_i = −C_ij^k x_k ∂_j` the map `X_i ↦ X̂_i` reverses brackets,
/// so this sum (not the difference) vanishes identically.
pub fn realization_defect(
    sc: &StructureConstants,
    fields: &[VectorField],
    i: usize,
    j: usize,
    point: &[Rational],
) -> Vec<Rational> {
    let n = sc.dim();
    (0..n)
        .map(|l| {
            // X̂_j(x_l) is the l-th component of field j, a linear form
            let comm = fields[i].apply_linear(&fields[j].components[l], point)
                - fields[j].apply_linear(&fields[i].components[l], point);
            let rhs = (0..n).fold(Rational::zero(), |acc, k| {
                let c = sc.constant(i, j, k);
                if c.is_zero() { acc } else { acc + c * fields[k].components[l].eval(point) }
            });
            comm + rhs
        })
        .collect()
}
