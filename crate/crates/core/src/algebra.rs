//! Lie algebras given by structure constants over ℚ.
//!
//! Only brackets `[X_i, X_j]` with `i < j` are stored; `[X_j, X_i]` and
//! `[X_i, X_i]` are derived, so antisymmetry cannot be violated. Indices are
//! zero-based in the API and one-based in every textual rendering.

use crate::linalg;
use crate::rational::{format_rational, Rational};
use num_traits::Zero;
use serde::Serialize;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("invalid algebra: Jacobi identity fails for {} triple(s), first at {}", .0.len(), .0[0])]
    Jacobi(Vec<JacobiViolation>),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    Dimension { expected: usize, found: usize },
    #[error("index out of range: X{index} in a {dim}-dimensional algebra")]
    Index { index: usize, dim: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureConstants {
    dim: usize,
    // pair (i, j), i < j, at position pair_index(i, j); each entry has length dim
    table: Vec<Vec<Rational>>,
}

fn pair_index(dim: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < dim);
    // pairs are ordered (0,1), (0,2), .., (0,n-1), (1,2), ..
    i * dim - i * (i + 1) / 2 + (j - i - 1)
}

impl StructureConstants {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "a Lie algebra needs a positive dimension");
        let pairs = dim * (dim - 1) / 2;
        Self { dim, table: vec![vec![Rational::zero(); dim]; pairs] }
    }

    pub fn abelian(dim: usize) -> Self {
        Self::new(dim)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sets `[X_i, X_j] = Σ_k value[k] X_k`. Setting with `i > j` stores the
    /// negated vector under `(j, i)`.
    pub fn set_bracket(&mut self, i: usize, j: usize, value: Vec<Rational>) -> Result<(), AlgebraError> {
        self.check_index(i)?;
        self.check_index(j)?;
        if value.len() != self.dim {
            return Err(AlgebraError::Dimension { expected: self.dim, found: value.len() });
        }
        if i == j {
            return Ok(());
        }
        let (a, b, v) = if i < j { (i, j, value) } else { (j, i, value.into_iter().map(|x| -x).collect()) };
        let p = pair_index(self.dim, a, b);
        self.table[p] = v;
        Ok(())
    }

    /// Adds `coeff · X_k` to `[X_i, X_j]`.
    pub fn add_term(&mut self, i: usize, j: usize, k: usize, coeff: Rational) -> Result<(), AlgebraError> {
        self.check_index(i)?;
        self.check_index(j)?;
        self.check_index(k)?;
        if i == j {
            return Ok(());
        }
        let (a, b, c) = if i < j { (i, j, coeff) } else { (j, i, -coeff) };
        let p = pair_index(self.dim, a, b);
        self.table[p][k] += c;
        Ok(())
    }

    fn check_index(&self, index: usize) -> Result<(), AlgebraError> {
        if index >= self.dim {
            Err(AlgebraError::Index { index: index + 1, dim: self.dim })
        } else {
            Ok(())
        }
    }

    /// `C_ij^k`.
    pub fn constant(&self, i: usize, j: usize, k: usize) -> Rational {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => Rational::zero(),
            Less => self.table[pair_index(self.dim, i, j)][k].clone(),
            Greater => -self.table[pair_index(self.dim, j, i)][k].clone(),
        }
    }

    /// `[X_i, X_j]` as a coefficient vector.
    pub fn bracket_basis(&self, i: usize, j: usize) -> Vec<Rational> {
        (0..self.dim).map(|k| self.constant(i, j, k)).collect()
    }

    /// Bilinear extension of the bracket to arbitrary vectors.
    pub fn bracket(&self, u: &[Rational], v: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim];
        for i in 0..self.dim {
            if u[i].is_zero() {
                continue;
            }
            for j in 0..self.dim {
                if i == j || v[j].is_zero() {
                    continue;
                }
                let f = &u[i] * &v[j];
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.constant(i, j, k);
                    if !c.is_zero() {
                        *o += &f * c;
                    }
                }
            }
        }
        out
    }

    /// Nonzero brackets `(i, j, [X_i, X_j])` with `i < j`.
    pub fn nonzero_brackets(&self) -> impl Iterator<Item = (usize, usize, &Vec<Rational>)> + '_ {
        (0..self.dim)
            .flat_map(move |i| (i + 1..self.dim).map(move |j| (i, j)))
            .map(move |(i, j)| (i, j, &self.table[pair_index(self.dim, i, j)]))
            .filter(|(_, _, v)| v.iter().any(|x| !x.is_zero()))
    }

    pub fn is_abelian(&self) -> bool {
        self.nonzero_brackets().next().is_none()
    }

    /// Structure constants of the subalgebra `span{X_i : i ∈ indices}`,
    /// assuming it is closed. Returns `None` if some bracket leaves the span.
    pub fn restrict(&self, indices: &[usize]) -> Option<StructureConstants> {
        let mut out = StructureConstants::new(indices.len());
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate().skip(a + 1) {
                let v = self.bracket_basis(i, j);
                for (k, c) in v.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let pos = indices.iter().position(|&x| x == k)?;
                    out.add_term(a, b, pos, c.clone()).ok()?;
                }
            }
        }
        Some(out)
    }

    /// Renames basis vectors: `X_i` of `self` becomes `X_{perm[i]}`.
    pub fn relabel(&self, perm: &[usize]) -> Result<StructureConstants, AlgebraError> {
        if perm.len() != self.dim {
            return Err(AlgebraError::Dimension { expected: self.dim, found: perm.len() });
        }
        let mut out = StructureConstants::new(self.dim);
        for (i, j, v) in self.nonzero_brackets() {
            for (k, c) in v.iter().enumerate() {
                if !c.is_zero() {
                    out.add_term(perm[i], perm[j], perm[k], c.clone())?;
                }
            }
        }
        Ok(out)
    }

    pub fn ensure_valid(&self) -> Result<(), AlgebraError> {
        let v = validate_jacobi(self);
        if v.is_empty() { Ok(()) } else { Err(AlgebraError::Jacobi(v)) }
    }
}

impl fmt::Display for StructureConstants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, j, v) in self.nonzero_brackets() {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "[X{},X{}]=", i + 1, j + 1)?;
            let mut lead = true;
            for (k, c) in v.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                if !lead {
                    write!(f, "+")?;
                }
                lead = false;
                write!(f, "({})X{}", format_rational(c), k + 1)?;
            }
        }
        if first {
            write!(f, "abelian({})", self.dim)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JacobiViolation {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    /// `[X_i,[X_j,X_k]] + [X_j,[X_k,X_i]] + [X_k,[X_i,X_j]]`, rendered exactly.
    #[serde(serialize_with = "serialize_rational_vec")]
    pub residual: Vec<Rational>,
}

fn serialize_rational_vec<S: serde::Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&format_rational(x))?;
    }
    seq.end()
}

impl fmt::Display for JacobiViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r: Vec<String> = self.residual.iter().map(format_rational).collect();
        write!(f, "(X{}, X{}, X{}) residual [{}]", self.i + 1, self.j + 1, self.k + 1, r.join(", "))
    }
}

fn unit(dim: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); dim];
    v[i] = Rational::from_integer(1.into());
    v
}

/// Every triple `i < j < k` whose cyclic double bracket sum is nonzero.
pub fn validate_jacobi(sc: &StructureConstants) -> Vec<JacobiViolation> {
    let n = sc.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (xi, xj, xk) = (unit(n, i), unit(n, j), unit(n, k));
                let a = sc.bracket(&xi, &sc.bracket_basis(j, k));
                let b = sc.bracket(&xj, &sc.bracket_basis(k, i));
                let c = sc.bracket(&xk, &sc.bracket_basis(i, j));
                let residual: Vec<Rational> =
                    a.iter().zip(&b).zip(&c).map(|((x, y), z)| x + y + z).collect();
                if residual.iter().any(|x| !x.is_zero()) {
                    out.push(JacobiViolation { i, j, k, residual });
                }
            }
        }
    }
    out
}

/// A linear subspace of ℚⁿ held in reduced row echelon form, so two
/// subspaces are equal iff their bases are equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vec<Rational>>,
}

impl Subspace {
    pub fn span(ambient_dim: usize, vectors: Vec<Vec<Rational>>) -> Self {
        let vectors: Vec<_> = vectors.into_iter().filter(|v| v.iter().any(|x| !x.is_zero())).collect();
        if vectors.is_empty() {
            return Self::zero(ambient_dim);
        }
        let (basis, _) = linalg::rref(vectors);
        Self { ambient_dim, basis }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self { ambient_dim, basis: Vec::new() }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self { ambient_dim, basis: (0..ambient_dim).map(|i| unit(ambient_dim, i)).collect() }
    }

    /// `span{X_i : i ∈ indices}`.
    pub fn coordinate(ambient_dim: usize, indices: &[usize]) -> Self {
        Self::span(ambient_dim, indices.iter().map(|&i| unit(ambient_dim, i)).collect())
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        linalg::rank(&rows) == self.dim()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|v| other.contains(v))
    }
}

/// `[A, B]` for subspaces A, B.
pub fn bracket_subspaces(sc: &StructureConstants, a: &Subspace, b: &Subspace) -> Subspace {
    let mut vs = Vec::new();
    for u in a.basis() {
        for v in b.basis() {
            vs.push(sc.bracket(u, v));
        }
    }
    Subspace::span(sc.dim(), vs)
}

/// `g ⊇ g' ⊇ g'' ⊇ …` until the term is zero or repeats (the repeat is not
/// listed twice).
pub fn derived_series(sc: &StructureConstants) -> Result<Vec<Subspace>, AlgebraError> {
    sc.ensure_valid()?;
    let mut series = vec![Subspace::full(sc.dim())];
    loop {
        let last = series.last().expect("nonempty");
        if last.is_zero() {
            break;
        }
        let next = bracket_subspaces(sc, last, last);
        if &next == last {
            break;
        }
        series.push(next);
    }
    Ok(series)
}

/// `g ⊇ [g,g] ⊇ [g,[g,g]] ⊇ …`, same stopping rule as [`derived_series`].
pub fn lower_central_series(sc: &StructureConstants) -> Result<Vec<Subspace>, AlgebraError> {
    sc.ensure_valid()?;
    let full = Subspace::full(sc.dim());
    let mut series = vec![full.clone()];
    loop {
        let last = series.last().expect("nonempty");
        if last.is_zero() {
            break;
        }
        let next = bracket_subspaces(sc, &full, last);
        if &next == last {
            break;
        }
        series.push(next);
    }
    Ok(series)
}

pub fn is_solvable(sc: &StructureConstants) -> Result<bool, AlgebraError> {
    Ok(derived_series(sc)?.last().is_some_and(Subspace::is_zero))
}

pub fn is_nilpotent(sc: &StructureConstants) -> Result<bool, AlgebraError> {
    Ok(lower_central_series(sc)?.last().is_some_and(Subspace::is_zero))
}

/// `[g, sub] ⊆ sub` and `sub` is nilpotent under the restricted bracket.
pub fn is_nilpotent_ideal(sc: &StructureConstants, sub: &Subspace) -> Result<bool, AlgebraError> {
    if sub.ambient_dim() != sc.dim() {
        return Err(AlgebraError::Dimension { expected: sc.dim(), found: sub.ambient_dim() });
    }
    sc.ensure_valid()?;
    let full = Subspace::full(sc.dim());
    if !bracket_subspaces(sc, &full, sub).is_subspace_of(sub) {
        return Ok(false);
    }
    // iterate C_{k+1} = [sub, C_k]; strictly decreasing or stuck
    let mut term = sub.clone();
    for _ in 0..=sub.dim() {
        if term.is_zero() {
            return Ok(true);
        }
        let next = bracket_subspaces(sc, sub, &term);
        if next == term {
            return Ok(false);
        }
        term = next;
    }
    Ok(term.is_zero())
}
