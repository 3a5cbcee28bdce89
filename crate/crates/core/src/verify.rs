//! Numerical verification of candidate invariants.
//!
//! `F` is an invariant iff `X̂_i F = 0` for every basis operator. The check
//! builds `X̂_i F` symbolically, evaluates it at random nonsingular points
//! and compares `|X̂_i F| / (1 + |∇F|)` against a tolerance. Functional
//! independence is the numerical rank of the stacked gradients.

use crate::algebra::{AlgebraError, StructureConstants};
use crate::coadjoint::{self, LinearForm, RankCertificate, VectorField};
use crate::expr::{self, evaluate, gradient, sample_point, Assignment, EvalError, Expr};
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

pub type Params = BTreeMap<String, Complex64>;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("expression uses x{found} but the algebra has dimension {expected}")]
    Dimension { expected: usize, found: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok { Verdict::Pass } else { Verdict::Fail }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub points: usize,
    pub tol: f64,
    pub trials: usize,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { points: 20, tol: 1e-8, trials: coadjoint::DEFAULT_TRIALS, seed: 0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AnnihilationReport {
    pub expr_id: String,
    pub expr: String,
    /// `max |X̂_i F| / (1 + |∇F|)` over the points, one entry per field.
    pub residuals: Vec<f64>,
    pub points_used: usize,
    pub tolerance: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl AnnihilationReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }

    /// Index of the worst field (0-based), if any residual is positive.
    pub fn worst_field(&self) -> Option<usize> {
        self.residuals
            .iter()
            .enumerate()
            .filter(|(_, r)| **r > 0.0)
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IndependenceReport {
    pub ranks: Vec<usize>,
    pub modal_rank: usize,
    pub expected: usize,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntryReport {
    pub dim: usize,
    pub invariant_count: usize,
    pub rank_certificate: RankCertificate,
    pub invariants: Vec<AnnihilationReport>,
    pub independence: IndependenceReport,
    pub count_matches: bool,
    pub verdict: Verdict,
}

fn lift(form: &LinearForm) -> Expr {
    form.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).fold(Expr::zero(), |acc, (k, c)| {
        let term = if c.is_one() {
            Expr::var(k)
        } else if (-c).is_one() {
            Expr::neg(Expr::var(k))
        } else if c.is_negative() {
            Expr::neg(Expr::mul(Expr::Const(-c), Expr::var(k)))
        } else {
            Expr::mul(Expr::Const(c.clone()), Expr::var(k))
        };
        if acc.is_zero() {
            term
        } else if let Expr::Neg(t) = term {
            Expr::sub(acc, *t)
        } else {
            Expr::add(acc, term)
        }
    })
}

/// `Σ_j component_j · ∂e/∂x_j`.
pub fn apply_field(vf: &VectorField, e: &Expr) -> Result<Expr, VerifyError> {
    let n = vf.dim();
    if e.min_dim() > n {
        return Err(VerifyError::Dimension { expected: n, found: e.min_dim() });
    }
    Ok(vf.components.iter().enumerate().filter(|(_, c)| !c.is_zero()).fold(Expr::zero(), |acc, (j, c)| {
        let d = expr::differentiate(e, j);
        if d.is_zero() { acc } else { Expr::add(acc, Expr::mul(lift(c), d)) }
    }))
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn sup(z: Complex64) -> f64 {
    z.re.abs().max(z.im.abs())
}

/// Draws up to `n_points` points where `e`, its gradient and every `extra`
/// expression evaluate finitely.
fn admissible_points(
    n: usize,
    e: &Expr,
    extra: &[Expr],
    params: &Params,
    n_points: usize,
    rng: &mut ChaCha8Rng,
) -> (Vec<(Assignment, Vec<Complex64>)>, Option<String>) {
    let avoid = e.singular_subexpressions();
    let mut out = Vec::with_capacity(n_points);
    let mut last_err = None;
    for _ in 0..n_points * 10 {
        if out.len() == n_points {
            break;
        }
        let a = match sample_point(n, &avoid, params, rng) {
            Ok(a) => a,
            Err(err) => return (out, Some(err.to_string())),
        };
        let ok = evaluate(e, &a).and_then(|_| gradient(e, &a)).and_then(|g| {
            for x in extra {
                evaluate(x, &a)?;
            }
            Ok(g)
        });
        match ok {
            Ok(g) => out.push((a, g)),
            Err(err) => last_err = Some(err.to_string()),
        }
    }
    let err = (out.len() < n_points).then(|| {
        format!(
            "only {} of {} admissible points{}",
            out.len(),
            n_points,
            last_err.map(|e| format!(" (last error: {e})")).unwrap_or_default()
        )
    });
    (out, err)
}

pub fn check_invariant(
    sc: &StructureConstants,
    e: &Expr,
    params: &Params,
    n_points: usize,
    tol: f64,
    seed: u64,
) -> Result<AnnihilationReport, VerifyError> {
    let fields = coadjoint::vector_fields(sc)?;
    check_invariant_with_fields(&fields, sc.dim(), e, params, n_points, tol, seed)
}

fn check_invariant_with_fields(
    fields: &[VectorField],
    n: usize,
    e: &Expr,
    params: &Params,
    n_points: usize,
    tol: f64,
    seed: u64,
) -> Result<AnnihilationReport, VerifyError> {
    let applied = fields.iter().map(|f| apply_field(f, e)).collect::<Result<Vec<_>, _>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (points, error) = admissible_points(n, e, &applied, params, n_points.max(1), &mut rng);
    let mut residuals = vec![0.0f64; n];
    for (a, g) in &points {
        let scale = 1.0 + norm(g);
        for (r, x) in residuals.iter_mut().zip(&applied) {
            // admissible_points already evaluated each applied field here
            let v = evaluate(x, a).map(sup).unwrap_or(f64::INFINITY);
            *r = r.max(v / scale);
        }
    }
    let ok = error.is_none() && residuals.iter().all(|r| *r < tol);
    Ok(AnnihilationReport {
        expr_id: String::new(),
        expr: e.to_string(),
        residuals,
        points_used: points.len(),
        tolerance: tol,
        verdict: Verdict::from_bool(ok),
        error,
    })
}

/// Numerical rank by fully pivoted elimination on row-normalized data.
pub fn numeric_rank(rows: &[Vec<Complex64>], tol: f64) -> usize {
    let mut a: Vec<Vec<Complex64>> = rows
        .iter()
        .filter_map(|r| {
            let n = norm(r);
            (n > 0.0).then(|| r.iter().map(|z| z / n).collect())
        })
        .collect();
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut first_pivot = None;
    let mut rank = 0;
    while rank < nrows.min(ncols) {
        let mut best = (rank, rank, 0.0);
        for (i, row) in a.iter().enumerate().skip(rank) {
            for (j, z) in row.iter().enumerate().skip(rank) {
                if z.norm() > best.2 {
                    best = (i, j, z.norm());
                }
            }
        }
        let (pi, pj, mag) = best;
        let reference = *first_pivot.get_or_insert(mag);
        if mag == 0.0 || mag <= tol * reference {
            break;
        }
        a.swap(rank, pi);
        for row in a.iter_mut() {
            row.swap(rank, pj);
        }
        let pivot_row = a[rank].clone();
        for row in a.iter_mut().skip(rank + 1) {
            let f = row[rank] / pivot_row[rank];
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(rank) {
                *x -= f * p;
            }
        }
        rank += 1;
    }
    rank
}

/// Most frequent value; ties go to the larger rank.
fn modal(ranks: &[usize]) -> usize {
    let mut counts = BTreeMap::new();
    for r in ranks {
        *counts.entry(*r).or_insert(0usize) += 1;
    }
    counts.into_iter().max_by_key(|&(r, c)| (c, r)).map_or(0, |(r, _)| r)
}

pub fn check_independence(
    n: usize,
    exprs: &[Expr],
    params: &Params,
    n_points: usize,
    tol: f64,
    seed: u64,
) -> Result<IndependenceReport, VerifyError> {
    if let Some(bad) = exprs.iter().map(Expr::min_dim).find(|d| *d > n) {
        return Err(VerifyError::Dimension { expected: n, found: bad });
    }
    if exprs.is_empty() {
        return Ok(IndependenceReport { ranks: vec![], modal_rank: 0, expected: 0, verdict: Verdict::Pass, error: None });
    }
    let avoid: Vec<Expr> = exprs.iter().flat_map(Expr::singular_subexpressions).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ranks = Vec::new();
    let mut error = None;
    for _ in 0..n_points.max(1) * 10 {
        if ranks.len() == n_points.max(1) {
            break;
        }
        let a = match sample_point(n, &avoid, params, &mut rng) {
            Ok(a) => a,
            Err(err) => {
                error = Some(err.to_string());
                break;
            }
        };
        if let Ok(rows) = exprs.iter().map(|e| gradient(e, &a)).collect::<Result<Vec<_>, _>>() {
            ranks.push(numeric_rank(&rows, tol));
        }
    }
    if ranks.is_empty() && error.is_none() {
        error = Some("no point with finite gradients".into());
    }
    let modal_rank = modal(&ranks);
    let ok = error.is_none() && modal_rank == exprs.len();
    Ok(IndependenceReport { ranks, modal_rank, expected: exprs.len(), verdict: Verdict::from_bool(ok), error })
}

/// Count, annihilation and independence together: passes iff every
/// expression is annihilated, the set has full rank, and its size is `N`.
pub fn verify_fundamental_set(
    sc: &StructureConstants,
    exprs: &[(String, Expr)],
    params: &Params,
    config: &VerifyConfig,
) -> Result<EntryReport, VerifyError> {
    let (count, cert) = coadjoint::invariant_count_certificate(sc, config.trials, config.seed)?;
    let fields = coadjoint::vector_fields(sc)?;
    let mut invariants = Vec::new();
    for (idx, (id, e)) in exprs.iter().enumerate() {
        let seed = config.seed.wrapping_add(idx as u64 + 1);
        let mut r = check_invariant_with_fields(&fields, sc.dim(), e, params, config.points, config.tol, seed)?;
        r.expr_id = id.clone();
        invariants.push(r);
    }
    let list: Vec<Expr> = exprs.iter().map(|(_, e)| e.clone()).collect();
    let independence = check_independence(sc.dim(), &list, params, config.points, config.tol, config.seed)?;
    let count_matches = exprs.len() == count;
    let ok = count_matches && independence.verdict.passed() && invariants.iter().all(|r| r.verdict.passed());
    Ok(EntryReport {
        dim: sc.dim(),
        invariant_count: count,
        rank_certificate: cert,
        invariants,
        independence,
        count_matches,
        verdict: Verdict::from_bool(ok),
    })
}
