//! Exact linear algebra over ℚ and ℤ.
//!
//! Rank and determinant go through fraction-free (Bareiss) elimination on
//! integer matrices obtained by clearing row denominators; row reduction and
//! null spaces work directly on rationals.

use crate::rational::Rational;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Multiplies each row by the lcm of its denominators. Returns the integer
/// matrix and the product of the multipliers (so `det(q) = det(z) / scale`).
pub fn clear_denominators(m: &[Vec<Rational>]) -> (Vec<Vec<BigInt>>, BigInt) {
    let mut scale = BigInt::one();
    let rows = m
        .iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            scale *= &l;
            row.iter()
                .map(|x| x.numer() * (&l / x.denom()))
                .collect::<Vec<_>>()
        })
        .collect();
    (rows, scale)
}

/// Bareiss elimination in place. Returns the rank and, for square input, the
/// determinant (zero when singular).
fn bareiss(mut a: Vec<Vec<BigInt>>) -> (usize, BigInt) {
    let nrows = a.len();
    if nrows == 0 {
        return (0, BigInt::one());
    }
    let ncols = a[0].len();
    let square = nrows == ncols;
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    let mut rank = 0;
    let mut col = 0;
    while rank < nrows && col < ncols {
        let Some(p) = (rank..nrows).find(|&r| !a[r][col].is_zero()) else {
            col += 1;
            continue;
        };
        if p != rank {
            a.swap(p, rank);
            sign = -sign;
        }
        for r in rank + 1..nrows {
            for c in col + 1..ncols {
                let t = &a[rank][col] * &a[r][c] - &a[r][col] * &a[rank][c];
                a[r][c] = t / &prev;
            }
            a[r][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
        col += 1;
    }
    let det = if square && rank == nrows {
        sign * &a[nrows - 1][ncols - 1]
    } else {
        BigInt::zero()
    };
    (rank, det)
}

pub fn rank_integer(m: Vec<Vec<BigInt>>) -> usize {
    bareiss(m).0
}

pub fn det_integer(m: Vec<Vec<BigInt>>) -> BigInt {
    assert!(m.iter().all(|r| r.len() == m.len()), "determinant of non-square matrix");
    bareiss(m).1
}

pub fn rank(m: &[Vec<Rational>]) -> usize {
    rank_integer(clear_denominators(m).0)
}

pub fn det(m: &[Vec<Rational>]) -> Rational {
    if m.is_empty() {
        return Rational::one();
    }
    let (z, scale) = clear_denominators(m);
    Rational::new(det_integer(z), scale)
}

/// Reduced row echelon form with unit pivots; zero rows dropped.
/// Returns the nonzero rows and their pivot columns.
pub fn rref(mut a: Vec<Vec<Rational>>) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x -= &f * p;
            }
        }
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

/// Basis of `{v : m v = 0}` (column vectors of length `ncols`).
pub fn nullspace(m: Vec<Vec<Rational>>, ncols: usize) -> Vec<Vec<Rational>> {
    let (rows, pivots) = rref(m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); ncols];
            v[f] = Rational::one();
            for (row, &p) in rows.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

pub fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let inner = b.len();
    let ncols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..ncols)
                .map(|c| {
                    (0..inner).fold(Rational::zero(), |acc, k| acc + &row[k] * &b[k][c])
                })
                .collect()
        })
        .collect()
}

pub fn is_zero_matrix(a: &[Vec<Rational>]) -> bool {
    a.iter().all(|r| r.iter().all(Zero::is_zero))
}

/// `true` iff some power `a^k` with `k ≤ n` vanishes.
pub fn is_nilpotent_matrix(a: &[Vec<Rational>]) -> bool {
    let mut p = a.to_vec();
    for _ in 0..a.len() {
        if is_zero_matrix(&p) {
            return true;
        }
        p = mat_mul(&p, a);
    }
    is_zero_matrix(&p)
}

pub fn max_abs(v: &[Rational]) -> Rational {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(Rational::zero)
}
