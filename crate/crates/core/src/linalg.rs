//! Exact rational linear algebra: row reduction, rank, nullspace, solves.
//!
//! Dense routines serve the small systems (Gram matrices, monomial
//! nullspaces); [`Echelon`] keeps a sparse incremental echelon form for the
//! wider rank tests on flattened polynomial coefficient vectors.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Rational;

pub type Matrix = Vec<Vec<Rational>>;

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![Rational::zero(); cols]; rows]
}

pub fn identity(n: usize) -> Matrix {
    let mut a = zeros(n, n);
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = Rational::one();
    }
    a
}

pub fn transpose(a: &Matrix) -> Matrix {
    if a.is_empty() {
        return Vec::new();
    }
    let (r, c) = (a.len(), a[0].len());
    (0..c).map(|j| (0..r).map(|i| a[i][j].clone()).collect()).collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            let mut out = vec![Rational::zero(); n];
            for (k, aik) in row.iter().enumerate() {
                if aik.is_zero() {
                    continue;
                }
                for (j, bkj) in b[k].iter().enumerate() {
                    if !bkj.is_zero() {
                        out[j] += aik * bkj;
                    }
                }
            }
            out
        })
        .collect()
}

pub fn mat_vec(a: &Matrix, x: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .filter(|(p, q)| !p.is_zero() && !q.is_zero())
                .fold(Rational::zero(), |acc, (p, q)| acc + p * q)
        })
        .collect()
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(a: &mut Matrix) -> Vec<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for v in a[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(a: &Matrix) -> usize {
    let mut b = a.clone();
    rref(&mut b).len()
}

/// Basis of `{x : A x = 0}`, one vector per free column.
pub fn nullspace(a: &Matrix, cols: usize) -> Vec<Vec<Rational>> {
    let mut b = a.clone();
    let pivots = rref(&mut b);
    let pivot_set: BTreeMap<usize, usize> = pivots.iter().enumerate().map(|(r, &c)| (c, r)).collect();
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivot_set.contains_key(c)) {
        let mut v = vec![Rational::zero(); cols];
        v[free] = Rational::one();
        for (&pc, &r) in &pivot_set {
            v[pc] = -b[r][free].clone();
        }
        out.push(v);
    }
    out
}

/// One solution of `A x = b` (free variables set to zero).
pub fn solve(a: &Matrix, b: &[Rational]) -> Result<Vec<Rational>> {
    let cols = a.first().map_or(0, |r| r.len());
    let mut aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&cols) {
        return Err(Error::Inconsistent("right-hand side outside the column space".into()));
    }
    let mut x = vec![Rational::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][cols].clone();
    }
    Ok(x)
}

/// Minimal Euclidean norm solution `x = Aᵀ y` with `A Aᵀ y = b`.
pub fn min_norm_solve(a: &Matrix, b: &[Rational]) -> Result<Vec<Rational>> {
    let at = transpose(a);
    let aat = mat_mul(a, &at);
    let y = solve(&aat, b)?;
    Ok(mat_vec(&at, &y))
}

pub fn inverse(a: &Matrix) -> Result<Matrix> {
    let n = a.len();
    let mut aug: Matrix = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return Err(Error::Inconsistent("matrix is singular".into()));
    }
    Ok(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub type SparseVec = BTreeMap<usize, Rational>;

fn axpy(target: &mut SparseVec, f: &Rational, v: &SparseVec) {
    for (c, q) in v {
        let e = target.entry(*c).or_insert_with(Rational::zero);
        *e -= f * q;
        if e.is_zero() {
            target.remove(c);
        }
    }
}

/// Incrementally maintained echelon basis of a span of sparse vectors.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, SparseVec>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` against the stored rows; the result is zero iff `v` lies in the span.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut v = v.clone();
        loop {
            let hit = v
                .iter()
                .find(|(c, _)| self.rows.contains_key(c))
                .map(|(c, q)| (*c, q.clone()));
            let Some((c, q)) = hit else { break };
            axpy(&mut v, &q, &self.rows[&c]);
        }
        v
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Insert `v`; returns false when it was already in the span.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let r = self.reduce(v);
        let Some((&c, lead)) = r.iter().next() else {
            return false;
        };
        let inv = lead.recip();
        let r: SparseVec = r.into_iter().map(|(k, q)| (k, q * &inv)).collect();
        self.rows.insert(c, r);
        true
    }
}
