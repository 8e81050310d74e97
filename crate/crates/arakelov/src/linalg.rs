//! Exact linear algebra over the rationals.
//!
//! Elimination is fraction-free: every row is kept as a primitive integer
//! vector (content divided out, sign-normalized), and row combinations are
//! integer cross-multiplications. Pivots are chosen by minimal numerator
//! magnitude to limit coefficient growth. A sparse variant backs the
//! Manin-symbol quotient, a dense one the fiber solves and operator algebra.

use crate::rat::{q_int, Q};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// Dense matrix of exact rationals, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMat {
    pub nrows: usize,
    pub ncols: usize,
    data: Vec<Q>,
}

impl QMat {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        QMat {
            nrows,
            ncols,
            data: vec![Q::zero(); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == ncols));
        QMat {
            nrows,
            ncols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        QMat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| q_int(x)).collect())
                .collect(),
        )
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.ncols);
        (0..self.nrows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Q::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn mul(&self, other: &QMat) -> QMat {
        assert_eq!(self.ncols, other.nrows);
        let mut out = QMat::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.ncols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let prod = a * b;
                        out[(i, j)] += prod;
                    }
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &QMat) -> QMat {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(&other.data) {
            *x -= y;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (QMat, Vec<usize>) {
        let mut rows: Vec<Vec<Q>> = (0..self.nrows).map(|i| self.row(i).to_vec()).collect();
        for r in rows.iter_mut() {
            normalize_row(r);
        }
        let mut pivots = Vec::new();
        let mut next_row = 0usize;
        for col in 0..self.ncols {
            // minimal-magnitude pivot among candidate rows
            let mut best: Option<(usize, BigInt)> = None;
            for (r, row) in rows.iter().enumerate().skip(next_row) {
                let v = &row[col];
                if v.is_zero() {
                    continue;
                }
                let mag = v.numer().abs();
                match &best {
                    Some((_, m)) if *m <= mag => {}
                    _ => best = Some((r, mag)),
                }
            }
            let Some((r, _)) = best else { continue };
            rows.swap(next_row, r);
            let (before, rest) = rows.split_at_mut(next_row);
            let (pivot_row, after) = rest.split_first_mut().unwrap();
            for other in before.iter_mut().chain(after.iter_mut()) {
                if !other[col].is_zero() {
                    combine_rows(other, pivot_row, col);
                }
            }
            pivots.push(col);
            next_row += 1;
        }
        // scale pivot rows to leading 1 for a canonical reduced form
        for (r, &col) in pivots.iter().enumerate() {
            let inv = rows[r][col].recip();
            for x in rows[r].iter_mut() {
                if !x.is_zero() {
                    *x *= &inv;
                }
            }
        }
        (QMat::from_rows(rows), pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<Q>> {
        let (r, pivots) = self.rref();
        let pivot_set: BTreeMap<usize, usize> =
            pivots.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut basis = Vec::new();
        for free in 0..self.ncols {
            if pivot_set.contains_key(&free) {
                continue;
            }
            let mut v = vec![Q::zero(); self.ncols];
            v[free] = Q::one();
            for (&pc, &pr) in &pivot_set {
                v[pc] = -r[(pr, free)].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Exact solve of `self · X = rhs` for a system with a unique solution
    /// (full column rank and consistent). Returns `None` otherwise.
    pub fn solve_columns(&self, rhs: &QMat) -> Option<QMat> {
        assert_eq!(self.nrows, rhs.nrows);
        let n = self.ncols;
        let k = rhs.ncols;
        let mut aug = QMat::zeros(self.nrows, n + k);
        for i in 0..self.nrows {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..k {
                aug[(i, n + j)] = rhs[(i, j)].clone();
            }
        }
        let (r, pivots) = aug.rref();
        let structural: Vec<usize> = pivots.iter().copied().filter(|&c| c < n).collect();
        if structural.len() != n || structural.len() != pivots.len() {
            return None; // rank-deficient or inconsistent
        }
        let mut x = QMat::zeros(n, k);
        for (row, &col) in structural.iter().enumerate() {
            for j in 0..k {
                x[(col, j)] = r[(row, n + j)].clone();
            }
        }
        Some(x)
    }
}

impl std::ops::Index<(usize, usize)> for QMat {
    type Output = Q;
    fn index(&self, (i, j): (usize, usize)) -> &Q {
        &self.data[i * self.ncols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        &mut self.data[i * self.ncols + j]
    }
}

/// Scale a row to a primitive integer vector with positive leading entry.
fn normalize_row(row: &mut [Q]) {
    let mut lcm = BigInt::one();
    for x in row.iter() {
        if !x.is_zero() {
            lcm = lcm.lcm(x.denom());
        }
    }
    if !lcm.is_one() {
        let f = Q::from_integer(lcm);
        for x in row.iter_mut() {
            if !x.is_zero() {
                *x *= &f;
            }
        }
    }
    let mut gcd = BigInt::zero();
    for x in row.iter() {
        if !x.is_zero() {
            gcd = gcd.gcd(x.numer());
        }
    }
    if gcd > BigInt::one() {
        let f = Q::from_integer(gcd);
        for x in row.iter_mut() {
            if !x.is_zero() {
                *x /= &f;
            }
        }
    }
    if let Some(lead) = row.iter().find(|x| !x.is_zero()) {
        if lead.numer().is_negative() {
            for x in row.iter_mut() {
                if !x.is_zero() {
                    *x = -x.clone();
                }
            }
        }
    }
}

/// target := target·pivot[col] − pivot·target[col], then renormalized.
fn combine_rows(target: &mut [Q], pivot: &[Q], col: usize) {
    let a = pivot[col].clone();
    let b = target[col].clone();
    for (t, p) in target.iter_mut().zip(pivot) {
        *t = &*t * &a - p * &b;
    }
    normalize_row(target);
}

/// Exact determinant of an integer matrix (Bareiss fraction-free scheme).
pub fn det_bigint(mat: &[Vec<BigInt>]) -> BigInt {
    let n = mat.len();
    if n == 0 {
        return BigInt::one();
    }
    assert!(mat.iter().all(|r| r.len() == n));
    let mut a: Vec<Vec<BigInt>> = mat.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Result of eliminating a sparse integer relation system: the surviving
/// free columns (quotient basis) and, for each pivot column, its expression
/// over the free columns.
#[derive(Debug, Clone)]
pub struct SparseElim {
    pub ncols: usize,
    pub free_cols: Vec<usize>,
    pub pivot_expr: BTreeMap<usize, Vec<(usize, Q)>>,
}

type SparseRow = Vec<(usize, BigInt)>;

fn normalize_sparse(row: &mut SparseRow) {
    row.retain(|(_, c)| !c.is_zero());
    if row.is_empty() {
        return;
    }
    let mut g = BigInt::zero();
    for (_, c) in row.iter() {
        g = g.gcd(c);
    }
    if g > BigInt::one() {
        for (_, c) in row.iter_mut() {
            *c = &*c / &g;
        }
    }
    if row[0].1.is_negative() {
        for (_, c) in row.iter_mut() {
            *c = -c.clone();
        }
    }
}

fn sparse_combine(target: &SparseRow, pivot: &SparseRow, col: usize) -> SparseRow {
    let a = pivot.iter().find(|(j, _)| *j == col).unwrap().1.clone();
    let b = target.iter().find(|(j, _)| *j == col).unwrap().1.clone();
    let mut merged: BTreeMap<usize, BigInt> = BTreeMap::new();
    for (j, c) in target {
        merged.insert(*j, c * &a);
    }
    for (j, c) in pivot {
        let e = merged.entry(*j).or_insert_with(BigInt::zero);
        *e -= c * &b;
    }
    let mut out: SparseRow = merged.into_iter().collect();
    normalize_sparse(&mut out);
    out
}

/// Full Gauss-Jordan elimination on sparse primitive integer rows.
/// Pivot entries are selected by minimal coefficient magnitude, breaking
/// ties toward sparser rows, so coefficient blow-up stays tame.
pub fn sparse_eliminate(mut rows: Vec<SparseRow>, ncols: usize) -> SparseElim {
    for r in rows.iter_mut() {
        r.sort_by_key(|(j, _)| *j);
        let mut merged: BTreeMap<usize, BigInt> = BTreeMap::new();
        for (j, c) in r.iter() {
            *merged.entry(*j).or_insert_with(BigInt::zero) += c;
        }
        *r = merged.into_iter().collect();
        normalize_sparse(r);
    }
    rows.retain(|r| !r.is_empty());

    let mut finished: Vec<(usize, SparseRow)> = Vec::new(); // (pivot col, row)
    while !rows.is_empty() {
        // pick the entry with minimal |coefficient|, then sparsest row
        let mut best: Option<(usize, usize, BigInt, usize)> = None; // row, col, |c|, nnz
        for (ri, row) in rows.iter().enumerate() {
            for (j, c) in row {
                let mag = c.abs();
                let better = match &best {
                    None => true,
                    Some((_, bj, bm, bn)) => {
                        (mag.clone(), row.len(), *j) < (bm.clone(), *bn, *bj)
                    }
                };
                if better {
                    best = Some((ri, *j, mag, row.len()));
                }
            }
        }
        let (ri, col, _, _) = best.unwrap();
        let pivot = rows.swap_remove(ri);
        for row in rows.iter_mut() {
            if row.iter().any(|(j, _)| *j == col) {
                *row = sparse_combine(row, &pivot, col);
            }
        }
        rows.retain(|r| !r.is_empty());
        // keep earlier pivot rows reduced against the new pivot
        for (_, frow) in finished.iter_mut() {
            if frow.iter().any(|(j, _)| *j == col) {
                *frow = sparse_combine(frow, &pivot, col);
            }
        }
        finished.push((col, pivot));
    }

    let pivot_cols: std::collections::BTreeSet<usize> =
        finished.iter().map(|(c, _)| *c).collect();
    let free_cols: Vec<usize> = (0..ncols).filter(|c| !pivot_cols.contains(c)).collect();
    let free_index: BTreeMap<usize, usize> =
        free_cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();

    let mut pivot_expr = BTreeMap::new();
    for (col, row) in finished {
        let pc = row.iter().find(|(j, _)| *j == col).unwrap().1.clone();
        let mut expr = Vec::new();
        for (j, c) in &row {
            if *j == col {
                continue;
            }
            debug_assert!(free_index.contains_key(j), "row not fully reduced");
            expr.push((free_index[j], -Q::new(c.clone(), pc.clone())));
        }
        expr.sort_by_key(|(j, _)| *j);
        pivot_expr.insert(col, expr);
    }
    SparseElim {
        ncols,
        free_cols,
        pivot_expr,
    }
}

impl SparseElim {
    /// Express unit vector `col` over the free columns.
    pub fn project(&self, col: usize) -> Vec<(usize, Q)> {
        if let Some(expr) = self.pivot_expr.get(&col) {
            expr.clone()
        } else {
            let idx = self.free_cols.binary_search(&col).expect("column in range");
            vec![(idx, Q::one())]
        }
    }
}

/// Incremental echelon basis over Q, used for exact rank tracking.
#[derive(Debug, Clone, Default)]
pub struct Echelon {
    rows: Vec<(usize, Vec<Q>)>, // (pivot index, normalized row)
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` against the basis; returns the remainder.
    pub fn reduce(&self, mut v: Vec<Q>) -> Vec<Q> {
        for (p, row) in &self.rows {
            if !v[*p].is_zero() {
                let f = &v[*p] / &row[*p];
                for (x, r) in v.iter_mut().zip(row) {
                    *x -= &f * r;
                }
            }
        }
        v
    }

    /// Insert `v` if independent; returns true when the rank grew.
    pub fn insert(&mut self, v: Vec<Q>) -> bool {
        let mut v = self.reduce(v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        normalize_row(&mut v);
        self.rows.push((p, v));
        self.rows.sort_by_key(|(p, _)| *p);
        true
    }

    /// The accumulated rows as (pivot column, row), sorted by pivot.
    pub fn rows_for_inspection(&self) -> Vec<(usize, Vec<Q>)> {
        self.rows.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::q;

    #[test]
    fn rref_rank_kernel() {
        // rank-2 matrix with kernel (1,1,1)
        let m = QMat::from_i64(&[vec![-2, 1, 1], vec![1, -2, 1], vec![1, 1, -2]]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        let ones: Vec<Q> = k[0].iter().map(|x| x / &k[0][0]).collect();
        assert!(ones.iter().all(|x| *x == q(1, 1)));
    }

    #[test]
    fn solve_exact() {
        let a = QMat::from_i64(&[vec![2, 1], vec![1, 3], vec![0, 1]]);
        // 2x+y=5, x+3y=10 has solution (1,3); third row y=4 contradicts it
        let inconsistent = QMat::from_i64(&[vec![5], vec![10], vec![4]]);
        assert!(a.solve_columns(&inconsistent).is_none());
        let consistent = QMat::from_i64(&[vec![5], vec![10], vec![3]]);
        let x = a.solve_columns(&consistent).expect("consistent");
        assert_eq!(x[(0, 0)], q(1, 1));
        assert_eq!(x[(1, 0)], q(3, 1));
    }

    #[test]
    fn bareiss_determinant() {
        let m: Vec<Vec<BigInt>> = vec![
            vec![BigInt::from(-2), BigInt::from(1)],
            vec![BigInt::from(1), BigInt::from(-2)],
        ];
        assert_eq!(det_bigint(&m), BigInt::from(3));
        let singular: Vec<Vec<BigInt>> = vec![
            vec![BigInt::from(1), BigInt::from(2)],
            vec![BigInt::from(2), BigInt::from(4)],
        ];
        assert_eq!(det_bigint(&singular), BigInt::from(0));
    }

    #[test]
    fn sparse_elimination_projects() {
        // x0 + x1 = 0, x1 + x2 + x3 = 0 over 4 columns
        let rows = vec![
            vec![(0, BigInt::from(1)), (1, BigInt::from(1))],
            vec![(1, BigInt::from(1)), (2, BigInt::from(1)), (3, BigInt::from(1))],
        ];
        let elim = sparse_eliminate(rows, 4);
        assert_eq!(elim.free_cols.len(), 2);
        // whichever columns are free, every projection satisfies the relations
        let as_vec = |col: usize| {
            let mut v = vec![Q::zero(); elim.free_cols.len()];
            for (j, c) in elim.project(col) {
                v[j] += c;
            }
            v
        };
        let sum01: Vec<Q> = as_vec(0)
            .iter()
            .zip(as_vec(1).iter())
            .map(|(a, b)| a + b)
            .collect();
        assert!(sum01.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn echelon_rank_tracking() {
        let mut e = Echelon::new();
        assert!(e.insert(vec![q(1, 1), q(2, 1), q(0, 1)]));
        assert!(!e.insert(vec![q(2, 1), q(4, 1), q(0, 1)]));
        assert!(e.insert(vec![q(0, 1), q(1, 1), q(1, 1)]));
        assert_eq!(e.rank(), 2);
    }
}
