//! Dense linear algebra over GF(d): row reduction, rank, solving, inversion.
//!
//! Matrices here are tiny (at most a few hundred rows), so plain Gaussian
//! elimination with exact modular arithmetic is all that is needed.

use crate::field::{add_mod, inv_mod, mul_mod, neg_mod, sub_mod, PrimeField};

/// Row-major matrix over GF(d) with reduced entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    modulus: u64,
    data: Vec<u64>,
}

impl Matrix {
    pub fn zeros(field: &PrimeField, rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            modulus: field.modulus(),
            data: vec![0; rows * cols],
        }
    }

    pub fn from_rows(field: &PrimeField, rows: Vec<Vec<u64>>) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let d = field.modulus();
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for row in &rows {
            assert_eq!(row.len(), n_cols, "ragged matrix rows");
            data.extend(row.iter().map(|&v| v % d));
        }
        Self {
            rows: n_rows,
            cols: n_cols,
            modulus: d,
            data,
        }
    }

    pub fn identity(field: &PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v % self.modulus;
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix {
            rows: self.cols,
            cols: self.rows,
            modulus: self.modulus,
            data: vec![0; self.data.len()],
        };
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.get(r, c);
            }
        }
        out
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        assert_eq!(self.modulus, other.modulus, "modulus mismatch");
        let d = self.modulus;
        let mut out = Matrix {
            rows: self.rows,
            cols: other.cols,
            modulus: d,
            data: vec![0; self.rows * other.cols],
        };
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.get(i, j);
                    out.data[i * other.cols + j] =
                        add_mod(cur, mul_mod(a, other.get(l, j), d), d);
                }
            }
        }
        out
    }

    /// `v * self` for a row vector v of length `rows`.
    pub fn left_mul_vec(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.rows);
        let d = self.modulus;
        let mut out = vec![0u64; self.cols];
        for (r, &coef) in v.iter().enumerate() {
            if coef == 0 {
                continue;
            }
            for (c, slot) in out.iter_mut().enumerate() {
                *slot = add_mod(*slot, mul_mod(coef, self.get(r, c), d), d);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    /// In-place reduced row echelon form; returns the pivot column per
    /// eliminated row (so `pivots.len()` is the rank).
    pub fn rref(&mut self) -> Vec<usize> {
        let d = self.modulus;
        let mut pivots = Vec::new();
        let mut pivot_row = 0;
        for col in 0..self.cols {
            if pivot_row == self.rows {
                break;
            }
            let Some(sel) = (pivot_row..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            self.swap_rows(sel, pivot_row);
            let inv = inv_mod(self.get(pivot_row, col), d);
            self.scale_row(pivot_row, inv);
            for r in 0..self.rows {
                if r != pivot_row && self.get(r, col) != 0 {
                    let factor = self.get(r, col);
                    self.subtract_scaled_row(r, pivot_row, factor);
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        work.rref().len()
    }

    /// Inverse of a square matrix, or `None` when singular.
    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let d = self.modulus;
        // Augment with the identity and reduce.
        let mut aug = Matrix {
            rows: n,
            cols: 2 * n,
            modulus: d,
            data: vec![0; n * 2 * n],
        };
        for r in 0..n {
            for c in 0..n {
                aug.data[r * 2 * n + c] = self.get(r, c);
            }
            aug.data[r * 2 * n + n + r] = 1;
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        let mut out = Matrix::zeros(
            &PrimeField::new(d).expect("modulus was validated at construction"),
            n,
            n,
        );
        for r in 0..n {
            for c in 0..n {
                out.data[r * n + c] = aug.data[r * 2 * n + n + c];
            }
        }
        Some(out)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn scale_row(&mut self, r: usize, factor: u64) {
        let d = self.modulus;
        for c in 0..self.cols {
            let v = self.get(r, c);
            self.data[r * self.cols + c] = mul_mod(v, factor, d);
        }
    }

    fn subtract_scaled_row(&mut self, target: usize, source: usize, factor: u64) {
        let d = self.modulus;
        for c in 0..self.cols {
            let s = mul_mod(factor, self.get(source, c), d);
            let t = self.get(target, c);
            self.data[target * self.cols + c] = sub_mod(t, s, d);
        }
    }
}

/// Outcome of solving `A x = b` over GF(d).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    /// A particular solution (free variables set to zero).
    Solution(Vec<u64>),
    Inconsistent,
}

/// Solves `A x = b` by elimination on the augmented matrix.
pub fn solve(a: &Matrix, b: &[u64]) -> SolveOutcome {
    assert_eq!(a.rows, b.len(), "right-hand side length mismatch");
    let d = a.modulus;
    let mut aug = Matrix {
        rows: a.rows,
        cols: a.cols + 1,
        modulus: d,
        data: vec![0; a.rows * (a.cols + 1)],
    };
    for (r, &rhs) in b.iter().enumerate() {
        for c in 0..a.cols {
            aug.data[r * (a.cols + 1) + c] = a.get(r, c);
        }
        aug.data[r * (a.cols + 1) + a.cols] = rhs % d;
    }
    let pivots = aug.rref();
    // A pivot in the augmented column marks 0 = nonzero.
    if pivots.last() == Some(&a.cols) {
        return SolveOutcome::Inconsistent;
    }
    let mut x = vec![0u64; a.cols];
    for (row, &col) in pivots.iter().enumerate() {
        x[col] = aug.get(row, a.cols);
    }
    SolveOutcome::Solution(x)
}

/// Negates a vector componentwise mod d.
pub fn neg_vec(v: &[u64], d: u64) -> Vec<u64> {
    v.iter().map(|&x| neg_mod(x % d, d)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(d: u64) -> PrimeField {
        PrimeField::new(d).unwrap()
    }

    #[test]
    fn rank_and_rref() {
        let f = gf(3);
        let m = Matrix::from_rows(&f, vec![vec![1, 1, 1], vec![0, 1, 2], vec![1, 2, 0]]);
        // Third row = first + second, so rank 2.
        assert_eq!(m.rank(), 2);
        assert_eq!(Matrix::identity(&f, 3).rank(), 3);
    }

    #[test]
    fn solve_unique_system() {
        // Over GF(3): x + y = 2, x + 2y = 0 -> x = 1, y = 1.
        let f = gf(3);
        let a = Matrix::from_rows(&f, vec![vec![1, 1], vec![1, 2]]);
        match solve(&a, &[2, 0]) {
            SolveOutcome::Solution(x) => assert_eq!(x, vec![1, 1]),
            SolveOutcome::Inconsistent => panic!("system is consistent"),
        }
    }

    #[test]
    fn solve_detects_inconsistency() {
        let f = gf(5);
        let a = Matrix::from_rows(&f, vec![vec![1, 1], vec![2, 2]]);
        assert_eq!(solve(&a, &[1, 3]), SolveOutcome::Inconsistent);
        // Consistent underdetermined variant has a solution.
        assert!(matches!(solve(&a, &[1, 2]), SolveOutcome::Solution(_)));
    }

    #[test]
    fn inverse_round_trip() {
        let f = gf(7);
        let m = Matrix::from_rows(&f, vec![vec![1, 2, 3], vec![0, 1, 4], vec![5, 6, 0]]);
        let inv = m.inverse().expect("matrix is invertible");
        assert_eq!(m.matmul(&inv), Matrix::identity(&f, 3));
        assert_eq!(inv.matmul(&m), Matrix::identity(&f, 3));

        let singular = Matrix::from_rows(&f, vec![vec![1, 2], vec![2, 4]]);
        assert!(singular.inverse().is_none());
    }

    #[test]
    fn matmul_and_vector_products() {
        let f = gf(5);
        let a = Matrix::from_rows(&f, vec![vec![1, 2], vec![3, 4]]);
        let b = Matrix::from_rows(&f, vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(
            a.matmul(&b),
            Matrix::from_rows(&f, vec![vec![2, 1], vec![4, 3]])
        );
        assert_eq!(a.left_mul_vec(&[1, 1]), vec![4, 1]);
    }
}
