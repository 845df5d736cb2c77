//! Dense linear algebra over the rationals.
//!
//! Everything here is exact: ranks, kernels and solutions never depend on a
//! tolerance. Matrices are small (at most a few dozen rows), so a plain
//! row-major `Vec` with Gauss-Jordan elimination is all that is needed.

use std::fmt;

use num_traits::{One, Zero};

use crate::rational::{self, Rat};

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(rational::format).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Builds a matrix whose columns are the given vectors, all of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<Rat>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        Self { rows, cols, data: entries.iter().map(|&e| rational::rat(e)).collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Rat] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Rat> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn entries(&self) -> &[Rat] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matrix-vector product");
        (0..self.rows).map(|r| rational::dot(self.row(r), v)).collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: &Rat) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn commutator(&self, other: &Matrix) -> Matrix {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn trace(&self) -> Rat {
        (0..self.rows.min(self.cols)).fold(Rat::zero(), |acc, i| acc + &self[(i, i)])
    }

    /// Appends the columns of `other` on the right.
    pub fn augment(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        let mut out = Matrix::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(r, c)] = self[(r, c)].clone();
            }
            for c in 0..other.cols {
                out[(r, self.cols + c)] = other[(r, c)].clone();
            }
        }
        out
    }

    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut pivot_row = 0;
        for col in 0..m.cols {
            if pivot_row == m.rows {
                break;
            }
            let Some(found) = (pivot_row..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(found, pivot_row);
            let inv = m[(pivot_row, col)].recip();
            for c in col..m.cols {
                let v = &m[(pivot_row, c)] * &inv;
                m[(pivot_row, c)] = v;
            }
            for r in 0..m.rows {
                if r == pivot_row || m[(r, col)].is_zero() {
                    continue;
                }
                let factor = m[(r, col)].clone();
                for c in col..m.cols {
                    let delta = &factor * &m[(pivot_row, c)];
                    if !delta.is_zero() {
                        m[(r, c)] -= delta;
                    }
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        Rref { matrix: m, pivots }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of the right null space `{v : A v = 0}`.
    pub fn kernel(&self) -> Vec<Vec<Rat>> {
        let Rref { matrix, pivots } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rat::zero(); self.cols];
                v[f] = Rat::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -matrix[(row, f)].clone();
                }
                v
            })
            .collect()
    }

    /// Basis of `{c : cᵀ A = 0}`, the annihilator of the column space.
    pub fn left_kernel(&self) -> Vec<Vec<Rat>> {
        self.transpose().kernel()
    }

    /// Some solution of `A x = b`, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(b.len(), self.rows, "right-hand side length mismatch");
        let rhs = Matrix::from_columns(self.rows, &[b.to_vec()]);
        let Rref { matrix, pivots } = self.augment(&rhs).rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = matrix[(row, self.cols)].clone();
        }
        Some(x)
    }

    /// The solution of `A x = b` with the smallest Euclidean norm.
    ///
    /// This is the unique solution orthogonal to the kernel; it is computed
    /// by projecting any particular solution off the kernel exactly.
    pub fn solve_min_norm(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        let x = self.solve(b)?;
        Some(project_off(&x, &self.kernel()))
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let Rref { matrix, pivots } = self.augment(&Matrix::identity(n)).rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                inv[(r, c)] = matrix[(r, n + c)].clone();
            }
        }
        Some(inv)
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|r| (0..r).all(|c| self[(r, c)] == self[(c, r)]))
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |r, c| rational::to_f64(&self[(r, c)]))
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Rat;
    fn index(&self, (r, c): (usize, usize)) -> &Rat {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rat {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

/// Orthogonal projection of `x` onto the complement of `span(basis)`.
pub fn project_off(x: &[Rat], basis: &[Vec<Rat>]) -> Vec<Rat> {
    if basis.is_empty() {
        return x.to_vec();
    }
    let k = basis.len();
    let mut gram = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            gram[(i, j)] = rational::dot(&basis[i], &basis[j]);
        }
    }
    let rhs: Vec<Rat> = basis.iter().map(|v| rational::dot(v, x)).collect();
    let coeffs = gram.solve(&rhs).expect("Gram matrix of a basis is invertible");
    let mut out = x.to_vec();
    for (c, v) in coeffs.iter().zip(basis) {
        for (o, vi) in out.iter_mut().zip(v) {
            *o -= c * vi;
        }
    }
    out
}

/// Rank of a list of vectors of equal length.
pub fn span_rank(vectors: &[Vec<Rat>]) -> usize {
    match vectors.first() {
        None => 0,
        Some(v) => Matrix::from_rows(vectors.to_vec()).rank().min(v.len()),
    }
}

/// Whether `v` lies in the span of `vectors`.
pub fn in_span(vectors: &[Vec<Rat>], v: &[Rat]) -> bool {
    if vectors.is_empty() {
        return rational::is_zero_vec(v);
    }
    Matrix::from_columns(v.len(), vectors).solve(v).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    #[test]
    fn rank_and_kernel_of_singular_matrix() {
        let m = Matrix::from_i64(3, 3, &[1, 2, 3, 4, 5, 6, 7, 8, 9]);
        assert_eq!(m.rank(), 2);
        let ker = m.kernel();
        assert_eq!(ker.len(), 1);
        assert!(rational::is_zero_vec(&m.mul_vec(&ker[0])));
        assert_eq!(m.left_kernel().len(), 1);
    }

    #[test]
    fn solve_detects_inconsistency() {
        let m = Matrix::from_i64(2, 2, &[1, 1, 2, 2]);
        assert!(m.solve(&[rat(1), rat(3)]).is_none());
        let x = m.solve(&[rat(1), rat(2)]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![rat(1), rat(2)]);
    }

    #[test]
    fn min_norm_solution_is_orthogonal_to_kernel() {
        // x + y = 2 has minimum-norm solution (1, 1)
        let m = Matrix::from_i64(1, 2, &[1, 1]);
        assert_eq!(m.solve_min_norm(&[rat(2)]).unwrap(), vec![rat(1), rat(1)]);
        let m = Matrix::from_i64(1, 3, &[1, 2, 0]);
        assert_eq!(m.solve_min_norm(&[rat(5)]).unwrap(), vec![rat(1), rat(2), rat(0)]);
    }

    #[test]
    fn inverse_round_trip() {
        let m = Matrix::from_i64(3, 3, &[2, 0, 1, 1, 1, 0, 0, 3, 1]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(3));
        assert!(Matrix::from_i64(2, 2, &[1, 2, 2, 4]).inverse().is_none());
        assert_eq!(Matrix::from_i64(1, 1, &[4]).inverse().unwrap()[(0, 0)], ratio(1, 4));
    }

    #[test]
    fn span_membership() {
        let vs = vec![vec![rat(1), rat(0), rat(1)], vec![rat(0), rat(1), rat(1)]];
        assert!(in_span(&vs, &[rat(2), rat(3), rat(5)]));
        assert!(!in_span(&vs, &[rat(0), rat(0), rat(1)]));
        assert_eq!(span_rank(&vs), 2);
        assert!(in_span(&[], &[rat(0)]));
    }
}
