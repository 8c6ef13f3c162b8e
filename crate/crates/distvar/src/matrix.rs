//! Dense complex matrices with the small set of operations the variety
//! computations need: arithmetic, norms, LU solves, and determinants.
//!
//! Dimensions stay small (model spaces of dimension <= 32), so everything is
//! written for clarity and numerical robustness rather than blocking.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

pub type C64 = Complex64;

/// Row-major dense matrix over `Complex64`.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from row vectors; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidInput("matrix needs at least one row".into()));
        }
        let cols = rows[0].len();
        if cols == 0 {
            return Err(Error::InvalidInput("matrix needs at least one column".into()));
        }
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("ragged rows in matrix literal".into()));
        }
        let mut m = Matrix::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        Ok(m)
    }

    /// Builds a matrix from real row literals, mostly for fixtures and tests.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let cols = rows[0].len();
        Matrix::from_fn(rows.len(), cols, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn diag(entries: &[C64]) -> Self {
        let mut m = Matrix::zeros(entries.len(), entries.len());
        for (i, v) in entries.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NonSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].conj())
    }

    pub fn adjoint(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, c: C64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        let n = self.rows.min(self.cols);
        (0..n).map(|i| self[(i, i)]).sum()
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[C64]) {
        assert_eq!(v.len(), self.rows);
        for i in 0..self.rows {
            self[(i, j)] = v[i];
        }
    }

    /// Returns the submatrix with the given half-open row/column ranges.
    pub fn slice(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix {
        assert!(r0 <= r1 && r1 <= self.rows && c0 <= c1 && c1 <= self.cols);
        Matrix::from_fn(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![ZERO; self.rows];
        for i in 0..self.rows {
            let mut acc = ZERO;
            for j in 0..self.cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Stacks matrices with equal column counts on top of each other.
    pub fn stack_vertical(parts: &[&Matrix]) -> Result<Matrix> {
        if parts.is_empty() {
            return Err(Error::InvalidInput("nothing to stack".into()));
        }
        let cols = parts[0].cols;
        if parts.iter().any(|m| m.cols != cols) {
            return Err(Error::DimensionMismatch {
                context: "vertical stack needs equal column counts".into(),
            });
        }
        let rows = parts.iter().map(|m| m.rows).sum();
        let mut out = Matrix::zeros(rows, cols);
        let mut r = 0;
        for m in parts {
            for i in 0..m.rows {
                for j in 0..cols {
                    out[(r + i, j)] = m[(i, j)];
                }
            }
            r += m.rows;
        }
        Ok(out)
    }

    /// Places `block` at the diagonal offset `(r0, c0)` of a copy of `self`.
    pub fn with_block(&self, r0: usize, c0: usize, block: &Matrix) -> Matrix {
        let mut out = self.clone();
        for i in 0..block.rows {
            for j in 0..block.cols {
                out[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
        out
    }

    /// Direct sum `diag(self, other)`.
    pub fn direct_sum(&self, other: &Matrix) -> Matrix {
        let out = Matrix::zeros(self.rows + other.rows, self.cols + other.cols);
        out.with_block(0, 0, self).with_block(self.rows, self.cols, other)
    }

    /// Frobenius distance to the identity after forming `self* . self`.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&(&self.adjoint() * self) - &Matrix::identity(self.rows)).fro_norm()
    }

    /// LU factorization with partial pivoting; tolerates singular input so the
    /// determinant of a singular matrix comes out as zero.
    fn lu(&self) -> Result<(Matrix, Vec<usize>, usize)> {
        let n = self.require_square()?;
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let mut p = k;
            let mut best = a[(k, k)].norm();
            for i in k + 1..n {
                let v = a[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if p != k {
                for j in 0..n {
                    let t = a[(k, j)];
                    a[(k, j)] = a[(p, j)];
                    a[(p, j)] = t;
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = a[(k, k)];
            if pivot.norm() == 0.0 {
                continue;
            }
            for i in k + 1..n {
                let m = a[(i, k)] / pivot;
                a[(i, k)] = m;
                for j in k + 1..n {
                    let sub = m * a[(k, j)];
                    a[(i, j)] -= sub;
                }
            }
        }
        Ok((a, perm, swaps))
    }

    pub fn det(&self) -> Result<C64> {
        let (lu, _, swaps) = self.lu()?;
        let mut d = if swaps % 2 == 0 { ONE } else { -ONE };
        for i in 0..lu.rows {
            d *= lu[(i, i)];
        }
        Ok(d)
    }

    /// Solves `self * X = rhs`; fails with `SingularResolvent` when a pivot
    /// underflows relative to the matrix scale.
    pub fn solve(&self, rhs: &Matrix) -> Result<Matrix> {
        let n = self.require_square()?;
        if rhs.rows != n {
            return Err(Error::DimensionMismatch {
                context: format!("solve: lhs is {n}x{n}, rhs has {} rows", rhs.rows),
            });
        }
        let (lu, perm, _) = self.lu()?;
        let scale = self.max_abs().max(1.0);
        let tiny = scale * 1e-300_f64.max(f64::EPSILON * f64::EPSILON);
        for i in 0..n {
            if lu[(i, i)].norm() <= tiny {
                return Err(Error::SingularResolvent);
            }
        }
        let mut x = Matrix::zeros(n, rhs.cols);
        for c in 0..rhs.cols {
            // Forward substitution on the permuted right-hand side.
            let mut y = vec![ZERO; n];
            for i in 0..n {
                let mut acc = rhs[(perm[i], c)];
                for j in 0..i {
                    acc -= lu[(i, j)] * y[j];
                }
                y[i] = acc;
            }
            for i in (0..n).rev() {
                let mut acc = y[i];
                for j in i + 1..n {
                    acc -= lu[(i, j)] * x[(j, c)];
                }
                x[(i, c)] = acc / lu[(i, i)];
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        let n = self.require_square()?;
        self.solve(&Matrix::identity(n))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale(-ONE)
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    let add = a * rhs[(k, j)];
                    out[(i, j)] += add;
                }
            }
        }
        out
    }
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn product_and_adjoint_agree_with_hand_computation() {
        let a = Matrix::from_rows(&[vec![c(1.0, 1.0), c(0.0, 2.0)], vec![c(3.0, 0.0), c(-1.0, 0.5)]])
            .unwrap();
        let b = Matrix::identity(2);
        assert!((&(&a * &b) - &a).fro_norm() < 1e-15);
        let aa = a.adjoint();
        assert_eq!(aa[(0, 1)], c(3.0, 0.0));
        assert_eq!(aa[(1, 0)], c(0.0, -2.0));
    }

    #[test]
    fn solve_recovers_known_solution() {
        let a = Matrix::from_rows(&[
            vec![c(2.0, 0.0), c(1.0, -1.0), c(0.0, 0.0)],
            vec![c(0.0, 1.0), c(3.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0), c(-2.0, 1.0)],
        ])
        .unwrap();
        let x = Matrix::from_rows(&[vec![c(1.0, 2.0)], vec![c(-0.5, 0.0)], vec![c(0.0, 1.0)]]).unwrap();
        let b = &a * &x;
        let got = a.solve(&b).unwrap();
        assert!((&got - &x).fro_norm() < 1e-12);
    }

    #[test]
    fn determinant_of_triangular_matrix_is_diagonal_product() {
        let t = Matrix::from_rows(&[
            vec![c(2.0, 0.0), c(5.0, 1.0)],
            vec![c(0.0, 0.0), c(0.5, -0.5)],
        ])
        .unwrap();
        let d = t.det().unwrap();
        let expect = c(2.0, 0.0) * c(0.5, -0.5);
        assert!((d - expect).norm() < 1e-14);
    }

    #[test]
    fn singular_solve_is_rejected() {
        let a = Matrix::from_rows(&[vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(2.0, 0.0), c(4.0, 0.0)]])
            .unwrap();
        let rhs = Matrix::identity(2);
        assert!(matches!(a.solve(&rhs), Err(Error::SingularResolvent)));
        assert!(a.det().unwrap().norm() < 1e-14);
    }

    #[test]
    fn direct_sum_places_blocks() {
        let a = Matrix::identity(1).scale(c(2.0, 0.0));
        let b = Matrix::identity(2);
        let s = a.direct_sum(&b);
        assert_eq!(s.rows(), 3);
        assert_eq!(s[(0, 0)], c(2.0, 0.0));
        assert_eq!(s[(1, 1)], ONE);
        assert_eq!(s[(0, 1)], ZERO);
    }
}
