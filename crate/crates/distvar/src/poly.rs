//! Univariate and bivariate polynomials with complex coefficients.
//!
//! Everything downstream of the transfer-function route works with
//! polynomials recovered by evaluation at roots of unity, so interpolation
//! is an inverse DFT and root finding goes through the companion matrix.

use crate::error::{Error, Result};
use crate::matrix::{C64, Matrix, ONE, ZERO};
use crate::schur::eigenvalues;

/// Univariate polynomial, coefficients in ascending degree order.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    pub coeffs: Vec<C64>,
}

impl Poly {
    pub fn new(coeffs: Vec<C64>) -> Self {
        let mut p = Poly { coeffs };
        if p.coeffs.is_empty() {
            p.coeffs.push(ZERO);
        }
        p
    }

    pub fn constant(c: C64) -> Self {
        Poly { coeffs: vec![c] }
    }

    pub fn one() -> Self {
        Self::constant(ONE)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: C64) -> C64 {
        let mut acc = ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drops trailing coefficients of modulus at most `tol`.
    pub fn trim(&self, tol: f64) -> Poly {
        let mut coeffs = self.coeffs.clone();
        while coeffs.len() > 1 && coeffs.last().unwrap().norm() <= tol {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// Divides by (z - alpha). Returns the quotient and the remainder
    /// (which is self(alpha)).
    pub fn synthetic_div(&self, alpha: C64) -> (Poly, C64) {
        let n = self.coeffs.len();
        if n == 1 {
            return (Poly::constant(ZERO), self.coeffs[0]);
        }
        let mut q = vec![ZERO; n - 1];
        let mut carry = ZERO;
        for i in (0..n).rev() {
            let val = self.coeffs[i] + carry;
            if i == 0 {
                return (Poly { coeffs: q }, val);
            }
            q[i - 1] = val;
            carry = val * alpha;
        }
        unreachable!()
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut coeffs = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Poly { coeffs }
    }

    /// Roots with multiplicity via the companion matrix of the trimmed
    /// polynomial. A (near-)constant polynomial has no roots.
    pub fn roots(&self, tol: f64) -> Result<Vec<C64>> {
        let scale = self.max_coeff();
        if scale == 0.0 {
            return Err(Error::InvalidInput("root-finding on the zero polynomial".into()));
        }
        let p = self.trim(1e-12 * scale);
        let n = p.degree();
        if n == 0 {
            return Ok(Vec::new());
        }
        let lead = p.coeffs[n];
        let mut comp = Matrix::zeros(n, n);
        for i in 1..n {
            comp[(i, i - 1)] = ONE;
        }
        for i in 0..n {
            comp[(i, n - 1)] = -p.coeffs[i] / lead;
        }
        eigenvalues(&comp, tol)
    }
}

/// Interpolates the polynomial of degree < `values.len()` from its values at
/// the roots of unity exp(2 pi i k / N), k = 0..N. This is an inverse DFT.
pub fn interpolate_at_unit_roots(values: &[C64]) -> Poly {
    let n = values.len();
    let mut coeffs = vec![ZERO; n];
    for (j, c) in coeffs.iter_mut().enumerate() {
        let mut acc = ZERO;
        for (k, &v) in values.iter().enumerate() {
            let angle = -2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64;
            acc += v * C64::from_polar(1.0, angle);
        }
        *c = acc / n as f64;
    }
    Poly { coeffs }
}

/// The k-th of N unit roots, exp(2 pi i k / N).
pub fn unit_root(k: usize, n: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64)
}

/// Bivariate polynomial; `coeffs[i][j]` multiplies z1^i z2^j.
#[derive(Clone, Debug)]
pub struct BivariatePoly {
    pub coeffs: Vec<Vec<C64>>,
}

impl BivariatePoly {
    pub fn new(coeffs: Vec<Vec<C64>>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|row| row.len() != coeffs[0].len()) {
            return Err(Error::InvalidInput("ragged bivariate coefficient grid".into()));
        }
        Ok(BivariatePoly { coeffs })
    }

    pub fn deg1(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn deg2(&self) -> usize {
        self.coeffs[0].len() - 1
    }

    pub fn eval(&self, z1: C64, z2: C64) -> C64 {
        // Horner in z1 over Horner-in-z2 row values.
        let mut acc = ZERO;
        for row in self.coeffs.iter().rev() {
            let mut row_val = ZERO;
            for &c in row.iter().rev() {
                row_val = row_val * z2 + c;
            }
            acc = acc * z1 + row_val;
        }
        acc
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs
            .iter()
            .flatten()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Shrinks the grid so that the top row and column each carry a
    /// coefficient of modulus above `tol`.
    pub fn trim(&self, tol: f64) -> BivariatePoly {
        let mut rows = self.coeffs.len();
        while rows > 1
            && self.coeffs[rows - 1].iter().all(|c| c.norm() <= tol)
        {
            rows -= 1;
        }
        let mut cols = self.coeffs[0].len();
        while cols > 1
            && self.coeffs[..rows].iter().all(|row| row[cols - 1].norm() <= tol)
        {
            cols -= 1;
        }
        BivariatePoly {
            coeffs: self.coeffs[..rows]
                .iter()
                .map(|row| row[..cols].to_vec())
                .collect(),
        }
    }

    /// Scales so the coefficient at the lexicographically largest (i, j)
    /// position with modulus above `tol` becomes exactly 1.
    pub fn normalize(&self, tol: f64) -> BivariatePoly {
        let mut pivot = None;
        for i in (0..self.coeffs.len()).rev() {
            for j in (0..self.coeffs[i].len()).rev() {
                if self.coeffs[i][j].norm() > tol {
                    pivot = Some(self.coeffs[i][j]);
                    break;
                }
            }
            if pivot.is_some() {
                break;
            }
        }
        let Some(lead) = pivot else {
            return self.clone();
        };
        BivariatePoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|row| row.iter().map(|&c| c / lead).collect())
                .collect(),
        }
    }

    /// Coefficient polynomials in z2: result[j] is the univariate polynomial
    /// in z1 multiplying z2^j.
    pub fn z2_coefficient_polys(&self) -> Vec<Poly> {
        (0..=self.deg2())
            .map(|j| Poly::new(self.coeffs.iter().map(|row| row[j]).collect()))
            .collect()
    }

    pub fn from_z2_coefficient_polys(polys: &[Poly]) -> BivariatePoly {
        let deg1 = polys.iter().map(|p| p.degree()).max().unwrap_or(0);
        let coeffs = (0..=deg1)
            .map(|i| {
                polys
                    .iter()
                    .map(|p| p.coeffs.get(i).copied().unwrap_or(ZERO))
                    .collect()
            })
            .collect();
        BivariatePoly { coeffs }
    }
}
