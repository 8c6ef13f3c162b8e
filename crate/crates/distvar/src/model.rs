//! Model triples, model tuples, unitary colligations, and the passages
//! between them: pencil evaluation, the realization formula, transfer
//! functions, and validation reports.
//!
//! A model triple is a projection P and a unitary U on the same
//! finite-dimensional space. Its pencil pair
//!
//!   Phi1(z) = (P^perp + zP)U,   Phi2(z) = U*(P + zP^perp)
//!
//! satisfies Phi1(z) Phi2(z) = zI identically, and the realization
//!
//!   Psi(z) = P (I - zU*P^perp)^{-1} U* P  restricted to Ran P
//!
//! is a rational inner function. Colligations carry the same data in block
//! form: U* = [A B; C D] against the splitting Ran P + Ran P^perp.

use crate::error::{Error, Result};
use crate::matrix::{C64, Matrix, ONE, ZERO};
use crate::poly::{interpolate_at_unit_roots, unit_root};
use crate::svd::orthonormal_complement;

/// One measured invariant: its defect against the tolerance it was judged at.
#[derive(Clone, Debug)]
pub struct CheckItem {
    pub name: String,
    pub defect: f64,
    pub tol: f64,
}

impl CheckItem {
    pub fn ok(&self) -> bool {
        self.defect <= self.tol
    }
}

/// Validation never throws; failures ride along as over-tolerance defects.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub checks: Vec<CheckItem>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(CheckItem::ok)
    }

    pub fn worst(&self) -> Option<&CheckItem> {
        self.checks
            .iter()
            .max_by(|a, b| {
                (a.defect / a.tol)
                    .partial_cmp(&(b.defect / b.tol))
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
    }

    fn push(&mut self, name: &str, defect: f64, tol: f64) {
        self.checks.push(CheckItem {
            name: name.to_string(),
            defect,
            tol,
        });
    }
}

/// Orthonormal basis of the column span of a (near-)projection, by
/// column-pivoted Gram-Schmidt. Pivot ties break to the lowest index so the
/// basis is a deterministic function of the matrix.
fn range_basis(p: &Matrix) -> Vec<Vec<C64>> {
    let n = p.rows();
    let mut work: Vec<Vec<C64>> = (0..n).map(|j| p.col(j)).collect();
    let mut basis: Vec<Vec<C64>> = Vec::new();
    let thresh = 1e-8;
    loop {
        let mut pivot = None;
        let mut best = thresh;
        for (j, col) in work.iter().enumerate() {
            let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > best {
                best = norm;
                pivot = Some(j);
            }
        }
        let Some(j) = pivot else {
            break;
        };
        let mut v = work[j].clone();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in v.iter_mut() {
            *z /= norm;
        }
        // One re-orthogonalization pass keeps the basis orthonormal to
        // machine precision even when pivots shrink.
        for b in &basis {
            let dot: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= dot * bi;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm <= thresh {
            work[j] = vec![ZERO; n];
            continue;
        }
        for z in v.iter_mut() {
            *z /= norm;
        }
        for col in work.iter_mut() {
            let dot: C64 = v.iter().zip(col.iter()).map(|(x, y)| x.conj() * *y).sum();
            for (ci, vi) in col.iter_mut().zip(&v) {
                *ci -= dot * vi;
            }
        }
        basis.push(v);
    }
    basis
}

fn basis_matrix(n: usize, basis: &[Vec<C64>]) -> Matrix {
    let mut m = Matrix::zeros(n, basis.len());
    for (j, v) in basis.iter().enumerate() {
        m.set_col(j, v);
    }
    m
}

/// Projection plus unitary on the same finite-dimensional space.
#[derive(Clone, Debug)]
pub struct ModelTriple {
    pub dim: usize,
    pub p: Matrix,
    pub u: Matrix,
    /// Orthonormal basis of Ran P as columns, fixed at construction.
    ran_p: Matrix,
}

impl ModelTriple {
    /// Shape and finiteness checks happen here; the matrix invariants
    /// (idempotence, unitarity) are measured by `validate`, not asserted.
    pub fn new(p: Matrix, u: Matrix) -> Result<Self> {
        let n = p.require_square()?;
        if u.require_square()? != n {
            return Err(Error::DimensionMismatch {
                context: "projection and unitary have different dimensions".into(),
            });
        }
        if !p.is_finite() || !u.is_finite() {
            return Err(Error::InvalidInput("non-finite entries in model triple".into()));
        }
        let basis = range_basis(&p);
        let ran_p = basis_matrix(n, &basis);
        Ok(ModelTriple { dim: n, p, u, ran_p })
    }

    pub fn p_perp(&self) -> Matrix {
        &Matrix::identity(self.dim) - &self.p
    }

    /// Dimension of Ran P (the coefficient space of the realization).
    pub fn ran_p_dim(&self) -> usize {
        self.ran_p.cols()
    }

    /// Orthonormal basis of Ran P, one column per basis vector.
    pub fn ran_p_basis(&self) -> &Matrix {
        &self.ran_p
    }

    /// The pencil pair (Phi1(z), Phi2(z)); their product is zI exactly.
    pub fn bcl_pair(&self, z: C64) -> (Matrix, Matrix) {
        let pp = self.p_perp();
        let phi1 = &(&pp + &self.p.scale(z)) * &self.u;
        let phi2 = &self.u.adjoint() * &(&self.p + &pp.scale(z));
        (phi1, phi2)
    }

    /// F = PU + U*P^perp, the operator whose determinantal pencil cuts out
    /// the symmetrized-bidisc variety.
    pub fn fundamental_operator(&self) -> Matrix {
        &(&self.p * &self.u) + &(&self.u.adjoint() * &self.p_perp())
    }

    /// The realization Psi(z) on Ran P. Contractive on the open disc and
    /// inner on the circle.
    pub fn realize(&self, z: C64) -> Result<Matrix> {
        let e = self.ran_p_dim();
        if e == 0 {
            return Err(Error::EmptyRange);
        }
        let resolvent_arg =
            &Matrix::identity(self.dim) - &(&self.u.adjoint() * &self.p_perp()).scale(z);
        let rhs = &(&self.u.adjoint() * &self.ran_p);
        let solved = resolvent_arg.solve(rhs)?;
        Ok(&self.ran_p.adjoint() * &solved)
    }

    /// Measures the defining matrix invariants; never fails.
    pub fn validate(&self, tol: f64) -> ValidationReport {
        let mut report = ValidationReport { checks: Vec::new() };
        let idem = (&(&self.p * &self.p) - &self.p).fro_norm();
        report.push("projection idempotent", idem, tol);
        let herm = (&self.p - &self.p.adjoint()).fro_norm();
        report.push("projection self-adjoint", herm, tol);
        let unit = self.u.unitarity_defect();
        report.push("unitary", unit, tol);
        report
    }
}

/// Block-unitary data [A B; C D] with A acting on the coefficient space E
/// and D on the state space H.
#[derive(Clone, Debug)]
pub struct Colligation {
    pub dim_e: usize,
    pub dim_h: usize,
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
    pub d: Matrix,
}

impl Colligation {
    pub fn new(a: Matrix, b: Matrix, c: Matrix, d: Matrix) -> Result<Self> {
        let e = a.require_square()?;
        let h = if d.rows() * d.cols() == 0 { 0 } else { d.require_square()? };
        if b.rows() != e || b.cols() != h || c.rows() != h || c.cols() != e {
            return Err(Error::DimensionMismatch {
                context: "colligation blocks do not tile a square matrix".into(),
            });
        }
        if !a.is_finite() || !b.is_finite() || !c.is_finite() || !d.is_finite() {
            return Err(Error::InvalidInput("non-finite entries in colligation".into()));
        }
        Ok(Colligation {
            dim_e: e,
            dim_h: h,
            a,
            b,
            c,
            d,
        })
    }

    /// A colligation with no state space: the transfer function is the
    /// constant A.
    pub fn constant(a: Matrix) -> Result<Self> {
        let e = a.require_square()?;
        Colligation::new(
            a,
            Matrix::zeros(e, 0),
            Matrix::zeros(0, e),
            Matrix::zeros(0, 0),
        )
    }

    /// The full (dim_e + dim_h)-square block matrix.
    pub fn assemble(&self) -> Matrix {
        let n = self.dim_e + self.dim_h;
        Matrix::zeros(n, n)
            .with_block(0, 0, &self.a)
            .with_block(0, self.dim_e, &self.b)
            .with_block(self.dim_e, 0, &self.c)
            .with_block(self.dim_e, self.dim_e, &self.d)
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.assemble().unitarity_defect()
    }

    /// Transfer function A + zB(I - zD)^{-1}C.
    pub fn transfer(&self, z: C64) -> Result<Matrix> {
        if self.dim_h == 0 {
            return Ok(self.a.clone());
        }
        let resolvent_arg = &Matrix::identity(self.dim_h) - &self.d.scale(z);
        let solved = resolvent_arg.solve(&self.c)?;
        Ok(&self.a + &(&self.b * &solved).scale(z))
    }

    /// F = E + H with P the projection onto E and U* the assembled block
    /// matrix; realize on the result equals the transfer function.
    pub fn to_triple(&self) -> Result<ModelTriple> {
        let defect = self.unitarity_defect();
        if defect > 1e-8 {
            return Err(Error::NotUnitary { defect });
        }
        let n = self.dim_e + self.dim_h;
        let mut p = Matrix::zeros(n, n);
        for i in 0..self.dim_e {
            p[(i, i)] = ONE;
        }
        let u = self.assemble().adjoint();
        ModelTriple::new(p, u)
    }

    /// Blocks of U* against Ran P + Ran P^perp, in the triple's cached
    /// bases. Inverse of `to_triple` up to the basis choice.
    pub fn from_triple(t: &ModelTriple) -> Result<Self> {
        let e = t.ran_p_dim();
        if e == 0 {
            return Err(Error::EmptyRange);
        }
        let v = t.ran_p_basis();
        let ustar = t.u.adjoint();
        if e == t.dim {
            return Colligation::constant(&(&v.adjoint() * &ustar) * v);
        }
        let w = orthonormal_complement(v);
        let a = &(&v.adjoint() * &ustar) * v;
        let b = &(&v.adjoint() * &ustar) * &w;
        let c = &(&w.adjoint() * &ustar) * v;
        let d = &(&w.adjoint() * &ustar) * &w;
        Colligation::new(a, b, c, d)
    }
}

/// d projections and unitaries whose pencils commute for all z.
#[derive(Clone, Debug)]
pub struct ModelTuple {
    pub dim: usize,
    pub d: usize,
    pub ps: Vec<Matrix>,
    pub us: Vec<Matrix>,
    /// Whether the product pencil interpolates to exactly zI; measured at
    /// construction, reported (not asserted) by `validate`.
    pub pure: bool,
}

/// Trivial means within 1e-10 of 0 or of the identity.
fn projection_is_trivial(p: &Matrix) -> bool {
    let n = p.rows();
    p.fro_norm() <= 1e-10 || (p - &Matrix::identity(n)).fro_norm() <= 1e-10
}

impl ModelTuple {
    pub fn new(ps: Vec<Matrix>, us: Vec<Matrix>) -> Result<Self> {
        if ps.len() != us.len() {
            return Err(Error::DimensionMismatch {
                context: "projection and unitary lists have different lengths".into(),
            });
        }
        let d = ps.len();
        if d < 3 {
            return Err(Error::InvalidInput(
                "a model tuple needs at least 3 factors; use a model triple for 2".into(),
            ));
        }
        let n = ps[0].require_square()?;
        for m in ps.iter().chain(us.iter()) {
            if m.require_square()? != n {
                return Err(Error::DimensionMismatch {
                    context: "tuple factors act on different dimensions".into(),
                });
            }
            if !m.is_finite() {
                return Err(Error::InvalidInput("non-finite entries in model tuple".into()));
            }
        }
        if ps.iter().all(projection_is_trivial) {
            return Err(Error::InvalidInput(
                "at least one of the projections must be non-trivial (neither 0 nor I)".into(),
            ));
        }
        let mut tuple = ModelTuple {
            dim: n,
            d,
            ps,
            us,
            pure: false,
        };
        tuple.pure = tuple.purity_defect() <= 1e-8;
        Ok(tuple)
    }

    /// Phi_i(z) = P_i^perp U_i + z P_i U_i.
    pub fn pencil(&self, i: usize, z: C64) -> Matrix {
        let pp = &Matrix::identity(self.dim) - &self.ps[i];
        &(&pp * &self.us[i]) + &(&self.ps[i] * &self.us[i]).scale(z)
    }

    /// Product of all pencils at z, in index order.
    pub fn product_pencil(&self, z: C64) -> Matrix {
        let mut prod = self.pencil(0, z);
        for i in 1..self.d {
            prod = &prod * &self.pencil(i, z);
        }
        prod
    }

    /// Distance of the product pencil from zI as a polynomial identity:
    /// interpolate its matrix coefficients at d+1 unit roots and measure
    /// every coefficient against the pattern (0, I, 0, ..., 0).
    pub fn purity_defect(&self) -> f64 {
        let nodes = self.d + 1;
        let products: Vec<Matrix> = (0..nodes)
            .map(|k| self.product_pencil(unit_root(k, nodes)))
            .collect();
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for c in 0..self.dim {
                let values: Vec<C64> = products.iter().map(|m| m[(r, c)]).collect();
                let poly = interpolate_at_unit_roots(&values);
                for (k, coeff) in poly.coeffs.iter().enumerate() {
                    let target = if k == 1 && r == c { ONE } else { ZERO };
                    worst = worst.max((coeff - target).norm());
                }
            }
        }
        worst
    }

    /// Worst coefficientwise commutation defect over factor pairs. With
    /// Phi_i(z) = A_i + zB_i, commutation for all z is the three identities
    /// A_iA_j = A_jA_i, B_iB_j = B_jB_i, A_iB_j + B_iA_j = A_jB_i + B_jA_i.
    pub fn commutation_defect(&self) -> f64 {
        let coeffs: Vec<(Matrix, Matrix)> = (0..self.d)
            .map(|i| {
                let pp = &Matrix::identity(self.dim) - &self.ps[i];
                (&pp * &self.us[i], &self.ps[i] * &self.us[i])
            })
            .collect();
        let mut worst = 0.0f64;
        for i in 0..self.d {
            for j in i + 1..self.d {
                let (ai, bi) = &coeffs[i];
                let (aj, bj) = &coeffs[j];
                worst = worst.max((&(ai * aj) - &(aj * ai)).fro_norm());
                worst = worst.max((&(bi * bj) - &(bj * bi)).fro_norm());
                let mixed = &(&(ai * bj) + &(bi * aj)) - &(&(aj * bi) + &(bj * ai));
                worst = worst.max(mixed.fro_norm());
            }
        }
        worst
    }

    pub fn validate(&self, tol: f64) -> ValidationReport {
        let mut report = ValidationReport { checks: Vec::new() };
        for i in 0..self.d {
            let idem = (&(&self.ps[i] * &self.ps[i]) - &self.ps[i]).fro_norm();
            report.push(&format!("projection {i} idempotent"), idem, tol);
            let herm = (&self.ps[i] - &self.ps[i].adjoint()).fro_norm();
            report.push(&format!("projection {i} self-adjoint"), herm, tol);
            report.push(&format!("unitary {i}"), self.us[i].unitarity_defect(), tol);
        }
        report.push("pencils commute", self.commutation_defect(), tol);
        report.push("pure (product pencil = zI)", self.purity_defect(), tol);
        report
    }
}

/// The worked fixtures that anchor the test surface.
pub mod fixtures {
    use super::*;

    /// (C^2, diag(1,0), coordinate swap): cuts out the diagonal {(w, w)} in
    /// the bidisc and the royal variety s^2 = 4p after symmetrization.
    pub fn diagonal() -> ModelTriple {
        let p = Matrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let u = Matrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        ModelTriple::new(p, u).unwrap()
    }

    /// (C^2, diag(1,0), I): the variety {(z,1)} + {(1,z)}, symmetric but not
    /// distinguished; its realization is the constant 1.
    pub fn proj_identity() -> ModelTriple {
        let p = Matrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        ModelTriple::new(p, Matrix::identity(2)).unwrap()
    }

    /// 4-dim block triple whose variety is {(z,1)} + {(1,z)} + {(z,z)}:
    /// agrees with the diagonal inside the bidisc yet is not distinguished.
    pub fn block4() -> ModelTriple {
        let p1 = Matrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let swap = Matrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let p = p1.direct_sum(&p1);
        let u = Matrix::identity(2).direct_sum(&swap);
        ModelTriple::new(p, u).unwrap()
    }

    /// General cusp triple on C^{m+n} for the curve z1^n = z2^m.
    /// U* = [A B; C D] with A the m-dim lower shift, D the n-dim upper
    /// shift, B = e_{11} (m x n), C = e_{nm} (n x m).
    pub fn cusp_nm(n: usize, m: usize) -> Result<ModelTriple> {
        if n < 1 || m < 1 {
            return Err(Error::InvalidInput("cusp indices must be at least 1".into()));
        }
        let a = Matrix::from_fn(m, m, |i, j| if i == j + 1 { ONE } else { ZERO });
        let mut b = Matrix::zeros(m, n);
        b[(0, 0)] = ONE;
        let mut c = Matrix::zeros(n, m);
        c[(n - 1, m - 1)] = ONE;
        let d = Matrix::from_fn(n, n, |i, j| if j == i + 1 { ONE } else { ZERO });
        let ustar = Matrix::zeros(m + n, m + n)
            .with_block(0, 0, &a)
            .with_block(0, m, &b)
            .with_block(m, 0, &c)
            .with_block(m, m, &d);
        let p = Matrix::from_fn(m + n, m + n, |i, j| {
            if i == j && i < m { ONE } else { ZERO }
        });
        ModelTriple::new(p, ustar.adjoint())
    }

    /// The 5-dim permutation triple for the Neil parabola z1^3 = z2^2.
    pub fn neil() -> ModelTriple {
        cusp_nm(3, 2).unwrap()
    }

    /// 4-dim perturbation of the diagonal triple, blocks (U, iU): its
    /// symmetrized variety is {(0,-z^2)} + {(2z,z^2)}, distinguished while
    /// the fundamental operator still has numerical radius 1.
    pub fn perturbed_royal() -> ModelTriple {
        let p1 = Matrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let swap = Matrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let p = p1.direct_sum(&p1);
        let u = swap.direct_sum(&swap.scale(C64::new(0.0, 1.0)));
        ModelTriple::new(p, u).unwrap()
    }

    /// 2-dim rotation-like unitary with upper-left entry lambda.
    pub fn planar_unitary(lambda: C64) -> Matrix {
        let s = (1.0 - lambda.norm_sqr()).max(0.0).sqrt();
        Matrix::from_rows(&[
            vec![lambda, C64::new(s, 0.0)],
            vec![C64::new(-s, 0.0), lambda.conj()],
        ])
        .unwrap()
    }

    /// 4-dim triple whose fundamental operator realizes the symmetrized
    /// variety of diag(lambda, 0): {(conj(lambda) + lambda p, p)} + {(0, p)}.
    pub fn diag_lambda(lambda: C64) -> ModelTriple {
        let p1 = Matrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let p = p1.direct_sum(&p1);
        let u = planar_unitary(lambda).direct_sum(&planar_unitary(ZERO));
        ModelTriple::new(p, u).unwrap()
    }

    /// The 3-dim colligation realizing z -> z^2.
    pub fn z2_colligation() -> Colligation {
        let a = Matrix::zeros(1, 1);
        let b = Matrix::from_real_rows(&[&[0.0, 1.0]]);
        let c = Matrix::from_real_rows(&[&[1.0], &[0.0]]);
        let d = Matrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]);
        Colligation::new(a, b, c, d).unwrap()
    }

    /// The 3-dim permutation triple realizing z -> z^2: P onto the first
    /// coordinate and U the cycle e1 -> e3 -> e2 -> e1.
    pub fn z2_triple() -> ModelTriple {
        z2_colligation().to_triple().unwrap()
    }

    /// 2-dim colligation for the Moebius function (z - a)/(1 - conj(a)z).
    pub fn mobius_colligation(a: C64) -> Colligation {
        let s = (1.0 - a.norm_sqr()).max(0.0).sqrt();
        Colligation::new(
            Matrix::from_rows(&[vec![-a]]).unwrap(),
            Matrix::from_rows(&[vec![C64::new(s, 0.0)]]).unwrap(),
            Matrix::from_rows(&[vec![C64::new(s, 0.0)]]).unwrap(),
            Matrix::from_rows(&[vec![a.conj()]]).unwrap(),
        )
        .unwrap()
    }
}
