//! Matrix-valued rational inner functions: transfer evaluation, the variety
//! they cut out through det(Psi(z1) - z2 I), the numerical-radius sweep, the
//! bivariate defining polynomial, and essential torus symmetry.
//!
//! A rational inner function is carried by a unitary colligation with D free
//! of unimodular eigenvalues; Psi = F/q with q = det(I - zD) and F = Psi q a
//! matrix polynomial sharing no factor of q across all entries.

use crate::bidisc::{GridSpec, Membership};
use crate::error::{Error, Result};
use crate::matrix::{C64, Matrix, ONE, ZERO};
use crate::model::{Colligation, ModelTriple};
use crate::numrad::numerical_radius;
use crate::poly::{interpolate_at_unit_roots, unit_root, BivariatePoly, Poly};
use crate::schur::eigenvalues;
use crate::svd::{nullspace, orthonormal_complement, smallest_singular_value};

const UNIMODULAR_BAND: f64 = 1e-6;
const NU_TOL: f64 = 1e-8;
const NU_MARGIN: f64 = 1e-4;

#[derive(Clone, Debug)]
pub struct RationalInnerFn {
    /// The carrying colligation, reduced so D has no unimodular eigenvalue.
    pub colligation: Colligation,
    /// Denominator det(I - zD), with factors common to all of F removed.
    pub q: Poly,
    /// Ascending matrix coefficients of F(z) = Psi(z) q(z).
    pub f: Vec<Matrix>,
}

#[derive(Clone, Debug)]
pub struct NuSweep {
    pub max_nu: f64,
    pub argmax: C64,
    pub margin: f64,
    /// max_nu < 1 - margin: certifies the distinguished side by itself.
    pub strict: bool,
}

/// Eigenvalues of the transfer function at z1: the z2 such that (z1, z2)
/// lies on the variety of the colligation.
pub fn psi_fiber(c: &Colligation, z1: C64, tol: f64) -> Result<Vec<C64>> {
    eigenvalues(&c.transfer(z1)?, tol)
}

/// Splits off the part of the state space where D acts unitarily. Such
/// directions are joint eigenvectors of D and D*, annihilated by B and C*,
/// so the transfer function never sees them.
fn reduce_unimodular_modes(mut c: Colligation) -> Result<Colligation> {
    loop {
        if c.dim_h == 0 {
            return Ok(c);
        }
        let eigs = eigenvalues(&c.d, 1e-12)?;
        let Some(lam) = eigs
            .iter()
            .copied()
            .find(|l| (l.norm() - 1.0).abs() <= UNIMODULAR_BAND)
        else {
            return Ok(c);
        };
        let shifted = &c.d - &Matrix::identity(c.dim_h).scale(lam);
        let kernel = nullspace(&shifted, 1e-6);
        if kernel.cols() == 0 {
            return Err(Error::UnimodularEigenvalue { modulus: lam.norm() });
        }
        let v = kernel.slice(0, c.dim_h, 0, 1);
        // Unitarity of the block matrix forces Bv = 0 and C*v = 0; if the
        // input is too far from unitary for that to hold, deflating would
        // silently change the function.
        let bv = (&c.b * &v).fro_norm();
        let cv = (&c.c.adjoint() * &v).fro_norm();
        if bv > 1e-6 || cv > 1e-6 {
            return Err(Error::UnimodularEigenvalue { modulus: lam.norm() });
        }
        if c.dim_h == 1 {
            return Colligation::constant(c.a);
        }
        let w = orthonormal_complement(&v);
        let b = &c.b * &w;
        let cc = &w.adjoint() * &c.c;
        let d = &(&w.adjoint() * &c.d) * &w;
        c = Colligation::new(c.a, b, cc, d)?;
    }
}

/// Matrix-polynomial evaluation by Horner.
fn eval_matrix_poly(coeffs: &[Matrix], z: C64) -> Matrix {
    let mut acc = Matrix::zeros(coeffs[0].rows(), coeffs[0].cols());
    for m in coeffs.iter().rev() {
        acc = &acc.scale(z) + m;
    }
    acc
}

/// Synthetic division of a matrix polynomial by (z - alpha); the remainder
/// is dropped (callers divide only at verified roots).
fn matrix_poly_div(coeffs: &[Matrix], alpha: C64) -> Vec<Matrix> {
    let d = coeffs.len() - 1;
    if d == 0 {
        return vec![Matrix::zeros(coeffs[0].rows(), coeffs[0].cols())];
    }
    let mut quotient = vec![Matrix::zeros(coeffs[0].rows(), coeffs[0].cols()); d];
    quotient[d - 1] = coeffs[d].clone();
    for k in (1..d).rev() {
        quotient[k - 1] = &coeffs[k] + &quotient[k].scale(alpha);
    }
    quotient
}

impl RationalInnerFn {
    /// Validates and caches: reduces away unitary state directions, checks
    /// unitarity of the colligation and inner-ness on the circle, and
    /// interpolates q and F.
    pub fn new(colligation: Colligation, tol: f64) -> Result<Self> {
        if colligation.dim_e == 0 {
            return Err(Error::InvalidInput("colligation has empty coefficient space".into()));
        }
        let defect = colligation.unitarity_defect();
        if defect > 1e-8 {
            return Err(Error::NotUnitary { defect });
        }
        let c = reduce_unimodular_modes(colligation)?;
        let h = c.dim_h;
        let e = c.dim_e;
        let (mut q, mut f) = if h == 0 {
            (Poly::one(), vec![c.a.clone()])
        } else {
            let nodes = h + 1;
            let mut q_vals = Vec::with_capacity(nodes);
            let mut f_vals: Vec<Matrix> = Vec::with_capacity(nodes);
            for k in 0..nodes {
                let zeta = unit_root(k, nodes);
                let resolvent_arg = &Matrix::identity(h) - &c.d.scale(zeta);
                let qv = resolvent_arg.det()?;
                q_vals.push(qv);
                f_vals.push(c.transfer(zeta)?.scale(qv));
            }
            let q = interpolate_at_unit_roots(&q_vals);
            let mut coeffs = vec![Matrix::zeros(e, e); nodes];
            for i in 0..e {
                for j in 0..e {
                    let vals: Vec<C64> = f_vals.iter().map(|m| m[(i, j)]).collect();
                    let poly = interpolate_at_unit_roots(&vals);
                    for (k, &cf) in poly.coeffs.iter().enumerate() {
                        coeffs[k][(i, j)] = cf;
                    }
                }
            }
            (q, coeffs)
        };
        // No factor of q may divide every entry of F: strip matched roots.
        let f_scale = f.iter().map(Matrix::max_abs).fold(0.0f64, f64::max).max(1e-30);
        let q_scale = q.max_coeff().max(1e-30);
        loop {
            let trimmed = q.trim(1e-10 * q_scale);
            if trimmed.degree() == 0 {
                q = trimmed;
                break;
            }
            let roots = trimmed.roots(1e-12)?;
            let common = roots.iter().copied().find(|&alpha| {
                eval_matrix_poly(&f, alpha).max_abs() <= 1e-7 * f_scale
            });
            match common {
                Some(alpha) => {
                    q = trimmed.synthetic_div(alpha).0;
                    f = matrix_poly_div(&f, alpha);
                }
                None => {
                    q = trimmed;
                    break;
                }
            }
        }
        let psi = RationalInnerFn {
            colligation: c,
            q,
            f,
        };
        // Inner on the circle: Psi(zeta) must be unitary at spread-out test
        // points.
        let check_tol = tol.max(1e-8);
        for k in 0..16 {
            let zeta = unit_root(k, 16);
            let m = psi.eval(zeta)?;
            let defect = m.unitarity_defect();
            if defect > check_tol {
                return Err(Error::NotUnitary { defect });
            }
        }
        Ok(psi)
    }

    /// The realization of a model triple as a rational inner function.
    pub fn from_triple(t: &ModelTriple, tol: f64) -> Result<Self> {
        RationalInnerFn::new(Colligation::from_triple(t)?, tol)
    }

    pub fn dim_e(&self) -> usize {
        self.colligation.dim_e
    }

    /// Psi(z) through the colligation (exact up to the resolvent solve).
    pub fn eval(&self, z: C64) -> Result<Matrix> {
        self.colligation.transfer(z)
    }

    /// F(z) = Psi(z) q(z) from the cached coefficients.
    pub fn f_eval(&self, z: C64) -> Matrix {
        eval_matrix_poly(&self.f, z)
    }

    /// Eigenvalues z2 of Psi(z1), with multiplicity.
    pub fn fiber(&self, z1: C64) -> Result<Vec<C64>> {
        psi_fiber(&self.colligation, z1, 1e-12)
    }

    /// (z1, z2) lies on the variety iff Psi(z1) - z2 I is singular.
    pub fn member(&self, z1: C64, z2: C64, tol: f64) -> Result<Membership> {
        let m = self.eval(z1)?;
        let shifted = &m - &Matrix::identity(self.dim_e()).scale(z2);
        let defect = smallest_singular_value(&shifted);
        Ok(Membership {
            member: defect < tol,
            defect,
        })
    }

    /// Max of nu(Psi(z)) over the grid, with local refinement around the
    /// winner. Strictly below 1 certifies the distinguished side.
    pub fn nu_sweep(&self, grid: &GridSpec) -> Result<NuSweep> {
        let mut best = f64::NEG_INFINITY;
        let mut argmax = C64::new(0.0, 0.0);
        for z in grid.points() {
            let nu = numerical_radius(&self.eval(z)?, NU_TOL)?;
            if nu > best {
                best = nu;
                argmax = z;
            }
        }
        // Shrinking rings around the argmax; stay inside the disc where the
        // function is certainly analytic.
        let mut step = grid.radius / grid.radii.max(1) as f64;
        for _ in 0..4 {
            let center = argmax;
            for j in 0..8 {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / 8.0;
                let z = center + C64::from_polar(step, theta);
                if z.norm() > 0.999 {
                    continue;
                }
                let nu = numerical_radius(&self.eval(z)?, NU_TOL)?;
                if nu > best {
                    best = nu;
                    argmax = z;
                }
            }
            step /= 2.0;
        }
        Ok(NuSweep {
            max_nu: best,
            argmax,
            margin: NU_MARGIN,
            strict: best < 1.0 - NU_MARGIN,
        })
    }

    /// The defining bivariate polynomial: det(F(z1) - z2 q(z1) I) with the
    /// line factors (z1 - alpha)^{m_alpha} at the roots of q deflated, then
    /// normalized so the lexicographically largest coefficient is 1.
    pub fn xi_extract(&self, tol: f64) -> Result<BivariatePoly> {
        let e = self.dim_e();
        let h = self.colligation.dim_h;
        let nodes = e * h + h + 1;
        // Per node, chi(zeta, .) = q(zeta)^e prod_k (lambda_k - z2) as a
        // z2-polynomial of degree e.
        let mut node_vals: Vec<Vec<C64>> = Vec::with_capacity(nodes);
        for k in 0..nodes {
            let zeta = unit_root(k, nodes);
            let lams = self.fiber(zeta)?;
            let qv = self.q.eval(zeta);
            let mut qe = ONE;
            for _ in 0..e {
                qe *= qv;
            }
            let mut z2_poly = vec![ZERO; e + 1];
            z2_poly[0] = qe;
            let mut deg = 0;
            for lam in lams {
                // Multiply by (lam - z2).
                for j in (0..=deg + 1).rev() {
                    let low = if j <= deg { z2_poly[j] * lam } else { ZERO };
                    let high = if j > 0 { z2_poly[j - 1] } else { ZERO };
                    z2_poly[j] = low - high;
                }
                deg += 1;
            }
            node_vals.push(z2_poly);
        }
        let mut coeff_polys: Vec<Poly> = (0..=e)
            .map(|j| {
                let vals: Vec<C64> = node_vals.iter().map(|v| v[j]).collect();
                interpolate_at_unit_roots(&vals)
            })
            .collect();
        let scale = coeff_polys
            .iter()
            .map(Poly::max_coeff)
            .fold(0.0f64, f64::max)
            .max(1e-30);

        // Deflate (z1 - alpha)^{m_alpha} at the roots of q. The order is
        // detected by repeated synthetic division and capped by the degree
        // bookkeeping: multiplicity of alpha in q times e.
        if self.q.degree() > 0 {
            let mut roots = self.q.roots(1e-12)?;
            while let Some(alpha) = roots.first().copied() {
                let multiplicity = roots.iter().filter(|r| (*r - alpha).norm() < 1e-7).count();
                roots.retain(|r| (r - alpha).norm() >= 1e-7);
                let cap = multiplicity * e;
                for _ in 0..cap {
                    let residual = coeff_polys
                        .iter()
                        .map(|p| p.eval(alpha).norm())
                        .fold(0.0f64, f64::max);
                    if residual <= tol * scale {
                        for p in coeff_polys.iter_mut() {
                            *p = p.synthetic_div(alpha).0;
                        }
                    } else if residual < 100.0 * tol * scale {
                        return Err(Error::DeflationAmbiguous {
                            residual,
                            tol: tol * scale,
                            hard: 100.0 * tol * scale,
                        });
                    } else {
                        break;
                    }
                }
            }
        }
        let trimmed: Vec<Poly> = coeff_polys
            .iter()
            .map(|p| p.trim(1e-8 * scale))
            .collect();
        let xi = BivariatePoly::from_z2_coefficient_polys(&trimmed)
            .trim(1e-8 * scale)
            .normalize(1e-8 * scale);
        Ok(xi)
    }
}

/// Tests whether xi(z1, z2) = c z1^m1 z2^m2 conj(xi(1/conj(z1), 1/conj(z2)))
/// for some unimodular c: coefficientwise, c[i][j] = c conj(c[m1-i][m2-j]).
/// The candidate c comes from the largest coefficient pair and is then
/// verified globally.
pub fn essential_symmetry_check(xi: &BivariatePoly, tol: f64) -> (bool, Option<C64>) {
    let xi = xi.trim(tol * xi.max_coeff().max(1e-30));
    let m1 = xi.deg1();
    let m2 = xi.deg2();
    let scale = xi.max_coeff().max(1e-30);
    let mut pivot = (0usize, 0usize);
    let mut pivot_mod = -1.0f64;
    for i in 0..=m1 {
        for j in 0..=m2 {
            if xi.coeffs[i][j].norm() > pivot_mod {
                pivot_mod = xi.coeffs[i][j].norm();
                pivot = (i, j);
            }
        }
    }
    let partner = xi.coeffs[m1 - pivot.0][m2 - pivot.1];
    if partner.norm() <= tol * scale {
        return (false, None);
    }
    let c = xi.coeffs[pivot.0][pivot.1] / partner.conj();
    if (c.norm() - 1.0).abs() > tol {
        return (false, None);
    }
    for i in 0..=m1 {
        for j in 0..=m2 {
            let expect = c * xi.coeffs[m1 - i][m2 - j].conj();
            if (xi.coeffs[i][j] - expect).norm() > tol * scale {
                return (false, None);
            }
        }
    }
    (true, Some(c))
}
