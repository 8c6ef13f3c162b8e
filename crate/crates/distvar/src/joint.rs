//! Simultaneous unitary triangularization of commuting families and the
//! joint spectrum (aligned diagonal tuples) that the variety fibers are made
//! of.
//!
//! Strategy: Schur-decompose a random linear combination of the family and
//! verify that its unitary triangularizes every member; generic combinations
//! separate eigenvalues, and the verification makes the randomness safe.
//! When the family has a joint eigenvalue of high multiplicity (fibers over
//! the origin are the typical case) no combination separates, so a
//! deterministic staircase (deflate along a common eigenvector and recurse)
//! finishes the job.

use crate::error::{Error, Result};
use crate::matrix::{C64, Matrix, ONE, ZERO};
use crate::random::{complex_gaussian, rng_from_seed};
use crate::schur::schur;
use crate::svd::svd;

/// Joint eigenvalue tuples of a commuting family, aligned by Schur position.
#[derive(Clone, Debug)]
pub struct JointSpectrum {
    /// One entry per Schur position; each inner vector has one coordinate per
    /// family member.
    pub points: Vec<Vec<C64>>,
    pub dim: usize,
}

const RANDOM_RETRIES: usize = 20;

fn strict_lower_max(m: &Matrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.rows() {
        for j in 0..i {
            worst = worst.max(m[(i, j)].norm());
        }
    }
    worst
}

fn verify_triangularizer(q: &Matrix, family: &[Matrix], tol: f64) -> Option<Vec<Matrix>> {
    let mut ts = Vec::with_capacity(family.len());
    for a in family {
        let t = &(&q.adjoint() * a) * q;
        if strict_lower_max(&t) > tol * (1.0 + a.fro_norm()) {
            return None;
        }
        ts.push(t);
    }
    // Zero the verified-negligible strict lower parts so downstream code can
    // rely on exact triangularity.
    let cleaned = ts
        .into_iter()
        .map(|mut t| {
            for i in 0..t.rows() {
                for j in 0..i {
                    t[(i, j)] = ZERO;
                }
            }
            t
        })
        .collect();
    Some(cleaned)
}

/// Householder-style unitary whose first column is the given unit vector.
fn unitary_with_first_column(v: &[C64]) -> Matrix {
    let n = v.len();
    let mut q = Matrix::identity(n);
    // Reflect e1 onto v: with w = v - phase*e1 (phase chosen for stability),
    // the reflector I - 2 w w*/|w|^2 maps phase*e1 to v; fold the phase into
    // the first column afterwards.
    let phase = if v[0].norm() > 0.0 {
        -v[0] / v[0].norm()
    } else {
        ONE
    };
    let mut w: Vec<C64> = v.to_vec();
    w[0] -= phase;
    let wn = w.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if wn > 1e-30 {
        for i in 0..n {
            for j in 0..n {
                let refl = 2.0 * w[i] * w[j].conj() / wn;
                q[(i, j)] -= refl;
            }
        }
    }
    // q now maps e1 to v/phase-ish; rescale the first column to make it v
    // exactly (unitary columns tolerate a unimodular factor).
    let q_e1: Vec<C64> = (0..n).map(|i| q[(i, 0)]).collect();
    let mut dot = ZERO;
    for i in 0..n {
        dot += q_e1[i].conj() * v[i];
    }
    let fix = if dot.norm() > 0.0 { dot / dot.norm() } else { ONE };
    for i in 0..n {
        let val = q[(i, 0)] * fix;
        q[(i, 0)] = val;
    }
    q
}

/// A common eigenvector of a commuting family: pick a non-scalar member,
/// restrict to one of its eigenspaces, recurse.
fn common_eigenvector(family: &[Matrix], tol: f64) -> Result<Vec<C64>> {
    let n = family[0].rows();
    if n == 1 {
        return Ok(vec![ONE]);
    }
    let scalar_defect = |a: &Matrix| {
        let mean = a.trace() / (n as f64);
        (a - &Matrix::diag(&vec![mean; n])).fro_norm()
    };
    let Some(a) = family
        .iter()
        .find(|a| scalar_defect(a) > tol * (1.0 + a.fro_norm()))
    else {
        // Every member acts as a scalar here; any direction works.
        let mut v = vec![ZERO; n];
        v[0] = ONE;
        return Ok(v);
    };
    let eigs = schur(a, tol.min(1e-10))?.eigenvalues();
    // Deterministic pick: smallest by (re, im). Any eigenvalue works; the
    // eigenspace of an exact eigenvalue is invariant under the commutant.
    let lam = eigs
        .iter()
        .copied()
        .min_by(|x, y| {
            x.re.partial_cmp(&y.re)
                .unwrap()
                .then(x.im.partial_cmp(&y.im).unwrap())
        })
        .unwrap();
    let shifted = a - &Matrix::diag(&vec![lam; n]);
    let s = svd(&shifted);
    let smax = s.sigma.first().copied().unwrap_or(0.0).max(1.0);
    // Computed eigenvalues carry O(eps * norm) error, so accept singular
    // directions well above machine precision but far below the spectral gap.
    let thresh = (1e-8 * smax).max(64.0 * f64::EPSILON * smax);
    let null_dim = s.sigma.iter().filter(|&&x| x <= thresh).count().max(1);
    let basis = s.v.slice(0, n, n - null_dim, n);
    if null_dim == n {
        // a - lam is numerically zero despite the scalar-defect gate; treat
        // as scalar.
        let mut v = vec![ZERO; n];
        v[0] = ONE;
        return Ok(v);
    }
    let compressed: Vec<Matrix> = family
        .iter()
        .map(|m| &(&basis.adjoint() * m) * &basis)
        .collect();
    let inner = common_eigenvector(&compressed, tol)?;
    let mut v = basis.mul_vec(&inner);
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z /= norm;
    }
    Ok(v)
}

/// Deterministic simultaneous triangularization: peel off one common
/// eigenvector at a time.
fn staircase_triangularizer(family: &[Matrix], tol: f64) -> Result<Matrix> {
    let n = family[0].rows();
    if n == 1 {
        return Ok(Matrix::identity(1));
    }
    let v = common_eigenvector(family, tol)?;
    let q1 = unitary_with_first_column(&v);
    let sub: Vec<Matrix> = family
        .iter()
        .map(|a| {
            let t = &(&q1.adjoint() * a) * &q1;
            t.slice(1, n, 1, n)
        })
        .collect();
    let q_sub = staircase_triangularizer(&sub, tol)?;
    let q_ext = Matrix::identity(1).direct_sum(&q_sub);
    Ok(&q1 * &q_ext)
}

/// Shared dimension and commutation pre-checks.
fn check_family(family: &[Matrix], tol: f64) -> Result<usize> {
    if family.is_empty() {
        return Err(Error::InvalidInput("empty commuting family".into()));
    }
    let n = family[0].require_square()?;
    for a in family {
        if a.require_square()? != n {
            return Err(Error::DimensionMismatch {
                context: "family members have different dimensions".into(),
            });
        }
        if !a.is_finite() {
            return Err(Error::InvalidInput("family member has non-finite entries".into()));
        }
    }
    let commute_tol = tol.max(1e-12);
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            let c = &(&family[i] * &family[j]) - &(&family[j] * &family[i]);
            let scale = 1.0 + family[i].fro_norm() * family[j].fro_norm();
            let defect = c.fro_norm();
            if defect > commute_tol * scale {
                return Err(Error::NotCommuting {
                    defect,
                    tol: commute_tol * scale,
                });
            }
        }
    }
    Ok(n)
}

/// Finds a unitary `q` with every `q* a q` upper triangular. Returns the
/// unitary together with the triangular conjugates, aligned with the input
/// order.
pub fn joint_triangularize(
    family: &[Matrix],
    seed: u64,
    tol: f64,
) -> Result<(Matrix, Vec<Matrix>)> {
    let n = check_family(family, tol)?;
    if n == 1 {
        return Ok((Matrix::identity(1), family.to_vec()));
    }
    let verify_tol = tol.max(1e-10);
    let mut rng = rng_from_seed(seed);
    for _ in 0..RANDOM_RETRIES {
        let coeffs: Vec<C64> = (0..family.len()).map(|_| complex_gaussian(&mut rng)).collect();
        let mut comb = Matrix::zeros(n, n);
        for (c, a) in coeffs.iter().zip(family) {
            comb = &comb + &a.scale(*c);
        }
        let Ok(form) = schur(&comb, 1e-12) else {
            continue;
        };
        if let Some(ts) = verify_triangularizer(&form.q, family, verify_tol) {
            return Ok((form.q, ts));
        }
    }
    // Joint eigenvalues of high multiplicity defeat every random combination;
    // fall back to deterministic deflation along common eigenvectors.
    if let Ok(q) = staircase_triangularizer(family, verify_tol) {
        if let Some(ts) = verify_triangularizer(&q, family, verify_tol) {
            return Ok((q, ts));
        }
    }
    Err(Error::RetriesExhausted {
        retries: RANDOM_RETRIES,
    })
}

/// Joint spectrum: one tuple per Schur position, aligned across the family.
pub fn joint_eigenvalues(family: &[Matrix], seed: u64, tol: f64) -> Result<JointSpectrum> {
    let (_, ts) = joint_triangularize(family, seed, tol)?;
    let n = ts[0].rows();
    let points = (0..n)
        .map(|i| ts.iter().map(|t| t[(i, i)]).collect())
        .collect();
    Ok(JointSpectrum { points, dim: n })
}

pub use crate::svd::common_kernel_defect;
