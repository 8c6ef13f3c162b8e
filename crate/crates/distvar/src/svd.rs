//! Singular value decomposition by one-sided Jacobi rotations, plus the
//! rank/nullspace/polar helpers built on it. One-sided Jacobi computes small
//! singular values to high accuracy, which the membership defects rely on.

use crate::error::{Error, Result};
use crate::matrix::{Matrix, ZERO};

/// `a = u diag(sigma) v*` with `u` m-by-n (columns orthonormal where sigma is
/// nonzero, zero columns elsewhere), `sigma` descending, `v` n-by-n unitary.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
}

const MAX_SWEEPS: usize = 64;

pub fn svd(a: &Matrix) -> Svd {
    let m = a.rows();
    let n = a.cols();
    let mut b = a.clone();
    let mut v = Matrix::identity(n);
    let scale = a.max_abs();
    let tiny = (scale * 1e-150).max(f64::MIN_POSITIVE);
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = ZERO;
                for i in 0..m {
                    let bp = b[(i, p)];
                    let bq = b[(i, q)];
                    alpha += bp.norm_sqr();
                    beta += bq.norm_sqr();
                    gamma += bp.conj() * bq;
                }
                let g = gamma.norm();
                if g <= 1e-15 * (alpha * beta).sqrt() + tiny * tiny {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let tau = (beta - alpha) / (2.0 * g);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let bp = b[(i, p)];
                    let bq = b[(i, q)];
                    b[(i, p)] = c * bp - s * phase.conj() * bq;
                    b[(i, q)] = s * phase * bp + c * bq;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = c * vp - s * phase.conj() * vq;
                    v[(i, q)] = s * phase * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    // Column norms are the singular values; sort descending, stable in index.
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| b[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap().then(x.cmp(&y)));
    let mut u = Matrix::zeros(m, n);
    let mut vv = Matrix::zeros(n, n);
    let mut sigma = vec![0.0; n];
    for (k, &j) in order.iter().enumerate() {
        sigma[k] = norms[j];
        if norms[j] > tiny {
            for i in 0..m {
                u[(i, k)] = b[(i, j)] / norms[j];
            }
        }
        for i in 0..n {
            vv[(i, k)] = v[(i, j)];
        }
    }
    Svd { u, sigma, v: vv }
}

/// Largest singular value (spectral norm).
pub fn op_norm(a: &Matrix) -> f64 {
    svd(a).sigma.first().copied().unwrap_or(0.0)
}

/// Smallest singular value over the column count; zero when rank-deficient.
pub fn smallest_singular_value(a: &Matrix) -> f64 {
    svd(a).sigma.last().copied().unwrap_or(0.0)
}

/// Numerical rank at a relative threshold.
pub fn rank(a: &Matrix, rel_tol: f64) -> usize {
    let s = svd(a);
    rank_from_sigma(&s.sigma, rel_tol)
}

pub fn rank_from_sigma(sigma: &[f64], rel_tol: f64) -> usize {
    let smax = sigma.first().copied().unwrap_or(0.0);
    if smax <= f64::MIN_POSITIVE {
        return 0;
    }
    sigma.iter().filter(|&&s| s > rel_tol * smax).count()
}

/// Orthonormal basis of the (right) nullspace at a relative threshold.
pub fn nullspace(a: &Matrix, rel_tol: f64) -> Matrix {
    let s = svd(a);
    let r = rank_from_sigma(&s.sigma, rel_tol);
    s.v.slice(0, a.cols(), r, a.cols())
}

/// Orthonormal basis of the orthogonal complement of the column span of `q`
/// (columns assumed orthonormal). Deterministic: singular directions of
/// `I - q q*` in descending-sigma order.
pub fn orthonormal_complement(q: &Matrix) -> Matrix {
    let m = q.rows();
    let k = q.cols();
    let proj = &Matrix::identity(m) - &(q * &q.adjoint());
    let s = svd(&proj);
    let want = m - k;
    s.u.slice(0, m, 0, want)
}

/// Unitary polar factor `w` of a square matrix: `x = w h` with `h` positive
/// semidefinite. Rank-deficient input is completed through aligned
/// orthocomplements so `w` stays unitary.
pub fn polar_unitary(x: &Matrix) -> Result<Matrix> {
    let n = x.require_square()?;
    let s = svd(x);
    let r = rank_from_sigma(&s.sigma, 1e-12);
    if r == n {
        return Ok(&s.u * &s.v.adjoint());
    }
    let ur = s.u.slice(0, n, 0, r);
    let vr = s.v.slice(0, n, 0, r);
    let uc = orthonormal_complement(&ur);
    let vc = orthonormal_complement(&vr);
    let mut ufull = Matrix::zeros(n, n);
    let mut vfull = Matrix::zeros(n, n);
    for j in 0..r {
        for i in 0..n {
            ufull[(i, j)] = ur[(i, j)];
            vfull[(i, j)] = vr[(i, j)];
        }
    }
    for j in 0..n - r {
        for i in 0..n {
            ufull[(i, r + j)] = uc[(i, j)];
            vfull[(i, r + j)] = vc[(i, j)];
        }
    }
    Ok(&ufull * &vfull.adjoint())
}

/// Smallest singular value of the vertical stack of a family of matrices
/// sharing a column count: how far the family is from a common kernel vector.
pub fn common_kernel_defect(family: &[&Matrix]) -> Result<f64> {
    if family.is_empty() {
        return Err(Error::InvalidInput("empty family".into()));
    }
    let cols = family[0].cols();
    if family.iter().any(|m| m.cols() != cols) {
        return Err(Error::DimensionMismatch {
            context: "common kernel needs equal column counts".into(),
        });
    }
    let stacked = Matrix::stack_vertical(family)?;
    Ok(smallest_singular_value(&stacked))
}
