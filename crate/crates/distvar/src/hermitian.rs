//! Eigenvalues of Hermitian matrices: Householder reduction to a real
//! tridiagonal followed by implicit-shift QL iteration. Only eigenvalues are
//! produced; this is the inner loop of the numerical-radius sweep, so it
//! avoids accumulating transformations.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::schur::hessenberg;

/// Ascending eigenvalues of the Hermitian part of `a`. The input is expected
/// Hermitian; the strictly-lower data is what the reduction consumes, so any
/// tiny asymmetry only perturbs results at rounding level.
pub fn hermitian_eigenvalues(a: &Matrix) -> Result<Vec<f64>> {
    let n = a.require_square()?;
    if n == 1 {
        return Ok(vec![a[(0, 0)].re]);
    }
    if n == 2 {
        // Closed form for the 2x2 Hermitian case.
        let p = a[(0, 0)].re;
        let q = a[(1, 1)].re;
        let b = a[(1, 0)].norm();
        let mid = 0.5 * (p + q);
        let rad = (0.25 * (p - q) * (p - q) + b * b).sqrt();
        return Ok(vec![mid - rad, mid + rad]);
    }
    // Hessenberg form of a Hermitian matrix is tridiagonal; read off the
    // (real) diagonal and the subdiagonal magnitudes.
    let (_, h) = hessenberg(a)?;
    let mut d: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
    let mut e: Vec<f64> = (0..n - 1).map(|i| h[(i + 1, i)].norm()).collect();
    e.push(0.0);
    tridiagonal_eigenvalues(&mut d, &mut e, n)?;
    d.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(d)
}

/// Implicit-shift QL on a symmetric tridiagonal (`d` diagonal, `e` offdiagonal
/// with `e[n-1]` scratch). Classic EISPACK-style sweep without eigenvectors.
fn tridiagonal_eigenvalues(d: &mut [f64], e: &mut [f64], n: usize) -> Result<()> {
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || dd == 0.0 {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(Error::NonConvergence {
                    dim: n,
                    iterations: 50,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                f = (d[i] - g) * s + 2.0 * c * b;
                p = s * f;
                d[i + 1] = g + p;
                g = c * f - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
