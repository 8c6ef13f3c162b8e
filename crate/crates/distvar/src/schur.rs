//! Complex Schur decomposition `a = q t q*` with unitary `q` and upper
//! triangular `t`, via Householder reduction to Hessenberg form followed by
//! shifted QR iteration with deflation.

use crate::error::{Error, Result};
use crate::matrix::{C64, Matrix, ONE, ZERO};

/// Unitary triangularization of a square matrix.
#[derive(Clone, Debug)]
pub struct SchurForm {
    /// Unitary factor; columns form the Schur basis.
    pub q: Matrix,
    /// Upper triangular factor; the diagonal carries the eigenvalues.
    pub t: Matrix,
    pub source_dim: usize,
}

impl SchurForm {
    pub fn eigenvalues(&self) -> Vec<C64> {
        (0..self.source_dim).map(|i| self.t[(i, i)]).collect()
    }
}

/// Iteration cap: QR steps are quadratically convergent once deflation
/// starts, so this bound is only reached on pathological input.
fn iteration_cap(n: usize) -> usize {
    100 * n * n
}

struct Givens {
    c: f64,
    s: C64,
}

/// Rotation `[[c, s], [-conj(s), c]]` with real `c` mapping `(f, g)` to
/// `(r, 0)`.
fn givens(f: C64, g: C64) -> Givens {
    let fn_ = f.norm();
    let gn = g.norm();
    if gn == 0.0 {
        return Givens { c: 1.0, s: ZERO };
    }
    if fn_ == 0.0 {
        return Givens {
            c: 0.0,
            s: g.conj() / gn,
        };
    }
    let d = (fn_ * fn_ + gn * gn).sqrt();
    Givens {
        c: fn_ / d,
        s: (f / fn_) * g.conj() / d,
    }
}

fn apply_givens_rows(m: &mut Matrix, g: &Givens, r0: usize, r1: usize, c_from: usize) {
    for j in c_from..m.cols() {
        let a = m[(r0, j)];
        let b = m[(r1, j)];
        m[(r0, j)] = g.c * a + g.s * b;
        m[(r1, j)] = -g.s.conj() * a + g.c * b;
    }
}

fn apply_givens_cols(m: &mut Matrix, g: &Givens, c0: usize, c1: usize) {
    // Right-multiplication by the adjoint rotation.
    for i in 0..m.rows() {
        let a = m[(i, c0)];
        let b = m[(i, c1)];
        m[(i, c0)] = g.c * a + g.s.conj() * b;
        m[(i, c1)] = -g.s * a + g.c * b;
    }
}

/// Householder reduction to upper Hessenberg form; returns `(q, h)` with
/// `a = q h q*`.
pub fn hessenberg(a: &Matrix) -> Result<(Matrix, Matrix)> {
    let n = a.require_square()?;
    let mut h = a.clone();
    let mut q = Matrix::identity(n);
    if n < 3 {
        return Ok((q, h));
    }
    for k in 0..n - 2 {
        // Reflect column k below the subdiagonal onto the subdiagonal entry.
        let mut norm_sq = 0.0;
        for i in k + 1..n {
            norm_sq += h[(i, k)].norm_sqr();
        }
        let norm = norm_sq.sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        let alpha = -phase * norm;
        // v = x - alpha e1, normalized.
        let mut v = vec![ZERO; n - k - 1];
        for i in 0..v.len() {
            v[i] = h[(k + 1 + i, k)];
        }
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm <= f64::EPSILON * norm {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // H <- (I - 2 v v*) H from the left on rows k+1..n.
        for j in 0..n {
            let mut dot = ZERO;
            for i in 0..v.len() {
                dot += v[i].conj() * h[(k + 1 + i, j)];
            }
            for i in 0..v.len() {
                let upd = 2.0 * v[i] * dot;
                h[(k + 1 + i, j)] -= upd;
            }
        }
        // H <- H (I - 2 v v*) from the right on cols k+1..n.
        for i in 0..n {
            let mut dot = ZERO;
            for j in 0..v.len() {
                dot += h[(i, k + 1 + j)] * v[j];
            }
            for j in 0..v.len() {
                let upd = 2.0 * dot * v[j].conj();
                h[(i, k + 1 + j)] -= upd;
            }
        }
        // Q <- Q (I - 2 v v*).
        for i in 0..n {
            let mut dot = ZERO;
            for j in 0..v.len() {
                dot += q[(i, k + 1 + j)] * v[j];
            }
            for j in 0..v.len() {
                let upd = 2.0 * dot * v[j].conj();
                q[(i, k + 1 + j)] -= upd;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
        h[(k + 1, k)] = alpha;
    }
    Ok((q, h))
}

/// Eigenvalues of a 2x2 complex matrix.
fn eig2(a: C64, b: C64, c: C64, d: C64) -> (C64, C64) {
    let half_tr = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (half_tr * half_tr - det).sqrt();
    (half_tr + disc, half_tr - disc)
}

/// Wilkinson shift: eigenvalue of the trailing 2x2 block closest to its
/// bottom-right entry.
fn wilkinson_shift(h: &Matrix, hi: usize) -> C64 {
    let (a, b, c, d) = (
        h[(hi - 1, hi - 1)],
        h[(hi - 1, hi)],
        h[(hi, hi - 1)],
        h[(hi, hi)],
    );
    let (l1, l2) = eig2(a, b, c, d);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Schur decomposition. `tol` controls subdiagonal deflation relative to the
/// local matrix scale; anything at or below machine precision is clamped.
pub fn schur(a: &Matrix, tol: f64) -> Result<SchurForm> {
    let n = a.require_square()?;
    if n == 0 {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    if !a.is_finite() {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    if n == 1 {
        return Ok(SchurForm {
            q: Matrix::identity(1),
            t: a.clone(),
            source_dim: 1,
        });
    }
    let eps = tol.max(4.0 * f64::EPSILON);
    let norm = a.fro_norm();
    let (mut q, mut h) = hessenberg(a)?;
    let cap = iteration_cap(n);
    let mut iters = 0usize;
    let mut hi = n - 1;
    let mut stuck = 0usize;
    while hi > 0 {
        // Deflate negligible subdiagonal entries in the active window.
        let mut lo = hi;
        while lo > 0 {
            let s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let thresh = eps * if s > 0.0 { s } else { norm.max(1.0) };
            if h[(lo, lo - 1)].norm() <= thresh {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if h[(hi, hi - 1)] == ZERO {
            hi -= 1;
            stuck = 0;
            continue;
        }
        if lo == hi {
            hi -= 1;
            stuck = 0;
            continue;
        }
        iters += 1;
        stuck += 1;
        if iters > cap {
            return Err(Error::NonConvergence {
                dim: n,
                iterations: cap,
            });
        }
        if hi - lo == 1 {
            // Closed-form 2x2 deflation: rotate an exact eigenvector into
            // first position.
            let (a11, a12, a21, a22) = (h[(lo, lo)], h[(lo, hi)], h[(hi, lo)], h[(hi, hi)]);
            let (l1, l2) = eig2(a11, a12, a21, a22);
            let lam = if (l1 - a22).norm() <= (l2 - a22).norm() {
                l1
            } else {
                l2
            };
            // Eigenvector of [[a11,a12],[a21,a22]] for lam.
            let v = if (lam - a11).norm() > a21.norm() {
                (a12, lam - a11)
            } else {
                (lam - a22, a21)
            };
            let g = givens(v.0, v.1);
            // G maps v to a multiple of e1, so G H G* is triangular.
            apply_givens_rows(&mut h, &g, lo, hi, 0);
            apply_givens_cols(&mut h, &g, lo, hi);
            apply_givens_cols(&mut q, &g, lo, hi);
            h[(hi, lo)] = ZERO;
            hi -= 1;
            stuck = 0;
            continue;
        }
        let mu = if stuck % 12 == 0 {
            // Exceptional shift breaks rare symmetric stagnation cycles.
            h[(hi, hi)] + 0.75 * h[(hi, hi - 1)].norm() * ONE
        } else {
            wilkinson_shift(&h, hi)
        };
        // One explicit shifted QR step on the window, applied to the full
        // matrix as a unitary similarity.
        let wlen = hi - lo + 1;
        let mut w = h.slice(lo, hi + 1, lo, hi + 1);
        for i in 0..wlen {
            w[(i, i)] -= mu;
        }
        let mut rots = Vec::with_capacity(wlen - 1);
        for k in 0..wlen - 1 {
            let g = givens(w[(k, k)], w[(k + 1, k)]);
            apply_givens_rows(&mut w, &g, k, k + 1, k);
            rots.push(g);
        }
        for (k, g) in rots.iter().enumerate() {
            apply_givens_rows(&mut h, g, lo + k, lo + k + 1, 0);
        }
        for (k, g) in rots.iter().enumerate() {
            apply_givens_cols(&mut h, g, lo + k, lo + k + 1);
            apply_givens_cols(&mut q, g, lo + k, lo + k + 1);
        }
    }
    // The iteration leaves rounding dust below the diagonal; zero it so the
    // triangular invariant holds exactly.
    for i in 0..n {
        for j in 0..i {
            h[(i, j)] = ZERO;
        }
    }
    Ok(SchurForm {
        q,
        t: h,
        source_dim: n,
    })
}

/// Eigenvalues of a general square matrix via the Schur diagonal.
pub fn eigenvalues(a: &Matrix, tol: f64) -> Result<Vec<C64>> {
    Ok(schur(a, tol)?.eigenvalues())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_matrix, rng_from_seed};

    const TOL: f64 = 1e-12;

    fn check_schur(a: &Matrix, bound: f64) {
        let f = schur(a, TOL).unwrap();
        let n = a.rows();
        assert!(f.q.unitarity_defect() < bound, "q not unitary");
        for i in 0..n {
            for j in 0..i {
                assert_eq!(f.t[(i, j)], ZERO);
            }
        }
        let recon = &(&f.q * &f.t) * &f.q.adjoint();
        let resid = (&recon - a).fro_norm();
        assert!(
            resid < bound * (1.0 + a.fro_norm()),
            "reconstruction residual {resid:.3e}"
        );
    }

    #[test]
    fn random_matrices_reconstruct() {
        let mut rng = rng_from_seed(7);
        for n in 1..=10 {
            for _ in 0..4 {
                let a = random_matrix(n, &mut rng);
                check_schur(&a, 1e-10);
            }
        }
    }

    #[test]
    fn known_eigenvalues_of_diagonalizable_matrix() {
        // Similarity of diag(1, 2i, -3) by a fixed rotation-like matrix.
        let d = Matrix::diag(&[C64::new(1.0, 0.0), C64::new(0.0, 2.0), C64::new(-3.0, 0.0)]);
        let mut rng = rng_from_seed(3);
        let v = crate::random::random_unitary(3, &mut rng);
        let a = &(&v * &d) * &v.adjoint();
        let mut eigs = eigenvalues(&a, TOL).unwrap();
        eigs.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
        assert!((eigs[0] - C64::new(-3.0, 0.0)).norm() < 1e-10);
        assert!((eigs[1] - C64::new(0.0, 2.0)).norm() < 1e-10);
        assert!((eigs[2] - C64::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn nilpotent_chains_converge() {
        // Lower shift: all eigenvalues zero, defective.
        for n in 2..=6 {
            let mut a = Matrix::zeros(n, n);
            for i in 0..n - 1 {
                a[(i + 1, i)] = ONE;
            }
            let f = schur(&a, TOL).unwrap();
            for lam in f.eigenvalues() {
                assert!(lam.norm() < 1e-8, "nilpotent eigenvalue {lam}");
            }
            check_schur(&a, 1e-10);
        }
    }

    #[test]
    fn one_by_one_short_circuit() {
        let a = Matrix::diag(&[C64::new(0.3, -0.4)]);
        let f = schur(&a, TOL).unwrap();
        assert_eq!(f.t[(0, 0)], C64::new(0.3, -0.4));
        assert_eq!(f.q[(0, 0)], ONE);
    }

    #[test]
    fn hessenberg_reconstructs() {
        let mut rng = rng_from_seed(11);
        let a = random_matrix(7, &mut rng);
        let (q, h) = hessenberg(&a).unwrap();
        for i in 0..7usize {
            for j in 0..i.saturating_sub(1) {
                assert_eq!(h[(i, j)], ZERO);
            }
        }
        let recon = &(&q * &h) * &q.adjoint();
        assert!((&recon - &a).fro_norm() < 1e-12 * (1.0 + a.fro_norm()));
    }
}
