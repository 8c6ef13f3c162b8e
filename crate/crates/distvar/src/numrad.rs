//! Numerical radius of a complex matrix.
//!
//! Uses the rotation formula: the numerical radius of `a` equals the maximum
//! over angles of the largest eigenvalue of the Hermitian part of
//! `exp(i theta) a`. The angle objective is Lipschitz with constant at most
//! the norm of `a`, so a uniform grid brackets every local maximum and
//! golden-section refinement polishes the candidates.

use crate::error::Result;
use crate::hermitian::hermitian_eigenvalues;
use crate::matrix::{C64, Matrix};

const GRID: usize = 720;
const GOLDEN: f64 = 0.618_033_988_749_894_9;

fn hermitian_part_top(a: &Matrix, theta: f64) -> Result<f64> {
    let phase = C64::from_polar(1.0, theta);
    let rotated = a.scale(phase);
    let herm = (&rotated + &rotated.adjoint()).scale(C64::new(0.5, 0.0));
    let eigs = hermitian_eigenvalues(&herm)?;
    Ok(eigs.last().copied().unwrap_or(0.0))
}

fn golden_refine(
    a: &Matrix,
    mut lo: f64,
    mut hi: f64,
    lipschitz: f64,
    tol: f64,
) -> Result<f64> {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let mut f1 = hermitian_part_top(a, x1)?;
    let mut f2 = hermitian_part_top(a, x2)?;
    let mut best = f1.max(f2);
    while (hi - lo) * lipschitz > tol && hi - lo > 1e-14 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = hermitian_part_top(a, x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = hermitian_part_top(a, x1)?;
        }
        best = best.max(f1.max(f2));
    }
    Ok(best)
}

/// Numerical radius: the largest modulus attained by `v* a v` over unit
/// vectors `v`. Accurate to roughly `tol` for well-scaled inputs.
pub fn numerical_radius(a: &Matrix, tol: f64) -> Result<f64> {
    let n = a.require_square()?;
    if n == 0 {
        return Ok(0.0);
    }
    if n == 1 {
        return Ok(a[(0, 0)].norm());
    }
    let lipschitz = a.fro_norm().max(1e-30);
    let tol = tol.max(1e-13);
    let step = 2.0 * std::f64::consts::PI / GRID as f64;
    let mut values = Vec::with_capacity(GRID);
    for k in 0..GRID {
        values.push(hermitian_part_top(a, k as f64 * step)?);
    }
    let coarse_best = values.iter().copied().fold(f64::MIN, f64::max);
    // Refine around every circular local maximum that could still beat the
    // coarse winner: within one grid cell the objective moves at most
    // lipschitz * step per endpoint.
    let band = 2.0 * lipschitz * step;
    let mut best = coarse_best;
    for k in 0..GRID {
        let prev = values[(k + GRID - 1) % GRID];
        let next = values[(k + 1) % GRID];
        if values[k] >= prev && values[k] >= next && values[k] >= coarse_best - band {
            let theta = k as f64 * step;
            let refined = golden_refine(a, theta - step, theta + step, lipschitz, tol)?;
            best = best.max(refined);
        }
    }
    Ok(best)
}
