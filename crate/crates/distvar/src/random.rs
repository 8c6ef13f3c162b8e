//! Seeded random generators for matrices, unitaries, projections, and model
//! triples. Every consumer threads an explicit seed so runs are reproducible.

use crate::matrix::{C64, Matrix, ZERO};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal via Box-Muller; good enough for generic-position draws.
pub fn gaussian(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn complex_gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(gaussian(rng), gaussian(rng))
}

/// Dense matrix with independent complex-gaussian entries.
pub fn random_matrix(n: usize, rng: &mut impl Rng) -> Matrix {
    Matrix::from_fn(n, n, |_, _| complex_gaussian(rng))
}

/// Unitary from Gram-Schmidt on a gaussian matrix, with one re-orthogonalization
/// pass for stability.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> Matrix {
    let g = random_matrix(n, rng);
    let mut q = Matrix::zeros(n, n);
    for j in 0..n {
        let mut v = g.col(j);
        for _ in 0..2 {
            for k in 0..j {
                let qk = q.col(k);
                let mut dot = ZERO;
                for i in 0..n {
                    dot += qk[i].conj() * v[i];
                }
                for i in 0..n {
                    v[i] -= dot * qk[i];
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        // A gaussian draw is almost surely in general position; renormalize
        // defensively anyway.
        let inv = if norm > 0.0 { 1.0 / norm } else { 1.0 };
        for z in v.iter_mut() {
            *z *= inv;
        }
        q.set_col(j, &v);
    }
    q
}

/// Orthogonal projection of the given rank: `v diag(1..1,0..0) v*`.
pub fn random_projection(n: usize, rank: usize, rng: &mut impl Rng) -> Matrix {
    assert!(rank <= n);
    let v = random_unitary(n, rng);
    let mut d = Matrix::zeros(n, n);
    for i in 0..rank {
        d[(i, i)] = crate::matrix::ONE;
    }
    let p = &(&v * &d) * &v.adjoint();
    // Average with the adjoint so hermiticity holds to the last bit.
    let ph = p.adjoint();
    (&p + &ph).scale(C64::new(0.5, 0.0))
}

/// Uniform point of the closed disc of the given radius.
pub fn random_disc_point(radius: f64, rng: &mut impl Rng) -> C64 {
    let r = radius * rng.random::<f64>().sqrt();
    let th = 2.0 * std::f64::consts::PI * rng.random::<f64>();
    C64::from_polar(r, th)
}

/// Unimodular number.
pub fn random_circle_point(rng: &mut impl Rng) -> C64 {
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * rng.random::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = rng_from_seed(1);
        for n in 1..=8 {
            let u = random_unitary(n, &mut rng);
            assert!(u.unitarity_defect() < 1e-12, "defect at dim {n}");
        }
    }

    #[test]
    fn random_projection_is_projection() {
        let mut rng = rng_from_seed(2);
        let p = random_projection(6, 2, &mut rng);
        assert!((&(&p * &p) - &p).fro_norm() < 1e-13);
        assert!((&p - &p.adjoint()).fro_norm() < 1e-14);
        assert!((p.trace() - C64::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn seeded_draws_are_reproducible() {
        let mut a = rng_from_seed(42);
        let mut b = rng_from_seed(42);
        let ma = random_matrix(4, &mut a);
        let mb = random_matrix(4, &mut b);
        assert!((&ma - &mb).fro_norm() == 0.0);
    }
}
