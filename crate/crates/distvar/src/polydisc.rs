//! One-dimensional distinguished varieties of the polydisc cut out by pure
//! model tuples: joint-eigenvalue fibers over the product parameter,
//! membership, per-factor numerical-radius certificates, and a splitting
//! helper that fabricates pure 3-tuples from a 2-variable triple.

use crate::bidisc::{GridSpec, Membership, Region, Verdict};
use crate::error::{Error, Result};
use crate::joint::{common_kernel_defect, joint_eigenvalues};
use crate::matrix::{C64, Matrix};
use crate::model::{ModelTriple, ModelTuple};
use crate::numrad::numerical_radius;

const NU_MARGIN: f64 = 1e-4;
const NU_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct PolyCertificate {
    /// Per-factor maximum of nu over the sweep grid.
    pub nu_max: Vec<f64>,
    pub margin: f64,
    /// All factor sweeps stayed below 1 - margin.
    pub compatible: bool,
    pub open_count: usize,
    pub torus_count: usize,
    pub exterior_count: usize,
    pub mixed_count: usize,
    /// Largest fiber cardinality seen; bounded by dim for a pure tuple.
    pub max_fiber_size: usize,
    pub verdict: Verdict,
    pub evidence: Vec<String>,
}

/// Joint eigenvalue tuples of (Phi_1(z), ..., Phi_d(z)); for a pure tuple
/// every tuple's coordinate product equals z.
pub fn tuple_fiber(t: &ModelTuple, z: C64, seed: u64, tol: f64) -> Result<Vec<Vec<C64>>> {
    let family: Vec<Matrix> = (0..t.d).map(|i| t.pencil(i, z)).collect();
    let spectrum = joint_eigenvalues(&family, seed, tol)?;
    let mut points = spectrum.points;
    points.sort_by(|a, b| {
        let ka: Vec<(f64, f64)> = a.iter().map(|c| (c.re, c.im)).collect();
        let kb: Vec<(f64, f64)> = b.iter().map(|c| (c.re, c.im)).collect();
        ka.partial_cmp(&kb).unwrap()
    });
    Ok(points)
}

/// Membership of a coordinate tuple in the variety: the pencils at the
/// product parameter must share a kernel direction after shifting.
pub fn is_member_poly(t: &ModelTuple, coords: &[C64], tol: f64) -> Result<Membership> {
    if coords.len() != t.d {
        return Err(Error::InvalidInput(format!(
            "expected {} coordinates, got {}",
            t.d,
            coords.len()
        )));
    }
    let z: C64 = coords.iter().product();
    let family: Vec<Matrix> = (0..t.d)
        .map(|i| &t.pencil(i, z) - &Matrix::identity(t.dim).scale(coords[i]))
        .collect();
    let refs: Vec<&Matrix> = family.iter().collect();
    let defect = common_kernel_defect(&refs)?;
    Ok(Membership {
        member: defect < tol,
        defect,
    })
}

/// Per-factor numerical-radius sweep plus a region scan of sampled fibers.
pub fn certify_poly(t: &ModelTuple, tol: f64) -> Result<PolyCertificate> {
    let sweep_grid = GridSpec {
        radius: 0.999,
        radii: 8,
        angles: 25,
        include_center: false,
        ..GridSpec::default()
    };
    let mut nu_max = vec![0.0f64; t.d];
    for z in sweep_grid.points() {
        for i in 0..t.d {
            let nu = numerical_radius(&t.pencil(i, z), NU_TOL)?;
            if nu > nu_max[i] {
                nu_max[i] = nu;
            }
        }
    }
    let compatible = nu_max.iter().all(|&nu| nu < 1.0 - NU_MARGIN);

    let grid = GridSpec::default();
    let mut open_count = 0;
    let mut torus_count = 0;
    let mut exterior_count = 0;
    let mut mixed_count = 0;
    let mut max_fiber_size = 0;
    for (k, z) in grid.points().into_iter().enumerate() {
        let fiber = tuple_fiber(t, z, (k as u64).wrapping_add(1), tol)?;
        max_fiber_size = max_fiber_size.max(fiber.len());
        for coords in &fiber {
            match Region::classify(coords, grid.region_band) {
                Region::OpenPolydisc => open_count += 1,
                Region::Torus => torus_count += 1,
                Region::Exterior => exterior_count += 1,
                Region::Mixed => mixed_count += 1,
            }
        }
    }
    let verdict = if mixed_count > 0 {
        Verdict::NotDistinguished
    } else if open_count > 0 && compatible {
        Verdict::Distinguished
    } else {
        Verdict::Undetermined
    };
    let nu_line = nu_max
        .iter()
        .enumerate()
        .map(|(i, nu)| format!("factor {i}: {nu:.8}"))
        .collect::<Vec<_>>()
        .join(", ");
    let evidence = vec![
        format!("nu sweep: {nu_line}"),
        format!(
            "compatibility margin {:.1e}: {}",
            NU_MARGIN,
            if compatible { "COMPATIBLE" } else { "NOT COMPATIBLE" }
        ),
        format!(
            "regions: {open_count} D, {torus_count} T, {exterior_count} E, {mixed_count} MIXED"
        ),
        format!("max fiber cardinality {max_fiber_size} (dim {})", t.dim),
        format!("verdict: {}", verdict.label()),
    ];
    Ok(PolyCertificate {
        nu_max,
        margin: NU_MARGIN,
        compatible,
        open_count,
        torus_count,
        exterior_count,
        mixed_count,
        max_fiber_size,
        verdict,
        evidence,
    })
}

/// Splits the second pencil of a 2-variable triple through an intermediate
/// projection: with Q1 + Q2 = P_perp an orthogonal splitting and V unitary,
/// the factors (P, U), (U*Q1U, U*V), (V*Q2V, V*) multiply back to zI, giving
/// a pure 3-tuple on the same space.
pub fn split_second_pencil(t: &ModelTriple, q1: &Matrix, v: &Matrix) -> Result<ModelTuple> {
    let n = t.dim;
    if q1.rows() != n || q1.cols() != n || v.rows() != n || v.cols() != n {
        return Err(Error::DimensionMismatch {
            context: "splitting data must match the triple dimension".into(),
        });
    }
    let idem = (&(q1 * q1) - q1).fro_norm();
    let herm = (&q1.adjoint() - q1).fro_norm();
    if idem > 1e-10 || herm > 1e-10 {
        return Err(Error::InvalidInput(
            "splitting projection is not an orthogonal projection".into(),
        ));
    }
    let q2 = &t.p_perp() - q1;
    let q2_idem = (&(&q2 * &q2) - &q2).fro_norm();
    if q2_idem > 1e-10 {
        return Err(Error::InvalidInput(
            "splitting projection does not sit under the complement of P".into(),
        ));
    }
    if v.unitarity_defect() > 1e-10 {
        return Err(Error::InvalidInput("splitting factor is not unitary".into()));
    }
    let u = &t.u;
    let p2 = &(&u.adjoint() * q1) * u;
    let u2 = &u.adjoint() * v;
    let p3 = &(&v.adjoint() * &q2) * v;
    let u3 = v.adjoint();
    ModelTuple::new(vec![t.p.clone(), p2, p3], vec![u.clone(), u2, u3])
}
