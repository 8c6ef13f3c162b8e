//! Distinguished varieties in the symmetrized bidisc: the variety
//! W_F = {(s, p) : det(F* + pF - sI) = 0} attached to the fundamental
//! operator F = PU + U*P_perp of a model triple, region classification
//! against the Gamma geometry, and the 2x2 representability screen.

use crate::bidisc::{GridSpec, Membership, Verdict, VarietyPoint};
use crate::error::{Error, Result};
use crate::matrix::{C64, Matrix};
use crate::model::ModelTriple;
use crate::numrad::numerical_radius;
use crate::schur::eigenvalues;
use crate::svd::smallest_singular_value;

const NU_MARGIN: f64 = 1e-4;

/// Position of a symmetrized point relative to Gamma, decided by the two
/// roots of t^2 - st + p.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gamma {
    /// Both roots strictly inside the disc: the open symmetrized bidisc.
    OpenG,
    /// Both roots on the circle: the distinguished boundary.
    DistBoundary,
    /// On the topological boundary but off the distinguished boundary.
    TopoBoundary,
    /// At least one root strictly outside the closed disc.
    Outside,
}

impl Gamma {
    pub fn label(&self) -> &'static str {
        match self {
            Gamma::OpenG => "OPEN_G",
            Gamma::DistBoundary => "DIST_BOUNDARY",
            Gamma::TopoBoundary => "TOPO_BOUNDARY",
            Gamma::Outside => "OUTSIDE",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SymmPoint {
    pub s: C64,
    pub p: C64,
    pub region: Gamma,
}

#[derive(Clone, Debug)]
pub struct SymmSample {
    pub points: Vec<SymmPoint>,
    pub verdict: Verdict,
    pub evidence: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct NuCertificate {
    pub nu: f64,
    pub margin: f64,
    /// nu < 1 - margin: certifies the distinguished verdict by itself. The
    /// converse fails (varieties with nu = 1 can still be distinguished),
    /// so non-strict is inconclusive.
    pub strict: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representability {
    /// The eigenvalue moduli differ: no projection-unitary pair can
    /// produce this operator.
    No,
    /// Equal moduli: the necessary condition holds but is not sufficient.
    Undetermined,
}

impl Representability {
    pub fn label(&self) -> &'static str {
        match self {
            Representability::No => "NO",
            Representability::Undetermined => "UNDETERMINED",
        }
    }
}

/// Roots of t^2 - st + p with the branch of the square root chosen to
/// avoid cancellation in s + w.
pub fn quadratic_roots(s: C64, p: C64) -> (C64, C64) {
    let disc = s * s - p.scale(4.0);
    let mut w = disc.sqrt();
    if (s.conj() * w).re < 0.0 {
        w = -w;
    }
    let r1 = (s + w).scale(0.5);
    let r2 = if r1.norm() > 1e-300 {
        p / r1
    } else {
        (s - w).scale(0.5)
    };
    (r1, r2)
}

/// Region of (s, p) relative to Gamma within an eps band.
pub fn classify_sp(s: C64, p: C64, eps: f64) -> Gamma {
    let (t1, t2) = quadratic_roots(s, p);
    let m1 = t1.norm();
    let m2 = t2.norm();
    let near1 = |m: f64| (m - 1.0).abs() <= eps;
    if m1 < 1.0 - eps && m2 < 1.0 - eps {
        Gamma::OpenG
    } else if near1(m1) && near1(m2) {
        Gamma::DistBoundary
    } else if m1 <= 1.0 + eps && m2 <= 1.0 + eps && (near1(m1) || near1(m2)) {
        Gamma::TopoBoundary
    } else {
        Gamma::Outside
    }
}

/// The s values over p: eigenvalues of F* + pF.
pub fn wf_fiber(f: &Matrix, p: C64, tol: f64) -> Result<Vec<C64>> {
    f.require_square()?;
    let pencil = &f.adjoint() + &f.scale(p);
    eigenvalues(&pencil, tol.min(1e-10))
}

/// Membership of (s, p) in W_F, with the smallest singular value of
/// F* + pF - sI as the defect.
pub fn wf_member(f: &Matrix, s: C64, p: C64, tol: f64) -> Result<Membership> {
    let n = f.require_square()?;
    let shifted = &(&f.adjoint() + &f.scale(p)) - &Matrix::identity(n).scale(s);
    let defect = smallest_singular_value(&shifted);
    Ok(Membership {
        member: defect < tol,
        defect,
    })
}

/// Default sampling grid for the symmetrized bidisc: the outermost ring
/// sits exactly on |p| = 1 so the boundary is scanned alongside interior
/// witnesses.
pub fn symm_grid() -> GridSpec {
    GridSpec {
        radius: 1.0,
        ..GridSpec::default()
    }
}

fn sort_symm_points(points: &mut [SymmPoint]) {
    points.sort_by(|a, b| {
        (a.p.re, a.p.im, a.s.re, a.s.im)
            .partial_cmp(&(b.p.re, b.p.im, b.s.re, b.s.im))
            .unwrap()
    });
}

/// Samples W_F over a p-grid and classifies every fiber point. Any point on
/// the topological boundary away from the distinguished boundary sinks the
/// verdict; otherwise an interior witness yields DISTINGUISHED.
pub fn sample_symm(t: &ModelTriple, grid: &GridSpec, tol: f64) -> Result<SymmSample> {
    let f = t.fundamental_operator();
    let eps = grid.region_band.max(1e-9);
    let mut points = Vec::new();
    for p in grid.points() {
        for s in wf_fiber(&f, p, tol)? {
            points.push(SymmPoint {
                s,
                p,
                region: classify_sp(s, p, eps),
            });
        }
    }
    sort_symm_points(&mut points);
    let open = points.iter().filter(|q| q.region == Gamma::OpenG).count();
    let dist = points
        .iter()
        .filter(|q| q.region == Gamma::DistBoundary)
        .count();
    let topo = points
        .iter()
        .filter(|q| q.region == Gamma::TopoBoundary)
        .count();
    let outside = points.len() - open - dist - topo;
    let verdict = if topo > 0 {
        Verdict::NotDistinguished
    } else if open > 0 {
        Verdict::Distinguished
    } else {
        Verdict::Undetermined
    };
    let evidence = vec![
        format!(
            "regions: {open} OPEN_G, {dist} DIST_BOUNDARY, {topo} TOPO_BOUNDARY, {outside} OUTSIDE"
        ),
        format!("verdict: {}", verdict.label()),
    ];
    Ok(SymmSample {
        points,
        verdict,
        evidence,
    })
}

/// Projects bidisc variety points through (z1, z2) -> (z1 + z2, z1 z2).
pub fn pi_project(points: &[VarietyPoint], eps: f64) -> Result<Vec<SymmPoint>> {
    let mut out = Vec::with_capacity(points.len());
    for pt in points {
        if pt.coords.len() != 2 {
            return Err(Error::InvalidInput(
                "projection needs two-coordinate points".into(),
            ));
        }
        let s = pt.coords[0] + pt.coords[1];
        let p = pt.coords[0] * pt.coords[1];
        out.push(SymmPoint {
            s,
            p,
            region: classify_sp(s, p, eps),
        });
    }
    sort_symm_points(&mut out);
    Ok(out)
}

/// Numerical radius of the fundamental operator; strictly below 1 is a
/// sampling-free certificate that W_F cuts a distinguished variety.
pub fn nu_certificate(t: &ModelTriple, tol: f64) -> Result<NuCertificate> {
    let nu = numerical_radius(&t.fundamental_operator(), tol.min(1e-8))?;
    Ok(NuCertificate {
        nu,
        margin: NU_MARGIN,
        strict: nu < 1.0 - NU_MARGIN,
    })
}

/// Necessary-condition screen for writing a 2x2 operator as PU + U*P_perp:
/// the two eigenvalues must share a modulus. Equal moduli stay undecided
/// (the Jordan block [[a,1],[0,a]] with 0 < |a| < 1 shows they are not
/// sufficient).
pub fn representable_2x2(a: &Matrix, tol: f64) -> Result<Representability> {
    let n = a.require_square()?;
    if n != 2 {
        return Err(Error::InvalidInput(format!(
            "representability screen needs a 2 by 2 operator, got {n} by {n}"
        )));
    }
    let eigs = eigenvalues(a, 1e-12)?;
    let gap = (eigs[0].norm() - eigs[1].norm()).abs();
    if gap > tol {
        Ok(Representability::No)
    } else {
        Ok(Representability::Undetermined)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ONE;
    use crate::model::fixtures;
    use crate::random::{random_disc_point, random_projection, random_unitary, rng_from_seed};

    fn c64(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn royal_fibers_satisfy_the_discriminant_relation() {
        let t = fixtures::diagonal();
        let f = t.fundamental_operator();
        let mut rng = rng_from_seed(3);
        for _ in 0..12 {
            let p = random_disc_point(1.0, &mut rng);
            let fiber = wf_fiber(&f, p, 1e-10).unwrap();
            assert_eq!(fiber.len(), 2);
            for s in fiber {
                assert!((s * s - p.scale(4.0)).norm() < 1e-9);
                let m = wf_member(&f, s, p, 1e-7).unwrap();
                assert!(m.member, "defect {}", m.defect);
            }
        }
        // On |p| = 1 the doubled root lands on the distinguished boundary.
        let p = C64::from_polar(1.0, 0.9);
        for s in wf_fiber(&f, p, 1e-10).unwrap() {
            assert_eq!(classify_sp(s, p, 1e-6), Gamma::DistBoundary);
        }
    }

    #[test]
    fn fiber_points_annihilate_the_determinant() {
        let mut rng = rng_from_seed(17);
        for _ in 0..6 {
            let u = random_unitary(4, &mut rng);
            let p_mat = random_projection(4, 2, &mut rng);
            let t = crate::model::ModelTriple::new(p_mat, u).unwrap();
            let f = t.fundamental_operator();
            let p = random_disc_point(0.9, &mut rng);
            let pencil = &f.adjoint() + &f.scale(p);
            let scale = pencil.fro_norm().max(1.0);
            for s in wf_fiber(&f, p, 1e-10).unwrap() {
                let shifted = &pencil - &Matrix::identity(4).scale(s);
                let det = shifted.det().unwrap();
                assert!(det.norm() <= 1e-8 * scale.powi(4));
            }
        }
    }

    #[test]
    fn royal_sample_is_distinguished() {
        let t = fixtures::diagonal();
        let sample = sample_symm(&t, &symm_grid(), 1e-8).unwrap();
        assert_eq!(sample.verdict, Verdict::Distinguished);
        for q in &sample.points {
            assert!((q.s * q.s - q.p.scale(4.0)).norm() < 1e-8);
            assert_ne!(q.region, Gamma::TopoBoundary);
        }
    }

    #[test]
    fn proj_identity_lands_on_the_topological_boundary() {
        let t = fixtures::proj_identity();
        let f = t.fundamental_operator();
        // F = I, so the fiber over p is the double point s = 1 + p; at
        // p = 1/2 that is the reference point (3/2, 1/2).
        let p = c64(0.5, 0.0);
        let fiber = wf_fiber(&f, p, 1e-10).unwrap();
        for s in &fiber {
            assert!((s - c64(1.5, 0.0)).norm() < 1e-10);
        }
        assert_eq!(classify_sp(c64(1.5, 0.0), p, 1e-6), Gamma::TopoBoundary);
        let sample = sample_symm(&t, &symm_grid(), 1e-8).unwrap();
        assert_eq!(sample.verdict, Verdict::NotDistinguished);
    }

    #[test]
    fn perturbed_royal_adds_the_axis_branch() {
        let t = fixtures::perturbed_royal();
        let f = t.fundamental_operator();
        let mut rng = rng_from_seed(5);
        for _ in 0..8 {
            let p = random_disc_point(1.0, &mut rng);
            let mut fiber = wf_fiber(&f, p, 1e-10).unwrap();
            assert_eq!(fiber.len(), 4);
            // Two zero eigenvalues from the axis branch {(0, -z^2)} and the
            // pair on the royal branch {(2z, z^2)}.
            fiber.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
            assert!(fiber[0].norm() < 1e-9);
            assert!(fiber[1].norm() < 1e-9);
            for s in &fiber[2..] {
                assert!((s * s - p.scale(4.0)).norm() < 1e-8);
            }
        }
        let sample = sample_symm(&t, &symm_grid(), 1e-8).unwrap();
        assert_eq!(sample.verdict, Verdict::Distinguished);
    }

    #[test]
    fn diagonal_lambda_block_membership_and_certificate() {
        let lam = c64(0.6, 0.0);
        let t = fixtures::diag_lambda(lam);
        let f = t.fundamental_operator();
        let mut rng = rng_from_seed(11);
        for _ in 0..10 {
            let p = random_disc_point(0.95, &mut rng);
            let s = lam.conj() + lam * p;
            let on_line = wf_member(&f, s, p, 1e-6).unwrap();
            assert!(on_line.member, "defect {}", on_line.defect);
            let on_axis = wf_member(&f, C64::new(0.0, 0.0), p, 1e-6).unwrap();
            assert!(on_axis.member, "defect {}", on_axis.defect);
        }
        let cert = nu_certificate(&t, 1e-8).unwrap();
        assert!((cert.nu - 0.6).abs() < 1e-6);
        assert!(cert.strict);
        let sample = sample_symm(&t, &symm_grid(), 1e-8).unwrap();
        assert_eq!(sample.verdict, Verdict::Distinguished);
    }

    #[test]
    fn nu_one_fixtures_are_inconclusive_by_radius_alone() {
        let royal = nu_certificate(&fixtures::diagonal(), 1e-8).unwrap();
        assert!((royal.nu - 1.0).abs() < 1e-6);
        assert!(!royal.strict);
        let flat = nu_certificate(&fixtures::proj_identity(), 1e-8).unwrap();
        assert!((flat.nu - 1.0).abs() < 1e-10);
        assert!(!flat.strict);
    }

    #[test]
    fn zeta_unitary_reproduces_the_jordan_block() {
        let zeta = c64(0.5, 3.0f64.sqrt() / 2.0);
        let u = Matrix::from_rows(&[
            vec![C64::new(0.0, 0.0), zeta],
            vec![zeta, C64::new(0.0, 0.0)],
        ])
        .unwrap();
        assert!(u.unitarity_defect() < 1e-15);
        let p = Matrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let t = ModelTriple::new(p, u).unwrap();
        let f = t.fundamental_operator();
        let target = Matrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!((&f - &target).fro_norm() < 1e-12);
    }

    #[test]
    fn representability_screen() {
        let distinct = Matrix::diag(&[c64(0.5, 0.0), c64(0.1, 0.0)]);
        assert_eq!(
            representable_2x2(&distinct, 1e-8).unwrap(),
            Representability::No
        );
        let jordan = Matrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(
            representable_2x2(&jordan, 1e-8).unwrap(),
            Representability::Undetermined
        );
        // Equal moduli but proven unrepresentable in the source analysis:
        // the screen stays honest and answers UNDETERMINED.
        let shifted = Matrix::from_real_rows(&[&[0.3, 1.0], &[0.0, 0.3]]);
        assert_eq!(
            representable_2x2(&shifted, 1e-8).unwrap(),
            Representability::Undetermined
        );
        assert!(representable_2x2(&Matrix::identity(3), 1e-8).is_err());
    }

    #[test]
    fn projection_of_bidisc_sample_matches_direct_fibers() {
        let t = fixtures::diagonal();
        let f = t.fundamental_operator();
        let mut rng = rng_from_seed(23);
        for _ in 0..5 {
            let z = random_disc_point(0.9, &mut rng);
            let fiber = crate::bidisc::fiber(&t, z, 0, 1e-10).unwrap();
            let projected = pi_project(&fiber, 1e-6).unwrap();
            // The product coordinate of every projected point is z itself,
            // so the direct fiber over p = z must match as a set.
            let mut direct = wf_fiber(&f, z, 1e-10).unwrap();
            for q in &projected {
                assert!((q.p - z).norm() < 1e-9);
                let hit = direct
                    .iter()
                    .position(|s| (s - q.s).norm() < 1e-7)
                    .expect("projected point missing from the direct fiber");
                direct.remove(hit);
            }
        }
    }

    #[test]
    fn projection_formula_on_royal_points() {
        let w = c64(0.4, 0.3);
        let pt = VarietyPoint {
            fiber_param: w * w,
            coords: vec![w, w],
            region: crate::bidisc::Region::OpenPolydisc,
        };
        let projected = pi_project(&[pt], 1e-6).unwrap();
        assert!((projected[0].s - w.scale(2.0)).norm() < 1e-15);
        assert!((projected[0].p - w * w).norm() < 1e-15);
        let corner = VarietyPoint {
            fiber_param: ONE,
            coords: vec![ONE, ONE],
            region: crate::bidisc::Region::Torus,
        };
        let projected = pi_project(&[corner], 1e-6).unwrap();
        assert_eq!(projected[0].region, Gamma::DistBoundary);
        assert!((projected[0].s - c64(2.0, 0.0)).norm() < 1e-15);
    }
}
