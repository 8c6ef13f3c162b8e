//! The variety W attached to a model triple through its pencil pair: the
//! union over z of the joint spectra of (Phi1(z), Phi2(z)). Fibers,
//! grid sampling, membership, the reflection symmetry, and the
//! distinguishedness certificates (compatibility sweep and non-constancy
//! shortcut) live here.

use crate::error::Result;
use crate::joint::joint_eigenvalues;
use crate::matrix::{C64, Matrix};
use crate::model::ModelTriple;
use crate::numrad::numerical_radius;
use crate::svd::common_kernel_defect;

/// Where a point sits relative to the polydisc trichotomy: all coordinates
/// inside, all on the torus, all outside, or mixed (the distinguishedness
/// breaker).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    OpenPolydisc,
    Torus,
    Exterior,
    Mixed,
}

impl Region {
    /// Band classification: the exact trichotomy needs epsilon-bands in
    /// floating point.
    pub fn classify(coords: &[C64], band: f64) -> Region {
        let mut inside = 0;
        let mut circle = 0;
        let mut outside = 0;
        for w in coords {
            let r = w.norm();
            if r < 1.0 - band {
                inside += 1;
            } else if (r - 1.0).abs() <= band {
                circle += 1;
            } else {
                outside += 1;
            }
        }
        let n = coords.len();
        if inside == n {
            Region::OpenPolydisc
        } else if circle == n {
            Region::Torus
        } else if outside == n {
            Region::Exterior
        } else {
            Region::Mixed
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Region::OpenPolydisc => "D",
            Region::Torus => "T",
            Region::Exterior => "E",
            Region::Mixed => "MIXED",
        }
    }
}

#[derive(Clone, Debug)]
pub struct VarietyPoint {
    /// The z with z = z1 z2 (product of the coordinates).
    pub fiber_param: C64,
    pub coords: Vec<C64>,
    pub region: Region,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Distinguished,
    NotDistinguished,
    Undetermined,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Distinguished => "DISTINGUISHED",
            Verdict::NotDistinguished => "NOT_DISTINGUISHED",
            Verdict::Undetermined => "UNDETERMINED",
        }
    }
}

/// Fiber parameters on concentric circles, densest where the variety bends.
#[derive(Clone, Debug)]
pub struct GridSpec {
    pub center: C64,
    pub radius: f64,
    pub radii: usize,
    pub angles: usize,
    pub include_center: bool,
    /// Width of the torus band used for region classification.
    pub region_band: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            center: C64::new(0.0, 0.0),
            radius: 0.95,
            radii: 8,
            angles: 24,
            include_center: true,
            region_band: 1e-6,
        }
    }
}

impl GridSpec {
    pub fn points(&self) -> Vec<C64> {
        let mut pts = Vec::with_capacity(self.radii * self.angles + 1);
        if self.include_center {
            pts.push(self.center);
        }
        for k in 1..=self.radii {
            let r = self.radius * k as f64 / self.radii as f64;
            for j in 0..self.angles {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / self.angles as f64;
                pts.push(self.center + C64::from_polar(r, theta));
            }
        }
        pts
    }
}

#[derive(Clone, Debug)]
pub struct VarietySample {
    pub points: Vec<VarietyPoint>,
    pub grid: GridSpec,
    pub verdict: Verdict,
    pub evidence: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct CompatibilityReport {
    pub max_nu_left: f64,
    pub max_nu_right: f64,
    pub margin: f64,
    pub compatible: bool,
}

#[derive(Clone, Debug)]
pub struct NonConstancyReport {
    pub spread_left: f64,
    pub spread_right: f64,
    pub threshold: f64,
    pub nonconstant: bool,
}

#[derive(Clone, Debug)]
pub struct CertificateBundle {
    pub compatibility: CompatibilityReport,
    pub nonconstancy: NonConstancyReport,
    pub verdict: Verdict,
    pub open_count: usize,
    pub torus_count: usize,
    pub exterior_count: usize,
    pub mixed_count: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct Membership {
    pub member: bool,
    pub defect: f64,
}

#[derive(Clone, Debug)]
pub struct SymmetryReport {
    pub checked: usize,
    /// Points with a coordinate at 0 have no reflection; they are skipped.
    pub skipped: usize,
    /// Indices into the input list, with the reflected membership defect.
    pub failures: Vec<(usize, f64)>,
}

impl SymmetryReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

const NU_TOL: f64 = 1e-8;
const COMPAT_MARGIN: f64 = 1e-4;
const SPREAD_THRESHOLD: f64 = 1e-6;

fn sort_points(points: &mut [VarietyPoint]) {
    points.sort_by(|a, b| {
        let ka = (
            a.fiber_param.re,
            a.fiber_param.im,
            a.coords[0].re,
            a.coords[0].im,
            a.coords[1].re,
            a.coords[1].im,
        );
        let kb = (
            b.fiber_param.re,
            b.fiber_param.im,
            b.coords[0].re,
            b.coords[0].im,
            b.coords[1].re,
            b.coords[1].im,
        );
        ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
    });
}

/// One fiber: the joint eigenvalue tuples of the pencil pair at z. Every
/// returned point multiplies back to z and the list length is the triple's
/// dimension, counted with multiplicity.
pub fn fiber(t: &ModelTriple, z: C64, seed: u64, tol: f64) -> Result<Vec<VarietyPoint>> {
    fiber_with_band(t, z, seed, tol, 1e-6)
}

pub fn fiber_with_band(
    t: &ModelTriple,
    z: C64,
    seed: u64,
    tol: f64,
    band: f64,
) -> Result<Vec<VarietyPoint>> {
    let (phi1, phi2) = t.bcl_pair(z);
    let spectrum = joint_eigenvalues(&[phi1, phi2], seed, tol)?;
    let mut points: Vec<VarietyPoint> = spectrum
        .points
        .into_iter()
        .map(|coords| VarietyPoint {
            fiber_param: z,
            region: Region::classify(&coords, band),
            coords,
        })
        .collect();
    sort_points(&mut points);
    Ok(points)
}

/// Membership through the joint-spectrum definition: (z1, z2) lies on the
/// variety iff the shifted pencils at z = z1 z2 share a kernel vector.
pub fn is_member(t: &ModelTriple, z1: C64, z2: C64, tol: f64) -> Result<Membership> {
    let z = z1 * z2;
    let (phi1, phi2) = t.bcl_pair(z);
    let shifted1 = &phi1 - &Matrix::identity(t.dim).scale(z1);
    let shifted2 = &phi2 - &Matrix::identity(t.dim).scale(z2);
    let defect = common_kernel_defect(&[&shifted1, &shifted2])?;
    Ok(Membership {
        member: defect < tol,
        defect,
    })
}

/// Reflection symmetry: a nonzero-coordinate member (z1, z2) must reflect to
/// a member (1/conj(z1), 1/conj(z2)).
pub fn symmetry_check(t: &ModelTriple, pts: &[VarietyPoint], tol: f64) -> Result<SymmetryReport> {
    let mut report = SymmetryReport {
        checked: 0,
        skipped: 0,
        failures: Vec::new(),
    };
    for (idx, pt) in pts.iter().enumerate() {
        if pt.coords.iter().any(|w| w.norm() < 1e-8) {
            report.skipped += 1;
            continue;
        }
        let r1 = pt.coords[0].conj().inv();
        let r2 = pt.coords[1].conj().inv();
        let m = is_member(t, r1, r2, tol)?;
        report.checked += 1;
        if !m.member {
            report.failures.push((idx, m.defect));
        }
    }
    Ok(report)
}

/// Compatibility sweep: both pencil numerical radii must stay strictly below
/// 1 across a near-boundary grid of the disc.
pub fn compatibility_sweep(t: &ModelTriple) -> Result<CompatibilityReport> {
    let grid = GridSpec {
        radius: 0.999,
        radii: 8,
        angles: 25,
        include_center: false,
        ..GridSpec::default()
    };
    let mut max_left = 0.0f64;
    let mut max_right = 0.0f64;
    for z in grid.points() {
        let (phi1, phi2) = t.bcl_pair(z);
        max_left = max_left.max(numerical_radius(&phi1, NU_TOL)?);
        max_right = max_right.max(numerical_radius(&phi2, NU_TOL)?);
    }
    Ok(CompatibilityReport {
        max_nu_left: max_left,
        max_nu_right: max_right,
        margin: COMPAT_MARGIN,
        compatible: max_left < 1.0 - COMPAT_MARGIN && max_right < 1.0 - COMPAT_MARGIN,
    })
}

/// Non-constancy shortcut: if z -> nu(P^perp U + z U*P) and
/// z -> nu(U*P + z P^perp U) both vary, compatibility follows in finite
/// dimension; the spread over 16 spread-out points is the witness.
pub fn nonconstancy_check(t: &ModelTriple) -> Result<NonConstancyReport> {
    let pp = t.p_perp();
    let a_left = &pp * &t.u;
    let b_left = &t.u.adjoint() * &t.p;
    let a_right = b_left.clone();
    let b_right = a_left.clone();
    let mut lo_left = f64::INFINITY;
    let mut hi_left = f64::NEG_INFINITY;
    let mut lo_right = f64::INFINITY;
    let mut hi_right = f64::NEG_INFINITY;
    for &r in &[0.3, 0.8] {
        for j in 0..8 {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / 8.0;
            let z = C64::from_polar(r, theta);
            let nu_l = numerical_radius(&(&a_left + &b_left.scale(z)), NU_TOL)?;
            lo_left = lo_left.min(nu_l);
            hi_left = hi_left.max(nu_l);
            let nu_r = numerical_radius(&(&a_right + &b_right.scale(z)), NU_TOL)?;
            lo_right = lo_right.min(nu_r);
            hi_right = hi_right.max(nu_r);
        }
    }
    let spread_left = hi_left - lo_left;
    let spread_right = hi_right - lo_right;
    Ok(NonConstancyReport {
        spread_left,
        spread_right,
        threshold: SPREAD_THRESHOLD,
        nonconstant: spread_left > SPREAD_THRESHOLD && spread_right > SPREAD_THRESHOLD,
    })
}

fn verdict_from(
    points: &[VarietyPoint],
    compat: &CompatibilityReport,
    noncon: &NonConstancyReport,
) -> Verdict {
    let mixed = points.iter().filter(|p| p.region == Region::Mixed).count();
    let open = points
        .iter()
        .filter(|p| p.region == Region::OpenPolydisc)
        .count();
    if mixed > 0 {
        Verdict::NotDistinguished
    } else if open > 0 && (compat.compatible || noncon.nonconstant) {
        Verdict::Distinguished
    } else {
        Verdict::Undetermined
    }
}

/// Samples the variety over a fiber-parameter grid and attaches the verdict
/// and its evidence.
pub fn sample(t: &ModelTriple, grid: &GridSpec, seed: u64, tol: f64) -> Result<VarietySample> {
    let mut points = Vec::new();
    for (k, z) in grid.points().into_iter().enumerate() {
        let fiber_points = fiber_with_band(t, z, seed.wrapping_add(k as u64), tol, grid.region_band)?;
        points.extend(fiber_points);
    }
    sort_points(&mut points);
    let compat = compatibility_sweep(t)?;
    let noncon = nonconstancy_check(t)?;
    let verdict = verdict_from(&points, &compat, &noncon);
    let evidence = vec![
        format!(
            "compatibility sweep: max nu = {:.8} (left), {:.8} (right), margin {:.1e} -> {}",
            compat.max_nu_left,
            compat.max_nu_right,
            compat.margin,
            if compat.compatible { "COMPATIBLE" } else { "NOT COMPATIBLE" }
        ),
        format!(
            "non-constancy: spread = {:.3e} (left), {:.3e} (right), threshold {:.1e} -> {}",
            noncon.spread_left,
            noncon.spread_right,
            noncon.threshold,
            if noncon.nonconstant { "NONCONSTANT" } else { "inconclusive" }
        ),
        format!(
            "regions: D={} T={} E={} MIXED={}",
            points.iter().filter(|p| p.region == Region::OpenPolydisc).count(),
            points.iter().filter(|p| p.region == Region::Torus).count(),
            points.iter().filter(|p| p.region == Region::Exterior).count(),
            points.iter().filter(|p| p.region == Region::Mixed).count(),
        ),
    ];
    Ok(VarietySample {
        points,
        grid: grid.clone(),
        verdict,
        evidence,
    })
}

/// Full certificate: compatibility, non-constancy, and the sampled verdict.
pub fn certify(t: &ModelTriple, tol: f64) -> Result<CertificateBundle> {
    let grid = GridSpec::default();
    let s = sample(t, &grid, 0, tol)?;
    let compat = compatibility_sweep(t)?;
    let noncon = nonconstancy_check(t)?;
    Ok(CertificateBundle {
        verdict: s.verdict,
        open_count: s.points.iter().filter(|p| p.region == Region::OpenPolydisc).count(),
        torus_count: s.points.iter().filter(|p| p.region == Region::Torus).count(),
        exterior_count: s.points.iter().filter(|p| p.region == Region::Exterior).count(),
        mixed_count: s.points.iter().filter(|p| p.region == Region::Mixed).count(),
        compatibility: compat,
        nonconstancy: noncon,
    })
}
