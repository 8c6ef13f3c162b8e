//! Acceptance battery: one test per criterion, each printing a single
//! pass/fail line with the measured extremes. Tolerances are part of the
//! contract; loosening one here is a bug, not a fix.

use distvar::bidisc::{self, GridSpec, Region, Verdict};
use distvar::canonical;
use distvar::inner::{self, RationalInnerFn};
use distvar::matrix::{C64, Matrix, ONE, ZERO};
use distvar::model::{fixtures, Colligation, ModelTriple, ModelTuple};
use distvar::numrad::numerical_radius;
use distvar::poly::BivariatePoly;
use distvar::polydisc;
use distvar::random::{random_disc_point, random_projection, random_unitary, rng_from_seed};
use distvar::svd::svd;
use distvar::symm;
use rand::Rng;

fn random_triple(dim: usize, rng: &mut impl Rng) -> ModelTriple {
    let rank = rng.random_range(1..dim);
    ModelTriple::new(random_projection(dim, rank, rng), random_unitary(dim, rng)).unwrap()
}

fn op_norm(m: &Matrix) -> f64 {
    svd(m).sigma.first().copied().unwrap_or(0.0)
}

#[test]
fn criterion_01_pencil_identity() {
    let mut rng = rng_from_seed(101);
    let mut worst = 0.0f64;
    for k in 0..100 {
        let dim = 2 + k % 7;
        let t = random_triple(dim, &mut rng);
        for _ in 0..20 {
            let z = random_disc_point(1.6, &mut rng);
            let (phi1, phi2) = t.bcl_pair(z);
            let defect = (&(&phi1 * &phi2) - &Matrix::identity(dim).scale(z)).fro_norm();
            let bound = 1e-10 * (1.0 + z.norm());
            assert!(defect <= bound, "pencil product defect {defect:.3e} at |z| = {}", z.norm());
            worst = worst.max(defect / (1.0 + z.norm()));
        }
    }
    println!("criterion 01 pencil identity: PASS (worst scaled defect {worst:.3e})");
}

#[test]
fn criterion_02_fiber_product_law() {
    let mut rng = rng_from_seed(102);
    let grid = GridSpec { radius: 0.9, radii: 2, angles: 6, ..GridSpec::default() };
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    for k in 0..20 {
        let t = random_triple(2 + k % 4, &mut rng);
        let s = bidisc::sample(&t, &grid, k as u64, 1e-9).unwrap();
        for pt in &s.points {
            let defect = (pt.coords[0] * pt.coords[1] - pt.fiber_param).norm();
            assert!(defect <= 1e-8, "product law defect {defect:.3e}");
            worst = worst.max(defect);
            checked += 1;
        }
    }
    println!("criterion 02 fiber product law: PASS ({checked} points, worst {worst:.3e})");
}

#[test]
fn criterion_03_diagonal_fixture() {
    let t = fixtures::diagonal();
    let s = bidisc::sample(&t, &GridSpec::default(), 0, 1e-9).unwrap();
    let mut worst = 0.0f64;
    for pt in &s.points {
        let dev = (pt.coords[0] - pt.coords[1]).norm();
        assert!(dev < 1e-8, "diagonal deviation {dev:.3e}");
        worst = worst.max(dev);
    }
    let b = bidisc::certify(&t, 1e-9).unwrap();
    assert_eq!(b.verdict, Verdict::Distinguished);
    println!("criterion 03 diagonal fixture: PASS (max |z1 - z2| = {worst:.3e}, DISTINGUISHED)");
}

#[test]
fn criterion_04_cusp_parabola() {
    let t = fixtures::neil();
    let grid = GridSpec::default();
    let s = bidisc::sample(&t, &grid, 0, 1e-9).unwrap();
    assert_eq!(grid.points().len(), 193);
    let mut worst = 0.0f64;
    for pt in &s.points {
        let (z1, z2) = (pt.coords[0], pt.coords[1]);
        let dev = (z1 * z1 * z1 - z2 * z2).norm();
        assert!(dev < 1e-7, "cusp relation defect {dev:.3e}");
        worst = worst.max(dev);
    }
    let b = bidisc::certify(&t, 1e-9).unwrap();
    assert_eq!(b.verdict, Verdict::Distinguished);

    let psi = RationalInnerFn::from_triple(&t, 1e-8).unwrap();
    let xi = psi.xi_extract(1e-8).unwrap();
    assert_eq!((xi.deg1(), xi.deg2()), (3, 2));
    let mut coeff_worst = 0.0f64;
    for i in 0..=3 {
        for j in 0..=2 {
            let target = if (i, j) == (3, 0) {
                ONE
            } else if (i, j) == (0, 2) {
                -ONE
            } else {
                ZERO
            };
            let res = (xi.coeffs[i][j] - target).norm();
            assert!(res < 1e-6, "xi coefficient ({i},{j}) residual {res:.3e}");
            coeff_worst = coeff_worst.max(res);
        }
    }
    println!(
        "criterion 04 cusp parabola: PASS (max |z1^3 - z2^2| = {worst:.3e}, \
         xi residual {coeff_worst:.3e}, DISTINGUISHED)"
    );
}

#[test]
fn criterion_05_non_distinguished_fixtures() {
    let b = bidisc::certify(&fixtures::proj_identity(), 1e-9).unwrap();
    assert!(!b.compatibility.compatible, "compatibility must fail for the identity triple");
    assert_eq!(b.verdict, Verdict::NotDistinguished);

    let t = fixtures::block4();
    let s = bidisc::sample(&t, &GridSpec::default(), 0, 1e-9).unwrap();
    let mixed_on_branch = s
        .points
        .iter()
        .filter(|p| p.region == Region::Mixed)
        .filter(|p| (p.coords[1] - ONE).norm() < 1e-6 || (p.coords[0] - ONE).norm() < 1e-6)
        .count();
    assert!(mixed_on_branch > 0, "expected MIXED points on the unimodular branch");
    let b = bidisc::certify(&t, 1e-9).unwrap();
    assert_eq!(b.verdict, Verdict::NotDistinguished);
    println!(
        "criterion 05 non-distinguished fixtures: PASS ({mixed_on_branch} MIXED branch points)"
    );
}

#[test]
fn criterion_06_pencil_to_realization_passage() {
    let mut rng = rng_from_seed(106);
    let grid = GridSpec { radius: 0.8, radii: 2, angles: 6, ..GridSpec::default() };
    let mut accepted = 0usize;
    let mut cross_checked = 0usize;
    let mut worst = 0.0f64;
    while accepted < 50 {
        let t = random_triple(2 + accepted % 3, &mut rng);
        if !bidisc::nonconstancy_check(&t).unwrap().nonconstant {
            continue;
        }
        let Ok(psi) = RationalInnerFn::from_triple(&t, 1e-8) else {
            continue;
        };
        accepted += 1;
        for (k, z) in grid.points().into_iter().enumerate() {
            for pt in bidisc::fiber(&t, z, k as u64, 1e-9).unwrap() {
                let (z1, z2) = (pt.coords[0], pt.coords[1]);
                if z1.norm() < 1.0 && z2.norm() < 1.0 {
                    let m = psi.member(z1, z2, 1e-6).unwrap();
                    assert!(m.defect < 1e-6, "pencil point rejected by realization: {:.3e}", m.defect);
                    worst = worst.max(m.defect);
                    cross_checked += 1;
                }
            }
            if z.norm() < 1.0 {
                for lam in psi.fiber(z).unwrap() {
                    if lam.norm() < 1.0 {
                        let m = bidisc::is_member(&t, z, lam, 1e-6).unwrap();
                        assert!(m.defect < 1e-6, "realization point rejected by pencils: {:.3e}", m.defect);
                        worst = worst.max(m.defect);
                        cross_checked += 1;
                    }
                }
            }
        }
    }
    println!(
        "criterion 06 passage both ways: PASS (50 triples, {cross_checked} cross-memberships, \
         worst defect {worst:.3e})"
    );
}

#[test]
fn criterion_07_numerical_radius_bounds() {
    let mut rng = rng_from_seed(107);
    let mut worst = 0.0f64;
    for k in 0..100 {
        let t = random_triple(2 + k % 4, &mut rng);
        let pu = &t.p_perp() * &t.u;
        let up = &t.u.adjoint() * &t.p;
        for j in 0..32 {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / 32.0;
            let zeta = C64::from_polar(1.0, theta);
            let op = &pu + &up.scale(zeta);
            let nu = numerical_radius(&op, 1e-9).unwrap();
            assert!(nu <= 1.0 + 1e-8, "nu = {nu:.12} exceeds the unit bound");
            worst = worst.max(nu);
        }
    }

    // Closed-form oracle: for the 2x2 nilpotent [[0,2],[0,0]] the real part
    // of e^{i theta} A is [[0, e^{i theta}],[e^{-i theta}, 0]], whose top
    // eigenvalue is 1 for every theta, so nu = 1 exactly.
    let a = Matrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]);
    let mut oracle = 0.0f64;
    for j in 0..2000 {
        let theta = std::f64::consts::PI * j as f64 / 1000.0;
        let w = C64::from_polar(1.0, theta);
        let b01 = (a[(0, 1)] * w + a[(1, 0)].conj() * w.conj()).scale(0.5);
        let (p, q) = (0.0f64, 0.0f64);
        let top = (p + q) / 2.0 + (((p - q) / 2.0).powi(2) + b01.norm_sqr()).sqrt();
        oracle = oracle.max(top);
    }
    let nu = numerical_radius(&a, 1e-9).unwrap();
    assert!((nu - oracle).abs() <= 1e-6, "nu {nu:.9} vs oracle {oracle:.9}");
    assert!((nu - 1.0).abs() <= 1e-6);
    println!(
        "criterion 07 numerical radius bounds: PASS (max nu {worst:.12}, oracle gap {:.3e})",
        (nu - oracle).abs()
    );
}

#[test]
fn criterion_08_realization_contractivity() {
    let mut rng = rng_from_seed(108);
    let mut built = 0usize;
    let mut worst = 0.0f64;
    while built < 30 {
        let t = random_triple(2 + built % 4, &mut rng);
        let Ok(psi) = RationalInnerFn::from_triple(&t, 1e-8) else {
            continue;
        };
        built += 1;
        for _ in 0..20 {
            let z = random_disc_point(0.999, &mut rng);
            let norm = op_norm(&psi.eval(z).unwrap());
            assert!(norm <= 1.0 + 1e-10, "contractivity violated: {norm:.12}");
            worst = worst.max(norm);
        }
    }
    println!("criterion 08 realization contractivity: PASS (max norm {worst:.12})");
}

#[test]
fn criterion_09_canonical_round_trip() {
    let tol = 1e-8;
    let psi = RationalInnerFn::new(fixtures::z2_colligation(), tol).unwrap();
    let nodes = canonical::default_node_count(&psi);
    let ct = canonical::canonical_triple(&psi, nodes, 0, tol).unwrap();
    assert_eq!(ct.dim, 3);
    let back = RationalInnerFn::from_triple(&ct, tol).unwrap();
    let mut rng = rng_from_seed(109);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let z = random_disc_point(0.95, &mut rng);
        let dev = (back.eval(z).unwrap()[(0, 0)] - z * z).norm();
        assert!(dev <= 1e-6, "squaring reconstruction off by {dev:.3e}");
        worst = worst.max(dev);
    }
    let (verdict, _) = canonical::unitary_equivalence(&ct, &fixtures::z2_triple(), 0, tol);
    assert_eq!(verdict, canonical::EquivVerdict::Equivalent);

    let mut round_trip_worst = 0.0f64;
    for (case, (e, h)) in [(0u64, (1usize, 1usize)), (1, (2, 2)), (2, (1, 4)), (3, (3, 2)), (4, (2, 4)), (5, (3, 4))]
        .into_iter()
    {
        let mut block_rng = rng_from_seed(1090 + case);
        let u = random_unitary(e + h, &mut block_rng);
        let col = Colligation::new(
            u.slice(0, e, 0, e),
            u.slice(0, e, e, e + h),
            u.slice(e, e + h, 0, e),
            u.slice(e, e + h, e, e + h),
        )
        .unwrap();
        let psi = RationalInnerFn::new(col, tol).unwrap();
        let ct = canonical::canonical_triple(&psi, canonical::default_node_count(&psi), 0, tol)
            .unwrap();
        let back = RationalInnerFn::from_triple(&ct, tol).unwrap();
        for _ in 0..10 {
            let z = random_disc_point(0.9, &mut rng);
            let dev = (&psi.eval(z).unwrap() - &back.eval(z).unwrap()).fro_norm();
            assert!(dev <= 1e-6, "round trip (e={e}, h={h}) off by {dev:.3e}");
            round_trip_worst = round_trip_worst.max(dev);
        }
    }
    println!(
        "criterion 09 canonical round-trip: PASS (squaring dev {worst:.3e}, EQUIVALENT, \
         random round-trip dev {round_trip_worst:.3e})"
    );
}

#[test]
fn criterion_10_symmetrized_bidisc() {
    let tol = 1e-8;
    let royal = fixtures::diagonal();
    let s = symm::sample_symm(&royal, &symm::symm_grid(), tol).unwrap();
    let mut worst = 0.0f64;
    for pt in &s.points {
        let dev = (pt.s * pt.s - pt.p.scale(4.0)).norm();
        assert!(dev < 1e-8, "royal relation defect {dev:.3e}");
        worst = worst.max(dev);
    }
    assert_eq!(s.verdict, Verdict::Distinguished);
    let nu = symm::nu_certificate(&royal, tol).unwrap();
    assert!((nu.nu - 1.0).abs() <= 1e-6 && !nu.strict, "royal nu should sit at 1");

    let flagged = symm::classify_sp(C64::new(1.5, 0.0), C64::new(0.5, 0.0), 1e-9);
    assert_eq!(flagged, symm::Gamma::TopoBoundary);
    let f_id = fixtures::proj_identity().fundamental_operator();
    let m = symm::wf_member(&f_id, C64::new(1.5, 0.0), C64::new(0.5, 0.0), tol).unwrap();
    assert!(m.member, "the flagged boundary point must lie on the variety");
    let s_id = symm::sample_symm(&fixtures::proj_identity(), &symm::symm_grid(), tol).unwrap();
    assert_eq!(s_id.verdict, Verdict::NotDistinguished);

    let f_pert = fixtures::perturbed_royal().fundamental_operator();
    let mut rng = rng_from_seed(110);
    let mut branch_worst = 0.0f64;
    for _ in 0..10 {
        let z = random_disc_point(0.9, &mut rng);
        let axis = symm::wf_member(&f_pert, ZERO, -z * z, 1e-6).unwrap();
        let royal_branch = symm::wf_member(&f_pert, z.scale(2.0), z * z, 1e-6).unwrap();
        assert!(axis.defect < 1e-6 && royal_branch.defect < 1e-6);
        branch_worst = branch_worst.max(axis.defect.max(royal_branch.defect));
    }

    let lam = C64::new(0.6, 0.0);
    let f_diag = fixtures::diag_lambda(lam).fundamental_operator();
    let mut diag_worst = 0.0f64;
    for _ in 0..10 {
        let p = random_disc_point(0.95, &mut rng);
        let on = symm::wf_member(&f_diag, lam.conj() + lam * p, p, 1e-6).unwrap();
        let axis = symm::wf_member(&f_diag, ZERO, p, 1e-6).unwrap();
        assert!(on.defect < 1e-6 && axis.defect < 1e-6);
        diag_worst = diag_worst.max(on.defect.max(axis.defect));
    }
    println!(
        "criterion 10 symmetrized bidisc: PASS (royal defect {worst:.3e}, branch defect \
         {branch_worst:.3e}, diag defect {diag_worst:.3e})"
    );
}

#[test]
fn criterion_11_representability() {
    let no = symm::representable_2x2(&Matrix::diag(&[C64::new(0.5, 0.0), C64::new(0.1, 0.0)]), 1e-8)
        .unwrap();
    assert_eq!(no, symm::Representability::No);
    let jordan = Matrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
    let und = symm::representable_2x2(&jordan, 1e-8).unwrap();
    assert_eq!(und, symm::Representability::Undetermined);

    let zeta = C64::from_polar(1.0, std::f64::consts::PI / 3.0);
    let mut u = Matrix::zeros(2, 2);
    u[(0, 1)] = zeta;
    u[(1, 0)] = zeta;
    assert!(u.unitarity_defect() <= 1e-12);
    let p1 = Matrix::diag(&[ONE, ZERO]);
    let p1_perp = &Matrix::identity(2) - &p1;
    let rebuilt = &(&p1 * &u) + &(&u.adjoint() * &p1_perp);
    let dev = (&rebuilt - &jordan).fro_norm();
    assert!(dev <= 1e-12, "decomposition identity defect {dev:.3e}");
    println!("criterion 11 representability: PASS (identity defect {dev:.3e})");
}

#[test]
fn criterion_12_polydisc_tuples() {
    let shift = |n: usize| {
        let mut s = Matrix::zeros(n, n);
        for j in 0..n {
            s[((j + 1) % n, j)] = ONE;
        }
        s
    };
    let proj = |n: usize, idx: &[usize]| {
        let mut p = Matrix::zeros(n, n);
        for &i in idx {
            p[(i, i)] = ONE;
        }
        p
    };
    let s3 = shift(3);
    let cyclic = ModelTuple::new(
        vec![proj(3, &[0]); 3],
        vec![s3.clone(), s3.clone(), s3],
    )
    .unwrap();
    let s4 = shift(4);
    let tower = polydisc::split_second_pencil(
        &ModelTriple::new(proj(4, &[0]), s4.clone()).unwrap(),
        &proj(4, &[1]),
        &(&s4 * &s4),
    )
    .unwrap();
    let combined = ModelTuple::new(
        (0..3).map(|i| cyclic.ps[i].direct_sum(&tower.ps[i])).collect(),
        (0..3).map(|i| cyclic.us[i].direct_sum(&tower.us[i])).collect(),
    )
    .unwrap();

    let grid = GridSpec { radius: 0.9, radii: 2, angles: 8, ..GridSpec::default() };
    let mut product_worst = 0.0f64;
    let mut reflect_worst = 0.0f64;
    for (name, tuple) in [("cyclic", &cyclic), ("tower", &tower), ("combined", &combined)] {
        let purity = tuple.purity_defect();
        assert!(purity <= 1e-10, "{name}: purity defect {purity:.3e}");
        for (k, z) in grid.points().into_iter().enumerate() {
            let fibers = polydisc::tuple_fiber(tuple, z, k as u64 + 1, 1e-9).unwrap();
            assert_eq!(fibers.len(), tuple.dim, "{name}: fiber cardinality");
            for coords in &fibers {
                let prod: C64 = coords.iter().product();
                let defect = (prod - z).norm();
                assert!(defect <= 1e-8, "{name}: product law defect {defect:.3e}");
                product_worst = product_worst.max(defect);
                if coords.iter().all(|c| c.norm() > 1e-8) {
                    let reflected: Vec<C64> = coords.iter().map(|c| c.conj().inv()).collect();
                    let m = polydisc::is_member_poly(tuple, &reflected, 1e-6).unwrap();
                    assert!(m.defect < 1e-6, "{name}: reflection defect {:.3e}", m.defect);
                    reflect_worst = reflect_worst.max(m.defect);
                }
            }
        }
    }
    println!(
        "criterion 12 polydisc tuples: PASS (product defect {product_worst:.3e}, reflection \
         defect {reflect_worst:.3e})"
    );
}

#[test]
fn criterion_13_symmetry_suite() {
    let grid = GridSpec { radii: 4, angles: 12, ..GridSpec::default() };
    let fixtures_list: Vec<(&str, ModelTriple)> = vec![
        ("diagonal", fixtures::diagonal()),
        ("cusp", fixtures::neil()),
        ("squaring", fixtures::z2_triple()),
        ("perturbed", fixtures::perturbed_royal()),
    ];
    let mut distinguished = 0usize;
    let mut checked = 0usize;
    for (name, t) in &fixtures_list {
        let b = bidisc::certify(t, 1e-9).unwrap();
        if b.verdict != Verdict::Distinguished {
            continue;
        }
        distinguished += 1;
        let s = bidisc::sample(t, &grid, 0, 1e-9).unwrap();
        let report = bidisc::symmetry_check(t, &s.points, 1e-6).unwrap();
        assert!(
            report.failures.is_empty(),
            "{name}: {} reflected points rejected",
            report.failures.len()
        );
        checked += report.checked;
    }
    assert!(distinguished >= 3, "expected at least three distinguished fixtures");
    println!(
        "criterion 13 symmetry suite: PASS ({distinguished} fixtures, {checked} reflections)"
    );
}

#[test]
fn criterion_14_essential_symmetry() {
    let mut coeffs = vec![vec![ZERO; 3]; 3];
    coeffs[2][1] = ONE;
    coeffs[1][0] = -ONE;
    coeffs[1][2] = -ONE;
    coeffs[0][1] = ONE;
    let wave = BivariatePoly::new(coeffs).unwrap();
    let (ok, c) = inner::essential_symmetry_check(&wave, 1e-9);
    assert!(ok, "the reflected product polynomial must pass");
    let c = c.unwrap();
    assert!((c.norm() - 1.0).abs() <= 1e-9);

    let mut coeffs = vec![vec![ZERO; 1]; 2];
    coeffs[1][0] = ONE;
    coeffs[0][0] = C64::new(-2.0, 0.0);
    let off = BivariatePoly::new(coeffs).unwrap();
    let (ok, _) = inner::essential_symmetry_check(&off, 1e-9);
    assert!(!ok, "z1 - 2 must fail");
    println!("criterion 14 essential symmetry: PASS (c = {:.3} + {:.3}i)", c.re, c.im);
}
