//! Invariants of the shipped kernels and the projection verifier.

mod common;

use hyperdpp_core::geometry::{Point, SpaceModel};
use hyperdpp_core::kernels::{
    bergman_kernel, custom_radial_kernel, km_band_mass, tree_spectral_kernel, verify_projection,
};
use hyperdpp_core::operator::QuadratureSpec;
use hyperdpp_core::{Error, NumericPolicy};
use num_complex::Complex;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_disk_pair(rng: &mut ChaCha8Rng) -> (Point, Point) {
    let mut draw = |rng: &mut ChaCha8Rng| {
        let r: f64 = rng.gen::<f64>().sqrt() * 0.93;
        let th: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
        Point::disk(Complex::from_polar(r, th)).unwrap()
    };
    (draw(rng), draw(rng))
}

#[test]
fn bergman_modulus_matches_profile_on_random_pairs() {
    let model = SpaceModel::poincare_disk();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for alpha in [0.0, 1.0, 2.0] {
        let kernel = bergman_kernel(alpha).unwrap();
        for _ in 0..10_000 {
            let (x, y) = random_disk_pair(&mut rng);
            let modulus = kernel.complex_eval(&x, &y).norm();
            let profile = kernel.radial_modulus(model.dist(&x, &y));
            assert!(
                common::rel_err(modulus, profile) < 1e-10,
                "alpha={alpha}: {modulus} vs {profile}"
            );
        }
    }
}

#[test]
fn bergman_modulus_invariant_under_mobius_translation() {
    // |K(T_a x, T_a y)| = |K(x, y)| for the disk translation
    // T_a(z) = (z + a)/(1 + conj(a)·z)
    let kernel = bergman_kernel(0.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..10_000 {
        let (x, y) = random_disk_pair(&mut rng);
        let a = Complex::from_polar(rng.gen::<f64>() * 0.6, rng.gen::<f64>() * std::f64::consts::TAU);
        let translate = |z: Complex<f64>| (z + a) / (Complex::new(1.0, 0.0) + a.conj() * z);
        let tx = Point::disk(translate(x.as_disk())).unwrap();
        let ty = Point::disk(translate(y.as_disk())).unwrap();
        let before = kernel.complex_eval(&x, &y).norm();
        let after = kernel.complex_eval(&tx, &ty).norm();
        assert!((before - after).abs() <= 1e-9 * kernel.koo());
    }
}

#[test]
fn bergman_reproducing_mass_is_koo() {
    let policy = NumericPolicy::default();
    for alpha in [0.0, 1.0, 2.0] {
        let kernel = bergman_kernel(alpha).unwrap();
        let mass = kernel.reproducing_mass(&policy).unwrap();
        let analytic = (alpha + 1.0) / (4.0 * std::f64::consts::PI);
        assert!(
            common::rel_err(mass, analytic) < 1e-6,
            "alpha={alpha}: {mass} vs {analytic}"
        );
        assert!(common::rel_err(kernel.koo(), analytic) < 1e-15);
        assert_eq!(kernel.radial_modulus(0.0), kernel.koo());
    }
}

#[test]
fn tree_fixture_koo_and_values_match_independent_quadrature() {
    // frozen 20-digit values from an independent arbitrary-precision
    // evaluation of the Kesten-McKay integrals for q = 3, band [-1, 1]
    let policy = NumericPolicy::default();
    let kernel = tree_spectral_kernel(3, (-1.0, 1.0), 2048, &policy).unwrap();
    assert!((kernel.koo() - 0.305_187_096_569_155_6).abs() < 1e-13);
    assert!((kernel.radial_modulus(2.0) - 0.135_408_559_267_356_48).abs() < 1e-12);
    assert!((kernel.radial_modulus(4.0) - 0.048_815_865_447_302_69).abs() < 1e-12);
    assert!((kernel.radial_modulus(6.0) - 0.012_592_276_124_250_37).abs() < 1e-12);
    // symmetric band: odd-distance values vanish by parity
    for r in [1.0, 3.0, 5.0, 7.0] {
        assert!(kernel.radial_modulus(r).abs() < 1e-13, "r={r}");
    }
    // Kesten-McKay symmetry: the half spectrum carries exactly half the mass
    let edge = 2.0 * 2f64.sqrt();
    assert!((km_band_mass(3, (0.0, edge)) - 0.5).abs() < 1e-13);
}

#[test]
fn tree_fixture_mass_and_bound() {
    let policy = NumericPolicy::default();
    let kernel = tree_spectral_kernel(3, (-1.0, 1.0), 2048, &policy).unwrap();
    let mass = kernel.reproducing_mass(&policy).unwrap();
    assert!(common::rel_err(mass, kernel.koo()) < policy.reproducing_mass_rel_tree);
    // Cauchy-Schwarz against the band mass: |c_r| ≤ sqrt(koo) forces
    // |k(r)| ≤ sqrt(koo / s(r))
    for r in 0..=40usize {
        let bound = (kernel.koo() / hyperdpp_core::geometry::tree_sphere(3, r as f64)).sqrt();
        assert!(
            kernel.radial_modulus(r as f64) <= bound + 1e-12,
            "r={r}: {} > {bound}",
            kernel.radial_modulus(r as f64)
        );
    }
    assert!(kernel.window_defect() < policy.reproducing_mass_rel_tree * kernel.koo());
}

#[test]
fn tree_window_auto_extends_and_caps() {
    let policy = NumericPolicy::default();
    let kernel = tree_spectral_kernel(3, (-1.0, 1.0), 16, &policy).unwrap();
    // auto-extension must land on the same defect bound as a generous hint
    assert!(kernel.window_defect() < policy.reproducing_mass_rel_tree * kernel.koo());

    let mut tight = NumericPolicy::default();
    tight.max_tree_window = 64;
    match tree_spectral_kernel(3, (-1.0, 1.0), 16, &tight) {
        Err(Error::WindowTooSmall { suggested, .. }) => assert!(suggested > 64),
        other => panic!("expected window-too-small, got {other:?}"),
    }
}

#[test]
fn custom_kernel_validation_lists_offending_entries() {
    let model = SpaceModel::poincare_disk();
    let koo = 1.0 / (4.0 * std::f64::consts::PI);
    // monotone-decaying profile accepted
    let knots: Vec<(f64, f64)> = (0..=300)
        .map(|i| {
            let r = i as f64 * 0.1;
            (r, koo * (-r).exp())
        })
        .collect();
    let k = custom_radial_kernel(model, koo, &knots).unwrap();
    assert!(!k.projection_verified());

    // k(5) above k(0) rejected with the entry named
    let bad = vec![(0.0, koo), (5.0, koo * 1.5)];
    match custom_radial_kernel(model, koo, &bad) {
        Err(Error::Validation(msg)) => assert!(msg.contains("exceeds"), "{msg}"),
        other => panic!("expected validation error, got {other:?}"),
    }

    // negative value rejected
    let neg = vec![(0.0, koo), (2.0, -0.1 * koo)];
    assert!(custom_radial_kernel(model, koo, &neg).is_err());
}

#[test]
fn verify_projection_bergman_on_test_ball() {
    let policy = NumericPolicy::default();
    for alpha in [0.0, 1.0, 2.0] {
        let kernel = bergman_kernel(alpha).unwrap();
        let report =
            verify_projection(&kernel, 3.0, &QuadratureSpec::auto(), &policy).unwrap();
        assert!(report.pass, "alpha={alpha}: {report:?}");
        assert!(report.min_eig >= -policy.eig_tol_disk);
        assert!(report.max_eig <= 1.0 + policy.eig_tol_disk);
        assert!(report.max_eig < 1.0, "restricted projector contracts");
        assert!(report.cs_residual == 0.0);
        assert!(
            report.reproducing_residual < 1e-5 * kernel.koo(),
            "alpha={alpha}: residual {}",
            report.reproducing_residual
        );
    }
}

#[test]
fn verify_projection_identity_kernel_on_tree() {
    let policy = NumericPolicy::default();
    let edge = 2.0 * 2f64.sqrt();
    let kernel = tree_spectral_kernel(3, (-edge, edge), 16, &policy).unwrap();
    let report = verify_projection(&kernel, 3.0, &QuadratureSpec::auto(), &policy).unwrap();
    assert!(report.pass);
    assert!((report.min_eig - 1.0).abs() < 1e-9, "identity has all eigenvalues 1");
    assert!((report.max_eig - 1.0).abs() < 1e-9);
}

#[test]
fn verify_projection_tree_band_fixture() {
    let policy = NumericPolicy::default();
    let kernel = tree_spectral_kernel(3, (-1.0, 1.0), 2048, &policy).unwrap();
    let report = verify_projection(&kernel, 4.0, &QuadratureSpec::auto(), &policy).unwrap();
    assert!(report.pass, "{report:?}");
    assert!(report.min_eig >= -policy.eig_tol_tree);
    assert!(report.max_eig <= 1.0 + policy.eig_tol_tree);
    assert!(report.reproducing_residual < 5e-3 * kernel.koo());
}

#[test]
fn verify_projection_rejects_scaled_kernel() {
    // 1.5·K is Hermitian and radial but no projection: top eigenvalue ≈ 1.5
    let policy = NumericPolicy::default();
    let base = bergman_kernel(0.0).unwrap();
    let koo = 1.5 * base.koo();
    let knots: Vec<(f64, f64)> = (0..=600)
        .map(|i| {
            let r = i as f64 * 0.05;
            (r, 1.5 * base.radial_modulus(r))
        })
        .collect();
    let scaled = custom_radial_kernel(SpaceModel::poincare_disk(), koo, &knots).unwrap();
    let report = verify_projection(&scaled, 3.0, &QuadratureSpec::auto(), &policy).unwrap();
    assert!(!report.pass);
    assert!(report.max_eig > 1.2, "max eigenvalue {}", report.max_eig);
}

#[test]
fn custom_sech_profile_tracks_bergman() {
    // a densely tabulated sech²(r/2) profile reproduces the analytic
    // bergman(0) modulus to interpolation accuracy
    let base = bergman_kernel(0.0).unwrap();
    let knots: Vec<(f64, f64)> = (0..=3000)
        .map(|i| {
            let r = i as f64 * 0.01;
            (r, base.radial_modulus(r))
        })
        .collect();
    let custom = custom_radial_kernel(SpaceModel::poincare_disk(), base.koo(), &knots).unwrap();
    for i in 0..200 {
        let r = 0.015 + i as f64 * 0.11;
        assert!(
            (custom.radial_modulus(r) - base.radial_modulus(r)).abs() < 2e-5 * base.koo(),
            "r={r}"
        );
    }
}

#[test]
fn degenerate_and_invalid_bands() {
    let policy = NumericPolicy::default();
    assert!(matches!(
        tree_spectral_kernel(3, (0.25, 0.25), 32, &policy),
        Err(Error::DegenerateKernel(_))
    ));
    assert!(tree_spectral_kernel(3, (-9.0, 1.0), 32, &policy).is_err());
    assert!(bergman_kernel(-0.5).is_err());
}
