//! The certificate constant and the ratio sweep.

mod common;

use hyperdpp_core::bounds::{bound_constant, ratio_sweep};
use hyperdpp_core::geometry::{GrowthProfile, SpaceModel};
use hyperdpp_core::kernels::{bergman_kernel, tree_spectral_kernel};
use hyperdpp_core::NumericPolicy;

fn disk_profile() -> GrowthProfile {
    SpaceModel::poincare_disk()
        .fit_growth_profile((1.0 + 2f64.sqrt()).ln(), 1.0, 10.0, 0.25)
        .unwrap()
}

fn tree_profile() -> GrowthProfile {
    GrowthProfile::new(3.03, 2f64.ln(), 0.0, (0.0, 10.0)).unwrap()
}

#[test]
fn onset_radius_kills_the_integrand() {
    // at r = r₀ = 4(δ + ln c/α) the factor 1 − e^{−α(r/2 − 2δ − 2 ln c/α)}
    // vanishes identically
    let p = disk_profile();
    let shift = 2.0 * p.delta + 2.0 * p.c.ln() / p.alpha;
    let at_onset = 1.0 - (-p.alpha * (p.onset_radius() / 2.0 - shift)).exp();
    assert!(at_onset.abs() < 1e-14);
}

#[test]
fn disk_constant_fixture_and_midpoint_oracle() {
    let policy = NumericPolicy::default();
    let kernel = bergman_kernel(0.0).unwrap();
    let profile = disk_profile();
    let c = bound_constant(&kernel, &profile, &policy).unwrap();
    assert!(!c.degenerate);
    assert!((c.onset_radius - 8.143_852_007_205_481).abs() < 1e-12);
    // frozen from a 20-digit independent evaluation; the library's
    // integration budget for C is ~1e-11 absolute
    assert!(
        common::rel_err(c.value, 3.846_748_050_736_607e-5) < 1e-6,
        "C = {}",
        c.value
    );

    // independent midpoint-rule integration at high resolution
    let r0 = c.onset_radius;
    let cut = 60.0;
    let n = 2_000_000usize;
    let h = (cut - r0) / n as f64;
    let shift = 2.0 * profile.delta + 2.0 * profile.c.ln() / profile.alpha;
    let mut acc = 0.0;
    for i in 0..n {
        let r = r0 + (i as f64 + 0.5) * h;
        let k = kernel.radial_modulus(r);
        acc += k * k
            * (1.0 - (-profile.alpha * (r / 2.0 - shift)).exp())
            * kernel.model().sphere_area(r);
    }
    let oracle = acc * h / (profile.c * profile.c * kernel.koo());
    assert!(
        common::rel_err(c.value, oracle) < 1e-6,
        "C {} vs midpoint {oracle}",
        c.value
    );
}

#[test]
fn tree_constant_positive_and_consistent() {
    let policy = NumericPolicy::default();
    let kernel = tree_spectral_kernel(3, (-1.0, 1.0), 2048, &policy).unwrap();
    let profile = tree_profile();
    let c = bound_constant(&kernel, &profile, &policy).unwrap();
    assert!(!c.degenerate);
    assert!(c.value > 0.0 && c.value <= 1.0);
    // independent numpy evaluation at window 1200 gave 0.0096628; window
    // tails move the value by well under a relative 1e-2
    assert!(common::rel_err(c.value, 9.662_8e-3) < 1e-2, "C = {}", c.value);
}

#[test]
fn identity_kernel_gives_degenerate_zero_constant() {
    // k(r) = 0 beyond r = 0 < r₀: the certificate is vacuous
    let policy = NumericPolicy::default();
    let edge = 2.0 * 2f64.sqrt();
    let identity = tree_spectral_kernel(3, (-edge, edge), 16, &policy).unwrap();
    let c = bound_constant(&identity, &tree_profile(), &policy).unwrap();
    assert_eq!(c.value, 0.0);
    assert!(c.degenerate);
}

#[test]
fn constant_monotone_nonincreasing_in_c_and_delta() {
    let policy = NumericPolicy::default();
    let kernel = bergman_kernel(0.0).unwrap();
    let base = disk_profile();
    let mut prev = f64::INFINITY;
    for scale in [1.0, 1.5, 2.25] {
        let p = GrowthProfile::new(base.c * scale, base.alpha, base.delta, base.valid_range)
            .unwrap();
        let c = bound_constant(&kernel, &p, &policy).unwrap().value;
        assert!(c <= prev + 1e-15, "C must not increase with c");
        prev = c;
    }
    prev = f64::INFINITY;
    for delta in [base.delta, base.delta + 0.4, base.delta + 0.9] {
        let p = GrowthProfile::new(base.c, base.alpha, delta, base.valid_range).unwrap();
        let c = bound_constant(&kernel, &p, &policy).unwrap().value;
        assert!(c <= prev + 1e-15, "C must not increase with delta");
        prev = c;
    }
}

#[test]
fn disk_sweep_passes_at_every_radius() {
    let policy = NumericPolicy::default();
    let kernel = bergman_kernel(0.0).unwrap();
    let radii: Vec<f64> = (1..=8).map(|r| r as f64).collect();
    let report = ratio_sweep(&kernel, &disk_profile(), &radii, None, &policy).unwrap();
    assert!(report.all_pass, "{report:#?}");
    for r in &report.reports {
        assert!(r.ratio >= 0.0 && r.ratio <= 1.0);
        assert!(r.ratio >= report.constant.value);
        assert!(r.error.is_none());
        // the two variance routes agree inside the sweep as well
        assert!((r.variance_lunule - r.variance_direct).abs()
            <= policy.route_agreement_rel_disk * r.variance_direct);
    }
    // ratio monotonicity is not asserted (not claimed); only reported
}

#[test]
fn tree_sweep_passes_at_every_radius() {
    let policy = NumericPolicy::default();
    let kernel = tree_spectral_kernel(3, (-1.0, 1.0), 2048, &policy).unwrap();
    let radii: Vec<f64> = (2..=8).map(|r| r as f64).collect();
    let report = ratio_sweep(&kernel, &tree_profile(), &radii, None, &policy).unwrap();
    assert!(report.all_pass);
    for r in &report.reports {
        assert!(r.ratio >= report.constant.value && r.ratio <= 1.0);
    }
}

#[test]
fn sweep_rejects_radii_outside_validity() {
    let policy = NumericPolicy::default();
    let kernel = bergman_kernel(0.0).unwrap();
    assert!(ratio_sweep(&kernel, &disk_profile(), &[0.5], None, &policy).is_err());
    assert!(ratio_sweep(&kernel, &disk_profile(), &[11.0], None, &policy).is_err());
}
