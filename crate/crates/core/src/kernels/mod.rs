//! Projection correlation kernels in radial (homogeneous) form.
//!
//! A kernel is shipped as a radial modulus profile k(r) = |K(x,y)| at
//! distance r together with a complex evaluator for off-diagonal phases.
//! Legality is the operator condition 0 ≤ K ≤ I, checked by discretizing on
//! a test ball and examining the spectrum.

mod bergman;
mod tree_spectral;

pub use tree_spectral::km_band_mass;

use crate::error::{Error, Result};
use crate::geometry::{Point, SpaceKind, SpaceModel};
use crate::operator;
use crate::policy::NumericPolicy;
use crate::quad::{integrate_adaptive, integrate_fixed};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone)]
pub(crate) enum KernelKind {
    /// Weighted Bergman kernel on the disk, gauge-transformed so the
    /// reference measure is the invariant area measure.
    Bergman { alpha: f64 },
    /// Spectral projection of the adjacency operator of the q-regular tree
    /// onto a band, evaluated through the radial orthogonal-polynomial
    /// recursion against the spectral measure at the root.
    TreeSpectral {
        band: (f64, f64),
        /// k(r) for r = 0..=window.
        values: Vec<f64>,
        /// c_r = k(r)·sqrt(s(r)); the square-summable coefficients used by
        /// all mass and variance sums (immune to sphere-size overflow).
        coeffs: Vec<f64>,
        /// Mass left outside the window: koo − Σ c_r².
        window_defect: f64,
    },
    /// User-supplied radial profile, piecewise linear between knots, zero
    /// beyond the last knot. Positive gauge: the complex evaluator is k∘d.
    Custom { knots: Vec<(f64, f64)> },
}

/// A projection kernel on a concrete space, in radial form.
#[derive(Debug, Clone)]
pub struct RadialKernel {
    model: SpaceModel,
    koo: f64,
    kind: KernelKind,
    label: String,
    projection_verified: bool,
}

impl RadialKernel {
    pub fn model(&self) -> &SpaceModel {
        &self.model
    }

    /// K(o,o), the constant diagonal value.
    pub fn koo(&self) -> f64 {
        self.koo
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Whether the projection property has been certified (analytically for
    /// the shipped families, or by `verify_projection` for custom tables).
    pub fn projection_verified(&self) -> bool {
        self.projection_verified
    }

    pub fn mark_projection_verified(&mut self) {
        self.projection_verified = true;
    }

    /// Radial modulus k(r) = |K(x,y)| at distance r.
    pub fn radial_modulus(&self, r: f64) -> f64 {
        match &self.kind {
            KernelKind::Bergman { alpha } => {
                self.koo / (r / 2.0).cosh().powf(alpha + 2.0)
            }
            KernelKind::TreeSpectral { values, .. } => {
                let idx = r.floor();
                if idx < 0.0 {
                    return 0.0;
                }
                values.get(idx as usize).copied().unwrap_or(0.0).abs()
            }
            KernelKind::Custom { knots } => custom_interp(knots, r).abs(),
        }
    }

    /// Signed/complex kernel value K(x, y).
    pub fn complex_eval(&self, x: &Point, y: &Point) -> Complex<f64> {
        match &self.kind {
            KernelKind::Bergman { alpha } => bergman::eval(*alpha, x.as_disk(), y.as_disk()),
            KernelKind::TreeSpectral { values, .. } => {
                let d = self.model.dist(x, y);
                let v = values.get(d.floor() as usize).copied().unwrap_or(0.0);
                Complex::new(v, 0.0)
            }
            KernelKind::Custom { knots } => {
                let d = self.model.dist(x, y);
                Complex::new(custom_interp(knots, d), 0.0)
            }
        }
    }

    /// Radius beyond which the radial mass tail is certified below
    /// `tail_rel`·koo, i.e. ∫_{cut}^∞ k²σ ≤ tail_rel·koo.
    pub fn tail_cutoff(&self, tail_rel: f64) -> Result<f64> {
        match &self.kind {
            KernelKind::Bergman { alpha } => {
                // k²σ ≤ koo²·π·2^(2α+4)·e^(−(α+1)r)
                let a = *alpha;
                let envelope = self.koo * std::f64::consts::PI * 2f64.powf(2.0 * a + 4.0);
                let cut = (envelope / ((a + 1.0) * tail_rel)).ln() / (a + 1.0);
                Ok(cut.max(1.0))
            }
            KernelKind::TreeSpectral { values, .. } => Ok(values.len() as f64),
            KernelKind::Custom { knots } => Ok(knots.last().map_or(0.0, |k| k.0)),
        }
    }

    /// The square-summable radial coefficients c_r² = k(r)²·s(r) of a tree
    /// kernel (exact up to the window defect reported at construction).
    pub fn tree_mass_coeffs(&self) -> Result<Vec<f64>> {
        match &self.kind {
            KernelKind::TreeSpectral { coeffs, .. } => {
                Ok(coeffs.iter().map(|c| c * c).collect())
            }
            KernelKind::Custom { knots } => {
                let q = self.model.tree_degree().ok_or_else(|| {
                    Error::Domain("tree coefficients requested from a disk kernel".into())
                })?;
                let last = knots.last().map_or(0.0, |k| k.0).floor() as usize;
                Ok((0..=last)
                    .map(|r| {
                        let k = custom_interp(knots, r as f64);
                        k * k * crate::geometry::tree_sphere(q, r as f64)
                    })
                    .collect())
            }
            KernelKind::Bergman { .. } => Err(Error::Domain(
                "tree coefficients requested from a disk kernel".into(),
            )),
        }
    }

    /// Spectral band of a tree spectral kernel.
    pub fn tree_band(&self) -> Option<(f64, f64)> {
        match &self.kind {
            KernelKind::TreeSpectral { band, .. } => Some(*band),
            _ => None,
        }
    }

    /// Window defect of a tree spectral kernel (0 for other kinds).
    pub fn window_defect(&self) -> f64 {
        match &self.kind {
            KernelKind::TreeSpectral { window_defect, .. } => *window_defect,
            _ => 0.0,
        }
    }

    /// ∫ k(r)² σ(r) dr (disk) or Σ k(r)² s(r) (tree); equals K(o,o) for a
    /// genuine projection kernel.
    pub fn reproducing_mass(&self, policy: &NumericPolicy) -> Result<f64> {
        match self.model.kind() {
            SpaceKind::PoincareDisk => {
                let cut = self.tail_cutoff(policy.tail_mass_rel)?;
                let f = |r: f64| {
                    let k = self.radial_modulus(r);
                    k * k * self.model.sphere_area(r)
                };
                integrate_adaptive(&f, 0.0, cut, &[], policy.quad_abs_tol * self.koo.max(1.0))
            }
            SpaceKind::RegularTree { .. } => {
                Ok(crate::exec::pairwise_sum(&self.tree_mass_coeffs()?))
            }
        }
    }
}

fn custom_interp(knots: &[(f64, f64)], r: f64) -> f64 {
    if knots.is_empty() || r < 0.0 {
        return 0.0;
    }
    if r <= knots[0].0 {
        return knots[0].1;
    }
    match knots.binary_search_by(|k| k.0.partial_cmp(&r).unwrap()) {
        Ok(i) => knots[i].1,
        Err(i) => {
            if i >= knots.len() {
                0.0
            } else {
                let (r0, k0) = knots[i - 1];
                let (r1, k1) = knots[i];
                k0 + (k1 - k0) * (r - r0) / (r1 - r0)
            }
        }
    }
}

/// Weighted Bergman projection kernel of parameter α ≥ 0 on the disk, in
/// the invariant gauge: K(o,o) = (α+1)/(4π), k(r) = K(o,o)·sech^{α+2}(r/2).
pub fn bergman_kernel(alpha: f64) -> Result<RadialKernel> {
    if !(alpha >= 0.0) {
        return Err(Error::Domain(format!(
            "bergman kernel requires alpha >= 0, got {alpha}"
        )));
    }
    Ok(RadialKernel {
        model: SpaceModel::poincare_disk(),
        koo: (alpha + 1.0) / (4.0 * std::f64::consts::PI),
        kind: KernelKind::Bergman { alpha },
        label: format!("bergman(alpha={alpha})"),
        projection_verified: true,
    })
}

/// Spectral-band projection kernel on the q-regular tree.
///
/// The radial profile is the band projection of the adjacency operator,
/// evaluated exactly through its spectral measure at the root; `window` is
/// the minimum radial extent of the profile, auto-extended until the mass
/// outside the window drops below the policy tolerance.
pub fn tree_spectral_kernel(
    q: u32,
    band: (f64, f64),
    window: usize,
    policy: &NumericPolicy,
) -> Result<RadialKernel> {
    tree_spectral::build(q, band, window, policy)
}

/// Kernel from a user-supplied radial profile table.
///
/// Flagged unverified until `verify_projection` passes on it.
pub fn custom_radial_kernel(
    model: SpaceModel,
    koo: f64,
    knots: &[(f64, f64)],
) -> Result<RadialKernel> {
    if !(koo > 0.0) {
        return Err(Error::Validation("custom kernel requires koo > 0".into()));
    }
    if knots.is_empty() {
        return Err(Error::Validation("custom kernel table is empty".into()));
    }
    let mut bad = Vec::new();
    for w in knots.windows(2) {
        if !(w[1].0 > w[0].0) {
            bad.push(format!("knots not strictly increasing at r = {}", w[1].0));
        }
    }
    if (knots[0].0).abs() > 1e-12 {
        bad.push(format!("first knot must sit at r = 0, got {}", knots[0].0));
    }
    if (knots[0].1 - koo).abs() > 1e-9 * koo {
        bad.push(format!("k(0) = {} does not equal koo = {koo}", knots[0].1));
    }
    for &(r, k) in knots {
        if k < 0.0 {
            bad.push(format!("negative profile value k({r}) = {k}"));
        }
        if k > koo * (1.0 + 1e-12) {
            bad.push(format!("k({r}) = {k} exceeds k(0) = {koo}"));
        }
    }
    if !bad.is_empty() {
        return Err(Error::Validation(bad.join("; ")));
    }
    Ok(RadialKernel {
        model,
        koo,
        kind: KernelKind::Custom {
            knots: knots.to_vec(),
        },
        label: format!("custom({} knots)", knots.len()),
        projection_verified: false,
    })
}

/// Spectrum and consistency report for a discretized kernel operator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProjectionReport {
    pub min_eig: f64,
    pub max_eig: f64,
    /// max over test pairs of |∫ K(x,y)K(y,z) dλ(y) − K(x,z)|.
    pub reproducing_residual: f64,
    /// max over the radial grid of (k(r) − k(0))₊.
    pub cs_residual: f64,
    pub hermiticity_residual: f64,
    pub n_nodes: usize,
    /// Eigenvalue containment −tol ≤ min, max ≤ 1 + tol at the model's tol.
    pub pass: bool,
}

/// Discretize the kernel operator on B_{r_test} and report its eigenvalue
/// range together with reproducing-property and Cauchy–Schwarz residuals.
pub fn verify_projection(
    kernel: &RadialKernel,
    r_test: f64,
    grid: &operator::QuadratureSpec,
    policy: &NumericPolicy,
) -> Result<ProjectionReport> {
    let raw = operator::build_raw(kernel, r_test, grid)?;
    if raw.hermiticity_residual > policy.hermiticity_tol * kernel.koo().max(1e-300) {
        return Err(Error::KernelImplementation(format!(
            "discretized operator is not Hermitian: residual {:.3e}",
            raw.hermiticity_residual
        )));
    }
    let min_eig = raw.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_eig = raw
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);

    // Cauchy–Schwarz: |K(x,y)|² ≤ K(x,x)K(y,y) forces k(r) ≤ k(0)
    let mut cs_residual = 0.0f64;
    let r_hi = kernel.tail_cutoff(policy.tail_mass_rel)?.max(r_test);
    for i in 0..=400 {
        let r = r_hi * (i as f64) / 400.0;
        cs_residual = cs_residual.max(kernel.radial_modulus(r) - kernel.koo());
    }
    let cs_residual = cs_residual.max(0.0);

    let reproducing_residual = reproducing_residual(kernel, r_test, policy)?;

    let tol = match kernel.model().kind() {
        SpaceKind::PoincareDisk => policy.eig_tol_disk,
        SpaceKind::RegularTree { .. } => policy.eig_tol_tree,
    };
    let pass = min_eig >= -tol && max_eig <= 1.0 + tol;
    Ok(ProjectionReport {
        min_eig,
        max_eig,
        reproducing_residual,
        cs_residual,
        hermiticity_residual: raw.hermiticity_residual,
        n_nodes: raw.nodes.len(),
        pass,
    })
}

/// max over a few deterministic pairs (x, z) of
/// |∫_{B_L} K(x,y)K(y,z) dλ(y) − K(x,z)|, L large enough that the tail is
/// below the certified mass budget.
fn reproducing_residual(kernel: &RadialKernel, r_test: f64, policy: &NumericPolicy) -> Result<f64> {
    match kernel.model().kind() {
        SpaceKind::PoincareDisk => {
            let cut = kernel.tail_cutoff(policy.tail_mass_rel)?;
            let big_l = cut + r_test;
            let pts = [
                Point::disk_xy(0.0, 0.0)?,
                Point::Disk(Complex::from_polar((r_test / 6.0).tanh(), 0.0)),
                Point::Disk(Complex::from_polar((0.3 * r_test).tanh(), 1.1)),
            ];
            // polar product rule around the origin
            let n_rad = (10.0 * big_l).ceil() as usize;
            let n_ang = 240usize;
            let mut worst = 0.0f64;
            for x in &pts {
                for z in &pts {
                    let integral = polar_integral_2d(big_l, n_rad, n_ang, |y| {
                        (kernel.complex_eval(x, &y) * kernel.complex_eval(&y, z)).re
                    });
                    let target = kernel.complex_eval(x, z).re;
                    worst = worst.max((integral - target).abs());
                }
            }
            Ok(worst)
        }
        SpaceKind::RegularTree { q } => {
            // pairs (o, x_D): group y by (d(x,y), d(o,y)) with exact counts;
            // the band kernel is signed, so values come from the evaluator
            let coeffs_len = kernel.tree_mass_coeffs()?.len();
            let w = coeffs_len.saturating_sub(1);
            let root = Point::tree_root();
            let signed: Vec<f64> = (0..=w)
                .map(|r| {
                    let ray = Point::TreeWord(vec![0u8; r]);
                    kernel.complex_eval(&root, &ray).re
                })
                .collect();
            let mut worst = 0.0f64;
            for depth in [0usize, 1, 2, 3] {
                let mut terms = Vec::new();
                for j in 0..=w {
                    for (t, ln_count) in tree_pair_classes(q, depth, j, w) {
                        let (kj, kt) = (signed[j], signed[t]);
                        if kj == 0.0 || kt == 0.0 {
                            continue;
                        }
                        // k(j)·k(t)·N(j,t) with the count in log space
                        let sign = kj.signum() * kt.signum();
                        let mag = kj.abs().ln() + kt.abs().ln() + ln_count;
                        terms.push(sign * mag.exp());
                    }
                }
                let sum = crate::exec::pairwise_sum(&terms);
                let target = signed[depth.min(w)];
                worst = worst.max((sum - target).abs());
            }
            Ok(worst)
        }
    }
}

/// For x at depth D in the q-regular tree, the classes of vertices y with
/// d(x,y) = j: returns (t = d(o,y), ln #class) for each nonempty class.
fn tree_pair_classes(q: u32, depth: usize, j: usize, max_t: usize) -> Vec<(usize, f64)> {
    let qf = f64::from(q);
    let mut out = Vec::new();
    for u in 0..=depth.min(j) {
        let m = j - u;
        let w_depth = depth - u;
        let t = w_depth + m;
        if t > max_t {
            continue;
        }
        let ln_count = if m == 0 {
            if u == j {
                0.0 // y is the ancestor itself
            } else {
                continue;
            }
        } else {
            let first = if u == 0 {
                if depth >= 1 {
                    qf - 1.0
                } else {
                    qf
                }
            } else if w_depth == 0 {
                qf - 1.0
            } else {
                qf - 2.0
            };
            if first <= 0.0 {
                continue;
            }
            first.ln() + (m as f64 - 1.0) * (qf - 1.0).ln()
        };
        out.push((t, ln_count));
    }
    out
}

/// Product-rule integral of f over B_L on the disk in geodesic polar
/// coordinates: Gauss–Legendre radially with weight sinh r, uniform
/// trapezoid in angle.
fn polar_integral_2d<F: Fn(Point) -> f64>(big_l: f64, n_rad: usize, n_ang: usize, f: F) -> f64 {
    let g = |r: f64| {
        let mut acc = Vec::with_capacity(n_ang);
        for a in 0..n_ang {
            let th = 2.0 * std::f64::consts::PI * (a as f64) / (n_ang as f64);
            let z = Complex::from_polar((r / 2.0).tanh(), th);
            acc.push(f(Point::Disk(z)));
        }
        r.sinh() * crate::exec::pairwise_sum(&acc) * (2.0 * std::f64::consts::PI / n_ang as f64)
    };
    integrate_fixed(&g, 0.0, big_l, n_rad.clamp(16, 400))
}
