//! Correlation functions, expectation and the number variance of the
//! determinantal process restricted to balls.
//!
//! The variance is computed by two routes that are proved equal for
//! homogeneous projection kernels and implemented independently here:
//!
//!  * the lunule identity  var = ∫ |K(x,o)|²·λ(B_R ∖ B_R(x)-complement
//!    crescent) dλ(x), reduced radially to ∫ k(r)²·lunule(r,R)·σ(r) dr;
//!  * the direct double integral over B_R × (S ∖ B_R).
//!
//! Their agreement measures quadrature error, not modelling error.

use crate::error::{Error, Result};
use crate::exec::pairwise_sum;
use crate::geometry::{Point, SpaceKind};
use crate::kernels::RadialKernel;
use crate::policy::NumericPolicy;
use crate::quad::{integrate_adaptive, integrate_fixed};
use num_complex::Complex;
use std::f64::consts::PI;

/// A drawn configuration: finitely many distinct points inside B_R.
#[derive(Debug, Clone)]
pub struct Configuration {
    pub points: Vec<Point>,
    pub region_radius: f64,
}

/// n-point correlation ρ_n = det [K(x_i, x_j)], n ≤ 12.
///
/// The minor of a Hermitian kernel is real; imaginary leakage beyond the
/// policy tolerance indicates a broken kernel implementation.
pub fn correlation_rho_n(
    kernel: &RadialKernel,
    points: &[Point],
    policy: &NumericPolicy,
) -> Result<f64> {
    let n = points.len();
    if n == 0 || n > 12 {
        return Err(Error::Domain(format!(
            "correlation order must be between 1 and 12, got {n}"
        )));
    }
    let mut m = vec![Complex::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = kernel.complex_eval(&points[i], &points[j]);
        }
    }
    let det = det_with_pivoting(&mut m, n);
    let scale = kernel.koo().powi(n as i32).max(det.re.abs());
    if det.im.abs() > policy.rho_imag_tol * scale.max(1e-300) {
        return Err(Error::KernelImplementation(format!(
            "correlation determinant has imaginary residue {:.3e} (scale {:.3e})",
            det.im, scale
        )));
    }
    Ok(det.re)
}

/// Gaussian elimination with partial pivoting on a small complex matrix.
fn det_with_pivoting(m: &mut [Complex<f64>], n: usize) -> Complex<f64> {
    let mut det = Complex::new(1.0, 0.0);
    for col in 0..n {
        let mut pivot = col;
        let mut best = m[col * n + col].norm();
        for row in (col + 1)..n {
            let v = m[row * n + col].norm();
            if v > best {
                best = v;
                pivot = row;
            }
        }
        if best == 0.0 {
            return Complex::new(0.0, 0.0);
        }
        if pivot != col {
            for k in 0..n {
                m.swap(col * n + k, pivot * n + k);
            }
            det = -det;
        }
        let d = m[col * n + col];
        det *= d;
        for row in (col + 1)..n {
            let factor = m[row * n + col] / d;
            for k in col..n {
                let sub = factor * m[col * n + k];
                m[row * n + k] -= sub;
            }
        }
    }
    det
}

/// E[Ξ(B_R)] = K(o,o)·λ(B_R).
pub fn expectation(kernel: &RadialKernel, radius: f64) -> f64 {
    kernel.koo() * kernel.model().ball_volume(radius)
}

/// Independent route to the expectation: the trace ∫_{B_R} K(x,x) dλ(x)
/// evaluated by product quadrature over the ball (vertex sum on trees),
/// reading the diagonal through the complex evaluator rather than koo.
pub fn expectation_trace_quadrature(kernel: &RadialKernel, radius: f64) -> f64 {
    match kernel.model().kind() {
        SpaceKind::PoincareDisk => {
            let n_ang = 64usize;
            let g = |r: f64| {
                let mut ring = Vec::with_capacity(n_ang);
                for a in 0..n_ang {
                    let th = 2.0 * PI * (a as f64) / (n_ang as f64);
                    let p = Point::Disk(Complex::from_polar((r / 2.0).tanh(), th));
                    ring.push(kernel.complex_eval(&p, &p).re);
                }
                r.sinh() * pairwise_sum(&ring) * (2.0 * PI / n_ang as f64)
            };
            let n_rad = ((8.0 * radius).ceil() as usize).clamp(16, 200);
            integrate_fixed(&g, 0.0, radius, n_rad)
        }
        SpaceKind::RegularTree { q } => {
            let diag: Vec<f64> = tree_ball_points(q, radius)
                .iter()
                .map(|p| kernel.complex_eval(p, p).re)
                .collect();
            pairwise_sum(&diag)
        }
    }
}

fn tree_ball_points(q: u32, radius: f64) -> Vec<Point> {
    crate::geometry::tree_ball_words(q, radius.floor() as i64)
        .into_iter()
        .map(Point::TreeWord)
        .collect()
}

/// var(Ξ(B_R)) through the lunule identity.
pub fn variance_lunule(kernel: &RadialKernel, radius: f64, policy: &NumericPolicy) -> Result<f64> {
    if !(radius > 0.0) {
        return Ok(0.0);
    }
    let model = *kernel.model();
    match model.kind() {
        SpaceKind::PoincareDisk => {
            let cut = kernel
                .tail_cutoff(policy.tail_mass_rel)?
                .max(2.0 * radius + 1.0);
            let f = |r: f64| {
                let k = kernel.radial_modulus(r);
                k * k * model.lunule_volume(r, radius, policy) * model.sphere_area(r)
            };
            // the crescent measure kinks at r = R and saturates at r = 2R
            integrate_adaptive(
                &f,
                0.0,
                cut,
                &[radius, 2.0 * radius],
                policy.quad_abs_tol * expectation(kernel, radius).max(1.0),
            )
        }
        SpaceKind::RegularTree { q } => {
            let coeffs = kernel.tree_mass_coeffs()?;
            let r_int = radius.floor() as i64;
            let terms: Vec<f64> = coeffs
                .iter()
                .enumerate()
                .map(|(r, c2)| c2 * crate::geometry::tree_lunule(q, r as i64, r_int))
                .collect();
            Ok(pairwise_sum(&terms))
        }
    }
}

/// var(Ξ(B_R)) through the direct double integral over B_R × (S ∖ B_R).
pub fn variance_direct(kernel: &RadialKernel, radius: f64, policy: &NumericPolicy) -> Result<f64> {
    if !(radius > 0.0) {
        return Ok(0.0);
    }
    let model = *kernel.model();
    match model.kind() {
        SpaceKind::PoincareDisk => {
            let cut = kernel
                .tail_cutoff(policy.tail_mass_rel)?
                .max(2.0 * radius + 1.0);
            // inner integral around an outer point at distance r from o:
            // ∫ k(ρ)²·sinh ρ·(exterior angle of the ρ-circle) dρ
            let inner = |r: f64| -> Result<f64> {
                let f = |rho: f64| {
                    let k = kernel.radial_modulus(rho);
                    k * k
                        * rho.sinh()
                        * crate::geometry::disk_exterior_angle(r, rho, radius)
                };
                let mut breaks = Vec::new();
                for p in [radius - r, radius + r] {
                    if p > 0.0 && p < cut {
                        breaks.push(p);
                    }
                }
                integrate_adaptive(
                    &f,
                    0.0,
                    cut,
                    &breaks,
                    0.1 * policy.quad_abs_tol * kernel.koo().max(1e-300),
                )
            };
            // outer product rule over B_R; the inner integral is rotation
            // invariant, so each radial shell is evaluated once and carries
            // its full angular weight 2π·sinh r
            let n_rad = ((12.0 + 10.0 * radius).ceil() as usize).min(220);
            let (xs, ws) = crate::quad::gauss_legendre(n_rad);
            let mut shells = Vec::with_capacity(n_rad);
            for (x, w) in xs.iter().zip(ws.iter()) {
                let r = 0.5 * radius * (x + 1.0);
                let wr = 0.5 * radius * w * r.sinh() * 2.0 * PI;
                shells.push(wr * inner(r)?);
            }
            Ok(pairwise_sum(&shells))
        }
        SpaceKind::RegularTree { q } => {
            let coeffs = kernel.tree_mass_coeffs()?;
            let window = coeffs.len().saturating_sub(1);
            let r_int = radius.floor() as i64;
            let qf = f64::from(q);
            // outer sum over depth classes s of vertices a in B_R; inner sum
            // over vertices b outside B_R grouped by the climb/branch split
            // (u, m) relative to a: the count of such b is
            // first(u)·(q−1)^(m−1), and dividing by the sphere size s(j)
            // hidden in k(j)² leaves the overflow-free ratio first/(q(q−1)^u).
            let mut outer_terms = Vec::new();
            for s in 0..=r_int {
                let mut inner_terms = Vec::new();
                for u in 0..=(s as usize) {
                    let w_depth = s as usize - u;
                    for m in 1..=window.saturating_sub(u) {
                        let j = u + m;
                        let depth = w_depth + m;
                        if depth as i64 <= r_int {
                            continue;
                        }
                        let first = if u == 0 {
                            if s >= 1 {
                                qf - 1.0
                            } else {
                                qf
                            }
                        } else if w_depth == 0 {
                            qf - 1.0
                        } else {
                            qf - 2.0
                        };
                        if first <= 0.0 || j > window {
                            continue;
                        }
                        inner_terms.push(coeffs[j] * first / (qf * (qf - 1.0).powi(u as i32)));
                    }
                }
                outer_terms
                    .push(crate::geometry::tree_sphere(q, s as f64) * pairwise_sum(&inner_terms));
            }
            Ok(pairwise_sum(&outer_terms))
        }
    }
}
