//! Poincaré disk with curvature −1.
//!
//! Distance: d(z,w) = arccosh(1 + 2|z−w|²/((1−|z|²)(1−|w|²))).
//! Measure: dλ = sinh ρ dρ dθ in geodesic polar coordinates, so
//! σ(r) = 2π sinh r and λ(B_R) = 4π sinh²(R/2).

use super::{ContainmentReport, Point};
use crate::error::Result;
use crate::exec;
use crate::quad::integrate_adaptive;
use num_complex::Complex;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub fn dist(z: Complex<f64>, w: Complex<f64>) -> f64 {
    let dz2 = (z - w).norm_sqr();
    let denom = (1.0 - z.norm_sqr()) * (1.0 - w.norm_sqr());
    let g = 2.0 * dz2 / denom;
    if g < 5.0e-13 {
        // arccosh(1+g) cancels below d ~ 1e-6; first-order form is exact there
        2.0 * dz2.sqrt() / denom.sqrt()
    } else {
        (1.0 + g).acosh()
    }
}

/// Möbius translation sending a to the origin.
pub fn to_origin(a: Complex<f64>, z: Complex<f64>) -> Complex<f64> {
    (z - a) / (Complex::new(1.0, 0.0) - a.conj() * z)
}

/// Inverse of `to_origin`.
pub fn from_origin(a: Complex<f64>, u: Complex<f64>) -> Complex<f64> {
    (u + a) / (Complex::new(1.0, 0.0) + a.conj() * u)
}

pub fn geodesic_point(x: Complex<f64>, y: Complex<f64>, t: f64) -> Result<Point> {
    let u = to_origin(x, y);
    let norm = u.norm();
    if norm < 1e-300 {
        return Ok(Point::Disk(x));
    }
    let dir = u / norm;
    let p = from_origin(x, dir * (t / 2.0).tanh());
    Point::disk(p)
}

pub fn ball_volume(radius: f64) -> f64 {
    let s = (radius / 2.0).sinh();
    4.0 * PI * s * s
}

pub fn sphere_area(r: f64) -> f64 {
    2.0 * PI * r.sinh()
}

/// Angular measure (in radians, out of 2π) of the circle of geodesic radius
/// ρ around a point at distance r from o that lies outside B_R(o).
///
/// By the hyperbolic law of cosines, a circle point at angle θ from the
/// direction toward o has cosh d(o,·) = cosh r cosh ρ − sinh r sinh ρ cos θ.
pub fn exterior_angle(r: f64, rho: f64, big_r: f64) -> f64 {
    if rho <= 0.0 || r <= 0.0 {
        // degenerate circle: outside iff the center is
        return if r > big_r { 2.0 * PI } else { 0.0 };
    }
    let t = (r.cosh() * rho.cosh() - big_r.cosh()) / (r.sinh() * rho.sinh());
    if t >= 1.0 {
        2.0 * PI
    } else if t <= -1.0 {
        0.0
    } else {
        2.0 * (PI - t.acos())
    }
}

/// λ(B_R(x) ∖ B_R(o)) for d(o,x) = r, by radial integration around x with
/// law-of-cosines angular limits.
pub fn lunule_volume(r: f64, big_r: f64, abs_tol: f64) -> f64 {
    if big_r <= 0.0 || r <= 0.0 {
        return 0.0;
    }
    if r >= 2.0 * big_r {
        return ball_volume(big_r);
    }
    let f = |rho: f64| rho.sinh() * exterior_angle(r, rho, big_r);
    // integrand kinks where the circle around x first meets / fully exits B_R
    let kink = (big_r - r).abs();
    let breaks = if kink > 0.0 && kink < big_r {
        vec![kink]
    } else {
        Vec::new()
    };
    integrate_adaptive(&f, 0.0, big_r, &breaks, abs_tol)
        .expect("lunule integrand is bounded; adaptive quadrature cannot stall")
}

fn uniform_in_ball(radius: f64, rng: &mut ChaCha8Rng) -> Complex<f64> {
    // radial CDF on the disk: F(r) = (cosh r − 1)/(cosh S − 1)
    let u: f64 = rng.gen();
    let r = (1.0 + u * (radius.cosh() - 1.0)).acosh();
    let theta: f64 = rng.gen::<f64>() * 2.0 * PI;
    Complex::from_polar((r / 2.0).tanh(), theta)
}

/// Translate a point drawn uniformly in B_radius(0) to be uniform in
/// B_radius(center); Möbius maps preserve λ.
fn uniform_in_ball_around(
    center: Complex<f64>,
    radius: f64,
    rng: &mut ChaCha8Rng,
) -> Complex<f64> {
    from_origin(center, uniform_in_ball(radius, rng))
}

struct Side {
    start: Complex<f64>,
    dir: Complex<f64>,
    len: f64,
}

impl Side {
    fn new(a: Complex<f64>, b: Complex<f64>) -> Self {
        let u = to_origin(a, b);
        let norm = u.norm();
        let dir = if norm < 1e-300 {
            Complex::new(1.0, 0.0)
        } else {
            u / norm
        };
        Side {
            start: a,
            dir,
            len: dist(a, b),
        }
    }

    fn at(&self, s: f64) -> Complex<f64> {
        from_origin(self.start, self.dir * (s / 2.0).tanh())
    }

    /// min_s d(p, γ(s)); the distance to a point is convex along a geodesic,
    /// so golden-section search converges.
    fn min_dist_to(&self, p: Complex<f64>) -> f64 {
        let g = |s: f64| dist(p, self.at(s));
        let inv_phi = 0.618_033_988_749_894_9;
        let (mut a, mut b) = (0.0, self.len);
        let mut c = b - inv_phi * (b - a);
        let mut d = a + inv_phi * (b - a);
        let (mut fc, mut fd) = (g(c), g(d));
        for _ in 0..70 {
            if b - a < 1e-10 {
                break;
            }
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = g(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = g(d);
            }
        }
        g(0.5 * (a + b)).min(g(0.0)).min(g(self.len))
    }
}

/// Empirical δ: max over sampled triangles and discretized p ∈ [x,y] of the
/// distance from p to the union of the two other sides.
pub fn delta_estimate(n_triangles: usize, sample_radius: f64, seed: u64, step: f64) -> f64 {
    let per_triangle = exec::map_indexed(n_triangles, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let x = uniform_in_ball(sample_radius, &mut rng);
        let y = uniform_in_ball(sample_radius, &mut rng);
        let z = uniform_in_ball(sample_radius, &mut rng);
        let base = Side::new(x, y);
        let s1 = Side::new(x, z);
        let s2 = Side::new(y, z);
        let n_steps = (base.len / step).ceil().max(1.0) as usize;
        let mut worst: f64 = 0.0;
        for k in 0..=n_steps {
            let s = base.len * (k as f64) / (n_steps as f64);
            let p = base.at(s);
            let d = s1.min_dist_to(p).min(s2.min_dist_to(p));
            worst = worst.max(d);
        }
        worst
    });
    per_triangle.into_iter().fold(0.0, f64::max)
}

pub fn containment_check(delta: f64, n_trials: usize, radius: f64, seed: u64) -> ContainmentReport {
    const MAX_REJECTS: usize = 64;
    let per_trial = exec::map_indexed(n_trials, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let x = uniform_in_ball(radius, &mut rng);
        let y = uniform_in_ball_around(x, radius, &mut rng);
        // keep pairs whose balls can intersect; y uniform in B_R(x) ensures it
        let r = dist(x, y);
        let p = match geodesic_point(x, y, r / 2.0) {
            Ok(Point::Disk(p)) => p,
            _ => x,
        };
        let bound = radius - r / 2.0 + 2.0 * delta;
        for _ in 0..MAX_REJECTS {
            let z = uniform_in_ball_around(x, radius, &mut rng);
            if dist(z, y) < radius {
                let excess = dist(p, z) - bound;
                return (1u64, if excess > 1e-9 { 1u64 } else { 0 }, excess);
            }
        }
        (0, 0, f64::NEG_INFINITY)
    });
    let mut report = ContainmentReport {
        violations: 0,
        max_excess: f64::NEG_INFINITY,
        trials_with_point: 0,
    };
    for (found, viol, excess) in per_trial {
        report.trials_with_point += found;
        report.violations += viol;
        if excess > report.max_excess {
            report.max_excess = excess;
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dist_from_origin_is_two_artanh() {
        let d = dist(Complex::new(0.0, 0.0), Complex::new(0.5, 0.0));
        assert!((d - 2.0 * 0.5f64.atanh()).abs() < 1e-14);
    }

    #[test]
    fn dist_small_separation_first_order() {
        let z = Complex::new(0.3, 0.2);
        let w = z + Complex::new(1e-9, -2e-9);
        let d = dist(z, w);
        // metric factor 2/(1-|z|^2)
        let expected = 2.0 * (z - w).norm() / (1.0 - z.norm_sqr());
        assert!((d - expected).abs() / expected < 1e-6);
        assert!(d > 0.0);
    }

    #[test]
    fn ball_volume_closed_form() {
        let r: f64 = 1.0;
        let v = ball_volume(r);
        assert!((v - 2.0 * PI * (r.cosh() - 1.0)).abs() < 1e-12);
        assert!((v - 3.412_276_265_284_902).abs() < 1e-10);
    }

    #[test]
    fn lunule_saturates_and_vanishes() {
        let tol = 1e-9;
        assert_eq!(lunule_volume(0.0, 2.0, tol), 0.0);
        let sat = lunule_volume(4.5, 2.0, tol);
        assert!((sat - ball_volume(2.0)).abs() < 1e-12);
    }

    #[test]
    fn geodesic_midpoint_on_axis() {
        let x = Complex::new(0.0, 0.0);
        let y = Complex::new(0.8, 0.0);
        let d = dist(x, y);
        let p = geodesic_point(x, y, d / 2.0).unwrap().as_disk();
        assert!((p.re - (d / 4.0).tanh()).abs() < 1e-12);
        assert!(p.im.abs() < 1e-15);
    }
}
