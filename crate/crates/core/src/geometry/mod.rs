//! Metric-measure structure of the two model spaces: the Poincaré disk with
//! curvature −1 and the q-regular tree with counting measure.
//!
//! Everything downstream (kernels, variance, bounds) only touches the space
//! through distances, geodesics, ball/sphere/lunule measures, and the two
//! geometric certificates: the hyperbolicity constant δ and the exponential
//! growth profile (c, α).

pub(crate) mod disk;
pub(crate) mod tree;

pub use tree::tree_ball_words;

/// Sphere size of the q-regular tree at integer radius r.
pub fn tree_sphere(q: u32, r: f64) -> f64 {
    tree::sphere_count(q, r)
}

/// Lunule count of the q-regular tree: #{v : d(x,v) <= R, d(o,v) > R} for
/// d(o,x) = r.
pub fn tree_lunule(q: u32, r: i64, big_r: i64) -> f64 {
    tree::lunule_count(q, r, big_r)
}

/// Angular measure (radians) of the circle of radius rho around a point at
/// distance r from the base point that lies outside B_R(o).
pub fn disk_exterior_angle(r: f64, rho: f64, big_r: f64) -> f64 {
    disk::exterior_angle(r, rho, big_r)
}

use crate::error::{Error, Result};
use crate::policy::NumericPolicy;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

/// Coordinates with |z| closer to the unit circle than this are rejected:
/// 1 − |z|² underflows catastrophically beyond it.
pub const DISK_BOUNDARY_GUARD: f64 = 1e-12;

/// Which homogeneous space a model instantiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceKind {
    /// Poincaré disk, curvature −1: length element 2|dz|/(1−|z|²), area
    /// density 4/(1−|z|²)² against planar Lebesgue measure.
    PoincareDisk,
    /// q-regular tree with the counting measure; radii are floored to
    /// integers and balls include their boundary sphere.
    RegularTree { q: u32 },
}

/// A concrete homogeneous space (S, d, λ, o).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceModel {
    kind: SpaceKind,
}

/// A location in a space model: disk coordinate or non-backtracking edge
/// word from the tree root (first label in 0..q, later labels in 0..q−1).
#[derive(Debug, Clone, PartialEq)]
pub enum Point {
    Disk(Complex<f64>),
    TreeWord(Vec<u8>),
}

impl Point {
    /// Disk point from a complex coordinate; rejects |z| ≥ 1 − guard.
    pub fn disk(z: Complex<f64>) -> Result<Self> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::Domain("disk coordinate must be finite".into()));
        }
        if z.norm() >= 1.0 - DISK_BOUNDARY_GUARD {
            return Err(Error::Domain(format!(
                "disk coordinate |z| = {} too close to the boundary",
                z.norm()
            )));
        }
        Ok(Point::Disk(z))
    }

    pub fn disk_xy(re: f64, im: f64) -> Result<Self> {
        Self::disk(Complex::new(re, im))
    }

    /// The tree root (empty word).
    pub fn tree_root() -> Self {
        Point::TreeWord(Vec::new())
    }

    /// Canonical tree word: a₁ ∈ 0..q, aᵢ ∈ 0..q−1 for i ≥ 2.
    pub fn tree_word(q: u32, labels: &[u8]) -> Result<Self> {
        for (i, &a) in labels.iter().enumerate() {
            let limit = if i == 0 { q } else { q - 1 };
            if u32::from(a) >= limit {
                return Err(Error::Validation(format!(
                    "tree word label {a} at position {i} out of range 0..{limit}"
                )));
            }
        }
        Ok(Point::TreeWord(labels.to_vec()))
    }

    pub fn as_disk(&self) -> Complex<f64> {
        match self {
            Point::Disk(z) => *z,
            Point::TreeWord(_) => panic!("tree point used where a disk point was required"),
        }
    }

    pub fn as_tree_word(&self) -> &[u8] {
        match self {
            Point::TreeWord(w) => w,
            Point::Disk(_) => panic!("disk point used where a tree point was required"),
        }
    }
}

/// Exponential-growth certificate: c⁻¹e^{αR} ≤ λ(B_R) ≤ c·e^{αR} on the
/// validity range, together with the hyperbolicity constant δ it was fitted
/// alongside.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GrowthProfile {
    pub c: f64,
    pub alpha: f64,
    pub delta: f64,
    pub valid_range: (f64, f64),
}

impl GrowthProfile {
    pub fn new(c: f64, alpha: f64, delta: f64, valid_range: (f64, f64)) -> Result<Self> {
        if !(c > 0.0) || !(alpha > 0.0) || !(delta >= 0.0) {
            return Err(Error::Validation(format!(
                "growth profile requires c > 0, alpha > 0, delta >= 0 (got c={c}, alpha={alpha}, delta={delta})"
            )));
        }
        if !(valid_range.0 <= valid_range.1) {
            return Err(Error::Validation("empty validity range".into()));
        }
        Ok(Self {
            c,
            alpha,
            delta,
            valid_range,
        })
    }

    /// Onset radius 4(δ + ln c / α) past which the lunule lower bound bites.
    pub fn onset_radius(&self) -> f64 {
        4.0 * (self.delta + self.c.ln() / self.alpha)
    }

    /// Largest violation of the two-sided growth bound on an n-point grid
    /// over the validity range (≤ 0 means the certificate holds).
    pub fn max_violation_on_grid(&self, model: &SpaceModel, n_points: usize) -> f64 {
        let (lo, hi) = self.valid_range;
        let n = n_points.max(2);
        let mut worst = f64::NEG_INFINITY;
        for i in 0..n {
            let r = lo + (hi - lo) * (i as f64) / ((n - 1) as f64);
            let vol = model.ball_volume(r);
            let e = (self.alpha * r).exp();
            let lower = e / self.c - vol;
            let upper = vol - self.c * e;
            worst = worst.max(lower).max(upper);
        }
        worst
    }
}

/// Outcome of the ball-containment probe for Prop-style midpoint bounds.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ContainmentReport {
    /// Number of sampled points that escaped B(p, R − r/2 + 2δ) (+1/2 on trees).
    pub violations: u64,
    /// Largest observed d(p,z) − bound; −∞ when no intersection point was found.
    pub max_excess: f64,
    /// Trials in which rejection sampling produced a point of the intersection.
    pub trials_with_point: u64,
}

impl SpaceModel {
    pub fn poincare_disk() -> Self {
        Self {
            kind: SpaceKind::PoincareDisk,
        }
    }

    /// q-regular tree; rejects q < 3 (q = 2 is the line, whose balls grow
    /// linearly, not exponentially).
    pub fn regular_tree(q: u32) -> Result<Self> {
        if q < 3 {
            return Err(Error::Validation(format!(
                "regular tree requires degree q >= 3, got {q}"
            )));
        }
        Ok(Self {
            kind: SpaceKind::RegularTree { q },
        })
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn is_tree(&self) -> bool {
        matches!(self.kind, SpaceKind::RegularTree { .. })
    }

    pub fn tree_degree(&self) -> Option<u32> {
        match self.kind {
            SpaceKind::RegularTree { q } => Some(q),
            SpaceKind::PoincareDisk => None,
        }
    }

    /// The base point o: disk center or tree root.
    pub fn base_point(&self) -> Point {
        match self.kind {
            SpaceKind::PoincareDisk => Point::Disk(Complex::new(0.0, 0.0)),
            SpaceKind::RegularTree { .. } => Point::tree_root(),
        }
    }

    /// Geodesic distance d(x, y).
    pub fn dist(&self, x: &Point, y: &Point) -> f64 {
        match self.kind {
            SpaceKind::PoincareDisk => disk::dist(x.as_disk(), y.as_disk()),
            SpaceKind::RegularTree { .. } => tree::dist(x.as_tree_word(), y.as_tree_word()),
        }
    }

    /// Point at arclength t along the geodesic from x to y.
    ///
    /// On trees t is rounded to the nearest path vertex, ties toward x.
    pub fn geodesic_point(&self, x: &Point, y: &Point, t: f64) -> Result<Point> {
        let d = self.dist(x, y);
        if !((-1e-12..=d + 1e-12).contains(&t)) {
            return Err(Error::Domain(format!(
                "geodesic parameter t = {t} outside [0, {d}]"
            )));
        }
        match self.kind {
            SpaceKind::PoincareDisk => disk::geodesic_point(x.as_disk(), y.as_disk(), t.clamp(0.0, d)),
            SpaceKind::RegularTree { .. } => Ok(Point::TreeWord(tree::geodesic_vertex(
                x.as_tree_word(),
                y.as_tree_word(),
                t,
            ))),
        }
    }

    /// λ(B_R): 4π sinh²(R/2) on the disk, vertex count on the tree.
    pub fn ball_volume(&self, radius: f64) -> f64 {
        match self.kind {
            SpaceKind::PoincareDisk => disk::ball_volume(radius),
            SpaceKind::RegularTree { q } => tree::ball_volume(q, radius),
        }
    }

    /// Sphere measure: σ(r) = 2π sinh r on the disk, layer count on the tree.
    pub fn sphere_area(&self, r: f64) -> f64 {
        match self.kind {
            SpaceKind::PoincareDisk => disk::sphere_area(r),
            SpaceKind::RegularTree { q } => tree::sphere_count(q, r),
        }
    }

    /// λ(B_R(x) ∖ B_R(o)) for any x at distance r from the base point.
    pub fn lunule_volume(&self, r: f64, radius: f64, policy: &NumericPolicy) -> f64 {
        match self.kind {
            SpaceKind::PoincareDisk => disk::lunule_volume(r, radius, policy.lunule_abs_tol),
            SpaceKind::RegularTree { q } => {
                tree::lunule_count(q, r.floor() as i64, radius.floor() as i64) as f64
            }
        }
    }

    /// Empirical lower estimate of the hyperbolicity constant δ from
    /// `n_triangles` random geodesic triangles inside B_{sample_radius}.
    pub fn delta_estimate(
        &self,
        n_triangles: usize,
        sample_radius: f64,
        seed: u64,
        policy: &NumericPolicy,
    ) -> f64 {
        match self.kind {
            SpaceKind::PoincareDisk => {
                disk::delta_estimate(n_triangles, sample_radius, seed, policy.delta_probe_step)
            }
            SpaceKind::RegularTree { q } => {
                tree::delta_estimate(q, n_triangles, sample_radius, seed)
            }
        }
    }

    /// Fit an exponential growth profile on [r_min, r_max]: α is analytic
    /// per model, c is the grid maximum of both volume ratios inflated by 1%.
    pub fn fit_growth_profile(
        &self,
        delta: f64,
        r_min: f64,
        r_max: f64,
        grid_step: f64,
    ) -> Result<GrowthProfile> {
        if !(r_min < r_max) {
            return Err(Error::Domain(format!(
                "growth fit needs r_min < r_max, got [{r_min}, {r_max}]"
            )));
        }
        if !(grid_step > 0.0) {
            return Err(Error::Domain("grid_step must be positive".into()));
        }
        let alpha = match self.kind {
            SpaceKind::PoincareDisk => {
                if r_min <= 0.0 {
                    return Err(Error::Domain(
                        "disk growth fit requires r_min > 0: the ball volume vanishes at 0, \
                         so no finite c exists"
                            .into(),
                    ));
                }
                1.0
            }
            SpaceKind::RegularTree { q } => {
                if r_min < 0.0 {
                    return Err(Error::Domain("tree radii must be nonnegative".into()));
                }
                f64::from(q - 1).ln()
            }
        };
        let mut c_grid: f64 = 0.0;
        let mut r = r_min;
        loop {
            let vol = self.ball_volume(r);
            let e = (alpha * r).exp();
            c_grid = c_grid.max(vol / e).max(e / vol);
            if r >= r_max {
                break;
            }
            r = (r + grid_step).min(r_max);
        }
        if !c_grid.is_finite() {
            return Err(Error::Domain(
                "no finite growth constant on the requested range".into(),
            ));
        }
        GrowthProfile::new(c_grid * 1.01, alpha, delta, (r_min, r_max))
    }

    /// Sample pairs (x, y) in B_R and intersection points z, and test the
    /// midpoint containment B(x,R) ∩ B(y,R) ⊂ B(p, R − r/2 + 2δ), with +1/2
    /// slack on trees for the vertex-rounded midpoint.
    pub fn containment_check(
        &self,
        delta: f64,
        n_trials: usize,
        radius: f64,
        seed: u64,
    ) -> ContainmentReport {
        match self.kind {
            SpaceKind::PoincareDisk => disk::containment_check(delta, n_trials, radius, seed),
            SpaceKind::RegularTree { q } => {
                tree::containment_check(q, delta, n_trials, radius, seed)
            }
        }
    }
}
