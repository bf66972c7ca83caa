//! q-regular tree with counting measure.
//!
//! Vertices are canonical non-backtracking edge words from the root. All
//! radii are floored to integers and balls are closed (they include the
//! boundary sphere), which is the natural convention for integer distances.

use super::ContainmentReport;
use crate::exec;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn dist(x: &[u8], y: &[u8]) -> f64 {
    let lcp = x
        .iter()
        .zip(y.iter())
        .take_while(|(a, b)| a == b)
        .count();
    (x.len() + y.len() - 2 * lcp) as f64
}

/// Vertices of the geodesic path from x to y, in order.
pub fn path_words(x: &[u8], y: &[u8]) -> Vec<Vec<u8>> {
    let lcp = x
        .iter()
        .zip(y.iter())
        .take_while(|(a, b)| a == b)
        .count();
    let mut path = Vec::with_capacity(x.len() + y.len() - 2 * lcp + 1);
    for keep in (lcp..=x.len()).rev() {
        path.push(x[..keep].to_vec());
    }
    for keep in (lcp + 1)..=y.len() {
        path.push(y[..keep].to_vec());
    }
    path
}

/// Path vertex nearest to arclength t, ties rounded toward x.
pub fn geodesic_vertex(x: &[u8], y: &[u8], t: f64) -> Vec<u8> {
    let path = path_words(x, y);
    let idx = (t - 0.5).ceil().max(0.0) as usize;
    path[idx.min(path.len() - 1)].clone()
}

pub fn sphere_count(q: u32, r: f64) -> f64 {
    let r = r.floor();
    if r < 0.0 {
        return 0.0;
    }
    if r == 0.0 {
        1.0
    } else {
        f64::from(q) * f64::from(q - 1).powi(r as i32 - 1)
    }
}

pub fn ball_volume(q: u32, radius: f64) -> f64 {
    let r = radius.floor();
    if r < 0.0 {
        return 0.0;
    }
    1.0 + f64::from(q) * (f64::from(q - 1).powi(r as i32) - 1.0) / f64::from(q - 2)
}

/// #{v : d(x,v) ≤ R, d(o,v) > R} for d(o,x) = r, by classifying v through
/// the deepest common ancestor of v and x: climb u edges, branch down m.
pub fn lunule_count(q: u32, r: i64, big_r: i64) -> f64 {
    if r <= 0 || big_r < 0 {
        return 0.0;
    }
    let q = i64::from(q);
    let mut total = 0.0f64;
    for u in 0..=r {
        let ancestor_depth = r - u;
        if u <= big_r && ancestor_depth > big_r {
            total += 1.0; // v is the ancestor itself
        }
        let mut m = 1;
        while u + m <= big_r {
            let depth = ancestor_depth + m;
            if depth > big_r {
                let first = if u == 0 {
                    if r >= 1 {
                        q - 1
                    } else {
                        q
                    }
                } else if ancestor_depth == 0 {
                    q - 1
                } else {
                    q - 2
                };
                total += first as f64 * (q as f64 - 1.0).powi(m as i32 - 1);
            }
            m += 1;
        }
    }
    total
}

/// All words of the closed ball B_R(root), in breadth-first order.
pub fn tree_ball_words(q: u32, radius: i64) -> Vec<Vec<u8>> {
    let mut verts: Vec<Vec<u8>> = vec![Vec::new()];
    let mut frontier: Vec<Vec<u8>> = vec![Vec::new()];
    for _ in 0..radius.max(0) {
        let mut next = Vec::new();
        for v in &frontier {
            let labels = if v.is_empty() { q } else { q - 1 };
            for a in 0..labels {
                let mut w = v.clone();
                w.push(a as u8);
                next.push(w);
            }
        }
        verts.extend(next.iter().cloned());
        frontier = next;
    }
    verts
}

fn uniform_in_ball(q: u32, radius: i64, rng: &mut ChaCha8Rng) -> Vec<u8> {
    let total = ball_volume(q, radius as f64);
    let u: f64 = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut depth = 0i64;
    for j in 0..=radius {
        acc += sphere_count(q, j as f64);
        if u < acc || j == radius {
            depth = j;
            break;
        }
    }
    let mut w = Vec::with_capacity(depth as usize);
    for i in 0..depth {
        let limit = if i == 0 { q } else { q - 1 };
        w.push(rng.gen_range(0..limit) as u8);
    }
    w
}

/// Uniform vertex at distance exactly `steps` from `from`, via a
/// non-backtracking walk (q choices first, q−1 after).
fn random_at_distance(q: u32, from: &[u8], steps: i64, rng: &mut ChaCha8Rng) -> Vec<u8> {
    let mut cur = from.to_vec();
    let mut prev: Option<Vec<u8>> = None;
    for _ in 0..steps {
        let mut nbrs: Vec<Vec<u8>> = Vec::with_capacity(q as usize);
        if !cur.is_empty() {
            nbrs.push(cur[..cur.len() - 1].to_vec());
        }
        let labels = if cur.is_empty() { q } else { q - 1 };
        for a in 0..labels {
            let mut w = cur.clone();
            w.push(a as u8);
            nbrs.push(w);
        }
        if let Some(p) = &prev {
            nbrs.retain(|w| w != p);
        }
        let pick = rng.gen_range(0..nbrs.len());
        prev = Some(cur);
        cur = nbrs.swap_remove(pick);
    }
    cur
}

fn uniform_in_ball_around(q: u32, center: &[u8], radius: i64, rng: &mut ChaCha8Rng) -> Vec<u8> {
    let total = ball_volume(q, radius as f64);
    let u: f64 = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut depth = 0i64;
    for j in 0..=radius {
        acc += sphere_count(q, j as f64);
        if u < acc || j == radius {
            depth = j;
            break;
        }
    }
    random_at_distance(q, center, depth, rng)
}

/// Trees are 0-hyperbolic; the probe computes exact vertex-path distances
/// and therefore returns 0 for every sample.
pub fn delta_estimate(q: u32, n_triangles: usize, sample_radius: f64, seed: u64) -> f64 {
    let radius = sample_radius.floor() as i64;
    let per_triangle = exec::map_indexed(n_triangles, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let x = uniform_in_ball(q, radius, &mut rng);
        let y = uniform_in_ball(q, radius, &mut rng);
        let z = uniform_in_ball(q, radius, &mut rng);
        let others: Vec<Vec<u8>> = path_words(&x, &z)
            .into_iter()
            .chain(path_words(&y, &z))
            .collect();
        let mut worst = 0.0f64;
        for p in path_words(&x, &y) {
            let d = others
                .iter()
                .map(|v| dist(&p, v))
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(d);
        }
        worst
    });
    per_triangle.into_iter().fold(0.0, f64::max)
}

pub fn containment_check(
    q: u32,
    delta: f64,
    n_trials: usize,
    radius: f64,
    seed: u64,
) -> ContainmentReport {
    const MAX_REJECTS: usize = 64;
    let radius_int = radius.floor() as i64;
    let per_trial = exec::map_indexed(n_trials, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let x = uniform_in_ball(q, radius_int, &mut rng);
        let y = uniform_in_ball_around(q, &x, radius_int, &mut rng);
        let r = dist(&x, &y);
        let p = geodesic_vertex(&x, &y, r / 2.0);
        // +1/2 slack: the vertex-rounded midpoint moves d(p, z) by at most 1/2
        let bound = radius_int as f64 - r / 2.0 + 2.0 * delta + 0.5;
        for _ in 0..MAX_REJECTS {
            let z = uniform_in_ball_around(q, &x, radius_int, &mut rng);
            if dist(&z, &y) <= radius_int as f64 {
                let excess = dist(&p, &z) - bound;
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
