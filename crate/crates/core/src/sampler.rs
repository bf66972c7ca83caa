//! Exact sampling of the restricted determinantal process by the
//! eigendecomposition algorithm: select eigenvectors independently with
//! probability equal to their eigenvalue, then draw points sequentially from
//! the projection onto the selected family, deflating one vector per drawn
//! point.

use crate::dpp::Configuration;
use crate::error::{Error, Result};
use crate::exec;
use crate::geometry::{Point, SpaceKind};
use crate::kernels::RadialKernel;
use crate::operator::{build_raw, QuadratureSpec, RawOperator};
use crate::policy::NumericPolicy;
use num_complex::Complex;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// The restricted operator P_B K P_B discretized on quadrature nodes, with
/// its spectrum gated to [−tol, 1+tol] and clamped to [0, 1].
#[derive(Debug, Clone)]
pub struct DiscretizedOperator {
    raw: RawOperator,
    /// Clamped eigenvalues, descending; aligned with the raw basis.
    eigenvalues: Vec<f64>,
    region_radius: f64,
    policy: NumericPolicy,
}

impl DiscretizedOperator {
    pub fn nodes(&self) -> &[Point] {
        &self.raw.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.raw.weights
    }

    /// Clamped eigenvalues in descending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Σ w_i K(x_i, x_i): the discrete trace, which approximates E[Ξ(B_R)].
    pub fn trace(&self) -> f64 {
        self.raw.trace
    }

    /// Σ λ_i(1−λ_i): the variance of the discretized count.
    pub fn bernoulli_variance(&self) -> f64 {
        let terms: Vec<f64> = self.eigenvalues.iter().map(|l| l * (1.0 - l)).collect();
        exec::pairwise_sum(&terms)
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.raw.hermiticity_residual
    }

    pub fn region_radius(&self) -> f64 {
        self.region_radius
    }
}

/// Discretize the restricted kernel operator on B_R.
///
/// Errors with a finer-grid suggestion when the raw spectrum escapes
/// [−tol, 1 + tol]: a sign that the quadrature cannot represent the
/// projector at this resolution.
pub fn discretize(
    kernel: &RadialKernel,
    radius: f64,
    grid: &QuadratureSpec,
    policy: &NumericPolicy,
) -> Result<DiscretizedOperator> {
    let raw = build_raw(kernel, radius, grid)?;
    if raw.hermiticity_residual > policy.hermiticity_tol * kernel.koo().max(1e-300) {
        return Err(Error::KernelImplementation(format!(
            "discretized operator is not Hermitian: residual {:.3e}",
            raw.hermiticity_residual
        )));
    }
    let tol = match kernel.model().kind() {
        SpaceKind::PoincareDisk => policy.eig_tol_disk,
        SpaceKind::RegularTree { .. } => policy.eig_tol_tree,
    };
    let min_eig = raw
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let max_eig = raw
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    if min_eig < -tol || max_eig > 1.0 + tol {
        let (nr, na) = match kernel.model().kind() {
            SpaceKind::PoincareDisk => grid.resolve(radius).unwrap_or((0, 0)),
            SpaceKind::RegularTree { .. } => (0, 0),
        };
        return Err(Error::DiscretizationTooCoarse {
            min_eig,
            max_eig,
            suggested_radial: nr * 2,
            suggested_angular: na * 2,
        });
    }
    let eigenvalues = raw
        .eigenvalues
        .iter()
        .map(|l| {
            let c = l.clamp(0.0, 1.0);
            if c < policy.eig_keep_floor {
                0.0
            } else {
                c
            }
        })
        .collect();
    Ok(DiscretizedOperator {
        raw,
        eigenvalues,
        region_radius: radius,
        policy: policy.clone(),
    })
}

/// One exact draw of the discretized process. Deterministic given the seed.
pub fn sample(op: &DiscretizedOperator, seed: u64) -> Configuration {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with_rng(op, &mut rng).0
}

/// Draw with an externally managed stream; returns the configuration and
/// the number of re-orthogonalization passes that were needed.
pub fn sample_with_rng(op: &DiscretizedOperator, rng: &mut ChaCha8Rng) -> (Configuration, u64) {
    // stage 1: Bernoulli selection of eigenvectors
    let mut selected: Vec<Vec<Complex<f64>>> = Vec::new();
    for (i, &lam) in op.eigenvalues.iter().enumerate() {
        if lam <= 0.0 {
            continue;
        }
        if rng.gen::<f64>() < lam {
            selected.push(op.raw.eigenvector(i));
        }
    }
    let n_nodes = op.raw.nodes.len();
    let mut reorth_events = 0u64;
    let mut chosen: Vec<usize> = Vec::with_capacity(selected.len());

    // stage 2: sequential point draws with deflation
    while !selected.is_empty() {
        let k = selected.len() as f64;
        let mut cumulative = Vec::with_capacity(n_nodes);
        let mut acc = 0.0;
        for node in 0..n_nodes {
            let mut p = 0.0;
            for v in &selected {
                p += v[node].norm_sqr();
            }
            acc += p / k;
            cumulative.push(acc);
        }
        let target = rng.gen::<f64>() * acc;
        let node = match cumulative
            .binary_search_by(|c| c.partial_cmp(&target).unwrap_or(std::cmp::Ordering::Less))
        {
            Ok(i) | Err(i) => i.min(n_nodes - 1),
        };
        chosen.push(node);

        // deflate: remove the pivot vector with the largest weight at the
        // chosen node and cancel every other vector's component there
        let pivot_idx = (0..selected.len())
            .max_by(|&a, &b| {
                selected[a][node]
                    .norm_sqr()
                    .partial_cmp(&selected[b][node].norm_sqr())
                    .unwrap()
            })
            .unwrap();
        let pivot = selected.swap_remove(pivot_idx);
        let pv = pivot[node];
        for v in selected.iter_mut() {
            let factor = v[node] / pv;
            for (a, b) in v.iter_mut().zip(pivot.iter()) {
                *a -= factor * b;
            }
            v[node] = Complex::new(0.0, 0.0);
        }
        if !selected.is_empty() {
            let residual = gram_schmidt(&mut selected);
            if residual > op.policy.orth_loss_tol {
                gram_schmidt(&mut selected);
                reorth_events += 1;
            }
        }
    }

    let points = chosen
        .into_iter()
        .map(|i| op.raw.nodes[i].clone())
        .collect();
    (
        Configuration {
            points,
            region_radius: op.region_radius,
        },
        reorth_events,
    )
}

/// Modified Gram–Schmidt in place; returns the largest off-diagonal Gram
/// entry observed before orthogonalization as a loss-of-orthogonality probe.
fn gram_schmidt(vecs: &mut [Vec<Complex<f64>>]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..vecs.len() {
        for j in 0..i {
            let mut dot = Complex::new(0.0, 0.0);
            for (a, b) in vecs[j].iter().zip(vecs[i].iter()) {
                dot += a.conj() * b;
            }
            worst = worst.max(dot.norm());
            let (head, tail) = vecs.split_at_mut(i);
            let vj = &head[j];
            for (a, b) in tail[0].iter_mut().zip(vj.iter()) {
                *a -= dot * b;
            }
        }
        let norm: f64 = vecs[i].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-300 {
            for c in vecs[i].iter_mut() {
                *c /= norm;
            }
        }
    }
    worst
}

/// Count statistics over independent replicas with delete-one jackknife
/// standard errors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmpiricalStats {
    pub n_samples: usize,
    pub mean: f64,
    pub variance: f64,
    pub stderr_mean: f64,
    pub stderr_variance: f64,
    /// Re-orthogonalization passes triggered across all replicas.
    pub reorth_events: u64,
}

/// Draw `n_samples` configurations and report count statistics.
///
/// Replica i draws from ChaCha stream i of the seed, so results are
/// independent of thread count and schedule.
pub fn empirical_stats(
    kernel: &RadialKernel,
    radius: f64,
    n_samples: usize,
    seed: u64,
    grid: &QuadratureSpec,
    policy: &NumericPolicy,
) -> Result<EmpiricalStats> {
    if n_samples < 100 {
        return Err(Error::Domain(format!(
            "empirical statistics need at least 100 samples, got {n_samples}"
        )));
    }
    let op = discretize(kernel, radius, grid, policy)?;
    let per_sample = exec::map_indexed(n_samples, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let (config, reorth) = sample_with_rng(&op, &mut rng);
        (config.points.len() as f64, reorth)
    });
    let counts: Vec<f64> = per_sample.iter().map(|(c, _)| *c).collect();
    let reorth_events = per_sample.iter().map(|(_, r)| r).sum();
    let (mean, variance, stderr_mean, stderr_variance) = jackknife_mean_variance(&counts);
    Ok(EmpiricalStats {
        n_samples,
        mean,
        variance,
        stderr_mean,
        stderr_variance,
        reorth_events,
    })
}

/// Delete-one jackknife for the sample mean and the unbiased sample
/// variance, in O(n) from running sums.
fn jackknife_mean_variance(xs: &[f64]) -> (f64, f64, f64, f64) {
    let n = xs.len();
    let nf = n as f64;
    let s1 = exec::pairwise_sum(xs);
    let squares: Vec<f64> = xs.iter().map(|x| x * x).collect();
    let s2 = exec::pairwise_sum(&squares);
    let mean = s1 / nf;
    let variance = (s2 - nf * mean * mean) / (nf - 1.0);

    let mut theta_mean = Vec::with_capacity(n);
    let mut theta_var = Vec::with_capacity(n);
    for &x in xs {
        let m = (s1 - x) / (nf - 1.0);
        theta_mean.push(m);
        let v = (s2 - x * x - (nf - 1.0) * m * m) / (nf - 2.0);
        theta_var.push(v);
    }
    let tm_bar = exec::pairwise_sum(&theta_mean) / nf;
    let tv_bar = exec::pairwise_sum(&theta_var) / nf;
    let dm: Vec<f64> = theta_mean.iter().map(|t| (t - tm_bar).powi(2)).collect();
    let dv: Vec<f64> = theta_var.iter().map(|t| (t - tv_bar).powi(2)).collect();
    let stderr_mean = ((nf - 1.0) / nf * exec::pairwise_sum(&dm)).sqrt();
    let stderr_variance = ((nf - 1.0) / nf * exec::pairwise_sum(&dv)).sqrt();
    (mean, variance, stderr_mean, stderr_variance)
}
