//! Finite stand-ins for the restricted operator P_B K P_B.
//!
//! Disk: geodesic polar product rule (Gauss–Legendre with weight sinh r in
//! the radius, uniform trapezoid in angle) and the symmetrized Nyström
//! matrix M = √(w_i w_j) K(x_i, x_j). A radial kernel depends on the angle
//! difference only, so M is block-circulant in the angular index: a discrete
//! Fourier transform turns the eigenproblem into n_angular independent
//! Hermitian blocks of radial size, which is what makes verification and
//! sampling grids of a few thousand nodes cheap.
//!
//! Tree: the ball is finite, weights are 1, and the matrix is dense real
//! symmetric.

use crate::error::{Error, Result};
use crate::geometry::{tree_ball_words, Point, SpaceKind};
use crate::kernels::RadialKernel;
use crate::quad::gauss_legendre;
use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Node-count request for disk discretizations; `None` fields auto-size
/// with the ball radius so the projector's eigenvalues stabilize to 1e-6.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub n_radial: Option<usize>,
    pub n_angular: Option<usize>,
}

impl QuadratureSpec {
    pub fn auto() -> Self {
        Self::default()
    }

    pub fn with(n_radial: usize, n_angular: usize) -> Self {
        Self {
            n_radial: Some(n_radial),
            n_angular: Some(n_angular),
        }
    }

    pub(crate) fn resolve(&self, radius: f64) -> Result<(usize, usize)> {
        let n_radial = match self.n_radial {
            Some(n) => n.max(4),
            None => (14.0 + 12.0 * radius).ceil() as usize,
        };
        let n_angular = match self.n_angular {
            Some(n) => n.max(4),
            None => {
                // angular modes of the restricted kernel decay like
                // tanh(R/2)^(2m); size so the aliased tail is ~1e-10
                let decay = -(radius / 2.0).tanh().powi(2).ln();
                let needed = (23.0 / decay).ceil() as usize + 16;
                let n = needed.max(64);
                if n > 512 {
                    return Err(Error::Domain(format!(
                        "auto angular grid for radius {radius} needs {n} nodes; \
                         pass an explicit quadrature spec for balls this large"
                    )));
                }
                n
            }
        };
        Ok((n_radial, n_angular + n_angular % 2))
    }
}

/// Eigenvectors in a form matched to the discretization.
#[derive(Debug, Clone)]
pub(crate) enum EigenBasis {
    /// Disk Fourier blocks: eigenvector j is radial vector `radial[j]` on
    /// angular mode `mode[j]`, i.e. v(i,a) = radial[j][i]·e^{2πi·m·a/n}/√n.
    DiskBlocks {
        n_angular: usize,
        modes: Vec<usize>,
        radial: Vec<Vec<Complex<f64>>>,
    },
    /// Dense node-space eigenvectors.
    TreeDense { vectors: Vec<Vec<f64>> },
}

/// Discretized operator before legality gating: raw eigenvalues, basis,
/// node set and diagnostics.
#[derive(Debug, Clone)]
pub(crate) struct RawOperator {
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    pub basis: EigenBasis,
    pub hermiticity_residual: f64,
    pub trace: f64,
}

impl RawOperator {
    /// Expand eigenvector `idx` into node space.
    pub fn eigenvector(&self, idx: usize) -> Vec<Complex<f64>> {
        match &self.basis {
            EigenBasis::DiskBlocks {
                n_angular,
                modes,
                radial,
            } => {
                let na = *n_angular;
                let m = modes[idx] as f64;
                let u = &radial[idx];
                let norm = 1.0 / (na as f64).sqrt();
                let mut v = Vec::with_capacity(u.len() * na);
                for ui in u {
                    for a in 0..na {
                        let phase = 2.0 * PI * m * (a as f64) / (na as f64);
                        v.push(ui * Complex::from_polar(norm, phase));
                    }
                }
                v
            }
            EigenBasis::TreeDense { vectors } => vectors[idx]
                .iter()
                .map(|x| Complex::new(*x, 0.0))
                .collect(),
        }
    }
}

pub(crate) fn build_raw(
    kernel: &RadialKernel,
    radius: f64,
    spec: &QuadratureSpec,
) -> Result<RawOperator> {
    match kernel.model().kind() {
        SpaceKind::PoincareDisk => build_disk(kernel, radius, spec),
        SpaceKind::RegularTree { q } => build_tree(kernel, q, radius),
    }
}

fn build_disk(kernel: &RadialKernel, radius: f64, spec: &QuadratureSpec) -> Result<RawOperator> {
    if !(radius > 0.0) {
        return Err(Error::Domain("discretization radius must be positive".into()));
    }
    let (n_rad, n_ang) = spec.resolve(radius)?;
    let (xs, ws) = gauss_legendre(n_rad);
    let r: Vec<f64> = xs.iter().map(|x| 0.5 * radius * (x + 1.0)).collect();
    let rho: Vec<f64> = r.iter().map(|ri| (ri / 2.0).tanh()).collect();
    // node weight = GL weight · sinh r · (2π / n_angular)
    let wnode: Vec<f64> = ws
        .iter()
        .zip(r.iter())
        .map(|(w, ri)| 0.5 * radius * w * ri.sinh() * (2.0 * PI / n_ang as f64))
        .collect();

    // kernel values between radial shells at each angle offset
    let mut f = vec![Complex::new(0.0, 0.0); n_rad * n_rad * n_ang];
    for d in 0..n_ang {
        let th = 2.0 * PI * (d as f64) / (n_ang as f64);
        for i in 0..n_rad {
            let zi = Point::Disk(Complex::new(rho[i], 0.0));
            for j in 0..n_rad {
                let zj = Point::Disk(Complex::from_polar(rho[j], th));
                f[(d * n_rad + i) * n_rad + j] = kernel.complex_eval(&zi, &zj);
            }
        }
    }

    let twiddle: Vec<Complex<f64>> = (0..n_ang)
        .map(|k| Complex::from_polar(1.0, -2.0 * PI * (k as f64) / (n_ang as f64)))
        .collect();
    let mut eigenvalues = Vec::with_capacity(n_rad * n_ang);
    let mut modes = Vec::with_capacity(n_rad * n_ang);
    let mut radial = Vec::with_capacity(n_rad * n_ang);
    let mut herm_residual = 0.0f64;
    for m in 0..n_ang {
        let mut h = DMatrix::<Complex<f64>>::zeros(n_rad, n_rad);
        for i in 0..n_rad {
            for j in 0..n_rad {
                let mut acc = Complex::new(0.0, 0.0);
                for d in 0..n_ang {
                    acc += f[(d * n_rad + i) * n_rad + j] * twiddle[(m * d) % n_ang];
                }
                h[(i, j)] = (wnode[i] * wnode[j]).sqrt() * acc;
            }
        }
        for i in 0..n_rad {
            for j in 0..i {
                herm_residual = herm_residual.max((h[(i, j)] - h[(j, i)].conj()).norm());
            }
        }
        let h = (h.clone() + h.adjoint()) * Complex::new(0.5, 0.0);
        let eig = h.symmetric_eigen();
        for (k, lam) in eig.eigenvalues.iter().enumerate() {
            eigenvalues.push(*lam);
            modes.push(m);
            radial.push(eig.eigenvectors.column(k).iter().cloned().collect());
        }
    }
    sort_eigenpairs(&mut eigenvalues, &mut modes, &mut radial);

    let mut nodes = Vec::with_capacity(n_rad * n_ang);
    let mut weights = Vec::with_capacity(n_rad * n_ang);
    for i in 0..n_rad {
        for a in 0..n_ang {
            let th = 2.0 * PI * (a as f64) / (n_ang as f64);
            nodes.push(Point::Disk(Complex::from_polar(rho[i], th)));
            weights.push(wnode[i]);
        }
    }
    let diag: Vec<f64> = (0..nodes.len())
        .map(|i| weights[i] * kernel.complex_eval(&nodes[i], &nodes[i]).re)
        .collect();
    let trace = crate::exec::pairwise_sum(&diag);

    Ok(RawOperator {
        nodes,
        weights,
        eigenvalues,
        basis: EigenBasis::DiskBlocks {
            n_angular: n_ang,
            modes,
            radial,
        },
        hermiticity_residual: herm_residual,
        trace,
    })
}

fn sort_eigenpairs(vals: &mut Vec<f64>, modes: &mut Vec<usize>, radial: &mut Vec<Vec<Complex<f64>>>) {
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| {
        vals[b]
            .partial_cmp(&vals[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(modes[a].cmp(&modes[b]))
    });
    *vals = order.iter().map(|&i| vals[i]).collect();
    *modes = order.iter().map(|&i| modes[i]).collect();
    *radial = order.iter().map(|&i| radial[i].clone()).collect();
}

fn build_tree(kernel: &RadialKernel, q: u32, radius: f64) -> Result<RawOperator> {
    let r_int = radius.floor() as i64;
    if r_int < 0 {
        return Err(Error::Domain("tree ball radius must be nonnegative".into()));
    }
    let words = tree_ball_words(q, r_int);
    let n = words.len();
    if n > 4000 {
        return Err(Error::Domain(format!(
            "tree ball of radius {r_int} has {n} vertices; dense eigensolve capped at 4000"
        )));
    }
    let pts: Vec<Point> = words.iter().map(|w| Point::TreeWord(w.clone())).collect();
    let mut m = DMatrix::<f64>::zeros(n, n);
    let mut herm_residual = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let v = kernel.complex_eval(&pts[i], &pts[j]);
            if v.im.abs() > herm_residual {
                herm_residual = v.im.abs();
            }
            m[(i, j)] = v.re;
        }
    }
    for i in 0..n {
        for j in 0..i {
            herm_residual = herm_residual.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    let m = (m.clone() + m.transpose()) * 0.5;
    let trace = m.trace();
    let eig = m.symmetric_eigen();
    let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    let mut vectors: Vec<Vec<f64>> = (0..n)
        .map(|k| eig.eigenvectors.column(k).iter().cloned().collect())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eigenvalues[b]
            .partial_cmp(&eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    eigenvalues = order.iter().map(|&i| eigenvalues[i]).collect();
    vectors = order.iter().map(|&i| vectors[i].clone()).collect();

    Ok(RawOperator {
        nodes: pts,
        weights: vec![1.0; n],
        eigenvalues,
        basis: EigenBasis::TreeDense { vectors },
        hermiticity_residual: herm_residual,
        trace,
    })
}
