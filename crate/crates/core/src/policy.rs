use serde::{Deserialize, Serialize};

/// Central record of every numeric tolerance used by the library.
///
/// All quadrature budgets, eigenvalue gates and agreement contracts live here
/// so that a report can state exactly which policy produced it. The defaults
/// are the shipped calibration; individual fields can be overridden from the
/// CLI configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct NumericPolicy {
    /// Absolute tolerance for adaptive 1D quadrature panels.
    pub quad_abs_tol: f64,
    /// Absolute tolerance for the lunule area integral on the disk.
    pub lunule_abs_tol: f64,
    /// Radial tail mass budget, relative to K(o,o).
    pub tail_mass_rel: f64,
    /// Eigenvalue containment tolerance for discretized disk operators.
    pub eig_tol_disk: f64,
    /// Eigenvalue containment tolerance for tree operators.
    pub eig_tol_tree: f64,
    /// Hermiticity gate for discretized operators.
    pub hermiticity_tol: f64,
    /// Reproducing-mass agreement, relative, disk kernels.
    pub reproducing_mass_rel_disk: f64,
    /// Reproducing-mass agreement, relative, tree spectral kernels.
    pub reproducing_mass_rel_tree: f64,
    /// Allowed imaginary part of a correlation determinant, relative.
    pub rho_imag_tol: f64,
    /// Orthogonality loss that triggers re-orthogonalization while sampling.
    pub orth_loss_tol: f64,
    /// Eigenvalues below this floor are zeroed in discretized operators.
    pub eig_keep_floor: f64,
    /// Relative agreement required between the two variance routes on the disk.
    pub route_agreement_rel_disk: f64,
    /// Absolute agreement required between the two variance routes on trees.
    pub route_agreement_abs_tree: f64,
    /// Tolerance for the lunule lower-bound inequality checks.
    pub lunule_bound_tol: f64,
    /// Geodesic discretization step for hyperbolicity probing on the disk.
    pub delta_probe_step: f64,
    /// Maximum radial window for tree spectral kernels.
    pub max_tree_window: usize,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self {
            quad_abs_tol: 1e-10,
            lunule_abs_tol: 1e-8,
            tail_mass_rel: 1e-10,
            eig_tol_disk: 1e-6,
            eig_tol_tree: 1e-8,
            hermiticity_tol: 1e-12,
            reproducing_mass_rel_disk: 1e-6,
            reproducing_mass_rel_tree: 1e-3,
            rho_imag_tol: 1e-10,
            orth_loss_tol: 1e-8,
            eig_keep_floor: 1e-12,
            route_agreement_rel_disk: 5e-3,
            route_agreement_abs_tree: 1e-10,
            lunule_bound_tol: 1e-8,
            delta_probe_step: 0.01,
            max_tree_window: 4096,
        }
    }
}
