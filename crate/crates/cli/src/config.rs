//! Run configuration: a single TOML file with nested sections. Unknown keys
//! are rejected so typos fail loudly instead of silently running defaults.

use hyperdpp_core::geometry::{GrowthProfile, SpaceModel};
use hyperdpp_core::kernels::{
    bergman_kernel, custom_radial_kernel, tree_spectral_kernel, RadialKernel,
};
use hyperdpp_core::operator::QuadratureSpec;
use hyperdpp_core::NumericPolicy;
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub space: SpaceSection,
    pub kernel: KernelSection,
    pub profile: ProfileSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub empirical: EmpiricalSection,
    #[serde(default)]
    pub sample: SampleSection,
    #[serde(default)]
    pub geometry: GeometrySection,
    #[serde(default)]
    pub verify: VerifySection,
    #[serde(default)]
    pub numeric: NumericPolicy,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSection {
    /// "disk" or "tree".
    pub kind: String,
    /// Tree degree; required when kind = "tree".
    pub q: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSection {
    /// "bergman", "tree-spectral" or "custom".
    pub kind: String,
    /// Bergman weight parameter.
    pub alpha: Option<f64>,
    /// Spectral band for tree-spectral kernels.
    pub band: Option<[f64; 2]>,
    /// Minimum radial window for tree-spectral kernels.
    pub window: Option<usize>,
    /// Path to a whitespace-separated "r k(r)" table for custom kernels.
    pub table: Option<PathBuf>,
    /// K(o,o) for custom kernels.
    pub koo: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSection {
    pub delta: f64,
    #[serde(default)]
    pub r_min: Option<f64>,
    #[serde(default)]
    pub r_max: Option<f64>,
    #[serde(default)]
    pub grid_step: Option<f64>,
    /// Explicit growth constant; skips fitting when set together with alpha.
    pub c: Option<f64>,
    /// Explicit growth rate for the explicit-constant path.
    pub alpha: Option<f64>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default)]
    pub radii: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmpiricalSection {
    #[serde(default)]
    pub enabled: bool,
    #[serde(default = "default_n_samples")]
    pub n_samples: usize,
    #[serde(default = "default_empirical_radius")]
    pub radius: f64,
    pub n_radial: Option<usize>,
    pub n_angular: Option<usize>,
}

fn default_n_samples() -> usize {
    20_000
}

fn default_empirical_radius() -> f64 {
    2.0
}

impl Default for EmpiricalSection {
    fn default() -> Self {
        Self {
            enabled: false,
            n_samples: default_n_samples(),
            radius: default_empirical_radius(),
            n_radial: None,
            n_angular: None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSection {
    #[serde(default = "default_empirical_radius")]
    pub radius: f64,
    #[serde(default = "default_sample_count")]
    pub count: usize,
    pub n_radial: Option<usize>,
    pub n_angular: Option<usize>,
}

fn default_sample_count() -> usize {
    4
}

impl Default for SampleSection {
    fn default() -> Self {
        Self {
            radius: default_empirical_radius(),
            count: default_sample_count(),
            n_radial: None,
            n_angular: None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    #[serde(default = "default_delta_triangles")]
    pub delta_triangles: usize,
    #[serde(default = "default_delta_radius")]
    pub delta_sample_radius: f64,
    #[serde(default = "default_containment_trials")]
    pub containment_trials: usize,
    #[serde(default = "default_containment_radius")]
    pub containment_radius: f64,
}

fn default_delta_triangles() -> usize {
    400
}
fn default_delta_radius() -> f64 {
    6.0
}
fn default_containment_trials() -> usize {
    20_000
}
fn default_containment_radius() -> f64 {
    5.0
}

impl Default for GeometrySection {
    fn default() -> Self {
        Self {
            delta_triangles: default_delta_triangles(),
            delta_sample_radius: default_delta_radius(),
            containment_trials: default_containment_trials(),
            containment_radius: default_containment_radius(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    #[serde(default = "default_r_test")]
    pub r_test: f64,
    pub n_radial: Option<usize>,
    pub n_angular: Option<usize>,
}

fn default_r_test() -> f64 {
    3.0
}

impl Default for VerifySection {
    fn default() -> Self {
        Self {
            r_test: default_r_test(),
            n_radial: None,
            n_angular: None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
}

fn default_seed() -> u64 {
    20_240_803
}
fn default_out_dir() -> PathBuf {
    PathBuf::from("reports")
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            seed: default_seed(),
            out_dir: default_out_dir(),
        }
    }
}

/// A config error: reported on stderr and mapped to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| ConfigError(format!("config parse error: {e}")))
    }

    pub fn build_model(&self) -> Result<SpaceModel, ConfigError> {
        match self.space.kind.as_str() {
            "disk" => Ok(SpaceModel::poincare_disk()),
            "tree" => {
                let q = self
                    .space
                    .q
                    .ok_or_else(|| ConfigError("space.kind = \"tree\" requires space.q".into()))?;
                SpaceModel::regular_tree(q).map_err(|e| ConfigError(e.to_string()))
            }
            other => Err(ConfigError(format!(
                "space.kind must be \"disk\" or \"tree\", got {other:?}"
            ))),
        }
    }

    /// Build the kernel and check it matches the space.
    pub fn build_kernel(
        &self,
        model: &SpaceModel,
        policy: &NumericPolicy,
        config_dir: &Path,
    ) -> Result<RadialKernel, CliError> {
        match self.kernel.kind.as_str() {
            "bergman" => {
                if model.is_tree() {
                    return Err(ConfigError(
                        "a bergman kernel lives on the disk, not on a tree".into(),
                    )
                    .into());
                }
                let alpha = self.kernel.alpha.unwrap_or(0.0);
                bergman_kernel(alpha).map_err(CliError::Numeric)
            }
            "tree-spectral" => {
                let q = model.tree_degree().ok_or_else(|| {
                    ConfigError("a tree-spectral kernel requires space.kind = \"tree\"".into())
                })?;
                let band = self.kernel.band.ok_or_else(|| {
                    ConfigError("kernel.band = [a, b] is required for tree-spectral".into())
                })?;
                let window = self.kernel.window.unwrap_or(2048);
                tree_spectral_kernel(q, (band[0], band[1]), window, policy)
                    .map_err(CliError::Numeric)
            }
            "custom" => {
                let table = self.kernel.table.as_ref().ok_or_else(|| {
                    ConfigError("kernel.table = \"file\" is required for custom kernels".into())
                })?;
                let koo = self.kernel.koo.ok_or_else(|| {
                    ConfigError("kernel.koo is required for custom kernels".into())
                })?;
                let path = if table.is_absolute() {
                    table.clone()
                } else {
                    config_dir.join(table)
                };
                let text = std::fs::read_to_string(&path).map_err(|e| {
                    ConfigError(format!("cannot read kernel table {}: {e}", path.display()))
                })?;
                let mut knots = Vec::new();
                for (lineno, line) in text.lines().enumerate() {
                    let line = line.trim();
                    if line.is_empty() || line.starts_with('#') {
                        continue;
                    }
                    let mut it = line.split_whitespace();
                    let parse = |s: Option<&str>| -> Result<f64, ConfigError> {
                        s.ok_or_else(|| {
                            ConfigError(format!("kernel table line {} malformed", lineno + 1))
                        })?
                        .parse()
                        .map_err(|e| {
                            ConfigError(format!("kernel table line {}: {e}", lineno + 1))
                        })
                    };
                    let r = parse(it.next())?;
                    let k = parse(it.next())?;
                    knots.push((r, k));
                }
                custom_radial_kernel(*model, koo, &knots).map_err(CliError::Numeric)
            }
            other => Err(ConfigError(format!(
                "kernel.kind must be \"bergman\", \"tree-spectral\" or \"custom\", got {other:?}"
            ))
            .into()),
        }
    }

    /// Growth profile: explicit (c, alpha) when given, fitted otherwise.
    pub fn build_profile(&self, model: &SpaceModel) -> Result<GrowthProfile, CliError> {
        let r_min = self
            .profile
            .r_min
            .unwrap_or(if model.is_tree() { 0.0 } else { 1.0 });
        let r_max = self.profile.r_max.unwrap_or(10.0);
        match (self.profile.c, self.profile.alpha) {
            (Some(c), Some(alpha)) => {
                GrowthProfile::new(c, alpha, self.profile.delta, (r_min, r_max))
                    .map_err(CliError::Numeric)
            }
            (Some(_), None) | (None, Some(_)) => Err(ConfigError(
                "explicit profiles need both profile.c and profile.alpha".into(),
            )
            .into()),
            (None, None) => {
                let step = self.profile.grid_step.unwrap_or(0.25);
                model
                    .fit_growth_profile(self.profile.delta, r_min, r_max, step)
                    .map_err(CliError::Numeric)
            }
        }
    }

    pub fn verify_grid(&self) -> QuadratureSpec {
        QuadratureSpec {
            n_radial: self.verify.n_radial,
            n_angular: self.verify.n_angular,
        }
    }

    pub fn empirical_grid(&self) -> QuadratureSpec {
        QuadratureSpec {
            n_radial: self.empirical.n_radial,
            n_angular: self.empirical.n_angular,
        }
    }

    pub fn sample_grid(&self) -> QuadratureSpec {
        QuadratureSpec {
            n_radial: self.sample.n_radial,
            n_angular: self.sample.n_angular,
        }
    }
}

/// Top-level CLI failure, carrying the exit-code class.
#[derive(Debug)]
pub enum CliError {
    /// Exit 2: configuration problems.
    Config(ConfigError),
    /// Exit 3: numerical failures inside the library.
    Numeric(hyperdpp_core::Error),
    /// Exit 3: I/O problems writing reports.
    Io(std::io::Error),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<hyperdpp_core::Error> for CliError {
    fn from(e: hyperdpp_core::Error) -> Self {
        CliError::Numeric(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "config error: {e}"),
            CliError::Numeric(e) => write!(f, "numeric error: {e}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(hyperdpp_core::Error::Domain(_))
            | CliError::Numeric(hyperdpp_core::Error::Validation(_)) => 2,
            _ => 3,
        }
    }
}
