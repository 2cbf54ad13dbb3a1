//! JSON experiment configuration.
//!
//! The schema is strict: unknown keys anywhere are rejected at parse time.
//! `data`, `test`, `schedule`, and `output` are optional in the file so the
//! same config can drive both `run` (which requires them) and `select`/
//! `calibrate` (which do not); `run` validates their presence before touching
//! any data.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::HarnessError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub data: Option<DataSpec>,
    #[serde(default)]
    pub test: Option<DataSpec>,
    #[serde(default)]
    pub schedule: Option<ScheduleSpec>,
    #[serde(default)]
    pub init: InitSpec,
    pub method: MethodConfig,
    #[serde(default)]
    pub kernel: KernelSpec,
    #[serde(default)]
    pub uncertainty: UncertaintySpec,
    #[serde(default)]
    pub model: ModelSpec,
    #[serde(default)]
    pub selection: SelectionSpec,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(|e| {
            HarnessError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if let Some(schedule) = &self.schedule {
            if schedule.budgets.is_empty() {
                return Err(HarnessError::Config(
                    "schedule.budgets must list at least one round".into(),
                ));
            }
            if schedule.budgets.contains(&0) {
                return Err(HarnessError::Config(
                    "every schedule budget must be at least 1".into(),
                ));
            }
        }
        match self.method.resolve()? {
            MethodSpec::WeightedKmeans { keep: 0 } => {
                return Err(HarnessError::Config(
                    "weighted_kmeans.keep must be at least 1".into(),
                ));
            }
            MethodSpec::AlfamixUherding { alpha, .. } if !(0.0..1.0).contains(&alpha) => {
                return Err(HarnessError::Config(
                    "alfamix_uherding.alpha must lie in [0, 1)".into(),
                ));
            }
            _ => {}
        }
        if let Some(sigma) = self.kernel.sigma_init {
            if !sigma.is_finite() || sigma <= 0.0 {
                return Err(HarnessError::Config(
                    "kernel.sigma_init must be finite and positive".into(),
                ));
            }
        }
        let u = &self.uncertainty;
        if u.tau_grid_count == 0
            || !u.tau_grid_min.is_finite()
            || u.tau_grid_min <= 0.0
            || u.tau_grid_max < u.tau_grid_min
        {
            return Err(HarnessError::Config(
                "uncertainty temperature grid must satisfy 0 < min <= max, count >= 1".into(),
            ));
        }
        if u.ece_bins == 0 {
            return Err(HarnessError::Config(
                "uncertainty.ece_bins must be at least 1".into(),
            ));
        }
        if !(0.0..1.0).contains(&u.val_fraction) {
            return Err(HarnessError::Config(
                "uncertainty.val_fraction must lie in [0, 1)".into(),
            ));
        }
        if self.model.poly_degree == 0 {
            return Err(HarnessError::Config(
                "model.poly_degree must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Where a feature table and its labels come from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSpec {
    Halfmoons {
        n: usize,
        noise: f64,
        seed: u64,
    },
    Blobs {
        centers: Vec<Vec<f64>>,
        per_center: usize,
        std: f64,
        seed: u64,
    },
    Files {
        features: PathBuf,
        labels: PathBuf,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub budgets: Vec<usize>,
    pub seed: u64,
}

/// How the initial labeled set is chosen before round 0.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitSpec {
    #[serde(default = "default_init_size")]
    pub size: usize,
    #[serde(default)]
    pub kind: InitKind,
}

impl Default for InitSpec {
    fn default() -> Self {
        InitSpec {
            size: default_init_size(),
            kind: InitKind::default(),
        }
    }
}

fn default_init_size() -> usize {
    2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    /// Uniformly random unlabeled points.
    Random,
    /// Cycle over classes, drawing one random point of each (uses oracle
    /// labels, the usual benchmark seeding).
    #[default]
    PerClassRandom,
    /// Coverage-greedy selection with constant weights.
    Coverage,
}

/// Acquisition method as written in the config: a name plus the knobs that
/// only some methods accept. `resolve` checks that exactly the knobs of the
/// chosen method are present (a tagged enum would silently swallow unknown
/// keys here).
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MethodConfig {
    pub name: MethodName,
    /// weighted_kmeans: number of top-uncertainty points kept.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keep: Option<usize>,
    /// alfamix_uherding: interpolation weight toward the class anchors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// alfamix_uherding: try weights 0.1..0.9 instead of the single alpha;
    /// a point counts as uncertain if any of them flips its label.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_grid: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    Random,
    Confidence,
    Margin,
    Entropy,
    Coreset,
    Maxherding,
    Uherding,
    WeightedKmeans,
    AlfamixUherding,
    BadgeMedoids,
}

/// Fully resolved method choice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MethodSpec {
    Random,
    Confidence,
    Margin,
    Entropy,
    Coreset,
    Maxherding,
    Uherding,
    WeightedKmeans { keep: usize },
    AlfamixUherding { alpha: f64, alpha_grid: bool },
    BadgeMedoids,
}

impl MethodConfig {
    pub fn resolve(&self) -> Result<MethodSpec, HarnessError> {
        let reject = |field: &str| {
            Err(HarnessError::Config(format!(
                "method.{field} is not a parameter of `{}`",
                self.name.as_str()
            )))
        };
        if self.keep.is_some() && self.name != MethodName::WeightedKmeans {
            return reject("keep");
        }
        if self.alpha.is_some() && self.name != MethodName::AlfamixUherding {
            return reject("alpha");
        }
        if self.alpha_grid.is_some() && self.name != MethodName::AlfamixUherding {
            return reject("alpha_grid");
        }
        Ok(match self.name {
            MethodName::Random => MethodSpec::Random,
            MethodName::Confidence => MethodSpec::Confidence,
            MethodName::Margin => MethodSpec::Margin,
            MethodName::Entropy => MethodSpec::Entropy,
            MethodName::Coreset => MethodSpec::Coreset,
            MethodName::Maxherding => MethodSpec::Maxherding,
            MethodName::Uherding => MethodSpec::Uherding,
            MethodName::WeightedKmeans => MethodSpec::WeightedKmeans {
                keep: self.keep.ok_or_else(|| {
                    HarnessError::Config("weighted_kmeans requires method.keep".into())
                })?,
            },
            MethodName::AlfamixUherding => MethodSpec::AlfamixUherding {
                alpha: self.alpha.unwrap_or(0.2),
                alpha_grid: self.alpha_grid.unwrap_or(false),
            },
            MethodName::BadgeMedoids => MethodSpec::BadgeMedoids,
        })
    }
}

impl From<MethodSpec> for MethodConfig {
    fn from(spec: MethodSpec) -> Self {
        let (name, keep, alpha, alpha_grid) = match spec {
            MethodSpec::Random => (MethodName::Random, None, None, None),
            MethodSpec::Confidence => (MethodName::Confidence, None, None, None),
            MethodSpec::Margin => (MethodName::Margin, None, None, None),
            MethodSpec::Entropy => (MethodName::Entropy, None, None, None),
            MethodSpec::Coreset => (MethodName::Coreset, None, None, None),
            MethodSpec::Maxherding => (MethodName::Maxherding, None, None, None),
            MethodSpec::Uherding => (MethodName::Uherding, None, None, None),
            MethodSpec::WeightedKmeans { keep } => {
                (MethodName::WeightedKmeans, Some(keep), None, None)
            }
            MethodSpec::AlfamixUherding { alpha, alpha_grid } => (
                MethodName::AlfamixUherding,
                None,
                Some(alpha),
                Some(alpha_grid),
            ),
            MethodSpec::BadgeMedoids => (MethodName::BadgeMedoids, None, None, None),
        };
        MethodConfig {
            name,
            keep,
            alpha,
            alpha_grid,
        }
    }
}

impl MethodName {
    pub fn as_str(&self) -> &'static str {
        match self {
            MethodName::Random => "random",
            MethodName::Confidence => "confidence",
            MethodName::Margin => "margin",
            MethodName::Entropy => "entropy",
            MethodName::Coreset => "coreset",
            MethodName::Maxherding => "maxherding",
            MethodName::Uherding => "uherding",
            MethodName::WeightedKmeans => "weighted_kmeans",
            MethodName::AlfamixUherding => "alfamix_uherding",
            MethodName::BadgeMedoids => "badge_medoids",
        }
    }
}

impl MethodSpec {
    pub fn name(&self) -> &'static str {
        MethodConfig::from(*self).name.as_str()
    }

    /// Whether the method needs a trained classifier (and therefore labels).
    pub fn needs_model(&self) -> bool {
        !matches!(
            self,
            MethodSpec::Random | MethodSpec::Coreset | MethodSpec::Maxherding
        )
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    #[serde(default)]
    pub family: KernelFamilySpec,
    /// Lengthscale used before the first radius adaptation and as the
    /// degenerate-case fallback. Default: the median of a 1000-pair random
    /// sample of pool pairwise distances.
    #[serde(default)]
    pub sigma_init: Option<f64>,
    /// L2-normalize feature rows once at load, before any kerneling.
    #[serde(default)]
    pub normalize: bool,
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec {
            family: KernelFamilySpec::Gaussian,
            sigma_init: None,
            normalize: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamilySpec {
    #[default]
    Gaussian,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UncertaintySpec {
    #[serde(default)]
    pub measure: MeasureSpec,
    #[serde(default = "default_tau_min")]
    pub tau_grid_min: f64,
    #[serde(default = "default_tau_max")]
    pub tau_grid_max: f64,
    #[serde(default = "default_tau_count")]
    pub tau_grid_count: usize,
    #[serde(default = "default_ece_bins")]
    pub ece_bins: usize,
    #[serde(default = "default_val_fraction")]
    pub val_fraction: f64,
}

impl Default for UncertaintySpec {
    fn default() -> Self {
        UncertaintySpec {
            measure: MeasureSpec::Margin,
            tau_grid_min: default_tau_min(),
            tau_grid_max: default_tau_max(),
            tau_grid_count: default_tau_count(),
            ece_bins: default_ece_bins(),
            val_fraction: default_val_fraction(),
        }
    }
}

fn default_tau_min() -> f64 {
    0.01
}

fn default_tau_max() -> f64 {
    100.0
}

fn default_tau_count() -> usize {
    21
}

fn default_ece_bins() -> usize {
    15
}

fn default_val_fraction() -> f64 {
    0.1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MeasureSpec {
    #[default]
    Margin,
    Entropy,
    Confidence,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(default = "default_poly_degree")]
    pub poly_degree: usize,
    #[serde(default = "default_l2")]
    pub l2: f64,
    #[serde(default = "default_lr")]
    pub lr: f64,
    #[serde(default = "default_max_epochs")]
    pub max_epochs: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec {
            poly_degree: default_poly_degree(),
            l2: default_l2(),
            lr: default_lr(),
            max_epochs: default_max_epochs(),
            tol: default_tol(),
        }
    }
}

fn default_poly_degree() -> usize {
    1
}

fn default_l2() -> f64 {
    1e-4
}

fn default_lr() -> f64 {
    0.5
}

fn default_max_epochs() -> usize {
    5000
}

fn default_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SelectionSpec {
    #[serde(default)]
    pub eval_set: EvalSetSpec,
    /// Use lazy gain evaluation in the greedy loop; selections are identical
    /// to the full scan.
    #[serde(default)]
    pub lazy: bool,
}

/// Which points the coverage estimator averages over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EvalSetSpec {
    #[default]
    Pool,
    Unlabeled,
}
