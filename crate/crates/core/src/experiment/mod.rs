//! Configuration-driven experiments: a TOML file resolves into an [`ExperimentConfig`],
//! [`run`] executes it and writes CSV tables plus a JSON manifest into `output_dir`,
//! and [`report`] re-derives the verdicts from stored tables.
//!
//! Every CSV starts with `# manifest <hash>` and a header row. The content hash is the
//! SHA-256 of the resolved config (without `output_dir`) followed by the bytes of every
//! referenced tree file.

mod config;
mod pipeline;
mod tables;

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::estimators::ThresholdMode;
use crate::function_spaces::SmoothnessParams;
use crate::generic::ProbeDraw;
use crate::rates::{EstimatorSpec, Normalization};

pub use config::{validate_config, validate_config_at, DEFAULT_N_GRID_LOG2};
pub use pipeline::{content_hash, evaluate, report, run, FitResult, ScalingRow, Tables};
pub use tables::{read_risk_csv, MANIFEST_FILE, VERDICTS_FILE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    RateFit,
    ScalingFunction,
    WeakExclusion,
    ProbeSweep,
    DensityRateFit,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::RateFit => "rate_fit",
            Self::ScalingFunction => "scaling_function",
            Self::WeakExclusion => "weak_exclusion",
            Self::ProbeSweep => "probe_sweep",
            Self::DensityRateFit => "density_rate_fit",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Sequence,
    Density,
}

/// Base function `f` of a probe perturbation `f + α·g`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaseSpec {
    Zero,
    DenseSeries { amplitude: f64, seed: u64 },
    SparseSeries { amplitude: f64, seed: u64 },
    TreeFile { path: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TruthSpec {
    /// `base + α·g` with `g` the generic function of the smoothness class.
    GenericG { probe: ProbeDraw, base: BaseSpec },
    ExplicitTreeFile { path: PathBuf },
    /// Constant density 1 on `[0, 1]`.
    UniformDensity,
    /// `1 + amplitude · ψ_{level, position}`.
    CustomBump { level: u32, position: u64, amplitude: f64 },
}

/// Target exponent for a fitted `implied_alpha`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub expected: f64,
    /// Where `expected` comes from, e.g. `generic_alpha(threshold)`.
    pub source: String,
    pub tolerance: f64,
    /// Only `implied_alpha ≤ expected + tolerance` is required.
    pub one_sided: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorEntry {
    pub label: String,
    pub spec: EstimatorSpec,
    pub normalization: Normalization,
    pub expectation: Option<Expectation>,
    pub min_r_squared: Option<f64>,
    /// Bound on `max / min` of `risk · m_n^{s′p}` over the grid.
    pub max_product_ratio: Option<f64>,
}

/// `implied_alpha(above) − implied_alpha(below) ≥ min_gap`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapCheck {
    pub above: String,
    pub below: String,
    pub min_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment_kind", rename_all = "snake_case")]
pub enum Analysis {
    RateFit {
        estimators: Vec<EstimatorEntry>,
        gap: Option<GapCheck>,
    },
    DensityRateFit {
        estimators: Vec<EstimatorEntry>,
        gap: Option<GapCheck>,
    },
    ProbeSweep {
        estimator: EstimatorEntry,
        probe_alphas: Vec<f64>,
        max_spread: f64,
    },
    ScalingFunction {
        p_values: Vec<f64>,
        window: (u32, u32),
        tolerance: f64,
    },
    WeakExclusion {
        eps: f64,
        t_min: u32,
        t_max: u32,
        rel_tolerance: f64,
    },
}

impl Analysis {
    pub fn kind(&self) -> ExperimentKind {
        match self {
            Self::RateFit { .. } => ExperimentKind::RateFit,
            Self::DensityRateFit { .. } => ExperimentKind::DensityRateFit,
            Self::ProbeSweep { .. } => ExperimentKind::ProbeSweep,
            Self::ScalingFunction { .. } => ExperimentKind::ScalingFunction,
            Self::WeakExclusion { .. } => ExperimentKind::WeakExclusion,
        }
    }
}

/// Fully resolved experiment; every default is explicit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Acceptance criterion id carried by every verdict.
    pub criterion: String,
    pub smoothness: SmoothnessParams,
    pub truth: TruthSpec,
    pub model: ModelKind,
    pub n_grid: Vec<u64>,
    pub replicates: u32,
    pub master_seed: u64,
    pub filter: String,
    pub j_max: u32,
    pub output_dir: PathBuf,
    #[serde(flatten)]
    pub analysis: Analysis,
}

impl ExperimentConfig {
    pub fn kind(&self) -> ExperimentKind {
        self.analysis.kind()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub content_hash: String,
    pub config: ExperimentConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|measured − expected| ≤ tolerance`.
    Within,
    /// `measured ≤ expected + tolerance`.
    AtMost,
    /// `measured ≥ expected − tolerance`.
    AtLeast,
}

impl Relation {
    pub fn holds(self, measured: f64, expected: f64, tolerance: f64) -> bool {
        match self {
            Self::Within => (measured - expected).abs() <= tolerance,
            Self::AtMost => measured <= expected + tolerance,
            Self::AtLeast => measured >= expected - tolerance,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Within => "within",
            Self::AtMost => "at_most",
            Self::AtLeast => "at_least",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub criterion: String,
    pub check: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl Verdict {
    pub fn new(criterion: &str, check: impl Into<String>, measured: f64, expected: f64, tolerance: f64, relation: Relation) -> Self {
        Self {
            criterion: criterion.to_string(),
            check: check.into(),
            measured,
            expected,
            tolerance,
            relation,
            // NaN measurements never pass.
            pass: relation.holds(measured, expected, tolerance),
        }
    }
}

/// At most six decimals, trailing zeros dropped.
fn short(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tol = short(self.tolerance);
        let rel = match self.relation {
            Relation::Within => format!("{:.4} ± {tol}", self.expected),
            Relation::AtMost if self.tolerance == 0.0 => format!("≤ {:.4}", self.expected),
            Relation::AtMost => format!("≤ {:.4} + {tol}", self.expected),
            Relation::AtLeast if self.tolerance == 0.0 => format!("≥ {:.4}", self.expected),
            Relation::AtLeast => format!("≥ {:.4} − {tol}", self.expected),
        };
        write!(
            f,
            "[criterion {}] {} {}: measured {:.4}, expected {}",
            self.criterion,
            if self.pass { "PASS" } else { "FAIL" },
            self.check,
            self.measured,
            rel
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub manifest: Manifest,
    /// Emitted CSV files, in write order.
    pub tables: Vec<PathBuf>,
    pub verdicts: Vec<Verdict>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| !v.pass)
    }
}

/// Estimator ids accepted in configs, as produced by [`EstimatorSpec::id`].
pub const ESTIMATOR_KINDS: [&str; 7] = [
    "zero",
    "linear.projection",
    "linear.pinsker",
    "threshold.hard",
    "threshold.soft",
    "density.linear",
    "density.threshold",
];

pub(crate) fn threshold_mode(kind: &str) -> Option<ThresholdMode> {
    match kind {
        "threshold.hard" => Some(ThresholdMode::Hard),
        "threshold.soft" => Some(ThresholdMode::Soft),
        _ => None,
    }
}
