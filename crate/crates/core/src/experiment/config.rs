//! TOML dialect and resolution into [`ExperimentConfig`].
//!
//! ```toml
//! experiment_kind = "rate_fit"
//! criterion = "1"
//! n_grid_log2 = [10, 18]        # or n_grid = [1024, 2048, ...]
//! replicates = 32
//! master_seed = 1
//!
//! [smoothness]
//! s = 2.0
//! r = 2.0
//! p = 2.0                       # loss exponent, default 2
//!
//! [truth]
//! kind = "generic_g"
//! probe_alpha = 0.7
//! base = { kind = "dense_series", amplitude = 256.0, seed = 12345 }
//!
//! [[estimator]]
//! kind = "threshold.hard"
//! expect_family = "threshold"
//! min_r_squared = 0.98
//! ```

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::{
    threshold_mode, Analysis, BaseSpec, EstimatorEntry, ExperimentConfig, ExperimentKind, Expectation, GapCheck,
    ModelKind, TruthSpec, ESTIMATOR_KINDS,
};
use crate::dyadic::Dimension;
use crate::error::{Error, Result};
use crate::estimators::ThresholdConfig;
use crate::function_spaces::{default_q, fine_index, SmoothnessParams};
use crate::generic::ProbeDraw;
use crate::rates::{generic_alpha, Cutoff, EstimatorSpec, GenericFamily, ModelSpec, Normalization};
use crate::wavelet::WaveletFilter;

/// Grid `2^10, …, 2^18` used when neither `n_grid` nor `n_grid_log2` is given.
pub const DEFAULT_N_GRID_LOG2: (u32, u32) = (10, 18);
const DEFAULT_REPLICATES: u32 = 32;
const DEFAULT_J_MAX: u32 = 16;
const DEFAULT_OUTPUT_DIR: &str = "genrates-out";
const DEFAULT_TOLERANCE: f64 = 0.08;
const DEFAULT_PINSKER_ORDER: f64 = 2.0;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment_kind: ExperimentKind,
    criterion: Option<String>,
    smoothness: RawSmoothness,
    truth: Option<RawTruth>,
    estimator: Option<OneOrMany<RawEstimator>>,
    model: Option<ModelKind>,
    n_grid: Option<Vec<u64>>,
    n_grid_log2: Option<Vec<u32>>,
    replicates: Option<u32>,
    master_seed: Option<u64>,
    filter: Option<String>,
    j_max: Option<u32>,
    output_dir: Option<PathBuf>,
    analysis: Option<RawAnalysis>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSmoothness {
    s: f64,
    r: f64,
    p: Option<f64>,
    d: Option<u32>,
    #[serde(default = "default_q", with = "fine_index")]
    q: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            Self::One(v) => vec![v],
            Self::Many(v) => v,
        }
    }
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawTruth {
    GenericG {
        probe_alpha: Option<f64>,
        probe_seed: Option<u64>,
        base: Option<RawBase>,
    },
    ExplicitTreeFile {
        path: PathBuf,
    },
    UniformDensity,
    CustomBump {
        level: u32,
        position: Option<u64>,
        amplitude: f64,
    },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawBase {
    Zero,
    DenseSeries { amplitude: f64, seed: Option<u64> },
    SparseSeries { amplitude: f64, seed: Option<u64> },
    TreeFile { path: PathBuf },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawCutoff {
    Number(f64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEstimator {
    kind: String,
    label: Option<String>,
    kappa: Option<f64>,
    m_n: Option<RawCutoff>,
    pinsker_order: Option<f64>,
    normalization: Option<Normalization>,
    /// `false` disables the implied-alpha check.
    check_rate: Option<bool>,
    expect_family: Option<GenericFamily>,
    expected: Option<f64>,
    tolerance: Option<f64>,
    one_sided: Option<bool>,
    min_r_squared: Option<f64>,
    max_product_ratio: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawAnalysis {
    probe_alphas: Option<Vec<f64>>,
    max_spread: Option<f64>,
    p_values: Option<Vec<f64>>,
    window: Option<Vec<u32>>,
    tolerance: Option<f64>,
    eps: Option<f64>,
    t_min: Option<u32>,
    t_max: Option<u32>,
    rel_tolerance: Option<f64>,
    gap: Option<RawGap>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGap {
    above: String,
    below: String,
    min_gap: f64,
}

fn constraint(field: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Constraint {
        field: field.into(),
        reason: reason.into(),
    }
}

fn line_of(raw: &str, offset: usize) -> usize {
    raw[..offset.min(raw.len())].matches('\n').count() + 1
}

/// Parses and resolves a config, reading relative tree paths against the working directory.
pub fn validate_config(raw: &str) -> Result<ExperimentConfig> {
    validate_config_at(raw, Path::new("."))
}

/// Parses and resolves a config; relative tree paths are taken against `base_dir`.
/// `output_dir` is kept as written.
pub fn validate_config_at(raw: &str, base_dir: &Path) -> Result<ExperimentConfig> {
    let parsed: RawConfig = toml::from_str(raw).map_err(|e| Error::Parse {
        line: e.span().map(|s| line_of(raw, s.start)).unwrap_or(0),
        message: e.message().to_string(),
    })?;
    resolve(parsed, base_dir)
}

fn resolve(raw: RawConfig, base_dir: &Path) -> Result<ExperimentConfig> {
    let kind = raw.experiment_kind;
    let smoothness = resolve_smoothness(&raw.smoothness)?;
    let d = smoothness.d;

    let n_grid = match (raw.n_grid, raw.n_grid_log2) {
        (Some(_), Some(_)) => return Err(constraint("n_grid", "give either n_grid or n_grid_log2, not both")),
        (Some(g), None) => g,
        (None, Some(b)) => {
            if b.len() != 2 || b[0] > b[1] || b[1] > 40 {
                return Err(constraint("n_grid_log2", "expected [lo, hi] with lo ≤ hi ≤ 40"));
            }
            (b[0]..=b[1]).map(|e| 1u64 << e).collect()
        }
        (None, None) => (DEFAULT_N_GRID_LOG2.0..=DEFAULT_N_GRID_LOG2.1).map(|e| 1u64 << e).collect(),
    };
    if n_grid.is_empty() || n_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(constraint("n_grid", "must be nonempty and strictly increasing"));
    }
    let uses_thresholds = matches!(kind, ExperimentKind::RateFit | ExperimentKind::ProbeSweep | ExperimentKind::DensityRateFit);
    if uses_thresholds && n_grid[0] < 2 {
        return Err(constraint("n_grid", "thresholds need n ≥ 2"));
    }

    let replicates = raw.replicates.unwrap_or(DEFAULT_REPLICATES);
    if replicates < 2 {
        return Err(constraint("replicates", "need R ≥ 2 to report a standard error"));
    }
    let master_seed = raw.master_seed.unwrap_or(0);
    let j_max = raw.j_max.unwrap_or(DEFAULT_J_MAX);
    if j_max == 0 || j_max * d.get() > 24 {
        return Err(constraint("j_max", format!("{j_max} outside 1..={}", 24 / d.get())));
    }
    let filter = match raw.filter {
        Some(name) => WaveletFilter::by_name(&name).map_err(|e| constraint("filter", e.to_string()))?,
        None => WaveletFilter::for_smoothness(smoothness.s).map_err(|e| constraint("filter", e.to_string()))?,
    };
    let filter = filter.name().to_string();

    let model = raw.model.unwrap_or(match kind {
        ExperimentKind::DensityRateFit => ModelKind::Density,
        _ => ModelKind::Sequence,
    });
    if kind == ExperimentKind::DensityRateFit && model != ModelKind::Density {
        return Err(constraint("model", "density_rate_fit uses the density model"));
    }

    let truth = resolve_truth(raw.truth, kind, master_seed, d, base_dir)?;
    if let TruthSpec::CustomBump { level, .. } = &truth {
        if *level > j_max {
            return Err(constraint("truth.level", format!("{level} exceeds j_max = {j_max}")));
        }
    }
    if d == Dimension::Two && model == ModelKind::Density {
        return Err(constraint("smoothness.d", "the density model is one-dimensional"));
    }

    let a = raw.analysis.unwrap_or_default();
    check_analysis_fields(&a, kind)?;
    let estimators = raw.estimator.map(OneOrMany::into_vec);
    if estimators.is_some() && matches!(kind, ExperimentKind::ScalingFunction | ExperimentKind::WeakExclusion) {
        return Err(constraint("estimator", format!("{} takes no estimator", kind.name())));
    }

    let model_spec = match model {
        ModelKind::Sequence => ModelSpec::Sequence { j_max },
        ModelKind::Density => ModelSpec::Density {
            filter: WaveletFilter::by_name(&filter)?,
            j_max,
        },
    };

    let analysis = match kind {
        ExperimentKind::RateFit | ExperimentKind::DensityRateFit => {
            let default_kind = if kind == ExperimentKind::RateFit { "threshold.hard" } else { "density.threshold" };
            let raws = estimators.unwrap_or_else(|| vec![default_estimator(default_kind)]);
            if raws.is_empty() {
                return Err(constraint("estimator", "at least one estimator is required"));
            }
            let entries = raws
                .into_iter()
                .enumerate()
                .map(|(i, e)| resolve_estimator(e, i, &smoothness, &model_spec, true))
                .collect::<Result<Vec<_>>>()?;
            let mut seen = HashSet::new();
            for e in &entries {
                if !seen.insert(e.label.clone()) {
                    return Err(constraint("estimator.label", format!("duplicate label `{}`", e.label)));
                }
            }
            let gap = a
                .gap
                .map(|g| {
                    for (field, label) in [("analysis.gap.above", &g.above), ("analysis.gap.below", &g.below)] {
                        if !seen.contains(label) {
                            return Err(constraint(field, format!("no estimator labelled `{label}`")));
                        }
                    }
                    Ok(GapCheck {
                        above: g.above,
                        below: g.below,
                        min_gap: g.min_gap,
                    })
                })
                .transpose()?;
            if kind == ExperimentKind::RateFit {
                Analysis::RateFit { estimators: entries, gap }
            } else {
                Analysis::DensityRateFit { estimators: entries, gap }
            }
        }
        ExperimentKind::ProbeSweep => {
            if !matches!(truth, TruthSpec::GenericG { .. }) {
                return Err(constraint("truth.kind", "probe_sweep perturbs generic_g"));
            }
            let mut raws = estimators.unwrap_or_else(|| vec![default_estimator("threshold.hard")]);
            if raws.len() != 1 {
                return Err(constraint("estimator", "probe_sweep takes exactly one estimator"));
            }
            let estimator = resolve_estimator(raws.remove(0), 0, &smoothness, &model_spec, false)?;
            let probe_alphas = a.probe_alphas.unwrap_or_else(|| vec![-1.0, -0.5, 0.5, 1.0]);
            if probe_alphas.len() < 2 {
                return Err(constraint("analysis.probe_alphas", "need at least two probes"));
            }
            if let Some(bad) = probe_alphas.iter().find(|a| !(a.abs() <= 1.0)) {
                return Err(constraint("analysis.probe_alphas", format!("{bad} violates |α| ≤ 1")));
            }
            Analysis::ProbeSweep {
                estimator,
                probe_alphas,
                max_spread: positive("analysis.max_spread", a.max_spread.unwrap_or(0.05))?,
            }
        }
        ExperimentKind::ScalingFunction => {
            let p_values = a.p_values.unwrap_or_else(|| vec![1.0, 2.0, 4.0]);
            if p_values.is_empty() || p_values.iter().any(|p| !(*p > 0.0 && p.is_finite())) {
                return Err(constraint("analysis.p_values", "need finite positive exponents"));
            }
            let window = match a.window.as_deref() {
                None => (4, 14.min(j_max)),
                Some([lo, hi]) => (*lo, *hi),
                Some(_) => return Err(constraint("analysis.window", "expected [lo, hi]")),
            };
            if window.1 < window.0 + 2 || window.1 > j_max {
                return Err(constraint(
                    "analysis.window",
                    format!("({}, {}) must span at least 3 levels within j_max = {j_max}", window.0, window.1),
                ));
            }
            Analysis::ScalingFunction {
                p_values,
                window,
                tolerance: positive("analysis.tolerance", a.tolerance.unwrap_or(0.1))?,
            }
        }
        ExperimentKind::WeakExclusion => {
            if !matches!(truth, TruthSpec::GenericG { .. }) {
                return Err(constraint("truth.kind", "weak_exclusion is a statement about generic_g"));
            }
            let t_min = a.t_min.unwrap_or(10);
            let t_max = a.t_max.unwrap_or(30);
            if t_max < t_min + 2 || t_min == 0 {
                return Err(constraint("analysis.t_max", "need 1 ≤ t_min and at least three t values"));
            }
            Analysis::WeakExclusion {
                eps: positive("analysis.eps", a.eps.unwrap_or(0.1))?,
                t_min,
                t_max,
                rel_tolerance: positive("analysis.rel_tolerance", a.rel_tolerance.unwrap_or(0.2))?,
            }
        }
    };

    Ok(ExperimentConfig {
        criterion: raw.criterion.unwrap_or_else(|| kind.name().to_string()),
        smoothness,
        truth,
        model,
        n_grid,
        replicates,
        master_seed,
        filter,
        j_max,
        output_dir: raw.output_dir.unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
        analysis,
    })
}

fn positive(field: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(constraint(field, format!("{v} must be finite and positive")))
    }
}

fn resolve_smoothness(raw: &RawSmoothness) -> Result<SmoothnessParams> {
    let d = Dimension::try_from(raw.d.unwrap_or(1)).map_err(|e| constraint("smoothness.d", e.to_string()))?;
    let params = SmoothnessParams {
        s: raw.s,
        r: raw.r,
        q: raw.q,
        p: raw.p.unwrap_or(2.0),
        d,
    };
    params.validate().map_err(|e| match e {
        Error::InvalidParameter { name, reason } => constraint(format!("smoothness.{name}"), reason),
        other => other,
    })?;
    Ok(params)
}

fn resolve_path(field: &str, path: PathBuf, base_dir: &Path) -> Result<PathBuf> {
    let full = if path.is_absolute() { path } else { base_dir.join(path) };
    if !full.is_file() {
        return Err(constraint(field, format!("file {} does not exist", full.display())));
    }
    Ok(full)
}

fn resolve_truth(raw: Option<RawTruth>, kind: ExperimentKind, master_seed: u64, d: Dimension, base_dir: &Path) -> Result<TruthSpec> {
    let raw = raw.unwrap_or(match kind {
        ExperimentKind::DensityRateFit => RawTruth::UniformDensity,
        _ => RawTruth::GenericG {
            probe_alpha: None,
            probe_seed: None,
            base: None,
        },
    });
    Ok(match raw {
        RawTruth::GenericG {
            probe_alpha,
            probe_seed,
            base,
        } => {
            let seed = probe_seed.unwrap_or(master_seed);
            let probe = match probe_alpha {
                Some(a) => ProbeDraw::new(a, seed).map_err(|e| constraint("truth.probe_alpha", e.to_string()))?,
                None => ProbeDraw::sample(seed),
            };
            let base = match base.unwrap_or(RawBase::Zero) {
                RawBase::Zero => BaseSpec::Zero,
                RawBase::DenseSeries { amplitude, seed } => BaseSpec::DenseSeries {
                    amplitude: finite("truth.base.amplitude", amplitude)?,
                    seed: seed.unwrap_or(master_seed),
                },
                RawBase::SparseSeries { amplitude, seed } => BaseSpec::SparseSeries {
                    amplitude: finite("truth.base.amplitude", amplitude)?,
                    seed: seed.unwrap_or(master_seed),
                },
                RawBase::TreeFile { path } => BaseSpec::TreeFile {
                    path: resolve_path("truth.base.path", path, base_dir)?,
                },
            };
            TruthSpec::GenericG { probe, base }
        }
        RawTruth::ExplicitTreeFile { path } => TruthSpec::ExplicitTreeFile {
            path: resolve_path("truth.path", path, base_dir)?,
        },
        RawTruth::UniformDensity => TruthSpec::UniformDensity,
        RawTruth::CustomBump {
            level,
            position,
            amplitude,
        } => {
            let position = position.unwrap_or(0);
            let bits = level * d.get();
            if bits >= 63 || position >= 1u64 << bits {
                return Err(constraint("truth.position", format!("{position} outside 0..2^{bits}")));
            }
            TruthSpec::CustomBump {
                level,
                position,
                amplitude: finite("truth.amplitude", amplitude)?,
            }
        }
    })
}

fn finite(field: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(constraint(field, "must be finite"))
    }
}

fn default_estimator(kind: &str) -> RawEstimator {
    RawEstimator {
        kind: kind.to_string(),
        label: None,
        kappa: None,
        m_n: None,
        pinsker_order: None,
        normalization: None,
        check_rate: None,
        expect_family: None,
        expected: None,
        tolerance: None,
        one_sided: None,
        min_r_squared: None,
        max_product_ratio: None,
    }
}

fn natural_family(spec: &EstimatorSpec) -> Option<GenericFamily> {
    match spec {
        EstimatorSpec::Zero => None,
        EstimatorSpec::Projection { .. } | EstimatorSpec::Pinsker { .. } | EstimatorSpec::DensityLinear { .. } => {
            Some(GenericFamily::Linear)
        }
        EstimatorSpec::Threshold { .. } | EstimatorSpec::DensityThreshold => Some(GenericFamily::Threshold),
    }
}

fn family_name(f: GenericFamily) -> &'static str {
    match f {
        GenericFamily::Linear => "linear",
        GenericFamily::Threshold => "threshold",
        GenericFamily::Limited => "limited",
        GenericFamily::Elitist => "elitist",
    }
}

fn is_label(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-'))
}

/// `default_expectation`: fill the expectation from the estimator's natural family
/// when the config names none.
fn resolve_estimator(
    raw: RawEstimator,
    index: usize,
    params: &SmoothnessParams,
    model: &ModelSpec,
    default_expectation: bool,
) -> Result<EstimatorEntry> {
    let field = |name: &str| format!("estimator[{index}].{name}");
    if !ESTIMATOR_KINDS.contains(&raw.kind.as_str()) {
        return Err(constraint(
            field("kind"),
            format!("unknown estimator `{}`; expected one of {}", raw.kind, ESTIMATOR_KINDS.join(", ")),
        ));
    }
    let cutoff = match raw.m_n {
        None => Cutoff::Adaptive(*params),
        Some(RawCutoff::Text(t)) if t == "adaptive" => Cutoff::Adaptive(*params),
        Some(RawCutoff::Text(t)) => return Err(constraint(field("m_n"), format!("`{t}` is neither \"adaptive\" nor a number"))),
        Some(RawCutoff::Number(m)) => Cutoff::Fixed(positive(&field("m_n"), m)?),
    };
    let uses_cutoff = matches!(raw.kind.as_str(), "linear.projection" | "linear.pinsker" | "density.linear");
    let unused = [
        ("kappa", raw.kappa.is_some() && threshold_mode(&raw.kind).is_none()),
        ("m_n", matches!(cutoff, Cutoff::Fixed(_)) && !uses_cutoff),
        ("pinsker_order", raw.pinsker_order.is_some() && raw.kind != "linear.pinsker"),
        ("max_product_ratio", raw.max_product_ratio.is_some() && !uses_cutoff),
    ];
    if let Some((name, _)) = unused.iter().find(|(_, bad)| *bad) {
        return Err(constraint(field(name), format!("does not apply to {}", raw.kind)));
    }
    let spec = match raw.kind.as_str() {
        "zero" => EstimatorSpec::Zero,
        "linear.projection" => EstimatorSpec::Projection { cutoff },
        "linear.pinsker" => EstimatorSpec::Pinsker {
            cutoff,
            order: positive(&field("pinsker_order"), raw.pinsker_order.unwrap_or(DEFAULT_PINSKER_ORDER))?,
        },
        "density.linear" => EstimatorSpec::DensityLinear { cutoff },
        "density.threshold" => EstimatorSpec::DensityThreshold,
        k => {
            let kappa = raw.kappa.unwrap_or(ThresholdConfig::DEFAULT_KAPPA);
            positive(&field("kappa"), kappa)?;
            EstimatorSpec::Threshold {
                kappa,
                mode: threshold_mode(k).expect("kind checked"),
            }
        }
    };
    model.check(&spec).map_err(|e| constraint(field("kind"), e.to_string()))?;

    let label = raw.label.unwrap_or_else(|| spec.id().to_string());
    if !is_label(&label) {
        return Err(constraint(field("label"), format!("`{label}` may only use [A-Za-z0-9._-]")));
    }

    let check_rate = raw.check_rate.unwrap_or(true);
    if !check_rate && (raw.expected.is_some() || raw.expect_family.is_some()) {
        return Err(constraint(field("check_rate"), "false contradicts a given expectation"));
    }
    let family = raw.expect_family.or(if check_rate && default_expectation && raw.expected.is_none() {
        natural_family(&spec)
    } else {
        None
    });
    if raw.expected.is_some() && raw.expect_family.is_some() {
        return Err(constraint(field("expected"), "give either expected or expect_family, not both"));
    }
    let tolerance = positive(&field("tolerance"), raw.tolerance.unwrap_or(DEFAULT_TOLERANCE))?;
    let (expectation, family_norm) = match (raw.expected, family) {
        (Some(e), _) => (
            Some(Expectation {
                expected: finite(&field("expected"), e)?,
                source: "explicit".to_string(),
                tolerance,
                one_sided: raw.one_sided.unwrap_or(false),
            }),
            None,
        ),
        (None, Some(f)) => {
            let regime = generic_alpha(f, params);
            (
                Some(Expectation {
                    expected: regime.alpha,
                    source: format!("generic_alpha({})", family_name(f)),
                    tolerance,
                    one_sided: raw
                        .one_sided
                        .unwrap_or(matches!(f, GenericFamily::Limited | GenericFamily::Elitist)),
                }),
                Some(regime.normalization),
            )
        }
        (None, None) => (None, None),
    };
    let normalization = raw.normalization.or(family_norm).unwrap_or(match spec {
        EstimatorSpec::Threshold { .. } | EstimatorSpec::DensityThreshold => Normalization::NOverLogN,
        _ => Normalization::N,
    });
    if let Some(r2) = raw.min_r_squared {
        if !(0.0..=1.0).contains(&r2) {
            return Err(constraint(field("min_r_squared"), format!("{r2} outside [0, 1]")));
        }
    }
    let max_product_ratio = raw
        .max_product_ratio
        .map(|m| {
            if m >= 1.0 && m.is_finite() {
                Ok(m)
            } else {
                Err(constraint(field("max_product_ratio"), format!("{m} must be at least 1")))
            }
        })
        .transpose()?;
    Ok(EstimatorEntry {
        label,
        spec,
        normalization,
        expectation,
        min_r_squared: raw.min_r_squared,
        max_product_ratio,
    })
}

fn check_analysis_fields(a: &RawAnalysis, kind: ExperimentKind) -> Result<()> {
    let present = [
        ("probe_alphas", a.probe_alphas.is_some()),
        ("max_spread", a.max_spread.is_some()),
        ("p_values", a.p_values.is_some()),
        ("window", a.window.is_some()),
        ("tolerance", a.tolerance.is_some()),
        ("eps", a.eps.is_some()),
        ("t_min", a.t_min.is_some()),
        ("t_max", a.t_max.is_some()),
        ("rel_tolerance", a.rel_tolerance.is_some()),
        ("gap", a.gap.is_some()),
    ];
    let allowed: &[&str] = match kind {
        ExperimentKind::RateFit | ExperimentKind::DensityRateFit => &["gap"],
        ExperimentKind::ProbeSweep => &["probe_alphas", "max_spread"],
        ExperimentKind::ScalingFunction => &["p_values", "window", "tolerance"],
        ExperimentKind::WeakExclusion => &["eps", "t_min", "t_max", "rel_tolerance"],
    };
    match present.iter().find(|(name, set)| *set && !allowed.contains(name)) {
        Some((name, _)) => Err(constraint(format!("analysis.{name}"), format!("does not apply to {}", kind.name()))),
        None => Ok(()),
    }
}
