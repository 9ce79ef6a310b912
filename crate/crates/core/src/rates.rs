//! Theoretical rate exponents, the Monte Carlo risk engine and log-log slope fits.
//!
//! A rate is written `x^{−αp}` with `x = n` or `x = n / ln n`. The weak scaling
//! exponent `α̃ = 2α` belongs to the `√(n / ln n)` parametrization of the same number.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::CoefficientTree;
use crate::error::{invalid, Error, Result};
use crate::estimators::{
    choose_mn, density_linear_estimate, density_threshold_estimate, linear_estimate, projection_levels,
    threshold_estimate, ThresholdConfig, ThresholdMode, WeightProfile,
};
use crate::function_spaces::SmoothnessParams;
use crate::models::{
    derive_seed, empirical_coefficients, replicate_counter, simulate_sequence, DensitySampler,
};
use crate::regression::ols;
use crate::wavelet::{lp_norm_pow, synthesize, WaveletFilter};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateFamily {
    Minimax,
    LinearMinimax,
    GenericLinear,
    GenericThreshold,
    LimitedLower,
    ElitistLower,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Dense,
    Sparse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    N,
    NOverLogN,
}

impl Normalization {
    /// `n` or `n / ln n`.
    pub fn apply(self, n: u64) -> f64 {
        let nf = n as f64;
        match self {
            Self::N => nf,
            Self::NOverLogN => nf / nf.ln(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::N => "n",
            Self::NOverLogN => "n_over_log_n",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateRegime {
    pub family: RateFamily,
    pub branch: Branch,
    pub alpha: f64,
    pub alpha_tilde: f64,
    pub s_prime: f64,
    pub normalization: Normalization,
}

impl RateRegime {
    fn new(family: RateFamily, branch: Branch, alpha: f64, params: &SmoothnessParams, normalization: Normalization) -> Self {
        let d = params.d.as_f64();
        Self {
            family,
            branch,
            alpha,
            alpha_tilde: 2.0 * alpha,
            s_prime: params.s - (d / params.r - d / params.p).max(0.0),
            normalization,
        }
    }

    /// `x^{−αp}`.
    pub fn rate(&self, n: u64, p: f64) -> f64 {
        self.normalization.apply(n).powf(-self.alpha * p)
    }
}

/// Minimax exponent: dense when `r > dp/(2s+d)` (normalization `n`), else sparse with `n / ln n`.
pub fn minimax_rate(params: &SmoothnessParams, n: u64) -> (RateRegime, f64) {
    let mut regime = threshold_like(RateFamily::Minimax, params);
    if regime.branch == Branch::Dense {
        regime.normalization = Normalization::N;
    }
    (regime, regime.rate(n, params.p))
}

/// Linear minimax exponent: dense when `r > p`, else `s′ = s − d/r + d/p` with `n / ln n`.
pub fn linear_minimax_rate(params: &SmoothnessParams, n: u64) -> (RateRegime, f64) {
    let d = params.d.as_f64();
    let regime = if params.r > params.p {
        RateRegime::new(
            RateFamily::LinearMinimax,
            Branch::Dense,
            params.s / (2.0 * params.s + d),
            params,
            Normalization::N,
        )
    } else {
        let sp = params.sparse_smoothness();
        RateRegime::new(RateFamily::LinearMinimax, Branch::Sparse, sp / (2.0 * sp + d), params, Normalization::NOverLogN)
    };
    (regime, regime.rate(n, params.p))
}

fn threshold_like(family: RateFamily, params: &SmoothnessParams) -> RateRegime {
    let d = params.d.as_f64();
    let s = params.s;
    if params.r > params.p * d / (2.0 * s + d) {
        RateRegime::new(family, Branch::Dense, s / (2.0 * s + d), params, Normalization::NOverLogN)
    } else {
        let alpha = params.sparse_smoothness() / (2.0 * (s - params.d_over_r()) + d);
        RateRegime::new(family, Branch::Sparse, alpha, params, Normalization::NOverLogN)
    }
}

fn linear_like(family: RateFamily, params: &SmoothnessParams) -> RateRegime {
    let d = params.d.as_f64();
    if params.r >= params.p {
        RateRegime::new(family, Branch::Dense, params.s / (2.0 * params.s + d), params, Normalization::N)
    } else {
        let sp = params.sparse_smoothness();
        RateRegime::new(family, Branch::Sparse, sp / (2.0 * sp + d), params, Normalization::N)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GenericFamily {
    Linear,
    Threshold,
    Limited,
    Elitist,
}

/// Exponent attained for almost every function of the Besov ball.
pub fn generic_alpha(family: GenericFamily, params: &SmoothnessParams) -> RateRegime {
    match family {
        GenericFamily::Linear => linear_like(RateFamily::GenericLinear, params),
        GenericFamily::Limited => linear_like(RateFamily::LimitedLower, params),
        GenericFamily::Threshold => threshold_like(RateFamily::GenericThreshold, params),
        GenericFamily::Elitist => threshold_like(RateFamily::ElitistLower, params),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiskRow {
    pub n: u64,
    pub empirical_risk: f64,
    pub std_error: f64,
    pub replicates: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RiskTable {
    rows: Vec<RiskRow>,
    loss_p: f64,
    estimator_id: String,
    truth_id: String,
}

impl RiskTable {
    pub fn new(rows: Vec<RiskRow>, loss_p: f64, estimator_id: impl Into<String>, truth_id: impl Into<String>) -> Result<Self> {
        if rows.windows(2).any(|w| w[1].n <= w[0].n) {
            return Err(invalid("rows", "n must be strictly increasing"));
        }
        if let Some(r) = rows.iter().find(|r| !(r.empirical_risk >= 0.0) || !(r.std_error >= 0.0)) {
            return Err(invalid("rows", format!("negative risk or std_error at n = {}", r.n)));
        }
        Ok(Self {
            rows,
            loss_p,
            estimator_id: estimator_id.into(),
            truth_id: truth_id.into(),
        })
    }

    pub fn rows(&self) -> &[RiskRow] {
        &self.rows
    }

    pub fn loss_p(&self) -> f64 {
        self.loss_p
    }

    pub fn estimator_id(&self) -> &str {
        &self.estimator_id
    }

    pub fn truth_id(&self) -> &str {
        &self.truth_id
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub normalization: Normalization,
    pub implied_alpha: f64,
    /// Some risk was non-positive and replaced by `1e−300`.
    pub clamped: bool,
}

const RISK_FLOOR: f64 = 1e-300;

/// OLS of `ln risk` on `ln x`; `implied_alpha = −slope / p`.
pub fn fit_slope(table: &RiskTable, normalization: Normalization) -> Result<SlopeFit> {
    if table.rows.len() < 4 {
        return Err(Error::Precondition(format!(
            "slope fit needs at least 4 rows, got {}",
            table.rows.len()
        )));
    }
    let mut clamped = false;
    let x: Vec<f64> = table.rows.iter().map(|r| normalization.apply(r.n).ln()).collect();
    let y: Vec<f64> = table
        .rows
        .iter()
        .map(|r| {
            if r.empirical_risk > 0.0 {
                r.empirical_risk.ln()
            } else {
                clamped = true;
                RISK_FLOOR.ln()
            }
        })
        .collect();
    let fit = ols(&x, &y).ok_or_else(|| Error::Precondition("degenerate n grid".into()))?;
    Ok(SlopeFit {
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        normalization,
        implied_alpha: -fit.slope / table.loss_p,
        clamped,
    })
}

/// How the cutoff `m_n` of a linear rule is chosen at each `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cutoff {
    Fixed(f64),
    /// Bias-variance schedule for the given class.
    Adaptive(SmoothnessParams),
}

impl Cutoff {
    pub fn m_n(&self, n: u64) -> f64 {
        match self {
            Self::Fixed(m) => *m,
            Self::Adaptive(params) => choose_mn(params, n),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorSpec {
    /// Every wavelet coefficient set to zero; the scaling coefficient is kept.
    Zero,
    Projection { cutoff: Cutoff },
    Pinsker { cutoff: Cutoff, order: f64 },
    Threshold { kappa: f64, mode: ThresholdMode },
    DensityLinear { cutoff: Cutoff },
    DensityThreshold,
}

impl EstimatorSpec {
    pub fn id(&self) -> &'static str {
        match self {
            Self::Zero => "zero",
            Self::Projection { .. } => "linear.projection",
            Self::Pinsker { .. } => "linear.pinsker",
            Self::Threshold { mode: ThresholdMode::Hard, .. } => "threshold.hard",
            Self::Threshold { mode: ThresholdMode::Soft, .. } => "threshold.soft",
            Self::DensityLinear { .. } => "density.linear",
            Self::DensityThreshold => "density.threshold",
        }
    }

    pub fn is_density(&self) -> bool {
        matches!(self, Self::DensityLinear { .. } | Self::DensityThreshold)
    }

    pub fn is_sequence(&self) -> bool {
        matches!(self, Self::Projection { .. } | Self::Pinsker { .. } | Self::Threshold { .. })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelSpec {
    /// Gaussian sequence model observed on levels `0..=j_max`.
    Sequence { j_max: u32 },
    /// I.i.d. sample from the truth read as a density; coefficients up to `j_max`.
    Density { filter: WaveletFilter, j_max: u32 },
}

impl ModelSpec {
    pub fn check(&self, estimator: &EstimatorSpec) -> Result<()> {
        match self {
            Self::Sequence { .. } if estimator.is_density() => Err(Error::Incompatible(format!(
                "{} needs density observations, model is the sequence model",
                estimator.id()
            ))),
            Self::Density { .. } if estimator.is_sequence() => Err(Error::Incompatible(format!(
                "{} needs sequence observations, model is the density model",
                estimator.id()
            ))),
            _ => Ok(()),
        }
    }
}

/// `L^p` loss evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct LossSpec {
    pub p: f64,
    /// Filter used to synthesize error trees for `p ≠ 2`.
    pub filter: WaveletFilter,
    /// Quadrature grid resolution above the error tree depth.
    pub grid_offset: u32,
}

impl LossSpec {
    pub const DEFAULT_GRID_OFFSET: u32 = 6;

    pub fn new(p: f64, filter: WaveletFilter) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(invalid("p", format!("{p} violates 1 ≤ p < ∞")));
        }
        Ok(Self {
            p,
            filter,
            grid_offset: Self::DEFAULT_GRID_OFFSET,
        })
    }

    /// `‖error‖_p^p`: Parseval for `p = 2`, grid quadrature otherwise.
    pub fn loss(&self, error: &CoefficientTree) -> Result<f64> {
        if self.p == 2.0 {
            return Ok(error.energy());
        }
        let grid = synthesize(error, &self.filter, error.j_max() + self.grid_offset)?;
        lp_norm_pow(&grid, self.p)
    }
}

fn estimate_once(
    truth: &CoefficientTree,
    estimator: &EstimatorSpec,
    model: &ModelSpec,
    sampler: Option<&DensitySampler>,
    n: u64,
    seed: u64,
) -> Result<CoefficientTree> {
    match model {
        ModelSpec::Sequence { j_max } => {
            let obs = simulate_sequence(truth, n, *j_max, seed)?;
            match estimator {
                EstimatorSpec::Zero => Ok(obs.y.truncated(0)),
                EstimatorSpec::Projection { cutoff } => {
                    linear_estimate(&obs, &WeightProfile::projection(cutoff.m_n(n))?)
                }
                EstimatorSpec::Pinsker { cutoff, order } => {
                    linear_estimate(&obs, &WeightProfile::pinsker(cutoff.m_n(n), *order)?)
                }
                EstimatorSpec::Threshold { kappa, mode } => {
                    threshold_estimate(&obs, &ThresholdConfig::new(*kappa, *mode, n)?)
                }
                _ => unreachable!("checked by ModelSpec::check"),
            }
        }
        ModelSpec::Density { filter, j_max } => {
            let sampler = sampler.expect("density model has a sampler");
            let beta = empirical_coefficients(&sampler.sample(n, seed)?, filter, *j_max)?;
            match estimator {
                EstimatorSpec::Zero => Ok(beta.truncated(0)),
                EstimatorSpec::DensityLinear { cutoff } => {
                    Ok(density_linear_estimate(&beta, projection_levels(cutoff.m_n(n))))
                }
                EstimatorSpec::DensityThreshold => density_threshold_estimate(&beta, n),
                _ => unreachable!("checked by ModelSpec::check"),
            }
        }
    }
}

/// Mean and standard error of `‖f̂ − f‖_p^p` over `replicates` runs at each `n`.
///
/// Replicate `rep` at grid position `i` uses `derive_seed(master_seed, replicate_counter(i, rep))`.
/// Runs execute on the rayon pool; results are reduced in `(n, rep)` order, so the
/// table does not depend on scheduling.
pub fn monte_carlo_risk(
    truth: &CoefficientTree,
    estimator: &EstimatorSpec,
    model: &ModelSpec,
    n_grid: &[u64],
    replicates: u32,
    loss: &LossSpec,
    master_seed: u64,
) -> Result<RiskTable> {
    if replicates < 2 {
        return Err(invalid("replicates", "need at least 2"));
    }
    if n_grid.is_empty() || n_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("n_grid", "must be nonempty and strictly increasing"));
    }
    model.check(estimator)?;
    let sampler = match model {
        ModelSpec::Density { filter, .. } => Some(DensitySampler::new(truth, filter)?),
        ModelSpec::Sequence { .. } => None,
    };
    let rows = n_grid
        .par_iter()
        .enumerate()
        .map(|(i, &n)| -> Result<RiskRow> {
            let losses = (0..replicates)
                .into_par_iter()
                .map(|rep| {
                    let seed = derive_seed(master_seed, replicate_counter(i as u32, rep));
                    let est = estimate_once(truth, estimator, model, sampler.as_ref(), n, seed)?;
                    loss.loss(&est.difference(truth)?)
                })
                .collect::<Result<Vec<f64>>>()?;
            let r = f64::from(replicates);
            let mean = losses.iter().sum::<f64>() / r;
            let var = losses.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / (r - 1.0);
            Ok(RiskRow {
                n,
                empirical_risk: mean,
                std_error: (var / r).sqrt(),
                replicates,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    RiskTable::new(rows, loss.p, estimator.id(), truth.fingerprint())
}
