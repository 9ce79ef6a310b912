//! Linear and thresholding estimators for both models, and the limited/elitist
//! classification of shrinkage rules.
//!
//! Logarithms are natural throughout: `t_n = √(ln n / n)` and `j(n)` is the smallest
//! level with `2^{−j(n)} ≤ ln n / n`. The scaling coefficient is never weighted or
//! thresholded.

use serde::{Deserialize, Serialize};

use crate::dyadic::CoefficientTree;
use crate::error::{invalid, Error, Result};
use crate::function_spaces::SmoothnessParams;
use crate::models::SequenceObservation;

/// Smoothing weights `λ_{j,k}` of a linear estimator.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightProfile {
    /// `λ_j = 1` iff `2^j < m_n`.
    Projection { m_n: f64 },
    /// `λ_j = (1 − (j/m_n)^order)_+`.
    Pinsker { m_n: f64, order: f64 },
    /// Arbitrary weights in `[0, 1]`, stored as a tree; absent entries are 0.
    Custom(CoefficientTree),
}

impl WeightProfile {
    pub fn projection(m_n: f64) -> Result<Self> {
        if !(m_n >= 0.0) {
            return Err(invalid("m_n", format!("{m_n} must be non-negative")));
        }
        Ok(Self::Projection { m_n })
    }

    pub fn pinsker(m_n: f64, order: f64) -> Result<Self> {
        if !(m_n > 0.0) {
            return Err(invalid("m_n", format!("{m_n} must be positive")));
        }
        if !(order > 0.0) {
            return Err(invalid("pinsker_order", format!("{order} must be positive")));
        }
        Ok(Self::Pinsker { m_n, order })
    }

    pub fn custom(weights: CoefficientTree) -> Result<Self> {
        if let Some((idx, w)) = weights.iter_nonzero().find(|(_, w)| !(0.0..=1.0).contains(w)) {
            return Err(invalid("weights", format!("{w} at {idx:?} is outside [0, 1]")));
        }
        Ok(Self::Custom(weights))
    }

    /// Weight of level `j` for the level-wise kinds.
    fn level_weight(&self, j: u32) -> Option<f64> {
        match self {
            Self::Projection { m_n } => Some(if (j as f64).exp2() < *m_n { 1.0 } else { 0.0 }),
            Self::Pinsker { m_n, order } => Some((1.0 - (j as f64 / m_n).powf(*order)).max(0.0)),
            Self::Custom(_) => None,
        }
    }

    /// Weights as a tree shaped like `like`.
    pub fn weights_for(&self, like: &CoefficientTree) -> Result<CoefficientTree> {
        let mut out = CoefficientTree::new(like.dim(), like.j_max())?;
        for j in 0..=like.j_max() {
            match (self.level_weight(j), self) {
                (Some(w), _) => {
                    if w != 0.0 {
                        out.level_mut(j).iter_mut().for_each(|v| *v = w);
                    }
                }
                (None, Self::Custom(tree)) => {
                    if tree.dim() != like.dim() {
                        return Err(Error::DimensionMismatch {
                            left: like.dim().get(),
                            right: tree.dim().get(),
                        });
                    }
                    if let Some(level) = tree.level(j) {
                        out.set_level(j, level.to_vec())?;
                    }
                }
                (None, _) => unreachable!("only custom profiles lack level weights"),
            }
        }
        Ok(out)
    }
}

/// `θ̂_{j,k} = λ_{j,k} y_{j,k}`.
pub fn linear_estimate(obs: &SequenceObservation, w: &WeightProfile) -> Result<CoefficientTree> {
    linear_apply(&obs.y, w)
}

fn linear_apply(y: &CoefficientTree, w: &WeightProfile) -> Result<CoefficientTree> {
    match w {
        WeightProfile::Custom(_) => {
            let weights = w.weights_for(y)?;
            let mut out = CoefficientTree::new(y.dim(), y.j_max())?.with_scaling(y.scaling());
            for j in 0..=y.j_max() {
                if let (Some(obs), Some(wl)) = (y.level(j), weights.level(j)) {
                    out.set_level(j, obs.iter().zip(wl).map(|(a, b)| a * b).collect())?;
                }
            }
            Ok(out)
        }
        _ => {
            let mut out = y.clone();
            for j in 0..=y.j_max() {
                let wj = w.level_weight(j).expect("level-wise profile");
                if wj == 0.0 {
                    out.clear_level(j);
                } else if wj != 1.0 && y.level(j).is_some() {
                    out.level_mut(j).iter_mut().for_each(|v| *v *= wj);
                }
            }
            Ok(out)
        }
    }
}

/// Bias-variance cutoff scale: `n^{1/(2s+d)}` when `r ≥ p`, else `n^{1/(2(s−d/r+d/p)+d)}`.
pub fn choose_mn(params: &SmoothnessParams, n: u64) -> f64 {
    let d = params.d.as_f64();
    let exponent = if params.r >= params.p {
        1.0 / (2.0 * params.s + d)
    } else {
        1.0 / (2.0 * params.sparse_smoothness() + d)
    };
    (n as f64).powf(exponent)
}

/// Number of wavelet levels kept by projection at cutoff `m_n`: `#{j ≥ 0 : 2^j < m_n}`.
pub fn projection_levels(m_n: f64) -> u32 {
    if !(m_n > 1.0) {
        return 0;
    }
    let mut j = m_n.log2().ceil().max(0.0) as u32;
    while j > 0 && (j as f64 - 1.0).exp2() >= m_n {
        j -= 1;
    }
    while (j as f64).exp2() < m_n {
        j += 1;
    }
    j
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdMode {
    Hard,
    Soft,
}

/// `t_n = √(ln n / n)`.
pub fn universal_threshold(n: u64) -> f64 {
    let nf = n as f64;
    (nf.ln() / nf).sqrt()
}

/// Smallest `j` with `2^{−j} ≤ ln n / n`, so that `2^{−j} ≤ ln n / n < 2^{−j+1}`.
///
/// # Panics
///
/// Panics for `n < 2`, where `ln n / n` is not positive.
pub fn threshold_level(n: u64) -> u32 {
    assert!(n >= 2, "threshold level needs n ≥ 2");
    let nf = n as f64;
    let x = nf.ln() / nf;
    let mut j = (-x.log2()).ceil().max(0.0) as u32;
    while (-(j as f64)).exp2() > x {
        j += 1;
    }
    while j > 0 && (-(j as f64 - 1.0)).exp2() <= x {
        j -= 1;
    }
    j
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdConfig {
    kappa: f64,
    mode: ThresholdMode,
    n: u64,
}

impl ThresholdConfig {
    pub const DEFAULT_KAPPA: f64 = 2.0;

    pub fn new(kappa: f64, mode: ThresholdMode, n: u64) -> Result<Self> {
        if !(kappa > 0.0) {
            return Err(invalid("kappa", format!("{kappa} must be positive")));
        }
        if n < 2 {
            return Err(invalid("n", "thresholding needs n ≥ 2"));
        }
        Ok(Self { kappa, mode, n })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn mode(&self) -> ThresholdMode {
        self.mode
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn t_n(&self) -> f64 {
        universal_threshold(self.n)
    }

    pub fn j_n(&self) -> u32 {
        threshold_level(self.n)
    }

    /// `κ t_n`.
    pub fn level(&self) -> f64 {
        self.kappa * self.t_n()
    }
}

fn hard(y: f64, lambda: f64) -> f64 {
    if y.abs() >= lambda {
        y
    } else {
        0.0
    }
}

fn soft(y: f64, lambda: f64) -> f64 {
    y.signum() * (y.abs() - lambda).max(0.0)
}

/// Hard or soft thresholding at `κ t_n` on levels `j ≤ j(n)`; deeper levels are zero.
pub fn threshold_estimate(obs: &SequenceObservation, cfg: &ThresholdConfig) -> Result<CoefficientTree> {
    if obs.n != cfg.n {
        return Err(Error::Incompatible(format!(
            "observation has n = {}, threshold configured for n = {}",
            obs.n, cfg.n
        )));
    }
    let lambda = cfg.level();
    let rule: fn(f64, f64) -> f64 = match cfg.mode {
        ThresholdMode::Hard => hard,
        ThresholdMode::Soft => soft,
    };
    Ok(keep_levels_mapped(&obs.y, cfg.j_n(), |v| rule(v, lambda)))
}

fn keep_levels_mapped(y: &CoefficientTree, j_top: u32, f: impl Fn(f64) -> f64) -> CoefficientTree {
    let mut out = y.truncated(j_top.saturating_add(1));
    for j in 0..=y.j_max().min(j_top) {
        if out.level(j).is_some() {
            out.level_mut(j).iter_mut().for_each(|v| *v = f(*v));
        }
    }
    out
}

/// Keeps levels `j < levels_kept` of the empirical coefficients.
pub fn density_linear_estimate(beta_hat: &CoefficientTree, levels_kept: u32) -> CoefficientTree {
    beta_hat.truncated(levels_kept)
}

/// `β̂_{j,k} 1_{|β̂_{j,k}| > t_n}` on levels `j ≤ j(n)`.
pub fn density_threshold_estimate(beta_hat: &CoefficientTree, n: u64) -> Result<CoefficientTree> {
    if n < 2 {
        return Err(invalid("n", "thresholding needs n ≥ 2"));
    }
    let t = universal_threshold(n);
    Ok(keep_levels_mapped(beta_hat, threshold_level(n), |v| if v.abs() > t { v } else { 0.0 }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShrinkageKind {
    Limited,
    Elitist,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShrinkageClass {
    kind: ShrinkageKind,
    lambda_n: f64,
    threshold_a: f64,
}

impl ShrinkageClass {
    pub fn new(kind: ShrinkageKind, lambda_n: f64, threshold_a: f64) -> Result<Self> {
        if !(lambda_n >= 0.0) {
            return Err(invalid("lambda_n", format!("{lambda_n} must be non-negative")));
        }
        if !(0.0..1.0).contains(&threshold_a) {
            return Err(invalid("threshold_a", format!("{threshold_a} must lie in [0, 1)")));
        }
        Ok(Self {
            kind,
            lambda_n,
            threshold_a,
        })
    }

    pub fn kind(&self) -> ShrinkageKind {
        self.kind
    }

    pub fn lambda_n(&self) -> f64 {
        self.lambda_n
    }

    pub fn threshold_a(&self) -> f64 {
        self.threshold_a
    }
}

/// Realized shrinkage factors `γ_{j,k}` (estimate = `γ · y`) of a rule on one observation.
#[derive(Clone, Debug)]
pub struct ShrinkageTrace<'a> {
    gammas: CoefficientTree,
    observations: &'a SequenceObservation,
}

impl<'a> ShrinkageTrace<'a> {
    pub fn new(gammas: CoefficientTree, observations: &'a SequenceObservation) -> Result<Self> {
        if gammas.dim() != observations.y.dim() {
            return Err(Error::DimensionMismatch {
                left: gammas.dim().get(),
                right: observations.y.dim().get(),
            });
        }
        if let Some((idx, g)) = gammas.iter_nonzero().find(|(_, g)| !(0.0..=1.0).contains(g)) {
            return Err(invalid("gamma", format!("{g} at {idx:?} is outside [0, 1]")));
        }
        Ok(Self { gammas, observations })
    }

    /// Trace of a linear rule: `γ = λ`.
    pub fn linear(obs: &'a SequenceObservation, w: &WeightProfile) -> Result<Self> {
        Self::new(w.weights_for(&obs.y)?, obs)
    }

    /// Trace of a thresholding rule: `γ = θ̂ / y` (zero where `y = 0`).
    pub fn threshold(obs: &'a SequenceObservation, cfg: &ThresholdConfig) -> Result<Self> {
        let est = threshold_estimate(obs, cfg)?;
        let mut gammas = CoefficientTree::new(obs.y.dim(), obs.y.j_max())?;
        for (idx, v) in est.iter_nonzero() {
            let y = obs.y.get(&idx);
            gammas.set(&idx, (v / y).clamp(0.0, 1.0))?;
        }
        Self::new(gammas, obs)
    }

    pub fn gammas(&self) -> &CoefficientTree {
        &self.gammas
    }

    pub fn observations(&self) -> &SequenceObservation {
        self.observations
    }
}

/// Limited: every `γ > a` sits at a level with `2^{−j} > λ_n`.
/// Elitist: every `γ > a` has `|y_{j,k}| > λ_n`.
pub fn classify_rule(trace: &ShrinkageTrace<'_>, cls: &ShrinkageClass) -> bool {
    let y = &trace.observations.y;
    trace
        .gammas
        .iter_nonzero()
        .filter(|(_, g)| *g > cls.threshold_a)
        .all(|(idx, _)| match cls.kind {
            ShrinkageKind::Limited => (-(idx.j() as f64)).exp2() > cls.lambda_n,
            ShrinkageKind::Elitist => y.get(&idx).abs() > cls.lambda_n,
        })
}
