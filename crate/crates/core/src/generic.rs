//! The saturating function `g` and probe perturbations `f + α·g`.
//!
//! `g` has coefficients `d_{j,k} = 2^{−(s−d/r+d/2)j} · 2^{−(d/r)J} / j^a` for `j ≥ 1`,
//! where `K/2^J` is the irreducible form of `k/2^j` and `a = 1 + 3/r`. Level 0 and the
//! scaling coefficient are zero (the formula is undefined at `j = 0`).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dyadic::{CoefficientTree, Dimension};
use crate::error::{invalid, Error, Result};
use crate::function_spaces::theoretical_weak_scaling;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GenericFunctionSpec {
    s: f64,
    r: f64,
    d: Dimension,
    j_max: u32,
    exponent_a: f64,
}

impl GenericFunctionSpec {
    pub fn new(s: f64, r: f64, d: Dimension, j_max: u32) -> Result<Self> {
        if !(r >= 1.0) {
            return Err(invalid("r", format!("{r} violates r ≥ 1")));
        }
        if !(s - d.as_f64() / r > 0.0) {
            return Err(invalid(
                "s",
                format!("s = {s} violates the standing assumption s > d/r = {}", d.as_f64() / r),
            ));
        }
        if j_max < 1 {
            return Err(invalid("j_max", "must be at least 1"));
        }
        Ok(Self {
            s,
            r,
            d,
            j_max,
            exponent_a: 1.0 + 3.0 / r,
        })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn d(&self) -> Dimension {
        self.d
    }

    pub fn j_max(&self) -> u32 {
        self.j_max
    }

    pub fn exponent_a(&self) -> f64 {
        self.exponent_a
    }

    /// `d_{j,k}` as a function of the level `j ≥ 1` and the reduced level `J ≤ j`.
    pub fn coefficient(&self, j: u32, reduced_j: u32) -> f64 {
        let d = self.d.as_f64();
        let jf = j as f64;
        (-(self.s - d / self.r + d / 2.0) * jf - (d / self.r) * reduced_j as f64).exp2()
            / jf.powf(self.exponent_a)
    }
}

/// Reduced level of position `pos` (row-major) at level `j`.
fn reduced_level(j: u32, pos: usize, d: Dimension) -> u32 {
    let tz = match d {
        Dimension::One => (pos as u64).trailing_zeros(),
        Dimension::Two => {
            let mask = (1u64 << j) - 1;
            let (k0, k1) = ((pos as u64) >> j, pos as u64 & mask);
            k0.trailing_zeros().min(k1.trailing_zeros())
        }
    };
    j - tz.min(j)
}

pub fn build_g(spec: &GenericFunctionSpec) -> Result<CoefficientTree> {
    let mut tree = CoefficientTree::new(spec.d, spec.j_max)?;
    for j in 1..=spec.j_max {
        // Values depend on k only through J, so tabulate once per level.
        let by_reduced: Vec<f64> = (0..=j).map(|big_j| spec.coefficient(j, big_j)).collect();
        for (pos, v) in tree.level_mut(j).iter_mut().enumerate() {
            *v = by_reduced[reduced_level(j, pos, spec.d) as usize];
        }
    }
    Ok(tree)
}

/// One probe parameter `α ∈ [−1, 1]` with the seed it was drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeDraw {
    alpha: f64,
    seed: u64,
}

impl ProbeDraw {
    pub fn new(alpha: f64, seed: u64) -> Result<Self> {
        if !(alpha.abs() <= 1.0) {
            return Err(invalid("alpha", format!("{alpha} violates |alpha| ≤ 1")));
        }
        Ok(Self { alpha, seed })
    }

    /// Draws `α` uniformly on `[−1, 1]`.
    pub fn sample(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self {
            alpha: rng.random_range(-1.0..=1.0),
            seed,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// `f + α·g` coefficient-wise.
pub fn probe_perturb(f: &CoefficientTree, g: &CoefficientTree, draw: ProbeDraw) -> Result<CoefficientTree> {
    f.add_scaled(g, draw.alpha)
}

/// Random series saturating `B_r^{s,∞}` for every `r`: Gaussian coefficients
/// `c_{j,k} ∝ 2^{−(s+d/2)j} ξ_{j,k}` on levels `1..=j_max`, each level rescaled so that
/// `Σ_k c_{j,k}² = amplitude² · 2^{−2sj}` exactly.
///
/// Rescaling removes the realization noise of the coarse level energies while
/// keeping the spread of magnitudes within a level.
pub fn dense_series(s: f64, d: Dimension, j_max: u32, amplitude: f64, seed: u64) -> Result<CoefficientTree> {
    let mut tree = CoefficientTree::new(d, j_max)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for j in 1..=j_max {
        let level = tree.level_mut(j);
        for v in level.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        let energy: f64 = level.iter().map(|v| v * v).sum();
        let target = amplitude * (-s * j as f64).exp2();
        let factor = if energy > 0.0 { target / energy.sqrt() } else { 0.0 };
        level.iter_mut().for_each(|v| *v *= factor);
    }
    Ok(tree)
}

/// Random series saturating `B_r^{s,∞}` with one coefficient per level:
/// `±amplitude · 2^{−(s−d/r+d/2)j}` at a uniformly drawn position, levels `1..=j_max`.
pub fn sparse_series(s: f64, r: f64, d: Dimension, j_max: u32, amplitude: f64, seed: u64) -> Result<CoefficientTree> {
    let mut tree = CoefficientTree::new(d, j_max)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let df = d.as_f64();
    for j in 1..=j_max {
        let pos = rng.random_range(0..1usize << (j * d.get()));
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        tree.level_mut(j)[pos] = sign * amplitude * (-(s - df / r + df / 2.0) * j as f64).exp2();
    }
    Ok(tree)
}

/// One point of the exclusion witness sequence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WitnessPoint {
    pub t: u32,
    pub bound: f64,
    pub log2_bound: f64,
}

/// `log₂ (2^n − 1)` without overflow for large `n`.
fn log2_pow2_minus_one(n: f64) -> f64 {
    if n > 60.0 {
        n
    } else {
        (n.exp2() - 1.0).log2()
    }
}

/// `log₂ sup_{0 ≤ j ≤ t/(s+d/2)} 2^{dpj/2} (1 − 2^{−jd})`: the count aggregate of `g` over
/// the coarse levels, where every position with `J ≥ 1` exceeds `2^{−t}`.
pub fn dense_count_sup_log2(s: f64, p: f64, d: Dimension, t: u32) -> f64 {
    let d = d.as_f64();
    let top = (t as f64 / (s + d / 2.0)).floor() as u32;
    (1..=top)
        .map(|j| {
            let jf = j as f64;
            j as f64 * (d * p / 2.0 - d) + log2_pow2_minus_one(d * jf)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Lower bounds `2^{−(1−α̃−ε)pt} · sup_j 2^{j(dp/2−d)} N_j(t)` on the weak norm of `g` in
/// `W((1−α̃−ε)p, p)`, for `t = 1..=t_max`.
///
/// `N_j(t)` counts positions at level `j` with `1 ≤ J` and `2^{−(s−d/r+d/2)j − (d/r)J} > 2^{−t}`:
/// all `2^{jd} − 1` of them for `j ≤ t/(s+d/2)`, and `2^{d·J_t} − 1` with
/// `J_t = ⌊(r/d)(t − (s−d/r+d/2)j)⌋` for `t/(s+d/2) < j ≤ t/(s−d/r+d/2)`. The slowly
/// varying `j^{−a}` factor is dropped, as the bound only tracks exponents.
pub fn weak_exclusion_witness(
    spec: &GenericFunctionSpec,
    p: f64,
    eps: f64,
    t_max: u32,
) -> Result<Vec<WitnessPoint>> {
    let (s, r, dim) = (spec.s, spec.r, spec.d);
    let d = dim.as_f64();
    let alpha_tilde = theoretical_weak_scaling(s, r, p, dim)?;
    if !(eps > 0.0 && eps < 1.0 - alpha_tilde) {
        return Err(Error::InvalidParameter {
            name: "eps",
            reason: format!("{eps} outside (0, 1 − α̃) = (0, {})", 1.0 - alpha_tilde),
        });
    }
    let sigma = s - d / r + d / 2.0;
    let level_weight = d * p / 2.0 - d;
    let out = (1..=t_max)
        .map(|t| {
            let tf = t as f64;
            let coarse_top = (tf / (s + d / 2.0)).floor() as u32;
            let fine_top = (tf / sigma).floor() as u32;
            let mut best = f64::NEG_INFINITY;
            for j in 1..=fine_top {
                let jf = j as f64;
                let reduced_top = if j <= coarse_top {
                    jf
                } else {
                    ((r / d) * (tf - sigma * jf)).floor().min(jf)
                };
                if reduced_top < 1.0 {
                    continue;
                }
                best = best.max(jf * level_weight + log2_pow2_minus_one(d * reduced_top));
            }
            let log2_bound = -(1.0 - alpha_tilde - eps) * p * tf + best;
            WitnessPoint {
                t,
                bound: log2_bound.exp2(),
                log2_bound,
            }
        })
        .collect();
    Ok(out)
}
