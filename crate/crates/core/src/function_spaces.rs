//! Besov sequence norms, weak Besov functionals and scaling functions.
//!
//! All functionals act on wavelet coefficients. The level weight in the Besov
//! characterization is `2^{(s − d/r + d/2) j}` applied to the level `ℓ^r` norm; the
//! weak functional counts exceedances `|c_{j,k}| > λ` with level weight
//! `2^{j(dp/2 − d)}`.

use serde::{Deserialize, Serialize};

use crate::dyadic::{CoefficientTree, Dimension};
use crate::error::{invalid, Error, Result};
use crate::regression::ols;

pub(crate) fn default_q() -> f64 {
    f64::INFINITY
}

/// `q` as a number, or the string `"inf"` for `q = ∞` (JSON has no infinity).
pub(crate) mod fine_index {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &f64, ser: S) -> Result<S::Ok, S::Error> {
        if q.is_infinite() {
            ser.serialize_str("inf")
        } else {
            ser.serialize_f64(*q)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<f64, D::Error> {
        match Repr::deserialize(de)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.trim().to_ascii_lowercase().as_str() {
                "inf" | "infinity" | "+inf" => Ok(f64::INFINITY),
                other => other
                    .parse()
                    .map_err(|_| de::Error::custom(format!("`{t}` is neither a number nor \"inf\""))),
            },
        }
    }
}

/// Besov smoothness `s`, integrability `r`, fine index `q`, loss exponent `p`, dimension `d`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessParams {
    pub s: f64,
    pub r: f64,
    #[serde(default = "default_q", with = "fine_index")]
    pub q: f64,
    pub p: f64,
    pub d: Dimension,
}

impl SmoothnessParams {
    pub fn new(s: f64, r: f64, p: f64, d: Dimension) -> Result<Self> {
        let out = Self {
            s,
            r,
            q: f64::INFINITY,
            p,
            d,
        };
        out.validate()?;
        Ok(out)
    }

    pub fn with_q(mut self, q: f64) -> Result<Self> {
        self.q = q;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r >= 1.0) {
            return Err(invalid("r", format!("{} violates 1 ≤ r ≤ ∞", self.r)));
        }
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(invalid("p", format!("{} violates 1 ≤ p < ∞", self.p)));
        }
        if !(self.q > 0.0) {
            return Err(invalid("q", format!("{} violates 0 < q ≤ ∞", self.q)));
        }
        let d = self.d.as_f64();
        if !(self.s > d / self.r) {
            return Err(invalid(
                "s",
                format!(
                    "s = {} violates the standing assumption s > d/r = {}",
                    self.s,
                    d / self.r
                ),
            ));
        }
        Ok(())
    }

    /// `d / r`, zero for `r = ∞`.
    pub fn d_over_r(&self) -> f64 {
        self.d.as_f64() / self.r
    }

    /// `s − d/r + d/p`.
    pub fn sparse_smoothness(&self) -> f64 {
        self.s - self.d_over_r() + self.d.as_f64() / self.p
    }
}

/// Lorentz exponent `rho` and loss exponent `p` of the weak Besov class, `0 < rho < p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakBesovParams {
    rho: f64,
    p: f64,
}

impl WeakBesovParams {
    pub fn new(rho: f64, p: f64) -> Result<Self> {
        if !(rho > 0.0 && rho < p) {
            return Err(invalid("rho", format!("need 0 < rho < p, got rho={rho}, p={p}")));
        }
        Ok(Self { rho, p })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// Regression estimate of a scaling function at one `p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalingFunctionEstimate {
    pub p: f64,
    pub estimate: f64,
    pub regression_window: (u32, u32),
    pub residual: f64,
}

/// Besov sequence norm `‖(A_j)‖_{ℓ^q} + |scaling|` with level aggregates
/// `A_j = 2^{(s − d/r + d/2) j} ‖c_{j,·}‖_{ℓ^r}`.
///
/// `r = ∞` uses the level sup with exponent `s + d/2`; `q = ∞` takes the sup over levels.
pub fn besov_norm(tree: &CoefficientTree, s: f64, r: f64, q: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(invalid("r", format!("{r} must be in (0, ∞]")));
    }
    if !(q > 0.0) {
        return Err(invalid("q", format!("{q} must be in (0, ∞]")));
    }
    let aggregates = besov_level_aggregates(tree, s, r);
    let body = if q.is_infinite() {
        aggregates.iter().copied().fold(0.0, f64::max)
    } else {
        aggregates.iter().map(|a| a.powf(q)).sum::<f64>().powf(1.0 / q)
    };
    Ok(body + tree.scaling().abs())
}

/// Per-level weighted `ℓ^r` aggregates `A_j` for `j = 0..=j_max`.
pub fn besov_level_aggregates(tree: &CoefficientTree, s: f64, r: f64) -> Vec<f64> {
    let d = tree.dim().as_f64();
    let exponent = s - d / r + d / 2.0;
    (0..=tree.j_max())
        .map(|j| {
            let Some(level) = tree.level(j) else {
                return 0.0;
            };
            let norm = if r.is_infinite() {
                level.iter().fold(0.0f64, |m, v| m.max(v.abs()))
            } else {
                level.iter().map(|v| v.abs().powf(r)).sum::<f64>().powf(1.0 / r)
            };
            norm * (exponent * j as f64).exp2()
        })
        .collect()
}

/// Sorted-descending magnitudes per level for exceedance counting.
struct ExceedanceCounter {
    levels: Vec<(f64, Vec<f64>)>,
}

impl ExceedanceCounter {
    fn new(tree: &CoefficientTree, p: f64) -> Self {
        let d = tree.dim().as_f64();
        let levels = (0..=tree.j_max())
            .filter_map(|j| {
                let level = tree.level(j)?;
                let mut mags: Vec<f64> = level.iter().map(|v| v.abs()).filter(|v| *v > 0.0).collect();
                if mags.is_empty() {
                    return None;
                }
                mags.sort_by(|a, b| b.total_cmp(a));
                let weight = (j as f64 * (d * p / 2.0 - d)).exp2();
                Some((weight, mags))
            })
            .collect();
        Self { levels }
    }

    /// `Σ_j 2^{j(dp/2−d)} #{k : |c_{j,k}| > λ}`.
    fn weighted_count(&self, lambda: f64) -> f64 {
        self.levels
            .iter()
            .map(|(w, mags)| w * mags.partition_point(|m| *m > lambda) as f64)
            .sum()
    }
}

/// `max_λ λ^rho Σ_j 2^{j(dp/2−d)} #{k : |c_{j,k}| > λ}` over `λ ∈ {2^{−t} : t = 0..=t_grid_max}`.
pub fn weak_besov_functional(tree: &CoefficientTree, params: &WeakBesovParams, t_grid_max: u32) -> f64 {
    let grid: Vec<f64> = (0..=t_grid_max).map(|t| (-(t as f64)).exp2()).collect();
    weak_besov_functional_on_grid(tree, params, &grid)
}

/// Weak functional on an explicit `λ` grid.
pub fn weak_besov_functional_on_grid(tree: &CoefficientTree, params: &WeakBesovParams, lambdas: &[f64]) -> f64 {
    let counter = ExceedanceCounter::new(tree, params.p);
    lambdas
        .iter()
        .filter(|l| **l > 0.0)
        .map(|&l| l.powf(params.rho) * counter.weighted_count(l))
        .fold(0.0, f64::max)
}

/// Slope estimate of `s_f(p)` from `log₂ Σ_k |c_{j,k}|^p` over levels `j_lo..=j_hi`.
///
/// Level sums decaying like `2^{−(sp − d + pd/2) j}` give `s = (−slope + d − pd/2)/p`.
pub fn empirical_scaling(
    tree: &CoefficientTree,
    p: f64,
    window: (u32, u32),
) -> Result<ScalingFunctionEstimate> {
    let (lo, hi) = window;
    if hi < lo + 2 {
        return Err(invalid(
            "window",
            format!("({lo}, {hi}) spans fewer than 3 levels"),
        ));
    }
    if hi > tree.j_max() {
        return Err(invalid(
            "window",
            format!("upper level {hi} exceeds tree depth {}", tree.j_max()),
        ));
    }
    if !(p > 0.0) {
        return Err(invalid("p", format!("{p} must be positive")));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for j in lo..=hi {
        let sum: f64 = tree
            .level(j)
            .map(|l| l.iter().map(|v| v.abs().powf(p)).sum())
            .unwrap_or(0.0);
        if !(sum > 0.0) {
            return Err(Error::Precondition(format!("level {j} is all zero")));
        }
        xs.push(j as f64);
        ys.push(sum.log2());
    }
    let fit = ols(&xs, &ys).expect("window has at least three distinct levels");
    let d = tree.dim().as_f64();
    Ok(ScalingFunctionEstimate {
        p,
        estimate: (-fit.slope + d - p * d / 2.0) / p,
        regression_window: window,
        residual: fit.max_abs_residual,
    })
}

/// Generic scaling function in `B_{p0}^{s0,∞}`: `s0` for `p ≤ p0`, else `d/p + s0 − d/p0`.
pub fn theoretical_scaling(s0: f64, p0: f64, p: f64, d: Dimension) -> Result<f64> {
    let d = d.as_f64();
    if !(s0 - d / p0 > 0.0) {
        return Err(Error::Precondition(format!(
            "s0 − d/p0 = {} must be positive",
            s0 - d / p0
        )));
    }
    Ok(if p <= p0 { s0 } else { d / p + s0 - d / p0 })
}

/// Generic weak scaling function in `B_r^{s,∞}`.
///
/// `2s/(2s+d)` when `r > pd/(2s+d)`, otherwise `2(s − d/r + d/p)/(2(s − d/r) + d)`.
pub fn theoretical_weak_scaling(s: f64, r: f64, p: f64, d: Dimension) -> Result<f64> {
    let d = d.as_f64();
    let dr = d / r;
    if !(s - dr > 0.0) {
        return Err(Error::Precondition(format!("s − d/r = {} must be positive", s - dr)));
    }
    Ok(if r > p * d / (2.0 * s + d) {
        2.0 * s / (2.0 * s + d)
    } else {
        2.0 * (s - dr + d / p) / (2.0 * (s - dr) + d)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::LevelIndex;
    use proptest::prelude::*;

    fn single(j: u32, k: u64, v: f64) -> CoefficientTree {
        let mut t = CoefficientTree::new(Dimension::One, j.max(1)).unwrap();
        t.set(&LevelIndex::one(j, k).unwrap(), v).unwrap();
        t
    }

    fn random_tree(seed: &[f64], j_max: u32) -> CoefficientTree {
        let mut t = CoefficientTree::new(Dimension::One, j_max).unwrap();
        let mut it = seed.iter().cycle();
        for j in 0..=j_max {
            let level = t.level_mut(j);
            for (i, v) in level.iter_mut().enumerate() {
                *v = it.next().unwrap() * (-(j as f64) * 1.5).exp2() * if i % 3 == 0 { 1.0 } else { 0.5 };
            }
        }
        t
    }

    #[test]
    fn besov_single_coefficient() {
        let t = single(5, 3, 1.0);
        let n = besov_norm(&t, 1.0, 2.0, f64::INFINITY).unwrap();
        assert!((n - 32.0).abs() < 1e-12);
        let zero = CoefficientTree::new(Dimension::One, 4).unwrap();
        assert_eq!(besov_norm(&zero, 1.0, 2.0, f64::INFINITY).unwrap(), 0.0);
        let with_mean = zero.with_scaling(-0.5);
        assert_eq!(besov_norm(&with_mean, 1.0, 2.0, 2.0).unwrap(), 0.5);
        assert!(besov_norm(&t, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn besov_r_infinity_uses_level_sup() {
        let mut t = single(3, 1, 0.5);
        t.set(&LevelIndex::one(3, 4).unwrap(), -2.0).unwrap();
        let n = besov_norm(&t, 1.0, f64::INFINITY, f64::INFINITY).unwrap();
        assert!((n - 2.0 * (1.5f64 * 3.0).exp2()).abs() < 1e-12);
    }

    #[test]
    fn weak_functional_single_coefficient() {
        let t = single(3, 2, 1.0);
        let params = WeakBesovParams::new(1.0, 2.0).unwrap();
        // λ = 1 gives |c| > λ false; the best grid point is λ = 1/2.
        assert!((weak_besov_functional(&t, &params, 10) - 0.5).abs() < 1e-15);
        let zero = CoefficientTree::new(Dimension::One, 3).unwrap();
        assert_eq!(weak_besov_functional(&zero, &params, 10), 0.0);
        assert!(WeakBesovParams::new(2.0, 2.0).is_err());
        assert!(WeakBesovParams::new(0.0, 2.0).is_err());
    }

    #[test]
    fn weak_functional_homogeneity_on_scaled_grid() {
        let t = random_tree(&[0.3, -1.1, 0.7, 2.0, -0.05], 8);
        let params = WeakBesovParams::new(0.8, 2.0).unwrap();
        let base = weak_besov_functional(&t, &params, 30);
        for m in 1..=3 {
            let alpha = (-(m as f64)).exp2();
            let grid: Vec<f64> = (0..=30).map(|t| alpha * (-(t as f64)).exp2()).collect();
            let scaled = weak_besov_functional_on_grid(&t.scaled(alpha), &params, &grid);
            let want = alpha.powf(0.8) * base;
            assert!(((scaled - want) / want).abs() < 1e-14, "m={m}: {scaled} vs {want}");
        }
    }

    #[test]
    fn weak_functional_contains_besov_at_critical_smoothness() {
        // β = (d/2)(p/r − 1) with r = 1, p = 2: level sums Σ|c| 2^{(β − 1 + 1/2) j} = Σ|c| stay bounded.
        let (r, p) = (1.0, 2.0);
        let beta = 0.5 * (p / r - 1.0);
        let mut t = CoefficientTree::new(Dimension::One, 14).unwrap();
        for j in 0..=14u32 {
            for (i, v) in t.level_mut(j).iter_mut().enumerate() {
                // Level ℓ¹ mass stays below 1 (Σ i⁻² < 1.65).
                *v = ((i + 1) as f64).powf(-2.0) / 1.65;
            }
        }
        assert!(besov_norm(&t, beta, r, f64::INFINITY).unwrap() < 2.0);
        let params = WeakBesovParams::new(r, p).unwrap();
        let vals: Vec<f64> = [10, 20, 30].iter().map(|&m| weak_besov_functional(&t, &params, m)).collect();
        assert!(vals[2] <= vals[0] * 1.05, "{vals:?}");
    }

    #[test]
    fn empirical_scaling_power_law_tree() {
        let sigma = 1.0;
        let mut t = CoefficientTree::new(Dimension::One, 12).unwrap();
        for j in 0..=12u32 {
            t.set(&LevelIndex::one(j, 0).unwrap(), (-(sigma + 0.5) * j as f64).exp2()).unwrap();
        }
        let e = empirical_scaling(&t, 2.0, (2, 12)).unwrap();
        assert!((e.estimate - 1.5).abs() < 1e-9);
        assert!(e.residual < 1e-9);
        assert!(empirical_scaling(&t, 2.0, (2, 3)).is_err());
        assert!(empirical_scaling(&t, 2.0, (2, 13)).is_err());
        let sparse = single(4, 0, 1.0);
        assert!(empirical_scaling(&sparse, 2.0, (1, 4)).is_err());
    }

    #[test]
    fn theoretical_scaling_branches() {
        let d = Dimension::One;
        assert_eq!(theoretical_scaling(2.0, 2.0, 1.0, d).unwrap(), 2.0);
        assert_eq!(theoretical_scaling(2.0, 2.0, 2.0, d).unwrap(), 2.0);
        assert!((theoretical_scaling(2.0, 2.0, 4.0, d).unwrap() - 1.75).abs() < 1e-15);
        assert!(theoretical_scaling(0.4, 2.0, 1.0, d).is_err());
    }

    #[test]
    fn theoretical_weak_scaling_branches() {
        let d = Dimension::One;
        assert!((theoretical_weak_scaling(2.0, 2.0, 2.0, d).unwrap() - 0.8).abs() < 1e-15);
        let v = theoretical_weak_scaling(1.2, 1.0, 4.0, d).unwrap();
        assert!((v - 0.9 / 1.4).abs() < 1e-12);
        // r = pd/(2s+d) exactly: s = 1.5, p = 4 gives pd/(2s+d) = 1 = r, which is the else branch.
        let b = theoretical_weak_scaling(1.5, 1.0, 4.0, d).unwrap();
        assert!((b - 2.0 * (0.5 + 0.25) / 2.0).abs() < 1e-15);
        assert!(theoretical_weak_scaling(0.5, 2.0, 2.0, d).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(SmoothnessParams::new(0.4, 2.0, 2.0, Dimension::One).is_err());
        assert!(SmoothnessParams::new(2.0, 2.0, f64::INFINITY, Dimension::One).is_err());
        assert!(SmoothnessParams::new(2.0, 0.5, 2.0, Dimension::One).is_err());
        let p = SmoothnessParams::new(1.2, f64::INFINITY, 2.0, Dimension::Two).unwrap();
        assert_eq!(p.d_over_r(), 0.0);
        let err = SmoothnessParams::new(0.4, 2.0, 2.0, Dimension::One).unwrap_err().to_string();
        assert!(err.contains("s > d/r"), "{err}");
    }

    proptest! {
        #[test]
        fn besov_homogeneity_and_triangle(
            a in proptest::collection::vec(-2f64..2.0, 31),
            b in proptest::collection::vec(-2f64..2.0, 31),
            scale in 0.01f64..50.0,
            r in 1f64..4.0,
            q in prop_oneof![Just(f64::INFINITY), 1f64..3.0],
        ) {
            let ta = random_tree(&a, 4);
            let tb = random_tree(&b, 4);
            let na = besov_norm(&ta, 1.3, r, q).unwrap();
            let nb = besov_norm(&tb, 1.3, r, q).unwrap();
            let scaled = besov_norm(&ta.scaled(scale), 1.3, r, q).unwrap();
            prop_assert!((scaled - scale * na).abs() <= 1e-10 * (1.0 + scale * na));
            let sum = besov_norm(&ta.add_scaled(&tb, 1.0).unwrap(), 1.3, r, q).unwrap();
            prop_assert!(sum <= na + nb + 1e-10);
        }

        #[test]
        fn besov_monotone_in_smoothness(a in proptest::collection::vec(-2f64..2.0, 31), s1 in 0.5f64..2.0, ds in 0f64..2.0) {
            let t = random_tree(&a, 4);
            let lo = besov_norm(&t, s1, 2.0, f64::INFINITY).unwrap();
            let hi = besov_norm(&t, s1 + ds, 2.0, f64::INFINITY).unwrap();
            prop_assert!(lo <= hi * (1.0 + 1e-12));
        }

        #[test]
        fn empirical_scaling_recovers_power_laws(sigma in 0.2f64..3.0, p in 1f64..5.0) {
            let mut t = CoefficientTree::new(Dimension::One, 10).unwrap();
            for j in 0..=10u32 {
                t.set(&LevelIndex::one(j, 0).unwrap(), (-(sigma + 0.5) * j as f64).exp2()).unwrap();
            }
            let e = empirical_scaling(&t, p, (1, 10)).unwrap();
            // One coefficient per level: level sum 2^{−p(σ+1/2)j}, so s = σ + 1/p.
            prop_assert!((e.estimate - (sigma + 1.0 / p)).abs() < 1e-9);
            prop_assert!(e.residual < 1e-9);
        }
    }
}
