//! Observation models: the Gaussian sequence model and i.i.d. sampling from a
//! wavelet-specified density on `[0, 1]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dyadic::{CoefficientTree, Dimension};
use crate::error::{invalid, Error, Result};
use crate::wavelet::{analyze, synthesize, GridSignal, WaveletFilter};

/// Extra resolution of the fine grid used for density sampling and coefficient lookup.
pub const FINE_GRID_OFFSET: u32 = 8;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of stream `counter` under `master`.
///
/// For a fixed master seed the map is a bijection of `counter`, so distinct
/// counters never share a generator seed.
pub fn derive_seed(master: u64, counter: u64) -> u64 {
    splitmix64(master.wrapping_add(counter.wrapping_mul(0xD1B5_4A32_D192_ED03)))
}

/// Counter for replicate `rep` at grid point `n_index`.
pub fn replicate_counter(n_index: u32, rep: u32) -> u64 {
    (u64::from(n_index) << 32) | u64::from(rep)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SequenceObservation {
    pub n: u64,
    pub y: CoefficientTree,
    pub truth_ref: String,
    pub seed: u64,
}

/// `y_{j,k} = θ_{j,k} + n^{−1/2} z_{j,k}` at every index up to `j_max`, scaling coefficient included.
///
/// `theta` is zero-padded or truncated to depth `j_max`. Noise is drawn scaling
/// coefficient first, then level by level in position order.
pub fn simulate_sequence(theta: &CoefficientTree, n: u64, j_max: u32, seed: u64) -> Result<SequenceObservation> {
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    let sigma = 1.0 / (n as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y = theta.resized(j_max)?;
    let z: f64 = rng.sample(StandardNormal);
    y.set_scaling(y.scaling() + sigma * z);
    for j in 0..=j_max {
        for v in y.level_mut(j) {
            let z: f64 = rng.sample(StandardNormal);
            *v += sigma * z;
        }
    }
    Ok(SequenceObservation {
        n,
        y,
        truth_ref: theta.fingerprint(),
        seed,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensitySample {
    pub n: u64,
    pub points: Vec<f64>,
    pub truth_ref: String,
    pub seed: u64,
}

/// Inverse-CDF sampler for the clipped, renormalized reconstruction of a coefficient tree.
#[derive(Clone, Debug)]
pub struct DensitySampler {
    cdf: Vec<f64>,
    truth_ref: String,
}

impl DensitySampler {
    /// Tabulates the CDF on `2^{j_max + FINE_GRID_OFFSET}` cells.
    pub fn new(f_tree: &CoefficientTree, filter: &WaveletFilter) -> Result<Self> {
        if f_tree.dim() != Dimension::One {
            return Err(Error::Precondition("densities are one-dimensional".into()));
        }
        let grid = synthesize(f_tree, filter, f_tree.j_max() + FINE_GRID_OFFSET)?;
        let mut cdf = Vec::with_capacity(grid.len());
        let mut acc = 0.0;
        for v in grid.samples() {
            acc += v.max(0.0);
            cdf.push(acc);
        }
        if !(acc > 0.0) {
            return Err(Error::DegenerateDensity);
        }
        cdf.iter_mut().for_each(|c| *c /= acc);
        Ok(Self {
            cdf,
            truth_ref: f_tree.fingerprint(),
        })
    }

    /// Draws `n` points; within a cell the density is taken constant.
    pub fn sample(&self, n: u64, seed: u64) -> Result<DensitySample> {
        if n == 0 {
            return Err(invalid("n", "must be at least 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cells = self.cdf.len() as f64;
        let points = (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                let cell = self.cdf.partition_point(|c| *c <= u).min(self.cdf.len() - 1);
                let lo = if cell == 0 { 0.0 } else { self.cdf[cell - 1] };
                let width = self.cdf[cell] - lo;
                let frac = if width > 0.0 { ((u - lo) / width).clamp(0.0, 1.0) } else { 0.5 };
                ((cell as f64 + frac) / cells).min(1.0)
            })
            .collect();
        Ok(DensitySample {
            n,
            points,
            truth_ref: self.truth_ref.clone(),
            seed,
        })
    }
}

pub fn sample_density(f_tree: &CoefficientTree, filter: &WaveletFilter, n: u64, seed: u64) -> Result<DensitySample> {
    DensitySampler::new(f_tree, filter)?.sample(n, seed)
}

/// `β̂_{j,k} = (1/n) Σ_i ψ_{j,k}(X_i)` with `ψ_{j,k}` read off its reconstruction on
/// `2^{j_max + FINE_GRID_OFFSET}` cells at the cell containing `X_i`.
///
/// By orthogonality of the discrete transform this equals the analysis of the
/// histogram density, which is how it is computed.
pub fn empirical_coefficients(sample: &DensitySample, filter: &WaveletFilter, j_max: u32) -> Result<CoefficientTree> {
    empirical_coefficients_at(sample, filter, j_max, j_max + FINE_GRID_OFFSET)
}

pub fn empirical_coefficients_at(
    sample: &DensitySample,
    filter: &WaveletFilter,
    j_max: u32,
    resolution_log2: u32,
) -> Result<CoefficientTree> {
    if sample.points.is_empty() {
        return Err(Error::EmptySample);
    }
    let cells = 1usize << resolution_log2;
    let mut hist = GridSignal::constant(resolution_log2, 0.0).into_samples();
    let probe = GridSignal::constant(resolution_log2, 0.0);
    for &x in &sample.points {
        hist[probe.cell_of(x)] += 1.0;
    }
    let scale = cells as f64 / sample.points.len() as f64;
    hist.iter_mut().for_each(|h| *h *= scale);
    analyze(&GridSignal::new(hist)?, filter, j_max)
}
