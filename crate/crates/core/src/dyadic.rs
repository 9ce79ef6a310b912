//! Dyadic index bookkeeping and sparse-by-level coefficient storage.
//!
//! A [`CoefficientTree`] holds the wavelet coefficients `c_{j,k}` of a function on
//! `[0,1]^d` for `d ∈ {1, 2}`, levels `0..=j_max`, together with the level-0 scaling
//! coefficient. Levels are allocated lazily: an unallocated level is all zeros.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Spatial dimension of the coefficient index set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub enum Dimension {
    One,
    Two,
}

impl Dimension {
    pub fn get(self) -> u32 {
        match self {
            Dimension::One => 1,
            Dimension::Two => 2,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.get() as f64
    }
}

impl TryFrom<u32> for Dimension {
    type Error = Error;

    fn try_from(d: u32) -> Result<Self> {
        match d {
            1 => Ok(Dimension::One),
            2 => Ok(Dimension::Two),
            other => Err(Error::InvalidDimension(other)),
        }
    }
}

impl From<Dimension> for u32 {
    fn from(d: Dimension) -> u32 {
        d.get()
    }
}

/// Level/position index `(j, k)` with `k ∈ {0,…,2^j−1}^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LevelIndex {
    j: u32,
    k: [u64; 2],
    dim: Dimension,
}

impl LevelIndex {
    pub fn new(j: u32, k: &[u64]) -> Result<Self> {
        let dim = Dimension::try_from(k.len() as u32)?;
        if j * dim.get() >= 64 {
            return Err(Error::LevelOverflow { j, d: dim.get() });
        }
        let side = 1u64 << j;
        if let Some(bad) = k.iter().find(|&&c| c >= side) {
            return Err(Error::IndexOutOfRange(format!(
                "coordinate {bad} is not below 2^{j}"
            )));
        }
        let mut coords = [0u64; 2];
        coords[..k.len()].copy_from_slice(k);
        Ok(Self { j, k: coords, dim })
    }

    pub fn one(j: u32, k: u64) -> Result<Self> {
        Self::new(j, &[k])
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    pub fn k(&self) -> &[u64] {
        &self.k[..self.dim.get() as usize]
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    /// Row-major position of `k` inside its level.
    pub fn linear(&self) -> usize {
        match self.dim {
            Dimension::One => self.k[0] as usize,
            Dimension::Two => ((self.k[0] << self.j) | self.k[1]) as usize,
        }
    }

    fn from_linear(j: u32, pos: usize, dim: Dimension) -> Self {
        let pos = pos as u64;
        let k = match dim {
            Dimension::One => [pos, 0],
            Dimension::Two => [pos >> j, pos & ((1u64 << j) - 1)],
        };
        Self { j, k, dim }
    }
}

/// Reduces `k / 2^j` to an irreducible dyadic fraction `K / 2^J`.
///
/// Halves while `J > 0` and every coordinate of `K` is even, so the all-zero
/// position reduces to `(0, 0)`.
pub fn reduce_dyadic(idx: LevelIndex) -> LevelIndex {
    let mut out = idx;
    let d = idx.dim.get() as usize;
    while out.j > 0 && out.k[..d].iter().all(|c| c % 2 == 0) {
        out.j -= 1;
        for c in &mut out.k[..d] {
            *c /= 2;
        }
    }
    out
}

/// Number of positions at level `j`: `2^{jd}`.
pub fn level_count(j: u32, d: Dimension) -> Result<u64> {
    let bits = j
        .checked_mul(d.get())
        .filter(|&b| b < 64)
        .ok_or(Error::LevelOverflow { j, d: d.get() })?;
    Ok(1u64 << bits)
}

/// Wavelet coefficients `c_{j,k}` for levels `0..=j_max` plus the scaling coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientTree {
    dim: Dimension,
    j_max: u32,
    scaling: f64,
    levels: Vec<Vec<f64>>,
}

// Dense levels beyond this are refused; 2^30 doubles is already 8 GiB.
const MAX_LEVEL_BITS: u32 = 30;

impl CoefficientTree {
    /// All-zero tree.
    pub fn new(dim: Dimension, j_max: u32) -> Result<Self> {
        if j_max * dim.get() > MAX_LEVEL_BITS {
            return Err(Error::LevelOverflow { j: j_max, d: dim.get() });
        }
        Ok(Self {
            dim,
            j_max,
            scaling: 0.0,
            levels: vec![Vec::new(); j_max as usize + 1],
        })
    }

    pub fn with_scaling(mut self, scaling: f64) -> Self {
        self.scaling = scaling;
        self
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn j_max(&self) -> u32 {
        self.j_max
    }

    pub fn scaling(&self) -> f64 {
        self.scaling
    }

    pub fn set_scaling(&mut self, value: f64) {
        self.scaling = value;
    }

    fn check_index(&self, idx: &LevelIndex) -> Result<()> {
        if idx.dim != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim.get(),
                right: idx.dim.get(),
            });
        }
        if idx.j > self.j_max {
            return Err(Error::IndexOutOfRange(format!(
                "level {} exceeds j_max {}",
                idx.j, self.j_max
            )));
        }
        Ok(())
    }

    /// Coefficient at `idx`; zero when absent or deeper than `j_max`.
    pub fn get(&self, idx: &LevelIndex) -> f64 {
        if idx.dim != self.dim || idx.j > self.j_max {
            return 0.0;
        }
        self.levels[idx.j as usize]
            .get(idx.linear())
            .copied()
            .unwrap_or(0.0)
    }

    pub fn set(&mut self, idx: &LevelIndex, value: f64) -> Result<()> {
        self.check_index(idx)?;
        let pos = idx.linear();
        self.level_mut(idx.j)[pos] = value;
        Ok(())
    }

    /// Dense view of level `j`, or `None` when the level is all zeros.
    pub fn level(&self, j: u32) -> Option<&[f64]> {
        self.levels
            .get(j as usize)
            .filter(|l| !l.is_empty())
            .map(Vec::as_slice)
    }

    /// Mutable dense view of level `j`, allocating zeros on first access.
    ///
    /// # Panics
    ///
    /// Panics if `j > j_max`.
    pub fn level_mut(&mut self, j: u32) -> &mut [f64] {
        let len = 1usize << (j * self.dim.get());
        let level = &mut self.levels[j as usize];
        if level.is_empty() {
            level.resize(len, 0.0);
        }
        level
    }

    /// Replaces level `j` with `values`, which must hold `2^{jd}` entries.
    pub fn set_level(&mut self, j: u32, values: Vec<f64>) -> Result<()> {
        if j > self.j_max {
            return Err(Error::IndexOutOfRange(format!(
                "level {j} exceeds j_max {}",
                self.j_max
            )));
        }
        let len = 1usize << (j * self.dim.get());
        if values.len() != len {
            return Err(Error::Precondition(format!(
                "level {j} needs {len} coefficients, got {}",
                values.len()
            )));
        }
        self.levels[j as usize] = values;
        Ok(())
    }

    /// Sets every coefficient of level `j` to zero; no-op beyond `j_max`.
    pub fn clear_level(&mut self, j: u32) {
        if let Some(level) = self.levels.get_mut(j as usize) {
            *level = Vec::new();
        }
    }

    /// Iterates over stored nonzero coefficients in `(j, k)` order.
    pub fn iter_nonzero(&self) -> impl Iterator<Item = (LevelIndex, f64)> + '_ {
        let dim = self.dim;
        self.levels.iter().enumerate().flat_map(move |(j, level)| {
            level
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(move |(pos, &v)| (LevelIndex::from_linear(j as u32, pos, dim), v))
        })
    }

    pub fn nonzero_count(&self) -> usize {
        self.levels
            .iter()
            .map(|l| l.iter().filter(|v| **v != 0.0).count())
            .sum()
    }

    /// Sum of squares of all coefficients including the scaling coefficient.
    pub fn energy(&self) -> f64 {
        self.scaling * self.scaling
            + self
                .levels
                .iter()
                .flat_map(|l| l.iter())
                .map(|v| v * v)
                .sum::<f64>()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.scaling *= factor;
        for level in &mut out.levels {
            level.iter_mut().for_each(|v| *v *= factor);
        }
        out
    }

    /// Applies `f(j, value)` to every allocated coefficient, keeping the scaling coefficient.
    pub fn map_levels(&self, mut f: impl FnMut(u32, f64) -> f64) -> Self {
        let mut out = self.clone();
        for (j, level) in out.levels.iter_mut().enumerate() {
            level.iter_mut().for_each(|v| *v = f(j as u32, *v));
        }
        out
    }

    /// `self + factor · other`, with depth `max(j_max)`.
    pub fn add_scaled(&self, other: &Self, factor: f64) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim.get(),
                right: other.dim.get(),
            });
        }
        let mut out = self.resized(self.j_max.max(other.j_max))?;
        out.scaling += factor * other.scaling;
        for (j, level) in other.levels.iter().enumerate() {
            if level.is_empty() {
                continue;
            }
            let dst = out.level_mut(j as u32);
            for (d, s) in dst.iter_mut().zip(level) {
                *d += factor * s;
            }
        }
        Ok(out)
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, -1.0)
    }

    /// Copy with depth `j_max`, dropping deeper levels or padding with zeros.
    pub fn resized(&self, j_max: u32) -> Result<Self> {
        let mut out = Self::new(self.dim, j_max)?.with_scaling(self.scaling);
        for (j, level) in self.levels.iter().enumerate().take(j_max as usize + 1) {
            out.levels[j] = level.clone();
        }
        Ok(out)
    }

    /// Keeps levels `j < levels_kept`; the scaling coefficient always survives.
    pub fn truncated(&self, levels_kept: u32) -> Self {
        let mut out = self.clone();
        for level in out.levels.iter_mut().skip(levels_kept as usize) {
            level.clear();
        }
        out
    }

    /// Hex SHA-256 over the dimension, depth and coefficient bits.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.dim.get().to_le_bytes());
        hasher.update(self.j_max.to_le_bytes());
        hasher.update(self.scaling.to_bits().to_le_bytes());
        for (j, level) in self.levels.iter().enumerate() {
            if level.iter().all(|v| *v == 0.0) {
                continue;
            }
            hasher.update((j as u32).to_le_bytes());
            for v in level {
                hasher.update(v.to_bits().to_le_bytes());
            }
        }
        hex::encode(hasher.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    #[test]
    fn reduce_examples() {
        let r = reduce_dyadic(LevelIndex::one(3, 3).unwrap());
        assert_eq!((r.j(), r.k()), (3, &[3u64][..]));
        let r = reduce_dyadic(LevelIndex::one(3, 4).unwrap());
        assert_eq!((r.j(), r.k()), (1, &[1u64][..]));
        let r = reduce_dyadic(LevelIndex::one(5, 0).unwrap());
        assert_eq!((r.j(), r.k()), (0, &[0u64][..]));
    }

    #[test]
    fn reduce_matches_gcd_exhaustively() {
        for j in 0..=10u32 {
            for k in 0..(1u64 << j) {
                let r = reduce_dyadic(LevelIndex::one(j, k).unwrap());
                let (num, den) = if k == 0 {
                    (0, 1)
                } else {
                    let g = gcd(k, 1 << j);
                    (k / g, (1u64 << j) / g)
                };
                assert_eq!(r.k()[0], num, "j={j} k={k}");
                assert_eq!(1u64 << r.j(), den, "j={j} k={k}");
            }
        }
    }

    #[test]
    fn reduce_two_dimensional() {
        let r = reduce_dyadic(LevelIndex::new(3, &[4, 2]).unwrap());
        assert_eq!((r.j(), r.k()), (2, &[2u64, 1][..]));
        let r = reduce_dyadic(LevelIndex::new(3, &[4, 0]).unwrap());
        assert_eq!((r.j(), r.k()), (1, &[1u64, 0][..]));
        let r = reduce_dyadic(LevelIndex::new(4, &[0, 0]).unwrap());
        assert_eq!(r.j(), 0);
    }

    #[test]
    fn level_counts() {
        assert_eq!(level_count(3, Dimension::One).unwrap(), 8);
        assert_eq!(level_count(2, Dimension::Two).unwrap(), 16);
        assert_eq!(level_count(0, Dimension::One).unwrap(), 1);
        assert!(level_count(32, Dimension::Two).is_err());
        assert!(level_count(64, Dimension::One).is_err());
    }

    #[test]
    fn index_validation() {
        assert!(LevelIndex::one(2, 4).is_err());
        assert!(LevelIndex::new(2, &[]).is_err());
        assert!(LevelIndex::new(2, &[1, 2, 3]).is_err());
        assert!(LevelIndex::new(2, &[3, 3]).is_ok());
    }

    #[test]
    fn absent_entries_are_zero() {
        let mut t = CoefficientTree::new(Dimension::Two, 4).unwrap();
        let idx = LevelIndex::new(3, &[5, 2]).unwrap();
        assert_eq!(t.get(&idx), 0.0);
        assert!(t.level(3).is_none());
        t.set(&idx, 1.5).unwrap();
        assert_eq!(t.get(&idx), 1.5);
        assert_eq!(t.nonzero_count(), 1);
        let (back, v) = t.iter_nonzero().next().unwrap();
        assert_eq!(back, idx);
        assert_eq!(v, 1.5);
        assert!(t.set(&LevelIndex::one(1, 0).unwrap(), 1.0).is_err());
        assert!(t.set(&LevelIndex::new(5, &[0, 0]).unwrap(), 1.0).is_err());
    }

    #[test]
    fn arithmetic_and_truncation() {
        let mut a = CoefficientTree::new(Dimension::One, 2).unwrap().with_scaling(1.0);
        a.set(&LevelIndex::one(1, 1).unwrap(), 2.0).unwrap();
        let mut b = CoefficientTree::new(Dimension::One, 4).unwrap();
        b.set(&LevelIndex::one(4, 3).unwrap(), -1.0).unwrap();
        let c = a.add_scaled(&b, 2.0).unwrap();
        assert_eq!(c.j_max(), 4);
        assert_eq!(c.get(&LevelIndex::one(4, 3).unwrap()), -2.0);
        assert_eq!(c.get(&LevelIndex::one(1, 1).unwrap()), 2.0);
        assert_eq!(c.energy(), 1.0 + 4.0 + 4.0);
        let t = c.truncated(2);
        assert_eq!(t.nonzero_count(), 1);
        assert_eq!(t.scaling(), 1.0);
        let other_dim = CoefficientTree::new(Dimension::Two, 1).unwrap();
        assert!(a.add_scaled(&other_dim, 1.0).is_err());
    }

    #[test]
    fn fingerprint_is_content_based() {
        let a = CoefficientTree::new(Dimension::One, 3).unwrap().with_scaling(1.0);
        let mut b = a.clone();
        assert_eq!(a.fingerprint(), b.fingerprint());
        // Allocated zero levels do not change identity.
        b.level_mut(2);
        assert_eq!(a.fingerprint(), b.fingerprint());
        b.set(&LevelIndex::one(2, 1).unwrap(), 1e-300).unwrap();
        assert_ne!(a.fingerprint(), b.fingerprint());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn reduce_is_idempotent_and_value_preserving(j in 0u32..20, a in any::<u64>(), b in any::<u64>(), two in any::<bool>()) {
                let side = 1u64 << j;
                let idx = if two {
                    LevelIndex::new(j, &[a % side, b % side]).unwrap()
                } else {
                    LevelIndex::one(j, a % side).unwrap()
                };
                let r = reduce_dyadic(idx);
                prop_assert_eq!(reduce_dyadic(r), r);
                prop_assert!(r.j() <= idx.j());
                let shift = idx.j() - r.j();
                for (big, small) in idx.k().iter().zip(r.k()) {
                    prop_assert_eq!(small << shift, *big);
                }
                prop_assert!(r.j() == 0 || r.k().iter().any(|c| c % 2 == 1));
            }
        }
    }
}
