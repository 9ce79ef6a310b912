//! Periodized orthogonal wavelet transform on `[0, 1]`.
//!
//! Samples live on cell midpoints of a dyadic grid with `2^J` cells. The finest
//! scaling coefficients are taken as `2^{−J/2}·f(x_i)`, so the discrete transform is
//! exactly orthogonal and the midpoint-rule `L²` norm equals the coefficient energy.

use std::io::{BufRead, Write};

use super::filters::WaveletFilter;
use crate::dyadic::{CoefficientTree, Dimension};
use crate::error::{invalid, Error, Result};

/// Function values on the midpoints of the `2^{resolution_log2}` cells of `[0, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSignal {
    resolution_log2: u32,
    samples: Vec<f64>,
}

impl GridSignal {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        let len = samples.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo { len });
        }
        Ok(Self {
            resolution_log2: len.trailing_zeros(),
            samples,
        })
    }

    pub fn from_fn(resolution_log2: u32, f: impl Fn(f64) -> f64) -> Self {
        let n = 1usize << resolution_log2;
        let h = 1.0 / n as f64;
        let samples = (0..n).map(|i| f((i as f64 + 0.5) * h)).collect();
        Self {
            resolution_log2,
            samples,
        }
    }

    pub fn constant(resolution_log2: u32, value: f64) -> Self {
        Self::from_fn(resolution_log2, |_| value)
    }

    pub fn resolution_log2(&self) -> u32 {
        self.resolution_log2
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Index of the cell containing `x`, with `x` wrapped onto `[0, 1)`.
    pub fn cell_of(&self, x: f64) -> usize {
        let n = self.samples.len();
        let wrapped = x - x.floor();
        ((wrapped * n as f64) as usize).min(n - 1)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "resolution_log2")?;
        writeln!(out, "{}", self.resolution_log2)?;
        writeln!(out, "sample")?;
        for v in &self.samples {
            writeln!(out, "{v}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut res = None;
        let mut samples = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            let n = i + 1;
            match n {
                1 if t == "resolution_log2" => {}
                1 => {
                    return Err(Error::Parse {
                        line: n,
                        message: "expected `resolution_log2` header".into(),
                    })
                }
                2 => {
                    res = Some(t.parse::<u32>().map_err(|_| Error::Parse {
                        line: n,
                        message: format!("bad resolution `{t}`"),
                    })?)
                }
                3 if t == "sample" => {}
                3 => {
                    return Err(Error::Parse {
                        line: n,
                        message: "expected `sample` header".into(),
                    })
                }
                _ if t.is_empty() => {}
                _ => samples.push(t.parse::<f64>().map_err(|_| Error::Parse {
                    line: n,
                    message: format!("bad sample `{t}`"),
                })?),
            }
        }
        let res = res.ok_or(Error::Parse {
            line: 0,
            message: "missing resolution".into(),
        })?;
        if samples.len() != 1usize << res {
            return Err(Error::Parse {
                line: 0,
                message: format!("expected 2^{res} samples, found {}", samples.len()),
            });
        }
        Self::new(samples)
    }
}

fn analysis_step(a: &[f64], h: &[f64], g: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = a.len();
    let mask = n - 1;
    let half = n / 2;
    let mut approx = vec![0.0; half];
    let mut detail = vec![0.0; half];
    for k in 0..half {
        let base = 2 * k;
        let (mut sa, mut sd) = (0.0, 0.0);
        for (m, (hm, gm)) in h.iter().zip(g).enumerate() {
            let v = a[(base + m) & mask];
            sa += hm * v;
            sd += gm * v;
        }
        approx[k] = sa;
        detail[k] = sd;
    }
    (approx, detail)
}

fn synthesis_step(a: &[f64], d: Option<&[f64]>, h: &[f64], g: &[f64]) -> Vec<f64> {
    let n = 2 * a.len();
    let mask = n - 1;
    let mut out = vec![0.0; n];
    for (k, &ak) in a.iter().enumerate() {
        let dk = d.map_or(0.0, |d| d[k]);
        let base = 2 * k;
        if dk == 0.0 {
            if ak == 0.0 {
                continue;
            }
            for (m, hm) in h.iter().enumerate() {
                out[(base + m) & mask] += hm * ak;
            }
        } else {
            for (m, (hm, gm)) in h.iter().zip(g).enumerate() {
                out[(base + m) & mask] += hm * ak + gm * dk;
            }
        }
    }
    out
}

/// Periodized wavelet coefficients of `signal` for levels `0..=j_max`.
///
/// With `j_max = resolution_log2 − 1` this is the full orthogonal transform.
pub fn analyze(signal: &GridSignal, filter: &WaveletFilter, j_max: u32) -> Result<CoefficientTree> {
    let res = signal.resolution_log2;
    if j_max >= res {
        return Err(invalid(
            "j_max",
            format!("{j_max} must be below the grid resolution {res}"),
        ));
    }
    if filter.len() > signal.len() {
        return Err(Error::FilterTooLong {
            filter_len: filter.len(),
            signal_len: signal.len(),
        });
    }
    let h = filter.taps();
    let g = filter.high_pass();
    let norm = (-(res as f64) / 2.0).exp2();
    let mut approx: Vec<f64> = signal.samples.iter().map(|v| v * norm).collect();
    let mut tree = CoefficientTree::new(Dimension::One, j_max)?;
    for level in (0..res).rev() {
        let (a, d) = analysis_step(&approx, h, &g);
        if level <= j_max {
            tree.set_level(level, d)?;
        }
        approx = a;
    }
    tree.set_scaling(approx[0]);
    Ok(tree)
}

/// Reconstructs `tree` on a grid of `2^{resolution_log2}` midpoints.
pub fn synthesize(
    tree: &CoefficientTree,
    filter: &WaveletFilter,
    resolution_log2: u32,
) -> Result<GridSignal> {
    if tree.dim() != Dimension::One {
        return Err(Error::Precondition(
            "function-domain synthesis is one-dimensional".into(),
        ));
    }
    if resolution_log2 <= tree.j_max() {
        return Err(invalid(
            "resolution_log2",
            format!(
                "{resolution_log2} is too coarse for a tree of depth {}",
                tree.j_max()
            ),
        ));
    }
    if filter.len() > 1usize << resolution_log2 {
        return Err(Error::FilterTooLong {
            filter_len: filter.len(),
            signal_len: 1usize << resolution_log2,
        });
    }
    let h = filter.taps();
    let g = filter.high_pass();
    let mut approx = vec![tree.scaling()];
    for level in 0..resolution_log2 {
        approx = synthesis_step(&approx, tree.level(level), h, &g);
    }
    let norm = (resolution_log2 as f64 / 2.0).exp2();
    approx.iter_mut().for_each(|v| *v *= norm);
    Ok(GridSignal {
        resolution_log2,
        samples: approx,
    })
}

/// `∫|f|^p` by the composite midpoint rule.
pub fn lp_norm_pow(signal: &GridSignal, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(invalid("p", format!("{p} must be a finite value ≥ 1")));
    }
    let n = signal.samples.len() as f64;
    let sum: f64 = if p == 2.0 {
        signal.samples.iter().map(|v| v * v).sum()
    } else {
        signal.samples.iter().map(|v| v.abs().powf(p)).sum()
    };
    Ok(sum / n)
}

/// `(∫|f|^p)^{1/p}` by the composite midpoint rule.
pub fn lp_norm(signal: &GridSignal, p: f64) -> Result<f64> {
    Ok(lp_norm_pow(signal, p)?.powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::LevelIndex;

    fn max_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn constant_signal_has_only_scaling() {
        for vm in [1, 2, 4, 10] {
            let f = WaveletFilter::daubechies(vm).unwrap();
            let s = GridSignal::constant(6, 2.5);
            let t = analyze(&s, &f, 5).unwrap();
            assert!((t.scaling() - 2.5).abs() < 1e-12);
            for (_, v) in t.iter_nonzero() {
                assert!(v.abs() < 1e-12, "db{vm}: {v}");
            }
        }
    }

    #[test]
    fn haar_step_against_inner_products() {
        let a = 0.75;
        let s = GridSignal::new(vec![a, a, -a, -a]).unwrap();
        let t = analyze(&s, &WaveletFilter::haar(), 1).unwrap();
        // Oracle: c_{j,k} = ∫ f ψ_{j,k} with ψ_{j,k} = 2^{j/2}(1 on first half, −1 on second half)
        // evaluated by the midpoint rule on the 4-cell grid.
        let psi = |j: u32, k: u64, x: f64| -> f64 {
            let y = x * (1u64 << j) as f64 - k as f64;
            let amp = (j as f64 / 2.0).exp2();
            if (0.0..0.5).contains(&y) {
                amp
            } else if (0.5..1.0).contains(&y) {
                -amp
            } else {
                0.0
            }
        };
        for j in 0..=1u32 {
            for k in 0..(1u64 << j) {
                let ip: f64 = (0..4)
                    .map(|i| {
                        let x = (i as f64 + 0.5) / 4.0;
                        s.samples()[i] * psi(j, k, x) / 4.0
                    })
                    .sum();
                let got = t.get(&LevelIndex::one(j, k).unwrap());
                assert!((got - ip).abs() < 1e-14, "j={j} k={k}: {got} vs {ip}");
            }
        }
        assert!((t.get(&LevelIndex::one(0, 0).unwrap()) - a).abs() < 1e-14);
        assert_eq!(t.nonzero_count(), 1);
    }

    #[test]
    fn single_haar_coefficient_reconstruction() {
        let mut t = CoefficientTree::new(Dimension::One, 2).unwrap();
        t.set(&LevelIndex::one(2, 1).unwrap(), 1.0).unwrap();
        let s = synthesize(&t, &WaveletFilter::haar(), 5).unwrap();
        for (i, v) in s.samples().iter().enumerate() {
            let x = (i as f64 + 0.5) / 32.0;
            let want = if (0.25..0.375).contains(&x) {
                2.0
            } else if (0.375..0.5).contains(&x) {
                -2.0
            } else {
                0.0
            };
            assert!((v - want).abs() < 1e-12, "x={x}: {v}");
        }
    }

    #[test]
    fn empty_tree_with_unit_scaling() {
        let t = CoefficientTree::new(Dimension::One, 3).unwrap().with_scaling(1.0);
        let s = synthesize(&t, &WaveletFilter::daubechies(3).unwrap(), 7).unwrap();
        assert!(s.samples().iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn full_depth_round_trip() {
        let f = WaveletFilter::daubechies(3).unwrap();
        let s = GridSignal::from_fn(8, |x| (7.0 * x).sin() + x * x * (1.0 - x));
        let t = analyze(&s, &f, 7).unwrap();
        let back = synthesize(&t, &f, 8).unwrap();
        assert!(max_diff(back.samples(), s.samples()) < 1e-10);
    }

    #[test]
    fn error_paths() {
        let f = WaveletFilter::daubechies(4).unwrap();
        let s = GridSignal::constant(2, 1.0);
        assert!(matches!(analyze(&s, &f, 1), Err(Error::FilterTooLong { .. })));
        let s = GridSignal::constant(4, 1.0);
        assert!(analyze(&s, &f, 4).is_err());
        let t = CoefficientTree::new(Dimension::One, 4).unwrap();
        assert!(synthesize(&t, &f, 4).is_err());
        let t2 = CoefficientTree::new(Dimension::Two, 1).unwrap();
        assert!(synthesize(&t2, &f, 4).is_err());
        assert!(GridSignal::new(vec![1.0; 3]).is_err());
        assert!(lp_norm(&s, 0.5).is_err());
    }

    #[test]
    fn lp_norms() {
        let s = GridSignal::constant(5, -3.0);
        for p in [1.0, 2.0, 3.5] {
            assert!((lp_norm(&s, p).unwrap() - 3.0).abs() < 1e-12);
        }
        let half = GridSignal::from_fn(6, |x| if x < 0.5 { 1.0 } else { 0.0 });
        assert!((lp_norm(&half, 4.0).unwrap() - 0.5f64.powf(0.25)).abs() < 1e-12);
    }

    #[test]
    fn csv_round_trip() {
        let s = GridSignal::from_fn(3, |x| x - 0.25);
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert_eq!(GridSignal::read_csv(buf.as_slice()).unwrap(), s);
        assert!(GridSignal::read_csv("resolution_log2\n2\nsample\n1\n".as_bytes()).is_err());
    }
}
