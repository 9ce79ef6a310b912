//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line per criterion with
//! the measured values underneath, and exits nonzero if any criterion fails.
//!
//! Rate criteria run the TOML configs under `configs/` through the experiment
//! pipeline; the rest call the library directly.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use genrates::dyadic::{reduce_dyadic, CoefficientTree, Dimension, LevelIndex};
use genrates::estimators::{
    classify_rule, ShrinkageClass, ShrinkageKind, ShrinkageTrace, ThresholdConfig, ThresholdMode, WeightProfile,
};
use genrates::experiment::{run, validate_config_at, RunReport};
use genrates::function_spaces::{weak_besov_functional, weak_besov_functional_on_grid, WeakBesovParams};
use genrates::generic::{build_g, GenericFunctionSpec};
use genrates::models::{derive_seed, empirical_coefficients, simulate_sequence, DensitySampler};
use genrates::rates::{monte_carlo_risk, Cutoff, EstimatorSpec, LossSpec, ModelSpec};
use genrates::wavelet::{analyze, synthesize, GridSignal, WaveletFilter};

type Check = Result<Vec<String>, Vec<String>>;
type Criterion = (u32, &'static str, fn() -> Check);

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run_config(file: &str, out: &Path) -> Result<RunReport, String> {
    let path = configs_dir().join(file);
    let raw = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut config = validate_config_at(&raw, &configs_dir()).map_err(|e| format!("{file}: {e}"))?;
    config.output_dir = out.to_path_buf();
    run(&config).map_err(|e| format!("{file}: {e}"))
}

fn from_config(file: &str) -> Check {
    let dir = tempfile::tempdir().map_err(|e| vec![e.to_string()])?;
    let rep = run_config(file, dir.path()).map_err(|e| vec![e])?;
    let lines: Vec<String> = rep.verdicts.iter().map(|v| v.to_string()).collect();
    if rep.verdicts.is_empty() {
        return Err(vec![format!("{file} produced no verdicts")]);
    }
    if rep.passed() {
        Ok(lines)
    } else {
        Err(lines)
    }
}

/// Collects `(ok, line)` pairs into a check.
fn gather(items: Vec<(bool, String)>) -> Check {
    let ok = items.iter().all(|(ok, _)| *ok);
    let lines = items
        .into_iter()
        .map(|(ok, l)| format!("{} {l}", if ok { "ok  " } else { "FAIL" }))
        .collect();
    if ok {
        Ok(lines)
    } else {
        Err(lines)
    }
}

fn criterion_6() -> Check {
    let truth = CoefficientTree::new(Dimension::One, 16).unwrap();
    let est = EstimatorSpec::Projection { cutoff: Cutoff::Fixed(32.0) };
    let loss = LossSpec::new(2.0, WaveletFilter::haar()).unwrap();
    let table = monte_carlo_risk(&truth, &est, &ModelSpec::Sequence { j_max: 16 }, &[1 << 10, 1 << 14], 64, &loss, 6)
        .map_err(|e| vec![e.to_string()])?;
    // Scaling coefficient plus every wavelet position with 2^j < 32.
    let kept = 1 + (0..16u32).filter(|j| (1u64 << j) < 32).map(|j| 1u64 << j).sum::<u64>();
    gather(
        table
            .rows()
            .iter()
            .map(|r| {
                let n = r.n as f64;
                let dev = (r.empirical_risk * n - kept as f64).abs();
                let bound = 3.0 * r.std_error * n;
                (dev <= bound, format!("n={}: risk·n = {:.3}, kept = {kept}, |Δ| = {dev:.3} ≤ 3·se·n = {bound:.3}", r.n, r.empirical_risk * n))
            })
            .collect(),
    )
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn criterion_9() -> Check {
    let mut items = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(9);

    let samples: Vec<f64> = (0..1 << 10).map(|_| rng.random_range(-1.0..1.0)).collect();
    let signal = GridSignal::new(samples.clone()).unwrap();
    let signal_energy = samples.iter().map(|v| v * v).sum::<f64>() / samples.len() as f64;
    let (mut worst_trip, mut worst_parseval) = (0.0f64, 0.0f64);
    for m in 1..=10 {
        let filter = WaveletFilter::daubechies(m).unwrap();
        let tree = analyze(&signal, &filter, 9).unwrap();
        let back = synthesize(&tree, &filter, 10).unwrap();
        let err = back.samples().iter().zip(&samples).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst_trip = worst_trip.max(err);
        worst_parseval = worst_parseval.max((tree.energy() - signal_energy).abs() / signal_energy);
    }
    items.push((worst_trip <= 1e-10, format!("round trip db1..db10 on 2^10 samples: max error {worst_trip:.2e} ≤ 1e-10")));
    items.push((worst_parseval <= 1e-8, format!("Parseval db1..db10: max relative error {worst_parseval:.2e} ≤ 1e-8")));

    // ρ = 1 and dyadic λ, α keep every product exact.
    let mut tree = CoefficientTree::new(Dimension::One, 10).unwrap();
    for j in 0..=10 {
        for v in tree.level_mut(j) {
            *v = rng.random_range(-1.0..1.0) * (-(j as f64)).exp2();
        }
    }
    let params = WeakBesovParams::new(1.0, 2.0).unwrap();
    let base = weak_besov_functional(&tree, &params, 40);
    let exact = (1..=4).all(|m| {
        let alpha = (-(m as f64)).exp2();
        let grid: Vec<f64> = (0..=40).map(|t| alpha * (-(t as f64)).exp2()).collect();
        weak_besov_functional_on_grid(&tree.scaled(alpha), &params, &grid) == alpha * base
    });
    items.push((exact, "weak functional homogeneity W(αc; αΛ) = α·W(c; Λ), exact, α = 2^-1..2^-4".to_string()));

    let mut reduce_ok = true;
    for j in 0..=10u32 {
        for k in 0..1u64 << j {
            let g = gcd(k, 1 << j);
            let r = reduce_dyadic(LevelIndex::one(j, k).unwrap());
            reduce_ok &= r.j() == j - g.trailing_zeros() && r.k()[0] == k / g;
        }
        for k1 in 0..1u64 << j {
            for k2 in 0..1u64 << j {
                let g = gcd(gcd(k1, k2), 1 << j);
                let r = reduce_dyadic(LevelIndex::new(j, &[k1, k2]).unwrap());
                reduce_ok &= r.j() == j - g.trailing_zeros() && r.k() == [k1 / g, k2 / g];
            }
        }
    }
    items.push((reduce_ok, "reduce_dyadic matches the gcd oracle for every index with j ≤ 10, d = 1 and 2".to_string()));

    let g = build_g(&GenericFunctionSpec::new(2.0, 2.0, Dimension::One, 12).unwrap()).unwrap();
    let m_n = 32.0;
    let projection = WeightProfile::projection(m_n).unwrap();
    let limited = ShrinkageClass::new(ShrinkageKind::Limited, 1.0 / m_n, 0.0).unwrap();
    let (mut lim_ok, mut eli_ok) = (0, 0);
    for seed in 0..100 {
        let obs = simulate_sequence(&g, 1 << 12, 12, derive_seed(99, seed)).unwrap();
        lim_ok += classify_rule(&ShrinkageTrace::linear(&obs, &projection).unwrap(), &limited) as u32;
        let cfg = ThresholdConfig::new(2.0, ThresholdMode::Hard, obs.n).unwrap();
        let elitist = ShrinkageClass::new(ShrinkageKind::Elitist, cfg.level(), 0.0).unwrap();
        eli_ok += classify_rule(&ShrinkageTrace::threshold(&obs, &cfg).unwrap(), &elitist) as u32;
    }
    items.push((lim_ok == 100, format!("projection classified limited in {lim_ok}/100 seeds")));
    items.push((eli_ok == 100, format!("hard threshold classified elitist in {eli_ok}/100 seeds")));

    let rerun = (|| -> Result<bool, String> {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let first = run_config("criterion-01-dense-threshold.toml", dir.path())?;
        let snapshot: Vec<(PathBuf, Vec<u8>)> = first
            .tables
            .iter()
            .chain([&dir.path().join("manifest.json")])
            .map(|p| (p.clone(), fs::read(p).unwrap()))
            .collect();
        let second = run_config("criterion-01-dense-threshold.toml", dir.path())?;
        Ok(first.manifest.content_hash == second.manifest.content_hash
            && snapshot.iter().all(|(p, b)| fs::read(p).map(|now| &now == b).unwrap_or(false)))
    })();
    match rerun {
        Ok(same) => items.push((same, "rerun of criterion 1 config is byte-identical".to_string())),
        Err(e) => items.push((false, format!("rerun failed: {e}"))),
    }
    gather(items)
}

fn uniform_unbiased() -> (bool, String) {
    let haar = WaveletFilter::haar();
    let uniform = CoefficientTree::new(Dimension::One, 4).unwrap().with_scaling(1.0);
    let sampler = DensitySampler::new(&uniform, &haar).unwrap();
    let runs = 50;
    let trees: Vec<CoefficientTree> = (0..runs)
        .map(|r| empirical_coefficients(&sampler.sample(500, derive_seed(3, r)).unwrap(), &haar, 4).unwrap())
        .collect();
    let mut ok = true;
    let mut worst = 0.0f64;
    for (j, k) in [(0u32, 0u64), (2, 1), (4, 9)] {
        let idx = LevelIndex::one(j, k).unwrap();
        let vals: Vec<f64> = trees.iter().map(|t| t.get(&idx)).collect();
        let mean = vals.iter().sum::<f64>() / runs as f64;
        let sd = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (runs as f64 - 1.0)).sqrt();
        let z = mean.abs() / (sd / (runs as f64).sqrt());
        worst = worst.max(z);
        ok &= z < 3.0;
    }
    (ok, format!("uniform density: empirical coefficients unbiased, worst |mean|/se = {worst:.2} < 3"))
}

fn criterion_10() -> Check {
    let (ok, line) = uniform_unbiased();
    let mut lines = vec![format!("{} {line}", if ok { "ok  " } else { "FAIL" })];
    match from_config("criterion-10-density-threshold.toml") {
        Ok(more) if ok => {
            lines.extend(more);
            Ok(lines)
        }
        Ok(more) | Err(more) => {
            lines.extend(more);
            Err(lines)
        }
    }
}

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        (1, "dense-regime threshold rate", || from_config("criterion-01-dense-threshold.toml")),
        (2, "sparse-regime linear vs threshold gap", || from_config("criterion-02-sparse-gap.toml")),
        (3, "probe invariance", || from_config("criterion-03-probe-invariance.toml")),
        (4, "scaling function of g", || from_config("criterion-04-scaling-function.toml")),
        (5, "weak exclusion growth", || from_config("criterion-05-weak-exclusion.toml")),
        (6, "closed-form Gaussian risk", criterion_6),
        (7, "upper bound stability of the linear run", || from_config("criterion-07-linear-product.toml")),
        (8, "one-sided lower-bound exponents", || from_config("criterion-08-lower-bounds.toml")),
        (9, "structural suites", criterion_9),
        (10, "density model", criterion_10),
    ];
    let mut failed = Vec::new();
    for (id, title, check) in &criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        let (status, lines) = match &outcome {
            Ok(l) => ("PASS", l),
            Err(l) => ("FAIL", l),
        };
        println!("criterion {id:>2} {status}  {title} ({secs:.1} s)");
        for l in lines {
            println!("      {l}");
        }
        if outcome.is_err() {
            failed.push(*id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        let ids: Vec<String> = failed.iter().map(|i| i.to_string()).collect();
        println!("acceptance: {} of {} criteria failed: {}", failed.len(), criteria.len(), ids.join(", "));
        ExitCode::FAILURE
    }
}
