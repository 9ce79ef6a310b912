//! Experiment execution, verdict evaluation and re-rendering from stored tables.

use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::tables::{
    cells, field, parse, read_risk_csv, render, MANIFEST_FILE, RISK_HEADER, SCALING_HEADER, SLOPE_HEADER,
    VERDICTS_FILE, VERDICT_HEADER, WITNESS_HEADER,
};
use super::{
    Analysis, BaseSpec, EstimatorEntry, ExperimentConfig, Manifest, ModelKind, Relation, RunReport, TruthSpec, Verdict,
};
use crate::dyadic::CoefficientTree;
use crate::error::{Error, Result, ResultExt};
use crate::function_spaces::{empirical_scaling, theoretical_scaling};
use crate::generic::{build_g, dense_series, probe_perturb, sparse_series, weak_exclusion_witness, GenericFunctionSpec, ProbeDraw, WitnessPoint};
use crate::rates::{fit_slope, linear_minimax_rate, monte_carlo_risk, Cutoff, EstimatorSpec, LossSpec, ModelSpec, RiskTable, SlopeFit};
use crate::records::read_tree;
use crate::regression::ols;
use crate::wavelet::WaveletFilter;

/// One Monte Carlo risk curve and its log-log fit.
#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub label: String,
    pub table: RiskTable,
    pub slope: SlopeFit,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingRow {
    pub p: f64,
    pub estimate: f64,
    pub theory: f64,
    pub residual: f64,
}

/// Everything verdicts are computed from.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Tables {
    pub fits: Vec<FitResult>,
    pub scaling: Vec<ScalingRow>,
    pub witness: Vec<WitnessPoint>,
}

fn referenced_files(config: &ExperimentConfig) -> Vec<&Path> {
    match &config.truth {
        TruthSpec::GenericG {
            base: BaseSpec::TreeFile { path },
            ..
        }
        | TruthSpec::ExplicitTreeFile { path } => vec![path.as_path()],
        _ => Vec::new(),
    }
}

/// SHA-256 of the resolved config with `output_dir` blanked, then of each referenced file.
pub fn content_hash(config: &ExperimentConfig) -> Result<String> {
    let mut blank = config.clone();
    blank.output_dir = PathBuf::new();
    let mut hasher = Sha256::new();
    hasher.update(serde_json::to_vec(&blank)?);
    for path in referenced_files(config) {
        hasher.update(fs::read(path).context(|| format!("reading {}", path.display()))?);
    }
    Ok(hex::encode(hasher.finalize()))
}

fn load_tree(path: &Path) -> Result<CoefficientTree> {
    let file = File::open(path).context(|| format!("opening {}", path.display()))?;
    read_tree(BufReader::new(file)).context(|| format!("reading tree {}", path.display()))
}

fn generic_g(config: &ExperimentConfig) -> Result<(GenericFunctionSpec, CoefficientTree)> {
    let p = &config.smoothness;
    let spec = GenericFunctionSpec::new(p.s, p.r, p.d, config.j_max)?;
    let g = build_g(&spec)?;
    Ok((spec, g))
}

fn base_tree(config: &ExperimentConfig, base: &BaseSpec) -> Result<CoefficientTree> {
    let p = &config.smoothness;
    match base {
        BaseSpec::Zero => CoefficientTree::new(p.d, config.j_max),
        BaseSpec::DenseSeries { amplitude, seed } => dense_series(p.s, p.d, config.j_max, *amplitude, *seed),
        BaseSpec::SparseSeries { amplitude, seed } => sparse_series(p.s, p.r, p.d, config.j_max, *amplitude, *seed),
        BaseSpec::TreeFile { path } => load_tree(path),
    }
}

fn base_id(base: &BaseSpec) -> String {
    match base {
        BaseSpec::Zero => "zero".to_string(),
        BaseSpec::DenseSeries { amplitude, seed } => format!("dense_series(a={amplitude};seed={seed})"),
        BaseSpec::SparseSeries { amplitude, seed } => format!("sparse_series(a={amplitude};seed={seed})"),
        BaseSpec::TreeFile { path } => format!("tree_file({})", path.display()),
    }
}

fn truth_id(config: &ExperimentConfig, probe: Option<f64>) -> String {
    let p = &config.smoothness;
    match &config.truth {
        TruthSpec::GenericG { probe: draw, base } => format!(
            "generic_g(s={};r={};alpha={};base={})",
            p.s,
            p.r,
            probe.unwrap_or(draw.alpha()),
            base_id(base)
        ),
        TruthSpec::ExplicitTreeFile { path } => format!("tree_file({})", path.display()),
        TruthSpec::UniformDensity => "uniform_density".to_string(),
        TruthSpec::CustomBump {
            level,
            position,
            amplitude,
        } => format!("custom_bump(j={level};k={position};a={amplitude})"),
    }
}

/// The truth tree; `probe` overrides the configured `α` of a generic truth.
fn build_truth(config: &ExperimentConfig, probe: Option<f64>) -> Result<CoefficientTree> {
    let dim = config.smoothness.d;
    match &config.truth {
        TruthSpec::GenericG { probe: draw, base } => {
            let (_, g) = generic_g(config)?;
            let base = base_tree(config, base)?;
            let draw = match probe {
                Some(a) => ProbeDraw::new(a, draw.seed())?,
                None => *draw,
            };
            probe_perturb(&base, &g, draw)
        }
        TruthSpec::ExplicitTreeFile { path } => load_tree(path),
        TruthSpec::UniformDensity => Ok(CoefficientTree::new(dim, config.j_max)?.with_scaling(1.0)),
        TruthSpec::CustomBump {
            level,
            position,
            amplitude,
        } => {
            let mut tree = CoefficientTree::new(dim, config.j_max)?.with_scaling(1.0);
            let slot = tree
                .level_mut(*level)
                .get_mut(*position as usize)
                .ok_or_else(|| Error::IndexOutOfRange(format!("bump position {position} at level {level}")))?;
            *slot = *amplitude;
            Ok(tree)
        }
    }
}

fn model_spec(config: &ExperimentConfig) -> Result<ModelSpec> {
    Ok(match config.model {
        ModelKind::Sequence => ModelSpec::Sequence { j_max: config.j_max },
        ModelKind::Density => ModelSpec::Density {
            filter: WaveletFilter::by_name(&config.filter)?,
            j_max: config.j_max,
        },
    })
}

fn fit_one(config: &ExperimentConfig, truth: &CoefficientTree, entry: &EstimatorEntry, label: &str) -> Result<FitResult> {
    let loss = LossSpec::new(config.smoothness.p, WaveletFilter::by_name(&config.filter)?)?;
    let table = monte_carlo_risk(
        truth,
        &entry.spec,
        &model_spec(config)?,
        &config.n_grid,
        config.replicates,
        &loss,
        config.master_seed,
    )
    .context(|| format!("estimator `{label}`"))?;
    let slope = fit_slope(&table, entry.normalization).context(|| format!("slope fit for `{label}`"))?;
    Ok(FitResult {
        label: label.to_string(),
        table,
        slope,
    })
}

fn probe_label(entry: &EstimatorEntry, i: usize) -> String {
    format!("{}.probe{i}", entry.label)
}

/// `(label, estimator, probe α override)` for every risk curve of the experiment.
fn fit_plan(config: &ExperimentConfig) -> Vec<(String, &EstimatorEntry, Option<f64>)> {
    match &config.analysis {
        Analysis::RateFit { estimators, .. } | Analysis::DensityRateFit { estimators, .. } => {
            estimators.iter().map(|e| (e.label.clone(), e, None)).collect()
        }
        Analysis::ProbeSweep {
            estimator,
            probe_alphas,
            ..
        } => probe_alphas
            .iter()
            .enumerate()
            .map(|(i, a)| (probe_label(estimator, i), estimator, Some(*a)))
            .collect(),
        Analysis::ScalingFunction { .. } | Analysis::WeakExclusion { .. } => Vec::new(),
    }
}

fn compute(config: &ExperimentConfig) -> Result<Tables> {
    let mut tables = Tables::default();
    let plan = fit_plan(config);
    let fixed_truth = match &config.analysis {
        Analysis::ProbeSweep { .. } | Analysis::WeakExclusion { .. } => None,
        _ => Some(build_truth(config, None).context(|| "building truth".to_string())?),
    };
    for (label, entry, probe) in &plan {
        let fit = match (&fixed_truth, probe) {
            (Some(truth), None) => fit_one(config, truth, entry, label)?,
            _ => {
                let truth = build_truth(config, *probe).context(|| format!("building truth for `{label}`"))?;
                fit_one(config, &truth, entry, label)?
            }
        };
        tables.fits.push(fit);
    }
    let sm = &config.smoothness;
    match &config.analysis {
        Analysis::ScalingFunction { p_values, window, .. } => {
            let truth = fixed_truth.as_ref().expect("scaling experiments build their truth");
            for &p in p_values {
                let est = empirical_scaling(truth, p, *window).context(|| format!("scaling function at p = {p}"))?;
                tables.scaling.push(ScalingRow {
                    p,
                    estimate: est.estimate,
                    theory: theoretical_scaling(sm.s, sm.r, p, sm.d)?,
                    residual: est.residual,
                });
            }
        }
        Analysis::WeakExclusion { eps, t_max, .. } => {
            let (spec, _) = generic_g(config)?;
            tables.witness = weak_exclusion_witness(&spec, sm.p, *eps, *t_max).context(|| "exclusion witness".to_string())?;
        }
        _ => {}
    }
    Ok(tables)
}

fn fit_checks(criterion: &str, entry: &EstimatorEntry, fit: &FitResult, config: &ExperimentConfig, out: &mut Vec<Verdict>) {
    let label = &fit.label;
    if let Some(x) = &entry.expectation {
        let relation = if x.one_sided { Relation::AtMost } else { Relation::Within };
        out.push(Verdict::new(
            criterion,
            format!("implied_alpha[{label}] vs {} ({})", x.source, entry.normalization.label()),
            fit.slope.implied_alpha,
            x.expected,
            x.tolerance,
            relation,
        ));
    }
    if let Some(min) = entry.min_r_squared {
        out.push(Verdict::new(criterion, format!("r_squared[{label}]"), fit.slope.r_squared, min, 0.0, Relation::AtLeast));
    }
    if let Some(max) = entry.max_product_ratio {
        let cutoff = match entry.spec {
            EstimatorSpec::Projection { cutoff }
            | EstimatorSpec::Pinsker { cutoff, .. }
            | EstimatorSpec::DensityLinear { cutoff } => cutoff,
            _ => Cutoff::Fixed(1.0),
        };
        let p = config.smoothness.p;
        let s_prime = linear_minimax_rate(&config.smoothness, config.n_grid[0]).0.s_prime;
        let products: Vec<f64> = fit
            .table
            .rows()
            .iter()
            .map(|r| r.empirical_risk * cutoff.m_n(r.n).powf(s_prime * p))
            .collect();
        let hi = products.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = products.iter().copied().fold(f64::INFINITY, f64::min);
        out.push(Verdict::new(
            criterion,
            format!("max/min of risk·m_n^(s'p)[{label}]"),
            hi / lo,
            max,
            0.0,
            Relation::AtMost,
        ));
    }
}

fn find<'a>(tables: &'a Tables, label: &str) -> Result<&'a FitResult> {
    tables
        .fits
        .iter()
        .find(|f| f.label == label)
        .ok_or_else(|| Error::Config(format!("no risk table for `{label}`")))
}

/// Verdicts implied by the config's checks on the given tables.
pub fn evaluate(config: &ExperimentConfig, tables: &Tables) -> Result<Vec<Verdict>> {
    let c = config.criterion.as_str();
    let mut out = Vec::new();
    match &config.analysis {
        Analysis::RateFit { estimators, gap } | Analysis::DensityRateFit { estimators, gap } => {
            for e in estimators {
                fit_checks(c, e, find(tables, &e.label)?, config, &mut out);
            }
            if let Some(g) = gap {
                let above = find(tables, &g.above)?.slope.implied_alpha;
                let below = find(tables, &g.below)?.slope.implied_alpha;
                out.push(Verdict::new(
                    c,
                    format!("implied_alpha[{}] − implied_alpha[{}]", g.above, g.below),
                    above - below,
                    g.min_gap,
                    0.0,
                    Relation::AtLeast,
                ));
            }
        }
        Analysis::ProbeSweep {
            estimator,
            probe_alphas,
            max_spread,
        } => {
            let mut alphas = Vec::new();
            for i in 0..probe_alphas.len() {
                let fit = find(tables, &probe_label(estimator, i))?;
                fit_checks(c, estimator, fit, config, &mut out);
                alphas.push(fit.slope.implied_alpha);
            }
            let hi = alphas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = alphas.iter().copied().fold(f64::INFINITY, f64::min);
            out.push(Verdict::new(
                c,
                format!("max pairwise spread of implied_alpha[{}] over probes", estimator.label),
                hi - lo,
                *max_spread,
                0.0,
                Relation::AtMost,
            ));
        }
        Analysis::ScalingFunction { tolerance, .. } => {
            for row in &tables.scaling {
                out.push(Verdict::new(
                    c,
                    format!("scaling_function[p={}]", row.p),
                    row.estimate,
                    row.theory,
                    *tolerance,
                    Relation::Within,
                ));
            }
        }
        Analysis::WeakExclusion {
            eps,
            t_min,
            t_max,
            rel_tolerance,
        } => {
            let pts: Vec<&WitnessPoint> = tables.witness.iter().filter(|w| (*t_min..=*t_max).contains(&w.t)).collect();
            let x: Vec<f64> = pts.iter().map(|w| w.t as f64).collect();
            let y: Vec<f64> = pts.iter().map(|w| w.log2_bound).collect();
            let slope = ols(&x, &y).map(|f| f.slope).unwrap_or(f64::NAN);
            let expected = eps * config.smoothness.p;
            out.push(Verdict::new(
                c,
                format!("log2 slope of exclusion witness over t ∈ [{t_min}, {t_max}]"),
                slope,
                expected,
                rel_tolerance * expected,
                Relation::Within,
            ));
        }
    }
    Ok(out)
}

fn write(path: PathBuf, text: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(&path, text).context(|| format!("writing {}", path.display()))?;
    written.push(path);
    Ok(())
}

/// Runs the experiment, writing tables, `verdicts.csv` and `manifest.json` into `output_dir`.
pub fn run(config: &ExperimentConfig) -> Result<RunReport> {
    let content_hash = content_hash(config)?;
    let tables = compute(config)?;
    let verdicts = evaluate(config, &tables)?;

    let dir = &config.output_dir;
    fs::create_dir_all(dir).context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    for fit in &tables.fits {
        let rows: Vec<Vec<String>> = fit
            .table
            .rows()
            .iter()
            .map(|r| cells(&[&r.n, &r.empirical_risk, &r.std_error, &r.replicates]))
            .collect();
        write(dir.join(format!("risk_{}.csv", fit.label)), &render(&content_hash, &RISK_HEADER, &rows), &mut written)?;
        let s = &fit.slope;
        let row = cells(&[&s.normalization.label(), &s.slope, &s.implied_alpha, &s.r_squared]);
        write(dir.join(format!("slope_{}.csv", fit.label)), &render(&content_hash, &SLOPE_HEADER, &[row]), &mut written)?;
    }
    if !tables.scaling.is_empty() {
        let rows: Vec<Vec<String>> = tables
            .scaling
            .iter()
            .map(|r| cells(&[&r.p, &r.estimate, &r.theory, &r.residual]))
            .collect();
        write(dir.join("scaling.csv"), &render(&content_hash, &SCALING_HEADER, &rows), &mut written)?;
    }
    if !tables.witness.is_empty() {
        let rows: Vec<Vec<String>> = tables
            .witness
            .iter()
            .map(|w| cells(&[&w.t, &w.bound, &w.log2_bound]))
            .collect();
        write(dir.join("witness.csv"), &render(&content_hash, &WITNESS_HEADER, &rows), &mut written)?;
    }
    let rows: Vec<Vec<String>> = verdicts
        .iter()
        .map(|v| {
            cells(&[
                &v.criterion,
                &v.check.replace(',', ";"),
                &v.measured,
                &v.expected,
                &v.tolerance,
                &v.relation.name(),
                &v.pass,
            ])
        })
        .collect();
    write(dir.join(VERDICTS_FILE), &render(&content_hash, &VERDICT_HEADER, &rows), &mut written)?;

    let manifest = Manifest {
        content_hash,
        config: config.clone(),
    };
    let mut json = serde_json::to_string_pretty(&manifest)?;
    json.push('\n');
    let manifest_path = dir.join(MANIFEST_FILE);
    fs::write(&manifest_path, json).context(|| format!("writing {}", manifest_path.display()))?;

    Ok(RunReport {
        manifest,
        tables: written,
        verdicts,
    })
}

fn check_hash(path: &Path, found: Option<String>, expected: &str) -> Result<()> {
    match found {
        Some(h) if h == expected => Ok(()),
        other => Err(Error::Config(format!(
            "{} was written under manifest {}, expected {expected}",
            path.display(),
            other.as_deref().unwrap_or("<none>")
        ))),
    }
}

/// Re-derives the verdicts of a finished run from the tables stored in `dir`.
pub fn report(dir: &Path) -> Result<RunReport> {
    let manifest_path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&manifest_path).context(|| format!("reading {}", manifest_path.display()))?;
    let manifest: Manifest = serde_json::from_str(&text)?;
    let config = &manifest.config;
    let hash = manifest.content_hash.as_str();
    let mut tables = Tables::default();
    let mut paths = Vec::new();

    for (label, entry, probe) in fit_plan(config) {
        let path = dir.join(format!("risk_{label}.csv"));
        let (rows, found) = read_risk_csv(&path).context(|| format!("reading {}", path.display()))?;
        check_hash(&path, found, hash)?;
        let table = RiskTable::new(rows, config.smoothness.p, entry.spec.id(), truth_id(config, probe))?;
        let slope = fit_slope(&table, entry.normalization)?;
        tables.fits.push(FitResult { label, table, slope });
        paths.push(path);
    }
    match &config.analysis {
        Analysis::ScalingFunction { .. } => {
            let path = dir.join("scaling.csv");
            let t = parse(&fs::read_to_string(&path)?, &SCALING_HEADER).context(|| format!("reading {}", path.display()))?;
            check_hash(&path, t.hash, hash)?;
            for (n, f) in &t.records {
                tables.scaling.push(ScalingRow {
                    p: field(*n, &f[0], "p")?,
                    estimate: field(*n, &f[1], "estimate")?,
                    theory: field(*n, &f[2], "theory")?,
                    residual: field(*n, &f[3], "residual")?,
                });
            }
            paths.push(path);
        }
        Analysis::WeakExclusion { .. } => {
            let path = dir.join("witness.csv");
            let t = parse(&fs::read_to_string(&path)?, &WITNESS_HEADER).context(|| format!("reading {}", path.display()))?;
            check_hash(&path, t.hash, hash)?;
            for (n, f) in &t.records {
                tables.witness.push(WitnessPoint {
                    t: field(*n, &f[0], "t")?,
                    bound: field(*n, &f[1], "bound")?,
                    log2_bound: field(*n, &f[2], "log2_bound")?,
                });
            }
            paths.push(path);
        }
        _ => {}
    }
    let verdicts = evaluate(config, &tables)?;
    Ok(RunReport {
        manifest,
        tables: paths,
        verdicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Dimension;
    use crate::experiment::validate_config;

    fn with_out(raw: &str, dir: &Path) -> ExperimentConfig {
        let mut c = validate_config(raw).unwrap();
        c.output_dir = dir.to_path_buf();
        c
    }

    const SMALL_FIT: &str = r#"
experiment_kind = "rate_fit"
criterion = "t"
n_grid_log2 = [8, 11]
replicates = 4
master_seed = 9
j_max = 8
[smoothness]
s = 2.0
r = 2.0
[truth]
kind = "generic_g"
probe_alpha = 0.5
[[estimator]]
kind = "threshold.hard"
[[estimator]]
kind = "linear.projection"
max_product_ratio = 100.0
[analysis]
gap = { above = "threshold.hard", below = "linear.projection", min_gap = -10.0 }
"#;

    #[test]
    fn rerun_is_byte_identical_and_report_agrees() {
        let dir = tempfile::tempdir().unwrap();
        let c = with_out(SMALL_FIT, dir.path());
        let first = run(&c).unwrap();
        let snapshot: Vec<(PathBuf, Vec<u8>)> = fs::read_dir(dir.path())
            .unwrap()
            .map(|e| {
                let p = e.unwrap().path();
                let b = fs::read(&p).unwrap();
                (p, b)
            })
            .collect();
        let second = run(&c).unwrap();
        assert_eq!(first.manifest.content_hash, second.manifest.content_hash);
        for (p, b) in &snapshot {
            assert_eq!(&fs::read(p).unwrap(), b, "{}", p.display());
        }
        let again = report(dir.path()).unwrap();
        assert_eq!(again.verdicts, first.verdicts);
        assert_eq!(first.verdicts.len(), 4);
        assert!(first.verdicts.iter().all(|v| v.criterion == "t"));
    }

    #[test]
    fn every_table_has_manifest_comment_and_header() {
        let dir = tempfile::tempdir().unwrap();
        let rep = run(&with_out(SMALL_FIT, dir.path())).unwrap();
        let first_line = format!("# manifest {}", rep.manifest.content_hash);
        for p in &rep.tables {
            let text = fs::read_to_string(p).unwrap();
            let mut lines = text.lines();
            assert_eq!(lines.next(), Some(first_line.as_str()), "{}", p.display());
            assert!(lines.next().unwrap().contains(','));
        }
        let names: Vec<String> = fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        assert_eq!(names.len(), rep.tables.len() + 1);
    }

    #[test]
    fn hash_ignores_output_dir_but_not_seed() {
        let a = with_out(SMALL_FIT, Path::new("/tmp/a"));
        let b = with_out(SMALL_FIT, Path::new("/tmp/b"));
        assert_eq!(content_hash(&a).unwrap(), content_hash(&b).unwrap());
        let mut c = a.clone();
        c.master_seed += 1;
        assert_ne!(content_hash(&a).unwrap(), content_hash(&c).unwrap());
    }

    #[test]
    fn tampered_table_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        run(&with_out(SMALL_FIT, dir.path())).unwrap();
        let p = dir.path().join("risk_threshold.hard.csv");
        let text = fs::read_to_string(&p).unwrap().replacen("# manifest ", "# manifest x", 1);
        fs::write(&p, text).unwrap();
        assert!(matches!(report(dir.path()), Err(Error::Config(_))));
    }

    #[test]
    fn scaling_and_witness_tables() {
        let dir = tempfile::tempdir().unwrap();
        let raw = "experiment_kind = \"weak_exclusion\"\nj_max = 16\n[smoothness]\ns = 2.0\nr = 2.0\n";
        let rep = run(&with_out(raw, dir.path())).unwrap();
        assert_eq!(rep.verdicts.len(), 1);
        assert!(rep.passed(), "{}", rep.verdicts[0]);
        assert_eq!(report(dir.path()).unwrap().verdicts, rep.verdicts);

        let dir = tempfile::tempdir().unwrap();
        let raw = "experiment_kind = \"scaling_function\"\nj_max = 12\n[smoothness]\ns = 2.0\nr = 2.0\n[truth]\nkind = \"generic_g\"\nprobe_alpha = 1.0\n[analysis]\nwindow = [3, 10]\np_values = [2.0]\n";
        let rep = run(&with_out(raw, dir.path())).unwrap();
        assert_eq!(rep.verdicts.len(), 1);
        assert_eq!(report(dir.path()).unwrap().verdicts, rep.verdicts);
    }

    #[test]
    fn bump_truth_in_density_model() {
        let raw = "experiment_kind = \"density_rate_fit\"\nfilter = \"haar\"\nj_max = 6\n[smoothness]\ns = 2.0\nr = 2.0\n[truth]\nkind = \"custom_bump\"\nlevel = 2\nposition = 1\namplitude = 0.25\n";
        let c = validate_config(raw).unwrap();
        let t = build_truth(&c, None).unwrap();
        assert_eq!(t.scaling(), 1.0);
        assert_eq!(t.level(2).unwrap(), &[0.0, 0.25, 0.0, 0.0]);
        assert_eq!(t.nonzero_count(), 1);
        assert_eq!(Dimension::One, t.dim());
    }
}
