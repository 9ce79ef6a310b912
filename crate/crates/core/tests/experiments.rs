use std::fs;

use genrates::experiment::{report, run, validate_config, Analysis, ExperimentConfig, Relation};
use genrates::function_spaces::SmoothnessParams;
use genrates::rates::{generic_alpha, GenericFamily};
use genrates::Dimension;

const DENSE: &str = r#"
n_grid_log2 = [10, 16]
replicates = 16
master_seed = 21
filter = "haar"
j_max = 14
[smoothness]
s = 2.0
r = 2.0
p = 2.0
[truth]
kind = "generic_g"
probe_alpha = 0.7
base = { kind = "dense_series", amplitude = 256.0, seed = 4 }
"#;

fn config(kind: &str, extra: &str, dir: &std::path::Path) -> ExperimentConfig {
    let raw = format!("experiment_kind = \"{kind}\"\n{DENSE}{extra}");
    let mut c = validate_config(&raw).unwrap();
    c.output_dir = dir.to_path_buf();
    c
}

#[test]
fn probe_sweep_rate_does_not_depend_on_direction() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(
        "probe_sweep",
        "[[estimator]]\nkind = \"threshold.hard\"\n[analysis]\nprobe_alphas = [-1.0, -0.5, 0.5, 1.0]\n",
        dir.path(),
    );
    let rep = run(&c).unwrap();
    assert_eq!(rep.verdicts.len(), 1);
    let v = &rep.verdicts[0];
    assert_eq!(v.relation, Relation::AtMost);
    assert!(v.pass && v.measured < 0.05, "{v}");
    let risk_files = rep.tables.iter().filter(|p| p.file_name().unwrap().to_str().unwrap().starts_with("risk_")).count();
    assert_eq!(risk_files, 4);
}

#[test]
fn rate_fit_compares_to_generic_threshold_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let c = config("rate_fit", "[[estimator]]\nkind = \"threshold.hard\"\n", dir.path());
    let Analysis::RateFit { estimators, .. } = &c.analysis else { panic!() };
    let want = generic_alpha(GenericFamily::Threshold, &SmoothnessParams::new(2.0, 2.0, 2.0, Dimension::One).unwrap());
    let x = estimators[0].expectation.as_ref().unwrap();
    assert_eq!(x.expected, want.alpha);
    assert_eq!(estimators[0].normalization, want.normalization);

    let rep = run(&c).unwrap();
    let v = &rep.verdicts[0];
    assert!(v.check.contains("generic_alpha(threshold)"));
    assert_eq!(v.expected, want.alpha);
    assert!(v.pass, "{v}");

    let slope = fs::read_to_string(dir.path().join("slope_threshold.hard.csv")).unwrap();
    let row: Vec<&str> = slope.lines().nth(2).unwrap().split(',').collect();
    assert_eq!(row[0], "n_over_log_n");
    assert_eq!(row[2].parse::<f64>().unwrap(), v.measured);
}

#[test]
fn same_config_same_hash_and_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let c = config("rate_fit", "[[estimator]]\nkind = \"linear.projection\"\n", dir.path());
    let a = run(&c).unwrap();
    let bytes: Vec<Vec<u8>> = a.tables.iter().map(|p| fs::read(p).unwrap()).collect();
    let b = run(&c).unwrap();
    assert_eq!(a.manifest.content_hash, b.manifest.content_hash);
    for (p, before) in a.tables.iter().zip(&bytes) {
        assert_eq!(&fs::read(p).unwrap(), before, "{}", p.display());
    }
    assert_eq!(report(dir.path()).unwrap().verdicts, a.verdicts);
}

#[test]
fn witness_and_scaling_tables_use_documented_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let c = config("weak_exclusion", "", dir.path());
    run(&c).unwrap();
    let text = fs::read_to_string(dir.path().join("witness.csv")).unwrap();
    assert_eq!(text.lines().nth(1), Some("t,bound,log2_bound"));
    assert_eq!(text.lines().count(), 2 + 30);

    let dir = tempfile::tempdir().unwrap();
    let c = config("scaling_function", "[analysis]\nwindow = [4, 12]\n", dir.path());
    let rep = run(&c).unwrap();
    let text = fs::read_to_string(dir.path().join("scaling.csv")).unwrap();
    assert_eq!(text.lines().nth(1), Some("p,estimate,theory,residual"));
    assert_eq!(rep.verdicts.len(), 3);
    assert!(rep.verdicts.iter().all(|v| v.criterion == "scaling_function"));
}
