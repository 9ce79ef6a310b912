//! `genrates` command line: run, validate and report experiments, dump the generic
//! function, print theoretical rate tables.
//!
//! Flags can also be set through `GENRATES_*` environment variables
//! (`GENRATES_CONFIG`, `GENRATES_SEED`, `GENRATES_OUT`, `GENRATES_THREADS`, `GENRATES_DIR`).

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use genrates::experiment::{content_hash, report, run, validate_config_at, ExperimentConfig, RunReport};
use genrates::function_spaces::SmoothnessParams;
use genrates::generic::{build_g, GenericFunctionSpec};
use genrates::rates::{generic_alpha, linear_minimax_rate, minimax_rate, GenericFamily};
use genrates::records::write_tree;
use genrates::Dimension;

#[derive(Parser)]
#[command(name = "genrates", version, about = "Generic convergence rates of wavelet estimators")]
struct Cli {
    /// Worker threads for Monte Carlo runs (default: all cores).
    #[arg(long, global = true, env = "GENRATES_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    #[arg(long, env = "GENRATES_CONFIG")]
    config: PathBuf,

    /// Overrides `master_seed`.
    #[arg(long, env = "GENRATES_SEED")]
    seed: Option<u64>,

    /// Overrides `output_dir`.
    #[arg(long, env = "GENRATES_OUT")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its tables and manifest.
    Run(ConfigArgs),
    /// Resolve a config and print it with its content hash.
    Validate(ConfigArgs),
    /// Write the coefficient tree of the generic function as CSV.
    BuildG {
        #[arg(long)]
        s: f64,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 1)]
        d: u32,
        #[arg(long, default_value_t = 12)]
        j_max: u32,
        /// Output file (default: stdout).
        #[arg(long, env = "GENRATES_OUT")]
        out: Option<PathBuf>,
    },
    /// Print theoretical exponents over a parameter grid as CSV.
    Rates {
        #[arg(long, value_delimiter = ',', required = true)]
        s: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        r: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        d: u32,
    },
    /// Re-derive verdicts from the tables of a finished run.
    Report {
        #[arg(long, env = "GENRATES_DIR")]
        dir: PathBuf,
    },
}

fn load(args: &ConfigArgs) -> Result<ExperimentConfig> {
    let raw = fs::read_to_string(&args.config).with_context(|| format!("reading {}", args.config.display()))?;
    let base = args.config.parent().unwrap_or(Path::new("."));
    let mut config = validate_config_at(&raw, base).with_context(|| format!("invalid config {}", args.config.display()))?;
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if let Some(out) = &args.out {
        config.output_dir = out.clone();
    }
    Ok(config)
}

fn print_report(rep: &RunReport) -> ExitCode {
    println!("manifest {}", rep.manifest.content_hash);
    for v in &rep.verdicts {
        println!("{v}");
    }
    let failures: Vec<_> = rep.failures().collect();
    if failures.is_empty() {
        println!("all {} verdicts passed", rep.verdicts.len());
        ExitCode::SUCCESS
    } else {
        eprintln!("{} of {} verdicts failed:", failures.len(), rep.verdicts.len());
        for (i, v) in failures.iter().enumerate() {
            eprintln!("  {}. {v}", i + 1);
        }
        ExitCode::from(1)
    }
}

fn rates_table(s: &[f64], r: &[f64], p: &[f64], d: Dimension, out: &mut impl Write) -> Result<()> {
    writeln!(
        out,
        "s,r,p,d,branch,minimax_alpha,minimax_normalization,linear_alpha,linear_normalization,generic_threshold_alpha,generic_linear_alpha,alpha_tilde"
    )?;
    for &s in s {
        for &r in r {
            for &p in p {
                let params = match SmoothnessParams::new(s, r, p, d) {
                    Ok(params) => params,
                    Err(e) => {
                        eprintln!("skipping s={s} r={r} p={p}: {e}");
                        continue;
                    }
                };
                let (mm, _) = minimax_rate(&params, 2);
                let (lin, _) = linear_minimax_rate(&params, 2);
                let thr = generic_alpha(GenericFamily::Threshold, &params);
                let glin = generic_alpha(GenericFamily::Linear, &params);
                writeln!(
                    out,
                    "{s},{r},{p},{},{},{},{},{},{},{},{},{}",
                    d.get(),
                    serde_json::to_value(mm.branch)?.as_str().unwrap_or_default(),
                    mm.alpha,
                    mm.normalization.label(),
                    lin.alpha,
                    lin.normalization.label(),
                    thr.alpha,
                    glin.alpha,
                    thr.alpha_tilde
                )?;
            }
        }
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<ExitCode> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match cli.command {
        Command::Run(args) => {
            let config = load(&args)?;
            let rep = run(&config).context("experiment failed")?;
            for t in &rep.tables {
                println!("wrote {}", t.display());
            }
            Ok(print_report(&rep))
        }
        Command::Validate(args) => {
            let config = load(&args)?;
            println!("{}", serde_json::to_string_pretty(&config)?);
            println!("content_hash {}", content_hash(&config)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::BuildG { s, r, d, j_max, out } => {
            let d = Dimension::try_from(d)?;
            let spec = GenericFunctionSpec::new(s, r, d, j_max)?;
            let g = build_g(&spec)?;
            let comment = format!("generic function s={s} r={r} d={} a={}", d.get(), spec.exponent_a());
            match out {
                Some(path) => {
                    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                    write_tree(&g, BufWriter::new(file), Some(&comment))?;
                }
                None => write_tree(&g, io::stdout().lock(), Some(&comment))?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Rates { s, r, p, d } => {
            rates_table(&s, &r, &p, Dimension::try_from(d)?, &mut io::stdout().lock())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Report { dir } => {
            let rep = report(&dir).with_context(|| format!("re-reading {}", dir.display()))?;
            Ok(print_report(&rep))
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
