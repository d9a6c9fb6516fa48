use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use causal_bench::dataio::{read_per_run, write_per_run, write_tables};
use causal_bench::harness::{
    aggregate, generate_corpus, load_records, parse_algorithms, report, run_matrix, CorpusConfig, RunMatrixConfig,
    RunStatus,
};
use causal_bench::simulate::ParamRanges;
use clap::{Parser, Subcommand};
use serde::Deserialize;

/// Benchmark driver for causal structure search.
#[derive(Parser)]
#[command(name = "causal-bench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the simulated corpus described by a config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `out` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every algorithm on every data set of a corpus.
    Run {
        #[arg(long)]
        corpus: PathBuf,
        /// `name:key=val,...` specs separated by `;`.
        #[arg(long)]
        algs: String,
        /// Per-run limit in seconds.
        #[arg(long, default_value_t = 600.0)]
        timeout: f64,
        /// Concurrent runs.
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value = "records")]
        out: PathBuf,
    },
    /// Score the estimated graphs against the truth and write per_run.txt
    /// plus the three result tables.
    Aggregate {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Defaults to the corpus recorded by `run`.
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
    /// Rebuild stats.txt, std.txt and config.txt from per_run.txt.
    Report {
        #[arg(long)]
        out: PathBuf,
        /// Defaults to `OUT/per_run.txt`.
        #[arg(long)]
        per_run: Option<PathBuf>,
    },
}

/// Corpus config file (TOML). Every key is optional.
#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct SimulateConfig {
    seed: u64,
    runs: usize,
    out: PathBuf,
    vars: Vec<usize>,
    deg: Vec<usize>,
    n: Vec<usize>,
    coef_low: f64,
    coef_high: f64,
    var_low: f64,
    var_high: f64,
    random_signs: bool,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        let p = ParamRanges::default();
        SimulateConfig {
            seed: 0,
            runs: 10,
            out: PathBuf::from("corpus"),
            vars: vec![50, 100, 500],
            deg: vec![2, 4, 6],
            n: vec![100, 500, 1000],
            coef_low: p.coef_low,
            coef_high: p.coef_high,
            var_low: p.var_low,
            var_high: p.var_high,
            random_signs: p.random_signs,
        }
    }
}

impl SimulateConfig {
    fn corpus(&self) -> CorpusConfig {
        let mut cells = Vec::new();
        for &v in &self.vars {
            for &d in &self.deg {
                for &n in &self.n {
                    cells.push((v, d, n));
                }
            }
        }
        CorpusConfig {
            cells,
            runs: self.runs,
            master_seed: self.seed,
            params: ParamRanges {
                coef_low: self.coef_low,
                coef_high: self.coef_high,
                var_low: self.var_low,
                var_high: self.var_high,
                random_signs: self.random_signs,
            },
        }
    }
}

fn simulate(config: &Path, out: Option<PathBuf>) -> Result<()> {
    let text = std::fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
    let mut cfg: SimulateConfig = toml::from_str(&text).with_context(|| format!("parsing {}", config.display()))?;
    if let Ok(seed) = std::env::var("CAUSAL_BENCH_SEED") {
        cfg.seed = seed.trim().parse().with_context(|| format!("CAUSAL_BENCH_SEED=`{seed}` is not a u64"))?;
    }
    let out = out.unwrap_or_else(|| cfg.out.clone());
    let cells = generate_corpus(&cfg.corpus(), &out)?;
    eprintln!("wrote {} data sets to {} (seed {})", cells.len(), out.display(), cfg.seed);
    Ok(())
}

fn run(corpus: &Path, algs: &str, timeout: f64, workers: usize, out: &Path) -> Result<bool> {
    if !(timeout > 0.0 && timeout.is_finite()) {
        bail!("--timeout must be a positive number of seconds");
    }
    let mut config = RunMatrixConfig::new(parse_algorithms(algs)?);
    if config.algorithms.is_empty() {
        bail!("--algs names no algorithm");
    }
    config.timeout = Duration::from_secs_f64(timeout);
    config.workers = workers.max(1);
    let records = run_matrix(&config, corpus, out)?;
    let count = |s| records.iter().filter(|r| r.status == s).count();
    eprintln!(
        "{} runs: {} OK, {} TIMEOUT, {} ERROR",
        records.len(),
        count(RunStatus::Ok),
        count(RunStatus::Timeout),
        count(RunStatus::Error)
    );
    let errors: Vec<_> = records.iter().filter(|r| r.status == RunStatus::Error).collect();
    for r in &errors {
        eprintln!(
            "ERROR alg{} {} vars{}_deg{}_n{} run{}",
            r.alg_id, r.label, r.cell.vars, r.cell.avg_degree, r.cell.n, r.cell.run
        );
    }
    Ok(errors.is_empty())
}

fn aggregate_cmd(records_dir: &Path, out: &Path, corpus: Option<PathBuf>) -> Result<()> {
    let (records, recorded) = load_records(records_dir)?;
    let Some(corpus) = corpus.or(recorded) else {
        bail!("no corpus.txt in {}; pass --corpus", records_dir.display());
    };
    let rows = aggregate(&records, records_dir, &corpus)?;
    write_per_run(&rows, &out.join("per_run.txt"))?;
    let (means, stds, config) = report(&rows)?;
    write_tables(&means, &stds, &config, out)?;
    eprintln!("scored {} runs into {}", rows.len(), out.display());
    Ok(())
}

fn report_cmd(out: &Path, per_run: Option<PathBuf>) -> Result<()> {
    let rows = read_per_run(&per_run.unwrap_or_else(|| out.join("per_run.txt")))?;
    let (means, stds, config) = report(&rows)?;
    write_tables(&means, &stds, &config, out)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate { config, out } => simulate(&config, out).map(|_| true),
        Command::Run { corpus, algs, timeout, workers, out } => run(&corpus, &algs, timeout, workers, &out),
        Command::Aggregate { records, out, corpus } => aggregate_cmd(&records, &out, corpus).map(|_| true),
        Command::Report { out, per_run } => report_cmd(&out, per_run).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
