//! Corpus generation, the run matrix, and aggregation into result tables.
//!
//! Directory layout:
//!
//! ```text
//! corpus/vars{V}_deg{D}_n{N}/run{R}/data.txt      simulated data, shuffled columns
//! corpus/vars{V}_deg{D}_n{N}/run{R}/graph.txt     true DAG
//! records/records.txt                             one line per run
//! records/corpus.txt                              path of the corpus used
//! records/alg{A}/vars{V}_deg{D}_n{N}/run{R}/graph.txt
//! ```
//!
//! Timing covers the search call only (correlations included, file I/O
//! excluded). Runs may execute concurrently; co-scheduled runs inflate each
//! other's elapsed times, so use one worker for timing studies.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::dataio::{
    format_number, read_dataset, read_graph, read_records, write_dataset, write_graph, write_records, AlgEntry,
    ConfigManifest, StatsTable,
};
use crate::error::{Error, Result};
use crate::fges::{fges_search_with_deadline, FgesConfig};
use crate::graph::{Dag, MixedGraph};
use crate::indtest::correlation_matrix;
use crate::metrics::{confusion, summarize, ConfusionCounts, StatRow, Stats};
use crate::pc::{run_pc_with_deadline, ConflictRule, PcVariant};
use crate::score::ScoreKind;
use crate::simulate::{
    cell_rng, draw_params_with, random_dag, shuffle_columns, simulate_recursive, DataSet, ParamRanges, SimCell,
};
use crate::util::Deadline;

// ---------------------------------------------------------------------------
// Algorithm specs

/// An algorithm with its parameters, written `name:key=val,key=val`.
///
/// ```
/// use causal_bench::harness::AlgorithmSpec;
/// let a: AlgorithmSpec = "pc-stable:alpha=0.001".parse().unwrap();
/// assert_eq!(a.label(), "pc-stable:alpha=0.001,conflict=priority");
/// let f: AlgorithmSpec = "fges:penalty=2".parse().unwrap();
/// assert_eq!(f.label(), "fges:score=sem-bic,penalty=2,faithfulness=false");
/// ```
#[derive(Debug, Clone, PartialEq)]
pub enum AlgorithmSpec {
    Pc(PcVariant),
    Fges(FgesConfig),
}

impl AlgorithmSpec {
    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmSpec::Pc(v) => v.name(),
            AlgorithmSpec::Fges(_) => "fges",
        }
    }

    /// Parameters that affect the output, in a fixed order. Thread counts are
    /// left out.
    pub fn params(&self) -> Vec<(String, String)> {
        match self {
            AlgorithmSpec::Pc(v) => vec![
                ("alpha".into(), format_number(v.alpha)),
                ("conflict".into(), v.conflict.as_str().into()),
            ],
            AlgorithmSpec::Fges(c) => {
                let mut p = match &c.score {
                    ScoreKind::SemBic { penalty } => {
                        vec![("score".into(), "sem-bic".into()), ("penalty".into(), format_number(*penalty))]
                    }
                    ScoreKind::FisherZ { alpha } => {
                        vec![("score".into(), "fisher-z".into()), ("alpha".into(), format_number(*alpha))]
                    }
                    ScoreKind::DsepOracle(_) => vec![("score".into(), "oracle".into())],
                };
                p.push(("faithfulness".into(), c.faithfulness_assumed.to_string()));
                p
            }
        }
    }

    pub fn label(&self) -> String {
        let params: Vec<String> = self.params().iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("{}:{}", self.name(), params.join(","))
    }

    pub fn run(&self, data: &DataSet, deadline: &Deadline) -> Result<MixedGraph> {
        match self {
            AlgorithmSpec::Pc(v) => run_pc_with_deadline(v, data, deadline),
            AlgorithmSpec::Fges(c) => fges_search_with_deadline(c, &correlation_matrix(data)?, deadline),
        }
    }
}

fn parse_value<T: FromStr>(key: &str, val: &str) -> Result<T> {
    val.parse().map_err(|_| Error::InvalidArgument(format!("bad value `{val}` for `{key}`")))
}

impl FromStr for AlgorithmSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut kv: BTreeMap<&str, &str> = BTreeMap::new();
        for pair in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("expected key=value, found `{pair}`")))?;
            kv.insert(k.trim(), v.trim());
        }
        fn take<'a>(kv: &mut BTreeMap<&str, &'a str>, k: &str) -> Option<&'a str> {
            kv.remove(k)
        }
        let spec = if name == "fges" {
            let score = take(&mut kv, "score").unwrap_or("sem-bic");
            let score = match score {
                "sem-bic" => ScoreKind::SemBic {
                    penalty: take(&mut kv, "penalty").map_or(Ok(1.0), |v| parse_value("penalty", v))?,
                },
                "fisher-z" => ScoreKind::FisherZ {
                    alpha: take(&mut kv, "alpha").map_or(Ok(0.01), |v| parse_value("alpha", v))?,
                },
                other => return Err(Error::InvalidArgument(format!("unknown score `{other}`"))),
            };
            let faithful = take(&mut kv, "faithfulness").map_or(Ok(false), |v| parse_value("faithfulness", v))?;
            let workers = take(&mut kv, "workers").map_or(Ok(1), |v| parse_value("workers", v))?;
            AlgorithmSpec::Fges(FgesConfig::new(score).faithfulness(faithful).workers(workers))
        } else {
            let alpha = take(&mut kv, "alpha").map_or(Ok(0.01), |v| parse_value("alpha", v))?;
            let conflict: ConflictRule = take(&mut kv, "conflict").map_or(Ok(ConflictRule::Priority), str::parse)?;
            let workers = take(&mut kv, "workers").map_or(Ok(1), |v| parse_value("workers", v))?;
            AlgorithmSpec::Pc(PcVariant::from_name(name, alpha)?.with_conflict(conflict).with_workers(workers))
        };
        if let Some(k) = kv.keys().next() {
            return Err(Error::InvalidArgument(format!("unknown parameter `{k}` for `{name}`")));
        }
        if let AlgorithmSpec::Pc(v) = &spec {
            if !(v.alpha > 0.0 && v.alpha < 1.0) {
                return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {}", v.alpha)));
            }
        }
        Ok(spec)
    }
}

impl fmt::Display for AlgorithmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Parses `spec;spec;...`.
pub fn parse_algorithms(s: &str) -> Result<Vec<AlgorithmSpec>> {
    s.split(';').map(str::trim).filter(|p| !p.is_empty()).map(str::parse).collect()
}

// ---------------------------------------------------------------------------
// Corpus

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusConfig {
    /// `(vars, avg_degree, n)` triples.
    pub cells: Vec<(usize, usize, usize)>,
    pub runs: usize,
    pub master_seed: u64,
    pub params: ParamRanges,
}

impl Default for CorpusConfig {
    /// The 27-cell grid, 10 runs each.
    fn default() -> Self {
        let mut cells = Vec::new();
        for vars in [50, 100, 500] {
            for deg in [2, 4, 6] {
                for n in [100, 500, 1000] {
                    cells.push((vars, deg, n));
                }
            }
        }
        CorpusConfig { cells, runs: 10, master_seed: 0, params: ParamRanges::default() }
    }
}

impl CorpusConfig {
    pub fn sim_cells(&self) -> Vec<SimCell> {
        let mut out = Vec::with_capacity(self.cells.len() * self.runs);
        for &(vars, avg_degree, n) in &self.cells {
            for run in 0..self.runs {
                out.push(SimCell { vars, avg_degree, n, run });
            }
        }
        out
    }
}

pub fn cell_dir(root: &Path, cell: &SimCell) -> PathBuf {
    root.join(format!("vars{}_deg{}_n{}", cell.vars, cell.avg_degree, cell.n)).join(format!("run{}", cell.run))
}

/// Draws the true DAG and the shuffled data set for one cell.
pub fn simulate_cell(master_seed: u64, params: &ParamRanges, cell: &SimCell) -> Result<(Dag, DataSet)> {
    let mut rng = cell_rng(master_seed, cell);
    let dag = random_dag(cell.vars, cell.avg_degree, &mut rng)?;
    let model = draw_params_with(&dag, params, &mut rng);
    let data = simulate_recursive(&model, cell.n, &mut rng)?;
    let (shuffled, _) = shuffle_columns(&data, &mut rng);
    Ok((dag, shuffled))
}

/// Writes `data.txt` and `graph.txt` for every cell and run. Cells are
/// independent and generated in parallel; the output does not depend on
/// scheduling.
pub fn generate_corpus(config: &CorpusConfig, root: &Path) -> Result<Vec<SimCell>> {
    let cells = config.sim_cells();
    cells.par_iter().try_for_each(|cell| -> Result<()> {
        let (dag, data) = simulate_cell(config.master_seed, &config.params, cell)?;
        let dir = cell_dir(root, cell);
        write_dataset(&data, &dir.join("data.txt"))?;
        write_graph(dag.graph(), &dir.join("graph.txt"))
    })?;
    Ok(cells)
}

fn parse_cell_name(name: &str) -> Option<(usize, usize, usize)> {
    let rest = name.strip_prefix("vars")?;
    let (v, rest) = rest.split_once("_deg")?;
    let (d, n) = rest.split_once("_n")?;
    Some((v.parse().ok()?, d.parse().ok()?, n.parse().ok()?))
}

/// Every `(cell, run)` present in a corpus directory, sorted.
pub fn scan_corpus(root: &Path) -> Result<Vec<SimCell>> {
    let mut out = Vec::new();
    let entries = fs::read_dir(root).map_err(|e| Error::io(root, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(root, e))?;
        let Some((vars, avg_degree, n)) = entry.file_name().to_str().and_then(parse_cell_name) else { continue };
        let runs = fs::read_dir(entry.path()).map_err(|e| Error::io(entry.path(), e))?;
        for r in runs {
            let r = r.map_err(|e| Error::io(entry.path(), e))?;
            let run = r.file_name().to_str().and_then(|s| s.strip_prefix("run")).and_then(|s| s.parse().ok());
            if let Some(run) = run {
                if r.path().join("data.txt").is_file() {
                    out.push(SimCell { vars, avg_degree, n, run });
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

// ---------------------------------------------------------------------------
// Run matrix

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RunStatus {
    Ok,
    Timeout,
    Error,
}

impl RunStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RunStatus::Ok => "OK",
            RunStatus::Timeout => "TIMEOUT",
            RunStatus::Error => "ERROR",
        }
    }
}

impl FromStr for RunStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "OK" => Ok(RunStatus::Ok),
            "TIMEOUT" => Ok(RunStatus::Timeout),
            "ERROR" => Ok(RunStatus::Error),
            _ => Err(Error::InvalidArgument(format!("unknown status `{s}`"))),
        }
    }
}

/// Outcome of one algorithm on one data set.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    /// 1-based position of the algorithm in the run's list.
    pub alg_id: usize,
    pub label: String,
    pub cell: SimCell,
    pub status: RunStatus,
    pub elapsed_s: f64,
}

impl RunRecord {
    pub fn graph_path(&self, records_dir: &Path) -> PathBuf {
        cell_dir(&records_dir.join(format!("alg{}", self.alg_id)), &self.cell).join("graph.txt")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunMatrixConfig {
    pub algorithms: Vec<AlgorithmSpec>,
    pub timeout: Duration,
    /// Concurrent runs.
    pub workers: usize,
}

impl RunMatrixConfig {
    pub fn new(algorithms: Vec<AlgorithmSpec>) -> Self {
        RunMatrixConfig { algorithms, timeout: Duration::from_secs(600), workers: 1 }
    }
}

/// Runs every algorithm on every data set of the corpus and writes the
/// estimated graphs plus `records.txt` under `out`. Failures and timeouts
/// are recorded, never propagated; a run that panics is an `ERROR`.
pub fn run_matrix(config: &RunMatrixConfig, corpus: &Path, out: &Path) -> Result<Vec<RunRecord>> {
    let cells = scan_corpus(corpus)?;
    let jobs: Vec<(usize, SimCell)> =
        (0..config.algorithms.len()).flat_map(|a| cells.iter().map(move |c| (a, *c))).collect();
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<(usize, RunRecord)>> = Mutex::new(Vec::with_capacity(jobs.len()));
    let first_io_error: Mutex<Option<Error>> = Mutex::new(None);

    std::thread::scope(|scope| {
        for _ in 0..config.workers.max(1) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(&(a, cell)) = jobs.get(i) else { break };
                match run_one(&config.algorithms[a], a + 1, cell, config.timeout, corpus, out) {
                    Ok(rec) => results.lock().unwrap().push((i, rec)),
                    Err(e) => {
                        first_io_error.lock().unwrap().get_or_insert(e);
                    }
                }
            });
        }
    });
    if let Some(e) = first_io_error.into_inner().unwrap() {
        return Err(e);
    }
    let mut results = results.into_inner().unwrap();
    results.sort_by_key(|(i, _)| *i);
    let records: Vec<RunRecord> = results.into_iter().map(|(_, r)| r).collect();
    write_records(&records, &out.join("records.txt"))?;
    let corpus_abs = fs::canonicalize(corpus).unwrap_or_else(|_| corpus.to_path_buf());
    fs::write(out.join("corpus.txt"), format!("{}\n", corpus_abs.display())).map_err(|e| Error::io(out, e))?;
    Ok(records)
}

/// One run. Only I/O errors escape; search errors become `ERROR` records.
fn run_one(
    alg: &AlgorithmSpec,
    alg_id: usize,
    cell: SimCell,
    timeout: Duration,
    corpus: &Path,
    out: &Path,
) -> Result<RunRecord> {
    let data = read_dataset(&cell_dir(corpus, &cell).join("data.txt"))?;
    let start = Instant::now();
    let deadline = Deadline::after(timeout);
    let result = catch_unwind(AssertUnwindSafe(|| alg.run(&data, &deadline)));
    let elapsed = start.elapsed();
    let mut record = RunRecord { alg_id, label: alg.label(), cell, status: RunStatus::Ok, elapsed_s: elapsed.as_secs_f64() };
    match result {
        Ok(Ok(g)) if elapsed <= timeout => write_graph(&g, &record.graph_path(out))?,
        Ok(Ok(_)) | Ok(Err(Error::Timeout)) => record.status = RunStatus::Timeout,
        Ok(Err(_)) | Err(_) => record.status = RunStatus::Error,
    }
    Ok(record)
}

// ---------------------------------------------------------------------------
// Aggregation

/// A run record with its confusion counts, `None` unless the run finished.
#[derive(Debug, Clone, PartialEq)]
pub struct PerRunRow {
    pub record: RunRecord,
    pub counts: Option<ConfusionCounts>,
}

/// Scores every finished run against the true graph.
pub fn aggregate(records: &[RunRecord], records_dir: &Path, corpus: &Path) -> Result<Vec<PerRunRow>> {
    records
        .par_iter()
        .map(|r| {
            if r.status != RunStatus::Ok {
                return Ok(PerRunRow { record: r.clone(), counts: None });
            }
            let truth = Dag::new(read_graph(&cell_dir(corpus, &r.cell).join("graph.txt"))?)?;
            let est = read_graph(&r.graph_path(records_dir))?;
            Ok(PerRunRow { record: r.clone(), counts: Some(confusion(&truth, &est)?) })
        })
        .collect()
}

/// Reads `records.txt` and the corpus path recorded next to it.
pub fn load_records(records_dir: &Path) -> Result<(Vec<RunRecord>, Option<PathBuf>)> {
    let records = read_records(&records_dir.join("records.txt"))?;
    let corpus = fs::read_to_string(records_dir.join("corpus.txt")).ok().map(|s| PathBuf::from(s.trim()));
    Ok((records, corpus))
}

/// Means, standard deviations and the manifest for the viewer.
///
/// Rows are keyed by algorithm and cell. Statistics average over finished
/// runs; runs where a ratio is undefined are skipped for that column.
pub fn report(rows: &[PerRunRow]) -> Result<(StatsTable, StatsTable, ConfigManifest)> {
    let mut groups: BTreeMap<(usize, usize, usize, usize), (usize, Vec<Stats>)> = BTreeMap::new();
    let mut labels: BTreeMap<usize, String> = BTreeMap::new();
    let (mut vars, mut deg, mut ns) = (BTreeSet::new(), BTreeSet::new(), BTreeSet::new());
    for row in rows {
        let r = &row.record;
        if let Some(prev) = labels.insert(r.alg_id, r.label.clone()) {
            if prev != r.label {
                return Err(Error::InvalidArgument(format!("algorithm {} has two labels", r.alg_id)));
            }
        }
        vars.insert(r.cell.vars);
        deg.insert(r.cell.avg_degree);
        ns.insert(r.cell.n);
        let g = groups.entry((r.alg_id, r.cell.vars, r.cell.avg_degree, r.cell.n)).or_default();
        g.0 += 1;
        if let Some(c) = &row.counts {
            g.1.push(Stats::from_counts(c, r.elapsed_s));
        }
    }
    let mut means = StatsTable::default();
    let mut stds = StatsTable::default();
    let mut runs = 0;
    for ((alg_id, v, d, n), (count, stats)) in groups {
        runs = runs.max(count);
        let (m, s) = summarize(&stats);
        means.rows.push(StatRow { alg_id, vars: v, deg: d, n, cells: m });
        stds.rows.push(StatRow { alg_id, vars: v, deg: d, n, cells: s });
    }
    let algorithms = labels
        .into_iter()
        .map(|(id, label)| {
            let (name, params) = split_label(&label);
            AlgEntry { id, name, params }
        })
        .collect();
    let manifest = ConfigManifest {
        runs,
        vars: vars.into_iter().collect(),
        deg: deg.into_iter().collect(),
        n: ns.into_iter().collect(),
        algorithms,
    };
    Ok((means, stds, manifest))
}

fn split_label(label: &str) -> (String, Vec<(String, String)>) {
    let (name, rest) = label.split_once(':').unwrap_or((label, ""));
    let params = rest
        .split(',')
        .filter_map(|p| p.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())))
        .collect();
    (name.to_string(), params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::{read_per_run, write_per_run, write_tables};
    use crate::metrics::Cell;

    #[test]
    fn spec_parsing() {
        let algs = parse_algorithms("pc:alpha=0.01; cpc-stable:alpha=0.001,conflict=overwrite ;fges:score=fisher-z,alpha=1e-8,faithfulness=true").unwrap();
        assert_eq!(algs.len(), 3);
        assert_eq!(algs[1].label(), "cpc-stable:alpha=0.001,conflict=overwrite");
        assert_eq!(algs[2].label(), "fges:score=fisher-z,alpha=1e-8,faithfulness=true");
        assert!("pc:beta=1".parse::<AlgorithmSpec>().is_err());
        assert!("pc:alpha=2".parse::<AlgorithmSpec>().is_err());
        assert!("mmhc".parse::<AlgorithmSpec>().is_err());
        assert!("fges:score=bdeu".parse::<AlgorithmSpec>().is_err());
        let again: AlgorithmSpec = algs[2].label().parse().unwrap();
        assert_eq!(again, algs[2]);
    }

    #[test]
    fn default_grid_has_270_datasets() {
        assert_eq!(CorpusConfig::default().sim_cells().len(), 270);
    }

    #[test]
    fn cell_names_parse() {
        assert_eq!(parse_cell_name("vars50_deg2_n1000"), Some((50, 2, 1000)));
        assert_eq!(parse_cell_name("alg1"), None);
    }

    fn tiny_corpus(dir: &Path, runs: usize) -> CorpusConfig {
        let cfg = CorpusConfig { cells: vec![(8, 2, 200)], runs, master_seed: 7, params: ParamRanges::default() };
        generate_corpus(&cfg, dir).unwrap();
        cfg
    }

    #[test]
    fn corpus_is_reproducible() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        tiny_corpus(a.path(), 2);
        tiny_corpus(b.path(), 2);
        for cell in scan_corpus(a.path()).unwrap() {
            for f in ["data.txt", "graph.txt"] {
                let x = fs::read(cell_dir(a.path(), &cell).join(f)).unwrap();
                let y = fs::read(cell_dir(b.path(), &cell).join(f)).unwrap();
                assert_eq!(x, y);
            }
        }
        assert_eq!(scan_corpus(a.path()).unwrap().len(), 2);
    }

    #[test]
    fn tiny_matrix_end_to_end() {
        let corpus = tempfile::tempdir().unwrap();
        let out = tempfile::tempdir().unwrap();
        tiny_corpus(corpus.path(), 2);
        let cfg = RunMatrixConfig::new(parse_algorithms("pc;fges:penalty=2").unwrap());
        let records = run_matrix(&cfg, corpus.path(), out.path()).unwrap();
        assert_eq!(records.len(), 4);
        assert!(records.iter().all(|r| r.status == RunStatus::Ok));

        let (loaded, corpus_path) = load_records(out.path()).unwrap();
        assert_eq!(loaded.len(), 4);
        let rows = aggregate(&loaded, out.path(), &corpus_path.unwrap()).unwrap();
        write_per_run(&rows, &out.path().join("per_run.txt")).unwrap();
        let rows = read_per_run(&out.path().join("per_run.txt")).unwrap();
        let (m, s, c) = report(&rows).unwrap();
        assert_eq!(m.rows.len(), 2);
        assert_eq!(c.runs, 2);
        write_tables(&m, &s, &c, out.path()).unwrap();
    }

    #[test]
    fn forced_timeout_is_recorded() {
        let corpus = tempfile::tempdir().unwrap();
        let out = tempfile::tempdir().unwrap();
        let cfg = CorpusConfig { cells: vec![(40, 4, 500)], runs: 1, master_seed: 3, params: ParamRanges::default() };
        generate_corpus(&cfg, corpus.path()).unwrap();
        let mut run = RunMatrixConfig::new(parse_algorithms("pc").unwrap());
        run.timeout = Duration::from_micros(1);
        let records = run_matrix(&run, corpus.path(), out.path()).unwrap();
        assert_eq!(records[0].status, RunStatus::Timeout);
        let rows = aggregate(&records, out.path(), corpus.path()).unwrap();
        let (m, _, _) = report(&rows).unwrap();
        assert_eq!(m.rows[0].cells, [Cell::Missing; 7]);
    }

    #[test]
    fn report_averages_by_hand() {
        let cell = |run| SimCell { vars: 4, avg_degree: 2, n: 100, run };
        let rec = |run, status| RunRecord { alg_id: 1, label: "pc:alpha=0.01,conflict=priority".into(), cell: cell(run), status, elapsed_s: 1.0 + run as f64 };
        let rows = vec![
            // AP = 1, AR = 1
            PerRunRow { record: rec(0, RunStatus::Ok), counts: Some(ConfusionCounts { atp: 4, afp: 0, afn: 0, atn: 2, ahtp: 2, ahfp: 0, ahfn: 2, ahtn: 8 }) },
            // AP = 0.5, AR = 0.25
            PerRunRow { record: rec(1, RunStatus::Ok), counts: Some(ConfusionCounts { atp: 1, afp: 1, afn: 3, atn: 1, ahtp: 0, ahfp: 0, ahfn: 4, ahtn: 8 }) },
            PerRunRow { record: rec(2, RunStatus::Timeout), counts: None },
        ];
        let (m, s, c) = report(&rows).unwrap();
        assert_eq!(c.runs, 3);
        assert_eq!(c.algorithms[0].name, "pc");
        let cells = m.rows[0].cells;
        assert_eq!(cells[0], Cell::Value(0.75));
        assert_eq!(cells[1], Cell::Value(0.625));
        assert_eq!(cells[2], Cell::Value(1.0), "AHP undefined in run 1 is skipped");
        assert_eq!(cells[6], Cell::Value(1.5));
        assert_eq!(s.rows[0].cells[2], Cell::Value(0.0));
    }
}
