//! Text formats: datasets, graphs, run records and the three result tables
//! (`stats.txt`, `std.txt`, `config.txt`).
//!
//! All writers are deterministic. Numbers are rounded to 10 significant
//! digits and printed in the shortest form that reads back to the rounded
//! value (see [`format_number`]).

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Endpoint, MixedGraph};
use crate::harness::{PerRunRow, RunRecord};
use crate::metrics::{Cell, ConfusionCounts, StatRow, COLUMNS};
use crate::simulate::{DataSet, SimCell};

/// Rounds to 10 significant digits and prints the shortest decimal that
/// parses back to the rounded value. Very large or small magnitudes use
/// exponent notation.
///
/// ```
/// use causal_bench::dataio::format_number;
/// assert_eq!(format_number(0.1 + 0.2), "0.3");
/// assert_eq!(format_number(2.0), "2");
/// assert_eq!(format_number(1.23456789012345e-9), "1.23456789e-9");
/// ```
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.9e}").parse().expect("formatted float parses");
    let a = rounded.abs();
    if a != 0.0 && !(1e-5..1e16).contains(&a) {
        format!("{rounded:e}")
    } else {
        format!("{}", rounded + 0.0)
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn parse_f64(path: &str, line: usize, tok: &str) -> Result<f64> {
    tok.parse::<f64>().map_err(|_| Error::parse(path, line, format!("bad number `{tok}`")))
}

fn parse_usize(path: &str, line: usize, tok: &str) -> Result<usize> {
    tok.parse::<usize>().map_err(|_| Error::parse(path, line, format!("bad integer `{tok}`")))
}

// ---------------------------------------------------------------------------
// Datasets

/// Tab-separated header of names, then one row per sample.
pub fn dataset_to_string(data: &DataSet) -> String {
    let mut out = data.names().join("\t");
    out.push('\n');
    for r in 0..data.num_rows() {
        let row: Vec<String> = data.row(r).iter().map(|&x| format_number(x)).collect();
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
    out
}

pub fn parse_dataset(text: &str, origin: &str) -> Result<DataSet> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| Error::parse(origin, 1, "missing header"))?;
    let names: Vec<String> = header.split('\t').map(|s| s.trim().to_string()).collect();
    let mut values = Vec::new();
    let mut rows = 0;
    for (i, line) in lines {
        let toks: Vec<&str> = line.split('\t').collect();
        if toks.len() != names.len() {
            return Err(Error::parse(origin, i + 1, format!("expected {} values, found {}", names.len(), toks.len())));
        }
        for t in toks {
            values.push(parse_f64(origin, i + 1, t.trim())?);
        }
        rows += 1;
    }
    DataSet::new(names, rows, values)
}

pub fn write_dataset(data: &DataSet, path: &Path) -> Result<()> {
    write_text(path, &dataset_to_string(data))
}

pub fn read_dataset(path: &Path) -> Result<DataSet> {
    parse_dataset(&read_text(path)?, &path.display().to_string())
}

// ---------------------------------------------------------------------------
// Graphs

fn edge_token(mark_a: Endpoint, mark_b: Endpoint) -> &'static str {
    match (mark_a, mark_b) {
        (Endpoint::Tail, Endpoint::Tail) => "---",
        (Endpoint::Tail, Endpoint::Arrow) => "-->",
        (Endpoint::Arrow, Endpoint::Tail) => "<--",
        (Endpoint::Arrow, Endpoint::Arrow) => "<->",
    }
}

/// ```text
/// Graph Nodes:
/// X1;X2;X3
/// Graph Edges:
/// 1. X1 --> X2
/// ```
///
/// Directed edges are written tail first; edges are numbered from 1 in
/// ascending node-index order.
pub fn graph_to_string(g: &MixedGraph) -> String {
    let mut out = String::from("Graph Nodes:\n");
    out.push_str(&g.names().join(";"));
    out.push_str("\nGraph Edges:\n");
    for (i, e) in g.edges().iter().enumerate() {
        let (a, b, ma, mb) = if e.mark_a == Endpoint::Arrow && e.mark_b == Endpoint::Tail {
            (e.b, e.a, e.mark_b, e.mark_a)
        } else {
            (e.a, e.b, e.mark_a, e.mark_b)
        };
        out.push_str(&format!("{}. {} {} {}\n", i + 1, g.name(a), edge_token(ma, mb), g.name(b)));
    }
    out
}

fn marks_of(token: &str) -> Option<(Endpoint, Endpoint)> {
    Some(match token {
        "-->" | "->" => (Endpoint::Tail, Endpoint::Arrow),
        "<--" | "<-" => (Endpoint::Arrow, Endpoint::Tail),
        "---" | "--" => (Endpoint::Tail, Endpoint::Tail),
        "<->" => (Endpoint::Arrow, Endpoint::Arrow),
        _ => return None,
    })
}

/// Parses the native format, or failing a `Graph Nodes:` header, a plain
/// edge list with one `A -> B` (or `A --> B`, `A --- B`, `A <-> B`) per line.
/// Edge-list nodes are declared in order of first appearance; `#` starts a
/// comment line.
pub fn parse_graph(text: &str, origin: &str) -> Result<MixedGraph> {
    let first = text.lines().map(str::trim).find(|l| !l.is_empty());
    if first == Some("Graph Nodes:") {
        parse_native_graph(text, origin)
    } else {
        parse_edge_list(text, origin)
    }
}

fn parse_native_graph(text: &str, origin: &str) -> Result<MixedGraph> {
    let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).collect();
    let mut it = lines.iter().filter(|(_, l)| !l.is_empty()).peekable();
    it.next();
    let names: Vec<String> = match it.peek() {
        Some((_, "Graph Edges:")) | None => Vec::new(),
        Some((_, l)) => {
            let names = l.split(';').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
            it.next();
            names
        }
    };
    let mut g = MixedGraph::new(names).map_err(|e| Error::parse(origin, 2, e.to_string()))?;
    match it.next() {
        Some((_, "Graph Edges:")) => {}
        Some((n, _)) => return Err(Error::parse(origin, *n, "expected `Graph Edges:`")),
        None => return Err(Error::parse(origin, lines.len(), "missing `Graph Edges:`")),
    }
    for &(n, line) in it {
        let body = match line.split_once(". ") {
            Some((idx, rest)) if idx.chars().all(|c| c.is_ascii_digit()) => rest,
            _ => line,
        };
        add_edge_line(&mut g, body, origin, n, false)?;
    }
    Ok(g)
}

fn parse_edge_list(text: &str, origin: &str) -> Result<MixedGraph> {
    let mut names: Vec<String> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut edges = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(Error::parse(origin, i + 1, format!("expected `A -> B`, found `{line}`")));
        }
        for name in [toks[0], toks[2]] {
            if seen.insert(name.to_string()) {
                names.push(name.to_string());
            }
        }
        edges.push((i + 1, line));
    }
    let mut g = MixedGraph::new(names).map_err(|e| Error::parse(origin, 1, e.to_string()))?;
    for (n, line) in edges {
        add_edge_line(&mut g, line, origin, n, true)?;
    }
    Ok(g)
}

fn add_edge_line(g: &mut MixedGraph, line: &str, origin: &str, n: usize, loose: bool) -> Result<()> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() != 3 {
        return Err(Error::parse(origin, n, format!("malformed edge `{line}`")));
    }
    let (ma, mb) = match marks_of(toks[1]) {
        Some(m) if loose || toks[1].len() == 3 => m,
        _ => return Err(Error::parse(origin, n, format!("unknown edge token `{}`", toks[1]))),
    };
    let node = |name: &str| g.node_index(name).ok_or_else(|| Error::parse(origin, n, format!("undeclared node `{name}`")));
    let (a, b) = (node(toks[0])?, node(toks[2])?);
    if g.is_adjacent(a, b) {
        return Err(Error::parse(origin, n, format!("duplicate edge {} {}", toks[0], toks[2])));
    }
    g.set_edge(a, b, ma, mb).map_err(|e| Error::parse(origin, n, e.to_string()))
}

pub fn write_graph(g: &MixedGraph, path: &Path) -> Result<()> {
    write_text(path, &graph_to_string(g))
}

pub fn read_graph(path: &Path) -> Result<MixedGraph> {
    parse_graph(&read_text(path)?, &path.display().to_string())
}

// ---------------------------------------------------------------------------
// Result tables

fn format_cell(c: &Cell) -> String {
    match c {
        Cell::Value(x) => format_number(*x),
        Cell::Undefined => "*".into(),
        Cell::Missing => "-".into(),
    }
}

fn parse_cell(origin: &str, line: usize, tok: &str) -> Result<Cell> {
    Ok(match tok {
        "*" => Cell::Undefined,
        "-" => Cell::Missing,
        _ => Cell::Value(parse_f64(origin, line, tok)?),
    })
}

/// Rows of `stats.txt` (means) or `std.txt` (standard deviations).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StatsTable {
    pub rows: Vec<StatRow>,
}

impl StatsTable {
    pub fn to_text(&self) -> String {
        let mut out = COLUMNS.join("\t");
        out.push('\n');
        for r in &self.rows {
            let mut toks = vec![r.alg_id.to_string(), r.vars.to_string(), r.deg.to_string(), r.n.to_string()];
            toks.extend(r.cells.iter().map(format_cell));
            out.push_str(&toks.join("\t"));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.split('\t').eq(COLUMNS.iter().copied()) => {}
            Some((i, _)) => return Err(Error::parse(origin, i + 1, format!("header must be `{}`", COLUMNS.join(" ")))),
            None => return Err(Error::parse(origin, 1, "missing header")),
        }
        let mut rows = Vec::new();
        let mut keys = BTreeSet::new();
        for (i, line) in lines {
            let n = i + 1;
            let toks: Vec<&str> = line.split('\t').collect();
            if toks.len() != COLUMNS.len() {
                return Err(Error::parse(origin, n, format!("expected {} columns, found {}", COLUMNS.len(), toks.len())));
            }
            let mut cells = [Cell::Missing; 7];
            for (c, t) in cells.iter_mut().zip(&toks[4..]) {
                *c = parse_cell(origin, n, t)?;
            }
            let row = StatRow {
                alg_id: parse_usize(origin, n, toks[0])?,
                vars: parse_usize(origin, n, toks[1])?,
                deg: parse_usize(origin, n, toks[2])?,
                n: parse_usize(origin, n, toks[3])?,
                cells,
            };
            if !keys.insert(row.key()) {
                return Err(Error::parse(origin, n, "duplicate row key"));
            }
            rows.push(row);
        }
        Ok(StatsTable { rows })
    }
}

/// One algorithm entry of `config.txt`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgEntry {
    pub id: usize,
    pub name: String,
    /// `(key, value)` pairs in declaration order.
    pub params: Vec<(String, String)>,
}

/// The manifest the viewer needs to interpret the stats tables.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConfigManifest {
    pub runs: usize,
    pub vars: Vec<usize>,
    pub deg: Vec<usize>,
    pub n: Vec<usize>,
    pub algorithms: Vec<AlgEntry>,
}

impl ConfigManifest {
    /// Every parameter name with the set of values it takes across
    /// algorithms.
    pub fn parameters(&self) -> BTreeMap<String, BTreeSet<String>> {
        let mut out: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for a in &self.algorithms {
            for (k, v) in &a.params {
                out.entry(k.clone()).or_default().insert(v.clone());
            }
        }
        out
    }

    /// ```text
    /// runs	10
    /// vars	50	100
    /// deg	2
    /// n	1000
    /// alg	1	pc	alpha=0.01	conflict=priority
    /// param	alpha	0.01
    /// param	conflict	priority
    /// ```
    pub fn to_text(&self) -> String {
        let join = |xs: &[usize]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("\t");
        let mut out = format!("runs\t{}\nvars\t{}\ndeg\t{}\nn\t{}\n", self.runs, join(&self.vars), join(&self.deg), join(&self.n));
        for a in &self.algorithms {
            out.push_str(&format!("alg\t{}\t{}", a.id, a.name));
            for (k, v) in &a.params {
                out.push_str(&format!("\t{k}={v}"));
            }
            out.push('\n');
        }
        for (k, vs) in self.parameters() {
            out.push_str(&format!("param\t{k}"));
            for v in vs {
                out.push_str(&format!("\t{v}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut m = ConfigManifest::default();
        let mut params_seen = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let n = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split('\t').collect();
            let levels = |toks: &[&str]| toks.iter().map(|t| parse_usize(origin, n, t)).collect::<Result<Vec<_>>>();
            match toks[0] {
                "runs" if toks.len() == 2 => m.runs = parse_usize(origin, n, toks[1])?,
                "vars" => m.vars = levels(&toks[1..])?,
                "deg" => m.deg = levels(&toks[1..])?,
                "n" => m.n = levels(&toks[1..])?,
                "alg" if toks.len() >= 3 => {
                    let params = toks[3..]
                        .iter()
                        .map(|t| {
                            t.split_once('=')
                                .map(|(k, v)| (k.to_string(), v.to_string()))
                                .ok_or_else(|| Error::parse(origin, n, format!("expected key=value, found `{t}`")))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    m.algorithms.push(AlgEntry { id: parse_usize(origin, n, toks[1])?, name: toks[2].to_string(), params });
                }
                "param" if toks.len() >= 2 => {
                    params_seen.insert(toks[1].to_string(), toks[2..].iter().map(|s| s.to_string()).collect::<BTreeSet<_>>());
                }
                other => return Err(Error::parse(origin, n, format!("unexpected line `{other}`"))),
            }
        }
        let derived = m.parameters();
        if params_seen != derived {
            return Err(Error::parse(origin, 0, "param lines disagree with the algorithm entries"));
        }
        Ok(m)
    }

    /// Checks that every row of `table` names a known algorithm and factor
    /// levels.
    pub fn check(&self, table: &StatsTable) -> Result<()> {
        for r in &table.rows {
            let known = self.algorithms.iter().any(|a| a.id == r.alg_id)
                && self.vars.contains(&r.vars)
                && self.deg.contains(&r.deg)
                && self.n.contains(&r.n);
            if !known {
                return Err(Error::InvalidArgument(format!("row {:?} does not resolve against the manifest", r.key())));
            }
        }
        Ok(())
    }
}

/// Writes `stats.txt`, `std.txt` and `config.txt` into `dir`.
pub fn write_tables(means: &StatsTable, stds: &StatsTable, config: &ConfigManifest, dir: &Path) -> Result<()> {
    let mean_keys: Vec<_> = means.rows.iter().map(StatRow::key).collect();
    let std_keys: Vec<_> = stds.rows.iter().map(StatRow::key).collect();
    if mean_keys != std_keys {
        return Err(Error::InvalidArgument("mean and std tables have different rows".into()));
    }
    config.check(means)?;
    write_text(&dir.join("stats.txt"), &means.to_text())?;
    write_text(&dir.join("std.txt"), &stds.to_text())?;
    write_text(&dir.join("config.txt"), &config.to_text())
}

pub fn read_tables(dir: &Path) -> Result<(StatsTable, StatsTable, ConfigManifest)> {
    let read = |name: &str| -> Result<(String, String)> {
        let p = dir.join(name);
        Ok((read_text(&p)?, p.display().to_string()))
    };
    let (s, sp) = read("stats.txt")?;
    let (d, dp) = read("std.txt")?;
    let (c, cp) = read("config.txt")?;
    let means = StatsTable::parse(&s, &sp)?;
    let stds = StatsTable::parse(&d, &dp)?;
    let config = ConfigManifest::parse(&c, &cp)?;
    config.check(&means)?;
    config.check(&stds)?;
    Ok((means, stds, config))
}

// ---------------------------------------------------------------------------
// Run records

const RECORD_COLUMNS: [&str; 8] = ["Alg", "Label", "Vars", "Deg", "N", "Run", "Status", "E"];
const COUNT_COLUMNS: [&str; 8] = ["ATP", "AFP", "AFN", "ATN", "AHTP", "AHFP", "AHFN", "AHTN"];

fn record_fields(r: &RunRecord) -> Vec<String> {
    vec![
        r.alg_id.to_string(),
        r.label.clone(),
        r.cell.vars.to_string(),
        r.cell.avg_degree.to_string(),
        r.cell.n.to_string(),
        r.cell.run.to_string(),
        r.status.as_str().to_string(),
    ]
}

fn parse_record_fields(toks: &[&str], origin: &str, n: usize) -> Result<RunRecord> {
    Ok(RunRecord {
        alg_id: parse_usize(origin, n, toks[0])?,
        label: toks[1].to_string(),
        cell: SimCell {
            vars: parse_usize(origin, n, toks[2])?,
            avg_degree: parse_usize(origin, n, toks[3])?,
            n: parse_usize(origin, n, toks[4])?,
            run: parse_usize(origin, n, toks[5])?,
        },
        status: toks[6].parse().map_err(|_| Error::parse(origin, n, format!("bad status `{}`", toks[6])))?,
        elapsed_s: 0.0,
    })
}

fn check_header(origin: &str, first: Option<(usize, &str)>, cols: &[&str]) -> Result<()> {
    match first {
        Some((_, h)) if h.split('\t').eq(cols.iter().copied()) => Ok(()),
        Some((i, _)) => Err(Error::parse(origin, i + 1, format!("header must be `{}`", cols.join(" ")))),
        None => Err(Error::parse(origin, 1, "missing header")),
    }
}

/// `records.txt`: one line per (algorithm, dataset) run.
pub fn records_to_string(records: &[RunRecord]) -> String {
    let mut out = RECORD_COLUMNS.join("\t");
    out.push('\n');
    for r in records {
        let mut f = record_fields(r);
        f.push(format_number(r.elapsed_s));
        out.push_str(&f.join("\t"));
        out.push('\n');
    }
    out
}

pub fn parse_records(text: &str, origin: &str) -> Result<Vec<RunRecord>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    check_header(origin, lines.next(), &RECORD_COLUMNS)?;
    let mut out = Vec::new();
    for (i, line) in lines {
        let toks: Vec<&str> = line.split('\t').collect();
        if toks.len() != RECORD_COLUMNS.len() {
            return Err(Error::parse(origin, i + 1, "wrong number of columns"));
        }
        let mut r = parse_record_fields(&toks, origin, i + 1)?;
        r.elapsed_s = parse_f64(origin, i + 1, toks[7])?;
        out.push(r);
    }
    Ok(out)
}

pub fn write_records(records: &[RunRecord], path: &Path) -> Result<()> {
    write_text(path, &records_to_string(records))
}

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>> {
    parse_records(&read_text(path)?, &path.display().to_string())
}

/// `per_run.txt`: run records with their confusion counts; `-` for runs
/// that did not finish.
pub fn per_run_to_string(rows: &[PerRunRow]) -> String {
    let mut out = RECORD_COLUMNS[..7].join("\t");
    for c in COUNT_COLUMNS {
        out.push('\t');
        out.push_str(c);
    }
    out.push_str("\tE\n");
    for row in rows {
        let mut f = record_fields(&row.record);
        match &row.counts {
            Some(c) => {
                f.extend([c.atp, c.afp, c.afn, c.atn, c.ahtp, c.ahfp, c.ahfn, c.ahtn].iter().map(u64::to_string));
                f.push(format_number(row.record.elapsed_s));
            }
            None => f.extend(std::iter::repeat("-".to_string()).take(9)),
        }
        out.push_str(&f.join("\t"));
        out.push('\n');
    }
    out
}

pub fn parse_per_run(text: &str, origin: &str) -> Result<Vec<PerRunRow>> {
    let mut header: Vec<&str> = RECORD_COLUMNS[..7].to_vec();
    header.extend(COUNT_COLUMNS);
    header.push("E");
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    check_header(origin, lines.next(), &header)?;
    let mut out = Vec::new();
    for (i, line) in lines {
        let n = i + 1;
        let toks: Vec<&str> = line.split('\t').collect();
        if toks.len() != header.len() {
            return Err(Error::parse(origin, n, "wrong number of columns"));
        }
        let mut record = parse_record_fields(&toks, origin, n)?;
        let counts = if toks[7] == "-" {
            None
        } else {
            let v = toks[7..15]
                .iter()
                .map(|t| t.parse::<u64>().map_err(|_| Error::parse(origin, n, format!("bad count `{t}`"))))
                .collect::<Result<Vec<_>>>()?;
            record.elapsed_s = parse_f64(origin, n, toks[15])?;
            Some(ConfusionCounts { atp: v[0], afp: v[1], afn: v[2], atn: v[3], ahtp: v[4], ahfp: v[5], ahfn: v[6], ahtn: v[7] })
        };
        out.push(PerRunRow { record, counts });
    }
    Ok(out)
}

pub fn write_per_run(rows: &[PerRunRow], path: &Path) -> Result<()> {
    write_text(path, &per_run_to_string(rows))
}

pub fn read_per_run(path: &Path) -> Result<Vec<PerRunRow>> {
    parse_per_run(&read_text(path)?, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::RunStatus;

    fn names(v: usize) -> Vec<String> {
        (1..=v).map(|i| format!("X{i}")).collect()
    }

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(1.0 / 3.0), "0.3333333333");
        assert_eq!(format_number(-2.5), "-2.5");
        assert_eq!(format_number(123456789012.0), "123456789000");
        assert_eq!(format_number(1e20), "1e20");
        assert_eq!(format_number(0.000012345678901), "0.0000123456789");
        assert_eq!(format_number(1.5e-6), "1.5e-6");
    }

    #[test]
    fn dataset_round_trip() {
        let d = DataSet::new(names(2), 3, vec![1.5, -2.0, 0.1, 3.25, 1e-7, 42.0]).unwrap();
        let back = parse_dataset(&dataset_to_string(&d), "mem").unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn dataset_arity_error_names_line() {
        let err = parse_dataset("X1\tX2\n1\t2\n3\n", "mem").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn graph_round_trip_all_tokens() {
        let mut g = MixedGraph::with_nodes(4);
        g.add_directed(1, 0).unwrap();
        g.add_undirected(1, 2).unwrap();
        g.add_bidirected(0, 3).unwrap();
        let text = graph_to_string(&g);
        assert_eq!(text, "Graph Nodes:\nX1;X2;X3;X4\nGraph Edges:\n1. X2 --> X1\n2. X1 <-> X4\n3. X2 --- X3\n");
        assert_eq!(parse_graph(&text, "mem").unwrap(), g);
    }

    #[test]
    fn empty_graph_round_trip() {
        let g = MixedGraph::with_nodes(3);
        assert_eq!(parse_graph(&graph_to_string(&g), "mem").unwrap(), g);
        let none = MixedGraph::with_nodes(0);
        assert_eq!(parse_graph(&graph_to_string(&none), "mem").unwrap(), none);
    }

    #[test]
    fn graph_errors() {
        let bad_token = "Graph Nodes:\nA;B\nGraph Edges:\n1. A ~~> B\n";
        assert!(matches!(parse_graph(bad_token, "mem"), Err(Error::Parse { line: 4, .. })));
        let undeclared = "Graph Nodes:\nA;B\nGraph Edges:\n1. A --> C\n";
        assert!(matches!(parse_graph(undeclared, "mem"), Err(Error::Parse { line: 4, .. })));
    }

    #[test]
    fn edge_list_fallback() {
        let g = parse_graph("# comment\nB -> A\nA -> C\n", "mem").unwrap();
        assert_eq!(g.names(), ["B", "A", "C"]);
        assert!(g.is_directed(0, 1) && g.is_directed(1, 2));
    }

    fn sample_tables() -> (StatsTable, StatsTable, ConfigManifest) {
        let row = |alg_id, cells| StatRow { alg_id, vars: 50, deg: 2, n: 1000, cells };
        let means = StatsTable {
            rows: vec![
                row(1, [Cell::Value(0.96), Cell::Value(0.97), Cell::Value(0.8), Cell::Value(0.75), Cell::Value(0.9), Cell::Value(0.7), Cell::Value(0.12)]),
                row(2, [Cell::Missing; 7]),
            ],
        };
        let stds = StatsTable {
            rows: vec![row(1, [Cell::Value(0.01), Cell::Value(0.0), Cell::Undefined, Cell::Value(0.1), Cell::Value(0.0), Cell::Value(0.0), Cell::Value(0.01)]), row(2, [Cell::Missing; 7])],
        };
        let config = ConfigManifest {
            runs: 10,
            vars: vec![50],
            deg: vec![2],
            n: vec![1000],
            algorithms: vec![
                AlgEntry { id: 1, name: "pc".into(), params: vec![("alpha".into(), "0.01".into())] },
                AlgEntry { id: 2, name: "fges".into(), params: vec![("penalty".into(), "2".into())] },
            ],
        };
        (means, stds, config)
    }

    #[test]
    fn tables_round_trip() {
        let (m, s, c) = sample_tables();
        let dir = tempfile::tempdir().unwrap();
        write_tables(&m, &s, &c, dir.path()).unwrap();
        let (m2, s2, c2) = read_tables(dir.path()).unwrap();
        assert_eq!((m2, s2, c2), (m, s, c));
        let stats = fs::read_to_string(dir.path().join("stats.txt")).unwrap();
        assert!(stats.ends_with("2\t50\t2\t1000\t-\t-\t-\t-\t-\t-\t-\n"));
    }

    #[test]
    fn unknown_algorithm_row_is_rejected() {
        let (mut m, s, c) = sample_tables();
        m.rows[1].alg_id = 9;
        assert!(write_tables(&m, &s, &c, Path::new("/nonexistent")).is_err());
        assert!(c.check(&m).is_err());
    }

    #[test]
    fn records_round_trip() {
        let cell = SimCell { vars: 10, avg_degree: 2, n: 100, run: 0 };
        let recs = vec![
            RunRecord { alg_id: 1, label: "pc:alpha=0.01".into(), cell, status: RunStatus::Ok, elapsed_s: 0.25 },
            RunRecord { alg_id: 2, label: "fges".into(), cell, status: RunStatus::Timeout, elapsed_s: 1.5 },
        ];
        assert_eq!(parse_records(&records_to_string(&recs), "mem").unwrap(), recs);
        let rows = vec![
            PerRunRow { record: recs[0].clone(), counts: Some(ConfusionCounts { atp: 3, atn: 42, ahtp: 1, ahtn: 80, ..Default::default() }) },
            PerRunRow { record: RunRecord { elapsed_s: 0.0, ..recs[1].clone() }, counts: None },
        ];
        assert_eq!(parse_per_run(&per_run_to_string(&rows), "mem").unwrap(), rows);
    }
}
