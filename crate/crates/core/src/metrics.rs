//! Adjacency and arrowhead accuracy of an estimated graph against the true
//! DAG.
//!
//! Adjacencies are judged over unordered node pairs. Arrowheads are judged
//! over ordered pairs `(x, y)`: the estimate has an arrowhead at `y` on an
//! edge `x *-> y`, the truth has `x --> y`. A bidirected edge therefore
//! contributes an arrowhead in both directions. Arrowhead true negatives are
//! the remainder of the `v (v - 1)` ordered pairs.
//!
//! Nodes are matched by name, so the estimate may list its variables in any
//! order.

use crate::error::{Error, Result};
use crate::graph::{Dag, Endpoint, MixedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub atp: u64,
    pub afp: u64,
    pub afn: u64,
    pub atn: u64,
    pub ahtp: u64,
    pub ahfp: u64,
    pub ahfn: u64,
    pub ahtn: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Adjacency,
    Arrowhead,
}

/// Map from the estimate's node indices to the truth's.
fn align(truth: &MixedGraph, est: &MixedGraph) -> Result<Vec<usize>> {
    if truth.num_nodes() != est.num_nodes() {
        return Err(Error::InvalidArgument(format!(
            "node sets differ: {} true nodes, {} estimated",
            truth.num_nodes(),
            est.num_nodes()
        )));
    }
    est.names()
        .iter()
        .map(|n| truth.node_index(n).ok_or_else(|| Error::UnknownName(n.clone())))
        .collect()
}

/// Confusion over unordered pairs; the arrowhead fields are left zero.
pub fn adjacency_confusion(truth: &Dag, est: &MixedGraph) -> Result<ConfusionCounts> {
    let map = align(truth, est)?;
    let v = truth.num_nodes() as u64;
    let mut c = ConfusionCounts::default();
    for e in est.edges() {
        if truth.is_adjacent(map[e.a], map[e.b]) {
            c.atp += 1;
        } else {
            c.afp += 1;
        }
    }
    c.afn = truth.num_edges() as u64 - c.atp;
    c.atn = v * v.saturating_sub(1) / 2 - c.atp - c.afp - c.afn;
    Ok(c)
}

/// Confusion over ordered pairs; the adjacency fields are left zero.
pub fn arrowhead_confusion(truth: &Dag, est: &MixedGraph) -> Result<ConfusionCounts> {
    let map = align(truth, est)?;
    let v = truth.num_nodes() as u64;
    let mut c = ConfusionCounts::default();
    for e in est.edges() {
        for (from, to, mark) in [(e.a, e.b, e.mark_b), (e.b, e.a, e.mark_a)] {
            if mark == Endpoint::Arrow {
                if truth.is_directed(map[from], map[to]) {
                    c.ahtp += 1;
                } else {
                    c.ahfp += 1;
                }
            }
        }
    }
    c.ahfn = truth.num_edges() as u64 - c.ahtp;
    c.ahtn = v * v.saturating_sub(1) - c.ahtp - c.ahfp - c.ahfn;
    Ok(c)
}

/// Both halves of the confusion table.
pub fn confusion(truth: &Dag, est: &MixedGraph) -> Result<ConfusionCounts> {
    let adj = adjacency_confusion(truth, est)?;
    let arr = arrowhead_confusion(truth, est)?;
    Ok(ConfusionCounts { ahtp: arr.ahtp, ahfp: arr.ahfp, ahfn: arr.ahfn, ahtn: arr.ahtn, ..adj })
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// `(AP, AR, AHP, AHR)`; `None` where the denominator is zero.
pub fn precision_recall(c: &ConfusionCounts) -> (Option<f64>, Option<f64>, Option<f64>, Option<f64>) {
    (
        ratio(c.atp, c.atp + c.afp),
        ratio(c.atp, c.atp + c.afn),
        ratio(c.ahtp, c.ahtp + c.ahfp),
        ratio(c.ahtp, c.ahtp + c.ahfn),
    )
}

/// Matthews correlation coefficient, 0 when any marginal is empty.
pub fn matthews(c: &ConfusionCounts, which: Which) -> f64 {
    let (tp, fp, fneg, tn) = match which {
        Which::Adjacency => (c.atp, c.afp, c.afn, c.atn),
        Which::Arrowhead => (c.ahtp, c.ahfp, c.ahfn, c.ahtn),
    };
    let (tp, fp, fneg, tn) = (tp as f64, fp as f64, fneg as f64, tn as f64);
    let den = (tp + fp) * (tp + fneg) * (tn + fp) * (tn + fneg);
    if den == 0.0 {
        return 0.0;
    }
    ((tp * tn - fp * fneg) / den.sqrt()).clamp(-1.0, 1.0)
}

/// One row of the results table. Statistics are `None` when undefined.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Stats {
    pub ap: Option<f64>,
    pub ar: Option<f64>,
    pub ahp: Option<f64>,
    pub ahr: Option<f64>,
    pub mcadj: Option<f64>,
    pub mcarrow: Option<f64>,
    pub elapsed_s: Option<f64>,
}

impl Stats {
    pub fn from_counts(c: &ConfusionCounts, elapsed_s: f64) -> Self {
        let (ap, ar, ahp, ahr) = precision_recall(c);
        Stats {
            ap,
            ar,
            ahp,
            ahr,
            mcadj: Some(matthews(c, Which::Adjacency)),
            mcarrow: Some(matthews(c, Which::Arrowhead)),
            elapsed_s: Some(elapsed_s),
        }
    }

    /// Values in table column order `AP AR AHP AHR McAdj McArrow E`.
    pub fn values(&self) -> [Option<f64>; 7] {
        [self.ap, self.ar, self.ahp, self.ahr, self.mcadj, self.mcarrow, self.elapsed_s]
    }

    pub fn from_values(v: [Option<f64>; 7]) -> Self {
        Stats { ap: v[0], ar: v[1], ahp: v[2], ahr: v[3], mcadj: v[4], mcarrow: v[5], elapsed_s: v[6] }
    }
}

/// A table cell: a number, undefined (`*`), or missing because every run
/// timed out or failed (`-`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Value(f64),
    Undefined,
    Missing,
}

pub const COLUMNS: [&str; 11] = ["Alg", "Vars", "Deg", "N", "AP", "AR", "AHP", "AHR", "McAdj", "McArrow", "E"];

/// One line of `stats.txt` or `std.txt`.
#[derive(Debug, Clone, PartialEq)]
pub struct StatRow {
    pub alg_id: usize,
    pub vars: usize,
    pub deg: usize,
    pub n: usize,
    /// `AP AR AHP AHR McAdj McArrow E`.
    pub cells: [Cell; 7],
}

impl StatRow {
    pub fn key(&self) -> (usize, usize, usize, usize) {
        (self.alg_id, self.vars, self.deg, self.n)
    }
}

/// Per-column mean and sample standard deviation over runs.
///
/// `None` entries are runs where the statistic was undefined and are left
/// out; a column undefined in every run becomes [`Cell::Undefined`]. With no
/// completed runs at all every column is [`Cell::Missing`]. A single
/// defined value has standard deviation 0.
pub fn summarize(runs: &[Stats]) -> ([Cell; 7], [Cell; 7]) {
    if runs.is_empty() {
        return ([Cell::Missing; 7], [Cell::Missing; 7]);
    }
    let mut mean = [Cell::Undefined; 7];
    let mut std = [Cell::Undefined; 7];
    for col in 0..7 {
        let xs: Vec<f64> = runs.iter().filter_map(|s| s.values()[col]).collect();
        if xs.is_empty() {
            continue;
        }
        let k = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / k;
        let sd = if xs.len() < 2 { 0.0 } else { (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (k - 1.0)).sqrt() };
        mean[col] = Cell::Value(m);
        std[col] = Cell::Value(sd);
    }
    (mean, std)
}
