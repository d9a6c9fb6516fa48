//! Fast greedy equivalence search.
//!
//! The search walks through patterns (CPDAGs). A forward phase applies the
//! best-scoring valid insert operator until none improves the score, then a
//! backward phase does the same with delete operators. Candidate operators
//! ("arrows") are kept in an ordered cache; after each step only the arrows
//! pointing into nodes whose surroundings changed are rescored, and every
//! arrow is re-checked against the current graph before it is applied.
//!
//! With `faithfulness_assumed` the forward phase only ever considers pairs
//! that are dependent on their own (positive single-edge score). Without it,
//! a second forward sweep over every non-adjacent pair follows the first
//! backward phase, and the backward phase is repeated.

use std::cmp::Ordering;
use std::collections::{BTreeSet, VecDeque};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{cpdag_from_pdag, Endpoint, MixedGraph};
use crate::indtest::CorrMatrix;
use crate::score::{Score, ScoreKind};
use crate::util::{all_subsets, Deadline};

#[derive(Debug, Clone, PartialEq)]
pub struct FgesConfig {
    pub score: ScoreKind,
    pub faithfulness_assumed: bool,
    pub workers: usize,
}

impl FgesConfig {
    pub fn new(score: ScoreKind) -> Self {
        FgesConfig { score, faithfulness_assumed: false, workers: 1 }
    }

    pub fn faithfulness(self, assumed: bool) -> Self {
        FgesConfig { faithfulness_assumed: assumed, ..self }
    }

    pub fn workers(self, workers: usize) -> Self {
        FgesConfig { workers: workers.max(1), ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    Insert,
    Delete,
}

/// A cached operator with the graph context its score was computed in.
#[derive(Debug, Clone)]
pub struct Arrow {
    pub kind: OperatorKind,
    pub x: usize,
    pub y: usize,
    /// `T` for an insert, `H` for a delete; ascending.
    pub subset: Vec<usize>,
    pub delta: f64,
    na_yx: Vec<usize>,
    parents: Vec<usize>,
}

impl PartialEq for Arrow {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Arrow {}

impl PartialOrd for Arrow {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Best first: larger delta, then smaller `(x, y)`, then the larger subset.
///
/// Preferring the larger `T` on ties matters for scores with flat deltas
/// such as the d-separation oracle: inserting `x --> y` with the other
/// parents of `y` in `T` forms the collider, which is never recoverable
/// later when the two parents are independent and never get adjacent.
impl Ord for Arrow {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .delta
            .total_cmp(&self.delta)
            .then(self.x.cmp(&other.x))
            .then(self.y.cmp(&other.y))
            .then(other.subset.len().cmp(&self.subset.len()))
            .then_with(|| self.subset.cmp(&other.subset))
            .then_with(|| self.na_yx.cmp(&other.na_yx))
            .then_with(|| self.parents.cmp(&other.parents))
    }
}

/// Undirected neighbours of `y` adjacent to `x`.
fn na_yx(g: &MixedGraph, x: usize, y: usize) -> Vec<usize> {
    g.undirected_neighbors(y).into_iter().filter(|&t| t != x && g.is_adjacent(t, x)).collect()
}

fn is_clique(g: &MixedGraph, nodes: &[usize]) -> bool {
    nodes.iter().enumerate().all(|(i, &a)| nodes[i + 1..].iter().all(|&b| g.is_adjacent(a, b)))
}

fn union_sorted(parts: &[&[usize]]) -> Vec<usize> {
    let set: BTreeSet<usize> = parts.iter().flat_map(|p| p.iter().copied()).collect();
    set.into_iter().collect()
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    small.iter().all(|s| big.contains(s))
}

/// Whether a semi-directed path (undirected or forward-directed edges only)
/// leads from `from` to `to` without entering `blocked`.
fn semidirected_path(g: &MixedGraph, from: usize, to: usize, blocked: &[usize]) -> bool {
    let mut seen = vec![false; g.num_nodes()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if seen[w] || g.endpoint_at(w, u) == Some(Endpoint::Arrow) {
                continue;
            }
            if w == to {
                return true;
            }
            seen[w] = true;
            if !blocked.contains(&w) {
                queue.push_back(w);
            }
        }
    }
    false
}

/// All subsets of `candidates` that are cliques in `g`, in depth-first order.
fn cliques(g: &MixedGraph, candidates: &[usize]) -> Vec<Vec<usize>> {
    fn grow(g: &MixedGraph, cand: &[usize], start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(cur.clone());
        for i in start..cand.len() {
            if cur.iter().all(|&c| g.is_adjacent(c, cand[i])) {
                cur.push(cand[i]);
                grow(g, cand, i + 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    grow(g, candidates, 0, &mut Vec::new(), &mut out);
    out
}

/// Chickering's insert validity: `x` and `y` non-adjacent, `T` drawn from the
/// undirected neighbours of `y` not adjacent to `x`, `NA_yx ∪ T` a clique,
/// and every semi-directed path from `y` to `x` passing through `NA_yx ∪ T`.
pub fn valid_insert(g: &MixedGraph, x: usize, y: usize, t: &[usize]) -> bool {
    let n = g.num_nodes();
    if x >= n || y >= n || x == y || g.is_adjacent(x, y) {
        return false;
    }
    if !t.iter().all(|&v| v != x && g.is_undirected(v, y) && !g.is_adjacent(v, x)) {
        return false;
    }
    let na_t = union_sorted(&[&na_yx(g, x, y), t]);
    is_clique(g, &na_t) && !semidirected_path(g, y, x, &na_t)
}

/// Adds `x --> y`, orients `t --> y` for `t` in `T`, and returns the pattern
/// of the result.
pub fn apply_insert(g: &MixedGraph, x: usize, y: usize, t: &[usize]) -> Result<MixedGraph> {
    if !valid_insert(g, x, y, t) {
        return Err(Error::InvalidOperator(format!("insert({x}, {y}, {t:?})")));
    }
    Ok(insert_unchecked(g, x, y, t))
}

fn insert_unchecked(g: &MixedGraph, x: usize, y: usize, t: &[usize]) -> MixedGraph {
    let mut out = g.clone();
    out.add_directed(x, y).expect("nodes checked");
    for &v in t {
        out.orient(v, y);
    }
    cpdag_from_pdag(&out)
}

/// Chickering's delete validity: `x --- y` or `x --> y`, `H` drawn from
/// `NA_yx`, and `NA_yx \ H` a clique.
pub fn valid_delete(g: &MixedGraph, x: usize, y: usize, h: &[usize]) -> bool {
    let n = g.num_nodes();
    if x >= n || y >= n || x == y || !(g.is_undirected(x, y) || g.is_directed(x, y)) {
        return false;
    }
    let na = na_yx(g, x, y);
    if !is_subset(h, &na) {
        return false;
    }
    let rest: Vec<usize> = na.into_iter().filter(|v| !h.contains(v)).collect();
    is_clique(g, &rest)
}

/// Removes the `x`-`y` edge, orients `y --> h` and any undirected `x --- h`
/// as `x --> h` for `h` in `H`, and returns the pattern of the result.
pub fn apply_delete(g: &MixedGraph, x: usize, y: usize, h: &[usize]) -> Result<MixedGraph> {
    if !valid_delete(g, x, y, h) {
        return Err(Error::InvalidOperator(format!("delete({x}, {y}, {h:?})")));
    }
    Ok(delete_unchecked(g, x, y, h))
}

fn delete_unchecked(g: &MixedGraph, x: usize, y: usize, h: &[usize]) -> MixedGraph {
    let mut out = g.clone();
    out.remove_edge(x, y);
    for &v in h {
        out.orient(y, v);
        if out.is_undirected(x, v) {
            out.orient(x, v);
        }
    }
    cpdag_from_pdag(&out)
}

/// Which pairs the forward phase may connect.
enum Candidates {
    All,
    /// `allowed[y * v + x]`.
    Effects(Vec<bool>),
}

impl Candidates {
    fn allows(&self, v: usize, x: usize, y: usize) -> bool {
        match self {
            Candidates::All => true,
            Candidates::Effects(m) => m[y * v + x],
        }
    }
}

struct Search<'s> {
    score: &'s dyn Score,
    graph: MixedGraph,
    deadline: Deadline,
}

impl Search<'_> {
    fn insert_arrows_for(&self, x: usize, y: usize) -> Result<Vec<Arrow>> {
        let g = &self.graph;
        let mut out = Vec::new();
        if x == y || g.is_adjacent(x, y) {
            return Ok(out);
        }
        let na = na_yx(g, x, y);
        if !is_clique(g, &na) {
            return Ok(out);
        }
        let t_nbrs: Vec<usize> = g
            .undirected_neighbors(y)
            .into_iter()
            .filter(|&t| t != x && !g.is_adjacent(t, x) && na.iter().all(|&a| g.is_adjacent(a, t)))
            .collect();
        let parents = g.parents(y);
        for t in cliques(g, &t_nbrs) {
            self.deadline.check()?;
            let cond = union_sorted(&[&na, &t, &parents]);
            let delta = self.score.edge_delta(x, y, &cond)?;
            if delta > 0.0 {
                out.push(Arrow { kind: OperatorKind::Insert, x, y, subset: t, delta, na_yx: na.clone(), parents: parents.clone() });
            }
        }
        Ok(out)
    }

    fn delete_arrows_for(&self, x: usize, y: usize) -> Result<Vec<Arrow>> {
        let g = &self.graph;
        let mut out = Vec::new();
        if x == y || !(g.is_undirected(x, y) || g.is_directed(x, y)) {
            return Ok(out);
        }
        let na = na_yx(g, x, y);
        let parents = g.parents(y);
        for h in all_subsets(&na) {
            self.deadline.check()?;
            let rest: Vec<usize> = na.iter().copied().filter(|v| !h.contains(v)).collect();
            if !is_clique(g, &rest) {
                continue;
            }
            let others: Vec<usize> = parents.iter().copied().filter(|&p| p != x).collect();
            let cond = union_sorted(&[&rest, &others]);
            let delta = -self.score.edge_delta(x, y, &cond)?;
            if delta > 0.0 {
                out.push(Arrow { kind: OperatorKind::Delete, x, y, subset: h, delta, na_yx: na.clone(), parents: parents.clone() });
            }
        }
        Ok(out)
    }

    fn arrows_for(&self, kind: OperatorKind, x: usize, y: usize) -> Result<Vec<Arrow>> {
        match kind {
            OperatorKind::Insert => self.insert_arrows_for(x, y),
            OperatorKind::Delete => self.delete_arrows_for(x, y),
        }
    }

    /// Rescores every arrow into the nodes in `targets`.
    fn arrows_into(&self, kind: OperatorKind, targets: &[usize], cand: &Candidates) -> Result<Vec<Arrow>> {
        let v = self.graph.num_nodes();
        let pairs: Vec<(usize, usize)> = targets
            .iter()
            .flat_map(|&y| {
                let xs: Vec<usize> = match kind {
                    OperatorKind::Insert => (0..v)
                        .filter(|&x| x != y && !self.graph.is_adjacent(x, y) && cand.allows(v, x, y))
                        .collect(),
                    OperatorKind::Delete => self.graph.neighbors(y).iter().copied().collect(),
                };
                xs.into_iter().map(move |x| (x, y))
            })
            .collect();
        let found: Vec<Vec<Arrow>> =
            pairs.par_iter().map(|&(x, y)| self.arrows_for(kind, x, y)).collect::<Result<_>>()?;
        Ok(found.into_iter().flatten().collect())
    }

    /// Whether the graph around `a` is what its score was computed in.
    fn context_holds(&self, a: &Arrow) -> bool {
        let g = &self.graph;
        let base = match a.kind {
            OperatorKind::Insert => !g.is_adjacent(a.x, a.y),
            OperatorKind::Delete => g.is_undirected(a.x, a.y) || g.is_directed(a.x, a.y),
        };
        if !base || na_yx(g, a.x, a.y) != a.na_yx || g.parents(a.y) != a.parents {
            return false;
        }
        match a.kind {
            OperatorKind::Insert => a
                .subset
                .iter()
                .all(|&t| g.is_undirected(t, a.y) && !g.is_adjacent(t, a.x) && a.na_yx.iter().all(|&n| g.is_adjacent(n, t))),
            OperatorKind::Delete => true,
        }
    }

    fn phase(&mut self, kind: OperatorKind, cand: &Candidates) -> Result<()> {
        let v = self.graph.num_nodes();
        let mut queue: BTreeSet<Arrow> = BTreeSet::new();
        let mut by_target: Vec<Vec<Arrow>> = vec![Vec::new(); v];
        let all: Vec<usize> = (0..v).collect();
        for a in self.arrows_into(kind, &all, cand)? {
            by_target[a.y].push(a.clone());
            queue.insert(a);
        }

        while let Some(a) = queue.pop_first() {
            self.deadline.check()?;
            if !self.context_holds(&a) {
                for fresh in self.arrows_for(kind, a.x, a.y)? {
                    by_target[fresh.y].push(fresh.clone());
                    queue.insert(fresh);
                }
                continue;
            }
            let valid = match kind {
                OperatorKind::Insert => valid_insert(&self.graph, a.x, a.y, &a.subset),
                OperatorKind::Delete => valid_delete(&self.graph, a.x, a.y, &a.subset),
            };
            if !valid {
                continue;
            }
            let before = std::mem::replace(&mut self.graph, MixedGraph::with_nodes(0));
            let after = match kind {
                OperatorKind::Insert => insert_unchecked(&before, a.x, a.y, &a.subset),
                OperatorKind::Delete => delete_unchecked(&before, a.x, a.y, &a.subset),
            };
            let touched = touched_nodes(&before, &after, a.x, a.y);
            self.graph = after;

            for &y in &touched {
                for old in by_target[y].drain(..) {
                    queue.remove(&old);
                }
            }
            for fresh in self.arrows_into(kind, &touched, cand)? {
                by_target[fresh.y].push(fresh.clone());
                queue.insert(fresh);
            }
        }
        Ok(())
    }
}

/// Nodes whose incoming arrows may have changed: endpoints of edges whose
/// marks changed, plus `x`, `y` and their neighbours before and after.
fn touched_nodes(before: &MixedGraph, after: &MixedGraph, x: usize, y: usize) -> Vec<usize> {
    let mut t: BTreeSet<usize> = BTreeSet::from([x, y]);
    for g in [before, after] {
        t.extend(g.neighbors(x).iter().copied());
        t.extend(g.neighbors(y).iter().copied());
        for e in g.edges() {
            let other = if std::ptr::eq(g, before) { after } else { before };
            if other.endpoint_at(e.a, e.b) != Some(e.mark_b) || other.endpoint_at(e.b, e.a) != Some(e.mark_a) {
                t.insert(e.a);
                t.insert(e.b);
            }
        }
    }
    t.into_iter().collect()
}

/// Runs the search against any score.
pub fn fges_with_score(score: &dyn Score, faithfulness_assumed: bool, workers: usize, deadline: &Deadline) -> Result<MixedGraph> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    pool.install(|| {
        let names = score.variables().to_vec();
        let v = names.len();
        let mut search = Search { score, graph: MixedGraph::new(names)?, deadline: *deadline };

        // Single-edge sweep against the empty graph.
        let pairs: Vec<(usize, usize)> = (0..v).flat_map(|a| (a + 1..v).map(move |b| (a, b))).collect();
        let deltas: Vec<f64> = pairs.par_iter().map(|&(a, b)| score.edge_delta(a, b, &[])).collect::<Result<_>>()?;
        let mut effects = vec![false; v * v];
        for (&(a, b), &d) in pairs.iter().zip(&deltas) {
            if d > 0.0 {
                effects[a * v + b] = true;
                effects[b * v + a] = true;
            }
        }
        let effects = Candidates::Effects(effects);

        search.phase(OperatorKind::Insert, &effects)?;
        search.phase(OperatorKind::Delete, &Candidates::All)?;
        if !faithfulness_assumed {
            search.phase(OperatorKind::Insert, &Candidates::All)?;
            search.phase(OperatorKind::Delete, &Candidates::All)?;
        }
        Ok(search.graph)
    })
}

/// Runs the search with the configured score over a correlation matrix.
pub fn fges_search(config: &FgesConfig, c: &CorrMatrix) -> Result<MixedGraph> {
    fges_search_with_deadline(config, c, &Deadline::none())
}

pub fn fges_search_with_deadline(config: &FgesConfig, c: &CorrMatrix, deadline: &Deadline) -> Result<MixedGraph> {
    let score = config.score.bind(c)?;
    fges_with_score(score.as_ref(), config.faithfulness_assumed, config.workers, deadline)
}
