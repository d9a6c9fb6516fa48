//! Patterns (CPDAGs) and the Meek orientation rules.

use std::collections::BTreeSet;

use super::{Dag, MixedGraph};
use crate::error::{Error, Result};

/// An unshielded triple `x *-* y *-* z` with `x` and `z` non-adjacent.
/// Stored with `x < z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

impl Triple {
    pub fn new(x: usize, y: usize, z: usize) -> Self {
        if x < z {
            Triple { x, y, z }
        } else {
            Triple { x: z, y, z: x }
        }
    }

    pub fn is_unshielded_in(&self, g: &MixedGraph) -> bool {
        g.is_adjacent(self.x, self.y) && g.is_adjacent(self.y, self.z) && !g.is_adjacent(self.x, self.z)
    }
}

/// Every unshielded triple of `g`, sorted by `(y, x, z)`.
pub fn unshielded_triples(g: &MixedGraph) -> Vec<Triple> {
    let mut out = Vec::new();
    for y in 0..g.num_nodes() {
        let adj: Vec<usize> = g.neighbors(y).iter().copied().collect();
        for (i, &x) in adj.iter().enumerate() {
            for &z in &adj[i + 1..] {
                if !g.is_adjacent(x, z) {
                    out.push(Triple { x, y, z });
                }
            }
        }
    }
    out
}

/// The pattern of a DAG: skeleton, unshielded colliders oriented, and the
/// Meek closure of that.
pub fn cpdag_of(dag: &Dag) -> MixedGraph {
    cpdag_from_pdag(dag.graph())
}

/// Pattern of the Markov equivalence class represented by a partially
/// directed graph.
///
/// Keeps the skeleton, keeps only those directed edges that form unshielded
/// colliders `a --> b <-- c`, and applies [`meek_orient`]. When `pdag` admits
/// a consistent DAG extension this is the CPDAG of that extension.
pub fn cpdag_from_pdag(pdag: &MixedGraph) -> MixedGraph {
    let mut out = pdag.skeleton();
    for b in 0..pdag.num_nodes() {
        let parents = pdag.parents(b);
        for (i, &a) in parents.iter().enumerate() {
            for &c in &parents[i + 1..] {
                if !pdag.is_adjacent(a, c) {
                    out.orient(a, b);
                    out.orient(c, b);
                }
            }
        }
    }
    meek_orient(&mut out);
    out
}

/// A DAG in the equivalence class of a pattern: every directed edge kept,
/// undirected edges oriented without creating new unshielded colliders or
/// cycles (Dor and Tarsi's sink elimination, lowest index first).
///
/// Fails with [`Error::InvalidArgument`] when no such extension exists or the
/// graph contains bidirected edges.
pub fn dag_extension(pattern: &MixedGraph) -> Result<Dag> {
    let mut work = pattern.clone();
    let mut out = pattern.clone();
    let mut alive: BTreeSet<usize> = (0..pattern.num_nodes()).collect();
    while !alive.is_empty() {
        let sink = alive.iter().copied().find(|&v| {
            if !work.children(v).is_empty() || work.neighbors(v).iter().any(|&u| work.is_bidirected(u, v)) {
                return false;
            }
            let nbrs = work.neighbors(v);
            work.undirected_neighbors(v)
                .iter()
                .all(|&u| nbrs.iter().all(|&w| w == u || work.is_adjacent(u, w)))
        });
        let Some(v) = sink else {
            return Err(Error::InvalidArgument("pattern has no consistent DAG extension".into()));
        };
        for u in work.undirected_neighbors(v) {
            out.orient(u, v);
        }
        for u in work.neighbors(v).iter().copied().collect::<Vec<_>>() {
            work.remove_edge(u, v);
        }
        alive.remove(&v);
    }
    Dag::new(out)
}

/// Applies the four Meek rules to a copy of `g` until nothing changes.
pub fn meek_closure(g: &MixedGraph) -> MixedGraph {
    let mut out = g.clone();
    meek_orient(&mut out);
    out
}

/// In-place Meek closure. Only undirected edges are ever oriented; existing
/// arrows are never removed. Bidirected edges count for adjacency but never
/// as the premise of a rule.
///
/// Candidate edges are visited in order of node-name rank, so the result
/// does not depend on the order nodes were declared in.
pub fn meek_orient(g: &mut MixedGraph) {
    let rank = g.name_ranks();
    let mut by_rank = vec![0; rank.len()];
    for (node, &r) in rank.iter().enumerate() {
        by_rank[r] = node;
    }
    let rank_key = |a: usize, b: usize| {
        let (ra, rb) = (rank[a], rank[b]);
        if ra < rb {
            (ra, rb)
        } else {
            (rb, ra)
        }
    };

    let mut work: BTreeSet<(usize, usize)> = BTreeSet::new();
    for e in g.edges() {
        if g.is_undirected(e.a, e.b) {
            work.insert(rank_key(e.a, e.b));
        }
    }

    while let Some((ra, rb)) = work.pop_first() {
        let (a, b) = (by_rank[ra], by_rank[rb]);
        if !g.is_undirected(a, b) {
            continue;
        }
        let oriented = if implied(g, a, b) {
            Some((a, b))
        } else if implied(g, b, a) {
            Some((b, a))
        } else {
            None
        };
        if let Some((from, to)) = oriented {
            g.orient(from, to);
            let mut touched: Vec<usize> = vec![from, to];
            touched.extend(g.neighbors(to).iter().copied());
            for v in touched {
                for &w in g.neighbors(v) {
                    if g.is_undirected(v, w) {
                        work.insert(rank_key(v, w));
                    }
                }
            }
        }
    }
}

/// Whether some Meek rule forces the undirected edge `a --- b` to `a --> b`.
fn implied(g: &MixedGraph, a: usize, b: usize) -> bool {
    // R1: c --> a --- b, c and b non-adjacent.
    for &c in g.neighbors(a) {
        if c != b && g.is_directed(c, a) && !g.is_adjacent(c, b) {
            return true;
        }
    }
    // R2: a --> c --> b.
    for &c in g.neighbors(a) {
        if c != b && g.is_directed(a, c) && g.is_directed(c, b) {
            return true;
        }
    }
    // R3: a --- c --> b, a --- d --> b, c and d non-adjacent.
    let spouses: Vec<usize> = g
        .neighbors(b)
        .iter()
        .copied()
        .filter(|&c| c != a && g.is_directed(c, b) && g.is_undirected(a, c))
        .collect();
    for (i, &c) in spouses.iter().enumerate() {
        for &d in &spouses[i + 1..] {
            if !g.is_adjacent(c, d) {
                return true;
            }
        }
    }
    // R4: d --> c --> b, a --- d, a adjacent to c, b and d non-adjacent.
    for &c in g.neighbors(b) {
        if c == a || !g.is_directed(c, b) || !g.is_adjacent(a, c) {
            continue;
        }
        for &d in g.neighbors(c) {
            if d != a && d != b && g.is_directed(d, c) && g.is_undirected(a, d) && !g.is_adjacent(b, d) {
                return true;
            }
        }
    }
    false
}
