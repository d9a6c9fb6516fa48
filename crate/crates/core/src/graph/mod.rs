//! Mixed graphs with tail/arrow endpoint marks.
//!
//! A [`MixedGraph`] holds at most one edge per unordered node pair. Each edge
//! carries one [`Endpoint`] mark per end, which is enough to represent the
//! three edge kinds the searches produce: undirected `a --- b`, directed
//! `a --> b` and bidirected `a <-> b`. A [`Dag`] is a mixed graph whose edges
//! are all directed and whose directed part is acyclic.
//!
//! Iteration over nodes, neighbours and edges is always in ascending node
//! index order, so downstream tie-breaking is reproducible.

mod dsep;
mod pattern;

use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::cmp::Reverse;
use std::fmt;
use std::ops::Deref;

use crate::error::{Error, Result};

pub use dsep::d_separated;
pub use pattern::{cpdag_from_pdag, cpdag_of, dag_extension, meek_closure, meek_orient, unshielded_triples, Triple};

/// The mark an edge carries at one of its endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoint {
    Tail,
    Arrow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Undirected,
    Directed,
    Bidirected,
}

/// An edge `a *-* b` with the mark found at each end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub mark_a: Endpoint,
    pub mark_b: Endpoint,
}

impl Edge {
    pub fn kind(&self) -> EdgeKind {
        match (self.mark_a, self.mark_b) {
            (Endpoint::Tail, Endpoint::Tail) => EdgeKind::Undirected,
            (Endpoint::Arrow, Endpoint::Arrow) => EdgeKind::Bidirected,
            _ => EdgeKind::Directed,
        }
    }

    /// Tail and head of a directed edge.
    pub fn direction(&self) -> Option<(usize, usize)> {
        match (self.mark_a, self.mark_b) {
            (Endpoint::Tail, Endpoint::Arrow) => Some((self.a, self.b)),
            (Endpoint::Arrow, Endpoint::Tail) => Some((self.b, self.a)),
            _ => None,
        }
    }
}

/// Graph over named nodes with marked edges.
#[derive(Clone, PartialEq, Eq)]
pub struct MixedGraph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    // keyed by (lo, hi); value is (mark at lo, mark at hi)
    marks: HashMap<(usize, usize), (Endpoint, Endpoint)>,
    adj: Vec<BTreeSet<usize>>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl MixedGraph {
    /// Creates an edgeless graph over the given node names.
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        let adj = vec![BTreeSet::new(); names.len()];
        Ok(MixedGraph { names, index, marks: HashMap::new(), adj })
    }

    /// Edgeless graph with nodes named `X1..Xn`.
    pub fn with_nodes(n: usize) -> Self {
        Self::new((1..=n).map(|i| format!("X{i}"))).expect("generated names are unique")
    }

    pub fn num_nodes(&self) -> usize {
        self.names.len()
    }

    pub fn num_edges(&self) -> usize {
        self.marks.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, node: usize) -> &str {
        &self.names[node]
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub(crate) fn check(&self, node: usize) -> Result<()> {
        if node < self.names.len() {
            Ok(())
        } else {
            Err(Error::UnknownNode(node))
        }
    }

    /// True iff an edge of any kind joins `a` and `b`.
    pub fn adjacent(&self, a: usize, b: usize) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.is_adjacent(a, b))
    }

    /// Unchecked variant of [`adjacent`](Self::adjacent) for hot loops.
    #[inline]
    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(&b)
    }

    /// Mark at `b` on the edge between `a` and `b`, if there is one.
    #[inline]
    pub fn endpoint_at(&self, a: usize, b: usize) -> Option<Endpoint> {
        let (lo, hi) = key(a, b);
        self.marks.get(&(lo, hi)).map(|&(m_lo, m_hi)| if b == lo { m_lo } else { m_hi })
    }

    pub fn edge(&self, a: usize, b: usize) -> Option<Edge> {
        Some(Edge { a, b, mark_a: self.endpoint_at(b, a)?, mark_b: self.endpoint_at(a, b)? })
    }

    /// `a --> b`
    #[inline]
    pub fn is_directed(&self, a: usize, b: usize) -> bool {
        self.endpoint_at(a, b) == Some(Endpoint::Arrow) && self.endpoint_at(b, a) == Some(Endpoint::Tail)
    }

    /// `a --- b`
    #[inline]
    pub fn is_undirected(&self, a: usize, b: usize) -> bool {
        self.endpoint_at(a, b) == Some(Endpoint::Tail) && self.endpoint_at(b, a) == Some(Endpoint::Tail)
    }

    /// `a <-> b`
    #[inline]
    pub fn is_bidirected(&self, a: usize, b: usize) -> bool {
        self.endpoint_at(a, b) == Some(Endpoint::Arrow) && self.endpoint_at(b, a) == Some(Endpoint::Arrow)
    }

    /// Inserts or replaces the edge between `a` and `b`.
    pub fn set_edge(&mut self, a: usize, b: usize, mark_a: Endpoint, mark_b: Endpoint) -> Result<()> {
        self.check(a)?;
        self.check(b)?;
        if a == b {
            return Err(Error::SelfLoop(a));
        }
        let value = if a < b { (mark_a, mark_b) } else { (mark_b, mark_a) };
        self.marks.insert(key(a, b), value);
        self.adj[a].insert(b);
        self.adj[b].insert(a);
        Ok(())
    }

    pub fn add_directed(&mut self, from: usize, to: usize) -> Result<()> {
        self.set_edge(from, to, Endpoint::Tail, Endpoint::Arrow)
    }

    pub fn add_undirected(&mut self, a: usize, b: usize) -> Result<()> {
        self.set_edge(a, b, Endpoint::Tail, Endpoint::Tail)
    }

    pub fn add_bidirected(&mut self, a: usize, b: usize) -> Result<()> {
        self.set_edge(a, b, Endpoint::Arrow, Endpoint::Arrow)
    }

    /// Changes the mark at `b` on an existing edge. Returns false when `a`
    /// and `b` are not adjacent.
    pub fn set_endpoint(&mut self, a: usize, b: usize, mark: Endpoint) -> bool {
        let (lo, hi) = key(a, b);
        match self.marks.get_mut(&(lo, hi)) {
            Some(m) => {
                if b == lo {
                    m.0 = mark;
                } else {
                    m.1 = mark;
                }
                true
            }
            None => false,
        }
    }

    /// Re-points an existing edge as `from --> to`.
    pub(crate) fn orient(&mut self, from: usize, to: usize) {
        debug_assert!(self.is_adjacent(from, to));
        self.set_endpoint(to, from, Endpoint::Tail);
        self.set_endpoint(from, to, Endpoint::Arrow);
    }

    pub fn remove_edge(&mut self, a: usize, b: usize) -> bool {
        if self.marks.remove(&key(a, b)).is_some() {
            self.adj[a].remove(&b);
            self.adj[b].remove(&a);
            true
        } else {
            false
        }
    }

    /// All nodes adjacent to `node`, ascending.
    pub fn neighbors(&self, node: usize) -> &BTreeSet<usize> {
        &self.adj[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adj[node].len()
    }

    /// Nodes `p` with `p --> node`.
    pub fn parents(&self, node: usize) -> Vec<usize> {
        self.adj[node].iter().copied().filter(|&p| self.is_directed(p, node)).collect()
    }

    /// Nodes `c` with `node --> c`.
    pub fn children(&self, node: usize) -> Vec<usize> {
        self.adj[node].iter().copied().filter(|&c| self.is_directed(node, c)).collect()
    }

    /// Nodes `u` with `node --- u`.
    pub fn undirected_neighbors(&self, node: usize) -> Vec<usize> {
        self.adj[node].iter().copied().filter(|&u| self.is_undirected(node, u)).collect()
    }

    /// Every edge once, as `(lo, hi)` with `a = lo`, sorted.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.marks.len());
        for a in 0..self.num_nodes() {
            for &b in self.adj[a].range(a + 1..) {
                let (mark_a, mark_b) = self.marks[&(a, b)];
                out.push(Edge { a, b, mark_a, mark_b });
            }
        }
        out
    }

    /// Same nodes, every edge made undirected.
    pub fn skeleton(&self) -> MixedGraph {
        let mut g = self.without_edges();
        for e in self.edges() {
            g.marks.insert((e.a, e.b), (Endpoint::Tail, Endpoint::Tail));
            g.adj[e.a].insert(e.b);
            g.adj[e.b].insert(e.a);
        }
        g
    }

    pub fn without_edges(&self) -> MixedGraph {
        MixedGraph {
            names: self.names.clone(),
            index: self.index.clone(),
            marks: HashMap::new(),
            adj: vec![BTreeSet::new(); self.names.len()],
        }
    }

    /// Rank of every node when nodes are sorted by name. Used wherever a
    /// result must not depend on the column order of the input data.
    pub fn name_ranks(&self) -> Vec<usize> {
        name_ranks(&self.names)
    }
}

pub(crate) fn name_ranks(names: &[String]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..names.len()).collect();
    order.sort_by(|&a, &b| names[a].cmp(&names[b]));
    let mut rank = vec![0; names.len()];
    for (r, &node) in order.iter().enumerate() {
        rank[node] = r;
    }
    rank
}

impl fmt::Debug for MixedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MixedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.edges().into_iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let (a, b) = (&self.names[e.a], &self.names[e.b]);
            match (e.mark_a, e.mark_b) {
                (Endpoint::Tail, Endpoint::Tail) => write!(f, "{a} --- {b}")?,
                (Endpoint::Tail, Endpoint::Arrow) => write!(f, "{a} --> {b}")?,
                (Endpoint::Arrow, Endpoint::Tail) => write!(f, "{b} --> {a}")?,
                (Endpoint::Arrow, Endpoint::Arrow) => write!(f, "{a} <-> {b}")?,
            }
        }
        write!(f, "}}")
    }
}

/// Nodes of `g` ordered so that every directed edge points forward.
///
/// Only directed edges constrain the order. Ties are broken by smallest
/// index, so the order is unique for a given graph.
pub fn topological_order(g: &MixedGraph) -> Result<Vec<usize>> {
    let n = g.num_nodes();
    let mut indegree = vec![0usize; n];
    for v in 0..n {
        indegree[v] = g.parents(v).len();
    }
    let mut ready: BinaryHeap<Reverse<usize>> =
        (0..n).filter(|&v| indegree[v] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(v)) = ready.pop() {
        order.push(v);
        for c in g.children(v) {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.push(Reverse(c));
            }
        }
    }
    if order.len() < n {
        let stuck = (0..n).find(|&v| indegree[v] > 0).expect("some node is on a cycle");
        return Err(Error::Cycle(stuck));
    }
    Ok(order)
}

/// A directed acyclic graph.
#[derive(Clone, PartialEq, Eq)]
pub struct Dag(MixedGraph);

impl Dag {
    /// Validates that every edge is directed and there is no directed cycle.
    pub fn new(graph: MixedGraph) -> Result<Self> {
        if let Some(e) = graph.edges().into_iter().find(|e| e.kind() != EdgeKind::Directed) {
            return Err(Error::NotDirected(e.a, e.b));
        }
        topological_order(&graph)?;
        Ok(Dag(graph))
    }

    /// DAG over `X1..Xn` with the given `(from, to)` edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = MixedGraph::with_nodes(n);
        for &(a, b) in edges {
            g.add_directed(a, b)?;
        }
        Dag::new(g)
    }

    pub fn graph(&self) -> &MixedGraph {
        &self.0
    }

    pub fn into_graph(self) -> MixedGraph {
        self.0
    }

    pub fn topological_order(&self) -> Vec<usize> {
        topological_order(&self.0).expect("validated at construction")
    }

    /// `(from, to)` pairs in ascending edge order.
    pub fn directed_edges(&self) -> Vec<(usize, usize)> {
        self.0.edges().iter().filter_map(Edge::direction).collect()
    }
}

impl Deref for Dag {
    type Target = MixedGraph;

    fn deref(&self) -> &MixedGraph {
        &self.0
    }
}

impl fmt::Debug for Dag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dag{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacency_is_symmetric_and_mark_agnostic() {
        let mut g = MixedGraph::with_nodes(3);
        assert!(!g.adjacent(0, 1).unwrap());
        g.add_directed(0, 1).unwrap();
        assert!(g.adjacent(1, 0).unwrap());
        g.add_bidirected(1, 2).unwrap();
        assert!(g.adjacent(1, 2).unwrap());
        assert!(g.is_bidirected(2, 1));
        assert!(matches!(g.adjacent(0, 7), Err(Error::UnknownNode(7))));
    }

    #[test]
    fn marks_follow_edge_direction() {
        let mut g = MixedGraph::with_nodes(3);
        g.add_directed(2, 0).unwrap();
        assert!(g.is_directed(2, 0));
        assert!(!g.is_directed(0, 2));
        assert_eq!(g.parents(0), vec![2]);
        assert_eq!(g.children(2), vec![0]);
        g.orient(0, 2);
        assert!(g.is_directed(0, 2));
        let e = g.edges()[0];
        assert_eq!(e.direction(), Some((0, 2)));
    }

    #[test]
    fn rejects_self_loops_and_duplicate_names() {
        let mut g = MixedGraph::with_nodes(2);
        assert!(matches!(g.add_undirected(1, 1), Err(Error::SelfLoop(1))));
        assert!(matches!(MixedGraph::new(["A", "A"]), Err(Error::DuplicateName(_))));
    }

    #[test]
    fn topological_order_examples() {
        let g = MixedGraph::with_nodes(3);
        assert_eq!(topological_order(&g).unwrap(), vec![0, 1, 2]);
        let d = Dag::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(d.topological_order(), vec![0, 1, 2]);
        let d = Dag::from_edges(3, &[(2, 1), (1, 0)]).unwrap();
        assert_eq!(d.topological_order(), vec![2, 1, 0]);
    }

    #[test]
    fn cycles_are_reported() {
        let mut g = MixedGraph::with_nodes(3);
        g.add_directed(0, 1).unwrap();
        g.add_directed(1, 2).unwrap();
        g.add_directed(2, 0).unwrap();
        assert!(matches!(topological_order(&g), Err(Error::Cycle(_))));
        assert!(Dag::new(g).is_err());
        let mut g = MixedGraph::with_nodes(2);
        g.add_undirected(0, 1).unwrap();
        assert!(matches!(Dag::new(g), Err(Error::NotDirected(0, 1))));
    }

    #[test]
    fn display_lists_edges_in_order() {
        let mut g = MixedGraph::with_nodes(4);
        g.add_directed(1, 0).unwrap();
        g.add_undirected(1, 2).unwrap();
        g.add_bidirected(2, 3).unwrap();
        assert_eq!(g.to_string(), "{X2 --> X1, X2 --- X3, X3 <-> X4}");
    }

    #[test]
    fn name_ranks_sort_lexicographically() {
        let g = MixedGraph::new(["b", "c", "a"]).unwrap();
        assert_eq!(g.name_ranks(), vec![1, 2, 0]);
    }
}
