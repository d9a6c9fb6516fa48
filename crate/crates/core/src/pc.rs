//! The PC family of constraint-based searches.
//!
//! Every variant shares the same pipeline: an adjacency search that removes
//! edges on the strength of conditional independence, a collider
//! orientation step over the unshielded triples, and the Meek closure.
//! Variants differ in whether the adjacency search is the order-independent
//! ("stable") one, how colliders are decided, and how conflicting collider
//! orientations are resolved.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{meek_orient, name_ranks, unshielded_triples, Endpoint, MixedGraph, Triple};
use crate::indtest::{correlation_matrix, FisherZ, IndependenceTest};
use crate::simulate::DataSet;
use crate::util::{all_subsets, combinations, Deadline};

/// How to resolve two collider orientations that disagree on a shared edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ConflictRule {
    /// Keep the first orientation; refuse any collider that would reverse it.
    #[default]
    Priority,
    /// Re-point edges to the latest collider, `x --> y --> z <-- w`.
    Overwrite,
    /// Add arrowheads without removing any, `x --> y <-> z <-- w`.
    Bidirected,
}

impl ConflictRule {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConflictRule::Priority => "priority",
            ConflictRule::Overwrite => "overwrite",
            ConflictRule::Bidirected => "bidirected",
        }
    }
}

impl FromStr for ConflictRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "priority" => Ok(ConflictRule::Priority),
            "overwrite" => Ok(ConflictRule::Overwrite),
            "bidirected" => Ok(ConflictRule::Bidirected),
            _ => Err(Error::InvalidArgument(format!("unknown conflict rule `{s}`"))),
        }
    }
}

/// How colliders are decided at unshielded triples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColliderOrientation {
    /// `y` absent from the recorded separating set.
    Sepset,
    /// Unanimity over all separating subsets (conservative PC).
    Conservative,
    /// `y` absent from the subset with the largest p-value.
    MaxP,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcVariant {
    pub stable: bool,
    pub orientation: ColliderOrientation,
    pub conflict: ConflictRule,
    pub alpha: f64,
    /// Threads for the stable adjacency search. Classic PC is sequential.
    pub workers: usize,
}

impl PcVariant {
    fn of(stable: bool, orientation: ColliderOrientation, alpha: f64) -> Self {
        PcVariant { stable, orientation, conflict: ConflictRule::Priority, alpha, workers: 1 }
    }

    pub fn pc(alpha: f64) -> Self {
        Self::of(false, ColliderOrientation::Sepset, alpha)
    }

    pub fn pc_stable(alpha: f64) -> Self {
        Self::of(true, ColliderOrientation::Sepset, alpha)
    }

    pub fn pc_max(alpha: f64) -> Self {
        Self::of(false, ColliderOrientation::MaxP, alpha)
    }

    pub fn pc_stable_max(alpha: f64) -> Self {
        Self::of(true, ColliderOrientation::MaxP, alpha)
    }

    pub fn cpc(alpha: f64) -> Self {
        Self::of(false, ColliderOrientation::Conservative, alpha)
    }

    pub fn cpc_stable(alpha: f64) -> Self {
        Self::of(true, ColliderOrientation::Conservative, alpha)
    }

    pub fn with_conflict(self, conflict: ConflictRule) -> Self {
        PcVariant { conflict, ..self }
    }

    pub fn with_workers(self, workers: usize) -> Self {
        PcVariant { workers: workers.max(1), ..self }
    }

    /// Harness name: `pc`, `pc-stable`, `pc-stable-max`, `cpc` or `cpc-stable`.
    /// Classic adjacency with max-p orientation has no standard name and is
    /// called `pc-max`.
    pub fn name(&self) -> &'static str {
        match (self.stable, self.orientation) {
            (false, ColliderOrientation::Sepset) => "pc",
            (true, ColliderOrientation::Sepset) => "pc-stable",
            (false, ColliderOrientation::MaxP) => "pc-max",
            (true, ColliderOrientation::MaxP) => "pc-stable-max",
            (false, ColliderOrientation::Conservative) => "cpc",
            (true, ColliderOrientation::Conservative) => "cpc-stable",
        }
    }

    pub fn from_name(name: &str, alpha: f64) -> Result<Self> {
        Ok(match name {
            "pc" => Self::pc(alpha),
            "pc-stable" => Self::pc_stable(alpha),
            "pc-max" => Self::pc_max(alpha),
            "pc-stable-max" => Self::pc_stable_max(alpha),
            "cpc" => Self::cpc(alpha),
            "cpc-stable" => Self::cpc_stable(alpha),
            _ => return Err(Error::InvalidArgument(format!("unknown PC variant `{name}`"))),
        })
    }
}

/// Separating sets recorded by the adjacency search, keyed by unordered pair.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SepsetMap(HashMap<(usize, usize), Vec<usize>>);

impl SepsetMap {
    fn key(x: usize, y: usize) -> (usize, usize) {
        (x.min(y), x.max(y))
    }

    pub fn insert(&mut self, x: usize, y: usize, set: Vec<usize>) {
        self.0.insert(Self::key(x, y), set);
    }

    pub fn get(&self, x: usize, y: usize) -> Option<&[usize]> {
        self.0.get(&Self::key(x, y)).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Classification of an unshielded triple by the conservative rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TripleMark {
    Collider,
    Noncollider,
    Ambiguous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MarkedTriple {
    pub triple: Triple,
    pub mark: TripleMark,
}

fn complete_graph(names: &[String]) -> Result<MixedGraph> {
    let mut g = MixedGraph::new(names.iter().cloned())?;
    for a in 0..names.len() {
        for b in a + 1..names.len() {
            g.add_undirected(a, b)?;
        }
    }
    Ok(g)
}

/// First subset of `candidates` of size `depth` that separates `x` and `y`.
fn find_sepset<T: IndependenceTest + ?Sized>(
    test: &T,
    x: usize,
    y: usize,
    candidates: &[usize],
    depth: usize,
    deadline: &Deadline,
) -> Result<Option<Vec<usize>>> {
    for s in combinations(candidates, depth) {
        deadline.check()?;
        if test.test(x, y, &s)?.independent {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

/// Skeleton search from the complete graph, single-threaded, no deadline.
pub fn adjacency_search<T: IndependenceTest + ?Sized>(test: &T, stable: bool) -> Result<(MixedGraph, SepsetMap)> {
    adjacency_search_with(test, stable, 1, &Deadline::none())
}

/// Skeleton search from the complete graph.
///
/// At depth `d` every remaining edge `x --- y` is tested against the
/// `d`-subsets of the adjacencies of `x` (minus `y`) and of `y` (minus `x`),
/// in lexicographic order; the first separating subset removes the edge and
/// is recorded. In stable mode the adjacency sets are frozen at the start of
/// each depth, which makes the removals independent of variable order and
/// lets the edges of one depth be tested on `workers` threads.
pub fn adjacency_search_with<T: IndependenceTest + ?Sized>(
    test: &T,
    stable: bool,
    workers: usize,
    deadline: &Deadline,
) -> Result<(MixedGraph, SepsetMap)> {
    let mut g = complete_graph(test.variables())?;
    let mut sepsets = SepsetMap::default();
    let v = g.num_nodes();
    let pool = if stable && workers > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| Error::InvalidArgument(e.to_string()))?,
        )
    } else {
        None
    };

    let mut depth = 0;
    loop {
        if (0..v).all(|x| g.degree(x) < depth + 1) {
            break;
        }
        if stable {
            let frozen: Vec<Vec<usize>> = (0..v).map(|x| g.neighbors(x).iter().copied().collect()).collect();
            let edges: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.a, e.b)).collect();
            let decide = |&(x, y): &(usize, usize)| -> Result<Option<Vec<usize>>> {
                for (a, b) in [(x, y), (y, x)] {
                    let cand: Vec<usize> = frozen[a].iter().copied().filter(|&c| c != b).collect();
                    if cand.len() < depth {
                        continue;
                    }
                    if let Some(s) = find_sepset(test, x, y, &cand, depth, deadline)? {
                        return Ok(Some(s));
                    }
                }
                Ok(None)
            };
            let found: Vec<Option<Vec<usize>>> = match &pool {
                Some(pool) => pool.install(|| edges.par_iter().map(decide).collect::<Result<Vec<_>>>())?,
                None => edges.iter().map(decide).collect::<Result<Vec<_>>>()?,
            };
            for ((x, y), s) in edges.into_iter().zip(found) {
                if let Some(s) = s {
                    g.remove_edge(x, y);
                    sepsets.insert(x, y, s);
                }
            }
        } else {
            for x in 0..v {
                let adj_x: Vec<usize> = g.neighbors(x).iter().copied().collect();
                for y in adj_x {
                    if !g.is_adjacent(x, y) {
                        continue;
                    }
                    let cand: Vec<usize> = g.neighbors(x).iter().copied().filter(|&c| c != y).collect();
                    if cand.len() < depth {
                        continue;
                    }
                    if let Some(s) = find_sepset(test, x, y, &cand, depth, deadline)? {
                        g.remove_edge(x, y);
                        sepsets.insert(x, y, s);
                    }
                }
            }
        }
        depth += 1;
    }
    Ok((g, sepsets))
}

/// Unshielded triples in the order colliders are applied: by name rank of
/// the middle node, then of the outer nodes.
fn triples_in_name_order(g: &MixedGraph) -> Vec<Triple> {
    let rank = g.name_ranks();
    let mut triples: Vec<Triple> = unshielded_triples(g)
        .into_iter()
        .map(|t| if rank[t.x] < rank[t.z] { t } else { Triple { x: t.z, y: t.y, z: t.x } })
        .collect();
    triples.sort_by_key(|t| (rank[t.y], rank[t.x], rank[t.z]));
    triples
}

/// Orients `x --> y <-- z` subject to the conflict rule. Returns whether the
/// graph changed.
fn orient_collider(g: &mut MixedGraph, x: usize, y: usize, z: usize, rule: ConflictRule) -> bool {
    match rule {
        ConflictRule::Priority => {
            let blocked = g.endpoint_at(y, x) == Some(Endpoint::Arrow) || g.endpoint_at(y, z) == Some(Endpoint::Arrow);
            if blocked {
                return false;
            }
            g.set_endpoint(x, y, Endpoint::Arrow);
            g.set_endpoint(z, y, Endpoint::Arrow);
        }
        ConflictRule::Overwrite => {
            g.set_edge(x, y, Endpoint::Tail, Endpoint::Arrow).expect("triple nodes exist");
            g.set_edge(z, y, Endpoint::Tail, Endpoint::Arrow).expect("triple nodes exist");
        }
        ConflictRule::Bidirected => {
            g.set_endpoint(x, y, Endpoint::Arrow);
            g.set_endpoint(z, y, Endpoint::Arrow);
        }
    }
    true
}

/// Classic PC collider step: `x --> y <-- z` whenever `y` is not in the
/// separating set recorded for `(x, z)`.
pub fn orient_colliders_sepset(skeleton: &MixedGraph, sepsets: &SepsetMap, conflict: ConflictRule) -> MixedGraph {
    let mut g = skeleton.clone();
    for t in triples_in_name_order(skeleton) {
        let Some(s) = sepsets.get(t.x, t.z) else { continue };
        if !s.contains(&t.y) {
            orient_collider(&mut g, t.x, t.y, t.z, conflict);
        }
    }
    g
}

/// Subsets of `adj(x) \ {z}` and `adj(z) \ {x}` in the skeleton, all sizes,
/// deduplicated, ordered by size then lexicographically by node name.
fn candidate_sets(skeleton: &MixedGraph, t: &Triple, rank: &[usize]) -> Vec<Vec<usize>> {
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    for (a, other) in [(t.x, t.z), (t.z, t.x)] {
        let mut adj: Vec<usize> = skeleton.neighbors(a).iter().copied().filter(|&c| c != other).collect();
        adj.sort_by_key(|&c| rank[c]);
        for s in all_subsets(&adj) {
            seen.insert(s);
        }
    }
    let mut sets: Vec<Vec<usize>> = seen.into_iter().collect();
    sets.sort_by(|a, b| {
        a.len().cmp(&b.len()).then_with(|| a.iter().map(|&i| rank[i]).cmp(b.iter().map(|&i| rank[i])))
    });
    sets
}

/// Conservative collider step: a triple is a collider when `y` is in none of
/// the separating subsets, a noncollider when it is in all of them, and
/// ambiguous otherwise (including when nothing separates). Only colliders
/// are oriented; ambiguous triples are left as noncolliders.
pub fn orient_colliders_cpc<T: IndependenceTest + ?Sized>(
    skeleton: &MixedGraph,
    test: &T,
    conflict: ConflictRule,
) -> Result<(MixedGraph, Vec<MarkedTriple>)> {
    orient_colliders_cpc_with(skeleton, test, conflict, &Deadline::none())
}

pub(crate) fn orient_colliders_cpc_with<T: IndependenceTest + ?Sized>(
    skeleton: &MixedGraph,
    test: &T,
    conflict: ConflictRule,
    deadline: &Deadline,
) -> Result<(MixedGraph, Vec<MarkedTriple>)> {
    let rank = name_ranks(skeleton.names());
    let mut g = skeleton.clone();
    let mut marks = Vec::new();
    for t in triples_in_name_order(skeleton) {
        let (mut with_y, mut without_y) = (0usize, 0usize);
        for s in candidate_sets(skeleton, &t, &rank) {
            deadline.check()?;
            if test.test(t.x, t.z, &s)?.independent {
                if s.contains(&t.y) {
                    with_y += 1;
                } else {
                    without_y += 1;
                }
            }
        }
        let mark = match (with_y, without_y) {
            (0, w) if w > 0 => TripleMark::Collider,
            (a, 0) if a > 0 => TripleMark::Noncollider,
            _ => TripleMark::Ambiguous,
        };
        if mark == TripleMark::Collider {
            orient_collider(&mut g, t.x, t.y, t.z, conflict);
        }
        marks.push(MarkedTriple { triple: t, mark });
    }
    Ok((g, marks))
}

/// Max-p collider step: pick the candidate subset with the largest p-value
/// for `x ⊥ z` (ties to the smaller subset, then name order) and orient a
/// collider iff `y` is not in it.
pub fn orient_colliders_maxp<T: IndependenceTest + ?Sized>(
    skeleton: &MixedGraph,
    test: &T,
    conflict: ConflictRule,
) -> Result<MixedGraph> {
    orient_colliders_maxp_with(skeleton, test, conflict, &Deadline::none())
}

pub(crate) fn orient_colliders_maxp_with<T: IndependenceTest + ?Sized>(
    skeleton: &MixedGraph,
    test: &T,
    conflict: ConflictRule,
    deadline: &Deadline,
) -> Result<MixedGraph> {
    let rank = name_ranks(skeleton.names());
    let mut g = skeleton.clone();
    for t in triples_in_name_order(skeleton) {
        let mut best: Option<(f64, Vec<usize>)> = None;
        // Candidates arrive in tie-break order, so only a strictly larger
        // p-value replaces the incumbent.
        for s in candidate_sets(skeleton, &t, &rank) {
            deadline.check()?;
            let p = test.test(t.x, t.z, &s)?.p_value;
            if best.as_ref().map_or(true, |(bp, _)| p > *bp) {
                best = Some((p, s));
            }
        }
        if let Some((_, s)) = best {
            if !s.contains(&t.y) {
                orient_collider(&mut g, t.x, t.y, t.z, conflict);
            }
        }
    }
    Ok(g)
}

/// Runs one PC variant against an arbitrary independence test.
pub fn pc_search<T: IndependenceTest + ?Sized>(variant: &PcVariant, test: &T, deadline: &Deadline) -> Result<MixedGraph> {
    let (skeleton, sepsets) = adjacency_search_with(test, variant.stable, variant.workers, deadline)?;
    let mut g = match variant.orientation {
        ColliderOrientation::Sepset => orient_colliders_sepset(&skeleton, &sepsets, variant.conflict),
        ColliderOrientation::Conservative => {
            orient_colliders_cpc_with(&skeleton, test, variant.conflict, deadline)?.0
        }
        ColliderOrientation::MaxP => orient_colliders_maxp_with(&skeleton, test, variant.conflict, deadline)?,
    };
    meek_orient(&mut g);
    Ok(g)
}

/// Runs a PC variant on data with the Fisher Z test at the variant's alpha.
pub fn run_pc(variant: &PcVariant, data: &DataSet) -> Result<MixedGraph> {
    run_pc_with_deadline(variant, data, &Deadline::none())
}

pub fn run_pc_with_deadline(variant: &PcVariant, data: &DataSet, deadline: &Deadline) -> Result<MixedGraph> {
    let corr = correlation_matrix(data)?;
    let test = FisherZ::new(&corr, variant.alpha);
    pc_search(variant, &test, deadline)
}

impl fmt::Display for PcVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:alpha={},conflict={}", self.name(), self.alpha, self.conflict.as_str())
    }
}
