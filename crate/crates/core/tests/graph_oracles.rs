use std::collections::BTreeSet;

use causal_bench::graph::{cpdag_of, d_separated, meek_closure, topological_order, unshielded_triples};
use causal_bench::simulate::random_dag;
use causal_bench::util::all_subsets;
use causal_bench::{Dag, MixedGraph};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn descendants(dag: &Dag, v: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![v];
    while let Some(u) = stack.pop() {
        if seen.insert(u) {
            stack.extend(dag.children(u));
        }
    }
    seen
}

/// d-separation by listing every simple path and checking each for a
/// blocking node.
fn dsep_by_paths(dag: &Dag, x: usize, y: usize, z: &[usize]) -> bool {
    fn walk(dag: &Dag, path: &mut Vec<usize>, y: usize, z: &[usize], open: &mut bool) {
        let last = *path.last().unwrap();
        if last == y {
            let blocked = (1..path.len() - 1).any(|i| {
                let (a, b, c) = (path[i - 1], path[i], path[i + 1]);
                if dag.is_directed(a, b) && dag.is_directed(c, b) {
                    descendants(dag, b).is_disjoint(&z.iter().copied().collect())
                } else {
                    z.contains(&b)
                }
            });
            *open |= !blocked;
            return;
        }
        for &n in dag.neighbors(last) {
            if !path.contains(&n) {
                path.push(n);
                walk(dag, path, y, z, open);
                path.pop();
            }
        }
    }
    let mut open = false;
    walk(dag, &mut vec![x], y, z, &mut open);
    !open
}

#[test]
fn dsep_matches_path_enumeration_on_random_dags() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for trial in 0..10 {
        let dag = random_dag(8, 2 + trial % 3, &mut rng).unwrap();
        for x in 0..8 {
            for y in x + 1..8 {
                let rest: Vec<usize> = (0..8).filter(|&v| v != x && v != y).collect();
                for z in all_subsets(&rest).filter(|s| s.len() <= 3) {
                    let fast = d_separated(&dag, x, y, &z).unwrap();
                    assert_eq!(fast, dsep_by_paths(&dag, x, y, &z), "trial {trial}: {x} _||_ {y} | {z:?}");
                    assert_eq!(fast, d_separated(&dag, y, x, &z).unwrap());
                }
            }
        }
    }
}

/// Every DAG on `v` labelled nodes.
fn all_dags(v: usize) -> Vec<Dag> {
    let pairs: Vec<(usize, usize)> = (0..v).flat_map(|a| (a + 1..v).map(move |b| (a, b))).collect();
    let mut out = Vec::new();
    for code in 0..3usize.pow(pairs.len() as u32) {
        let mut g = MixedGraph::with_nodes(v);
        let mut c = code;
        for &(a, b) in &pairs {
            match c % 3 {
                1 => g.add_directed(a, b).unwrap(),
                2 => g.add_directed(b, a).unwrap(),
                _ => {}
            }
            c /= 3;
        }
        if let Ok(d) = Dag::new(g) {
            out.push(d);
        }
    }
    out
}

#[test]
fn three_node_patterns_follow_skeleton_and_colliders() {
    let dags = all_dags(3);
    assert_eq!(dags.len(), 25);
    let colliders = |d: &Dag| -> BTreeSet<(usize, usize, usize)> {
        unshielded_triples(d.graph())
            .into_iter()
            .filter(|t| d.is_directed(t.x, t.y) && d.is_directed(t.z, t.y))
            .map(|t| (t.x.min(t.z), t.y, t.x.max(t.z)))
            .collect()
    };
    for a in &dags {
        for b in &dags {
            let same = a.skeleton() == b.skeleton() && colliders(a) == colliders(b);
            assert_eq!(cpdag_of(a) == cpdag_of(b), same);
        }
    }
}

#[test]
fn four_node_patterns_characterise_markov_equivalence() {
    let dags = all_dags(4);
    assert_eq!(dags.len(), 543);
    let signature = |d: &Dag| -> Vec<bool> {
        let mut sig = Vec::new();
        for x in 0..4 {
            for y in x + 1..4 {
                let rest: Vec<usize> = (0..4).filter(|&v| v != x && v != y).collect();
                for z in all_subsets(&rest) {
                    sig.push(d_separated(d, x, y, &z).unwrap());
                }
            }
        }
        sig
    };
    let keyed: Vec<(Vec<bool>, MixedGraph)> = dags.iter().map(|d| (signature(d), cpdag_of(d))).collect();
    let mut classes = BTreeSet::new();
    for (sa, pa) in &keyed {
        classes.insert(sa.clone());
        for (sb, pb) in &keyed {
            assert_eq!(pa == pb, sa == sb);
        }
    }
    // Number of Markov equivalence classes of 4-node DAGs.
    assert_eq!(classes.len(), 185);
}

#[test]
fn random_dags_point_forward_and_stay_acyclic() {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let grid = [(50, 2), (50, 6), (100, 4), (500, 6)];
    for trial in 0..1000 {
        let (v, d) = grid[trial % grid.len()];
        let dag = random_dag(v, d, &mut rng).unwrap();
        assert_eq!(dag.num_edges(), v * d / 2);
        let order = topological_order(dag.graph()).unwrap();
        let mut pos = vec![0; v];
        for (i, &n) in order.iter().enumerate() {
            pos[n] = i;
        }
        assert!(dag.directed_edges().iter().all(|&(a, b)| pos[a] < pos[b]));
    }
}

/// A DAG on `v` nodes with its unshielded colliders directed and every
/// other edge directed or left undirected at random: an input whose
/// consistent extensions add no new colliders, so the rules are sound on it.
fn orientable(seed: u64) -> MixedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = rng.random_range(3..9);
    let mut order: Vec<usize> = (0..v).collect();
    order.shuffle(&mut rng);
    let mut dag = MixedGraph::with_nodes(v);
    for i in 0..v {
        for j in i + 1..v {
            if rng.random_bool(0.4) {
                dag.add_directed(order[i], order[j]).unwrap();
            }
        }
    }
    let dag = Dag::new(dag).unwrap();
    let mut compelled = BTreeSet::new();
    for t in unshielded_triples(dag.graph()) {
        if dag.is_directed(t.x, t.y) && dag.is_directed(t.z, t.y) {
            compelled.insert((t.x, t.y));
            compelled.insert((t.z, t.y));
        }
    }
    let mut g = dag.skeleton();
    for (a, b) in dag.directed_edges() {
        if compelled.contains(&(a, b)) || rng.random_bool(0.3) {
            g.add_directed(a, b).unwrap();
        }
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn meek_closure_is_idempotent_and_keeps_arrows(seed in any::<u64>()) {
        let g = orientable(seed);
        let once = meek_closure(&g);
        prop_assert_eq!(&meek_closure(&once), &once);
        prop_assert_eq!(once.skeleton(), g.skeleton());
        for e in g.edges() {
            if let Some((a, b)) = e.direction() {
                prop_assert!(once.is_directed(a, b));
            }
        }
        let mut directed = once.skeleton().without_edges();
        for e in once.edges() {
            if let Some((a, b)) = e.direction() {
                directed.add_directed(a, b).unwrap();
            }
        }
        prop_assert!(topological_order(&directed).is_ok());
    }

    #[test]
    fn pattern_of_a_dag_is_a_closure_fixpoint(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dag = random_dag(9, 3, &mut rng).unwrap();
        let p = cpdag_of(&dag);
        prop_assert_eq!(&meek_closure(&p), &p);
    }
}
