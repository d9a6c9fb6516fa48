use causal_bench::metrics::{confusion, matthews, precision_recall, ConfusionCounts, Stats, Which};
use causal_bench::simulate::random_dag;
use causal_bench::{Endpoint, MixedGraph};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_estimate(rng: &mut ChaCha8Rng, names: &[String]) -> MixedGraph {
    let mut order = names.to_vec();
    order.shuffle(rng);
    let mut g = MixedGraph::new(order).unwrap();
    let v = names.len();
    for a in 0..v {
        for b in a + 1..v {
            if rng.random_bool(0.35) {
                let marks = [Endpoint::Tail, Endpoint::Arrow];
                g.set_edge(a, b, marks[rng.random_range(0..2)], marks[rng.random_range(0..2)]).unwrap();
            }
        }
    }
    g
}

#[test]
fn six_node_pairs_match_pair_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(584);
    for _ in 0..300 {
        let truth = random_dag(6, rng.random_range(0..=4), &mut rng).unwrap();
        let est = random_estimate(&mut rng, truth.names());
        let idx = |name: &str| est.node_index(name).unwrap();
        let mut want = ConfusionCounts::default();
        for a in 0..6 {
            for b in 0..6 {
                if a == b {
                    continue;
                }
                let (ea, eb) = (idx(truth.name(a)), idx(truth.name(b)));
                if a < b {
                    match (truth.is_adjacent(a, b), est.is_adjacent(ea, eb)) {
                        (true, true) => want.atp += 1,
                        (false, true) => want.afp += 1,
                        (true, false) => want.afn += 1,
                        (false, false) => want.atn += 1,
                    }
                }
                let est_arrow = est.endpoint_at(ea, eb) == Some(Endpoint::Arrow);
                match (truth.is_directed(a, b), est_arrow) {
                    (true, true) => want.ahtp += 1,
                    (false, true) => want.ahfp += 1,
                    (true, false) => want.ahfn += 1,
                    (false, false) => want.ahtn += 1,
                }
            }
        }
        let got = confusion(&truth, &est).unwrap();
        assert_eq!(got, want);

        let (ap, ar, ahp, ahr) = precision_recall(&got);
        let div = |a: u64, b: u64| if b == 0 { None } else { Some(a as f64 / b as f64) };
        assert_eq!(ap, div(want.atp, want.atp + want.afp));
        assert_eq!(ar, div(want.atp, want.atp + want.afn));
        assert_eq!(ahp, div(want.ahtp, want.ahtp + want.ahfp));
        assert_eq!(ahr, div(want.ahtp, want.ahtp + want.ahfn));
    }
}

#[test]
fn mcc_matches_the_formula_on_random_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(614);
    for _ in 0..10_000 {
        let c = ConfusionCounts {
            atp: rng.random_range(0..50),
            afp: rng.random_range(0..50),
            afn: rng.random_range(0..50),
            atn: rng.random_range(0..2000),
            ..Default::default()
        };
        let (tp, fp, fneg, tn) = (c.atp as f64, c.afp as f64, c.afn as f64, c.atn as f64);
        let den = (tp + fp) * (tp + fneg) * (tn + fp) * (tn + fneg);
        let want = if den == 0.0 { 0.0 } else { (tp * tn - fp * fneg) / den.sqrt() };
        let got = matthews(&c, Which::Adjacency);
        assert!((got - want).abs() < 1e-12);
        assert!((-1.0..=1.0).contains(&got));
    }
}

#[test]
fn estimate_without_arrowheads_has_undefined_precision() {
    let truth = random_dag(6, 2, &mut ChaCha8Rng::seed_from_u64(603)).unwrap();
    let stats = Stats::from_counts(&confusion(&truth, &truth.skeleton()).unwrap(), 1.0);
    assert_eq!(stats.ahp, None);
    assert_eq!(stats.ahr, Some(0.0));
    assert_eq!(stats.ap, Some(1.0));
}
