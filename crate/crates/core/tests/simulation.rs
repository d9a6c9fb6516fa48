use std::collections::BTreeMap;

use causal_bench::dataio::read_dataset;
use causal_bench::harness::{cell_dir, generate_corpus, CorpusConfig};
use causal_bench::indtest::correlation_matrix;
use causal_bench::simulate::{
    cell_rng, draw_params, random_dag, shuffle_columns, simulate_recursive, ParamRanges, SemModel, SimCell,
};
use causal_bench::Dag;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn coefficients_pass_a_uniform_ks_test() {
    let mut rng = ChaCha8Rng::seed_from_u64(10_000);
    let mut draws = Vec::new();
    while draws.len() < 10_000 {
        let dag = random_dag(50, 4, &mut rng).unwrap();
        draws.extend(draw_params(&dag, &mut rng).coef.into_values());
    }
    draws.truncate(10_000);
    draws.sort_by(f64::total_cmp);
    let n = draws.len() as f64;
    let d = draws
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = (x - 0.2) / 0.7;
            (cdf - i as f64 / n).abs().max(((i + 1) as f64 / n - cdf).abs())
        })
        .fold(0.0, f64::max);
    // Asymptotic 1% critical value of the one-sample KS statistic.
    assert!(d < 1.628 / n.sqrt(), "D = {d}");
}

#[test]
fn single_edge_covariance_is_coefficient_times_parent_variance() {
    let dag = Dag::from_edges(2, &[(0, 1)]).unwrap();
    let b = 0.7;
    let model = SemModel { dag, coef: BTreeMap::from([((0, 1), b)]), err_var: vec![2.0, 1.5] };
    let n = 100_000;
    let data = simulate_recursive(&model, n, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let (x0, x1) = (data.column(0), data.column(1));
    let m0 = x0.iter().sum::<f64>() / n as f64;
    let m1 = x1.iter().sum::<f64>() / n as f64;
    let cov = x0.iter().zip(&x1).map(|(a, c)| (a - m0) * (c - m1)).sum::<f64>() / (n - 1) as f64;
    let (v0, v1) = (2.0, b * b * 2.0 + 1.5);
    let target = b * v0;
    let se = ((v0 * v1 + target * target) / n as f64).sqrt();
    assert!((cov - target).abs() < 3.0 * se, "cov {cov} vs {target} (se {se})");
}

#[test]
fn chain_correlations_multiply_along_the_trek() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let dag = Dag::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
    for _ in 0..20 {
        let s = draw_params(&dag, &mut rng).implied_covariance();
        let r = |i: usize, j: usize| s[(i, j)] / (s[(i, i)] * s[(j, j)]).sqrt();
        assert!((r(0, 2) - r(0, 1) * r(1, 2)).abs() < 1e-12);
    }
}

#[test]
fn shuffling_permutes_column_means() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let dag = random_dag(12, 4, &mut rng).unwrap();
    let data = simulate_recursive(&draw_params(&dag, &mut rng), 200, &mut rng).unwrap();
    let (shuffled, perm) = shuffle_columns(&data, &mut rng);
    let mean = |d: &causal_bench::DataSet, j: usize| d.column(j).iter().sum::<f64>();
    for (i, &p) in perm.iter().enumerate() {
        assert_eq!(shuffled.names()[i], data.names()[p]);
        assert_eq!(mean(&shuffled, i), mean(&data, p));
    }
}

#[test]
fn corpus_files_reproduce_the_correlation_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = CorpusConfig { cells: vec![(20, 4, 500)], runs: 1, master_seed: 5, params: ParamRanges::default() };
    generate_corpus(&cfg, dir.path()).unwrap();
    let cell = SimCell { vars: 20, avg_degree: 4, n: 500, run: 0 };
    let from_file = correlation_matrix(&read_dataset(&cell_dir(dir.path(), &cell).join("data.txt")).unwrap()).unwrap();

    // Regenerate the same cell in memory.
    let mut rng = cell_rng(5, &cell);
    let dag = random_dag(20, 4, &mut rng).unwrap();
    let model = draw_params(&dag, &mut rng);
    let data = simulate_recursive(&model, 500, &mut rng).unwrap();
    let (data, _) = shuffle_columns(&data, &mut rng);
    let in_memory = correlation_matrix(&data).unwrap();
    for i in 0..20 {
        for j in 0..20 {
            assert!((from_file.get(i, j) - in_memory.get(i, j)).abs() < 1e-10);
        }
    }
}

#[test]
fn every_cell_of_the_grid_gets_its_own_stream() {
    let cells = SimCell::full_grid(10);
    assert_eq!(cells.len(), 270);
    let firsts: std::collections::BTreeSet<u64> = cells
        .iter()
        .map(|c| {
            use rand::RngCore;
            cell_rng(0, c).next_u64()
        })
        .collect();
    assert_eq!(firsts.len(), 270);
}
