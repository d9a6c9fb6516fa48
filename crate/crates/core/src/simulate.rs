//! Random forward-edge DAGs and recursive linear-Gaussian data.
//!
//! Randomness comes from ChaCha8 streams. Every dataset in a corpus gets
//! its own stream, seeded by mixing the master seed with the cell
//! coordinates (see [`cell_seed`]), so cells can be generated in any order or
//! in parallel. Gaussian draws use the ziggurat sampler from `rand_distr`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::graph::{Dag, MixedGraph};

pub type SimRng = ChaCha8Rng;

/// One dataset slot of the simulation grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimCell {
    pub vars: usize,
    pub avg_degree: usize,
    pub n: usize,
    pub run: usize,
}

impl SimCell {
    /// The 27 `(vars, avg_degree, n)` combinations times `runs`.
    pub fn full_grid(runs: usize) -> Vec<SimCell> {
        let mut cells = Vec::with_capacity(27 * runs);
        for vars in [50, 100, 500] {
            for avg_degree in [2, 4, 6] {
                for n in [100, 500, 1000] {
                    for run in 0..runs {
                        cells.push(SimCell { vars, avg_degree, n, run });
                    }
                }
            }
        }
        cells
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed for one cell: the master seed folded with each coordinate through
/// SplitMix64.
pub fn cell_seed(master: u64, cell: &SimCell) -> u64 {
    [cell.vars, cell.avg_degree, cell.n, cell.run]
        .iter()
        .fold(splitmix64(master), |h, &c| splitmix64(h ^ c as u64))
}

pub fn cell_rng(master: u64, cell: &SimCell) -> SimRng {
    SimRng::seed_from_u64(cell_seed(master, cell))
}

/// Random DAG with exactly `vars * avg_degree / 2` edges (rounded down).
///
/// Nodes are in index order; each edge is a distinct pair `i < j` drawn
/// uniformly without replacement and directed `i --> j`.
pub fn random_dag<R: Rng + ?Sized>(vars: usize, avg_degree: usize, rng: &mut R) -> Result<Dag> {
    if vars < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 variables, got {vars}")));
    }
    let max_pairs = vars * (vars - 1) / 2;
    let edges = vars * avg_degree / 2;
    if edges > max_pairs {
        return Err(Error::InvalidArgument(format!(
            "{edges} edges requested but only {max_pairs} node pairs exist"
        )));
    }
    let mut picked = index::sample(rng, max_pairs, edges).into_vec();
    picked.sort_unstable();

    let mut g = MixedGraph::with_nodes(vars);
    // Pair k enumerates (0,1), (0,2), .., (0,v-1), (1,2), ..
    let mut next = picked.into_iter().peekable();
    let mut k = 0;
    'outer: for i in 0..vars {
        for j in i + 1..vars {
            match next.peek() {
                None => break 'outer,
                Some(&p) if p == k => {
                    g.add_directed(i, j)?;
                    next.next();
                }
                _ => {}
            }
            k += 1;
        }
    }
    Dag::new(g)
}

/// Ranges the SEM parameters are drawn from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamRanges {
    pub coef_low: f64,
    pub coef_high: f64,
    pub var_low: f64,
    pub var_high: f64,
    /// Flip each coefficient's sign with probability 1/2.
    pub random_signs: bool,
}

impl Default for ParamRanges {
    fn default() -> Self {
        ParamRanges { coef_low: 0.2, coef_high: 0.9, var_low: 1.0, var_high: 3.0, random_signs: false }
    }
}

/// A linear SEM: `X_j = sum_p coef(p -> j) X_p + e_j`, `e_j ~ N(0, err_var[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct SemModel {
    pub dag: Dag,
    pub coef: BTreeMap<(usize, usize), f64>,
    pub err_var: Vec<f64>,
}

impl SemModel {
    /// Coefficient matrix `B` with `B[p][j] = coef(p -> j)`.
    pub fn coefficient_matrix(&self) -> DMatrix<f64> {
        let v = self.dag.num_nodes();
        let mut b = DMatrix::zeros(v, v);
        for (&(p, j), &c) in &self.coef {
            b[(p, j)] = c;
        }
        b
    }

    /// Population covariance `(I - B)^-T diag(err_var) (I - B)^-1`.
    pub fn implied_covariance(&self) -> DMatrix<f64> {
        let v = self.dag.num_nodes();
        let b = self.coefficient_matrix();
        let inv = (DMatrix::identity(v, v) - b)
            .try_inverse()
            .expect("I - B is unit triangular up to permutation");
        let omega = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.err_var.clone()));
        inv.transpose() * omega * inv
    }
}

pub fn draw_params<R: Rng + ?Sized>(dag: &Dag, rng: &mut R) -> SemModel {
    draw_params_with(dag, &ParamRanges::default(), rng)
}

pub fn draw_params_with<R: Rng + ?Sized>(dag: &Dag, ranges: &ParamRanges, rng: &mut R) -> SemModel {
    let mut coef = BTreeMap::new();
    for (p, j) in dag.directed_edges() {
        let mut c = rng.random_range(ranges.coef_low..ranges.coef_high);
        if ranges.random_signs && rng.random_bool(0.5) {
            c = -c;
        }
        coef.insert((p, j), c);
    }
    let err_var = (0..dag.num_nodes()).map(|_| rng.random_range(ranges.var_low..ranges.var_high)).collect();
    SemModel { dag: dag.clone(), coef, err_var }
}

/// Samples by variable names with rows stored contiguously.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSet {
    names: Vec<String>,
    rows: usize,
    values: Vec<f64>,
}

impl DataSet {
    pub fn new(names: Vec<String>, rows: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * names.len() {
            return Err(Error::InvalidArgument(format!(
                "{} values do not fill {rows} rows of {} columns",
                values.len(),
                names.len()
            )));
        }
        if let Some(i) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite value at flat index {i}")));
        }
        Ok(DataSet { names, rows, values })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn num_rows(&self) -> usize {
        self.rows
    }

    pub fn num_columns(&self) -> usize {
        self.names.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let v = self.names.len();
        &self.values[i * v..(i + 1) * v]
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.names.len() + col]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, col)).collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Draws `n` i.i.d. rows, each generated in topological order.
pub fn simulate_recursive<R: Rng + ?Sized>(model: &SemModel, n: usize, rng: &mut R) -> Result<DataSet> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be at least 1".into()));
    }
    let v = model.dag.num_nodes();
    let order = model.dag.topological_order();
    let parents: Vec<Vec<(usize, f64)>> = (0..v)
        .map(|j| model.dag.parents(j).into_iter().map(|p| (p, model.coef[&(p, j)])).collect())
        .collect();
    let sd: Vec<f64> = model.err_var.iter().map(|s| s.sqrt()).collect();

    let mut values = vec![0.0; n * v];
    for row in values.chunks_exact_mut(v) {
        for &j in &order {
            let mut x: f64 = rng.sample::<f64, _>(StandardNormal) * sd[j];
            for &(p, c) in &parents[j] {
                x += c * row[p];
            }
            row[j] = x;
        }
    }
    DataSet::new(model.dag.names().to_vec(), n, values)
}

/// Applies one uniformly random permutation to names and columns.
///
/// Returns the shuffled data and `perm`, where new column `i` is old column
/// `perm[i]`.
pub fn shuffle_columns<R: Rng + ?Sized>(data: &DataSet, rng: &mut R) -> (DataSet, Vec<usize>) {
    let v = data.num_columns();
    let mut perm: Vec<usize> = (0..v).collect();
    perm.shuffle(rng);
    (permute_columns(data, &perm), perm)
}

/// New column `i` is old column `perm[i]`.
pub fn permute_columns(data: &DataSet, perm: &[usize]) -> DataSet {
    let v = data.num_columns();
    let names = perm.iter().map(|&p| data.names[p].clone()).collect();
    let mut values = Vec::with_capacity(data.values.len());
    for r in 0..data.rows {
        let row = data.row(r);
        values.extend(perm.iter().map(|&p| row[p]));
    }
    debug_assert_eq!(values.len(), data.rows * v);
    DataSet { names, rows: data.rows, values }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(seed: u64) -> SimRng {
        SimRng::seed_from_u64(seed)
    }

    #[test]
    fn edge_count_follows_average_degree() {
        let d = random_dag(50, 2, &mut rng(1)).unwrap();
        assert_eq!(d.num_edges(), 50);
        let d = random_dag(10, 0, &mut rng(1)).unwrap();
        assert_eq!(d.num_edges(), 0);
    }

    #[test]
    fn degree_histogram_averages_exactly() {
        for seed in 0..5 {
            let d = random_dag(100, 4, &mut rng(seed)).unwrap();
            let total: usize = (0..100).map(|v| d.degree(v)).sum();
            assert_eq!(total as f64 / 100.0, 4.0);
            for (p, c) in d.directed_edges() {
                assert!(p < c);
            }
        }
    }

    #[test]
    fn too_many_edges_is_an_error() {
        assert!(random_dag(4, 4, &mut rng(0)).is_err());
        assert!(random_dag(1, 0, &mut rng(0)).is_err());
        assert_eq!(random_dag(4, 3, &mut rng(0)).unwrap().num_edges(), 6);
    }

    #[test]
    fn params_stay_in_range() {
        let d = random_dag(30, 4, &mut rng(3)).unwrap();
        let m = draw_params(&d, &mut rng(4));
        assert_eq!(m.coef.len(), d.num_edges());
        assert!(m.coef.values().all(|&c| (0.2..0.9).contains(&c)));
        assert!(m.err_var.iter().all(|&s| (1.0..3.0).contains(&s)));

        let empty = Dag::from_edges(5, &[]).unwrap();
        let m = draw_params(&empty, &mut rng(5));
        assert!(m.coef.is_empty());
        assert_eq!(m.err_var.len(), 5);
    }

    #[test]
    fn random_signs_flip_some_coefficients() {
        let d = random_dag(40, 4, &mut rng(3)).unwrap();
        let ranges = ParamRanges { random_signs: true, ..Default::default() };
        let m = draw_params_with(&d, &ranges, &mut rng(9));
        assert!(m.coef.values().any(|&c| c < 0.0));
        assert!(m.coef.values().all(|&c| (0.2..0.9).contains(&c.abs())));
    }

    #[test]
    fn cell_seeds_differ_and_repeat() {
        let a = SimCell { vars: 50, avg_degree: 2, n: 100, run: 0 };
        let b = SimCell { run: 1, ..a };
        assert_ne!(cell_seed(7, &a), cell_seed(7, &b));
        assert_ne!(cell_seed(7, &a), cell_seed(8, &a));
        assert_eq!(cell_seed(7, &a), cell_seed(7, &a));
        assert_eq!(SimCell::full_grid(10).len(), 270);
    }

    #[test]
    fn dataset_rejects_bad_shapes() {
        assert!(DataSet::new(vec!["a".into()], 2, vec![1.0]).is_err());
        assert!(DataSet::new(vec!["a".into()], 1, vec![f64::NAN]).is_err());
    }

    #[test]
    fn single_column_shuffle_is_identity() {
        let d = DataSet::new(vec!["a".into()], 3, vec![1.0, 2.0, 3.0]).unwrap();
        let (s, perm) = shuffle_columns(&d, &mut rng(0));
        assert_eq!(s, d);
        assert_eq!(perm, vec![0]);
    }

    #[test]
    fn shuffle_then_unshuffle_restores() {
        let dag = random_dag(8, 2, &mut rng(2)).unwrap();
        let m = draw_params(&dag, &mut rng(2));
        let data = simulate_recursive(&m, 20, &mut rng(2)).unwrap();
        let (s, perm) = shuffle_columns(&data, &mut rng(11));
        let mut inverse = vec![0; perm.len()];
        for (i, &p) in perm.iter().enumerate() {
            inverse[p] = i;
        }
        assert_eq!(permute_columns(&s, &inverse), data);
    }
}
