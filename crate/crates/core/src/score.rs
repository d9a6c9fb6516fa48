//! Decomposable scores consumed by the greedy equivalence search.
//!
//! Every score answers one question: how much does the score of `y` change
//! when `x` joins its parent set `cond`? For SEM-BIC that is a difference
//! of local scores. The Fisher Z kind answers with `alpha - p` for the test
//! of `x ⊥ y | cond`, and the d-separation oracle answers +1 / -1. The last
//! two are not proper scores; they only ever feed insert/delete decisions.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::graph::{d_separated, name_ranks, Dag};
use crate::indtest::{fisher_z_test, CorrMatrix};

/// Which score a search runs with.
#[derive(Debug, Clone, PartialEq)]
pub enum ScoreKind {
    SemBic { penalty: f64 },
    FisherZ { alpha: f64 },
    DsepOracle(Dag),
}

impl ScoreKind {
    /// Binds the score to its data. `corr` is ignored by the oracle.
    pub fn bind<'a>(&'a self, corr: &'a CorrMatrix) -> Result<Box<dyn Score + 'a>> {
        Ok(match self {
            ScoreKind::SemBic { penalty } => Box::new(SemBic::new(corr, *penalty)?),
            ScoreKind::FisherZ { alpha } => Box::new(FisherZScore::new(corr, *alpha)?),
            ScoreKind::DsepOracle(dag) => Box::new(DsepScore::new(dag)),
        })
    }
}

pub trait Score: Sync {
    fn variables(&self) -> &[String];

    /// Change in the score of `y` when `x` is added to the parent set `cond`.
    /// Positive means the edge is favoured.
    fn edge_delta(&self, x: usize, y: usize, cond: &[usize]) -> Result<f64>;

    fn num_vars(&self) -> usize {
        self.variables().len()
    }
}

/// Gaussian BIC with a penalty discount:
/// `local(y | P) = -n ln σ²(y | P) - c |P| ln n`.
///
/// σ² is the residual variance of the standardised `y` regressed on `P`,
/// obtained from the correlation matrix by a Schur complement.
#[derive(Debug, Clone)]
pub struct SemBic<'a> {
    corr: &'a CorrMatrix,
    penalty: f64,
    rank: Vec<usize>,
}

impl<'a> SemBic<'a> {
    pub fn new(corr: &'a CorrMatrix, penalty: f64) -> Result<Self> {
        if !(penalty > 0.0) {
            return Err(Error::InvalidArgument(format!("penalty discount must be positive, got {penalty}")));
        }
        Ok(SemBic { corr, penalty, rank: name_ranks(corr.names()) })
    }

    pub fn penalty(&self) -> f64 {
        self.penalty
    }

    /// Residual variance of standardised `node` given `parents`.
    pub fn residual_variance(&self, node: usize, parents: &[usize]) -> Result<f64> {
        if parents.is_empty() {
            return Ok(1.0);
        }
        let mut p = parents.to_vec();
        p.sort_by_key(|&i| self.rank[i]);
        let sub = self.corr.submatrix(&p);
        let chol = sub.cholesky().ok_or(Error::CollinearParents(node))?;
        let r = DVector::from_iterator(p.len(), p.iter().map(|&q| self.corr.get(q, node)));
        let z = chol.l_dirty().solve_lower_triangular(&r).ok_or(Error::CollinearParents(node))?;
        let var = 1.0 - z.norm_squared();
        if var <= 0.0 {
            return Err(Error::CollinearParents(node));
        }
        Ok(var)
    }

    pub fn local_score(&self, node: usize, parents: &[usize]) -> Result<f64> {
        let n = self.corr.sample_size() as f64;
        let var = self.residual_variance(node, parents)?;
        Ok(-n * var.ln() - self.penalty * parents.len() as f64 * n.ln())
    }

    /// Sum of local scores over the DAG's nodes.
    pub fn dag_score(&self, dag: &Dag) -> Result<f64> {
        (0..dag.num_nodes()).map(|v| self.local_score(v, &dag.parents(v))).sum()
    }
}

impl Score for SemBic<'_> {
    fn variables(&self) -> &[String] {
        self.corr.names()
    }

    fn edge_delta(&self, x: usize, y: usize, cond: &[usize]) -> Result<f64> {
        let n = self.corr.sample_size() as f64;
        let before = self.residual_variance(y, cond)?;
        let mut with = cond.to_vec();
        with.push(x);
        let after = self.residual_variance(y, &with)?;
        Ok(-n * (after / before).ln() - self.penalty * n.ln())
    }
}

/// Local BIC score of `node` given `parents`.
pub fn sem_bic_local(c: &CorrMatrix, node: usize, parents: &[usize], penalty: f64) -> Result<f64> {
    if parents.contains(&node) {
        return Err(Error::InvalidArgument(format!("node {node} listed among its own parents")));
    }
    SemBic::new(c, penalty)?.local_score(node, parents)
}

/// `alpha - p` for the Fisher Z test of `x ⊥ y | cond`.
pub fn fisher_z_local_delta(c: &CorrMatrix, x: usize, y: usize, cond: &[usize], alpha: f64) -> Result<f64> {
    Ok(alpha - fisher_z_test(c, x, y, cond, alpha)?.p_value)
}

/// +1 when `x` and `y` are d-connected given `cond`, -1 when d-separated.
pub fn dsep_oracle_delta(dag: &Dag, x: usize, y: usize, cond: &[usize]) -> Result<f64> {
    Ok(if d_separated(dag, x, y, cond)? { -1.0 } else { 1.0 })
}

#[derive(Debug, Clone)]
pub struct FisherZScore<'a> {
    corr: &'a CorrMatrix,
    alpha: f64,
    rank: Vec<usize>,
}

impl<'a> FisherZScore<'a> {
    pub fn new(corr: &'a CorrMatrix, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        Ok(FisherZScore { corr, alpha, rank: name_ranks(corr.names()) })
    }
}

impl Score for FisherZScore<'_> {
    fn variables(&self) -> &[String] {
        self.corr.names()
    }

    fn edge_delta(&self, x: usize, y: usize, cond: &[usize]) -> Result<f64> {
        let (x, y) = if self.rank[x] < self.rank[y] { (x, y) } else { (y, x) };
        let mut s = cond.to_vec();
        s.sort_by_key(|&i| self.rank[i]);
        fisher_z_local_delta(self.corr, x, y, &s, self.alpha)
    }
}

#[derive(Debug, Clone)]
pub struct DsepScore<'a> {
    dag: &'a Dag,
}

impl<'a> DsepScore<'a> {
    pub fn new(dag: &'a Dag) -> Self {
        DsepScore { dag }
    }
}

impl Score for DsepScore<'_> {
    fn variables(&self) -> &[String] {
        self.dag.names()
    }

    fn edge_delta(&self, x: usize, y: usize, cond: &[usize]) -> Result<f64> {
        dsep_oracle_delta(self.dag, x, y, cond)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indtest::correlation_matrix;
    use crate::simulate::{draw_params, random_dag, simulate_recursive, SimRng};
    use nalgebra::DMatrix;
    use rand::SeedableRng;

    fn names(v: usize) -> Vec<String> {
        (1..=v).map(|i| format!("X{i}")).collect()
    }

    #[test]
    fn empty_parents_score_zero() {
        let c = CorrMatrix::from_matrix(names(2), 500, DMatrix::identity(2, 2)).unwrap();
        assert_eq!(sem_bic_local(&c, 0, &[], 2.0).unwrap(), 0.0);
    }

    #[test]
    fn uncorrelated_parent_costs_exactly_the_penalty() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 0.4, 0.0, 0.4, 1.0, 0.0, 0.0, 0.0, 1.0]);
        let c = CorrMatrix::from_matrix(names(3), 500, m).unwrap();
        let s = SemBic::new(&c, 2.0).unwrap();
        let delta = s.local_score(0, &[1, 2]).unwrap() - s.local_score(0, &[1]).unwrap();
        assert!((delta + 2.0 * (500f64).ln()).abs() < 1e-9);
    }

    #[test]
    fn single_parent_delta_matches_ols() {
        let mut rng = SimRng::seed_from_u64(5);
        let dag = Dag::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let model = draw_params(&dag, &mut rng);
        let data = simulate_recursive(&model, 2000, &mut rng).unwrap();
        let c = correlation_matrix(&data).unwrap();
        let n = 2000.0f64;

        // OLS oracle: regress X1 on X0 directly and compare residual variances.
        let (x0, x1) = (data.column(0), data.column(1));
        let m0 = x0.iter().sum::<f64>() / n;
        let m1 = x1.iter().sum::<f64>() / n;
        let sxy: f64 = x0.iter().zip(&x1).map(|(a, b)| (a - m0) * (b - m1)).sum();
        let sxx: f64 = x0.iter().map(|a| (a - m0).powi(2)).sum();
        let syy: f64 = x1.iter().map(|b| (b - m1).powi(2)).sum();
        let beta = sxy / sxx;
        let rss: f64 = x0.iter().zip(&x1).map(|(a, b)| ((b - m1) - beta * (a - m0)).powi(2)).sum();
        let expected = -n * (rss / syy).ln() - 2.0 * n.ln();

        let s = SemBic::new(&c, 2.0).unwrap();
        let got = s.local_score(1, &[0]).unwrap() - s.local_score(1, &[]).unwrap();
        assert!((got - expected).abs() < 1e-8, "{got} vs {expected}");
        let r01 = c.get(0, 1);
        assert!((got - (-n * (1.0 - r01 * r01).ln() - 2.0 * n.ln())).abs() < 1e-8);
        assert!((s.edge_delta(0, 1, &[]).unwrap() - got).abs() < 1e-9);
    }

    #[test]
    fn parent_order_does_not_matter() {
        let mut rng = SimRng::seed_from_u64(8);
        let dag = random_dag(6, 4, &mut rng).unwrap();
        let data = simulate_recursive(&draw_params(&dag, &mut rng), 300, &mut rng).unwrap();
        let c = correlation_matrix(&data).unwrap();
        let s = SemBic::new(&c, 1.0).unwrap();
        let a = s.local_score(5, &[0, 2, 3]).unwrap();
        let b = s.local_score(5, &[3, 0, 2]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn collinear_parents_error() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 0.5, 0.5, 0.5, 1.0, 1.0, 0.5, 1.0, 1.0]);
        let c = CorrMatrix::from_matrix(names(3), 100, m).unwrap();
        assert!(matches!(sem_bic_local(&c, 0, &[1, 2], 2.0), Err(Error::CollinearParents(0))));
        assert!(sem_bic_local(&c, 0, &[0], 2.0).is_err());
    }

    #[test]
    fn fisher_delta_signs() {
        let c = CorrMatrix::from_matrix(names(2), 100, DMatrix::identity(2, 2)).unwrap();
        assert!((fisher_z_local_delta(&c, 0, 1, &[], 0.01).unwrap() - (0.01 - 1.0)).abs() < 1e-15);
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]);
        let c = CorrMatrix::from_matrix(names(2), 100, m).unwrap();
        let p = fisher_z_test(&c, 0, 1, &[], 0.01).unwrap().p_value;
        assert_eq!(fisher_z_local_delta(&c, 0, 1, &[], p).unwrap(), 0.0);
    }

    #[test]
    fn oracle_delta_examples() {
        let dag = Dag::from_edges(3, &[(0, 1), (2, 1)]).unwrap();
        assert_eq!(dsep_oracle_delta(&dag, 0, 2, &[]).unwrap(), -1.0);
        assert_eq!(dsep_oracle_delta(&dag, 0, 2, &[1]).unwrap(), 1.0);
        for cond in [&[][..], &[2][..]] {
            assert_eq!(dsep_oracle_delta(&dag, 0, 1, cond).unwrap(), 1.0);
        }
    }
}
