//! Correlation matrices, partial correlations and conditional independence
//! tests.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use libm::erfc;

use crate::error::{Error, Result};
use crate::graph::{name_ranks, Dag};
use crate::simulate::DataSet;

/// Pearson correlation matrix together with the sample size it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrMatrix {
    names: Vec<String>,
    n: usize,
    dim: usize,
    r: Vec<f64>,
}

/// Condition number above which the submatrix is inverted through a
/// truncated eigen-decomposition.
const MAX_CONDITION: f64 = 1e12;

impl CorrMatrix {
    /// Builds a correlation matrix from raw values, e.g. population
    /// correlations. The diagonal is forced to 1 and symmetry is checked.
    pub fn from_matrix(names: Vec<String>, n: usize, r: DMatrix<f64>) -> Result<Self> {
        let dim = names.len();
        if r.nrows() != dim || r.ncols() != dim {
            return Err(Error::InvalidArgument("correlation matrix shape does not match names".into()));
        }
        let mut flat = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                if (r[(i, j)] - r[(j, i)]).abs() > 1e-12 {
                    return Err(Error::InvalidArgument(format!("matrix not symmetric at ({i}, {j})")));
                }
                flat[i * dim + j] = if i == j { 1.0 } else { r[(i, j)].clamp(-1.0, 1.0) };
            }
        }
        Ok(CorrMatrix { names, n, dim, r: flat })
    }

    /// Standardises a covariance matrix.
    pub fn from_covariance(names: Vec<String>, n: usize, cov: &DMatrix<f64>) -> Result<Self> {
        let dim = names.len();
        let mut r = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            if cov[(i, i)] <= 0.0 {
                return Err(Error::ConstantColumn(names[i].clone()));
            }
            for j in 0..dim {
                r[(i, j)] = cov[(i, j)] / (cov[(i, i)] * cov[(j, j)]).sqrt();
            }
        }
        Self::from_matrix(names, n, r)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn sample_size(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.r[i * self.dim + j]
    }

    pub(crate) fn submatrix(&self, idx: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(idx.len(), idx.len(), |a, b| self.get(idx[a], idx[b]))
    }
}

/// Pearson correlations of every column pair, computed in two passes.
pub fn correlation_matrix(data: &DataSet) -> Result<CorrMatrix> {
    let n = data.num_rows();
    let v = data.num_columns();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 rows, got {n}")));
    }
    let mut mean = vec![0.0; v];
    for r in 0..n {
        for (m, x) in mean.iter_mut().zip(data.row(r)) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    // Column-major centred copy so the cross products stream.
    let mut centred = vec![0.0; n * v];
    for r in 0..n {
        for (c, x) in data.row(r).iter().enumerate() {
            centred[c * n + r] = x - mean[c];
        }
    }
    let col = |c: usize| &centred[c * n..(c + 1) * n];
    let ss: Vec<f64> = (0..v).map(|c| col(c).iter().map(|x| x * x).sum()).collect();
    for (c, &s) in ss.iter().enumerate() {
        if s <= 0.0 {
            return Err(Error::ConstantColumn(data.names()[c].clone()));
        }
    }
    let mut r = vec![0.0; v * v];
    for i in 0..v {
        r[i * v + i] = 1.0;
        for j in i + 1..v {
            let cross: f64 = col(i).iter().zip(col(j)).map(|(a, b)| a * b).sum();
            let rij = (cross / (ss[i] * ss[j]).sqrt()).clamp(-1.0, 1.0);
            r[i * v + j] = rij;
            r[j * v + i] = rij;
        }
    }
    Ok(CorrMatrix { names: data.names().to_vec(), n, dim: v, r })
}

/// Inverse of a symmetric positive semi-definite matrix. Falls back to a
/// pseudo-inverse when the matrix is singular or badly conditioned.
fn spd_inverse(m: DMatrix<f64>) -> Option<DMatrix<f64>> {
    if let Some(chol) = m.clone().cholesky() {
        let l = chol.l_dirty();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..l.nrows() {
            lo = lo.min(l[(i, i)]);
            hi = hi.max(l[(i, i)]);
        }
        if lo > 0.0 && (hi / lo).powi(2) < MAX_CONDITION {
            return Some(chol.inverse());
        }
    }
    let eig = SymmetricEigen::new(m);
    let max = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    if max == 0.0 {
        return None;
    }
    let cutoff = max / MAX_CONDITION;
    let inv_vals = eig.eigenvalues.map(|l| if l > cutoff { 1.0 / l } else { 0.0 });
    let q = &eig.eigenvectors;
    Some(q * DMatrix::from_diagonal(&inv_vals) * q.transpose())
}

fn check_query(c: &CorrMatrix, x: usize, y: usize, s: &[usize]) -> Result<()> {
    for &i in [x, y].iter().chain(s) {
        if i >= c.dim {
            return Err(Error::UnknownNode(i));
        }
    }
    if x == y || s.contains(&x) || s.contains(&y) {
        return Err(Error::InvalidArgument(format!("bad partial correlation query ({x}, {y} | {s:?})")));
    }
    Ok(())
}

/// Partial correlation of `x` and `y` given `s`: the correlation of their
/// residuals after regressing both on `s`. A collinear `s` is handled with a
/// pseudo-inverse; `x` or `y` fully determined by `s` is an error.
pub fn partial_correlation(c: &CorrMatrix, x: usize, y: usize, s: &[usize]) -> Result<f64> {
    check_query(c, x, y, s)?;
    partial_correlation_unchecked(c, x, y, s)
}

/// Residual variance below which a variable counts as fully explained by
/// the conditioning set.
const MIN_RESIDUAL: f64 = 1e-10;

fn partial_correlation_unchecked(c: &CorrMatrix, x: usize, y: usize, s: &[usize]) -> Result<f64> {
    if s.is_empty() {
        return Ok(c.get(x, y));
    }
    // Residual covariance of (x, y) after regressing on s.
    let inv = spd_inverse(c.submatrix(s)).ok_or(Error::CollinearConditioning { x, y })?;
    let bx = DVector::from_iterator(s.len(), s.iter().map(|&k| c.get(x, k)));
    let by = DVector::from_iterator(s.len(), s.iter().map(|&k| c.get(y, k)));
    let ix = &inv * &bx;
    let iy = &inv * &by;
    let vxx = 1.0 - bx.dot(&ix);
    let vyy = 1.0 - by.dot(&iy);
    let vxy = c.get(x, y) - bx.dot(&iy);
    if vxx <= MIN_RESIDUAL || vyy <= MIN_RESIDUAL {
        return Err(Error::CollinearConditioning { x, y });
    }
    Ok((vxy / (vxx * vyy).sqrt()).clamp(-1.0, 1.0))
}

/// Outcome of a conditional independence test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndResult {
    pub independent: bool,
    pub p_value: f64,
    pub statistic: f64,
}

/// Two-sided normal tail probability `2 (1 - Φ(|z|))`, computed as
/// `erfc(|z| / √2)` so small p-values keep their relative precision.
pub fn normal_two_sided_p(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
}

/// Fisher Z test of `x ⊥ y | s` at level `alpha`.
pub fn fisher_z_test(c: &CorrMatrix, x: usize, y: usize, s: &[usize], alpha: f64) -> Result<IndResult> {
    check_query(c, x, y, s)?;
    fisher_z_unchecked(c, x, y, s, alpha)
}

fn fisher_z_unchecked(c: &CorrMatrix, x: usize, y: usize, s: &[usize], alpha: f64) -> Result<IndResult> {
    let n = c.n;
    if n < s.len() + 4 {
        return Err(Error::InsufficientSamples { n, cond: s.len() });
    }
    let r = partial_correlation_unchecked(c, x, y, s)?;
    if r.abs() >= 1.0 {
        return Ok(IndResult { independent: false, p_value: 0.0, statistic: f64::INFINITY.copysign(r) });
    }
    let z = ((n - s.len() - 3) as f64).sqrt() * r.atanh();
    let p = normal_two_sided_p(z);
    Ok(IndResult { independent: p > alpha, p_value: p, statistic: z })
}

/// Anything that can answer conditional independence queries over a fixed
/// set of variables.
pub trait IndependenceTest: Sync {
    fn variables(&self) -> &[String];

    fn test(&self, x: usize, y: usize, cond: &[usize]) -> Result<IndResult>;

    fn num_vars(&self) -> usize {
        self.variables().len()
    }
}

/// Fisher Z test bound to a correlation matrix and a significance level.
///
/// Each query is evaluated with `{x, y}` and the conditioning set arranged
/// by variable name, so the answer is bit-for-bit the same however the
/// columns of the data were ordered.
#[derive(Debug, Clone)]
pub struct FisherZ<'a> {
    corr: &'a CorrMatrix,
    alpha: f64,
    rank: Vec<usize>,
}

impl<'a> FisherZ<'a> {
    pub fn new(corr: &'a CorrMatrix, alpha: f64) -> Self {
        FisherZ { corr, alpha, rank: name_ranks(&corr.names) }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn corr(&self) -> &CorrMatrix {
        self.corr
    }
}

impl IndependenceTest for FisherZ<'_> {
    fn variables(&self) -> &[String] {
        &self.corr.names
    }

    fn test(&self, x: usize, y: usize, cond: &[usize]) -> Result<IndResult> {
        check_query(self.corr, x, y, cond)?;
        let (x, y) = if self.rank[x] < self.rank[y] { (x, y) } else { (y, x) };
        let mut s = cond.to_vec();
        s.sort_by_key(|&i| self.rank[i]);
        fisher_z_unchecked(self.corr, x, y, &s, self.alpha)
    }
}

/// Independence oracle answering from d-separation in a known DAG.
/// Reports p = 1 for separation and p = 0 for connection.
#[derive(Debug, Clone)]
pub struct DsepOracle<'a> {
    dag: &'a Dag,
}

impl<'a> DsepOracle<'a> {
    pub fn new(dag: &'a Dag) -> Self {
        DsepOracle { dag }
    }
}

impl IndependenceTest for DsepOracle<'_> {
    fn variables(&self) -> &[String] {
        self.dag.names()
    }

    fn test(&self, x: usize, y: usize, cond: &[usize]) -> Result<IndResult> {
        let independent = crate::graph::d_separated(self.dag, x, y, cond)?;
        Ok(IndResult {
            independent,
            p_value: if independent { 1.0 } else { 0.0 },
            statistic: if independent { 0.0 } else { f64::INFINITY },
        })
    }
}
