//! Dense design matrices, support sets and restricted least squares.
//!
//! Matrices are stored column-major and are immutable once built; the
//! Euclidean norm of every column is computed at construction time and
//! zero columns are rejected.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An `n x d` design matrix with cached column norms.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    norms: Vec<f64>,
}

impl DesignMatrix {
    /// Builds a matrix from column-major storage.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidConfig(format!(
                "design matrix must be non-empty, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        let norms: Vec<f64> = data.chunks_exact(rows).map(norm2).collect();
        if let Some(j) = norms.iter().position(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::ZeroColumn(j));
        }
        Ok(Self {
            rows,
            cols,
            data,
            norms,
        })
    }

    pub fn from_row_major(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        let mut col_major = vec![0.0; rows * cols];
        for i in 0..rows {
            for j in 0..cols {
                col_major[j * rows + i] = data[i * cols + j];
            }
        }
        Self::from_col_major(rows, cols, col_major)
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let first = columns.first().ok_or(Error::EmptyList)?;
        let rows = first.len();
        let mut data = Vec::with_capacity(rows * columns.len());
        for c in columns {
            if c.len() != rows {
                return Err(Error::DimensionMismatch {
                    expected: rows,
                    got: c.len(),
                });
            }
            data.extend_from_slice(c);
        }
        Self::from_col_major(rows, columns.len(), data)
    }

    pub fn identity(d: usize) -> Self {
        let mut data = vec![0.0; d * d];
        for j in 0..d {
            data[j * d + j] = 1.0;
        }
        Self::from_col_major(d, d, data).expect("identity has unit columns")
    }

    /// Stacks matrices with equal column counts on top of each other.
    pub fn vstack(blocks: &[&DesignMatrix]) -> Result<Self> {
        let first = blocks.first().ok_or(Error::EmptyList)?;
        let cols = first.cols;
        if let Some(b) = blocks.iter().find(|b| b.cols != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                got: b.cols,
            });
        }
        let rows: usize = blocks.iter().map(|b| b.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for b in blocks {
                data.extend_from_slice(b.col(j));
            }
        }
        Self::from_col_major(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }

    pub fn column_norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn col_major(&self) -> &[f64] {
        &self.data
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.data.len());
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.push(self.get(i, j));
            }
        }
        out
    }

    /// Computes `X z` for a sparse `z`.
    pub fn apply_sparse(&self, z: &SparseVector) -> Result<Vec<f64>> {
        if z.dim() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: z.dim(),
            });
        }
        let mut out = vec![0.0; self.rows];
        for (&j, &v) in z.support().iter().zip(z.values()) {
            axpy(v, self.col(j), &mut out);
        }
        Ok(out)
    }
}

/// One machine's local regression problem.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionShard {
    design: DesignMatrix,
    response: Vec<f64>,
    machine_id: usize,
}

impl RegressionShard {
    pub fn new(design: DesignMatrix, response: Vec<f64>, machine_id: usize) -> Result<Self> {
        if response.len() != design.rows() {
            return Err(Error::DimensionMismatch {
                expected: design.rows(),
                got: response.len(),
            });
        }
        Ok(Self {
            design,
            response,
            machine_id,
        })
    }

    pub fn design(&self) -> &DesignMatrix {
        &self.design
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }

    pub fn machine_id(&self) -> usize {
        self.machine_id
    }

    pub fn dim(&self) -> usize {
        self.design.cols()
    }

    pub fn samples(&self) -> usize {
        self.design.rows()
    }
}

/// Ordered set of distinct column indices; insertion order is preserved.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct SupportSet {
    indices: Vec<usize>,
}

impl SupportSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut set = Self::new();
        for i in indices {
            set.insert(i)?;
        }
        Ok(set)
    }

    /// Appends `index`, failing on duplicates.
    pub fn insert(&mut self, index: usize) -> Result<()> {
        if self.contains(index) {
            return Err(Error::DuplicateIndex(index));
        }
        self.indices.push(index);
        Ok(())
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.contains(&index)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.indices
    }

    pub fn iter(&self) -> std::slice::Iter<'_, usize> {
        self.indices.iter()
    }

    pub fn truncate(&mut self, len: usize) {
        self.indices.truncate(len);
    }

    pub fn sorted(&self) -> Vec<usize> {
        let mut v = self.indices.clone();
        v.sort_unstable();
        v
    }

    /// Set equality, ignoring order.
    pub fn same_elements(&self, other: &SupportSet) -> bool {
        self.len() == other.len() && self.sorted() == other.sorted()
    }

    /// Fails unless every index is below `dim`.
    pub fn check_bounds(&self, dim: usize) -> Result<()> {
        match self.indices.iter().find(|&&i| i >= dim) {
            Some(&index) => Err(Error::IndexOutOfRange { index, dim }),
            None => Ok(()),
        }
    }

    /// Boolean membership mask of length `dim`.
    pub fn mask(&self, dim: usize) -> Vec<bool> {
        let mut mask = vec![false; dim];
        for &i in &self.indices {
            mask[i] = true;
        }
        mask
    }
}

impl TryFrom<Vec<usize>> for SupportSet {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::from_indices(v)
    }
}

impl From<SupportSet> for Vec<usize> {
    fn from(s: SupportSet) -> Self {
        s.indices
    }
}

impl<'a> IntoIterator for &'a SupportSet {
    type Item = &'a usize;
    type IntoIter = std::slice::Iter<'a, usize>;

    fn into_iter(self) -> Self::IntoIter {
        self.indices.iter()
    }
}

/// A vector of dimension `dim` that is zero outside `support`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    dim: usize,
    support: SupportSet,
    values: Vec<f64>,
}

impl SparseVector {
    /// Values must be aligned with `support`; stored values must be nonzero.
    pub fn new(dim: usize, support: SupportSet, values: Vec<f64>) -> Result<Self> {
        let v = Self::new_allow_zeros(dim, support, values)?;
        if let Some(pos) = v.values.iter().position(|&x| x == 0.0) {
            return Err(Error::InvalidConfig(format!(
                "sparse vector entry at index {} is zero",
                v.support.as_slice()[pos]
            )));
        }
        Ok(v)
    }

    /// Like [`SparseVector::new`] but admits exact zeros, as least-squares output may.
    pub fn new_allow_zeros(dim: usize, support: SupportSet, values: Vec<f64>) -> Result<Self> {
        if values.len() != support.len() {
            return Err(Error::DimensionMismatch {
                expected: support.len(),
                got: values.len(),
            });
        }
        support.check_bounds(dim)?;
        Ok(Self {
            dim,
            support,
            values,
        })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            support: SupportSet::new(),
            values: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support(&self) -> &SupportSet {
        &self.support
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, index: usize) -> f64 {
        self.support
            .iter()
            .position(|&i| i == index)
            .map_or(0.0, |p| self.values[p])
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (&i, &v) in self.support.iter().zip(&self.values) {
            out[i] = v;
        }
        out
    }
}

/// Tuning for the restricted least-squares solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LsConfig {
    /// Minimum admissible ratio of smallest to largest Gram eigenvalue.
    pub singular_rel_tol: f64,
}

impl Default for LsConfig {
    fn default() -> Self {
        Self {
            singular_rel_tol: 1e-10,
        }
    }
}

/// Solution of a restricted least-squares problem together with its residual.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedFit {
    pub coefficients: SparseVector,
    pub residual: Vec<f64>,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Returns the matrix with unit-norm columns and the original norms.
pub fn column_normalize(x: &DesignMatrix) -> Result<(DesignMatrix, Vec<f64>)> {
    let norms = x.column_norms().to_vec();
    let mut data = x.col_major().to_vec();
    for (col, &nrm) in data.chunks_exact_mut(x.rows()).zip(&norms) {
        col.iter_mut().for_each(|v| *v /= nrm);
    }
    Ok((DesignMatrix::from_col_major(x.rows(), x.cols(), data)?, norms))
}

/// Largest absolute cosine between two distinct columns.
pub fn coherence(x: &DesignMatrix) -> Result<f64> {
    let d = x.cols();
    if d < 2 {
        return Err(Error::Degenerate(d));
    }
    let norms = x.column_norms();
    let mut mu: f64 = 0.0;
    for i in 0..d {
        let ci = x.col(i);
        for j in (i + 1)..d {
            let c = dot(ci, x.col(j)).abs() / (norms[i] * norms[j]);
            mu = mu.max(c);
        }
    }
    Ok(mu.min(1.0))
}

/// Maximum coherence across a collection of machines.
pub fn max_coherence(designs: &[&DesignMatrix]) -> Result<f64> {
    let first = designs.first().ok_or(Error::EmptyList)?;
    let d = first.cols();
    let mut mu: f64 = 0.0;
    for x in designs {
        if x.cols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: x.cols(),
            });
        }
        mu = mu.max(coherence(x)?);
    }
    Ok(mu)
}

/// Least-squares fit of `y` on the columns in `support`.
pub fn restricted_fit(
    x: &DesignMatrix,
    y: &[f64],
    support: &SupportSet,
    cfg: &LsConfig,
) -> Result<RestrictedFit> {
    let n = x.rows();
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: y.len(),
        });
    }
    support.check_bounds(x.cols())?;
    let k = support.len();
    if k == 0 {
        return Ok(RestrictedFit {
            coefficients: SparseVector::zeros(x.cols()),
            residual: y.to_vec(),
        });
    }
    if k > n {
        return Err(Error::SupportTooLarge { support: k, rows: n });
    }

    let sub = DMatrix::from_fn(n, k, |i, c| x.get(i, support.as_slice()[c]));

    let gram = sub.tr_mul(&sub);
    let eig = gram.symmetric_eigenvalues();
    let lmax = eig.max();
    let lmin = eig.min();
    let ratio = if lmax > 0.0 { lmin / lmax } else { 0.0 };
    if !(ratio > cfg.singular_rel_tol) {
        return Err(Error::SingularGram { ratio });
    }

    let qr = sub.clone().qr();
    let qty = qr.q().tr_mul(&DVector::from_column_slice(y));
    let coef = qr
        .r()
        .solve_upper_triangular(&qty)
        .ok_or(Error::SingularGram { ratio })?;

    let mut residual = y.to_vec();
    for (c, &j) in support.iter().enumerate() {
        axpy(-coef[c], x.col(j), &mut residual);
    }
    Ok(RestrictedFit {
        coefficients: SparseVector::new_allow_zeros(
            x.cols(),
            support.clone(),
            coef.iter().copied().collect(),
        )?,
        residual,
    })
}

/// Minimizer of `||y - X z||` over `z` supported on `support`.
pub fn least_squares_on_support(
    x: &DesignMatrix,
    y: &[f64],
    support: &SupportSet,
) -> Result<SparseVector> {
    restricted_fit(x, y, support, &LsConfig::default()).map(|f| f.coefficients)
}
