//! Dense embedding storage and the sparse feature representation.
//!
//! An [`EmbeddingMatrix`] holds one k-dimensional row per symbol id and backs
//! the word/feature matrix W as well as relationship and entity embeddings.
//! A [`SparseVector`] is the binary indicator of the features present in a
//! relation mention; [`sparse_project`] maps it into embedding space by
//! summing the selected rows of W.

use rand::Rng;

use crate::error::{RelexError, Result};

/// Binary feature indicator: the sorted set of feature ids present in a
/// mention. Present features have an implicit value of 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseVector {
    indices: Vec<usize>,
}

impl SparseVector {
    /// Builds a sparse vector from arbitrary indices; duplicates collapse to
    /// a single entry and the result is sorted.
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        SparseVector { indices }
    }

    pub fn empty() -> Self {
        SparseVector {
            indices: Vec::new(),
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }
}

/// Dense row-major matrix of embeddings, one row per symbol id.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    rows: usize,
    dim: usize,
    data: Vec<f64>,
}

impl EmbeddingMatrix {
    pub fn zeros(rows: usize, dim: usize) -> Self {
        EmbeddingMatrix {
            rows,
            dim,
            data: vec![0.0; rows * dim],
        }
    }

    /// Initializes every entry uniformly in [-6/sqrt(k), 6/sqrt(k)] and then
    /// projects each row onto the unit ball.
    pub fn init_uniform(rows: usize, dim: usize, rng: &mut impl Rng) -> Self {
        let bound = 6.0 / (dim as f64).sqrt();
        let mut m = EmbeddingMatrix::zeros(rows, dim);
        for v in m.data.iter_mut() {
            *v = rng.random_range(-bound..=bound);
        }
        for i in 0..rows {
            m.project_row(i);
        }
        m
    }

    /// Builds a matrix from a flat row-major buffer. Rejects size mismatches
    /// and non-finite entries.
    pub fn from_data(rows: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * dim {
            return Err(RelexError::DimensionMismatch {
                expected: rows * dim,
                got: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(RelexError::InvalidArgument(
                "embedding matrix contains non-finite entries".into(),
            ));
        }
        Ok(EmbeddingMatrix { rows, dim, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn row_norm(&self, i: usize) -> f64 {
        self.row(i).iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_row_norm(&self) -> f64 {
        (0..self.rows).fold(0.0, |acc, i| acc.max(self.row_norm(i)))
    }

    /// Rescales row `i` onto the unit ball if its norm exceeds 1.
    pub fn project_row(&mut self, i: usize) {
        let dim = self.dim;
        let row = &mut self.data[i * dim..(i + 1) * dim];
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1.0 {
            for v in row.iter_mut() {
                *v /= norm;
            }
        }
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Projects `v` onto the unit Euclidean ball in place: vectors with norm
/// at most 1 are left untouched, longer ones are rescaled to norm 1.
pub fn project_to_unit_ball(v: &mut [f64]) -> Result<()> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(RelexError::InvalidArgument(
            "cannot project a non-finite vector".into(),
        ));
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 1.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    Ok(())
}

/// Computes f(m) = W^T phi(m): the sum of the W rows selected by the sparse
/// binary vector. The empty mention maps to the zero vector.
pub fn sparse_project(phi: &SparseVector, w: &EmbeddingMatrix) -> Result<Vec<f64>> {
    let mut out = vec![0.0; w.dim()];
    for &idx in phi.indices() {
        if idx >= w.rows() {
            return Err(RelexError::InvalidArgument(format!(
                "feature id {} out of range (vocabulary size {})",
                idx,
                w.rows()
            )));
        }
        for (o, v) in out.iter_mut().zip(w.row(idx)) {
            *o += v;
        }
    }
    Ok(out)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
