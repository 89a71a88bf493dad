//! Column-compressed storage for data points.
//!
//! Each data point `a_i` is one column of a `d × n` matrix, so the sampled
//! point of a stochastic step is a contiguous slice of `indices`/`data`.

use crate::error::{Error, Result};

/// Compressed sparse column matrix of shape `(dim, ncols)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix {
    dim: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<f64>,
}

/// Borrowed view of one column.
#[derive(Debug, Clone, Copy)]
pub struct SparseColumn<'a> {
    pub indices: &'a [usize],
    pub values: &'a [f64],
}

impl CscMatrix {
    pub fn new(dim: usize, indptr: Vec<usize>, indices: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        if indptr.is_empty() || indptr[0] != 0 {
            return Err(Error::InvalidInput("indptr must start with 0".into()));
        }
        if indices.len() != data.len() || *indptr.last().unwrap() != data.len() {
            return Err(Error::InvalidInput(format!(
                "indptr ends at {} but there are {} indices and {} values",
                indptr.last().unwrap(),
                indices.len(),
                data.len()
            )));
        }
        for (col, w) in indptr.windows(2).enumerate() {
            if w[1] < w[0] {
                return Err(Error::InvalidInput(format!("indptr decreases at column {col}")));
            }
            let idx = &indices[w[0]..w[1]];
            if let Some(&bad) = idx.iter().find(|&&i| i >= dim) {
                return Err(Error::InvalidInput(format!(
                    "column {col}: coordinate {bad} outside [0, {dim})"
                )));
            }
            if idx.windows(2).any(|p| p[1] <= p[0]) {
                return Err(Error::InvalidInput(format!(
                    "column {col}: indices are not strictly increasing"
                )));
            }
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix data"));
        }
        Ok(Self { dim, indptr, indices, data })
    }

    /// Builds a matrix from per-column `(coordinate, value)` lists.
    pub fn from_columns(dim: usize, columns: &[Vec<(usize, f64)>]) -> Result<Self> {
        let mut indptr = Vec::with_capacity(columns.len() + 1);
        let mut indices = Vec::new();
        let mut data = Vec::new();
        indptr.push(0);
        for col in columns {
            for &(i, v) in col {
                indices.push(i);
                data.push(v);
            }
            indptr.push(indices.len());
        }
        Self::new(dim, indptr, indices, data)
    }

    /// Builds a matrix from dense columns, keeping only the nonzero entries.
    pub fn from_dense_columns(dim: usize, columns: &[Vec<f64>]) -> Result<Self> {
        let cols: Vec<Vec<(usize, f64)>> = columns
            .iter()
            .map(|c| {
                c.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(i, v)| (i, *v))
                    .collect()
            })
            .collect();
        if let Some(c) = columns.iter().find(|c| c.len() != dim) {
            return Err(Error::InvalidInput(format!(
                "dense column has length {}, expected {dim}",
                c.len()
            )));
        }
        Self::from_columns(dim, &cols)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ncols(&self) -> usize {
        self.indptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn indptr(&self) -> &[usize] {
        &self.indptr
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn column(&self, j: usize) -> SparseColumn<'_> {
        let (start, end) = (self.indptr[j], self.indptr[j + 1]);
        SparseColumn {
            indices: &self.indices[start..end],
            values: &self.data[start..end],
        }
    }

    pub fn columns(&self) -> impl Iterator<Item = SparseColumn<'_>> {
        (0..self.ncols()).map(move |j| self.column(j))
    }
}

impl SparseColumn<'_> {
    #[inline]
    pub fn dot(&self, x: &[f64]) -> f64 {
        self.indices
            .iter()
            .zip(self.values)
            .map(|(&i, &v)| v * x[i])
            .sum()
    }

    /// `x += alpha * a`
    #[inline]
    pub fn add_scaled_to(&self, alpha: f64, x: &mut [f64]) {
        for (&i, &v) in self.indices.iter().zip(self.values) {
            x[i] += alpha * v;
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn to_dense(&self, dim: usize) -> Vec<f64> {
        let mut out = vec![0.0; dim];
        self.add_scaled_to(1.0, &mut out);
        out
    }
}

/// Data points with one real label each.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    matrix: CscMatrix,
    labels: Vec<f64>,
}

impl Dataset {
    pub fn new(matrix: CscMatrix, labels: Vec<f64>) -> Result<Self> {
        if matrix.ncols() == 0 {
            return Err(Error::InvalidInput("no data points".into()));
        }
        if matrix.dim() == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        if labels.len() != matrix.ncols() {
            return Err(Error::InvalidInput(format!(
                "{} labels for {} data points",
                labels.len(),
                matrix.ncols()
            )));
        }
        if labels.iter().any(|b| !b.is_finite()) {
            return Err(Error::NonFinite("labels"));
        }
        Ok(Self { matrix, labels })
    }

    pub fn n(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CscMatrix {
        &self.matrix
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    #[inline]
    pub fn point(&self, i: usize) -> SparseColumn<'_> {
        self.matrix.column(i)
    }

    #[inline]
    pub fn label(&self, i: usize) -> f64 {
        self.labels[i]
    }

    /// Rescales every nonzero point to unit Euclidean norm.
    pub fn normalized(&self) -> Self {
        let mut data = self.matrix.data.clone();
        for w in self.matrix.indptr.windows(2) {
            let col = &mut data[w[0]..w[1]];
            let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                col.iter_mut().for_each(|v| *v /= norm);
            }
        }
        Self {
            matrix: CscMatrix { data, ..self.matrix.clone() },
            labels: self.labels.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unsorted_indices() {
        let err = CscMatrix::new(3, vec![0, 2], vec![2, 1], vec![1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn rejects_out_of_range_coordinate() {
        assert!(CscMatrix::new(2, vec![0, 1], vec![2], vec![1.0]).is_err());
    }

    #[test]
    fn rejects_bad_indptr() {
        assert!(CscMatrix::new(2, vec![0, 2, 1], vec![0, 1], vec![1.0, 1.0]).is_err());
        assert!(CscMatrix::new(2, vec![0, 3], vec![0, 1], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn empty_columns_are_allowed() {
        let m = CscMatrix::from_columns(3, &[vec![], vec![(1, 2.0)]]).unwrap();
        assert_eq!(m.column(0).nnz(), 0);
        assert_eq!(m.column(1).dot(&[5.0, 1.5, 7.0]), 3.0);
    }

    #[test]
    fn dataset_shape_checks() {
        let m = CscMatrix::from_columns(2, &[vec![(0, 1.0)]]).unwrap();
        assert!(Dataset::new(m.clone(), vec![]).is_err());
        let empty = CscMatrix::from_columns(2, &[]).unwrap();
        assert!(Dataset::new(empty, vec![]).is_err());
        assert!(Dataset::new(m, vec![1.0]).is_ok());
    }

    #[test]
    fn normalization_gives_unit_points() {
        let m = CscMatrix::from_dense_columns(2, &[vec![3.0, 4.0], vec![0.0, 0.0]]).unwrap();
        let ds = Dataset::new(m, vec![1.0, -1.0]).unwrap().normalized();
        assert!((ds.point(0).norm_sq() - 1.0).abs() < 1e-15);
        assert_eq!(ds.point(1).nnz(), 0);
    }
}
