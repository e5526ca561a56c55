use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::{Error, Result};

/// Dense real symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricOperator {
    dim: usize,
    entries: Vec<f64>,
}

impl SymmetricOperator {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for i in 0..dim {
            op.entries[i * dim + i] = 1.0;
        }
        op
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut op = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            op.entries[i * diag.len() + i] = d;
        }
        op
    }

    /// Builds from a row-major square matrix, rejecting anything not exactly
    /// symmetric.
    pub fn from_row_major(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        let op = Self { dim, entries };
        if !op.is_symmetric() {
            return Err(Error::InvalidParameter {
                name: "entries",
                reason: "matrix is not symmetric".into(),
            });
        }
        Ok(op)
    }

    /// Builds from a lower triangle (`i >= j`) filled by `fill`, mirroring
    /// each value into the upper triangle.
    pub(crate) fn from_lower(dim: usize, lower: Vec<f64>) -> Self {
        debug_assert_eq!(lower.len(), dim * dim);
        let mut entries = lower;
        for i in 0..dim {
            for j in 0..i {
                entries[j * dim + i] = entries[i * dim + j];
            }
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// Bit-exact symmetry check.
    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| self.get(i, j).to_bits() == self.get(j, i).to_bits()))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries
            .iter()
            .fold(0.0, |m, &x| m.max(crate::math::abs(x)))
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matvec_complex(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| b * a).sum())
            .collect()
    }

    /// `self + scale * other`.
    pub fn add_scaled(&self, other: &Self, scale: f64) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + scale * b)
            .collect();
        Ok(Self {
            dim: self.dim,
            entries,
        })
    }

    /// Principal submatrix on `indices`, in the given order.
    pub fn restrict(&self, indices: &[usize]) -> Self {
        let dim = indices.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for &i in indices {
            for &j in indices {
                entries.push(self.get(i, j));
            }
        }
        Self { dim, entries }
    }

    pub(crate) fn to_sparse(&self) -> SparseOperator {
        let mut row_start = Vec::with_capacity(self.dim + 1);
        let mut cols = Vec::new();
        let mut values = Vec::new();
        row_start.push(0);
        for i in 0..self.dim {
            for (j, &v) in self.row(i).iter().enumerate() {
                if v != 0.0 {
                    cols.push(j);
                    values.push(v);
                }
            }
            row_start.push(cols.len());
        }
        SparseOperator {
            row_start,
            cols,
            values,
        }
    }
}

/// Compressed-row copy used by the propagator.
#[derive(Debug, Clone)]
pub(crate) struct SparseOperator {
    row_start: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

impl SparseOperator {
    pub(crate) fn matvec_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_start[i]..self.row_start[i + 1] {
                acc += x[self.cols[k]] * self.values[k];
            }
            *o = acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mirrored_lower_is_symmetric() {
        let lower = vec![1.0, 0.0, 0.0, 2.0, 3.0, 0.0, 4.0, 5.0, 6.0];
        let op = SymmetricOperator::from_lower(3, lower);
        assert!(op.is_symmetric());
        assert_eq!(op.get(0, 2), 4.0);
        assert_eq!(op.get(1, 2), 5.0);
    }

    #[test]
    fn rejects_asymmetric_input() {
        assert!(SymmetricOperator::from_row_major(2, vec![0.0, 1.0, 1.0 + 1e-16, 0.0]).is_ok());
        assert!(SymmetricOperator::from_row_major(2, vec![0.0, 1.0, 1.0 + 1e-15, 0.0]).is_err());
        assert!(SymmetricOperator::from_row_major(2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn sparse_matches_dense() {
        let op = SymmetricOperator::from_row_major(
            3,
            vec![1.0, 2.0, 0.0, 2.0, 0.0, -1.0, 0.0, -1.0, 3.0],
        )
        .unwrap();
        let x = [
            Complex64::new(1.0, 0.5),
            Complex64::new(-2.0, 0.0),
            Complex64::new(0.0, 1.0),
        ];
        let dense = op.matvec_complex(&x);
        let mut sparse = [Complex64::new(0.0, 0.0); 3];
        op.to_sparse().matvec_into(&x, &mut sparse);
        assert_eq!(dense.as_slice(), sparse.as_slice());
    }

    #[test]
    fn restrict_picks_submatrix() {
        let op = SymmetricOperator::from_diagonal(&[1.0, 2.0, 3.0]);
        let sub = op.restrict(&[2, 0]);
        assert_eq!(sub.diagonal(), vec![3.0, 1.0]);
    }
}
