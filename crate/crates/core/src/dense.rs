//! Dense real matrices, real vectors and 0/1 matrices.
//!
//! Storage is row-major and 0-based. Accessors that report positions to
//! users (errors, witnesses) convert to 1-based indices.

use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite real vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RealVector(Vec<f64>);

impl RealVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyShape { rows: 0, cols: 1 });
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteValue {
                index: index + 1,
                value,
            });
        }
        Ok(Self(values))
    }

    /// The `index`-th standard basis vector (0-based) of length `len`.
    pub fn basis(len: usize, index: usize) -> Self {
        assert!(
            index < len,
            "basis index {index} out of range for length {len}"
        );
        let mut values = vec![0.0; len];
        values[index] = 1.0;
        Self(values)
    }

    pub fn filled(len: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Construct without validation; callers guarantee finiteness and non-emptiness.
    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(!values.is_empty());
        Self(values)
    }
}

impl TryFrom<Vec<f64>> for RealVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<RealVector> for Vec<f64> {
    fn from(v: RealVector) -> Self {
        v.0
    }
}

impl Index<usize> for RealVector {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.0[index]
    }
}

/// Elementwise product `f.g`.
pub fn hadamard(f: &RealVector, g: &RealVector) -> Result<RealVector> {
    if f.len() != g.len() {
        return Err(Error::DimensionMismatch {
            expected: f.len(),
            found: g.len(),
        });
    }
    // overflow to infinity surfaces as NonFiniteValue
    RealVector::new(f.0.iter().zip(&g.0).map(|(a, b)| a * b).collect())
}

/// An arbitrary finite real `rows x cols` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseRealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseRealMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyShape { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if let Some((k, &value)) = data.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteEntry {
                row: k / cols + 1,
                col: k % cols + 1,
                value,
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Build from nested rows. All rows must have the same length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(m * n);
        for row in rows {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(m, n, data)
    }

    pub(crate) fn from_parts_unchecked(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![0.0; rows * cols])
    }

    pub fn identity(size: usize) -> Result<Self> {
        let mut a = Self::zeros(size, size)?;
        for i in 0..size {
            a.data[i * size + i] = 1.0;
        }
        Ok(a)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Entry at 0-based `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j));
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// `A f` for `f` of length `cols`.
    pub fn mul_vec(&self, f: &[f64]) -> Result<Vec<f64>> {
        if f.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: f.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(f).map(|(a, x)| a * x).sum())
            .collect())
    }

    /// `A^T g` for `g` of length `rows`.
    pub fn transpose_mul_vec(&self, g: &[f64]) -> Result<Vec<f64>> {
        if g.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: g.len(),
            });
        }
        let mut out = vec![0.0; self.cols];
        for (i, gi) in g.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * gi;
            }
        }
        Ok(out)
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).iter().sum()).collect()
    }
}

/// A matrix whose entries are exactly 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl BinaryMatrix {
    pub fn new(rows: usize, cols: usize, bits: Vec<bool>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyShape { rows, cols });
        }
        if bits.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                found: bits.len(),
            });
        }
        Ok(Self { rows, cols, bits })
    }

    /// Build from nested rows of 0/1 integers; any nonzero counts as 1.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.as_ref().len());
        let mut bits = Vec::with_capacity(m * n);
        for row in rows {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            bits.extend(row.iter().map(|&b| b != 0));
        }
        Self::new(m, n, bits)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[bool] {
        &self.bits[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut bits = Vec::with_capacity(self.bits.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                bits.push(self.get(i, j));
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            bits,
        }
    }

    pub fn to_dense(&self) -> DenseRealMatrix {
        DenseRealMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .bits
                .iter()
                .map(|&b| if b { 1.0 } else { 0.0 })
                .collect(),
        }
    }
}

impl From<&BinaryMatrix> for DenseRealMatrix {
    fn from(b: &BinaryMatrix) -> Self {
        b.to_dense()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(values: &[f64]) -> RealVector {
        RealVector::new(values.to_vec()).unwrap()
    }

    #[test]
    fn hadamard_examples() {
        assert_eq!(
            hadamard(&v(&[1.0, 2.0, 3.0]), &v(&[4.0, 5.0, 6.0])).unwrap(),
            v(&[4.0, 10.0, 18.0])
        );
        let f = v(&[-1.5, 0.0, 7.25]);
        assert_eq!(hadamard(&f, &v(&[1.0, 1.0, 1.0])).unwrap(), f);
        let e1 = RealVector::basis(3, 0);
        let e2 = RealVector::basis(3, 1);
        assert_eq!(hadamard(&e1, &e2).unwrap(), v(&[0.0, 0.0, 0.0]));
    }

    #[test]
    fn hadamard_rejects_length_mismatch() {
        let err = hadamard(&v(&[1.0]), &v(&[1.0, 2.0])).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 1,
                found: 2
            }
        );
    }

    #[test]
    fn vector_rejects_non_finite_and_empty() {
        assert!(matches!(
            RealVector::new(vec![1.0, f64::NAN]),
            Err(Error::NonFiniteValue { index: 2, .. })
        ));
        assert!(RealVector::new(vec![]).is_err());
    }

    #[test]
    fn matrix_validation() {
        assert!(matches!(
            DenseRealMatrix::new(0, 3, vec![]),
            Err(Error::EmptyShape { .. })
        ));
        assert!(matches!(
            DenseRealMatrix::new(2, 2, vec![0.0; 3]),
            Err(Error::LengthMismatch { .. })
        ));
        assert_eq!(
            DenseRealMatrix::from_rows(&[[0.0, 1.0], [f64::INFINITY, 0.0]]).unwrap_err(),
            Error::NonFiniteEntry {
                row: 2,
                col: 1,
                value: f64::INFINITY
            }
        );
        assert!(DenseRealMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0]]).is_err());
    }

    #[test]
    fn matvec_and_transpose() {
        let a = DenseRealMatrix::from_rows(&[[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]).unwrap();
        assert_eq!(a.mul_vec(&[1.0, 0.0, -1.0]).unwrap(), vec![-2.0, -2.0]);
        assert_eq!(
            a.transpose_mul_vec(&[1.0, 1.0]).unwrap(),
            vec![5.0, 7.0, 9.0]
        );
        let t = a.transpose();
        assert_eq!(t.shape(), (3, 2));
        assert_eq!(t.get(2, 1), 6.0);
        assert_eq!(t.transpose(), a);
        assert_eq!(a.row_sums(), vec![6.0, 15.0]);
    }

    #[test]
    fn binary_transpose_and_dense() {
        let b = BinaryMatrix::from_rows(&[[1, 0, 0], [0, 0, 1]]).unwrap();
        let t = b.transpose();
        assert_eq!(t.shape(), (3, 2));
        assert!(t.get(2, 1));
        assert_eq!(
            b.to_dense(),
            DenseRealMatrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]).unwrap()
        );
    }
}
