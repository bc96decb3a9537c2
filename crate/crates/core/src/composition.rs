//! Injections and the composition matrices they generate.
//!
//! A composition matrix `P` of shape `m x n` is stored as the map
//! `row -> column` of its unique 1 per row. Applying `P` to a vector is pure
//! selection, applying `P^T` is a scatter, so every operation here is exact.

use serde::{Deserialize, Serialize};

use crate::dense::{DenseRealMatrix, RealVector};
use crate::error::{Error, Result};

/// Injective index map `{0..m} -> {0..n}`, stored 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Injection {
    n: usize,
    targets: Vec<usize>,
}

fn validate_targets(n: usize, targets: &[usize]) -> Result<()> {
    let m = targets.len();
    if m == 0 || n == 0 {
        return Err(Error::EmptyShape { rows: m, cols: n });
    }
    if m > n {
        return Err(Error::DomainExceedsCodomain { m, n });
    }
    // seen[j] holds 1 + the first index mapping to column j
    let mut seen = vec![0usize; n];
    for (i, &t) in targets.iter().enumerate() {
        if t >= n {
            return Err(Error::TargetOutOfRange {
                index: i + 1,
                target: t + 1,
                n,
            });
        }
        if seen[t] != 0 {
            return Err(Error::DuplicateTarget {
                target: t + 1,
                first: seen[t],
                second: i + 1,
            });
        }
        seen[t] = i + 1;
    }
    Ok(())
}

impl Injection {
    /// Build from 0-based targets.
    pub fn new(n: usize, targets: Vec<usize>) -> Result<Self> {
        validate_targets(n, &targets)?;
        Ok(Self { n, targets })
    }

    /// Build from 1-based targets, as written in files and on the command line.
    pub fn from_one_based(n: usize, targets: &[usize]) -> Result<Self> {
        if let Some(i) = targets.iter().position(|&t| t == 0) {
            return Err(Error::TargetOutOfRange {
                index: i + 1,
                target: 0,
                n,
            });
        }
        Self::new(n, targets.iter().map(|t| t - 1).collect())
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(n, (0..n).collect())
    }

    /// Domain size.
    pub fn m(&self) -> usize {
        self.targets.len()
    }

    /// Codomain size.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn targets_one_based(&self) -> Vec<usize> {
        self.targets.iter().map(|t| t + 1).collect()
    }

    /// 0-based image of `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.targets[i]
    }

    pub fn is_permutation(&self) -> bool {
        self.m() == self.n
    }
}

/// Sparse `m x n` discrete composition matrix: exactly one 1 per row, at
/// most one 1 per column.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CompositionMatrix {
    n: usize,
    row_to_col: Vec<usize>,
}

impl CompositionMatrix {
    /// Build from the 0-based column of the 1 in each row.
    pub fn new(n: usize, row_to_col: Vec<usize>) -> Result<Self> {
        validate_targets(n, &row_to_col)?;
        Ok(Self { n, row_to_col })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(n, (0..n).collect())
    }

    pub(crate) fn from_parts_unchecked(n: usize, row_to_col: Vec<usize>) -> Self {
        debug_assert!(validate_targets(n, &row_to_col).is_ok());
        Self { n, row_to_col }
    }

    pub fn m(&self) -> usize {
        self.row_to_col.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.m(), self.n)
    }

    pub fn row_to_col(&self) -> &[usize] {
        &self.row_to_col
    }

    pub fn row_to_col_one_based(&self) -> Vec<usize> {
        self.row_to_col.iter().map(|j| j + 1).collect()
    }

    /// For each column, the row holding its 1, if any.
    pub fn col_to_row(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.n];
        for (i, &j) in self.row_to_col.iter().enumerate() {
            out[j] = Some(i);
        }
        out
    }

    /// `(P f)_i = f_{pi(i)}`.
    pub fn apply_pullback(&self, f: &RealVector) -> Result<RealVector> {
        self.pullback_slice(f.as_slice())
            .map(RealVector::from_vec_unchecked)
    }

    /// Pullback on a raw slice. Reads exactly `m` entries of `f`.
    pub fn pullback_slice(&self, f: &[f64]) -> Result<Vec<f64>> {
        if f.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: f.len(),
            });
        }
        Ok(self.row_to_col.iter().map(|&j| f[j]).collect())
    }

    /// `P^T g`: scatters `g_i` to column `pi(i)`, zero elsewhere.
    pub fn apply_pushforward(&self, g: &RealVector) -> Result<RealVector> {
        self.pushforward_slice(g.as_slice())
            .map(RealVector::from_vec_unchecked)
    }

    pub fn pushforward_slice(&self, g: &[f64]) -> Result<Vec<f64>> {
        if g.len() != self.m() {
            return Err(Error::DimensionMismatch {
                expected: self.m(),
                found: g.len(),
            });
        }
        let mut out = vec![0.0; self.n];
        for (&j, &v) in self.row_to_col.iter().zip(g) {
            out[j] = v;
        }
        Ok(out)
    }

    /// The product `self * inner` (pull back through `self`, then `inner`).
    pub fn compose(&self, inner: &CompositionMatrix) -> Result<CompositionMatrix> {
        if self.n != inner.m() {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: inner.m(),
            });
        }
        let row_to_col = self
            .row_to_col
            .iter()
            .map(|&j| inner.row_to_col[j])
            .collect();
        Ok(Self::from_parts_unchecked(inner.n, row_to_col))
    }

    pub fn to_dense(&self) -> DenseRealMatrix {
        let (m, n) = self.shape();
        let mut data = vec![0.0; m * n];
        for (i, &j) in self.row_to_col.iter().enumerate() {
            data[i * n + j] = 1.0;
        }
        DenseRealMatrix::from_parts_unchecked(m, n, data)
    }

    /// `P^T`, which is a composition matrix only when `P` is square.
    pub fn transpose_dense(&self) -> DenseRealMatrix {
        self.to_dense().transpose()
    }
}

impl From<Injection> for CompositionMatrix {
    fn from(pi: Injection) -> Self {
        Self {
            n: pi.n,
            row_to_col: pi.targets,
        }
    }
}

impl From<CompositionMatrix> for Injection {
    fn from(p: CompositionMatrix) -> Self {
        Self {
            n: p.n,
            targets: p.row_to_col,
        }
    }
}

pub fn injection_to_matrix(pi: &Injection) -> CompositionMatrix {
    CompositionMatrix::from(pi.clone())
}

pub fn matrix_to_injection(p: &CompositionMatrix) -> Injection {
    Injection::from(p.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inj(n: usize, one_based: &[usize]) -> Injection {
        Injection::from_one_based(n, one_based).unwrap()
    }

    fn dense(rows: &[&[f64]]) -> DenseRealMatrix {
        DenseRealMatrix::from_rows(rows).unwrap()
    }

    fn v(values: &[f64]) -> RealVector {
        RealVector::new(values.to_vec()).unwrap()
    }

    // Dense product by the textbook triple loop.
    fn dense_product(a: &DenseRealMatrix, b: &DenseRealMatrix) -> DenseRealMatrix {
        assert_eq!(a.cols(), b.rows());
        let mut data = Vec::new();
        for i in 0..a.rows() {
            for j in 0..b.cols() {
                data.push((0..a.cols()).map(|k| a.get(i, k) * b.get(k, j)).sum());
            }
        }
        DenseRealMatrix::new(a.rows(), b.cols(), data).unwrap()
    }

    #[test]
    fn injection_to_matrix_examples() {
        let p = injection_to_matrix(&inj(4, &[1, 2]));
        assert_eq!(
            p.to_dense(),
            dense(&[&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0]])
        );
        let p = injection_to_matrix(&Injection::identity(3).unwrap());
        assert_eq!(p.to_dense(), DenseRealMatrix::identity(3).unwrap());
        let p = injection_to_matrix(&inj(3, &[2, 1]));
        assert_eq!(p.to_dense(), dense(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0]]));
        assert_eq!(p.row_to_col_one_based(), vec![2, 1]);
    }

    #[test]
    fn matrix_to_injection_examples() {
        let p = CompositionMatrix::new(3, vec![1, 0]).unwrap();
        assert_eq!(matrix_to_injection(&p), inj(3, &[2, 1]));
        let p = CompositionMatrix::new(1, vec![0]).unwrap();
        assert_eq!(matrix_to_injection(&p), inj(1, &[1]));
        let p = CompositionMatrix::identity(3).unwrap();
        assert_eq!(matrix_to_injection(&p), Injection::identity(3).unwrap());
    }

    #[test]
    fn injection_invariants_are_enforced() {
        assert_eq!(
            Injection::from_one_based(2, &[1, 2, 1]).unwrap_err(),
            Error::DomainExceedsCodomain { m: 3, n: 2 }
        );
        assert_eq!(
            Injection::from_one_based(4, &[1, 5]).unwrap_err(),
            Error::TargetOutOfRange {
                index: 2,
                target: 5,
                n: 4
            }
        );
        assert_eq!(
            Injection::from_one_based(4, &[3, 1, 3]).unwrap_err(),
            Error::DuplicateTarget {
                target: 3,
                first: 1,
                second: 3
            }
        );
        assert!(matches!(
            Injection::from_one_based(4, &[0]),
            Err(Error::TargetOutOfRange { target: 0, .. })
        ));
        assert!(matches!(
            Injection::new(3, vec![]),
            Err(Error::EmptyShape { .. })
        ));
        assert!(inj(3, &[3, 1, 2]).is_permutation());
    }

    #[test]
    fn pullback_examples() {
        let p = CompositionMatrix::new(3, vec![1, 0]).unwrap();
        assert_eq!(
            p.apply_pullback(&v(&[7.0, 8.0, 9.0])).unwrap(),
            v(&[8.0, 7.0])
        );
        let f = v(&[0.1, -2.5, 3e300]);
        let id = CompositionMatrix::identity(3).unwrap();
        assert_eq!(id.apply_pullback(&f).unwrap(), f);
        let p = CompositionMatrix::new(3, vec![2]).unwrap();
        assert_eq!(p.apply_pullback(&v(&[4.0, 5.0, 6.0])).unwrap(), v(&[6.0]));
        assert_eq!(
            p.apply_pullback(&v(&[1.0, 2.0])).unwrap_err(),
            Error::DimensionMismatch {
                expected: 3,
                found: 2
            }
        );
    }

    #[test]
    fn pushforward_examples() {
        let p = CompositionMatrix::new(3, vec![1, 0]).unwrap();
        assert_eq!(
            p.apply_pushforward(&v(&[7.0, 8.0])).unwrap(),
            v(&[8.0, 7.0, 0.0])
        );
        let g = v(&[1.5, -1.0]);
        let id = CompositionMatrix::identity(2).unwrap();
        assert_eq!(id.apply_pushforward(&g).unwrap(), g);
        let p = CompositionMatrix::new(3, vec![2]).unwrap();
        assert_eq!(
            p.apply_pushforward(&v(&[4.0])).unwrap(),
            v(&[0.0, 0.0, 4.0])
        );
        assert!(p.apply_pushforward(&v(&[4.0, 1.0])).is_err());
    }

    #[test]
    fn pushforward_matches_dense_transpose() {
        let p = CompositionMatrix::new(5, vec![4, 0, 2]).unwrap();
        let g = [1.25, -3.0, 0.5];
        assert_eq!(
            p.pushforward_slice(&g).unwrap(),
            p.to_dense().transpose_mul_vec(&g).unwrap()
        );
    }

    #[test]
    fn compose_examples() {
        let p = CompositionMatrix::new(4, vec![3, 1]).unwrap();
        let id = CompositionMatrix::identity(2).unwrap();
        assert_eq!(id.compose(&p).unwrap(), p);

        let swap = CompositionMatrix::new(2, vec![1, 0]).unwrap();
        assert_eq!(swap.compose(&swap).unwrap(), id);

        // (1->2), n=2 composed with (1->3, 2->1), n=3
        let outer = CompositionMatrix::new(2, vec![1]).unwrap();
        let inner = CompositionMatrix::new(3, vec![2, 0]).unwrap();
        let product = dense_product(&outer.to_dense(), &inner.to_dense());
        assert_eq!(product, dense(&[&[1.0, 0.0, 0.0]]));
        let composed = outer.compose(&inner).unwrap();
        assert_eq!(composed.row_to_col_one_based(), vec![1]);
        assert_eq!(composed.shape(), (1, 3));
        assert_eq!(composed.to_dense(), product);

        assert!(inner.compose(&outer).is_err());
    }

    #[test]
    fn to_dense_examples() {
        let p = CompositionMatrix::new(4, vec![0, 1]).unwrap();
        assert_eq!(
            p.to_dense(),
            dense(&[&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0]])
        );
        assert_eq!(
            CompositionMatrix::identity(2).unwrap().to_dense(),
            dense(&[&[1.0, 0.0], &[0.0, 1.0]])
        );
        let p = CompositionMatrix::new(3, vec![2]).unwrap();
        assert_eq!(p.to_dense(), dense(&[&[0.0, 0.0, 1.0]]));
        assert_eq!(p.col_to_row(), vec![None, None, Some(0)]);
    }
}
