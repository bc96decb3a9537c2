//! Membership tests for row-/column-permutation-like matrices and
//! discrete composition matrices.
//!
//! Two routes are provided. The entrywise definitions (`classify_entries_binary`,
//! `is_row_permutation_like`, ...) inspect matrix entries directly. The
//! functional route evaluates the operator identities
//! `A(f.g) = (Af).(Ag)`, `A diag(f) = diag(Af) A` and
//! `diag(f) A = A diag(A^T f)`, either as residuals for given vectors or via
//! the finite multiplicative certificate `a_ij^2 = a_ij`, `a_ij a_ik = 0`
//! (`j != k`), which holds exactly when the first identity holds for all
//! `f, g`.
//!
//! All indices in witnesses and errors are 1-based.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::composition::CompositionMatrix;
use crate::dense::{BinaryMatrix, DenseRealMatrix};
use crate::error::{Error, Result};

/// Absolute tolerance for reading a real entry as exactly 0 or exactly 1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Tolerance(f64);

impl Tolerance {
    pub const DEFAULT_EPS: f64 = 1e-9;

    pub fn new(eps: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&eps) {
            return Err(Error::InvalidTolerance(eps));
        }
        Ok(Self(eps))
    }

    /// Zero tolerance: entries must be exactly 0 or 1.
    pub const fn exact() -> Self {
        Self(0.0)
    }

    pub fn eps(self) -> f64 {
        self.0
    }

    fn is_zero(self, x: f64) -> bool {
        x.abs() <= self.0
    }

    fn is_one(self, x: f64) -> bool {
        (x - 1.0).abs() <= self.0
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self(Self::DEFAULT_EPS)
    }
}

impl TryFrom<f64> for Tolerance {
    type Error = Error;

    fn try_from(eps: f64) -> Result<Self> {
        Self::new(eps)
    }
}

impl From<Tolerance> for f64 {
    fn from(t: Tolerance) -> f64 {
        t.0
    }
}

/// The clause a witness violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Clause {
    /// Entry `(i, j)` is neither 0 nor 1.
    NonBinary,
    /// Row `i` has ones in columns `j` and `k`.
    RowMultipleOnes,
    /// Column `j` has ones in rows `i` and `k`.
    ColumnMultipleOnes,
    /// Row `i` has no 1.
    ZeroRow,
    /// Row `i` does not sum to 1.
    RowSum,
    /// More rows than columns: indices are `(m, n)`.
    BadShape,
    /// `a_ij^2 != a_ij` at `(i, j)`.
    NotIdempotent,
    /// `a_ij a_ik != 0` at `(i; j, k)`.
    NonzeroProduct,
}

impl Clause {
    pub fn as_str(self) -> &'static str {
        match self {
            Clause::NonBinary => "non-binary",
            Clause::RowMultipleOnes => "row-multiple-ones",
            Clause::ColumnMultipleOnes => "column-multiple-ones",
            Clause::ZeroRow => "zero-row",
            Clause::RowSum => "row-sum",
            Clause::BadShape => "bad-shape",
            Clause::NotIdempotent => "not-idempotent",
            Clause::NonzeroProduct => "nonzero-product",
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A failure record naming the violated clause and the offending indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub clause: Clause,
    pub indices: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

impl Witness {
    fn new(clause: Clause, indices: Vec<usize>) -> Self {
        Self {
            clause,
            indices,
            value: None,
        }
    }

    fn with_value(clause: Clause, indices: Vec<usize>, value: f64) -> Self {
        Self {
            clause,
            indices,
            value: Some(value),
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {:?}", self.clause, self.indices)?;
        if let Some(v) = self.value {
            write!(f, " (value {v:e})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Holds,
    Fails(Witness),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Holds => None,
            Verdict::Fails(w) => Some(w),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("entry ({row}, {col}) = {value} is neither 0 nor 1")]
pub struct NonBinaryEntry {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompositionError {
    #[error("row {0} contains no 1")]
    ZeroRow(usize),
    #[error("row {0} contains more than one 1")]
    MultipleOnesInRow(usize),
    #[error("column {0} contains more than one 1")]
    RepeatedColumn(usize),
    #[error("a {m}x{n} matrix has more rows than columns")]
    BadShape { m: usize, n: usize },
}

fn snap(x: f64, tol: Tolerance) -> Option<bool> {
    if tol.is_zero(x) {
        Some(false)
    } else if tol.is_one(x) {
        Some(true)
    } else {
        None
    }
}

/// Snap every entry within `eps` of 0 or 1; the first other entry in
/// row-major order is reported.
pub fn classify_entries_binary(
    a: &DenseRealMatrix,
    tol: Tolerance,
) -> std::result::Result<BinaryMatrix, NonBinaryEntry> {
    let (m, n) = a.shape();
    let mut bits = Vec::with_capacity(m * n);
    for (k, &x) in a.as_slice().iter().enumerate() {
        match snap(x, tol) {
            Some(b) => bits.push(b),
            None => {
                return Err(NonBinaryEntry {
                    row: k / n + 1,
                    col: k % n + 1,
                    value: x,
                })
            }
        }
    }
    Ok(BinaryMatrix::new(m, n, bits).expect("shape taken from a valid matrix"))
}

fn row_multiple_ones(b: &BinaryMatrix, i: usize) -> Option<Witness> {
    let mut ones = b
        .row(i)
        .iter()
        .enumerate()
        .filter(|(_, &x)| x)
        .map(|(j, _)| j);
    let j = ones.next()?;
    let k = ones.next()?;
    Some(Witness::new(
        Clause::RowMultipleOnes,
        vec![i + 1, j + 1, k + 1],
    ))
}

fn column_multiple_ones(b: &BinaryMatrix, j: usize) -> Option<Witness> {
    let mut ones = (0..b.rows()).filter(|&i| b.get(i, j));
    let i = ones.next()?;
    let k = ones.next()?;
    Some(Witness::new(
        Clause::ColumnMultipleOnes,
        vec![j + 1, i + 1, k + 1],
    ))
}

/// At most one 1 per row. Witness indices are `(i, j, k)`: the first row
/// with two ones and their columns.
pub fn is_row_permutation_like(b: &BinaryMatrix) -> Verdict {
    match (0..b.rows()).find_map(|i| row_multiple_ones(b, i)) {
        Some(w) => Verdict::Fails(w),
        None => Verdict::Holds,
    }
}

/// At most one 1 per column. Witness indices are `(j, i, k)`: the first
/// column with two ones and their rows.
pub fn is_column_permutation_like(b: &BinaryMatrix) -> Verdict {
    match (0..b.cols()).find_map(|j| column_multiple_ones(b, j)) {
        Some(w) => Verdict::Fails(w),
        None => Verdict::Holds,
    }
}

/// Read a composition matrix off a 0/1 matrix: exactly one 1 per row, no
/// column used twice. Rows are scanned in order and the first failure wins.
pub fn try_into_composition(
    b: &BinaryMatrix,
) -> std::result::Result<CompositionMatrix, CompositionError> {
    let (m, n) = b.shape();
    if m > n {
        return Err(CompositionError::BadShape { m, n });
    }
    let mut used = vec![false; n];
    let mut row_to_col = Vec::with_capacity(m);
    for i in 0..m {
        let mut ones = b
            .row(i)
            .iter()
            .enumerate()
            .filter(|(_, &x)| x)
            .map(|(j, _)| j);
        let j = ones.next().ok_or(CompositionError::ZeroRow(i + 1))?;
        if ones.next().is_some() {
            return Err(CompositionError::MultipleOnesInRow(i + 1));
        }
        if used[j] {
            return Err(CompositionError::RepeatedColumn(j + 1));
        }
        used[j] = true;
        row_to_col.push(j);
    }
    Ok(CompositionMatrix::from_parts_unchecked(n, row_to_col))
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn max_abs_diff(a: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    a.into_iter()
        .fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
}

/// `max_i |A(f.g) - (Af).(Ag)|_i`.
pub fn multiplicative_residual(a: &DenseRealMatrix, f: &[f64], g: &[f64]) -> Result<f64> {
    check_len(a.cols(), f.len())?;
    check_len(a.cols(), g.len())?;
    let fg: Vec<f64> = f.iter().zip(g).map(|(x, y)| x * y).collect();
    let lhs = a.mul_vec(&fg)?;
    let af = a.mul_vec(f)?;
    let ag = a.mul_vec(g)?;
    Ok(max_abs_diff(
        lhs.into_iter().zip(af.iter().zip(&ag).map(|(x, y)| x * y)),
    ))
}

/// Finite certificate for `A(f.g) = (Af).(Ag)` for all `f, g`:
/// `|a_ij^2 - a_ij| <= eps` everywhere and `|a_ij a_ik| <= eps` for `j != k`.
///
/// Each row is scanned in O(n): idempotence first, then the
/// lexicographically first offending pair `(j, k)` found through a suffix
/// maximum of `|a_ik|`.
pub fn multiplicative_certificate(a: &DenseRealMatrix, tol: Tolerance) -> Verdict {
    let eps = tol.eps();
    let n = a.cols();
    let mut suffix_max = vec![0.0f64; n + 1];
    for i in 0..a.rows() {
        let row = a.row(i);
        if let Some(j) = row.iter().position(|&x| (x * x - x).abs() > eps) {
            return Verdict::Fails(Witness::with_value(
                Clause::NotIdempotent,
                vec![i + 1, j + 1],
                row[j],
            ));
        }
        for j in (0..n).rev() {
            suffix_max[j] = suffix_max[j + 1].max(row[j].abs());
        }
        for j in 0..n.saturating_sub(1) {
            if (row[j] * suffix_max[j + 1]).abs() > eps {
                let k = (j + 1..n)
                    .find(|&k| (row[j] * row[k]).abs() > eps)
                    .expect("suffix maximum attained");
                return Verdict::Fails(Witness::with_value(
                    Clause::NonzeroProduct,
                    vec![i + 1, j + 1, k + 1],
                    row[j] * row[k],
                ));
            }
        }
    }
    Verdict::Holds
}

/// `max |A diag(f) - diag(Af) A|` entrywise.
pub fn diag_commutation_residual(a: &DenseRealMatrix, f: &[f64]) -> Result<f64> {
    let af = a.mul_vec(f)?;
    let mut worst = 0.0f64;
    for (i, afi) in af.iter().enumerate() {
        for (aij, fj) in a.row(i).iter().zip(f) {
            worst = worst.max((aij * fj - afi * aij).abs());
        }
    }
    Ok(worst)
}

/// `max |diag(f) A - A diag(A^T f)|` entrywise, `f` of length `m`.
pub fn transpose_diag_residual(a: &DenseRealMatrix, f: &[f64]) -> Result<f64> {
    let atf = a.transpose_mul_vec(f)?;
    let mut worst = 0.0f64;
    for (i, fi) in f.iter().enumerate() {
        for (aij, atfj) in a.row(i).iter().zip(&atf) {
            worst = worst.max((fi * aij - aij * atfj).abs());
        }
    }
    Ok(worst)
}

/// Whether [`classify_full_with`] stops at the first witness per flag or
/// collects every failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WitnessMode {
    #[default]
    First,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub shape: [usize; 2],
    pub is_binary: bool,
    pub is_row_permutation_like: bool,
    pub is_column_permutation_like: bool,
    pub row_sums_all_one: bool,
    pub is_composition_matrix: bool,
    pub witnesses: Vec<Witness>,
}

impl ClassificationReport {
    pub fn all_flags_true(&self) -> bool {
        self.is_binary
            && self.is_row_permutation_like
            && self.is_column_permutation_like
            && self.row_sums_all_one
            && self.is_composition_matrix
    }
}

pub fn classify_full(a: &DenseRealMatrix, tol: Tolerance) -> ClassificationReport {
    classify_full_with(a, tol, WitnessMode::First)
}

/// Classify by the entrywise definitions.
///
/// A row "sums to one" when `|sum - 1| <= n * eps`. The composition flag
/// also requires every snapped row to hold a 1, which only matters once
/// `n * eps >= 0.5`.
pub fn classify_full_with(
    a: &DenseRealMatrix,
    tol: Tolerance,
    mode: WitnessMode,
) -> ClassificationReport {
    let (m, n) = a.shape();
    let all = mode == WitnessMode::All;
    let mut witnesses = Vec::new();

    let snapped: Vec<Option<bool>> = a.as_slice().iter().map(|&x| snap(x, tol)).collect();
    let is_binary = snapped.iter().all(Option::is_some);
    for (k, s) in snapped.iter().enumerate() {
        if s.is_none() {
            witnesses.push(Witness::with_value(
                Clause::NonBinary,
                vec![k / n + 1, k % n + 1],
                a.as_slice()[k],
            ));
            if !all {
                break;
            }
        }
    }

    let mut row_pl = is_binary;
    let mut col_pl = is_binary;
    let mut zero_rows = Vec::new();
    if is_binary {
        let b = BinaryMatrix::new(m, n, snapped.iter().map(|s| s.unwrap()).collect())
            .expect("shape taken from a valid matrix");
        for i in 0..m {
            if let Some(w) = row_multiple_ones(&b, i) {
                row_pl = false;
                witnesses.push(w);
                if !all {
                    break;
                }
            }
        }
        for j in 0..n {
            if let Some(w) = column_multiple_ones(&b, j) {
                col_pl = false;
                witnesses.push(w);
                if !all {
                    break;
                }
            }
        }
        zero_rows = (0..m).filter(|&i| !b.row(i).contains(&true)).collect();
    }

    let row_tol = n as f64 * tol.eps();
    let mut row_sums_all_one = true;
    let mut flagged_zero_row = false;
    for (i, s) in a.row_sums().into_iter().enumerate() {
        if (s - 1.0).abs() > row_tol {
            if row_sums_all_one || all {
                witnesses.push(if zero_rows.contains(&i) {
                    flagged_zero_row = true;
                    Witness::new(Clause::ZeroRow, vec![i + 1])
                } else {
                    Witness::with_value(Clause::RowSum, vec![i + 1], s)
                });
            }
            row_sums_all_one = false;
        }
    }

    let is_composition_matrix =
        is_binary && row_pl && col_pl && row_sums_all_one && m <= n && zero_rows.is_empty();

    if m > n {
        witnesses.push(Witness::new(Clause::BadShape, vec![m, n]));
    }
    // zero rows whose raw sums were still within n * eps of 1
    if is_binary && row_sums_all_one && !flagged_zero_row {
        for &i in &zero_rows {
            witnesses.push(Witness::new(Clause::ZeroRow, vec![i + 1]));
            if !all {
                break;
            }
        }
    }

    ClassificationReport {
        shape: [m, n],
        is_binary,
        is_row_permutation_like: row_pl,
        is_column_permutation_like: col_pl,
        row_sums_all_one,
        is_composition_matrix,
        witnesses,
    }
}
