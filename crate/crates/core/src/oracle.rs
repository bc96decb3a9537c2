//! Exhaustive ground truth at small sizes.
//!
//! Matrices are enumerated over a finite value grid and each one is judged
//! by several independent routes: the entrywise definition, the operator
//! identities evaluated literally on standard basis vectors, and the O(mn)
//! certificate from [`crate::classify`]. Any disagreement is a
//! counterexample.
//!
//! Randomness comes from `ChaCha8Rng` (rand_chacha 0.3) seeded through
//! `SeedableRng::seed_from_u64`, with ranges drawn by rand 0.8's
//! `gen_range`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classify::{
    classify_entries_binary, classify_full, diag_commutation_residual, is_column_permutation_like,
    is_row_permutation_like, multiplicative_certificate, multiplicative_residual,
    transpose_diag_residual, Tolerance,
};
use crate::composition::Injection;
use crate::dense::{BinaryMatrix, DenseRealMatrix, RealVector};
use crate::error::{Error, Result};

/// Largest number of cells a single enumerated shape may have.
pub const MAX_CELLS: usize = 20;
/// Largest number of matrices enumerated for a single shape.
pub const MAX_MATRICES_PER_SHAPE: u128 = 1 << MAX_CELLS;

pub const DEFAULT_GRID: [f64; 5] = [-1.0, 0.0, 0.5, 1.0, 2.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub max_m: usize,
    pub max_n: usize,
    /// Upper bound on `m * n` per shape; defaults to `max_m * max_n`.
    pub max_cells: Option<usize>,
    pub real_grid: Vec<f64>,
    pub seed: u64,
    /// Random `(f, g)` pairs tried on every matrix the definition accepts.
    pub random_probes: usize,
}

impl SweepConfig {
    pub fn new(max_m: usize, max_n: usize) -> Self {
        Self {
            max_m,
            max_n,
            max_cells: None,
            real_grid: DEFAULT_GRID.to_vec(),
            seed: 0,
            random_probes: 2,
        }
    }

    pub fn binary(max_m: usize, max_n: usize) -> Self {
        Self {
            real_grid: vec![0.0, 1.0],
            ..Self::new(max_m, max_n)
        }
    }

    pub fn with_grid(mut self, grid: Vec<f64>) -> Self {
        self.real_grid = grid;
        self
    }

    pub fn with_max_cells(mut self, cells: usize) -> Self {
        self.max_cells = Some(cells);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Every shape `(m, n)` the sweep covers, in ascending order.
    pub fn shapes(&self) -> Vec<(usize, usize)> {
        let cap = self.cell_cap();
        let mut out = Vec::new();
        for m in 1..=self.max_m {
            for n in 1..=self.max_n {
                if m * n <= cap {
                    out.push((m, n));
                }
            }
        }
        out
    }

    fn cell_cap(&self) -> usize {
        let full = self.max_m.saturating_mul(self.max_n);
        self.max_cells.map_or(full, |c| c.min(full))
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_m == 0 || self.max_n == 0 {
            return Err(Error::EmptyShape {
                rows: self.max_m,
                cols: self.max_n,
            });
        }
        let cells = self.cell_cap();
        if cells > MAX_CELLS {
            return Err(Error::Guard(format!(
                "shapes of up to {cells} cells requested, limit is {MAX_CELLS}"
            )));
        }
        if self.real_grid.iter().any(|x| !x.is_finite()) {
            return Err(Error::Guard("grid values must be finite".into()));
        }
        if !self.real_grid.contains(&0.0) || !self.real_grid.contains(&1.0) {
            return Err(Error::Guard("grid must contain 0 and 1".into()));
        }
        let mut sorted = self.real_grid.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Guard("grid values must be distinct".into()));
        }
        let largest = self.shapes().iter().map(|(m, n)| m * n).max().unwrap_or(0);
        grid_count(self.real_grid.len(), largest)?;
        Ok(())
    }
}

fn grid_count(grid_len: usize, cells: usize) -> Result<u128> {
    let mut count: u128 = 1;
    for _ in 0..cells {
        count = count.saturating_mul(grid_len as u128);
    }
    if count > MAX_MATRICES_PER_SHAPE {
        return Err(Error::Guard(format!(
            "{grid_len}^{cells} matrices per shape exceeds {MAX_MATRICES_PER_SHAPE}"
        )));
    }
    Ok(count)
}

/// All `2^(m n)` 0/1 matrices of shape `m x n`, in ascending order of the
/// bit pattern read row-major with entry `(1, 1)` as the most significant bit.
pub fn enumerate_binary(m: usize, n: usize) -> Result<impl Iterator<Item = BinaryMatrix>> {
    if m == 0 || n == 0 {
        return Err(Error::EmptyShape { rows: m, cols: n });
    }
    let cells = m
        .checked_mul(n)
        .filter(|&c| c <= MAX_CELLS)
        .ok_or_else(|| Error::Guard(format!("{m}x{n} has more than {MAX_CELLS} cells")))?;
    Ok((0u64..1u64 << cells).map(move |pattern| {
        let bits = (0..cells)
            .map(|k| pattern >> (cells - 1 - k) & 1 == 1)
            .collect();
        BinaryMatrix::new(m, n, bits).expect("shape checked above")
    }))
}

/// All matrices of shape `m x n` with entries from `grid`, in odometer order
/// (last entry varies fastest, values in grid order).
pub fn enumerate_grid(
    m: usize,
    n: usize,
    grid: &[f64],
) -> Result<impl Iterator<Item = DenseRealMatrix> + '_> {
    if m == 0 || n == 0 {
        return Err(Error::EmptyShape { rows: m, cols: n });
    }
    if grid.is_empty() {
        return Err(Error::Guard("empty grid".into()));
    }
    let cells = m * n;
    let total = grid_count(grid.len(), cells)?;
    let base = grid.len() as u128;
    Ok((0..total).map(move |mut code| {
        let mut data = vec![0.0; cells];
        for slot in data.iter_mut().rev() {
            *slot = grid[(code % base) as usize];
            code /= base;
        }
        DenseRealMatrix::new(m, n, data).expect("finite grid values")
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub shape: [usize; 2],
    pub n_row_permutation_like: u64,
    pub n_column_permutation_like: u64,
    pub n_both: u64,
    pub n_composition: u64,
}

/// Count each class over all binary `m x n` matrices using `classify_full`.
pub fn count_classes(m: usize, n: usize) -> Result<ClassCounts> {
    let mut counts = ClassCounts {
        shape: [m, n],
        n_row_permutation_like: 0,
        n_column_permutation_like: 0,
        n_both: 0,
        n_composition: 0,
    };
    for b in enumerate_binary(m, n)? {
        let r = classify_full(&b.to_dense(), Tolerance::exact());
        counts.n_row_permutation_like += r.is_row_permutation_like as u64;
        counts.n_column_permutation_like += r.is_column_permutation_like as u64;
        counts.n_both += (r.is_row_permutation_like && r.is_column_permutation_like) as u64;
        counts.n_composition += r.is_composition_matrix as u64;
    }
    Ok(counts)
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn falling_factorial(n: u64, k: u64) -> u64 {
    (0..k).map(|i| n - i).product()
}

/// Closed-form class sizes: `(n+1)^m` row-permutation-like, `(m+1)^n`
/// column-permutation-like, `sum_k C(m,k) C(n,k) k!` partial permutation
/// matrices, and `n!/(n-m)!` composition matrices (0 when `m > n`).
pub fn closed_form_counts(m: usize, n: usize) -> ClassCounts {
    let (mu, nu) = (m as u64, n as u64);
    ClassCounts {
        shape: [m, n],
        n_row_permutation_like: (nu + 1).pow(m as u32),
        n_column_permutation_like: (mu + 1).pow(n as u32),
        n_both: (0..=mu.min(nu))
            .map(|k| binomial(mu, k) * binomial(nu, k) * falling_factorial(k, k))
            .sum(),
        n_composition: if m <= n { falling_factorial(nu, mu) } else { 0 },
    }
}

/// The judgements of each route on a single matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Judgement {
    /// Entrywise definition.
    pub definition: bool,
    /// Multiplicative identity on every pair of basis vectors.
    pub basis_multiplicative: bool,
    /// Diagonal identity on every basis vector.
    pub basis_diag: bool,
    /// O(mn) entrywise certificate.
    pub certificate: bool,
}

impl Judgement {
    pub fn agrees(&self) -> bool {
        let d = self.definition;
        self.basis_multiplicative == d && self.basis_diag == d && self.certificate == d
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub shape: [usize; 2],
    /// Row-major entries.
    pub entries: Vec<f64>,
    pub judgement: Judgement,
    /// Set when the definition holds but a random probe left a nonzero residual.
    pub random_probe_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepVerdict {
    pub shapes_checked: usize,
    pub matrices_checked: u64,
    /// Matrices the definition accepted.
    pub accepted: u64,
    pub counterexample: Option<Counterexample>,
}

impl SweepVerdict {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

fn basis(len: usize, j: usize) -> Vec<f64> {
    RealVector::basis(len, j).into_vec()
}

/// Literal check of `A(e_j . e_k) = (A e_j).(A e_k)` for all `j, k`.
pub fn basis_multiplicative_holds(a: &DenseRealMatrix) -> bool {
    let n = a.cols();
    (0..n).all(|j| {
        (0..n).all(|k| {
            multiplicative_residual(a, &basis(n, j), &basis(n, k)).expect("basis length") == 0.0
        })
    })
}

/// Literal check of `A diag(e_j) = diag(A e_j) A` for all `j`.
pub fn basis_diag_holds(a: &DenseRealMatrix) -> bool {
    let n = a.cols();
    (0..n).all(|j| diag_commutation_residual(a, &basis(n, j)).expect("basis length") == 0.0)
}

/// Literal check of `diag(e_j) A = A diag(A^T e_j)` for all `j` in `1..=m`.
pub fn basis_transpose_diag_holds(a: &DenseRealMatrix) -> bool {
    let m = a.rows();
    (0..m).all(|j| transpose_diag_residual(a, &basis(m, j)).expect("basis length") == 0.0)
}

fn row_definition(a: &DenseRealMatrix) -> bool {
    classify_entries_binary(a, Tolerance::exact())
        .map(|b| is_row_permutation_like(&b).holds())
        .unwrap_or(false)
}

fn column_definition(a: &DenseRealMatrix) -> bool {
    classify_entries_binary(a, Tolerance::exact())
        .map(|b| is_column_permutation_like(&b).holds())
        .unwrap_or(false)
}

/// All routes for "row-permutation-like" on one matrix.
pub fn judge_row(a: &DenseRealMatrix) -> Judgement {
    Judgement {
        definition: row_definition(a),
        basis_multiplicative: basis_multiplicative_holds(a),
        basis_diag: basis_diag_holds(a),
        certificate: multiplicative_certificate(a, Tolerance::exact()).holds(),
    }
}

/// All routes for "column-permutation-like" on one matrix.
pub fn judge_column(a: &DenseRealMatrix) -> Judgement {
    let at = a.transpose();
    Judgement {
        definition: column_definition(a),
        basis_multiplicative: basis_multiplicative_holds(&at),
        basis_diag: basis_transpose_diag_holds(a),
        certificate: multiplicative_certificate(&at, Tolerance::exact()).holds(),
    }
}

fn random_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

fn sweep(
    cfg: &SweepConfig,
    judge: fn(&DenseRealMatrix) -> Judgement,
    probe: fn(&DenseRealMatrix, &mut ChaCha8Rng) -> f64,
) -> Result<SweepVerdict> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let shapes = cfg.shapes();
    let mut verdict = SweepVerdict {
        shapes_checked: shapes.len(),
        matrices_checked: 0,
        accepted: 0,
        counterexample: None,
    };
    for &(m, n) in &shapes {
        for a in enumerate_grid(m, n, &cfg.real_grid)? {
            verdict.matrices_checked += 1;
            let judgement = judge(&a);
            let mut probe_residual = None;
            if judgement.definition {
                verdict.accepted += 1;
                for _ in 0..cfg.random_probes {
                    let r = probe(&a, &mut rng);
                    if r != 0.0 {
                        probe_residual = Some(r);
                        break;
                    }
                }
            }
            if !judgement.agrees() || probe_residual.is_some() {
                verdict.counterexample = Some(Counterexample {
                    shape: [m, n],
                    entries: a.as_slice().to_vec(),
                    judgement,
                    random_probe_residual: probe_residual,
                });
                return Ok(verdict);
            }
        }
    }
    Ok(verdict)
}

fn row_probe(a: &DenseRealMatrix, rng: &mut ChaCha8Rng) -> f64 {
    let f = random_vec(rng, a.cols());
    let g = random_vec(rng, a.cols());
    let mult = multiplicative_residual(a, &f, &g).expect("lengths match");
    mult.max(diag_commutation_residual(a, &f).expect("lengths match"))
}

fn column_probe(a: &DenseRealMatrix, rng: &mut ChaCha8Rng) -> f64 {
    let f = random_vec(rng, a.rows());
    let g = random_vec(rng, a.rows());
    let mult = multiplicative_residual(&a.transpose(), &f, &g).expect("lengths match");
    mult.max(transpose_diag_residual(a, &f).expect("lengths match"))
}

/// Row-permutation-like ⇔ basis multiplicativity ⇔ basis diag commutation
/// (⇔ certificate), over every grid matrix in the configured shapes. The
/// first disagreement in enumeration order is returned.
pub fn theorem1_sweep(cfg: &SweepConfig) -> Result<SweepVerdict> {
    sweep(cfg, judge_row, row_probe)
}

/// The transposed statement: column-permutation-like ⇔ multiplicativity of
/// `A^T` ⇔ `diag(f) A = A diag(A^T f)` on basis vectors.
pub fn theorem2_sweep(cfg: &SweepConfig) -> Result<SweepVerdict> {
    sweep(cfg, judge_column, column_probe)
}

/// Uniform random injection `{1..m} -> {1..n}` by a partial Fisher–Yates
/// shuffle of `0..n`, deterministic in `seed`.
pub fn random_injection(m: usize, n: usize, seed: u64) -> Result<Injection> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_injection_with(m, n, &mut rng)
}

pub fn random_injection_with<R: Rng + ?Sized>(
    m: usize,
    n: usize,
    rng: &mut R,
) -> Result<Injection> {
    if m == 0 || n == 0 {
        return Err(Error::EmptyShape { rows: m, cols: n });
    }
    if m > n {
        return Err(Error::DomainExceedsCodomain { m, n });
    }
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..m {
        let j = rng.gen_range(i..n);
        pool.swap(i, j);
    }
    pool.truncate(m);
    Injection::new(n, pool)
}
