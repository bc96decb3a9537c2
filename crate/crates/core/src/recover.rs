//! Projection of noisy real matrices onto discrete composition matrices.
//!
//! `project_rowwise` takes each row's argmax and refuses to repair column
//! collisions. `project_injective` solves the rectangular assignment problem
//! `max sum_i c[i, pi(i)]` over injections `pi` with a shortest augmenting
//! path (Hungarian) solver, then walks the rows in order to pick the
//! lexicographically smallest optimal assignment.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::multiplicative_residual;
use crate::composition::CompositionMatrix;
use crate::dense::DenseRealMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecoveryMode {
    Rowwise,
    Injective,
}

impl fmt::Display for RecoveryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RecoveryMode::Rowwise => "rowwise",
            RecoveryMode::Injective => "injective",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecoverError {
    /// Several rows select the same column (1-based indices).
    #[error("rows {rows:?} all select column {column}")]
    ColumnConflict { column: usize, rows: Vec<usize> },
    #[error("a {m}x{n} matrix has more rows than columns")]
    BadShape { m: usize, n: usize },
    #[error("at least one probe is required")]
    ZeroProbes,
}

/// Random probes used to estimate how far the input is from satisfying
/// `C(f.g) = (Cf).(Cg)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub probes: usize,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            probes: 64,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult {
    pub matrix: CompositionMatrix,
    pub mode: RecoveryMode,
    /// `sum_i c[i, row_to_col[i]]`, summed in row order.
    pub score: f64,
    /// `multiplicativity_score` of the input matrix.
    pub residual: f64,
    pub ties_broken: usize,
}

/// Mean normalised multiplicative residual of `c` over seeded random pairs
/// `(f, g)` with entries uniform on `[-1, 1]`. Probe `p` draws from the
/// ChaCha8 stream `p` of the master seed.
pub fn multiplicativity_score(
    c: &DenseRealMatrix,
    probes: usize,
    seed: u64,
) -> Result<f64, RecoverError> {
    if probes == 0 {
        return Err(RecoverError::ZeroProbes);
    }
    let n = c.cols();
    let mut total = 0.0;
    for p in 0..probes {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(p as u64);
        let f: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let g: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let r = multiplicative_residual(c, &f, &g).expect("probe length equals column count");
        let f_norm = f.iter().fold(1.0f64, |acc, x| acc.max(x.abs()));
        let g_norm = g.iter().fold(1.0f64, |acc, x| acc.max(x.abs()));
        total += r / (f_norm * g_norm);
    }
    Ok(total / probes as f64)
}

fn check_shape(c: &DenseRealMatrix) -> Result<(), RecoverError> {
    let (m, n) = c.shape();
    if m > n {
        return Err(RecoverError::BadShape { m, n });
    }
    Ok(())
}

fn score_of(c: &DenseRealMatrix, row_to_col: &[usize]) -> f64 {
    row_to_col
        .iter()
        .enumerate()
        .map(|(i, &j)| c.get(i, j))
        .sum()
}

pub fn project_rowwise(c: &DenseRealMatrix) -> Result<RecoveryResult, RecoverError> {
    project_rowwise_with(c, ProbeConfig::default())
}

/// Row-wise argmax, ties to the smallest column.
pub fn project_rowwise_with(
    c: &DenseRealMatrix,
    probes: ProbeConfig,
) -> Result<RecoveryResult, RecoverError> {
    check_shape(c)?;
    let (m, n) = c.shape();
    let mut row_to_col = Vec::with_capacity(m);
    let mut ties_broken = 0;
    for i in 0..m {
        let row = c.row(i);
        let mut best = 0;
        for j in 1..n {
            if row[j] > row[best] {
                best = j;
            }
        }
        if row.iter().filter(|&&x| x == row[best]).count() > 1 {
            ties_broken += 1;
        }
        row_to_col.push(best);
    }

    let mut owner: Vec<Option<usize>> = vec![None; n];
    for (i, &j) in row_to_col.iter().enumerate() {
        if owner[j].is_some() {
            let rows = row_to_col
                .iter()
                .enumerate()
                .filter(|(_, &jj)| jj == j)
                .map(|(r, _)| r + 1)
                .collect();
            return Err(RecoverError::ColumnConflict {
                column: j + 1,
                rows,
            });
        }
        owner[j] = Some(i);
    }

    Ok(RecoveryResult {
        score: score_of(c, &row_to_col),
        matrix: CompositionMatrix::from_parts_unchecked(n, row_to_col),
        mode: RecoveryMode::Rowwise,
        residual: multiplicativity_score(c, probes.probes, probes.seed)?,
        ties_broken,
    })
}

pub fn project_injective(c: &DenseRealMatrix) -> Result<RecoveryResult, RecoverError> {
    project_injective_with(c, ProbeConfig::default())
}

/// Optimal assignment, ties to the lexicographically smallest `row_to_col`.
pub fn project_injective_with(
    c: &DenseRealMatrix,
    probes: ProbeConfig,
) -> Result<RecoveryResult, RecoverError> {
    check_shape(c)?;
    let (m, n) = c.shape();
    let scale = 1.0
        + (0..m)
            .map(|i| c.row(i).iter().fold(0.0f64, |a, x| a.max(x.abs())))
            .sum::<f64>();
    let tol = 64.0 * f64::EPSILON * (m + n) as f64 * scale;

    let rows: Vec<usize> = (0..m).collect();
    let cols: Vec<usize> = (0..n).collect();
    let Assignment {
        row_to_col: mut current,
        row_potential,
        col_potential,
    } = max_assignment(c, &rows, &cols);

    let mut used = vec![false; n];
    let mut ties_broken = 0;
    for i in 0..m {
        // Every edge of every optimal assignment is tight under the dual.
        let mut candidates: Vec<usize> = (0..n)
            .filter(|&j| {
                !used[j] && (c.get(i, j) - row_potential[i] - col_potential[j]).abs() <= tol
            })
            .collect();
        if !candidates.contains(&current[i]) {
            candidates.push(current[i]);
            candidates.sort_unstable();
        }
        let rest_opt: f64 = (i..m).map(|r| c.get(r, current[r])).sum();
        let rest_rows: Vec<usize> = (i + 1..m).collect();
        let best_with = |j: usize| -> Option<Vec<usize>> {
            let rest_cols: Vec<usize> = (0..n).filter(|&k| !used[k] && k != j).collect();
            let sub = max_assignment(c, &rest_rows, &rest_cols);
            let value = c.get(i, j)
                + rest_rows
                    .iter()
                    .zip(&sub.row_to_col)
                    .map(|(&r, &k)| c.get(r, k))
                    .sum::<f64>();
            (value >= rest_opt - tol).then_some(sub.row_to_col)
        };
        let mut tied = false;
        for &j in &candidates {
            if j < current[i] {
                if let Some(rest) = best_with(j) {
                    current[i] = j;
                    current[i + 1..].copy_from_slice(&rest);
                    // the previous choice is optimal too
                    tied = true;
                    break;
                }
            } else if j > current[i] && best_with(j).is_some() {
                tied = true;
                break;
            }
        }
        if tied {
            ties_broken += 1;
        }
        used[current[i]] = true;
    }

    Ok(RecoveryResult {
        score: score_of(c, &current),
        matrix: CompositionMatrix::from_parts_unchecked(n, current),
        mode: RecoveryMode::Injective,
        residual: multiplicativity_score(c, probes.probes, probes.seed)?,
        ties_broken,
    })
}

pub fn project(
    c: &DenseRealMatrix,
    mode: RecoveryMode,
    probes: ProbeConfig,
) -> Result<RecoveryResult, RecoverError> {
    match mode {
        RecoveryMode::Rowwise => project_rowwise_with(c, probes),
        RecoveryMode::Injective => project_injective_with(c, probes),
    }
}

struct Assignment {
    /// Column (index into the full matrix) for each requested row.
    row_to_col: Vec<usize>,
    /// Dual potentials for the maximisation: `c_ij <= u_i + v_j`, tight on
    /// the assignment, `v_j >= 0` and zero on unassigned columns.
    row_potential: Vec<f64>,
    col_potential: Vec<f64>,
}

/// Maximum-weight assignment of `rows` into distinct `cols` of `c`
/// (`rows.len() <= cols.len()`). Runs the O(r^2 k) shortest augmenting
/// path method on costs `-c`, adding one row per phase.
fn max_assignment(c: &DenseRealMatrix, rows: &[usize], cols: &[usize]) -> Assignment {
    let r = rows.len();
    let k = cols.len();
    debug_assert!(r <= k);
    let cost = |i: usize, j: usize| -c.get(rows[i - 1], cols[j - 1]);

    // 1-based with a sentinel column 0 that holds the row being inserted.
    let mut u = vec![0.0f64; r + 1];
    let mut v = vec![0.0f64; k + 1];
    let mut owner = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];
    for i in 1..=r {
        owner[0] = i;
        let mut j0 = 0;
        let mut min_slack = vec![f64::INFINITY; k + 1];
        let mut visited = vec![false; k + 1];
        loop {
            visited[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=k {
                if visited[j] {
                    continue;
                }
                let slack = cost(i0, j) - u[i0] - v[j];
                if slack < min_slack[j] {
                    min_slack[j] = slack;
                    way[j] = j0;
                }
                if min_slack[j] < delta {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for j in 0..=k {
                if visited[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![0; r];
    for j in 1..=k {
        if owner[j] != 0 {
            row_to_col[owner[j] - 1] = cols[j - 1];
        }
    }
    // negate back to the maximisation dual, indexed by full-matrix position
    let mut row_potential = vec![0.0; c.rows()];
    for (i, &row) in rows.iter().enumerate() {
        row_potential[row] = -u[i + 1];
    }
    let mut col_potential = vec![0.0; c.cols()];
    for (j, &col) in cols.iter().enumerate() {
        col_potential[col] = -v[j + 1];
    }
    Assignment {
        row_to_col,
        row_potential,
        col_potential,
    }
}
