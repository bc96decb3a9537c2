//! `compmat`: classify, convert, apply, certify and recover discrete
//! composition matrices from the command line.
//!
//! Exit codes: 0 success (or "is a composition matrix"), 1 negative verdict,
//! 2 usage, I/O or parse error.

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use compmat::classify::{
    classify_entries_binary, classify_full_with, try_into_composition, Tolerance, WitnessMode,
};
use compmat::io::{self as cio, RecoverySummary};
use compmat::oracle::{
    closed_form_counts, count_classes, theorem1_sweep, theorem2_sweep, SweepConfig, MAX_CELLS,
    MAX_MATRICES_PER_SHAPE,
};
use compmat::recover::{project, ProbeConfig, RecoverError, RecoveryMode};
use compmat::{CompositionMatrix, DenseRealMatrix, Injection};

const TOL_ENV: &str = "COMPMAT_TOL";

#[derive(Parser)]
#[command(name = "compmat", version, about = "Discrete composition matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a matrix file and report which classes it belongs to.
    Classify {
        #[arg(long)]
        input: PathBuf,
        /// Absolute tolerance for 0/1 entries (default 1e-9, or $COMPMAT_TOL).
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        all_witnesses: bool,
        #[arg(long)]
        json: bool,
    },
    /// Convert an injection file to a matrix file, or back.
    #[command(group(ArgGroup::new("source").required(true).args(["injection", "matrix"])))]
    Convert {
        #[arg(long)]
        injection: Option<PathBuf>,
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Apply a composition matrix (or its transpose) to a vector.
    Apply {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        vector: PathBuf,
        #[arg(long)]
        transpose: bool,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Exhaustively check the characterisations and class counts at small sizes.
    Certify {
        #[arg(long)]
        max_m: usize,
        #[arg(long)]
        max_n: usize,
        /// Comma-separated real grid for the non-binary sweep.
        #[arg(long, default_value = "-1,0,0.5,1,2", allow_hyphen_values = true)]
        grid: String,
        /// Cap on m*n per shape.
        #[arg(long)]
        max_cells: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Count the classes among all binary m x n matrices (JSON).
    Count {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
    /// Project a real matrix onto the nearest composition matrix.
    Recover {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, default_value_t = 64)]
        probes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the projected matrix here: Matrix Market for `.mtx`, CSV for
        /// `.csv`, an injection file otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Rowwise,
    Injective,
}

impl From<ModeArg> for RecoveryMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Rowwise => RecoveryMode::Rowwise,
            ModeArg::Injective => RecoveryMode::Injective,
        }
    }
}

/// A negative verdict: printed to stderr, exit code 1.
#[derive(Debug)]
struct Rejected(String);

impl std::fmt::Display for Rejected {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Rejected {}

fn tolerance(flag: Option<f64>) -> Result<Tolerance> {
    let eps = match flag {
        Some(eps) => eps,
        None => match std::env::var(TOL_ENV) {
            Ok(s) => s
                .trim()
                .parse()
                .with_context(|| format!("{TOL_ENV}={s:?} is not a number"))?,
            Err(_) => Tolerance::DEFAULT_EPS,
        },
    };
    Ok(Tolerance::new(eps)?)
}

fn read_matrix(path: &Path) -> Result<DenseRealMatrix> {
    cio::read_matrix(path).with_context(|| format!("reading {}", path.display()))
}

fn read_composition(path: &Path, tol: Tolerance) -> Result<CompositionMatrix> {
    let a = read_matrix(path)?;
    let b = classify_entries_binary(&a, tol)
        .map_err(|e| Rejected(format!("{}: {e}", path.display())))?;
    let p = try_into_composition(&b).map_err(|e| {
        Rejected(format!(
            "{} is not a composition matrix: {e}",
            path.display()
        ))
    })?;
    Ok(p)
}

fn write_composition(p: &CompositionMatrix, path: &Path) -> Result<()> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let result = match ext {
        "mtx" | "mm" | "csv" | "txt" => cio::write_matrix(&p.to_dense(), path),
        _ => cio::write_injection_file(&Injection::from(p.clone()), path),
    };
    result.with_context(|| format!("writing {}", path.display()))
}

fn parse_grid(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .with_context(|| format!("invalid grid value {t:?}"))
        })
        .collect()
}

/// Largest cell count for which `grid_len^cells` stays within the
/// per-shape enumeration limit.
fn feasible_cells(grid_len: usize) -> usize {
    let mut cells = 0;
    let mut count: u128 = 1;
    while cells < MAX_CELLS && count * grid_len as u128 <= MAX_MATRICES_PER_SHAPE {
        count *= grid_len as u128;
        cells += 1;
    }
    cells
}

fn certify(
    max_m: usize,
    max_n: usize,
    grid: &str,
    max_cells: Option<usize>,
    seed: u64,
) -> Result<bool> {
    let grid = parse_grid(grid)?;
    let binary = SweepConfig::binary(max_m, max_n).with_seed(seed);
    let binary = match max_cells {
        Some(c) => binary.with_max_cells(c),
        None => binary,
    };
    let grid_cap = max_cells
        .unwrap_or(MAX_CELLS)
        .min(feasible_cells(grid.len()));
    let real = SweepConfig::new(max_m, max_n)
        .with_grid(grid)
        .with_seed(seed)
        .with_max_cells(grid_cap);

    let mut out = io::stdout().lock();
    let mut ok = true;
    for (label, cfg) in [("binary grid", &binary), ("real grid", &real)] {
        for (name, sweep) in [
            (
                "row characterisation",
                theorem1_sweep as fn(&SweepConfig) -> _,
            ),
            ("column characterisation", theorem2_sweep),
        ] {
            let v = sweep(cfg)?;
            let status = if v.passed() { "ok" } else { "COUNTEREXAMPLE" };
            writeln!(
                out,
                "{name} ({label}, m*n <= {}): {status}, {} matrices over {} shapes",
                cfg.shapes().iter().map(|(m, n)| m * n).max().unwrap_or(0),
                v.matrices_checked,
                v.shapes_checked
            )?;
            if let Some(c) = &v.counterexample {
                writeln!(out, "  {}", serde_json::to_string(c)?)?;
                ok = false;
            }
        }
    }
    for (m, n) in binary.shapes() {
        let counted = count_classes(m, n)?;
        let expected = closed_form_counts(m, n);
        let matches = counted == expected;
        writeln!(
            out,
            "counts {m}x{n}: row {} column {} both {} composition {}: {}",
            counted.n_row_permutation_like,
            counted.n_column_permutation_like,
            counted.n_both,
            counted.n_composition,
            if matches { "ok" } else { "MISMATCH" }
        )?;
        ok &= matches;
    }
    Ok(ok)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Classify {
            input,
            tol,
            all_witnesses,
            json,
        } => {
            let tol = tolerance(tol)?;
            let a = read_matrix(&input)?;
            let mode = if all_witnesses {
                WitnessMode::All
            } else {
                WitnessMode::First
            };
            let report = classify_full_with(&a, tol, mode);
            cio::write_report(&report, io::stdout().lock(), json)?;
            Ok(report.is_composition_matrix)
        }
        Command::Convert {
            injection,
            matrix,
            out,
            tol,
        } => {
            if let Some(path) = injection {
                let pi = cio::read_injection_file(&path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let p = CompositionMatrix::from(pi);
                cio::write_matrix(&p.to_dense(), &out)
                    .with_context(|| format!("writing {}", out.display()))?;
            } else if let Some(path) = matrix {
                let p = read_composition(&path, tolerance(tol)?)?;
                cio::write_injection_file(&Injection::from(p), &out)
                    .with_context(|| format!("writing {}", out.display()))?;
            }
            Ok(true)
        }
        Command::Apply {
            matrix,
            vector,
            transpose,
            tol,
        } => {
            let p = read_composition(&matrix, tolerance(tol)?)?;
            let v = cio::read_vector_file(&vector)
                .with_context(|| format!("reading {}", vector.display()))?;
            let result = if transpose {
                p.apply_pushforward(&v)?
            } else {
                p.apply_pullback(&v)?
            };
            cio::write_vector(&result, io::stdout().lock())?;
            Ok(true)
        }
        Command::Certify {
            max_m,
            max_n,
            grid,
            max_cells,
            seed,
        } => certify(max_m, max_n, &grid, max_cells, seed),
        Command::Count { m, n } => {
            let counts = count_classes(m, n)?;
            let mut out = io::stdout().lock();
            serde_json::to_writer(&mut out, &counts)?;
            writeln!(out)?;
            Ok(true)
        }
        Command::Recover {
            input,
            mode,
            probes,
            seed,
            out,
        } => {
            let c = read_matrix(&input)?;
            let result = match project(&c, mode.into(), ProbeConfig { probes, seed }) {
                Ok(r) => r,
                Err(e @ RecoverError::ColumnConflict { .. }) => {
                    return Err(Rejected(format!("{e}; try --mode injective")).into())
                }
                Err(e) => bail!(e),
            };
            if let Some(path) = out {
                write_composition(&result.matrix, &path)?;
            }
            let mut stdout = io::stdout().lock();
            serde_json::to_writer(&mut stdout, &RecoverySummary::from(&result))?;
            writeln!(stdout)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Rejected>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feasible_cells_for_default_grid() {
        // 5^8 = 390625 <= 2^20 < 5^9
        assert_eq!(feasible_cells(5), 8);
        assert_eq!(feasible_cells(2), 20);
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("-1, 0,0.5").unwrap(), vec![-1.0, 0.0, 0.5]);
        assert!(parse_grid("1,,2").is_err());
    }
}
