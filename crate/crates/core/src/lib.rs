//! Discrete composition matrices.
//!
//! An injection `pi: {1..m} -> {1..n}` induces the pullback operator
//! `(P f)_i = f_{pi(i)}`, whose matrix has exactly one 1 per row and at most
//! one 1 per column. This crate builds and applies such matrices
//! ([`composition`]), decides whether an arbitrary real matrix belongs to
//! the row-/column-permutation-like or composition classes ([`classify`]),
//! checks those characterisations exhaustively at small sizes ([`oracle`]),
//! projects noisy matrices back onto composition matrices ([`recover`]) and
//! reads and writes the file formats used by the command line tool ([`io`]).

pub mod classify;
pub mod composition;
pub mod dense;
pub mod error;
pub mod io;
pub mod oracle;
pub mod recover;

pub use classify::{
    classify_entries_binary, classify_full, classify_full_with, diag_commutation_residual,
    is_column_permutation_like, is_row_permutation_like, multiplicative_certificate,
    multiplicative_residual, transpose_diag_residual, try_into_composition, ClassificationReport,
    Clause, CompositionError, NonBinaryEntry, Tolerance, Verdict, Witness, WitnessMode,
};
pub use composition::{injection_to_matrix, matrix_to_injection, CompositionMatrix, Injection};
pub use dense::{hadamard, BinaryMatrix, DenseRealMatrix, RealVector};
pub use error::{Error, Result};
pub use oracle::{
    closed_form_counts, count_classes, enumerate_binary, random_injection, theorem1_sweep,
    theorem2_sweep, ClassCounts, SweepConfig, SweepVerdict,
};
pub use recover::{
    multiplicativity_score, project, project_injective, project_rowwise, ProbeConfig, RecoverError,
    RecoveryMode, RecoveryResult,
};
