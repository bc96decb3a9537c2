//! Text formats: Matrix Market coordinate files, dense CSV, injection files,
//! vectors and classification reports.
//!
//! Every index written or read here is 1-based.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::classify::ClassificationReport;
use crate::composition::Injection;
use crate::dense::{DenseRealMatrix, RealVector};
use crate::error::Error;
use crate::recover::{RecoveryMode, RecoveryResult};

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> IoError {
    IoError::Parse {
        line,
        column,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    MatrixMarket,
    Csv,
}

impl MatrixFormat {
    /// `.csv` and `.txt` are CSV; everything else is Matrix Market.
    pub fn from_path(path: &Path) -> Self {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
        {
            Some(ext) if ext == "csv" || ext == "txt" => MatrixFormat::Csv,
            _ => MatrixFormat::MatrixMarket,
        }
    }
}

/// Whitespace-separated tokens of a line with their 1-based columns.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    line.char_indices()
        .filter(|&(i, c)| {
            !c.is_whitespace()
                && line[..i]
                    .chars()
                    .next_back()
                    .is_none_or(char::is_whitespace)
        })
        .map(move |(i, _)| {
            let rest = &line[i..];
            let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
            (i + 1, &rest[..end])
        })
}

fn parse_num<T: std::str::FromStr>(
    line: usize,
    column: usize,
    tok: &str,
    what: &str,
) -> Result<T, IoError> {
    tok.parse()
        .map_err(|_| parse_err(line, column, format!("invalid {what} {tok:?}")))
}

#[derive(Clone, Copy, PartialEq)]
enum Field {
    Real,
    Pattern,
}

#[derive(Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

/// Read a Matrix Market file (`coordinate` or `array`; `real`, `integer`
/// or `pattern`; `general`, `symmetric` or `skew-symmetric`).
pub fn read_matrix_market<R: BufRead>(reader: R) -> Result<DenseRealMatrix, IoError> {
    let mut lines = reader.lines().enumerate().map(|(k, l)| (k + 1, l));
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, 1, "empty file"))?;
    let header = header?;
    let words: Vec<(usize, String)> = tokens(&header)
        .map(|(c, t)| (c, t.to_ascii_lowercase()))
        .collect();
    let word = |k: usize| words.get(k).map(|(c, w)| (*c, w.as_str()));
    match word(0) {
        Some((_, "%%matrixmarket")) => {}
        _ => return Err(parse_err(1, 1, "header must start with %%MatrixMarket")),
    }
    match word(1) {
        Some((_, "matrix")) => {}
        Some((c, w)) => return Err(parse_err(1, c, format!("unsupported object {w:?}"))),
        None => return Err(parse_err(1, header.len() + 1, "missing object")),
    }
    let coordinate = match word(2) {
        Some((_, "coordinate")) => true,
        Some((_, "array")) => false,
        Some((c, w)) => return Err(parse_err(1, c, format!("unsupported format {w:?}"))),
        None => return Err(parse_err(1, header.len() + 1, "missing format")),
    };
    let field = match word(3) {
        Some((_, "real" | "integer" | "double")) => Field::Real,
        Some((_, "pattern")) if coordinate => Field::Pattern,
        Some((c, w)) => return Err(parse_err(1, c, format!("unsupported field {w:?}"))),
        None => return Err(parse_err(1, header.len() + 1, "missing field")),
    };
    let symmetry = match word(4) {
        Some((_, "general")) => Symmetry::General,
        Some((_, "symmetric")) => Symmetry::Symmetric,
        Some((_, "skew-symmetric")) => Symmetry::SkewSymmetric,
        Some((c, w)) => return Err(parse_err(1, c, format!("unsupported symmetry {w:?}"))),
        None => return Err(parse_err(1, header.len() + 1, "missing symmetry")),
    };

    let mut content = lines.filter_map(|(no, l)| match l {
        Ok(l) if l.trim().is_empty() || l.trim_start().starts_with('%') => None,
        other => Some((no, other)),
    });

    let (size_no, size_line) = content
        .next()
        .ok_or_else(|| parse_err(2, 1, "missing size line"))?;
    let size_line = size_line?;
    let size: Vec<(usize, &str)> = tokens(&size_line).collect();
    let expected = if coordinate { 3 } else { 2 };
    if size.len() != expected {
        return Err(parse_err(
            size_no,
            1,
            format!("size line needs {expected} integers, found {}", size.len()),
        ));
    }
    let m: usize = parse_num(size_no, size[0].0, size[0].1, "row count")?;
    let n: usize = parse_num(size_no, size[1].0, size[1].1, "column count")?;
    if m == 0 || n == 0 {
        return Err(IoError::Invalid {
            line: size_no,
            source: Error::EmptyShape { rows: m, cols: n },
        });
    }
    if symmetry != Symmetry::General && m != n {
        return Err(parse_err(
            size_no,
            1,
            "symmetric storage requires a square matrix",
        ));
    }

    let mut data = vec![0.0; m * n];
    let mut set = vec![false; m * n];
    let mut put = |no: usize, col: usize, i: usize, j: usize, v: f64| -> Result<(), IoError> {
        if set[i * n + j] {
            return Err(parse_err(
                no,
                col,
                format!("duplicate entry ({}, {})", i + 1, j + 1),
            ));
        }
        set[i * n + j] = true;
        data[i * n + j] = v;
        Ok(())
    };

    if coordinate {
        let nnz: usize = parse_num(size_no, size[2].0, size[2].1, "entry count")?;
        let mut seen = 0;
        for (no, line) in content {
            let line = line?;
            let toks: Vec<(usize, &str)> = tokens(&line).collect();
            let want = if field == Field::Pattern { 2 } else { 3 };
            if toks.len() != want {
                return Err(parse_err(
                    no,
                    1,
                    format!("expected {want} fields, found {}", toks.len()),
                ));
            }
            seen += 1;
            if seen > nnz {
                return Err(parse_err(no, 1, format!("more than {nnz} entries")));
            }
            let i: usize = parse_num(no, toks[0].0, toks[0].1, "row index")?;
            let j: usize = parse_num(no, toks[1].0, toks[1].1, "column index")?;
            if i == 0 || i > m {
                return Err(parse_err(
                    no,
                    toks[0].0,
                    format!("row index {i} outside 1..={m}"),
                ));
            }
            if j == 0 || j > n {
                return Err(parse_err(
                    no,
                    toks[1].0,
                    format!("column index {j} outside 1..={n}"),
                ));
            }
            let v = if field == Field::Pattern {
                1.0
            } else {
                let v: f64 = parse_num(no, toks[2].0, toks[2].1, "value")?;
                if !v.is_finite() {
                    return Err(parse_err(no, toks[2].0, format!("non-finite value {v}")));
                }
                v
            };
            put(no, toks[0].0, i - 1, j - 1, v)?;
            if i != j {
                match symmetry {
                    Symmetry::General => {}
                    Symmetry::Symmetric => put(no, toks[0].0, j - 1, i - 1, v)?,
                    Symmetry::SkewSymmetric => put(no, toks[0].0, j - 1, i - 1, -v)?,
                }
            }
        }
        if seen != nnz {
            return Err(parse_err(
                size_no,
                size[2].0,
                format!("declared {nnz} entries, found {seen}"),
            ));
        }
    } else {
        // column-major; symmetric variants list the lower triangle only
        let positions: Vec<(usize, usize)> = (0..n)
            .flat_map(|j| (0..m).map(move |i| (i, j)))
            .filter(|&(i, j)| match symmetry {
                Symmetry::General => true,
                Symmetry::Symmetric => i >= j,
                Symmetry::SkewSymmetric => i > j,
            })
            .collect();
        let mut next = positions.iter();
        for (no, line) in content {
            let line = line?;
            for (col, tok) in tokens(&line) {
                let &(i, j) = next
                    .next()
                    .ok_or_else(|| parse_err(no, col, "more values than the declared size"))?;
                let v: f64 = parse_num(no, col, tok, "value")?;
                if !v.is_finite() {
                    return Err(parse_err(no, col, format!("non-finite value {v}")));
                }
                put(no, col, i, j, v)?;
                match symmetry {
                    Symmetry::Symmetric if i != j => put(no, col, j, i, v)?,
                    Symmetry::SkewSymmetric => put(no, col, j, i, -v)?,
                    _ => {}
                }
            }
        }
        if next.next().is_some() {
            return Err(parse_err(size_no, 1, "fewer values than the declared size"));
        }
    }

    DenseRealMatrix::new(m, n, data).map_err(|source| IoError::Invalid {
        line: size_no,
        source,
    })
}

/// Write the nonzero entries as `coordinate real general`, 17 significant digits.
pub fn write_matrix_market<W: Write>(a: &DenseRealMatrix, mut w: W) -> Result<(), IoError> {
    let (m, n) = a.shape();
    let nnz = a.as_slice().iter().filter(|&&x| x != 0.0).count();
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{m} {n} {nnz}")?;
    for i in 0..m {
        for (j, &x) in a.row(i).iter().enumerate() {
            if x != 0.0 {
                writeln!(w, "{} {} {:.16e}", i + 1, j + 1, x)?;
            }
        }
    }
    Ok(())
}

/// Read a dense matrix: one row per line, comma separated, no header.
pub fn read_csv_matrix<R: BufRead>(reader: R) -> Result<DenseRealMatrix, IoError> {
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    let mut last_line = 1;
    for (k, line) in reader.lines().enumerate() {
        let no = k + 1;
        last_line = no;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = parse_csv_line(no, &line)?;
        match cols {
            None => cols = Some(row.len()),
            Some(c) if c != row.len() => {
                return Err(parse_err(
                    no,
                    1,
                    format!("expected {c} values, found {}", row.len()),
                ))
            }
            _ => {}
        }
        data.extend(row);
        rows += 1;
    }
    let cols = cols.ok_or_else(|| parse_err(1, 1, "empty matrix"))?;
    DenseRealMatrix::new(rows, cols, data).map_err(|source| IoError::Invalid {
        line: last_line,
        source,
    })
}

fn parse_csv_line(no: usize, line: &str) -> Result<Vec<f64>, IoError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for field in line.split(',') {
        let lead = field.len() - field.trim_start().len();
        let tok = field.trim();
        let col = offset + lead + 1;
        if tok.is_empty() {
            return Err(parse_err(no, col, "empty field"));
        }
        let v: f64 = parse_num(no, col, tok, "value")?;
        if !v.is_finite() {
            return Err(parse_err(no, col, format!("non-finite value {tok}")));
        }
        out.push(v);
        offset += field.len() + 1;
    }
    Ok(out)
}

fn join_values(values: &[f64]) -> String {
    values
        .iter()
        .map(f64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

/// Write one row per line. Values use the shortest round-trip representation.
pub fn write_csv_matrix<W: Write>(a: &DenseRealMatrix, mut w: W) -> Result<(), IoError> {
    for i in 0..a.rows() {
        writeln!(w, "{}", join_values(a.row(i)))?;
    }
    Ok(())
}

pub fn read_matrix(path: &Path) -> Result<DenseRealMatrix, IoError> {
    let mut reader = BufReader::new(File::open(path)?);
    let looks_like_mm = reader.fill_buf()?.starts_with(b"%%MatrixMarket");
    if looks_like_mm {
        read_matrix_market(reader)
    } else {
        match MatrixFormat::from_path(path) {
            MatrixFormat::Csv => read_csv_matrix(reader),
            MatrixFormat::MatrixMarket => read_matrix_market(reader),
        }
    }
}

pub fn write_matrix(a: &DenseRealMatrix, path: &Path) -> Result<(), IoError> {
    let mut w = BufWriter::new(File::create(path)?);
    match MatrixFormat::from_path(path) {
        MatrixFormat::Csv => write_csv_matrix(a, &mut w)?,
        MatrixFormat::MatrixMarket => write_matrix_market(a, &mut w)?,
    }
    w.flush()?;
    Ok(())
}

/// Parse `"m n"` followed by `m` 1-based targets.
pub fn parse_injection(text: &str) -> Result<Injection, IoError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());
    let (size_no, size_line) = lines
        .next()
        .ok_or_else(|| parse_err(1, 1, "empty injection file"))?;
    let size: Vec<(usize, &str)> = tokens(size_line).collect();
    if size.len() != 2 {
        return Err(parse_err(size_no, 1, "first line must be \"m n\""));
    }
    let m: usize = parse_num(size_no, size[0].0, size[0].1, "domain size")?;
    let n: usize = parse_num(size_no, size[1].0, size[1].1, "codomain size")?;
    let invalid = |line, source| IoError::Invalid { line, source };
    if m == 0 || n == 0 {
        return Err(invalid(size_no, Error::EmptyShape { rows: m, cols: n }));
    }
    if m > n {
        return Err(invalid(size_no, Error::DomainExceedsCodomain { m, n }));
    }
    let (no, targets_line) = lines
        .next()
        .ok_or_else(|| parse_err(size_no + 1, 1, format!("missing line of {m} targets")))?;
    let mut targets = Vec::with_capacity(m);
    for (col, tok) in tokens(targets_line) {
        targets.push(parse_num::<usize>(no, col, tok, "target")?);
    }
    if targets.len() != m {
        return Err(parse_err(
            no,
            1,
            format!("expected {m} targets, found {}", targets.len()),
        ));
    }
    if let Some((extra, _)) = lines.next() {
        return Err(parse_err(extra, 1, "unexpected content after the targets"));
    }
    Injection::from_one_based(n, &targets).map_err(|source| invalid(no, source))
}

pub fn read_injection<R: Read>(mut reader: R) -> Result<Injection, IoError> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    parse_injection(&text)
}

pub fn read_injection_file(path: &Path) -> Result<Injection, IoError> {
    read_injection(File::open(path)?)
}

pub fn write_injection<W: Write>(pi: &Injection, mut w: W) -> Result<(), IoError> {
    writeln!(w, "{} {}", pi.m(), pi.n())?;
    let targets: Vec<String> = pi
        .targets_one_based()
        .iter()
        .map(usize::to_string)
        .collect();
    writeln!(w, "{}", targets.join(" "))?;
    Ok(())
}

pub fn write_injection_file(pi: &Injection, path: &Path) -> Result<(), IoError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_injection(pi, &mut w)?;
    w.flush()?;
    Ok(())
}

/// Parse a vector from comma- and/or newline-separated values.
pub fn parse_vector(text: &str) -> Result<RealVector, IoError> {
    let mut values = Vec::new();
    for (k, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        values.extend(parse_csv_line(k + 1, line.trim_end_matches(','))?);
    }
    let last = text.lines().count().max(1);
    RealVector::new(values).map_err(|source| IoError::Invalid { line: last, source })
}

pub fn read_vector_file(path: &Path) -> Result<RealVector, IoError> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    parse_vector(&text)
}

pub fn write_vector<W: Write>(v: &RealVector, mut w: W) -> Result<(), IoError> {
    writeln!(w, "{}", join_values(v.as_slice()))?;
    Ok(())
}

pub fn write_report_json<W: Write>(report: &ClassificationReport, mut w: W) -> Result<(), IoError> {
    serde_json::to_writer(&mut w, report)?;
    writeln!(w)?;
    Ok(())
}

/// Human-readable report, one flag per line followed by the witnesses.
pub fn write_report_text<W: Write>(report: &ClassificationReport, mut w: W) -> Result<(), IoError> {
    let [m, n] = report.shape;
    writeln!(w, "shape: {m}x{n}")?;
    writeln!(w, "binary: {}", report.is_binary)?;
    writeln!(
        w,
        "row-permutation-like: {}",
        report.is_row_permutation_like
    )?;
    writeln!(
        w,
        "column-permutation-like: {}",
        report.is_column_permutation_like
    )?;
    writeln!(w, "row sums all one: {}", report.row_sums_all_one)?;
    writeln!(w, "composition matrix: {}", report.is_composition_matrix)?;
    for witness in &report.witnesses {
        write!(w, "witness: {} {:?}", witness.clause, witness.indices)?;
        if let Some(v) = witness.value {
            write!(w, " value {v:.16e}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn write_report<W: Write>(
    report: &ClassificationReport,
    w: W,
    json: bool,
) -> Result<(), IoError> {
    if json {
        write_report_json(report, w)
    } else {
        write_report_text(report, w)
    }
}

/// JSON view of a [`RecoveryResult`] with 1-based columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoverySummary {
    pub shape: [usize; 2],
    pub mode: RecoveryMode,
    pub row_to_col: Vec<usize>,
    pub score: f64,
    pub residual: f64,
    pub ties_broken: usize,
}

impl From<&RecoveryResult> for RecoverySummary {
    fn from(r: &RecoveryResult) -> Self {
        let (m, n) = r.matrix.shape();
        Self {
            shape: [m, n],
            mode: r.mode,
            row_to_col: r.matrix.row_to_col_one_based(),
            score: r.score,
            residual: r.residual,
            ties_broken: r.ties_broken,
        }
    }
}
