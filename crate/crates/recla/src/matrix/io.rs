//! Plain-text matrix serialization for debugging and tooling.
//!
//! Format: a header line `"<rows> <cols>"`, then one line per matrix
//! row with `cols` space-separated decimal literals. Values are written
//! with shortest round-trip formatting, so `read(write(a))`
//! reproduces `a` exactly.

use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::DenseMatrix;

/// Error from parsing the text matrix format; carries the 1-based line
/// number where parsing failed.
#[derive(Debug)]
pub enum ParseError {
    Io(io::Error),
    Malformed { line: usize, what: String },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Io(e) => write!(f, "i/o error: {e}"),
            ParseError::Malformed { line, what } => write!(f, "line {line}: {what}"),
        }
    }
}

impl std::error::Error for ParseError {}

impl From<io::Error> for ParseError {
    fn from(e: io::Error) -> Self {
        ParseError::Io(e)
    }
}

/// Writes `a` in the text format to `w`.
pub fn write_text<W: Write>(a: &DenseMatrix, w: &mut W) -> io::Result<()> {
    writeln!(w, "{} {}", a.rows(), a.cols())?;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if j > 0 {
                write!(w, " ")?;
            }
            write!(w, "{}", a.get(i, j))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Reads a matrix in the text format from `r`.
pub fn read_text<R: BufRead>(r: &mut R) -> Result<DenseMatrix, ParseError> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| malformed(1, "missing header"))??;
    let mut parts = header.split_whitespace();
    let rows = parse_count(parts.next(), 1, "rows")?;
    let cols = parse_count(parts.next(), 1, "cols")?;
    if parts.next().is_some() {
        return Err(malformed(1, "trailing tokens after \"<rows> <cols>\""));
    }

    let mut a = DenseMatrix::zeros(rows, cols);
    for i in 0..rows {
        let lineno = i + 2;
        let line = lines
            .next()
            .ok_or_else(|| malformed(lineno, format!("expected {rows} data rows, got {i}")))??;
        let mut values = line.split_whitespace();
        for j in 0..cols {
            let tok = values.next().ok_or_else(|| {
                malformed(lineno, format!("expected {cols} values, got {j}"))
            })?;
            let v: f64 = tok
                .parse()
                .map_err(|_| malformed(lineno, format!("bad float literal {tok:?}")))?;
            a.set(i, j, v);
        }
        if values.next().is_some() {
            return Err(malformed(lineno, format!("more than {cols} values")));
        }
    }
    Ok(a)
}

/// Writes `a` to the file at `path`.
pub fn write_text_file<P: AsRef<Path>>(a: &DenseMatrix, path: P) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_text(a, &mut w)?;
    w.flush()
}

/// Reads a matrix from the file at `path`.
pub fn read_text_file<P: AsRef<Path>>(path: P) -> Result<DenseMatrix, ParseError> {
    read_text(&mut BufReader::new(File::open(path)?))
}

fn malformed(line: usize, what: impl Into<String>) -> ParseError {
    ParseError::Malformed { line, what: what.into() }
}

fn parse_count(tok: Option<&str>, line: usize, what: &str) -> Result<usize, ParseError> {
    let tok = tok.ok_or_else(|| malformed(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| malformed(line, format!("bad {what} {tok:?}")))
}
