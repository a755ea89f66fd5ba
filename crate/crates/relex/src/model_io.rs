//! Plain-text persistence for embedding matrices.
//!
//! A model file starts with a single header line
//!
//! ```text
//! RELEX-EMBED v1 <kind> <rows> <dim>
//! ```
//!
//! followed by one line per row: the symbol, a tab, and the `dim` embedding
//! values separated by single spaces. Values are written with Rust's shortest
//! round-trip `f64` formatting, so a save/load cycle reproduces the matrix
//! bit for bit.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::embedding::EmbeddingMatrix;
use crate::error::{RelexError, Result};

pub const MODEL_MAGIC: &str = "RELEX-EMBED";
pub const MODEL_VERSION: &str = "v1";

/// What the rows of a persisted matrix represent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Features,
    Relationships,
    Entities,
}

impl MatrixKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MatrixKind::Features => "features",
            MatrixKind::Relationships => "relationships",
            MatrixKind::Entities => "entities",
        }
    }

    pub fn from_str(s: &str) -> Option<Self> {
        match s {
            "features" => Some(MatrixKind::Features),
            "relationships" => Some(MatrixKind::Relationships),
            "entities" => Some(MatrixKind::Entities),
            _ => None,
        }
    }
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A matrix together with its row symbols, as read back from disk.
#[derive(Debug, Clone)]
pub struct PersistedMatrix {
    pub kind: MatrixKind,
    pub matrix: EmbeddingMatrix,
    pub symbols: Vec<String>,
}

/// Writes `matrix` with one `symbols` entry per row.
pub fn save_model(
    path: &Path,
    kind: MatrixKind,
    matrix: &EmbeddingMatrix,
    symbols: &[String],
) -> Result<()> {
    if symbols.len() != matrix.rows() {
        return Err(RelexError::DimensionMismatch {
            expected: matrix.rows(),
            got: symbols.len(),
        });
    }
    let file = File::create(path).map_err(|e| RelexError::io(path, e))?;
    let mut out = BufWriter::new(file);
    let io_err = |e| RelexError::io(path, e);
    writeln!(
        out,
        "{} {} {} {} {}",
        MODEL_MAGIC,
        MODEL_VERSION,
        kind,
        matrix.rows(),
        matrix.dim()
    )
    .map_err(io_err)?;
    for (i, symbol) in symbols.iter().enumerate() {
        write!(out, "{symbol}\t").map_err(io_err)?;
        for (j, v) in matrix.row(i).iter().enumerate() {
            if j > 0 {
                write!(out, " ").map_err(io_err)?;
            }
            write!(out, "{v}").map_err(io_err)?;
        }
        writeln!(out).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

/// Reads a model file written by [`save_model`].
pub fn load_model(path: &Path) -> Result<PersistedMatrix> {
    let file = File::open(path).map_err(|e| RelexError::io(path, e))?;
    let mut lines = BufReader::new(file).lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| RelexError::parse(path, 1, "empty model file"))?;
    let header = header.map_err(|e| RelexError::io(path, e))?;
    let parts: Vec<&str> = header.split(' ').collect();
    if parts.len() != 5 || parts[0] != MODEL_MAGIC {
        return Err(RelexError::parse(
            path,
            1,
            format!("expected header `{MODEL_MAGIC} {MODEL_VERSION} <kind> <rows> <dim>`"),
        ));
    }
    if parts[1] != MODEL_VERSION {
        return Err(RelexError::VersionMismatch {
            expected: MODEL_VERSION.to_string(),
            found: parts[1].to_string(),
        });
    }
    let kind = MatrixKind::from_str(parts[2])
        .ok_or_else(|| RelexError::parse(path, 1, format!("unknown matrix kind {:?}", parts[2])))?;
    let rows: usize = parts[3]
        .parse()
        .map_err(|_| RelexError::parse(path, 1, format!("invalid row count {:?}", parts[3])))?;
    let dim: usize = parts[4]
        .parse()
        .map_err(|_| RelexError::parse(path, 1, format!("invalid dimension {:?}", parts[4])))?;

    let mut symbols = Vec::with_capacity(rows);
    let mut data = Vec::with_capacity(rows * dim);
    let mut seen = std::collections::HashSet::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.map_err(|e| RelexError::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        let (symbol, values) = line.split_once('\t').ok_or_else(|| {
            RelexError::parse(path, line_no, "expected `<symbol>\\t<values>`")
        })?;
        if !seen.insert(symbol.to_string()) {
            return Err(RelexError::parse(
                path,
                line_no,
                format!("duplicate symbol {symbol:?}"),
            ));
        }
        let mut count = 0;
        for tok in values.split(' ') {
            let v: f64 = tok.parse().map_err(|_| {
                RelexError::parse(path, line_no, format!("invalid value {tok:?}"))
            })?;
            if !v.is_finite() {
                return Err(RelexError::parse(
                    path,
                    line_no,
                    format!("non-finite value {tok:?}"),
                ));
            }
            data.push(v);
            count += 1;
        }
        if count != dim {
            return Err(RelexError::DimensionMismatch {
                expected: dim,
                got: count,
            });
        }
        symbols.push(symbol.to_string());
    }
    if symbols.len() != rows {
        return Err(RelexError::DimensionMismatch {
            expected: rows,
            got: symbols.len(),
        });
    }
    let matrix = EmbeddingMatrix::from_data(rows, dim, data)?;
    Ok(PersistedMatrix {
        kind,
        matrix,
        symbols,
    })
}
