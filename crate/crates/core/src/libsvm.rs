//! LIBSVM text format.
//!
//! ```text
//! 8 1:47 2:100 3:27 4:81
//! -1 2:0.5 7:-3 # trailing comment
//! ```
//!
//! Feature indices are 1-based on disk and 0-based in memory.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::vector::SparseVector;

/// Labelled rows sharing one nominal dimension.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Dataset {
    pub labels: Vec<f64>,
    pub rows: Vec<SparseVector>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> u64 {
        self.rows.iter().map(SparseVector::dim).max().unwrap_or(0)
    }

    /// Re-dimensions every row to `dim`; fails if a stored index does not fit.
    pub fn with_dim(self, dim: u64) -> Result<Self> {
        let rows = self
            .rows
            .into_iter()
            .map(|r| SparseVector::from_pairs(dim, r.iter().collect()))
            .collect::<Result<_>>()?;
        Ok(Self {
            labels: self.labels,
            rows,
        })
    }
}

#[derive(Debug)]
struct RawRow {
    label: f64,
    entries: Vec<(u64, f64)>,
}

fn parse_line(line: &str, lineno: usize) -> Result<Option<RawRow>> {
    let body = line.split('#').next().unwrap_or("").trim();
    if body.is_empty() {
        return Ok(None);
    }
    let mut tokens = body.split_ascii_whitespace();
    let label_tok = tokens.next().expect("non-empty body");
    let label: f64 = label_tok
        .parse()
        .map_err(|_| Error::parse(lineno, format!("bad label `{label_tok}`")))?;
    if !label.is_finite() {
        return Err(Error::parse(lineno, "non-finite label"));
    }
    let mut entries = Vec::new();
    for tok in tokens {
        let (idx, val) = tok
            .split_once(':')
            .ok_or_else(|| Error::parse(lineno, format!("expected index:value, got `{tok}`")))?;
        let idx: u64 = idx
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad feature index `{idx}`")))?;
        if idx == 0 {
            return Err(Error::parse(lineno, "feature indices are 1-based"));
        }
        let val: f64 = val
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad feature value `{val}`")))?;
        if !val.is_finite() {
            return Err(Error::parse(lineno, format!("non-finite value at index {idx}")));
        }
        entries.push((idx - 1, val));
    }
    Ok(Some(RawRow { label, entries }))
}

/// Reads a dataset. The dimension is `dim` when given, otherwise the largest
/// index present.
pub fn read<R: BufRead>(reader: R, dim: Option<u64>) -> Result<Dataset> {
    let mut raw = Vec::new();
    let mut lines = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if let Some(row) = parse_line(&line, n + 1)? {
            raw.push(row);
            lines.push(n + 1);
        }
    }
    let seen = raw
        .iter()
        .flat_map(|r| r.entries.iter().map(|&(i, _)| i + 1))
        .max()
        .unwrap_or(0);
    let dim = dim.unwrap_or(seen);
    let mut labels = Vec::with_capacity(raw.len());
    let mut rows = Vec::with_capacity(raw.len());
    for (row, lineno) in raw.into_iter().zip(lines) {
        let v = SparseVector::from_pairs(dim, row.entries)
            .map_err(|e| Error::parse(lineno, e.to_string()))?;
        labels.push(row.label);
        rows.push(v);
    }
    Ok(Dataset { labels, rows })
}

pub fn read_path(path: impl AsRef<Path>, dim: Option<u64>) -> Result<Dataset> {
    read(BufReader::new(File::open(path)?), dim)
}

pub fn write<W: Write>(mut w: W, data: &Dataset) -> io::Result<()> {
    for (label, row) in data.labels.iter().zip(&data.rows) {
        write!(w, "{label}")?;
        for (i, v) in row.iter() {
            write!(w, " {}:{v}", i + 1)?;
        }
        writeln!(w)?;
    }
    w.flush()
}

pub fn write_path(path: impl AsRef<Path>, data: &Dataset) -> io::Result<()> {
    write(BufWriter::new(File::create(path)?), data)
}
