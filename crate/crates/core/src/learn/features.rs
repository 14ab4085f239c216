use crate::error::{Error, Result};

/// One input row for the trainer.
#[derive(Clone, Debug, PartialEq)]
pub enum Row {
    /// Sorted set positions of a binary vector (one-hot GCWS features).
    Binary(Vec<usize>),
    /// Sorted sparse real entries.
    Sparse(Vec<usize>, Vec<f64>),
}

impl Row {
    pub fn dense(values: &[f64]) -> Self {
        let (idx, val) = values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, &v)| (i, v))
            .unzip();
        Row::Sparse(idx, val)
    }

    pub fn max_index(&self) -> Option<usize> {
        match self {
            Row::Binary(p) => p.last().copied(),
            Row::Sparse(i, _) => i.last().copied(),
        }
    }

    pub fn nnz(&self) -> usize {
        match self {
            Row::Binary(p) => p.len(),
            Row::Sparse(i, _) => i.len(),
        }
    }

    pub fn to_dense(&self, width: usize) -> Vec<f64> {
        let mut out = vec![0.0; width];
        match self {
            Row::Binary(p) => p.iter().for_each(|&i| out[i] = 1.0),
            Row::Sparse(idx, val) => idx.iter().zip(val).for_each(|(&i, &v)| out[i] = v),
        }
        out
    }
}

/// Rows of a common width.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureSet {
    width: usize,
    rows: Vec<Row>,
}

impl FeatureSet {
    pub fn new(width: usize, rows: Vec<Row>) -> Result<Self> {
        for (n, row) in rows.iter().enumerate() {
            if let Some(m) = row.max_index() {
                if m >= width {
                    return Err(Error::CorruptInput(format!(
                        "row {n} has feature {m} beyond width {width}"
                    )));
                }
            }
        }
        Ok(Self { width, rows })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Maps arbitrary numeric labels to dense class ids in ascending label order.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelMap {
    labels: Vec<f64>,
}

impl LabelMap {
    pub fn fit<'a>(labels: impl IntoIterator<Item = &'a f64>) -> Self {
        let mut labels: Vec<f64> = labels.into_iter().copied().collect();
        labels.sort_by(f64::total_cmp);
        labels.dedup();
        Self { labels }
    }

    pub fn classes(&self) -> usize {
        self.labels.len()
    }

    pub fn id(&self, label: f64) -> Option<usize> {
        self.labels.binary_search_by(|l| l.total_cmp(&label)).ok()
    }

    pub fn label(&self, id: usize) -> f64 {
        self.labels[id]
    }

    pub fn encode(&self, labels: &[f64]) -> Result<Vec<usize>> {
        labels
            .iter()
            .map(|&l| {
                self.id(l)
                    .ok_or_else(|| Error::CorruptInput(format!("unknown label {l}")))
            })
            .collect()
    }
}
