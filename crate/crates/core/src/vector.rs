//! Sparse vector types and the sign-splitting transform.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sparse real vector of nominal dimension `dim`.
///
/// Entries are kept sorted by strictly increasing index and no stored value
/// is exactly zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    dim: u64,
    indices: Vec<u64>,
    values: Vec<f64>,
}

impl SparseVector {
    /// Builds a vector from `(index, value)` pairs in any order.
    ///
    /// Zero values are dropped. Duplicate indices, out-of-range indices and
    /// non-finite values are rejected.
    pub fn from_pairs(dim: u64, mut entries: Vec<(u64, f64)>) -> Result<Self> {
        entries.sort_by_key(|&(i, _)| i);
        let mut indices = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        for (pos, &(i, v)) in entries.iter().enumerate() {
            if i >= dim {
                return Err(Error::IndexOutOfRange { index: i, dim });
            }
            if pos > 0 && entries[pos - 1].0 == i {
                return Err(Error::DuplicateIndex(i));
            }
            if !v.is_finite() {
                return Err(Error::NonFinite(i));
            }
            if v != 0.0 {
                indices.push(i);
                values.push(v);
            }
        }
        Ok(Self {
            dim,
            indices,
            values,
        })
    }

    pub fn from_dense(values: &[f64]) -> Result<Self> {
        let entries = values
            .iter()
            .enumerate()
            .map(|(i, &v)| (i as u64, v))
            .collect();
        Self::from_pairs(values.len() as u64, entries)
    }

    /// Trusted constructor for callers that already hold sorted, nonzero,
    /// finite entries.
    pub(crate) fn from_sorted_unchecked(dim: u64, indices: Vec<u64>, values: Vec<f64>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(values.iter().all(|&v| v != 0.0));
        Self {
            dim,
            indices,
            values,
        }
    }

    pub fn dim(&self) -> u64 {
        self.dim
    }

    pub fn indices(&self) -> &[u64] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_zero(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim as usize];
        for (i, v) in self.iter() {
            out[i as usize] = v;
        }
        out
    }

    pub fn scaled(&self, c: f64) -> Self {
        let values: Vec<f64> = self.values.iter().map(|v| v * c).collect();
        let (indices, values) = self
            .indices
            .iter()
            .zip(values)
            .filter(|(_, v)| *v != 0.0)
            .map(|(&i, v)| (i, v))
            .unzip();
        Self::from_sorted_unchecked(self.dim, indices, values)
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let mut acc = 0.0;
        merge_join(&self.indices, &other.indices, |a, b| {
            if let (Some(a), Some(b)) = (a, b) {
                acc += self.values[a] * other.values[b];
            }
        });
        acc
    }

    /// Returns a copy with unit l2 norm.
    pub fn l2_normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::EmptyVector);
        }
        let values = self.values.iter().map(|v| v / n).collect();
        Ok(Self::from_sorted_unchecked(self.dim, self.indices.clone(), values))
    }
}

/// The nonnegative `2D`-dimensional image of a vector under [`sign_split`].
///
/// Every stored value is strictly positive.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformedVector {
    dim: u64,
    indices: Vec<u64>,
    values: Vec<f64>,
}

impl TransformedVector {
    pub fn dim(&self) -> u64 {
        self.dim
    }

    pub fn indices(&self) -> &[u64] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn as_sparse(&self) -> SparseVector {
        SparseVector::from_sorted_unchecked(self.dim, self.indices.clone(), self.values.clone())
    }

    /// Inverts [`sign_split`].
    pub fn unsplit(&self) -> SparseVector {
        let (indices, values) = self
            .iter()
            .map(|(i, v)| if i % 2 == 0 { (i / 2, v) } else { (i / 2, -v) })
            .unzip();
        SparseVector::from_sorted_unchecked(self.dim / 2, indices, values)
    }
}

/// Maps a general vector to a nonnegative one of twice the dimension.
///
/// A positive entry at 0-based index `i` lands at `2i`; a negative entry
/// lands, negated, at `2i + 1`. Zeros stay implicit.
pub fn sign_split(u: &SparseVector) -> Result<TransformedVector> {
    if u.is_zero() {
        return Err(Error::EmptyVector);
    }
    let dim = u
        .dim
        .checked_mul(2)
        .ok_or_else(|| Error::param("dim", "2*dim overflows u64"))?;
    let (indices, values) = u
        .iter()
        .map(|(i, v)| if v > 0.0 { (2 * i, v) } else { (2 * i + 1, -v) })
        .unzip();
    Ok(TransformedVector {
        dim,
        indices,
        values,
    })
}

/// Walks two sorted index lists in lockstep, calling `f` with the positions
/// present in either (`None` where absent). Visits indices in ascending order.
pub(crate) fn merge_join(a: &[u64], b: &[u64], mut f: impl FnMut(Option<usize>, Option<usize>)) {
    let (mut x, mut y) = (0, 0);
    while x < a.len() || y < b.len() {
        match (a.get(x), b.get(y)) {
            (Some(ia), Some(ib)) if ia == ib => {
                f(Some(x), Some(y));
                x += 1;
                y += 1;
            }
            (Some(ia), Some(ib)) if ia < ib => {
                f(Some(x), None);
                x += 1;
            }
            (Some(_), None) => {
                f(Some(x), None);
                x += 1;
            }
            _ => {
                f(None, Some(y));
                y += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dense(t: &TransformedVector) -> Vec<f64> {
        t.as_sparse().to_dense()
    }

    #[test]
    fn sign_split_examples() {
        let u = SparseVector::from_dense(&[-3.0, 17.0]).unwrap();
        let t = sign_split(&u).unwrap();
        assert_eq!(dense(&t), vec![0.0, 3.0, 17.0, 0.0]);
        assert_eq!(t.indices(), &[1, 2]);

        let t = sign_split(&SparseVector::from_dense(&[5.0]).unwrap()).unwrap();
        assert_eq!(dense(&t), vec![5.0, 0.0]);

        let t = sign_split(&SparseVector::from_dense(&[0.0, -2.0]).unwrap()).unwrap();
        assert_eq!(dense(&t), vec![0.0, 0.0, 0.0, 2.0]);
    }

    #[test]
    fn sign_split_rejects_zero_vector() {
        let u = SparseVector::from_dense(&[0.0, 0.0]).unwrap();
        assert!(matches!(sign_split(&u), Err(Error::EmptyVector)));
    }

    #[test]
    fn constructor_validation() {
        assert!(matches!(
            SparseVector::from_pairs(3, vec![(1, 1.0), (1, 2.0)]),
            Err(Error::DuplicateIndex(1))
        ));
        assert!(matches!(
            SparseVector::from_pairs(3, vec![(3, 1.0)]),
            Err(Error::IndexOutOfRange { index: 3, dim: 3 })
        ));
        assert!(matches!(
            SparseVector::from_pairs(3, vec![(0, f64::NAN)]),
            Err(Error::NonFinite(0))
        ));
        let v = SparseVector::from_pairs(5, vec![(4, 1.0), (0, 0.0), (2, -1.0)]).unwrap();
        assert_eq!(v.indices(), &[2, 4]);
    }

    proptest! {
        #[test]
        fn sign_split_round_trips(vals in prop::collection::vec(-100.0f64..100.0, 1..40)) {
            let u = SparseVector::from_dense(&vals).unwrap();
            prop_assume!(!u.is_zero());
            let t = sign_split(&u).unwrap();
            prop_assert!(t.values().iter().all(|&v| v > 0.0));
            for w in t.indices().windows(2) {
                // never both halves of one source coordinate
                prop_assert!(w[0] / 2 != w[1] / 2);
            }
            prop_assert_eq!(t.unsplit(), u);
        }
    }
}
