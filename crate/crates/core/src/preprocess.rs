//! Scalar preprocessors applied to sign-split data.

use crate::error::{Error, Result};
use crate::vector::{SparseVector, TransformedVector};

/// Raises every stored value to the power `p`.
///
/// Fails with [`Error::Overflow`] as soon as one value leaves the `f64`
/// range. Values that underflow to zero become implicit zeros.
pub fn power_transform(u: &TransformedVector, p: f64) -> Result<SparseVector> {
    if p == 0.0 || !p.is_finite() {
        return Err(Error::param("p", "must be finite and nonzero"));
    }
    let mut indices = Vec::with_capacity(u.nnz());
    let mut values = Vec::with_capacity(u.nnz());
    for (i, v) in u.iter() {
        let w = v.powf(p);
        if !w.is_finite() {
            return Err(Error::Overflow {
                sample: None,
                index: i,
            });
        }
        if w != 0.0 {
            indices.push(i);
            values.push(w);
        }
    }
    Ok(SparseVector::from_sorted_unchecked(u.dim(), indices, values))
}

/// Maps every stored value `v` to `p * ln(v)`; implicit zeros stay zero.
pub fn logpower_transform(u: &TransformedVector, p: f64) -> Result<SparseVector> {
    if p == 0.0 || !p.is_finite() {
        return Err(Error::param("p", "must be finite and nonzero"));
    }
    let (indices, values) = u
        .iter()
        .map(|(i, v)| (i, p * v.ln()))
        .filter(|&(_, w)| w != 0.0)
        .unzip();
    Ok(SparseVector::from_sorted_unchecked(u.dim(), indices, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::sign_split;

    fn t(v: &[f64]) -> TransformedVector {
        sign_split(&SparseVector::from_dense(v).unwrap()).unwrap()
    }

    #[test]
    fn power_examples() {
        let out = power_transform(&t(&[47.0]), 2.0).unwrap();
        assert_eq!(out.values(), &[2209.0]);
        let out = power_transform(&t(&[1.0, -1.0]), 37.5).unwrap();
        assert_eq!(out.values(), &[1.0, 1.0]);
        assert_eq!(out.indices(), &[0, 3]);
    }

    #[test]
    fn power_overflow_is_reported() {
        let err = power_transform(&t(&[2.0, 1e4]), 80.0).unwrap_err();
        assert!(matches!(err, Error::Overflow { index: 2, .. }), "{err:?}");
    }

    #[test]
    fn logpower_examples() {
        let out = logpower_transform(&t(&[1.0, 1e4]), 80.0).unwrap();
        // ln(1) = 0 becomes an implicit zero
        assert_eq!(out.indices(), &[2]);
        assert!((out.values()[0] - 736.827_229_758_094_7).abs() < 1e-9);
        let out = logpower_transform(&t(&[-0.5]), 2.0).unwrap();
        assert_eq!(out.indices(), &[1]);
        assert!((out.values()[0] - 2.0 * 0.5f64.ln()).abs() < 1e-15);
    }
}
