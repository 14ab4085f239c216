//! Exact kernel evaluation.

use crate::error::{Error, Result};
use crate::vector::{merge_join, sign_split, SparseVector, TransformedVector};

/// The powered generalized min-max kernel.
///
/// Both inputs are sign-split, then each stored coordinate carries the weight
/// `x^p`; absent coordinates carry weight zero. The result is
/// `sum(min(w_u, w_v)) / sum(max(w_u, w_v))`.
///
/// Weights are handled as `p * ln(x)` and the sums are formed after factoring
/// out the largest log-weight, so no intermediate overflows for any `p`.
pub fn pgmm_kernel(u: &SparseVector, v: &SparseVector, p: f64) -> Result<f64> {
    check_power(p)?;
    let tu = sign_split(u)?;
    let tv = sign_split(v)?;
    pgmm_transformed(&tu, &tv, p)
}

/// The plain GMM kernel (`p = 1`).
pub fn gmm_kernel(u: &SparseVector, v: &SparseVector) -> Result<f64> {
    pgmm_kernel(u, v, 1.0)
}

/// [`pgmm_kernel`] on already-transformed inputs.
pub fn pgmm_transformed(u: &TransformedVector, v: &TransformedVector, p: f64) -> Result<f64> {
    check_power(p)?;
    if u.nnz() == 0 || v.nnz() == 0 {
        return Err(Error::EmptyVector);
    }
    let lu: Vec<f64> = u.values().iter().map(|x| p * x.ln()).collect();
    let lv: Vec<f64> = v.values().iter().map(|x| p * x.ln()).collect();

    // (log min-weight, log max-weight) per visited coordinate; a one-sided
    // coordinate contributes nothing to the numerator.
    let mut terms = Vec::with_capacity(lu.len() + lv.len());
    merge_join(u.indices(), v.indices(), |a, b| match (a, b) {
        (Some(a), Some(b)) => terms.push((Some(lu[a].min(lv[b])), lu[a].max(lv[b]))),
        (Some(a), None) => terms.push((None, lu[a])),
        (None, Some(b)) => terms.push((None, lv[b])),
        (None, None) => unreachable!(),
    });

    let top = terms
        .iter()
        .map(|&(_, hi)| hi)
        .fold(f64::NEG_INFINITY, f64::max);
    let (mut num, mut den) = (0.0, 0.0);
    for (lo, hi) in terms {
        if let Some(lo) = lo {
            num += (lo - top).exp();
        }
        den += (hi - top).exp();
    }
    Ok((num / den).clamp(0.0, 1.0))
}

fn check_power(p: f64) -> Result<()> {
    if p == 0.0 || !p.is_finite() {
        return Err(Error::param("p", "must be finite and nonzero"));
    }
    Ok(())
}

/// Cosine similarity of two nonzero vectors.
pub fn cosine(u: &SparseVector, v: &SparseVector) -> Result<f64> {
    let (nu, nv) = (u.norm(), v.norm());
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::EmptyVector);
    }
    Ok((u.dot(v) / (nu * nv)).clamp(-1.0, 1.0))
}

/// Gaussian kernel on l2-normalized inputs, `exp(-gamma * (1 - rho))`.
pub fn rbf_kernel(u: &SparseVector, v: &SparseVector, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::param("gamma", "must be positive"));
    }
    let rho = cosine(u, v)?;
    Ok((-gamma * (1.0 - rho)).exp())
}
