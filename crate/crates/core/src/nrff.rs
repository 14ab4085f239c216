//! Random Fourier features for the Gaussian kernel, with optional
//! per-vector output normalization.
//!
//! Projection entries `r_ij ~ N(0, 1)` and phases `w_j ~ U(0, 2π)` come from
//! the keyed stream, so no `k × D` matrix is ever stored.

use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{KeyedStream, Tag};
use crate::vector::SparseVector;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RffConfig {
    k: usize,
    gamma: f64,
    seed: u64,
}

impl RffConfig {
    pub fn new(k: usize, gamma: f64, seed: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::param("k", "must be at least 1"));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::param("gamma", "must be positive"));
        }
        Ok(Self { k, gamma, seed })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    fn projection(&self, j: u64, i: u64) -> f64 {
        KeyedStream::new(self.seed, Tag::RffProjection, j, i).sample(StandardNormal)
    }

    #[inline]
    fn phase(&self, j: u64) -> f64 {
        2.0 * PI * KeyedStream::new(self.seed, Tag::RffPhase, j, 0).next_f64()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RffFeatures {
    pub values: Vec<f64>,
}

impl RffFeatures {
    pub fn dot(&self, other: &RffFeatures) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Kernel estimate `<X, Y> / k`. For normalized features this is the
    /// normalized estimator.
    pub fn estimate(&self, other: &RffFeatures) -> f64 {
        self.dot(other) / self.values.len() as f64
    }
}

/// `X_j = √2 cos(√γ x_j + w_j)` with `x_j = Σ_i u_i r_ij` over the
/// l2-normalized input. With `normalize_output` the result is rescaled to
/// squared norm `k`.
pub fn rff_features(u: &SparseVector, cfg: &RffConfig, normalize_output: bool) -> Result<RffFeatures> {
    let u = u.l2_normalized()?;
    let sg = cfg.gamma.sqrt();
    let mut values: Vec<f64> = (0..cfg.k as u64)
        .map(|j| {
            let x: f64 = u.iter().map(|(i, ui)| ui * cfg.projection(j, i)).sum();
            SQRT_2 * (sg * x + cfg.phase(j)).cos()
        })
        .collect();
    if normalize_output {
        let sq: f64 = values.iter().map(|v| v * v).sum();
        if sq > 0.0 {
            let scale = (cfg.k as f64 / sq).sqrt();
            values.iter_mut().for_each(|v| *v *= scale);
        }
    }
    Ok(RffFeatures { values })
}

/// Asymptotic variances `(V_n, V)` of the normalized and plain estimators
/// (each scaled by `k`).
pub fn nrff_variance(rho: f64, gamma: f64) -> (f64, f64) {
    let e2 = (-2.0 * gamma * (1.0 - rho)).exp();
    let e4 = (-4.0 * gamma * (1.0 - rho)).exp();
    let v = 0.5 + 0.5 * (1.0 - e2).powi(2);
    let vn = v - 0.25 * e2 * (3.0 - e4);
    (vn, v)
}
