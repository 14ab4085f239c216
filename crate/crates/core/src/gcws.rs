//! Generalized consistent weighted sampling.
//!
//! For hash index `j` and every stored coordinate `i` of the sign-split
//! vector, draw `r, c ~ Gamma(2, 1)` and `beta ~ U[0, 1)` from the keyed
//! stream at `(seed, j, i)` and compute
//!
//! ```text
//! t_i = floor(p * ln(x_i) / r_i + beta_i)
//! a_i = ln(c_i) - r_i * (t_i + 1 - beta_i)
//! ```
//!
//! The sample is `(i*, t*) = (argmin_i a_i, t_{i*})`. Two vectors hashed
//! under the same config see the same randomness at every coordinate, and
//! their full samples collide with probability equal to their pGMM kernel.
//!
//! Only the logarithm of each value enters, so any power `p` is safe.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Tag};
use crate::vector::{sign_split, SparseVector, TransformedVector};

/// Parameters that fully determine a GCWS hash family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GcwsConfig {
    p: f64,
    k: usize,
    b: u32,
    tbits: u32,
    seed: u64,
}

impl GcwsConfig {
    pub fn new(p: f64, k: usize, b: u32, tbits: u32, seed: u64) -> Result<Self> {
        if p == 0.0 || !p.is_finite() {
            return Err(Error::param("p", "must be finite and nonzero"));
        }
        if k == 0 {
            return Err(Error::param("k", "must be at least 1"));
        }
        if !(1..=32).contains(&b) {
            return Err(Error::param("b", "must be in [1, 32]"));
        }
        if tbits > 8 {
            return Err(Error::param("tbits", "must be in [0, 8]"));
        }
        if b + tbits > 32 {
            return Err(Error::param("tbits", "b + tbits must not exceed 32"));
        }
        Ok(Self {
            p,
            k,
            b,
            tbits,
            seed,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn tbits(&self) -> u32 {
        self.tbits
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Bits per encoded code.
    pub fn code_bits(&self) -> u32 {
        self.b + self.tbits
    }

    /// Width of one one-hot block, `2^(b + tbits)`.
    pub fn block_size(&self) -> u64 {
        1u64 << self.code_bits()
    }
}

/// One GCWS output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HashSample {
    pub istar: u64,
    pub tstar: i64,
    pub code: u32,
}

/// The `k` encoded codes of one vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HashedVector {
    pub codes: Vec<u32>,
}

/// Lowest `b` bits of `istar`, optionally followed by the lowest `tbits`
/// bits of `tstar` (taken as a nonnegative remainder).
#[inline]
pub fn encode_code(istar: u64, tstar: i64, b: u32, tbits: u32) -> u32 {
    let lo = istar & ((1u64 << b) - 1);
    if tbits == 0 {
        return lo as u32;
    }
    let hi = tstar.rem_euclid(1i64 << tbits) as u64;
    (lo + (hi << b)) as u32
}

/// Maps the full `(istar, tstar)` pair to `b` bits through a keyed 64-bit
/// mix. Used where an approximately uniform image of the whole pair is
/// needed rather than truncation of `istar`.
#[inline]
pub fn uniform_pair_code(istar: u64, tstar: i64, b: u32, seed: u64) -> u32 {
    debug_assert!((1..=32).contains(&b));
    let h = rng::derive(seed, Tag::PairCode, istar, tstar as u64);
    (h >> (64 - b)) as u32
}

/// A transformed vector prepared for repeated hashing: `p * ln(x_i)` is
/// computed once and reused for every hash index.
#[derive(Clone, Debug)]
pub struct GcwsHasher<'a> {
    cfg: &'a GcwsConfig,
    indices: Vec<u64>,
    log_weights: Vec<f64>,
}

impl<'a> GcwsHasher<'a> {
    pub fn new(u: &TransformedVector, cfg: &'a GcwsConfig) -> Result<Self> {
        if u.nnz() == 0 {
            return Err(Error::EmptyVector);
        }
        Ok(Self {
            cfg,
            indices: u.indices().to_vec(),
            log_weights: u.values().iter().map(|x| cfg.p * x.ln()).collect(),
        })
    }

    /// The raw sample for hash index `j`.
    pub fn sample(&self, j: u64) -> (u64, i64) {
        let mut best = f64::INFINITY;
        let mut best_i = self.indices[0];
        let mut best_t = 0i64;
        for (&i, &lw) in self.indices.iter().zip(&self.log_weights) {
            let (r, c, beta) = rng::keyed_randoms(self.cfg.seed, j, i);
            let t = (lw / r + beta).floor();
            let a = c.ln() - r * (t + 1.0 - beta);
            // Strict comparison: ties keep the smaller index.
            if a < best {
                best = a;
                best_i = i;
                best_t = t as i64;
            }
        }
        (best_i, best_t)
    }

    pub fn hash_one(&self, j: u64) -> HashSample {
        let (istar, tstar) = self.sample(j);
        HashSample {
            istar,
            tstar,
            code: encode_code(istar, tstar, self.cfg.b, self.cfg.tbits),
        }
    }

    pub fn samples(&self) -> Vec<HashSample> {
        (0..self.cfg.k as u64).map(|j| self.hash_one(j)).collect()
    }
}

/// Hashes a transformed vector once, for hash index `j`.
pub fn gcws_hash_one(u: &TransformedVector, cfg: &GcwsConfig, j: u64) -> Result<HashSample> {
    Ok(GcwsHasher::new(u, cfg)?.hash_one(j))
}

/// Sign-splits `u` and returns its `k` encoded codes.
pub fn gcws_hash(u: &SparseVector, cfg: &GcwsConfig) -> Result<HashedVector> {
    let t = sign_split(u)?;
    let hasher = GcwsHasher::new(&t, cfg)?;
    Ok(HashedVector {
        codes: hasher.samples().into_iter().map(|s| s.code).collect(),
    })
}
