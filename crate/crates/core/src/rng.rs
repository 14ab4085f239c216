//! Counter-based keyed randomness.
//!
//! Every random quantity in the crate is addressed by a `(seed, tag, a, b)`
//! tuple. The tuple is mixed into a 64-bit key which then drives a short
//! SplitMix64 stream. Nothing is stored: the same address always produces the
//! same numbers, so two vectors hashed at different times see identical
//! per-coordinate randomness, and only coordinates that are actually visited
//! ever materialize any.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// Stream tags. Distinct tags give unrelated streams under the same seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Tag {
    Gcws = 0x01,
    PairCode = 0x02,
    SketchPosition = 0x03,
    RffProjection = 0x04,
    RffPhase = 0x05,
    WeightInit = 0x06,
    Shuffle = 0x07,
    PairGen = 0x08,
    Trial = 0x09,
    Synth = 0x0a,
}

/// SplitMix64 finalizer: a bijective 64-bit avalanche mix.
#[inline(always)]
pub const fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes an address into a single 64-bit key.
#[inline(always)]
pub fn derive(seed: u64, tag: Tag, a: u64, b: u64) -> u64 {
    let h = mix64(seed ^ (tag as u64).wrapping_mul(GOLDEN));
    let h = mix64(h ^ a.wrapping_add(0x632b_e59b_d9b4_e019));
    mix64(h ^ b.wrapping_add(0xd6e8_feb8_6659_fd93))
}

/// A small-state generator positioned at one keyed address.
#[derive(Clone, Debug)]
pub struct KeyedStream {
    state: u64,
}

impl KeyedStream {
    #[inline(always)]
    pub fn new(seed: u64, tag: Tag, a: u64, b: u64) -> Self {
        Self {
            state: derive(seed, tag, a, b),
        }
    }

    #[inline(always)]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    #[inline(always)]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on the open interval `(0, 1)`; safe to take the log of.
    #[inline(always)]
    pub fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Gamma(2, 1) as the sum of two unit exponentials, `-ln(U1 * U2)`.
    ///
    /// The product of two open uniforms is at least 2^-108, so the single
    /// logarithm never sees zero.
    #[inline(always)]
    pub fn next_gamma2(&mut self) -> f64 {
        let u1 = self.next_open01();
        let u2 = self.next_open01();
        -(u1 * u2).ln()
    }

    /// Uniform integer in `[0, n)` by multiply-shift.
    #[inline(always)]
    pub fn next_below(&mut self, n: u64) -> u64 {
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }
}

impl RngCore for KeyedStream {
    fn next_u32(&mut self) -> u32 {
        (KeyedStream::next_u64(self) >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        KeyedStream::next_u64(self)
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let bytes = KeyedStream::next_u64(self).to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}

/// A conventional sequential generator for the long-lived streams (weight
/// init, shuffles, pair generation) that still derives from the master seed.
pub fn seeded_rng(seed: u64, tag: Tag, a: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(seed, tag, a, 0))
}

/// The three per-coordinate random numbers GCWS needs for hash `j` at
/// transformed coordinate `i`: `(r, c, beta)` with `r, c ~ Gamma(2, 1)` and
/// `beta ~ Uniform[0, 1)`.
#[inline]
pub fn keyed_randoms(seed: u64, j: u64, i: u64) -> (f64, f64, f64) {
    let mut s = KeyedStream::new(seed, Tag::Gcws, j, i);
    let r = s.next_gamma2();
    let c = s.next_gamma2();
    let beta = s.next_f64();
    (r, c, beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keyed_randoms_are_deterministic() {
        let a = keyed_randoms(42, 7, 1_000_003);
        let b = keyed_randoms(42, 7, 1_000_003);
        assert_eq!(a.0.to_bits(), b.0.to_bits());
        assert_eq!(a.1.to_bits(), b.1.to_bits());
        assert_eq!(a.2.to_bits(), b.2.to_bits());
        assert_ne!(keyed_randoms(42, 8, 1_000_003).0, a.0);
        assert_ne!(keyed_randoms(43, 7, 1_000_003).0, a.0);
    }

    #[test]
    fn gamma_and_uniform_moments() {
        // 10^6 draws under each of ten seeds, pooled.
        let n = 10_000_000u64;
        let (mut sr, mut sc, mut sb) = (0.0, 0.0, 0.0);
        let mut sr2 = 0.0;
        for t in 0..n {
            let (seed, t) = (t / 1_000_000, t % 1_000_000);
            let (r, c, beta) = keyed_randoms(seed, t % 1000, t / 1000);
            assert!(r > 0.0 && c > 0.0 && (0.0..1.0).contains(&beta));
            sr += r;
            sr2 += r * r;
            sc += c;
            sb += beta;
        }
        let nf = n as f64;
        // Gamma(2,1): mean 2, variance 2. Uniform: mean 1/2, variance 1/12.
        let se_r = (2.0 / nf).sqrt();
        let se_b = (1.0 / 12.0 / nf).sqrt();
        assert!((sr / nf - 2.0).abs() < 3.0 * se_r, "mean r {}", sr / nf);
        assert!((sc / nf - 2.0).abs() < 3.0 * se_r, "mean c {}", sc / nf);
        assert!((sb / nf - 0.5).abs() < 3.0 * se_b, "mean beta {}", sb / nf);
        let var_r = sr2 / nf - (sr / nf).powi(2);
        assert!((var_r - 2.0).abs() < 0.01, "var r {var_r}");
    }

    #[test]
    fn r_c_beta_uncorrelated() {
        let n = 200_000u64;
        let mut acc = [0.0f64; 5];
        for t in 0..n {
            let (r, c, beta) = keyed_randoms(1, 3, t);
            acc[0] += (r - 2.0) * (c - 2.0);
            acc[1] += (r - 2.0) * (beta - 0.5);
            acc[2] += (c - 2.0) * (beta - 0.5);
            // neighbouring coordinates
            let (r2, _, _) = keyed_randoms(1, 3, t + 1);
            acc[3] += (r - 2.0) * (r2 - 2.0);
            let (r3, _, _) = keyed_randoms(1, 4, t);
            acc[4] += (r - 2.0) * (r3 - 2.0);
        }
        for (k, a) in acc.iter().enumerate() {
            let corr = a / n as f64;
            assert!(corr.abs() < 0.03, "cross moment {k}: {corr}");
        }
    }

    #[test]
    fn next_below_is_in_range() {
        let mut s = KeyedStream::new(0, Tag::SketchPosition, 0, 0);
        let mut counts = [0u32; 3];
        for _ in 0..30_000 {
            counts[s.next_below(3) as usize] += 1;
        }
        for c in counts {
            assert!((9_500..10_500).contains(&c), "{counts:?}");
        }
    }
}
