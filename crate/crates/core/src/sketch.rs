//! One-hot block features and count-sketch compression.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gcws::{GcwsConfig, HashedVector};
use crate::rng::{KeyedStream, Tag};

/// `k` one-hot blocks of width `block_size`, stored as the set positions.
///
/// Within block `j` the set position is `j * block_size + code_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedFeatures {
    block_size: u64,
    positions: Vec<u64>,
}

impl EncodedFeatures {
    pub fn from_codes(codes: &[u32], block_size: u64) -> Result<Self> {
        let positions = codes
            .iter()
            .enumerate()
            .map(|(j, &c)| {
                if c as u64 >= block_size {
                    Err(Error::CorruptInput(format!(
                        "code {c} in block {j} exceeds block size {block_size}"
                    )))
                } else {
                    Ok(j as u64 * block_size + c as u64)
                }
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            block_size,
            positions,
        })
    }

    pub fn block_size(&self) -> u64 {
        self.block_size
    }

    pub fn k(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[u64] {
        &self.positions
    }

    /// Nominal length `block_size * k`.
    pub fn width(&self) -> u64 {
        self.block_size * self.positions.len() as u64
    }

    pub fn to_dense(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.width() as usize];
        for &p in &self.positions {
            out[p as usize] = 1;
        }
        out
    }

    /// Number of shared set positions, i.e. the binary inner product.
    pub fn matches(&self, other: &EncodedFeatures) -> usize {
        self.positions
            .iter()
            .zip(&other.positions)
            .filter(|(a, b)| a == b)
            .count()
    }
}

pub fn one_hot(h: &HashedVector, cfg: &GcwsConfig) -> Result<EncodedFeatures> {
    if h.codes.len() != cfg.k() {
        return Err(Error::CorruptInput(format!(
            "expected {} codes, found {}",
            cfg.k(),
            h.codes.len()
        )));
    }
    EncodedFeatures::from_codes(&h.codes, cfg.block_size())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountSketchConfig {
    bins: u64,
    seed: u64,
}

impl CountSketchConfig {
    pub fn new(bins: u64, seed: u64) -> Result<Self> {
        if bins == 0 {
            return Err(Error::param("bins", "must be at least 1"));
        }
        Ok(Self { bins, seed })
    }

    pub fn bins(&self) -> u64 {
        self.bins
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Reduction factor `d / B` for an input of width `d`.
    pub fn reduction(&self, width: u64) -> f64 {
        width as f64 / self.bins as f64
    }

    /// Bin and `±1` sign of input position `pos`; a function of
    /// `(seed, pos)` only.
    #[inline]
    pub fn bin_and_sign(&self, pos: u64) -> (u64, i32) {
        let mut s = KeyedStream::new(self.seed, Tag::SketchPosition, pos, 0);
        let bin = s.next_below(self.bins);
        let sign = if s.next_u64() >> 63 == 0 { 1 } else { -1 };
        (bin, sign)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SketchedFeatures {
    pub values: Vec<i32>,
    seed: u64,
}

impl SketchedFeatures {
    pub fn new(values: Vec<i32>, cs: &CountSketchConfig) -> Result<Self> {
        if values.len() as u64 != cs.bins {
            return Err(Error::ConfigMismatch(format!(
                "{} values for {} bins",
                values.len(),
                cs.bins
            )));
        }
        Ok(Self {
            values,
            seed: cs.seed,
        })
    }

    pub fn bins(&self) -> usize {
        self.values.len()
    }

    pub fn dot(&self, other: &SketchedFeatures) -> Result<i64> {
        if self.values.len() != other.values.len() || self.seed != other.seed {
            return Err(Error::ConfigMismatch(
                "sketches come from different count-sketch configs".into(),
            ));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| a as i64 * b as i64)
            .sum())
    }
}

/// Count-sketch of a multiset of set positions.
pub fn count_sketch_positions(
    positions: impl IntoIterator<Item = u64>,
    cs: &CountSketchConfig,
) -> SketchedFeatures {
    let mut values = vec![0i32; cs.bins as usize];
    for pos in positions {
        let (bin, sign) = cs.bin_and_sign(pos);
        values[bin as usize] += sign;
    }
    SketchedFeatures {
        values,
        seed: cs.seed,
    }
}

pub fn count_sketch(f: &EncodedFeatures, cs: &CountSketchConfig) -> SketchedFeatures {
    count_sketch_positions(f.positions.iter().copied(), cs)
}

/// `<z, w> / k`, an unbiased estimate of the b-bit collision probability.
pub fn estimate_pb(z: &SketchedFeatures, w: &SketchedFeatures, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::param("k", "must be at least 1"));
    }
    Ok(z.dot(w)? as f64 / k as f64)
}

/// `P_b = J + (1 - J) / 2^b`.
pub fn collision_probability(j: f64, b: u32) -> f64 {
    j + (1.0 - j) / 2f64.powi(b as i32)
}

/// Variance of the sketched estimator:
/// `P_b(1-P_b)/k + (1/B)[1 + P_b^2 - P_b^2/k - P_b/k]`.
///
/// `bins = f64::INFINITY` gives the uncompressed variance.
pub fn cs_variance(pb: f64, k: usize, bins: f64) -> f64 {
    let k = k as f64;
    let base = pb * (1.0 - pb) / k;
    if bins.is_infinite() {
        return base;
    }
    base + (1.0 + pb * pb - pb * pb / k - pb / k) / bins
}

/// Relative variance inflation from count-sketch,
/// `R = (m / 2^b) (1 + P_b^2) / (P_b (1 - P_b))`.
///
/// Returns `+inf` when `P_b` is 0 or 1.
pub fn cs_ratio(b: u32, j: f64, m: f64) -> f64 {
    let pb = collision_probability(j, b);
    let den = pb * (1.0 - pb);
    if den <= 0.0 {
        return f64::INFINITY;
    }
    m / 2f64.powi(b as i32) * (1.0 + pb * pb) / den
}

/// How `m` is chosen for each `b` in a ratio table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MStrategy {
    Fixed(f64),
    /// `m = 2^(b/2)`
    HalfBits,
    /// `m = 2^(b-8)`
    EightBits,
}

impl MStrategy {
    pub fn m_for(&self, b: u32) -> f64 {
        match *self {
            MStrategy::Fixed(m) => m,
            MStrategy::HalfBits => 2f64.powf(b as f64 / 2.0),
            MStrategy::EightBits => 2f64.powi(b as i32 - 8),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioRow {
    pub b: u32,
    #[serde(rename = "J")]
    pub j: f64,
    pub m: f64,
    #[serde(rename = "P_b")]
    pub pb: f64,
    #[serde(rename = "R")]
    pub r: f64,
}

pub fn ratio_table(bs: &[u32], js: &[f64], ms: &[MStrategy]) -> Vec<RatioRow> {
    let mut rows = Vec::with_capacity(bs.len() * js.len() * ms.len());
    for strategy in ms {
        for &b in bs {
            let m = strategy.m_for(b);
            for &j in js {
                rows.push(RatioRow {
                    b,
                    j,
                    m,
                    pb: collision_probability(j, b),
                    r: cs_ratio(b, j, m),
                });
            }
        }
    }
    rows
}

pub fn write_ratio_csv<W: std::io::Write>(w: W, rows: &[RatioRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for row in rows {
        out.serialize(row)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn one_hot_block_layout() {
        let cfg = GcwsConfig::new(1.0, 3, 2, 0, 0).unwrap();
        let f = one_hot(&HashedVector { codes: vec![3, 0, 1] }, &cfg).unwrap();
        assert_eq!(f.positions(), &[3, 4, 9]);
        assert_eq!(f.width(), 12);
        // Reading each block from its highest position down gives the
        // conventional printed form.
        let dense = f.to_dense();
        let printed: Vec<u8> = dense
            .chunks(4)
            .flat_map(|b| b.iter().rev().copied())
            .collect();
        assert_eq!(printed, vec![1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0]);

        let cfg = GcwsConfig::new(1.0, 1, 1, 0, 0).unwrap();
        assert_eq!(one_hot(&HashedVector { codes: vec![0] }, &cfg).unwrap().positions(), &[0]);
    }

    #[test]
    fn one_hot_rejects_bad_codes() {
        let cfg = GcwsConfig::new(1.0, 2, 2, 0, 0).unwrap();
        assert!(matches!(
            one_hot(&HashedVector { codes: vec![1, 4] }, &cfg),
            Err(Error::CorruptInput(_))
        ));
        assert!(one_hot(&HashedVector { codes: vec![1] }, &cfg).is_err());
    }

    #[test]
    fn identical_codes_estimate_one_without_collisions() {
        let codes: Vec<u32> = (0..16).map(|j| (j * 7 % 16) as u32).collect();
        let f = EncodedFeatures::from_codes(&codes, 16).unwrap();
        // search for a seed with no bin collisions among the 16 positions
        let cs = (0..)
            .map(|s| CountSketchConfig::new(f.width(), s).unwrap())
            .find(|cs| {
                let mut bins: Vec<u64> =
                    f.positions().iter().map(|&p| cs.bin_and_sign(p).0).collect();
                bins.sort_unstable();
                bins.dedup();
                bins.len() == f.k()
            })
            .unwrap();
        let z = count_sketch(&f, &cs);
        assert_eq!(estimate_pb(&z, &z, f.k()).unwrap(), 1.0);

        // With no collisions among the union of positions the sketched inner
        // product is exactly the match count.
        let other: Vec<u32> = codes
            .iter()
            .enumerate()
            .map(|(j, &c)| if j < 5 { c } else { (c + 1) % 16 })
            .collect();
        let g = EncodedFeatures::from_codes(&other, 16).unwrap();
        let cs = (0..)
            .map(|s| CountSketchConfig::new(4 * f.width(), s).unwrap())
            .find(|cs| {
                let mut bins: Vec<u64> = f
                    .positions()
                    .iter()
                    .chain(g.positions())
                    .map(|&p| cs.bin_and_sign(p).0)
                    .collect();
                bins.sort_unstable();
                bins.dedup();
                bins.len() == 2 * f.k() - 5
            })
            .unwrap();
        assert_eq!(count_sketch(&f, &cs).dot(&count_sketch(&g, &cs)).unwrap(), 5);
        assert_eq!(f.matches(&g), 5);
    }

    #[test]
    fn estimate_rejects_mismatched_configs() {
        let f = EncodedFeatures::from_codes(&[1, 2], 4).unwrap();
        let z = count_sketch(&f, &CountSketchConfig::new(4, 1).unwrap());
        let w = count_sketch(&f, &CountSketchConfig::new(5, 1).unwrap());
        let w2 = count_sketch(&f, &CountSketchConfig::new(4, 2).unwrap());
        assert!(matches!(estimate_pb(&z, &w, 2), Err(Error::ConfigMismatch(_))));
        assert!(matches!(estimate_pb(&z, &w2, 2), Err(Error::ConfigMismatch(_))));
    }

    #[test]
    fn ratio_values() {
        assert!((cs_ratio(8, 0.5, 1.0) - 0.019_562).abs() < 1e-6);
        assert!((cs_ratio(8, 0.5, 16.0) - 0.312_994).abs() < 1e-6);
        assert!((cs_ratio(16, 0.5, 1000.0) - 0.0763).abs() < 5e-5);
        assert_eq!(cs_ratio(8, 1.0, 4.0), f64::INFINITY);
        for b in [1, 4, 8, 12] {
            for j in [0.1, 0.5, 0.9] {
                let r1 = cs_ratio(b, j, 1.0);
                assert!((cs_ratio(b, j, 37.0) - 37.0 * r1).abs() < 1e-12 * r1 * 37.0);
            }
        }
    }

    #[test]
    fn eight_bit_strategy_diverges_only_at_small_similarity() {
        // P_b ≈ J needs (1-J)/2^8 ≪ J, so the curves separate as J → 0.
        let near_zero = [8, 16].map(|b| cs_ratio(b, 0.0, MStrategy::EightBits.m_for(b)));
        assert!(near_zero[1] / near_zero[0] > 100.0);
        let mid = [8, 16].map(|b| cs_ratio(b, 0.5, MStrategy::EightBits.m_for(b)));
        assert!((mid[1] / mid[0] - 1.0).abs() < 0.01);
    }

    #[test]
    fn variance_limits() {
        let pb = 0.53125;
        assert_eq!(cs_variance(pb, 256, f64::INFINITY), pb * (1.0 - pb) / 256.0);
        assert!(cs_variance(pb, 256, 1024.0) > cs_variance(pb, 256, 4096.0));
    }

    #[test]
    fn ratio_table_rows_and_csv() {
        let rows = ratio_table(&[8, 12], &[0.5, 0.9], &[MStrategy::Fixed(4.0), MStrategy::HalfBits]);
        assert_eq!(rows.len(), 8);
        assert_eq!(rows[4].m, 16.0);
        let mut buf = Vec::new();
        write_ratio_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("b,J,m,P_b,R\n"));
        assert_eq!(text.lines().count(), 9);
    }

    proptest! {
        #[test]
        fn one_hot_inner_product_counts_matches(codes in prop::collection::vec((0u32..16, 0u32..16), 1..64)) {
            let (a, b): (Vec<u32>, Vec<u32>) = codes.iter().copied().unzip();
            let fa = EncodedFeatures::from_codes(&a, 16).unwrap();
            let fb = EncodedFeatures::from_codes(&b, 16).unwrap();
            let dense: u64 = fa.to_dense().iter().zip(fb.to_dense()).map(|(&x, y)| (x * y) as u64).sum();
            let expected = a.iter().zip(&b).filter(|(x, y)| x == y).count();
            prop_assert_eq!(dense as usize, expected);
            prop_assert_eq!(fa.matches(&fb), expected);
        }

        #[test]
        fn sketch_is_linear(p1 in prop::collection::vec(0u64..1000, 0..50),
                            p2 in prop::collection::vec(0u64..1000, 0..50),
                            bins in 1u64..64, seed in any::<u64>()) {
            let cs = CountSketchConfig::new(bins, seed).unwrap();
            let s1 = count_sketch_positions(p1.iter().copied(), &cs);
            let s2 = count_sketch_positions(p2.iter().copied(), &cs);
            let su = count_sketch_positions(p1.iter().chain(&p2).copied(), &cs);
            let sum: Vec<i32> = s1.values.iter().zip(&s2.values).map(|(a, b)| a + b).collect();
            prop_assert_eq!(su.values, sum);
            let total: i32 = s1.values.iter().map(|v| v.abs()).sum();
            prop_assert!(total as usize <= p1.len());
        }
    }
}
