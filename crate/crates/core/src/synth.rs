//! Small synthetic LIBSVM datasets for offline tests.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::libsvm::Dataset;
use crate::rng::{seeded_rng, Tag};
use crate::vector::SparseVector;

/// Two Gaussian classes in `dim` dimensions, means `±shift` on every axis,
/// unit variance. Labels are `-1` and `+1`.
pub fn two_gaussians(n: usize, dim: usize, shift: f64, seed: u64) -> Dataset {
    let mut rng = seeded_rng(seed, Tag::Synth, 1);
    let noise = Normal::new(0.0, 1.0).expect("valid normal");
    let mut out = Dataset::default();
    for _ in 0..n {
        let y = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let x: Vec<f64> = (0..dim)
            .map(|_| y * shift + noise.sample(&mut rng))
            .collect();
        out.labels.push(y);
        out.rows.push(SparseVector::from_dense(&x).expect("finite"));
    }
    out
}

/// A handwritten-digits-like sample: 16 integer features in `[0, 100]`,
/// ten classes with random prototypes and Gaussian jitter. Clipping at the
/// bounds leaves some exact zeros. Every value is multiplied by `scale`.
pub fn digits_like(n: usize, scale: f64, seed: u64) -> Dataset {
    const DIM: usize = 16;
    let mut proto_rng = seeded_rng(seed, Tag::Synth, 2);
    let prototypes: Vec<Vec<f64>> = (0..10)
        .map(|_| (0..DIM).map(|_| proto_rng.random_range(0.0..100.0)).collect())
        .collect();
    let mut rng = seeded_rng(seed, Tag::Synth, 3);
    let jitter = Normal::new(0.0, 22.0).expect("valid normal");
    let mut out = Dataset::default();
    for _ in 0..n {
        let c = rng.random_range(0..10usize);
        let x: Vec<f64> = prototypes[c]
            .iter()
            .map(|&m| (m + jitter.sample(&mut rng)).round().clamp(0.0, 100.0) * scale)
            .collect();
        out.labels.push(c as f64);
        out.rows.push(SparseVector::from_dense(&x).expect("finite"));
    }
    out
}
