//! Monte Carlo checks of the hashing, sketching and NRFF estimators against
//! their closed forms.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gcws::{uniform_pair_code, GcwsConfig, GcwsHasher};
use crate::kernel::pgmm_kernel;
use crate::nrff::{nrff_variance, rff_features, RffConfig};
use crate::rng::{derive, seeded_rng, KeyedStream, Tag};
use crate::sketch::{
    collision_probability, count_sketch_positions, cs_variance, CountSketchConfig, SketchedFeatures,
};
use crate::vector::{sign_split, SparseVector};

/// How far the empirical value may sit from the theoretical one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Tolerance {
    /// `|empirical - theoretical| <= width * se`
    SeBand(f64),
    /// `|empirical - theoretical| <= r * |theoretical|`
    Relative(f64),
    /// `|empirical - theoretical| <= a`
    Absolute(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub name: String,
    pub theoretical: f64,
    pub empirical: f64,
    pub se: f64,
    pub trials: u64,
    pub tolerance: Tolerance,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl McReport {
    pub fn new(
        name: impl Into<String>,
        theoretical: f64,
        empirical: f64,
        se: f64,
        trials: u64,
        tolerance: Tolerance,
    ) -> Self {
        let mut r = Self {
            name: name.into(),
            theoretical,
            empirical,
            se,
            trials,
            tolerance,
            verdict: Verdict::Fail,
            note: None,
        };
        r.verdict = r.recompute();
        r
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// The verdict implied by the stored numbers.
    pub fn recompute(&self) -> Verdict {
        let dev = (self.empirical - self.theoretical).abs();
        let bound = match self.tolerance {
            Tolerance::SeBand(w) => w * self.se,
            Tolerance::Relative(r) => r * self.theoretical.abs(),
            Tolerance::Absolute(a) => a,
        };
        if dev <= bound {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Deviation in units of the tolerance bound (<= 1 passes).
    pub fn score(&self) -> f64 {
        let dev = (self.empirical - self.theoretical).abs();
        let bound = match self.tolerance {
            Tolerance::SeBand(w) => w * self.se,
            Tolerance::Relative(r) => r * self.theoretical.abs(),
            Tolerance::Absolute(a) => a,
        };
        if dev == 0.0 {
            0.0
        } else {
            dev / bound
        }
    }
}

pub fn write_reports<W: std::io::Write>(w: W, reports: &[McReport]) -> Result<()> {
    serde_json::to_writer_pretty(w, reports)?;
    Ok(())
}

pub fn read_reports<R: std::io::Read>(r: R) -> Result<Vec<McReport>> {
    Ok(serde_json::from_reader(r)?)
}

/// Binomial standard error `sqrt(q (1 - q) / n)`.
pub fn binomial_se(q: f64, n: u64) -> f64 {
    (q * (1.0 - q) / n as f64).sqrt()
}

/// Settings for random test pairs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSpec {
    pub dim: usize,
    /// Probability that a coordinate of `u` (or a fresh coordinate of `v`)
    /// is nonzero.
    pub density: f64,
    pub min_magnitude: f64,
    pub max_magnitude: f64,
}

impl Default for PairSpec {
    fn default() -> Self {
        Self {
            dim: 64,
            density: 0.5,
            min_magnitude: 1e-3,
            max_magnitude: 1e3,
        }
    }
}

/// Pair number `index` under `seed`. `u` has random signs and magnitudes;
/// each coordinate of `v` copies `u` with a per-pair probability drawn
/// uniformly from `[0, 1)`, and is drawn afresh otherwise. Neither vector is
/// ever all zero.
pub fn random_pair(spec: &PairSpec, seed: u64, index: u64) -> (SparseVector, SparseVector) {
    let mut rng = seeded_rng(seed, Tag::PairGen, index);
    let draw = |rng: &mut rand_chacha::ChaCha8Rng| {
        if rng.random_bool(spec.density) {
            let m = rng.random_range(spec.min_magnitude..spec.max_magnitude);
            if rng.random_bool(0.5) {
                m
            } else {
                -m
            }
        } else {
            0.0
        }
    };
    let copy = rng.random::<f64>();
    let mut u = Vec::with_capacity(spec.dim);
    let mut v = Vec::with_capacity(spec.dim);
    for _ in 0..spec.dim {
        let a = draw(&mut rng);
        let fresh = draw(&mut rng);
        u.push(a);
        v.push(if rng.random::<f64>() < copy { a } else { fresh });
    }
    for w in [&mut u, &mut v] {
        if w.iter().all(|&x| x == 0.0) {
            w[0] = 1.0;
        }
    }
    (
        SparseVector::from_dense(&u).expect("finite"),
        SparseVector::from_dense(&v).expect("finite"),
    )
}

/// Collision counts for one pair over `trials` hash indices.
#[derive(Clone, Debug, PartialEq)]
pub struct PairCollisions {
    pub trials: u64,
    /// `(i*, t*)` equal.
    pub full: u64,
    /// `i*` equal.
    pub zero_bit: u64,
    /// Uniform `b`-bit pair codes equal, one count per requested `b`.
    pub pair_code: Vec<(u32, u64)>,
}

/// Hashes `u` and `v` with indices `0..trials` and counts collisions. The
/// pair-code map for index `j` is keyed by `(seed, j)` so that collisions
/// of unequal pairs are independent across `j`.
pub fn pair_collisions(
    u: &SparseVector,
    v: &SparseVector,
    p: f64,
    trials: u64,
    seed: u64,
    bs: &[u32],
) -> Result<PairCollisions> {
    let cfg = GcwsConfig::new(p, 1, 1, 0, seed)?;
    let (tu, tv) = (sign_split(u)?, sign_split(v)?);
    let (hu, hv) = (GcwsHasher::new(&tu, &cfg)?, GcwsHasher::new(&tv, &cfg)?);
    let mut out = PairCollisions {
        trials,
        full: 0,
        zero_bit: 0,
        pair_code: bs.iter().map(|&b| (b, 0)).collect(),
    };
    for j in 0..trials {
        let (iu, tu) = hu.sample(j);
        let (iv, tv) = hv.sample(j);
        if iu == iv {
            out.zero_bit += 1;
            if tu == tv {
                out.full += 1;
            }
        }
        let key = derive(seed, Tag::PairCode, j, 0);
        for (b, count) in &mut out.pair_code {
            if uniform_pair_code(iu, tu, *b, key) == uniform_pair_code(iv, tv, *b, key) {
                *count += 1;
            }
        }
    }
    Ok(out)
}

fn rate(count: u64, trials: u64) -> f64 {
    count as f64 / trials as f64
}

fn collision_report(name: &str, j: f64, c: &PairCollisions) -> McReport {
    McReport::new(
        format!("collision {name}"),
        j,
        rate(c.full, c.trials),
        binomial_se(j, c.trials),
        c.trials,
        Tolerance::SeBand(3.0),
    )
}

fn pair_code_report(name: &str, j: f64, b: u32, count: u64, trials: u64) -> McReport {
    let pb = collision_probability(j, b);
    McReport::new(
        format!("pair code b={b} {name}"),
        pb,
        rate(count, trials),
        binomial_se(pb, trials),
        trials,
        Tolerance::SeBand(3.0),
    )
}

fn zero_bit_report(name: &str, j: f64, c: &PairCollisions) -> McReport {
    let q = rate(c.zero_bit, c.trials);
    McReport::new(
        format!("0-bit {name}"),
        j,
        q,
        binomial_se(q, c.trials),
        c.trials,
        Tolerance::Absolute(ZERO_BIT_TOLERANCE),
    )
    .with_note("engineering threshold; no theoretical bound exists")
}

/// Allowed gap between the `i*`-only collision rate and the kernel.
pub const ZERO_BIT_TOLERANCE: f64 = 0.02;

/// Full-sample collision rate against the pGMM kernel, 3-SE band.
pub fn check_collision(u: &SparseVector, v: &SparseVector, p: f64, trials: u64, seed: u64) -> Result<McReport> {
    min_trials(trials)?;
    let j = pgmm_kernel(u, v, p)?;
    let c = pair_collisions(u, v, p, trials, seed, &[])?;
    Ok(collision_report(&format!("p={p}"), j, &c))
}

/// Uniform `b`-bit pair-code collision rate against `J + (1 - J) / 2^b`.
pub fn check_pair_code(
    u: &SparseVector,
    v: &SparseVector,
    p: f64,
    b: u32,
    trials: u64,
    seed: u64,
) -> Result<McReport> {
    min_trials(trials)?;
    let j = pgmm_kernel(u, v, p)?;
    let c = pair_collisions(u, v, p, trials, seed, &[b])?;
    Ok(pair_code_report(&format!("p={p}"), j, b, c.pair_code[0].1, trials))
}

/// `i*`-only collision rate against the kernel, fixed absolute tolerance.
pub fn check_0bit(u: &SparseVector, v: &SparseVector, p: f64, trials: u64, seed: u64) -> Result<McReport> {
    min_trials(trials)?;
    let j = pgmm_kernel(u, v, p)?;
    let c = pair_collisions(u, v, p, trials, seed, &[])?;
    Ok(zero_bit_report(&format!("p={p}"), j, &c))
}

fn min_trials(trials: u64) -> Result<()> {
    if trials < 2 {
        return Err(Error::param("trials", "need at least 2"));
    }
    Ok(())
}

/// Mean and unbiased variance.
fn moments(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Draws code pairs that collide with probability `P_b` exactly: `v` copies
/// `u` with probability `J` and is independent otherwise.
fn synth_codes(stream: &mut KeyedStream, k: usize, b: u32, j: f64) -> (Vec<u64>, Vec<u64>) {
    let size = 1u64 << b;
    let mut u = Vec::with_capacity(k);
    let mut v = Vec::with_capacity(k);
    for block in 0..k as u64 {
        let cu = stream.next_below(size);
        let cv = if stream.next_f64() < j {
            cu
        } else {
            stream.next_below(size)
        };
        u.push(block * size + cu);
        v.push(block * size + cv);
    }
    (u, v)
}

/// Count-sketch estimator `<z, w> / k` at reduction `m`: returns a mean
/// report (3-SE band around `P_b`) and a variance report (relative tolerance
/// around the closed form).
pub fn check_countsketch(
    k: usize,
    b: u32,
    j: f64,
    m: f64,
    trials: u64,
    seed: u64,
) -> Result<(McReport, McReport)> {
    min_trials(trials)?;
    if !(0.0..=1.0).contains(&j) {
        return Err(Error::param("J", "must lie in [0, 1]"));
    }
    if k == 0 || !(1..=24).contains(&b) {
        return Err(Error::param("b", "need k >= 1 and 1 <= b <= 24"));
    }
    let width = (k as f64) * 2f64.powi(b as i32);
    let bins = (width / m).round().max(1.0) as u64;
    let estimates: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut s = KeyedStream::new(seed, Tag::Synth, t, 0);
            let (u, v) = synth_codes(&mut s, k, b, j);
            let cs = CountSketchConfig::new(bins, derive(seed, Tag::Trial, t, 0)).expect("bins >= 1");
            let z: SketchedFeatures = count_sketch_positions(u, &cs);
            let w = count_sketch_positions(v, &cs);
            z.dot(&w).expect("same sketch") as f64 / k as f64
        })
        .collect();
    let (mean, var) = moments(&estimates);
    let pb = collision_probability(j, b);
    let theory_var = cs_variance(pb, k, bins as f64);
    let label = format!("k={k} b={b} J={j} m={m}");
    let n = trials as f64;
    Ok((
        McReport::new(
            format!("count-sketch mean {label}"),
            pb,
            mean,
            (var / n).sqrt(),
            trials,
            Tolerance::SeBand(3.0),
        ),
        McReport::new(
            format!("count-sketch variance {label}"),
            theory_var,
            var,
            var * (2.0 / (n - 1.0)).sqrt(),
            trials,
            Tolerance::Relative(VARIANCE_TOLERANCE),
        ),
    ))
}

/// Relative tolerance for empirical variances.
pub const VARIANCE_TOLERANCE: f64 = 0.15;

/// Normalized RFF estimator for unit vectors at correlation `rho`: mean
/// against `exp(-γ(1-ρ))` (3-SE band) and `k * Var` against `V_n`
/// (relative tolerance). At `rho = 1` both use an absolute `1e-9` bound.
pub fn check_nrff(rho: f64, gamma: f64, k: usize, trials: u64, seed: u64) -> Result<(McReport, McReport)> {
    min_trials(trials)?;
    if !(-1.0..=1.0).contains(&rho) {
        return Err(Error::param("rho", "must lie in [-1, 1]"));
    }
    let u = SparseVector::from_dense(&[1.0, 0.0])?;
    let v = SparseVector::from_dense(&[rho, (1.0 - rho * rho).max(0.0).sqrt()])?;
    let estimates = (0..trials)
        .into_par_iter()
        .map(|t| {
            let cfg = RffConfig::new(k, gamma, derive(seed, Tag::Trial, t, 1))?;
            let a = rff_features(&u, &cfg, true)?;
            let b = rff_features(&v, &cfg, true)?;
            Ok(a.estimate(&b))
        })
        .collect::<Result<Vec<f64>>>()?;
    let (mean, var) = moments(&estimates);
    let n = trials as f64;
    let kernel = (-gamma * (1.0 - rho)).exp();
    let (vn, _) = nrff_variance(rho, gamma);
    let label = format!("rho={rho} gamma={gamma} k={k}");
    let exact = rho == 1.0;
    let kvar = k as f64 * var;
    Ok((
        McReport::new(
            format!("nrff mean {label}"),
            kernel,
            mean,
            (var / n).sqrt(),
            trials,
            if exact { Tolerance::Absolute(1e-9) } else { Tolerance::SeBand(3.0) },
        ),
        McReport::new(
            format!("nrff k*var {label}"),
            vn,
            kvar,
            kvar * (2.0 / (n - 1.0)).sqrt(),
            trials,
            if exact {
                Tolerance::Absolute(1e-9)
            } else {
                Tolerance::Relative(VARIANCE_TOLERANCE)
            },
        ),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    T1,
    T2,
    ZeroBit,
    Cs,
    Nrff,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "t1" => Suite::T1,
            "t2" => Suite::T2,
            "0bit" => Suite::ZeroBit,
            "cs" => Suite::Cs,
            "nrff" => Suite::Nrff,
            "all" => Suite::All,
            _ => return Err(Error::param("suite", format!("unknown suite `{s}`"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Hash indices per pair for the collision checks.
    pub hash_trials: u64,
    pub cs_trials: u64,
    pub nrff_trials: u64,
    pub pairs_per_p: u64,
    pub ps: Vec<f64>,
    pub bs: Vec<u32>,
    /// The pair-code checks use the pairs generated for this `p`.
    pub pair_code_p: f64,
    pub pair: PairSpec,
    pub cs_k: usize,
    pub cs_b: u32,
    pub cs_js: Vec<f64>,
    pub cs_ms: Vec<f64>,
    pub nrff_k: usize,
    pub nrff_rhos: Vec<f64>,
    pub nrff_gammas: Vec<f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 2024,
            hash_trials: 100_000,
            cs_trials: 10_000,
            nrff_trials: 2_000,
            pairs_per_p: 20,
            ps: vec![0.5, 1.0, 2.0, 80.0],
            bs: vec![1, 2, 4, 8],
            pair_code_p: 1.0,
            pair: PairSpec::default(),
            cs_k: 256,
            cs_b: 4,
            cs_js: vec![0.2, 0.5, 0.8],
            cs_ms: vec![4.0, 16.0],
            nrff_k: 4096,
            nrff_rhos: vec![0.0, 0.5, 0.9],
            nrff_gammas: vec![1.0, 5.0],
        }
    }
}

impl SuiteConfig {
    /// Sets every trial count at once.
    pub fn with_trials(mut self, trials: u64) -> Self {
        self.hash_trials = trials;
        self.cs_trials = trials;
        self.nrff_trials = trials;
        self
    }
}

/// Collision-based reports for random pairs: `(T1, T2, 0-bit)`.
pub fn pair_reports(cfg: &SuiteConfig) -> Result<(Vec<McReport>, Vec<McReport>, Vec<McReport>)> {
    let jobs: Vec<(f64, u64)> = cfg
        .ps
        .iter()
        .flat_map(|&p| (0..cfg.pairs_per_p).map(move |i| (p, i)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(p, i)| {
            let (u, v) = random_pair(&cfg.pair, cfg.seed, i);
            let j = pgmm_kernel(&u, &v, p)?;
            let bs: &[u32] = if p == cfg.pair_code_p { &cfg.bs } else { &[] };
            let c = pair_collisions(&u, &v, p, cfg.hash_trials, derive(cfg.seed, Tag::Gcws, i, 0), bs)?;
            let name = format!("p={p} pair={i}");
            let t2: Vec<McReport> = c
                .pair_code
                .iter()
                .map(|&(b, count)| pair_code_report(&name, j, b, count, c.trials))
                .collect();
            Ok((collision_report(&name, j, &c), t2, zero_bit_report(&name, j, &c)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t1 = Vec::new();
    let mut t2 = Vec::new();
    let mut zb = Vec::new();
    for (a, b, c) in results {
        t1.push(a);
        t2.extend(b);
        zb.push(c);
    }
    Ok((t1, t2, zb))
}

pub fn countsketch_reports(cfg: &SuiteConfig) -> Result<Vec<McReport>> {
    let mut out = Vec::new();
    for (a, &j) in cfg.cs_js.iter().enumerate() {
        for (b, &m) in cfg.cs_ms.iter().enumerate() {
            let seed = derive(cfg.seed, Tag::Synth, a as u64, b as u64);
            let (mean, var) = check_countsketch(cfg.cs_k, cfg.cs_b, j, m, cfg.cs_trials, seed)?;
            out.push(mean);
            out.push(var);
        }
    }
    Ok(out)
}

pub fn nrff_reports(cfg: &SuiteConfig) -> Result<Vec<McReport>> {
    let mut out = Vec::new();
    for (a, &rho) in cfg.nrff_rhos.iter().enumerate() {
        for (b, &gamma) in cfg.nrff_gammas.iter().enumerate() {
            let seed = derive(cfg.seed, Tag::RffProjection, a as u64, b as u64);
            let (mean, var) = check_nrff(rho, gamma, cfg.nrff_k, cfg.nrff_trials, seed)?;
            out.push(mean);
            out.push(var);
        }
    }
    // exact case
    let (vn, _) = nrff_variance(1.0, cfg.nrff_gammas.first().copied().unwrap_or(1.0));
    out.push(McReport::new("nrff V_n at rho=1", 0.0, vn, 0.0, 0, Tolerance::Absolute(0.0)));
    Ok(out)
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<McReport>> {
    let mut out = Vec::new();
    if matches!(suite, Suite::T1 | Suite::T2 | Suite::ZeroBit | Suite::All) {
        let (t1, t2, zb) = pair_reports(cfg)?;
        if matches!(suite, Suite::T1 | Suite::All) {
            out.extend(t1);
        }
        if matches!(suite, Suite::T2 | Suite::All) {
            out.extend(t2);
        }
        if matches!(suite, Suite::ZeroBit | Suite::All) {
            out.extend(zb);
        }
    }
    if matches!(suite, Suite::Cs | Suite::All) {
        out.extend(countsketch_reports(cfg)?);
    }
    if matches!(suite, Suite::Nrff | Suite::All) {
        out.extend(nrff_reports(cfg)?);
    }
    Ok(out)
}
