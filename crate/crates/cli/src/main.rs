mod manifest;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use gcwsnet_core::dump::{self, CodeDump, FeatureDump, NrffDump, SketchDump};
use gcwsnet_core::learn::checkpoint;
use gcwsnet_core::learn::last_layer::last_layer_curve;
use gcwsnet_core::learn::{train, FeatureSet, LabelMap, Labelled, NetConfig, Preproc, TrainHistory};
use gcwsnet_core::sketch::{ratio_table, write_ratio_csv, MStrategy};
use gcwsnet_core::validate::{run_suite, write_reports, Suite, SuiteConfig};
use gcwsnet_core::{
    count_sketch, gcws_hash, libsvm, one_hot, rff_features, synth, CountSketchConfig, Dataset,
    GcwsConfig, RffConfig,
};

use manifest::Recorder;

#[derive(Parser, Debug)]
#[command(name = "gcwsnet", version, about = "GCWS hashing, count-sketch, NRFF and a small trainer")]
struct Cli {
    /// Worker threads for row-parallel stages (outputs do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hash every LIBSVM row into k GCWS codes.
    Hash(HashArgs),
    /// One-hot encode a code dump and count-sketch it.
    Sketch(SketchArgs),
    /// Random Fourier features of every LIBSVM row.
    Nrff(NrffArgs),
    /// Train a network and write its accuracy history.
    Train(TrainArgs),
    /// Monte Carlo checks of the estimators.
    Validate(ValidateArgs),
    /// Variance-ratio table for count-sketch compression.
    Ratio(RatioArgs),
    /// Write a synthetic LIBSVM dataset.
    Synth(SynthArgs),
    /// Re-execute the run recorded in a manifest.
    Rerun(RerunArgs),
}

#[derive(Args, Debug, Serialize)]
struct GcwsArgs {
    /// Power applied to the sign-split data.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    p: f64,
    /// Number of hashes.
    #[arg(long, default_value_t = 64)]
    k: usize,
    /// Bits kept from i*.
    #[arg(long, default_value_t = 8)]
    b: u32,
    /// Bits kept from t*.
    #[arg(long, default_value_t = 0)]
    tbits: u32,
}

#[derive(Args, Debug, Serialize)]
struct HashArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    gcws: GcwsArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct SketchArgs {
    /// A code dump written by `hash`.
    #[arg(long)]
    input: PathBuf,
    /// Number of sketch bins B.
    #[arg(long = "bins", visible_alias = "B", conflicts_with = "m")]
    bins: Option<u64>,
    /// Reduction factor m; B = round(2^(b+tbits) k / m).
    #[arg(long)]
    m: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct NrffArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1024)]
    k: usize,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Rescale every output vector to squared norm k.
    #[arg(long)]
    normalize: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
enum PreprocKind {
    Raw,
    Power(f64),
    LogPower(f64),
    Gcws,
    GcwsCs,
    Nrff,
}

fn parse_preproc(s: &str) -> std::result::Result<PreprocKind, String> {
    let power = |rest: &str| {
        rest.parse::<f64>()
            .map_err(|_| format!("bad power `{rest}`"))
    };
    match s {
        "raw" => Ok(PreprocKind::Raw),
        "gcws" => Ok(PreprocKind::Gcws),
        "gcws+cs" => Ok(PreprocKind::GcwsCs),
        "nrff" => Ok(PreprocKind::Nrff),
        _ => {
            if let Some(rest) = s.strip_prefix("power:") {
                Ok(PreprocKind::Power(power(rest)?))
            } else if let Some(rest) = s.strip_prefix("logpower:") {
                Ok(PreprocKind::LogPower(power(rest)?))
            } else {
                Err("expected raw, power:P, logpower:P, gcws, gcws+cs or nrff".into())
            }
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct TrainArgs {
    /// LIBSVM file, or a dump from hash/sketch/nrff (then --preproc must be raw).
    #[arg(long)]
    input: PathBuf,
    /// Test set in the same format; defaults to the training set.
    #[arg(long)]
    eval: Option<PathBuf>,
    /// raw | power:P | logpower:P | gcws | gcws+cs | nrff
    #[arg(long, default_value = "raw", value_parser = parse_preproc)]
    preproc: PreprocKind,
    #[command(flatten)]
    gcws: GcwsArgs,
    /// Sketch bins for gcws+cs.
    #[arg(long = "bins", visible_alias = "B", conflicts_with = "m")]
    bins: Option<u64>,
    /// Reduction factor for gcws+cs.
    #[arg(long)]
    m: Option<f64>,
    /// Output dimension for nrff.
    #[arg(long, default_value_t = 1024)]
    rff_k: usize,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long)]
    normalize: bool,
    /// Number of layers (1 = softmax regression).
    #[arg(long = "layers", visible_alias = "L", default_value_t = 1)]
    layers: u8,
    /// Units in the first hidden layer.
    #[arg(long = "hidden", visible_alias = "H", default_value_t = 200)]
    hidden: usize,
    #[arg(long, default_value_t = 0.001)]
    lr: f64,
    #[arg(long, default_value_t = 32)]
    batch: usize,
    #[arg(long, default_value_t = 1.0)]
    epochs: f64,
    #[arg(long, default_value_t = 50)]
    evals_per_epoch: usize,
    /// Master seed for hashing, sketching, init and shuffling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// History CSV.
    #[arg(long)]
    history: PathBuf,
    /// Optional model checkpoint.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Also fit GCWS heads on the last hidden layer and write their
    /// accuracy per checkpoint to this CSV (needs --layers >= 2).
    #[arg(long)]
    last_layer: Option<PathBuf>,
    /// Fit a head at every n-th history point.
    #[arg(long, default_value_t = 10)]
    last_layer_every: usize,
    /// Epochs for each last-layer head.
    #[arg(long, default_value_t = 1.0)]
    head_epochs: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
enum SuiteArg {
    T1,
    T2,
    #[value(name = "0bit")]
    ZeroBit,
    Cs,
    Nrff,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::T1 => Suite::T1,
            SuiteArg::T2 => Suite::T2,
            SuiteArg::ZeroBit => Suite::ZeroBit,
            SuiteArg::Cs => Suite::Cs,
            SuiteArg::Nrff => Suite::Nrff,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct ValidateArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: SuiteArg,
    /// Override every trial count.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn parse_m(s: &str) -> std::result::Result<MStrategy, String> {
    match s {
        "half" => Ok(MStrategy::HalfBits),
        "eight" => Ok(MStrategy::EightBits),
        _ => s
            .parse::<f64>()
            .ok()
            .filter(|m| *m > 0.0)
            .map(MStrategy::Fixed)
            .ok_or_else(|| format!("expected a positive number, `half` or `eight`, got `{s}`")),
    }
}

fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("bad number `{x}`"));
    if parts.len() == 3 {
        let (start, stop, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if step <= 0.0 || stop < start {
            return Err("grid needs start <= stop and step > 0".into());
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| start + i as f64 * step).collect());
    }
    s.split(',').map(num).collect()
}

// an alias keeps clap from treating the grid as a repeated argument
type Grid = Vec<f64>;

#[derive(Args, Debug, Serialize)]
struct RatioArgs {
    #[arg(long, value_delimiter = ',', default_values_t = vec![8u32, 12, 16])]
    b: Vec<u32>,
    /// Reduction factors: numbers, `half` (2^(b/2)) or `eight` (2^(b-8)).
    #[arg(long, value_delimiter = ',', value_parser = parse_m, default_value = "1")]
    #[serde(skip)]
    m: Vec<MStrategy>,
    /// `start:stop:step` or a comma list.
    #[arg(long = "j-grid", visible_alias = "J-grid", value_parser = parse_grid, default_value = "0:1:0.01")]
    j_grid: Grid,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
enum SynthKind {
    TwoGaussians,
    Digits,
}

#[derive(Args, Debug, Serialize)]
struct SynthArgs {
    #[arg(long, value_enum)]
    kind: SynthKind,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Dimension (two-gaussians).
    #[arg(long, default_value_t = 10)]
    dim: usize,
    /// Mean offset per axis (two-gaussians).
    #[arg(long, default_value_t = 0.3)]
    shift: f64,
    /// Value multiplier (digits).
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Extra rows from the same distribution, written here.
    #[arg(long, requires = "test_n")]
    test_out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    test_n: usize,
}

#[derive(Args, Debug)]
struct RerunArgs {
    manifest: PathBuf,
    /// Skip the input digest check.
    #[arg(long)]
    no_verify: bool,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn read_libsvm(path: &Path) -> Result<Dataset> {
    libsvm::read_path(path, None).with_context(|| format!("reading {}", path.display()))
}

fn gcws_config(g: &GcwsArgs, seed: u64) -> Result<GcwsConfig> {
    Ok(GcwsConfig::new(g.p, g.k, g.b, g.tbits, seed)?)
}

fn bins_for(width: u64, bins: Option<u64>, m: Option<f64>) -> Result<u64> {
    match (bins, m) {
        (Some(b), _) => Ok(b),
        (None, Some(m)) if m > 0.0 => Ok(((width as f64 / m).round() as u64).max(1)),
        (None, Some(_)) => bail!("--m must be positive"),
        (None, None) => Ok(width),
    }
}

fn cmd_hash(a: &HashArgs, rec: &mut Recorder) -> Result<()> {
    let cfg = gcws_config(&a.gcws, a.seed)?;
    rec.params(a)?;
    rec.seed("gcws", a.seed);
    rec.input(&a.input)?;
    let data = read_libsvm(&a.input)?;
    let rows = data
        .rows
        .par_iter()
        .enumerate()
        .map(|(n, u)| gcws_hash(u, &cfg).map_err(|e| e.at_sample(n)))
        .collect::<gcwsnet_core::Result<Vec<_>>>()
        .with_context(|| format!("hashing {}", a.input.display()))?;
    let dump = CodeDump {
        config: cfg,
        labels: data.labels,
        rows,
    };
    dump.write(create(&a.out)?)?;
    rec.output(&a.out);
    Ok(())
}

fn cmd_sketch(a: &SketchArgs, rec: &mut Recorder) -> Result<()> {
    rec.params(a)?;
    rec.seed("sketch", a.seed);
    rec.input(&a.input)?;
    let codes = match dump::read_path(&a.input).with_context(|| format!("reading {}", a.input.display()))? {
        FeatureDump::Codes(d) => d,
        _ => bail!("{} is not a code dump", a.input.display()),
    };
    let cfg = codes.config;
    let cs = CountSketchConfig::new(bins_for(cfg.block_size() * cfg.k() as u64, a.bins, a.m)?, a.seed)?;
    let rows = codes
        .rows
        .par_iter()
        .map(|h| Ok(count_sketch(&one_hot(h, &cfg)?, &cs)))
        .collect::<gcwsnet_core::Result<Vec<_>>>()?;
    let out = SketchDump {
        gcws: cfg,
        sketch: cs,
        labels: codes.labels,
        rows,
    };
    out.write(create(&a.out)?)?;
    rec.output(&a.out);
    Ok(())
}

fn cmd_nrff(a: &NrffArgs, rec: &mut Recorder) -> Result<()> {
    let cfg = RffConfig::new(a.k, a.gamma, a.seed)?;
    rec.params(a)?;
    rec.seed("rff", a.seed);
    rec.input(&a.input)?;
    let data = read_libsvm(&a.input)?;
    let rows = data
        .rows
        .par_iter()
        .enumerate()
        .map(|(n, u)| rff_features(u, &cfg, a.normalize).map_err(|e| e.at_sample(n)))
        .collect::<gcwsnet_core::Result<Vec<_>>>()
        .with_context(|| format!("featurizing {}", a.input.display()))?;
    let out = NrffDump {
        config: cfg,
        normalized: a.normalize,
        labels: data.labels,
        rows,
    };
    out.write(create(&a.out)?)?;
    rec.output(&a.out);
    Ok(())
}

fn is_dump(path: &Path) -> Result<bool> {
    use std::io::BufRead;
    let mut first = String::new();
    std::io::BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?)
        .read_line(&mut first)?;
    Ok(["# gcws", "# sketch", "# nrff"]
        .iter()
        .any(|h| first.starts_with(h)))
}

struct Prepared {
    x: FeatureSet,
    y: Vec<f64>,
    tx: FeatureSet,
    ty: Vec<f64>,
}

fn prepare(a: &TrainArgs, eval: &Path) -> Result<Prepared> {
    if is_dump(&a.input)? {
        if a.preproc != PreprocKind::Raw {
            bail!("{} already holds features; use --preproc raw", a.input.display());
        }
        let train_dump = dump::read_path(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
        let eval_dump = dump::read_path(eval).with_context(|| format!("reading {}", eval.display()))?;
        let header = |d: &FeatureDump| match d {
            FeatureDump::Codes(d) => d.header(),
            FeatureDump::Sketch(d) => d.header(),
            FeatureDump::Nrff(d) => d.header(),
        };
        if header(&train_dump) != header(&eval_dump) {
            bail!("training and evaluation dumps were made with different settings");
        }
        return Ok(Prepared {
            x: train_dump.to_feature_set()?,
            y: train_dump.labels().to_vec(),
            tx: eval_dump.to_feature_set()?,
            ty: eval_dump.labels().to_vec(),
        });
    }
    let train_set = read_libsvm(&a.input)?;
    let eval_set = read_libsvm(eval)?;
    let dim = train_set.dim().max(eval_set.dim());
    let gcws = || gcws_config(&a.gcws, a.seed);
    let preproc = match a.preproc {
        PreprocKind::Raw => Preproc::Raw,
        PreprocKind::Power(p) => Preproc::Power { p },
        PreprocKind::LogPower(p) => Preproc::LogPower { p },
        PreprocKind::Gcws => Preproc::Gcws { gcws: gcws()? },
        PreprocKind::GcwsCs => {
            let g = gcws()?;
            let bins = bins_for(g.block_size() * g.k() as u64, a.bins, a.m)?;
            Preproc::GcwsCs {
                gcws: g,
                sketch: CountSketchConfig::new(bins, a.seed)?,
            }
        }
        PreprocKind::Nrff => Preproc::Nrff {
            rff: RffConfig::new(a.rff_k, a.gamma, a.seed)?,
            normalize: a.normalize,
        },
    };
    let x = preproc
        .featurize(&train_set.rows, dim)
        .with_context(|| format!("preprocessing {}", a.input.display()))?;
    let tx = preproc
        .featurize(&eval_set.rows, dim)
        .with_context(|| format!("preprocessing {}", eval.display()))?;
    Ok(Prepared {
        x,
        y: train_set.labels,
        tx,
        ty: eval_set.labels,
    })
}

fn cmd_train(a: &TrainArgs, rec: &mut Recorder) -> Result<()> {
    rec.params(a)?;
    rec.seed("master", a.seed);
    let eval = a.eval.clone().unwrap_or_else(|| a.input.clone());
    rec.input(&a.input)?;
    if a.eval.is_some() {
        rec.input(&eval)?;
    }
    let net = NetConfig {
        layers: a.layers,
        hidden: a.hidden,
        learning_rate: a.lr,
        batch_size: a.batch,
        epochs: a.epochs,
        seed: a.seed,
        evals_per_epoch: a.evals_per_epoch,
    };
    net.validate()?;
    let p = prepare(a, &eval)?;
    let labels = LabelMap::fit(p.y.iter().chain(&p.ty));
    let y = labels.encode(&p.y)?;
    let ty = labels.encode(&p.ty)?;
    let data = Labelled::new(&p.x, &y)?;
    let test = Labelled::new(&p.tx, &ty)?;

    let history: TrainHistory = if let Some(path) = &a.last_layer {
        let head = NetConfig {
            layers: 1,
            epochs: a.head_epochs,
            ..net.clone()
        };
        let g = gcws_config(&a.gcws, a.seed)?;
        let (history, curve) =
            last_layer_curve(data, test, labels.classes(), &net, &g, &head, a.last_layer_every)?;
        let mut w = create(path)?;
        writeln!(w, "samples_seen,base_accuracy,head_accuracy")?;
        for c in &curve {
            writeln!(w, "{},{},{}", c.samples_seen, c.base_accuracy, c.head_accuracy)?;
        }
        w.flush()?;
        rec.output(path);
        history
    } else {
        let (model, history) = train(data, labels.classes(), &net, test)?;
        if let Some(path) = &a.model {
            checkpoint::save(create(path)?, &model)?;
            rec.output(path);
        }
        history
    };
    history.write_csv(create(&a.history)?)?;
    rec.output(&a.history);
    if let Some(last) = history.last() {
        eprintln!(
            "final accuracy {:.4} after {} samples ({} steps)",
            last.test_accuracy, last.samples_seen, last.iteration
        );
    }
    Ok(())
}

/// Returns whether every report passed.
fn cmd_validate(a: &ValidateArgs, rec: &mut Recorder) -> Result<bool> {
    let mut cfg = SuiteConfig {
        seed: a.seed,
        ..SuiteConfig::default()
    };
    if let Some(t) = a.trials {
        cfg = cfg.with_trials(t);
    }
    rec.params(&cfg)?;
    rec.seed("validate", a.seed);
    let reports = run_suite(a.suite.into(), &cfg)?;
    write_reports(create(&a.out)?, &reports)?;
    rec.output(&a.out);
    let failed: Vec<_> = reports.iter().filter(|r| !r.passed()).collect();
    for r in &failed {
        eprintln!(
            "FAIL {}: theory {:.6} empirical {:.6} (se {:.2e})",
            r.name, r.theoretical, r.empirical, r.se
        );
    }
    eprintln!("{} of {} checks passed", reports.len() - failed.len(), reports.len());
    Ok(failed.is_empty())
}

fn cmd_ratio(a: &RatioArgs, rec: &mut Recorder) -> Result<()> {
    #[derive(Serialize)]
    struct Params<'a> {
        b: &'a [u32],
        m: Vec<String>,
        j_grid: &'a [f64],
    }
    rec.params(Params {
        b: &a.b,
        m: a.m.iter().map(|m| format!("{m:?}")).collect(),
        j_grid: &a.j_grid,
    })?;
    let rows = ratio_table(&a.b, &a.j_grid, &a.m);
    write_ratio_csv(create(&a.out)?, &rows)?;
    rec.output(&a.out);
    Ok(())
}

fn cmd_synth(a: &SynthArgs, rec: &mut Recorder) -> Result<()> {
    rec.params(a)?;
    rec.seed("synth", a.seed);
    let total = a.n + a.test_n;
    let mut data = match a.kind {
        SynthKind::TwoGaussians => synth::two_gaussians(total, a.dim, a.shift, a.seed),
        SynthKind::Digits => synth::digits_like(total, a.scale, a.seed),
    };
    let test = Dataset {
        labels: data.labels.split_off(a.n),
        rows: data.rows.split_off(a.n),
    };
    libsvm::write(create(&a.out)?, &data)?;
    rec.output(&a.out);
    if let Some(path) = &a.test_out {
        libsvm::write(create(path)?, &test)?;
        rec.output(path);
    }
    Ok(())
}

fn primary_output(c: &Command) -> Option<&Path> {
    Some(match c {
        Command::Hash(a) => &a.out,
        Command::Sketch(a) => &a.out,
        Command::Nrff(a) => &a.out,
        Command::Train(a) => &a.history,
        Command::Validate(a) => &a.out,
        Command::Ratio(a) => &a.out,
        Command::Synth(a) => &a.out,
        Command::Rerun(_) => return None,
    })
}

fn name(c: &Command) -> &'static str {
    match c {
        Command::Hash(_) => "hash",
        Command::Sketch(_) => "sketch",
        Command::Nrff(_) => "nrff",
        Command::Train(_) => "train",
        Command::Validate(_) => "validate",
        Command::Ratio(_) => "ratio",
        Command::Synth(_) => "synth",
        Command::Rerun(_) => "rerun",
    }
}

/// Runs one command. `Ok(false)` means the run completed but a check failed.
fn execute(cli: Cli, argv: Vec<String>) -> Result<bool> {
    if let Command::Rerun(r) = &cli.command {
        let m = manifest::load(&r.manifest)?;
        if !r.no_verify {
            for input in &m.inputs {
                let now = manifest::InputDigest::of(&input.path)?;
                if now.sha256 != input.sha256 {
                    bail!("input {} changed since the recorded run", input.path.display());
                }
            }
        }
        let again = Cli::try_parse_from(&m.argv).context("manifest holds an invalid command line")?;
        if matches!(again.command, Command::Rerun(_)) {
            bail!("manifest records another rerun");
        }
        return execute(again, m.argv);
    }
    let mut rec = Recorder::new(name(&cli.command), argv);
    let ok = match &cli.command {
        Command::Hash(a) => cmd_hash(a, &mut rec).map(|_| true),
        Command::Sketch(a) => cmd_sketch(a, &mut rec).map(|_| true),
        Command::Nrff(a) => cmd_nrff(a, &mut rec).map(|_| true),
        Command::Train(a) => cmd_train(a, &mut rec).map(|_| true),
        Command::Validate(a) => cmd_validate(a, &mut rec),
        Command::Ratio(a) => cmd_ratio(a, &mut rec).map(|_| true),
        Command::Synth(a) => cmd_synth(a, &mut rec).map(|_| true),
        Command::Rerun(_) => unreachable!(),
    }?;
    if let Some(primary) = primary_output(&cli.command) {
        rec.finish(primary)?;
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(cli, argv) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
