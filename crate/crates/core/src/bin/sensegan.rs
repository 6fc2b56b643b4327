use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, LevelFilter, Log, Metadata, Record};

use sensegan::classify::io::write_classifier_file;
use sensegan::classify::ClassifierKind;
use sensegan::config::ExperimentConfig;
use sensegan::gan::bundle::GanBundle;
use sensegan::io::write_atomic;
use sensegan::nncore::gradcheck_suite;
use sensegan::pipelines::{
    run_adaptation, run_augmentation, split_dataset, sweep, worst_ratio_split, AugmentSpec, EvalReport, SplitSpec,
};
use sensegan::rng::derive_seed;
use sensegan::signalgen::siqd::{read_siqd_file, write_siqd_file};
use sensegan::signalgen::{generate_dataset, LabeledDataset};
use sensegan::Error;

/// Synthetic training data for spectrum sensing: dataset generation, GAN
/// augmentation, domain adaptation and experiment sweeps.
#[derive(Parser)]
#[command(name = "sensegan", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (generate) or directory (other commands).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel work.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labeled dataset and write it as SIQD.
    Generate,
    /// Train a CGAN on real data and compare real-only and augmented classifiers.
    Augment {
        /// Labeled dataset (SIQD).
        #[arg(long)]
        data: PathBuf,
        /// Separate test set; when absent `data` is split per the config.
        #[arg(long)]
        test: Option<PathBuf>,
        /// Synthetic rows per real training row.
        #[arg(long)]
        multiplier: Option<f64>,
        /// Absolute number of synthetic rows; overrides the multiplier.
        #[arg(long)]
        synth_count: Option<usize>,
        /// Classifier to evaluate (repeatable): rf or svm.
        #[arg(long, value_parser = parse_kind)]
        classifier: Vec<ClassifierKind>,
    },
    /// Map old-environment training data into a new environment.
    Adapt {
        /// Labeled old-environment dataset; generated from the config when absent.
        #[arg(long, requires = "target")]
        source: Option<PathBuf>,
        /// New-environment dataset; its labels are used only for the ideal
        /// classifier and for scoring.
        #[arg(long, requires = "source")]
        target: Option<PathBuf>,
    },
    /// Run the augmentation grid and write raw and aggregated CSV.
    Sweep,
    /// Check backpropagation against finite differences.
    Gradcheck {
        #[arg(long, default_value_t = 20)]
        nets: usize,
    },
}

fn parse_kind(s: &str) -> Result<ClassifierKind, String> {
    ClassifierKind::parse(s).ok_or_else(|| format!("unknown classifier {s:?} (expected rf or svm)"))
}

/// Failure categories, each with its own exit code.
enum Failure {
    Config(String),
    Data(String),
    Shape(String),
    Other(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Other(_) => 1,
            Failure::Config(_) => 2,
            Failure::Data(_) => 3,
            Failure::Shape(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Data(m) | Failure::Shape(m) | Failure::Other(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => Failure::Config(e.to_string()),
            Error::Shape(_) => Failure::Shape(e.to_string()),
            _ => Failure::Other(e.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

struct StderrLogger;

impl Log for StderrLogger {
    fn enabled(&self, metadata: &Metadata) -> bool {
        metadata.level() <= log::max_level()
    }

    fn log(&self, record: &Record) {
        if self.enabled(record.metadata()) {
            eprintln!("[{}] {}", record.level().as_str().to_lowercase(), record.args());
        }
    }

    fn flush(&self) {}
}

static LOGGER: StderrLogger = StderrLogger;

fn main() -> ExitCode {
    let cli = Cli::parse();
    log::set_logger(&LOGGER).expect("logger installed once");
    log::set_max_level(if cli.common.verbose { LevelFilter::Info } else { LevelFilter::Warn });
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: &Cli) -> CmdResult {
    let common = &cli.common;
    if let Some(j) = common.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
            .map_err(|e| Failure::Other(format!("thread pool: {e}")))?;
    }
    if let Command::Gradcheck { nets } = cli.command {
        return cmd_gradcheck(nets, common.seed.unwrap_or(0));
    }
    let cfg = load_config(common)?;
    match &cli.command {
        Command::Generate => cmd_generate(&cfg, common),
        Command::Augment { data, test, multiplier, synth_count, classifier } => {
            let mut cfg = cfg;
            if let Some(m) = multiplier {
                cfg.augment.synth_multiplier = *m;
            }
            if synth_count.is_some() {
                cfg.augment.synth_count = *synth_count;
            }
            if !classifier.is_empty() {
                cfg.augment.classifiers = classifier.clone();
            }
            cfg.validate()?;
            cmd_augment(&cfg, common, data, test.as_deref())
        }
        Command::Adapt { source, target } => cmd_adapt(&cfg, common, source.as_deref(), target.as_deref()),
        Command::Sweep => cmd_sweep(&cfg, common),
        Command::Gradcheck { .. } => unreachable!("handled above"),
    }
}

fn load_config(common: &Common) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match (&common.config, common.seed) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(seed)) => ExperimentConfig::with_seed(seed),
        (None, None) => return Err(Failure::Config("a master seed is required: pass --config or --seed".into())),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn out_dir(cfg: &ExperimentConfig, common: &Common) -> Result<PathBuf, Failure> {
    let dir = common.out.clone().unwrap_or_else(|| cfg.out_dir.clone());
    std::fs::create_dir_all(&dir).map_err(|e| Failure::Other(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

fn read_dataset(path: &Path) -> Result<LabeledDataset, Failure> {
    read_siqd_file(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> CmdResult {
    write_atomic(path, bytes).map_err(|e| Failure::Other(format!("cannot write {}: {e}", path.display())))
}

fn write_report(path: &Path, report: &EvalReport) -> CmdResult {
    write_file(path, report.to_csv().as_bytes())
}

fn write_gan(path: &Path, bundle: GanBundle) -> CmdResult {
    write_file(path, &bundle.to_bytes())
}

fn cmd_generate(cfg: &ExperimentConfig, common: &Common) -> CmdResult {
    let path = match &common.out {
        Some(p) => p.clone(),
        None => out_dir(cfg, common)?.join("dataset.siqd"),
    };
    let ds = generate_dataset(cfg.dataset.n_samples, &cfg.ofdm, &cfg.env, cfg.seed)?;
    write_siqd_file(&ds, &path).map_err(|e| Failure::Other(format!("cannot write {}: {e}", path.display())))?;
    println!(
        "wrote {} frames ({} with emitter) of {} samples to {}",
        ds.len(),
        ds.count_label(1),
        ds.frame_len(),
        path.display()
    );
    println!(
        "snr {} dB ({:?} reference), {} taps, variance {}",
        cfg.env.snr_db, cfg.env.snr_reference, cfg.env.n_taps, cfg.env.variance
    );
    Ok(())
}

fn cmd_augment(cfg: &ExperimentConfig, common: &Common, data: &Path, test: Option<&Path>) -> CmdResult {
    let ds = read_dataset(data)?;
    let test_ds = test.map(read_dataset).transpose()?;
    if let Some(t) = &test_ds {
        if t.frame_len() != ds.frame_len() {
            return Err(Failure::Shape(format!(
                "training frames have {} samples but test frames have {}",
                ds.frame_len(),
                t.frame_len()
            )));
        }
    }
    let dir = out_dir(cfg, common)?;
    let params = cfg.classifier_params();
    let mut report = EvalReport::default();
    for (k, &kind) in cfg.augment.classifiers.iter().enumerate() {
        let seed = derive_seed(cfg.seed, k as u64);
        let (train_set, test_set) = match (&test_ds, cfg.split.train_ratio) {
            (Some(t), _) => (ds.clone(), t.clone()),
            (None, Some(r)) => split_dataset(&ds, &SplitSpec { train_ratio: r, seed })?,
            (None, None) => {
                let w = worst_ratio_split(&ds, kind, &cfg.split.ratio_grid, &params, seed)?;
                info!("{kind}: worst ratio {} (baseline accuracy {})", w.ratio, w.baseline_accuracy);
                (w.train, w.test)
            }
        };
        let spec = AugmentSpec { classifiers: vec![kind], ..cfg.augment_spec() };
        let run = run_augmentation(&train_set, &test_set, &spec, seed)?;
        if let Some(b) = run.cgan {
            write_gan(&dir.join(format!("cgan_{kind}.sgan")), GanBundle::Cgan(b))?;
        }
        for (c, name) in run.baseline.iter().map(|c| (c, "baseline")).chain(run.augmented.iter().map(|(_, c)| (c, "augmented"))) {
            let path = dir.join(format!("{name}_{kind}.sclf"));
            write_classifier_file(c, &path).map_err(|e| Failure::Other(format!("cannot write {}: {e}", path.display())))?;
        }
        report.extend(run.report);
    }
    write_report(&dir.join("augment.csv"), &report)?;
    print!("{}", report.to_csv());
    Ok(())
}

fn cmd_adapt(cfg: &ExperimentConfig, common: &Common, source: Option<&Path>, target: Option<&Path>) -> CmdResult {
    let a = &cfg.adapt;
    let (t1, t2) = match (source, target) {
        (Some(s), Some(t)) => (read_dataset(s)?, read_dataset(t)?),
        _ => (
            generate_dataset(a.n_source, &cfg.ofdm, &a.source, derive_seed(cfg.seed, 10))?,
            generate_dataset(a.n_target, &cfg.ofdm, &a.target, derive_seed(cfg.seed, 11))?,
        ),
    };
    if t1.frame_len() != t2.frame_len() {
        return Err(Failure::Shape(format!(
            "source frames have {} samples but target frames have {}",
            t1.frame_len(),
            t2.frame_len()
        )));
    }
    let split = SplitSpec { train_ratio: a.unlabeled_ratio, seed: derive_seed(cfg.seed, 12) };
    let (unlabeled, t2_eval) = split_dataset(&t2, &split)?;
    let run = run_adaptation(&t1, &unlabeled.features(), &t2_eval, &cfg.adapt_spec(), derive_seed(cfg.seed, 13))?;
    let dir = out_dir(cfg, common)?;
    write_gan(&dir.join("bigan.sgan"), GanBundle::Bigan(run.bigan))?;
    write_gan(&dir.join("adaptation.sgan"), GanBundle::Adaptation(run.adaptation))?;
    for (c, name) in [(&run.old, "old"), (&run.adapted, "adapted"), (&run.ideal, "ideal")] {
        let path = dir.join(format!("{name}.sclf"));
        write_classifier_file(c, &path).map_err(|e| Failure::Other(format!("cannot write {}: {e}", path.display())))?;
    }
    write_report(&dir.join("adapt.csv"), &run.report)?;
    print!("{}", run.report.to_csv());
    Ok(())
}

fn cmd_sweep(cfg: &ExperimentConfig, common: &Common) -> CmdResult {
    let report = sweep(&cfg.sweep, &cfg.ofdm, &cfg.env, &cfg.augment_spec(), cfg.seed, common.jobs)?;
    let dir = out_dir(cfg, common)?;
    write_report(&dir.join("sweep.csv"), &report)?;
    let aggregate = report.aggregate_csv();
    write_file(&dir.join("sweep_aggregate.csv"), aggregate.as_bytes())?;
    print!("{aggregate}");
    Ok(())
}

fn cmd_gradcheck(nets: usize, seed: u64) -> CmdResult {
    const LIMIT: f64 = 1e-4;
    let report = gradcheck_suite(nets, seed)?;
    for (name, err) in ["bce-discriminator", "bce-generator", "minimax-generator"].iter().zip(report.max_rel_error) {
        println!("{name}: max relative error {err:.3e}");
    }
    let worst = report.worst();
    if worst < LIMIT {
        println!("gradcheck passed on {} nets (worst {worst:.3e} < {LIMIT:e})", report.nets);
        Ok(())
    } else {
        Err(Failure::Other(format!("gradcheck failed: worst relative error {worst:.3e} >= {LIMIT:e}")))
    }
}
