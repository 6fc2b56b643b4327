//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero when any criterion fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use sensegan::classify::{
    accuracy, train_random_forest, train_svm_rbf, train_svm_rbf_detailed, Classifier, ClassifierKind, ForestParams,
    SvmParams,
};
use sensegan::config::ExperimentConfig;
use sensegan::matrix::Matrix;
use sensegan::nncore::gradcheck_suite;
use sensegan::pipelines::{
    mean, run_adaptation, run_augmentation, split_dataset, sweep, EvalRecord, EvalReport, Method, SplitSpec,
    SweepGrid, SynthSize,
};
use sensegan::rng::{derive_seed, rng_from_seed, standard_normal};
use sensegan::signalgen::{build_ofdm_frame, generate_dataset, map_16qam, ChannelEnv, OfdmConfig};

const MASTER_SEED: u64 = 2024;
const SEEDS: usize = 10;
const SNRS: [f64; 3] = [0.0, 5.0, 10.0];
const KINDS: [ClassifierKind; 2] = [ClassifierKind::RandomForest, ClassifierKind::SvmRbf];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Worst-ratio augmentation sweep at one SNR. Every SNR uses the same master
/// seed, so replicate `r` draws the same seeds at every SNR.
struct SnrSweep {
    report: EvalReport,
    seconds: f64,
}

fn run_sweeps() -> BTreeMap<i64, SnrSweep> {
    let cfg = ExperimentConfig::with_seed(MASTER_SEED);
    let mut out = BTreeMap::new();
    for snr in SNRS {
        let grid = SweepGrid {
            snr_db: vec![snr],
            classifiers: KINDS.to_vec(),
            train_ratios: Vec::new(),
            synth_counts: vec![100, 200, 400],
            synth_multipliers: vec![4.0],
            replicates: SEEDS,
            n_samples: 100,
            ..SweepGrid::default()
        };
        let start = Instant::now();
        let report = sweep(&grid, &cfg.ofdm, &cfg.env, &cfg.augment_spec(), MASTER_SEED, None).expect("sweep runs");
        let seconds = start.elapsed().as_secs_f64();
        println!("  sweep at {snr} dB: {} records in {seconds:.0} s", report.len());
        out.insert(snr as i64, SnrSweep { report, seconds });
    }
    out
}

/// Accuracy per replicate, ordered by replicate, for records picked by `pred`.
fn per_seed(report: &EvalReport, pred: impl Fn(&EvalRecord) -> bool) -> Vec<f64> {
    let mut rows: Vec<&EvalRecord> = report.records.iter().filter(|r| pred(r)).collect();
    rows.sort_by_key(|r| r.seed);
    rows.iter().map(|r| r.accuracy).collect()
}

fn baseline(report: &EvalReport, kind: ClassifierKind) -> Vec<f64> {
    // one baseline row per synthetic size; the 4N_r row stands for the cell
    per_seed(report, |r| r.classifier == kind && r.method == Method::Baseline && r.n_synth == 4 * r.n_real)
}

fn augmented_4x(report: &EvalReport, kind: ClassifierKind) -> Vec<f64> {
    per_seed(report, |r| r.classifier == kind && r.method == Method::Augmented && r.n_synth == 4 * r.n_real)
}

fn criterion_1(s: &BTreeMap<i64, SnrSweep>) -> Outcome {
    let zero = &s[&0];
    let mut pass = zero.seconds < 600.0;
    let mut parts = Vec::new();
    for kind in KINDS {
        let b = mean(&baseline(&zero.report, kind));
        let a = mean(&augmented_4x(&zero.report, kind));
        pass &= a - b >= 0.10 && a >= 0.80;
        parts.push(format!("{kind} baseline {b:.3} augmented {a:.3} gain {:+.3}", a - b));
    }
    parts.push(format!("runtime {:.0} s for both classifiers and all sizes", zero.seconds));
    outcome(pass, format!("{} (need gain >= 0.10, augmented >= 0.80, < 600 s)", parts.join(", ")))
}

fn criterion_2(s: &BTreeMap<i64, SnrSweep>) -> Outcome {
    let a = mean(&augmented_4x(&s[&10].report, ClassifierKind::SvmRbf));
    outcome(a >= 0.92, format!("augmented svm at 10 dB {a:.3} (need >= 0.92)"))
}

fn criterion_3(s: &BTreeMap<i64, SnrSweep>) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for kind in KINDS {
        for (name, pick) in [("baseline", baseline as fn(&EvalReport, ClassifierKind) -> Vec<f64>), ("augmented", augmented_4x)] {
            let lo = mean(&pick(&s[&0].report, kind));
            let hi = mean(&pick(&s[&10].report, kind));
            pass &= hi >= lo - 0.02;
            parts.push(format!("{kind} {name} {lo:.3} -> {hi:.3}"));
        }
    }
    outcome(pass, format!("0 dB -> 10 dB: {} (need 10 dB >= 0 dB - 0.02)", parts.join(", ")))
}

fn criterion_4(s: &BTreeMap<i64, SnrSweep>) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for snr in SNRS {
        let report = &s[&(snr as i64)].report;
        for kind in KINDS {
            let wins: Vec<String> = [100usize, 200, 400]
                .iter()
                .map(|&n| {
                    let b = per_seed(report, |r| r.classifier == kind && r.method == Method::Baseline && r.n_synth == n);
                    let a = per_seed(report, |r| r.classifier == kind && r.method == Method::Augmented && r.n_synth == n);
                    let w = a.iter().zip(&b).filter(|(x, y)| x >= y).count();
                    pass &= w >= 8;
                    format!("{w}")
                })
                .collect();
            parts.push(format!("{snr} dB {kind} [{}]", wins.join("/")));
        }
    }
    outcome(pass, format!("seeds with augmented >= baseline for 100/200/400: {} (need >= 8 of 10 each)", parts.join(", ")))
}

fn criterion_5() -> Outcome {
    let mut old = Vec::new();
    let mut adapted = Vec::new();
    let mut ideal = Vec::new();
    let mut old_e1 = Vec::new();
    for k in 0..SEEDS as u64 {
        let cfg = ExperimentConfig::with_seed(derive_seed(MASTER_SEED, 100 + k));
        let a = &cfg.adapt;
        let t1 = generate_dataset(a.n_source, &cfg.ofdm, &a.source, derive_seed(cfg.seed, 10)).unwrap();
        let t2 = generate_dataset(a.n_target, &cfg.ofdm, &a.target, derive_seed(cfg.seed, 11)).unwrap();
        let split = SplitSpec { train_ratio: a.unlabeled_ratio, seed: derive_seed(cfg.seed, 12) };
        let (unlabeled, t2_eval) = split_dataset(&t2, &split).unwrap();
        let run = run_adaptation(&t1, &unlabeled.features(), &t2_eval, &cfg.adapt_spec(), derive_seed(cfg.seed, 13))
            .unwrap();
        let acc = |m: Method| run.report.records.iter().find(|r| r.method == m).unwrap().accuracy;
        old.push(acc(Method::OldClassifier));
        adapted.push(acc(Method::Adapted));
        ideal.push(acc(Method::Ideal));
        // held-out old-environment data, the size of the scored new-environment split
        let e1 = generate_dataset(t2_eval.len() / 2, &cfg.ofdm, &a.source, derive_seed(cfg.seed, 14)).unwrap();
        old_e1.push(accuracy(&run.old, &e1.features(), &e1.labels).unwrap());
    }
    let (c1, c3, c2, c1e1) = (mean(&old), mean(&adapted), mean(&ideal), mean(&old_e1));
    let pass = c1 + 0.05 <= c3 && c3 >= c2 - 0.15 && c1 <= c1e1 - 0.05;
    outcome(
        pass,
        format!(
            "C1 {c1:.3}, C3 adapted {c3:.3}, C2 ideal {c2:.3}, C1 on E1 {c1e1:.3} \
             (need C1 + 0.05 <= C3, C3 >= C2 - 0.15, C1 <= C1 on E1 - 0.05)"
        ),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let report = gradcheck_suite(20, MASTER_SEED).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let e = report.max_rel_error;
    outcome(
        report.worst() < 1e-4 && secs < 10.0,
        format!("max relative error d {:.1e}, g {:.1e}, minimax {:.1e} in {secs:.2} s (need < 1e-4, < 10 s)", e[0], e[1], e[2]),
    )
}

fn unitary_dft(x: &[Complex64], sign: f64) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(m, v)| v * Complex64::from_polar(1.0, sign * 2.0 * std::f64::consts::PI * (k * m) as f64 / n as f64))
                .sum::<Complex64>()
                / (n as f64).sqrt()
        })
        .collect()
}

fn criterion_7() -> Outcome {
    let mut rng = rng_from_seed(MASTER_SEED);
    let (mut round, mut parseval, mut cp_exact) = (0.0f64, 0.0f64, true);
    for (n_data, n_cp, k) in [(32, 8, 1), (32, 8, 2), (64, 16, 1), (16, 4, 3)] {
        let cfg = OfdmConfig { n_data, n_cp, k_symbols: k, ..OfdmConfig::default() };
        for _ in 0..20 {
            let bits: Vec<u8> = (0..4 * n_data * k).map(|_| rng.random_range(0..2u8)).collect();
            let sym = map_16qam(&bits).unwrap();
            let frame = build_ofdm_frame(&sym, &cfg).unwrap();
            for (b, block) in frame.samples.chunks_exact(cfg.symbol_len()).enumerate() {
                cp_exact &= block[..n_cp] == block[n_data..];
                let body = &block[n_cp..];
                let orig = &sym[b * n_data..(b + 1) * n_data];
                let back = unitary_dft(body, -1.0);
                round = round.max(back.iter().zip(orig).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max));
                let e_t: f64 = body.iter().map(|v| v.norm_sqr()).sum();
                let e_f: f64 = orig.iter().map(|v| v.norm_sqr()).sum();
                parseval = parseval.max((e_t - e_f).abs());
            }
        }
    }
    let mut worst_cal = 0.0f64;
    for snr in SNRS {
        let ds = generate_dataset(20_000, &OfdmConfig::default(), &ChannelEnv::new(1.0, snr), MASTER_SEED).unwrap();
        let avg = |label: u8| {
            let p: Vec<f64> = ds.frames.iter().zip(&ds.labels).filter(|(_, &l)| l == label).map(|(f, _)| f.power()).collect();
            mean(&p)
        };
        let noise = avg(0);
        let ratio = (avg(1) - noise) / noise;
        let want = 10f64.powf(snr / 10.0);
        worst_cal = worst_cal.max((ratio - want).abs() / want);
    }
    outcome(
        round < 1e-10 && parseval < 1e-10 && cp_exact && worst_cal < 0.03,
        format!(
            "round trip {round:.1e}, Parseval {parseval:.1e}, CP exact {cp_exact}, \
             SNR calibration error {:.2}% over 10^4 emitter frames (need < 1e-10, exact, < 3%)",
            100.0 * worst_cal
        ),
    )
}

fn criterion_8() -> Outcome {
    let x = Matrix::from_vec(4, 2, vec![0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0, 0.0]).unwrap();
    let y = [0, 0, 1, 1];
    let p = SvmParams { c: 10.0, gamma: Some(1.0), standardize: false, ..SvmParams::default() };
    let xor = accuracy(&Classifier::Svm(train_svm_rbf(&x, &y, &p, 0).unwrap()), &x, &y).unwrap();

    let tol = 1e-2;
    let mut kkt_ok = 0;
    let mut memo_ok = true;
    for k in 0..20u64 {
        let mut rng = rng_from_seed(derive_seed(MASTER_SEED, 200 + k));
        let (n, d) = (40 + 5 * k as usize, 2 + k as usize % 5);
        let x = Matrix::from_vec(n, d, (0..n * d).map(|_| standard_normal(&mut rng)).collect()).unwrap();
        let mut y: Vec<u8> =
            x.iter_rows().map(|r| u8::from(r[0] * r[1] + 0.3 * standard_normal(&mut rng) > 0.0)).collect();
        y[0] = 0;
        y[1] = 1;
        let c = [0.5, 1.0, 5.0, 20.0][k as usize % 4];
        let (model, rep) = train_svm_rbf_detailed(&x, &y, &SvmParams { c, ..SvmParams::default() }, k).unwrap();
        let f = model.decision_function(&x).unwrap();
        let mut ok = true;
        let mut balance = 0.0;
        for i in 0..n {
            let (a, yi) = (rep.alphas[i], if y[i] == 1 { 1.0 } else { -1.0 });
            let m = yi * f[i];
            balance += a * yi;
            ok &= if a == 0.0 {
                m >= 1.0 - tol
            } else if a < c {
                (m - 1.0).abs() <= tol
            } else {
                m <= 1.0 + tol
            };
        }
        kkt_ok += usize::from(ok && balance.abs() < 1e-6);

        let fp = ForestParams { n_trees: 1, max_depth: None, bootstrap: false, ..ForestParams::default() };
        let tree = train_random_forest(&x, &y, &fp, k).unwrap();
        memo_ok &= tree.predict(&x).unwrap() == y;
    }
    outcome(
        xor == 1.0 && kkt_ok == 20 && memo_ok,
        format!("XOR accuracy {xor}, KKT holds on {kkt_ok}/20 datasets, single-tree memorization {memo_ok}"),
    )
}

fn cli(args: &[&str]) -> bool {
    Command::new(env!("CARGO_BIN_EXE_sensegan")).args(args).output().map(|o| o.status.success()).unwrap_or(false)
}

fn same_tree(a: &Path, b: &Path) -> (bool, usize) {
    let mut names: Vec<_> = fs::read_dir(a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    let same = names.iter().all(|n| fs::read(a.join(n)).ok() == fs::read(b.join(n)).ok());
    (same && !names.is_empty(), names.len())
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let s = |p: &Path| p.to_str().unwrap().to_string();
    let cfg = d.join("small.toml");
    fs::write(
        &cfg,
        "seed = 9\n[bigan]\nepochs = 100\n[adapt]\nn_source = 64\nn_target = 128\n[adapt.gan]\nepochs = 100\n\
         [sweep]\nsnr_db = [0.0, 10.0]\nreplicates = 2\nsynth_counts = [100]\n[gan]\nepochs = 200\n",
    )
    .unwrap();
    let mut ok = true;
    let mut files = 0;
    let data = d.join("data.siqd");
    ok &= cli(&["--seed", "9", "--out", &s(&data), "generate"]);
    for tag in ["a", "b"] {
        let gen = d.join(tag).join("gen");
        fs::create_dir_all(&gen).unwrap();
        ok &= cli(&["--seed", "9", "--out", &s(&gen.join("data.siqd")), "generate"]);
        ok &= cli(&["--seed", "9", "--out", &s(&d.join(tag).join("augment")), "augment", "--data", &s(&data)]);
        for cmd in ["adapt", "sweep"] {
            ok &= cli(&["--config", &s(&cfg), "--out", &s(&d.join(tag).join(cmd)), cmd]);
        }
    }
    for sub in ["gen", "augment", "adapt", "sweep"] {
        let (same, n) = same_tree(&d.join("a").join(sub), &d.join("b").join(sub));
        ok &= same;
        files += n;
    }
    outcome(ok, format!("generate, augment (defaults), adapt and sweep rerun: {files} files compared byte for byte"))
}

fn criterion_10() -> Outcome {
    let cfg = ExperimentConfig::with_seed(MASTER_SEED);
    let spec = sensegan::pipelines::AugmentSpec { synth: SynthSize::Multiplier(0.0), ..cfg.augment_spec() };
    let mut pairs = 0;
    let mut equal = 0;
    for k in 0..5u64 {
        for snr in SNRS {
            let ds = generate_dataset(100, &cfg.ofdm, &ChannelEnv::new(1.0, snr), derive_seed(MASTER_SEED, 300 + k)).unwrap();
            let (train, test) = split_dataset(&ds, &SplitSpec { train_ratio: 0.3, seed: k }).unwrap();
            let run = run_augmentation(&train, &test, &spec, k).unwrap();
            for kind in KINDS {
                let pick = |m| run.report.records.iter().find(|r| r.classifier == kind && r.method == m).unwrap().clone();
                let (b, a) = (pick(Method::Baseline), pick(Method::Augmented));
                pairs += 1;
                equal += usize::from(a.accuracy == b.accuracy && a.n_synth == 0 && b.n_synth == 0);
            }
        }
    }
    outcome(pairs == equal, format!("{equal}/{pairs} augmented rows equal their baseline exactly at multiplier 0"))
}

fn main() {
    let start = Instant::now();
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    let mut record = |n: usize, title: &'static str, o: Outcome| {
        println!("criterion {n:>2} {}: {title}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((n, title, o));
    };
    record(6, "gradient correctness", criterion_6());
    record(7, "signal-chain exactness", criterion_7());
    record(8, "SVM and RF oracles", criterion_8());
    record(10, "degenerate-augmentation identity", criterion_10());
    record(9, "determinism", criterion_9());
    let sweeps = run_sweeps();
    record(1, "augmentation gain at 0 dB", criterion_1(&sweeps));
    record(2, "high-SNR ceiling", criterion_2(&sweeps));
    record(3, "monotone SNR trend", criterion_3(&sweeps));
    record(4, "augmentation never hurts past 100 samples", criterion_4(&sweeps));
    record(5, "domain adaptation ordering", criterion_5());

    results.sort_by_key(|r| r.0);
    println!("\nacceptance summary ({:.0} s):", start.elapsed().as_secs_f64());
    for (n, title, o) in &results {
        println!("criterion {n:>2} {}: {title}", if o.pass { "PASS" } else { "FAIL" });
    }
    let failed = results.iter().filter(|r| !r.2.pass).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
