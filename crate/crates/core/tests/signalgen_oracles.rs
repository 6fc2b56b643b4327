use num_complex::Complex64;
use rand::Rng;
use sensegan::rng::rng_from_seed;
use sensegan::signalgen::siqd::{read_siqd, to_bytes};
use sensegan::signalgen::{
    add_awgn, apply_channel, build_ofdm_frame, draw_rayleigh_taps, generate_dataset, map_16qam,
    random_ofdm_frame, ChannelEnv, IqFrame, OfdmConfig, SnrReference,
};
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_symbols(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = rng_from_seed(seed);
    let bits: Vec<u8> = (0..4 * n).map(|_| rng.random_range(0..2u8)).collect();
    map_16qam(&bits).unwrap()
}

fn naive_dft(x: &[Complex64], sign: f64) -> Vec<Complex64> {
    let n = x.len();
    let norm = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(m, v)| {
                    let ang = sign * 2.0 * std::f64::consts::PI * (k * m) as f64 / n as f64;
                    v * Complex64::from_polar(1.0, ang)
                })
                .sum::<Complex64>()
                * norm
        })
        .collect()
}

fn max_err(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn energy(x: &[Complex64]) -> f64 {
    x.iter().map(|s| s.norm_sqr()).sum()
}

#[test]
fn body_matches_direct_idft() {
    let cfg = OfdmConfig::default();
    let sym = random_symbols(cfg.n_data, 1);
    let frame = build_ofdm_frame(&sym, &cfg).unwrap();
    let body = &frame.samples[cfg.n_cp..];
    assert!(max_err(body, &naive_dft(&sym, 1.0)) < 1e-12);
}

#[test]
fn unitary_round_trip_and_parseval() {
    for (seed, n_data) in [(2, 32), (3, 64), (4, 8)] {
        let cfg = OfdmConfig { n_data, n_cp: n_data / 4, ..OfdmConfig::default() };
        let sym = random_symbols(n_data, seed);
        let frame = build_ofdm_frame(&sym, &cfg).unwrap();
        let body = &frame.samples[cfg.n_cp..];
        let back = naive_dft(body, -1.0);
        assert!(max_err(&back, &sym) < 1e-10);
        assert!((energy(body) - energy(&sym)).abs() < 1e-10);
    }
}

#[test]
fn cyclic_prefix_is_exact_copy() {
    for k in [1, 2, 3] {
        let cfg = OfdmConfig { k_symbols: k, ..OfdmConfig::default() };
        let frame = random_ofdm_frame(&cfg, &mut rng_from_seed(k as u64)).unwrap();
        assert_eq!(frame.len(), k * 40);
        for sym in frame.samples.chunks_exact(cfg.symbol_len()) {
            assert_eq!(&sym[..cfg.n_cp], &sym[cfg.n_data..]);
        }
    }
}

#[test]
fn qam_power_is_unit() {
    let bits: Vec<u8> = (0u8..16).flat_map(|v| (0..4).rev().map(move |k| (v >> k) & 1)).collect();
    let pts = map_16qam(&bits).unwrap();
    assert!((energy(&pts) / 16.0 - 1.0).abs() < 1e-12);
}

#[test]
fn tap_power_matches_variance() {
    for var in [1.0, 2.0] {
        let env = ChannelEnv::new(var, 0.0);
        let mut rng = rng_from_seed(11);
        let trials = 20_000;
        let mut per_tap = vec![0.0; env.n_taps];
        for _ in 0..trials {
            for (acc, h) in per_tap.iter_mut().zip(draw_rayleigh_taps(&env, &mut rng)) {
                *acc += h.norm_sqr();
            }
        }
        let total: f64 = per_tap.iter().sum::<f64>() / trials as f64;
        assert!((total - var).abs() / var < 0.02, "var {var}: {total}");
        for p in per_tap {
            let p = p / trials as f64;
            assert!((p - var / 4.0).abs() / (var / 4.0) < 0.04);
        }
    }
}

#[test]
fn noise_power_matches_snr() {
    for snr in [0.0, 10.0] {
        let zero = IqFrame::zeros(40);
        let mut rng = rng_from_seed(5);
        let trials = 5_000;
        let p: f64 = (0..trials)
            .map(|_| add_awgn(&zero, snr, 2.0, &mut rng).unwrap().power())
            .sum::<f64>()
            / trials as f64;
        let want = 2.0 / 10f64.powf(snr / 10.0);
        assert!((p - want).abs() / want < 0.01, "snr {snr}: {p} vs {want}");
    }
}

#[test]
fn channel_matches_direct_convolution() {
    let x: Vec<Complex64> = (0..10).map(|i| c(i as f64, -(i as f64) / 2.0)).collect();
    let h = [c(1.0, 0.5), c(-0.25, 0.0), c(0.0, 2.0)];
    let y = apply_channel(&IqFrame::new(x.clone()), &h).unwrap();
    for n in 0..x.len() {
        let mut want = c(0.0, 0.0);
        for k in 0..h.len() {
            if n >= k {
                want += h[k] * x[n - k];
            }
        }
        assert!((y.samples[n] - want).norm() < 1e-12);
    }
}

#[test]
fn channel_is_linear() {
    let cfg = OfdmConfig::default();
    let mut rng = rng_from_seed(8);
    let a = random_ofdm_frame(&cfg, &mut rng).unwrap();
    let b = random_ofdm_frame(&cfg, &mut rng).unwrap();
    let h = draw_rayleigh_taps(&ChannelEnv::default(), &mut rng);
    let (alpha, beta) = (c(0.3, -1.2), c(2.0, 0.5));
    let mix = IqFrame::new(a.samples.iter().zip(&b.samples).map(|(x, y)| alpha * x + beta * y).collect());
    let lhs = apply_channel(&mix, &h).unwrap();
    let ha = apply_channel(&a, &h).unwrap();
    let hb = apply_channel(&b, &h).unwrap();
    let rhs: Vec<Complex64> = ha.samples.iter().zip(&hb.samples).map(|(x, y)| alpha * x + beta * y).collect();
    assert!(max_err(&lhs.samples, &rhs) < 1e-12);
}

#[test]
fn snr_calibration_within_three_percent() {
    for snr in [0.0, 5.0, 10.0] {
        let env = ChannelEnv::new(1.0, snr);
        let ds = generate_dataset(20_000, &OfdmConfig::default(), &env, 21).unwrap();
        let mean_power = |label: u8| {
            let (sum, n) = ds
                .frames
                .iter()
                .zip(&ds.labels)
                .filter(|(_, &l)| l == label)
                .fold((0.0, 0), |(s, n), (f, _)| (s + f.power(), n + 1));
            sum / n as f64
        };
        let noise = mean_power(0);
        let signal = mean_power(1) - noise;
        let ratio = signal / noise;
        let want = 10f64.powf(snr / 10.0);
        assert!((ratio - want).abs() / want < 0.03, "snr {snr}: {ratio} vs {want}");
    }
}

#[test]
fn transmit_reference_uses_unit_waveform_power() {
    let env = ChannelEnv { snr_reference: SnrReference::Transmit, ..ChannelEnv::new(2.0, 0.0) };
    let ds = generate_dataset(4_000, &OfdmConfig::default(), &env, 3).unwrap();
    let noise: f64 = ds.frames.iter().zip(&ds.labels).filter(|(_, &l)| l == 0).map(|(f, _)| f.power()).sum::<f64>()
        / 2_000.0;
    assert!((noise - 1.0).abs() < 0.03, "{noise}");
}

#[test]
fn noise_frames_follow_chi_squared() {
    let ds = generate_dataset(2_000, &OfdmConfig::default(), &ChannelEnv::new(1.0, 0.0), 17).unwrap();
    let energies: Vec<f64> =
        ds.frames.iter().zip(&ds.labels).filter(|(_, &l)| l == 0).map(|(f, _)| energy(&f.samples)).collect();
    let n = ds.frame_len() as f64;
    let var = energies.iter().sum::<f64>() / (energies.len() as f64 * n);
    let dist = ChiSquared::new(2.0 * n).unwrap();
    let bins = 10;
    let mut counts = vec![0usize; bins];
    for e in &energies {
        let u = dist.cdf(2.0 * e / var);
        counts[((u * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let expect = energies.len() as f64 / bins as f64;
    let stat: f64 = counts.iter().map(|&k| (k as f64 - expect).powi(2) / expect).sum();
    let p = 1.0 - ChiSquared::new((bins - 2) as f64).unwrap().cdf(stat);
    assert!(p > 0.01, "counts {counts:?}, p = {p}");
}

#[test]
fn generation_is_deterministic() {
    let cfg = OfdmConfig::default();
    let env = ChannelEnv::new(1.0, 5.0);
    let a = generate_dataset(64, &cfg, &env, 99).unwrap();
    let b = generate_dataset(64, &cfg, &env, 99).unwrap();
    assert_eq!(to_bytes(&a), to_bytes(&b));
    let c = generate_dataset(64, &cfg, &env, 100).unwrap();
    assert_ne!(to_bytes(&a), to_bytes(&c));
}

#[test]
fn siqd_round_trip() {
    let ds = generate_dataset(30, &OfdmConfig::default(), &ChannelEnv::new(0.5, 3.0), 4).unwrap();
    let bytes = to_bytes(&ds);
    let back = read_siqd(bytes.as_slice()).unwrap();
    assert_eq!(back.labels, ds.labels);
    for (a, b) in back.frames.iter().zip(&ds.frames) {
        for (x, y) in a.samples.iter().zip(&b.samples) {
            assert_eq!(x.re, y.re as f32 as f64);
            assert_eq!(x.im, y.im as f32 as f64);
        }
    }
    assert_eq!(to_bytes(&back), bytes);
}

#[test]
fn siqd_rejects_truncation() {
    let ds = generate_dataset(10, &OfdmConfig::default(), &ChannelEnv::default(), 4).unwrap();
    let bytes = to_bytes(&ds);
    for cut in [0, 3, bytes.len() / 2, bytes.len() - 1] {
        assert!(read_siqd(&bytes[..cut]).is_err(), "cut {cut}");
    }
}
