mod common;

use common::{bank_and_pool, noise, rng, small_sim};
use foakit::metrics::*;
use foakit::mixer::{build_pair, PairConfig};
use foakit::sh::FoaSignal;
use foakit::Error;
use proptest::prelude::*;
use rand::Rng;

fn foa(r: &mut impl Rng, n: usize) -> FoaSignal {
    FoaSignal::new(std::array::from_fn(|_| noise(r, n)), 16_000).unwrap()
}

fn orthogonalize(n: &[f64], r: &[f64]) -> Vec<f64> {
    let a = n.iter().zip(r).map(|(x, y)| x * y).sum::<f64>() / r.iter().map(|y| y * y).sum::<f64>();
    n.iter().zip(r).map(|(x, y)| x - a * y).collect()
}

#[test]
fn hann_is_periodic() {
    let w = hann(STFT_FFT_SIZE);
    assert_eq!(w[0], 0.0);
    assert!((w[STFT_FFT_SIZE / 2] - 1.0).abs() < 1e-15);
    for k in 1..STFT_FFT_SIZE {
        assert!((w[k] - w[STFT_FFT_SIZE - k]).abs() < 1e-15);
    }
    // shifted copies at the hop sum to a constant
    for t in 0..STFT_HOP {
        let s: f64 = (0..4).map(|j| w[t + j * STFT_HOP]).sum();
        assert!((s - 2.0).abs() < 1e-12);
    }
}

#[test]
fn sine_leakage_stays_within_one_bin() {
    let n = 16_384;
    for k0 in [37usize, 128, 301] {
        let f = k0 as f64 / STFT_FFT_SIZE as f64;
        let x: Vec<f64> = (0..n).map(|t| (2.0 * std::f64::consts::PI * f * t as f64 + 0.3).sin()).collect();
        let spec = stft(&x);
        assert_eq!(spec.num_frames(), 1 + n / STFT_HOP);
        assert_eq!(spec.num_bins(), STFT_FFT_SIZE / 2 + 1);
        // frames that touch the reflected edges are left out
        let edge = STFT_FFT_SIZE / STFT_HOP / 2;
        for frame in &spec.frames[edge..spec.num_frames() - edge] {
            let peak = frame[k0].norm();
            for (k, z) in frame.iter().enumerate() {
                if k.abs_diff(k0) > 1 {
                    assert!(20.0 * (z.norm() / peak).log10() <= -60.0, "bin {k}");
                }
            }
        }
    }
}

#[test]
fn istft_round_trip() {
    let mut r = rng(3);
    for n in [1024, 4096, 5000, 16_001] {
        let x = noise(&mut r, n);
        let y = istft(&stft(&x), n);
        let err = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err <= 1e-6, "n = {n}: {err:e}");
    }
}

#[test]
fn loss_properties() {
    let mut r = rng(4);
    let (a, b, c) = (foa(&mut r, 3000), foa(&mut r, 3000), foa(&mut r, 3000));
    assert_eq!(stft_l1_loss(&a, &a).unwrap(), 0.0);
    let ab = stft_l1_loss(&a, &b).unwrap();
    assert!(ab > 0.0);
    assert!((ab - stft_l1_loss(&b, &a).unwrap()).abs() <= 1e-9 * ab);
    let bc = stft_l1_loss(&b, &c).unwrap();
    assert!(stft_l1_loss(&a, &c).unwrap() <= ab + bc + 1e-9);
    let scaled = stft_l1_loss(&a.scale(2.0), &b.scale(2.0)).unwrap();
    assert!((scaled - 2.0 * ab).abs() <= 1e-9 * ab);
    let short = foa(&mut r, 100);
    assert!(matches!(stft_l1_loss(&a, &short), Err(Error::LengthMismatch(3000, 100))));
}

#[test]
fn si_sdr_examples() {
    let mut r = rng(5);
    let s = noise(&mut r, 16_000);
    let n = orthogonalize(&noise(&mut r, 16_000), &s);
    let ps: f64 = s.iter().map(|v| v * v).sum();
    let pn: f64 = n.iter().map(|v| v * v).sum();
    // noise 20 dB below the reference, orthogonal to it
    let k = (ps / pn / 100.0).sqrt();
    let est: Vec<f64> = s.iter().zip(&n).map(|(a, b)| a + k * b).collect();
    assert!((si_sdr(&est, &s).unwrap() - 20.0).abs() <= 0.01);
    assert_eq!(si_sdr(&s, &s).unwrap(), SI_SDR_CLAMP_DB);
    assert_eq!(si_sdr(&vec![0.0; s.len()], &s).unwrap(), -SI_SDR_CLAMP_DB);
    assert!(matches!(si_sdr(&s, &vec![0.0; s.len()]), Err(Error::ZeroEnergyReference)));
    assert!(matches!(si_sdr(&s[1..], &s), Err(Error::LengthMismatch(..))));
    // an estimate orthogonal to the reference has no target component
    assert_eq!(si_sdr(&n, &s).unwrap(), -SI_SDR_CLAMP_DB);
}

#[test]
fn si_sdr_ignores_estimate_scale() {
    let mut r = rng(6);
    let s = noise(&mut r, 8000);
    let e: Vec<f64> = s.iter().map(|v| v + 0.3 * r.random_range(-1.0..1.0)).collect();
    let base = si_sdr(&e, &s).unwrap();
    for p in [-6, -1, 1, 5, 20] {
        let a = 2f64.powi(p);
        let scaled: Vec<f64> = e.iter().map(|v| a * v).collect();
        assert_eq!(si_sdr(&scaled, &s).unwrap(), base);
        let neg: Vec<f64> = e.iter().map(|v| -a * v).collect();
        assert_eq!(si_sdr(&neg, &s).unwrap(), base);
    }
    for a in [0.3, 1.7, 123.456, 1e-4] {
        let scaled: Vec<f64> = e.iter().map(|v| a * v).collect();
        assert!((si_sdr(&scaled, &s).unwrap() - base).abs() <= 1e-9);
    }
}

#[test]
fn silent_channels_are_excluded() {
    let mut r = rng(7);
    let mut ch: [Vec<f64>; 4] = std::array::from_fn(|_| noise(&mut r, 1000));
    ch[2] = vec![0.0; 1000];
    ch[1].iter_mut().for_each(|v| *v *= 1e-7);
    let target = FoaSignal::new(ch, 16_000).unwrap();
    assert_eq!(active_channels(&target), vec![0, 3]);
}

#[test]
fn scores_on_generated_pairs() {
    let (bank, pool) = bank_and_pool(8, 10, 2, &small_sim());
    let cfg = PairConfig {
        length: 8192,
        ..PairConfig::default()
    };
    let mut scores = Vec::new();
    for i in 0..12 {
        let p = build_pair(&mut rng(100 + i), i as usize, 0, &bank, &pool, &cfg).unwrap();
        let id = score_pair(&p.mixture, &p.target, &p.meta, &p.mixture).unwrap();
        assert_eq!(id.si_sdri_db, 0.0);
        assert_eq!(id.close_secondary, p.meta.close_secondary);
        let oracle = score_pair(&p.mixture, &p.target, &p.meta, &p.target).unwrap();
        assert_eq!(oracle.si_sdr_est_db, SI_SDR_CLAMP_DB);
        assert!(score_pair(&p.mixture, &p.target, &p.meta, &FoaSignal::zeros(10, 16_000)).is_err());
        scores.push(oracle);
    }
    let s = aggregate(&scores);
    let all = s.all.unwrap();
    assert_eq!(all.count, 12);
    let parts = [&s.only_close_secondary, &s.no_close_secondary];
    let n: usize = parts.iter().filter_map(|b| b.as_ref()).map(|b| b.count).sum();
    assert_eq!(n, 12);
    let weighted: f64 = parts
        .iter()
        .filter_map(|b| b.as_ref())
        .map(|b| b.mean_si_sdri_db * b.count as f64)
        .sum::<f64>()
        / 12.0;
    assert!((weighted - all.mean_si_sdri_db).abs() <= 1e-9);
}

fn score(index: usize, mix: f64, est: f64, close: bool) -> PairScore {
    PairScore {
        index,
        si_sdr_mix_db: mix,
        si_sdr_est_db: est,
        si_sdri_db: est - mix,
        close_secondary: close,
        excluded_channels: vec![],
    }
}

#[test]
fn aggregate_and_table() {
    let scores = [score(0, 0.0, 3.0, true), score(1, 2.0, 3.0, true), score(2, -1.0, 5.0, false)];
    let s = aggregate(&scores);
    assert_eq!(s.all.as_ref().unwrap().count, 3);
    assert!((s.all.as_ref().unwrap().mean_si_sdri_db - 10.0 / 3.0).abs() < 1e-12);
    assert_eq!(s.only_close_secondary.as_ref().unwrap().mean_si_sdri_db, 2.0);
    assert_eq!(s.no_close_secondary.as_ref().unwrap().mean_si_sdri_db, 6.0);
    assert_eq!(s.no_close_secondary.as_ref().unwrap().mean_si_sdr_mix_db, -1.0);

    let only_close = aggregate(&scores[..2]);
    assert!(only_close.no_close_secondary.is_none());
    let json = serde_json::to_value(&only_close).unwrap();
    assert!(json.get("no_close_secondary").is_none());
    assert!(aggregate(&[]).all.is_none());

    let report = EvalReport::new(
        2,
        vec!["pairs/pair_000009".into()],
        vec![AlgorithmReport {
            algorithm: "loudness".into(),
            summary: only_close,
            pairs: scores[..2].to_vec(),
        }],
    );
    let table = report.to_table();
    let lines: Vec<&str> = table.lines().collect();
    assert!(lines[0].starts_with("Algorithm"));
    assert!(lines[2].contains("2.00 (n=2)"));
    assert!(lines[2].trim_end().ends_with("n/a"));
    assert_eq!(lines[0].len(), lines[2].len());
    assert!(table.contains("skipped: 1"));
    assert!(report.algorithm("loudness").is_some());
    let back: EvalReport = serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
    assert_eq!(back, report);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn si_sdr_bounded_and_scale_free(seed in 0u64..100_000, p in -20i32..20, mix in 0.0f64..2.0) {
        let mut r = rng(seed);
        let s = noise(&mut r, 256);
        let e: Vec<f64> = s.iter().map(|v| v + mix * r.random_range(-1.0..1.0)).collect();
        let base = si_sdr(&e, &s).unwrap();
        prop_assert!((-SI_SDR_CLAMP_DB..=SI_SDR_CLAMP_DB).contains(&base));
        let a = 2f64.powi(p);
        let scaled: Vec<f64> = e.iter().map(|v| a * v).collect();
        prop_assert_eq!(si_sdr(&scaled, &s).unwrap(), base);
    }

    #[test]
    fn stft_is_linear(seed in 0u64..100_000, a in -4.0f64..4.0) {
        let mut r = rng(seed);
        let x = noise(&mut r, 2048);
        let y = noise(&mut r, 2048);
        let z: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + q).collect();
        let (sx, sy, sz) = (stft(&x), stft(&y), stft(&z));
        for f in 0..sz.num_frames() {
            for k in 0..sz.num_bins() {
                prop_assert!((sz.frames[f][k] - (sx.frames[f][k] * a + sy.frames[f][k])).norm() <= 1e-9);
            }
        }
    }
}
