#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::Path;

use foakit::mixer::{synthetic_pool, Clip, RirBank};
use foakit::room::{ImagePath, SimConfig, SPEED_OF_SOUND};
use foakit::sh::{sh_eval, Direction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dir_deg(az: f64, el: f64) -> Direction {
    Direction::from_degrees(az, el).unwrap()
}

pub fn noise(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Direction at great-circle angle `gamma` from `d`, rotated by `roll` about it.
pub fn direction_at_angle(d: Direction, gamma: f64, roll: f64) -> Direction {
    let u = d.to_vector();
    // any vector not parallel to u, orthonormalized
    let helper = if u[2].abs() < 0.9 { [0.0, 0.0, 1.0] } else { [1.0, 0.0, 0.0] };
    let dot: f64 = (0..3).map(|i| u[i] * helper[i]).sum();
    let mut a: Vec<f64> = (0..3).map(|i| helper[i] - dot * u[i]).collect();
    let n = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    a.iter_mut().for_each(|v| *v /= n);
    let b = [u[1] * a[2] - u[2] * a[1], u[2] * a[0] - u[0] * a[2], u[0] * a[1] - u[1] * a[0]];
    let v: [f64; 3] = std::array::from_fn(|i| {
        gamma.cos() * u[i] + gamma.sin() * (roll.cos() * a[i] + roll.sin() * b[i])
    });
    Direction::from_vector(v).unwrap()
}

pub fn rel_l2(got: &[f64], want: &[f64]) -> f64 {
    let num: f64 = got.iter().zip(want).map(|(a, b)| (a - b) * (a - b)).sum();
    let den: f64 = want.iter().map(|b| b * b).sum();
    (num / den).sqrt()
}

/// Time-domain image-source RIR: a Hann-windowed sinc per path, scaled by the
/// path gain and the SH gains of its arrival direction.
pub fn windowed_sinc_rir(paths: &[ImagePath], fs: f64, len: usize, half_width: f64) -> [Vec<f64>; 4] {
    let mut out: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; len]);
    for p in paths {
        let center = (p.distance() / SPEED_OF_SOUND) * fs;
        let g = sh_eval(p.direction).0;
        let lo = (center - half_width).ceil().max(0.0) as usize;
        let hi = ((center + half_width).floor() as usize).min(len.saturating_sub(1));
        for t in lo..=hi {
            let x = t as f64 - center;
            let sinc = if x == 0.0 { 1.0 } else { (PI * x).sin() / (PI * x) };
            let w = 0.5 + 0.5 * (PI * x / half_width).cos();
            let v = p.gain * sinc * w;
            for c in 0..4 {
                out[c][t] += v * g[c];
            }
        }
    }
    out
}

/// Peak of the trigonometric interpolant of a length-`n` periodic signal,
/// searched on a fine grid around the largest sample.
pub fn interpolated_peak(x: &[f64]) -> (f64, f64) {
    let n = x.len();
    let k0 = (0..n).max_by(|&a, &b| x[a].abs().total_cmp(&x[b].abs())).unwrap();
    // DFT once, then evaluate the interpolant directly
    let spec: Vec<(f64, f64)> = (0..=n / 2)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (t, v) in x.iter().enumerate() {
                let ph = -2.0 * PI * (k * t) as f64 / n as f64;
                re += v * ph.cos();
                im += v * ph.sin();
            }
            (re, im)
        })
        .collect();
    let eval = |t: f64| {
        let mut s = spec[0].0;
        for (k, &(re, im)) in spec.iter().enumerate().skip(1) {
            let ph = 2.0 * PI * k as f64 * t / n as f64;
            let w = if 2 * k == n { 1.0 } else { 2.0 };
            s += w * (re * ph.cos() - im * ph.sin());
        }
        s / n as f64
    };
    let mut best = (k0 as f64, eval(k0 as f64));
    let steps = 2000;
    for i in 0..=steps {
        let t = k0 as f64 - 1.0 + 2.0 * i as f64 / steps as f64;
        let v = eval(t);
        if v.abs() > best.1.abs() {
            best = (t, v);
        }
    }
    best
}

/// Desk-scale reverberant simulation settings shared by dataset tests.
pub fn desk_sim() -> SimConfig {
    SimConfig {
        max_order: 15,
        rir_length: 8000,
        ..SimConfig::default()
    }
}

pub fn small_sim() -> SimConfig {
    SimConfig {
        max_order: 3,
        rir_length: 2000,
        ..SimConfig::default()
    }
}

pub fn bank_and_pool(rirs: usize, clips: usize, seed: u64, cfg: &SimConfig) -> (RirBank, Vec<Clip>) {
    let bank = RirBank::simulate(rirs, seed, cfg).unwrap();
    let pool = synthetic_pool(&mut rng(seed ^ 0x5eed), clips);
    (bank, pool)
}

/// Every file under `dir` with its bytes, sorted by relative path.
pub fn tree_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().display().to_string();
                out.push((rel, std::fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}
