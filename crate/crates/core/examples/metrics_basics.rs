//! SI-SDR and the complex-STFT distance on toy signals.
//!
//! ```text
//! cargo run --example metrics_basics
//! ```

use foakit::metrics::{istft, si_sdr, stft, stft_l1_loss};
use foakit::sh::{encode_plane_wave, Direction};
use rand::{Rng, SeedableRng};

fn main() -> foakit::Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    let s: Vec<f64> = (0..8000).map(|_| rng.random_range(-1.0..1.0)).collect();
    for noise_db in [0.0, -10.0, -20.0, -40.0] {
        let k = 10f64.powf(noise_db / 20.0);
        let est: Vec<f64> = s.iter().map(|v| 3.0 * v + k * rng.random_range(-1.0..1.0)).collect();
        println!("3 x reference + noise at {noise_db:>5.1} dB re the reference -> SI-SDR {:>6.2} dB", si_sdr(&est, &s)?);
    }

    let spec = stft(&s);
    let back = istft(&spec, s.len());
    let err = s.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("{} frames x {} bins, round-trip err {err:.1e}", spec.num_frames(), spec.num_bins());

    let d = Direction::from_degrees(0.0, 0.0)?;
    let a = encode_plane_wave(&s, d, 16_000)?;
    let b = encode_plane_wave(&s, Direction::from_degrees(10.0, 0.0)?, 16_000)?;
    println!("STFT l1: same {:.3}, 10 deg apart {:.3}", stft_l1_loss(&a, &a)?, stft_l1_loss(&a, &b)?);
    Ok(())
}
