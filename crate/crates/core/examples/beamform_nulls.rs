//! Max-DI and max-rE beamform-and-project: steer at a target and place an
//! interferer in the pattern null.
//!
//! ```text
//! cargo run --example beamform_nulls
//! ```

use foakit::extract::{beamform_and_project, BeamKind};
use foakit::metrics::si_sdr;
use foakit::sh::{encode_plane_wave, Direction};
use rand::{Rng, SeedableRng};

fn main() -> foakit::Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let target = Direction::from_degrees(20.0, 0.0)?;
    let s: Vec<f64> = (0..16_000).map(|_| rng.random_range(-1.0..1.0)).collect();
    let v: Vec<f64> = (0..16_000).map(|_| rng.random_range(-1.0..1.0)).collect();
    let clean = encode_plane_wave(&s, target, 16_000)?;

    for kind in [BeamKind::MaxDi, BeamKind::MaxRe] {
        let (g0, g1) = kind.order_weights();
        let null = kind.null_angle().to_degrees();
        println!("{kind:?}: g0 {g0:.4} g1 {g1:.4}, null at {null:.2} deg");
        for off in [0.0, 45.0, 90.0, null, 180.0] {
            let interferer = Direction::from_degrees(20.0 + off, 0.0)?;
            let mix = clean.add(&encode_plane_wave(&v, interferer, 16_000)?)?;
            let est = beamform_and_project(&mix, kind, target);
            println!(
                "  interferer {off:>7.2} deg off: SI-SDR(W) mix {:>7.2} dB, est {:>7.2} dB",
                si_sdr(mix.channel(0), clean.channel(0))?,
                si_sdr(est.channel(0), clean.channel(0))?
            );
        }
    }
    Ok(())
}
