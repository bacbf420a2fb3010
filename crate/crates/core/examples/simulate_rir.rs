//! Simulate one ambisonic room impulse response and write it as a 4-channel
//! WAV.
//!
//! ```text
//! cargo run --release --example simulate_rir -- [out.wav]
//! ```

use foakit::io::write_foa_wav;
use foakit::room::{sample_scene_geometry, simulate_rir, MaterialBank, SimConfig, SPEED_OF_SOUND};
use rand::SeedableRng;

fn main() -> foakit::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| {
        std::env::temp_dir().join("foakit_rir.wav").display().to_string()
    });
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let scene = sample_scene_geometry(&mut rng, 1)?;
    let src = &scene.sources[0];
    println!("room {:.2?} m, walls {:?}", scene.room.dims(), scene.room.materials());
    println!(
        "source at {:.2} m, az {:.1} el {:.1}",
        src.distance,
        src.direction.azimuth_deg(),
        src.direction.elevation_deg()
    );

    // a cheaper order than the default keeps the example quick
    let cfg = SimConfig {
        max_order: 12,
        rir_length: 8000,
        ..SimConfig::default()
    };
    let bank = MaterialBank::presets(cfg.sample_rate);
    let t = std::time::Instant::now();
    let rir = simulate_rir(&scene.room, src.position, scene.receiver, &cfg, &bank, &mut rng)?;
    println!("simulated {} samples in {:.2?}", rir.len(), t.elapsed());

    let w = rir.channel(0);
    let peak = (0..w.len()).max_by(|&a, &b| w[a].abs().total_cmp(&w[b].abs())).unwrap();
    let expect = src.distance / SPEED_OF_SOUND * cfg.sample_rate as f64;
    println!("W peaks at sample {peak} (direct path due at {expect:.1})");
    let energy = rir.signal().channel_energy();
    println!("channel energies W Y Z X: {:.4?}", energy);

    write_foa_wav(std::path::Path::new(&out), rir.signal())?;
    println!("wrote {out}");
    Ok(())
}
