//! Simulate a small RIR bank, synthesize a clip pool and write a dataset of
//! (mixture, target) pairs.
//!
//! ```text
//! cargo run --release --example build_dataset -- [out_dir]
//! ```

use std::path::PathBuf;

use foakit::mixer::{generate_dataset, synthetic_pool, PairConfig, RirBank};
use foakit::room::SimConfig;
use foakit::seed::{stream_rng, Domain};

fn main() -> foakit::Result<()> {
    let out: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("foakit_dataset"));
    let seed = 3;
    let sim = SimConfig {
        max_order: 8,
        rir_length: 6000,
        ..SimConfig::default()
    };
    let t = std::time::Instant::now();
    let bank = RirBank::simulate(16, seed, &sim)?;
    println!("{} RIRs in {} rooms ({:.1?})", bank.rir_count(), bank.scenes.len(), t.elapsed());
    bank.write(&out.join("rirs"))?;

    let pool = synthetic_pool(&mut stream_rng(seed, Domain::Remix, 0), 16);
    let cfg = PairConfig {
        near_prob: 0.5,
        ..PairConfig::default()
    };
    let manifest = generate_dataset(&bank, &pool, &cfg, 20, seed, &out)?;
    println!(
        "{} pairs in {}: {} with a close secondary, {} near-placed",
        manifest.count,
        out.display(),
        manifest.buckets.close_secondary,
        manifest.buckets.near_placed
    );
    let meta: serde_json::Value = foakit::io::read_json(&out.join("pairs/pair_000000/meta.json"))?;
    println!("pair 0 target: {}", meta["target"]);
    Ok(())
}
