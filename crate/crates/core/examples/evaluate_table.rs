//! Generate a dataset, run every extractor on it and print the bucketed
//! SI-SDRi table. Drives the same code paths as the `foakit` binary.
//!
//! ```text
//! cargo run --release --example evaluate_table
//! ```

use foakit::cli::{
    cmd_evaluate, cmd_gen_clips, cmd_gen_mixtures, cmd_gen_rirs, EvaluateArgs, ExtractorArgs, GenClipsArgs,
    GenMixturesArgs, GenRirsArgs,
};
use foakit::extract::{Algorithm, DEFAULT_GRID_SIZE, DEFAULT_SPREAD_DEG};

fn main() -> foakit::Result<()> {
    let root = std::env::temp_dir().join("foakit_eval");
    let _ = std::fs::remove_dir_all(&root);
    cmd_gen_rirs(&GenRirsArgs {
        count: 24,
        seed: 1,
        out: root.join("rirs"),
        max_order: Some(10),
        jitter: None,
        rir_length: Some(8000),
    })?;
    cmd_gen_clips(&GenClipsArgs {
        count: 24,
        seed: 1,
        out: root.join("clips"),
    })?;
    cmd_gen_mixtures(&GenMixturesArgs {
        rir_dir: root.join("rirs"),
        clips_dir: root.join("clips"),
        count: 40,
        near_prob: 0.5,
        silence_prob: 0.2,
        seed: 1,
        out: root.join("pairs"),
    })?;
    let report = cmd_evaluate(&EvaluateArgs {
        pairs_dir: root.join("pairs"),
        algos: Algorithm::ALL.to_vec(),
        json: root.join("report.json"),
        table: None,
        params: ExtractorArgs {
            spread: DEFAULT_SPREAD_DEG,
            out_gain: 0.0,
            grid_size: DEFAULT_GRID_SIZE,
        },
    })?;
    let best = report
        .algorithms
        .iter()
        .filter(|a| a.algorithm != "identity")
        .filter_map(|a| a.summary.all.as_ref().map(|b| (a.algorithm.as_str(), b.mean_si_sdri_db)))
        .max_by(|a, b| a.1.total_cmp(&b.1));
    if let Some((name, v)) = best {
        println!("best baseline on this set: {name} ({v:.2} dB)");
    }
    println!("report: {}", root.join("report.json").display());
    Ok(())
}
