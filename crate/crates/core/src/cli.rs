//! Command-line front end: `gen-rirs`, `gen-clips`, `gen-mixtures`,
//! `extract` and `evaluate`.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::error::{Error, ErrorKind, Result};
use crate::extract::{Algorithm, Extractor, ExtractorConfig, DEFAULT_GRID_SIZE, DEFAULT_SPREAD_DEG};
use crate::io;
use crate::metrics::{aggregate, score_pair, AlgorithmReport, EvalReport, PairScore};
use crate::mixer::{
    check_pair_identity, export_clip_dir, generate_dataset, import_clip_dir, list_pairs, load_pair, synthetic_pool,
    PairConfig, RirBank, PAIR_SAMPLE_RATE,
};
use crate::room::SimConfig;
use crate::seed::{stream_rng, Domain};
use crate::sh::Direction;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_INTEGRITY: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "foakit", version, about = "First-order ambisonics dataset and baseline toolkit")]
pub struct Cli {
    /// Worker threads (default: all logical cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a bank of ambisonic RIRs.
    GenRirs(GenRirsArgs),
    /// Write a synthetic mono clip pool.
    GenClips(GenClipsArgs),
    /// Mix clips through a RIR bank into (mixture, target) pairs.
    GenMixtures(GenMixturesArgs),
    /// Run one extractor on a 4-channel WAV.
    Extract(ExtractArgs),
    /// Score extractors on a pair dataset.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GenRirsArgs {
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub max_order: Option<u32>,
    /// Image jitter per reflection order, meters.
    #[arg(long)]
    pub jitter: Option<f64>,
    /// RIR length in samples.
    #[arg(long)]
    pub rir_length: Option<usize>,
}

impl GenRirsArgs {
    pub fn sim_config(&self) -> SimConfig {
        let mut cfg = SimConfig::default();
        if let Some(v) = self.max_order {
            cfg.max_order = v;
        }
        if let Some(v) = self.jitter {
            cfg.jitter_m = v;
        }
        if let Some(v) = self.rir_length {
            cfg.rir_length = v;
        }
        cfg
    }
}

#[derive(Debug, Clone, Args)]
pub struct GenClipsArgs {
    #[arg(long, default_value_t = 32)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct GenMixturesArgs {
    #[arg(long)]
    pub rir_dir: PathBuf,
    /// Directory of mono 16 kHz WAV clips with optional `.txt` descriptions.
    #[arg(long)]
    pub clips_dir: PathBuf,
    #[arg(long, default_value_t = 200)]
    pub count: usize,
    #[arg(long, default_value_t = 0.5)]
    pub near_prob: f64,
    #[arg(long, default_value_t = 0.2)]
    pub silence_prob: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ExtractorArgs {
    /// Full cap width for `loudness`, degrees (360 keeps everything).
    #[arg(long, default_value_t = DEFAULT_SPREAD_DEG)]
    pub spread: f64,
    /// Gain applied outside the cap for `loudness`.
    #[arg(long, default_value_t = 0.0)]
    pub out_gain: f64,
    #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
    pub grid_size: usize,
}

impl ExtractorArgs {
    pub fn config(&self, algorithm: Algorithm, target: Direction) -> ExtractorConfig {
        ExtractorConfig {
            algorithm,
            target_dir: target,
            cap_spread_deg: self.spread,
            out_gain: self.out_gain,
            grid_size: self.grid_size,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ExtractArgs {
    #[arg(long, value_enum)]
    pub algo: Algorithm,
    /// Target azimuth, degrees.
    #[arg(long, allow_hyphen_values = true)]
    pub azimuth: f64,
    /// Target elevation, degrees.
    #[arg(long, allow_hyphen_values = true)]
    pub elevation: f64,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub params: ExtractorArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub pairs_dir: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = Algorithm::ALL)]
    pub algos: Vec<Algorithm>,
    /// JSON report path.
    #[arg(long)]
    pub json: PathBuf,
    /// Text table path.
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[command(flatten)]
    pub params: ExtractorArgs,
}

pub fn exit_code(e: &Error) -> i32 {
    match e.kind() {
        ErrorKind::Config => EXIT_CONFIG,
        ErrorKind::Io => EXIT_IO,
        ErrorKind::Integrity => EXIT_INTEGRITY,
    }
}

pub fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.command {
        Command::GenRirs(a) => cmd_gen_rirs(&a).map(|_| ()),
        Command::GenClips(a) => cmd_gen_clips(&a),
        Command::GenMixtures(a) => cmd_gen_mixtures(&a).map(|_| ()),
        Command::Extract(a) => cmd_extract(&a),
        Command::Evaluate(a) => cmd_evaluate(&a).map(|_| ()),
    }
}

pub fn cmd_gen_rirs(a: &GenRirsArgs) -> Result<RirBank> {
    let cfg = a.sim_config();
    cfg.validate()?;
    io::create_dir(&a.out)?;
    let bank = RirBank::simulate(a.count, a.seed, &cfg)?;
    bank.write(&a.out)?;
    log::info!("wrote {} RIRs in {} rooms to {}", bank.rir_count(), bank.scenes.len(), a.out.display());
    Ok(bank)
}

pub fn cmd_gen_clips(a: &GenClipsArgs) -> Result<()> {
    let pool = synthetic_pool(&mut stream_rng(a.seed, Domain::Remix, 0), a.count);
    export_clip_dir(&a.out, &pool)
}

pub fn cmd_gen_mixtures(a: &GenMixturesArgs) -> Result<crate::mixer::DatasetManifest> {
    let cfg = PairConfig {
        near_prob: a.near_prob,
        silence_prob: a.silence_prob,
        ..PairConfig::default()
    };
    cfg.validate()?;
    let bank = RirBank::load(&a.rir_dir)?;
    let pool = import_clip_dir(&a.clips_dir)?;
    let manifest = generate_dataset(&bank, &pool, &cfg, a.count, a.seed, &a.out)?;
    log::info!(
        "wrote {} pairs, {} with a close secondary",
        manifest.count,
        manifest.buckets.close_secondary
    );
    Ok(manifest)
}

pub fn cmd_extract(a: &ExtractArgs) -> Result<()> {
    let target = Direction::from_degrees(a.azimuth, a.elevation)?;
    let x = io::read_foa_wav(&a.input)?;
    if x.sample_rate() != PAIR_SAMPLE_RATE {
        return Err(Error::SampleRateMismatch {
            expected: PAIR_SAMPLE_RATE,
            got: x.sample_rate(),
        });
    }
    let y = Extractor::new(&a.params.config(a.algo, target))?.apply(&x);
    io::write_foa_wav(&a.output, &y)
}

fn relative(root: &Path, p: &Path) -> String {
    p.strip_prefix(root).unwrap_or(p).display().to_string()
}

pub fn cmd_evaluate(a: &EvaluateArgs) -> Result<EvalReport> {
    let dirs = list_pairs(&a.pairs_dir)?;
    let results: Vec<std::result::Result<Vec<PairScore>, String>> = dirs
        .par_iter()
        .map(|dir| {
            let scored = load_pair(dir).and_then(|pair| {
                check_pair_identity(&pair)?;
                let target = pair.meta.target.direction()?;
                a.algos
                    .iter()
                    .map(|&algo| {
                        let est = Extractor::new(&a.params.config(algo, target))?.apply(&pair.mixture);
                        score_pair(&pair.mixture, &pair.target, &pair.meta, &est)
                    })
                    .collect::<Result<Vec<_>>>()
            });
            scored.map_err(|e| {
                log::warn!("skipping {}: {e}", dir.display());
                relative(&a.pairs_dir, dir)
            })
        })
        .collect();

    let mut skipped = Vec::new();
    let mut per_algo: Vec<Vec<PairScore>> = vec![Vec::new(); a.algos.len()];
    for r in results {
        match r {
            Ok(scores) => scores.into_iter().zip(per_algo.iter_mut()).for_each(|(s, v)| v.push(s)),
            Err(name) => skipped.push(name),
        }
    }
    if !dirs.is_empty() && skipped.len() == dirs.len() {
        return Err(Error::Integrity(format!("all {} pairs failed to evaluate", dirs.len())));
    }
    let algorithms = a
        .algos
        .iter()
        .zip(per_algo)
        .map(|(algo, pairs)| AlgorithmReport {
            algorithm: algo.name().to_string(),
            summary: aggregate(&pairs),
            pairs,
        })
        .collect();
    let report = EvalReport::new(dirs.len() - skipped.len(), skipped, algorithms);
    io::write_json(&a.json, &report)?;
    let table = report.to_table();
    if let Some(path) = &a.table {
        std::fs::write(path, &table).map_err(|e| Error::io(path, e))?;
    }
    print!("{table}");
    Ok(report)
}
