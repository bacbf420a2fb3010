use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{build_pair, Clip, PairConfig, PairMeta, RirBank};
use crate::error::{Error, Result};
use crate::io::{self, SCHEMA_VERSION};
use crate::seed::{stream_rng, Domain};
use crate::sh::{FoaSignal, CHANNELS};

/// Tolerance of the on-disk `mixture = target + residual` check, relative to the mixture RMS.
pub const IDENTITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketStats {
    pub close_secondary: usize,
    pub no_close_secondary: usize,
    pub close_fraction: f64,
    pub near_placed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub schema_version: u32,
    pub seed: u64,
    pub count: usize,
    pub config: PairConfig,
    pub rir_bank_seed: u64,
    pub rir_count: usize,
    pub clip_count: usize,
    pub buckets: BucketStats,
    pub pairs: Vec<String>,
}

fn pair_name(index: usize) -> String {
    format!("pair_{index:06}")
}

/// Builds and writes `count` pairs under `out_dir/pairs/`, in parallel,
/// then a `manifest.json` with bucket counts.
pub fn generate_dataset(
    bank: &RirBank,
    pool: &[Clip],
    cfg: &PairConfig,
    count: usize,
    seed: u64,
    out_dir: &Path,
) -> Result<DatasetManifest> {
    cfg.validate()?;
    if count > 0 && cfg.near_prob > 0.0 {
        let first = pool.first().ok_or_else(|| Error::PoolExhausted("empty clip pool".into()))?;
        if pool.iter().all(|c| c.same_description(first)) {
            return Err(Error::PoolExhausted(
                "every clip shares one description; near placement needs a different one".into(),
            ));
        }
    }
    let pairs_dir = out_dir.join("pairs");
    io::create_dir(&pairs_dir)?;
    let metas = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, Domain::Pair, i as u64);
            let pair = build_pair(&mut rng, i, seed, bank, pool, cfg)?;
            let dir = pairs_dir.join(pair_name(i));
            io::create_dir(&dir)?;
            io::write_foa_wav(&dir.join("mixture.wav"), &pair.mixture)?;
            io::write_foa_wav(&dir.join("target.wav"), &pair.target)?;
            io::write_json(&dir.join("meta.json"), &pair.meta)?;
            log::debug!("wrote {}", pair_name(i));
            Ok(pair.meta)
        })
        .collect::<Result<Vec<_>>>()?;
    let close = metas.iter().filter(|m| m.close_secondary).count();
    let manifest = DatasetManifest {
        schema_version: SCHEMA_VERSION,
        seed,
        count,
        config: cfg.clone(),
        rir_bank_seed: bank.seed,
        rir_count: bank.rir_count(),
        clip_count: pool.len(),
        buckets: BucketStats {
            close_secondary: close,
            no_close_secondary: count - close,
            close_fraction: if count > 0 { close as f64 / count as f64 } else { 0.0 },
            near_placed: metas.iter().filter(|m| m.near_placed).count(),
        },
        pairs: (0..count).map(|i| format!("pairs/{}", pair_name(i))).collect(),
    };
    io::write_json(&out_dir.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

/// A pair read back from disk.
#[derive(Debug, Clone)]
pub struct StoredPair {
    pub dir: PathBuf,
    pub mixture: FoaSignal,
    pub target: FoaSignal,
    pub meta: PairMeta,
}

pub fn load_pair(dir: &Path) -> Result<StoredPair> {
    Ok(StoredPair {
        dir: dir.to_path_buf(),
        mixture: io::read_foa_wav(&dir.join("mixture.wav"))?,
        target: io::read_foa_wav(&dir.join("target.wav"))?,
        meta: io::read_json(&dir.join("meta.json"))?,
    })
}

/// Pair directories of a dataset, from its manifest when present and
/// otherwise by scanning `pairs/`.
pub fn list_pairs(root: &Path) -> Result<Vec<PathBuf>> {
    let manifest = root.join("manifest.json");
    if manifest.exists() {
        let m: DatasetManifest = io::read_json(&manifest)?;
        return Ok(m.pairs.iter().map(|p| root.join(p)).collect());
    }
    let pairs = root.join("pairs");
    let mut dirs: Vec<PathBuf> = std::fs::read_dir(&pairs)
        .map_err(|e| Error::io(&pairs, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    Ok(dirs)
}

/// Checks shapes and that `mixture - target` carries the residual energy
/// recorded at generation time.
pub fn check_pair_identity(pair: &StoredPair) -> Result<()> {
    let m = &pair.meta;
    let bad = |msg: String| Err(Error::Integrity(format!("{}: {msg}", pair.dir.display())));
    if pair.mixture.len() != m.length || pair.target.len() != m.length {
        return bad(format!("expected {} samples", m.length));
    }
    if pair.mixture.sample_rate() != m.sample_rate || pair.target.sample_rate() != m.sample_rate {
        return bad(format!("expected {} Hz", m.sample_rate));
    }
    let diff = pair.mixture.sub(&pair.target)?;
    let scale = pair.mixture.rms().max(f64::MIN_POSITIVE);
    for c in 0..CHANNELS {
        let got = super::clips::rms(diff.channel(c));
        let target = super::clips::rms(pair.target.channel(c));
        if (got - m.residual_rms[c]).abs() > IDENTITY_TOLERANCE * scale
            || (target - m.target_rms[c]).abs() > IDENTITY_TOLERANCE * scale
        {
            return bad(format!(
                "channel {c}: residual rms {got:e} vs recorded {:e}",
                m.residual_rms[c]
            ));
        }
    }
    Ok(())
}
