//! Mixture synthesis: mono clips rendered through ambisonic RIRs, mixed
//! into `(mixture, target)` pairs with the residual kept alongside.

mod bank;
mod clips;
mod dataset;

pub use bank::{BankManifest, BankScene, ManifestEntry, RirBank, RirSidecar, SourceRecord, SOURCES_PER_SCENE};
pub use clips::{export_clip_dir, import_clip_dir, synthetic_pool, Clip, CLIP_RMS_DBFS, LOOP_CROSSFADE_S};
pub use dataset::{
    check_pair_identity, generate_dataset, list_pairs, load_pair, BucketStats, DatasetManifest, StoredPair,
};

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dsp::convolve_many;
use crate::error::{Error, Result};
use crate::io::SCHEMA_VERSION;
use crate::room::{AmbisonicRir, SceneGeometry};
use crate::sh::{
    apply_rotation, great_circle_distance, rotation_between, sample_uniform_direction, Direction, FoaSignal,
    CHANNELS,
};

pub const PAIR_SAMPLE_RATE: u32 = 16_000;
/// 4.096 s at 16 kHz.
pub const PAIR_LENGTH: usize = 65_536;
/// Half-width of the azimuth/elevation box used for near placement.
pub const NEAR_BOX_DEG: f64 = 15.0;
/// Great-circle radius that defines the close-secondary bucket.
pub const CLOSE_CAP_DEG: f64 = 15.0;

/// One source of a scene and how it enters the mix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    pub clip_ref: String,
    pub gain_db: f64,
    /// Index into the scene's source list.
    pub geometry: usize,
    pub description: String,
    pub is_target: bool,
    pub silenced: bool,
    /// Arrival direction after any near-target override.
    pub direction: Direction,
    pub near_placed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceMeta {
    pub clip_ref: String,
    pub description: String,
    pub gain_db: f64,
    pub silenced: bool,
    pub azimuth_deg: f64,
    pub elevation_deg: f64,
    pub distance_m: f64,
    pub rir_ref: String,
    pub near_placed: bool,
}

impl SourceMeta {
    pub fn direction(&self) -> Result<Direction> {
        Direction::from_degrees(self.azimuth_deg, self.elevation_deg)
    }
}

/// Everything needed to interpret a pair, including its bucket label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairMeta {
    pub schema_version: u32,
    pub index: usize,
    pub seed: u64,
    pub sample_rate: u32,
    pub length: usize,
    pub bank_scene: usize,
    pub room_dims: [f64; 3],
    pub room_materials: [String; 6],
    pub target: SourceMeta,
    pub secondaries: Vec<SourceMeta>,
    pub near_placed: bool,
    pub close_secondary: bool,
    /// Per-channel RMS of the target and of `mixture - target`.
    pub target_rms: [f64; CHANNELS],
    pub residual_rms: [f64; CHANNELS],
}

impl PairMeta {
    /// Recomputes the bucket label from the stored directions.
    pub fn has_close_secondary(&self) -> Result<bool> {
        let t = self.target.direction()?;
        for s in self.secondaries.iter().filter(|s| !s.silenced) {
            if great_circle_distance(t, s.direction()?) <= CLOSE_CAP_DEG.to_radians() {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// `mixture = target + residual`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixturePair {
    pub mixture: FoaSignal,
    pub target: FoaSignal,
    pub residual: FoaSignal,
    pub meta: PairMeta,
}

/// Knobs of the pair generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairConfig {
    pub near_prob: f64,
    pub silence_prob: f64,
    pub gain_db_range: (f64, f64),
    pub length: usize,
}

impl Default for PairConfig {
    fn default() -> Self {
        Self {
            near_prob: 0.5,
            silence_prob: 0.2,
            gain_db_range: (-10.0, 10.0),
            length: PAIR_LENGTH,
        }
    }
}

impl PairConfig {
    pub fn validate(&self) -> Result<()> {
        let p = |v: f64| (0.0..=1.0).contains(&v);
        if !p(self.near_prob) || !p(self.silence_prob) {
            return Err(Error::Config("probabilities must lie in [0, 1]".into()));
        }
        let (lo, hi) = self.gain_db_range;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::Config(format!("bad gain range [{lo}, {hi}] dB")));
        }
        if self.length == 0 {
            return Err(Error::Config("pair length must be positive".into()));
        }
        Ok(())
    }
}

/// Convolves a mono clip with a four-channel RIR, fits the result to
/// `length` samples and applies `gain_db`.
pub fn render_source(
    mono: &[f64],
    sample_rate: u32,
    rir: &AmbisonicRir,
    gain_db: f64,
    length: usize,
) -> Result<FoaSignal> {
    if sample_rate != PAIR_SAMPLE_RATE {
        return Err(Error::SampleRateMismatch {
            expected: PAIR_SAMPLE_RATE,
            got: sample_rate,
        });
    }
    if rir.sample_rate() != sample_rate {
        return Err(Error::SampleRateMismatch {
            expected: sample_rate,
            got: rir.sample_rate(),
        });
    }
    if let Some(index) = mono.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { channel: 0, index });
    }
    let k = 10f64.powf(gain_db / 20.0);
    let filters: Vec<&[f64]> = (0..CHANNELS).map(|c| rir.channel(c)).collect();
    let mut out = convolve_many(mono, &filters, length);
    for ch in &mut out {
        ch.iter_mut().for_each(|v| *v *= k);
    }
    let channels: [Vec<f64>; CHANNELS] = out.try_into().expect("four filters");
    Ok(FoaSignal::from_channels_unchecked(channels, sample_rate))
}

/// Renders every source and sums them into `target + residual`. `rirs` and `segments`
/// are indexed like `sources`.
pub fn mix_scene(
    scene: &SceneGeometry,
    sources: &[SourceSpec],
    rirs: &[AmbisonicRir],
    segments: &[Vec<f64>],
    length: usize,
) -> Result<(FoaSignal, FoaSignal, FoaSignal)> {
    if rirs.len() != sources.len() {
        return Err(Error::LengthMismatch(sources.len(), rirs.len()));
    }
    if segments.len() != sources.len() {
        return Err(Error::LengthMismatch(sources.len(), segments.len()));
    }
    let targets = sources.iter().filter(|s| s.is_target).count();
    if targets != 1 {
        return Err(Error::TargetCount(targets));
    }
    if sources.iter().any(|s| s.is_target && s.silenced) {
        return Err(Error::Config("the target cannot be silenced".into()));
    }
    if sources.iter().any(|s| s.geometry >= scene.sources.len()) {
        return Err(Error::Config("source spec points past the scene".into()));
    }
    let mut target = None;
    let mut residual = FoaSignal::zeros(length, PAIR_SAMPLE_RATE);
    let mut any_secondary = false;
    for ((spec, rir), seg) in sources.iter().zip(rirs).zip(segments) {
        if spec.silenced {
            continue;
        }
        let r = render_source(seg, PAIR_SAMPLE_RATE, rir, spec.gain_db, length)?;
        if spec.is_target {
            target = Some(r);
        } else {
            residual = residual.add(&r)?;
            any_secondary = true;
        }
    }
    let target = target.expect("checked above");
    if target.channel_energy()[0] <= 0.0 {
        return Err(Error::DegenerateTarget);
    }
    let mixture = if any_secondary { target.add(&residual)? } else { target.clone() };
    Ok((mixture, target, residual))
}

/// A direction uniform over the ±15° azimuth/elevation box around
/// `target`, with elevation clamped to the poles.
pub fn place_near_target<R: Rng + ?Sized>(target: Direction, rng: &mut R) -> Direction {
    let b = NEAR_BOX_DEG.to_radians();
    let az = target.azimuth() + rng.random_range(-b..=b);
    let el = (target.elevation() + rng.random_range(-b..=b)).clamp(-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2);
    Direction::new(az, el).expect("clamped elevation")
}

/// Rotates a static-direction FOA segment to a fresh uniform direction.
pub fn rotate_remix<R: Rng + ?Sized>(segment: &FoaSignal, known: Direction, rng: &mut R) -> (FoaSignal, Direction) {
    let new_dir = sample_uniform_direction(rng);
    (rotate_to(segment, known, new_dir), new_dir)
}

pub fn rotate_to(segment: &FoaSignal, from: Direction, to: Direction) -> FoaSignal {
    apply_rotation(segment, &rotation_between(from, to))
}

fn channel_rms(x: &FoaSignal) -> [f64; CHANNELS] {
    std::array::from_fn(|c| clips::rms(x.channel(c)))
}

/// Builds pair `index` from a random complete scene of `bank` and four
/// distinct clips of `pool`. With probability `near_prob` one secondary
/// is moved into the box around the target (its RIR rotated to match),
/// given a clip whose description differs from the target's, and kept
/// audible.
pub fn build_pair<R: Rng + ?Sized>(
    rng: &mut R,
    index: usize,
    seed: u64,
    bank: &RirBank,
    pool: &[Clip],
    cfg: &PairConfig,
) -> Result<MixturePair> {
    cfg.validate()?;
    let n = SOURCES_PER_SCENE;
    let scenes = bank.complete_scenes(n);
    if scenes.is_empty() {
        return Err(Error::NoCompleteScene(n));
    }
    if pool.len() < n {
        return Err(Error::PoolExhausted(format!("need {n} clips, pool has {}", pool.len())));
    }
    let scene = scenes[rng.random_range(0..scenes.len())];
    let mut picks = sample(rng, pool.len(), n).into_vec();
    let gains: Vec<f64> = (0..n)
        .map(|_| rng.random_range(cfg.gain_db_range.0..=cfg.gain_db_range.1))
        .collect();
    let mut silenced: Vec<bool> = (0..n).map(|i| i > 0 && rng.random_bool(cfg.silence_prob)).collect();
    let mut directions: Vec<Direction> = scene.geometry.sources[..n].iter().map(|s| s.direction).collect();
    let mut rirs: Vec<AmbisonicRir> = scene.rirs[..n].to_vec();

    let near = rng.random_bool(cfg.near_prob);
    let mut near_slot = None;
    if near {
        let k = rng.random_range(1..n);
        let target_clip = &pool[picks[0]];
        if pool[picks[k]].same_description(target_clip) {
            let candidates: Vec<usize> = (0..pool.len())
                .filter(|i| !picks.contains(i) && !pool[*i].same_description(target_clip))
                .collect();
            if candidates.is_empty() {
                return Err(Error::PoolExhausted(format!(
                    "no clip described differently from {:?}",
                    target_clip.description
                )));
            }
            picks[k] = candidates[rng.random_range(0..candidates.len())];
        }
        let to = place_near_target(directions[0], rng);
        rirs[k] = rirs[k].rotated(&rotation_between(directions[k], to));
        directions[k] = to;
        silenced[k] = false;
        near_slot = Some(k);
    }

    let segments: Vec<Vec<f64>> = picks.iter().map(|&p| pool[p].segment(cfg.length, rng)).collect();
    let specs: Vec<SourceSpec> = (0..n)
        .map(|i| SourceSpec {
            clip_ref: pool[picks[i]].id.clone(),
            gain_db: gains[i],
            geometry: i,
            description: pool[picks[i]].description.clone(),
            is_target: i == 0,
            silenced: silenced[i],
            direction: directions[i],
            near_placed: near_slot == Some(i),
        })
        .collect();
    let (mixture, target, residual) = mix_scene(&scene.geometry, &specs, &rirs, &segments, cfg.length)?;

    let metas: Vec<SourceMeta> = specs
        .iter()
        .map(|s| SourceMeta {
            clip_ref: s.clip_ref.clone(),
            description: s.description.clone(),
            gain_db: s.gain_db,
            silenced: s.silenced,
            azimuth_deg: s.direction.azimuth_deg(),
            elevation_deg: s.direction.elevation_deg(),
            distance_m: scene.geometry.sources[s.geometry].distance,
            rir_ref: scene.rir_ref(s.geometry),
            near_placed: s.near_placed,
        })
        .collect();
    let mut meta = PairMeta {
        schema_version: SCHEMA_VERSION,
        index,
        seed,
        sample_rate: PAIR_SAMPLE_RATE,
        length: cfg.length,
        bank_scene: scene.index,
        room_dims: scene.geometry.room.dims(),
        room_materials: scene.geometry.room.materials().clone(),
        target: metas[0].clone(),
        secondaries: metas[1..].to_vec(),
        near_placed: near,
        close_secondary: false,
        target_rms: channel_rms(&target),
        residual_rms: channel_rms(&residual),
    };
    meta.close_secondary = meta.has_close_secondary()?;
    Ok(MixturePair {
        mixture,
        target,
        residual,
        meta,
    })
}
