use std::f64::consts::TAU;
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::PAIR_SAMPLE_RATE;
use crate::error::{Error, Result};
use crate::io;

/// Import loudness, dBFS RMS.
pub const CLIP_RMS_DBFS: f64 = -25.0;
/// Crossfade used when looping short clips, seconds.
pub const LOOP_CROSSFADE_S: f64 = 0.010;

/// A mono source clip with its free-text description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clip {
    pub id: String,
    pub description: String,
    pub sample_rate: u32,
    #[serde(skip)]
    pub samples: Vec<f64>,
}

impl Clip {
    pub fn new(id: impl Into<String>, description: impl Into<String>, samples: Vec<f64>, sample_rate: u32) -> Self {
        Self {
            id: id.into(),
            description: description.into(),
            sample_rate,
            samples,
        }
    }

    /// Scales the clip to [`CLIP_RMS_DBFS`]. Silent clips are left alone.
    pub fn normalized(mut self) -> Self {
        let rms = rms(&self.samples);
        if rms > 0.0 {
            let k = 10f64.powf(CLIP_RMS_DBFS / 20.0) / rms;
            self.samples.iter_mut().for_each(|s| *s *= k);
        }
        self
    }

    /// Same description, ignoring ASCII case.
    pub fn same_description(&self, other: &Clip) -> bool {
        self.description.to_lowercase() == other.description.to_lowercase()
    }

    /// A `len`-sample excerpt: a random crop of longer clips, or the clip
    /// looped with a linear crossfade when it is shorter.
    pub fn segment<R: Rng + ?Sized>(&self, len: usize, rng: &mut R) -> Vec<f64> {
        let n = self.samples.len();
        if n == 0 {
            return vec![0.0; len];
        }
        if n >= len {
            let start = rng.random_range(0..=n - len);
            return self.samples[start..start + len].to_vec();
        }
        let fade = ((LOOP_CROSSFADE_S * self.sample_rate as f64).round() as usize).min(n / 2);
        let mut out = Vec::with_capacity(len + n);
        out.extend_from_slice(&self.samples);
        while out.len() < len {
            let tail = out.len() - fade;
            for k in 0..fade {
                let w = (k + 1) as f64 / (fade + 1) as f64;
                out[tail + k] = out[tail + k] * (1.0 - w) + self.samples[k] * w;
            }
            out.extend_from_slice(&self.samples[fade..]);
        }
        out.truncate(len);
        out
    }
}

pub(crate) fn rms(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

/// Loads every `*.wav` in `dir` (sorted by name) as a normalized clip.
///
/// The description comes from a `<stem>.txt` sidecar when present and
/// falls back to the file stem. Clips must be mono at 16 kHz.
pub fn import_clip_dir(dir: &Path) -> Result<Vec<Clip>> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("wav")))
        .collect();
    files.sort();
    let mut clips = Vec::with_capacity(files.len());
    for path in files {
        let (samples, rate) = io::read_mono_wav(&path)?;
        if rate != PAIR_SAMPLE_RATE {
            return Err(Error::SampleRateMismatch {
                expected: PAIR_SAMPLE_RATE,
                got: rate,
            });
        }
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let sidecar = path.with_extension("txt");
        let description = if sidecar.exists() {
            std::fs::read_to_string(&sidecar)
                .map_err(|e| Error::io(&sidecar, e))?
                .trim()
                .to_string()
        } else {
            stem.clone()
        };
        let id = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or(stem);
        clips.push(Clip::new(id, description, samples, rate).normalized());
    }
    Ok(clips)
}

/// Writes clips as 16-bit mono WAVs plus description sidecars.
pub fn export_clip_dir(dir: &Path, clips: &[Clip]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for clip in clips {
        let stem = clip.id.trim_end_matches(".wav");
        let wav = dir.join(format!("{stem}.wav"));
        io::write_mono_wav_i16(&wav, &clip.samples, clip.sample_rate)?;
        let txt = dir.join(format!("{stem}.txt"));
        std::fs::write(&txt, &clip.description).map_err(|e| Error::io(&txt, e))?;
    }
    Ok(())
}

const SYNTH_KINDS: [&str; 8] = [
    "sine tone",
    "harmonic buzz",
    "white noise",
    "rising chirp",
    "click train",
    "band-limited rumble",
    "warbling whistle",
    "amplitude-modulated hiss",
];

/// Deterministic pool of synthetic 16 kHz clips (1 to 6 s long) whose
/// descriptions repeat across eight signal families.
pub fn synthetic_pool<R: Rng + ?Sized>(rng: &mut R, count: usize) -> Vec<Clip> {
    let fs = PAIR_SAMPLE_RATE as f64;
    (0..count)
        .map(|i| {
            let kind = i % SYNTH_KINDS.len();
            let secs = rng.random_range(1.0..6.0);
            let n = (secs * fs) as usize;
            let f0 = rng.random_range(150.0..1200.0);
            let mut phase = 0.0;
            let mut lp = 0.0;
            let samples: Vec<f64> = (0..n)
                .map(|t| {
                    let tt = t as f64 / fs;
                    let noise: f64 = rng.sample(StandardNormal);
                    match kind {
                        0 => (TAU * f0 * tt).sin(),
                        1 => (1..8).map(|h| (TAU * f0 * h as f64 * tt).sin() / h as f64).sum(),
                        2 => noise,
                        3 => {
                            phase += TAU * (f0 + 1500.0 * tt / secs) / fs;
                            phase.sin()
                        }
                        4 => {
                            if t % (fs / (f0 / 40.0)) as usize == 0 { 1.0 } else { 0.0 }
                        }
                        5 => {
                            lp += 0.02 * (noise - lp);
                            lp
                        }
                        6 => {
                            phase += TAU * (f0 * 2.0 + 200.0 * (TAU * 5.0 * tt).sin()) / fs;
                            phase.sin()
                        }
                        _ => noise * (0.5 + 0.5 * (TAU * 3.0 * tt).sin()),
                    }
                })
                .collect();
            Clip::new(format!("synth_{i:04}"), SYNTH_KINDS[kind], samples, PAIR_SAMPLE_RATE).normalized()
        })
        .collect()
}
