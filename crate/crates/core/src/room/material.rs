use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Octave band centers of the absorption tables, in Hz.
pub const OCTAVE_BANDS_HZ: [f64; 6] = [125.0, 250.0, 500.0, 1000.0, 2000.0, 4000.0];

/// Number of taps used for the frequency-sampled presets.
pub const PRESET_TAPS: usize = 31;

const MIN_TAPS: usize = 8;
const MAX_TAPS: usize = 64;
const PASSIVITY_GRID: usize = 2048;

/// Names of every built-in material.
pub const PRESET_NAMES: [&str; 6] = ["rigid", "carpet", "curtain", "concrete", "glass", "plaster"];

/// Presets eligible for random room assignment (`rigid` is a test fixture).
pub const RANDOM_MATERIALS: [&str; 5] = ["carpet", "curtain", "concrete", "glass", "plaster"];

/// Per-octave absorption coefficients.
fn absorption_table(name: &str) -> Option<[f64; 6]> {
    Some(match name {
        "rigid" => [0.0; 6],
        "carpet" => [0.02, 0.06, 0.14, 0.37, 0.60, 0.65],
        "curtain" => [0.07, 0.31, 0.49, 0.75, 0.70, 0.60],
        "concrete" => [0.01, 0.01, 0.015, 0.02, 0.02, 0.02],
        "glass" => [0.35, 0.25, 0.18, 0.12, 0.07, 0.04],
        "plaster" => [0.013, 0.015, 0.02, 0.03, 0.04, 0.05],
        _ => return None,
    })
}

/// A surface material described by a zero-phase (centered, symmetric) FIR.
///
/// Tap `k` sits at time `(k - (len - 1) / 2) / sample_rate`, so the
/// frequency response is real.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Material {
    name: String,
    taps: Vec<f64>,
    sample_rate: u32,
}

impl Material {
    pub fn new(name: impl Into<String>, taps: Vec<f64>, sample_rate: u32) -> Result<Self> {
        let name = name.into();
        let bad = |reason: String| Error::InvalidMaterial {
            name: name.clone(),
            reason,
        };
        if !(MIN_TAPS..=MAX_TAPS).contains(&taps.len()) || taps.len().is_multiple_of(2) {
            return Err(bad(format!(
                "need an odd tap count in {MIN_TAPS}..={MAX_TAPS}, got {}",
                taps.len()
            )));
        }
        if taps.iter().any(|t| !t.is_finite()) {
            return Err(bad("non-finite tap".into()));
        }
        let c = taps.len() / 2;
        if (1..=c).any(|m| (taps[c + m] - taps[c - m]).abs() > 1e-12) {
            return Err(bad("taps are not symmetric about the center".into()));
        }
        let m = Self {
            name: name.clone(),
            taps,
            sample_rate,
        };
        let peak = m.peak_response();
        if peak > 1.0 + 1e-9 {
            return Err(bad(format!("|H(f)| reaches {peak}, surface would add energy")));
        }
        Ok(m)
    }

    /// Builds a preset from its octave-band absorption table.
    pub fn preset(name: &str, sample_rate: u32) -> Result<Self> {
        let alpha = absorption_table(name).ok_or_else(|| Error::UnknownMaterial(name.into()))?;
        if alpha.iter().all(|a| *a == 0.0) {
            let mut taps = vec![0.0; PRESET_TAPS];
            taps[PRESET_TAPS / 2] = 1.0;
            return Self::new(name, taps, sample_rate);
        }
        let reflect = alpha.map(|a| (1.0 - a).sqrt());
        let taps = design_zero_phase(&reflect, PRESET_TAPS, sample_rate);
        let mut m = Self {
            name: name.into(),
            taps,
            sample_rate,
        };
        // windowing ripple can overshoot the target; pull back under unity
        let peak = m.peak_response();
        if peak > 1.0 {
            m.taps.iter_mut().for_each(|t| *t /= peak);
        }
        Self::new(m.name, m.taps, sample_rate)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    /// True if the FIR is a centered unit impulse.
    pub fn is_identity(&self) -> bool {
        let c = self.taps.len() / 2;
        self.taps
            .iter()
            .enumerate()
            .all(|(k, t)| if k == c { *t == 1.0 } else { *t == 0.0 })
    }

    /// Real frequency response at `freq_hz`.
    pub fn response(&self, freq_hz: f64) -> f64 {
        let c = self.taps.len() / 2;
        let w = 2.0 * PI * freq_hz / self.sample_rate as f64;
        let mut h = self.taps[c];
        for m in 1..=c {
            h += 2.0 * self.taps[c + m] * (w * m as f64).cos();
        }
        h
    }

    /// Largest |H(f)| over a dense grid up to Nyquist.
    pub fn peak_response(&self) -> f64 {
        let nyq = self.sample_rate as f64 / 2.0;
        (0..=PASSIVITY_GRID)
            .map(|k| self.response(nyq * k as f64 / PASSIVITY_GRID as f64).abs())
            .fold(0.0, f64::max)
    }
}

/// Interpolates reflection amplitude across octave bands (linear in log2 f).
fn band_amplitude(bands: &[f64; 6], f: f64) -> f64 {
    let first = OCTAVE_BANDS_HZ[0];
    let last = OCTAVE_BANDS_HZ[5];
    if f <= first {
        return bands[0];
    }
    if f >= last {
        return bands[5];
    }
    let pos = (f / first).log2();
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    bands[i] * (1.0 - frac) + bands[i + 1] * frac
}

/// Hann-windowed cosine-series fit of a real amplitude response.
fn design_zero_phase(bands: &[f64; 6], len: usize, sample_rate: u32) -> Vec<f64> {
    const QUAD: usize = 4096;
    let c = len / 2;
    let nyq = sample_rate as f64 / 2.0;
    let samples: Vec<f64> = (0..=QUAD)
        .map(|k| band_amplitude(bands, nyq * k as f64 / QUAD as f64))
        .collect();
    let mut taps = vec![0.0; len];
    for m in 0..=c {
        // trapezoidal estimate of (1/π)∫₀^π A(ω) cos(mω) dω
        let mut acc = 0.0;
        for (k, a) in samples.iter().enumerate() {
            let w = PI * k as f64 / QUAD as f64;
            let weight = if k == 0 || k == QUAD { 0.5 } else { 1.0 };
            acc += weight * a * (m as f64 * w).cos();
        }
        let coef = acc / QUAD as f64;
        let window = 0.5 * (1.0 + (PI * m as f64 / (c as f64 + 1.0)).cos());
        taps[c + m] = coef * window;
        taps[c - m] = coef * window;
    }
    taps
}

/// Named materials available to a simulation.
#[derive(Debug, Clone, Default)]
pub struct MaterialBank {
    materials: BTreeMap<String, Material>,
    sample_rate: u32,
}

impl MaterialBank {
    pub fn empty(sample_rate: u32) -> Self {
        Self {
            materials: BTreeMap::new(),
            sample_rate,
        }
    }

    /// All built-in presets designed at `sample_rate`.
    pub fn presets(sample_rate: u32) -> Self {
        let mut bank = Self::empty(sample_rate);
        for name in PRESET_NAMES {
            bank.insert(Material::preset(name, sample_rate).expect("preset tables are valid"))
                .expect("same rate");
        }
        bank
    }

    pub fn insert(&mut self, m: Material) -> Result<()> {
        if m.sample_rate != self.sample_rate {
            return Err(Error::SampleRateMismatch {
                expected: self.sample_rate,
                got: m.sample_rate,
            });
        }
        self.materials.insert(m.name.clone(), m);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&Material> {
        self.materials
            .get(name)
            .ok_or_else(|| Error::UnknownMaterial(name.into()))
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.materials.keys().map(String::as_str)
    }
}
