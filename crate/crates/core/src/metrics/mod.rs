//! STFT analysis, the complex-STFT ℓ1 distance, SI-SDR(i) and Table-1 style
//! bucketed aggregation.

mod report;
mod stft;

pub use report::{aggregate, AlgorithmReport, Bucket, BucketSummary, EvalReport};
pub use stft::{hann, istft, stft, stft_l1_loss, stft_with, Spectrogram, STFT_FFT_SIZE, STFT_HOP};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixer::PairMeta;
use crate::sh::{FoaSignal, CHANNELS};

/// SI-SDR results are clamped to `±SI_SDR_CLAMP_DB`.
pub const SI_SDR_CLAMP_DB: f64 = 100.0;
/// Target channels below this fraction of the strongest channel's energy
/// are left out of the channel average.
pub const SILENT_CHANNEL_RATIO: f64 = 1e-12;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Scale-invariant SDR in dB, without mean removal.
pub fn si_sdr(est: &[f64], reference: &[f64]) -> Result<f64> {
    if est.len() != reference.len() {
        return Err(Error::LengthMismatch(est.len(), reference.len()));
    }
    let rr = dot(reference, reference);
    if rr <= 0.0 {
        return Err(Error::ZeroEnergyReference);
    }
    if dot(est, est) <= 0.0 {
        return Ok(-SI_SDR_CLAMP_DB);
    }
    let alpha = dot(est, reference) / rr;
    let (mut ss, mut ee) = (0.0, 0.0);
    for (e, r) in est.iter().zip(reference) {
        let s = alpha * r;
        ss += s * s;
        ee += (e - s) * (e - s);
    }
    if ee <= 0.0 {
        return Ok(SI_SDR_CLAMP_DB);
    }
    if ss <= 0.0 {
        return Ok(-SI_SDR_CLAMP_DB);
    }
    Ok((10.0 * (ss / ee).log10()).clamp(-SI_SDR_CLAMP_DB, SI_SDR_CLAMP_DB))
}

/// Channel-averaged scores of one estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairScore {
    pub index: usize,
    pub si_sdr_mix_db: f64,
    pub si_sdr_est_db: f64,
    pub si_sdri_db: f64,
    pub close_secondary: bool,
    /// Channels left out because the target is silent there.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub excluded_channels: Vec<usize>,
}

/// Channels whose target carries energy.
pub fn active_channels(target: &FoaSignal) -> Vec<usize> {
    let e = target.channel_energy();
    let max = e.iter().cloned().fold(0.0, f64::max);
    (0..CHANNELS).filter(|&c| e[c] > SILENT_CHANNEL_RATIO * max && e[c] > 0.0).collect()
}

pub fn score_pair(mixture: &FoaSignal, target: &FoaSignal, meta: &PairMeta, est: &FoaSignal) -> Result<PairScore> {
    if est.len() != target.len() {
        return Err(Error::LengthMismatch(target.len(), est.len()));
    }
    if mixture.len() != target.len() {
        return Err(Error::LengthMismatch(target.len(), mixture.len()));
    }
    let active = active_channels(target);
    if active.is_empty() {
        return Err(Error::ZeroEnergyReference);
    }
    let (mut mix, mut out) = (0.0, 0.0);
    for &c in &active {
        mix += si_sdr(mixture.channel(c), target.channel(c))?;
        out += si_sdr(est.channel(c), target.channel(c))?;
    }
    let k = active.len() as f64;
    let (si_sdr_mix_db, si_sdr_est_db) = (mix / k, out / k);
    Ok(PairScore {
        index: meta.index,
        si_sdr_mix_db,
        si_sdr_est_db,
        si_sdri_db: si_sdr_est_db - si_sdr_mix_db,
        close_secondary: meta.has_close_secondary()?,
        excluded_channels: (0..CHANNELS).filter(|c| !active.contains(c)).collect(),
    })
}
