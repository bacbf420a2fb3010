use std::f64::consts::TAU;

use realfft::num_complex::Complex64;
use realfft::RealFftPlanner;

use crate::error::{Error, Result};
use crate::sh::{FoaSignal, CHANNELS};

pub const STFT_FFT_SIZE: usize = 1024;
pub const STFT_HOP: usize = 256;

/// Complex STFT of one channel: `frames[l][f]`, `F = fft_size / 2 + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    pub frames: Vec<Vec<Complex64>>,
    pub fft_size: usize,
    pub hop: usize,
}

impl Spectrogram {
    pub fn num_frames(&self) -> usize {
        self.frames.len()
    }

    pub fn num_bins(&self) -> usize {
        self.fft_size / 2 + 1
    }
}

/// Periodic Hann window.
pub fn hann(n: usize) -> Vec<f64> {
    (0..n).map(|i| 0.5 - 0.5 * (TAU * i as f64 / n as f64).cos()).collect()
}

// Mirror index into [0, len) without repeating the edge sample.
fn reflect(i: isize, len: usize) -> usize {
    if len == 1 {
        return 0;
    }
    let period = 2 * (len as isize - 1);
    let m = i.rem_euclid(period);
    (if m < len as isize { m } else { period - m }) as usize
}

/// Centered STFT with reflect padding of `fft_size / 2` on both ends, so
/// frame `l` is centered on sample `l * hop` and there are `1 + T / hop` frames.
pub fn stft_with(x: &[f64], fft_size: usize, hop: usize) -> Spectrogram {
    let half = (fft_size / 2) as isize;
    let n_frames = if x.is_empty() { 0 } else { 1 + x.len() / hop };
    let window = hann(fft_size);
    let fft = RealFftPlanner::<f64>::new().plan_fft_forward(fft_size);
    let mut buf = fft.make_input_vec();
    let frames = (0..n_frames)
        .map(|l| {
            let start = (l * hop) as isize - half;
            for (k, b) in buf.iter_mut().enumerate() {
                *b = x[reflect(start + k as isize, x.len())] * window[k];
            }
            let mut out = fft.make_output_vec();
            fft.process(&mut buf, &mut out).expect("sized by plan");
            out
        })
        .collect();
    Spectrogram { frames, fft_size, hop }
}

pub fn stft(x: &[f64]) -> Spectrogram {
    stft_with(x, STFT_FFT_SIZE, STFT_HOP)
}

/// Weighted overlap-add inverse of [`stft_with`], trimmed to `len` samples.
pub fn istft(spec: &Spectrogram, len: usize) -> Vec<f64> {
    let n = spec.fft_size;
    let half = n / 2;
    let window = hann(n);
    let total = half + len + n;
    let mut acc = vec![0.0; total];
    let mut norm = vec![0.0; total];
    let ifft = RealFftPlanner::<f64>::new().plan_fft_inverse(n);
    for (l, frame) in spec.frames.iter().enumerate() {
        let mut bins = frame.clone();
        bins[0].im = 0.0;
        bins[n / 2].im = 0.0;
        let mut time = ifft.make_output_vec();
        ifft.process(&mut bins, &mut time).expect("sized by plan");
        let start = l * spec.hop;
        for k in 0..n {
            if start + k >= total {
                break;
            }
            acc[start + k] += time[k] / n as f64 * window[k];
            norm[start + k] += window[k] * window[k];
        }
    }
    (0..len)
        .map(|t| {
            let w = norm[t + half];
            if w > 1e-10 { acc[t + half] / w } else { 0.0 }
        })
        .collect()
}

/// Complex-STFT ℓ1 distance averaged over the four channels.
pub fn stft_l1_loss(y: &FoaSignal, y_hat: &FoaSignal) -> Result<f64> {
    if y.len() != y_hat.len() {
        return Err(Error::LengthMismatch(y.len(), y_hat.len()));
    }
    let mut total = 0.0;
    for c in 0..CHANNELS {
        let a = stft(y.channel(c));
        let b = stft(y_hat.channel(c));
        for (fa, fb) in a.frames.iter().zip(&b.frames) {
            total += fa.iter().zip(fb).map(|(p, q)| (p - q).norm()).sum::<f64>();
        }
    }
    Ok(total / CHANNELS as f64)
}
