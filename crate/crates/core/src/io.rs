//! WAV and JSON file helpers.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sh::{FoaSignal, CHANNELS};

/// Version stamped into every manifest, sidecar and report.
pub const SCHEMA_VERSION: u32 = 1;

fn wav_err(path: &Path) -> impl FnOnce(hound::Error) -> Error + '_ {
    move |source| Error::Wav {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes a 4-channel 32-bit float WAV.
pub fn write_foa_wav(path: &Path, x: &FoaSignal) -> Result<()> {
    let spec = WavSpec {
        channels: CHANNELS as u16,
        sample_rate: x.sample_rate(),
        bits_per_sample: 32,
        sample_format: SampleFormat::Float,
    };
    let mut w = WavWriter::create(path, spec).map_err(wav_err(path))?;
    for t in 0..x.len() {
        for c in 0..CHANNELS {
            w.write_sample(x.channel(c)[t] as f32).map_err(wav_err(path))?;
        }
    }
    w.finalize().map_err(wav_err(path))
}

fn read_interleaved(path: &Path) -> Result<(Vec<f64>, WavSpec)> {
    let reader = WavReader::open(path).map_err(wav_err(path))?;
    let spec = reader.spec();
    let samples = match spec.sample_format {
        SampleFormat::Float => reader
            .into_samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<Vec<_>, _>>(),
        SampleFormat::Int => {
            let scale = 1.0 / (1u64 << (spec.bits_per_sample - 1)) as f64;
            reader
                .into_samples::<i32>()
                .map(|s| s.map(|v| v as f64 * scale))
                .collect()
        }
    }
    .map_err(wav_err(path))?;
    Ok((samples, spec))
}

/// Reads a 4-channel WAV into an FOA signal.
pub fn read_foa_wav(path: &Path) -> Result<FoaSignal> {
    let (samples, spec) = read_interleaved(path)?;
    if spec.channels as usize != CHANNELS {
        return Err(Error::ChannelCount {
            expected: CHANNELS,
            got: spec.channels as usize,
        });
    }
    let channels = std::array::from_fn(|c| samples.iter().skip(c).step_by(CHANNELS).copied().collect());
    FoaSignal::new(channels, spec.sample_rate)
}

/// Reads a mono WAV (16/24/32-bit integer or 32-bit float).
pub fn read_mono_wav(path: &Path) -> Result<(Vec<f64>, u32)> {
    let (samples, spec) = read_interleaved(path)?;
    if spec.channels != 1 {
        return Err(Error::ChannelCount {
            expected: 1,
            got: spec.channels as usize,
        });
    }
    Ok((samples, spec.sample_rate))
}

pub fn write_mono_wav_i16(path: &Path, samples: &[f64], sample_rate: u32) -> Result<()> {
    let spec = WavSpec {
        channels: 1,
        sample_rate,
        bits_per_sample: 16,
        sample_format: SampleFormat::Int,
    };
    let mut w = WavWriter::create(path, spec).map_err(wav_err(path))?;
    for s in samples {
        let v = (s.clamp(-1.0, 1.0) * i16::MAX as f64).round() as i16;
        w.write_sample(v).map_err(wav_err(path))?;
    }
    w.finalize().map_err(wav_err(path))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_reader(BufReader::new(file)).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}
