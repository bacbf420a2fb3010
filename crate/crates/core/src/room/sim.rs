use std::f64::consts::TAU;

use rand::Rng;
use realfft::num_complex::Complex64;
use realfft::RealFftPlanner;
use serde::{Deserialize, Serialize};

use super::image::{enumerate_image_sources, ImagePath};
use super::material::{Material, MaterialBank};
use super::{Room, Surface};
use crate::error::{Error, Result};
use crate::sh::{sh_eval, FoaRotation, FoaSignal, CHANNELS};

/// Parameters of one frequency-domain image-source simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub max_order: u32,
    /// Image jitter per reflection order, meters.
    pub jitter_m: f64,
    pub sample_rate: u32,
    /// Output length in samples. The FFT size is the next power of two.
    pub rir_length: usize,
    /// Drop paths arriving after `rir_length` instead of failing.
    pub truncate_late_paths: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            max_order: 40,
            jitter_m: 0.05,
            sample_rate: 16_000,
            rir_length: 24_000,
            truncate_late_paths: true,
        }
    }
}

impl SimConfig {
    pub fn fft_size(&self) -> usize {
        self.rir_length.next_power_of_two()
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_rate == 0 {
            return Err(Error::Config("sample rate must be positive".into()));
        }
        if self.rir_length < 2 {
            return Err(Error::Config("RIR length must be at least 2 samples".into()));
        }
        if !(self.jitter_m >= 0.0 && self.jitter_m.is_finite()) {
            return Err(Error::Config(format!("jitter {} must be >= 0", self.jitter_m)));
        }
        Ok(())
    }
}

/// A four-channel ambisonic room impulse response.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbisonicRir {
    signal: FoaSignal,
}

impl AmbisonicRir {
    pub fn new(signal: FoaSignal) -> Self {
        Self { signal }
    }

    pub fn signal(&self) -> &FoaSignal {
        &self.signal
    }

    pub fn into_signal(self) -> FoaSignal {
        self.signal
    }

    pub fn len(&self) -> usize {
        self.signal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signal.is_empty()
    }

    pub fn sample_rate(&self) -> u32 {
        self.signal.sample_rate()
    }

    pub fn channel(&self, c: usize) -> &[f64] {
        self.signal.channel(c)
    }

    /// The same response with every arrival direction rotated by `r`.
    pub fn rotated(&self, r: &FoaRotation) -> AmbisonicRir {
        AmbisonicRir::new(crate::sh::apply_rotation(&self.signal, r))
    }
}

/// Real-FFT bin frequencies `k * fs / n` for `k in 0..=n/2`.
pub fn frequency_grid(fft_size: usize, sample_rate: u32) -> Vec<f64> {
    let df = sample_rate as f64 / fft_size as f64;
    (0..=fft_size / 2).map(|k| k as f64 * df).collect()
}

/// Complex multiplier of a single path on `freqs`: distance gain, the
/// product of the wall responses it met, and its propagation delay.
pub fn path_spectrum(
    path: &ImagePath,
    freqs: &[f64],
    room: &Room,
    bank: &MaterialBank,
) -> Result<Vec<Complex64>> {
    let walls = path
        .wall_sequence
        .iter()
        .map(|s| bank.get(room.material(*s)))
        .collect::<Result<Vec<_>>>()?;
    Ok(freqs
        .iter()
        .map(|&f| {
            let filter: f64 = walls.iter().map(|m| m.response(f)).product();
            Complex64::from_polar(path.gain * filter, -TAU * f * path.delay_s)
        })
        .collect())
}

const BLOCK: usize = 256;
const LANES: usize = 8;

/// Reflections off the lower and upper wall of one axis for image index `i`.
fn axis_counts(i: i32) -> (i32, i32) {
    if i % 2 == 0 {
        (i.abs() / 2, i.abs() / 2)
    } else {
        let m = (i + 1) / 2;
        ((m - 1).abs(), m.abs())
    }
}

/// Simulates the ambisonic RIR from `src` to `recv` by summing every image
/// path's spectrum, weighted by its SH gains, on the real-FFT grid.
pub fn simulate_rir<R: Rng + ?Sized>(
    room: &Room,
    src: [f64; 3],
    recv: [f64; 3],
    cfg: &SimConfig,
    bank: &MaterialBank,
    rng: &mut R,
) -> Result<AmbisonicRir> {
    cfg.validate()?;
    if bank.sample_rate() != cfg.sample_rate {
        return Err(Error::SampleRateMismatch {
            expected: cfg.sample_rate,
            got: bank.sample_rate(),
        });
    }
    let surfaces: [&Material; 6] = {
        let mut out = Vec::with_capacity(6);
        for s in Surface::ALL {
            out.push(bank.get(room.material(s))?);
        }
        out.try_into().expect("six surfaces")
    };

    let mut paths = enumerate_image_sources(room, src, recv, cfg.max_order, cfg.jitter_m, rng)?;
    let fs = cfg.sample_rate as f64;
    let required = paths
        .iter()
        .map(|p| (p.delay_s * fs).ceil() as usize)
        .max()
        .unwrap_or(0);
    if required > cfg.rir_length {
        if cfg.truncate_late_paths {
            paths.retain(|p| (p.delay_s * fs).ceil() as usize <= cfg.rir_length);
        } else {
            return Err(Error::RirTooShort {
                required,
                got: cfg.rir_length,
            });
        }
    }

    let n_fft = cfg.fft_size();
    let bins = n_fft / 2 + 1;
    let spectra = accumulate_spectra(&paths, &surfaces, cfg.max_order as i32, n_fft, fs);

    let mut planner = RealFftPlanner::<f64>::new();
    let inverse = planner.plan_fft_inverse(n_fft);
    let mut scratch = inverse.make_scratch_vec();
    let mut channels: [Vec<f64>; CHANNELS] = std::array::from_fn(|_| Vec::new());
    for (c, (re, im)) in spectra.into_iter().enumerate() {
        let mut spec: Vec<Complex64> = (0..bins).map(|k| Complex64::new(re[k], im[k])).collect();
        spec[0].im = 0.0;
        spec[bins - 1].im = 0.0;
        let mut out = inverse.make_output_vec();
        inverse
            .process_with_scratch(&mut spec, &mut out, &mut scratch)
            .expect("buffer sizes come from the plan");
        let scale = 1.0 / n_fft as f64;
        out.truncate(cfg.rir_length);
        out.iter_mut().for_each(|v| *v *= scale);
        channels[c] = out;
    }
    let signal = FoaSignal::new(channels, cfg.sample_rate)?;
    Ok(AmbisonicRir::new(signal))
}

type SplitSpectrum = (Vec<f64>, Vec<f64>);

/// Sums all path spectra per channel, blockwise over bins so the wall
/// responses and accumulators of a block stay cache resident.
fn accumulate_spectra(
    paths: &[ImagePath],
    surfaces: &[&Material; 6],
    max_order: i32,
    n_fft: usize,
    fs: f64,
) -> [SplitSpectrum; CHANNELS] {
    let bins = n_fft / 2 + 1;
    let padded = bins.div_ceil(BLOCK) * BLOCK;
    // per bin: (re, im) interleaved for each channel
    let mut acc = vec![[0.0f64; 2 * CHANNELS]; padded];

    let axis_identity: [bool; 3] = std::array::from_fn(|a| {
        surfaces[Surface::on_axis(a, false).index()].is_identity()
            && surfaces[Surface::on_axis(a, true).index()].is_identity()
    });
    let width = (2 * max_order + 1) as usize;
    // filter[a][i + max_order][b]: response of axis-a image index i on the block
    let mut filter: [Vec<[f64; BLOCK]>; 3] = std::array::from_fn(|_| vec![[1.0; BLOCK]; width]);

    struct Prepared {
        amp: [f64; CHANNELS],
        // cycles of phase per bin
        cycles: f64,
        lanes: [Complex64; LANES],
        step: Complex64,
        lattice: [usize; 3],
    }
    let prepared: Vec<Prepared> = paths
        .iter()
        .map(|p| {
            let g = sh_eval(p.direction).0;
            let cycles = p.delay_s * fs / n_fft as f64;
            Prepared {
                amp: g.map(|x| x * p.gain),
                cycles,
                lanes: std::array::from_fn(|l| Complex64::from_polar(1.0, -TAU * unit_fract(l as f64 * cycles))),
                step: Complex64::from_polar(1.0, -TAU * unit_fract(LANES as f64 * cycles)),
                lattice: p.lattice.map(|i| (i + max_order) as usize),
            }
        })
        .collect();

    // stays all ones when every wall is rigid
    let use_filter = !axis_identity.iter().all(|x| *x);
    let mut path_filter = [1.0f64; BLOCK];
    for block_start in (0..padded).step_by(BLOCK) {
        for a in 0..3 {
            if axis_identity[a] {
                continue;
            }
            let lo = surfaces[Surface::on_axis(a, false).index()];
            let hi = surfaces[Surface::on_axis(a, true).index()];
            let mut lo_resp = [0.0; BLOCK];
            let mut hi_resp = [0.0; BLOCK];
            for b in 0..BLOCK {
                let f = (block_start + b) as f64 * fs / n_fft as f64;
                lo_resp[b] = lo.response(f);
                hi_resp[b] = hi.response(f);
            }
            for (slot, row) in filter[a].iter_mut().enumerate() {
                let (nl, nh) = axis_counts(slot as i32 - max_order);
                for b in 0..BLOCK {
                    row[b] = lo_resp[b].powi(nl) * hi_resp[b].powi(nh);
                }
            }
        }

        for p in &prepared {
            if use_filter {
                let fx = &filter[0][p.lattice[0]];
                let fy = &filter[1][p.lattice[1]];
                let fz = &filter[2][p.lattice[2]];
                for b in 0..BLOCK {
                    path_filter[b] = fx[b] * fy[b] * fz[b];
                }
            }
            let start = Complex64::from_polar(1.0, -TAU * unit_fract(block_start as f64 * p.cycles));
            let mut pr = [0.0; LANES];
            let mut pi = [0.0; LANES];
            for l in 0..LANES {
                let z = p.lanes[l] * start;
                pr[l] = z.re;
                pi[l] = z.im;
            }
            let (sr, si) = (p.step.re, p.step.im);
            let amp = p.amp;
            let rows = &mut acc[block_start..block_start + BLOCK];
            for (rows, w) in rows.chunks_exact_mut(LANES).zip(path_filter.chunks_exact(LANES)) {
                for l in 0..LANES {
                    let qr = pr[l] * w[l];
                    let qi = pi[l] * w[l];
                    let row = &mut rows[l];
                    for c in 0..CHANNELS {
                        row[2 * c] += amp[c] * qr;
                        row[2 * c + 1] += amp[c] * qi;
                    }
                    let nr = pr[l] * sr - pi[l] * si;
                    pi[l] = pr[l] * si + pi[l] * sr;
                    pr[l] = nr;
                }
            }
        }
    }
    acc.truncate(bins);
    std::array::from_fn(|c| {
        (
            acc.iter().map(|row| row[2 * c]).collect(),
            acc.iter().map(|row| row[2 * c + 1]).collect(),
        )
    })
}
fn unit_fract(x: f64) -> f64 {
    x - x.floor()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Reference: sum `path_spectrum` over all paths, then inverse FFT.
    fn reference(room: &Room, src: [f64; 3], recv: [f64; 3], cfg: &SimConfig) -> [Vec<f64>; 4] {
        let bank = MaterialBank::presets(cfg.sample_rate);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let paths = enumerate_image_sources(room, src, recv, cfg.max_order, cfg.jitter_m, &mut rng).unwrap();
        let n = cfg.fft_size();
        let freqs = frequency_grid(n, cfg.sample_rate);
        let mut spec = vec![[Complex64::new(0.0, 0.0); 4]; freqs.len()];
        for p in &paths {
            let g = sh_eval(p.direction).0;
            let s = path_spectrum(p, &freqs, room, &bank).unwrap();
            for (k, v) in s.iter().enumerate() {
                for c in 0..4 {
                    spec[k][c] += v * g[c];
                }
            }
        }
        let mut planner = RealFftPlanner::<f64>::new();
        let inv = planner.plan_fft_inverse(n);
        std::array::from_fn(|c| {
            let mut x: Vec<Complex64> = spec.iter().map(|s| s[c]).collect();
            x[0].im = 0.0;
            let last = x.len() - 1;
            x[last].im = 0.0;
            let mut out = inv.make_output_vec();
            inv.process(&mut x, &mut out).unwrap();
            out.truncate(cfg.rir_length);
            out.iter().map(|v| v / n as f64).collect()
        })
    }

    #[test]
    fn fast_sum_matches_per_path_reference() {
        let room = Room::new(
            [4.3, 3.1, 2.7],
            ["carpet", "plaster", "glass", "curtain", "concrete", "rigid"].map(String::from),
        )
        .unwrap();
        let cfg = SimConfig {
            max_order: 5,
            jitter_m: 0.03,
            rir_length: 2000,
            ..SimConfig::default()
        };
        let src = [1.1, 0.7, 1.9];
        let recv = [2.2, 1.6, 1.3];
        let want = reference(&room, src, recv, &cfg);
        let bank = MaterialBank::presets(16_000);
        let got = simulate_rir(&room, src, recv, &cfg, &bank, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        for c in 0..4 {
            let err: f64 = got.channel(c).iter().zip(&want[c]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-10, "channel {c}: {err}");
        }
    }

    #[test]
    fn axis_counts_match_lattice() {
        assert_eq!(axis_counts(0), (0, 0));
        assert_eq!(axis_counts(1), (0, 1));
        assert_eq!(axis_counts(-1), (1, 0));
        assert_eq!(axis_counts(2), (1, 1));
        assert_eq!(axis_counts(-3), (2, 1));
        assert_eq!(axis_counts(3), (1, 2));
    }

    #[test]
    fn too_short_without_truncation() {
        let room = Room::uniform([6.0, 6.0, 6.0], "rigid").unwrap();
        let cfg = SimConfig {
            max_order: 1,
            jitter_m: 0.0,
            rir_length: 20,
            truncate_late_paths: false,
            ..SimConfig::default()
        };
        let bank = MaterialBank::presets(16_000);
        let err = simulate_rir(&room, [3.0, 4.0, 3.0], [3.0; 3], &cfg, &bank, &mut ChaCha8Rng::seed_from_u64(0))
            .unwrap_err();
        match err {
            Error::RirTooShort { required, got } => {
                assert_eq!(got, 20);
                // farthest first-order image is the y = 0 mirror, 7 m away
                assert_eq!(required, (7.0 * 16_000.0 / 343.0f64).ceil() as usize);
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn unknown_material_is_reported() {
        let room = Room::uniform([6.0, 6.0, 6.0], "velvet").unwrap();
        let bank = MaterialBank::presets(16_000);
        let r = simulate_rir(&room, [3.0, 4.0, 3.0], [3.0; 3], &SimConfig::default(), &bank, &mut ChaCha8Rng::seed_from_u64(0));
        assert!(matches!(r, Err(Error::UnknownMaterial(m)) if m == "velvet"));
    }
}
