//! Signal-processing target extractors steered by direction only:
//! directional loudness modification and two beamform-and-project variants.

use nalgebra::{Matrix4, OMatrix, Vector4, U4, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sh::{great_circle_distance, sh_eval, Direction, FoaSignal, CHANNELS};

pub const DEFAULT_SPREAD_DEG: f64 = 60.0;
pub const DEFAULT_GRID_SIZE: usize = 36;

/// Directions over which the loudness transform decodes and re-encodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingGrid {
    pub name: String,
    pub directions: Vec<Direction>,
}

impl SamplingGrid {
    /// Fibonacci (golden-angle) lattice of `n` points.
    pub fn fibonacci(n: usize) -> Self {
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        let directions = (0..n)
            .map(|i| {
                let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
                Direction::new(golden * i as f64, z.asin()).expect("|z| < 1")
            })
            .collect();
        Self {
            name: format!("fibonacci-{n}"),
            directions,
        }
    }

    /// The `n × 4` matrix whose rows are `sh_eval` at each direction.
    pub fn sh_matrix(&self) -> OMatrix<f64, Dyn, U4> {
        OMatrix::<f64, Dyn, U4>::from_fn(self.directions.len(), |i, c| sh_eval(self.directions[i]).0[c])
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }
}

/// A memoryless 4×4 SH-domain transform, applied as `y = M x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoudnessMatrix {
    pub matrix: Matrix4<f64>,
}

impl LoudnessMatrix {
    /// The gains sampled at a plane-wave arrival `d` and read back at `at`:
    /// `sh_eval(at)ᵀ · M · sh_eval(d)`.
    pub fn response(&self, d: Direction, at: Direction) -> f64 {
        let x = Vector4::from(sh_eval(d).0);
        let a = Vector4::from(sh_eval(at).0);
        a.dot(&(self.matrix * x))
    }
}

/// `M = pinv(Yg) · diag(g) · Yg` with `g = 1` inside the cap of full width
/// `spread_deg` around `target` and `out_gain` elsewhere.
///
/// `spread_deg` may reach 360 so that a single cap covers the whole sphere.
pub fn build_loudness_matrix(
    target: Direction,
    spread_deg: f64,
    out_gain: f64,
    grid: &SamplingGrid,
) -> Result<LoudnessMatrix> {
    if !(spread_deg > 0.0 && spread_deg <= 360.0) {
        return Err(Error::InvalidExtractor(format!("cap spread {spread_deg}° outside (0, 360]")));
    }
    if !out_gain.is_finite() {
        return Err(Error::InvalidExtractor("non-finite out-of-cap gain".into()));
    }
    if grid.len() < CHANNELS {
        return Err(Error::RankDeficientGrid(grid.name.clone()));
    }
    let half = (spread_deg / 2.0).to_radians();
    let gains: Vec<f64> = grid
        .directions
        .iter()
        .map(|&d| if great_circle_distance(d, target) <= half { 1.0 } else { out_gain })
        .collect();

    let y = grid.sh_matrix();
    let gram = y.transpose() * &y;
    // reject grids whose SH matrix is (numerically) rank deficient
    let eig = gram.symmetric_eigenvalues();
    if eig.min() <= 1e-10 * eig.max() {
        return Err(Error::RankDeficientGrid(grid.name.clone()));
    }
    let inv = gram.try_inverse().ok_or_else(|| Error::RankDeficientGrid(grid.name.clone()))?;
    let mut weighted = Matrix4::zeros();
    for (i, g) in gains.iter().enumerate() {
        let row = y.row(i).transpose();
        weighted += *g * row * row.transpose();
    }
    Ok(LoudnessMatrix {
        matrix: inv * weighted,
    })
}

pub fn apply_loudness_mod(x: &FoaSignal, m: &LoudnessMatrix) -> FoaSignal {
    if m.matrix == Matrix4::identity() {
        return x.clone();
    }
    x.map_frames(&m.matrix)
}

/// First-order beam patterns, both distortionless at the steering direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BeamKind {
    MaxDi,
    MaxRe,
}

impl BeamKind {
    /// Zeroth- and first-order weights `(g0, g1)`.
    pub fn order_weights(self) -> (f64, f64) {
        match self {
            BeamKind::MaxDi => (0.25, 0.75),
            BeamKind::MaxRe => {
                let s = 3f64.sqrt();
                (1.0 / (1.0 + s), s / (1.0 + s))
            }
        }
    }

    /// Off-steer angle of the pattern null, radians.
    pub fn null_angle(self) -> f64 {
        let (g0, g1) = self.order_weights();
        (-g0 / g1).acos()
    }
}

pub fn beam_weights(kind: BeamKind, steer: Direction) -> [f64; CHANNELS] {
    let (g0, g1) = kind.order_weights();
    let e = sh_eval(steer).0;
    [g0, g1 * e[1], g1 * e[2], g1 * e[3]]
}

/// Steers a beam at `target`, then re-encodes the mono beam output as a
/// plane wave from `target`.
pub fn beamform_and_project(x: &FoaSignal, kind: BeamKind, target: Direction) -> FoaSignal {
    let w = beam_weights(kind, target);
    let e = sh_eval(target).0;
    let s: Vec<f64> = (0..x.len())
        .map(|t| (0..CHANNELS).map(|c| w[c] * x.channel(c)[t]).sum())
        .collect();
    let channels = std::array::from_fn(|c| s.iter().map(|v| v * e[c]).collect());
    FoaSignal::from_channels_unchecked(channels, x.sample_rate())
}

/// Extraction algorithms, named as on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// Returns the mixture unchanged.
    Identity,
    /// Directional loudness modification.
    Loudness,
    /// Max-DI beamform-and-project.
    MaxDi,
    /// Max-rE beamform-and-project.
    MaxRe,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Identity, Algorithm::Loudness, Algorithm::MaxDi, Algorithm::MaxRe];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Identity => "identity",
            Algorithm::Loudness => "loudness",
            Algorithm::MaxDi => "max-di",
            Algorithm::MaxRe => "max-re",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == name)
            .ok_or_else(|| Error::InvalidExtractor(format!("unknown algorithm {name:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractorConfig {
    pub algorithm: Algorithm,
    pub target_dir: Direction,
    /// Full cap width, degrees.
    pub cap_spread_deg: f64,
    pub out_gain: f64,
    pub grid_size: usize,
}

impl ExtractorConfig {
    pub fn new(algorithm: Algorithm, target_dir: Direction) -> Self {
        Self {
            algorithm,
            target_dir,
            cap_spread_deg: DEFAULT_SPREAD_DEG,
            out_gain: 0.0,
            grid_size: DEFAULT_GRID_SIZE,
        }
    }
}

/// A configured extractor with its matrix or weights precomputed.
#[derive(Debug, Clone)]
pub enum Extractor {
    Identity,
    Loudness(LoudnessMatrix),
    Beam(BeamKind, Direction),
}

impl Extractor {
    pub fn new(cfg: &ExtractorConfig) -> Result<Self> {
        Ok(match cfg.algorithm {
            Algorithm::Identity => Extractor::Identity,
            Algorithm::Loudness => {
                if cfg.grid_size < CHANNELS {
                    return Err(Error::InvalidExtractor(format!("grid of {} points is below 4", cfg.grid_size)));
                }
                let grid = SamplingGrid::fibonacci(cfg.grid_size);
                Extractor::Loudness(build_loudness_matrix(cfg.target_dir, cfg.cap_spread_deg, cfg.out_gain, &grid)?)
            }
            Algorithm::MaxDi => Extractor::Beam(BeamKind::MaxDi, cfg.target_dir),
            Algorithm::MaxRe => Extractor::Beam(BeamKind::MaxRe, cfg.target_dir),
        })
    }

    pub fn apply(&self, x: &FoaSignal) -> FoaSignal {
        match self {
            Extractor::Identity => x.clone(),
            Extractor::Loudness(m) => apply_loudness_mod(x, m),
            Extractor::Beam(kind, d) => beamform_and_project(x, *kind, *d),
        }
    }
}

pub fn run_extractor(cfg: &ExtractorConfig, x: &FoaSignal) -> Result<FoaSignal> {
    Ok(Extractor::new(cfg)?.apply(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn beam_weights_at_front() {
        let d = Direction::new(0.0, 0.0).unwrap();
        assert_eq!(beam_weights(BeamKind::MaxDi, d), [0.25, 0.0, 0.0, 0.75]);
        let w = beam_weights(BeamKind::MaxRe, d);
        assert_abs_diff_eq!(w[0], 0.366025, epsilon = 1e-6);
        assert_abs_diff_eq!(w[3], 0.633975, epsilon = 1e-6);
        assert_abs_diff_eq!(BeamKind::MaxDi.null_angle().to_degrees(), 109.4712, epsilon = 1e-4);
        assert_abs_diff_eq!(BeamKind::MaxRe.null_angle().to_degrees(), 125.2644, epsilon = 1e-4);
    }

    #[test]
    fn fibonacci_grid_has_full_rank() {
        let m = build_loudness_matrix(Direction::new(1.0, 0.2).unwrap(), 60.0, 0.3, &SamplingGrid::fibonacci(36));
        assert!(m.is_ok());
    }

    #[test]
    fn degenerate_grids_rejected() {
        let d = Direction::new(0.0, 0.0).unwrap();
        let flat = SamplingGrid {
            name: "equator".into(),
            directions: (0..8).map(|i| Direction::new(i as f64, 0.0).unwrap()).collect(),
        };
        assert!(matches!(
            build_loudness_matrix(d, 60.0, 0.0, &flat),
            Err(Error::RankDeficientGrid(n)) if n == "equator"
        ));
        assert!(build_loudness_matrix(d, 0.0, 0.0, &SamplingGrid::fibonacci(36)).is_err());
        assert!(build_loudness_matrix(d, 400.0, 0.0, &SamplingGrid::fibonacci(36)).is_err());
    }

    #[test]
    fn zero_gain_everywhere_gives_zero_matrix() {
        let d = Direction::new(0.0, 0.0).unwrap();
        // a tiny cap between lattice points
        let m = build_loudness_matrix(d, 1e-6, 0.0, &SamplingGrid::fibonacci(36)).unwrap();
        assert_eq!(m.matrix, Matrix4::zeros());
    }

    #[test]
    fn names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(Algorithm::from_name(a.name()).unwrap(), a);
            let v = <Algorithm as clap::ValueEnum>::from_str(a.name(), false).unwrap();
            assert_eq!(v, a);
        }
        assert!(Algorithm::from_name("wiener").is_err());
    }
}
