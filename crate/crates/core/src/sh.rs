//! First-order real spherical harmonics (SN3D normalization, ACN channel order).
//!
//! Coordinate convention: azimuth 0 / elevation 0 points along +X, azimuth
//! grows counterclockwise toward +Y and elevation grows toward +Z. Channel
//! order is `[W, Y, Z, X]`, so the three first-order coefficients of a plane
//! wave are the direction cosines `(u_y, u_z, u_x)`.

use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::{Matrix3, Matrix4, Rotation3, Unit, Vector3, Vector4};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of FOA channels.
pub const CHANNELS: usize = 4;

/// A point on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    azimuth: f64,
    elevation: f64,
}

impl Direction {
    /// Builds a direction from radians. Azimuth is wrapped into `[0, 2π)`.
    pub fn new(azimuth: f64, elevation: f64) -> Result<Self> {
        if !azimuth.is_finite() || !elevation.is_finite() {
            return Err(Error::NonFiniteAngle);
        }
        if elevation.abs() > FRAC_PI_2 {
            return Err(Error::InvalidElevation(elevation));
        }
        Ok(Self {
            azimuth: wrap_azimuth(azimuth),
            elevation,
        })
    }

    pub fn from_degrees(azimuth_deg: f64, elevation_deg: f64) -> Result<Self> {
        Self::new(azimuth_deg.to_radians(), elevation_deg.to_radians())
    }

    /// Direction of a (not necessarily unit) Cartesian vector.
    pub fn from_vector(v: [f64; 3]) -> Result<Self> {
        let [x, y, z] = v;
        let horizontal = x.hypot(y);
        if horizontal == 0.0 && z == 0.0 {
            return Err(Error::ZeroVector);
        }
        if !(horizontal.is_finite() && z.is_finite()) {
            return Err(Error::NonFiniteAngle);
        }
        Ok(Self {
            azimuth: wrap_azimuth(y.atan2(x)),
            elevation: z.atan2(horizontal),
        })
    }

    pub fn azimuth(&self) -> f64 {
        self.azimuth
    }

    pub fn elevation(&self) -> f64 {
        self.elevation
    }

    pub fn azimuth_deg(&self) -> f64 {
        self.azimuth.to_degrees()
    }

    pub fn elevation_deg(&self) -> f64 {
        self.elevation.to_degrees()
    }

    /// Unit Cartesian vector `[x, y, z]`.
    pub fn to_vector(&self) -> [f64; 3] {
        let (sa, ca) = self.azimuth.sin_cos();
        let (se, ce) = self.elevation.sin_cos();
        [ce * ca, ce * sa, se]
    }

    pub(crate) fn to_vector3(self) -> Vector3<f64> {
        Vector3::from(self.to_vector())
    }

    /// The opposite point on the sphere.
    pub fn antipode(&self) -> Self {
        let [x, y, z] = self.to_vector();
        Self::from_vector([-x, -y, -z]).expect("unit vector")
    }
}

fn wrap_azimuth(az: f64) -> f64 {
    let wrapped = az.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if wrapped >= TAU {
        0.0
    } else {
        wrapped
    }
}

/// SN3D/ACN first-order coefficients `[W, Y, Z, X]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoaGains(pub [f64; CHANNELS]);

impl FoaGains {
    pub fn as_array(&self) -> &[f64; CHANNELS] {
        &self.0
    }

    pub(crate) fn to_vector4(self) -> Vector4<f64> {
        Vector4::from(self.0)
    }

    pub fn dot(&self, other: &FoaGains) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }
}

/// Evaluates the first-order real SH basis at `d`.
pub fn sh_eval(d: Direction) -> FoaGains {
    let [x, y, z] = d.to_vector();
    FoaGains([1.0, y, z, x])
}

/// A four-channel ambisonic signal.
#[derive(Debug, Clone, PartialEq)]
pub struct FoaSignal {
    channels: [Vec<f64>; CHANNELS],
    sample_rate: u32,
}

impl FoaSignal {
    /// Validates equal channel lengths and finite samples.
    pub fn new(channels: [Vec<f64>; CHANNELS], sample_rate: u32) -> Result<Self> {
        let len = channels[0].len();
        for (c, ch) in channels.iter().enumerate() {
            if ch.len() != len {
                return Err(Error::ChannelLength {
                    channel: c,
                    expected: len,
                    got: ch.len(),
                });
            }
            if let Some(index) = ch.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { channel: c, index });
            }
        }
        Ok(Self {
            channels,
            sample_rate,
        })
    }

    pub fn zeros(len: usize, sample_rate: u32) -> Self {
        Self {
            channels: std::array::from_fn(|_| vec![0.0; len]),
            sample_rate,
        }
    }

    /// Builds a signal from per-sample frames.
    pub fn from_frames(frames: &[[f64; CHANNELS]], sample_rate: u32) -> Result<Self> {
        let channels = std::array::from_fn(|c| frames.iter().map(|f| f[c]).collect());
        Self::new(channels, sample_rate)
    }

    /// Internal constructor for values that are finite by construction.
    pub(crate) fn from_channels_unchecked(channels: [Vec<f64>; CHANNELS], sample_rate: u32) -> Self {
        debug_assert!(channels.iter().all(|c| c.len() == channels[0].len()));
        Self {
            channels,
            sample_rate,
        }
    }

    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn channel(&self, c: usize) -> &[f64] {
        &self.channels[c]
    }

    pub fn channels(&self) -> &[Vec<f64>; CHANNELS] {
        &self.channels
    }

    pub fn into_channels(self) -> [Vec<f64>; CHANNELS] {
        self.channels
    }

    pub fn frame(&self, t: usize) -> [f64; CHANNELS] {
        std::array::from_fn(|c| self.channels[c][t])
    }

    /// Applies a memoryless 4×4 matrix to every sample frame.
    pub fn map_frames(&self, m: &Matrix4<f64>) -> FoaSignal {
        let len = self.len();
        let mut out: [Vec<f64>; CHANNELS] = std::array::from_fn(|_| Vec::with_capacity(len));
        for t in 0..len {
            let v = m * Vector4::from(self.frame(t));
            for (c, ch) in out.iter_mut().enumerate() {
                ch.push(v[c]);
            }
        }
        FoaSignal::from_channels_unchecked(out, self.sample_rate)
    }

    /// Per-sample channel sum `self + other`.
    pub fn add(&self, other: &FoaSignal) -> Result<FoaSignal> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch(self.len(), other.len()));
        }
        let channels = std::array::from_fn(|c| {
            self.channels[c]
                .iter()
                .zip(&other.channels[c])
                .map(|(a, b)| a + b)
                .collect()
        });
        Ok(FoaSignal::from_channels_unchecked(channels, self.sample_rate))
    }

    /// Per-sample channel difference `self - other`.
    pub fn sub(&self, other: &FoaSignal) -> Result<FoaSignal> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch(self.len(), other.len()));
        }
        let channels = std::array::from_fn(|c| {
            self.channels[c]
                .iter()
                .zip(&other.channels[c])
                .map(|(a, b)| a - b)
                .collect()
        });
        Ok(FoaSignal::from_channels_unchecked(channels, self.sample_rate))
    }

    pub fn scale(&self, k: f64) -> FoaSignal {
        let channels = std::array::from_fn(|c| self.channels[c].iter().map(|v| v * k).collect());
        FoaSignal::from_channels_unchecked(channels, self.sample_rate)
    }

    /// Energy (sum of squares) of each channel.
    pub fn channel_energy(&self) -> [f64; CHANNELS] {
        std::array::from_fn(|c| self.channels[c].iter().map(|v| v * v).sum())
    }

    /// RMS over all channels and samples.
    pub fn rms(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let total: f64 = self.channel_energy().iter().sum();
        (total / (CHANNELS * self.len()) as f64).sqrt()
    }
}

/// Encodes a mono signal as a plane wave arriving from `d`.
pub fn encode_plane_wave(mono: &[f64], d: Direction, sample_rate: u32) -> Result<FoaSignal> {
    if mono.is_empty() {
        return Err(Error::EmptySignal);
    }
    if let Some(index) = mono.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { channel: 0, index });
    }
    let g = sh_eval(d).0;
    let channels = std::array::from_fn(|c| mono.iter().map(|s| s * g[c]).collect());
    Ok(FoaSignal::from_channels_unchecked(channels, sample_rate))
}

/// Great-circle angle between two directions, in `[0, π]`.
pub fn great_circle_distance(a: Direction, b: Direction) -> f64 {
    let u = a.to_vector3();
    let v = b.to_vector3();
    // atan2 keeps precision near 0 and π where acos does not
    u.cross(&v).norm().atan2(u.dot(&v))
}

/// Draws a direction uniformly on the sphere from a normalized 3-D Gaussian.
pub fn sample_uniform_direction<R: Rng + ?Sized>(rng: &mut R) -> Direction {
    loop {
        let v: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-12 {
            return Direction::from_vector([v[0] / n, v[1] / n, v[2] / n]).expect("nonzero");
        }
    }
}

// channel 1..=3 of the SH vector holds Cartesian component PERM[c - 1]
const PERM: [usize; 3] = [1, 2, 0];

/// Rotation of an FOA sound field: W is untouched and the first-order block
/// is the Cartesian rotation conjugated by the `(Y, Z, X)` channel permutation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoaRotation {
    matrix: Matrix4<f64>,
}

impl FoaRotation {
    pub fn identity() -> Self {
        Self {
            matrix: Matrix4::identity(),
        }
    }

    /// Lifts a proper Cartesian rotation into the SH domain.
    pub fn from_cartesian(r: &Rotation3<f64>) -> Self {
        let m = r.matrix();
        let mut matrix = Matrix4::zeros();
        matrix[(0, 0)] = 1.0;
        for a in 0..3 {
            for b in 0..3 {
                matrix[(a + 1, b + 1)] = m[(PERM[a], PERM[b])];
            }
        }
        Self { matrix }
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.matrix
    }

    /// The Cartesian rotation this SH rotation acts as.
    pub fn cartesian(&self) -> Matrix3<f64> {
        let mut m = Matrix3::zeros();
        for a in 0..3 {
            for b in 0..3 {
                m[(PERM[a], PERM[b])] = self.matrix[(a + 1, b + 1)];
            }
        }
        m
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == Matrix4::identity()
    }

    pub fn apply_gains(&self, g: FoaGains) -> FoaGains {
        let v = self.matrix * g.to_vector4();
        FoaGains([v[0], v[1], v[2], v[3]])
    }
}

/// Smallest rotation taking `from` onto `to`.
///
/// For antipodal pairs the axis is the component of +Z orthogonal to `from`
/// (plain +Z for horizontal directions); when `from` is ±Z the axis is +X.
pub fn rotation_between(from: Direction, to: Direction) -> FoaRotation {
    if from == to {
        return FoaRotation::identity();
    }
    let u = from.to_vector3();
    let v = to.to_vector3();
    let cross = u.cross(&v);
    let sin = cross.norm();
    let cos = u.dot(&v);
    if sin < 1e-15 && cos > 0.0 {
        return FoaRotation::identity();
    }
    let axis = if sin > 1e-9 {
        Unit::new_normalize(cross)
    } else {
        let z = Vector3::z();
        let ortho = z - u * u.dot(&z);
        if ortho.norm() > 1e-6 {
            Unit::new_normalize(ortho)
        } else {
            Vector3::x_axis()
        }
    };
    let angle = sin.atan2(cos);
    FoaRotation::from_cartesian(&Rotation3::from_axis_angle(&axis, angle))
}

/// Rotates every sample frame of `x`. The identity leaves `x` bit-identical.
pub fn apply_rotation(x: &FoaSignal, r: &FoaRotation) -> FoaSignal {
    if r.is_identity() {
        return x.clone();
    }
    x.map_frames(r.matrix())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

    fn dir(az: f64, el: f64) -> Direction {
        Direction::new(az, el).unwrap()
    }

    #[test]
    fn axis_gains() {
        let cases = [
            (dir(0.0, 0.0), [1.0, 0.0, 0.0, 1.0]),
            (dir(FRAC_PI_2, 0.0), [1.0, 1.0, 0.0, 0.0]),
            (dir(0.0, FRAC_PI_2), [1.0, 0.0, 1.0, 0.0]),
        ];
        for (d, want) in cases {
            let got = sh_eval(d).0;
            for c in 0..4 {
                assert!((got[c] - want[c]).abs() <= 1e-12, "{d:?}: {got:?}");
            }
        }
    }

    #[test]
    fn azimuth_wraps() {
        let d = dir(-FRAC_PI_2, 0.0);
        assert!((d.azimuth() - 1.5 * PI).abs() < 1e-15);
        assert_eq!(dir(TAU, 0.0).azimuth(), 0.0);
        assert_eq!(dir(-1e-300, 0.0).azimuth(), 0.0);
        assert!(Direction::new(0.0, 1.6).is_err());
        assert!(Direction::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn impulse_at_front() {
        let x = encode_plane_wave(&[1.0, 0.0, 0.0], dir(0.0, 0.0), 16_000).unwrap();
        assert_eq!(x.channel(0), &[1.0, 0.0, 0.0]);
        assert_eq!(x.channel(3), &[1.0, 0.0, 0.0]);
        assert!(x.channel(1).iter().chain(x.channel(2)).all(|v| *v == 0.0));
    }

    #[test]
    fn zenith_z_matches_w() {
        let mono: Vec<f64> = (0..64).map(|t| (t as f64 * 0.3).sin()).collect();
        let x = encode_plane_wave(&mono, dir(1.0, FRAC_PI_2), 16_000).unwrap();
        assert_eq!(x.channel(2), x.channel(0));
    }

    #[test]
    fn diagonal_sine() {
        let mono: Vec<f64> = (0..128).map(|t| (t as f64 * 0.1).sin()).collect();
        let x = encode_plane_wave(&mono, dir(FRAC_PI_4, 0.0), 16_000).unwrap();
        for t in 0..mono.len() {
            let want = mono[t] * FRAC_1_SQRT_2;
            assert!((x.channel(1)[t] - want).abs() < 1e-15);
            assert!((x.channel(3)[t] - want).abs() < 1e-15);
        }
    }

    #[test]
    fn encode_rejects_empty() {
        assert!(matches!(
            encode_plane_wave(&[], dir(0.0, 0.0), 16_000),
            Err(Error::EmptySignal)
        ));
    }

    #[test]
    fn distances() {
        let a = dir(0.0, 0.0);
        assert_eq!(great_circle_distance(a, a), 0.0);
        assert!((great_circle_distance(a, dir(PI, 0.0)) - PI).abs() < 1e-15);
        assert!((great_circle_distance(a, dir(FRAC_PI_2, FRAC_PI_4)) - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn rotation_front_to_left() {
        let r = rotation_between(dir(0.0, 0.0), dir(FRAC_PI_2, 0.0));
        let g = r.apply_gains(FoaGains([1.0, 0.0, 0.0, 1.0])).0;
        let want = [1.0, 1.0, 0.0, 0.0];
        for c in 0..4 {
            assert!((g[c] - want[c]).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_same_direction_is_identity() {
        let d = dir(1.2, -0.4);
        assert!(rotation_between(d, d).is_identity());
    }

    #[test]
    fn antipodal_rotations() {
        for (a, b) in [
            (dir(0.3, 0.0), dir(0.3 + PI, 0.0)),
            (dir(0.0, FRAC_PI_2), dir(0.0, -FRAC_PI_2)),
            (dir(1.0, 0.7), dir(1.0, 0.7).antipode()),
        ] {
            let r = rotation_between(a, b);
            let got = r.apply_gains(sh_eval(a)).0;
            let want = sh_eval(b).0;
            for c in 0..4 {
                assert!((got[c] - want[c]).abs() < 1e-10, "{a:?} -> {b:?}");
            }
            assert!((r.cartesian().determinant() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn horizontal_antipode_rotates_about_z() {
        let r = rotation_between(dir(0.0, 0.0), dir(PI, 0.0));
        // Z channel is the rotation axis, so it is left alone
        assert!((r.matrix()[(2, 2)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_preserves_w() {
        let x = encode_plane_wave(&[0.5, -1.0, 2.0], dir(0.2, 0.1), 16_000).unwrap();
        let y = apply_rotation(&x, &rotation_between(dir(0.0, 0.0), dir(2.0, -0.5)));
        assert_eq!(x.channel(0), y.channel(0));
    }

    #[test]
    fn signal_validation() {
        assert!(FoaSignal::new([vec![0.0; 3], vec![0.0; 3], vec![0.0; 2], vec![0.0; 3]], 16_000).is_err());
        assert!(FoaSignal::new([vec![0.0, f64::NAN], vec![0.0; 2], vec![0.0; 2], vec![0.0; 2]], 16_000).is_err());
    }
}
