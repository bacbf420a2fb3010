//! Shoebox room acoustics: image-source enumeration, frequency-domain
//! ambisonic RIR synthesis and random scene sampling.

mod image;
mod material;
mod scene;
mod sim;

pub use image::{enumerate_image_sources, ImagePath};
pub use material::{Material, MaterialBank, OCTAVE_BANDS_HZ, PRESET_NAMES, RANDOM_MATERIALS};
pub use scene::{
    sample_scene_geometry, sample_scene_geometry_with, SceneGeometry, SourcePlacement,
    DISTANCE_RANGE_M, ROOM_DIM_RANGE_M,
};
pub use sim::{frequency_grid, path_spectrum, simulate_rir, AmbisonicRir, SimConfig};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of sound, m/s.
pub const SPEED_OF_SOUND: f64 = 343.0;

/// Paths closer than this are attenuated as if they were this far away.
pub const MIN_DISTANCE_M: f64 = 0.1;

/// The six boundary surfaces of a shoebox room, in material-slot order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Surface {
    Floor,
    Ceiling,
    WallX0,
    WallX1,
    WallY0,
    WallY1,
}

impl Surface {
    pub const ALL: [Surface; 6] = [
        Surface::Floor,
        Surface::Ceiling,
        Surface::WallX0,
        Surface::WallX1,
        Surface::WallY0,
        Surface::WallY1,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// The surface at coordinate 0 (`upper = false`) or at the room extent
    /// along `axis` (0 = x, 1 = y, 2 = z).
    pub fn on_axis(axis: usize, upper: bool) -> Surface {
        match (axis, upper) {
            (0, false) => Surface::WallX0,
            (0, true) => Surface::WallX1,
            (1, false) => Surface::WallY0,
            (1, true) => Surface::WallY1,
            (2, false) => Surface::Floor,
            (2, true) => Surface::Ceiling,
            _ => panic!("axis {axis} out of range"),
        }
    }
}

/// Axis-aligned shoebox spanning `[0, dims]` with one material per surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Room {
    dims: [f64; 3],
    /// Material names indexed by [`Surface::index`].
    materials: [String; 6],
}

impl Room {
    pub fn new(dims: [f64; 3], materials: [String; 6]) -> Result<Self> {
        if dims.iter().any(|d| !d.is_finite() || *d <= 0.0) {
            return Err(Error::InvalidRoom(format!("dimensions {dims:?} must be positive")));
        }
        Ok(Self { dims, materials })
    }

    /// A room with the same material on every surface.
    pub fn uniform(dims: [f64; 3], material: &str) -> Result<Self> {
        Self::new(dims, std::array::from_fn(|_| material.to_string()))
    }

    pub fn dims(&self) -> [f64; 3] {
        self.dims
    }

    pub fn materials(&self) -> &[String; 6] {
        &self.materials
    }

    pub fn material(&self, s: Surface) -> &str {
        &self.materials[s.index()]
    }

    pub fn contains(&self, p: [f64; 3]) -> bool {
        p.iter().zip(self.dims).all(|(x, d)| *x > 0.0 && *x < d)
    }

    pub fn center(&self) -> [f64; 3] {
        self.dims.map(|d| d / 2.0)
    }
}
