use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::material::RANDOM_MATERIALS;
use super::Room;
use crate::error::{Error, Result};
use crate::sh::{sample_uniform_direction, Direction};

pub const ROOM_DIM_RANGE_M: (f64, f64) = (2.0, 15.0);
pub const DISTANCE_RANGE_M: (f64, f64) = (0.6, 5.0);
/// Receiver offset from the room center, as a fraction of each dimension.
pub const RECEIVER_JITTER_FRACTION: f64 = 0.1;
const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourcePlacement {
    pub position: [f64; 3],
    pub distance: f64,
    /// Direction of the source as seen from the receiver.
    pub direction: Direction,
    pub is_target: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneGeometry {
    pub room: Room,
    pub receiver: [f64; 3],
    pub sources: Vec<SourcePlacement>,
}

/// Random room, receiver and `n_sources` sources; the first is the target.
/// Surface materials are drawn from [`RANDOM_MATERIALS`].
pub fn sample_scene_geometry<R: Rng + ?Sized>(rng: &mut R, n_sources: usize) -> Result<SceneGeometry> {
    sample_scene_geometry_with(rng, n_sources, &RANDOM_MATERIALS)
}

pub fn sample_scene_geometry_with<R: Rng + ?Sized>(
    rng: &mut R,
    n_sources: usize,
    palette: &[&str],
) -> Result<SceneGeometry> {
    if n_sources == 0 {
        return Err(Error::Config("a scene needs at least one source".into()));
    }
    if palette.is_empty() {
        return Err(Error::Config("empty material palette".into()));
    }
    let (lo, hi) = ROOM_DIM_RANGE_M;
    let dims: [f64; 3] = std::array::from_fn(|_| rng.random_range(lo..=hi));
    let materials: [String; 6] =
        std::array::from_fn(|_| palette.choose(rng).expect("nonempty").to_string());
    let room = Room::new(dims, materials)?;

    let receiver: [f64; 3] = std::array::from_fn(|a| {
        let span = RECEIVER_JITTER_FRACTION * dims[a];
        dims[a] / 2.0 + rng.random_range(-span..=span)
    });

    let mut sources = Vec::with_capacity(n_sources);
    for s in 0..n_sources {
        let mut placed = None;
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let direction = sample_uniform_direction(rng);
            let distance = rng.random_range(DISTANCE_RANGE_M.0..=DISTANCE_RANGE_M.1);
            let u = direction.to_vector();
            let position = std::array::from_fn(|a| receiver[a] + distance * u[a]);
            if room.contains(position) {
                placed = Some(SourcePlacement {
                    position,
                    distance,
                    direction,
                    is_target: s == 0,
                });
                break;
            }
        }
        sources.push(placed.ok_or(Error::RetryCapExhausted(MAX_PLACEMENT_ATTEMPTS))?);
    }
    Ok(SceneGeometry {
        room,
        receiver,
        sources,
    })
}
