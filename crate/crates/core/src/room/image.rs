use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Room, Surface, MIN_DISTANCE_M, SPEED_OF_SOUND};
use crate::error::{Error, Result};
use crate::sh::Direction;

/// One source-to-receiver propagation path through the image lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImagePath {
    /// Travel time, seconds.
    pub delay_s: f64,
    /// Direction of arrival at the receiver.
    pub direction: Direction,
    /// Number of reflections.
    pub order: u32,
    /// Distance attenuation `1 / max(d, MIN_DISTANCE_M)`.
    pub gain: f64,
    /// Surfaces hit, in the order the unjittered ray meets them.
    pub wall_sequence: Vec<Surface>,
    /// Signed image index per axis; `|index|` reflections along that axis.
    pub lattice: [i32; 3],
    /// Image position after jitter, meters.
    pub image_position: [f64; 3],
}

impl ImagePath {
    pub fn distance(&self) -> f64 {
        self.delay_s * SPEED_OF_SOUND
    }
}

/// Coordinate of the image with signed index `i` along one axis.
///
/// Even `i = 2n` is a translated copy `s + 2nL`, odd `i = 2n - 1` the
/// mirrored copy `-s + 2nL`. Either way the image lies in cell `[iL, (i+1)L]`.
fn image_coordinate(i: i32, s: f64, len: f64) -> f64 {
    if i % 2 == 0 {
        s + i as f64 * len
    } else {
        -s + (i + 1) as f64 * len
    }
}

/// Plane crossings `(t, surface)` met by the segment `recv -> image` along
/// one axis, with `t` the fractional position on the segment.
fn crossings(axis: usize, i: i32, r: f64, p: f64, len: f64, out: &mut Vec<(f64, Surface)>) {
    let planes: Box<dyn Iterator<Item = i32>> = if i > 0 {
        Box::new(1..=i)
    } else {
        Box::new((i + 1..=0).rev())
    };
    for m in planes {
        let t = (m as f64 * len - r) / (p - r);
        // in the unfolded lattice even planes are copies of the wall at 0
        out.push((t, Surface::on_axis(axis, m.rem_euclid(2) == 1)));
    }
}

/// Enumerates every image with total reflection order `<= max_order`.
///
/// Each reflected image is displaced by a uniform offset in a cube whose
/// corners lie at distance `jitter * order`; the direct path is never
/// jittered. With `jitter == 0` no random numbers are drawn.
pub fn enumerate_image_sources<R: Rng + ?Sized>(
    room: &Room,
    src: [f64; 3],
    recv: [f64; 3],
    max_order: u32,
    jitter: f64,
    rng: &mut R,
) -> Result<Vec<ImagePath>> {
    if !room.contains(src) {
        return Err(Error::OutsideRoom { what: "source", pos: src });
    }
    if !room.contains(recv) {
        return Err(Error::OutsideRoom { what: "receiver", pos: recv });
    }
    let d0 = dist(src, recv);
    if d0 < 1e-9 {
        return Err(Error::ZeroDistance);
    }
    if !(jitter >= 0.0 && jitter.is_finite()) {
        return Err(Error::Config(format!("jitter must be a nonnegative length, got {jitter}")));
    }

    let dims = room.dims();
    let n = max_order as i32;
    let mut paths = Vec::new();
    let mut hits = Vec::new();
    for i in -n..=n {
        let rest_i = n - i.abs();
        for j in -rest_i..=rest_i {
            let rest_j = rest_i - j.abs();
            for k in -rest_j..=rest_j {
                let lattice = [i, j, k];
                let order = (i.abs() + j.abs() + k.abs()) as u32;
                let exact: [f64; 3] =
                    std::array::from_fn(|a| image_coordinate(lattice[a], src[a], dims[a]));

                hits.clear();
                for a in 0..3 {
                    if lattice[a] != 0 {
                        crossings(a, lattice[a], recv[a], exact[a], dims[a], &mut hits);
                    }
                }
                hits.sort_by(|x, y| x.0.total_cmp(&y.0));

                let mut pos = exact;
                if order > 0 && jitter > 0.0 {
                    let half = jitter * order as f64 / 3f64.sqrt();
                    for p in pos.iter_mut() {
                        *p += rng.random_range(-half..=half);
                    }
                }
                let rel = [pos[0] - recv[0], pos[1] - recv[1], pos[2] - recv[2]];
                let d = dist(pos, recv);
                let direction = Direction::from_vector(rel).map_err(|_| Error::ZeroDistance)?;
                paths.push(ImagePath {
                    delay_s: d / SPEED_OF_SOUND,
                    direction,
                    order,
                    gain: 1.0 / d.max(MIN_DISTANCE_M),
                    wall_sequence: hits.iter().map(|h| h.1).collect(),
                    lattice,
                    image_position: pos,
                });
            }
        }
    }
    Ok(paths)
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn room() -> Room {
        Room::uniform([5.0, 4.0, 3.0], "rigid").unwrap()
    }

    fn paths(order: u32, jitter: f64, seed: u64) -> Vec<ImagePath> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        enumerate_image_sources(&room(), [1.0, 1.5, 1.2], [3.0, 2.0, 1.5], order, jitter, &mut rng)
            .unwrap()
    }

    #[test]
    fn direct_only() {
        let p = paths(0, 0.05, 1);
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].order, 0);
        assert!(p[0].wall_sequence.is_empty());
        let want = (4.0f64 + 0.25 + 0.09).sqrt() / SPEED_OF_SOUND;
        assert!((p[0].delay_s - want).abs() < 1e-15);
    }

    #[test]
    fn first_order_hits_each_wall_once() {
        let p = paths(1, 0.0, 1);
        assert_eq!(p.len(), 7);
        let mut walls: Vec<Surface> = p.iter().filter(|p| p.order == 1).map(|p| p.wall_sequence[0]).collect();
        walls.sort_by_key(|s| s.index());
        assert_eq!(walls, Surface::ALL.to_vec());
    }

    #[test]
    fn floor_reflection_geometry() {
        let p = paths(1, 0.0, 1);
        let floor = p.iter().find(|p| p.wall_sequence == [Surface::Floor]).unwrap();
        assert_eq!(floor.image_position, [1.0, 1.5, -1.2]);
        assert!(floor.direction.elevation() < 0.0);
    }

    #[test]
    fn order_matches_wall_count() {
        for p in paths(4, 0.0, 1) {
            assert_eq!(p.order as usize, p.wall_sequence.len());
            // a ray never hits the same wall twice in a row
            assert!(p.wall_sequence.windows(2).all(|w| w[0] != w[1]));
        }
    }

    #[test]
    fn jitter_bounded_and_direct_exempt() {
        let exact = paths(3, 0.0, 1);
        let jittered = paths(3, 0.05, 9);
        for (a, b) in exact.iter().zip(&jittered) {
            let off = dist(a.image_position, b.image_position);
            assert!(off <= 0.05 * a.order as f64 + 1e-12);
            if a.order == 0 {
                assert_eq!(off, 0.0);
            }
        }
        assert!(exact.iter().zip(&jittered).any(|(a, b)| a.image_position != b.image_position));
    }

    #[test]
    fn zero_jitter_ignores_seed() {
        assert_eq!(paths(3, 0.0, 1), paths(3, 0.0, 2));
    }

    #[test]
    fn errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            enumerate_image_sources(&room(), [1.0; 3], [1.0; 3], 2, 0.0, &mut rng),
            Err(Error::ZeroDistance)
        ));
        assert!(matches!(
            enumerate_image_sources(&room(), [6.0, 1.0, 1.0], [1.0; 3], 2, 0.0, &mut rng),
            Err(Error::OutsideRoom { .. })
        ));
    }
}
