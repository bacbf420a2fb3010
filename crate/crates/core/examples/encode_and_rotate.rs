//! Encode a plane wave, rotate the sound field, and re-point a recorded
//! segment at a new direction.
//!
//! ```text
//! cargo run --example encode_and_rotate
//! ```

use foakit::sh::{
    apply_rotation, encode_plane_wave, great_circle_distance, rotation_between, sh_eval, Direction,
};
use foakit::mixer::rotate_remix;
use rand::SeedableRng;

fn main() -> foakit::Result<()> {
    for (az, el) in [(0.0, 0.0), (90.0, 0.0), (0.0, 90.0), (-45.0, 30.0)] {
        let g = sh_eval(Direction::from_degrees(az, el)?);
        println!("az {az:>6.1} el {el:>5.1}  W Y Z X = {:?}", g.0.map(|v| (v * 1e4).round() / 1e4));
    }

    let from = Direction::from_degrees(30.0, 10.0)?;
    let to = Direction::from_degrees(-120.0, -25.0)?;
    let tone: Vec<f64> = (0..1600).map(|t| (t as f64 * 0.05).sin()).collect();
    let x = encode_plane_wave(&tone, from, 16_000)?;
    let r = rotation_between(from, to);
    let y = apply_rotation(&x, &r);
    let want = encode_plane_wave(&tone, to, 16_000)?;
    let err = (0..4)
        .flat_map(|c| y.channel(c).iter().zip(want.channel(c)).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max);
    println!("rotated field matches a plane wave from the new direction: max err {err:.1e}");

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
    let (remixed, dir) = rotate_remix(&x, from, &mut rng);
    println!(
        "remix moved the source {:.1} deg to az {:.1} el {:.1}, rms {:.4} -> {:.4}",
        great_circle_distance(from, dir).to_degrees(),
        dir.azimuth_deg(),
        dir.elevation_deg(),
        x.rms(),
        remixed.rms()
    );
    Ok(())
}
