//! Directional loudness modification: print the gain pattern of the cap
//! transform as a function of angle from the target.
//!
//! ```text
//! cargo run --example loudness_pattern -- [spread_deg]
//! ```

use foakit::extract::{build_loudness_matrix, SamplingGrid, DEFAULT_GRID_SIZE};
use foakit::sh::Direction;

fn main() -> foakit::Result<()> {
    let spread: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(60.0);
    let target = Direction::from_degrees(0.0, 0.0)?;
    let grid = SamplingGrid::fibonacci(DEFAULT_GRID_SIZE);
    let m = build_loudness_matrix(target, spread, 0.0, &grid)?;
    println!("M for a {spread} deg cap on {}:\n{:.4}", grid.name, m.matrix);
    println!("angle  response at target [dB]");
    for deg in (0..=180).step_by(15) {
        let d = Direction::from_degrees(deg as f64, 0.0)?;
        let r = m.response(d, target).abs().max(1e-12);
        println!("{deg:>5}  {:>8.2}", 20.0 * r.log10());
    }
    Ok(())
}
