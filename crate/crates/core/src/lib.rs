//! First-order ambisonics toolkit.
//!
//! SN3D-normalized, ACN-ordered (`[W, Y, Z, X]`) throughout, with `+X`
//! forward, azimuth toward `+Y` and elevation toward `+Z`. The pieces:
//!
//! - [`sh`]: directions, SH evaluation, plane-wave encoding, rotations
//! - [`room`]: shoebox image-source RIR simulation in the frequency domain
//! - [`mixer`]: RIR banks, clip pools and `(mixture, target)` pair synthesis
//! - [`extract`]: loudness modification and beamform-and-project baselines
//! - [`metrics`]: STFT, complex-STFT ℓ1 distance, SI-SDR(i), bucketed reports
//! - [`cli`]: the `foakit` command line

pub mod cli;
pub mod dsp;
pub mod error;
pub mod extract;
pub mod io;
pub mod metrics;
pub mod mixer;
pub mod room;
pub mod seed;
pub mod sh;

pub use error::{Error, ErrorKind, Result};
