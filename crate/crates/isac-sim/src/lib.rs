//! Link-level simulator of a radar-enabled adaptive-modulation ISAC system.
//!
//! A 60 GHz base station alternates between two stages every frame:
//!
//! 1. **Sensing** — a 768-sample Golay preamble is transmitted
//!    omnidirectionally; the echo data cube (antenna x pulse x fast time) is
//!    compressed with a matched filter and Fourier-processed to estimate the
//!    mobile user's range, radial velocity and azimuth.
//! 2. **Communication** — a beamformed OFDM downlink is steered toward the
//!    estimated azimuth, and the modulation order (BPSK/QPSK/16-QAM/64-QAM)
//!    is switched from the estimated range through a free-space SNR model.
//!
//! The crate is primarily a library; see the `examples/` directory for one
//! runnable program per capability and the thin `isac-sim` binary for the
//! `run`/`compare`/`selftest` workflow that persists per-frame CSV records,
//! JSON summaries and SVG plots.

pub mod channel;
pub mod config;
mod dsp;
pub mod error;
pub mod golay;
pub mod link_adapt;
pub mod metrics;
pub mod modulation;
pub mod ofdm;
pub mod output;
pub mod radar;
pub mod receiver;
pub mod seeds;
pub mod selftest;
pub mod sim;
pub mod trajectory;

pub use config::{PolicyMode, RunConfig};
pub use error::SimError;
pub use golay::{GolayPair, PreambleWaveform};
pub use link_adapt::{LinkBudget, McsPolicy};
pub use metrics::{FrameRecord, TrajectoryReport};
pub use modulation::ModScheme;
pub use radar::{DataCube, Detection, RadarConfig};
pub use trajectory::{SceneConfig, TargetState, TrajectoryKind};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, SimError>;
