//! Task-oriented hybrid beamforming for wideband OFDM dual-function
//! radar-communication transmitters.
//!
//! A consensus ADMM designs one shared analog beamformer and one digital
//! beamformer per subcarrier. It minimizes a beampattern ratio (AISMMR
//! for scan/detect, APSIMR for tracking) under per-user rate floors, a
//! per-subcarrier power budget and unit-modulus phase shifters.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baseline;
pub mod cadmm;
pub mod config;
pub mod error;
pub mod metrics;
pub mod model;
pub mod report;
pub mod roots;
pub mod subsolvers;

#[cfg(any(test, feature = "oracle"))]
pub mod oracle;
#[cfg(any(test, feature = "oracle"))]
pub mod testutil;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub use cadmm::{run, RunOutput, RunTrace, Termination};
pub use config::{ScenarioConfig, Task};
pub use error::{HbfError, Result};
pub use metrics::{CombinerSet, HybridBeamformer};
pub use model::{generate_channel, ChannelSet, Geometry};
