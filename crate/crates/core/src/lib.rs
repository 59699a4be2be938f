//! Event-camera UAV detection with a spiking convolutional network.
//!
//! The crate is organised by pipeline stage:
//!
//! - [`event`]: address-events, EVT-CSV / EVT-BIN streams, integration
//!   windows and timestamp-embedded frames.
//! - [`sim`]: conversion of intensity video into simulated event streams.
//! - [`net`]: the spiking network (Gabor first layer, integrate-and-fire
//!   convolution, earliest-spike pooling, pre-emptive thresholding).
//! - [`train`]: winner-takes-all selection and layer-wise STDP training.
//! - [`eval`]: detection, confusion matrices, noise injection and sweeps,
//!   plus the seeded synthetic corpus generator.
//! - [`cli`]: run configuration, on-disk corpora and the subcommands used
//!   by the `dvs-snn` binary.
//!
//! Runnable walkthroughs of each stage live in the crate's `examples/`
//! directory.

pub mod cli;
mod error;
pub mod eval;
pub mod event;
pub mod net;
pub mod sim;
pub mod train;

pub use error::{Error, Result};
