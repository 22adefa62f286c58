//! Chaos-based cooperative link simulation with code index modulation.
//!
//! The source broadcasts a short-reference DCSK frame; a decode-and-forward
//! relay re-encodes the decided bit with a Walsh row chosen by its own index
//! bits, and the destination recovers both with equal-gain combining.

pub mod channel;
pub mod chaos;
pub mod coopsim;
pub mod detection;
mod error;
pub mod theory;
pub mod walsh;
pub mod waveform;

pub use error::{Error, Result};
