//! End-to-end cooperative protocol simulation and Monte-Carlo BER estimation.

mod config;
mod energy;
mod frame;
mod montecarlo;

pub use config::{ChannelKind, Geometry, LinkId, PerLink, SystemConfig, SystemKind};
pub use energy::{total_energy_accounting, EnergyLedger};
pub use frame::{simulate_frame, simulate_frame_baseline, FrameOutcome, FrameSimulator, RelayFault};
pub use montecarlo::{
    run_monte_carlo, run_monte_carlo_point, run_monte_carlo_with, BerEstimate, ClassCounts, ClassRates, StopClass,
    StopRule,
};
