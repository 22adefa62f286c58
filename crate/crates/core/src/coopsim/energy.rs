use super::config::{SystemConfig, SystemKind};
use crate::error::Result;

/// Energy spent per transmission period and per delivered information bit.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyLedger {
    pub system: SystemKind,
    pub slots_per_period: usize,
    pub bits_per_period: u32,
    /// Energy of each slot's frame in joules (`P * SF * T_c * E{x^2}`).
    pub slot_energies: Vec<f64>,
    pub period_energy: f64,
    /// Slot frames spent per information bit.
    pub frames_per_bit: f64,
    pub energy_per_bit: f64,
}

impl EnergyLedger {
    /// Per-slot `E_s/N0` (dB) when the period's total energy is `E_T`.
    pub fn slot_snr_db(&self, et_n0_db: f64) -> f64 {
        et_n0_db - 10.0 * (self.slots_per_period as f64).log10()
    }

    /// Factor applied to every slot's power so the period total equals `target_period_energy`.
    pub fn power_scale_for(&self, target_period_energy: f64) -> f64 {
        target_period_energy / self.period_energy
    }
}

pub fn total_energy_accounting(cfg: &SystemConfig) -> Result<EnergyLedger> {
    let slot = cfg.slot_frame()?;
    let frame_energy = |power: f64| power * slot.sf() as f64 * slot.chip_time() * 0.5;
    let slot_energies = match cfg.system {
        SystemKind::CimSrDcskCc => vec![frame_energy(cfg.p_s), frame_energy(cfg.p_r)],
        _ => vec![frame_energy(cfg.p_s), frame_energy(cfg.p_r), frame_energy(cfg.p_r)],
    };
    let bits_per_period = cfg.index_bits() + 1;
    let period_energy: f64 = slot_energies.iter().sum();
    Ok(EnergyLedger {
        system: cfg.system,
        slots_per_period: slot_energies.len(),
        bits_per_period,
        frames_per_bit: slot_energies.len() as f64 / f64::from(bits_per_period),
        energy_per_bit: period_energy / f64::from(bits_per_period),
        slot_energies,
        period_energy,
    })
}
