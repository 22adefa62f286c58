//! Normalized throughput relative to the proposed system's period.

use crate::coopsim::SystemKind;
use crate::error::{Error, Result};
use crate::waveform::FrameParams;

/// How the DCSK-CC slot duration is tied to the proposed frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DurationConvention {
    /// DCSK-CC slots last `2β` chips with `β` taken from the proposed frame.
    #[default]
    Printed,
    /// Every system sends slots of the same spreading factor.
    NativeFrames,
}

/// Period duration (seconds) needed to deliver `n_p` streams.
pub fn period_duration(system: SystemKind, p: &FrameParams, n_p: usize, convention: DurationConvention) -> f64 {
    let chips = (p.u() + p.beta()) as f64;
    let stream = n_p as f64 * p.chip_time();
    match system {
        SystemKind::CimSrDcskCc => chips * stream * 2.0,
        SystemKind::SrDcskCc => chips * stream * 3.0,
        SystemKind::DcskCc => match convention {
            DurationConvention::Printed => 2.0 * p.beta() as f64 * stream * 3.0,
            DurationConvention::NativeFrames => p.sf() as f64 * stream * 3.0,
        },
    }
}

/// `(1 - P_sys)^{N_p} T / T_t`, where `p` is the proposed system's frame.
pub fn normalized_throughput(
    system: SystemKind,
    p: &FrameParams,
    n_p: usize,
    p_sys: f64,
    convention: DurationConvention,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_sys) {
        return Err(Error::ProbabilityRange(p_sys));
    }
    if n_p == 0 {
        return Err(Error::InvalidRequest("n_p must be >= 1".into()));
    }
    let reference = period_duration(SystemKind::CimSrDcskCc, p, n_p, convention);
    let own = period_duration(system, p, n_p, convention);
    let exponent = i32::try_from(n_p).map_err(|_| Error::InvalidRequest("n_p too large".into()))?;
    Ok((1.0 - p_sys).powi(exponent) * reference / own)
}
