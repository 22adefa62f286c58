//! Correlation receivers: the SR-DCSK metric, CIM branch metrics, index
//! detection and equal-gain combining.

use crate::error::{Error, Result};
use crate::walsh::WalshMatrix;
use crate::waveform::FrameParams;

/// Outputs of the `N` detector branches for one received relay frame.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchMetrics {
    /// `Z_1..Z_N`.
    pub z: Vec<f64>,
    /// `c_n = sum_k y_k y_{k + nU}` for `n = 1..N`.
    pub segment_correlations: Vec<f64>,
}

/// Destination decision for one symbol stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub b_hat: i8,
    pub a_hat: usize,
    pub z_sd: f64,
    pub z_rd: f64,
    pub z_egc: f64,
}

impl Decision {
    pub fn combine(z_sd: f64, bm: &BranchMetrics) -> Self {
        let a_hat = detect_index(bm);
        let z_rd = bm.z[a_hat - 1];
        Self { b_hat: egc_decide(z_sd, z_rd), a_hat, z_sd, z_rd, z_egc: 0.5 * (z_sd + z_rd) }
    }
}

fn check_len(y: &[f64], p: &FrameParams) -> Result<()> {
    if y.len() != p.sf() {
        return Err(Error::LengthMismatch { expected: p.sf(), actual: y.len() });
    }
    Ok(())
}

/// Correlates the reference segment against each of the `N` replicas.
pub fn segment_correlations(y: &[f64], p: &FrameParams) -> Result<Vec<f64>> {
    check_len(y, p)?;
    let u = p.u();
    let (reference, info) = y.split_at(u);
    Ok(info
        .chunks_exact(u)
        .map(|seg| reference.iter().zip(seg).map(|(a, b)| a * b).sum())
        .collect())
}

/// SR-DCSK decision metric: the sum of all segment correlations.
pub fn correlate_srdcsk(y: &[f64], p: &FrameParams) -> Result<f64> {
    Ok(segment_correlations(y, p)?.iter().sum())
}

/// All `N` branch outputs, computed as a Walsh transform of the segment correlations.
pub fn branch_metrics(y: &[f64], w: &WalshMatrix, p: &FrameParams) -> Result<BranchMetrics> {
    if w.order() != p.n() {
        return Err(Error::LengthMismatch { expected: p.n(), actual: w.order() });
    }
    let segment_correlations = segment_correlations(y, p)?;
    let z = w.transform(&segment_correlations);
    Ok(BranchMetrics { z, segment_correlations })
}

/// `argmax_m |Z_m|` (1-based); ties go to the smallest index.
pub fn detect_index(bm: &BranchMetrics) -> usize {
    let mut best = 0;
    let mut best_abs = f64::NEG_INFINITY;
    for (m, z) in bm.z.iter().enumerate() {
        if z.abs() > best_abs {
            best = m;
            best_abs = z.abs();
        }
    }
    best + 1
}

#[inline]
fn sign_decision(metric: f64) -> i8 {
    if metric > 0.0 {
        1
    } else {
        -1
    }
}

pub fn egc_decide(z_sd: f64, z_rd: f64) -> i8 {
    sign_decision(0.5 * (z_sd + z_rd))
}

pub fn decide_relay_symbol(z_sr: f64) -> i8 {
    sign_decision(z_sr)
}
