//! Error probabilities conditioned on instantaneous link SNRs.

use std::f64::consts::{PI, SQRT_2};

use libm::{erf, erfc};

use super::quadrature::{integrate, QuadratureOptions};
use crate::error::{Error, Result};
use crate::waveform::FrameParams;

/// Density used for the matched Walsh branch `|Z_m̂|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WalshKernel {
    /// Folded normal built from the underlying Gaussian `(μ1, σ1²)`.
    #[default]
    Exact,
    /// Gaussian pair centred on `±Ψ` with variance `η`, as printed.
    PrintedMoments,
}

/// Branch-metric moments in units of `sqrt(sum h² E_s N0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldedNormalStats {
    pub mu1: f64,
    pub mu2: f64,
    pub sigma1_sq: f64,
    pub sigma2_sq: f64,
    pub mu_abs: f64,
    pub sigma_abs_sq: f64,
    pub psi: f64,
    pub lambda: f64,
    pub eta: f64,
}

fn require_positive_snr(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveSnr(gamma))
    }
}

/// Average number of wrong index bits per wrong Walsh decision, `Q`.
pub fn expected_error_bits(m_c: u32) -> Result<f64> {
    if m_c == 0 || m_c > 30 {
        return Err(Error::InvalidRequest(format!("m_c = {m_c} must be in 1..=30")));
    }
    let n = (1u64 << m_c) as f64;
    let mut binom = 1.0;
    let mut sum = 0.0;
    for i in 1..=m_c {
        binom = binom * f64::from(m_c - i + 1) / f64::from(i);
        sum += f64::from(i) * binom;
    }
    Ok(sum / (n - 1.0))
}

/// Moments of the R-D branch metrics; `link_gain` is `P_R / d_rd^α`.
pub fn folded_stats(gamma_rd: f64, p: &FrameParams, link_gain: f64) -> Result<FoldedNormalStats> {
    require_positive_snr(gamma_rd)?;
    if !(link_gain > 0.0 && link_gain.is_finite()) {
        return Err(Error::InvalidRequest(format!("link gain {link_gain} must be positive")));
    }
    let n = p.n() as f64;
    let u = p.u() as f64;
    let g = gamma_rd;
    let a = link_gain;

    let mu1 = n / (1.0 + n) * (a * g).sqrt();
    let sigma1_sq = a * (n / 2.0 + n * u / (4.0 * g));
    let lambda = n / (2.0 * (1.0 + n)) + n * u / (4.0 * g);
    let sigma2_sq = a * lambda;

    let sigma1 = sigma1_sq.sqrt();
    let mu_abs = sigma1 * (2.0 / PI).sqrt() * (-mu1 * mu1 / (2.0 * sigma1_sq)).exp()
        + mu1 * erf(mu1 / (SQRT_2 * sigma1));
    let sigma_abs_sq = (mu1 * mu1 + sigma1_sq - mu_abs * mu_abs).max(0.0);

    let e = 2.0 * n * g * g / ((1.0 + n).powi(2) * (2.0 * g + u));
    let psi = ((a * n + n * u / (2.0 * g)) / PI).sqrt() * (-e).exp()
        - n / (1.0 + n) * (a * g).sqrt() * erf(-e.sqrt());
    let eta = a * (n * n * g / (1.0 + n).powi(2) + n / 2.0 + n * u / (4.0 * g)) - psi * psi;

    Ok(FoldedNormalStats { mu1, mu2: 0.0, sigma1_sq, sigma2_sq, mu_abs, sigma_abs_sq, psi, lambda, eta })
}

/// `1 - erf(z)^k`, evaluated through logarithms so large `k` and tiny `erfc` stay accurate.
pub(crate) fn one_minus_erf_pow(z: f64, k: u32) -> f64 {
    if k == 0 {
        return 0.0;
    }
    if z <= 0.0 {
        return 1.0;
    }
    let c = erfc(z);
    if c >= 1.0 {
        return 1.0;
    }
    -(f64::from(k) * (-c).ln_1p()).exp_m1()
}

/// Clamps a quadrature result to `[0, 1]`, rejecting excursions above `1e-9`.
pub(crate) fn clamp_probability(raw: f64) -> Result<f64> {
    if !(-1e-9..=1.0 + 1e-9).contains(&raw) {
        return Err(Error::ProbabilityRange(raw));
    }
    let clamped = raw.clamp(0.0, 1.0);
    if clamped != raw {
        log::trace!("clamped probability {raw:e} to {clamped}");
    }
    Ok(clamped)
}

/// Probability that Walsh-index detection at D fails, given `γ_rd`.
pub fn p_ed_conditional(gamma_rd: f64, p: &FrameParams) -> Result<f64> {
    p_ed_conditional_with(gamma_rd, p, WalshKernel::Exact, &QuadratureOptions::default())
}

pub fn p_ed_conditional_with(
    gamma_rd: f64,
    p: &FrameParams,
    kernel: WalshKernel,
    opts: &QuadratureOptions,
) -> Result<f64> {
    if p.n() < 2 {
        return Err(Error::InvalidRequest("Walsh detection needs N >= 2".into()));
    }
    let st = folded_stats(gamma_rd, p, 1.0)?;
    let (centre, var) = match kernel {
        WalshKernel::Exact => (st.mu1, st.sigma1_sq),
        WalshKernel::PrintedMoments => (st.psi, st.eta),
    };
    if !(var > 0.0) {
        return Err(Error::InvalidRequest(format!("kernel variance {var} is not positive")));
    }
    let sd = var.sqrt();
    let k = (p.n() - 1) as u32;
    let scale = 1.0 / (SQRT_2 * st.sigma2_sq.sqrt());
    let norm = 1.0 / (sd * (2.0 * PI).sqrt());
    let f = |s: f64| {
        let dm = (s - centre) / sd;
        let dp = (s + centre) / sd;
        one_minus_erf_pow(s * scale, k) * norm * ((-0.5 * dm * dm).exp() + (-0.5 * dp * dp).exp())
    };
    let hi = centre + 40.0 * sd;
    let mut points = vec![0.0, (centre - 8.0 * sd).max(0.0), centre, centre + 8.0 * sd, hi];
    points.dedup();
    let r = integrate(f, &points, opts)?;
    clamp_probability(r.value)
}

/// Probability that the relay's SR-DCSK decision is wrong, given `γ_sr`.
pub fn p_df_conditional(gamma_sr: f64, p: &FrameParams) -> Result<f64> {
    require_positive_snr(gamma_sr)?;
    let n = p.n() as f64;
    let u = p.u() as f64;
    let g = gamma_sr;
    let inv = (1.0 + n).powi(2) / (n * g) + (1.0 + n).powi(2) * u / (2.0 * n * g * g);
    Ok(0.5 * erfc(inv.powf(-0.5)))
}

/// Conditional modulated-bit error in each relay/index case (cases 3 and 4 coincide).
pub fn case_kernel(case: usize, gamma_sd: f64, gamma_rd: f64, p: &FrameParams) -> Result<f64> {
    let n = p.n() as f64;
    let u = p.u() as f64;
    let (gs, gr) = (gamma_sd.max(0.0), gamma_rd.max(0.0));
    let arg = match case {
        1 => n.sqrt() * (gs + gr) / ((1.0 + n) * (gs + gr + u).sqrt()),
        2 => n.sqrt() * (gs - gr) / ((1.0 + n) * (gs + gr + u).sqrt()),
        3 | 4 => n.sqrt() * gs / ((1.0 + n) * (gs + gr / (1.0 + n) + u).sqrt()),
        _ => return Err(Error::InvalidRequest(format!("case {case} must be in 1..=4"))),
    };
    Ok(0.5 * erfc(arg))
}
