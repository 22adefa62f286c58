//! System-level error probabilities: index bits, modulated bit and their mix.

use rayon::prelude::*;

use super::conditional::{
    case_kernel, clamp_probability, expected_error_bits, p_df_conditional, p_ed_conditional_with,
};
use super::fading::{average, LinkStats};
use super::TheoryOptions;
use crate::coopsim::{ChannelKind, LinkId, PerLink, SystemConfig, SystemKind};
use crate::error::{Error, Result};
use crate::waveform::FrameParams;

/// Every intermediate quantity at one operating point.
///
/// For the baselines `p_ed` and `p_cim` hold the relay's own-bit error rate,
/// and only cases 1 (relay correct) and 2 (relay wrong) occur.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryPoint {
    pub p_ed: f64,
    pub p_df: f64,
    pub p_cim: f64,
    pub p_mod: f64,
    pub p_sys: f64,
    pub case_probs: [f64; 4],
    pub case_bers: [f64; 4],
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoryCurve {
    pub system: SystemKind,
    pub m_c: u32,
    pub snr_grid_db: Vec<f64>,
    pub points: Vec<TheoryPoint>,
}

impl TheoryCurve {
    fn column(&self, f: impl Fn(&TheoryPoint) -> f64) -> Vec<f64> {
        self.points.iter().map(f).collect()
    }

    pub fn p_ed(&self) -> Vec<f64> {
        self.column(|p| p.p_ed)
    }

    pub fn p_df(&self) -> Vec<f64> {
        self.column(|p| p.p_df)
    }

    pub fn p_cim(&self) -> Vec<f64> {
        self.column(|p| p.p_cim)
    }

    pub fn p_mod(&self) -> Vec<f64> {
        self.column(|p| p.p_mod)
    }

    pub fn p_sys(&self) -> Vec<f64> {
        self.column(|p| p.p_sys)
    }
}

pub fn p_ed_average(p: &FrameParams, stats: &LinkStats) -> Result<f64> {
    p_ed_average_with(p, stats, &TheoryOptions::default())
}

pub fn p_ed_average_with(p: &FrameParams, stats: &LinkStats, opts: &TheoryOptions) -> Result<f64> {
    let v = average(stats, |g| p_ed_conditional_with(g, p, opts.kernel, &opts.conditional), &opts.average)?;
    clamp_probability(v)
}

pub fn p_df_average(p: &FrameParams, stats: &LinkStats) -> Result<f64> {
    p_df_average_with(p, stats, &TheoryOptions::default())
}

pub fn p_df_average_with(p: &FrameParams, stats: &LinkStats, opts: &TheoryOptions) -> Result<f64> {
    let v = average(stats, |g| p_df_conditional(g, p), &opts.average)?;
    clamp_probability(v)
}

/// `E{kernel(γ_sd, γ_rd)}` for one case, as two nested averages.
pub fn case_ber(
    case: usize,
    p: &FrameParams,
    sd: &LinkStats,
    rd: &LinkStats,
    opts: &TheoryOptions,
) -> Result<f64> {
    let inner = |gr: f64| average(sd, |gs| case_kernel(case, gs, gr, p), &opts.conditional);
    let v = average(rd, inner, &opts.average)?;
    clamp_probability(v)
}

/// Modulated-bit error probability with its case decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModBreakdown {
    pub p_mod: f64,
    pub p_ed: f64,
    pub p_df: f64,
    pub case_probs: [f64; 4],
    pub case_bers: [f64; 4],
}

pub fn p_mod_breakdown(
    p: &FrameParams,
    sd: &LinkStats,
    rd: &LinkStats,
    sr: &LinkStats,
    opts: &TheoryOptions,
) -> Result<ModBreakdown> {
    let p_df = p_df_average_with(p, sr, opts)?;
    let p_ed = p_ed_average_with(p, rd, opts)?;
    let case_probs = [(1.0 - p_df) * (1.0 - p_ed), p_df * (1.0 - p_ed), p_ed * (1.0 - p_df), p_ed * p_df];
    let k1 = case_ber(1, p, sd, rd, opts)?;
    let k2 = case_ber(2, p, sd, rd, opts)?;
    let k3 = case_ber(3, p, sd, rd, opts)?;
    let case_bers = [k1, k2, k3, k3];
    let raw: f64 = case_probs.iter().zip(&case_bers).map(|(a, b)| a * b).sum();
    Ok(ModBreakdown { p_mod: clamp_probability(raw)?, p_ed, p_df, case_probs, case_bers })
}

pub fn p_mod(p: &FrameParams, sd: &LinkStats, rd: &LinkStats, sr: &LinkStats) -> Result<f64> {
    Ok(p_mod_breakdown(p, sd, rd, sr, &TheoryOptions::default())?.p_mod)
}

/// Overall BER of the proposed system for the given link statistics.
pub fn p_sys(p: &FrameParams, links: &PerLink<LinkStats>) -> Result<f64> {
    Ok(proposed_point(p, links, &TheoryOptions::default())?.p_sys)
}

pub fn proposed_point(p: &FrameParams, links: &PerLink<LinkStats>, opts: &TheoryOptions) -> Result<TheoryPoint> {
    let m_c = p.m_c();
    let q = expected_error_bits(m_c)?;
    let b = p_mod_breakdown(p, &links.sd, &links.rd, &links.sr, opts)?;
    let p_cim = clamp_probability(q / f64::from(m_c) * b.p_ed)?;
    let mc = f64::from(m_c);
    let p_sys = clamp_probability((mc * p_cim + b.p_mod) / (mc + 1.0))?;
    Ok(TheoryPoint {
        p_ed: b.p_ed,
        p_df: b.p_df,
        p_cim,
        p_mod: b.p_mod,
        p_sys,
        case_probs: b.case_probs,
        case_bers: b.case_bers,
    })
}

/// Baseline cooperative systems: plain forwarding in slot 2, the relay's own bit in slot 3.
///
/// `p` is the slot frame (`N = 1` for DCSK).
pub fn baseline_point(p: &FrameParams, links: &PerLink<LinkStats>, opts: &TheoryOptions) -> Result<TheoryPoint> {
    let p_df = p_df_average_with(p, &links.sr, opts)?;
    let relay_bit = p_df_average_with(p, &links.rd, opts)?;
    let k1 = case_ber(1, p, &links.sd, &links.rd, opts)?;
    let k2 = case_ber(2, p, &links.sd, &links.rd, opts)?;
    let p_mod = clamp_probability((1.0 - p_df) * k1 + p_df * k2)?;
    Ok(TheoryPoint {
        p_ed: relay_bit,
        p_df,
        p_cim: relay_bit,
        p_mod,
        p_sys: clamp_probability(0.5 * (relay_bit + p_mod))?,
        case_probs: [1.0 - p_df, p_df, 0.0, 0.0],
        case_bers: [k1, k2, 0.0, 0.0],
    })
}

/// SNR statistics of one link at the configuration's current noise level.
pub fn link_stats(cfg: &SystemConfig, id: LinkId) -> Result<LinkStats> {
    let link = cfg.link(id);
    let n0 = link.noise_psd;
    if !(n0 > 0.0) {
        return Err(Error::InvalidConfig("theory needs a positive noise PSD".into()));
    }
    let scale = link.link_gain() * cfg.symbol_energy() / n0;
    match cfg.channel.get(id) {
        ChannelKind::Awgn => LinkStats::fixed(scale * link.mean_path_power()),
        ChannelKind::RayleighEqual { delays } => {
            LinkStats::rayleigh_equal(scale / delays.len() as f64, delays.len())
        }
        ChannelKind::RayleighUnequal { mean_squares, .. } => {
            LinkStats::rayleigh_unequal(mean_squares.iter().map(|m| m * scale).collect())
        }
    }
}

pub fn link_set(cfg: &SystemConfig) -> Result<PerLink<LinkStats>> {
    Ok(PerLink {
        sr: link_stats(cfg, LinkId::SourceRelay)?,
        rd: link_stats(cfg, LinkId::RelayDestination)?,
        sd: link_stats(cfg, LinkId::SourceDestination)?,
    })
}

/// Theory at the configuration's current noise level.
pub fn evaluate(cfg: &SystemConfig, opts: &TheoryOptions) -> Result<TheoryPoint> {
    cfg.validate()?;
    let links = link_set(cfg)?;
    let p = cfg.slot_frame()?;
    match cfg.system {
        SystemKind::CimSrDcskCc => proposed_point(&p, &links, opts),
        SystemKind::SrDcskCc | SystemKind::DcskCc => baseline_point(&p, &links, opts),
    }
}

/// Theory over a per-slot `E_s/N0` grid in dB.
pub fn theory_curve(cfg: &SystemConfig, snr_grid_db: &[f64], opts: &TheoryOptions) -> Result<TheoryCurve> {
    if snr_grid_db.is_empty() {
        return Err(Error::InvalidRequest("empty SNR grid".into()));
    }
    let points = snr_grid_db
        .par_iter()
        .map(|&snr| evaluate(&cfg.clone().with_es_n0_db(snr), opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(TheoryCurve {
        system: cfg.system,
        m_c: cfg.index_bits(),
        snr_grid_db: snr_grid_db.to_vec(),
        points,
    })
}
