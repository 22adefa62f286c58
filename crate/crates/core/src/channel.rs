//! Path loss, block-fading multipath and AWGN for one directed link.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathGain {
    Fixed(f64),
    /// Rayleigh amplitude with the given mean square `E{h^2}`.
    Rayleigh { mean_square: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Path {
    pub gain: PathGain,
    /// Integer chip delay.
    pub delay: usize,
}

/// Physics of one directed link.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkModel {
    pub power: f64,
    pub distance: f64,
    pub path_loss_exp: f64,
    pub paths: Vec<Path>,
    /// One-sided noise PSD `N0`; per-sample noise variance is `N0 / 2`. Zero disables noise.
    pub noise_psd: f64,
}

impl LinkModel {
    /// A single unit-gain path with no delay.
    pub fn awgn(power: f64, distance: f64, path_loss_exp: f64, noise_psd: f64) -> Self {
        Self {
            power,
            distance,
            path_loss_exp,
            paths: vec![Path { gain: PathGain::Fixed(1.0), delay: 0 }],
            noise_psd,
        }
    }

    /// `L` Rayleigh paths of mean square `1/L` each, at the given delays.
    pub fn rayleigh_equal(
        power: f64,
        distance: f64,
        path_loss_exp: f64,
        delays: &[usize],
        noise_psd: f64,
    ) -> Self {
        let ms = 1.0 / delays.len() as f64;
        Self {
            power,
            distance,
            path_loss_exp,
            paths: delays
                .iter()
                .map(|&delay| Path { gain: PathGain::Rayleigh { mean_square: ms }, delay })
                .collect(),
            noise_psd,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.power) {
            return Err(Error::InvalidLink(format!("transmit power {} must be positive", self.power)));
        }
        if !positive(self.distance) {
            return Err(Error::InvalidLink(format!("distance {} must be positive", self.distance)));
        }
        if !self.path_loss_exp.is_finite() {
            return Err(Error::InvalidLink("path-loss exponent must be finite".into()));
        }
        if !(self.noise_psd >= 0.0 && self.noise_psd.is_finite()) {
            return Err(Error::InvalidLink(format!("noise PSD {} must be >= 0", self.noise_psd)));
        }
        let first = self.paths.first().ok_or_else(|| Error::InvalidLink("no paths".into()))?;
        if first.delay != 0 {
            return Err(Error::InvalidLink("first path delay must be 0".into()));
        }
        if self.paths.windows(2).any(|w| w[1].delay < w[0].delay) {
            return Err(Error::InvalidLink("path delays must be nondecreasing".into()));
        }
        for path in &self.paths {
            match path.gain {
                PathGain::Fixed(h) if !(h >= 0.0 && h.is_finite()) => {
                    return Err(Error::InvalidLink(format!("fixed gain {h} must be >= 0")));
                }
                PathGain::Rayleigh { mean_square } if !positive(mean_square) => {
                    return Err(Error::InvalidLink(format!("mean square {mean_square} must be > 0")));
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Large-scale amplitude factor `sqrt(P / d^alpha)`.
    pub fn amplitude(&self) -> f64 {
        (self.power / self.distance.powf(self.path_loss_exp)).sqrt()
    }

    /// `P / d^alpha`.
    pub fn link_gain(&self) -> f64 {
        self.power / self.distance.powf(self.path_loss_exp)
    }

    pub fn max_delay(&self) -> usize {
        self.paths.iter().map(|p| p.delay).max().unwrap_or(0)
    }

    pub fn is_fading(&self) -> bool {
        self.paths.iter().any(|p| matches!(p.gain, PathGain::Rayleigh { .. }))
    }

    /// `E{sum h^2}` over the path profile.
    pub fn mean_path_power(&self) -> f64 {
        self.paths
            .iter()
            .map(|p| match p.gain {
                PathGain::Fixed(h) => h * h,
                PathGain::Rayleigh { mean_square } => mean_square,
            })
            .sum()
    }
}

/// Per-frame path gains; constant across the frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub gains: Vec<f64>,
    pub delays: Vec<usize>,
}

impl ChannelRealization {
    pub fn power_sum(&self) -> f64 {
        self.gains.iter().map(|h| h * h).sum()
    }
}

pub fn draw_realization<R: Rng + ?Sized>(link: &LinkModel, rng: &mut R) -> ChannelRealization {
    let gains = link
        .paths
        .iter()
        .map(|p| match p.gain {
            PathGain::Fixed(h) => h,
            PathGain::Rayleigh { mean_square } => {
                let g: f64 = rng.sample(StandardNormal);
                let q: f64 = rng.sample(StandardNormal);
                (g * g + q * q).sqrt() * (0.5 * mean_square).sqrt()
            }
        })
        .collect();
    ChannelRealization { gains, delays: link.paths.iter().map(|p| p.delay).collect() }
}

/// Received samples `sqrt(P/d^a) sum_l h_l e[k - tau_l] + n_k`; chips before the
/// frame start are zero.
pub fn propagate<R: Rng + ?Sized>(
    frame: &[f64],
    link: &LinkModel,
    real: &ChannelRealization,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(frame.len());
    propagate_into(frame, link, real, rng, &mut out)?;
    Ok(out)
}

/// As [`propagate`], writing into a reusable buffer.
pub fn propagate_into<R: Rng + ?Sized>(
    frame: &[f64],
    link: &LinkModel,
    real: &ChannelRealization,
    rng: &mut R,
    out: &mut Vec<f64>,
) -> Result<()> {
    let len = frame.len();
    if let Some(&delay) = real.delays.iter().find(|&&d| d >= len) {
        return Err(Error::DelayTooLong { delay, frame_len: len });
    }
    out.clear();
    out.resize(len, 0.0);
    let amp = link.amplitude();
    for (&h, &tau) in real.gains.iter().zip(&real.delays) {
        let g = amp * h;
        if g == 0.0 {
            continue;
        }
        for (o, &e) in out[tau..].iter_mut().zip(frame) {
            *o += g * e;
        }
    }
    if link.noise_psd > 0.0 {
        let sd = (0.5 * link.noise_psd).sqrt();
        for o in out.iter_mut() {
            let n: f64 = rng.sample(StandardNormal);
            *o += sd * n;
        }
    }
    Ok(())
}
