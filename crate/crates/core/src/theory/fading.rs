//! Instantaneous-SNR statistics of a link and averaging over them.

use super::quadrature::{integrate, QuadratureOptions};
use crate::error::{Error, Result};

/// Distribution of a link's instantaneous SNR `γ`.
#[derive(Debug, Clone, PartialEq)]
pub enum LinkStats {
    /// Deterministic SNR (fixed gains).
    Fixed { gamma: f64 },
    /// `paths` Rayleigh paths, each with average SNR `gamma_bar`.
    RayleighEqual { gamma_bar: f64, paths: usize },
    /// Rayleigh paths with distinct per-path average SNRs.
    RayleighUnequal { gamma_bars: Vec<f64> },
}

const TAIL_MASS: f64 = 1e-14;
const DUPLICATE_GAP: f64 = 1e-6;

fn ln_factorial(k: usize) -> f64 {
    (1..=k).map(|i| (i as f64).ln()).sum()
}

impl LinkStats {
    pub fn fixed(gamma: f64) -> Result<Self> {
        let s = Self::Fixed { gamma };
        s.validate()?;
        Ok(s)
    }

    pub fn rayleigh_equal(gamma_bar: f64, paths: usize) -> Result<Self> {
        let s = Self::RayleighEqual { gamma_bar, paths };
        s.validate()?;
        Ok(s)
    }

    pub fn rayleigh_unequal(gamma_bars: Vec<f64>) -> Result<Self> {
        let s = Self::RayleighUnequal { gamma_bars };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |g: f64| g > 0.0 && g.is_finite();
        match self {
            Self::Fixed { gamma } if !ok(*gamma) => Err(Error::NonPositiveSnr(*gamma)),
            Self::RayleighEqual { gamma_bar, .. } if !ok(*gamma_bar) => Err(Error::NonPositiveSnr(*gamma_bar)),
            Self::RayleighEqual { paths: 0, .. } => Err(Error::InvalidRequest("at least one path".into())),
            Self::RayleighUnequal { gamma_bars } => {
                if gamma_bars.is_empty() {
                    return Err(Error::InvalidRequest("at least one path".into()));
                }
                if let Some(&g) = gamma_bars.iter().find(|&&g| !ok(g)) {
                    return Err(Error::NonPositiveSnr(g));
                }
                for (i, &a) in gamma_bars.iter().enumerate() {
                    for &b in &gamma_bars[i + 1..] {
                        if (a - b).abs() < DUPLICATE_GAP * a.max(b) {
                            return Err(Error::DuplicatePathPower(a, b));
                        }
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn paths(&self) -> usize {
        match self {
            Self::Fixed { .. } => 1,
            Self::RayleighEqual { paths, .. } => *paths,
            Self::RayleighUnequal { gamma_bars } => gamma_bars.len(),
        }
    }

    /// `E{γ}`.
    pub fn mean(&self) -> f64 {
        match self {
            Self::Fixed { gamma } => *gamma,
            Self::RayleighEqual { gamma_bar, paths } => gamma_bar * *paths as f64,
            Self::RayleighUnequal { gamma_bars } => gamma_bars.iter().sum(),
        }
    }

    fn unequal_weights(gamma_bars: &[f64]) -> Vec<f64> {
        gamma_bars
            .iter()
            .enumerate()
            .map(|(l, &gl)| {
                gamma_bars
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != l)
                    .map(|(_, &gj)| gl / (gl - gj))
                    .product()
            })
            .collect()
    }

    /// `Pr{γ > x}`; zero for fixed links above their SNR.
    pub fn survival(&self, x: f64) -> f64 {
        match self {
            Self::Fixed { gamma } => f64::from(u8::from(*gamma > x)),
            Self::RayleighEqual { gamma_bar, paths } => {
                let t = x / gamma_bar;
                let mut term = 1.0;
                let mut sum = 1.0;
                for k in 1..*paths {
                    term *= t / k as f64;
                    sum += term;
                }
                (-t).exp() * sum
            }
            Self::RayleighUnequal { gamma_bars } => Self::unequal_weights(gamma_bars)
                .iter()
                .zip(gamma_bars)
                .map(|(w, g)| w * (-x / g).exp())
                .sum::<f64>()
                .max(0.0),
        }
    }

    /// Upper integration limit leaving tail mass below `1e-14`.
    pub fn cutoff(&self) -> f64 {
        let scale = match self {
            Self::Fixed { gamma } => return *gamma,
            Self::RayleighEqual { gamma_bar, .. } => *gamma_bar,
            Self::RayleighUnequal { gamma_bars } => gamma_bars.iter().cloned().fold(0.0, f64::max),
        };
        let l = self.paths() as f64;
        let mut x = scale * (l + 12.0 * l.sqrt());
        while self.survival(x) > TAIL_MASS {
            x += scale;
        }
        x
    }
}

/// Density of the instantaneous SNR.
pub fn snr_pdf(gamma: f64, stats: &LinkStats) -> Result<f64> {
    stats.validate()?;
    if gamma < 0.0 || gamma.is_nan() {
        return Err(Error::InvalidRequest(format!("pdf argument {gamma} must be >= 0")));
    }
    Ok(match stats {
        LinkStats::Fixed { .. } => {
            return Err(Error::InvalidRequest("a fixed-SNR link has no density".into()))
        }
        LinkStats::RayleighEqual { gamma_bar, paths } => {
            let l = *paths;
            if gamma == 0.0 {
                if l == 1 {
                    1.0 / gamma_bar
                } else {
                    0.0
                }
            } else {
                let lf = l as f64;
                ((lf - 1.0) * gamma.ln() - gamma / gamma_bar - ln_factorial(l - 1) - lf * gamma_bar.ln())
                    .exp()
            }
        }
        LinkStats::RayleighUnequal { gamma_bars } => LinkStats::unequal_weights(gamma_bars)
            .iter()
            .zip(gamma_bars)
            .map(|(w, g)| w * (-gamma / g).exp() / g)
            .sum::<f64>()
            .max(0.0),
    })
}

/// `E{f(γ)}` over the link statistics; fixed links evaluate `f` directly.
pub fn average<F>(stats: &LinkStats, mut f: F, opts: &QuadratureOptions) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    stats.validate()?;
    if let LinkStats::Fixed { gamma } = stats {
        return f(*gamma);
    }
    let mean = stats.mean();
    let cut = stats.cutoff();
    let mut points = vec![0.0, 0.05 * mean, 0.25 * mean, mean, 3.0 * mean, cut];
    points.retain(|&x| x <= cut);
    points.sort_by(f64::total_cmp);
    points.dedup();
    let mut failure = None;
    let r = integrate(
        |g| {
            let pdf = match snr_pdf(g, stats) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    return 0.0;
                }
            };
            if pdf == 0.0 {
                return 0.0;
            }
            match f(g.max(f64::MIN_POSITIVE)) {
                Ok(v) => v * pdf,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        &points,
        opts,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(r.value),
    }
}
