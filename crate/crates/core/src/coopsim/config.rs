use std::fmt;
use std::str::FromStr;

use crate::channel::{LinkModel, Path, PathGain};
use crate::error::{Error, Result};
use crate::waveform::FrameParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SystemKind {
    CimSrDcskCc,
    SrDcskCc,
    DcskCc,
}

impl SystemKind {
    pub const ALL: [SystemKind; 3] = [Self::CimSrDcskCc, Self::SrDcskCc, Self::DcskCc];

    pub fn name(&self) -> &'static str {
        match self {
            Self::CimSrDcskCc => "cim-sr-dcsk-cc",
            Self::SrDcskCc => "sr-dcsk-cc",
            Self::DcskCc => "dcsk-cc",
        }
    }

    pub fn is_baseline(&self) -> bool {
        !matches!(self, Self::CimSrDcskCc)
    }

    /// Time slots per transmission period.
    pub fn slots(&self) -> usize {
        if self.is_baseline() {
            3
        } else {
            2
        }
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SystemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown system kind `{s}`")))
    }
}

/// Small-scale fading profile applied to a link.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelKind {
    Awgn,
    /// Equal mean-square Rayleigh paths (`1/L` each) at the given chip delays.
    RayleighEqual { delays: Vec<usize> },
    /// Rayleigh paths with individual mean squares.
    RayleighUnequal { mean_squares: Vec<f64>, delays: Vec<usize> },
}

impl ChannelKind {
    /// Three equal-power paths at 0, 1 and 2 chips.
    pub fn rayleigh_three_path() -> Self {
        Self::RayleighEqual { delays: vec![0, 1, 2] }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Awgn => "awgn",
            Self::RayleighEqual { .. } => "rayleigh-equal",
            Self::RayleighUnequal { .. } => "rayleigh-unequal",
        }
    }

    pub fn paths(&self) -> Vec<Path> {
        match self {
            Self::Awgn => vec![Path { gain: PathGain::Fixed(1.0), delay: 0 }],
            Self::RayleighEqual { delays } => {
                let ms = 1.0 / delays.len() as f64;
                delays
                    .iter()
                    .map(|&delay| Path { gain: PathGain::Rayleigh { mean_square: ms }, delay })
                    .collect()
            }
            Self::RayleighUnequal { mean_squares, delays } => mean_squares
                .iter()
                .zip(delays)
                .map(|(&mean_square, &delay)| Path { gain: PathGain::Rayleigh { mean_square }, delay })
                .collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Self::Awgn => Ok(()),
            Self::RayleighEqual { delays } if delays.is_empty() => {
                Err(Error::InvalidConfig("rayleigh profile needs at least one path".into()))
            }
            Self::RayleighUnequal { mean_squares, delays } if mean_squares.len() != delays.len() => {
                Err(Error::InvalidConfig(format!(
                    "{} mean squares for {} delays",
                    mean_squares.len(),
                    delays.len()
                )))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkId {
    SourceRelay,
    RelayDestination,
    SourceDestination,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerLink<T> {
    pub sr: T,
    pub rd: T,
    pub sd: T,
}

impl<T: Clone> PerLink<T> {
    pub fn splat(value: T) -> Self {
        Self { sr: value.clone(), rd: value.clone(), sd: value }
    }
}

impl<T> PerLink<T> {
    pub fn get(&self, link: LinkId) -> &T {
        match link {
            LinkId::SourceRelay => &self.sr,
            LinkId::RelayDestination => &self.rd,
            LinkId::SourceDestination => &self.sd,
        }
    }
}

/// Node distances in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub d_sr: f64,
    pub d_rd: f64,
    pub d_sd: f64,
}

impl Default for Geometry {
    fn default() -> Self {
        Self { d_sr: 1.0, d_rd: 1.0, d_sd: 2.0 }
    }
}

/// Everything needed to simulate or analyse one cooperative system.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Geometry of the proposed system's frame; baselines derive their slot frame from it.
    pub frame: FrameParams,
    pub geometry: Geometry,
    pub p_s: f64,
    pub p_r: f64,
    pub path_loss_exp: f64,
    /// Reference noise PSD `N0`; each link uses `noise_psd * noise_scale`.
    pub noise_psd: f64,
    pub noise_scale: PerLink<f64>,
    pub channel: PerLink<ChannelKind>,
    pub n_p: usize,
    pub system: SystemKind,
    /// Rescale each chaotic reference to its ensemble energy.
    pub renormalize_chaos: bool,
}

impl SystemConfig {
    /// Unit powers, path-loss exponent 2, the 1 m / 1 m / 2 m geometry and `SF = 510`.
    pub fn standard(system: SystemKind, m_c: u32, channel: ChannelKind) -> Result<Self> {
        Ok(Self {
            frame: FrameParams::for_spreading_factor(510, m_c)?,
            geometry: Geometry::default(),
            p_s: 1.0,
            p_r: 1.0,
            path_loss_exp: 2.0,
            noise_psd: 1.0,
            noise_scale: PerLink::splat(1.0),
            channel: PerLink::splat(channel),
            n_p: 1,
            system,
            renormalize_chaos: false,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")))
            }
        };
        positive("d_sr", self.geometry.d_sr)?;
        positive("d_rd", self.geometry.d_rd)?;
        positive("d_sd", self.geometry.d_sd)?;
        positive("p_s", self.p_s)?;
        positive("p_r", self.p_r)?;
        positive("noise_psd", self.noise_psd)?;
        positive("noise_scale.sr", self.noise_scale.sr)?;
        positive("noise_scale.rd", self.noise_scale.rd)?;
        positive("noise_scale.sd", self.noise_scale.sd)?;
        if !self.path_loss_exp.is_finite() {
            return Err(Error::InvalidConfig("path-loss exponent must be finite".into()));
        }
        if self.n_p == 0 {
            return Err(Error::InvalidConfig("n_p must be >= 1".into()));
        }
        if self.system == SystemKind::CimSrDcskCc && self.frame.n() < 2 {
            return Err(Error::InvalidConfig("index modulation needs N >= 2".into()));
        }
        let slot = self.slot_frame()?;
        for id in [LinkId::SourceRelay, LinkId::RelayDestination, LinkId::SourceDestination] {
            self.channel.get(id).validate()?;
            let link = self.link(id);
            link.validate()?;
            if link.max_delay() >= slot.sf() {
                return Err(Error::DelayTooLong { delay: link.max_delay(), frame_len: slot.sf() });
            }
        }
        Ok(())
    }

    /// Frame used in every slot of this system.
    ///
    /// DCSK-CC sends a conventional DCSK frame of the same spreading factor:
    /// reference and information halves of `SF / 2` chips.
    pub fn slot_frame(&self) -> Result<FrameParams> {
        match self.system {
            SystemKind::CimSrDcskCc | SystemKind::SrDcskCc => Ok(self.frame),
            SystemKind::DcskCc => {
                FrameParams::with_chip_time(self.frame.sf() / 2, 1, self.frame.chip_time())
            }
        }
    }

    /// Bits per stream in the index (relay-own) class.
    pub fn index_bits(&self) -> u32 {
        if self.system.is_baseline() {
            1
        } else {
            self.frame.m_c()
        }
    }

    pub fn distance(&self, id: LinkId) -> f64 {
        match id {
            LinkId::SourceRelay => self.geometry.d_sr,
            LinkId::RelayDestination => self.geometry.d_rd,
            LinkId::SourceDestination => self.geometry.d_sd,
        }
    }

    pub fn transmit_power(&self, id: LinkId) -> f64 {
        match id {
            LinkId::RelayDestination => self.p_r,
            _ => self.p_s,
        }
    }

    pub fn link_noise_psd(&self, id: LinkId) -> f64 {
        self.noise_psd * self.noise_scale.get(id)
    }

    pub fn link(&self, id: LinkId) -> LinkModel {
        LinkModel {
            power: self.transmit_power(id),
            distance: self.distance(id),
            path_loss_exp: self.path_loss_exp,
            paths: self.channel.get(id).paths(),
            noise_psd: self.link_noise_psd(id),
        }
    }

    /// Nominal energy of one slot frame, `SF / 2`.
    pub fn symbol_energy(&self) -> f64 {
        self.slot_frame().map(|f| f.symbol_energy()).unwrap_or_else(|_| self.frame.symbol_energy())
    }

    /// Sets the reference `N0` so the slot frame has the requested `E_s/N0`.
    pub fn with_es_n0_db(mut self, es_n0_db: f64) -> Self {
        self.noise_psd = self.symbol_energy() / 10f64.powf(es_n0_db / 10.0);
        self
    }

    /// Relay placed on the S-D line: `d_rd = d_sd - d_sr`.
    pub fn with_relay_on_line(mut self, d_sr: f64) -> Self {
        self.geometry.d_sr = d_sr;
        self.geometry.d_rd = self.geometry.d_sd - d_sr;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_config_is_valid() {
        for kind in SystemKind::ALL {
            let cfg = SystemConfig::standard(kind, 1, ChannelKind::rayleigh_three_path()).unwrap();
            cfg.validate().unwrap();
        }
    }

    #[test]
    fn dcsk_slot_frame_halves_sf() {
        let cfg = SystemConfig::standard(SystemKind::DcskCc, 1, ChannelKind::Awgn).unwrap();
        let f = cfg.slot_frame().unwrap();
        assert_eq!((f.u(), f.beta(), f.sf()), (255, 255, 510));
        assert_eq!(cfg.symbol_energy(), 255.0);
    }

    #[test]
    fn snr_sets_noise() {
        let cfg = SystemConfig::standard(SystemKind::CimSrDcskCc, 2, ChannelKind::Awgn)
            .unwrap()
            .with_es_n0_db(10.0);
        assert!((cfg.noise_psd - 25.5).abs() < 1e-12);
        assert!((cfg.link(LinkId::SourceDestination).link_gain() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_values() {
        let mut cfg = SystemConfig::standard(SystemKind::CimSrDcskCc, 1, ChannelKind::Awgn).unwrap();
        cfg.n_p = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = SystemConfig::standard(SystemKind::CimSrDcskCc, 1, ChannelKind::Awgn).unwrap();
        cfg.geometry.d_sd = -1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = SystemConfig::standard(SystemKind::CimSrDcskCc, 1, ChannelKind::Awgn).unwrap();
        cfg.channel.rd = ChannelKind::RayleighUnequal { mean_squares: vec![0.5], delays: vec![0, 1] };
        assert!(cfg.validate().is_err());
        assert!("dcsk".parse::<SystemKind>().is_err());
        assert_eq!("sr-dcsk-cc".parse::<SystemKind>().unwrap(), SystemKind::SrDcskCc);
    }
}
