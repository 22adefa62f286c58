//! Flat `key = value` experiment configuration.
//!
//! See `docs/config.md` for the grammar and every key's default.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use cimsr::coopsim::{ChannelKind, Geometry, StopClass, StopRule, SystemConfig, SystemKind};
use cimsr::theory::{DurationConvention, WalshKernel};
use cimsr::waveform::FrameParams;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("line {line}, column {column}: unknown key `{key}`")]
    UnknownKey { key: String, line: usize, column: usize },
    #[error("line {line}, column {column}: bad value for `{key}`: {message}")]
    BadValue { key: String, line: usize, column: usize, message: String },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

const KNOWN_KEYS: &[&str] = &[
    "experiment.kind",
    "experiment.name",
    "experiment.systems",
    "frame.sf",
    "frame.m_c",
    "frame.chip_time",
    "link.p_s",
    "link.p_r",
    "link.alpha",
    "geometry.d_sr",
    "geometry.d_rd",
    "geometry.d_sd",
    "channel.kind",
    "channel.delays",
    "channel.mean_squares",
    "sweep.start",
    "sweep.stop",
    "sweep.step",
    "sweep.axis",
    "sweep.snr_db",
    "sim.enabled",
    "sim.seed",
    "sim.min_errors",
    "sim.max_frames",
    "sim.stop_class",
    "sim.batch_frames",
    "sim.workers",
    "sim.n_p",
    "sim.renormalize_chaos",
    "theory.kernel",
    "throughput.convention",
    "output.dir",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    BerVsSnr,
    BerVsRelayDistance,
    ThroughputVsSnr,
    SimTheoryCompare,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::BerVsSnr => "ber-vs-snr",
            Self::BerVsRelayDistance => "ber-vs-relay-distance",
            Self::ThroughputVsSnr => "throughput-vs-snr",
            Self::SimTheoryCompare => "sim-theory-compare",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        [Self::BerVsSnr, Self::BerVsRelayDistance, Self::ThroughputVsSnr, Self::SimTheoryCompare]
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown experiment kind `{s}`"))
    }
}

/// What the swept SNR measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnrAxis {
    /// Per-slot symbol energy `E_s/N0`.
    SymbolEnergy,
    /// Total energy of one transmission period `E_T/N0`.
    TotalEnergy,
}

impl SnrAxis {
    pub fn name(&self) -> &'static str {
        match self {
            Self::SymbolEnergy => "es",
            Self::TotalEnergy => "et",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    pub axis: SnrAxis,
    /// Fixed SNR (dB) of relay-distance sweeps.
    pub snr_db: f64,
}

impl Sweep {
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| round9(self.start + i as f64 * self.step)).collect()
    }
}

fn round9(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

/// Fully resolved experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub name: String,
    pub systems: Vec<SystemKind>,
    pub m_c: Vec<u32>,
    pub sf: usize,
    pub chip_time: f64,
    pub p_s: f64,
    pub p_r: f64,
    pub alpha: f64,
    pub geometry: Geometry,
    pub channel: ChannelKind,
    pub sweep: Sweep,
    pub simulate: bool,
    pub seed: u64,
    pub stop: StopRule,
    pub workers: Option<usize>,
    pub n_p: usize,
    pub renormalize_chaos: bool,
    pub kernel: WalshKernel,
    pub convention: DurationConvention,
    pub out_dir: PathBuf,
}

impl ExperimentSpec {
    /// System configuration of one curve, before any SNR is applied.
    pub fn system_config(&self, system: SystemKind, m_c: u32) -> Result<SystemConfig, ConfigError> {
        let invalid = |e: cimsr::Error| ConfigError::Invalid(e.to_string());
        let mut cfg = SystemConfig::standard(system, m_c, self.channel.clone()).map_err(invalid)?;
        let f = FrameParams::for_spreading_factor(self.sf, m_c).map_err(invalid)?;
        cfg.frame = FrameParams::with_chip_time(f.u(), f.n(), self.chip_time).map_err(invalid)?;
        cfg.geometry = self.geometry;
        cfg.p_s = self.p_s;
        cfg.p_r = self.p_r;
        cfg.path_loss_exp = self.alpha;
        cfg.n_p = self.n_p;
        cfg.renormalize_chaos = self.renormalize_chaos;
        cfg.validate().map_err(invalid)?;
        Ok(cfg)
    }

    /// Checks every curve at every sweep point.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.systems.is_empty() {
            return Err(ConfigError::Invalid("experiment.systems is empty".into()));
        }
        if self.m_c.is_empty() {
            return Err(ConfigError::Invalid("frame.m_c is empty".into()));
        }
        if !(self.sweep.step > 0.0) {
            return Err(ConfigError::Invalid("sweep.step must be > 0".into()));
        }
        if self.sweep.stop < self.sweep.start {
            return Err(ConfigError::Invalid("sweep.stop must be >= sweep.start".into()));
        }
        self.stop.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        for &system in &self.systems {
            for &m_c in &self.m_c {
                let cfg = self.system_config(system, m_c)?;
                if cfg.frame.sf() != self.sf && system == self.systems[0] {
                    log::warn!("SF {} is not a multiple of {}; m_c = {m_c} uses SF {}", self.sf, cfg.frame.n() + 1, cfg.frame.sf());
                }
                if self.kind == ExperimentKind::BerVsRelayDistance {
                    for d in self.sweep.points() {
                        cfg.clone()
                            .with_relay_on_line(d)
                            .validate()
                            .map_err(|e| ConfigError::Invalid(format!("d_sr = {d}: {e}")))?;
                    }
                }
            }
        }
        Ok(())
    }

    /// Resolved settings, one `key = value` per line.
    pub fn render(&self) -> String {
        let list = |v: Vec<String>| v.join(", ");
        let channel = match &self.channel {
            ChannelKind::Awgn => String::new(),
            ChannelKind::RayleighEqual { delays } => {
                format!("channel.delays = {}\n", list(delays.iter().map(|d| d.to_string()).collect()))
            }
            ChannelKind::RayleighUnequal { mean_squares, delays } => format!(
                "channel.delays = {}\nchannel.mean_squares = {}\n",
                list(delays.iter().map(|d| d.to_string()).collect()),
                list(mean_squares.iter().map(|d| d.to_string()).collect())
            ),
        };
        format!(
            "experiment.kind = {}\nexperiment.name = {}\nexperiment.systems = {}\nframe.sf = {}\nframe.m_c = {}\n\
             frame.chip_time = {}\nlink.p_s = {}\nlink.p_r = {}\nlink.alpha = {}\ngeometry.d_sr = {}\n\
             geometry.d_rd = {}\ngeometry.d_sd = {}\nchannel.kind = {}\n{channel}sweep.start = {}\nsweep.stop = {}\n\
             sweep.step = {}\nsweep.axis = {}\nsweep.snr_db = {}\nsim.enabled = {}\nsim.seed = {}\n\
             sim.min_errors = {}\nsim.max_frames = {}\nsim.stop_class = {}\nsim.batch_frames = {}\nsim.workers = {}\n\
             sim.n_p = {}\nsim.renormalize_chaos = {}\ntheory.kernel = {}\nthroughput.convention = {}\noutput.dir = {}\n",
            self.kind,
            self.name,
            list(self.systems.iter().map(|s| s.to_string()).collect()),
            self.sf,
            list(self.m_c.iter().map(|m| m.to_string()).collect()),
            self.chip_time,
            self.p_s,
            self.p_r,
            self.alpha,
            self.geometry.d_sr,
            self.geometry.d_rd,
            self.geometry.d_sd,
            self.channel.name(),
            self.sweep.start,
            self.sweep.stop,
            self.sweep.step,
            self.sweep.axis.name(),
            self.sweep.snr_db,
            self.simulate,
            self.seed,
            self.stop.min_errors,
            self.stop.max_frames,
            match self.stop.class {
                StopClass::Rarest => "rarest",
                StopClass::Total => "total",
            },
            self.stop.batch_frames,
            self.workers.map_or_else(|| "auto".to_string(), |w| w.to_string()),
            self.n_p,
            self.renormalize_chaos,
            match self.kernel {
                WalshKernel::Exact => "exact",
                WalshKernel::PrintedMoments => "printed",
            },
            match self.convention {
                DurationConvention::Printed => "printed",
                DurationConvention::NativeFrames => "native",
            },
            self.out_dir.display(),
        )
    }
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
    column: usize,
}

struct Entries {
    map: BTreeMap<String, Entry>,
}

impl Entries {
    fn parse<T: FromStr>(&self, key: &'static str) -> Result<Option<T>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        self.map
            .get(key)
            .map(|e| {
                e.value.parse::<T>().map_err(|err| ConfigError::BadValue {
                    key: key.into(),
                    line: e.line,
                    column: e.column,
                    message: err.to_string(),
                })
            })
            .transpose()
    }

    fn get<T: FromStr>(&self, key: &'static str, default: T) -> Result<T, ConfigError>
    where
        T::Err: fmt::Display,
    {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    fn list<T: FromStr>(&self, key: &'static str) -> Result<Option<Vec<T>>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        let Some(e) = self.map.get(key) else { return Ok(None) };
        e.value
            .split(',')
            .map(|item| {
                item.trim().parse::<T>().map_err(|err| ConfigError::BadValue {
                    key: key.into(),
                    line: e.line,
                    column: e.column,
                    message: format!("`{}`: {err}", item.trim()),
                })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    fn bad(&self, key: &'static str, message: impl Into<String>) -> ConfigError {
        let e = &self.map[key];
        ConfigError::BadValue { key: key.into(), line: e.line, column: e.column, message: message.into() }
    }
}

fn tokenize(text: &str) -> Result<Entries, ConfigError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let key_col = content.len() - content.trim_start().len() + 1;
        let Some(eq) = content.find('=') else {
            return Err(ConfigError::Parse { line, column: key_col, message: "expected `key = value`".into() });
        };
        let key = content[..eq].trim();
        if key.is_empty() {
            return Err(ConfigError::Parse { line, column: key_col, message: "empty key".into() });
        }
        if let Some(off) = key.find(|c: char| !(c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_' || c == '.')) {
            return Err(ConfigError::Parse {
                line,
                column: key_col + off,
                message: format!("invalid character in key `{key}`"),
            });
        }
        if !KNOWN_KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey { key: key.into(), line, column: key_col });
        }
        let after = &content[eq + 1..];
        let value = after.trim();
        let column = eq + 2 + (after.len() - after.trim_start().len());
        if value.is_empty() {
            return Err(ConfigError::Parse { line, column, message: format!("empty value for `{key}`") });
        }
        if map.contains_key(key) {
            return Err(ConfigError::Parse { line, column: key_col, message: format!("duplicate key `{key}`") });
        }
        map.insert(key.to_string(), Entry { value: value.to_string(), line, column });
    }
    Ok(Entries { map })
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("`{s}` is not a boolean")),
    }
}

/// Parses configuration text and applies defaults.
pub fn parse_config(text: &str) -> Result<ExperimentSpec, ConfigError> {
    let e = tokenize(text)?;
    let kind: ExperimentKind = e.parse("experiment.kind")?.ok_or(ConfigError::Missing("experiment.kind"))?;

    let default_systems = match kind {
        ExperimentKind::ThroughputVsSnr => SystemKind::ALL.to_vec(),
        _ => vec![SystemKind::CimSrDcskCc],
    };
    let systems: Vec<SystemKind> = e.list("experiment.systems")?.unwrap_or(default_systems);
    let m_c: Vec<u32> = e.list("frame.m_c")?.unwrap_or_else(|| vec![1]);
    if let Some(&bad) = m_c.iter().find(|&&m| !(1..=10).contains(&m)) {
        return Err(e.bad("frame.m_c", format!("m_c = {bad} must be in 1..=10")));
    }

    let delays: Option<Vec<usize>> = e.list("channel.delays")?;
    let mean_squares: Option<Vec<f64>> = e.list("channel.mean_squares")?;
    let channel_name = e.get::<String>("channel.kind", "awgn".into())?;
    let channel = match channel_name.as_str() {
        "awgn" => {
            if delays.is_some() || mean_squares.is_some() {
                return Err(ConfigError::Invalid("channel.delays and channel.mean_squares need a rayleigh channel".into()));
            }
            ChannelKind::Awgn
        }
        "rayleigh-equal" => {
            if mean_squares.is_some() {
                return Err(e.bad("channel.mean_squares", "not used by rayleigh-equal"));
            }
            ChannelKind::RayleighEqual { delays: delays.unwrap_or_else(|| vec![0, 1, 2]) }
        }
        "rayleigh-unequal" => {
            let mean_squares = mean_squares.ok_or(ConfigError::Missing("channel.mean_squares"))?;
            let delays = delays.unwrap_or_else(|| (0..mean_squares.len()).collect());
            ChannelKind::RayleighUnequal { mean_squares, delays }
        }
        other => return Err(e.bad("channel.kind", format!("unknown channel `{other}`"))),
    };

    let (start, stop, step) = match kind {
        ExperimentKind::BerVsRelayDistance => (1.0, 2.0, 0.1),
        ExperimentKind::ThroughputVsSnr => (0.0, 30.0, 2.0),
        _ => (0.0, 24.0, 2.0),
    };
    let default_axis = match kind {
        ExperimentKind::ThroughputVsSnr => "et",
        _ if systems.iter().any(SystemKind::is_baseline) => "et",
        _ => "es",
    };
    let axis = match e.get::<String>("sweep.axis", default_axis.into())?.as_str() {
        "es" => SnrAxis::SymbolEnergy,
        "et" => SnrAxis::TotalEnergy,
        other => return Err(e.bad("sweep.axis", format!("`{other}` is neither `es` nor `et`"))),
    };
    let sweep = Sweep {
        start: e.get("sweep.start", start)?,
        stop: e.get("sweep.stop", stop)?,
        step: e.get("sweep.step", step)?,
        axis,
        snr_db: e.get("sweep.snr_db", 22.0)?,
    };

    let stop_class = match e.get::<String>("sim.stop_class", "rarest".into())?.as_str() {
        "rarest" => StopClass::Rarest,
        "total" => StopClass::Total,
        other => return Err(e.bad("sim.stop_class", format!("`{other}` is neither `rarest` nor `total`"))),
    };
    let stop = StopRule {
        min_errors: e.get("sim.min_errors", 100)?,
        max_frames: e.get::<f64>("sim.max_frames", 1e6).and_then(|v| {
            if v >= 1.0 && v.fract() == 0.0 && v < 1e15 {
                Ok(v as u64)
            } else {
                Err(e.bad("sim.max_frames", "must be a positive integer"))
            }
        })?,
        class: stop_class,
        batch_frames: e.get("sim.batch_frames", 1000)?,
    };
    let workers = match e.get::<String>("sim.workers", "auto".into())?.as_str() {
        "auto" => None,
        w => Some(w.parse::<usize>().map_err(|err| e.bad("sim.workers", err.to_string()))?),
    };
    let simulate = match e.map.get("sim.enabled") {
        Some(entry) => parse_bool(&entry.value).map_err(|m| e.bad("sim.enabled", m))?,
        None => true,
    };
    let renormalize_chaos = match e.map.get("sim.renormalize_chaos") {
        Some(entry) => parse_bool(&entry.value).map_err(|m| e.bad("sim.renormalize_chaos", m))?,
        None => false,
    };
    let kernel = match e.get::<String>("theory.kernel", "exact".into())?.as_str() {
        "exact" => WalshKernel::Exact,
        "printed" => WalshKernel::PrintedMoments,
        other => return Err(e.bad("theory.kernel", format!("`{other}` is neither `exact` nor `printed`"))),
    };
    let convention = match e.get::<String>("throughput.convention", "printed".into())?.as_str() {
        "printed" => DurationConvention::Printed,
        "native" => DurationConvention::NativeFrames,
        other => return Err(e.bad("throughput.convention", format!("`{other}` is neither `printed` nor `native`"))),
    };

    let spec = ExperimentSpec {
        kind,
        name: e.get("experiment.name", kind.name().to_string())?,
        systems,
        m_c,
        sf: e.get("frame.sf", 510)?,
        chip_time: e.get("frame.chip_time", cimsr::waveform::DEFAULT_CHIP_TIME)?,
        p_s: e.get("link.p_s", 1.0)?,
        p_r: e.get("link.p_r", 1.0)?,
        alpha: e.get("link.alpha", 2.0)?,
        geometry: Geometry {
            d_sr: e.get("geometry.d_sr", 1.0)?,
            d_rd: e.get("geometry.d_rd", 1.0)?,
            d_sd: e.get("geometry.d_sd", 2.0)?,
        },
        channel,
        sweep,
        simulate,
        seed: e.get("sim.seed", 1)?,
        stop,
        workers,
        n_p: e.get("sim.n_p", 1)?,
        renormalize_chaos,
        kernel,
        convention,
        out_dir: e.get("output.dir", PathBuf::from("."))?,
    };
    if spec.name.contains(['/', '\\']) {
        return Err(e.bad("experiment.name", "must not contain path separators"));
    }
    Ok(spec)
}

pub fn load_config(path: &Path) -> Result<ExperimentSpec, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    parse_config(&text)
}
