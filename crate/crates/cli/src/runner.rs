//! Sweeps that call the simulator and the analysis, emitting CSV and SVG.

use std::fmt;
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use cimsr::coopsim::{run_monte_carlo_point, BerEstimate, SystemConfig, SystemKind};
use cimsr::theory::{evaluate, normalized_throughput, TheoryOptions, TheoryPoint};

use crate::config::{ConfigError, ExperimentKind, ExperimentSpec, SnrAxis};
use crate::csv::{x_column, CsvWriter};
use crate::{svg, CliError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// The frame cap was reached before the error target.
    Capped,
    Failed(String),
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Ok => f.write_str("ok"),
            Self::Capped => f.write_str("capped"),
            Self::Failed(msg) => write!(f, "failed: {}", msg.replace([',', '\n'], ";")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub kind: ExperimentKind,
    pub system: SystemKind,
    pub channel: String,
    pub m_c: u32,
    /// Sweep coordinate: SNR in dB or `d_sr` in meters.
    pub x: f64,
    pub sim: Option<BerEstimate>,
    pub theory: Option<TheoryPoint>,
    pub throughput: Option<f64>,
    pub status: Status,
}

impl Row {
    /// Standardized gap between simulated and theoretical system BER.
    pub fn z_score(&self) -> Option<f64> {
        let (sim, th) = (self.sim.as_ref()?, self.theory.as_ref()?);
        let sigma = sim.total_sigma(th.p_sys);
        (sigma > 0.0).then(|| (sim.ber.total - th.p_sys) / sigma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Simulation (when enabled) plus theory.
    Full,
    TheoryOnly,
}

#[derive(Debug)]
pub struct RunOutput {
    pub rows: Vec<Row>,
    pub csv: PathBuf,
    pub svg: PathBuf,
}

/// Places the configuration at sweep SNR `x` dB.
pub fn at_snr(cfg: &SystemConfig, axis: SnrAxis, x: f64) -> SystemConfig {
    match axis {
        SnrAxis::SymbolEnergy => cfg.clone().with_es_n0_db(x),
        SnrAxis::TotalEnergy => {
            let powers = match cfg.system {
                SystemKind::CimSrDcskCc => cfg.p_s + cfg.p_r,
                _ => cfg.p_s + 2.0 * cfg.p_r,
            };
            cfg.clone().with_es_n0_db(x - 10.0 * powers.log10())
        }
    }
}

fn x_label(spec: &ExperimentSpec) -> String {
    match (spec.kind, spec.sweep.axis) {
        (ExperimentKind::BerVsRelayDistance, axis) => format!(
            "d_sr (m), d_sd = {} m, {} = {} dB",
            spec.geometry.d_sd,
            if axis == SnrAxis::SymbolEnergy { "Es/N0" } else { "ET/N0" },
            spec.sweep.snr_db
        ),
        (_, SnrAxis::SymbolEnergy) => "Es/N0 (dB)".into(),
        (_, SnrAxis::TotalEnergy) => "ET/N0 (dB)".into(),
    }
}

struct Point<'a> {
    spec: &'a ExperimentSpec,
    mode: Mode,
    opts: TheoryOptions,
    workers: usize,
}

impl Point<'_> {
    fn evaluate(&self, base: &SystemConfig, x: f64, index: usize) -> Result<Row, (Row, cimsr::Error)> {
        let spec = self.spec;
        let (cfg, snr) = match spec.kind {
            ExperimentKind::BerVsRelayDistance => {
                (at_snr(&base.clone().with_relay_on_line(x), spec.sweep.axis, spec.sweep.snr_db), spec.sweep.snr_db)
            }
            _ => (at_snr(base, spec.sweep.axis, x), x),
        };
        let mut row = Row {
            kind: spec.kind,
            system: base.system,
            channel: spec.channel.name().to_string(),
            m_c: base.frame.m_c(),
            x,
            sim: None,
            theory: None,
            throughput: None,
            status: Status::Ok,
        };
        let fail = |mut row: Row, e: cimsr::Error| {
            row.status = Status::Failed(e.to_string());
            (row, e)
        };
        let th = match evaluate(&cfg, &self.opts) {
            Ok(t) => t,
            Err(e) => return Err(fail(row, e)),
        };
        row.theory = Some(th);
        if spec.kind == ExperimentKind::ThroughputVsSnr {
            match normalized_throughput(base.system, &base.frame, base.n_p, th.p_sys, spec.convention) {
                Ok(t) => row.throughput = Some(t),
                Err(e) => return Err(fail(row, e)),
            }
        }
        if self.mode == Mode::Full && spec.simulate {
            match run_monte_carlo_point(&cfg, snr, index, spec.stop, spec.seed, self.workers) {
                Ok(est) => {
                    if est.reached_max_frames {
                        row.status = Status::Capped;
                    }
                    row.sim = Some(est);
                }
                Err(e) => return Err(fail(row, e)),
            }
        }
        Ok(row)
    }
}

/// Runs every (system, m_c, sweep point) combination in a fixed order.
pub fn run_experiment(spec: &ExperimentSpec, mode: Mode) -> Result<RunOutput, CliError> {
    spec.validate()?;
    std::fs::create_dir_all(&spec.out_dir).map_err(|source| CliError::Io { path: spec.out_dir.clone(), source })?;
    let csv_path = spec.out_dir.join(format!("{}.csv", spec.name));
    let svg_path = spec.out_dir.join(format!("{}.svg", spec.name));
    let file = File::create(&csv_path).map_err(|source| CliError::Io { path: csv_path.clone(), source })?;
    let io = |source| CliError::Io { path: csv_path.clone(), source };
    let mut csv = CsvWriter::new(BufWriter::new(file), spec.kind).map_err(io)?;

    let point = Point {
        spec,
        mode,
        opts: TheoryOptions { kernel: spec.kernel, ..TheoryOptions::default() },
        workers: spec.workers.unwrap_or_else(rayon::current_num_threads).max(1),
    };
    let xs = spec.sweep.points();
    let mut rows = Vec::new();
    let mut index = 0usize;
    for &system in &spec.systems {
        for &m_c in &spec.m_c {
            let base = spec.system_config(system, m_c)?;
            for &x in &xs {
                log::info!("{system} m_c={m_c} {}={x}", x_column(spec.kind));
                match point.evaluate(&base, x, index) {
                    Ok(row) => {
                        csv.write(&row).map_err(io)?;
                        rows.push(row);
                    }
                    Err((row, e)) => {
                        csv.write(&row).map_err(io)?;
                        return Err(CliError::Runtime(e));
                    }
                }
                index += 1;
            }
        }
    }
    let title = format!("{} ({})", spec.name, spec.channel.name());
    std::fs::write(&svg_path, svg::render(spec.kind, &title, &x_label(spec), &rows))
        .map_err(|source| CliError::Io { path: svg_path.clone(), source })?;
    Ok(RunOutput { rows, csv: csv_path, svg: svg_path })
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}
