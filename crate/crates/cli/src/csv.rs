//! Fixed-schema CSV rows.

use std::io::Write;

use crate::config::ExperimentKind;
use crate::runner::Row;

pub const COLUMNS_AFTER_X: [&str; 12] = [
    "ber_sys_sim",
    "ber_sys_theory",
    "ber_index_sim",
    "ber_index_theory",
    "ber_mod_sim",
    "ber_mod_theory",
    "throughput",
    "frames",
    "errors_index",
    "errors_mod",
    "ci95_sys",
    "status",
];

pub fn x_column(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::BerVsRelayDistance => "d_sr_m",
        _ => "snr_db",
    }
}

pub fn header(kind: ExperimentKind) -> String {
    let mut cols = vec!["experiment_kind", "system", "channel", "m_c", x_column(kind)];
    cols.extend(COLUMNS_AFTER_X);
    cols.join(",")
}

/// Decimal notation with six significant digits; never scientific.
pub fn sig6(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v == 0.0 { "0".into() } else { format!("{v}") };
    }
    let sci = format!("{v:.5e}");
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    let rounded: f64 = sci.parse().unwrap_or(v);
    let decimals = (5 - exp).max(0) as usize;
    format!("{rounded:.decimals$}")
}

fn opt(v: Option<f64>) -> String {
    v.map(sig6).unwrap_or_default()
}

pub fn format_row(row: &Row) -> String {
    let sim = row.sim.as_ref();
    let th = row.theory.as_ref();
    let fields = [
        row.kind.name().to_string(),
        row.system.name().to_string(),
        row.channel.clone(),
        row.m_c.to_string(),
        sig6(row.x),
        opt(sim.map(|s| s.ber.total)),
        opt(th.map(|t| t.p_sys)),
        opt(sim.map(|s| s.ber.index)),
        opt(th.map(|t| t.p_cim)),
        opt(sim.map(|s| s.ber.modulated)),
        opt(th.map(|t| t.p_mod)),
        opt(row.throughput),
        sim.map(|s| s.frames.to_string()).unwrap_or_default(),
        sim.map(|s| s.bit_errors.index.to_string()).unwrap_or_default(),
        sim.map(|s| s.bit_errors.modulated.to_string()).unwrap_or_default(),
        opt(sim.map(|s| s.ci95_halfwidth.total)),
        row.status.to_string(),
    ];
    fields.join(",")
}

pub struct CsvWriter<W: Write> {
    out: W,
}

impl<W: Write> CsvWriter<W> {
    pub fn new(mut out: W, kind: ExperimentKind) -> std::io::Result<Self> {
        writeln!(out, "{}", header(kind))?;
        out.flush()?;
        Ok(Self { out })
    }

    /// Writes and flushes one row so partial results survive a later failure.
    pub fn write(&mut self, row: &Row) -> std::io::Result<()> {
        writeln!(self.out, "{}", format_row(row))?;
        self.out.flush()
    }
}
