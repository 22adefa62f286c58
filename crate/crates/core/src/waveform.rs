//! Source (SR-DCSK) and relay (CIM-SR-DCSK) frame assembly.

use crate::chaos::ChaoticSequence;
use crate::error::{Error, Result};
use crate::walsh::WalshMatrix;

/// Default chip duration in seconds; only throughput accounting reads it.
pub const DEFAULT_CHIP_TIME: f64 = 1e-6;

/// Frame geometry: a `u`-chip reference followed by `n` information replicas.
///
/// `n = 1` describes a conventional DCSK frame (reference and one copy of
/// equal length); index modulation needs `n >= 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameParams {
    u: usize,
    n: usize,
    chip_time: f64,
}

impl FrameParams {
    pub fn new(u: usize, n: usize) -> Result<Self> {
        Self::with_chip_time(u, n, DEFAULT_CHIP_TIME)
    }

    pub fn with_chip_time(u: usize, n: usize, chip_time: f64) -> Result<Self> {
        if u == 0 {
            return Err(Error::FrameGeometry("reference length u must be >= 1".into()));
        }
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::FrameGeometry(format!("replica count {n} is not a power of two")));
        }
        if !(chip_time > 0.0 && chip_time.is_finite()) {
            return Err(Error::FrameGeometry(format!("chip time {chip_time} must be positive")));
        }
        Ok(Self { u, n, chip_time })
    }

    /// Geometry for `m_c` index bits closest to a target spreading factor.
    ///
    /// `U = round(sf / (N + 1))`, so the realized `sf()` may differ from the
    /// target when `N + 1` does not divide it.
    pub fn for_spreading_factor(sf: usize, m_c: u32) -> Result<Self> {
        let n = 1usize
            .checked_shl(m_c)
            .ok_or_else(|| Error::FrameGeometry(format!("m_c = {m_c} is too large")))?;
        let u = ((sf as f64) / (n as f64 + 1.0)).round() as usize;
        Self::new(u.max(1), n)
    }

    pub fn u(&self) -> usize {
        self.u
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> usize {
        self.n * self.u
    }

    pub fn sf(&self) -> usize {
        self.u + self.beta()
    }

    pub fn m_c(&self) -> u32 {
        self.n.trailing_zeros()
    }

    pub fn chip_time(&self) -> f64 {
        self.chip_time
    }

    /// Ensemble symbol energy `(1 + N) U E{x^2}` with `E{x^2} = 1/2`.
    pub fn symbol_energy(&self) -> f64 {
        0.5 * self.sf() as f64
    }
}

/// Payload of one symbol stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MessageSymbols {
    b: i8,
    a: usize,
}

impl MessageSymbols {
    pub fn new(b: i8, a: usize, order: usize) -> Result<Self> {
        if b != 1 && b != -1 {
            return Err(Error::InvalidRequest(format!("modulated symbol must be +/-1, got {b}")));
        }
        if !(1..=order).contains(&a) {
            return Err(Error::IndexOutOfRange { index: a, order });
        }
        Ok(Self { b, a })
    }

    pub fn b(&self) -> i8 {
        self.b
    }

    pub fn a(&self) -> usize {
        self.a
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasebandFrame {
    samples: Vec<f64>,
}

impl BasebandFrame {
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s * s).sum()
    }
}

impl From<Vec<f64>> for BasebandFrame {
    fn from(samples: Vec<f64>) -> Self {
        Self { samples }
    }
}

fn check_reference(x: &ChaoticSequence, p: &FrameParams) -> Result<()> {
    if x.len() != p.u() {
        return Err(Error::LengthMismatch { expected: p.u(), actual: x.len() });
    }
    Ok(())
}

fn assemble(x: &[f64], p: &FrameParams, weights: impl Iterator<Item = f64>) -> BasebandFrame {
    let mut samples = Vec::with_capacity(p.sf());
    samples.extend_from_slice(x);
    for w in weights {
        samples.extend(x.iter().map(|&v| w * v));
    }
    BasebandFrame { samples }
}

/// `[x | b x | ... | b x]` with `N` information replicas.
pub fn encode_source(b: i8, x: &ChaoticSequence, p: &FrameParams) -> Result<BasebandFrame> {
    check_reference(x, p)?;
    let b = f64::from(b.signum());
    Ok(assemble(x.samples(), p, std::iter::repeat_n(b, p.n())))
}

/// `[x | b w_{a,1} x | ... | b w_{a,N} x]`: the relay frame carrying index symbol `a`.
pub fn encode_relay(
    m: MessageSymbols,
    x: &ChaoticSequence,
    w: &WalshMatrix,
    p: &FrameParams,
) -> Result<BasebandFrame> {
    check_reference(x, p)?;
    if w.order() != p.n() {
        return Err(Error::LengthMismatch { expected: p.n(), actual: w.order() });
    }
    if m.a() > w.order() {
        return Err(Error::IndexOutOfRange { index: m.a(), order: w.order() });
    }
    let b = f64::from(m.b());
    Ok(assemble(x.samples(), p, w.row(m.a()).iter().map(|&c| b * f64::from(c))))
}
