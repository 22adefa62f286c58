use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::SystemConfig;
use super::frame::{FrameOutcome, FrameSimulator};
use crate::error::{Error, Result};

/// Which error counter must reach `min_errors` before a point stops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StopClass {
    /// The smaller of the index and modulated error counts.
    #[default]
    Rarest,
    /// Index plus modulated bit errors.
    Total,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopRule {
    pub min_errors: u64,
    pub max_frames: u64,
    pub class: StopClass,
    /// Frames per RNG stream; the unit of parallel work and of the stopping check.
    pub batch_frames: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self { min_errors: 100, max_frames: 10_000_000, class: StopClass::Rarest, batch_frames: 1000 }
    }
}

impl StopRule {
    pub fn new(min_errors: u64, max_frames: u64) -> Self {
        Self { min_errors, max_frames, ..Self::default() }
    }

    pub fn with_class(mut self, class: StopClass) -> Self {
        self.class = class;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_frames == 0 {
            return Err(Error::InvalidRequest("max_frames must be > 0".into()));
        }
        if self.batch_frames == 0 {
            return Err(Error::InvalidRequest("batch_frames must be > 0".into()));
        }
        Ok(())
    }

    fn satisfied(&self, acc: &Accumulator) -> bool {
        let errors = match self.class {
            StopClass::Rarest => acc.index_bit_errors.min(acc.modulated_errors),
            StopClass::Total => acc.index_bit_errors + acc.modulated_errors,
        };
        errors >= self.min_errors || acc.frames >= self.max_frames
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClassCounts {
    pub index: u64,
    pub modulated: u64,
    pub total: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClassRates {
    pub index: f64,
    pub modulated: f64,
    pub total: f64,
}

/// Simulated error rates at one SNR point.
#[derive(Debug, Clone, PartialEq)]
pub struct BerEstimate {
    pub snr_db: f64,
    pub frames: u64,
    pub bits_sent: ClassCounts,
    pub bit_errors: ClassCounts,
    pub ber: ClassRates,
    pub ci95_halfwidth: ClassRates,
    pub relay_decode_errors: u64,
    pub index_symbol_errors: u64,
    /// Frames observed in each of the four relay/index cases.
    pub case_counts: [u64; 4],
    /// No bit errors at all; the reported BER is 0.
    pub zero_errors: bool,
    pub reached_max_frames: bool,
}

impl BerEstimate {
    fn from_accumulator(snr_db: f64, index_bits: u32, acc: &Accumulator, reached_max_frames: bool) -> Self {
        let index_sent = acc.frames * u64::from(index_bits);
        let bits_sent = ClassCounts {
            index: index_sent,
            modulated: acc.frames,
            total: index_sent + acc.frames,
        };
        let bit_errors = ClassCounts {
            index: acc.index_bit_errors,
            modulated: acc.modulated_errors,
            total: acc.index_bit_errors + acc.modulated_errors,
        };
        let rate = |e: u64, n: u64| if n == 0 { 0.0 } else { e as f64 / n as f64 };
        let half = |p: f64, n: u64| if n == 0 { 0.0 } else { 1.96 * (p * (1.0 - p) / n as f64).sqrt() };
        let ber = ClassRates {
            index: rate(bit_errors.index, bits_sent.index),
            modulated: rate(bit_errors.modulated, bits_sent.modulated),
            total: rate(bit_errors.total, bits_sent.total),
        };
        let ci95_halfwidth = ClassRates {
            index: half(ber.index, bits_sent.index),
            modulated: half(ber.modulated, bits_sent.modulated),
            total: half(ber.total, bits_sent.total),
        };
        Self {
            snr_db,
            frames: acc.frames,
            bits_sent,
            bit_errors,
            ber,
            ci95_halfwidth,
            relay_decode_errors: acc.relay_errors,
            index_symbol_errors: acc.index_symbol_errors,
            case_counts: acc.cases,
            zero_errors: bit_errors.total == 0,
            reached_max_frames,
        }
    }

    /// Relay decode error rate.
    pub fn relay_error_rate(&self) -> f64 {
        self.relay_decode_errors as f64 / self.frames.max(1) as f64
    }

    /// Index (Walsh-row) symbol error rate.
    pub fn index_symbol_error_rate(&self) -> f64 {
        self.index_symbol_errors as f64 / self.frames.max(1) as f64
    }

    /// Binomial standard deviation of the total BER under a hypothesised rate `p`.
    pub fn total_sigma(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.bits_sent.total.max(1) as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Accumulator {
    frames: u64,
    index_bit_errors: u64,
    index_symbol_errors: u64,
    modulated_errors: u64,
    relay_errors: u64,
    cases: [u64; 4],
}

impl Accumulator {
    fn record(&mut self, out: &FrameOutcome) {
        self.frames += 1;
        self.index_bit_errors += u64::from(out.index_bit_errors);
        self.index_symbol_errors += u64::from(!out.index_ok);
        self.modulated_errors += u64::from(out.modulated_bit_error);
        self.relay_errors += u64::from(!out.relay_decode_ok);
        self.cases[out.case() - 1] += 1;
    }

    fn merge(&mut self, other: &Accumulator) {
        self.frames += other.frames;
        self.index_bit_errors += other.index_bit_errors;
        self.index_symbol_errors += other.index_symbol_errors;
        self.modulated_errors += other.modulated_errors;
        self.relay_errors += other.relay_errors;
        for (a, b) in self.cases.iter_mut().zip(other.cases) {
            *a += b;
        }
    }
}

/// 256-bit ChaCha key for one grid point of a run.
fn point_seed(seed: u64, point: usize) -> [u8; 32] {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(point as u64).to_le_bytes());
    key[16..24].copy_from_slice(b"cimsr-mc");
    key
}

fn run_batch(cfg: &SystemConfig, key: [u8; 32], batch: u64, frames: u64) -> Result<Accumulator> {
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(batch);
    let mut sim = FrameSimulator::new(cfg)?;
    let mut acc = Accumulator::default();
    for _ in 0..frames {
        let msg = sim.random_message(&mut rng);
        acc.record(&sim.simulate(msg, &mut rng)?);
    }
    Ok(acc)
}

fn run_point(
    cfg: &SystemConfig,
    key: [u8; 32],
    stop: &StopRule,
    wave: usize,
) -> Result<(Accumulator, bool)> {
    let mut total = Accumulator::default();
    let mut next_batch = 0u64;
    loop {
        let remaining = stop.max_frames - total.frames;
        let batches: Vec<(u64, u64)> = (0..wave as u64)
            .map(|i| {
                let offset = i * stop.batch_frames;
                (next_batch + i, remaining.saturating_sub(offset).min(stop.batch_frames))
            })
            .filter(|&(_, frames)| frames > 0)
            .collect();
        let results: Vec<Result<Accumulator>> = batches
            .par_iter()
            .map(|&(batch, frames)| run_batch(cfg, key, batch, frames))
            .collect();
        // Merge strictly in batch order so the stopping point is independent of scheduling.
        for result in results {
            total.merge(&result?);
            next_batch += 1;
            if stop.satisfied(&total) {
                return Ok((total, total.frames >= stop.max_frames));
            }
        }
    }
}

/// Monte-Carlo BER over an `E_s/N0` grid (dB) using the global rayon pool.
pub fn run_monte_carlo(
    cfg: &SystemConfig,
    snr_grid_db: &[f64],
    stop: StopRule,
    rng_seed: u64,
) -> Result<Vec<BerEstimate>> {
    run_monte_carlo_with(cfg, snr_grid_db, stop, rng_seed, rayon::current_num_threads())
}

/// As [`run_monte_carlo`] on a dedicated pool of `workers` threads.
///
/// Results depend only on the configuration, grid, stopping rule and seed.
pub fn run_monte_carlo_with(
    cfg: &SystemConfig,
    snr_grid_db: &[f64],
    stop: StopRule,
    rng_seed: u64,
    workers: usize,
) -> Result<Vec<BerEstimate>> {
    if snr_grid_db.is_empty() {
        return Err(Error::InvalidRequest("empty SNR grid".into()));
    }
    stop.validate()?;
    cfg.validate()?;
    let workers = workers.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidRequest(format!("thread pool: {e}")))?;
    let wave = 2 * workers;
    let index_bits = cfg.index_bits();
    pool.install(|| {
        snr_grid_db
            .iter()
            .enumerate()
            .map(|(i, &snr)| {
                let point_cfg = cfg.clone().with_es_n0_db(snr);
                let (acc, capped) = run_point(&point_cfg, point_seed(rng_seed, i), &stop, wave)?;
                Ok(BerEstimate::from_accumulator(snr, index_bits, &acc, capped))
            })
            .collect()
    })
}

/// Monte-Carlo estimate at the configuration's current noise level.
///
/// `point` selects an independent random stream; `snr_db` only labels the result.
pub fn run_monte_carlo_point(
    cfg: &SystemConfig,
    snr_db: f64,
    point: usize,
    stop: StopRule,
    rng_seed: u64,
    workers: usize,
) -> Result<BerEstimate> {
    stop.validate()?;
    cfg.validate()?;
    let workers = workers.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidRequest(format!("thread pool: {e}")))?;
    let (acc, capped) = pool.install(|| run_point(cfg, point_seed(rng_seed, point), &stop, 2 * workers))?;
    Ok(BerEstimate::from_accumulator(snr_db, cfg.index_bits(), &acc, capped))
}
