//! Chebyshev-map chaotic reference generation.

use rand::Rng;

use crate::error::{Error, Result};

/// Iterations inspected when screening a seed for a collapsing orbit.
const SEED_SCREEN_ITERATIONS: usize = 32;
const COLLAPSE_TOLERANCE: f64 = 1e-12;

/// One step of the second-order Chebyshev map, `1 - 2x^2`.
pub fn chebyshev_next(x: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::ChaosDomain(x));
    }
    Ok(map(x))
}

#[inline]
fn map(x: f64) -> f64 {
    1.0 - 2.0 * x * x
}

/// A chaotic reference segment of `u` samples, every sample in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChaoticSequence {
    samples: Vec<f64>,
}

impl ChaoticSequence {
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
        self.samples.iter().map(|x| x * x).sum()
    }

    pub fn mean_power(&self) -> f64 {
        self.energy() / self.samples.len() as f64
    }

    /// Rescales the samples so the segment energy is exactly `u / 2`,
    /// the ensemble value. The result may leave `[-1, 1]`.
    pub fn renormalized(mut self) -> Self {
        let energy = self.energy();
        if energy > 0.0 {
            let scale = (0.5 * self.samples.len() as f64 / energy).sqrt();
            self.samples.iter_mut().for_each(|x| *x *= scale);
        }
        self
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

/// True when the orbit from `seed` reaches a fixed point within the screening window.
pub fn is_degenerate_seed(seed: f64) -> bool {
    if !(-1.0..=1.0).contains(&seed) {
        return true;
    }
    let mut x = seed;
    for _ in 0..SEED_SCREEN_ITERATIONS {
        let next = map(x);
        if (next - x).abs() < COLLAPSE_TOLERANCE {
            return true;
        }
        x = next;
    }
    false
}

/// Iterates the map from `seed`; the first sample is the first iterate, not the seed.
pub fn generate_sequence(seed: f64, u: usize) -> Result<ChaoticSequence> {
    if u == 0 {
        return Err(Error::FrameGeometry("reference length must be at least 1".into()));
    }
    if !(seed > -1.0 && seed < 1.0) || is_degenerate_seed(seed) {
        return Err(Error::DegenerateSeed(seed));
    }
    let mut samples = Vec::with_capacity(u);
    let mut x = seed;
    for _ in 0..u {
        x = map(x);
        samples.push(x);
    }
    Ok(ChaoticSequence { samples })
}

/// Draws a seed uniformly from (-1, 1), rejecting degenerate orbits.
pub fn random_seed<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let seed: f64 = rng.random_range(-1.0..1.0);
        if seed > -1.0 && !is_degenerate_seed(seed) {
            return seed;
        }
    }
}

pub fn random_sequence<R: Rng + ?Sized>(rng: &mut R, u: usize) -> Result<ChaoticSequence> {
    generate_sequence(random_seed(rng), u)
}
