//! Secrecy outage when Alice does not know Eve's channels.
//!
//! Eve's capacity saturates at high power to a random variable `R` that
//! depends only on Eve's channels to Alice and to `K` jammers chosen
//! independently of Eve. Fixing the wiretap-code rate at `r` makes the
//! outage probability `Pr{R >= r}`.

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{complex_gaussian_matrix, SeededRng, SystemConfig};
use crate::error::{OjsError, Result};
use crate::rates::eve_saturated_rate;

/// I.i.d. samples of Eve's saturated rate, in bits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutageSamples {
    values: Vec<f64>,
    config: SystemConfig,
}

impl OutageSamples {
    pub fn new(values: Vec<f64>, config: SystemConfig) -> Result<Self> {
        if values.is_empty() {
            return Err(OjsError::EmptySamples);
        }
        if values.iter().any(|v| !(*v >= 0.0)) {
            return Err(OjsError::Spec("outage samples must be non-negative".into()));
        }
        Ok(Self { values, config })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn config(&self) -> &SystemConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// Draws `trials` samples of the saturated rate. Trial `t` uses stream
/// `(seed, t)` and draws `G0` followed by `K` jammer channels, so the result
/// is independent of thread count.
pub fn sample_eve_rate_distribution(config: &SystemConfig, trials: usize, seed: u64) -> Result<OutageSamples> {
    if trials == 0 {
        return Err(OjsError::EmptySamples);
    }
    let values = (0..trials as u64)
        .into_par_iter()
        .map(|t| sample_one(config, SeededRng::new(seed, t)))
        .collect::<Result<Vec<_>>>()?;
    OutageSamples::new(values, *config)
}

fn sample_one(config: &SystemConfig, stream: SeededRng) -> Result<f64> {
    let mut rng = stream.rng();
    let g0 = complex_gaussian_matrix(config.ne, config.nt, &mut rng);
    let jam: Vec<_> = (0..config.k)
        .map(|_| complex_gaussian_matrix(config.ne, config.nj, &mut rng))
        .collect();
    let refs: Vec<_> = jam.iter().collect();
    eve_saturated_rate(&g0, &refs, config)
}

/// Empirical `Pr{R >= r}`.
pub fn outage_probability(samples: &OutageSamples, r: f64) -> f64 {
    let hits = samples.values.iter().filter(|&&v| v >= r).count();
    hits as f64 / samples.len() as f64
}

/// Smallest sample value `r` whose empirical outage `Pr{R >= r}` is at most
/// `epsilon`. When even the largest sample has outage above `epsilon`
/// (only possible for `epsilon < 1/n`), returns the next float above the
/// maximum, whose outage is zero.
pub fn rate_for_outage(samples: &OutageSamples, epsilon: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(OjsError::ProbabilityOutOfRange(epsilon));
    }
    let sorted = samples.sorted();
    let n = sorted.len();
    // Pr{R >= sorted[i]} = (n - first index of that value) / n
    let mut i = 0;
    while i < n {
        let value = sorted[i];
        if (n - i) as f64 <= epsilon * n as f64 {
            return Ok(value);
        }
        while i < n && sorted[i] == value {
            i += 1;
        }
    }
    Ok(next_up(sorted[n - 1]))
}

fn next_up(x: f64) -> f64 {
    if x.is_nan() || x == f64::INFINITY {
        return x;
    }
    if x == 0.0 {
        return f64::from_bits(1);
    }
    let bits = x.to_bits();
    if x > 0.0 {
        f64::from_bits(bits + 1)
    } else {
        f64::from_bits(bits - 1)
    }
}

/// `(r, epsilon)` pairs over a grid of code rates.
pub fn outage_curve(samples: &OutageSamples, grid: &[f64]) -> Vec<(f64, f64)> {
    grid.iter().map(|&r| (r, outage_probability(samples, r))).collect()
}
