//! System configuration and quasi-static Rayleigh channel draws.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{OjsError, Result};
use crate::linalg::CMatrix;

/// Antenna counts and jammer pool dimensions.
///
/// `nt` at Alice, `nj` per jammer, `nr` at Bob, `ne` at Eve; Bob picks `k`
/// jammers out of a pool of `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub nt: usize,
    pub nj: usize,
    pub nr: usize,
    pub ne: usize,
    pub k: usize,
    pub s: usize,
}

impl SystemConfig {
    pub fn new(nt: usize, nj: usize, nr: usize, ne: usize, k: usize, s: usize) -> Self {
        Self { nt, nj, nr, ne, k, s }
    }

    /// Same antennas, different pool size.
    pub fn with_pool(self, s: usize) -> Self {
        Self { s, ..self }
    }

    /// Number of Eve-side receive dimensions the selected jammers occupy.
    pub fn defensible_dimensions(&self) -> usize {
        self.k * self.nj
    }

    /// Checks the configuration.
    ///
    /// Always enforced: every antenna count is positive, `k >= 2` and
    /// `s >= k`. Unless `allow_nonstandard` is set, the antenna regime
    /// `nt + nj <= nr < nt + k*nj` and the defensible-dimension condition
    /// `k*nj >= ne` must also hold.
    pub fn validate(self, allow_nonstandard: bool) -> Result<Self> {
        for (name, value) in [("nt", self.nt), ("nj", self.nj), ("nr", self.nr), ("ne", self.ne)] {
            if value == 0 {
                return Err(OjsError::InvalidConfig(format!("{name} must be at least 1")));
            }
        }
        if self.k < 2 {
            return Err(OjsError::InvalidConfig(format!(
                "k must be at least 2, got {}",
                self.k
            )));
        }
        if self.s < self.k {
            return Err(OjsError::InvalidConfig(format!(
                "pool size s = {} is smaller than k = {}",
                self.s, self.k
            )));
        }
        if allow_nonstandard {
            return Ok(self);
        }
        if self.nt + self.nj > self.nr {
            return Err(OjsError::AntennaRegimeViolation(format!(
                "nt + nj <= nr fails: {} + {} > {}",
                self.nt, self.nj, self.nr
            )));
        }
        if self.nr >= self.nt + self.k * self.nj {
            return Err(OjsError::AntennaRegimeViolation(format!(
                "nr < nt + k*nj fails: {} >= {} + {}*{}",
                self.nr, self.nt, self.k, self.nj
            )));
        }
        if self.defensible_dimensions() < self.ne {
            return Err(OjsError::DefensibleDimensionViolation {
                defensible: self.defensible_dimensions(),
                ne: self.ne,
            });
        }
        Ok(self)
    }
}

/// A reproducible random stream identified by a master seed and a stream id
/// (normally the trial index).
///
/// The generator is ChaCha8 with the stream id mapped onto ChaCha's native
/// stream counter, so `(seed, stream)` pins the output regardless of which
/// worker thread consumes it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeededRng {
    pub seed: u64,
    pub stream: u64,
}

impl SeededRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// A stream for a different purpose within the same trial (e.g. the random
    /// selection baseline), decorrelated from the channel stream.
    pub fn substream(&self, tag: u64) -> SeededRng {
        SeededRng {
            seed: splitmix64(self.seed ^ splitmix64(tag.wrapping_add(0x6a09_e667_f3bc_c909))),
            stream: self.stream,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// One CN(0, 1) sample: independent real and imaginary parts of variance 1/2.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// A `rows x cols` matrix of i.i.d. CN(0, 1) entries, filled row-major.
pub fn complex_gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let data: Vec<Complex64> = (0..rows * cols).map(|_| complex_gaussian(rng)).collect();
    DMatrix::from_row_slice(rows, cols, &data)
}

/// One quasi-static draw of every channel in the system.
///
/// `h_jam[i]` / `g_jam[i]` are the channels from jammer `i` to Bob / Eve.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h0: CMatrix,
    pub h_jam: Vec<CMatrix>,
    pub g0: CMatrix,
    pub g_jam: Vec<CMatrix>,
}

impl ChannelRealization {
    /// Draws a realization. The draw order is `h0`, `g0`, then `(h_i, g_i)`
    /// per jammer, so the realization for pool size `s` is a prefix of the one
    /// for any larger pool under the same stream.
    pub fn sample(config: &SystemConfig, stream: SeededRng) -> Self {
        let mut rng = stream.rng();
        Self::sample_with(config, &mut rng)
    }

    pub fn sample_with<R: Rng + ?Sized>(config: &SystemConfig, rng: &mut R) -> Self {
        let h0 = complex_gaussian_matrix(config.nr, config.nt, rng);
        let g0 = complex_gaussian_matrix(config.ne, config.nt, rng);
        let mut h_jam = Vec::with_capacity(config.s);
        let mut g_jam = Vec::with_capacity(config.s);
        for _ in 0..config.s {
            h_jam.push(complex_gaussian_matrix(config.nr, config.nj, rng));
            g_jam.push(complex_gaussian_matrix(config.ne, config.nj, rng));
        }
        Self { h0, h_jam, g0, g_jam }
    }

    pub fn pool_size(&self) -> usize {
        self.h_jam.len()
    }

    /// Bob-side jamming channels for the given jammer indices.
    pub fn bob_jammers(&self, indices: &[usize]) -> Vec<&CMatrix> {
        indices.iter().map(|&i| &self.h_jam[i]).collect()
    }

    /// Eve-side jamming channels for the given jammer indices.
    pub fn eve_jammers(&self, indices: &[usize]) -> Vec<&CMatrix> {
        indices.iter().map(|&i| &self.g_jam[i]).collect()
    }
}

/// Transmit power (linear) for an SNR in dB. Noise variance is 1 at both
/// receivers, so SNR and total power coincide.
pub fn snr_db_to_power(snr_db: f64) -> f64 {
    10f64.powf(snr_db / 10.0)
}
