//! Bob/Eve rates, secrecy rate, the sufficient pool size for a target rate
//! loss, and empirical DoF slopes. All rates are in bits (log base 2).

use serde::Serialize;

use crate::channel::SystemConfig;
use crate::error::{OjsError, Result};
use crate::linalg::{gram, hermitian_eigenvalues_desc, identity, log2_det_hpd, quad_form_inverse, CMatrix};

/// Per-realization rates for one selected jammer set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateReport {
    pub c_bob: f64,
    pub r_bob: f64,
    pub r_bob_loss: f64,
    pub c_eve: f64,
    pub secrecy: f64,
}

/// `sum_k M_k M_k^H`.
pub fn jamming_gram(jam_channels: &[&CMatrix]) -> CMatrix {
    let n = jam_channels.first().map_or(0, |m| m.nrows());
    let mut acc = CMatrix::zeros(n, n);
    for m in jam_channels {
        acc += gram(m);
    }
    acc
}

fn logdet(m: &CMatrix) -> f64 {
    // Every argument here is I + PSD.
    log2_det_hpd(m).expect("I + PSD matrix must be positive definite")
}

/// `log2 det(I + s * X^H W^{-1} X)` with `W = I + j * jam_gram`.
///
/// This is the capacity of a link with signal channel `X` and coefficient
/// `s`, treating the jamming as colored Gaussian noise.
pub fn whitened_log_det(signal: &CMatrix, jam_gram: &CMatrix, signal_coeff: f64, jam_coeff: f64) -> f64 {
    let n = signal.nrows();
    let w = identity(n) + jam_gram.scale(jam_coeff);
    let inner = quad_form_inverse(&w, signal).expect("I + PSD matrix must be positive definite");
    let m = identity(signal.ncols()) + inner.scale(signal_coeff);
    logdet(&m).max(0.0)
}

/// Bob's capacity treating the selected jammers as noise:
/// `log2 det(I + (P/nt) H0 H0^H (I + (P/nj) sum H_k H_k^H)^{-1})`.
pub fn bob_capacity(h0: &CMatrix, jam_channels: &[&CMatrix], power: f64, config: &SystemConfig) -> f64 {
    let (signal, jam) = coefficients(power, config);
    whitened_log_det(h0, &jamming_gram(jam_channels), signal, jam)
}

/// Bob's rate after the receive filter `v` (`nr x nt`, orthonormal columns).
pub fn bob_rate(
    h0: &CMatrix,
    jam_channels: &[&CMatrix],
    v: &CMatrix,
    power: f64,
    config: &SystemConfig,
) -> f64 {
    let (signal, jam) = coefficients(power, config);
    bob_rate_from_gram(h0, &jamming_gram(jam_channels), v, signal, jam)
}

pub(crate) fn bob_rate_from_gram(
    h0: &CMatrix,
    jam_gram: &CMatrix,
    v: &CMatrix,
    signal_coeff: f64,
    jam_coeff: f64,
) -> f64 {
    let projected_signal = v.adjoint() * h0;
    let projected_jam = v.adjoint() * jam_gram * v;
    whitened_log_det(&projected_signal, &projected_jam, signal_coeff, jam_coeff)
}

/// Rate lost to residual jamming after filtering:
/// `log2 det(I + (P/nj) sum V^H H_k H_k^H V)`.
pub fn bob_jamming_loss(jam_channels: &[&CMatrix], v: &CMatrix, power: f64, config: &SystemConfig) -> f64 {
    let (_, jam) = coefficients(power, config);
    jamming_loss_from_gram(&jamming_gram(jam_channels), v, jam)
}

pub(crate) fn jamming_loss_from_gram(jam_gram: &CMatrix, v: &CMatrix, jam_coeff: f64) -> f64 {
    let projected = v.adjoint() * jam_gram * v;
    logdet(&(identity(v.ncols()) + projected.scale(jam_coeff))).max(0.0)
}

/// Eve's capacity with the selected jammers as noise.
pub fn eve_capacity(g0: &CMatrix, jam_channels: &[&CMatrix], power: f64, config: &SystemConfig) -> f64 {
    let (signal, jam) = coefficients(power, config);
    whitened_log_det(g0, &jamming_gram(jam_channels), signal, jam)
}

/// Relative eigenvalue floor below which Eve's jamming Gram is treated as
/// singular.
const SINGULAR_GRAM_TOLERANCE: f64 = 1e-12;

/// High-power limit of Eve's capacity:
/// `log2 det(I + (nj/nt) G0 G0^H (sum G_k G_k^H)^{-1})`.
pub fn eve_saturated_rate(g0: &CMatrix, jam_channels: &[&CMatrix], config: &SystemConfig) -> Result<f64> {
    let gram = jamming_gram(jam_channels);
    if gram.nrows() != g0.nrows() {
        return Err(OjsError::DimensionMismatch(format!(
            "Eve has {} antennas but jamming channels have {} rows",
            g0.nrows(),
            gram.nrows()
        )));
    }
    let eig = hermitian_eigenvalues_desc(&gram);
    let largest = eig.first().copied().unwrap_or(0.0);
    let smallest = eig.last().copied().unwrap_or(0.0);
    if !(largest > 0.0) || smallest <= SINGULAR_GRAM_TOLERANCE * largest {
        return Err(OjsError::SingularJammingGram);
    }
    let inner = quad_form_inverse(&gram, g0).ok_or(OjsError::SingularJammingGram)?;
    let ratio = config.nj as f64 / config.nt as f64;
    let m = identity(g0.ncols()) + inner.scale(ratio);
    Ok(logdet(&m).max(0.0))
}

/// `[r_bob - c_eve]^+`.
pub fn secrecy_rate(r_bob: f64, c_eve: f64) -> f64 {
    (r_bob - c_eve).max(0.0)
}

/// `(P / nt, P / nj)`: per-antenna powers of Alice and of each jammer.
pub fn coefficients(power: f64, config: &SystemConfig) -> (f64, f64) {
    (power / config.nt as f64, power / config.nj as f64)
}

/// Default for the unknown packing constant in the pool-size formula.
pub const DEFAULT_KAPPA2: f64 = 1.0;

/// Pool size that keeps Bob's rate loss below `delta` bits:
/// `(K-1) * [4 kappa2^2 K P / (nt (2^(delta/nt) - 1))]^(nt nj / 2) + 1`,
/// rounded up.
pub fn sufficient_jammer_count(delta: f64, power: f64, config: &SystemConfig, kappa2: f64) -> Result<u64> {
    if !(delta > 0.0) {
        return Err(OjsError::NonpositiveDelta(delta));
    }
    if !(kappa2 > 0.0) {
        return Err(OjsError::NonpositiveParameter { name: "kappa2", value: kappa2 });
    }
    if !(power > 0.0) {
        return Err(OjsError::NonpositiveParameter { name: "power", value: power });
    }
    let nt = config.nt as f64;
    let nj = config.nj as f64;
    let k = config.k as f64;
    let bracket = 4.0 * kappa2 * kappa2 * k * power / (nt * ((delta / nt).exp2() - 1.0));
    let value = (k - 1.0) * bracket.powf(nt * nj / 2.0) + 1.0;
    if !value.is_finite() || value >= u64::MAX as f64 {
        return Err(OjsError::Overflow(value));
    }
    Ok(ceil_with_tolerance(value) as u64)
}

/// Ceiling that ignores rounding noise just above an integer.
fn ceil_with_tolerance(x: f64) -> f64 {
    let nearest = x.round();
    if (x - nearest).abs() <= 1e-9 * nearest.abs().max(1.0) {
        nearest
    } else {
        x.ceil()
    }
}

/// Least-squares slope of rate against `log2(power)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DofEstimate {
    pub slope: f64,
    pub window: Vec<(f64, f64)>,
}

/// Number of highest-power grid points used for DoF fits by default.
pub const DEFAULT_DOF_WINDOW: usize = 4;

pub fn dof_slope(points: &[(f64, f64)]) -> Result<DofEstimate> {
    if points.len() < 2 || points.iter().any(|&(p, r)| !(p > 0.0) || !r.is_finite()) {
        return Err(OjsError::DegenerateWindow);
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|&(p, _)| p.log2()).collect();
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = points.iter().map(|&(_, r)| r).sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(OjsError::DegenerateWindow);
    }
    let sxy: f64 = xs
        .iter()
        .zip(points)
        .map(|(x, &(_, r))| (x - mean_x) * (r - mean_y))
        .sum();
    Ok(DofEstimate {
        slope: sxy / sxx,
        window: points.to_vec(),
    })
}

/// DoF slope over the `window` highest-power points.
pub fn dof_slope_top(points: &[(f64, f64)], window: usize) -> Result<DofEstimate> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let start = sorted.len().saturating_sub(window.max(2));
    dof_slope(&sorted[start..])
}
