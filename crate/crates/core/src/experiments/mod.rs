//! Experiment orchestration: SNR sweeps with a fixed or power-scaled jammer
//! pool, secrecy-outage curves, and covering-radius trends.
//!
//! Trial `t` draws its channels from stream `(seed, t)`. Trials run on a
//! rayon pool and results are gathered in `(grid point, scheme, trial)`
//! order, so outputs do not depend on the worker count.

pub mod config;
pub mod csv;

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{snr_db_to_power, ChannelRealization, SeededRng, SystemConfig};
use crate::error::{OjsError, Result};
use crate::grassmann::{random_subspace, SubspaceCodebook};
use crate::outage::{outage_curve, rate_for_outage, sample_eve_rate_distribution};
use crate::rates::{dof_slope_top, secrecy_rate};
use crate::selection::{binomial, evaluate, SchemeTag, SearchMode, Selector};

pub use config::spec_from_str;

/// Largest `C(S, K)` searched exhaustively per trial unless greedy search is
/// requested.
pub const DEFAULT_SUBSET_CAP: u128 = 1_000_000;

/// Substream tag for the random-selection baseline.
const RANDOM_SELECTION_TAG: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    FixedSweep,
    ScalingSweep,
    Outage,
    Covering,
}

/// Pool size rule `S(P) = max(K, round(c * P^a))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoolScaling {
    pub coefficient: f64,
    pub exponent: f64,
}

impl PoolScaling {
    pub fn pool_size(&self, power: f64, k: usize) -> usize {
        let raw = (self.coefficient * power.powf(self.exponent)).round();
        (raw.max(0.0) as usize).max(k)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub mode: Mode,
    pub config: SystemConfig,
    pub allow_nonstandard: bool,
    pub snr_grid_db: Vec<f64>,
    pub trials: usize,
    pub schemes: Vec<SchemeTag>,
    pub scaling: Option<PoolScaling>,
    pub seed: u64,
    pub kappa2: f64,
    /// Target outage probability for the `[R_Bob - r]^+` rows.
    pub epsilon: f64,
    /// Code rates at which the outage curve is tabulated; `None` picks 41
    /// evenly spaced points from 0 to the largest sample.
    pub outage_r_grid: Option<Vec<f64>>,
    pub covering_ms: Vec<usize>,
    pub covering_samples: usize,
    pub covering_reps: usize,
    pub search: SearchMode,
    pub subset_cap: u128,
    pub dof_window: usize,
}

impl ExperimentSpec {
    /// A spec with the usual defaults for `mode`.
    pub fn new(mode: Mode, config: SystemConfig) -> Self {
        Self {
            mode,
            config,
            allow_nonstandard: false,
            snr_grid_db: Vec::new(),
            trials: 100,
            schemes: vec![SchemeTag::Ojs1],
            scaling: None,
            seed: 0,
            kappa2: crate::rates::DEFAULT_KAPPA2,
            epsilon: 0.1,
            outage_r_grid: None,
            covering_ms: vec![2, 8, 32, 128],
            covering_samples: crate::grassmann::DEFAULT_COVERING_SAMPLES,
            covering_reps: 3,
            search: SearchMode::Exhaustive,
            subset_cap: DEFAULT_SUBSET_CAP,
            dof_window: crate::rates::DEFAULT_DOF_WINDOW,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(OjsError::Spec("trials must be at least 1".into()));
        }
        match (self.mode, self.scaling) {
            (Mode::ScalingSweep, None) => {
                return Err(OjsError::Spec(
                    "scaling sweeps need scaling_c and scaling_a".into(),
                ))
            }
            (Mode::ScalingSweep, Some(rule)) => {
                if !(rule.coefficient > 0.0) || !(rule.exponent >= 0.0) {
                    return Err(OjsError::Spec(
                        "scaling_c must be positive and scaling_a non-negative".into(),
                    ));
                }
            }
            (_, Some(_)) => {
                return Err(OjsError::Spec(
                    "scaling_c / scaling_a are only valid for scaling sweeps".into(),
                ))
            }
            (_, None) => {}
        }
        if self.mode == Mode::Covering {
            let c = &self.config;
            if c.nt == 0 || c.nj == 0 || c.nt >= c.nr || c.nj > c.nr {
                return Err(OjsError::Spec(
                    "covering needs 1 <= nt < nr and 1 <= nj <= nr".into(),
                ));
            }
            if self.covering_ms.is_empty() || self.covering_ms.contains(&0) {
                return Err(OjsError::Spec("covering_ms must be non-empty and positive".into()));
            }
            if self.covering_samples == 0 || self.covering_reps == 0 {
                return Err(OjsError::Spec(
                    "covering_samples and covering_reps must be positive".into(),
                ));
            }
            return Ok(());
        }
        self.config.validate(self.allow_nonstandard)?;
        if self.snr_grid_db.is_empty() {
            return Err(OjsError::Spec("snr_db grid is empty".into()));
        }
        if self.snr_grid_db.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(OjsError::Spec("snr_db grid must be strictly increasing".into()));
        }
        if self.schemes.is_empty() {
            return Err(OjsError::Spec("no schemes given".into()));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(OjsError::ProbabilityOutOfRange(self.epsilon));
        }
        if self.dof_window < 2 {
            return Err(OjsError::Spec("dof_window must be at least 2".into()));
        }
        Ok(())
    }

    fn powers(&self) -> Vec<f64> {
        self.snr_grid_db.iter().map(|&db| snr_db_to_power(db)).collect()
    }

    /// Pool size at each grid point.
    pub fn pool_sizes(&self) -> Vec<usize> {
        match self.scaling {
            Some(rule) if self.mode == Mode::ScalingSweep => self
                .powers()
                .iter()
                .map(|&p| rule.pool_size(p, self.config.k))
                .collect(),
            _ => vec![self.config.s; self.snr_grid_db.len()],
        }
    }

    fn check_subset_cap(&self, pools: &[usize]) -> Result<()> {
        let searches = self.schemes.iter().any(|s| *s != SchemeTag::Random);
        if !searches || self.search == SearchMode::Greedy {
            return Ok(());
        }
        for &s in pools {
            let subsets = binomial(s, self.config.k);
            if subsets > self.subset_cap {
                return Err(OjsError::PoolTooLarge {
                    s,
                    k: self.config.k,
                    subsets,
                    cap: self.subset_cap,
                });
            }
        }
        Ok(())
    }
}

/// One row per (grid point, scheme, trial).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub snr_db: f64,
    pub power: f64,
    pub pool_size: usize,
    pub scheme: SchemeTag,
    pub trial_index: usize,
    pub r_bob: f64,
    pub c_eve: f64,
    pub secrecy: f64,
    pub r_bob_loss: f64,
    /// Not written to the record CSV; kept for dominance checks.
    pub c_bob: f64,
}

/// Per (grid point, scheme) Monte Carlo means.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub snr_db: f64,
    pub power: f64,
    pub pool_size: usize,
    pub scheme: SchemeTag,
    pub mean_r_bob: f64,
    pub mean_c_eve: f64,
    pub mean_secrecy: f64,
    pub stderr_secrecy: f64,
    pub stderr_r_bob: f64,
    pub stderr_c_eve: f64,
}

/// A DoF fit of one metric for one scheme.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DofRow {
    pub scheme: SchemeTag,
    pub metric: &'static str,
    pub slope: f64,
    pub window_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepOutput {
    pub records: Vec<TrialRecord>,
    pub summary: Vec<SummaryRow>,
    pub dof: Vec<DofRow>,
}

impl SweepOutput {
    pub fn summary_for(&self, scheme: SchemeTag) -> Vec<&SummaryRow> {
        self.summary.iter().filter(|r| r.scheme == scheme).collect()
    }

    pub fn slope(&self, scheme: SchemeTag, metric: &str) -> Option<f64> {
        self.dof
            .iter()
            .find(|d| d.scheme == scheme && d.metric == metric)
            .map(|d| d.slope)
    }
}

/// Mean and standard error (sample standard deviation over `sqrt(n)`).
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(OjsError::DegenerateWindow);
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(OjsError::DegenerateWindow);
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// Runs `f` on a dedicated rayon pool with `workers` threads (the global
/// pool when `None`).
pub fn with_workers<T, F>(workers: Option<usize>, f: F) -> Result<T>
where
    T: Send,
    F: FnOnce() -> Result<T> + Send,
{
    match workers {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| OjsError::Spec(format!("cannot build worker pool: {e}")))?
            .install(f),
    }
}

fn prefix(realization: &ChannelRealization, s: usize) -> ChannelRealization {
    ChannelRealization {
        h0: realization.h0.clone(),
        h_jam: realization.h_jam[..s].to_vec(),
        g0: realization.g0.clone(),
        g_jam: realization.g_jam[..s].to_vec(),
    }
}

/// Every record of one trial, ordered by (grid point, scheme).
fn run_trial(spec: &ExperimentSpec, powers: &[f64], pools: &[usize], trial: usize) -> Result<Vec<TrialRecord>> {
    let stream = SeededRng::new(spec.seed, trial as u64);
    let largest = pools.iter().copied().max().unwrap_or(spec.config.s);
    let full_config = spec.config.with_pool(largest);
    let full = ChannelRealization::sample(&full_config, stream);
    let mut out = Vec::with_capacity(powers.len() * spec.schemes.len());
    for (g, (&power, &pool)) in powers.iter().zip(pools).enumerate() {
        let config = spec.config.with_pool(pool);
        let realization = if pool == largest { full.clone() } else { prefix(&full, pool) };
        let selector = Selector::new(&realization, &config, power).with_mode(spec.search);
        for &scheme in &spec.schemes {
            let selection = selector.select(scheme, stream.substream(RANDOM_SELECTION_TAG))?;
            let report = evaluate(&realization, &config, &selection, power);
            out.push(TrialRecord {
                snr_db: spec.snr_grid_db[g],
                power,
                pool_size: pool,
                scheme,
                trial_index: trial,
                r_bob: report.r_bob,
                c_eve: report.c_eve,
                secrecy: report.secrecy,
                r_bob_loss: report.r_bob_loss,
                c_bob: report.c_bob,
            });
        }
    }
    Ok(out)
}

fn run_records(spec: &ExperimentSpec) -> Result<Vec<TrialRecord>> {
    let powers = spec.powers();
    let pools = spec.pool_sizes();
    spec.check_subset_cap(&pools)?;
    let per_trial = (0..spec.trials)
        .into_par_iter()
        .map(|t| run_trial(spec, &powers, &pools, t))
        .collect::<Result<Vec<_>>>()?;
    // (trial, grid, scheme) -> (grid, scheme, trial)
    let cells = powers.len() * spec.schemes.len();
    let mut records = Vec::with_capacity(cells * spec.trials);
    for cell in 0..cells {
        for trial in &per_trial {
            records.push(trial[cell].clone());
        }
    }
    Ok(records)
}

fn summarize(spec: &ExperimentSpec, records: &[TrialRecord]) -> Vec<SummaryRow> {
    records
        .chunks(spec.trials)
        .map(|chunk| {
            let first = &chunk[0];
            let pick = |f: fn(&TrialRecord) -> f64| chunk.iter().map(f).collect::<Vec<_>>();
            let (mean_r_bob, stderr_r_bob) = mean_stderr(&pick(|r| r.r_bob));
            let (mean_c_eve, stderr_c_eve) = mean_stderr(&pick(|r| r.c_eve));
            let (mean_secrecy, stderr_secrecy) = mean_stderr(&pick(|r| r.secrecy));
            SummaryRow {
                snr_db: first.snr_db,
                power: first.power,
                pool_size: first.pool_size,
                scheme: first.scheme,
                mean_r_bob,
                mean_c_eve,
                mean_secrecy,
                stderr_secrecy,
                stderr_r_bob,
                stderr_c_eve,
            }
        })
        .collect()
}

fn fit_dof(spec: &ExperimentSpec, summary: &[SummaryRow]) -> Vec<DofRow> {
    if spec.snr_grid_db.len() < 2 {
        return Vec::new();
    }
    let metrics: [(&'static str, fn(&SummaryRow) -> f64); 3] = [
        ("r_bob", |r| r.mean_r_bob),
        ("c_eve", |r| r.mean_c_eve),
        ("secrecy", |r| r.mean_secrecy),
    ];
    let mut rows = Vec::new();
    for &scheme in &spec.schemes {
        let scheme_rows: Vec<&SummaryRow> = summary.iter().filter(|r| r.scheme == scheme).collect();
        for (metric, get) in metrics {
            let points: Vec<(f64, f64)> = scheme_rows.iter().map(|r| (r.power, get(r))).collect();
            if let Ok(est) = dof_slope_top(&points, spec.dof_window) {
                rows.push(DofRow {
                    scheme,
                    metric,
                    slope: est.slope,
                    window_points: est.window.len(),
                });
            }
        }
    }
    rows
}

fn expect_mode(spec: &ExperimentSpec, mode: Mode) -> Result<()> {
    if spec.mode != mode {
        return Err(OjsError::Spec(format!(
            "expected a {mode:?} spec, got {:?}",
            spec.mode
        )));
    }
    spec.validate()
}

fn sweep(spec: &ExperimentSpec) -> Result<SweepOutput> {
    let records = run_records(spec)?;
    let summary = summarize(spec, &records);
    let dof = fit_dof(spec, &summary);
    Ok(SweepOutput { records, summary, dof })
}

/// SNR sweep with a fixed jammer pool of `config.s`. Each trial reuses its
/// channel draw across grid points and schemes.
pub fn run_fixed_sweep(spec: &ExperimentSpec) -> Result<SweepOutput> {
    expect_mode(spec, Mode::FixedSweep)?;
    sweep(spec)
}

/// SNR sweep where the pool grows with power as `max(K, round(c P^a))`.
/// Pools at lower power are prefixes of the pool at the highest power.
pub fn run_scaling_sweep(spec: &ExperimentSpec) -> Result<SweepOutput> {
    expect_mode(spec, Mode::ScalingSweep)?;
    sweep(spec)
}

/// Mean `[R_Bob - r]^+` at one grid point for one scheme.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutageRateRow {
    pub snr_db: f64,
    pub power: f64,
    pub pool_size: usize,
    pub scheme: SchemeTag,
    pub r: f64,
    pub mean_r_bob: f64,
    pub mean_outage_secrecy: f64,
    pub stderr_outage_secrecy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutageOutput {
    /// `(r, Pr{R >= r})` over the rate grid.
    pub curve: Vec<(f64, f64)>,
    pub epsilon: f64,
    /// Code rate whose empirical outage is at most `epsilon`.
    pub r: f64,
    pub rows: Vec<OutageRateRow>,
    pub dof: Vec<DofRow>,
    pub sample_count: usize,
}

/// Secrecy outage: the empirical distribution of Eve's saturated rate, its
/// survival curve, and Bob's `[R_Bob - r]^+` at the `epsilon` code rate.
pub fn run_outage(spec: &ExperimentSpec) -> Result<OutageOutput> {
    expect_mode(spec, Mode::Outage)?;
    let samples = sample_eve_rate_distribution(&spec.config, spec.trials, spec.seed)?;
    let grid = match &spec.outage_r_grid {
        Some(g) => g.clone(),
        None => {
            let max = samples.values().iter().copied().fold(0.0_f64, f64::max);
            (0..=40).map(|i| max * i as f64 / 40.0).collect()
        }
    };
    let curve = outage_curve(&samples, &grid);
    let r = rate_for_outage(&samples, spec.epsilon)?;

    // Bob's rates come from an independent set of channel streams.
    let mut bob_spec = spec.clone();
    bob_spec.seed = SeededRng::new(spec.seed, 0).substream(2).seed;
    let records = run_records(&bob_spec)?;
    let rows: Vec<OutageRateRow> = records
        .chunks(spec.trials)
        .map(|chunk| {
            let first = &chunk[0];
            let r_bob: Vec<f64> = chunk.iter().map(|c| c.r_bob).collect();
            let clipped: Vec<f64> = r_bob.iter().map(|&b| secrecy_rate(b, r)).collect();
            let (mean_outage_secrecy, stderr_outage_secrecy) = mean_stderr(&clipped);
            OutageRateRow {
                snr_db: first.snr_db,
                power: first.power,
                pool_size: first.pool_size,
                scheme: first.scheme,
                r,
                mean_r_bob: mean_stderr(&r_bob).0,
                mean_outage_secrecy,
                stderr_outage_secrecy,
            }
        })
        .collect();
    let mut dof = Vec::new();
    for &scheme in &spec.schemes {
        let mine: Vec<&OutageRateRow> = rows.iter().filter(|r| r.scheme == scheme).collect();
        let metrics: [(&'static str, fn(&OutageRateRow) -> f64); 2] = [
            ("r_bob", |r| r.mean_r_bob),
            ("outage_secrecy", |r| r.mean_outage_secrecy),
        ];
        for (metric, get) in metrics {
            let points: Vec<(f64, f64)> = mine.iter().map(|r| (r.power, get(r))).collect();
            if let Ok(est) = dof_slope_top(&points, spec.dof_window) {
                dof.push(DofRow {
                    scheme,
                    metric,
                    slope: est.slope,
                    window_points: est.window.len(),
                });
            }
        }
    }
    Ok(OutageOutput {
        curve,
        epsilon: spec.epsilon,
        r,
        rows,
        dof,
        sample_count: samples.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringRow {
    pub m: usize,
    pub rep: usize,
    pub estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringSummary {
    pub m: usize,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringOutput {
    pub rows: Vec<CoveringRow>,
    pub summary: Vec<CoveringSummary>,
    /// Least-squares slope of `log(mean estimate)` against `log(M)`.
    pub log_log_slope: Option<f64>,
}

/// Covering radius of random `(nr - nt)`-dimensional codebooks in `C^nr`,
/// probed with `nj`-dimensional samples.
///
/// Within a repetition the codebooks are nested (the size-`M` codebook is
/// the first `M` codewords of the largest one) and share one sample set, so
/// the estimates of a repetition are non-increasing in `M`.
pub fn run_covering(spec: &ExperimentSpec) -> Result<CoveringOutput> {
    expect_mode(spec, Mode::Covering)?;
    let c = spec.config;
    let code_dim = c.nr - c.nt;
    let largest = spec.covering_ms.iter().copied().max().unwrap_or(1);
    let per_rep = (0..spec.covering_reps)
        .into_par_iter()
        .map(|rep| -> Result<Vec<f64>> {
            let mut rng = SeededRng::new(spec.seed, rep as u64).rng();
            let words: Vec<_> = (0..largest).map(|_| random_subspace(c.nr, code_dim, &mut rng)).collect();
            let samples: Vec<_> = (0..spec.covering_samples)
                .map(|_| random_subspace(c.nr, c.nj, &mut rng))
                .collect();
            spec.covering_ms
                .iter()
                .map(|&m| SubspaceCodebook::new(words[..m].to_vec())?.covering_radius_over(&samples))
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for (i, &m) in spec.covering_ms.iter().enumerate() {
        let values: Vec<f64> = per_rep.iter().map(|r| r[i]).collect();
        for (rep, &estimate) in values.iter().enumerate() {
            rows.push(CoveringRow { m, rep, estimate });
        }
        let (mean, stderr) = mean_stderr(&values);
        summary.push(CoveringSummary { m, mean, stderr });
    }
    let xs: Vec<f64> = summary.iter().map(|s| (s.m as f64).ln()).collect();
    let ys: Vec<f64> = summary.iter().map(|s| s.mean.ln()).collect();
    let log_log_slope = if ys.iter().all(|y| y.is_finite()) {
        least_squares_slope(&xs, &ys).ok()
    } else {
        None
    };
    Ok(CoveringOutput {
        rows,
        summary,
        log_log_slope,
    })
}

/// Result of any experiment mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ExperimentOutput {
    Sweep(SweepOutput),
    Outage(OutageOutput),
    Covering(CoveringOutput),
}

/// Runs `spec` on `workers` threads.
pub fn run(spec: &ExperimentSpec, workers: Option<usize>) -> Result<ExperimentOutput> {
    with_workers(workers, || match spec.mode {
        Mode::FixedSweep => run_fixed_sweep(spec).map(ExperimentOutput::Sweep),
        Mode::ScalingSweep => run_scaling_sweep(spec).map(ExperimentOutput::Sweep),
        Mode::Outage => run_outage(spec).map(ExperimentOutput::Outage),
        Mode::Covering => run_covering(spec).map(ExperimentOutput::Covering),
    })
}

/// Files written for one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct WrittenFiles {
    pub primary: PathBuf,
    pub extra: Vec<PathBuf>,
}
