//! Flat `key = value` experiment configuration files.
//!
//! ```text
//! # fixed-pool sweep
//! nt = 2
//! nj = 2
//! nr = 4
//! ne = 4
//! k = 2
//! s = 50
//! snr_db = 0, 5, 10, 15, 20, 25, 30
//! trials = 300
//! schemes = OJS1, OJS2, CAPMAX_BOB
//! ```
//!
//! Lists are comma separated. `#` starts a comment.

use std::collections::BTreeMap;

use crate::channel::SystemConfig;
use crate::error::{OjsError, Result};
use crate::grassmann::DEFAULT_COVERING_SAMPLES;
use crate::rates::{DEFAULT_DOF_WINDOW, DEFAULT_KAPPA2};
use crate::selection::{SchemeTag, SearchMode};

use super::{ExperimentSpec, Mode, PoolScaling, DEFAULT_SUBSET_CAP};

const KNOWN_KEYS: &[&str] = &[
    "nt",
    "nj",
    "nr",
    "ne",
    "k",
    "s",
    "snr_db",
    "trials",
    "schemes",
    "scaling_c",
    "scaling_a",
    "kappa2",
    "covering_ms",
    "covering_samples",
    "covering_reps",
    "seed",
    "allow_nonstandard",
    "epsilon",
    "outage_r",
    "greedy",
    "subset_cap",
    "dof_window",
];

/// Parses `key = value` lines into a map, rejecting unknown or repeated keys.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            OjsError::Spec(format!("line {}: expected `key = value`", lineno + 1))
        })?;
        let key = key.trim().to_ascii_lowercase();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(OjsError::Spec(format!("line {}: unknown key `{key}`", lineno + 1)));
        }
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(OjsError::Spec(format!("line {}: duplicate key `{key}`", lineno + 1)));
        }
    }
    Ok(map)
}

fn parse_scalar<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| OjsError::Spec(format!("`{key}`: cannot parse `{value}`")))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| parse_scalar(key, v))
        .collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        other => Err(OjsError::Spec(format!("`{key}`: expected a boolean, got `{other}`"))),
    }
}

struct Lookup(BTreeMap<String, String>);

impl Lookup {
    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.0.get(key).map(|v| parse_scalar(key, v)).transpose()
    }

    fn require<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?
            .ok_or_else(|| OjsError::Spec(format!("missing required key `{key}`")))
    }

    fn list<T: std::str::FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        self.0.get(key).map(|v| parse_list(key, v)).transpose()
    }

    fn flag(&self, key: &str) -> Result<bool> {
        self.0.get(key).map_or(Ok(false), |v| parse_bool(key, v))
    }

    fn has(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }
}

/// Builds an experiment spec for `mode` from configuration text.
///
/// Defaults: `k = 2`; `s = k` (scaling mode derives `s` per grid point);
/// `ne = k * nj` in covering mode; `trials = 100`; `schemes = OJS1`;
/// `seed = 0`; `epsilon = 0.1`; `covering_samples = 2000`;
/// `covering_reps = 3`; `kappa2 = 1`.
pub fn spec_from_str(mode: Mode, text: &str) -> Result<ExperimentSpec> {
    let kv = Lookup(parse_key_values(text)?);
    let nt: usize = kv.require("nt")?;
    let nj: usize = kv.require("nj")?;
    let nr: usize = kv.require("nr")?;
    let k: usize = kv.get("k")?.unwrap_or(2);
    let ne: usize = match mode {
        Mode::Covering => kv.get("ne")?.unwrap_or(k * nj),
        _ => kv.require("ne")?,
    };
    let s: usize = kv.get("s")?.unwrap_or(k);
    let scaling = match (kv.has("scaling_c"), kv.has("scaling_a")) {
        (false, false) => None,
        _ => Some(PoolScaling {
            coefficient: kv.require("scaling_c")?,
            exponent: kv.require("scaling_a")?,
        }),
    };
    let schemes = match kv.0.get("schemes") {
        Some(v) => v
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse::<SchemeTag>)
            .collect::<Result<Vec<_>>>()?,
        None => vec![SchemeTag::Ojs1],
    };
    let spec = ExperimentSpec {
        mode,
        config: SystemConfig::new(nt, nj, nr, ne, k, s),
        allow_nonstandard: kv.flag("allow_nonstandard")?,
        snr_grid_db: kv.list("snr_db")?.unwrap_or_default(),
        trials: kv.get("trials")?.unwrap_or(100),
        schemes,
        scaling,
        seed: kv.get("seed")?.unwrap_or(0),
        kappa2: kv.get("kappa2")?.unwrap_or(DEFAULT_KAPPA2),
        epsilon: kv.get("epsilon")?.unwrap_or(0.1),
        outage_r_grid: kv.list("outage_r")?,
        covering_ms: kv.list("covering_ms")?.unwrap_or_else(|| vec![2, 8, 32, 128]),
        covering_samples: kv.get("covering_samples")?.unwrap_or(DEFAULT_COVERING_SAMPLES),
        covering_reps: kv.get("covering_reps")?.unwrap_or(3),
        search: if kv.flag("greedy")? {
            SearchMode::Greedy
        } else {
            SearchMode::Exhaustive
        },
        subset_cap: kv.get("subset_cap")?.unwrap_or(DEFAULT_SUBSET_CAP),
        dof_window: kv.get("dof_window")?.unwrap_or(DEFAULT_DOF_WINDOW),
    };
    spec.validate()?;
    Ok(spec)
}
