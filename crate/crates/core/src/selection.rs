//! Jammer subset selection.
//!
//! Bob scores every `K`-subset of the pool and keeps the best one. The two
//! opportunistic criteria (OJS1 on the raw channel Grams, OJS2 on the
//! jamming subspaces) minimize the product of `1 + c * lambda_n` over the
//! `nt` smallest eigenvalues of the summed jamming matrix. Baselines are a
//! uniform random pick, Bob's capacity maximizer, and a global-CSI secrecy
//! maximizer.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelRealization, SeededRng, SystemConfig};
use crate::error::{OjsError, Result};
use crate::grassmann::SubspaceBasis;
use crate::linalg::{gram, hermitian_asymmetry, hermitian_eigen_desc, hermitian_eigenvalues_desc, hermitian_part, CMatrix};
use crate::rates::{self, coefficients};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SchemeTag {
    #[serde(rename = "OJS1")]
    Ojs1,
    #[serde(rename = "OJS2")]
    Ojs2,
    #[serde(rename = "RANDOM")]
    Random,
    #[serde(rename = "CAPMAX_BOB")]
    CapmaxBob,
    #[serde(rename = "SECRECY_MAX")]
    SecrecyMax,
}

impl SchemeTag {
    pub const ALL: [SchemeTag; 5] = [
        SchemeTag::Ojs1,
        SchemeTag::Ojs2,
        SchemeTag::Random,
        SchemeTag::CapmaxBob,
        SchemeTag::SecrecyMax,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SchemeTag::Ojs1 => "OJS1",
            SchemeTag::Ojs2 => "OJS2",
            SchemeTag::Random => "RANDOM",
            SchemeTag::CapmaxBob => "CAPMAX_BOB",
            SchemeTag::SecrecyMax => "SECRECY_MAX",
        }
    }
}

impl fmt::Display for SchemeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeTag {
    type Err = OjsError;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        SchemeTag::ALL
            .into_iter()
            .find(|tag| tag.as_str() == upper)
            .ok_or_else(|| OjsError::Spec(format!("unknown scheme `{s}`")))
    }
}

/// How the subset space is searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    /// Every `K`-subset, lexicographic order.
    #[default]
    Exhaustive,
    /// Approximate: the best pair is found exhaustively, then the subset
    /// grows one jammer at a time, each time adding the jammer that gives
    /// the best criterion value.
    Greedy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    /// Sorted, distinct jammer indices.
    pub indices: Vec<usize>,
    /// Scheme-specific score at the chosen subset; `None` for random picks.
    pub objective: Option<f64>,
    /// Bob's receive filter `V` (`nr x nt`).
    pub postprocessor: SubspaceBasis,
    pub scheme: SchemeTag,
}

/// Sorted `k`-subsets of `0..s` in lexicographic order.
pub fn enumerate_subsets(s: usize, k: usize) -> Result<impl Iterator<Item = Vec<usize>>> {
    if k > s {
        return Err(OjsError::KTooLarge { k, s });
    }
    Ok((0..s).combinations(k))
}

/// `C(n, k)` without overflow for the sizes used here.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Orthonormal basis for the eigenspace of the `nt` smallest eigenvalues of
/// a Hermitian matrix.
pub fn build_postprocessor(b: &CMatrix, nt: usize) -> Result<SubspaceBasis> {
    let asymmetry = hermitian_asymmetry(b);
    if !(asymmetry <= 1e-9) {
        return Err(OjsError::NotHermitian { asymmetry });
    }
    let n = b.nrows();
    if nt == 0 || nt > n {
        return Err(OjsError::DimensionMismatch(format!(
            "cannot take {nt} eigenvectors of a {n}x{n} matrix"
        )));
    }
    let (_, vectors) = hermitian_eigen_desc(&hermitian_part(b));
    Ok(SubspaceBasis::from_orthonormal(
        vectors.columns(n - nt, nt).into_owned(),
    ))
}

/// `prod_{n > N_r - nt} (1 + coeff * lambda_n(sum))`, eigenvalues clamped at
/// zero.
pub fn loss_product(sum: &CMatrix, nt: usize, coeff: f64) -> f64 {
    let eig = hermitian_eigenvalues_desc(sum);
    eig[eig.len() - nt..]
        .iter()
        .map(|&l| 1.0 + coeff * l.max(0.0))
        .product()
}

fn sum_of(mats: &[CMatrix], subset: &[usize]) -> CMatrix {
    let mut acc = mats[subset[0]].clone();
    for &i in &subset[1..] {
        acc += &mats[i];
    }
    acc
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Goal {
    Minimize,
    Maximize,
}

impl Goal {
    fn improves(self, candidate: f64, incumbent: f64) -> bool {
        match self {
            Goal::Minimize => candidate < incumbent,
            Goal::Maximize => candidate > incumbent,
        }
    }
}

/// Finds the best subset; ties keep the lexicographically smallest.
fn search<F>(s: usize, k: usize, mode: SearchMode, goal: Goal, mut score: F) -> Result<(Vec<usize>, f64)>
where
    F: FnMut(&[usize]) -> Result<f64>,
{
    if k > s {
        return Err(OjsError::KTooLarge { k, s });
    }
    if k == 0 {
        return Err(OjsError::InvalidConfig("k must be positive".into()));
    }
    let exhaustive_k = match mode {
        SearchMode::Exhaustive => k,
        SearchMode::Greedy => k.min(2),
    };
    let mut best: Option<(Vec<usize>, f64)> = None;
    for subset in (0..s).combinations(exhaustive_k) {
        let value = score(&subset)?;
        if best.as_ref().is_none_or(|(_, b)| goal.improves(value, *b)) {
            best = Some((subset, value));
        }
    }
    let (mut chosen, mut value) = best.expect("at least one subset exists");
    while chosen.len() < k {
        let mut step: Option<(Vec<usize>, f64)> = None;
        for candidate in (0..s).filter(|i| !chosen.contains(i)) {
            let mut trial = chosen.clone();
            trial.push(candidate);
            trial.sort_unstable();
            let v = score(&trial)?;
            let better = match &step {
                None => true,
                Some((incumbent, b)) => goal.improves(v, *b) || (v == *b && trial < *incumbent),
            };
            if better {
                step = Some((trial, v));
            }
        }
        (chosen, value) = step.expect("pool has a free jammer");
    }
    Ok((chosen, value))
}

/// Selection parameters shared by all schemes.
#[derive(Debug, Clone, Copy)]
pub struct Selector<'a> {
    pub realization: &'a ChannelRealization,
    pub config: &'a SystemConfig,
    pub power: f64,
    pub mode: SearchMode,
}

impl<'a> Selector<'a> {
    pub fn new(realization: &'a ChannelRealization, config: &'a SystemConfig, power: f64) -> Self {
        Self {
            realization,
            config,
            power,
            mode: SearchMode::Exhaustive,
        }
    }

    pub fn with_mode(self, mode: SearchMode) -> Self {
        Self { mode, ..self }
    }

    fn pool(&self) -> usize {
        self.realization.pool_size()
    }

    fn bob_grams(&self) -> Vec<CMatrix> {
        self.realization.h_jam.iter().map(gram).collect()
    }

    fn eigen_criterion(&self, mats: &[CMatrix], coeff: f64, scheme: SchemeTag) -> Result<SelectionResult> {
        let nt = self.config.nt;
        let (indices, objective) = search(self.pool(), self.config.k, self.mode, Goal::Minimize, |subset| {
            Ok(loss_product(&sum_of(mats, subset), nt, coeff))
        })?;
        let postprocessor = build_postprocessor(&hermitian_part(&sum_of(mats, &indices)), nt)?;
        Ok(SelectionResult {
            indices,
            objective: Some(objective),
            postprocessor,
            scheme,
        })
    }

    /// Minimum DoF loss selection on the channel Grams with coefficient `P/nj`.
    pub fn ojs1(&self) -> Result<SelectionResult> {
        let (_, jam) = coefficients(self.power, self.config);
        self.eigen_criterion(&self.bob_grams(), jam, SchemeTag::Ojs1)
    }

    /// Subspace-based selection on the jamming projectors with coefficient `P`.
    pub fn ojs2(&self) -> Result<SelectionResult> {
        let projectors = self
            .realization
            .h_jam
            .iter()
            .map(|h| SubspaceBasis::orthonormal_basis(h).map(|b| b.projector()))
            .collect::<Result<Vec<_>>>()?;
        self.eigen_criterion(&projectors, self.power, SchemeTag::Ojs2)
    }

    /// Uniform random `K`-subset; `V` is the OJS1 filter for that subset.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<SelectionResult> {
        let indices = random_subset(self.pool(), self.config.k, rng)?;
        let sum = sum_of(&self.bob_grams(), &indices);
        Ok(SelectionResult {
            postprocessor: build_postprocessor(&hermitian_part(&sum), self.config.nt)?,
            indices,
            objective: None,
            scheme: SchemeTag::Random,
        })
    }

    /// Maximizes Bob's capacity (jamming treated as noise, no filter).
    pub fn capacity_max(&self) -> Result<SelectionResult> {
        let grams = self.bob_grams();
        let (signal, jam) = coefficients(self.power, self.config);
        let h0 = &self.realization.h0;
        let (indices, objective) = search(self.pool(), self.config.k, self.mode, Goal::Maximize, |subset| {
            Ok(rates::whitened_log_det(h0, &sum_of(&grams, subset), signal, jam))
        })?;
        let sum = sum_of(&grams, &indices);
        Ok(SelectionResult {
            postprocessor: build_postprocessor(&hermitian_part(&sum), self.config.nt)?,
            indices,
            objective: Some(objective),
            scheme: SchemeTag::CapmaxBob,
        })
    }

    /// Maximizes `[R_Bob - C_Eve]^+` with knowledge of every channel; Bob
    /// uses the OJS1 filter of each candidate subset.
    pub fn secrecy_max(&self) -> Result<SelectionResult> {
        let grams = self.bob_grams();
        let eve_grams: Vec<CMatrix> = self.realization.g_jam.iter().map(gram).collect();
        let (signal, jam) = coefficients(self.power, self.config);
        let nt = self.config.nt;
        let h0 = &self.realization.h0;
        let g0 = &self.realization.g0;
        let (indices, objective) = search(self.pool(), self.config.k, self.mode, Goal::Maximize, |subset| {
            let sum = hermitian_part(&sum_of(&grams, subset));
            let v = build_postprocessor(&sum, nt)?;
            let r_bob = rates::bob_rate_from_gram(h0, &sum, v.matrix(), signal, jam);
            let c_eve = rates::whitened_log_det(g0, &sum_of(&eve_grams, subset), signal, jam);
            Ok(rates::secrecy_rate(r_bob, c_eve))
        })?;
        let sum = sum_of(&grams, &indices);
        Ok(SelectionResult {
            postprocessor: build_postprocessor(&hermitian_part(&sum), nt)?,
            indices,
            objective: Some(objective),
            scheme: SchemeTag::SecrecyMax,
        })
    }

    /// Dispatches on `scheme`; `rng` is only consumed by the random baseline.
    pub fn select(&self, scheme: SchemeTag, rng: SeededRng) -> Result<SelectionResult> {
        match scheme {
            SchemeTag::Ojs1 => self.ojs1(),
            SchemeTag::Ojs2 => self.ojs2(),
            SchemeTag::Random => self.random(&mut rng.rng()),
            SchemeTag::CapmaxBob => self.capacity_max(),
            SchemeTag::SecrecyMax => self.secrecy_max(),
        }
    }
}

/// Uniformly random sorted `k`-subset of `0..s`.
pub fn random_subset<R: Rng + ?Sized>(s: usize, k: usize, rng: &mut R) -> Result<Vec<usize>> {
    if k > s {
        return Err(OjsError::KTooLarge { k, s });
    }
    let mut indices = rand::seq::index::sample(rng, s, k).into_vec();
    indices.sort_unstable();
    Ok(indices)
}

pub fn select_ojs1(realization: &ChannelRealization, config: &SystemConfig, power: f64) -> Result<SelectionResult> {
    Selector::new(realization, config, power).ojs1()
}

pub fn select_ojs2(realization: &ChannelRealization, config: &SystemConfig, power: f64) -> Result<SelectionResult> {
    Selector::new(realization, config, power).ojs2()
}

/// Random baseline. Needs the Bob-side channels only to build `V`.
pub fn select_random(realization: &ChannelRealization, config: &SystemConfig, rng: SeededRng) -> Result<SelectionResult> {
    Selector::new(realization, config, 1.0).random(&mut rng.rng())
}

pub fn select_capacity_max(
    realization: &ChannelRealization,
    config: &SystemConfig,
    power: f64,
) -> Result<SelectionResult> {
    Selector::new(realization, config, power).capacity_max()
}

pub fn select_secrecy_max(
    realization: &ChannelRealization,
    config: &SystemConfig,
    power: f64,
) -> Result<SelectionResult> {
    Selector::new(realization, config, power).secrecy_max()
}

/// All rates for `selection` on `realization` at transmit power `power`.
pub fn evaluate(
    realization: &ChannelRealization,
    config: &SystemConfig,
    selection: &SelectionResult,
    power: f64,
) -> rates::RateReport {
    let bob = realization.bob_jammers(&selection.indices);
    let eve = realization.eve_jammers(&selection.indices);
    let v = selection.postprocessor.matrix();
    let c_bob = rates::bob_capacity(&realization.h0, &bob, power, config);
    let r_bob = rates::bob_rate(&realization.h0, &bob, v, power, config);
    let r_bob_loss = rates::bob_jamming_loss(&bob, v, power, config);
    let c_eve = rates::eve_capacity(&realization.g0, &eve, power, config);
    rates::RateReport {
        c_bob,
        r_bob,
        r_bob_loss,
        c_eve,
        secrecy: rates::secrecy_rate(r_bob, c_eve),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::complex_gaussian_matrix;
    use nalgebra::DVector;
    use num_complex::Complex64;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag(values: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&DVector::from_iterator(
            values.len(),
            values.iter().map(|&v| Complex64::new(v, 0.0)),
        ))
    }

    #[test]
    fn subsets_of_four_choose_two() {
        let all: Vec<_> = enumerate_subsets(4, 2).unwrap().collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all.first().unwrap(), &vec![0, 1]);
        assert_eq!(all.last().unwrap(), &vec![2, 3]);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn subsets_edge_cases() {
        let all: Vec<_> = enumerate_subsets(3, 3).unwrap().collect();
        assert_eq!(all, vec![vec![0, 1, 2]]);
        assert_eq!(enumerate_subsets(10, 3).unwrap().count(), 120);
        assert!(matches!(enumerate_subsets(2, 3), Err(OjsError::KTooLarge { k: 3, s: 2 })));
        assert_eq!(binomial(10, 3), 120);
        assert_eq!(binomial(501, 2), 125_250);
        assert_eq!(binomial(2, 3), 0);
    }

    #[test]
    fn postprocessor_of_diagonal() {
        let v = build_postprocessor(&diag(&[3.0, 2.0, 1.0]), 1).unwrap();
        assert!((v.matrix()[(2, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn postprocessor_of_identity() {
        let b = diag(&[1.0, 1.0, 1.0, 1.0]);
        let v = build_postprocessor(&b, 2).unwrap();
        let t = (v.matrix().adjoint() * &b * v.matrix()).trace().re;
        assert!((t - 2.0).abs() < 1e-12);
        assert!(v.orthonormality_residual() < 1e-10);
    }

    #[test]
    fn postprocessor_rejects_non_hermitian() {
        let mut b = diag(&[1.0, 2.0]);
        b[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(build_postprocessor(&b, 1), Err(OjsError::NotHermitian { .. })));
    }

    #[test]
    fn shared_column_space_is_selected() {
        let cfg = SystemConfig::new(1, 2, 3, 3, 2, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut r = ChannelRealization::sample_with(&cfg, &mut rng);
        let u = complex_gaussian_matrix(2, 2, &mut rng);
        r.h_jam[1] = &r.h_jam[0] * u;
        let sel = select_ojs1(&r, &cfg, 100.0).unwrap();
        assert_eq!(sel.indices, vec![0, 1]);
        assert!((sel.objective.unwrap() - 1.0).abs() < 1e-9);
        let sel2 = select_ojs2(&r, &cfg, 100.0).unwrap();
        assert_eq!(sel2.indices, vec![0, 1]);
    }

    #[test]
    fn single_subset_pool() {
        let cfg = SystemConfig::new(2, 2, 4, 4, 2, 2);
        let r = ChannelRealization::sample(&cfg, SeededRng::new(4, 0));
        for scheme in SchemeTag::ALL {
            let sel = Selector::new(&r, &cfg, 10.0).select(scheme, SeededRng::new(1, 1)).unwrap();
            assert_eq!(sel.indices, vec![0, 1]);
            assert_eq!(sel.scheme, scheme);
        }
        let direct = loss_product(&(gram(&r.h_jam[0]) + gram(&r.h_jam[1])), 2, 5.0);
        assert!((select_ojs1(&r, &cfg, 10.0).unwrap().objective.unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn ties_prefer_lexicographically_smallest() {
        let (subset, value) =
            search(5, 2, SearchMode::Exhaustive, Goal::Minimize, |_| Ok(1.0)).unwrap();
        assert_eq!(subset, vec![0, 1]);
        assert_eq!(value, 1.0);
        let (subset, _) = search(5, 3, SearchMode::Greedy, Goal::Maximize, |_| Ok(0.0)).unwrap();
        assert_eq!(subset, vec![0, 1, 2]);
    }

    #[test]
    fn greedy_matches_exhaustive_for_pairs() {
        let cfg = SystemConfig::new(1, 2, 3, 3, 2, 7);
        let r = ChannelRealization::sample(&cfg, SeededRng::new(21, 0));
        let a = Selector::new(&r, &cfg, 50.0).ojs1().unwrap();
        let b = Selector::new(&r, &cfg, 50.0).with_mode(SearchMode::Greedy).ojs1().unwrap();
        assert_eq!(a.indices, b.indices);
    }

    #[test]
    fn greedy_triples_are_valid() {
        let cfg = SystemConfig::new(2, 1, 4, 3, 3, 8);
        let r = ChannelRealization::sample(&cfg, SeededRng::new(2, 2));
        let exact = Selector::new(&r, &cfg, 50.0).ojs1().unwrap();
        let greedy = Selector::new(&r, &cfg, 50.0).with_mode(SearchMode::Greedy).ojs1().unwrap();
        assert_eq!(greedy.indices.len(), 3);
        assert!(greedy.indices.windows(2).all(|w| w[0] < w[1]));
        assert!(exact.objective.unwrap() <= greedy.objective.unwrap() + 1e-12);
    }

    #[test]
    fn scheme_names_round_trip() {
        for tag in SchemeTag::ALL {
            assert_eq!(tag.as_str().parse::<SchemeTag>().unwrap(), tag);
        }
        assert_eq!("ojs2".parse::<SchemeTag>().unwrap(), SchemeTag::Ojs2);
        assert!("best".parse::<SchemeTag>().is_err());
    }

    #[test]
    fn random_pick_deterministic_and_sorted() {
        let cfg = SystemConfig::new(2, 2, 4, 4, 2, 9);
        let r = ChannelRealization::sample(&cfg, SeededRng::new(4, 0));
        let a = select_random(&r, &cfg, SeededRng::new(3, 7)).unwrap();
        let b = select_random(&r, &cfg, SeededRng::new(3, 7)).unwrap();
        assert_eq!(a, b);
        assert!(a.objective.is_none());
        assert!(a.indices.windows(2).all(|w| w[0] < w[1]));
    }
}
