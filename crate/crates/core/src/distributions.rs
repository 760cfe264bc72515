//! Survival curves of rescaled entry and return times.
//!
//! Curves live on a fixed grid `t_k = k dt`. A sample with raw time `r` and
//! rescaling measure `mu` survives at `t` iff `r > floor(t / mu)`, i.e.
//! `F(t) = P(tau > floor(t/mu))`. Right-censored samples survive at every grid
//! point, which is exact as long as the grid stays below the censoring horizon.
//!
//! [`ExactChainModel`] gives the exact survival sequence for a finite Markov
//! shift by propagating mass through the chain × word-automaton product with
//! all word-completing transitions removed.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::recurrence::TimeSample;
use crate::systems::SystemInstance;

#[derive(Debug, Error, PartialEq)]
pub enum DistributionError {
    #[error("no samples")]
    Empty,
    #[error("grid needs 0 < dt <= t_max, got t_max={t_max}, dt={dt}")]
    InvalidGrid { t_max: f64, dt: f64 },
    #[error("grid reaches t={t_max} beyond the censoring horizon {horizon}")]
    GridBeyondHorizon { t_max: f64, horizon: f64 },
    #[error("survival curves are on different grids")]
    GridMismatch,
    #[error("samples were rescaled by different measures")]
    MixedMeasures,
    #[error("word has zero measure under the chain")]
    ZeroMeasure,
    #[error("invalid chain model: {0}")]
    InvalidModel(String),
}

/// `(t_max, dt)`; the grid is `0, dt, 2dt, ..., t_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub t_max: f64,
    pub dt: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { t_max: 10.0, dt: 0.05 }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), DistributionError> {
        if self.dt.is_finite() && self.t_max.is_finite() && self.dt > 0.0 && self.dt <= self.t_max {
            Ok(())
        } else {
            Err(DistributionError::InvalidGrid {
                t_max: self.t_max,
                dt: self.dt,
            })
        }
    }

    pub fn points(&self) -> Vec<f64> {
        let k = (self.t_max / self.dt).round() as usize;
        (0..=k).map(|i| i as f64 * self.dt).collect()
    }
}

/// Largest integer step count `s` with `s <= t / mu` (up to rounding at lattice points).
fn step_threshold(t: f64, mu: f64) -> u64 {
    let s = (t / mu * (1.0 + 1e-12)).floor();
    if s >= u64::MAX as f64 {
        u64::MAX
    } else {
        s as u64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSurvival {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub n_samples: usize,
    pub n_censored: usize,
    pub mu_b: f64,
}

impl EmpiricalSurvival {
    /// A survival curve from known values, e.g. a closed form on a grid.
    pub fn from_fn(grid: GridSpec, mu_b: f64, f: impl Fn(f64) -> f64) -> Self {
        let grid = grid.points();
        let values = grid.iter().map(|&t| f(t)).collect();
        Self {
            grid,
            values,
            n_samples: 0,
            n_censored: 0,
            mu_b,
        }
    }

    /// Exact step survival `seq[s] = P(tau > s)` read off at `floor(t/mu)`.
    pub fn from_exact(grid: GridSpec, mu_b: f64, seq: &[f64]) -> Self {
        Self::from_fn(grid, mu_b, |t| {
            let s = step_threshold(t, mu_b) as usize;
            seq.get(s).copied().unwrap_or(*seq.last().unwrap_or(&0.0))
        })
    }

    /// `max_k |F(t_k) - f(t_k)|`.
    pub fn sup_distance_to(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.grid
            .iter()
            .zip(&self.values)
            .map(|(&t, &v)| (v - f(t)).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_monotone(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }

    /// CSV with header `t,survival`, 10 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,survival")?;
        for (t, v) in self.grid.iter().zip(&self.values) {
            writeln!(out, "{},{}", format_significant(*t, 10), format_significant(*v, 10))?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii output")
    }
}

/// Decimal (non-exponent) rendering with `digits` significant digits.
pub fn format_significant(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{:.*}", digits.saturating_sub(1), 0.0);
    }
    let mag = v.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - mag).max(0) as usize;
    let s = format!("{:.*}", decimals, v);
    // rounding up to the next power of ten adds a digit
    let rounded: f64 = s.parse().unwrap_or(v);
    if decimals > 0 && rounded.abs() >= 10f64.powi(mag + 1) {
        format!("{:.*}", decimals - 1, v)
    } else {
        s
    }
}

/// Empirical survival of rescaled times on `grid`.
pub fn build_survival(samples: &[TimeSample], grid: GridSpec) -> Result<EmpiricalSurvival, DistributionError> {
    grid.validate()?;
    let first = samples.first().ok_or(DistributionError::Empty)?;
    let mu = first.mu;
    if samples.iter().any(|s| (s.mu - mu).abs() > 1e-12 * mu) {
        return Err(DistributionError::MixedMeasures);
    }
    let mut raw: Vec<u64> = Vec::with_capacity(samples.len());
    let mut n_censored = 0;
    for s in samples {
        match s.raw() {
            Some(r) => raw.push(r),
            None => {
                n_censored += 1;
                if s.rescaled < grid.t_max * (1.0 - 1e-12) {
                    return Err(DistributionError::GridBeyondHorizon {
                        t_max: grid.t_max,
                        horizon: s.rescaled,
                    });
                }
            }
        }
    }
    raw.sort_unstable();
    let n = samples.len() as f64;
    let points = grid.points();
    let values = points
        .iter()
        .map(|&t| {
            let th = step_threshold(t, mu);
            let at_most = raw.partition_point(|&r| r <= th);
            (raw.len() - at_most + n_censored) as f64 / n
        })
        .collect();
    Ok(EmpiricalSurvival {
        grid: points,
        values,
        n_samples: samples.len(),
        n_censored,
        mu_b: mu,
    })
}

fn same_grid(a: &EmpiricalSurvival, b: &EmpiricalSurvival) -> Result<(), DistributionError> {
    if a.grid.len() != b.grid.len() || a.grid.iter().zip(&b.grid).any(|(x, y)| (x - y).abs() > 1e-12) {
        Err(DistributionError::GridMismatch)
    } else {
        Ok(())
    }
}

/// `max_k |F1(t_k) - F2(t_k)|`.
pub fn sup_distance(a: &EmpiricalSurvival, b: &EmpiricalSurvival) -> Result<f64, DistributionError> {
    sup_distance_from(a, b, f64::NEG_INFINITY)
}

/// Sup distance restricted to grid points `t >= t_min`.
pub fn sup_distance_from(a: &EmpiricalSurvival, b: &EmpiricalSurvival, t_min: f64) -> Result<f64, DistributionError> {
    same_grid(a, b)?;
    Ok(a.grid
        .iter()
        .zip(a.values.iter().zip(&b.values))
        .filter(|(&t, _)| t >= t_min - 1e-12)
        .map(|(_, (x, y))| (x - y).abs())
        .fold(0.0, f64::max))
}

/// Outcome of the entry/return integral check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Residual {
    Bounded(f64),
    /// The return curve does not decay over its last decade; the tail cannot be closed.
    UnboundedTail,
}

impl Residual {
    pub fn value(&self) -> Option<f64> {
        match self {
            Residual::Bounded(r) => Some(*r),
            Residual::UnboundedTail => None,
        }
    }
}

/// Exponential tail mass `int_{t_K}^inf F` fitted over the trailing decade of `F`.
fn tail_mass(curve: &EmpiricalSurvival) -> Option<f64> {
    let last = *curve.values.last()?;
    if last <= 0.0 {
        return Some(0.0);
    }
    let k_end = curve.values.len() - 1;
    let mut k = k_end;
    while k > 0 && curve.values[k - 1] <= 10.0 * last {
        k -= 1;
    }
    let start = k.min(k_end.saturating_sub(1));
    let pts: Vec<(f64, f64)> = (start..=k_end)
        .filter(|&i| curve.values[i] > 0.0)
        .map(|i| (curve.grid[i], curve.values[i].ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    if !slope.is_finite() || slope >= 0.0 {
        return None;
    }
    Some(last / -slope)
}

/// `max_k |F(t_k) - int_{t_k}^inf F̃(s) ds|`, trapezoid on the grid plus a fitted tail.
pub fn integral_relation_residual(
    entry: &EmpiricalSurvival,
    ret: &EmpiricalSurvival,
) -> Result<Residual, DistributionError> {
    same_grid(entry, ret)?;
    let Some(tail) = tail_mass(ret) else {
        return Ok(Residual::UnboundedTail);
    };
    let k = ret.values.len();
    let mut integral = vec![0.0; k];
    integral[k - 1] = tail;
    for i in (0..k - 1).rev() {
        let h = ret.grid[i + 1] - ret.grid[i];
        integral[i] = integral[i + 1] + 0.5 * h * (ret.values[i] + ret.values[i + 1]);
    }
    let r = entry
        .values
        .iter()
        .zip(&integral)
        .map(|(f, i)| (f - i).abs())
        .fold(0.0, f64::max);
    Ok(Residual::Bounded(r))
}

/// Dvoretzky-Kiefer-Wolfowitz radius: `sup |F_n - F| <= eps` with probability `1 - delta`.
pub fn dkw_bound(n: usize, delta: f64) -> f64 {
    ((2.0 / delta).ln() / (2.0 * n as f64)).sqrt()
}

/// `max_s (P(tau > s) - P(tau > s+1))`.
pub fn max_jump(seq: &[f64]) -> f64 {
    seq.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurvivalMode {
    /// Start from the stationary measure.
    Entry,
    /// Start from the measure conditioned on the cylinder.
    Return,
}

/// Finite Markov shift × word automaton with the word-completing transitions removed.
///
/// The automaton here is built by brute-force suffix comparison, independently
/// of [`crate::targets::Matcher`].
#[derive(Debug, Clone)]
pub struct ExactChainModel {
    matrix: Vec<Vec<f64>>,
    stationary: Vec<f64>,
    word: Vec<u64>,
    /// `delta[node][symbol - 1]`: automaton node after feeding `symbol` at `node`.
    delta: Vec<Vec<usize>>,
}

fn longest_border_into(word: &[u64], fed: &[u64]) -> usize {
    let k_max = word.len().min(fed.len());
    (0..=k_max)
        .rev()
        .find(|&k| fed[fed.len() - k..] == word[..k])
        .unwrap_or(0)
}

impl ExactChainModel {
    pub fn new(matrix: Vec<Vec<f64>>, stationary: Vec<f64>, word: Vec<u64>) -> Result<Self, DistributionError> {
        let a = stationary.len();
        if a == 0 || matrix.len() != a || matrix.iter().any(|r| r.len() != a) {
            return Err(DistributionError::InvalidModel("matrix must be square and match the stationary vector".into()));
        }
        if word.is_empty() || word.iter().any(|&s| s == 0 || s as usize > a) {
            return Err(DistributionError::InvalidModel("word symbols must lie in 1..=alphabet".into()));
        }
        let n = word.len();
        let delta = (0..n)
            .map(|node| {
                (1..=a as u64)
                    .map(|d| {
                        let mut fed = word[..node].to_vec();
                        fed.push(d);
                        longest_border_into(&word, &fed)
                    })
                    .collect()
            })
            .collect();
        let model = Self {
            matrix,
            stationary,
            word,
            delta,
        };
        if model.measure() <= 0.0 {
            return Err(DistributionError::ZeroMeasure);
        }
        Ok(model)
    }

    /// The chain behind a finite-alphabet system.
    pub fn from_system(system: &SystemInstance, word: &[u64]) -> Result<Self, DistributionError> {
        let (m, pi) = system
            .finite_chain()
            .ok_or_else(|| DistributionError::InvalidModel(format!("{} has no finite chain", system.spec().family())))?;
        Self::new(m, pi, word.to_vec())
    }

    pub fn alphabet(&self) -> usize {
        self.stationary.len()
    }

    pub fn word(&self) -> &[u64] {
        &self.word
    }

    /// `pi(w_0) prod M(w_i, w_{i+1})`.
    pub fn measure(&self) -> f64 {
        let w = &self.word;
        let mut m = self.stationary[w[0] as usize - 1];
        for p in w.windows(2) {
            m *= self.matrix[p[0] as usize - 1][p[1] as usize - 1];
        }
        m
    }

    fn index(&self, symbol: usize, node: usize) -> usize {
        (symbol - 1) * self.word.len() + node
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        let (a, n) = (self.alphabet(), self.word.len());
        let mut out = vec![0.0; v.len()];
        for c in 1..=a {
            for node in 0..n {
                let mass = v[self.index(c, node)];
                if mass == 0.0 {
                    continue;
                }
                for d in 1..=a {
                    let next = self.delta[node][d - 1];
                    let p = self.matrix[c - 1][d - 1];
                    if next < n && p > 0.0 {
                        out[self.index(d, next)] += mass * p;
                    }
                }
            }
        }
        out
    }

    /// Row sums of the no-match operator; each `<= 1`, at least one `< 1`.
    pub fn no_match_row_sums(&self) -> Vec<f64> {
        let (a, n) = (self.alphabet(), self.word.len());
        let mut sums = Vec::with_capacity(a * n);
        for c in 1..=a {
            for node in 0..n {
                let s = (1..=a)
                    .filter(|&d| self.delta[node][d - 1] < n)
                    .map(|d| self.matrix[c - 1][d - 1])
                    .sum();
                sums.push(s);
            }
        }
        sums
    }

    /// `P(tau_B > s)` for `s = 0..=horizon`.
    ///
    /// Entry mode starts from `omega_0 ~ pi` and first feeds `omega_1..omega_{n-1}`
    /// (no occurrence can complete yet). Return mode pins the word: the chain sits
    /// at `w_{n-1}` and the automaton at the node reached by `w_1..w_{n-1}`.
    pub fn exact_survival(&self, horizon: usize, mode: SurvivalMode) -> Vec<f64> {
        let (a, n) = (self.alphabet(), self.word.len());
        let mut v = vec![0.0; a * n];
        match mode {
            SurvivalMode::Entry => {
                for c in 1..=a {
                    v[self.index(c, 0)] = self.stationary[c - 1];
                }
                for _ in 1..n {
                    v = self.apply(&v);
                }
            }
            SurvivalMode::Return => {
                let node = longest_border_into(&self.word, &self.word[1..]);
                let last = *self.word.last().unwrap() as usize;
                v[self.index(last, node)] = 1.0;
            }
        }
        let mut out = Vec::with_capacity(horizon + 1);
        out.push(1.0);
        for _ in 0..horizon {
            v = self.apply(&v);
            out.push(v.iter().sum::<f64>().min(1.0));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::Steps;
    use crate::systems::SystemSpec;

    fn hit(raw: u64, mu: f64) -> TimeSample {
        TimeSample::new(Steps::Hit(raw), mu)
    }

    #[test]
    fn point_mass_strict_survival() {
        let samples = vec![hit(4, 0.25); 10];
        let f = build_survival(&samples, GridSpec { t_max: 2.0, dt: 0.5 }).unwrap();
        assert_eq!(f.grid, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(f.values, vec![1.0, 1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn all_censored_is_one() {
        let samples = vec![TimeSample::new(Steps::Censored { cap: 100 }, 0.5); 7];
        let f = build_survival(&samples, GridSpec { t_max: 10.0, dt: 1.0 }).unwrap();
        assert!(f.values.iter().all(|&v| v == 1.0));
        assert_eq!(f.n_censored, 7);
        // horizon 50 < 60
        assert!(matches!(
            build_survival(&samples, GridSpec { t_max: 60.0, dt: 1.0 }),
            Err(DistributionError::GridBeyondHorizon { .. })
        ));
        assert_eq!(build_survival(&[], GridSpec::default()), Err(DistributionError::Empty));
    }

    #[test]
    fn exponential_samples_within_dkw() {
        // raw steps from a geometric law with tiny mu: rescaled ≈ Exp(1)
        use crate::rng::{StreamSeed, TrialRng};
        let mu = 1e-4;
        let n = 100_000;
        let mut rng = TrialRng::new(StreamSeed::new(1, 1));
        let samples: Vec<TimeSample> = (0..n)
            .map(|_| {
                let e = -rng.uniform_open0().ln();
                hit((e / mu).floor() as u64 + 1, mu)
            })
            .collect();
        let f = build_survival(&samples, GridSpec::default()).unwrap();
        let bound = dkw_bound(n, 0.01);
        assert!((bound - 0.0052).abs() < 1e-4);
        assert!(f.sup_distance_to(|t| (-t).exp()) <= 0.01);
        assert!(f.is_monotone());
    }

    #[test]
    fn sup_distance_examples() {
        let g = GridSpec::default();
        let e = EmpiricalSurvival::from_fn(g, 1.0, |t| (-t).exp());
        let one = EmpiricalSurvival::from_fn(g, 1.0, |_| 1.0);
        assert_eq!(sup_distance(&e, &e).unwrap(), 0.0);
        let d = sup_distance(&one, &e).unwrap();
        assert!((d - (1.0 - (-10f64).exp())).abs() < 1e-12);
        let other = EmpiricalSurvival::from_fn(GridSpec { t_max: 5.0, dt: 0.05 }, 1.0, |_| 1.0);
        assert_eq!(sup_distance(&e, &other), Err(DistributionError::GridMismatch));
        assert_eq!(sup_distance_from(&one, &e, 5.0).unwrap(), d);
    }

    #[test]
    fn integral_relation_exact_exponential() {
        let g = GridSpec::default();
        let e = EmpiricalSurvival::from_fn(g, 1.0, |t| (-t).exp());
        let r = integral_relation_residual(&e, &e).unwrap().value().unwrap();
        assert!(r <= g.dt * g.dt / 8.0 + 1e-9, "{r}");
    }

    #[test]
    fn integral_relation_deterministic_return() {
        let g = GridSpec::default();
        let ret = EmpiricalSurvival::from_fn(g, 1.0, |t| if t < 1.0 { 1.0 } else { 0.0 });
        let entry = EmpiricalSurvival::from_fn(g, 1.0, |t| (1.0 - t).max(0.0));
        let r = integral_relation_residual(&entry, &ret).unwrap().value().unwrap();
        assert!(r <= g.dt + 1e-12, "{r}");
        let other = EmpiricalSurvival::from_fn(GridSpec { t_max: 5.0, dt: 0.05 }, 1.0, |_| 1.0);
        assert_eq!(integral_relation_residual(&entry, &other), Err(DistributionError::GridMismatch));
    }

    #[test]
    fn flat_return_tail_is_unbounded() {
        let g = GridSpec::default();
        let flat = EmpiricalSurvival::from_fn(g, 1.0, |_| 0.3);
        assert_eq!(integral_relation_residual(&flat, &flat).unwrap(), Residual::UnboundedTail);
    }

    fn fair_coin() -> SystemInstance {
        SystemInstance::new(SystemSpec::BernoulliShift { weights: vec![0.5, 0.5] }).unwrap()
    }

    #[test]
    fn exact_geometric() {
        let m = ExactChainModel::from_system(&fair_coin(), &[1]).unwrap();
        let seq = m.exact_survival(20, SurvivalMode::Entry);
        for (s, v) in seq.iter().enumerate() {
            assert!((v - 2f64.powi(-(s as i32))).abs() < 1e-15);
        }
        assert_eq!(seq[0], 1.0);
        assert!((max_jump(&seq) - 0.5).abs() < 1e-15);
    }

    /// Survival of `tau_[1,1]` by enumerating `omega_0..omega_{s+1}`.
    fn enumerate_11(s: usize) -> f64 {
        let len = s + 2;
        let mut survive = 0u32;
        for code in 0..(1u32 << len) {
            let bit = |i: usize| (code >> i) & 1 == 1; // true = symbol 1
            if !(1..=s).any(|j| bit(j) && bit(j + 1)) {
                survive += 1;
            }
        }
        survive as f64 / (1u32 << len) as f64
    }

    #[test]
    fn exact_matches_enumeration() {
        let m = ExactChainModel::from_system(&fair_coin(), &[1, 1]).unwrap();
        let seq = m.exact_survival(6, SurvivalMode::Entry);
        for (s, v) in seq.iter().enumerate() {
            assert!((v - enumerate_11(s)).abs() < 1e-15, "s={s}");
        }
        assert!(max_jump(&seq) <= 0.25 + 1e-15);
        let rows = m.no_match_row_sums();
        assert!(rows.iter().all(|&r| r <= 1.0 + 1e-15));
        assert!(rows.iter().any(|&r| r < 1.0));
    }

    #[test]
    fn return_mode_first_step() {
        // word (1,1): from a pinned 1,1 the next occurrence at j=1 has probability 1/2
        let m = ExactChainModel::from_system(&fair_coin(), &[1, 1]).unwrap();
        let seq = m.exact_survival(3, SurvivalMode::Return);
        assert_eq!(seq[0], 1.0);
        assert!((seq[1] - 0.5).abs() < 1e-15);
        // word (1,2): occurrence at j=1 impossible since omega_1 = 2
        let m = ExactChainModel::from_system(&fair_coin(), &[1, 2]).unwrap();
        let seq = m.exact_survival(3, SurvivalMode::Return);
        assert_eq!(seq[1], 1.0);
        assert!((seq[2] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn constant_has_no_jump() {
        assert_eq!(max_jump(&[0.7; 5]), 0.0);
    }

    #[test]
    fn model_errors() {
        let s = SystemInstance::new(SystemSpec::FiniteMarkovShift {
            transition_matrix: vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            stationary_vector: vec![0.5, 0.5],
        })
        .unwrap();
        assert_eq!(ExactChainModel::from_system(&s, &[1, 1]).unwrap_err(), DistributionError::ZeroMeasure);
        assert!(ExactChainModel::from_system(&s, &[3]).is_err());
        let g = SystemInstance::new(SystemSpec::GaussMap).unwrap();
        assert!(ExactChainModel::from_system(&g, &[1]).is_err());
    }

    #[test]
    fn csv_format() {
        let f = EmpiricalSurvival::from_fn(GridSpec { t_max: 1.0, dt: 0.5 }, 1.0, |t| (-t).exp());
        let csv = f.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,survival");
        assert_eq!(lines[1], "0.000000000,1.000000000");
        assert_eq!(lines[2], "0.5000000000,0.6065306597");
        assert_eq!(lines.len(), 4);
        assert_eq!(format_significant(9.99999999996, 10), "10.00000000");
        assert_eq!(format_significant(1.234e-5, 10), "0.00001234000000");
    }
}
