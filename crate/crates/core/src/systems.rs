//! Measure-preserving systems, their invariant measures, and one-step evolution.
//!
//! Symbolic systems (shifts) are simulated as a stream of symbols `omega_0,
//! omega_1, ...` generated on demand from a per-trial random stream; the
//! shift map drops `omega_0`. A state keeps a short window of already
//! generated symbols so that cylinder membership can look ahead. Interval maps
//! hold a single floating-point point.
//!
//! The renewal shift generates its chain one excursion at a time: on reaching
//! a symbol `j` it draws how far the chain will climb before the next reset,
//! with `P(climb >= k) = P_{j+k} / P_j`. That is the same law as flipping a
//! `p_j` coin per step, and it lets [`SystemInstance::skip_climb`] jump over a
//! long climb without changing the symbol sequence.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::renewal::{RenewalError, RenewalParams};
use crate::rng::{StreamSeed, TrialRng};

const ROW_SUM_TOL: f64 = 1e-12;
const STATIONARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub enum SystemSpec {
    /// Countable-alphabet renewal chain with `p_i = (i/(i+1))^alpha`.
    RenewalShift { alpha: f64 },
    FiniteMarkovShift {
        transition_matrix: Vec<Vec<f64>>,
        stationary_vector: Vec<f64>,
    },
    BernoulliShift { weights: Vec<f64> },
    /// First-return system of `RenewalShift` on `{omega_0 = 1}`: an i.i.d.
    /// shift on block lengths with weights `q_j P_j`.
    InducedRenewalShift { alpha: f64 },
    /// `x -> frac(1/x)` with the Gauss measure `dx / ((1+x) ln 2)`.
    GaussMap,
    /// `x -> frac(x + theta)` with Lebesgue measure.
    Rotation { theta: f64 },
}

impl SystemSpec {
    pub fn family(&self) -> &'static str {
        match self {
            SystemSpec::RenewalShift { .. } => "RenewalShift",
            SystemSpec::FiniteMarkovShift { .. } => "FiniteMarkovShift",
            SystemSpec::BernoulliShift { .. } => "BernoulliShift",
            SystemSpec::InducedRenewalShift { .. } => "InducedRenewalShift",
            SystemSpec::GaussMap => "GaussMap",
            SystemSpec::Rotation { .. } => "Rotation",
        }
    }
}

/// One line per supported family, for `list-systems`.
pub fn families() -> &'static [(&'static str, &'static str)] {
    &[
        ("RenewalShift", "{\"RenewalShift\": {\"alpha\": 1.5}}  climb i->i+1 w.p. (i/(i+1))^alpha, else reset to 1"),
        ("FiniteMarkovShift", "{\"FiniteMarkovShift\": {\"transition_matrix\": [[..]], \"stationary_vector\": [..]}}"),
        ("BernoulliShift", "{\"BernoulliShift\": {\"weights\": [0.5, 0.5]}}  i.i.d. symbols 1..n (doubling map for [0.5, 0.5])"),
        ("InducedRenewalShift", "{\"InducedRenewalShift\": {\"alpha\": 1.5}}  i.i.d. block lengths with weights q_j P_j"),
        ("GaussMap", "\"GaussMap\"  x -> frac(1/x), density 1/((1+x) ln 2)"),
        ("Rotation", "{\"Rotation\": {\"theta\": 0.618}}  x -> frac(x + theta)"),
    ]
}

#[derive(Debug, Error, PartialEq)]
pub enum SystemError {
    #[error("invalid system spec, field `{field}`: {reason}")]
    InvalidSpec { field: &'static str, reason: String },
    #[error("degenerate state: Gauss map evaluated at x = 0")]
    DegenerateState,
    #[error("state does not belong to a {0} system")]
    WrongStateKind(&'static str),
}

impl From<RenewalError> for SystemError {
    fn from(e: RenewalError) -> Self {
        SystemError::InvalidSpec {
            field: "alpha",
            reason: e.to_string(),
        }
    }
}

#[derive(Debug)]
enum Kernel {
    Renewal(RenewalParams),
    InducedRenewal(RenewalParams),
    Markov {
        matrix: Vec<Vec<f64>>,
        stationary: Vec<f64>,
        row_cdf: Vec<Vec<f64>>,
        stationary_cdf: Vec<f64>,
    },
    Bernoulli {
        weights: Vec<f64>,
        cdf: Vec<f64>,
    },
    Gauss,
    Rotation {
        theta: f64,
    },
}

/// A validated, immutable system with its sampling tables.
#[derive(Debug)]
pub struct SystemInstance {
    spec: SystemSpec,
    kernel: Kernel,
}

#[derive(Debug, Clone)]
struct SymbolStream {
    /// `window[i]` is `omega_i` relative to the current time; never empty.
    window: VecDeque<u64>,
    /// Renewal only: the symbol at which the excursion through `window.back()` resets.
    run_top: u64,
    rng: TrialRng,
}

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
enum Repr {
    Symbols(SymbolStream),
    Point(f64),
}

/// Current point of a trajectory. Owned by exactly one trial.
#[derive(Debug, Clone)]
pub struct State {
    repr: Repr,
    steps: u64,
}

impl State {
    /// Number of applications of the map so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// `omega_0` for symbolic systems.
    pub fn symbol(&self) -> Option<u64> {
        match &self.repr {
            Repr::Symbols(s) => Some(s.window[0]),
            Repr::Point(_) => None,
        }
    }

    /// Current point for interval maps.
    pub fn point(&self) -> Option<f64> {
        match &self.repr {
            Repr::Point(x) => Some(*x),
            Repr::Symbols(_) => None,
        }
    }

    /// Binary factor of the current symbol.
    pub fn bit(&self) -> Option<u8> {
        self.symbol().map(project_binary)
    }
}

/// Collapses the renewal alphabet onto `{0, 1}`: `1 -> 1`, everything else `-> 0`.
pub fn project_binary(symbol: u64) -> u8 {
    debug_assert!(symbol >= 1);
    u8::from(symbol == 1)
}

fn invalid(field: &'static str, reason: impl Into<String>) -> SystemError {
    SystemError::InvalidSpec {
        field,
        reason: reason.into(),
    }
}

fn check_probability_vector(field: &'static str, v: &[f64]) -> Result<(), SystemError> {
    if v.is_empty() {
        return Err(invalid(field, "empty"));
    }
    if let Some(x) = v.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(invalid(field, format!("entry {x} is not a nonnegative probability")));
    }
    let s: f64 = v.iter().sum();
    if (s - 1.0).abs() > ROW_SUM_TOL {
        return Err(invalid(field, format!("entries sum to {s}, not 1")));
    }
    Ok(())
}

fn cumulative(v: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    v.iter()
        .map(|x| {
            acc += x;
            acc
        })
        .collect()
}

/// 1-based index drawn from a cumulative table.
#[inline]
fn draw(cdf: &[f64], u: f64) -> u64 {
    let i = cdf.partition_point(|&c| c <= u);
    i.min(cdf.len() - 1) as u64 + 1
}

impl SystemInstance {
    pub fn new(spec: SystemSpec) -> Result<Self, SystemError> {
        let kernel = match &spec {
            SystemSpec::RenewalShift { alpha } => Kernel::Renewal(RenewalParams::new(*alpha)?),
            SystemSpec::InducedRenewalShift { alpha } => {
                Kernel::InducedRenewal(RenewalParams::new(*alpha)?)
            }
            SystemSpec::FiniteMarkovShift {
                transition_matrix,
                stationary_vector,
            } => {
                let n = transition_matrix.len();
                if n == 0 {
                    return Err(invalid("transition_matrix", "empty"));
                }
                for (i, row) in transition_matrix.iter().enumerate() {
                    if row.len() != n {
                        return Err(invalid(
                            "transition_matrix",
                            format!("row {i} has {} entries, expected {n}", row.len()),
                        ));
                    }
                    check_probability_vector("transition_matrix", row).map_err(|_| {
                        invalid("transition_matrix", format!("row {i} is not stochastic"))
                    })?;
                }
                if stationary_vector.len() != n {
                    return Err(invalid("stationary_vector", "length differs from matrix"));
                }
                check_probability_vector("stationary_vector", stationary_vector)?;
                for k in 0..n {
                    let s: f64 = (0..n)
                        .map(|j| stationary_vector[j] * transition_matrix[j][k])
                        .sum();
                    if (s - stationary_vector[k]).abs() > STATIONARY_TOL {
                        return Err(invalid(
                            "stationary_vector",
                            format!("not invariant at component {k}: {s} vs {}", stationary_vector[k]),
                        ));
                    }
                }
                Kernel::Markov {
                    matrix: transition_matrix.clone(),
                    stationary: stationary_vector.clone(),
                    row_cdf: transition_matrix.iter().map(|r| cumulative(r)).collect(),
                    stationary_cdf: cumulative(stationary_vector),
                }
            }
            SystemSpec::BernoulliShift { weights } => {
                check_probability_vector("weights", weights)?;
                Kernel::Bernoulli {
                    weights: weights.clone(),
                    cdf: cumulative(weights),
                }
            }
            SystemSpec::GaussMap => Kernel::Gauss,
            SystemSpec::Rotation { theta } => {
                if !(theta.is_finite() && *theta > 0.0 && *theta < 1.0) {
                    return Err(invalid("theta", format!("{theta} is not in (0, 1)")));
                }
                Kernel::Rotation { theta: *theta }
            }
        };
        Ok(Self { spec, kernel })
    }

    pub fn spec(&self) -> &SystemSpec {
        &self.spec
    }

    pub fn is_symbolic(&self) -> bool {
        !matches!(self.kernel, Kernel::Gauss | Kernel::Rotation { .. })
    }

    /// Closed forms for the renewal families.
    pub fn renewal(&self) -> Option<&RenewalParams> {
        match &self.kernel {
            Kernel::Renewal(r) | Kernel::InducedRenewal(r) => Some(r),
            _ => None,
        }
    }

    /// Size of a finite alphabet; `None` for countable alphabets and interval maps.
    pub fn alphabet_size(&self) -> Option<usize> {
        match &self.kernel {
            Kernel::Markov { stationary, .. } => Some(stationary.len()),
            Kernel::Bernoulli { weights, .. } => Some(weights.len()),
            _ => None,
        }
    }

    /// Invariant mass of the one-cylinder `{omega_0 = s}`.
    pub fn symbol_mass(&self, s: u64) -> f64 {
        if s == 0 {
            return 0.0;
        }
        match &self.kernel {
            Kernel::Renewal(r) => r.stationary_x(s),
            Kernel::InducedRenewal(r) => r.induced_weight(s),
            Kernel::Markov { stationary, .. } => stationary.get(s as usize - 1).copied().unwrap_or(0.0),
            Kernel::Bernoulli { weights, .. } => weights.get(s as usize - 1).copied().unwrap_or(0.0),
            Kernel::Gauss | Kernel::Rotation { .. } => 0.0,
        }
    }

    /// Probability of the transition `a -> b` in one step.
    pub fn transition(&self, a: u64, b: u64) -> f64 {
        if a == 0 || b == 0 {
            return 0.0;
        }
        match &self.kernel {
            Kernel::Renewal(r) => {
                if b == a + 1 {
                    r.p(a)
                } else if b == 1 {
                    r.q(a)
                } else {
                    0.0
                }
            }
            Kernel::Markov { matrix, .. } => matrix
                .get(a as usize - 1)
                .and_then(|row| row.get(b as usize - 1))
                .copied()
                .unwrap_or(0.0),
            Kernel::InducedRenewal(_) | Kernel::Bernoulli { .. } => {
                if self.symbol_mass(a) > 0.0 {
                    self.symbol_mass(b)
                } else {
                    0.0
                }
            }
            Kernel::Gauss | Kernel::Rotation { .. } => 0.0,
        }
    }

    /// Finite transition matrix and stationary vector when the alphabet is finite.
    pub fn finite_chain(&self) -> Option<(Vec<Vec<f64>>, Vec<f64>)> {
        match &self.kernel {
            Kernel::Markov { matrix, stationary, .. } => Some((matrix.clone(), stationary.clone())),
            Kernel::Bernoulli { weights, .. } => {
                Some((vec![weights.clone(); weights.len()], weights.clone()))
            }
            _ => None,
        }
    }

    /// Draws a state from the invariant measure.
    pub fn sample_stationary(&self, seed: StreamSeed) -> State {
        let mut rng = TrialRng::new(seed);
        match &self.kernel {
            Kernel::Gauss => {
                let x = loop {
                    let x = (rng.uniform() * std::f64::consts::LN_2).exp_m1();
                    if x > 0.0 {
                        break x;
                    }
                };
                self.point_state(x)
            }
            Kernel::Rotation { .. } => self.point_state(rng.uniform()),
            Kernel::Renewal(r) => {
                let s = r.stationary_symbol(rng.uniform_open0());
                self.symbols_from(vec![s], rng)
            }
            Kernel::InducedRenewal(r) => {
                let s = r.block_length(rng.uniform_open0());
                self.symbols_from(vec![s], rng)
            }
            Kernel::Markov { stationary_cdf, .. } => {
                let s = draw(stationary_cdf, rng.uniform());
                self.symbols_from(vec![s], rng)
            }
            Kernel::Bernoulli { cdf, .. } => {
                let s = draw(cdf, rng.uniform());
                self.symbols_from(vec![s], rng)
            }
        }
    }

    /// A symbolic state whose first symbols are `prefix`, continued by the
    /// transition rule from the last prefix symbol.
    pub(crate) fn symbols_from(&self, prefix: Vec<u64>, mut rng: TrialRng) -> State {
        debug_assert!(!prefix.is_empty());
        let last = *prefix.last().unwrap();
        let run_top = match &self.kernel {
            Kernel::Renewal(r) => last + r.climb_length(last, rng.uniform_open0()),
            _ => 0,
        };
        State {
            repr: Repr::Symbols(SymbolStream {
                window: prefix.into(),
                run_top,
                rng,
            }),
            steps: 0,
        }
    }

    /// A state at the point `x` of an interval map.
    pub fn point_state(&self, x: f64) -> State {
        State {
            repr: Repr::Point(x),
            steps: 0,
        }
    }

    #[cfg(test)]
    pub(crate) fn renewal_state_with_run(&self, symbol: u64, run_top: u64, seed: StreamSeed) -> State {
        State {
            repr: Repr::Symbols(SymbolStream {
                window: VecDeque::from(vec![symbol]),
                run_top,
                rng: TrialRng::new(seed),
            }),
            steps: 0,
        }
    }

    #[inline]
    fn generate(&self, s: &mut SymbolStream) -> u64 {
        let last = *s.window.back().unwrap();
        match &self.kernel {
            Kernel::Renewal(r) => {
                if last < s.run_top {
                    last + 1
                } else {
                    s.run_top = r.block_length(s.rng.uniform_open0());
                    1
                }
            }
            Kernel::InducedRenewal(r) => r.block_length(s.rng.uniform_open0()),
            Kernel::Markov { row_cdf, .. } => draw(&row_cdf[last as usize - 1], s.rng.uniform()),
            Kernel::Bernoulli { cdf, .. } => draw(cdf, s.rng.uniform()),
            Kernel::Gauss | Kernel::Rotation { .. } => unreachable!("interval maps carry no symbols"),
        }
    }

    /// Applies the map once.
    #[inline]
    pub fn step(&self, state: &mut State) -> Result<(), SystemError> {
        match (&mut state.repr, &self.kernel) {
            (Repr::Symbols(s), k) if !matches!(k, Kernel::Gauss | Kernel::Rotation { .. }) => {
                if s.window.len() == 1 {
                    let next = self.generate(s);
                    s.window[0] = next;
                } else {
                    s.window.pop_front();
                }
            }
            (Repr::Point(x), Kernel::Rotation { theta }) => {
                let y = *x + theta;
                *x = if y >= 1.0 { y - 1.0 } else { y };
            }
            (Repr::Point(x), Kernel::Gauss) => {
                if *x <= 0.0 {
                    return Err(SystemError::DegenerateState);
                }
                let y = 1.0 / *x;
                *x = y - y.floor();
            }
            _ => return Err(SystemError::WrongStateKind(self.spec.family())),
        }
        state.steps += 1;
        Ok(())
    }

    /// `omega_offset` of a symbolic state, generating symbols as needed.
    pub fn peek(&self, state: &mut State, offset: usize) -> Option<u64> {
        let Repr::Symbols(s) = &mut state.repr else {
            return None;
        };
        while s.window.len() <= offset {
            let next = self.generate(s);
            s.window.push_back(next);
        }
        Some(s.window[offset])
    }

    /// Renewal fast-forward: if the current symbol exceeds `above` and no
    /// symbols are buffered ahead, jump to the top of the current climb.
    /// Every skipped symbol also exceeds `above`. Returns the steps taken.
    #[inline]
    pub fn skip_climb(&self, state: &mut State, above: u64) -> u64 {
        let (Kernel::Renewal(_), Repr::Symbols(s)) = (&self.kernel, &mut state.repr) else {
            return 0;
        };
        let cur = s.window[0];
        if s.window.len() != 1 || cur <= above || s.run_top <= cur {
            return 0;
        }
        let jump = s.run_top - cur;
        s.window[0] = s.run_top;
        state.steps += jump;
        jump
    }
}
