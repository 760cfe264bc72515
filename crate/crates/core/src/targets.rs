//! Target sets, their invariant measures, and streaming occurrence detection.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::{StreamSeed, TrialRng};
use crate::systems::{State, SystemInstance, SystemSpec};

/// A positive-measure set `B`: a cylinder at the origin or a half-open interval `[a, b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub enum TargetSet {
    CylinderWord(Vec<u64>),
    Interval { a: f64, b: f64 },
}

impl TargetSet {
    pub fn word(&self) -> Option<&[u64]> {
        match self {
            TargetSet::CylinderWord(w) => Some(w),
            TargetSet::Interval { .. } => None,
        }
    }

    /// `self ⊂ outer`: a longer cylinder extending `outer`'s word, or a nested interval.
    pub fn is_subset_of(&self, outer: &TargetSet) -> bool {
        match (self, outer) {
            (TargetSet::CylinderWord(b), TargetSet::CylinderWord(u)) => b.starts_with(u),
            (TargetSet::Interval { a, b }, TargetSet::Interval { a: ua, b: ub }) => ua <= a && b <= ub,
            _ => false,
        }
    }
}

impl std::fmt::Display for TargetSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TargetSet::CylinderWord(w) => {
                let parts: Vec<String> = w.iter().map(u64::to_string).collect();
                write!(f, "[{}]", parts.join(","))
            }
            TargetSet::Interval { a, b } => write!(f, "[{a},{b})"),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum TargetError {
    #[error("invalid target {target}: {reason}")]
    InvalidTarget { target: String, reason: String },
    #[error("target {target} is incompatible with {family}")]
    IncompatibleTarget { target: String, family: &'static str },
    #[error("target {target} has zero measure (position {position})")]
    ZeroMeasure { target: String, position: usize },
    #[error("target {inner} is not a subset of the return set {outer}")]
    NotASubset { inner: String, outer: String },
}

/// Exact invariant measure of `target`.
pub fn target_measure(system: &SystemInstance, target: &TargetSet) -> Result<f64, TargetError> {
    let name = || target.to_string();
    match target {
        TargetSet::CylinderWord(w) => {
            if !system.is_symbolic() {
                return Err(TargetError::IncompatibleTarget {
                    target: name(),
                    family: system.spec().family(),
                });
            }
            if w.is_empty() {
                return Err(TargetError::InvalidTarget {
                    target: name(),
                    reason: "empty word".into(),
                });
            }
            if w.contains(&0) {
                return Err(TargetError::InvalidTarget {
                    target: name(),
                    reason: "symbols are positive integers".into(),
                });
            }
            let mut m = system.symbol_mass(w[0]);
            if m <= 0.0 {
                return Err(TargetError::ZeroMeasure {
                    target: name(),
                    position: 0,
                });
            }
            for (i, pair) in w.windows(2).enumerate() {
                let t = system.transition(pair[0], pair[1]);
                if t <= 0.0 {
                    return Err(TargetError::ZeroMeasure {
                        target: name(),
                        position: i + 1,
                    });
                }
                m *= t;
            }
            Ok(m)
        }
        TargetSet::Interval { a, b } => {
            if !(a.is_finite() && b.is_finite() && 0.0 <= *a && a < b && *b <= 1.0) {
                return Err(TargetError::InvalidTarget {
                    target: name(),
                    reason: "need 0 <= a < b <= 1".into(),
                });
            }
            match system.spec() {
                SystemSpec::GaussMap => Ok(((1.0 + b) / (1.0 + a)).log2()),
                SystemSpec::Rotation { .. } => Ok(b - a),
                other => Err(TargetError::IncompatibleTarget {
                    target: name(),
                    family: other.family(),
                }),
            }
        }
    }
}

/// Failure-function automaton reporting every (possibly overlapping) occurrence of a word.
#[derive(Debug, Clone)]
pub struct Matcher {
    word: Vec<u64>,
    /// `fail[i]`: length of the longest proper border of `word[..=i]`.
    fail: Vec<usize>,
    node: usize,
    fed: u64,
}

impl Matcher {
    pub fn new(word: &[u64]) -> Self {
        assert!(!word.is_empty(), "matcher word must be nonempty");
        let mut fail = vec![0usize; word.len()];
        let mut k = 0;
        for i in 1..word.len() {
            while k > 0 && word[i] != word[k] {
                k = fail[k - 1];
            }
            if word[i] == word[k] {
                k += 1;
            }
            fail[i] = k;
        }
        Self {
            word: word.to_vec(),
            fail,
            node: 0,
            fed: 0,
        }
    }

    /// Feeds one symbol; true iff the last `|word|` symbols fed equal the word.
    #[inline]
    pub fn feed(&mut self, symbol: u64) -> bool {
        let n = self.word.len();
        self.fed += 1;
        if self.node == n {
            self.node = self.fail[n - 1];
        }
        while self.node > 0 && self.word[self.node] != symbol {
            self.node = self.fail[self.node - 1];
        }
        if self.word[self.node] == symbol {
            self.node += 1;
        }
        self.node == n
    }

    /// Longest suffix of the fed stream that is a prefix of the word.
    pub fn node(&self) -> usize {
        self.node
    }

    pub fn fed(&self) -> u64 {
        self.fed
    }

    pub fn word(&self) -> &[u64] {
        &self.word
    }

    pub fn reset(&mut self) {
        self.node = 0;
        self.fed = 0;
    }
}

/// A target validated against a system, with its measure and matcher template.
#[derive(Debug, Clone)]
pub struct PreparedTarget {
    target: TargetSet,
    measure: f64,
    matcher: Option<Matcher>,
    max_symbol: u64,
}

impl PreparedTarget {
    pub fn new(system: &SystemInstance, target: &TargetSet) -> Result<Self, TargetError> {
        let measure = target_measure(system, target)?;
        let (matcher, max_symbol) = match target.word() {
            Some(w) => (Some(Matcher::new(w)), *w.iter().max().unwrap()),
            None => (None, 0),
        };
        Ok(Self {
            target: target.clone(),
            measure,
            matcher,
            max_symbol,
        })
    }

    pub fn target(&self) -> &TargetSet {
        &self.target
    }

    pub fn measure(&self) -> f64 {
        self.measure
    }

    /// Fresh automaton for the target word.
    pub fn matcher(&self) -> Option<Matcher> {
        self.matcher.clone()
    }

    /// Largest symbol occurring in the word (0 for intervals).
    pub fn max_symbol(&self) -> u64 {
        self.max_symbol
    }

    /// Whether the current point lies in the target, looking ahead for cylinders.
    #[inline]
    pub fn contains(&self, system: &SystemInstance, state: &mut State) -> bool {
        match &self.target {
            TargetSet::CylinderWord(w) => {
                if state.symbol() != Some(w[0]) {
                    return false;
                }
                (1..w.len()).all(|i| system.peek(state, i) == Some(w[i]))
            }
            TargetSet::Interval { a, b } => state.point().is_some_and(|x| *a <= x && x < *b),
        }
    }
}

/// Draws from `mu(. ∩ B) / mu(B)`.
///
/// Cylinder targets pin the word as the first `|w|` symbols and continue by the
/// transition rule; interval targets invert the restricted invariant CDF.
pub fn conditional_sample(
    system: &SystemInstance,
    target: &PreparedTarget,
    seed: StreamSeed,
) -> State {
    let mut rng = TrialRng::new(seed);
    match target.target() {
        TargetSet::CylinderWord(w) => system.symbols_from(w.clone(), rng),
        TargetSet::Interval { a, b } => {
            let x = match system.spec() {
                SystemSpec::GaussMap => {
                    let (la, lb) = (a.ln_1p(), b.ln_1p());
                    loop {
                        let x = (la + rng.uniform() * (lb - la)).exp_m1();
                        if x > 0.0 && x < *b {
                            break x.max(*a);
                        }
                    }
                }
                _ => a + rng.uniform() * (b - a),
            };
            system.point_state(x)
        }
    }
}
