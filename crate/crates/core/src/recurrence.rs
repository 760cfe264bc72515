//! Entry and return times, the induced map `T^{tau_U}` and its entry times,
//! and the block decomposition linking the two.
//!
//! For `B ⊂ U` and `x ∈ U` the full-system entry time is the ergodic sum of
//! return times to `U` along the induced orbit:
//! `tau_B(x) = tau_U(x) + tau_U(T̂x) + ... + tau_U(T̂^{m-1}x)` with `m = τ̂_B(x)`.
//! [`pathwise_decomposition`] computes both sides independently and insists on
//! integer equality.

use rayon::prelude::*;
use thiserror::Error;

use crate::rng::StreamSeed;
use crate::systems::{State, SystemError, SystemInstance, SystemSpec};
use crate::targets::{conditional_sample, PreparedTarget, TargetError, TargetSet};

/// Per-block cap inside [`induced_orbit_step`].
pub const BLOCK_CAP: u64 = 1_000_000_000;

/// Default censoring horizon in rescaled time.
pub const DEFAULT_HORIZON: f64 = 50.0;

/// Redraws allowed when a Gauss-map orbit lands exactly on 0.
const MAX_REDRAWS: u64 = 16;

#[derive(Debug, Error, PartialEq)]
pub enum RecurrenceError {
    #[error(transparent)]
    Target(#[from] TargetError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error("no return to the return set within {cap} steps")]
    BlockCapExceeded { cap: u64 },
    #[error("initial state is not in the return set {0}")]
    NotInReturnSet(String),
    #[error("cap must be at least 1 step")]
    InvalidCap,
    #[error("induced blocks sum to {blocks} but the full orbit enters B at {full}")]
    PathwiseMismatch { blocks: u64, full: u64 },
    #[error("trial {index}: orbit degenerated {MAX_REDRAWS} times in a row")]
    TooManyRedraws { index: u64 },
}

/// Raw outcome of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Steps {
    Hit(u64),
    Censored { cap: u64 },
}

/// One observed entry or return time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSample {
    pub steps: Steps,
    /// `raw_steps * mu` (or `cap * mu` when censored).
    pub rescaled: f64,
    /// Measure used for rescaling: `mu(B)`, or `mu_hat(B)` for induced trials.
    pub mu: f64,
    pub trial_seed: u64,
}

impl TimeSample {
    pub fn new(steps: Steps, mu: f64) -> Self {
        let raw = match steps {
            Steps::Hit(k) => k,
            Steps::Censored { cap } => cap,
        };
        Self {
            steps,
            rescaled: raw as f64 * mu,
            mu,
            trial_seed: 0,
        }
    }

    pub fn with_seed(mut self, trial_seed: u64) -> Self {
        self.trial_seed = trial_seed;
        self
    }

    pub fn raw(&self) -> Option<u64> {
        match self.steps {
            Steps::Hit(k) => Some(k),
            Steps::Censored { .. } => None,
        }
    }

    pub fn is_censored(&self) -> bool {
        matches!(self.steps, Steps::Censored { .. })
    }
}

/// Block lengths along an induced orbit up to the induced entry into `B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedTrace {
    pub blocks: Vec<u64>,
    /// `τ̂_B`, the number of blocks.
    pub induced_time: u64,
    /// `tau_B` from the independent full-orbit scan; equals the block sum.
    pub full_time: u64,
}

/// Raw-step cap for a rescaled horizon.
pub fn default_cap(mu: f64, horizon: f64) -> u64 {
    (horizon / mu).ceil().max(1.0) as u64
}

/// `tau_B(x) = min{j >= 1 : T^j x ∈ B}`, censored after `cap` steps.
///
/// Cylinder occurrences are detected by feeding `omega_1, omega_2, ...` to the
/// word automaton; a match completing at feed `f` is an occurrence starting at
/// `j = f - |w| + 1`.
pub fn entry_time(
    system: &SystemInstance,
    target: &PreparedTarget,
    mut state: State,
    cap: u64,
) -> Result<TimeSample, RecurrenceError> {
    if cap == 0 {
        return Err(RecurrenceError::InvalidCap);
    }
    let mu = target.measure();
    let censored = TimeSample::new(Steps::Censored { cap }, mu);
    match target.matcher() {
        Some(mut m) => {
            let n = m.word().len() as u64;
            let limit = cap + n - 1;
            let top = target.max_symbol();
            let mut fed = 0u64;
            loop {
                system.step(&mut state)?;
                fed += 1;
                let s = state.symbol().expect("cylinder target on a symbolic system");
                if m.feed(s) {
                    return Ok(TimeSample::new(Steps::Hit(fed - n + 1), mu));
                }
                if s > top {
                    fed = fed.saturating_add(system.skip_climb(&mut state, top));
                }
                if fed >= limit {
                    return Ok(censored);
                }
            }
        }
        None => {
            for j in 1..=cap {
                system.step(&mut state)?;
                if target.contains(system, &mut state) {
                    return Ok(TimeSample::new(Steps::Hit(j), mu));
                }
            }
            Ok(censored)
        }
    }
}

/// Entry time from a point drawn from `mu` conditioned on `B`.
pub fn return_time(
    system: &SystemInstance,
    target: &PreparedTarget,
    seed: StreamSeed,
    cap: u64,
) -> Result<TimeSample, RecurrenceError> {
    let start = conditional_sample(system, target, seed);
    entry_time(system, target, start, cap)
}

/// Advances `state ∈ U` to `T^{tau_U}(state)` and returns `tau_U`.
pub fn induced_orbit_step(
    system: &SystemInstance,
    u: &PreparedTarget,
    state: &mut State,
) -> Result<u64, RecurrenceError> {
    if !u.contains(system, state) {
        return Err(RecurrenceError::NotInReturnSet(u.target().to_string()));
    }
    let top = u.max_symbol();
    let symbolic = system.is_symbolic();
    let mut k = 0u64;
    loop {
        system.step(state)?;
        k += 1;
        if u.contains(system, state) {
            return Ok(k);
        }
        if symbolic {
            k = k.saturating_add(system.skip_climb(state, top));
        }
        if k >= BLOCK_CAP {
            return Err(RecurrenceError::BlockCapExceeded { cap: BLOCK_CAP });
        }
    }
}

fn check_subset(u: &PreparedTarget, b: &PreparedTarget) -> Result<(), RecurrenceError> {
    if b.target().is_subset_of(u.target()) {
        Ok(())
    } else {
        Err(TargetError::NotASubset {
            inner: b.target().to_string(),
            outer: u.target().to_string(),
        }
        .into())
    }
}

/// `τ̂_B(x) = min{j >= 1 : T̂^j x ∈ B}` for `x ∈ U`, rescaled by `mu(B)/mu(U)`.
pub fn induced_entry_time(
    system: &SystemInstance,
    u: &PreparedTarget,
    b: &PreparedTarget,
    mut state: State,
    cap_induced: u64,
) -> Result<TimeSample, RecurrenceError> {
    check_subset(u, b)?;
    if cap_induced == 0 {
        return Err(RecurrenceError::InvalidCap);
    }
    let mu_hat = b.measure() / u.measure();
    for m in 1..=cap_induced {
        induced_orbit_step(system, u, &mut state)?;
        if b.contains(system, &mut state) {
            return Ok(TimeSample::new(Steps::Hit(m), mu_hat));
        }
    }
    Ok(TimeSample::new(Steps::Censored { cap: cap_induced }, mu_hat))
}

/// Induced blocks up to the entry into `B`, checked against a full-orbit scan.
///
/// Returns `Ok(None)` if the induced orbit is censored at `cap_induced`.
pub fn pathwise_decomposition(
    system: &SystemInstance,
    u: &PreparedTarget,
    b: &PreparedTarget,
    initial: State,
    cap_induced: u64,
) -> Result<Option<InducedTrace>, RecurrenceError> {
    check_subset(u, b)?;
    let mut state = initial.clone();
    let mut blocks = Vec::new();
    loop {
        if blocks.len() as u64 >= cap_induced {
            return Ok(None);
        }
        blocks.push(induced_orbit_step(system, u, &mut state)?);
        if b.contains(system, &mut state) {
            break;
        }
    }
    let total: u64 = blocks.iter().sum();
    let full = entry_time(system, b, initial, total.saturating_add(1))?;
    match full.steps {
        Steps::Hit(t) if t == total => Ok(Some(InducedTrace {
            induced_time: blocks.len() as u64,
            blocks,
            full_time: t,
        })),
        Steps::Hit(t) => Err(RecurrenceError::PathwiseMismatch { blocks: total, full: t }),
        Steps::Censored { cap } => Err(RecurrenceError::PathwiseMismatch { blocks: total, full: cap }),
    }
}

/// Renewal-shift word for a block pattern: `(1,2,...,a_1, 1,2,...,a_2, ..., 1)`.
pub fn induced_word_to_full_word(blocks: &[u64]) -> Vec<u64> {
    assert!(blocks.iter().all(|&a| a >= 1), "block lengths start at 1");
    let mut w: Vec<u64> = blocks.iter().flat_map(|&a| 1..=a).collect();
    w.push(1);
    w
}

/// Inverse of [`induced_word_to_full_word`]; `None` if `word` is not a block concatenation.
pub fn full_word_to_blocks(word: &[u64]) -> Option<Vec<u64>> {
    if word.len() < 2 || word[0] != 1 || *word.last()? != 1 {
        return None;
    }
    let mut blocks = Vec::new();
    let mut len = 1u64;
    for pair in word.windows(2) {
        if pair[1] == 1 {
            blocks.push(len);
            len = 1;
        } else if pair[1] == pair[0] + 1 {
            len += 1;
        } else {
            return None;
        }
    }
    Some(blocks)
}

/// The native first-return system for a renewal shift with `U = [1]` and a
/// block-structured `B`: the i.i.d. block shift and the block word of `B`.
pub fn native_induced(
    system: &SystemInstance,
    u: &TargetSet,
    b: &TargetSet,
) -> Option<(SystemInstance, TargetSet)> {
    let SystemSpec::RenewalShift { alpha } = system.spec() else {
        return None;
    };
    if u.word() != Some(&[1]) {
        return None;
    }
    let blocks = full_word_to_blocks(b.word()?)?;
    let induced = SystemInstance::new(SystemSpec::InducedRenewalShift { alpha: *alpha }).ok()?;
    Some((induced, TargetSet::CylinderWord(blocks)))
}

/// Which statistic a batch of trials measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialKind {
    /// `tau_B` from `mu`.
    Entry,
    /// `tau_B` from `mu_B`.
    Return,
    /// `τ̂_B` from `mu_hat`.
    InducedEntry,
    /// `τ̂_B` from `mu_hat_B`.
    InducedReturn,
}

/// Everything needed to run independent trials of one kind.
#[derive(Debug, Clone, Copy)]
pub struct TrialPlan<'a> {
    pub system: &'a SystemInstance,
    pub target: &'a PreparedTarget,
    /// Required for the induced kinds.
    pub return_set: Option<&'a PreparedTarget>,
    pub kind: TrialKind,
    /// Raw steps for full-system kinds, induced steps for induced kinds.
    pub cap: u64,
}

impl TrialPlan<'_> {
    fn attempt(&self, seed: StreamSeed) -> Result<TimeSample, RecurrenceError> {
        let (sys, b) = (self.system, self.target);
        match self.kind {
            TrialKind::Entry => entry_time(sys, b, sys.sample_stationary(seed), self.cap),
            TrialKind::Return => return_time(sys, b, seed, self.cap),
            TrialKind::InducedEntry | TrialKind::InducedReturn => {
                let u = self
                    .return_set
                    .ok_or_else(|| RecurrenceError::NotInReturnSet("<none>".into()))?;
                let from = if self.kind == TrialKind::InducedEntry { u } else { b };
                let start = conditional_sample(sys, from, seed);
                induced_entry_time(sys, u, b, start, self.cap)
            }
        }
    }

    /// One trial; Gauss-map orbits that hit 0 are discarded and redrawn.
    pub fn run_trial(&self, seed: StreamSeed) -> Result<TimeSample, RecurrenceError> {
        for attempt in 0..MAX_REDRAWS {
            match self.attempt(seed.redraw(attempt)) {
                Err(RecurrenceError::System(SystemError::DegenerateState)) => continue,
                other => return other.map(|s| s.with_seed(seed.index)),
            }
        }
        Err(RecurrenceError::TooManyRedraws { index: seed.index })
    }

    /// Trials `0..n` of stream `master`, in trial order regardless of scheduling.
    pub fn run_batch(&self, n: usize, master: u64) -> Result<Vec<TimeSample>, RecurrenceError> {
        (0..n as u64)
            .into_par_iter()
            .map(|i| self.run_trial(StreamSeed::new(master, i)))
            .collect()
    }
}
