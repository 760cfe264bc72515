//! Experiment configs, batch runs, and named verification checks.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distributions::{
    build_survival, dkw_bound, integral_relation_residual, max_jump, sup_distance, sup_distance_from,
    DistributionError, EmpiricalSurvival, ExactChainModel, GridSpec, Residual, SurvivalMode,
};
use crate::recurrence::{
    default_cap, induced_word_to_full_word, native_induced, pathwise_decomposition, RecurrenceError, TimeSample,
    TrialKind, TrialPlan, BLOCK_CAP, DEFAULT_HORIZON,
};
use crate::renewal::{MomentSeries, RenewalError, RenewalParams, SERIES_TERMS};
use crate::rng::{mix, StreamSeed};
use crate::systems::{SystemError, SystemInstance, SystemSpec};
use crate::targets::{conditional_sample, target_measure, PreparedTarget, TargetError, TargetSet};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}:{column}: {message}")]
    ConfigParse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid config field `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },
    #[error("unknown check `{0}` (known: {known})", known = CHECKS.join(", "))]
    UnknownCheck(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Target(#[from] TargetError),
    #[error(transparent)]
    Recurrence(#[from] RecurrenceError),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error(transparent)]
    Renewal(#[from] RenewalError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Entry,
    Return,
    InducedEntry,
    InducedReturn,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Entry => "entry",
            Mode::Return => "return",
            Mode::InducedEntry => "induced-entry",
            Mode::InducedReturn => "induced-return",
        }
    }

    fn is_induced(self) -> bool {
        matches!(self, Mode::InducedEntry | Mode::InducedReturn)
    }

    fn tag(self) -> u64 {
        self as u64
    }
}

/// Optional verification thresholds, applied to the last (smallest) target.
///
/// Absent entries, and all earlier targets, are reported without a verdict.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    /// Sup distance between a full curve and its induced counterpart.
    pub full_vs_induced: Option<f64>,
    /// Grid points below this are ignored when comparing return curves.
    #[serde(default)]
    pub return_t_min: f64,
    /// Sup distance of entry curves to `e^{-t}`.
    pub exponential: Option<f64>,
    /// Bound on the entry/return integral residual.
    pub prop2: Option<f64>,
    /// Mean rescaled return time within this many standard errors of 1.
    pub kac_se: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: SystemSpec,
    /// The set `U` for induced modes.
    #[serde(default)]
    pub return_set: Option<TargetSet>,
    /// `B_1, B_2, ...`, expected with non-increasing measure.
    pub targets: Vec<TargetSet>,
    pub modes: Vec<Mode>,
    pub n_samples: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub grid: GridSpec,
    /// Censoring horizon in rescaled time.
    pub cap: f64,
    /// Output directory for CSVs and the summary.
    pub output: PathBuf,
    #[serde(default)]
    pub verify: Option<VerifySpec>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str, path: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::ConfigParse {
            path: path.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |field, reason: &str| {
            Err(CliError::InvalidConfig {
                field,
                reason: reason.to_string(),
            })
        };
        if self.n_samples < 100 {
            return bad("n_samples", "must be at least 100");
        }
        self.grid.validate().map_err(|e| CliError::InvalidConfig {
            field: "grid",
            reason: e.to_string(),
        })?;
        if !(self.cap.is_finite() && self.cap >= self.grid.t_max) {
            return bad("cap", &format!("must be >= grid.t_max = {}", self.grid.t_max));
        }
        if self.targets.is_empty() {
            return bad("targets", "at least one target set is required");
        }
        if self.modes.is_empty() {
            return bad("modes", "at least one mode is required");
        }
        if self.modes.iter().any(|m| m.is_induced()) && self.return_set.is_none() {
            return bad("return_set", "induced modes need a return set U");
        }
        Ok(())
    }
}

/// One verdict line: computed value against a target and tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub name: String,
    pub value: f64,
    pub target: String,
    pub tolerance: String,
    pub pass: bool,
}

impl CheckLine {
    fn new(name: impl Into<String>, value: f64, target: impl Into<String>, tolerance: impl Into<String>, pass: bool) -> Self {
        Self {
            name: name.into(),
            value,
            target: target.into(),
            tolerance: tolerance.into(),
            pass,
        }
    }

    /// `value <= tol`.
    fn at_most(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self::new(name, value, "0", format!("<= {tol}"), value <= tol)
    }
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: value={:.6e} target={} tolerance {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.target,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub lines: Vec<CheckLine>,
    /// Informational lines printed ahead of the verdicts.
    pub notes: Vec<String>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.lines.iter().all(|l| l.pass)
    }

    fn push(&mut self, line: CheckLine) {
        self.lines.push(line);
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn extend(&mut self, other: Report) {
        self.lines.extend(other.lines);
        self.notes.extend(other.notes);
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in &self.notes {
            writeln!(f, "{n}")?;
        }
        for l in &self.lines {
            writeln!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Mean of rescaled times (censored samples count at the horizon) and its standard error.
pub fn mean_and_se(samples: &[TimeSample]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().map(|s| s.rescaled).sum::<f64>() / n;
    let var = samples.iter().map(|s| (s.rescaled - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

/// A system with its return set and target, plus the native induced pair when one exists.
pub struct Setup<'a> {
    pub system: &'a SystemInstance,
    pub u: Option<PreparedTarget>,
    pub b: PreparedTarget,
    pub native: Option<(SystemInstance, PreparedTarget)>,
}

impl<'a> Setup<'a> {
    pub fn new(system: &'a SystemInstance, u: Option<&TargetSet>, b: &TargetSet) -> Result<Self, CliError> {
        let bp = PreparedTarget::new(system, b)?;
        let (up, native) = match u {
            Some(u) => {
                let up = PreparedTarget::new(system, u)?;
                if !b.is_subset_of(u) {
                    return Err(TargetError::NotASubset {
                        inner: b.to_string(),
                        outer: u.to_string(),
                    }
                    .into());
                }
                let native = match native_induced(system, u, b) {
                    Some((sys, tb)) => {
                        let tp = PreparedTarget::new(&sys, &tb)?;
                        Some((sys, tp))
                    }
                    None => None,
                };
                (Some(up), native)
            }
            None => (None, None),
        };
        Ok(Self {
            system,
            u: up,
            b: bp,
            native,
        })
    }

    /// `mu_hat(B) = mu(B) / mu(U)`.
    pub fn mu_hat(&self) -> Option<f64> {
        self.u.as_ref().map(|u| self.b.measure() / u.measure())
    }

    /// `n` trials of `mode` with raw-step cap set from the rescaled `horizon`.
    pub fn simulate(&self, mode: Mode, n: usize, master: u64, horizon: f64) -> Result<Vec<TimeSample>, CliError> {
        let plan = match (mode, &self.native) {
            (Mode::Entry | Mode::Return, _) => TrialPlan {
                system: self.system,
                target: &self.b,
                return_set: None,
                kind: if mode == Mode::Entry { TrialKind::Entry } else { TrialKind::Return },
                cap: default_cap(self.b.measure(), horizon),
            },
            (_, Some((sys, tb))) => TrialPlan {
                system: sys,
                target: tb,
                return_set: None,
                kind: if mode == Mode::InducedEntry { TrialKind::Entry } else { TrialKind::Return },
                cap: default_cap(tb.measure(), horizon),
            },
            (_, None) => {
                let u = self.u.as_ref().ok_or(CliError::InvalidConfig {
                    field: "return_set",
                    reason: "induced modes need a return set U".into(),
                })?;
                TrialPlan {
                    system: self.system,
                    target: &self.b,
                    return_set: Some(u),
                    kind: if mode == Mode::InducedEntry {
                        TrialKind::InducedEntry
                    } else {
                        TrialKind::InducedReturn
                    },
                    cap: default_cap(self.b.measure() / u.measure(), horizon),
                }
            }
        };
        Ok(plan.run_batch(n, master)?)
    }

    pub fn curve(&self, mode: Mode, n: usize, master: u64, grid: GridSpec) -> Result<EmpiricalSurvival, CliError> {
        let samples = self.simulate(mode, n, master, DEFAULT_HORIZON.max(grid.t_max))?;
        Ok(build_survival(&samples, grid)?)
    }
}

pub struct RunOutcome {
    pub summary: String,
    pub report: Report,
    pub csv_files: Vec<PathBuf>,
}

/// Runs every (target, mode) batch, writes one CSV each plus `summary.txt`.
pub fn run(config: &ExperimentConfig) -> Result<RunOutcome, CliError> {
    config.validate()?;
    let system = SystemInstance::new(config.system.clone())?;
    let out = &config.output;
    fs::create_dir_all(out).map_err(io_err(out))?;

    let mut summary = Vec::new();
    let mut report = Report::default();
    let mut csv_files = Vec::new();
    let configured = config.verify.clone().unwrap_or_default();
    summary.push(format!("system: {}", serde_json::to_string(&config.system).unwrap_or_default()));
    if let Some(u) = &config.return_set {
        summary.push(format!("U = {u}: mu(U) = {:.10e}", target_measure(&system, u)?));
    }
    summary.push(format!(
        "n_samples = {}, master_seed = {}, grid = ({}, {}), cap = {}, dkw99 = {:.4e}",
        config.n_samples,
        config.master_seed,
        config.grid.t_max,
        config.grid.dt,
        config.cap,
        dkw_bound(config.n_samples, 0.01)
    ));

    let mut last_measure = f64::INFINITY;
    for (j, target) in config.targets.iter().enumerate() {
        let setup = Setup::new(&system, config.return_set.as_ref(), target)?;
        let verify = if j + 1 == config.targets.len() {
            configured.clone()
        } else {
            VerifySpec {
                return_t_min: configured.return_t_min,
                ..VerifySpec::default()
            }
        };
        let mu_b = setup.b.measure();
        if mu_b > last_measure {
            log::warn!("target {j} ({target}) has larger measure than its predecessor; the limit is along mu(B) -> 0");
        }
        last_measure = mu_b;
        let mut line = format!("target {j}: B = {target}, mu(B) = {mu_b:.10e}");
        if let Some(mh) = setup.mu_hat() {
            line.push_str(&format!(", mu_hat(B) = {mh:.10e}"));
        }
        summary.push(line);

        let mut curves: Vec<(Mode, EmpiricalSurvival)> = Vec::new();
        for &mode in &config.modes {
            log::info!("target {j}: {} x {}", mode.name(), config.n_samples);
            let master = mix(config.master_seed, (j as u64) << 8 | mode.tag());
            let samples = setup.simulate(mode, config.n_samples, master, config.cap)?;
            let curve = build_survival(&samples, config.grid)?;
            let path = out.join(format!("target{j}_{}.csv", mode.name()));
            fs::write(&path, curve.to_csv()).map_err(io_err(&path))?;
            csv_files.push(path);
            let (mean, se) = mean_and_se(&samples);
            summary.push(format!(
                "  {}: n_censored = {}, mean rescaled time = {mean:.6} (se {se:.2e})",
                mode.name(),
                curve.n_censored
            ));
            if matches!(mode, Mode::Return | Mode::InducedReturn) {
                let z = if se > 0.0 {
                    (mean - 1.0).abs() / se
                } else if mean == 1.0 {
                    0.0
                } else {
                    f64::INFINITY
                };
                match verify.kac_se {
                    Some(k) => report.push(CheckLine::new(
                        format!("target{j} kac {}", mode.name()),
                        mean,
                        "1",
                        format!("within {k} se ({:.3e})", k * se),
                        z <= k && curve.n_censored == 0,
                    )),
                    None => summary.push(format!("    kac: |mean - 1| = {:.3} se", z)),
                }
            }
            if matches!(mode, Mode::Entry | Mode::InducedEntry) {
                let d = curve.sup_distance_to(|t| (-t).exp());
                match verify.exponential {
                    Some(tol) => report.push(CheckLine::at_most(format!("target{j} sup|{} - e^-t|", mode.name()), d, tol)),
                    None => summary.push(format!("    sup distance to e^-t = {d:.4e}")),
                }
            }
            curves.push((mode, curve));
        }

        let find = |m: Mode| curves.iter().find(|(k, _)| *k == m).map(|(_, c)| c);
        for (full, ind, t_min) in [
            (Mode::Entry, Mode::InducedEntry, 0.0),
            (Mode::Return, Mode::InducedReturn, verify.return_t_min),
        ] {
            if let (Some(a), Some(b)) = (find(full), find(ind)) {
                let d = sup_distance_from(a, b, t_min)?;
                let name = format!("target{j} sup|{} - {}| (t >= {t_min})", full.name(), ind.name());
                match verify.full_vs_induced {
                    Some(tol) => report.push(CheckLine::at_most(name, d, tol)),
                    None => summary.push(format!("  {name} = {d:.4e}")),
                }
            }
        }
        for (e, r) in [(Mode::Entry, Mode::Return), (Mode::InducedEntry, Mode::InducedReturn)] {
            if let (Some(a), Some(b)) = (find(e), find(r)) {
                let name = format!("target{j} prop2 residual ({}, {})", e.name(), r.name());
                match (integral_relation_residual(a, b)?, verify.prop2) {
                    (Residual::Bounded(res), Some(tol)) => report.push(CheckLine::at_most(name, res, tol)),
                    (Residual::Bounded(res), None) => summary.push(format!("  {name} = {res:.4e}")),
                    (Residual::UnboundedTail, Some(tol)) => {
                        report.push(CheckLine::new(name, f64::INFINITY, "0", format!("<= {tol}"), false))
                    }
                    (Residual::UnboundedTail, None) => summary.push(format!("  {name}: return tail not decaying")),
                }
            }
        }
    }

    let mut text = summary.join("\n");
    text.push('\n');
    text.push_str(&report.to_string());
    let path = out.join("summary.txt");
    fs::write(&path, &text).map_err(io_err(&path))?;
    Ok(RunOutcome {
        summary: text,
        report,
        csv_files,
    })
}

/// Names accepted by [`verify`].
pub const CHECKS: &[&str] = &[
    "telescoping",
    "eigenvector",
    "kac",
    "divergence",
    "prop2",
    "thm1",
    "thm3",
    "oracle",
    "pathwise",
    "rotation",
    "factorization",
];

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    pub alpha: Option<f64>,
    pub samples: Option<usize>,
    pub seed: u64,
}

impl VerifyOptions {
    fn samples_or(&self, n: usize) -> usize {
        self.samples.unwrap_or(n)
    }
}

/// Block pattern of the desk-scale renewal target: aperiodic, `mu_hat(B) ≈ 4.7e-4` at alpha 1.5.
pub const THM_BLOCKS: [u64; 4] = [2, 3, 3, 1];
pub const THM_TOL: f64 = 0.03;
pub const THM3_T_MIN: f64 = 0.1;
pub const ROTATION_TOL: f64 = 0.04;
pub const PROP2_TOL: f64 = 0.03;
pub const ORACLE_TOL: f64 = 0.006;
/// Doubling increments above this count as a Cauchy failure.
pub const DIVERGENCE_FLOOR: f64 = 1e-2;
/// Last doubling increment below this counts as a Cauchy pass.
pub const CAUCHY_TOL: f64 = 1e-3;

/// `U = [1]`, `B` the full word of [`THM_BLOCKS`].
pub fn renewal_setup(system: &SystemInstance) -> Result<Setup<'_>, CliError> {
    let b = TargetSet::CylinderWord(induced_word_to_full_word(&THM_BLOCKS));
    Setup::new(system, Some(&TargetSet::CylinderWord(vec![1])), &b)
}

/// The golden mean rotation.
pub fn golden_rotation() -> SystemSpec {
    SystemSpec::Rotation {
        theta: (5f64.sqrt() - 1.0) / 2.0,
    }
}

/// `U = [0, 1/2)`, `B = [0.2, 0.201)`.
pub fn rotation_setup(system: &SystemInstance) -> Result<Setup<'_>, CliError> {
    Setup::new(
        system,
        Some(&TargetSet::Interval { a: 0.0, b: 0.5 }),
        &TargetSet::Interval { a: 0.2, b: 0.201 },
    )
}

/// Fixed finite chains and words used to test the simulator against exact survival.
pub fn oracle_cases() -> Vec<(SystemSpec, Vec<u64>)> {
    vec![
        (SystemSpec::BernoulliShift { weights: vec![0.5, 0.5] }, vec![1, 1, 1]),
        (SystemSpec::BernoulliShift { weights: vec![0.3, 0.7] }, vec![1, 2, 1]),
        (
            SystemSpec::FiniteMarkovShift {
                transition_matrix: vec![vec![0.9, 0.1], vec![0.4, 0.6]],
                stationary_vector: vec![0.8, 0.2],
            },
            vec![1, 1, 2],
        ),
        (
            SystemSpec::FiniteMarkovShift {
                transition_matrix: vec![vec![0.5, 0.3, 0.2], vec![0.2, 0.5, 0.3], vec![0.3, 0.2, 0.5]],
                stationary_vector: vec![1.0 / 3.0; 3],
            },
            vec![1, 2, 3, 1],
        ),
        (SystemSpec::BernoulliShift { weights: vec![0.25; 4] }, vec![2, 2]),
    ]
}

/// Word of length 10 without self-overlap, measure `2^-10` under the fair coin.
pub const PROP2_WORD: [u64; 10] = [1, 1, 1, 1, 1, 1, 1, 1, 1, 2];

const ALPHAS: [f64; 3] = [1.2, 1.5, 2.5];

fn alphas(opts: &VerifyOptions) -> Vec<f64> {
    opts.alpha.map(|a| vec![a]).unwrap_or_else(|| ALPHAS.to_vec())
}

/// Runs a named check with default parameters.
pub fn verify(check: &str, opts: &VerifyOptions) -> Result<Report, CliError> {
    let mut r = Report::default();
    let n_terms = SERIES_TERMS;
    match check {
        "telescoping" => {
            for a in alphas(opts) {
                let p = RenewalParams::new(a)?;
                let v = (p.induced_weight_sum(n_terms) + p.big_p(n_terms as u64 + 1) - 1.0).abs();
                r.push(CheckLine::new(
                    format!("telescoping alpha={a}: |sum q_j P_j + P_(N+1) - 1|, N=1e6"),
                    v,
                    "0",
                    "< 1e-10",
                    v < 1e-10,
                ));
            }
        }
        "eigenvector" => {
            for a in alphas(opts) {
                let p = RenewalParams::new(a)?;
                let v = (p.eigenvector_lhs(n_terms) - p.x1()).abs();
                r.push(CheckLine::new(
                    format!("eigenvector alpha={a}: |sum q_j x_j - x_1|"),
                    v,
                    "0",
                    "< 1e-10",
                    v < 1e-10,
                ));
            }
        }
        "kac" => {
            let a = opts.alpha.unwrap_or(1.5);
            let p = RenewalParams::new(a)?;
            let v = (p.kac_limit().value * p.x1() - 1.0).abs();
            r.push(CheckLine::new(format!("kac analytic alpha={a}: |kac_sum x_1 - 1|"), v, "0", "< 1e-8", v < 1e-8));
            let system = SystemInstance::new(SystemSpec::RenewalShift { alpha: a })?;
            let u = PreparedTarget::new(&system, &TargetSet::CylinderWord(vec![1]))?;
            let plan = TrialPlan {
                system: &system,
                target: &u,
                return_set: None,
                kind: TrialKind::Return,
                cap: BLOCK_CAP,
            };
            let n = opts.samples_or(1_000_000);
            let samples = plan.run_batch(n, opts.seed)?;
            let censored = samples.iter().filter(|s| s.is_censored()).count();
            let raw: Vec<f64> = samples.iter().map(|s| s.rescaled / s.mu).collect();
            let mean = raw.iter().sum::<f64>() / n as f64;
            let var = raw.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
            let se = (var / n as f64).sqrt();
            let zeta = p.zeta().value;
            r.note(format!("kac monte carlo: n={n}, censored={censored}, mean={mean:.6}, se={se:.3e}"));
            r.push(CheckLine::new(
                format!("kac monte carlo alpha={a}: mean return time to [1]"),
                mean,
                format!("{zeta:.10}"),
                format!("within 4 se ({:.3e})", 4.0 * se),
                (mean - zeta).abs() <= 4.0 * se && censored == 0,
            ));
        }
        "divergence" => {
            let list = opts.alpha.map(|a| vec![a]).unwrap_or_else(|| vec![1.5, 2.5]);
            for a in list {
                let p = RenewalParams::new(a)?;
                for series in [MomentSeries::FullSpaceTau, MomentSeries::SecondMoment] {
                    let g = p.growth_probe(series, n_terms);
                    let name = format!("divergence alpha={a} {series:?}");
                    r.note(format!(
                        "{name}: S(1e6) = {:.6}, last doubling increment = {:.4e}, log-log slope = {:.4}",
                        g.checkpoints.last().map(|c| c.1).unwrap_or(f64::NAN),
                        g.last_increment(),
                        g.slope
                    ));
                    if a < 2.0 {
                        let expected = 2.0 - a;
                        r.push(CheckLine::new(
                            format!("{name}: Cauchy failure, slope"),
                            g.slope,
                            format!("{expected}"),
                            "± 0.1, every doubling increment > 1e-2",
                            g.diverges(DIVERGENCE_FLOOR, expected, 0.1),
                        ));
                    } else {
                        r.push(CheckLine::new(
                            format!("{name}: Cauchy pass, last doubling increment"),
                            g.last_increment(),
                            "0",
                            format!("< {CAUCHY_TOL}"),
                            g.converges(CAUCHY_TOL),
                        ));
                    }
                }
            }
        }
        "prop2" => {
            let system = SystemInstance::new(SystemSpec::BernoulliShift { weights: vec![0.5, 0.5] })?;
            let setup = Setup::new(&system, None, &TargetSet::CylinderWord(PROP2_WORD.to_vec()))?;
            let n = opts.samples_or(100_000);
            let g = GridSpec::default();
            let e = setup.curve(Mode::Entry, n, mix(opts.seed, 0), g)?;
            let ret = setup.curve(Mode::Return, n, mix(opts.seed, 1), g)?;
            r.note(format!("prop2: mu(B) = {:.4e}, n = {n} per curve", setup.b.measure()));
            match integral_relation_residual(&e, &ret)? {
                Residual::Bounded(v) => r.push(CheckLine::at_most("prop2 residual", v, PROP2_TOL)),
                Residual::UnboundedTail => {
                    r.push(CheckLine::new("prop2 residual", f64::INFINITY, "0", "tail not decaying", false))
                }
            }
        }
        "thm1" | "thm3" => {
            let system = SystemInstance::new(SystemSpec::RenewalShift {
                alpha: opts.alpha.unwrap_or(1.5),
            })?;
            let setup = renewal_setup(&system)?;
            r.extend(full_vs_induced(&setup, check == "thm3", opts, THM_TOL)?);
        }
        "rotation" => {
            let system = SystemInstance::new(golden_rotation())?;
            let setup = rotation_setup(&system)?;
            r.extend(full_vs_induced(&setup, false, opts, ROTATION_TOL)?);
        }
        "oracle" => {
            let n = opts.samples_or(100_000);
            let g = GridSpec::default();
            for (i, (spec, word)) in oracle_cases().into_iter().enumerate() {
                let system = SystemInstance::new(spec)?;
                let model = ExactChainModel::from_system(&system, &word)?;
                let setup = Setup::new(&system, None, &TargetSet::CylinderWord(word.clone()))?;
                let mu = setup.b.measure();
                let horizon = (g.t_max / mu).ceil() as usize + 2;
                let exact = model.exact_survival(horizon, SurvivalMode::Entry);
                let emp = setup.curve(Mode::Entry, n, mix(opts.seed, i as u64), g)?;
                let d = sup_distance(&emp, &EmpiricalSurvival::from_exact(g, mu, &exact))?;
                r.push(CheckLine::at_most(format!("oracle case {i} word {word:?}: sup|empirical - exact|"), d, ORACLE_TOL));
                let jump = max_jump(&exact);
                r.push(CheckLine::new(
                    format!("oracle case {i}: max jump"),
                    jump,
                    format!("mu(B) = {mu:.6e}"),
                    "<= mu(B) + 1e-12",
                    jump <= mu + 1e-12,
                ));
            }
        }
        "pathwise" => {
            let n = opts.samples_or(10_000);
            for (i, (spec, u, b)) in pathwise_cases().into_iter().enumerate() {
                let system = SystemInstance::new(spec)?;
                let up = PreparedTarget::new(&system, &u)?;
                let bp = PreparedTarget::new(&system, &b)?;
                let mut fails = 0u64;
                let mut censored = 0u64;
                for t in 0..n as u64 {
                    let start = conditional_sample(&system, &up, StreamSeed::new(mix(opts.seed, i as u64), t));
                    match pathwise_decomposition(&system, &up, &bp, start, BLOCK_CAP) {
                        Ok(Some(_)) => {}
                        Ok(None) => censored += 1,
                        Err(RecurrenceError::PathwiseMismatch { .. }) => fails += 1,
                        Err(e) => return Err(e.into()),
                    }
                }
                r.push(CheckLine::new(
                    format!("pathwise case {i} U={u} B={b}: mismatches in {n} trials ({censored} censored)"),
                    fails as f64,
                    "0",
                    "exact",
                    fails == 0 && censored == 0,
                ));
            }
        }
        "factorization" => {
            let a = opts.alpha.unwrap_or(1.5);
            let system = SystemInstance::new(SystemSpec::RenewalShift { alpha: a })?;
            let p = RenewalParams::new(a)?;
            let mut worst = 0f64;
            let mut count = 0;
            for pattern in block_patterns(6, 4) {
                let m = target_measure(&system, &TargetSet::CylinderWord(induced_word_to_full_word(&pattern)))?;
                let f = p.x1() * pattern.iter().map(|&k| p.induced_weight(k)).product::<f64>();
                worst = worst.max((m - f).abs());
                count += 1;
            }
            r.push(CheckLine::new(
                format!("factorization alpha={a}: max |mu(word) - x_1 prod q_a P_a| over {count} patterns"),
                worst,
                "0",
                "<= 1e-12",
                worst <= 1e-12,
            ));
        }
        other => return Err(CliError::UnknownCheck(other.to_string())),
    }
    Ok(r)
}

/// All block patterns with entries in `1..=max_len` and length `1..=max_n`.
pub fn block_patterns(max_len: u64, max_n: usize) -> Vec<Vec<u64>> {
    let mut out: Vec<Vec<u64>> = Vec::new();
    let mut layer: Vec<Vec<u64>> = vec![vec![]];
    for _ in 0..max_n {
        layer = layer
            .iter()
            .flat_map(|p| {
                (1..=max_len).map(move |a| {
                    let mut q = p.clone();
                    q.push(a);
                    q
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// (system, U, B) triples for the block-sum identity.
pub fn pathwise_cases() -> Vec<(SystemSpec, TargetSet, TargetSet)> {
    vec![
        (
            SystemSpec::RenewalShift { alpha: 1.5 },
            TargetSet::CylinderWord(vec![1]),
            TargetSet::CylinderWord(induced_word_to_full_word(&[2, 1])),
        ),
        (
            SystemSpec::BernoulliShift { weights: vec![0.5, 0.5] },
            TargetSet::CylinderWord(vec![1]),
            TargetSet::CylinderWord(vec![1, 1, 2, 1]),
        ),
        (
            golden_rotation(),
            TargetSet::Interval { a: 0.0, b: 0.5 },
            TargetSet::Interval { a: 0.2, b: 0.21 },
        ),
    ]
}

fn full_vs_induced(setup: &Setup, returns: bool, opts: &VerifyOptions, tol: f64) -> Result<Report, CliError> {
    let mut r = Report::default();
    let n = opts.samples_or(100_000);
    let g = GridSpec::default();
    let (full, ind, t_min) = if returns {
        (Mode::Return, Mode::InducedReturn, THM3_T_MIN)
    } else {
        (Mode::Entry, Mode::InducedEntry, 0.0)
    };
    let f = setup.curve(full, n, mix(opts.seed, full.tag()), g)?;
    let fh = setup.curve(ind, n, mix(opts.seed, ind.tag()), g)?;
    r.note(format!(
        "B = {}: mu(B) = {:.4e}, mu_hat(B) = {:.4e}, n = {n} per curve, censored {} / {}",
        setup.b.target(),
        setup.b.measure(),
        setup.mu_hat().unwrap_or(f64::NAN),
        f.n_censored,
        fh.n_censored
    ));
    r.push(CheckLine::at_most(
        format!("sup|{} - {}| on t >= {t_min}", full.name(), ind.name()),
        sup_distance_from(&f, &fh, t_min)?,
        tol,
    ));
    if !returns && setup.native.is_some() {
        for (m, c) in [(full, &f), (ind, &fh)] {
            r.push(CheckLine::at_most(format!("sup|{} - e^-t|", m.name()), c.sup_distance_to(|t| (-t).exp()), tol));
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_json(extra: &str) -> String {
        format!(
            r#"{{"system": {{"BernoulliShift": {{"weights": [0.5, 0.5]}}}},
               "targets": [{{"CylinderWord": [1, 2]}}],
               "modes": ["entry"], "n_samples": 200, "master_seed": 1,
               "grid": {{"t_max": 5.0, "dt": 0.5}}, "cap": 10.0, "output": "out"{extra}}}"#
        )
    }

    #[test]
    fn parses_and_validates() {
        let cfg = ExperimentConfig::from_json(&base_json(""), "x.json").unwrap();
        assert_eq!(cfg.modes, vec![Mode::Entry]);
        assert!(cfg.verify.is_none());
    }

    #[test]
    fn unknown_field_has_position() {
        let err = ExperimentConfig::from_json(&base_json(r#", "typo": 1"#), "x.json").unwrap_err();
        match err {
            CliError::ConfigParse { line, message, .. } => {
                assert!(line >= 1);
                assert!(message.contains("typo"), "{message}");
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn cap_below_t_max_rejected() {
        let json = base_json("").replace(r#""cap": 10.0"#, r#""cap": 2.0"#);
        assert!(matches!(
            ExperimentConfig::from_json(&json, "x.json"),
            Err(CliError::InvalidConfig { field: "cap", .. })
        ));
        let json = base_json("").replace(r#""n_samples": 200"#, r#""n_samples": 99"#);
        assert!(matches!(
            ExperimentConfig::from_json(&json, "x.json"),
            Err(CliError::InvalidConfig { field: "n_samples", .. })
        ));
        let json = base_json("").replace(r#"["entry"]"#, r#"["induced-entry"]"#);
        assert!(matches!(
            ExperimentConfig::from_json(&json, "x.json"),
            Err(CliError::InvalidConfig { field: "return_set", .. })
        ));
    }

    #[test]
    fn unknown_check() {
        assert!(matches!(
            verify("nope", &VerifyOptions::default()),
            Err(CliError::UnknownCheck(_))
        ));
    }

    #[test]
    fn cheap_checks_pass() {
        for c in ["telescoping", "eigenvector", "factorization"] {
            let r = verify(c, &VerifyOptions::default()).unwrap();
            assert!(r.all_pass(), "{c}\n{r}");
        }
    }

    #[test]
    fn block_pattern_count() {
        assert_eq!(block_patterns(6, 4).len(), 6 + 36 + 216 + 1296);
    }

    #[test]
    fn thm_pattern_measure_in_range() {
        let sys = SystemInstance::new(SystemSpec::RenewalShift { alpha: 1.5 }).unwrap();
        let s = renewal_setup(&sys).unwrap();
        let mh = s.mu_hat().unwrap();
        assert!((1e-4..=1e-3).contains(&mh), "{mh}");
        let (_, tb) = s.native.as_ref().unwrap();
        assert!((tb.measure() - mh).abs() < 1e-12 * mh.max(1.0) + 1e-15);
    }

    #[test]
    fn run_writes_csvs() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig::from_json(&base_json(""), "x.json").unwrap();
        cfg.output = dir.path().to_path_buf();
        cfg.modes = vec![Mode::Entry, Mode::Return];
        let out = run(&cfg).unwrap();
        assert_eq!(out.csv_files.len(), 2);
        let csv = fs::read_to_string(&out.csv_files[0]).unwrap();
        assert_eq!(csv.lines().count(), 1 + cfg.grid.points().len());
        assert!(out.summary.contains("prop2 residual"));
        assert!(dir.path().join("summary.txt").exists());
    }
}
