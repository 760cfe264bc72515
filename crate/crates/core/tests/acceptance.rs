//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! Reference constants below come from an arbitrary-precision evaluation of the
//! Riemann zeta function and are not produced by the library.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use recurrence_lab::distributions::{
    build_survival, integral_relation_residual, max_jump, sup_distance, sup_distance_from, EmpiricalSurvival,
    ExactChainModel, GridSpec, Residual, SurvivalMode,
};
use recurrence_lab::recurrence::{
    default_cap, full_word_to_blocks, induced_word_to_full_word, native_induced, pathwise_decomposition,
    RecurrenceError, BLOCK_CAP, DEFAULT_HORIZON,
};
use recurrence_lab::renewal::{MomentSeries, RenewalParams};
use recurrence_lab::targets::{conditional_sample, target_measure};
use recurrence_lab::{PreparedTarget, StreamSeed, SystemInstance, SystemSpec, TargetSet, TimeSample, TrialKind, TrialPlan};

const ZETA_1_2: f64 = 5.591582441177751;
const ZETA_1_5: f64 = 2.612375348685488;
const ZETA_2_5: f64 = 1.341487257250917;

const N_TERMS: usize = 1_000_000;
const BLOCKS: [u64; 4] = [2, 3, 3, 1];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn zeta_ref(alpha: f64) -> f64 {
    [(1.2, ZETA_1_2), (1.5, ZETA_1_5), (2.5, ZETA_2_5)]
        .into_iter()
        .find(|&(a, _)| a == alpha)
        .map(|(_, z)| z)
        .expect("no reference value")
}

fn sys(spec: SystemSpec) -> SystemInstance {
    SystemInstance::new(spec).unwrap()
}

fn word(w: &[u64]) -> TargetSet {
    TargetSet::CylinderWord(w.to_vec())
}

fn batch(system: &SystemInstance, target: &PreparedTarget, u: Option<&PreparedTarget>, kind: TrialKind, n: usize, master: u64, cap: u64) -> Vec<TimeSample> {
    TrialPlan {
        system,
        target,
        return_set: u,
        kind,
        cap,
    }
    .run_batch(n, master)
    .unwrap()
}

fn curve(samples: &[TimeSample]) -> EmpiricalSurvival {
    build_survival(samples, GridSpec::default()).unwrap()
}

fn a1() -> Outcome {
    let start = Instant::now();
    let mut worst = 0f64;
    for alpha in [1.2, 1.5, 2.5] {
        let r = RenewalParams::new(alpha).unwrap();
        let lib = (r.induced_weight_sum(N_TERMS) + r.big_p(N_TERMS as u64 + 1) - 1.0).abs();
        worst = worst.max(lib);
    }
    let t = start.elapsed();
    outcome(
        worst < 1e-10 && t < Duration::from_secs(1),
        format!("max |sum q_jP_j + P_(N+1) - 1| = {worst:.3e} (< 1e-10), {:.3} s (< 1 s)", t.as_secs_f64()),
    )
}

fn a2() -> Outcome {
    let start = Instant::now();
    let mut analytic = 0f64;
    let mut zeta_err = 0f64;
    for alpha in [1.2, 1.5, 2.5] {
        let r = RenewalParams::new(alpha).unwrap();
        analytic = analytic.max((r.kac_limit().value * r.x1() - 1.0).abs());
        zeta_err = zeta_err.max((r.x1() - 1.0 / zeta_ref(alpha)).abs());
    }
    let s = sys(SystemSpec::RenewalShift { alpha: 1.5 });
    let u = PreparedTarget::new(&s, &word(&[1])).unwrap();
    let n = 1_000_000;
    let samples = batch(&s, &u, None, TrialKind::Return, n, 20_240_601, BLOCK_CAP);
    let censored = samples.iter().filter(|x| x.is_censored()).count();
    let raw: Vec<f64> = samples.iter().map(|x| x.raw().unwrap_or(BLOCK_CAP) as f64).collect();
    let mean = raw.iter().sum::<f64>() / n as f64;
    let se = (raw.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0) / n as f64).sqrt();
    let t = start.elapsed();
    let pass = analytic < 1e-8
        && zeta_err < 1e-12
        && censored == 0
        && (mean - ZETA_1_5).abs() <= 4.0 * se
        && t < Duration::from_secs(30);
    outcome(
        pass,
        format!(
            "|kac_sum x_1 - 1| = {analytic:.2e} (< 1e-8); |x_1 - 1/zeta| = {zeta_err:.1e}; MC mean {mean:.5} vs {ZETA_1_5:.5}, |diff| = {:.2} se (<= 4), censored {censored}; {:.1} s (< 30 s)",
            (mean - ZETA_1_5).abs() / se,
            t.as_secs_f64()
        ),
    )
}

fn a3() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut pass = true;
    for (alpha, diverge) in [(1.5, true), (2.5, false)] {
        let r = RenewalParams::new(alpha).unwrap();
        let verdicts: Vec<bool> = [MomentSeries::FullSpaceTau, MomentSeries::SecondMoment]
            .into_iter()
            .map(|series| {
                let g = r.growth_probe(series, N_TERMS);
                let ok = if diverge { g.diverges(1e-2, 0.5, 0.1) } else { g.converges(1e-3) };
                parts.push(format!(
                    "alpha={alpha} {series:?}: slope {:.3}, last doubling increment {:.3e} {}",
                    g.slope,
                    g.last_increment(),
                    if ok { "ok" } else { "not met" }
                ));
                ok
            })
            .collect();
        pass &= verdicts.iter().all(|&v| v);
    }
    let t = start.elapsed();
    pass &= t < Duration::from_secs(10);
    parts.push(format!("{:.2} s (< 10 s)", t.as_secs_f64()));
    outcome(pass, parts.join("; "))
}

/// No proper prefix of the block pattern is also a suffix.
fn is_aperiodic(w: &[u64]) -> bool {
    (1..w.len()).all(|k| w[..k] != w[w.len() - k..])
}

struct RenewalCase {
    full: SystemInstance,
    u: PreparedTarget,
    b: PreparedTarget,
    induced: SystemInstance,
    bh: PreparedTarget,
}

fn renewal_case() -> RenewalCase {
    let full = sys(SystemSpec::RenewalShift { alpha: 1.5 });
    let b_set = word(&induced_word_to_full_word(&BLOCKS));
    let u_set = word(&[1]);
    let (induced, bh_set) = native_induced(&full, &u_set, &b_set).unwrap();
    let u = PreparedTarget::new(&full, &u_set).unwrap();
    let b = PreparedTarget::new(&full, &b_set).unwrap();
    let bh = PreparedTarget::new(&induced, &bh_set).unwrap();
    RenewalCase { full, u, b, induced, bh }
}

fn a4_a5(returns: bool) -> Outcome {
    let start = Instant::now();
    let c = renewal_case();
    let mu_hat = c.bh.measure();
    let setup_ok = (1e-4..=1e-3).contains(&mu_hat)
        && is_aperiodic(&BLOCKS)
        && (mu_hat - c.b.measure() / c.u.measure()).abs() < 1e-15;
    let n = 100_000;
    let (kind, seed) = if returns { (TrialKind::Return, 5) } else { (TrialKind::Entry, 4) };
    let f = curve(&batch(&c.full, &c.b, None, kind, n, seed, default_cap(c.b.measure(), DEFAULT_HORIZON)));
    let fh = curve(&batch(&c.induced, &c.bh, None, kind, n, seed + 100, default_cap(mu_hat, DEFAULT_HORIZON)));
    let t = start.elapsed();
    if returns {
        let d = sup_distance_from(&f, &fh, 0.1).unwrap();
        outcome(
            setup_ok && d <= 0.03,
            format!("mu_hat(B) = {mu_hat:.4e}; sup_(t>=0.1) |F~_B - F^~_B| = {d:.4e} (<= 0.03); {:.1} s", t.as_secs_f64()),
        )
    } else {
        let d = sup_distance(&f, &fh).unwrap();
        let de = f.sup_distance_to(|t| (-t).exp());
        let dhe = fh.sup_distance_to(|t| (-t).exp());
        outcome(
            setup_ok && d <= 0.03 && de <= 0.03 && dhe <= 0.03,
            format!(
                "mu_hat(B) = {mu_hat:.4e} in [1e-4, 1e-3], aperiodic; sup|F_B - F^_B| = {d:.4e}, sup|F_B - e^-t| = {de:.4e}, sup|F^_B - e^-t| = {dhe:.4e} (each <= 0.03); {:.1} s",
                t.as_secs_f64()
            ),
        )
    }
}

fn a6() -> Outcome {
    let s = sys(SystemSpec::BernoulliShift { weights: vec![0.5, 0.5] });
    let w = [1, 1, 1, 1, 1, 1, 1, 1, 1, 2];
    let b = PreparedTarget::new(&s, &word(&w)).unwrap();
    let mu = b.measure();
    let cap = default_cap(mu, DEFAULT_HORIZON);
    let n = 100_000;
    let e = curve(&batch(&s, &b, None, TrialKind::Entry, n, 6, cap));
    let r = curve(&batch(&s, &b, None, TrialKind::Return, n, 7, cap));
    let res = integral_relation_residual(&e, &r).unwrap();
    let ok_mu = (mu - 2f64.powi(-10)).abs() < 1e-18;
    match res {
        Residual::Bounded(v) => outcome(
            ok_mu && v <= 0.03,
            format!("mu(B) = {mu:.4e}; residual = {v:.4e} (<= 0.03)"),
        ),
        Residual::UnboundedTail => outcome(false, "return tail fit did not decay".into()),
    }
}

fn a7() -> Outcome {
    let cases = [
        (SystemSpec::RenewalShift { alpha: 1.5 }, word(&[1]), word(&induced_word_to_full_word(&[2, 1]))),
        (SystemSpec::BernoulliShift { weights: vec![0.5, 0.5] }, word(&[1]), word(&[1, 1, 2, 1])),
        (
            SystemSpec::Rotation {
                theta: (5f64.sqrt() - 1.0) / 2.0,
            },
            TargetSet::Interval { a: 0.0, b: 0.5 },
            TargetSet::Interval { a: 0.2, b: 0.21 },
        ),
    ];
    let per_case = 3_334u64;
    let mut total = 0;
    let mut failures = 0;
    for (i, (spec, u, b)) in cases.into_iter().enumerate() {
        let s = sys(spec);
        let up = PreparedTarget::new(&s, &u).unwrap();
        let bp = PreparedTarget::new(&s, &b).unwrap();
        for t in 0..per_case {
            let start = conditional_sample(&s, &up, StreamSeed::new(70 + i as u64, t));
            total += 1;
            match pathwise_decomposition(&s, &up, &bp, start, BLOCK_CAP) {
                Ok(Some(tr)) if tr.blocks.iter().sum::<u64>() == tr.full_time => {}
                Ok(_) | Err(RecurrenceError::PathwiseMismatch { .. }) => failures += 1,
                Err(e) => panic!("{e}"),
            }
        }
    }
    outcome(
        failures == 0 && total >= 10_000,
        format!("{failures} mismatches in {total} trials over 3 configurations"),
    )
}

fn a8() -> Outcome {
    let cases: Vec<(SystemSpec, Vec<u64>)> = vec![
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
    ];
    let g = GridSpec::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, (spec, w)) in cases.into_iter().enumerate() {
        let s = sys(spec);
        let model = ExactChainModel::from_system(&s, &w).unwrap();
        let b = PreparedTarget::new(&s, &word(&w)).unwrap();
        let mu = b.measure();
        let exact = model.exact_survival((g.t_max / mu).ceil() as usize + 2, SurvivalMode::Entry);
        let emp = curve(&batch(&s, &b, None, TrialKind::Entry, 100_000, 80 + i as u64, default_cap(mu, DEFAULT_HORIZON)));
        let d = sup_distance(&emp, &EmpiricalSurvival::from_exact(g, mu, &exact)).unwrap();
        let jump = max_jump(&exact);
        let ok = d <= 0.006 && jump <= mu + 1e-12 && (model.measure() - mu).abs() < 1e-15;
        pass &= ok;
        parts.push(format!("case {i}: sup {d:.4}, jump {jump:.4e} <= mu {mu:.4e}"));
    }
    outcome(pass, parts.join("; "))
}

fn a9() -> Outcome {
    let s = sys(SystemSpec::Rotation {
        theta: (5f64.sqrt() - 1.0) / 2.0,
    });
    let u = PreparedTarget::new(&s, &TargetSet::Interval { a: 0.0, b: 0.5 }).unwrap();
    let b = PreparedTarget::new(&s, &TargetSet::Interval { a: 0.2, b: 0.201 }).unwrap();
    let n = 100_000;
    let mu = b.measure();
    let mu_hat = mu / u.measure();
    let f = curve(&batch(&s, &b, None, TrialKind::Entry, n, 9, default_cap(mu, DEFAULT_HORIZON)));
    let fh = curve(&batch(&s, &b, Some(&u), TrialKind::InducedEntry, n, 10, default_cap(mu_hat, DEFAULT_HORIZON)));
    let d = sup_distance(&f, &fh).unwrap();
    let de = f.sup_distance_to(|t| (-t).exp());
    outcome(
        d <= 0.04 && (mu - 1e-3).abs() < 1e-12,
        format!("mu(B) = {mu:.4e}; sup|F_B - F^_B| = {d:.4e} (<= 0.04); limit is not exponential: sup|F_B - e^-t| = {de:.3}"),
    )
}

fn a10() -> Outcome {
    let mut worst = 0f64;
    let mut count = 0;
    for alpha in [1.5, 2.5] {
        let s = sys(SystemSpec::RenewalShift { alpha });
        let x1 = 1.0 / zeta_ref(alpha);
        let qp = |a: u64| (a as f64).powf(-alpha) - (a as f64 + 1.0).powf(-alpha);
        let mut layer: Vec<Vec<u64>> = vec![vec![]];
        for _ in 0..4 {
            layer = layer
                .iter()
                .flat_map(|p| {
                    (1..=6u64).map(move |a| {
                        let mut q = p.clone();
                        q.push(a);
                        q
                    })
                })
                .collect();
            for pattern in &layer {
                let w = induced_word_to_full_word(pattern);
                assert_eq!(full_word_to_blocks(&w).as_deref(), Some(pattern.as_slice()));
                let m = target_measure(&s, &word(&w)).unwrap();
                let f = x1 * pattern.iter().map(|&a| qp(a)).product::<f64>();
                worst = worst.max((m - f).abs());
                count += 1;
            }
        }
    }
    outcome(
        worst <= 1e-12,
        format!("max |mu(word) - x_1 prod q_aP_a| = {worst:.2e} over {count} patterns (<= 1e-12)"),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("A1", a1),
        ("A2", a2),
        ("A3", a3),
        ("A4", || a4_a5(false)),
        ("A5", || a4_a5(true)),
        ("A6", a6),
        ("A7", a7),
        ("A8", a8),
        ("A9", a9),
        ("A10", a10),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let o = run();
        println!("{name} {}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(name);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 10 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
