//! Closed forms for the renewal shift with `p_i = (i/(i+1))^alpha`.
//!
//! The chain on `{1, 2, ...}` climbs `i -> i+1` with probability `p_i` and
//! resets `i -> 1` with probability `q_i = 1 - p_i`. With this choice the
//! survival products telescope to `P_j = p_1 ... p_{j-1} = j^(-alpha)`, the
//! stationary vector is `x_j = x_1 P_j` with `1/x_1 = zeta(alpha)`, and the
//! first-return system on `{omega_0 = 1}` is a Bernoulli shift on block
//! lengths with weights `q_j P_j`.
//!
//! Infinite series are summed explicitly to [`SERIES_TERMS`] and closed with
//! an Euler-Maclaurin tail; every such value comes back as a [`SeriesValue`]
//! carrying its truncation bound.

use std::sync::OnceLock;

use thiserror::Error;

/// Number of explicitly summed terms behind every "infinite" series.
pub const SERIES_TERMS: usize = 1_000_000;

/// Explicit prefix used by the stationary sampler and for `zeta(alpha)`.
const HEAD_TERMS: usize = 1 << 16;

/// Block lengths below this are sampled by a threshold scan.
const BLOCK_TABLE: usize = 64;

/// Largest symbol the sampler emits; the tail beyond it has mass `~2^(-62(alpha-1))`.
pub const MAX_SYMBOL: u64 = 1 << 62;

#[derive(Debug, Error, PartialEq)]
pub enum RenewalError {
    #[error("alpha must be a finite real > 1, got {0}")]
    InvalidAlpha(f64),
}

/// A real number together with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub error_bound: f64,
}

/// Which moment series a [`GrowthProbe`] follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentSeries {
    /// `sum_k k x_1 P_k`, the partial integral of `tau_U` over the whole space.
    FullSpaceTau,
    /// `sum_k k^2 q_k P_k`, the second moment of the return time under the induced measure.
    SecondMoment,
}

/// Compensated running sum (Neumaier).
#[derive(Debug, Default, Clone, Copy)]
struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Prefix sums indexed by `k = 0..=SERIES_TERMS` (entry 0 is the empty sum).
struct SeriesTables {
    sum_p: Vec<f64>,
    sum_qp: Vec<f64>,
    sum_kqp: Vec<f64>,
    sum_k2qp: Vec<f64>,
    sum_kp: Vec<f64>,
}

pub struct RenewalParams {
    alpha: f64,
    /// `head[j] = sum_{i <= j} i^(-alpha)` for `j = 0..=HEAD_TERMS`.
    head: Vec<f64>,
    /// `P_k` for `k = 1..=BLOCK_TABLE + 1`, index 0 unused.
    block_thresholds: Vec<f64>,
    zeta: SeriesValue,
    tables: OnceLock<SeriesTables>,
}

impl std::fmt::Debug for RenewalParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RenewalParams")
            .field("alpha", &self.alpha)
            .field("zeta", &self.zeta)
            .finish_non_exhaustive()
    }
}

impl RenewalParams {
    pub fn new(alpha: f64) -> Result<Self, RenewalError> {
        if !alpha.is_finite() || alpha <= 1.0 {
            return Err(RenewalError::InvalidAlpha(alpha));
        }
        let mut head = Vec::with_capacity(HEAD_TERMS + 1);
        head.push(0.0);
        let mut acc = KahanSum::default();
        for j in 1..=HEAD_TERMS {
            acc.add((j as f64).powf(-alpha));
            head.push(acc.value());
        }
        let tail = zeta_tail(alpha, (HEAD_TERMS + 1) as f64);
        let value = head[HEAD_TERMS] + tail.value;
        let zeta = SeriesValue {
            value,
            error_bound: tail.error_bound + 8.0 * f64::EPSILON * value,
        };
        let block_thresholds = (0..=BLOCK_TABLE + 1)
            .map(|k| if k == 0 { 1.0 } else { (k as f64).powf(-alpha) })
            .collect();
        Ok(Self {
            alpha,
            head,
            block_thresholds,
            zeta,
            tables: OnceLock::new(),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Climb probability `p_j = (j/(j+1))^alpha`.
    pub fn p(&self, j: u64) -> f64 {
        (-self.alpha * (1.0 / j as f64).ln_1p()).exp()
    }

    /// Reset probability `q_j = 1 - p_j`, evaluated without cancellation.
    pub fn q(&self, j: u64) -> f64 {
        -(-self.alpha * (1.0 / j as f64).ln_1p()).exp_m1()
    }

    /// `P_j = prod_{i<j} p_i = j^(-alpha)`.
    pub fn big_p(&self, j: u64) -> f64 {
        (j as f64).powf(-self.alpha)
    }

    /// `zeta(alpha) = sum_j P_j = 1 / mu(U)`.
    pub fn zeta(&self) -> SeriesValue {
        self.zeta
    }

    /// `mu(U) = x_1`.
    pub fn x1(&self) -> f64 {
        1.0 / self.zeta.value
    }

    /// Stationary mass of symbol `j`.
    pub fn stationary_x(&self, j: u64) -> f64 {
        assert!(j >= 1, "symbols start at 1");
        self.big_p(j) / self.zeta.value
    }

    /// Induced Bernoulli weight of block length `j`: `mu_hat(D_j) = q_j P_j`.
    pub fn induced_weight(&self, j: u64) -> f64 {
        assert!(j >= 1, "block lengths start at 1");
        self.q(j) * self.big_p(j)
    }

    /// `sum_{j >= m} j^(-alpha)` for real `m >= 1`.
    pub fn zeta_tail(&self, m: u64) -> SeriesValue {
        if m <= HEAD_TERMS as u64 {
            let value = self.zeta.value - self.head[m as usize - 1];
            return SeriesValue {
                value,
                error_bound: self.zeta.error_bound,
            };
        }
        zeta_tail(self.alpha, m as f64)
    }

    fn tables(&self) -> &SeriesTables {
        self.tables.get_or_init(|| {
            let n = SERIES_TERMS;
            let mut t = SeriesTables {
                sum_p: Vec::with_capacity(n + 1),
                sum_qp: Vec::with_capacity(n + 1),
                sum_kqp: Vec::with_capacity(n + 1),
                sum_k2qp: Vec::with_capacity(n + 1),
                sum_kp: Vec::with_capacity(n + 1),
            };
            let mut acc = [KahanSum::default(); 5];
            for v in [
                &mut t.sum_p,
                &mut t.sum_qp,
                &mut t.sum_kqp,
                &mut t.sum_k2qp,
                &mut t.sum_kp,
            ] {
                v.push(0.0);
            }
            for k in 1..=n as u64 {
                let pk = self.big_p(k);
                let qp = self.q(k) * pk;
                let kf = k as f64;
                acc[0].add(pk);
                acc[1].add(qp);
                acc[2].add(kf * qp);
                acc[3].add(kf * kf * qp);
                acc[4].add(kf * pk);
                t.sum_p.push(acc[0].value());
                t.sum_qp.push(acc[1].value());
                t.sum_kqp.push(acc[2].value());
                t.sum_k2qp.push(acc[3].value());
                t.sum_kp.push(acc[4].value());
            }
            t
        })
    }

    /// Sums `f(k)` for `k = 1..=n`, from the prefix table when it reaches.
    fn prefix(&self, n: usize, pick: fn(&SeriesTables) -> &[f64], f: impl Fn(u64) -> f64) -> f64 {
        let t = pick(self.tables());
        if n <= SERIES_TERMS {
            return t[n];
        }
        let mut acc = KahanSum::default();
        acc.add(t[SERIES_TERMS]);
        for k in SERIES_TERMS as u64 + 1..=n as u64 {
            acc.add(f(k));
        }
        acc.value()
    }

    /// `sum_{j <= n} P_j`.
    pub fn partial_zeta(&self, n: usize) -> f64 {
        self.prefix(n, |t| &t.sum_p, |k| self.big_p(k))
    }

    /// `sum_{j <= n} q_j P_j`; telescopes to `1 - P_{n+1}`.
    pub fn induced_weight_sum(&self, n: usize) -> f64 {
        self.prefix(n, |t| &t.sum_qp, |k| self.induced_weight(k))
    }

    /// Kac partial sum `sum_{k <= n} k q_k P_k`.
    pub fn kac_sum(&self, n: usize) -> f64 {
        self.prefix(n, |t| &t.sum_kqp, |k| k as f64 * self.induced_weight(k))
    }

    /// The Kac series summed to infinity.
    ///
    /// Abel summation gives the tail `sum_{k>N} k (P_k - P_{k+1}) = N P_{N+1} + sum_{k>N} P_k`.
    pub fn kac_limit(&self) -> SeriesValue {
        let n = SERIES_TERMS as u64;
        let tail = self.zeta_tail(n + 1);
        let value = self.kac_sum(SERIES_TERMS) + n as f64 * self.big_p(n + 1) + tail.value;
        SeriesValue {
            value,
            error_bound: tail.error_bound + 16.0 * f64::EPSILON * value,
        }
    }

    /// Partial sum over `k <= n` of `int_Omega tau_U dmu = sum_{j,k} k x_1 P_{j+k-1} q_{j+k-1}`.
    ///
    /// The inner `j`-sum telescopes to `P_k` exactly, leaving `x_1 sum_{k<=n} k P_k`.
    pub fn full_space_tau_partial(&self, n: usize) -> f64 {
        self.x1() * self.prefix(n, |t| &t.sum_kp, |k| k as f64 * self.big_p(k))
    }

    /// `sum_{k <= n} k^2 q_k P_k`.
    pub fn second_moment_partial(&self, n: usize) -> f64 {
        self.prefix(
            n,
            |t| &t.sum_k2qp,
            |k| {
                let kf = k as f64;
                kf * kf * self.induced_weight(k)
            },
        )
    }

    /// `sum_{j <= n} q_j x_j` plus the exact tail `x_1 P_{n+1}`; equals `x_1` for a left eigenvector.
    pub fn eigenvector_lhs(&self, n: usize) -> f64 {
        self.x1() * (self.induced_weight_sum(n) + self.big_p(n as u64 + 1))
    }

    pub fn moment_partial(&self, series: MomentSeries, n: usize) -> f64 {
        match series {
            MomentSeries::FullSpaceTau => self.full_space_tau_partial(n),
            MomentSeries::SecondMoment => self.second_moment_partial(n),
        }
    }

    /// Partial sums at `k_max / 2^i`, `i = 0..=10`, with doubling increments and a log-log slope.
    pub fn growth_probe(&self, series: MomentSeries, k_max: usize) -> GrowthProbe {
        let mut ks: Vec<usize> = (0..=10).map(|i| k_max >> i).filter(|&k| k >= 1).collect();
        ks.reverse();
        ks.dedup();
        let sums: Vec<f64> = ks.iter().map(|&k| self.moment_partial(series, k)).collect();
        let increments = sums.windows(2).map(|w| w[1] - w[0]).collect();
        let xs: Vec<f64> = ks.iter().map(|&k| (k as f64).ln()).collect();
        let ys: Vec<f64> = sums.iter().map(|s| s.ln()).collect();
        GrowthProbe {
            series,
            checkpoints: ks.into_iter().zip(sums).collect(),
            increments,
            slope: least_squares_slope(&xs, &ys),
        }
    }

    /// Stationary symbol from `v` uniform on `(0, 1]`: the smallest `J` with
    /// `sum_{j > J} x_j < v`.
    pub fn stationary_symbol(&self, v: f64) -> u64 {
        let target = v * self.zeta.value;
        let cut = HEAD_TERMS as u64 + 1;
        if self.zeta_tail(cut).value >= target {
            // tail region: T(J + 1) < target, binary search on J in [HEAD_TERMS, MAX_SYMBOL]
            let (mut lo, mut hi) = (HEAD_TERMS as u64, MAX_SYMBOL);
            if zeta_tail(self.alpha, hi as f64 + 1.0).value >= target {
                return MAX_SYMBOL;
            }
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if zeta_tail(self.alpha, mid as f64 + 1.0).value < target {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return hi;
        }
        // head[J] > zeta - target, smallest such J
        let threshold = self.zeta.value - target;
        let j = self.head[1..].partition_point(|&s| s <= threshold);
        (j as u64 + 1).min(HEAD_TERMS as u64)
    }

    /// Block length `L` with `P(L >= k) = P_k`, from `u` uniform on `(0, 1]`.
    #[inline]
    pub fn block_length(&self, u: f64) -> u64 {
        let t = &self.block_thresholds;
        let mut k = 1;
        while k <= BLOCK_TABLE && u <= t[k + 1] {
            k += 1;
        }
        if k <= BLOCK_TABLE {
            return k as u64;
        }
        let l = u.powf(-1.0 / self.alpha).floor();
        if l >= MAX_SYMBOL as f64 {
            return MAX_SYMBOL;
        }
        // fix up a rounding error of one in the root: L = max{k : u <= P_k}
        let mut l = (l as u64).max(BLOCK_TABLE as u64 + 1);
        if u <= self.big_p(l + 1) {
            l += 1;
        } else if u > self.big_p(l) && l > BLOCK_TABLE as u64 + 1 {
            l -= 1;
        }
        l
    }

    /// Number of climbs `K` from symbol `j` before the next reset,
    /// `P(K >= k) = (j/(j+k))^alpha`, from `u` uniform on `(0, 1]`.
    #[inline]
    pub fn climb_length(&self, j: u64, u: f64) -> u64 {
        if j == 1 {
            return self.block_length(u) - 1;
        }
        let k = (j as f64 * (-u.ln() / self.alpha).exp_m1()).floor();
        if k >= (MAX_SYMBOL - j) as f64 {
            MAX_SYMBOL - j
        } else {
            k as u64
        }
    }
}

/// Summary of partial sums along doubling cut-offs.
#[derive(Debug, Clone)]
pub struct GrowthProbe {
    pub series: MomentSeries,
    /// `(K, S(K))` for increasing `K`.
    pub checkpoints: Vec<(usize, f64)>,
    /// `S(2K) - S(K)` between neighbouring checkpoints.
    pub increments: Vec<f64>,
    /// Least-squares slope of `ln S(K)` against `ln K`.
    pub slope: f64,
}

impl GrowthProbe {
    /// Cauchy failure: every doubling increment exceeds `floor` and the growth
    /// rate is within `slope_tol` of `expected_slope`.
    pub fn diverges(&self, floor: f64, expected_slope: f64, slope_tol: f64) -> bool {
        self.increments.iter().all(|&d| d > floor)
            && (self.slope - expected_slope).abs() <= slope_tol
    }

    /// Cauchy pass: the last doubling increment is below `tol`.
    pub fn converges(&self, tol: f64) -> bool {
        self.last_increment() < tol
    }

    pub fn last_increment(&self) -> f64 {
        self.increments.last().copied().unwrap_or(f64::INFINITY)
    }
}

/// Euler-Maclaurin tail `sum_{j >= m} j^(-alpha)` for `m` well above 1.
fn zeta_tail(alpha: f64, m: f64) -> SeriesValue {
    let a = alpha;
    let f = m.powf(-a);
    let value = m * f / (a - 1.0) + f / 2.0 + a * f / (12.0 * m)
        - a * (a + 1.0) * (a + 2.0) * f / (720.0 * m.powi(3));
    let remainder = a * (a + 1.0) * (a + 2.0) * (a + 3.0) * (a + 4.0) * f / (30240.0 * m.powi(5));
    SeriesValue {
        value,
        error_bound: remainder + 4.0 * f64::EPSILON * value,
    }
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
