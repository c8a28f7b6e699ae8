//! Density, statistical-convergence, and power-series summability machinery.
//!
//! The convergence modes stack up from the natural density of an index set,
//! through weighted and matrix (A-statistical) variants, to the deferred
//! weighted A-statistical density
//!
//! ```text
//! (1/S_n) sum_{m=b_n+1}^{c_n} sum_{k in K} s_m a_{m,k},
//! S_n = sum_{m=b_n+1}^{c_n} s_m,
//! ```
//!
//! and, separately, the power-series method: the limit as `u -> R-` of
//! `(1/p(u)) sum_j x_j p_j u^{j-1}`. Limits are never asserted numerically;
//! transforms are evaluated along a ladder of `u` values approaching the
//! radius and reported as a trend, with the final value as the estimate.
//!
//! Infinite sums are truncated only with a certificate: matrix rows either
//! have finite support or a geometric tail bound, and transforms require a
//! sup bound on the sequence so the discarded weight can be bounded.

use thiserror::Error;

/// Certified truncation level for infinite rows and transform tails.
const SERIES_TAIL_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum SummabilityError {
    #[error("epsilon must be positive, got {0}")]
    InvalidEpsilon(f64),
    #[error("the weight sum over the window is zero")]
    ZeroWeightSum,
    #[error("sequence index must be positive")]
    ZeroIndex,
    #[error("transform requires a sup bound on the sequence (unbounded marker passed)")]
    UnboundedSequence,
    #[error("u = {u} lies outside the open interval (0, {radius})")]
    OutsideRadius { u: f64, radius: f64 },
    #[error("u = {u} exceeds the floating-point range of this method (max {max})")]
    ArgumentTooLarge { u: f64, max: f64 },
    #[error("sequence produced a non-finite value {value} at index {index}")]
    NonFiniteTerm { index: usize, value: f64 },
    #[error("rate scale must be positive and nonincreasing; alpha({index}) = {value}")]
    InvalidRateScale { index: usize, value: f64 },
}

/// 1 when `m` is a perfect square, else 0. The canonical witness that
/// power-series convergence outruns ordinary convergence: its prefix maximum
/// is identically 1 while every summability transform of it decays.
pub fn squares_indicator(m: usize) -> f64 {
    if is_perfect_square(m) {
        1.0
    } else {
        0.0
    }
}

pub fn is_perfect_square(m: usize) -> bool {
    let r = (m as f64).sqrt().round() as usize;
    for cand in r.saturating_sub(1)..=r + 1 {
        if cand * cand == m {
            return true;
        }
    }
    false
}

/// Prefix (natural) density `|{m <= n : membership(m)}| / n`.
pub fn prefix_density<M: Fn(usize) -> bool>(membership: M, n: usize) -> f64 {
    assert!(n >= 1, "prefix density needs a positive prefix length");
    let count = (1..=n).filter(|&m| membership(m)).count();
    count as f64 / n as f64
}

/// Weight sequence `s_m` for the weighted and deferred weighted modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightRule {
    /// `s_m = 1`; every weighted notion collapses to its unweighted form.
    Ones,
    /// `s_m = m`.
    Linear,
}

impl WeightRule {
    pub fn at(self, m: usize) -> f64 {
        match self {
            WeightRule::Ones => 1.0,
            WeightRule::Linear => m as f64,
        }
    }
}

/// Deferral window `(b_n, c_n]` with `b_n < c_n` and `c_n -> infinity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeferralRule {
    /// `b_n = floor(n/2)`, `c_n = n`.
    HalfToN,
    /// `b_n = 0`, `c_n = n`; the window that recovers plain weighted means.
    ZeroToN,
}

impl DeferralRule {
    pub fn window(self, n: usize) -> (usize, usize) {
        assert!(n >= 1, "deferral windows are indexed from 1");
        match self {
            DeferralRule::HalfToN => (n / 2, n),
            DeferralRule::ZeroToN => (0, n),
        }
    }
}

/// Nonnegative regular summability matrix, row-addressable with certified
/// truncation of infinite rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SummabilityMatrix {
    /// `a_{n,k} = [k == n]`; statistical notions collapse to ordinary ones.
    Identity,
    /// Cesaro C1: `a_{n,k} = 1/n` for `k <= n`.
    Cesaro,
    /// `a_{n,k} = (1 - t_n) t_n^{k-1}` with `t_n = n/(n+1)`: infinite rows
    /// with a geometric tail, exercising the certified-truncation path.
    GeometricRows,
}

impl SummabilityMatrix {
    /// Row `n` as `(k, a_{n,k})` pairs plus a bound on the discarded row
    /// tail (zero for finite rows).
    pub fn truncated_row(&self, n: usize, tail_tol: f64) -> (Vec<(usize, f64)>, f64) {
        assert!(n >= 1, "matrix rows are indexed from 1");
        match self {
            SummabilityMatrix::Identity => (vec![(n, 1.0)], 0.0),
            SummabilityMatrix::Cesaro => {
                let a = 1.0 / n as f64;
                ((1..=n).map(|k| (k, a)).collect(), 0.0)
            }
            SummabilityMatrix::GeometricRows => {
                let t = n as f64 / (n as f64 + 1.0);
                let mut entries = Vec::new();
                let mut a = 1.0 - t;
                let mut tail = 1.0; // remaining mass after the pushed entries
                let mut k = 1;
                while tail > tail_tol {
                    entries.push((k, a));
                    tail *= t;
                    a *= t;
                    k += 1;
                }
                (entries, tail)
            }
        }
    }
}

/// The full deferred weighted A-statistical setup: matrix, weights, and
/// deferral window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SummabilityScheme {
    pub matrix: SummabilityMatrix,
    pub weights: WeightRule,
    pub deferral: DeferralRule,
}

impl Default for SummabilityScheme {
    fn default() -> Self {
        SummabilityScheme {
            matrix: SummabilityMatrix::Cesaro,
            weights: WeightRule::Ones,
            deferral: DeferralRule::HalfToN,
        }
    }
}

/// The weighted-statistical density at prefix `n`, implemented literally as
/// written: `|{k <= S_n : s_k |x_k - l| >= eps}| / S_n`. The index range is
/// bounded by the weight sum `S_n` itself; with `s = 1` this degenerates to
/// the usual `k <= n`.
pub fn weighted_statistical_density<X: Fn(usize) -> f64>(
    seq: X,
    weights: WeightRule,
    limit: f64,
    eps: f64,
    n: usize,
) -> Result<f64, SummabilityError> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(SummabilityError::InvalidEpsilon(eps));
    }
    if n == 0 {
        return Err(SummabilityError::ZeroIndex);
    }
    let s_n: f64 = (1..=n).map(|k| weights.at(k)).sum();
    if s_n <= 0.0 {
        return Err(SummabilityError::ZeroWeightSum);
    }
    let cap = s_n.floor() as usize;
    let count = (1..=cap)
        .filter(|&k| weights.at(k) * (seq(k) - limit).abs() >= eps)
        .count();
    Ok(count as f64 / s_n)
}

/// A-statistical tail at row `n`: `sum_{k : |x_k - l| >= eps} a_{n,k}`,
/// truncated where the row's certified tail drops below 1e-12.
pub fn a_statistical_tail<X: Fn(usize) -> f64>(
    seq: X,
    matrix: SummabilityMatrix,
    limit: f64,
    eps: f64,
    n: usize,
) -> Result<f64, SummabilityError> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(SummabilityError::InvalidEpsilon(eps));
    }
    if n == 0 {
        return Err(SummabilityError::ZeroIndex);
    }
    let (row, _tail) = matrix.truncated_row(n, SERIES_TAIL_TOL);
    let mut sum = 0.0;
    for (k, a) in row {
        let v = seq(k);
        if !v.is_finite() {
            return Err(SummabilityError::NonFiniteTerm { index: k, value: v });
        }
        if (v - limit).abs() >= eps {
            sum += a;
        }
    }
    Ok(sum)
}

/// Deferred weighted A-density of the index set `membership` at `n`:
/// `(1/S_n) sum_{m=b_n+1}^{c_n} s_m sum_{k in K} a_{m,k}`.
pub fn deferred_weighted_a_density<M: Fn(usize) -> bool>(
    membership: M,
    scheme: SummabilityScheme,
    n: usize,
) -> Result<f64, SummabilityError> {
    if n == 0 {
        return Err(SummabilityError::ZeroIndex);
    }
    let (b, c) = scheme.deferral.window(n);
    let s_n: f64 = (b + 1..=c).map(|m| scheme.weights.at(m)).sum();
    if s_n <= 0.0 {
        return Err(SummabilityError::ZeroWeightSum);
    }
    let mut total = 0.0;
    for m in b + 1..=c {
        let (row, _tail) = scheme.matrix.truncated_row(m, SERIES_TAIL_TOL);
        let row_mass: f64 = row
            .iter()
            .filter(|&&(k, _)| membership(k))
            .map(|&(_, a)| a)
            .sum();
        total += scheme.weights.at(m) * row_mass;
    }
    Ok(total / s_n)
}

/// Deferred weighted mean `(1/S_n) sum_{m=b_n+1}^{c_n} s_m x_m`.
pub fn deferred_weighted_mean<X: Fn(usize) -> f64>(
    seq: X,
    scheme: SummabilityScheme,
    n: usize,
) -> Result<f64, SummabilityError> {
    if n == 0 {
        return Err(SummabilityError::ZeroIndex);
    }
    let (b, c) = scheme.deferral.window(n);
    let s_n: f64 = (b + 1..=c).map(|m| scheme.weights.at(m)).sum();
    if s_n <= 0.0 {
        return Err(SummabilityError::ZeroWeightSum);
    }
    let mut total = 0.0;
    for m in b + 1..=c {
        let v = seq(m);
        if !v.is_finite() {
            return Err(SummabilityError::NonFiniteTerm { index: m, value: v });
        }
        total += scheme.weights.at(m) * v;
    }
    Ok(total / s_n)
}

/// Rate comparison data: a positive nonincreasing scale sequence `alpha_n`
/// for statements of the form "the error is a small-o of `alpha_n`" in a
/// statistical sense, and a positive comparison function on the transform
/// argument for the big-O statements near the radius.
///
/// Both rules are user closures; construction spot-checks the invariants on
/// a prefix of indices (positivity and monotonicity of `alpha`).
pub struct RateConfig<A, W>
where
    A: Fn(usize) -> f64,
    W: Fn(f64) -> f64,
{
    alpha: A,
    omega: W,
}

impl<A, W> RateConfig<A, W>
where
    A: Fn(usize) -> f64,
    W: Fn(f64) -> f64,
{
    pub fn new(alpha: A, omega: W) -> Result<Self, SummabilityError> {
        let mut previous = f64::INFINITY;
        for n in 1..=64 {
            let a = alpha(n);
            if a.is_nan() || a <= 0.0 || a > previous {
                return Err(SummabilityError::InvalidRateScale { index: n, value: a });
            }
            previous = a;
        }
        Ok(RateConfig { alpha, omega })
    }

    pub fn alpha(&self, n: usize) -> f64 {
        (self.alpha)(n)
    }

    pub fn omega(&self, u: f64) -> f64 {
        (self.omega)(u)
    }

    /// The comparison sequence `x_n / alpha_n` whose statistical decay is
    /// what "x is a statistical small-o of alpha" means.
    pub fn scaled(&self, value: f64, n: usize) -> f64 {
        value / self.alpha(n)
    }

    /// The ratio `value / Omega(u)` for big-O comparisons near the radius.
    pub fn compared(&self, value: f64, u: f64) -> f64 {
        value / self.omega(u)
    }
}

// ---------------------------------------------------------------------------
// power series method
// ---------------------------------------------------------------------------

/// A concrete power-series summability method: the weight sequence `p_j`,
/// its closed-form generating value `p(u)`, and the radius of convergence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerSeriesMethod {
    /// `p_j = 1`, `p(u) = 1/(1-u)`, radius 1 (the Abel method).
    Abel,
    /// `p_j = 1/(j-1)!`, `p(u) = e^u`, unbounded radius (the Borel method).
    Borel,
}

/// Largest `u` the Borel transform supports before `e^{-u}` leaves the
/// normal floating-point range.
const BOREL_MAX_U: f64 = 700.0;

impl PowerSeriesMethod {
    pub fn abel() -> Self {
        PowerSeriesMethod::Abel
    }

    pub fn borel() -> Self {
        PowerSeriesMethod::Borel
    }

    /// The weight `p_j`, indexed from `j = 1`.
    pub fn weight(&self, j: usize) -> f64 {
        assert!(j >= 1, "power-series weights are indexed from 1");
        match self {
            PowerSeriesMethod::Abel => 1.0,
            PowerSeriesMethod::Borel => {
                let mut w = 1.0;
                for i in 1..j {
                    w /= i as f64;
                }
                w
            }
        }
    }

    /// Radius of convergence; `None` means unbounded.
    pub fn radius(&self) -> Option<f64> {
        match self {
            PowerSeriesMethod::Abel => Some(1.0),
            PowerSeriesMethod::Borel => None,
        }
    }

    /// Closed-form `p(u) = sum_j p_j u^{j-1}`.
    pub fn denominator(&self, u: f64) -> f64 {
        match self {
            PowerSeriesMethod::Abel => 1.0 / (1.0 - u),
            PowerSeriesMethod::Borel => u.exp(),
        }
    }

    /// Evaluation ladder approaching the radius: `u_k = R (1 - 2^{-k})` for
    /// `k = 4..=14` when the radius is finite, `u_k = 2^k` for `k = 0..=9`
    /// otherwise.
    pub fn ladder(&self) -> Vec<f64> {
        match self.radius() {
            Some(r) => (4..=14).map(|k| r * (1.0 - 0.5_f64.powi(k))).collect(),
            None => (0..=9).map(|k| 2.0_f64.powi(k)).collect(),
        }
    }

    fn check_argument(&self, u: f64) -> Result<(), SummabilityError> {
        match self {
            PowerSeriesMethod::Abel => {
                if u > 0.0 && u < 1.0 {
                    Ok(())
                } else {
                    Err(SummabilityError::OutsideRadius { u, radius: 1.0 })
                }
            }
            PowerSeriesMethod::Borel => {
                if u.is_nan() || u <= 0.0 {
                    Err(SummabilityError::OutsideRadius {
                        u,
                        radius: f64::INFINITY,
                    })
                } else if u > BOREL_MAX_U {
                    Err(SummabilityError::ArgumentTooLarge { u, max: BOREL_MAX_U })
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// Power-series transform `(1/p(u)) sum_j x_j p_j u^{j-1}`.
///
/// `sup_bound` must bound `|x_j|` over all `j`; it certifies the truncation
/// (the discarded weight fraction times the bound is kept below 1e-12).
/// Passing `None` marks the sequence as unbounded, which is an error.
pub fn power_series_transform<X: Fn(usize) -> f64>(
    seq: X,
    sup_bound: Option<f64>,
    method: PowerSeriesMethod,
    u: f64,
) -> Result<f64, SummabilityError> {
    let bound = sup_bound.ok_or(SummabilityError::UnboundedSequence)?;
    method.check_argument(u)?;

    let mut acc = 0.0;
    match method {
        PowerSeriesMethod::Abel => {
            // normalized weights (1-u) u^{j-1}; remaining fraction after j
            // terms is u^j exactly
            let mut w = 1.0 - u;
            let mut remaining = 1.0;
            let mut j = 1;
            loop {
                let v = seq(j);
                if !v.is_finite() {
                    return Err(SummabilityError::NonFiniteTerm { index: j, value: v });
                }
                acc += v * w;
                remaining *= u;
                if bound * remaining <= SERIES_TAIL_TOL {
                    break;
                }
                w *= u;
                j += 1;
            }
        }
        PowerSeriesMethod::Borel => {
            // normalized weights e^{-u} u^{j-1} / (j-1)!; once j >= 2u the
            // term ratio u/j is at most 1/2 and the remaining mass is below
            // twice the next term
            let mut w = (-u).exp();
            let mut j = 1;
            loop {
                let v = seq(j);
                if !v.is_finite() {
                    return Err(SummabilityError::NonFiniteTerm { index: j, value: v });
                }
                acc += v * w;
                let next = w * u / j as f64;
                if j as f64 >= 2.0 * u && bound * 2.0 * next <= SERIES_TAIL_TOL {
                    break;
                }
                w = next;
                j += 1;
            }
        }
    }
    Ok(acc)
}

/// Transform values along the method's `u`-ladder, with the last value
/// reported as the estimate. No extrapolation to the radius is attempted;
/// the trend itself is the deliverable.
pub fn power_series_limit_estimate<X: Fn(usize) -> f64>(
    seq: X,
    sup_bound: Option<f64>,
    method: PowerSeriesMethod,
) -> Result<(f64, Vec<(f64, f64)>), SummabilityError> {
    let mut trend = Vec::new();
    for u in method.ladder() {
        let value = power_series_transform(&seq, sup_bound, method, u)?;
        trend.push((u, value));
    }
    let estimate = trend.last().expect("ladder is nonempty").1;
    Ok((estimate, trend))
}

/// Regularity ratio `p_j u^{j-1} / p(u)`; a method is regular exactly when
/// this tends to 0 as `u` approaches the radius, for every fixed `j`.
pub fn regularity_ratio(method: PowerSeriesMethod, j: usize, u: f64) -> f64 {
    method.weight(j) * u.powi(j as i32 - 1) / method.denominator(u)
}
