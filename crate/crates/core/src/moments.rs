//! Moments of the q-integral operator and the closed-form bounds they obey.
//!
//! A moment `K(s^m; x)` runs the same mass-truncated outer series as the
//! operator itself, but the node functional collapses to the exact finite
//! form
//!
//! ```text
//! nu_m(l) = sum_{k=0}^{m} C(m, k) a^{m-k} w^k / [k+1]_q,
//! ```
//!
//! with `a` the node's left endpoint and `w` its width, so the only
//! truncation error left is the missing outer mass (at most `1 - mass` since
//! `|s^m| <= 1` on `[0, 1]`). The generic numeric-integral route through
//! [`crate::operators::q_integral_operator`] stays available and the tests
//! cross-check the two.
//!
//! The deviation bounds: with `beta = beta_r` the first two moments satisfy
//!
//! ```text
//! |K(s; x)   - x  | <= x (1 - beta) + 1 / ([2]_q [n-1]_q)
//! |K(s^2; x) - x^2| <= 1/([3]_q [n-1]_q^2) + (x beta/[n]_q)(1 + 2/[2]_q) + 2 x^2 (1 - beta)
//! ```
//!
//! The constants carry `[n-1]_q` where the node index `l = 0` is in play:
//! `sup_l q^l / [n+l-1]_q` is attained at `l = 0` with value `1/[n-1]_q`
//! (the quantity is strictly decreasing in `l`), and the `l = 0` node of the
//! index-2 operator spans all of `[0, 1]`, which forces the constant — at
//! `x = 0`, `n = 2` the first moment equals `1/([2]_q [1]_q)` exactly, so no
//! smaller constant can work. Terms that only arise for `l >= 1` keep the
//! sharper `[n]_q`.
//!
//! The second central moment `K((s-x)^2; x)` is nonnegative and bounded by
//! the x-free envelope returned by [`central_moment_bound`], the quantity
//! whose square root drives the approximation-rate bound `2 w_f(sqrt(.))`.

use thiserror::Error;

use crate::operators::{
    evaluate_series, evaluate_series_multi, EvalResult, NodeGeometry, OperatorError, OperatorSpec,
    Truncation, WeightSeq,
};
use crate::qcore::{q_integer, QValue};

#[derive(Debug, Error, PartialEq)]
pub enum MomentError {
    #[error("delta must be positive and finite, got {0}")]
    InvalidDelta(f64),
    #[error("grid spacing {spacing} is too coarse for delta = {delta}; need spacing <= delta/8")]
    GridTooCoarse { spacing: f64, delta: f64 },
    #[error("a grid function needs at least two points, got {0}")]
    TooFewPoints(usize),
    #[error("grid values must be finite")]
    NonFiniteValue,
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

/// Truncated-series moment `K(s^order; x)` with its truncation certificate.
///
/// Monomials on `[0, 1]` are bounded by 1, so the reported `tail_bound` is
/// exactly the missing outer mass.
pub fn moment_eval(
    spec: &OperatorSpec,
    x: f64,
    order: usize,
    trunc: Truncation,
) -> Result<EvalResult, OperatorError> {
    if !(x.is_finite() && (0.0..=1.0).contains(&x)) {
        return Err(OperatorError::EvaluationPointOutOfRange(x));
    }
    let seqs: Vec<WeightSeq> = spec
        .betas()
        .iter()
        .map(|&b| WeightSeq::geometric(spec.n(), spec.q(), x * b))
        .collect();
    let mut geom = NodeGeometry::new(spec);
    let inv_qint: Vec<f64> = (1..=order + 1)
        .map(|k| 1.0 / q_integer(k, spec.q()))
        .collect();
    evaluate_series(
        seqs,
        move |l| {
            debug_assert_eq!(geom.level(), l);
            let (a, w) = (geom.left(), geom.width());
            let mut nu = 0.0;
            let mut binom = 1.0;
            let mut w_pow = 1.0;
            for (k, inv) in inv_qint.iter().enumerate() {
                nu += binom * a.powi((order - k) as i32) * w_pow * inv;
                binom *= (order - k) as f64 / (k + 1) as f64;
                w_pow *= w;
            }
            geom.advance();
            Ok((nu, 1.0))
        },
        trunc,
    )
}

/// The moment value alone; see [`moment_eval`] for the certificate-carrying
/// variant.
pub fn exact_moment(
    spec: &OperatorSpec,
    x: f64,
    order: usize,
    trunc: Truncation,
) -> Result<f64, OperatorError> {
    moment_eval(spec, x, order, trunc).map(|r| r.value)
}

/// Closed-form deviation bounds for the first and second moments at `x`,
/// parameterized directly. Requires `n >= 2`, matching the operator domain
/// (the constants divide by `[n-1]_q`).
pub fn moment_deviation_bounds_for(n: usize, q: QValue, beta_r: f64, x: f64) -> (f64, f64) {
    assert!(n >= 2, "deviation bounds need n >= 2");
    let q2 = q_integer(2, q);
    let q3 = q_integer(3, q);
    let qn = q_integer(n, q);
    let qn1 = q_integer(n - 1, q);
    let bound1 = x * (1.0 - beta_r) + 1.0 / (q2 * qn1);
    let bound2 =
        1.0 / (q3 * qn1 * qn1) + x * beta_r / qn * (1.0 + 2.0 / q2) + 2.0 * x * x * (1.0 - beta_r);
    (bound1, bound2)
}

/// Deviation bounds `(bound1, bound2)` for an operator instance at `x`.
pub fn moment_deviation_bounds(spec: &OperatorSpec, x: f64) -> (f64, f64) {
    moment_deviation_bounds_for(spec.n(), spec.q(), spec.beta_r(), x)
}

/// The x-free envelope of the second central moment:
///
/// ```text
/// 4 (1 - beta) + beta (1 + 2/[2]_q) / [n]_q + 2 / ([2]_q [n-1]_q) + 1 / ([3]_q [n-1]_q^2)
/// ```
///
/// obtained from `|K((s-x)^2; x)| <= |K(s^2;x) - x^2| + 2x |K(s;x) - x|` and
/// the deviation bounds, taking `x = 1` in every x-monotone factor. Accepts
/// `beta` in (0, 1] and `n >= 2`.
pub fn central_moment_bound(n: usize, q: QValue, beta_r: f64) -> f64 {
    assert!(n >= 2, "the central-moment envelope needs n >= 2");
    let q2 = q_integer(2, q);
    let q3 = q_integer(3, q);
    let qn = q_integer(n, q);
    let qn1 = q_integer(n - 1, q);
    4.0 * (1.0 - beta_r)
        + beta_r * (1.0 + 2.0 / q2) / qn
        + 2.0 / (q2 * qn1)
        + 1.0 / (q3 * qn1 * qn1)
}

/// Truncated moments of orders 0..2 at one point, the closed-form bounds
/// they must respect, the second central moment assembled from them, and the
/// per-order truncation tails the comparisons have to absorb.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub moment0: f64,
    pub moment1: f64,
    pub moment2: f64,
    pub bound1: f64,
    pub bound2: f64,
    pub central2: f64,
    pub gamma: f64,
    pub tails: [f64; 3],
}

/// Evaluates all three moments at `x` in one series pass (they share the
/// weight distribution) and assembles the report. A series that hits the
/// degree cap is accepted; its larger tail shows up in `tails` so downstream
/// inequality checks stay honest.
pub fn moment_report(
    spec: &OperatorSpec,
    x: f64,
    trunc: Truncation,
) -> Result<MomentReport, OperatorError> {
    if !(x.is_finite() && (0.0..=1.0).contains(&x)) {
        return Err(OperatorError::EvaluationPointOutOfRange(x));
    }
    let seqs: Vec<WeightSeq> = spec
        .betas()
        .iter()
        .map(|&b| WeightSeq::geometric(spec.n(), spec.q(), x * b))
        .collect();
    let mut geom = NodeGeometry::new(spec);
    let inv_q2 = 1.0 / q_integer(2, spec.q());
    let inv_q3 = 1.0 / q_integer(3, spec.q());
    let (out, _reached) = evaluate_series_multi::<3, _>(
        seqs,
        move |l| {
            debug_assert_eq!(geom.level(), l);
            let (a, w) = (geom.left(), geom.width());
            let nu1 = a + w * inv_q2;
            let nu2 = a * a + 2.0 * a * w * inv_q2 + w * w * inv_q3;
            geom.advance();
            Ok(([1.0, nu1, nu2], 1.0))
        },
        trunc,
    )?;
    let (bound1, bound2) = moment_deviation_bounds(spec, x);
    let central2 = out.values[2] - 2.0 * x * out.values[1] + x * x * out.values[0];
    Ok(MomentReport {
        moment0: out.values[0],
        moment1: out.values[1],
        moment2: out.values[2],
        bound1,
        bound2,
        central2,
        gamma: central_moment_bound(spec.n(), spec.q(), spec.beta_r()),
        tails: [out.tail_bound; 3],
    })
}

impl MomentReport {
    /// Slack the central-moment comparisons inherit from the three truncated
    /// series: `tail2 + 2x tail1 + x^2 tail0`.
    pub fn central2_slack(&self, x: f64) -> f64 {
        self.tails[2] + 2.0 * x * self.tails[1] + x * x * self.tails[0]
    }
}

/// A target function tabulated on a uniform grid over `[0, 1]`, the working
/// representation for sup-norm and modulus computations.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    /// Samples `f` on a uniform grid with `points >= 2` nodes.
    pub fn sample<F: Fn(f64) -> f64>(points: usize, f: F) -> Result<Self, MomentError> {
        if points < 2 {
            return Err(MomentError::TooFewPoints(points));
        }
        let h = 1.0 / (points - 1) as f64;
        let values: Vec<f64> = (0..points).map(|i| f(i as f64 * h)).collect();
        Self::from_values(values)
    }

    pub fn from_values(values: Vec<f64>) -> Result<Self, MomentError> {
        if values.len() < 2 {
            return Err(MomentError::TooFewPoints(values.len()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(MomentError::NonFiniteValue);
        }
        Ok(GridFunction { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        1.0 / (self.values.len() - 1) as f64
    }

    pub fn x_at(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    pub fn value_at(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Modulus of continuity on the grid: the largest `|f(s) - f(x)|` over grid
/// pairs with `|s - x| <= delta`, found by a sliding-window sweep.
///
/// Requires the grid spacing to be at most `delta / 8` so the discrete
/// modulus tracks the continuous one.
pub fn modulus_of_continuity(f: &GridFunction, delta: f64) -> Result<f64, MomentError> {
    if !delta.is_finite() || delta <= 0.0 {
        return Err(MomentError::InvalidDelta(delta));
    }
    let h = f.spacing();
    if h > delta / 8.0 {
        return Err(MomentError::GridTooCoarse { spacing: h, delta });
    }
    let window = ((delta / h) + 1e-9).floor() as usize;
    let n = f.len();
    let mut best = 0.0_f64;
    for i in 0..n {
        let hi = (i + window).min(n - 1);
        for j in i + 1..=hi {
            best = best.max((f.value_at(j) - f.value_at(i)).abs());
        }
    }
    Ok(best)
}

/// The approximation-rate bound `2 * w_f(sqrt(central_moment_bound))`.
pub fn modulus_rate_bound(
    f: &GridFunction,
    n: usize,
    q: QValue,
    beta_r: f64,
) -> Result<f64, MomentError> {
    let gamma = central_moment_bound(n, q, beta_r);
    Ok(2.0 * modulus_of_continuity(f, gamma.sqrt())?)
}
