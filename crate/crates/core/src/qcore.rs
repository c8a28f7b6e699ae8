//! Scalar q-calculus primitives.
//!
//! The Riemann-type q-integral of `f` over `[alpha, beta]` is the
//! geometric-node series
//!
//! ```text
//! (1 - q)(beta - alpha) * sum_{j >= 0} f(alpha + (beta - alpha) q^j) q^j
//! ```
//!
//! truncated once the analytic tail bound `(beta - alpha) * sup|f| * q^j`
//! drops below the requested tolerance. For monomial integrands the series
//! collapses to an exact finite closed form, evaluated by
//! [`q_riemann_monomial`]; the two routes are cross-checked in the tests.
//!
//! Note on orientation: the series above uses the prefactor `(beta - alpha)`,
//! which makes the integral of a nonnegative function nonnegative and gives
//! `int_0^1 1 d_q s = 1`. The node-moment identities used by the operator
//! modules are only consistent with this orientation.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum QcoreError {
    #[error("q must lie strictly inside (0, 1), got {0}")]
    QOutOfRange(f64),
    #[error("bounds must satisfy 0 <= alpha < beta, got alpha={alpha}, beta={beta}")]
    InvalidBounds { alpha: f64, beta: f64 },
    #[error("tail tolerance must be positive and finite, got {0}")]
    InvalidTailTolerance(f64),
    #[error("integrand returned a non-finite value {value} at s = {at}")]
    NonFiniteSample { at: f64, value: f64 },
}

/// Default tail tolerance for the truncated q-integral series.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Deformation parameter pinned to the open interval (0, 1).
///
/// Construction rejects the boundary values; everything downstream relies on
/// the geometric factors `q^j` being strictly decreasing and summable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QValue(f64);

impl QValue {
    pub fn new(q: f64) -> Result<Self, QcoreError> {
        if q.is_finite() && q > 0.0 && q < 1.0 {
            Ok(QValue(q))
        } else {
            Err(QcoreError::QOutOfRange(q))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Endpoints of a q-integration interval inside `[0, +inf)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QIntegralBounds {
    alpha: f64,
    beta: f64,
}

impl QIntegralBounds {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, QcoreError> {
        if alpha.is_finite() && beta.is_finite() && alpha >= 0.0 && alpha < beta {
            Ok(QIntegralBounds { alpha, beta })
        } else {
            Err(QcoreError::InvalidBounds { alpha, beta })
        }
    }

    pub fn alpha(self) -> f64 {
        self.alpha
    }

    pub fn beta(self) -> f64 {
        self.beta
    }

    pub fn width(self) -> f64 {
        self.beta - self.alpha
    }
}

/// The q-integer `[n]_q = 1 + q + ... + q^{n-1}`; zero when `n = 0`.
pub fn q_integer(n: usize, q: QValue) -> f64 {
    let q = q.get();
    let mut sum = 0.0;
    let mut pow = 1.0;
    for _ in 0..n {
        sum += pow;
        pow *= q;
    }
    sum
}

/// The q-Pochhammer symbol `(rho; q)_n = prod_{i < n} (1 - rho q^i)`.
///
/// The empty product is 1; the result is positive whenever `0 <= rho < 1`.
pub fn q_pochhammer(rho: f64, q: QValue, n: usize) -> f64 {
    let q = q.get();
    let mut prod = 1.0;
    let mut rq = rho;
    for _ in 0..n {
        prod *= 1.0 - rq;
        rq *= q;
    }
    prod
}

/// Core of the q-integral: `(1-q) * sum_j f(a + w q^j) q^j`, stopping once
/// the running sup estimate certifies `sup_est * q^{j+1} <= tol`.
///
/// Returns the series value together with the largest `|f|` seen among the
/// samples (the sup estimate is a heuristic built from the samples drawn,
/// not a certified global bound).
pub(crate) fn scaled_geometric_series<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    w: f64,
    q: f64,
    tol: f64,
) -> Result<(f64, f64), QcoreError> {
    let mut sum = 0.0;
    let mut qj = 1.0;
    let mut sup = 0.0_f64;
    loop {
        let s = a + w * qj;
        let value = f(s);
        if !value.is_finite() {
            return Err(QcoreError::NonFiniteSample { at: s, value });
        }
        sup = sup.max(value.abs());
        sum += value * qj;
        qj *= q;
        // qj decays geometrically and eventually underflows, so this always
        // terminates even for a zero tolerance target.
        if sup * qj <= tol {
            break;
        }
    }
    Ok(((1.0 - q) * sum, sup))
}

/// Riemann-type q-integral of `f` over `bounds`, truncated at the analytic
/// geometric tail bound `(beta - alpha) * sup|f| * q^j <= tail_tol`.
pub fn q_riemann_integral<F: Fn(f64) -> f64>(
    f: F,
    bounds: QIntegralBounds,
    q: QValue,
    tail_tol: f64,
) -> Result<f64, QcoreError> {
    if !tail_tol.is_finite() || tail_tol <= 0.0 {
        return Err(QcoreError::InvalidTailTolerance(tail_tol));
    }
    let w = bounds.width();
    let (series, _sup) = scaled_geometric_series(&f, bounds.alpha(), w, q.get(), tail_tol / w)?;
    Ok(w * series)
}

/// Exact q-integral of the monomial `s^m` over `bounds`:
///
/// ```text
/// sum_{k=0}^{m} C(m, k) alpha^{m-k} (beta - alpha)^{k+1} / [k+1]_q
/// ```
pub fn q_riemann_monomial(m: usize, bounds: QIntegralBounds, q: QValue) -> f64 {
    let a = bounds.alpha();
    let w = bounds.width();
    let mut sum = 0.0;
    let mut binom = 1.0;
    let mut w_pow = w;
    for k in 0..=m {
        let a_pow = a.powi((m - k) as i32);
        sum += binom * a_pow * w_pow / q_integer(k + 1, q);
        binom *= (m - k) as f64 / (k + 1) as f64;
        w_pow *= w;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(v: f64) -> QValue {
        QValue::new(v).unwrap()
    }

    fn bounds(a: f64, b: f64) -> QIntegralBounds {
        QIntegralBounds::new(a, b).unwrap()
    }

    #[test]
    fn q_value_rejects_boundaries() {
        assert!(QValue::new(0.0).is_err());
        assert!(QValue::new(1.0).is_err());
        assert!(QValue::new(-0.2).is_err());
        assert!(QValue::new(f64::NAN).is_err());
        assert!(QValue::new(0.5).is_ok());
    }

    #[test]
    fn bounds_reject_degenerate_intervals() {
        assert!(QIntegralBounds::new(-0.1, 0.5).is_err());
        assert!(QIntegralBounds::new(0.5, 0.5).is_err());
        assert!(QIntegralBounds::new(0.7, 0.2).is_err());
        assert!(QIntegralBounds::new(0.0, 1.0).is_ok());
    }

    #[test]
    fn q_integer_known_values() {
        assert_eq!(q_integer(0, q(0.5)), 0.0);
        assert_eq!(q_integer(3, q(0.5)), 1.75);
        // direct summation oracle: sum_{i<10} 0.9^i
        let mut oracle = 0.0;
        for i in 0..10 {
            oracle += 0.9_f64.powi(i);
        }
        assert!((q_integer(10, q(0.9)) - oracle).abs() <= 1e-15);
        assert!((q_integer(10, q(0.9)) - 6.513215599).abs() <= 1e-9);
    }

    #[test]
    fn q_pochhammer_known_values() {
        assert_eq!(q_pochhammer(0.7, q(0.5), 0), 1.0);
        assert_eq!(q_pochhammer(0.5, q(0.5), 2), 0.375);
        // direct product oracle: (1-0.25)(1-0.125)(1-0.0625)
        assert!((q_pochhammer(0.25, q(0.5), 3) - 0.615234375).abs() <= 1e-15);
    }

    #[test]
    fn q_integral_of_one_is_the_width() {
        let v = q_riemann_integral(|_| 1.0, bounds(0.0, 1.0), q(0.5), DEFAULT_TAIL_TOL).unwrap();
        assert!((v - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn q_integral_of_identity_matches_closed_form() {
        // over [0,1]: 1/[2]_q
        let v = q_riemann_integral(|s| s, bounds(0.0, 1.0), q(0.5), 1e-12).unwrap();
        assert!((v - 2.0 / 3.0).abs() <= 1e-12);
        // over [0.25, 0.75]: (b-a)(a + (b-a)/[2]_q)
        let v = q_riemann_integral(|s| s, bounds(0.25, 0.75), q(0.5), 1e-12).unwrap();
        let expected = 0.5 * (0.25 + 0.5 / 1.5);
        assert!((v - expected).abs() <= 1e-12);
        assert!((v - 0.29166667).abs() <= 1e-7);
    }

    #[test]
    fn monomial_constant_case_is_the_width() {
        let b = bounds(0.3, 0.8);
        assert!((q_riemann_monomial(0, b, q(0.7)) - 0.5).abs() <= 1e-15);
    }

    #[test]
    fn monomial_closed_forms_match_node_interval_identities() {
        // Over the operator node interval [ [l]_q, [l+1]_q ] / [n+l-1]_q the
        // first and second monomial integrals reduce to explicit q-integer
        // expressions; check both at a concrete (n, l, q).
        let (n, l) = (3usize, 2usize);
        let qq = q(0.5);
        let qf = qq.get();
        let d = q_integer(n + l - 1, qq);
        let b = bounds(q_integer(l, qq) / d, q_integer(l + 1, qq) / d);
        let ql = qf.powi(l as i32);

        let m1 = q_riemann_monomial(1, b, qq);
        let expect1 = (ql * q_integer(l, qq) + ql * ql / q_integer(2, qq)) / (d * d);
        assert!((m1 - expect1).abs() <= 1e-15 * (1.0 + m1.abs()));

        let m2 = q_riemann_monomial(2, b, qq);
        let lq = q_integer(l, qq);
        let expect2 = (ql * lq * lq
            + 2.0 * ql * ql * lq / q_integer(2, qq)
            + ql * ql * ql / q_integer(3, qq))
            / (d * d * d);
        assert!((m2 - expect2).abs() <= 1e-15 * (1.0 + m2.abs()));
    }

    #[test]
    fn integral_rejects_bad_tolerance_and_nonfinite_samples() {
        let b = bounds(0.0, 1.0);
        assert!(matches!(
            q_riemann_integral(|_| 1.0, b, q(0.5), 0.0),
            Err(QcoreError::InvalidTailTolerance(_))
        ));
        assert!(matches!(
            q_riemann_integral(|s| 1.0 / (s - s), b, q(0.5), 1e-10),
            Err(QcoreError::NonFiniteSample { .. })
        ));
    }

    proptest! {
        #[test]
        fn numeric_integral_matches_monomial_closed_form(
            m in 0usize..=4,
            a in 0.0..0.6f64,
            width in 0.05..0.4f64,
            qv in 0.1..0.95f64,
        ) {
            let b = bounds(a, a + width);
            let qq = q(qv);
            let numeric = q_riemann_integral(|s| s.powi(m as i32), b, qq, 1e-14).unwrap();
            let exact = q_riemann_monomial(m, b, qq);
            prop_assert!((numeric - exact).abs() <= 1e-12 * (1.0 + exact.abs()));
        }

        #[test]
        fn integral_is_linear_and_monotone(
            a in 0.0..0.5f64,
            width in 0.1..0.5f64,
            qv in 0.1..0.9f64,
            c0 in -1.0..1.0f64,
            c1 in -1.0..1.0f64,
            shift in 0.0..2.0f64,
        ) {
            let b = bounds(a, a + width);
            let qq = q(qv);
            let f = |s: f64| c0 + c1 * s;
            let g = |s: f64| c0 + c1 * s + shift;
            let fi = q_riemann_integral(f, b, qq, 1e-13).unwrap();
            let gi = q_riemann_integral(g, b, qq, 1e-13).unwrap();
            // monotone: f <= g pointwise
            prop_assert!(fi <= gi + 1e-12);
            // linear: g = f + shift, so the integrals differ by shift * width
            prop_assert!((gi - fi - shift * width).abs() <= 1e-11);
        }

        #[test]
        fn pochhammer_recurrence_is_exact_as_evaluated(
            rho in 0.0..0.99f64,
            qv in 0.05..0.95f64,
            n in 0usize..40,
        ) {
            let qq = q(qv);
            let lhs = q_pochhammer(rho, qq, n + 1);
            // build rho * q^n by the same multiplication chain the product uses
            let mut rq = rho;
            for _ in 0..n {
                rq *= qv;
            }
            let rhs = q_pochhammer(rho, qq, n) * (1.0 - rq);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn q_integer_recurrence_within_rounding(
            qv in 0.05..0.95f64,
            n in 0usize..200,
        ) {
            let qq = q(qv);
            let lhs = q_integer(n + 1, qq);
            let rhs = 1.0 + qv * q_integer(n, qq);
            prop_assert!((lhs - rhs).abs() <= 4.0 * f64::EPSILON * lhs.max(1.0));
        }

        #[test]
        fn q_integer_is_monotone_in_n(qv in 0.05..0.95f64, n in 0usize..60) {
            let qq = q(qv);
            // strictly increasing until the increment q^n falls below the
            // floating resolution of the partial sum, nondecreasing after
            let lo = q_integer(n, qq);
            let hi = q_integer(n + 1, qq);
            prop_assert!(hi >= lo);
            if qv.powi(n as i32) > 2.0 * f64::EPSILON * hi {
                prop_assert!(hi > lo);
            }
        }
    }
}
