//! Multivariate q-Lagrange polynomials evaluated through coefficient
//! convolution.
//!
//! For a single variable the generating series `1 / (t z; q)_n` has the
//! coefficient sequence
//!
//! ```text
//! c(l) = (q^n; q)_l z^l / (q; q)_l
//! ```
//!
//! and the multivariate polynomial `h_p` of total degree `p` in variables
//! `z_1, ..., z_r` is the degree-`p` entry of the r-fold convolution of the
//! per-variable sequences. Convolving costs `O(r * p_max^2)` versus the
//! `O(p_max^{r-1})` blowup of enumerating integer compositions, so the
//! enumeration survives only as a test oracle.
//!
//! Entries are produced by the multiplicative recurrence
//! `c(l) = c(l-1) * z * (1 - q^{n+l-1}) / (1 - q^l)`, never as a ratio of two
//! near-zero Pochhammer products.

use thiserror::Error;

use crate::qcore::{q_pochhammer, QValue};

#[derive(Debug, Error, PartialEq)]
pub enum LagrangeError {
    #[error("z must lie strictly inside (0, 1), got {0}")]
    ZOutOfRange(f64),
    #[error("the exponent parameter n must be positive")]
    ZeroExponent,
    #[error("at least one variable is required")]
    EmptyVariables,
    #[error("|t| = {t} violates the radius condition |t| < min(1/z_k) = {radius}")]
    RadiusViolated { t: f64, radius: f64 },
}

/// Coefficients of the single-factor generating series `1 / (t z; q)_n`,
/// indexed by degree `l = 0..=len-1`.
#[derive(Debug, Clone)]
pub struct CoefficientSequence {
    n: usize,
    z: f64,
    q: QValue,
    entries: Vec<f64>,
}

impl CoefficientSequence {
    /// Builds the sequence for degrees `0..length` via the multiplicative
    /// recurrence. Requires `n >= 1` and `z` strictly inside (0, 1).
    pub fn new(n: usize, z: f64, q: QValue, length: usize) -> Result<Self, LagrangeError> {
        if n == 0 {
            return Err(LagrangeError::ZeroExponent);
        }
        if !(z > 0.0 && z < 1.0) {
            return Err(LagrangeError::ZOutOfRange(z));
        }
        let entries = raw_entries(n, z, q.get(), length.max(1));
        Ok(CoefficientSequence { n, z, q, entries })
    }

    pub fn entry(&self, l: usize) -> f64 {
        self.entries[l]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn exponent(&self) -> usize {
        self.n
    }

    pub fn argument(&self) -> f64 {
        self.z
    }

    pub fn q(&self) -> QValue {
        self.q
    }
}

/// Entries of the generating-series coefficients for any `|z| < 1`; the
/// public type restricts to `z` in (0, 1) but the operator evaluators also
/// need `z = 0` (evaluation point zero) and the residual check needs signed
/// arguments `t * z`.
pub(crate) fn raw_entries(n: usize, z: f64, q: f64, length: usize) -> Vec<f64> {
    let mut entries = Vec::with_capacity(length);
    entries.push(1.0);
    let mut pow_top = q.powi(n as i32); // q^{n+l-1} at l = 1
    let mut pow_bot = q; // q^l at l = 1
    for l in 1..length {
        let ratio = z * (1.0 - pow_top) / (1.0 - pow_bot);
        let prev = entries[l - 1];
        entries.push(prev * ratio);
        pow_top *= q;
        pow_bot *= q;
    }
    entries
}

/// Creates the coefficient sequence of `1 / (t z; q)_n`; see
/// [`CoefficientSequence::new`].
pub fn coefficient_sequence(
    n: usize,
    z: f64,
    q: QValue,
    length: usize,
) -> Result<CoefficientSequence, LagrangeError> {
    CoefficientSequence::new(n, z, q, length)
}

pub(crate) fn convolve(a: &[f64], b: &[f64], upto: usize) -> Vec<f64> {
    let mut out = vec![0.0; upto + 1];
    for (i, &ai) in a.iter().enumerate().take(upto + 1) {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(upto + 1 - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Degree-`p` multivariate q-Lagrange polynomial `h_p` in the variables `z`,
/// all sharing the exponent parameter `n`, computed as the degree-`p` entry
/// of the r-fold convolution of the per-variable coefficient sequences.
pub fn lagrange_polynomial(
    n: usize,
    q: QValue,
    z: &[f64],
    p: usize,
) -> Result<f64, LagrangeError> {
    if z.is_empty() {
        return Err(LagrangeError::EmptyVariables);
    }
    if n == 0 {
        return Err(LagrangeError::ZeroExponent);
    }
    for &zk in z {
        if !(zk > 0.0 && zk < 1.0) {
            return Err(LagrangeError::ZOutOfRange(zk));
        }
    }
    let mut acc = raw_entries(n, z[0], q.get(), p + 1);
    for &zk in &z[1..] {
        let next = raw_entries(n, zk, q.get(), p + 1);
        acc = convolve(&acc, &next, p);
    }
    Ok(acc[p])
}

/// Absolute residual between the generating-function product
/// `prod_k 1 / (t z_k; q)_n` and the partial series `sum_{p<=p_max} h_p t^p`.
///
/// For positive `t` and `z_k` the residual is monotonically nonincreasing in
/// `p_max`. The partial series is accumulated through sequences in the
/// arguments `t * z_k` directly, which keeps every term bounded.
pub fn generating_function_residual(
    n: usize,
    q: QValue,
    z: &[f64],
    t: f64,
    p_max: usize,
) -> Result<f64, LagrangeError> {
    if z.is_empty() {
        return Err(LagrangeError::EmptyVariables);
    }
    if n == 0 {
        return Err(LagrangeError::ZeroExponent);
    }
    let mut radius = f64::INFINITY;
    for &zk in z {
        if !(zk > 0.0 && zk < 1.0) {
            return Err(LagrangeError::ZOutOfRange(zk));
        }
        radius = radius.min(1.0 / zk);
    }
    if t.abs() >= radius {
        return Err(LagrangeError::RadiusViolated { t, radius });
    }

    let mut product = 1.0;
    for &zk in z {
        product /= q_pochhammer(t * zk, q, n);
    }

    // series in the scaled arguments: sum_p h_p(z) t^p = sum_p h_p(t z) with
    // the per-variable sequences taken in t * z_k
    let mut acc = raw_entries(n, t * z[0], q.get(), p_max + 1);
    for &zk in &z[1..] {
        let next = raw_entries(n, t * zk, q.get(), p_max + 1);
        acc = convolve(&acc, &next, p_max);
    }
    let partial: f64 = acc.iter().sum();
    Ok((product - partial).abs())
}
