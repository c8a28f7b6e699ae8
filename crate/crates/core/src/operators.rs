//! Evaluation engines for the positive linear operator family.
//!
//! Four operators share one series skeleton: a prefactor times a power
//! series in the evaluation point `x`, whose degree-`p` coefficient is a sum
//! over integer compositions `(l_1, ..., l_r)` of `p`. Each variable `k`
//! contributes a generating-series coefficient in the argument `x * beta_k`
//! and only the last index `l_r` feeds the node functional, so the first
//! `r - 1` variables collapse into a single convolution sequence and the
//! evaluation costs `O(r * p^2)` instead of enumerating compositions.
//!
//! The operators differ only in their node functionals:
//!
//! - q-integral operator: `[n+l-1]_q q^{-l}` times the Riemann-type
//!   q-integral of `f` over the node interval `[[l]_q, [l+1]_q] / [n+l-1]_q`;
//! - q-sampling operator: `f([l]_q / [n+l-1]_q)`;
//! - classical operators (q-free baselines): `f(l / (n+l-1))`, or the mean
//!   of `f` over `[l, l+1] / (n+l-1)`;
//! - auxiliary operator: the q-integral operator rescaled by 2 at
//!   perfect-square indices.
//!
//! Truncation is mass-based. Scaling each per-variable sequence by its own
//! prefactor factor turns the outer series into a probability distribution
//! over compositions, so every partial sum reports how much mass it captured
//! and the absolute truncation error is at most `sup|f|` times the missing
//! mass. Iteration stops at the requested mass or at the degree cap; hitting
//! the cap is an error that still carries the honest partial result.

use thiserror::Error;

use crate::qcore::{q_integer, q_pochhammer, scaled_geometric_series, QValue, QcoreError};
use crate::summability::is_perfect_square;

/// Absolute tolerance for the node-functional series of the q-integral
/// operator. The node value is a weighted mean of `f` over the node
/// interval, so an absolute scale is appropriate.
const NODE_SERIES_TOL: f64 = 1e-15;

#[derive(Debug, Error, PartialEq)]
pub enum OperatorError {
    #[error("operator index n must be at least 2, got {0}")]
    OrderTooSmall(usize),
    #[error("at least one beta sequence is required")]
    EmptyBetas,
    #[error("every beta must lie strictly inside (0, 1), got {0}")]
    BetaOutOfRange(f64),
    #[error("evaluation point must lie in [0, 1], got {0}")]
    EvaluationPointOutOfRange(f64),
    #[error("mass tolerance must lie strictly inside (0, 1), got {0}")]
    InvalidMassTolerance(f64),
    #[error("degree cap must be at least 1")]
    ZeroDegreeCap,
    #[error("auxiliary index must be a positive integer")]
    ZeroAuxiliaryIndex,
    #[error(
        "series reached the degree cap p = {} with captured mass {} short of the target",
        result.p_used,
        result.captured_mass
    )]
    TruncationExhausted { result: EvalResult },
    #[error(transparent)]
    Integration(#[from] QcoreError),
}

/// Parameters of one operator instance: the index `n >= 2`, the deformation
/// `q`, and the `r` shape parameters `beta_1, ..., beta_r` in (0, 1).
///
/// `n >= 2` keeps every node interval inside `[0, 1]` (the right endpoint is
/// `[l+1]_q / [n+l-1]_q <= 1`) and avoids the degenerate `[0]_q` denominator.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpec {
    n: usize,
    q: QValue,
    betas: Vec<f64>,
}

impl OperatorSpec {
    pub fn new(n: usize, q: QValue, betas: Vec<f64>) -> Result<Self, OperatorError> {
        if n < 2 {
            return Err(OperatorError::OrderTooSmall(n));
        }
        if betas.is_empty() {
            return Err(OperatorError::EmptyBetas);
        }
        for &b in &betas {
            if !(b > 0.0 && b < 1.0) {
                return Err(OperatorError::BetaOutOfRange(b));
            }
        }
        Ok(OperatorSpec { n, q, betas })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> QValue {
        self.q
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn r(&self) -> usize {
        self.betas.len()
    }

    /// The last shape parameter, the one that controls the node positions.
    pub fn beta_r(&self) -> f64 {
        *self.betas.last().expect("betas is nonempty")
    }
}

/// Outer-series cutoff policy: stop once the captured probability mass
/// reaches `1 - mass_tol`, or at the hard degree cap `p_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    mass_tol: f64,
    p_max: usize,
}

impl Truncation {
    pub fn new(mass_tol: f64, p_max: usize) -> Result<Self, OperatorError> {
        if !(mass_tol > 0.0 && mass_tol < 1.0) {
            return Err(OperatorError::InvalidMassTolerance(mass_tol));
        }
        if p_max == 0 {
            return Err(OperatorError::ZeroDegreeCap);
        }
        Ok(Truncation { mass_tol, p_max })
    }

    pub fn mass_tol(self) -> f64 {
        self.mass_tol
    }

    pub fn p_max(self) -> usize {
        self.p_max
    }
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation {
            mass_tol: 1e-10,
            p_max: 4096,
        }
    }
}

/// Value of one truncated evaluation together with its truncation
/// certificate: the captured probability mass, the outer degree actually
/// used, and `sup|f| * (1 - captured_mass)` as a bound on the discarded
/// tail. The sup estimate comes from the samples the evaluation drew, which
/// is a heuristic rather than a certified global bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub value: f64,
    pub captured_mass: f64,
    pub p_used: usize,
    pub tail_bound: f64,
}

/// Unwraps an evaluation, accepting a degree-capped partial result as a
/// legitimate outcome. Other errors pass through.
pub fn accept_partial(
    outcome: Result<EvalResult, OperatorError>,
) -> Result<EvalResult, OperatorError> {
    match outcome {
        Err(OperatorError::TruncationExhausted { result }) => Ok(result),
        other => other,
    }
}

// ---------------------------------------------------------------------------
// per-variable weight sequences
// ---------------------------------------------------------------------------

/// One per-variable coefficient sequence, pre-scaled by its own prefactor
/// factor so the full sequence sums to 1 and every entry stays in [0, 1].
pub(crate) enum WeightSeq {
    /// `(z; q)_n * (q^n; q)_l z^l / (q; q)_l` by multiplicative recurrence.
    Geometric {
        entries: Vec<f64>,
        z: f64,
        q: f64,
        pow_top: f64,
        pow_bot: f64,
    },
    /// `(1-z)^n * (n)_l z^l / l!` with the rising factorial and factorial
    /// accumulated in log space; entries below the floating-point range
    /// flush to zero, which the mass accounting reports honestly.
    Classical {
        entries: Vec<f64>,
        z: f64,
        n: usize,
        ln_acc: f64,
    },
}

impl WeightSeq {
    pub(crate) fn geometric(n: usize, q: QValue, z: f64) -> Self {
        let qf = q.get();
        WeightSeq::Geometric {
            entries: vec![q_pochhammer(z, q, n)],
            z,
            q: qf,
            pow_top: qf.powi(n as i32),
            pow_bot: qf,
        }
    }

    pub(crate) fn classical(n: usize, z: f64) -> Self {
        let ln0 = n as f64 * (1.0 - z).ln();
        WeightSeq::Classical {
            entries: vec![ln0.exp()],
            z,
            n,
            ln_acc: ln0,
        }
    }

    fn extend_to(&mut self, l: usize) {
        match self {
            WeightSeq::Geometric {
                entries,
                z,
                q,
                pow_top,
                pow_bot,
            } => {
                while entries.len() <= l {
                    let ratio = *z * (1.0 - *pow_top) / (1.0 - *pow_bot);
                    let prev = *entries.last().expect("nonempty");
                    entries.push(prev * ratio);
                    *pow_top *= *q;
                    *pow_bot *= *q;
                }
            }
            WeightSeq::Classical {
                entries,
                z,
                n,
                ln_acc,
            } => {
                while entries.len() <= l {
                    let i = entries.len();
                    *ln_acc += z.ln() + ((*n + i - 1) as f64).ln() - (i as f64).ln();
                    entries.push(ln_acc.exp());
                }
            }
        }
    }

    fn entries(&self) -> &[f64] {
        match self {
            WeightSeq::Geometric { entries, .. } => entries,
            WeightSeq::Classical { entries, .. } => entries,
        }
    }
}

// ---------------------------------------------------------------------------
// node geometry
// ---------------------------------------------------------------------------

/// Incrementally tracked node interval of the q-operators at index `l`:
/// left endpoint `[l]_q / [n+l-1]_q`, width `q^l / [n+l-1]_q`.
pub(crate) struct NodeGeometry {
    q: f64,
    numer: f64,
    denom: f64,
    q_pow: f64,
    level: usize,
}

impl NodeGeometry {
    pub(crate) fn new(spec: &OperatorSpec) -> Self {
        NodeGeometry {
            q: spec.q.get(),
            numer: 0.0,
            denom: q_integer(spec.n - 1, spec.q),
            q_pow: 1.0,
            level: 0,
        }
    }

    pub(crate) fn left(&self) -> f64 {
        self.numer / self.denom
    }

    pub(crate) fn width(&self) -> f64 {
        self.q_pow / self.denom
    }

    pub(crate) fn level(&self) -> usize {
        self.level
    }

    pub(crate) fn advance(&mut self) {
        self.numer = 1.0 + self.q * self.numer;
        self.denom = 1.0 + self.q * self.denom;
        self.q_pow *= self.q;
        self.level += 1;
    }
}

/// Node interval of the q-operators: `([l]_q / [n+l-1]_q, q^l / [n+l-1]_q)`
/// as (left endpoint, width). The width form avoids the catastrophic
/// cancellation of subtracting two nearly equal q-integer ratios at large
/// `l`, where `[l+1]_q - [l]_q = q^l` sits far below the rounding floor of
/// either endpoint.
pub fn node_interval(spec: &OperatorSpec, l: usize) -> (f64, f64) {
    let mut geom = NodeGeometry::new(spec);
    for _ in 0..l {
        geom.advance();
    }
    (geom.left(), geom.width())
}

/// Node functional of the q-integral operator:
///
/// ```text
/// [n+l-1]_q q^{-l} * int_{[l]_q/[n+l-1]_q}^{[l+1]_q/[n+l-1]_q} f(s) d_q s
/// ```
///
/// Substituting the node width `q^l / [n+l-1]_q` into the q-integral series
/// cancels the outer factor exactly, leaving the stable normalized form
/// `(1-q) * sum_j f(a + w q^j) q^j` evaluated here; the literal factored
/// product overflows `q^{-l}` long before the value itself misbehaves.
pub fn q_integral_node_functional<F: Fn(f64) -> f64>(
    spec: &OperatorSpec,
    l: usize,
    f: F,
) -> Result<f64, OperatorError> {
    let (a, w) = node_interval(spec, l);
    let (value, _sup) = scaled_geometric_series(&f, a, w, spec.q.get(), NODE_SERIES_TOL)?;
    Ok(value)
}

// ---------------------------------------------------------------------------
// shared series driver
// ---------------------------------------------------------------------------

/// Outcome of one mass-truncated series pass carrying `K` simultaneous node
/// functionals (they share the weight distribution, so evaluating several at
/// once costs one pass). The `tail_bound` uses the largest sup estimate
/// across the node outputs.
pub(crate) struct SeriesValues<const K: usize> {
    pub values: [f64; K],
    pub captured_mass: f64,
    pub p_used: usize,
    pub tail_bound: f64,
}

/// Runs the outer power series with mass-based truncation.
///
/// `seqs` are the scaled per-variable sequences (the last one belongs to the
/// node-bearing variable); `node` is called exactly once per index with
/// consecutive `l = 0, 1, 2, ...` and returns the node values together with
/// a sup-estimate contribution. The boolean in the return value says whether
/// the mass target was reached before the degree cap.
///
/// For one or two variables the degree-`p` prefix totals collapse onto
/// cumulative sums of the non-node sequence, so the mass test runs at
/// doubling checkpoint degrees and the whole evaluation costs
/// `O(p log p)`; the stop degree may then overshoot the minimal one by at
/// most a factor of two, which only adds captured mass. Three or more
/// variables keep the degree-by-degree convolution chain at `O(r p^2)`.
pub(crate) fn evaluate_series_multi<const K: usize, N>(
    seqs: Vec<WeightSeq>,
    node: N,
    trunc: Truncation,
) -> Result<(SeriesValues<K>, bool), OperatorError>
where
    N: FnMut(usize) -> Result<([f64; K], f64), OperatorError>,
{
    debug_assert!(!seqs.is_empty());
    if seqs.len() <= 2 {
        series_by_checkpoints(seqs, node, trunc)
    } else {
        series_by_degree(seqs, node, trunc)
    }
}

fn series_by_checkpoints<const K: usize, N>(
    mut seqs: Vec<WeightSeq>,
    mut node: N,
    trunc: Truncation,
) -> Result<(SeriesValues<K>, bool), OperatorError>
where
    N: FnMut(usize) -> Result<([f64; K], f64), OperatorError>,
{
    let r = seqs.len();
    let target = 1.0 - trunc.mass_tol;
    let mut nodes: Vec<[f64; K]> = Vec::new();
    let mut sup = 0.0_f64;
    let mut first_cum: Vec<f64> = Vec::new();
    let mut checkpoint = 0usize;

    loop {
        let p = checkpoint.min(trunc.p_max);
        for s in seqs.iter_mut() {
            s.extend_to(p);
        }
        while nodes.len() <= p {
            let (node_values, node_sup) = node(nodes.len())?;
            nodes.push(node_values);
            sup = sup.max(node_sup);
        }
        if r == 2 {
            let first = seqs[0].entries();
            while first_cum.len() <= p {
                let i = first_cum.len();
                let prev = if i == 0 { 0.0 } else { first_cum[i - 1] };
                first_cum.push(prev + first[i]);
            }
        }

        // prefix totals over all degrees <= p
        let mut mass = 0.0;
        let mut values = [0.0_f64; K];
        let last = seqs[r - 1].entries();
        for l in 0..=p {
            let w = if r == 2 {
                last[l] * first_cum[p - l]
            } else {
                last[l]
            };
            mass += w;
            for k in 0..K {
                values[k] += w * nodes[l][k];
            }
        }

        let reached = mass >= target;
        if reached || p == trunc.p_max {
            return Ok((
                SeriesValues {
                    values,
                    captured_mass: mass,
                    p_used: p,
                    tail_bound: sup * (1.0 - mass).max(0.0),
                },
                reached,
            ));
        }
        checkpoint = (checkpoint * 2).max(1);
    }
}

fn series_by_degree<const K: usize, N>(
    mut seqs: Vec<WeightSeq>,
    mut node: N,
    trunc: Truncation,
) -> Result<(SeriesValues<K>, bool), OperatorError>
where
    N: FnMut(usize) -> Result<([f64; K], f64), OperatorError>,
{
    let r = seqs.len();
    let target = 1.0 - trunc.mass_tol;

    // chain[j] = convolution of the first j+1 sequences, grown degree by
    // degree; only the last of them (the "other" sequence) is consumed below
    let mut chain: Vec<Vec<f64>> = vec![Vec::new(); r - 1];
    let mut nodes: Vec<[f64; K]> = Vec::new();
    let mut sup = 0.0_f64;
    let mut mass = 0.0;
    let mut values = [0.0_f64; K];

    for p in 0..=trunc.p_max {
        for s in seqs.iter_mut() {
            s.extend_to(p);
        }
        let first = seqs[0].entries();
        chain[0].push(first[p]);
        for j in 1..r - 1 {
            let ej = seqs[j].entries();
            let (lower, upper) = chain.split_at_mut(j);
            let prev = &lower[j - 1];
            let mut acc = 0.0;
            for i in 0..=p {
                acc += ej[i] * prev[p - i];
            }
            upper[0].push(acc);
        }

        let (node_values, node_sup) = node(p)?;
        nodes.push(node_values);
        sup = sup.max(node_sup);

        let other = &chain[r - 2];
        let last = seqs[r - 1].entries();
        for l in 0..=p {
            let w = last[l] * other[p - l];
            mass += w;
            for k in 0..K {
                values[k] += w * nodes[l][k];
            }
        }

        if mass >= target {
            return Ok((
                SeriesValues {
                    values,
                    captured_mass: mass,
                    p_used: p,
                    tail_bound: sup * (1.0 - mass).max(0.0),
                },
                true,
            ));
        }
    }

    Ok((
        SeriesValues {
            values,
            captured_mass: mass,
            p_used: trunc.p_max,
            tail_bound: sup * (1.0 - mass).max(0.0),
        },
        false,
    ))
}

/// Single-functional wrapper: reaching the degree cap without the mass
/// target is the `TruncationExhausted` error, carrying the partial result.
pub(crate) fn evaluate_series<N>(
    seqs: Vec<WeightSeq>,
    mut node: N,
    trunc: Truncation,
) -> Result<EvalResult, OperatorError>
where
    N: FnMut(usize) -> Result<(f64, f64), OperatorError>,
{
    let (out, reached) =
        evaluate_series_multi::<1, _>(seqs, |l| node(l).map(|(v, s)| ([v], s)), trunc)?;
    let result = EvalResult {
        value: out.values[0],
        captured_mass: out.captured_mass,
        p_used: out.p_used,
        tail_bound: out.tail_bound,
    };
    if reached {
        Ok(result)
    } else {
        Err(OperatorError::TruncationExhausted { result })
    }
}

fn check_point(x: f64) -> Result<(), OperatorError> {
    if x.is_finite() && (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(OperatorError::EvaluationPointOutOfRange(x))
    }
}

fn geometric_seqs(spec: &OperatorSpec, x: f64) -> Vec<WeightSeq> {
    spec.betas
        .iter()
        .map(|&b| WeightSeq::geometric(spec.n, spec.q, x * b))
        .collect()
}

// ---------------------------------------------------------------------------
// the operators
// ---------------------------------------------------------------------------

/// The q-integral operator applied to `f` at `x`.
pub fn q_integral_operator<F: Fn(f64) -> f64>(
    spec: &OperatorSpec,
    f: F,
    x: f64,
    trunc: Truncation,
) -> Result<EvalResult, OperatorError> {
    check_point(x)?;
    let qf = spec.q.get();
    let mut geom = NodeGeometry::new(spec);
    let f_ref = &f;
    evaluate_series(
        geometric_seqs(spec, x),
        move |l| {
            debug_assert_eq!(geom.level(), l);
            let out = scaled_geometric_series(f_ref, geom.left(), geom.width(), qf, NODE_SERIES_TOL)?;
            geom.advance();
            Ok(out)
        },
        trunc,
    )
}

/// The q-sampling operator: same series, node value `f([l]_q / [n+l-1]_q)`.
pub fn q_sampling_operator<F: Fn(f64) -> f64>(
    spec: &OperatorSpec,
    f: F,
    x: f64,
    trunc: Truncation,
) -> Result<EvalResult, OperatorError> {
    check_point(x)?;
    let mut geom = NodeGeometry::new(spec);
    let f_ref = &f;
    evaluate_series(
        geometric_seqs(spec, x),
        move |l| {
            debug_assert_eq!(geom.level(), l);
            let s = geom.left();
            let v = f_ref(s);
            if !v.is_finite() {
                return Err(QcoreError::NonFiniteSample { at: s, value: v }.into());
            }
            geom.advance();
            Ok((v, v.abs()))
        },
        trunc,
    )
}

/// Which q-free baseline to evaluate: point sampling at `l / (n+l-1)` or the
/// averaged (integral) variant over `[l, l+1] / (n+l-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassicalKind {
    Point,
    Integral,
}

/// The classical (q-free) baseline operators. `betas` supplies one shape
/// parameter per variable, as in [`OperatorSpec`].
pub fn classical_operator<F: Fn(f64) -> f64>(
    kind: ClassicalKind,
    n: usize,
    betas: &[f64],
    f: F,
    x: f64,
    trunc: Truncation,
) -> Result<EvalResult, OperatorError> {
    if n < 2 {
        return Err(OperatorError::OrderTooSmall(n));
    }
    if betas.is_empty() {
        return Err(OperatorError::EmptyBetas);
    }
    for &b in betas {
        if !(b > 0.0 && b < 1.0) {
            return Err(OperatorError::BetaOutOfRange(b));
        }
    }
    check_point(x)?;

    let seqs: Vec<WeightSeq> = betas
        .iter()
        .map(|&b| WeightSeq::classical(n, x * b))
        .collect();
    let f_ref = &f;
    evaluate_series(
        seqs,
        move |l| {
            let left = l as f64 / (n + l - 1) as f64;
            match kind {
                ClassicalKind::Point => {
                    let v = f_ref(left);
                    if !v.is_finite() {
                        return Err(QcoreError::NonFiniteSample { at: left, value: v }.into());
                    }
                    Ok((v, v.abs()))
                }
                ClassicalKind::Integral => {
                    let right = (l + 1) as f64 / (n + l - 1) as f64;
                    simpson_mean(f_ref, left, right)
                }
            }
        },
        trunc,
    )
}

/// Mean of `f` over `[a, b]` by composite Simpson quadrature, together with
/// the largest `|f|` seen among the samples.
fn simpson_mean<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64), OperatorError> {
    const PANELS: usize = 64;
    let h = (b - a) / PANELS as f64;
    let mut sum = 0.0;
    let mut sup = 0.0_f64;
    for i in 0..=PANELS {
        let s = a + h * i as f64;
        let v = f(s);
        if !v.is_finite() {
            return Err(QcoreError::NonFiniteSample { at: s, value: v }.into());
        }
        sup = sup.max(v.abs());
        let weight = if i == 0 || i == PANELS {
            1.0
        } else if !i.is_multiple_of(2) {
            4.0
        } else {
            2.0
        };
        sum += weight * v;
    }
    Ok((sum * h / (3.0 * (b - a)), sup))
}

/// The auxiliary operator: the q-integral operator rescaled by a factor of
/// two whenever the sequence index `m` is a perfect square. The reported
/// `captured_mass` stays that of the underlying series; `value` and
/// `tail_bound` carry the rescaling.
pub fn auxiliary_operator<F: Fn(f64) -> f64>(
    spec: &OperatorSpec,
    m: usize,
    f: F,
    x: f64,
    trunc: Truncation,
) -> Result<EvalResult, OperatorError> {
    if m == 0 {
        return Err(OperatorError::ZeroAuxiliaryIndex);
    }
    let scale = if is_perfect_square(m) { 2.0 } else { 1.0 };
    let rescale = |mut res: EvalResult| {
        res.value *= scale;
        res.tail_bound *= scale;
        res
    };
    match q_integral_operator(spec, f, x, trunc) {
        Ok(res) => Ok(rescale(res)),
        Err(OperatorError::TruncationExhausted { result }) => {
            Err(OperatorError::TruncationExhausted {
                result: rescale(result),
            })
        }
        Err(e) => Err(e),
    }
}

// ---------------------------------------------------------------------------
// parameter sequences
// ---------------------------------------------------------------------------

/// Rule generating the deformation sequence `q_n`; both rules tend to 1 and
/// have `q_n^n` tending to a limit inside [0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QRule {
    /// `q_n = 1 - 1/(n+1)`; `q_n^n` decreases to `1/e`.
    InverseLinear,
    /// `q_n = 1 - 1/sqrt(n+1)`; `q_n^n` tends to 0.
    InverseSqrt,
}

impl QRule {
    pub fn q_at(self, n: usize) -> QValue {
        assert!(n >= 1, "q sequences are indexed from 1");
        let q = match self {
            QRule::InverseLinear => 1.0 - 1.0 / (n as f64 + 1.0),
            QRule::InverseSqrt => 1.0 - 1.0 / (n as f64 + 1.0).sqrt(),
        };
        QValue::new(q).expect("rule values lie inside (0, 1)")
    }

    /// The limit of `q_n^n`.
    pub fn power_limit(self) -> f64 {
        match self {
            QRule::InverseLinear => (-1.0_f64).exp(),
            QRule::InverseSqrt => 0.0,
        }
    }
}

/// Rule generating the shape parameters `beta_n` in (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaRule {
    /// `beta_n = n / (n + 1)`, increasing to 1.
    RatioToOne,
    /// A fixed value, shared by every index.
    Constant(f64),
}

impl BetaRule {
    pub fn beta_at(self, n: usize) -> f64 {
        assert!(n >= 1, "beta sequences are indexed from 1");
        match self {
            BetaRule::RatioToOne => n as f64 / (n as f64 + 1.0),
            BetaRule::Constant(c) => c,
        }
    }
}

/// Rules generating the operator parameters across the index `n`: the
/// deformation `q_n` and the shape parameters `beta_n` (one shared rule for
/// all `r` variables).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequenceSpec {
    pub q_rule: QRule,
    pub beta_rule: BetaRule,
}

impl SequenceSpec {
    pub fn new(q_rule: QRule, beta_rule: BetaRule) -> Self {
        SequenceSpec { q_rule, beta_rule }
    }

    /// The operator instance at index `n` with `r` variables.
    pub fn operator_spec(&self, r: usize, n: usize) -> Result<OperatorSpec, OperatorError> {
        let beta = self.beta_rule.beta_at(n);
        OperatorSpec::new(n, self.q_rule.q_at(n), vec![beta; r])
    }
}

impl Default for SequenceSpec {
    fn default() -> Self {
        SequenceSpec {
            q_rule: QRule::InverseLinear,
            beta_rule: BetaRule::RatioToOne,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{q_riemann_integral, QIntegralBounds};
    use proptest::prelude::*;

    fn q(v: f64) -> QValue {
        QValue::new(v).unwrap()
    }

    fn spec(n: usize, qv: f64, betas: &[f64]) -> OperatorSpec {
        OperatorSpec::new(n, q(qv), betas.to_vec()).unwrap()
    }

    fn tr(mass_tol: f64, p_max: usize) -> Truncation {
        Truncation::new(mass_tol, p_max).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(matches!(
            OperatorSpec::new(1, q(0.5), vec![0.5]),
            Err(OperatorError::OrderTooSmall(1))
        ));
        assert!(matches!(
            OperatorSpec::new(2, q(0.5), vec![]),
            Err(OperatorError::EmptyBetas)
        ));
        assert!(matches!(
            OperatorSpec::new(2, q(0.5), vec![1.0]),
            Err(OperatorError::BetaOutOfRange(_))
        ));
        assert!(OperatorSpec::new(2, q(0.5), vec![0.5, 0.7]).is_ok());
    }

    #[test]
    fn node_functional_of_one_telescopes_to_unity() {
        let sp = spec(3, 0.6, &[0.5]);
        for l in [0usize, 1, 4, 9] {
            let v = q_integral_node_functional(&sp, l, |_| 1.0).unwrap();
            assert!((v - 1.0).abs() <= 1e-13, "l={l}: {v}");
        }
    }

    #[test]
    fn node_functional_identity_closed_form() {
        // l = 0, n = 2, q = 0.5: 1 / ([2]_q [n-1]_q) = 2/3
        let sp = spec(2, 0.5, &[0.5]);
        let v = q_integral_node_functional(&sp, 0, |s| s).unwrap();
        assert!((v - 2.0 / 3.0).abs() <= 1e-13);

        // general l: ([l]_q + q^l / [2]_q) / [n+l-1]_q
        let sp = spec(4, 0.7, &[0.5]);
        for l in [0usize, 1, 3, 7] {
            let v = q_integral_node_functional(&sp, l, |s| s).unwrap();
            let d = q_integer(sp.n() + l - 1, sp.q());
            let expected = (q_integer(l, sp.q()) + 0.7f64.powi(l as i32) / q_integer(2, sp.q())) / d;
            assert!((v - expected).abs() <= 1e-13, "l={l}");
        }
    }

    #[test]
    fn node_functional_matches_literal_factored_form_at_small_l() {
        let sp = spec(3, 0.45, &[0.5]);
        for l in 0..6usize {
            let d = q_integer(sp.n() + l - 1, sp.q());
            let bounds = QIntegralBounds::new(
                q_integer(l, sp.q()) / d,
                q_integer(l + 1, sp.q()) / d,
            )
            .unwrap();
            let integral = q_riemann_integral(|s| s * s, bounds, sp.q(), 1e-16).unwrap();
            let literal = d * 0.45f64.powi(-(l as i32)) * integral;
            let normalized = q_integral_node_functional(&sp, l, |s| s * s).unwrap();
            assert!(
                (literal - normalized).abs() <= 1e-12 * (1.0 + literal.abs()),
                "l={l}: literal={literal} normalized={normalized}"
            );
        }
    }

    #[test]
    fn q_integral_operator_normalizes_constants() {
        let sp = spec(3, 0.5, &[0.5, 0.75]);
        let res = q_integral_operator(&sp, |_| 1.0, 0.6, Truncation::default()).unwrap();
        assert!((res.value - 1.0).abs() <= 1e-10 + 1e-12);
        assert!((res.value - res.captured_mass).abs() <= 1e-12);
        assert!(res.captured_mass <= 1.0 + 1e-12);
    }

    #[test]
    fn q_integral_operator_at_zero_keeps_only_first_node() {
        let sp = spec(2, 0.5, &[0.5]);
        let res = q_integral_operator(&sp, |s| s, 0.0, Truncation::default()).unwrap();
        assert!((res.value - 2.0 / 3.0).abs() <= 1e-12);
        assert_eq!(res.p_used, 0);
    }

    #[test]
    fn sampling_operator_collapses_at_zero() {
        let sp = spec(3, 0.5, &[0.4, 0.8]);
        let res = q_sampling_operator(&sp, |s| 3.0 + s, 0.0, Truncation::default()).unwrap();
        assert!((res.value - 3.0).abs() <= 1e-12);
    }

    #[test]
    fn sampling_operator_normalizes_constants() {
        let sp = spec(4, 0.7, &[0.3, 0.6, 0.9]);
        let res = q_sampling_operator(&sp, |_| 1.0, 0.85, Truncation::default()).unwrap();
        assert!((res.value - 1.0).abs() <= 1e-10 + 1e-12);
    }

    #[test]
    fn classical_operators_normalize_constants() {
        for kind in [ClassicalKind::Point, ClassicalKind::Integral] {
            let res = classical_operator(kind, 5, &[0.5, 0.5], |_| 1.0, 0.7, Truncation::default())
                .unwrap();
            assert!((res.value - 1.0).abs() <= 1e-10 + 1e-12, "{kind:?}");
        }
    }

    #[test]
    fn classical_integral_operator_identity_at_zero() {
        // only the l = 0 node survives: (n-1) * int_0^{1/(n-1)} s ds = 1/(2(n-1))
        let res = classical_operator(
            ClassicalKind::Integral,
            2,
            &[0.5],
            |s| s,
            0.0,
            Truncation::default(),
        )
        .unwrap();
        assert!((res.value - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn q_operators_approach_classical_baselines_as_q_rises() {
        let f = |s: f64| s * s;
        let x = 0.5;
        let trunc = Truncation::default();
        let e = classical_operator(ClassicalKind::Integral, 8, &[0.5, 0.5], f, x, trunc)
            .unwrap()
            .value;
        let l = classical_operator(ClassicalKind::Point, 8, &[0.5, 0.5], f, x, trunc)
            .unwrap()
            .value;
        let mut prev_k = f64::INFINITY;
        let mut prev_s = f64::INFINITY;
        for qv in [0.9, 0.99] {
            let sp = spec(8, qv, &[0.5, 0.5]);
            let k = q_integral_operator(&sp, f, x, trunc).unwrap().value;
            let s = q_sampling_operator(&sp, f, x, trunc).unwrap().value;
            let dk = (k - e).abs();
            let ds = (s - l).abs();
            assert!(dk < prev_k, "q-integral gap not shrinking at q={qv}");
            assert!(ds < prev_s, "q-sampling gap not shrinking at q={qv}");
            prev_k = dk;
            prev_s = ds;
        }
    }

    #[test]
    fn auxiliary_operator_doubles_at_squares() {
        let sp = spec(3, 0.5, &[0.5]);
        let trunc = Truncation::default();
        let base = q_integral_operator(&sp, |s| s, 0.4, trunc).unwrap();
        let at3 = auxiliary_operator(&sp, 3, |s| s, 0.4, trunc).unwrap();
        let at4 = auxiliary_operator(&sp, 4, |s| s, 0.4, trunc).unwrap();
        let at9 = auxiliary_operator(&sp, 9, |_| 1.0, 0.4, trunc).unwrap();
        assert_eq!(at3.value, base.value);
        assert!((at4.value - 2.0 * base.value).abs() <= 1e-15);
        assert!((at9.value - 2.0).abs() <= 2e-10);
        assert!(matches!(
            auxiliary_operator(&sp, 0, |s| s, 0.4, trunc),
            Err(OperatorError::ZeroAuxiliaryIndex)
        ));
    }

    #[test]
    fn degree_cap_reports_honest_partial_result() {
        let sp = spec(3, 0.5, &[0.5, 0.5]);
        let out = q_integral_operator(&sp, |_| 1.0, 0.9, tr(1e-12, 3));
        match out {
            Err(OperatorError::TruncationExhausted { result }) => {
                assert!(result.captured_mass < 1.0 - 1e-12);
                assert_eq!(result.p_used, 3);
                assert!(result.tail_bound > 0.0);
                // for a constant the discarded tail is exactly the missing mass
                assert!(
                    (result.value + result.tail_bound - 1.0).abs() <= 1e-12,
                    "value {} + tail {} should reconstruct 1",
                    result.value,
                    result.tail_bound
                );
            }
            other => panic!("expected truncation exhaustion, got {other:?}"),
        }
        let recovered = accept_partial(q_integral_operator(&sp, |_| 1.0, 0.9, tr(1e-12, 3)));
        assert!(recovered.is_ok());
    }

    #[test]
    fn evaluation_point_is_validated() {
        let sp = spec(2, 0.5, &[0.5]);
        assert!(matches!(
            q_integral_operator(&sp, |s| s, 1.5, Truncation::default()),
            Err(OperatorError::EvaluationPointOutOfRange(_))
        ));
    }

    #[test]
    fn sequence_rules_have_documented_limits() {
        let rules = SequenceSpec::default();
        // q_n^n decreases toward 1/e for the default rule
        let mut prev = f64::INFINITY;
        for k in 1..=8 {
            let n = 1usize << k;
            let qn = rules.q_rule.q_at(n).get();
            let pow = qn.powi(n as i32);
            assert!(pow > rules.q_rule.power_limit());
            assert!(pow < prev);
            prev = pow;
        }
        assert!((prev - rules.q_rule.power_limit()).abs() < 2e-3);
        let sp = rules.operator_spec(2, 8).unwrap();
        assert_eq!(sp.n(), 8);
        assert_eq!(sp.betas(), &[8.0 / 9.0, 8.0 / 9.0]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn normalization_and_node_containment(
            n in 2usize..=12,
            qv in 0.2..0.9f64,
            r in 1usize..=3,
            b0 in 0.05..0.95f64,
            b1 in 0.05..0.95f64,
            b2 in 0.05..0.95f64,
            x in 0.0..=1.0f64,
        ) {
            let betas = [b0, b1, b2];
            let sp = spec(n, qv, &betas[..r]);
            let res = q_integral_operator(&sp, |_| 1.0, x, Truncation::default()).unwrap();
            prop_assert!(res.value >= 1.0 - 1e-10 - 1e-12);
            prop_assert!(res.captured_mass <= 1.0 + 1e-12);
            for l in [0usize, 1, 5, 20] {
                let (a, w) = node_interval(&sp, l);
                prop_assert!(a >= 0.0);
                prop_assert!(a + w <= 1.0 + 1e-12);
            }
        }

        #[test]
        fn positivity_monotonicity_linearity(
            n in 2usize..=10,
            qv in 0.25..0.85f64,
            b in 0.1..0.9f64,
            x in 0.0..=1.0f64,
            a_coef in -1.5..1.5f64,
            b_coef in -1.5..1.5f64,
        ) {
            let sp = spec(n, qv, &[b, b]);
            let trunc = Truncation::default();
            let f = |s: f64| 0.1 + s * s;
            let g = |s: f64| 0.4 + s * s;
            let fr = q_integral_operator(&sp, f, x, trunc).unwrap();
            let gr = q_integral_operator(&sp, g, x, trunc).unwrap();
            // positivity and monotonicity (up to the truncated tails)
            prop_assert!(fr.value >= 0.0);
            prop_assert!(fr.value <= gr.value + fr.tail_bound + gr.tail_bound + 1e-12);
            // linearity within the combined tail bounds
            let combo = q_integral_operator(
                &sp,
                |s| a_coef * f(s) + b_coef * g(s),
                x,
                trunc,
            ).unwrap();
            let lhs = combo.value;
            let rhs = a_coef * fr.value + b_coef * gr.value;
            let slack = combo.tail_bound
                + a_coef.abs() * fr.tail_bound
                + b_coef.abs() * gr.tail_bound
                + 1e-11;
            prop_assert!((lhs - rhs).abs() <= slack, "lhs={lhs} rhs={rhs} slack={slack}");
        }
    }
}
