//! Brute-force composition-enumeration oracles for the operator family.
//!
//! Everything here is deliberately independent of the convolution-based
//! evaluation path: weights come from direct q-Pochhammer quotients, node
//! integrals from the literal factored q-integral, and the outer series from
//! explicit enumeration of integer compositions. Costs are exponential in r,
//! which is fine at oracle scale (p <= 8, r <= 3).

use qkorovkin::operators::OperatorSpec;
use qkorovkin::qcore::{q_integer, q_pochhammer, q_riemann_integral, QIntegralBounds, QValue};

/// All compositions (l_1, ..., l_r) of p into r nonnegative parts.
pub fn compositions(p: usize, r: usize) -> Vec<Vec<usize>> {
    assert!(r >= 1);
    if r == 1 {
        return vec![vec![p]];
    }
    let mut out = Vec::new();
    for head in 0..=p {
        for mut tail in compositions(p - head, r - 1) {
            let mut c = vec![head];
            c.append(&mut tail);
            out.push(c);
        }
    }
    out
}

/// `(q^n; q)_l z^l / (q; q)_l` straight from the Pochhammer products.
pub fn coefficient_direct(n: usize, z: f64, q: QValue, l: usize) -> f64 {
    let top = q_pochhammer(q.get().powi(n as i32), q, l);
    let bot = q_pochhammer(q.get(), q, l);
    top * z.powi(l as i32) / bot
}

/// Literal node functional of the q-integral operator:
/// `[n+l-1]_q q^{-l} * integral of f over [[l]_q, [l+1]_q] / [n+l-1]_q`.
pub fn node_direct<F: Fn(f64) -> f64>(spec: &OperatorSpec, l: usize, f: F) -> f64 {
    let n = spec.n();
    let q = spec.q();
    let d = q_integer(n + l - 1, q);
    let bounds = QIntegralBounds::new(q_integer(l, q) / d, q_integer(l + 1, q) / d).unwrap();
    // tolerance scaled by the node width so the amplified q^{-l} factor
    // cannot inflate the truncation error past ~1e-15
    let width = bounds.width();
    let integral = q_riemann_integral(&f, bounds, q, 1e-15 * width).unwrap();
    d * q.get().powi(-(l as i32)) * integral
}

/// Node value of the q-sampling operator: `f([l]_q / [n+l-1]_q)`.
pub fn sampling_node_direct<F: Fn(f64) -> f64>(spec: &OperatorSpec, l: usize, f: F) -> f64 {
    let q = spec.q();
    f(q_integer(l, q) / q_integer(spec.n() + l - 1, q))
}

/// The q-integral operator by brute-force enumeration of all compositions of
/// every degree p <= p_cap.
pub fn enumerate_q_integral_operator<F: Fn(f64) -> f64>(
    spec: &OperatorSpec,
    f: F,
    x: f64,
    p_cap: usize,
) -> f64 {
    enumerate_with_nodes(spec, x, p_cap, |l| node_direct(spec, l, &f))
}

/// The q-sampling operator by brute-force enumeration.
pub fn enumerate_q_sampling_operator<F: Fn(f64) -> f64>(
    spec: &OperatorSpec,
    f: F,
    x: f64,
    p_cap: usize,
) -> f64 {
    enumerate_with_nodes(spec, x, p_cap, |l| sampling_node_direct(spec, l, &f))
}

fn enumerate_with_nodes<N: Fn(usize) -> f64>(
    spec: &OperatorSpec,
    x: f64,
    p_cap: usize,
    node: N,
) -> f64 {
    let n = spec.n();
    let q = spec.q();
    let betas = spec.betas();
    let prefactor: f64 = betas.iter().map(|&b| q_pochhammer(x * b, q, n)).product();
    let nodes: Vec<f64> = (0..=p_cap).map(node).collect();
    let mut total = 0.0;
    for p in 0..=p_cap {
        let mut degree_sum = 0.0;
        for c in compositions(p, betas.len()) {
            let weight: f64 = c
                .iter()
                .zip(betas)
                .map(|(&lk, &bk)| coefficient_direct(n, bk, q, lk))
                .product();
            degree_sum += weight * nodes[*c.last().unwrap()];
        }
        total += degree_sum * x.powi(p as i32);
    }
    prefactor * total
}
