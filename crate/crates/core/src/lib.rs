//! Positive linear approximation operators driven by multivariate q-Lagrange
//! polynomial generating functions, together with the numerical machinery
//! needed to study their convergence.
//!
//! The crate is organised bottom-up:
//!
//! - [`qcore`] — scalar q-calculus: q-integers, q-Pochhammer symbols and the
//!   Riemann-type q-integral (numeric series and exact monomial forms).
//! - [`lagrange`] — coefficient sequences of the single-factor generating
//!   series and the multivariate q-Lagrange polynomials they convolve into.
//! - [`operators`] — evaluation engines for the q-integral operator family
//!   (point-sampling and integral variants, their classical q-free baselines,
//!   and the square-index auxiliary operator), with mass-controlled
//!   truncation of the outer power series.
//! - [`moments`] — truncated-series moments, the closed-form deviation
//!   bounds on the first and second moments, the modulus of continuity, and
//!   the derived approximation-rate bound.
//! - [`summability`] — natural/weighted densities, A-statistical tails,
//!   deferred weighted A-statistical densities, and power-series (Abel-type)
//!   sequence transforms with certified truncation.
//!
//! Every evaluation that truncates an infinite series reports how much
//! probability mass it captured and an explicit bound on the discarded tail,
//! so the numerical checks built on top of these primitives can always
//! account for the truncation error they inherit.

pub mod lagrange;
pub mod moments;
pub mod operators;
pub mod qcore;
pub mod summability;
