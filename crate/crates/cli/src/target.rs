//! Built-in target functions on [0, 1].

use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub enum TargetFunction {
    Identity,
    Square,
    /// `sin(pi x)`, vanishing at both endpoints.
    SineBump,
    /// `|x - 1/2|`, continuous with a kink.
    AbsShift,
    /// Linear interpolation of samples on a uniform grid over [0, 1].
    Tabulated(Vec<f64>),
}

impl TargetFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            TargetFunction::Identity => x,
            TargetFunction::Square => x * x,
            TargetFunction::SineBump => (PI * x).sin(),
            TargetFunction::AbsShift => (x - 0.5).abs(),
            TargetFunction::Tabulated(values) => {
                let n = values.len();
                let pos = x.clamp(0.0, 1.0) * (n - 1) as f64;
                let i = (pos.floor() as usize).min(n - 2);
                let frac = pos - i as f64;
                values[i] * (1.0 - frac) + values[i + 1] * frac
            }
        }
    }

    /// A bound on `|f|` over [0, 1].
    pub fn sup_bound(&self) -> f64 {
        match self {
            TargetFunction::Identity | TargetFunction::Square | TargetFunction::SineBump => 1.0,
            TargetFunction::AbsShift => 0.5,
            TargetFunction::Tabulated(values) => {
                values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TargetFunction::Identity => "identity",
            TargetFunction::Square => "square",
            TargetFunction::SineBump => "sine-bump",
            TargetFunction::AbsShift => "abs-shift",
            TargetFunction::Tabulated(_) => "tabulated",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tabulated_interpolates_linearly() {
        let f = TargetFunction::Tabulated(vec![0.0, 1.0, 0.0]);
        assert_eq!(f.eval(0.0), 0.0);
        assert_eq!(f.eval(0.5), 1.0);
        assert!((f.eval(0.25) - 0.5).abs() <= 1e-15);
        assert!((f.eval(0.75) - 0.5).abs() <= 1e-15);
        assert_eq!(f.eval(1.0), 0.0);
        assert_eq!(f.sup_bound(), 1.0);
    }

    #[test]
    fn builtins_are_bounded_as_claimed() {
        for f in [
            TargetFunction::Identity,
            TargetFunction::Square,
            TargetFunction::SineBump,
            TargetFunction::AbsShift,
        ] {
            let bound = f.sup_bound();
            for i in 0..=100 {
                let x = i as f64 / 100.0;
                assert!(f.eval(x).abs() <= bound + 1e-15, "{} at {x}", f.name());
            }
        }
    }
}
