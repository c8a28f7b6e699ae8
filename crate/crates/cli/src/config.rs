//! Experiment configuration: a single TOML file with nested sections, plus
//! the built-in presets each subcommand falls back to.

use serde::Deserialize;
use thiserror::Error;

use qkorovkin::operators::{BetaRule, QRule, SequenceSpec, Truncation};
use qkorovkin::summability::{
    DeferralRule, PowerSeriesMethod, SummabilityMatrix, SummabilityScheme, WeightRule,
};

use crate::target::TargetFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    VerifyMoments,
    Converge,
    Counterexample,
    Summability,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("operator.r must be between 1 and 8, got {0}")]
    BadVariableCount(usize),
    #[error("operator.n-ladder must be nonempty, strictly increasing, all >= 2; got {0:?}")]
    BadLadder(Vec<usize>),
    #[error("operator.beta-value must lie strictly inside (0, 1), got {0}")]
    BadBetaValue(f64),
    #[error("operator.beta-rule = \"constant\" requires operator.beta-value")]
    MissingBetaValue,
    #[error("grid.points must be at least 2, got {0}")]
    BadGrid(usize),
    #[error("truncation.mass-tol must lie strictly inside (0, 1), got {0}")]
    BadMassTol(f64),
    #[error("truncation.p-max must be at least 1")]
    BadDegreeCap,
    #[error("moments.x-samples must be nonempty values inside [0, 1]; got {0:?}")]
    BadXSamples(Vec<f64>),
    #[error("target.function = \"tabulated\" requires target.values with at least 2 finite entries")]
    BadTabulated,
    #[error("summability.prefix must be at least 8, got {0}")]
    BadPrefix(usize),
    #[error("summability.epsilons must be nonempty positive values, got {0:?}")]
    BadEpsilons(Vec<f64>),
    #[error("counterexample.max-index must be at least 25, got {0}")]
    BadMaxIndex(usize),
    #[error("power-series.u-ladder must be nonempty, strictly increasing, inside (0, 1); got {0:?}")]
    BadULadder(Vec<f64>),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Config {
    #[serde(default)]
    pub operator: OperatorSection,
    #[serde(default)]
    pub target: TargetSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub truncation: TruncationSection,
    #[serde(default)]
    pub moments: MomentsSection,
    #[serde(default)]
    pub summability: SummabilitySection,
    #[serde(default)]
    pub counterexample: CounterexampleSection,
    #[serde(default)]
    pub power_series: PowerSeriesSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct OperatorSection {
    #[serde(default = "default_r")]
    pub r: usize,
    #[serde(default = "default_ladder")]
    pub n_ladder: Vec<usize>,
    #[serde(default)]
    pub q_rule: QRuleName,
    #[serde(default)]
    pub beta_rule: BetaRuleName,
    #[serde(default)]
    pub beta_value: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum QRuleName {
    /// q_n = 1 - 1/(n+1)
    #[default]
    InverseLinear,
    /// q_n = 1 - 1/sqrt(n+1)
    InverseSqrt,
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum BetaRuleName {
    /// beta_n = n/(n+1)
    #[default]
    RatioToOne,
    /// a fixed beta-value for every index
    Constant,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct TargetSection {
    #[serde(default)]
    pub function: TargetName,
    #[serde(default)]
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum TargetName {
    Identity,
    #[default]
    Square,
    SineBump,
    AbsShift,
    Tabulated,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct GridSection {
    #[serde(default = "default_grid")]
    pub points: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct TruncationSection {
    #[serde(default = "default_mass_tol")]
    pub mass_tol: f64,
    #[serde(default = "default_p_max")]
    pub p_max: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct MomentsSection {
    #[serde(default = "default_x_samples")]
    pub x_samples: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SummabilitySection {
    #[serde(default)]
    pub matrix: MatrixName,
    #[serde(default)]
    pub weights: WeightsName,
    #[serde(default)]
    pub deferral: DeferralName,
    #[serde(default = "default_prefix")]
    pub prefix: usize,
    #[serde(default = "default_epsilons")]
    pub epsilons: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixName {
    Identity,
    #[default]
    Cesaro,
    GeometricRows,
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum WeightsName {
    #[default]
    Ones,
    Linear,
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum DeferralName {
    #[default]
    HalfToN,
    ZeroToN,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct CounterexampleSection {
    #[serde(default = "default_max_index")]
    pub max_index: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct PowerSeriesSection {
    #[serde(default)]
    pub method: MethodName,
    #[serde(default = "default_u_ladder")]
    pub u_ladder: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    #[default]
    Abel,
    Borel,
}

fn default_r() -> usize {
    2
}
fn default_ladder() -> Vec<usize> {
    vec![8, 16, 32, 64]
}
fn default_grid() -> usize {
    257
}
fn default_mass_tol() -> f64 {
    1e-10
}
fn default_p_max() -> usize {
    4096
}
fn default_x_samples() -> Vec<f64> {
    vec![0.0, 0.5, 1.0]
}
fn default_prefix() -> usize {
    96
}
fn default_epsilons() -> Vec<f64> {
    vec![0.1, 0.01]
}
fn default_max_index() -> usize {
    36
}
fn default_u_ladder() -> Vec<f64> {
    vec![0.9, 0.99, 0.999]
}

impl Default for OperatorSection {
    fn default() -> Self {
        OperatorSection {
            r: default_r(),
            n_ladder: default_ladder(),
            q_rule: QRuleName::default(),
            beta_rule: BetaRuleName::default(),
            beta_value: None,
        }
    }
}
impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            points: default_grid(),
        }
    }
}
impl Default for TruncationSection {
    fn default() -> Self {
        TruncationSection {
            mass_tol: default_mass_tol(),
            p_max: default_p_max(),
        }
    }
}
impl Default for MomentsSection {
    fn default() -> Self {
        MomentsSection {
            x_samples: default_x_samples(),
        }
    }
}
impl Default for SummabilitySection {
    fn default() -> Self {
        SummabilitySection {
            matrix: MatrixName::default(),
            weights: WeightsName::default(),
            deferral: DeferralName::default(),
            prefix: default_prefix(),
            epsilons: default_epsilons(),
        }
    }
}
impl Default for CounterexampleSection {
    fn default() -> Self {
        CounterexampleSection {
            max_index: default_max_index(),
        }
    }
}
impl Default for PowerSeriesSection {
    fn default() -> Self {
        PowerSeriesSection {
            method: MethodName::default(),
            u_ladder: default_u_ladder(),
        }
    }
}


impl Config {
    pub fn from_toml(text: &str) -> Result<Config, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    /// The built-in preset each subcommand runs with zero arguments.
    pub fn preset(kind: CommandKind) -> Config {
        let mut config = Config::default();
        match kind {
            CommandKind::VerifyMoments => {
                config.operator.n_ladder = vec![2, 8, 32];
            }
            CommandKind::Converge => {
                config.operator.n_ladder = vec![8, 16, 32, 64];
                config.target.function = TargetName::Square;
                config.grid.points = 257;
            }
            CommandKind::Counterexample => {
                config.grid.points = 33;
            }
            CommandKind::Summability => {
                config.target.function = TargetName::SineBump;
                config.grid.points = 17;
                config.truncation.p_max = 8192;
                config.summability.prefix = 64;
            }
        }
        config
    }

    pub fn apply_overrides(
        &mut self,
        mass_tol: Option<f64>,
        p_max: Option<usize>,
        grid: Option<usize>,
    ) {
        if let Some(v) = mass_tol {
            self.truncation.mass_tol = v;
        }
        if let Some(v) = p_max {
            self.truncation.p_max = v;
        }
        if let Some(v) = grid {
            self.grid.points = v;
            // verify-moments samples x on its own list; a grid override
            // replaces it with a uniform grid of the requested size
            if v >= 2 {
                self.moments.x_samples =
                    (0..v).map(|i| i as f64 / (v - 1) as f64).collect();
            }
        }
    }

    /// Rejects invalid configurations before any evaluation starts.
    pub fn validate(&self, kind: CommandKind) -> Result<(), ConfigError> {
        let op = &self.operator;
        if op.r == 0 || op.r > 8 {
            return Err(ConfigError::BadVariableCount(op.r));
        }
        let ladder_ok = !op.n_ladder.is_empty()
            && op.n_ladder.iter().all(|&n| n >= 2)
            && op.n_ladder.windows(2).all(|w| w[0] < w[1]);
        if !ladder_ok {
            return Err(ConfigError::BadLadder(op.n_ladder.clone()));
        }
        match op.beta_rule {
            BetaRuleName::Constant => match op.beta_value {
                None => return Err(ConfigError::MissingBetaValue),
                Some(b) if !(b > 0.0 && b < 1.0) => return Err(ConfigError::BadBetaValue(b)),
                Some(_) => {}
            },
            BetaRuleName::RatioToOne => {
                if let Some(b) = op.beta_value {
                    if !(b > 0.0 && b < 1.0) {
                        return Err(ConfigError::BadBetaValue(b));
                    }
                }
            }
        }
        if self.grid.points < 2 {
            return Err(ConfigError::BadGrid(self.grid.points));
        }
        let t = &self.truncation;
        if !(t.mass_tol > 0.0 && t.mass_tol < 1.0) {
            return Err(ConfigError::BadMassTol(t.mass_tol));
        }
        if t.p_max == 0 {
            return Err(ConfigError::BadDegreeCap);
        }
        if self.target.function == TargetName::Tabulated {
            let ok = self
                .target
                .values
                .as_ref()
                .is_some_and(|v| v.len() >= 2 && v.iter().all(|x| x.is_finite()));
            if !ok {
                return Err(ConfigError::BadTabulated);
            }
        }
        match kind {
            CommandKind::VerifyMoments => {
                let xs = &self.moments.x_samples;
                if xs.is_empty() || xs.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
                    return Err(ConfigError::BadXSamples(xs.clone()));
                }
            }
            CommandKind::Summability => {
                if self.summability.prefix < 8 {
                    return Err(ConfigError::BadPrefix(self.summability.prefix));
                }
                let eps = &self.summability.epsilons;
                if eps.is_empty() || eps.iter().any(|&e| e.is_nan() || e <= 0.0) {
                    return Err(ConfigError::BadEpsilons(eps.clone()));
                }
            }
            CommandKind::Counterexample => {
                if self.counterexample.max_index < 25 {
                    return Err(ConfigError::BadMaxIndex(self.counterexample.max_index));
                }
                let us = &self.power_series.u_ladder;
                let ok = !us.is_empty()
                    && us.iter().all(|&u| u > 0.0 && u < 1.0)
                    && us.windows(2).all(|w| w[0] < w[1]);
                if !ok {
                    return Err(ConfigError::BadULadder(us.clone()));
                }
            }
            CommandKind::Converge => {}
        }
        Ok(())
    }

    pub fn sequence_spec(&self) -> SequenceSpec {
        let q_rule = match self.operator.q_rule {
            QRuleName::InverseLinear => QRule::InverseLinear,
            QRuleName::InverseSqrt => QRule::InverseSqrt,
        };
        let beta_rule = match self.operator.beta_rule {
            BetaRuleName::RatioToOne => BetaRule::RatioToOne,
            BetaRuleName::Constant => BetaRule::Constant(
                self.operator
                    .beta_value
                    .expect("validated: constant rule carries a value"),
            ),
        };
        SequenceSpec::new(q_rule, beta_rule)
    }

    pub fn truncation(&self) -> Truncation {
        Truncation::new(self.truncation.mass_tol, self.truncation.p_max)
            .expect("validated truncation")
    }

    pub fn target_function(&self) -> TargetFunction {
        match self.target.function {
            TargetName::Identity => TargetFunction::Identity,
            TargetName::Square => TargetFunction::Square,
            TargetName::SineBump => TargetFunction::SineBump,
            TargetName::AbsShift => TargetFunction::AbsShift,
            TargetName::Tabulated => TargetFunction::Tabulated(
                self.target
                    .values
                    .clone()
                    .expect("validated: tabulated target carries values"),
            ),
        }
    }

    pub fn scheme(&self) -> SummabilityScheme {
        SummabilityScheme {
            matrix: match self.summability.matrix {
                MatrixName::Identity => SummabilityMatrix::Identity,
                MatrixName::Cesaro => SummabilityMatrix::Cesaro,
                MatrixName::GeometricRows => SummabilityMatrix::GeometricRows,
            },
            weights: match self.summability.weights {
                WeightsName::Ones => WeightRule::Ones,
                WeightsName::Linear => WeightRule::Linear,
            },
            deferral: match self.summability.deferral {
                DeferralName::HalfToN => DeferralRule::HalfToN,
                DeferralName::ZeroToN => DeferralRule::ZeroToN,
            },
        }
    }

    pub fn power_series_method(&self) -> PowerSeriesMethod {
        match self.power_series.method {
            MethodName::Abel => PowerSeriesMethod::Abel,
            MethodName::Borel => PowerSeriesMethod::Borel,
        }
    }
}
