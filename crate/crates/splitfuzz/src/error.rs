use thiserror::Error;

/// Errors raised by fuzzy set construction, inference and defuzzification.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FuzzyError {
    #[error("invalid universe: {0}")]
    Universe(String),
    #[error("invalid breakpoints {points:?}: {reason}")]
    Breakpoints { points: Vec<f64>, reason: String },
    #[error("alpha must lie in (0, 1], got {0}")]
    Alpha(f64),
    #[error("sets are sampled on different universes")]
    UniverseMismatch,
    #[error("variable `{variable}`: {reason}")]
    Variable { variable: String, reason: String },
    #[error("unknown term `{label}` in variable `{variable}`")]
    UnknownTerm { variable: String, label: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("rule base is empty")]
    EmptyRuleBase,
    #[error("degree {0} at sample {1} is outside [0, 1]")]
    Degree(f64, usize),
    #[error("no rule fired: aggregated set is identically zero")]
    NoRuleFired,
    #[error("unknown defuzzification method `{0}`; expected one of: centroid, bisector, mom, lom, som")]
    UnknownMethod(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ControlError {
    #[error("setpoint {0} bar is outside [0, 10]")]
    Setpoint(f64),
    #[error("unit scale must be positive, got {0}")]
    UnitScale(f64),
    #[error("negative pressure reading {0}")]
    NegativePressure(f64),
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlantError {
    #[error("invalid plant parameter `{field}`: {reason}")]
    Parameter { field: &'static str, reason: String },
    #[error("transfer function: {0}")]
    TransferFunction(String),
    #[error("discretization is unstable (spectral radius {0})")]
    Unstable(f64),
    #[error(transparent)]
    Control(#[from] ControlError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SysIdError {
    #[error("order ({na}, {nb}, {nk}) outside 1..=10")]
    Order { na: usize, nb: usize, nk: usize },
    #[error("dataset: {0}")]
    Dataset(String),
    #[error("regressor matrix is rank deficient for order ({na}, {nb}, {nk})")]
    RankDeficient { na: usize, nb: usize, nk: usize },
    #[error("validation output is constant; fit is undefined")]
    ConstantOutput,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("series is empty")]
    Empty,
    #[error("setpoint is zero; percentage metrics are undefined")]
    ZeroSetpoint,
    #[error("settling band must be 2 or 5 percent, got {0}")]
    Band(f64),
    #[error("series time step is not uniform")]
    NonUniform,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("sweep: {0}")]
    Config(String),
    #[error(transparent)]
    Plant(#[from] PlantError),
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot parse configuration: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("configuration: {0}")]
    Invalid(String),
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
}
