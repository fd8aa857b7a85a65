use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Numerical failures (singular systems, failed fits, vanishing
/// evaluators) are separated from input and configuration problems so the
/// command line front end can map them onto distinct exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("multi-index of degree {degree} exceeds truncation cap {cap}")]
    DegreeOverflow { degree: usize, cap: usize },
    #[error("series has nonzero constant term; factor e^c out before exponentiating")]
    NonzeroConstant,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("Gram matrix is singular beyond jitter tolerance (condition estimate {condition:e})")]
    SingularGram { condition: f64 },
    #[error("weight vanishes at origin; division undefined at truncation scale")]
    WeightVanishesAtOrigin,
    #[error("truncation cap {cap} too small: {reason}")]
    InsufficientCap { cap: usize, reason: String },
    #[error("function vanishes at lambda = {lambda} (|F| = {modulus:e})")]
    NonVanishingViolation { lambda: f64, modulus: f64 },
    #[error("logarithm increment {jump} >= pi between lambda = {from} and {to}")]
    StepTooCoarse { from: f64, to: f64, jump: f64 },
    #[error("sample matrix is rank deficient ({rows} rows, {cols} columns)")]
    RankDeficient { rows: usize, cols: usize },
    #[error("polynomial fit failed: residual {residual:e} above tolerance {tolerance:e}")]
    FitFailed { residual: f64, tolerance: f64 },
    #[error("functional is not normalized: lambda_0 = {re} + {im}i")]
    Unnormalized { re: f64, im: f64 },
    #[error("f(0) = 0: log|f(0)| is not finite")]
    ZeroAtOrigin,
    #[error("symbol value |b(0)| = {0} is not inside the unit disc")]
    SymbolOutsideDisc(f64),
}

impl Error {
    /// True for failures of a numerical procedure, false for bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularGram { .. }
                | Error::WeightVanishesAtOrigin
                | Error::NonVanishingViolation { .. }
                | Error::StepTooCoarse { .. }
                | Error::RankDeficient { .. }
                | Error::FitFailed { .. }
                | Error::ZeroAtOrigin
        )
    }

    /// Short machine-readable discriminant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::DegreeOverflow { .. } => "degree_overflow",
            Error::NonzeroConstant => "nonzero_constant",
            Error::Parse(_) => "parse",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::SingularGram { .. } => "singular_gram",
            Error::WeightVanishesAtOrigin => "weight_vanishes_at_origin",
            Error::InsufficientCap { .. } => "insufficient_cap",
            Error::NonVanishingViolation { .. } => "non_vanishing_violation",
            Error::StepTooCoarse { .. } => "step_too_coarse",
            Error::RankDeficient { .. } => "rank_deficient",
            Error::FitFailed { .. } => "fit_failed",
            Error::Unnormalized { .. } => "unnormalized",
            Error::ZeroAtOrigin => "zero_at_origin",
            Error::SymbolOutsideDisc(_) => "symbol_outside_disc",
        }
    }
}

pub type Result<V> = std::result::Result<V, Error>;
