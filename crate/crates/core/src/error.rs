use thiserror::Error;

use crate::model::Violation;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,

    #[error("rational overflow")]
    RationalOverflow,

    #[error("invalid rational literal {0:?}")]
    RationalSyntax(String),

    #[error("gamma domain: argument {0} is not positive")]
    GammaDomain(f64),

    #[error("off-grid exponent: {exponent} is not a multiple of alpha = {alpha}")]
    OffGridExponent { exponent: String, alpha: String },

    #[error("evaluation left of expansion point: t = {t} < t0 = {t0}")]
    LeftOfExpansionPoint { t: f64, t0: f64 },

    #[error("incompatible bases")]
    IncompatibleBases,

    #[error("division by (t−t0)^{r} of non-vanishing series (coefficient {index} = {value:e})")]
    NonVanishingSeries { r: String, index: usize, value: f64 },

    #[error("grid order alpha = {0} outside (0, 1]")]
    AlphaOutOfRange(String),

    #[error("non-positive exponent {0}")]
    NonPositiveExponent(String),

    #[error("ν out of (0,1]: {0}")]
    NuOutOfRange(String),

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("invalid problem: {}", join_violations(.0))]
    Invalid(Vec<Violation>),

    #[error("segment {index}: {source}")]
    Segment { index: usize, source: Box<Error> },

    #[error("oracle: {0}")]
    Oracle(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
