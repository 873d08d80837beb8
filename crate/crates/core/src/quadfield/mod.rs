//! Exact arithmetic in real quadratic fields and continued fractions of
//! quadratic irrationals.

mod cf;
mod surd;

pub use cf::{expand as cf_expand, rint, CfExpansion, Period, PeriodicCF};
pub(crate) use surd::squarefree_split;
pub use surd::QuadSurd;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuadError {
    #[error("denominator is zero")]
    ZeroDenominator,
    #[error("radicand {0} is a perfect square")]
    SquareRadicand(u64),
    #[error("operands live in different fields: sqrt({0}) vs sqrt({1})")]
    MixedRadicand(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("rational value lies exactly halfway between two integers")]
    HalfIntegerTie,
    #[error("value is rational")]
    Rational,
    #[error("value {0} is not in (0, 1)")]
    OutOfUnitInterval(String),
    #[error("partial quotient does not fit in 64 bits")]
    DigitOverflow,
    #[error("continued fraction period is empty")]
    EmptyPeriod,
    #[error("partial quotients must be positive")]
    NonPositiveDigit,
    #[error("cannot parse {0:?}")]
    Parse(String),
}
