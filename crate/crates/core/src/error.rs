//! Error type shared by every module.

use thiserror::Error;

/// Failures reported by the library. The display strings are part of the
/// public contract and are matched by callers and reports.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by zero polynomial")]
    DivisionByZero,
    #[error("degree {degree} exceeds the configured limit {limit}")]
    DegreeLimit { degree: u32, limit: u32 },
    #[error("not singular")]
    NotSingular,
    #[error("V2 vanished on orbit")]
    DenominatorVanished,
    #[error("step underflow near singular point")]
    StepUnderflow,
    #[error("orbit escaped region")]
    EscapedRegion,
    #[error("max time exceeded")]
    MaxTimeExceeded,
    #[error("not periodic")]
    NotPeriodic,
    #[error("no return to saddle")]
    NoReturnToSaddle,
    #[error("divergent: strong saddle")]
    DivergentStrongSaddle,
    #[error("outside tubular neighborhood")]
    OutsideTube,
    #[error("S vanished")]
    SVanished,
    #[error("inconsistent multiplicity across s")]
    InconsistentMultiplicity,
    #[error("V identically small")]
    VIdenticallySmall,
    #[error("not a hyperbolic saddle")]
    NotHyperbolicSaddle,
    #[error("separatrix factor mismatch")]
    SeparatrixMismatch,
    #[error("strong saddle: quantities undefined beyond α₁")]
    StrongSaddleQuantities,
    #[error("irrational eigenvalues: exact normal form unsupported")]
    IrrationalEigenvalues,
    #[error("nonresonant saddle")]
    Nonresonant,
    #[error("contradiction: α_k ≠ 0 for k < m")]
    FormalContradiction { k: usize, m: usize },
    #[error("inconsistent: strong saddle with m ≠ 1")]
    StrongSaddleMultiplicity,
    #[error("constraint violated: {0}")]
    ConstraintViolated(String),
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
