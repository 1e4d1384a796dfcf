//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {col}: expected {expected}, found {found}")]
    Syntax {
        line: usize,
        col: usize,
        expected: String,
        found: String,
    },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`diff` applied to `{0}`, which is not a declared function")]
    BadArity(String),
    #[error("denominator vanishes at the evaluation point (pivot violation)")]
    DivZero,
    #[error("polynomial contains no derivative")]
    NoDerivative,
    #[error("reduction exceeded the prolongation cap (order {0})")]
    NonTermination(u32),
    #[error("system is inconsistent: a nonzero constant reduced into the equation set")]
    Inconsistent,
    #[error("solution space is not finite-dimensional")]
    Infinite,
    #[error("normal form contains the non-parametric derivative `{0}`; the form is not closed")]
    NotClosed(String),
    #[error("right-hand side for state `{0}` along `{1}` is not linear homogeneous with constant coefficients")]
    NotLinear(String, String),
    #[error("multiplication matrices do not commute (pair {0}, {1})")]
    NotCommuting(usize, usize),
    #[error("QR iteration failed to converge")]
    EigenFail,
    #[error("pivot |{inequation}| = {value:.3e} fell below guard {guard:.1e} at t = {t}")]
    Pivot {
        inequation: String,
        value: f64,
        guard: f64,
        t: f64,
    },
    #[error("constraint projection stalled with |h| = {0:.3e}")]
    ProjectFail(f64),
    #[error("inequation `{0}` vanishes at the evaluation point")]
    PivotAtPoint(String),
    #[error("initial point violates {0}")]
    InconsistentPoint(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
