use core::fmt;

use crate::linprog::LpError;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Shapes of the supplied arrays do not agree.
    DimensionMismatch(&'static str),
    NonFiniteEntry { action: usize, from: usize, to: usize },
    NegativeEntry { action: usize, from: usize, to: usize },
    RowSumViolation { action: usize, state: usize, actual_sum: f64 },
    /// Discount factor outside `[0, 1)`.
    InvalidDiscount(f64),
    InvalidAction { action: usize, k: usize },
    InvalidParameter(&'static str),
    SingularSystem,
    NonConvergence { iterations: usize },
    /// A feature row is (numerically) zero, so actions `a` and `a1` are
    /// indistinguishable at state `i`.
    ZeroFeatureRow { action: usize, state: usize },
    /// The hard-margin problem has no feasible reward.
    InfeasibleProblem,
    GenerationExhausted { attempts: usize },
    Lp(LpError),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch(what) => write!(f, "dimension mismatch: {what}"),
            Error::NonFiniteEntry { action, from, to } => {
                write!(f, "non-finite transition entry P[{action}][{from}][{to}]")
            }
            Error::NegativeEntry { action, from, to } => {
                write!(f, "negative transition entry P[{action}][{from}][{to}]")
            }
            Error::RowSumViolation { action, state, actual_sum } => write!(
                f,
                "row {state} of action {action} sums to {actual_sum}, expected 1"
            ),
            Error::InvalidDiscount(g) => write!(f, "discount {g} is outside [0, 1)"),
            Error::InvalidAction { action, k } => {
                write!(f, "action index {action} out of range for {k} actions")
            }
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::SingularSystem => write!(f, "singular linear system"),
            Error::NonConvergence { iterations } => {
                write!(f, "value iteration did not converge in {iterations} iterations")
            }
            Error::ZeroFeatureRow { action, state } => {
                write!(f, "feature row (a={action}, i={state}) is zero")
            }
            Error::InfeasibleProblem => write!(f, "infeasible: no reward satisfies the unit margin"),
            Error::GenerationExhausted { attempts } => {
                write!(f, "no separable instance found after {attempts} attempts")
            }
            Error::Lp(e) => write!(f, "linear program: {e}"),
        }
    }
}

impl core::error::Error for Error {}

impl From<LpError> for Error {
    fn from(e: LpError) -> Self {
        Error::Lp(e)
    }
}
