use thiserror::Error;

use crate::prob::ValidationErrors;
use crate::tradeoff::{RdResult, SolverResult};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Invalid(#[from] ValidationErrors),

    #[error("{what} = {value} is outside its domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("dimension mismatch in {0}")]
    DimensionMismatch(String),

    #[error("infeasible: requested {what} {requested} is below the floor {floor}")]
    Infeasible {
        what: &'static str,
        requested: f64,
        floor: f64,
    },

    #[error("solver did not converge after {iterations} iterations")]
    NotConverged {
        iterations: usize,
        best: Box<SolverResult>,
    },

    #[error("rate-distortion solver did not converge after {iterations} iterations")]
    RdNotConverged {
        iterations: usize,
        best: Box<RdResult>,
    },

    #[error("pair lies outside the parametrized region: {which} argument = {argument}")]
    OutOfRegion { which: &'static str, argument: f64 },

    #[error("no grid point reaches the requested distortion pair")]
    NoFeasiblePoint,

    #[error("intersection not found within tolerance {tol}")]
    NotFound { tol: f64 },

    #[error("codebook needs 2^{bits} codewords; the limit is 2^{limit}")]
    TooLarge { bits: u32, limit: u32 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, domain: &'static str) -> Self {
        Error::Domain {
            what,
            value,
            domain,
        }
    }
}
