use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::triples::Triple;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid prime set: {0}")]
    InvalidPrimeSet(String),
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(u32),
    #[error("{multiplier} is not a unit modulo {modulus}")]
    NotAUnit { multiplier: u32, modulus: u32 },
    #[error("precondition violated: member {member} of {triple} has a prime outside the given set")]
    UncoveredMember { member: u64, triple: Triple },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("certificate rejected: {0}")]
    Verification(#[from] crate::coloring::VerifyError),
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
    #[error("malformed CNF: {0}")]
    Cnf(String),
    #[error("model violates clause {index}: {clause:?}")]
    NotAModel { index: usize, clause: Vec<i64> },
    #[error("node budget of {budget} exhausted at M = {at}")]
    BudgetExceeded { budget: u64, at: u64 },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
