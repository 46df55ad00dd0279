use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid system configuration: {0}")]
    Config(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("probability out of range at (file {file}, user {user}): {value}")]
    ProbabilityRange {
        file: usize,
        user: usize,
        value: f64,
    },

    #[error("probabilities for user {user} sum to {sum}, expected 1")]
    RowSum { user: usize, sum: f64 },

    #[error("M·p exceeds 1 at ({file},{user}): {value}")]
    CacheMass {
        file: usize,
        user: usize,
        value: f64,
    },

    #[error("infeasible cache budget for user {user}, file {file}: {count} packets requested, only {available} exist")]
    InfeasibleBudget {
        user: usize,
        file: usize,
        count: usize,
        available: usize,
    },

    #[error("{what} exceeds the size cap ({detail})")]
    SizeCap { what: &'static str, detail: String },

    #[error("decoding failed for user {user} at color {color}: {detail}")]
    Decode {
        user: usize,
        color: usize,
        detail: String,
    },

    #[error("payload length mismatch for packet {packet}: expected {expected} bytes, got {got}")]
    PayloadLength {
        packet: String,
        expected: usize,
        got: usize,
    },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}
