//! Error type shared by every module in the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Dimension or length mismatch (state vs. gate, register sizes, ...).
    #[error("size error: {0}")]
    Size(String),

    /// Qubit index out of range, or control/target collision.
    #[error("index error: {0}")]
    Index(String),

    /// A matrix failed the unitarity check.
    #[error("unitarity error: max |U\u{2020}U - I| = {deviation:.3e} exceeds {tolerance:.1e}")]
    NotUnitary { deviation: f64, tolerance: f64 },

    /// A matrix failed the Hermiticity check.
    #[error("symmetry error: max |H - H\u{2020}| = {deviation:.3e} exceeds {tolerance:.1e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    /// The request is valid in general but not supported by this artifact.
    #[error("capability error: {0}")]
    Capability(String),

    /// Invalid argument value.
    #[error("argument error: {0}")]
    Argument(String),

    /// QASM text failed to parse.
    #[error("syntax error at line {line}, column {col}: {msg}")]
    QasmSyntax { line: usize, col: usize, msg: String },

    /// A circuit op cannot be lowered to the QASM emission subset.
    #[error("emission error at op #{index}: {msg}")]
    QasmEmission { index: usize, msg: String },

    /// Config file problems (I/O is reported by the CLI, this is content).
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
