//! Bordered Floer computations for cable knots.
//!
//! Given a model knot Floer complex over F2[U] for a companion knot and
//! cabling parameters (p, q), this crate builds:
//!
//! * the type-D module of the framed knot complement (from the model complex),
//! * the type-A module of the (p, q) torus pattern in the solid torus, computed
//!   from a genus-1 bordered Heegaard diagram by exact polygon enumeration,
//! * their box tensor product with full grading bookkeeping,
//!
//! and extracts a certified non-thinness witness pair: two homology classes
//! whose bigraded positions violate the single-diagonal constraint that thin
//! complexes must satisfy.
//!
//! Everything is exact: rational plane geometry, F2 linear algebra, and a
//! noncommutative half-integer grading group. No floating point anywhere.

pub mod algebra;
pub mod cache;
pub mod cfd;
pub mod cfk;
pub mod f2;
pub mod halfint;
pub mod laurent;
pub mod pattern;
pub mod svg;
pub mod tensor;
pub mod thinness;

use thiserror::Error;

/// Error type for the whole engine.
///
/// Variants are grouped by who is at fault:
/// * `Parameter` / `Parse` — the caller gave bad input (CLI exit code 2),
/// * `Unsupported` — valid input outside the supported regime (exit code 3),
/// * `Internal` — an invariant the engine itself must maintain failed (exit code 1),
/// * `Io` — filesystem trouble (exit code 1).
#[derive(Debug, Error)]
pub enum CfError {
    /// Invalid user-supplied parameter (bad p/q, malformed complex, ...).
    #[error("{0}")]
    Parameter(String),

    /// Valid input that this engine deliberately does not handle.
    #[error("{0}")]
    Unsupported(String),

    /// Parse error in an input file, with position diagnostics.
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },

    /// An internal invariant failed; this is a bug in the engine.
    #[error("internal error: {0}")]
    Internal(String),

    /// Filesystem / IO failure.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CfError {
    /// Process exit code for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            CfError::Parameter(_) | CfError::Parse { .. } => 2,
            CfError::Unsupported(_) => 3,
            CfError::Internal(_) | CfError::Io(_) => 1,
        }
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, CfError>;
