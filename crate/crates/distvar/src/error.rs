//! Error type shared by every numerical routine in the crate.

use thiserror::Error;

/// Failure modes of the linear-algebra kernel and the variety computations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    #[error("iteration did not converge for dimension {dim} within {iterations} steps")]
    NonConvergence { dim: usize, iterations: usize },

    #[error("matrices do not commute: commutator norm {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotCommuting { defect: f64, tol: f64 },

    #[error("joint triangularization failed after {retries} randomized retries and deterministic fallback")]
    RetriesExhausted { retries: usize },

    #[error("projection has trivial range")]
    EmptyRange,

    #[error("resolvent is singular at the requested point")]
    SingularResolvent,

    #[error("matrix is not unitary: defect {defect:.3e}")]
    NotUnitary { defect: f64 },

    #[error("numerical rank is unstable across thresholds: rank {rank_low} at {tol_low:.1e} vs rank {rank_high} at {tol_high:.1e}")]
    RankDeficiencyUnstable {
        rank_low: usize,
        tol_low: f64,
        rank_high: usize,
        tol_high: f64,
    },

    #[error("orthocomplement defect mismatch: domain {domain} vs range {range}")]
    DefectMismatch { domain: usize, range: usize },

    #[error("polynomial deflation is ambiguous: residual {residual:.3e} sits between {tol:.3e} and {hard:.3e}")]
    DeflationAmbiguous { residual: f64, tol: f64, hard: f64 },

    #[error("state operator has an eigenvalue of modulus {modulus:.12} on the unit circle")]
    UnimodularEigenvalue { modulus: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
