use thiserror::Error;

/// Errors raised by the numerical kernel and the quantum-object constructors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: max |m - m^dagger| = {0:.3e}")]
    NotHermitian(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("dimension {dim} exceeds the eigensolver cap {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },

    #[error("non-finite entry at index {0}")]
    NonFinite(usize),

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("function undefined at eigenvalue {0}")]
    Domain(f64),

    #[error("operator is not positive semidefinite: min eigenvalue {0:.3e}")]
    NotPsd(f64),

    #[error("trace is {0}, expected 1")]
    TraceNotOne(f64),

    #[error("state vector norm is {0}, expected 1")]
    NotNormalized(f64),

    #[error("rank {rank} out of range 1..={dim}")]
    RankOutOfRange { rank: usize, dim: usize },

    #[error("not trace preserving: Σ K†K deviates by {0:.3e} from the identity")]
    NotTracePreserving(f64),

    #[error("not completely positive: Choi matrix has negative eigenvalue {0:.3e}")]
    NotCp(f64),

    #[error("invalid Kraus count {count}, allowed 1..={max}")]
    KrausCount { count: usize, max: usize },

    #[error("energy {energy} outside the open spectral span ({min}, {max})")]
    EnergyOutOfRange { energy: f64, min: f64, max: f64 },

    #[error("Hamiltonian is proportional to the identity (all energies equal {0})")]
    DegenerateHamiltonian(f64),

    #[error("optimization budget exhausted, best value {best}")]
    BudgetExhausted { best: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
