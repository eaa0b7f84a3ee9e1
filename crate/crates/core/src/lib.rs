//! Statevector simulation and an ancilla-purified variational eigensolver.
//!
//! The library determines the `K` lowest eigenpairs of a spin Hamiltonian in a
//! single parameterized circuit: the physical register is maximally entangled
//! with a small ancilla register, so `K` orthogonal trial states are trained
//! at once through one loss function. After optimization, all matrix elements
//! of the Hamiltonian in the trial basis are recovered from ancilla-Pauli
//! expectation values and a small Hermitian eigenproblem yields the eigenpairs.
//!
//! Modules:
//! - [`pauli`]: Pauli-string algebra, transverse-field Ising Hamiltonians,
//!   dense realization for small systems.
//! - [`statevector`]: dense amplitude simulation with strided gate kernels.
//! - [`ansatz`]: purified initial state and the layered brick-wall circuit.
//! - [`exact`]: dense exact-diagonalization oracle and the overlap-rank
//!   diagnostic for reachable eigenstates.
//! - [`vqe`]: loss, parameter-shift and adjoint gradients, optimizers with
//!   random restarts.
//! - [`subspace`]: subspace-matrix reconstruction from ancilla measurements,
//!   eigenpair extraction, thermal averages.

pub mod ansatz;
pub mod exact;
pub mod linalg;
pub mod pauli;
pub mod statevector;
pub mod subspace;
pub mod vqe;

/// Errors surfaced by simulator and eigensolver operations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("internal consistency violation: {0}")]
    Consistency(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("optimization failed: {0}")]
    Optimization(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
