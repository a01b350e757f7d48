//! Finite-dimensional quantum channel entropy and maximum-entropy checks.
//!
//! The crate covers the whole pipeline from dense complex linear algebra up
//! to the channel maximum-entropy principle: among channels whose maximal
//! output mean energy is `E`, the channel entropy peaks at the absolutely
//! thermalizing channel (the replacer onto the Gibbs state of energy `E`).
//!
//! - [`densemath`]: Jacobi Hermitian eigensolver, matrix functions, Kronecker
//!   products and partial traces.
//! - [`states`]: density matrices, pure and bipartite states, seeded sampling.
//! - [`channels`]: Kraus and Choi representations and channel constructors.
//! - [`entropy`]: von Neumann, relative and conditional entropies.
//! - [`thermo`]: Hamiltonians, Gibbs states, `beta(E)`, channel mean energy.
//! - [`maxent`]: channel entropy certificates and verification runs.
//! - [`io`]: JSON file formats.
//!
//! Entropies are in nats. Bipartite operators put the reference `R` (or the
//! first named system) on the slower, left tensor factor.

pub mod channels;
pub mod densemath;
pub mod entropy;
pub mod error;
pub mod io;
pub mod maxent;
pub mod search;
pub mod states;
pub mod thermo;

pub use channels::{ChoiOperator, KrausChannel, UniformMixingMap};
pub use densemath::{ComplexMatrix, HermitianEig, Subsystem};
pub use entropy::{EntropyValue, RelEntValue, Units};
pub use error::{Error, Result};
pub use maxent::{EntropyCertificate, TheoremVerdict};
pub use states::{BipartiteState, DensityMatrix, PureState};
pub use thermo::{Hamiltonian, ThermalSpec};
