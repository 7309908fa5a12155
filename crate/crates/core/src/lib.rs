//! Simulation of heat flow between thermal qubits that share classical or
//! quantum correlations.
//!
//! The crate is organised bottom-up:
//!
//! * [`quantum`] holds dense complex matrices, density matrices, partial
//!   traces, Hermitian eigensystems and entropies.
//! * [`thermo`] defines thermal qubits, heat bookkeeping and the
//!   free-energy and Clausius-type inequalities.
//! * [`states`] builds the correlated state families and the polytope of
//!   admissible marginal spectra.
//! * [`dynamics`] evolves states under energy-conserving interactions and
//!   sweeps heat flow over interaction parameters.
//! * [`witness`] turns heat reversals into entanglement certificates and
//!   classifies the range over which the arrow holds.
//! * [`randomwalk`] runs heat-exchange walks on a constant-energy slice.
//! * [`cli`] implements the command-line experiments and their artifacts.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod quantum;
pub mod randomwalk;
pub mod states;
pub mod thermo;
pub mod witness;

pub use error::{Error, Result};
