//! Dense linear algebra and quantum-state primitives for a handful of qubits.
//!
//! Computational-basis indices put qubit 0 in the most significant bit.

mod eigen;
mod matrix;
mod pauli;
mod state;

pub use eigen::{
    hermitian_eigensystem, hermitian_eigenvalues, unitary_from_generator, Eigensystem, HermitianOperator, HERMITIAN_TOL,
};
pub use matrix::{tensor_product, tensor_product_all, ComplexMatrix, C64};
pub use pauli::{embed_operator, embed_pauli, pauli_matrix, Pauli};
pub use state::{
    entropy_of_spectrum, partial_trace, permute_qubits, random_density_matrix, random_pure_state, von_neumann_entropy,
    DensityMatrix, PureState, EIGEN_CLAMP_TOL, EIGEN_INVALID_TOL, TRACE_TOL,
};

use crate::error::{Error, Result};

/// Bit value of qubit `site` in basis index `index` of an `n`-qubit register.
#[inline]
pub(crate) fn bit_of(index: usize, site: usize, n: usize) -> usize {
    (index >> (n - 1 - site)) & 1
}

pub(crate) fn check_sites(sites: &[usize], n: usize) -> Result<()> {
    if sites.is_empty() {
        return Err(Error::InvalidSubsystems("empty subsystem set".into()));
    }
    for (i, &s) in sites.iter().enumerate() {
        if s >= n {
            return Err(Error::InvalidSubsystems(format!("qubit {s} out of range for {n} qubits")));
        }
        if sites[..i].contains(&s) {
            return Err(Error::InvalidSubsystems(format!("qubit {s} listed twice")));
        }
    }
    Ok(())
}

pub(crate) fn qubits_for_dim(dim: usize) -> Option<usize> {
    (dim.is_power_of_two() && dim >= 2).then(|| dim.trailing_zeros() as usize)
}
