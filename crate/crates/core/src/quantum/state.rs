use super::eigen::{hermitian_eigenvalues, HermitianOperator, HERMITIAN_TOL};
use super::matrix::{ComplexMatrix, C64};
use super::{bit_of, check_sites, qubits_for_dim};
use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;

pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues down to `-EIGEN_CLAMP_TOL` are treated as numerical zeros.
pub const EIGEN_CLAMP_TOL: f64 = 1e-10;
/// Eigenvalues below `-EIGEN_INVALID_TOL` mark a state as unphysical.
pub const EIGEN_INVALID_TOL: f64 = 1e-8;

const NORM_TOL: f64 = 1e-12;

/// Normalised state vector of `num_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
    num_qubits: usize,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let num_qubits = qubits_for_dim(amplitudes.len())
            .ok_or_else(|| Error::state(format!("length {} is not a power of two >= 2", amplitudes.len())))?;
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::state(format!("norm {norm} differs from 1")));
        }
        Ok(Self { amplitudes, num_qubits })
    }

    /// Rescales to unit norm before validating.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::state("cannot normalise a zero or non-finite vector"));
        }
        Self::new(amplitudes.into_iter().map(|z| z / norm).collect())
    }

    /// Computational basis state `|index>`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << num_qubits;
        if num_qubits == 0 || index >= dim {
            return Err(Error::param(format!("basis index {index} invalid for {num_qubits} qubits")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Self::new(amps)
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_trusted(ComplexMatrix::outer(&self.amplitudes, &self.amplitudes), self.num_qubits)
    }
}

/// Unit-trace positive semidefinite Hermitian matrix on `num_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    num_qubits: usize,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::state(format!("{}x{} matrix is not square", matrix.rows(), matrix.cols())));
        }
        let num_qubits = qubits_for_dim(matrix.rows())
            .ok_or_else(|| Error::state(format!("dimension {} is not 2^n", matrix.rows())))?;
        let defect = matrix.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::state(format!("not Hermitian (deviation {defect:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::state(format!("trace {tr} differs from 1")));
        }
        let rho = Self { matrix, num_qubits };
        let min = rho.spectrum()[0];
        if min < -EIGEN_CLAMP_TOL {
            return Err(Error::state(format!("negative eigenvalue {min:e}")));
        }
        Ok(rho)
    }

    pub fn from_diag(probabilities: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_diag(probabilities))
    }

    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        Self::from_trusted(ComplexMatrix::from_diag(&vec![1.0 / dim as f64; dim]), num_qubits)
    }

    /// Skips validation; callers guarantee the invariants (e.g. unitary
    /// conjugation or tensor products of valid states).
    pub(crate) fn from_trusted(matrix: ComplexMatrix, num_qubits: usize) -> Self {
        debug_assert_eq!(matrix.rows(), 1 << num_qubits);
        Self { matrix, num_qubits }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn as_operator(&self) -> HermitianOperator {
        HermitianOperator::from_matrix_unchecked(self.matrix.clone())
    }

    /// Eigenvalues in ascending order, unclamped.
    pub fn spectrum(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.as_operator())
    }

    /// Populations `<i|rho|i>` of the computational basis.
    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self::from_trusted(
            super::matrix::tensor_product(&self.matrix, &other.matrix),
            self.num_qubits + other.num_qubits,
        )
    }

    /// `U rho U^dagger`, re-symmetrised to remove rounding asymmetry.
    pub fn evolve(&self, unitary: &ComplexMatrix) -> Result<DensityMatrix> {
        if unitary.rows() != self.dim() || unitary.cols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} unitary on a {}-dimensional state",
                unitary.rows(),
                unitary.cols(),
                self.dim()
            )));
        }
        let out = self.matrix.conjugate_by(unitary)?;
        let sym = (&out + &out.dagger()).scale(C64::new(0.5, 0.0));
        Ok(Self::from_trusted(sym, self.num_qubits))
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.matrix.max_abs_diff(&other.matrix)
    }
}

/// Reduced state on the qubits in `keep`, listed in ascending qubit order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.num_qubits;
    check_sites(keep, n)?;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    let traced: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();

    // contribution of each sub-register value to the full basis index
    let spread = |sites: &[usize]| -> Vec<usize> {
        (0..1usize << sites.len())
            .map(|v| {
                sites.iter().enumerate().fold(0usize, |acc, (pos, &q)| {
                    let bit = (v >> (sites.len() - 1 - pos)) & 1;
                    acc | (bit << (n - 1 - q))
                })
            })
            .collect()
    };
    let kept_idx = spread(&kept);
    let traced_idx = spread(&traced);

    let k = kept_idx.len();
    let mut out = ComplexMatrix::zeros(k, k);
    for (r, &kr) in kept_idx.iter().enumerate() {
        for (c, &kc) in kept_idx.iter().enumerate() {
            let acc: C64 = traced_idx.iter().map(|&t| rho.matrix.get(kr | t, kc | t)).sum();
            out.set(r, c, acc);
        }
    }
    Ok(DensityMatrix::from_trusted(out, kept.len()))
}

/// Relabel qubits: qubit `q` of the result is qubit `order[q]` of `rho`.
pub fn permute_qubits(rho: &DensityMatrix, order: &[usize]) -> Result<DensityMatrix> {
    let n = rho.num_qubits;
    check_sites(order, n)?;
    if order.len() != n {
        return Err(Error::InvalidSubsystems(format!("permutation of length {} for {n} qubits", order.len())));
    }
    let dim = rho.dim();
    let map: Vec<usize> =
        (0..dim).map(|old| (0..n).fold(0usize, |acc, q| (acc << 1) | bit_of(old, order[q], n))).collect();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            out.set(map[r], map[c], rho.matrix.get(r, c));
        }
    }
    Ok(DensityMatrix::from_trusted(out, n))
}

/// `-sum p ln p` over a spectrum, with `0 ln 0 = 0` and tiny negatives clamped.
pub fn entropy_of_spectrum(spectrum: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &p in spectrum {
        if p < -EIGEN_INVALID_TOL {
            return Err(Error::state(format!("eigenvalue {p:e} is negative")));
        }
        if p > 0.0 {
            s -= p * p.ln();
        }
    }
    Ok(s.max(0.0))
}

/// Von Neumann entropy in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    entropy_of_spectrum(&rho.spectrum())
}

fn gaussian_vector(len: usize, rng: &mut impl Rng) -> Vec<C64> {
    (0..len).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect()
}

/// Pure state drawn from the unitarily invariant distribution.
pub fn random_pure_state(num_qubits: usize, rng: &mut impl Rng) -> PureState {
    loop {
        if let Ok(psi) = PureState::normalized(gaussian_vector(1 << num_qubits, rng)) {
            return psi;
        }
    }
}

/// `G G^dagger / Tr[G G^dagger]` for a complex Gaussian `G` (full-rank
/// Hilbert-Schmidt ensemble).
pub fn random_density_matrix(num_qubits: usize, rng: &mut impl Rng) -> DensityMatrix {
    let dim = 1usize << num_qubits;
    let g = ComplexMatrix::new(dim, dim, gaussian_vector(dim * dim, rng)).expect("square");
    let gg = &g * &g.dagger();
    let tr = gg.trace().re;
    let mut m = gg.scale(C64::new(1.0 / tr, 0.0));
    // exact hermiticity
    for r in 0..dim {
        for c in r..dim {
            let z = 0.5 * (m.get(r, c) + m.get(c, r).conj());
            m.set(r, c, z);
            m.set(c, r, z.conj());
        }
    }
    DensityMatrix::new(m).expect("G G^dagger is positive")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

    fn bell() -> DensityMatrix {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let z = C64::new(0.0, 0.0);
        PureState::new(vec![h, z, z, h]).unwrap().density()
    }

    #[test]
    fn bell_reduces_to_maximally_mixed() {
        let r = partial_trace(&bell(), &[0]).unwrap();
        assert!(r.max_abs_diff(&DensityMatrix::maximally_mixed(1)) < 1e-15);
    }

    #[test]
    fn product_reduces_to_factor() {
        let a = DensityMatrix::from_diag(&[0.3, 0.7]).unwrap();
        let b = DensityMatrix::from_diag(&[0.9, 0.1]).unwrap();
        let ab = a.tensor(&b);
        assert!(partial_trace(&ab, &[0]).unwrap().max_abs_diff(&a) < 1e-15);
        assert!(partial_trace(&ab, &[1]).unwrap().max_abs_diff(&b) < 1e-15);
    }

    #[test]
    fn keep_set_errors() {
        let rho = DensityMatrix::maximally_mixed(2);
        assert!(partial_trace(&rho, &[]).is_err());
        assert!(partial_trace(&rho, &[2]).is_err());
        assert!(partial_trace(&rho, &[1, 1]).is_err());
    }

    #[test]
    fn entropy_examples() {
        let pure = PureState::basis(2, 3).unwrap().density();
        assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(1);
        assert!((von_neumann_entropy(&mixed).unwrap() - LN_2).abs() < 1e-14);
        // -0.25 ln 0.25 - 0.75 ln 0.75, evaluated independently
        let expect = 0.562_335_144_618_808_3;
        let rho = DensityMatrix::from_diag(&[0.25, 0.75]).unwrap();
        assert!((von_neumann_entropy(&rho).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn entropy_rejects_clearly_negative_spectrum() {
        assert!(entropy_of_spectrum(&[1.0 + 1e-6, -1e-6]).is_err());
        assert!(entropy_of_spectrum(&[1.0, -1e-11]).is_ok());
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::from_diag(&[0.5, 0.6]).is_err());
        assert!(DensityMatrix::from_diag(&[1.2, -0.2]).is_err());
        assert!(DensityMatrix::from_diag(&[0.2, 0.3, 0.5]).is_err());
        assert!(DensityMatrix::from_diag(&[0.2, 0.3, 0.4, 0.1]).is_ok());
    }

    #[test]
    fn pure_state_validation() {
        assert!(PureState::new(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).is_err());
        assert!(PureState::normalized(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).is_ok());
        assert!(PureState::new(vec![C64::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn permutation_moves_factors() {
        let a = DensityMatrix::from_diag(&[0.1, 0.9]).unwrap();
        let b = DensityMatrix::from_diag(&[0.2, 0.8]).unwrap();
        let c = DensityMatrix::from_diag(&[0.3, 0.7]).unwrap();
        let acb = a.tensor(&c).tensor(&b);
        let abc = permute_qubits(&acb, &[0, 2, 1]).unwrap();
        assert!(abc.max_abs_diff(&a.tensor(&b).tensor(&c)) < 1e-15);
    }
}
