use nalgebra::{DMatrix, SymmetricEigen};

use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Entrywise tolerance on `M - M^dagger` accepted by [`HermitianOperator::new`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// A square matrix known to be Hermitian.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator(ComplexMatrix);

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "Hermitian operator must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let defect = matrix.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self(matrix))
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        Self(ComplexMatrix::from_diag(diag))
    }

    /// Caller guarantees hermiticity (e.g. real combinations of Hermitian
    /// operators).
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        debug_assert!(matrix.hermiticity_defect() <= 1e-9);
        Self(matrix)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// Real linear combination `sum_k c_k H_k`; every term must share a dimension.
    pub fn linear_combination(terms: &[(f64, &HermitianOperator)]) -> Result<Self> {
        let dim = terms.first().map(|(_, h)| h.dim()).unwrap_or(0);
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for (c, h) in terms {
            if h.dim() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "cannot combine {dim}-dimensional and {}-dimensional operators",
                    h.dim()
                )));
            }
            acc = &acc + &h.0.scale(C64::new(*c, 0.0));
        }
        Ok(Self(acc))
    }
}

/// Eigenvalues in ascending order with eigenvectors stored as the matching
/// columns of a unitary matrix.
#[derive(Clone, Debug)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigensystem {
    /// `V f(diag(w)) V^dagger` for a scalar function applied to the spectrum.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        self.map_indexed(|_, w| f(w))
    }

    /// Like [`Eigensystem::map_spectrum`], also passing the eigenvalue's index.
    pub fn map_indexed(&self, f: impl Fn(usize, f64) -> C64) -> ComplexMatrix {
        let n = self.values.len();
        let fw: Vec<C64> = self.values.iter().enumerate().map(|(k, &w)| f(k, w)).collect();
        let v = &self.vectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for (k, fk) in fw.iter().enumerate() {
                    acc += v.get(r, k) * fk * v.get(c, k).conj();
                }
                out.set(r, c, acc);
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|w| C64::new(w, 0.0))
    }
}

pub fn hermitian_eigensystem(h: &HermitianOperator) -> Eigensystem {
    let n = h.dim();
    let m = DMatrix::<C64>::from_row_slice(n, n, h.matrix().as_slice());
    let eig = SymmetricEigen::new(m);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        for r in 0..n {
            vectors.set(r, col, eig.eigenvectors[(r, k)]);
        }
    }
    Eigensystem { values, vectors }
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(h: &HermitianOperator) -> Vec<f64> {
    let n = h.dim();
    let m = DMatrix::<C64>::from_row_slice(n, n, h.matrix().as_slice());
    let mut w: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    w.sort_by(f64::total_cmp);
    w
}

/// `exp(-i * angle * g)` via the spectral decomposition of `g`.
pub fn unitary_from_generator(g: &HermitianOperator, angle: f64) -> ComplexMatrix {
    hermitian_eigensystem(g).map_spectrum(|w| C64::from_polar(1.0, -angle * w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::pauli::{pauli_matrix, Pauli};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    #[test]
    fn z_spectrum() {
        let es = hermitian_eigensystem(&HermitianOperator::from_diag(&[1.0, -1.0]));
        assert_eq!(es.values, vec![-1.0, 1.0]);
    }

    #[test]
    fn x_spectrum_and_vectors() {
        let x = HermitianOperator::new(pauli_matrix(Pauli::X)).unwrap();
        let es = hermitian_eigensystem(&x);
        assert!((es.values[0] + 1.0).abs() < 1e-14);
        assert!((es.values[1] - 1.0).abs() < 1e-14);
        // columns equal (|0> -/+ |1>)/sqrt2 up to a global phase
        let minus = [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(-FRAC_1_SQRT_2, 0.0)];
        let plus = [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(FRAC_1_SQRT_2, 0.0)];
        for (col, expect) in [(0, minus), (1, plus)] {
            let overlap: C64 = (0..2).map(|r| expect[r].conj() * es.vectors.get(r, col)).sum();
            assert!((overlap.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(HermitianOperator::new(m), Err(Error::NotHermitian(_))));
        assert!(HermitianOperator::new(ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn zero_angle_is_identity() {
        let x = HermitianOperator::new(pauli_matrix(Pauli::Y)).unwrap();
        let u = unitary_from_generator(&x, 0.0);
        assert!(u.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-14);
    }

    #[test]
    fn diagonal_generator_phases() {
        let u = unitary_from_generator(&HermitianOperator::from_diag(&[1.0, -1.0]), FRAC_PI_2);
        let expect = ComplexMatrix::new(
            2,
            2,
            vec![C64::new(0.0, -1.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 1.0)],
        )
        .unwrap();
        assert!(u.max_abs_diff(&expect) < 1e-14);
    }
}
