use super::eigen::HermitianOperator;
use super::matrix::{tensor_product_all, ComplexMatrix, C64};
use super::{bit_of, check_sites};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

pub fn pauli_matrix(axis: Pauli) -> ComplexMatrix {
    let (o, l, i) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0));
    let data = match axis {
        Pauli::X => vec![o, l, l, o],
        Pauli::Y => vec![o, -i, i, o],
        Pauli::Z => vec![l, o, o, -l],
    };
    ComplexMatrix::new(2, 2, data).expect("2x2 Pauli")
}

/// `I ⊗ … ⊗ σ ⊗ … ⊗ I` with the Pauli at `site` (qubit 0 leftmost).
pub fn embed_pauli(axis: Pauli, site: usize, n: usize) -> Result<HermitianOperator> {
    if site >= n {
        return Err(Error::InvalidSubsystems(format!("site {site} out of range for {n} qubits")));
    }
    let id = ComplexMatrix::identity(2);
    let sigma = pauli_matrix(axis);
    let factors: Vec<&ComplexMatrix> = (0..n).map(|q| if q == site { &sigma } else { &id }).collect();
    Ok(HermitianOperator::from_matrix_unchecked(tensor_product_all(factors)))
}

/// Lift an operator acting on `sites.len()` qubits (ordered as listed in
/// `sites`) to the full `n`-qubit space, acting as identity elsewhere.
pub fn embed_operator(op: &ComplexMatrix, sites: &[usize], n: usize) -> Result<ComplexMatrix> {
    check_sites(sites, n)?;
    let k = sites.len();
    if op.rows() != 1 << k || op.cols() != 1 << k {
        return Err(Error::DimensionMismatch(format!(
            "operator of size {}x{} cannot act on {k} qubits",
            op.rows(),
            op.cols()
        )));
    }
    let dim = 1usize << n;
    let sub_index = |full: usize| sites.iter().fold(0usize, |acc, &s| (acc << 1) | bit_of(full, s, n));
    let mut rest_mask = dim - 1;
    for &s in sites {
        rest_mask &= !(1usize << (n - 1 - s));
    }
    let mut out = ComplexMatrix::zeros(dim, dim);
    for r in 0..dim {
        let rs = sub_index(r);
        for c in 0..dim {
            if r & rest_mask != c & rest_mask {
                continue;
            }
            out.set(r, c, op.get(rs, sub_index(c)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::matrix::tensor_product;

    #[test]
    fn single_site_z() {
        assert_eq!(embed_pauli(Pauli::Z, 0, 1).unwrap().matrix(), &pauli_matrix(Pauli::Z));
    }

    #[test]
    fn x_on_second_of_two() {
        let expect = tensor_product(&ComplexMatrix::identity(2), &pauli_matrix(Pauli::X));
        assert_eq!(embed_pauli(Pauli::X, 1, 2).unwrap().matrix(), &expect);
    }

    #[test]
    fn y_squares_to_identity() {
        let y = embed_pauli(Pauli::Y, 2, 3).unwrap();
        let sq = y.matrix() * y.matrix();
        assert!(sq.max_abs_diff(&ComplexMatrix::identity(8)) < 1e-15);
    }

    #[test]
    fn site_out_of_range() {
        assert!(embed_pauli(Pauli::X, 3, 3).is_err());
    }

    #[test]
    fn embed_operator_matches_kron_and_reorders() {
        let x = pauli_matrix(Pauli::X);
        let z = pauli_matrix(Pauli::Z);
        let xz = tensor_product(&x, &z);
        // sites listed in order: same as X ⊗ I ⊗ Z
        let direct = tensor_product_all([&x, &ComplexMatrix::identity(2), &z]);
        assert_eq!(embed_operator(&xz, &[0, 2], 3).unwrap(), direct);
        // reversed site list puts X on qubit 2 and Z on qubit 0
        let swapped = tensor_product_all([&z, &ComplexMatrix::identity(2), &x]);
        assert_eq!(embed_operator(&xz, &[2, 0], 3).unwrap(), swapped);
    }
}
