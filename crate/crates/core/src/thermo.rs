//! Thermal qubits, energy and heat bookkeeping, and the entropy
//! inequalities that constrain heat flow.
//!
//! Every qubit carries the local Hamiltonian `H = diag(1, 0)` in the
//! computational basis: `|0>` is the excited level with energy one and `|1>`
//! the ground level. With this convention the mean energy of a thermal qubit
//! equals its excited population `lambda`, and the total energy of a set of
//! thermal marginals is `sum_i lambda_i`. Entropies are in nats and `k = 1`.

use crate::error::{Error, Result};
use crate::quantum::{
    embed_pauli, hermitian_eigensystem, partial_trace, von_neumann_entropy, ComplexMatrix, DensityMatrix,
    HermitianOperator, Pauli, C64,
};

/// Tolerance accepted when reading an excited population as `lambda <= 1/2`.
pub const LAMBDA_TOL: f64 = 1e-12;
/// Entrywise tolerance for "this state is the Gibbs state".
pub const THERMAL_TOL: f64 = 1e-9;
/// Mutual-information values in `[-MI_CLAMP, 0)` are reported as zero.
pub const MI_CLAMP: f64 = 1e-9;

/// `diag(1, 0)`.
pub fn qubit_hamiltonian() -> HermitianOperator {
    HermitianOperator::from_diag(&[1.0, 0.0])
}

/// Local Hamiltonian of `site` embedded in `n` qubits, `(I + Z_site) / 2`.
pub fn site_hamiltonian(site: usize, n: usize) -> Result<HermitianOperator> {
    let z = embed_pauli(Pauli::Z, site, n)?;
    let id = ComplexMatrix::identity(1 << n);
    let m = (&id + z.matrix()).scale(C64::new(0.5, 0.0));
    HermitianOperator::new(m)
}

/// Number of excited qubits (zero bits) in basis index `index`.
pub fn excitation_count(index: usize, n: usize) -> usize {
    n - (index & ((1usize << n) - 1)).count_ones() as usize
}

/// `H_tot = sum_i H_i`, diagonal with the excitation count of each basis state.
pub fn total_hamiltonian(n: usize) -> HermitianOperator {
    let diag: Vec<f64> = (0..1usize << n).map(|i| excitation_count(i, n) as f64).collect();
    HermitianOperator::from_diag(&diag)
}

/// One qubit's thermal description. `lambda` is the excited population,
/// `beta = ln((1 - lambda) / lambda)` and `temperature = 1 / beta`, with the
/// endpoints `lambda = 0 <-> beta = inf <-> T = 0` and
/// `lambda = 1/2 <-> beta = 0 <-> T = inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermalSpec {
    lambda: f64,
    beta: f64,
    temperature: f64,
}

impl ThermalSpec {
    pub fn from_lambda(lambda: f64) -> Result<Self> {
        if !(-LAMBDA_TOL..=0.5 + LAMBDA_TOL).contains(&lambda) {
            return Err(Error::param(format!(
                "excited population {lambda} outside [0, 1/2] (negative temperatures are not modelled)"
            )));
        }
        let lambda = lambda.clamp(0.0, 0.5);
        let beta = if lambda == 0.0 {
            f64::INFINITY
        } else if lambda == 0.5 {
            0.0
        } else {
            ((1.0 - lambda) / lambda).ln()
        };
        Ok(Self { lambda, beta, temperature: beta_to_temperature(beta) })
    }

    pub fn from_beta(beta: f64) -> Result<Self> {
        if beta.is_nan() || beta < 0.0 {
            return Err(Error::param(format!("inverse temperature {beta} must be >= 0")));
        }
        let lambda = if beta.is_infinite() { 0.0 } else { 1.0 / (1.0 + beta.exp()) };
        Ok(Self { lambda, beta, temperature: beta_to_temperature(beta) })
    }

    pub fn from_temperature(temperature: f64) -> Result<Self> {
        if temperature.is_nan() || temperature < 0.0 {
            return Err(Error::param(format!("temperature {temperature} must be >= 0")));
        }
        Self::from_beta(if temperature == 0.0 { f64::INFINITY } else { 1.0 / temperature })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }
}

fn beta_to_temperature(beta: f64) -> f64 {
    if beta == 0.0 {
        f64::INFINITY
    } else if beta.is_infinite() {
        0.0
    } else {
        1.0 / beta
    }
}

pub fn spec_from_lambda(lambda: f64) -> Result<ThermalSpec> {
    ThermalSpec::from_lambda(lambda)
}

pub fn spec_from_beta(beta: f64) -> Result<ThermalSpec> {
    ThermalSpec::from_beta(beta)
}

/// `diag(lambda, 1 - lambda)`.
pub fn thermal_qubit(spec: &ThermalSpec) -> DensityMatrix {
    DensityMatrix::from_diag(&[spec.lambda, 1.0 - spec.lambda]).expect("thermal qubit is a valid state")
}

/// `rho(lambda_0) ⊗ rho(lambda_1) ⊗ …`.
pub fn product_thermal_state(lambdas: &[f64]) -> Result<DensityMatrix> {
    let mut iter = lambdas.iter();
    let first = iter.next().ok_or_else(|| Error::param("no subsystems given"))?;
    let mut rho = thermal_qubit(&ThermalSpec::from_lambda(*first)?);
    for &l in iter {
        rho = rho.tensor(&thermal_qubit(&ThermalSpec::from_lambda(l)?));
    }
    Ok(rho)
}

/// `Tr[H rho]`.
pub fn mean_energy(rho: &DensityMatrix, h: &HermitianOperator) -> Result<f64> {
    if h.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}-dimensional Hamiltonian for a {}-dimensional state",
            h.dim(),
            rho.dim()
        )));
    }
    let hm = h.matrix();
    let m = rho.matrix();
    let n = rho.dim();
    let mut tr = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            tr += hm.get(i, k) * m.get(k, i);
        }
    }
    Ok(tr.re)
}

/// Mean local energy `Tr[H_i rho_i]` of every qubit, i.e. its excited population.
pub fn local_energies(rho: &DensityMatrix) -> Vec<f64> {
    let n = rho.num_qubits();
    let pops = rho.populations();
    (0..n)
        .map(|q| pops.iter().enumerate().filter(|(idx, _)| (idx >> (n - 1 - q)) & 1 == 0).map(|(_, p)| p).sum())
        .collect()
}

/// `S_A + S_B - S_AB` for the reduced state on `part_a ∪ part_b`.
///
/// The two parts must be disjoint and together cover every qubit of `rho`.
pub fn mutual_information(rho: &DensityMatrix, part_a: &[usize], part_b: &[usize]) -> Result<f64> {
    let n = rho.num_qubits();
    let mut all: Vec<usize> = part_a.iter().chain(part_b).copied().collect();
    all.sort_unstable();
    if part_a.is_empty() || part_b.is_empty() || all != (0..n).collect::<Vec<_>>() {
        return Err(Error::InvalidSubsystems(format!("{part_a:?} | {part_b:?} is not a bipartition of {n} qubits")));
    }
    let s_a = von_neumann_entropy(&partial_trace(rho, part_a)?)?;
    let s_b = von_neumann_entropy(&partial_trace(rho, part_b)?)?;
    let s_ab = von_neumann_entropy(rho)?;
    let mi = s_a + s_b - s_ab;
    Ok(if (-MI_CLAMP..0.0).contains(&mi) { 0.0 } else { mi })
}

/// Mutual information between `part_a` and the remaining qubits.
pub fn bipartite_mutual_information(rho: &DensityMatrix, part_a: &[usize]) -> Result<f64> {
    let rest: Vec<usize> = (0..rho.num_qubits()).filter(|q| !part_a.contains(q)).collect();
    mutual_information(rho, part_a, &rest)
}

/// `exp(-beta H) / Tr[exp(-beta H)]`, with `beta = inf` giving the uniform
/// mixture over the ground space.
pub fn gibbs_state(h: &HermitianOperator, beta: f64) -> Result<DensityMatrix> {
    if beta.is_nan() || beta < 0.0 {
        return Err(Error::param(format!("inverse temperature {beta} must be >= 0")));
    }
    let es = hermitian_eigensystem(h);
    let e0 = es.values[0];
    let weights: Vec<f64> = es
        .values
        .iter()
        .map(|&w| {
            let gap = w - e0;
            if beta.is_infinite() {
                if gap.abs() < 1e-12 {
                    1.0
                } else {
                    0.0
                }
            } else {
                (-beta * gap).exp()
            }
        })
        .collect();
    let z: f64 = weights.iter().sum();
    let m = es.map_indexed(|k, _| C64::new(weights[k] / z, 0.0));
    DensityMatrix::new(m)
}

/// `beta (U_final - U_initial) - (S_final - S_initial)` where the initial
/// state is thermal for `(h, beta)`. The Gibbs state minimises free energy, so
/// the gap is non-negative for any final state.
pub fn free_energy_gap(
    initial_thermal: &DensityMatrix,
    final_state: &DensityMatrix,
    h: &HermitianOperator,
    beta: f64,
) -> Result<f64> {
    if !beta.is_finite() {
        return Err(Error::param("free-energy gap needs a finite inverse temperature"));
    }
    if initial_thermal.dim() != final_state.dim() {
        return Err(Error::DimensionMismatch("initial and final states differ in size".into()));
    }
    let gibbs = gibbs_state(h, beta)?;
    if gibbs.dim() != initial_thermal.dim() {
        return Err(Error::DimensionMismatch("Hamiltonian does not match the state".into()));
    }
    let dev = gibbs.max_abs_diff(initial_thermal);
    if dev > THERMAL_TOL {
        return Err(Error::state(format!("initial state is not thermal (deviation {dev:e})")));
    }
    let du = mean_energy(final_state, h)? - mean_energy(initial_thermal, h)?;
    let ds = von_neumann_entropy(final_state)? - von_neumann_entropy(initial_thermal)?;
    Ok(beta * du - ds)
}

/// Heat and entropy bookkeeping between two states of the same qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct HeatRecord {
    /// Heat `Q_j` gained by each qubit.
    pub heat: Vec<f64>,
    /// Local entropy change of each qubit.
    pub entropy_change: Vec<f64>,
    /// Qubits on the A side of the cut; the rest form B.
    pub cut: Vec<usize>,
    /// Change of `I(A:B)` across the cut.
    pub mutual_information_change: f64,
}

impl HeatRecord {
    pub fn total_heat(&self) -> f64 {
        self.heat.iter().sum()
    }

    /// `(Q_A, Q_B)` summed over each side of the cut.
    pub fn side_heats(&self) -> (f64, f64) {
        self.heat.iter().enumerate().fold(
            (0.0, 0.0),
            |(a, b), (q, h)| {
                if self.cut.contains(&q) {
                    (a + h, b)
                } else {
                    (a, b + h)
                }
            },
        )
    }
}

/// `beta * q` with `0 * inf = 0`.
pub fn weighted_heat(beta: f64, q: f64) -> f64 {
    if q == 0.0 {
        0.0
    } else {
        beta * q
    }
}

/// `sum_j beta_j Q_j`; non-negative for initially uncorrelated thermal
/// subsystems under energy-conserving unitaries.
pub fn arrow_sum(heats: &[f64], betas: &[f64]) -> f64 {
    heats.iter().zip(betas).map(|(&q, &b)| weighted_heat(b, q)).sum()
}

/// `beta_A Q_A + beta_B Q_B - dI(A:B)` for a record whose cut separates A from B.
pub fn clausius_residual(record: &HeatRecord, beta_a: f64, beta_b: f64) -> f64 {
    let (qa, qb) = record.side_heats();
    weighted_heat(beta_a, qa) + weighted_heat(beta_b, qb) - record.mutual_information_change
}

/// `T (n ln 2 - S[rho])`, the work a demon can extract at temperature `T`.
pub fn extractable_work(rho: &DensityMatrix, temperature: f64) -> Result<f64> {
    if !temperature.is_finite() || temperature < 0.0 {
        return Err(Error::param(format!("temperature {temperature} must be finite and >= 0")));
    }
    let max_entropy = rho.num_qubits() as f64 * std::f64::consts::LN_2;
    Ok((temperature * (max_entropy - von_neumann_entropy(rho)?)).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::PureState;
    use std::f64::consts::LN_2;

    /// Binary entropy evaluated directly from its definition.
    fn h2(p: f64) -> f64 {
        -p * p.ln() - (1.0 - p) * (1.0 - p).ln()
    }

    #[test]
    fn thermal_qubit_endpoints() {
        let ground = thermal_qubit(&spec_from_lambda(0.0).unwrap());
        assert_eq!(ground.populations(), vec![0.0, 1.0]);
        let hot = thermal_qubit(&spec_from_lambda(0.5).unwrap());
        assert!(hot.max_abs_diff(&DensityMatrix::maximally_mixed(1)) < 1e-15);
        let s = spec_from_beta(1.0).unwrap();
        assert!((s.lambda() - 1.0 / (1.0 + std::f64::consts::E)).abs() < 1e-15);
        assert!((s.lambda() - 0.268_941_421_369_995_1).abs() < 1e-12);
    }

    #[test]
    fn spec_conversions() {
        let s = spec_from_lambda(0.5).unwrap();
        assert_eq!((s.beta(), s.temperature()), (0.0, f64::INFINITY));
        let s = spec_from_lambda(0.0).unwrap();
        assert_eq!((s.beta(), s.temperature()), (f64::INFINITY, 0.0));
        let s = spec_from_lambda(0.15).unwrap();
        assert!((s.beta() - (17.0f64 / 3.0).ln()).abs() < 1e-14);
        assert!((s.beta() - 1.734_601_055_388_106_4).abs() < 1e-12);
        assert!(spec_from_lambda(0.51).is_err());
        assert!(spec_from_beta(-1.0).is_err());
        assert!(spec_from_beta(f64::NAN).is_err());
    }

    #[test]
    fn mean_energy_examples() {
        let h = qubit_hamiltonian();
        let rho = thermal_qubit(&spec_from_lambda(0.3).unwrap());
        assert!((mean_energy(&rho, &h).unwrap() - 0.3).abs() < 1e-15);
        assert!((mean_energy(&DensityMatrix::maximally_mixed(1), &h).unwrap() - 0.5).abs() < 1e-15);
        assert!(mean_energy(&DensityMatrix::maximally_mixed(2), &h).is_err());
    }

    #[test]
    fn site_hamiltonians_sum_to_total() {
        let n = 3;
        let mut acc = ComplexMatrix::zeros(8, 8);
        for q in 0..n {
            acc = &acc + site_hamiltonian(q, n).unwrap().matrix();
        }
        assert!(acc.max_abs_diff(total_hamiltonian(n).matrix()) < 1e-15);
        assert_eq!(site_hamiltonian(0, 1).unwrap(), qubit_hamiltonian());
    }

    #[test]
    fn mutual_information_examples() {
        let prod = product_thermal_state(&[0.2, 0.4]).unwrap();
        assert!(mutual_information(&prod, &[0], &[1]).unwrap().abs() < 1e-12);

        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let z = C64::new(0.0, 0.0);
        let bell = PureState::new(vec![h, z, z, h]).unwrap().density();
        assert!((mutual_information(&bell, &[0], &[1]).unwrap() - 2.0 * LN_2).abs() < 1e-12);

        let classical = DensityMatrix::from_diag(&[0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!((mutual_information(&classical, &[0], &[1]).unwrap() - LN_2).abs() < 1e-12);

        assert!(mutual_information(&classical, &[0], &[0]).is_err());
        assert!(mutual_information(&classical, &[0], &[]).is_err());
    }

    #[test]
    fn free_energy_gap_examples() {
        let spec = spec_from_lambda(0.2).unwrap();
        let init = thermal_qubit(&spec);
        let h = qubit_hamiltonian();
        let beta = spec.beta();
        assert!(free_energy_gap(&init, &init, &h, beta).unwrap().abs() < 1e-12);

        let ground = DensityMatrix::from_diag(&[0.0, 1.0]).unwrap();
        let expect = beta * (0.0 - 0.2) - (0.0 - h2(0.2));
        let gap = free_energy_gap(&init, &ground, &h, beta).unwrap();
        assert!((gap - expect).abs() < 1e-12);
        assert!((gap - 0.2231).abs() < 1e-4);

        let mixed = DensityMatrix::maximally_mixed(1);
        let expect = beta * 0.3 - (LN_2 - h2(0.2));
        let gap = free_energy_gap(&init, &mixed, &h, beta).unwrap();
        assert!((gap - expect).abs() < 1e-12);
        assert!((gap - 0.2232).abs() < 1e-4);

        // not thermal at this beta
        assert!(free_energy_gap(&init, &mixed, &h, beta + 0.1).is_err());
    }

    #[test]
    fn clausius_residual_of_no_change_is_zero() {
        let rec = HeatRecord {
            heat: vec![0.0, 0.0],
            entropy_change: vec![0.0, 0.0],
            cut: vec![0],
            mutual_information_change: 0.0,
        };
        assert_eq!(clausius_residual(&rec, 1.0, f64::INFINITY), 0.0);
    }

    #[test]
    fn extractable_work_examples() {
        assert!(extractable_work(&DensityMatrix::maximally_mixed(2), 1.3).unwrap().abs() < 1e-12);
        let pure = PureState::basis(2, 1).unwrap().density();
        assert!((extractable_work(&pure, 0.7).unwrap() - 0.7 * 2.0 * LN_2).abs() < 1e-12);
        let rho = DensityMatrix::from_diag(&[0.25, 0.75]).unwrap();
        let w = extractable_work(&rho, 1.0).unwrap();
        assert!((w - (LN_2 - h2(0.25))).abs() < 1e-12);
        assert!((w - 0.1308).abs() < 1e-4);
        assert!(extractable_work(&rho, -1.0).is_err());
    }

    #[test]
    fn gibbs_at_infinite_beta_is_ground() {
        let g = gibbs_state(&qubit_hamiltonian(), f64::INFINITY).unwrap();
        assert_eq!(g.populations(), vec![0.0, 1.0]);
    }

    #[test]
    fn local_energies_match_partial_traces() {
        let rho = product_thermal_state(&[0.1, 0.25, 0.4]).unwrap();
        let e = local_energies(&rho);
        for (q, want) in [0.1, 0.25, 0.4].iter().enumerate() {
            assert!((e[q] - want).abs() < 1e-15);
            let r = partial_trace(&rho, &[q]).unwrap();
            assert!((mean_energy(&r, &qubit_hamiltonian()).unwrap() - want).abs() < 1e-15);
        }
    }
}
