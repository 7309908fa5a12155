//! Energy-conserving interactions, heat flow and parameter sweeps.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quantum::{
    embed_operator, embed_pauli, partial_trace, unitary_from_generator, von_neumann_entropy, ComplexMatrix,
    DensityMatrix, HermitianOperator, Pauli, C64,
};
use crate::thermo::{bipartite_mutual_information, excitation_count, local_energies, HeatRecord};

/// Default sweep range for `t` and `s`: one full period of the
/// single-excitation rotation.
pub const DEFAULT_RANGE: (f64, f64) = (0.0, 2.0 * std::f64::consts::PI);
pub const DEFAULT_RESOLUTION: usize = 101;
/// Heats within this distance of zero do not count as a sign for the
/// violation mask.
pub const MASK_TOL: f64 = 1e-9;

/// `V_ab = (X_a Y_b - Y_a X_b) / 2` on `n` qubits. It moves a single
/// excitation between `a` and `b` and commutes with `H_a + H_b`.
#[derive(Clone, Debug)]
pub struct InteractionPair {
    site_a: usize,
    site_b: usize,
    num_qubits: usize,
    operator: HermitianOperator,
}

impl InteractionPair {
    pub fn new(site_a: usize, site_b: usize, num_qubits: usize) -> Result<Self> {
        if site_a == site_b {
            return Err(Error::InvalidSubsystems(format!("interaction needs two distinct sites, got {site_a} twice")));
        }
        let xa = embed_pauli(Pauli::X, site_a, num_qubits)?;
        let ya = embed_pauli(Pauli::Y, site_a, num_qubits)?;
        let xb = embed_pauli(Pauli::X, site_b, num_qubits)?;
        let yb = embed_pauli(Pauli::Y, site_b, num_qubits)?;
        let xy = xa.matrix() * yb.matrix();
        let yx = ya.matrix() * xb.matrix();
        let v = (&xy - &yx).scale(C64::new(0.5, 0.0));
        Ok(Self { site_a, site_b, num_qubits, operator: HermitianOperator::new(v)? })
    }

    pub fn site_a(&self) -> usize {
        self.site_a
    }

    pub fn site_b(&self) -> usize {
        self.site_b
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.operator
    }

    /// `exp(-i theta V_ab)`.
    pub fn unitary(&self, theta: f64) -> ComplexMatrix {
        unitary_from_generator(&self.operator, theta)
    }
}

/// `U rho U^dagger` with `U = exp(-i theta V_ab)`.
///
/// `V_ab` has eigenvalues `±1` on the single-excitation block of the pair, so
/// `theta = pi/2` swaps the two populations and the heat pattern repeats with
/// period `pi`.
pub fn evolve_two_site(rho: &DensityMatrix, pair: &InteractionPair, theta: f64) -> Result<DensityMatrix> {
    if rho.num_qubits() != pair.num_qubits {
        return Err(Error::DimensionMismatch(format!(
            "pair built for {} qubits applied to a {}-qubit state",
            pair.num_qubits,
            rho.num_qubits()
        )));
    }
    rho.evolve(&pair.unitary(theta))
}

/// The three-qubit interaction `t V_AB + s V_CB` on qubits (A, B, C).
///
/// The B-C bond is oriented from C to B, `V_CB = -V_BC`. Only the relative
/// orientation of the two bonds matters for the heat maps (a phase on C
/// reverses it), and with this one the correlated state shows cells where
/// A loses heat while B and C both gain at `t, s > 0`.
#[derive(Clone, Debug)]
pub struct TsGenerator {
    v_ab: HermitianOperator,
    v_cb: HermitianOperator,
}

impl Default for TsGenerator {
    fn default() -> Self {
        Self::new()
    }
}

impl TsGenerator {
    pub fn new() -> Self {
        let ab = InteractionPair::new(0, 1, 3).expect("valid sites");
        let cb = InteractionPair::new(2, 1, 3).expect("valid sites");
        Self { v_ab: ab.operator, v_cb: cb.operator }
    }

    /// `exp(-i (t V_AB + s V_CB))` as a single exponential.
    pub fn unitary(&self, t: f64, s: f64) -> ComplexMatrix {
        let g = HermitianOperator::linear_combination(&[(t, &self.v_ab), (s, &self.v_cb)]).expect("equal dimensions");
        unitary_from_generator(&g, 1.0)
    }

    pub fn evolve(&self, rho: &DensityMatrix, t: f64, s: f64) -> Result<DensityMatrix> {
        if rho.num_qubits() != 3 {
            return Err(Error::DimensionMismatch(format!("U(t, s) acts on three qubits, got {}", rho.num_qubits())));
        }
        rho.evolve(&self.unitary(t, s))
    }
}

/// Evolve a three-qubit state under `exp(-i (t V_AB + s V_CB))`.
pub fn evolve_ts(rho_abc: &DensityMatrix, t: f64, s: f64) -> Result<DensityMatrix> {
    TsGenerator::new().evolve(rho_abc, t, s)
}

/// `Tr[H_tot rho]`, the mean number of excitations.
pub fn total_energy(rho: &DensityMatrix) -> f64 {
    let n = rho.num_qubits();
    rho.populations().iter().enumerate().map(|(i, p)| excitation_count(i, n) as f64 * p).sum()
}

/// Heat gained by every qubit, local entropy changes, and the change of the
/// mutual information between `cut` and the remaining qubits.
pub fn heat_flows(initial: &DensityMatrix, final_state: &DensityMatrix, cut: &[usize]) -> Result<HeatRecord> {
    if initial.dim() != final_state.dim() {
        return Err(Error::DimensionMismatch(format!(
            "initial state has dimension {}, final {}",
            initial.dim(),
            final_state.dim()
        )));
    }
    let n = initial.num_qubits();
    if n < 2 {
        return Err(Error::InvalidSubsystems("heat flow needs at least two qubits".into()));
    }
    let before = local_energies(initial);
    let after = local_energies(final_state);
    let heat = after.iter().zip(&before).map(|(a, b)| a - b).collect();
    let mut entropy_change = Vec::with_capacity(n);
    for q in 0..n {
        let s1 = von_neumann_entropy(&partial_trace(final_state, &[q])?)?;
        let s0 = von_neumann_entropy(&partial_trace(initial, &[q])?)?;
        entropy_change.push(s1 - s0);
    }
    let di = bipartite_mutual_information(final_state, cut)? - bipartite_mutual_information(initial, cut)?;
    Ok(HeatRecord { heat, entropy_change, cut: cut.to_vec(), mutual_information_change: di })
}

/// `resolution` evenly spaced values from `start` to `end`; a single value
/// sits at `start`.
pub fn linspace(start: f64, end: f64, resolution: usize) -> Vec<f64> {
    match resolution {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (end - start) / (resolution - 1) as f64;
            (0..resolution).map(|k| if k == resolution - 1 { end } else { start + step * k as f64 }).collect()
        }
    }
}

/// Heat into A, B and C over a `(t, s)` grid. Cells are stored t-major:
/// cell `(i, j)` sits at index `i * s_values.len() + j`.
#[derive(Clone, Debug, PartialEq)]
pub struct HeatGrid {
    pub t_values: Vec<f64>,
    pub s_values: Vec<f64>,
    pub q_a: Vec<f64>,
    pub q_b: Vec<f64>,
    pub q_c: Vec<f64>,
    /// `|Tr[H_tot rho(t, s)] - Tr[H_tot rho(0)]|` per cell.
    pub energy_drift: Vec<f64>,
    pub descriptor: String,
}

impl HeatGrid {
    pub fn index(&self, it: usize, is: usize) -> usize {
        it * self.s_values.len() + is
    }

    pub fn len(&self) -> usize {
        self.q_a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q_a.is_empty()
    }

    pub fn heat(&self, site: usize) -> &[f64] {
        match site {
            0 => &self.q_a,
            1 => &self.q_b,
            2 => &self.q_c,
            _ => panic!("heat grids cover sites 0..3, got {site}"),
        }
    }

    pub fn same_axes(&self, other: &HeatGrid) -> bool {
        self.t_values == other.t_values && self.s_values == other.s_values
    }
}

/// Evolve `initial` under `U(t, s)` for every grid cell and record the heat
/// into each qubit. Cells are evaluated in parallel and assembled in
/// t-major order, so the result does not depend on the thread count.
pub fn sweep_grid(
    initial: &DensityMatrix,
    t_range: (f64, f64),
    s_range: (f64, f64),
    resolution: usize,
    descriptor: impl Into<String>,
) -> Result<HeatGrid> {
    if initial.num_qubits() != 3 {
        return Err(Error::DimensionMismatch(format!(
            "heat grids need a three-qubit state, got {}",
            initial.num_qubits()
        )));
    }
    if resolution == 0 {
        return Err(Error::param("grid resolution must be at least 1"));
    }
    for v in [t_range.0, t_range.1, s_range.0, s_range.1] {
        if !v.is_finite() {
            return Err(Error::param("grid ranges must be finite"));
        }
    }
    let t_values = linspace(t_range.0, t_range.1, resolution);
    let s_values = linspace(s_range.0, s_range.1, resolution);
    let generator = TsGenerator::new();
    let e0 = total_energy(initial);
    let q0 = local_energies(initial);
    let ns = s_values.len();

    let cells: Vec<[f64; 4]> = (0..t_values.len() * ns)
        .into_par_iter()
        .map(|k| {
            let (t, s) = (t_values[k / ns], s_values[k % ns]);
            let rho = initial.evolve(&generator.unitary(t, s)).expect("3-qubit unitary");
            let q = local_energies(&rho);
            [q[0] - q0[0], q[1] - q0[1], q[2] - q0[2], (total_energy(&rho) - e0).abs()]
        })
        .collect();

    Ok(HeatGrid {
        q_a: cells.iter().map(|c| c[0]).collect(),
        q_b: cells.iter().map(|c| c[1]).collect(),
        q_c: cells.iter().map(|c| c[2]).collect(),
        energy_drift: cells.iter().map(|c| c[3]).collect(),
        t_values,
        s_values,
        descriptor: descriptor.into(),
    })
}

/// Difference between the product-state and entangled heat maps of A, and
/// the cells where A loses heat while both B and C gain heat.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaQGrid {
    pub t_values: Vec<f64>,
    pub s_values: Vec<f64>,
    /// `Q_A(product) - Q_A(entangled)`, t-major.
    pub delta_q_a: Vec<f64>,
    pub violation_mask: Vec<bool>,
}

pub fn delta_q_grid(entangled: &HeatGrid, product: &HeatGrid) -> Result<DeltaQGrid> {
    if !entangled.same_axes(product) || entangled.len() != product.len() {
        return Err(Error::DimensionMismatch("heat grids have different axes".into()));
    }
    let delta_q_a = product.q_a.iter().zip(&entangled.q_a).map(|(p, e)| p - e).collect();
    let violation_mask = (0..entangled.len())
        .map(|k| entangled.q_a[k] < -MASK_TOL && entangled.q_b[k] > MASK_TOL && entangled.q_c[k] > MASK_TOL)
        .collect();
    Ok(DeltaQGrid {
        t_values: entangled.t_values.clone(),
        s_values: entangled.s_values.clone(),
        delta_q_a,
        violation_mask,
    })
}

/// Basis indices grouped by excitation number `0..=n`.
pub fn excitation_blocks(n: usize) -> Vec<Vec<usize>> {
    let mut blocks = vec![Vec::new(); n + 1];
    for i in 0..1usize << n {
        blocks[excitation_count(i, n)].push(i);
    }
    blocks
}

/// Random unitary on `d` dimensions: Gram-Schmidt on a complex Gaussian
/// matrix (column phases fixed by the positive-diagonal convention).
fn random_unitary_block(d: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<C64>> {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<C64> = (0..d)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                C64::new(re, im)
            })
            .collect();
        // two passes of modified Gram-Schmidt for orthogonality to ~1e-15
        for _ in 0..2 {
            for u in &cols {
                let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= proj * y;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    cols
}

/// Random unitary commuting with `H_tot`, block-random on every
/// excitation-number eigenspace. Deterministic per seed.
pub fn random_energy_conserving_unitary(n: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_energy_conserving_unitary_with(n, &mut rng)
}

pub fn random_energy_conserving_unitary_with(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    assert!(n >= 1, "need at least one qubit");
    let dim = 1usize << n;
    let mut u = ComplexMatrix::zeros(dim, dim);
    for block in excitation_blocks(n) {
        let cols = random_unitary_block(block.len(), rng);
        for (c, col) in cols.iter().enumerate() {
            for (r, z) in col.iter().enumerate() {
                u.set(block[r], block[c], *z);
            }
        }
    }
    u
}

/// [`random_energy_conserving_unitary_with`] on `sites`, identity on the
/// remaining qubits of an `n`-qubit register.
pub fn random_energy_conserving_unitary_on(sites: &[usize], n: usize, rng: &mut ChaCha8Rng) -> Result<ComplexMatrix> {
    let local = random_energy_conserving_unitary_with(sites.len(), rng);
    embed_operator(&local, sites, n)
}
