//! Correlated state families with thermal marginals, and the polytope of
//! marginal spectra they can reach.
//!
//! A vector of excited populations `(lambda_1, …, lambda_N)` is the marginal
//! spectrum of some global pure state iff `0 <= lambda_i <= 1/2` and
//! `lambda_i <= sum_{j != i} lambda_j` for every `i`. That set is the polytope
//! `P_N`; its intersection with the hyperplane `sum_i lambda_i = E` is the
//! constant-energy slice.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::quantum::{permute_qubits, ComplexMatrix, DensityMatrix, PureState, C64};
use crate::thermo::{thermal_qubit, ThermalSpec};

/// Boundary tolerance for polytope membership.
pub const POLYTOPE_TOL: f64 = 1e-12;
/// Tolerance on the parameter constraints of the W-type and `rho_AC` families.
pub const PARAM_TOL: f64 = 1e-12;

const MAX_SLICE_ATTEMPTS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolytopeViolation {
    TooFewSubsystems,
    Negative(usize),
    AboveHalf(usize),
    /// `lambda_i` exceeds the sum of the other populations.
    ExceedsOthers(usize),
    NonFinite(usize),
}

impl std::fmt::Display for PolytopeViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::TooFewSubsystems => write!(f, "need at least two subsystems"),
            Self::Negative(i) => write!(f, "lambda_{} < 0", i + 1),
            Self::AboveHalf(i) => write!(f, "lambda_{} > 1/2", i + 1),
            Self::ExceedsOthers(i) => write!(f, "lambda_{0} > sum of lambda_j for j != {0}", i + 1),
            Self::NonFinite(i) => write!(f, "lambda_{} is not finite", i + 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolytopeCheck {
    pub inside: bool,
    pub violations: Vec<PolytopeViolation>,
}

pub fn polytope_contains(lambdas: &[f64]) -> PolytopeCheck {
    polytope_contains_with_margin(lambdas, 0.0)
}

/// Membership with every inequality tightened by `margin` (use a positive
/// margin to demand strict interior points).
pub fn polytope_contains_with_margin(lambdas: &[f64], margin: f64) -> PolytopeCheck {
    let mut violations = Vec::new();
    if lambdas.len() < 2 {
        violations.push(PolytopeViolation::TooFewSubsystems);
    }
    let total: f64 = lambdas.iter().sum();
    for (i, &l) in lambdas.iter().enumerate() {
        if !l.is_finite() {
            violations.push(PolytopeViolation::NonFinite(i));
            continue;
        }
        if l < margin - POLYTOPE_TOL {
            violations.push(PolytopeViolation::Negative(i));
        }
        if l > 0.5 - margin + POLYTOPE_TOL {
            violations.push(PolytopeViolation::AboveHalf(i));
        }
        if l > (total - l) - margin + POLYTOPE_TOL {
            violations.push(PolytopeViolation::ExceedsOthers(i));
        }
    }
    PolytopeCheck { inside: violations.is_empty(), violations }
}

/// A point of `P_N`: the excited populations of N thermal marginals.
#[derive(Clone, Debug, PartialEq)]
pub struct MarginalVector {
    lambdas: Vec<f64>,
}

impl MarginalVector {
    pub fn new(lambdas: Vec<f64>) -> Result<Self> {
        let check = polytope_contains(&lambdas);
        if !check.inside {
            let list = check.violations.iter().map(ToString::to_string).join(", ");
            return Err(Error::param(format!("{lambdas:?} is outside the marginal polytope: {list}")));
        }
        Ok(Self { lambdas })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// Total energy `E = sum_i lambda_i`.
    pub fn energy(&self) -> f64 {
        self.lambdas.iter().sum()
    }

    pub fn specs(&self) -> Vec<ThermalSpec> {
        self.lambdas
            .iter()
            .map(|&l| ThermalSpec::from_lambda(l).expect("polytope points have lambda in [0, 1/2]"))
            .collect()
    }

    pub fn temperatures(&self) -> Vec<f64> {
        self.specs().iter().map(ThermalSpec::temperature).collect()
    }

    pub fn betas(&self) -> Vec<f64> {
        self.specs().iter().map(ThermalSpec::beta).collect()
    }
}

/// Uniform sampler on the constant-energy slice of `P_N`.
///
/// Draws uniformly from the simplex `{sum lambda = E, lambda >= 0}` (or, above
/// the mid energy, from the mirrored simplex of `1/2 - lambda`) and rejects
/// points outside the polytope.
pub struct EnergySliceSampler {
    n: usize,
    energy: f64,
    rng: ChaCha8Rng,
}

impl EnergySliceSampler {
    pub fn new(n: usize, energy: f64, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::param("the energy slice needs at least two subsystems"));
        }
        let max = n as f64 / 2.0;
        if !energy.is_finite() || energy < -POLYTOPE_TOL || energy > max + POLYTOPE_TOL {
            return Err(Error::param(format!("energy {energy} gives an empty slice (attainable range is [0, {max}])")));
        }
        Ok(Self { n, energy: energy.clamp(0.0, max), rng: ChaCha8Rng::seed_from_u64(seed) })
    }

    pub fn sample(&mut self) -> Result<MarginalVector> {
        let n = self.n;
        let max = n as f64 / 2.0;
        // degenerate slices are single points
        if self.energy == 0.0 || self.energy == max || n == 2 {
            return MarginalVector::new(vec![self.energy / n as f64; n]);
        }
        let mirrored = self.energy > max / 2.0;
        let radius = if mirrored { max - self.energy } else { self.energy };
        for _ in 0..MAX_SLICE_ATTEMPTS {
            let weights: Vec<f64> = (0..n).map(|_| -(1.0 - self.rng.random::<f64>()).ln()).collect();
            let total: f64 = weights.iter().sum();
            let point: Vec<f64> = weights
                .iter()
                .map(|w| {
                    let x = radius * w / total;
                    if mirrored {
                        0.5 - x
                    } else {
                        x
                    }
                })
                .collect();
            if polytope_contains(&point).inside {
                return MarginalVector::new(point);
            }
        }
        Err(Error::param(format!("no slice point found for n={n}, E={}", self.energy)))
    }
}

/// One uniform point on the slice `sum lambda = energy` of `P_n`.
pub fn sample_energy_slice(n: usize, energy: f64, seed: u64) -> Result<MarginalVector> {
    EnergySliceSampler::new(n, energy, seed)?.sample()
}

/// Inequalities of `P_n` as rows `a . lambda <= b`.
fn polytope_inequalities(n: usize) -> Vec<(Vec<f64>, f64)> {
    let mut rows = Vec::with_capacity(3 * n);
    for i in 0..n {
        let mut lower = vec![0.0; n];
        lower[i] = -1.0;
        rows.push((lower, 0.0));
        let mut upper = vec![0.0; n];
        upper[i] = 1.0;
        rows.push((upper, 0.5));
        let mut others = vec![-1.0; n];
        others[i] = 1.0;
        rows.push((others, 0.0));
    }
    rows
}

/// Vertices of `P_n`, or of its slice at `energy` when given, by solving every
/// square subsystem of active constraints.
fn enumerate_vertices(n: usize, energy: Option<f64>) -> Vec<Vec<f64>> {
    let rows = polytope_inequalities(n);
    let free = if energy.is_some() { n - 1 } else { n };
    let mut vertices: Vec<Vec<f64>> = Vec::new();
    for active in (0..rows.len()).combinations(free) {
        let mut a = DMatrix::<f64>::zeros(n, n);
        let mut b = DVector::<f64>::zeros(n);
        for (r, &k) in active.iter().enumerate() {
            for c in 0..n {
                a[(r, c)] = rows[k].0[c];
            }
            b[r] = rows[k].1;
        }
        if let Some(e) = energy {
            for c in 0..n {
                a[(n - 1, c)] = 1.0;
            }
            b[n - 1] = e;
        }
        let lu = a.lu();
        if lu.determinant().abs() < 1e-12 {
            continue;
        }
        let Some(x) = lu.solve(&b) else { continue };
        let point: Vec<f64> = x.iter().map(|v| if v.abs() < 1e-14 { 0.0 } else { *v }).collect();
        if !polytope_contains_with_margin(&point, -1e-9).inside {
            continue;
        }
        if !vertices.iter().any(|v| v.iter().zip(&point).all(|(p, q)| (p - q).abs() < 1e-9)) {
            vertices.push(point);
        }
    }
    vertices.sort_by(|a, b| {
        a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    vertices
}

/// Vertices of the marginal polytope `P_n`.
pub fn polytope_vertices(n: usize) -> Result<Vec<Vec<f64>>> {
    if n < 2 {
        return Err(Error::param("the polytope needs at least two subsystems"));
    }
    Ok(enumerate_vertices(n, None))
}

/// Vertices of the constant-energy slice. For three qubits they are ordered
/// around the triangle.
pub fn slice_vertices(n: usize, energy: f64) -> Result<Vec<Vec<f64>>> {
    if n < 2 {
        return Err(Error::param("the slice needs at least two subsystems"));
    }
    let max = n as f64 / 2.0;
    if !(0.0..=max).contains(&energy) {
        return Err(Error::param(format!("energy {energy} outside [0, {max}]")));
    }
    let mut verts = enumerate_vertices(n, Some(energy));
    if n == 3 && verts.len() > 2 {
        let c: Vec<f64> = (0..3).map(|k| verts.iter().map(|v| v[k]).sum::<f64>() / verts.len() as f64).collect();
        // in-plane coordinates: u along (1,-1,0), w along (1,1,-2)
        let angle = |v: &Vec<f64>| {
            let d: Vec<f64> = v.iter().zip(&c).map(|(a, b)| a - b).collect();
            let u = (d[0] - d[1]) / 2f64.sqrt();
            let w = (d[0] + d[1] - 2.0 * d[2]) / 6f64.sqrt();
            w.atan2(u)
        };
        verts.sort_by(|a, b| angle(a).total_cmp(&angle(b)));
    }
    Ok(verts)
}

/// Grid points of the slice: the first `n - 1` coordinates step by `resolution`
/// and the last one closes the energy sum.
pub fn slice_grid(n: usize, energy: f64, resolution: f64) -> Result<Vec<MarginalVector>> {
    if n < 2 {
        return Err(Error::param("the slice needs at least two subsystems"));
    }
    if !(resolution > 0.0 && resolution <= 0.5) {
        return Err(Error::param(format!("resolution {resolution} must lie in (0, 1/2]")));
    }
    let steps = (0.5 / resolution).round() as usize;
    let values: Vec<f64> = (0..=steps).map(|k| 0.5 * k as f64 / steps as f64).collect();
    let mut out = Vec::new();
    for head in (0..n - 1).map(|_| values.iter().copied()).multi_cartesian_product() {
        let last = energy - head.iter().sum::<f64>();
        let mut point = head;
        point.push(if last.abs() < 1e-14 { 0.0 } else { last });
        if polytope_contains(&point).inside {
            out.push(MarginalVector::new(point)?);
        }
    }
    if n == 2 {
        // the slice of P_2 is the single point (E/2, E/2), usually off-grid
        out.retain(|p| (p.lambdas()[0] - p.lambdas()[1]).abs() < POLYTOPE_TOL);
        if out.is_empty() && (0.0..=1.0).contains(&energy) {
            out.push(MarginalVector::new(vec![energy / 2.0; 2])?);
        }
    }
    Ok(out)
}

/// Parameters of the W-type pure state
/// `sum_i x_i X_i |0…0> + sqrt(1 - E/(N-1)) |1…1>`.
#[derive(Clone, Debug, PartialEq)]
pub struct WStateParams {
    xs: Vec<f64>,
    energy: f64,
}

impl WStateParams {
    pub fn new(xs: Vec<f64>, energy: f64) -> Result<Self> {
        let n = xs.len();
        if n < 2 {
            return Err(Error::param("the W-type state needs at least two qubits"));
        }
        let top = (n - 1) as f64;
        if !energy.is_finite() || energy < 0.0 || energy > top {
            return Err(Error::param(format!("energy {energy} outside [0, {top}]")));
        }
        if xs.iter().any(|x| !x.is_finite()) {
            return Err(Error::param("amplitudes must be finite"));
        }
        let norm2: f64 = xs.iter().map(|x| x * x).sum();
        if (norm2 - energy / top).abs() > PARAM_TOL {
            return Err(Error::param(format!("sum of x_i^2 = {norm2} but E/(N-1) = {}", energy / top)));
        }
        Ok(Self { xs, energy })
    }

    /// Rescale `direction` onto the sphere `sum x_i^2 = E/(N-1)`.
    pub fn from_direction(direction: &[f64], energy: f64) -> Result<Self> {
        let norm: f64 = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::param("direction must be a non-zero finite vector"));
        }
        if direction.len() < 2 {
            return Err(Error::param("the W-type state needs at least two qubits"));
        }
        let radius = (energy / (direction.len() - 1) as f64).max(0.0).sqrt();
        Self::new(direction.iter().map(|x| x * radius / norm).collect(), energy)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn num_qubits(&self) -> usize {
        self.xs.len()
    }

    /// Marginal excited populations `lambda_i = sum_{j != i} x_j^2`.
    pub fn lambdas(&self) -> Vec<f64> {
        let total: f64 = self.xs.iter().map(|x| x * x).sum();
        self.xs.iter().map(|x| total - x * x).collect()
    }
}

/// The W-type pure state. For `N >= 3` its single-qubit marginals are
/// diagonal with excited populations [`WStateParams::lambdas`].
pub fn w_state(params: &WStateParams) -> PureState {
    let n = params.num_qubits();
    let dim = 1usize << n;
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    // X_i |0…0> sets qubit i to 1 (ground) and leaves the rest excited
    for (i, &x) in params.xs.iter().enumerate() {
        amps[1 << (n - 1 - i)] += C64::new(x, 0.0);
    }
    let rest = (1.0 - params.energy / (n - 1) as f64).max(0.0);
    amps[dim - 1] += C64::new(rest.sqrt(), 0.0);
    PureState::normalized(amps).expect("W-type amplitudes are normalised by construction")
}

/// Parameters of the two-qubit correlated state `rho_AC`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RhoACParams {
    lambda_a: f64,
    lambda_c: f64,
    gamma: f64,
}

impl RhoACParams {
    pub fn new(lambda_a: f64, lambda_c: f64, gamma: f64) -> Result<Self> {
        for (name, v) in [("lambda_A", lambda_a), ("lambda_C", lambda_c)] {
            if !v.is_finite() || !(-PARAM_TOL..=0.5 + PARAM_TOL).contains(&v) {
                return Err(Error::param(format!("{name} = {v} outside [0, 1/2]")));
            }
        }
        if !gamma.is_finite() {
            return Err(Error::param("gamma must be finite"));
        }
        if gamma < (lambda_c - lambda_a).abs() - PARAM_TOL {
            return Err(Error::param(format!("gamma = {gamma} violates |lambda_C - lambda_A| <= gamma")));
        }
        if gamma > lambda_a + lambda_c + PARAM_TOL {
            return Err(Error::param(format!("gamma = {gamma} violates gamma <= lambda_A + lambda_C")));
        }
        if gamma > 2.0 - lambda_a - lambda_c + PARAM_TOL {
            return Err(Error::param(format!("gamma = {gamma} violates gamma <= 2 - lambda_A - lambda_C")));
        }
        Ok(Self { lambda_a: lambda_a.clamp(0.0, 0.5), lambda_c: lambda_c.clamp(0.0, 0.5), gamma })
    }

    pub fn lambda_a(&self) -> f64 {
        self.lambda_a
    }

    pub fn lambda_c(&self) -> f64 {
        self.lambda_c
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// The rank-two correlated state on qubits (A, C) whose marginals are
/// thermal with excited populations `lambda_A` and `lambda_C`.
///
/// In the basis `|00>, |01>, |10>, |11>` (A first) it is block diagonal: the
/// `{|01>, |10>}` block has diagonal `(g + lA - lC, g - lA + lC) / 2` and
/// coherence `sqrt(g^2 - (lC - lA)^2) / 2`; the `{|00>, |11>}` block has
/// diagonal `(lA + lC - g, 2 - lA - lC - g) / 2` and coherence
/// `sqrt((lA + lC - g)(2 - lA - lC - g)) / 2`.
pub fn rho_ac(params: &RhoACParams) -> Result<DensityMatrix> {
    let (la, lc, g) = (params.lambda_a, params.lambda_c, params.gamma);
    let single_coh = 0.5 * (g * g - (lc - la).powi(2)).max(0.0).sqrt();
    let double_coh = 0.5 * ((la + lc - g) * (2.0 - la - lc - g)).max(0.0).sqrt();
    let mut m = ComplexMatrix::zeros(4, 4);
    let re = |x: f64| C64::new(x, 0.0);
    m.set(0, 0, re(0.5 * (la + lc - g)));
    m.set(1, 1, re(0.5 * (g - lc + la)));
    m.set(2, 2, re(0.5 * (g + lc - la)));
    m.set(3, 3, re(0.5 * (2.0 - la - lc - g)));
    m.set(1, 2, re(single_coh));
    m.set(2, 1, re(single_coh));
    m.set(0, 3, re(double_coh));
    m.set(3, 0, re(double_coh));
    DensityMatrix::new(m)
}

/// `rho_AC ⊗ rho_B(lambda_B)` with qubits ordered (A, B, C).
pub fn rho_abc(params: &RhoACParams, lambda_b: f64) -> Result<DensityMatrix> {
    let b = thermal_qubit(&ThermalSpec::from_lambda(lambda_b)?);
    let acb = rho_ac(params)?.tensor(&b);
    permute_qubits(&acb, &[0, 2, 1])
}
