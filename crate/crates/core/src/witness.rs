//! Heat-reversal entanglement witness and arrow classifiers.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dynamics::{heat_flows, random_energy_conserving_unitary_with};
use crate::error::{Error, Result};
use crate::quantum::{partial_trace, DensityMatrix};
use crate::states::{rho_ac, RhoACParams};
use crate::thermo::{mutual_information, product_thermal_state, ThermalSpec};

/// Margin above `ln D` required before certifying.
pub const WITNESS_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WitnessVerdict {
    /// `-(beta_A Q_A + beta_B Q_B)` with `Q_B = -Q_A`; positive when heat ran
    /// from the cold side to the hot side.
    pub reverse_flow_magnitude: f64,
    /// `ln D` for the smaller subsystem dimension `D`.
    pub classical_bound: f64,
    pub certified_entangled: bool,
}

/// Classify an observed heat `Q_A` exchanged between A and B.
///
/// Separable states carry at most `ln D` of mutual information, so no more
/// than `ln D / |beta_A - beta_B|` of heat can run against the gradient.
pub fn witness_from_heat(q_a: f64, beta_a: f64, beta_b: f64, dim_small: usize) -> Result<WitnessVerdict> {
    if !q_a.is_finite() || !beta_a.is_finite() || !beta_b.is_finite() {
        return Err(Error::param("heat and inverse temperatures must be finite"));
    }
    if beta_a == beta_b {
        return Err(Error::param("equal inverse temperatures leave the witness bound degenerate"));
    }
    if dim_small == 0 {
        return Err(Error::param("subsystem dimension must be at least 1"));
    }
    let reverse_flow_magnitude = -q_a * (beta_a - beta_b);
    let classical_bound = (dim_small as f64).ln();
    Ok(WitnessVerdict {
        reverse_flow_magnitude,
        classical_bound,
        certified_entangled: reverse_flow_magnitude > classical_bound + WITNESS_TOL,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WitnessPoint {
    pub lambda_a: f64,
    pub lambda_c: f64,
    pub gamma: f64,
    pub mutual_information: f64,
    pub capable: bool,
}

/// `0, step, 2 step, …` up to `max`, with `max` itself always included.
fn axis(step: f64, max: f64) -> Vec<f64> {
    let count = (max / step + 1e-9).floor() as usize;
    let mut v: Vec<f64> = (0..=count).map(|k| k as f64 * step).collect();
    if (max - v[count]).abs() > 1e-9 {
        v.push(max);
    } else {
        v[count] = max;
    }
    v
}

/// Scan `(lambda_A, lambda_C, gamma)` over `[0, 1/2]^2 x [0, 1]` with the
/// given spacing, keep the valid `rho_AC` parameters, and flag the points
/// whose `I(A:C)` exceeds `ln 2`. Output order is lambda_A-major, then
/// lambda_C, then gamma.
///
/// Every state in the scan has thermal marginals; `lambda_b` does not enter
/// `I(A:C)` and is only validated.
pub fn witness_region_scan(resolution: f64, lambda_b: f64) -> Result<Vec<WitnessPoint>> {
    if !(resolution.is_finite() && resolution > 0.0 && resolution <= 1.0) {
        return Err(Error::param(format!("scan resolution {resolution} must lie in (0, 1]")));
    }
    ThermalSpec::from_lambda(lambda_b)?;
    let lam = axis(resolution, 0.5);
    let gam = axis(resolution, 1.0);
    let combos: Vec<(f64, f64, f64)> =
        lam.iter().cartesian_product(&lam).cartesian_product(&gam).map(|((&a, &c), &g)| (a, c, g)).collect();
    let points: Vec<Option<WitnessPoint>> = combos
        .par_iter()
        .map(|&(a, c, g)| {
            let params = RhoACParams::new(a, c, g).ok()?;
            let rho = rho_ac(&params).ok()?;
            let i = mutual_information(&rho, &[0], &[1]).expect("two-qubit bipartition");
            Some(WitnessPoint {
                lambda_a: a,
                lambda_c: c,
                gamma: g,
                mutual_information: i,
                capable: i > std::f64::consts::LN_2 + WITNESS_TOL,
            })
        })
        .collect();
    Ok(points.into_iter().flatten().collect())
}

/// Excited populations of every qubit, after checking each single-qubit
/// marginal is diagonal with population at most one half.
fn thermal_marginals(rho: &DensityMatrix, tolerance: f64) -> Result<Vec<f64>> {
    (0..rho.num_qubits())
        .map(|q| {
            let m = partial_trace(rho, &[q])?;
            let coherence = m.matrix().get(0, 1).norm();
            let lambda = m.matrix().get(0, 0).re;
            if coherence > tolerance || lambda > 0.5 + tolerance {
                return Err(Error::state(format!(
                    "qubit {q} marginal is not thermal (coherence {coherence:.3e}, excited population {lambda})"
                )));
            }
            Ok(lambda.min(0.5))
        })
        .collect()
}

fn is_product_of_marginals(rho: &DensityMatrix, sites: &[usize], lambdas: &[f64], tolerance: f64) -> Result<bool> {
    let reduced = partial_trace(rho, sites)?;
    let product = product_thermal_state(&sites.iter().map(|&s| lambdas[s]).collect::<Vec<_>>())?;
    Ok(reduced.max_abs_diff(&product) <= tolerance)
}

/// Largest `k` such that some `k` qubits are jointly in the product of their
/// thermal marginals. Such a set obeys `sum_j Q_j / T_j >= 0` under every
/// energy-conserving unitary on it.
pub fn hierarchy_classify(rho: &DensityMatrix, tolerance: f64) -> Result<usize> {
    let lambdas = thermal_marginals(rho, tolerance)?;
    let n = rho.num_qubits();
    for k in (2..=n).rev() {
        for subset in (0..n).combinations(k) {
            if is_product_of_marginals(rho, &subset, &lambdas, tolerance)? {
                return Ok(k);
            }
        }
    }
    Ok(1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArrowProfile {
    /// `R_a` per qubit.
    pub ranges: Vec<f64>,
    pub mean_range: f64,
    pub hierarchy_class: usize,
}

/// For each qubit `a`, the largest distance `r` to another qubit such that
/// all qubits within `r` of `a` are in the product of their thermal
/// marginals. Zero when even the nearest neighbour is correlated with `a`.
pub fn arrow_range(rho: &DensityMatrix, positions: &[Vec<f64>], tolerance: f64) -> Result<ArrowProfile> {
    let n = rho.num_qubits();
    if positions.len() != n {
        return Err(Error::param(format!("{} positions given for {n} qubits", positions.len())));
    }
    let d = positions[0].len();
    if positions.iter().any(|p| p.len() != d || p.iter().any(|x| !x.is_finite())) {
        return Err(Error::param("positions must be finite and share one dimension"));
    }
    let lambdas = thermal_marginals(rho, tolerance)?;
    let dist = |a: usize, b: usize| -> f64 {
        positions[a].iter().zip(&positions[b]).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
    };

    let mut ranges = Vec::with_capacity(n);
    for a in 0..n {
        let mut radii: Vec<f64> = (0..n).map(|b| dist(a, b)).collect();
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        let mut best = 0.0;
        for &r in &radii {
            let region: Vec<usize> = (0..n).filter(|&b| dist(a, b) <= r).collect();
            if !is_product_of_marginals(rho, &region, &lambdas, tolerance)? {
                break;
            }
            best = r;
        }
        ranges.push(best);
    }
    let mean_range = ranges.iter().sum::<f64>() / n as f64;
    Ok(ArrowProfile { ranges, mean_range, hierarchy_class: hierarchy_classify(rho, tolerance)? })
}

/// Outcome of evolving random separable two-qubit states.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct SeparableControlReport {
    pub trials: usize,
    /// Largest `-(beta_A Q_A + beta_B Q_B)` seen.
    pub max_reverse_flow: f64,
    /// Largest initial `I(A:B)` seen.
    pub max_mutual_information: f64,
    pub false_positives: usize,
}

/// A mixture of 1 to 4 products of two thermal qubits.
pub fn random_separable_state(rng: &mut ChaCha8Rng) -> DensityMatrix {
    let terms = rng.random_range(1..=4);
    let weights: Vec<f64> = (0..terms).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut probs = [0.0; 4];
    for w in weights {
        let (la, lb) = (rng.random_range(0.0..0.5), rng.random_range(0.0..0.5));
        let comp = [la * lb, la * (1.0 - lb), (1.0 - la) * lb, (1.0 - la) * (1.0 - lb)];
        for (p, c) in probs.iter_mut().zip(comp) {
            *p += w / total * c;
        }
    }
    DensityMatrix::from_diag(&probs).expect("convex mixture of states")
}

/// Evolve `trials` random separable states under random energy-conserving
/// unitaries and run every observed heat through [`witness_from_heat`].
/// Pairs at equal temperature carry no witness bound and are skipped.
pub fn separable_control_suite(trials: usize, seed: u64) -> Result<SeparableControlReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SeparableControlReport {
        trials,
        max_reverse_flow: f64::NEG_INFINITY,
        max_mutual_information: 0.0,
        false_positives: 0,
    };
    for _ in 0..trials {
        let rho = random_separable_state(&mut rng);
        let u = random_energy_conserving_unitary_with(2, &mut rng);
        let out = rho.evolve(&u)?;
        let pops = [partial_trace(&rho, &[0])?.matrix().get(0, 0).re, partial_trace(&rho, &[1])?.matrix().get(0, 0).re];
        let beta_a = ThermalSpec::from_lambda(pops[0].min(0.5))?.beta();
        let beta_b = ThermalSpec::from_lambda(pops[1].min(0.5))?.beta();
        let i0 = mutual_information(&rho, &[0], &[1])?;
        report.max_mutual_information = report.max_mutual_information.max(i0);
        if (beta_a - beta_b).abs() < 1e-9 || !beta_a.is_finite() || !beta_b.is_finite() {
            continue;
        }
        let q_a = heat_flows(&rho, &out, &[0])?.heat[0];
        let verdict = witness_from_heat(q_a, beta_a, beta_b, 2)?;
        report.max_reverse_flow = report.max_reverse_flow.max(verdict.reverse_flow_magnitude);
        if verdict.certified_entangled {
            report.false_positives += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{PureState, C64};
    use crate::states::{rho_abc, w_state, WStateParams};
    use std::f64::consts::LN_2;

    #[test]
    fn verdict_threshold() {
        let v = witness_from_heat(0.0, 2.0, 1.0, 2).unwrap();
        assert!(!v.certified_entangled);
        assert_eq!(v.classical_bound, LN_2);
        // cold A (beta 2) hands 1.1 ln2 / |dbeta| to hot B
        let v = witness_from_heat(-1.1 * LN_2, 2.0, 1.0, 2).unwrap();
        assert!((v.reverse_flow_magnitude - 1.1 * LN_2).abs() < 1e-15);
        assert!(v.certified_entangled);
        // at the bound itself: not certified
        assert!(!witness_from_heat(-LN_2, 2.0, 1.0, 2).unwrap().certified_entangled);
        // hot-to-cold flow is never a witness
        assert!(!witness_from_heat(5.0, 2.0, 1.0, 2).unwrap().certified_entangled);
        assert!(witness_from_heat(0.1, 1.0, 1.0, 2).is_err());
        assert!(witness_from_heat(0.1, f64::INFINITY, 1.0, 2).is_err());
    }

    #[test]
    fn axis_includes_endpoint() {
        assert_eq!(axis(0.25, 1.0), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(axis(0.3, 0.5), vec![0.0, 0.3, 0.5]);
        assert_eq!(axis(0.02, 0.5).len(), 26);
    }

    #[test]
    fn scan_contains_bell_corner() {
        let pts = witness_region_scan(0.1, 0.2).unwrap();
        let bell = pts.iter().find(|p| p.lambda_a == 0.5 && p.lambda_c == 0.5 && p.gamma == 1.0).unwrap();
        assert!((bell.mutual_information - 2.0 * LN_2).abs() < 1e-9);
        assert!(bell.capable);
        let zero = pts.iter().find(|p| p.lambda_a == 0.0 && p.lambda_c == 0.0).unwrap();
        assert_eq!(zero.gamma, 0.0);
        assert!(zero.mutual_information.abs() < 1e-12 && !zero.capable);
        assert!(pts.iter().all(|p| RhoACParams::new(p.lambda_a, p.lambda_c, p.gamma).is_ok()));
        assert!(witness_region_scan(0.0, 0.2).is_err());
        assert!(witness_region_scan(0.1, 0.7).is_err());
    }

    #[test]
    fn hierarchy_examples() {
        let p = product_thermal_state(&[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(hierarchy_classify(&p, 1e-9).unwrap(), 3);
        let params = RhoACParams::new(0.15, 0.3, 0.4).unwrap();
        assert_eq!(hierarchy_classify(&rho_abc(&params, 0.2).unwrap(), 1e-9).unwrap(), 2);
        let w = w_state(&WStateParams::from_direction(&[0.4, 0.5, 0.6], 0.77).unwrap()).density();
        assert_eq!(hierarchy_classify(&w, 1e-9).unwrap(), 1);
    }

    #[test]
    fn hierarchy_rejects_coherent_marginal() {
        let plus = PureState::normalized(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).unwrap().density();
        assert!(hierarchy_classify(&plus, 1e-9).is_err());
    }

    #[test]
    fn arrow_range_examples() {
        let line = vec![vec![0.0], vec![1.0], vec![2.0]];
        let p = product_thermal_state(&[0.1, 0.2, 0.3]).unwrap();
        let prof = arrow_range(&p, &line, 1e-9).unwrap();
        assert_eq!(prof.ranges, vec![2.0, 1.0, 2.0]);

        let params = RhoACParams::new(0.15, 0.3, 0.4).unwrap();
        let prof = arrow_range(&rho_abc(&params, 0.2).unwrap(), &line, 1e-9).unwrap();
        assert_eq!(prof.ranges, vec![1.0, 0.0, 1.0]);
        assert!((prof.mean_range - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(prof.hierarchy_class, 2);

        // Bell pair at distance 3 with an uncorrelated qubit far away
        let bell = rho_ac(&RhoACParams::new(0.5, 0.5, 1.0).unwrap()).unwrap();
        let rho = bell.tensor(&product_thermal_state(&[0.2]).unwrap());
        let pos = vec![vec![0.0, 0.0], vec![3.0, 0.0], vec![0.0, 10.0]];
        let prof = arrow_range(&rho, &pos, 1e-9).unwrap();
        assert!(prof.ranges[0] < 3.0 && prof.ranges[1] < 3.0);
        assert!(arrow_range(&rho, &pos[..2], 1e-9).is_err());
    }

    #[test]
    fn separable_controls_stay_below_bound() {
        let r = separable_control_suite(100, 11).unwrap();
        assert_eq!(r.false_positives, 0);
        assert!(r.max_mutual_information <= LN_2 + 1e-9);
        assert!(r.max_reverse_flow <= LN_2);
    }
}
