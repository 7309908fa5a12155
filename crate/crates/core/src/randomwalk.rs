//! Random heat-exchange walks on the constant-energy slice of the marginal
//! polytope, with and without the thermodynamic arrow.
//!
//! The walk moves marginal temperatures directly; it does not evolve a
//! wavefunction. Every point of the slice is reachable from every other by
//! an energy-conserving unitary on some purification, which is what lets the
//! unconstrained walk roam freely.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::states::{polytope_contains_with_margin, MarginalVector, POLYTOPE_TOL};
use crate::thermo::arrow_sum;

pub const DEFAULT_STEP_MAX: f64 = 0.005;
/// Proposals leaving the polytope are redrawn at most this many times.
pub const RETRY_CAP: usize = 100;
/// Populations closer than this count as equal temperatures.
pub const TIE_TOL: f64 = 1e-12;

/// Temperature ordering of three qubits (a, b, c).
///
/// The six strict orderings are numbered in lexicographic order of the
/// permutation sorting the qubits from coldest to hottest:
/// I `a<b<c`, II `a<c<b`, III `b<a<c`, IV `b<c<a`, V `c<a<b`, VI `c<b<a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    Ordered(u8),
    Boundary,
    Equilibrium,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Ordered(k) => f.write_str(["I", "II", "III", "IV", "V", "VI"][(*k - 1) as usize]),
            Region::Boundary => f.write_str("boundary"),
            Region::Equilibrium => f.write_str("equilibrium"),
        }
    }
}

/// Label a three-qubit point by its temperature ordering. Temperature grows
/// with the excited population, so the populations are compared directly.
pub fn region_of(mv: &MarginalVector) -> Result<Region> {
    let l = mv.lambdas();
    if l.len() != 3 {
        return Err(Error::param(format!("regions are defined for three qubits, got {}", l.len())));
    }
    let tie = |i: usize, j: usize| (l[i] - l[j]).abs() <= TIE_TOL;
    let ties = [tie(0, 1), tie(0, 2), tie(1, 2)];
    if ties.iter().all(|&t| t) {
        return Ok(Region::Equilibrium);
    }
    if ties.iter().any(|&t| t) {
        return Ok(Region::Boundary);
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| l[i].total_cmp(&l[j]));
    let k = match order {
        [0, 1, 2] => 1,
        [0, 2, 1] => 2,
        [1, 0, 2] => 3,
        [1, 2, 0] => 4,
        [2, 0, 1] => 5,
        _ => 6,
    };
    Ok(Region::Ordered(k))
}

/// Move `delta` of energy from one uniformly chosen qubit to another.
/// Candidates outside the polytope are redrawn; after [`RETRY_CAP`] failures
/// the current point is returned with `false`.
pub fn propose_step(current: &MarginalVector, step_max: f64, rng: &mut impl Rng) -> (MarginalVector, bool) {
    let n = current.len();
    for _ in 0..RETRY_CAP {
        let i = rng.random_range(0..n);
        let j = (i + rng.random_range(1..n)) % n;
        // (0, step_max]
        let delta = step_max * (1.0 - rng.random::<f64>());
        let mut next = current.lambdas().to_vec();
        next[i] += delta;
        next[j] -= delta;
        if polytope_contains_with_margin(&next, POLYTOPE_TOL).inside {
            return (MarginalVector::new(next).expect("checked above"), true);
        }
    }
    (current.clone(), false)
}

/// `sum_j beta_j Q_j` for the move `current -> candidate`, with inverse
/// temperatures taken before the move. A qubit at zero temperature makes the
/// sum `+inf` when it gains heat and `-inf` when it loses heat.
pub fn arrow_residual(current: &MarginalVector, candidate: &MarginalVector) -> f64 {
    let heats: Vec<f64> = candidate.lambdas().iter().zip(current.lambdas()).map(|(c, p)| c - p).collect();
    arrow_sum(&heats, &current.betas())
}

pub fn accept_step(current: &MarginalVector, candidate: &MarginalVector, constrained: bool) -> bool {
    !constrained || arrow_residual(current, candidate) >= 0.0
}

#[derive(Clone, Debug, PartialEq)]
pub struct WalkConfig {
    pub initial: MarginalVector,
    pub constrained: bool,
    pub step_max: f64,
    pub num_steps: usize,
    pub seed: u64,
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_max.is_finite() && self.step_max > 0.0) {
            return Err(Error::param(format!("step_max = {} must be positive", self.step_max)));
        }
        if self.initial.len() < 2 {
            return Err(Error::param("walks need at least two qubits"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WalkTrajectory {
    /// `num_steps + 1` points starting with the initial one.
    pub points: Vec<MarginalVector>,
    /// Region of every point; empty for walks that are not on three qubits.
    pub regions: Vec<Region>,
    /// Whether step `k` (leading to point `k + 1`) moved.
    pub accepted: Vec<bool>,
    /// Accepted constrained steps whose arrow residual was below `-1e-12`.
    pub arrow_violations: usize,
}

impl WalkTrajectory {
    pub fn last(&self) -> &MarginalVector {
        self.points.last().expect("trajectory holds the initial point")
    }

    pub fn distinct_ordered_regions(&self) -> usize {
        let mut seen = [false; 6];
        for r in &self.regions {
            if let Region::Ordered(k) = r {
                seen[(*k - 1) as usize] = true;
            }
        }
        seen.iter().filter(|&&s| s).count()
    }
}

/// Run a seeded walk.
///
/// Step `k` draws its proposals from stream `k` of the seeded generator, so a
/// constrained and an unconstrained walk with the same seed see the same
/// proposals whenever they stand at the same point.
pub fn run_walk(config: &WalkConfig) -> Result<WalkTrajectory> {
    config.validate()?;
    let three = config.initial.len() == 3;
    let mut current = config.initial.clone();
    let mut points = Vec::with_capacity(config.num_steps + 1);
    let mut regions = Vec::new();
    let mut accepted = Vec::with_capacity(config.num_steps);
    let mut arrow_violations = 0;
    if three {
        regions.reserve(config.num_steps + 1);
        regions.push(region_of(&current)?);
    }
    points.push(current.clone());

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for step in 0..config.num_steps {
        rng.set_stream(step as u64);
        rng.set_word_pos(0);
        let (candidate, moved) = propose_step(&current, config.step_max, &mut rng);
        let ok = moved && accept_step(&current, &candidate, config.constrained);
        if ok {
            if config.constrained && arrow_residual(&current, &candidate) < -1e-12 {
                arrow_violations += 1;
            }
            current = candidate;
        }
        accepted.push(ok);
        if three {
            regions.push(region_of(&current)?);
        }
        points.push(current.clone());
    }
    Ok(WalkTrajectory { points, regions, accepted, arrow_violations })
}

/// `max_ij |T_i - T_j|`; infinite when a qubit sits at `lambda = 1/2`.
pub fn temperature_spread(mv: &MarginalVector) -> f64 {
    let t = mv.temperatures();
    let max = t.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = t.iter().copied().fold(f64::INFINITY, f64::min);
    if max.is_infinite() && min.is_infinite() {
        0.0
    } else {
        max - min
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mv(l: &[f64]) -> MarginalVector {
        MarginalVector::new(l.to_vec()).unwrap()
    }

    #[test]
    fn region_labels() {
        assert_eq!(region_of(&mv(&[0.1, 0.2, 0.3])).unwrap(), Region::Ordered(1));
        assert_eq!(region_of(&mv(&[0.3, 0.2, 0.1])).unwrap(), Region::Ordered(6));
        assert_eq!(region_of(&mv(&[0.2, 0.3, 0.1])).unwrap(), Region::Ordered(5));
        assert_eq!(region_of(&mv(&[0.2, 0.2, 0.3])).unwrap(), Region::Boundary);
        assert_eq!(region_of(&mv(&[0.2, 0.2, 0.2])).unwrap(), Region::Equilibrium);
        assert!(region_of(&mv(&[0.2, 0.2])).is_err());
        assert_eq!(Region::Ordered(4).to_string(), "IV");
    }

    #[test]
    fn origin_has_no_moves() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (next, moved) = propose_step(&mv(&[0.0, 0.0, 0.0]), 0.01, &mut rng);
        assert!(!moved);
        assert_eq!(next.lambdas(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn proposals_conserve_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let start = mv(&[0.2, 0.2, 0.2]);
        for _ in 0..200 {
            let (next, moved) = propose_step(&start, 0.01, &mut rng);
            assert!(moved);
            assert!((next.energy() - 0.6).abs() < 1e-15);
        }
    }

    #[test]
    fn arrow_acceptance() {
        let cur = mv(&[0.1, 0.2, 0.3]);
        // c (hot) gives to a (cold)
        assert!(accept_step(&cur, &mv(&[0.11, 0.2, 0.29]), true));
        assert!(!accept_step(&cur, &mv(&[0.09, 0.21, 0.3]), true));
        assert!(accept_step(&cur, &mv(&[0.09, 0.21, 0.3]), false));
        let tie = mv(&[0.1, 0.25, 0.25]);
        assert!(accept_step(&tie, &mv(&[0.1, 0.26, 0.24]), true));
        // zero temperature qubit may only receive heat
        let cold = mv(&[0.0, 0.25, 0.25]);
        assert!(accept_step(&cold, &mv(&[0.01, 0.24, 0.25]), true));
    }

    #[test]
    fn zero_steps() {
        let cfg =
            WalkConfig { initial: mv(&[0.1, 0.2, 0.3]), constrained: true, step_max: 0.005, num_steps: 0, seed: 3 };
        let t = run_walk(&cfg).unwrap();
        assert_eq!(t.points.len(), 1);
        assert_eq!(t.regions, vec![Region::Ordered(1)]);
        assert!(t.accepted.is_empty());
    }

    #[test]
    fn walk_is_seeded_and_on_slice() {
        let cfg =
            WalkConfig { initial: mv(&[0.1, 0.2, 0.3]), constrained: false, step_max: 0.01, num_steps: 500, seed: 5 };
        let a = run_walk(&cfg).unwrap();
        assert_eq!(a, run_walk(&cfg).unwrap());
        assert!(a.points.iter().all(|p| (p.energy() - 0.6).abs() <= 1e-12));
        let bad = WalkConfig { step_max: 0.0, ..cfg };
        assert!(run_walk(&bad).is_err());
    }

    #[test]
    fn constrained_walk_cools_spread() {
        let start = mv(&[0.1, 0.2, 0.3]);
        let cfg = WalkConfig { initial: start.clone(), constrained: true, step_max: 0.005, num_steps: 5000, seed: 8 };
        let t = run_walk(&cfg).unwrap();
        assert_eq!(t.arrow_violations, 0);
        assert!(temperature_spread(t.last()) < temperature_spread(&start));
    }

    #[test]
    fn spread_values() {
        assert_eq!(temperature_spread(&mv(&[0.2, 0.2, 0.2])), 0.0);
        assert!(temperature_spread(&mv(&[0.5, 0.2, 0.3])).is_infinite());
        assert_eq!(temperature_spread(&mv(&[0.5, 0.5, 0.5])), 0.0);
    }
}
