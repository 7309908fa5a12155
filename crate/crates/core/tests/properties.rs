use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use thermal_arrow::dynamics::{heat_flows, random_energy_conserving_unitary_with, total_energy};
use thermal_arrow::quantum::{partial_trace, random_density_matrix, von_neumann_entropy};
use thermal_arrow::randomwalk::{region_of, Region};
use thermal_arrow::states::{polytope_contains, rho_ac, w_state, MarginalVector, RhoACParams, WStateParams};
use thermal_arrow::thermo::{mutual_information, product_thermal_state, ThermalSpec};
use thermal_arrow::witness::witness_from_heat;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn energy_conserving_unitaries_keep_energy(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density_matrix(n, &mut rng);
        let u = random_energy_conserving_unitary_with(n, &mut rng);
        let after = rho.evolve(&u).unwrap();
        prop_assert!((total_energy(&after) - total_energy(&rho)).abs() < 1e-10);
        prop_assert!((after.matrix().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn heat_sums_to_zero(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density_matrix(3, &mut rng);
        let u = random_energy_conserving_unitary_with(3, &mut rng);
        let rec = heat_flows(&rho, &rho.evolve(&u).unwrap(), &[0]).unwrap();
        prop_assert!(rec.heat.iter().sum::<f64>().abs() < 1e-10);
    }

    #[test]
    fn product_states_carry_no_mutual_information(la in 0.0f64..=0.5, lb in 0.0f64..=0.5) {
        let rho = product_thermal_state(&[la, lb]).unwrap();
        prop_assert!(mutual_information(&rho, &[0], &[1]).unwrap().abs() < 1e-10);
    }

    #[test]
    fn mutual_information_is_nonnegative(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density_matrix(3, &mut rng);
        prop_assert!(mutual_information(&rho, &[0], &[1, 2]).unwrap() > -1e-10);
    }

    #[test]
    fn beta_and_lambda_round_trip(lambda in 1e-6f64..0.5) {
        let b = ThermalSpec::from_lambda(lambda).unwrap().beta();
        prop_assert!(b >= 0.0);
        prop_assert!((1.0 / (1.0 + b.exp()) - lambda).abs() < 1e-12);
    }

    #[test]
    fn w_state_marginals_lie_in_polytope(
        dir in prop::collection::vec(-1.0f64..1.0, 3..=5),
        frac in 0.0f64..=1.0,
    ) {
        prop_assume!(dir.iter().any(|x| x.abs() > 1e-3));
        let n = dir.len();
        let energy = frac * (n - 1) as f64 / 2.0;
        let params = WStateParams::from_direction(&dir, energy).unwrap();
        let lambdas = params.lambdas();
        prop_assert!(polytope_contains(&lambdas).inside);
        prop_assert!((lambdas.iter().sum::<f64>() - energy).abs() < 1e-12);
        let rho = w_state(&params).density();
        for (q, l) in lambdas.iter().enumerate() {
            let s = partial_trace(&rho, &[q]).unwrap().spectrum();
            prop_assert!((s[0] - l).abs() < 1e-10);
        }
    }

    #[test]
    fn polytope_rejects_a_dominant_coordinate(a in 0.2f64..=0.5, b in 0.0f64..0.1, c in 0.0f64..0.1) {
        prop_assume!(a > b + c + 1e-9);
        prop_assert!(!polytope_contains(&[a, b, c]).inside);
    }

    #[test]
    fn rho_ac_is_a_state_with_thermal_marginals(la in 0.0f64..=0.5, lc in 0.0f64..=0.5, t in 0.0f64..=1.0) {
        let lo = (la - lc).abs();
        let hi = (la + lc).min(2.0 - la - lc);
        let g = lo + t * (hi - lo);
        let rho = rho_ac(&RhoACParams::new(la, lc, g).unwrap()).unwrap();
        prop_assert!(rho.spectrum()[0] > -1e-10);
        prop_assert!((partial_trace(&rho, &[0]).unwrap().matrix().get(0, 0).re - la).abs() < 1e-12);
        prop_assert!((partial_trace(&rho, &[1]).unwrap().matrix().get(0, 0).re - lc).abs() < 1e-12);
        prop_assert!(von_neumann_entropy(&rho).unwrap() >= -1e-12);
    }

    #[test]
    fn strict_orderings_get_ordered_regions(a in 0.05f64..0.45, b in 0.05f64..0.45, c in 0.05f64..0.45) {
        prop_assume!((a - b).abs() > 1e-6 && (b - c).abs() > 1e-6 && (a - c).abs() > 1e-6);
        if let Ok(mv) = MarginalVector::new(vec![a, b, c]) {
            prop_assert!(matches!(region_of(&mv).unwrap(), Region::Ordered(1..=6)));
        }
    }

    #[test]
    fn witness_needs_heat_against_the_gradient(q in -1.0f64..1.0, la in 0.01f64..0.49, lb in 0.01f64..0.49) {
        prop_assume!((la - lb).abs() > 1e-6);
        let (ba, bb) = (ThermalSpec::from_lambda(la).unwrap().beta(), ThermalSpec::from_lambda(lb).unwrap().beta());
        let v = witness_from_heat(q, ba, bb, 2).unwrap();
        if q * (ba - bb) >= 0.0 {
            prop_assert!(!v.certified_entangled);
        }
    }
}
