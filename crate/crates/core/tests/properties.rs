mod common;

use std::sync::Arc;

use dynmeasure::interval::{interval_representation, sup_distance, IntervalRepresentation};
use dynmeasure::transport::{bottleneck_of_plan, feasible_at_threshold};
use dynmeasure::{hausdorff, w_infinity, w_infinity_bruteforce, w_p, DiscreteMeasure, FiniteMetricSpace};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Pair {
    space: Arc<FiniteMetricSpace>,
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
}

fn pair(seed: u64, n: usize, den: u32) -> Pair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = if seed.is_multiple_of(2) {
        common::random_space(&mut rng, n)
    } else {
        common::grid_space(&mut rng, n)
    };
    let mu = common::random_measure(&mut rng, &space, 5, den);
    let nu = common::random_measure(&mut rng, &space, 5, den);
    Pair { space, mu, nu }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn solver_matches_subset_oracle(seed in any::<u64>(), n in 2usize..8, den in 1u32..17) {
        let p = pair(seed, n, den);
        let rep = w_infinity(&p.mu, &p.nu).unwrap();
        prop_assert_eq!(rep.value, w_infinity_bruteforce(&p.mu, &p.nu).unwrap());
        rep.plan.validate().unwrap();
        prop_assert_eq!(bottleneck_of_plan(&rep.plan), rep.value);
    }

    #[test]
    fn hausdorff_and_wp_below_bottleneck(seed in any::<u64>(), n in 2usize..8, den in 1u32..17) {
        let p = pair(seed, n, den);
        let d = w_infinity(&p.mu, &p.nu).unwrap().value;
        let h = hausdorff(&p.space, &p.mu.support(), &p.nu.support()).unwrap();
        prop_assert!(h <= d + 1e-12);
        let w1 = w_p(&p.mu, &p.nu, 1).unwrap();
        let w2 = w_p(&p.mu, &p.nu, 2).unwrap();
        prop_assert!(w1 <= w2 + 1e-12);
        prop_assert!(w2 <= d + 1e-12);
    }

    #[test]
    fn feasibility_is_monotone(seed in any::<u64>(), n in 2usize..7) {
        let p = pair(seed, n, 8);
        let d = w_infinity(&p.mu, &p.nu).unwrap().value;
        for t in p.space.distinct_distances().into_iter().chain([0.0]) {
            prop_assert_eq!(feasible_at_threshold(&p.mu, &p.nu, t).unwrap(), t >= d);
        }
    }

    #[test]
    fn representations_bound_bottleneck(seed in any::<u64>(), n in 2usize..8) {
        let p = pair(seed, n, 12);
        let rep = w_infinity(&p.mu, &p.nu).unwrap();
        let f = interval_representation(&p.mu).unwrap();
        let g = interval_representation(&p.nu).unwrap();
        prop_assert!(sup_distance(&f, &g).unwrap() >= rep.value);
        prop_assert_eq!(f.pushforward_lebesgue(), p.mu.clone());
        // laying both measures out along an optimal plan attains the value
        let fp = IntervalRepresentation::from_chunks(&p.space, rep.plan.entries.iter().map(|e| (e.source, e.mass.clone()))).unwrap();
        let gp = IntervalRepresentation::from_chunks(&p.space, rep.plan.entries.iter().map(|e| (e.target, e.mass.clone()))).unwrap();
        prop_assert_eq!(sup_distance(&fp, &gp).unwrap(), rep.value);
    }

    #[test]
    fn pushforward_keeps_mass_and_contracts_under_isometry(seed in any::<u64>(), n in 2usize..8) {
        let p = pair(seed, n, 10);
        let map: Vec<usize> = (0..n).map(|i| (i * 7 + seed as usize) % n).collect();
        let pushed = p.mu.pushforward(&map).unwrap();
        prop_assert_eq!(pushed.total_mass(), p.mu.total_mass());
        prop_assert!(pushed.support().iter().all(|a| map.contains(a)));
        let identity: Vec<usize> = (0..n).collect();
        prop_assert_eq!(p.mu.pushforward(&identity).unwrap(), p.mu.clone());
    }

    #[test]
    fn triangle_inequality(seed in any::<u64>(), n in 2usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let space = common::random_space(&mut rng, n);
        let m: Vec<DiscreteMeasure> = (0..3).map(|_| common::random_measure(&mut rng, &space, 4, 8)).collect();
        let d = |a: &DiscreteMeasure, b: &DiscreteMeasure| w_infinity(a, b).unwrap().value;
        prop_assert!(d(&m[0], &m[2]) <= d(&m[0], &m[1]) + d(&m[1], &m[2]) + 1e-12);
        prop_assert_eq!(d(&m[0], &m[1]), d(&m[1], &m[0]));
        prop_assert_eq!(d(&m[0], &m[0]), 0.0);
        prop_assert_eq!(d(&m[0], &m[1]) == 0.0, m[0] == m[1]);
    }

    #[test]
    fn space_metric_axioms(seed in any::<u64>(), n in 2usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = common::random_space(&mut rng, n);
        prop_assert!(s.validate().is_ok());
        for i in 0..n {
            prop_assert_eq!(s.d(i, i), 0.0);
            for j in 0..n {
                prop_assert_eq!(s.d(i, j), s.d(j, i));
            }
        }
    }
}
