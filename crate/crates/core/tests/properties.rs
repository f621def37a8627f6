mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use splicekit::dcurve::nu;
use splicekit::graph::{blow_up_edge, parse_graph, to_text};
use splicekit::harness::{identity_suite, random_graph, RandomGraphSpec};
use splicekit::lattice::discriminant_group;
use splicekit::semigroup::rooted_char_system;
use splicekit::splice::linking_matrix;
use splicekit::{Int, ResolutionGraph};

fn graph(seed: u64, max: usize) -> ResolutionGraph {
    random_graph(&mut ChaCha8Rng::seed_from_u64(seed), &RandomGraphSpec::new(1, max, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn suite_passes(seed in any::<u64>()) {
        let g = graph(seed, 9);
        let rep = identity_suite(&g).unwrap();
        let bad: Vec<_> = rep.failures().collect();
        prop_assert!(bad.is_empty(), "{:?}\n{}", bad, to_text(&g));
    }

    #[test]
    fn text_round_trip(seed in any::<u64>()) {
        let g = graph(seed, 10);
        prop_assert_eq!(parse_graph(&to_text(&g)).unwrap(), g);
    }

    #[test]
    fn blow_up_keeps_curve_invariants(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let g = graph(seed, 7);
        prop_assume!(!g.edges().is_empty());
        let e = g.edges()[pick.index(g.edges().len())];
        let h = blow_up_edge(&g, e).unwrap();
        let (dg, dh) = (discriminant_group::<Int>(&g).unwrap(), discriminant_group::<Int>(&h).unwrap());
        prop_assert_eq!(dg.elementary_divisors(), dh.elementary_divisors());
        for root in g.leaves() {
            let a = rooted_char_system(&g, root).unwrap();
            let b = rooted_char_system(&h, root).unwrap();
            prop_assert_eq!(a.r(), b.r());
            prop_assert_eq!(a.delta().unwrap().delta, b.delta().unwrap().delta);
            prop_assert_eq!(nu(&g, root).unwrap().value, nu(&h, root).unwrap().value);
        }
    }

    #[test]
    fn linking_matches_rational_inverse(seed in any::<u64>()) {
        let g = graph(seed, 8);
        let lk = linking_matrix::<i64>(&g).unwrap();
        let or = common::linking(&g);
        prop_assert_eq!(*lk.order() as i128, or.order);
        for &v in &or.ids {
            for &w in &or.ids {
                prop_assert_eq!(lk.at(v, w) as i128, or.at(v, w));
            }
        }
    }
}
