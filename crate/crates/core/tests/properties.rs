use proptest::prelude::*;

use zepot::analysis::{bargmann_bound, count_nodes};
use zepot::catalog::{make_pair, make_potential, FamilyId};
use zepot::cli::parse_grid;
use zepot::numerics::{solve_regular, Tolerance};
use zepot::potential::PotentialSpec;
use zepot::transform::{build_mapping, compose};

fn closed_pair() -> impl Strategy<Value = FamilyId> {
    prop_oneof![
        (0.1f64..5.0, 0.2f64..3.0).prop_map(|(lambda, a)| FamilyId::RationalExp22 { lambda, a }),
        (1.2f64..10.0, 0.3f64..3.0).prop_map(|(g, b)| FamilyId::InverseSquareQuartic23 { g, b }),
        (0.1f64..4.0, 0.3f64..3.0).prop_map(|(lambda, mu)| FamilyId::Exponential70 { lambda, mu }),
        (0.2f64..4.0).prop_map(|g| FamilyId::InverseQuartic74 { g }),
        (0.1f64..3.0, 3.5f64..8.0).prop_map(|(g, n)| FamilyId::InversePower72 { g, n, ell: 0 }),
        (0.1f64..3.0, 0.2f64..2.0, 1.5f64..4.0).prop_map(|(alpha, beta, n)| FamilyId::ChiRational79 { alpha, beta, n }),
        (0.2f64..3.0).prop_map(|mu| FamilyId::ChiExponential82 { mu }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn wronskian_is_one(family in closed_pair(), t in 0.0f64..1.0) {
        let pair = make_pair(&family).unwrap();
        let (lo, hi) = pair.working_range;
        let hi = hi.min(100.0);
        let r = lo * (hi / lo).powf(t);
        let w = pair.wronskian(r);
        prop_assert!((w - 1.0).abs() < 1e-8, "{family} W({r}) = {w}");
    }

    #[test]
    fn regular_solution_has_no_nodes(family in closed_pair(), t in 0.0f64..1.0) {
        let pair = make_pair(&family).unwrap();
        let r = 1e-2 * 1e4f64.powf(t);
        // φ underflows to zero near strongly singular origins
        prop_assert!(pair.phi(r) >= 0.0 && pair.chi(r) > 0.0);
    }

    #[test]
    fn mapping_is_monotone_and_invertible(
        lambda in 0.1f64..5.0,
        a in 0.2f64..3.0,
        r in 1e-4f64..100.0,
        step in 1e-3f64..10.0,
    ) {
        let pair = make_pair(&FamilyId::RationalExp22 { lambda, a }).unwrap();
        let map = build_mapping(&pair, 60.0).unwrap();
        prop_assert!(map.forward(r + step) > map.forward(r));
        let back = map.inverse(map.forward(r)).unwrap();
        prop_assert!((back - r).abs() <= 1e-10 * r);
    }

    #[test]
    fn free_base_leaves_inner_unchanged(lambda in -8.0f64..8.0, mu in 0.3f64..3.0, r in 1e-3f64..30.0) {
        let free = make_pair(&FamilyId::Free { ell: 0 }).unwrap();
        let inner = make_potential(&FamilyId::Exponential70 { lambda, mu }).unwrap();
        let sys = compose(&free, &inner).unwrap();
        prop_assert_eq!(sys.value(r), inner.value(r));
    }

    #[test]
    fn chi_limit_times_slope_is_one(lambda in 0.1f64..4.0, mu in 0.5f64..3.0) {
        let pair = make_pair(&FamilyId::Exponential70 { lambda, mu }).unwrap();
        let far = 80.0 / mu;
        let product = pair.chi(far) * pair.tail.a;
        prop_assert!((product - 1.0).abs() < 1e-8, "chi(inf) A = {product}");
    }

    #[test]
    fn grid_spec_round_trip(lo in 1e-4f64..1.0, span in 1.5f64..1e3, n in 2usize..500) {
        let hi = lo * span;
        let grid = parse_grid(&format!("log:{lo:e},{hi:e},{n}")).unwrap().radii().unwrap();
        prop_assert_eq!(grid.len(), n);
        prop_assert!((grid[0] - lo).abs() <= 1e-12 * lo);
        prop_assert!((grid[n - 1] - hi).abs() <= 1e-12 * hi);
        prop_assert!(grid.windows(2).all(|w| w[1] > w[0]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn nodes_never_exceed_bargmann(depth in 0.1f64..25.0, mu in 0.5f64..2.0) {
        let well = PotentialSpec::from_fn("well", move |r: f64| -depth * (-mu * r).exp());
        let bound = bargmann_bound(&well).unwrap();
        prop_assert!((bound - depth / (mu * mu)).abs() < 1e-8 * bound);
        let sol = solve_regular(&well, 40.0 / mu, &Tolerance::default()).unwrap();
        let nodes = count_nodes(&|r| sol.eval(r).0, (0.0, 40.0 / mu), 0).unwrap();
        prop_assert!(nodes as f64 <= bound, "{nodes} nodes, bound {bound}");
    }

    #[test]
    fn composition_preserves_node_count(depth in 0.1f64..12.0, lambda in 0.2f64..3.0) {
        let base = make_pair(&FamilyId::RationalExp22 { lambda, a: 1.0 }).unwrap();
        let inner = make_potential(&FamilyId::Exponential70 { lambda: -depth, mu: 1.0 }).unwrap();
        let sys = compose(&base, &inner).unwrap();
        let x_max = sys.mapping.forward(sys.r_max);
        let inner_sol = solve_regular(&inner, x_max, &Tolerance::default()).unwrap();
        let inner_nodes = count_nodes(&|x| inner_sol.eval(x).0, (0.0, x_max), 0).unwrap();
        let phi = sys.solution();
        let composed_nodes = count_nodes(&|r| phi(r).0, (0.0, sys.r_max), 0).unwrap();
        prop_assert_eq!(inner_nodes, composed_nodes);
    }
}
