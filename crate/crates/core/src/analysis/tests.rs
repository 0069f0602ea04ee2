use super::*;
use crate::catalog::{make_pair, numeric_pair, FamilyId};
use crate::special::{bessel_i, BesselOrder};
use approx::assert_relative_eq;

fn pair_of(text: &str) -> SolutionPair {
    make_pair(&FamilyId::parse(text).unwrap()).unwrap()
}

fn log_grid(lo: f64, hi: f64) -> Vec<f64> {
    GridSpec::log(lo, hi, 200).radii().unwrap()
}

#[test]
fn residual_of_exact_solutions_is_small() {
    let free = PotentialSpec::zero();
    let line = |r: f64| (r, 1.0);
    assert!(residual(&free, &line, &log_grid(0.1, 50.0)) < 1e-10);

    let pair = pair_of("inverse-quartic-74:g=1");
    let phi = pair.regular();
    assert!(residual(&pair.potential, &*phi, &log_grid(0.1, 20.0)) < 1e-8);
}

#[test]
fn residual_detects_corruption() {
    let free = PotentialSpec::zero();
    let bent = |r: f64| (r + 0.01 * r * r, 1.0 + 0.02 * r);
    assert!(residual(&free, &bent, &log_grid(0.1, 20.0)) > 1.0);

    let pair = pair_of("exponential-70");
    let phi = pair.regular();
    let scaled = move |r: f64| {
        let (p, d) = phi(r);
        (p * (1.0 + 0.01 * r / (1.0 + r)), d)
    };
    assert!(residual(&pair.potential, &scaled, &log_grid(1e-2, 30.0)) > 1e-3);
}

#[test]
fn residual_profile_is_pointwise() {
    let free = PotentialSpec::zero();
    let line = |r: f64| (r, 1.0);
    let grid = log_grid(0.5, 5.0);
    let profile = residual_profile(&free, &line, &grid);
    assert_eq!(profile.len(), grid.len());
}

#[test]
fn node_counts() {
    assert_eq!(count_nodes(&|r| r, (0.0, 50.0), 0).unwrap(), 0);
    assert_eq!(count_nodes(&|r: f64| r.sin(), (0.0, 20.0), 0).unwrap(), 6);
    assert_eq!(count_nodes(&|r: f64| r * r * (r - 3.0), (0.0, 10.0), 1).unwrap(), 1);
    assert!(count_nodes(&|r| r, (5.0, 1.0), 0).is_err());
}

#[test]
fn node_count_unstable_for_unresolved_oscillation() {
    let f = |r: f64| (1.0 / r).sin();
    assert!(matches!(count_nodes(&f, (0.0, 1.0), 0), Err(Error::Unstable { .. })));
}

#[test]
fn attractive_exponential_has_one_node() {
    let v = PotentialSpec::from_fn("well", |r: f64| -5.0 * (-r).exp());
    let sol = crate::numerics::solve_regular(&v, 50.0, &Tolerance::default()).unwrap();
    assert_eq!(count_nodes(&|r| sol.eval(r).0, (0.0, 50.0), 0).unwrap(), 1);
}

#[test]
fn bargmann_integrals() {
    let well = PotentialSpec::from_fn("well", |r: f64| -5.0 * (-r).exp());
    assert_relative_eq!(bargmann_bound(&well).unwrap(), 5.0, max_relative = 1e-9);
    assert_eq!(bargmann_bound(&PotentialSpec::zero()).unwrap(), 0.0);
    let v23 = pair_of("inverse-square-quartic-23:g=4,b=1").potential;
    assert_relative_eq!(bargmann_bound(&v23).unwrap(), 2.0, max_relative = 1e-9);
    let coulomb = pair_of("coulomb").potential;
    assert!(matches!(bargmann_bound(&coulomb), Err(Error::NonConvergent { .. })));
    let quartic = pair_of("inverse-quartic-74").potential;
    assert!(bargmann_bound(&quartic).is_err());
}

#[test]
fn tail_fits() {
    let fit = asymptotic_fit(&|r| r, 0, (35.0, 50.0)).unwrap();
    assert_relative_eq!(fit.tail.a, 1.0, max_relative = 1e-12);
    assert!(fit.tail.b.abs() < 1e-9);

    let exp = pair_of("exponential-70:lambda=1,mu=1");
    let fit = asymptotic_fit(&|r| exp.phi(r), 0, (42.0, 60.0)).unwrap();
    let i02 = bessel_i(BesselOrder::ZERO, 2.0).unwrap();
    assert_relative_eq!(fit.tail.a, i02, max_relative = 1e-9);

    let rat = pair_of("rational-exp-22:lambda=1,a=1");
    let fit = asymptotic_fit(&|r| rat.phi(r), 0, fit_window(&rat)).unwrap();
    assert_relative_eq!(fit.tail.a, 1f64.sinh(), max_relative = 1e-6);
    assert!(fit.tail.b < 0.0);

    let p = pair_of("inverse-power-72:g=1,n=6,ell=1");
    let fit = asymptotic_fit(&|r| p.phi(r), 1, (700.0, 1000.0)).unwrap();
    assert_relative_eq!(fit.tail.a, 1.0, max_relative = 1e-9);
}

#[test]
fn poor_fit_is_reported() {
    let err = asymptotic_fit(&|r: f64| r * r, 0, (1.0, 10.0)).unwrap_err();
    assert!(matches!(err, Error::PoorFit { .. }));
    assert!(asymptotic_fit(&|r| r, 0, (2.0, 1.0)).is_err());
}

#[test]
fn certification() {
    assert!(certify_no_bound_states(&pair_of("free")).certified);
    let rat = certify_no_bound_states(&pair_of("rational-exp-22"));
    assert!(rat.certified);
    assert!(rat.tail_slope.unwrap() > 1.0);
    assert!(certify_no_bound_states(&pair_of("coulomb")).certified);

    let well = PotentialSpec::from_fn("well", |r: f64| -5.0 * (-r).exp());
    let pair = numeric_pair(&well, 40.0, &Tolerance::default()).unwrap();
    let cert = certify_no_bound_states(&pair);
    assert!(!cert.certified);
    assert_eq!(cert.node_count, 1);
}

#[test]
fn verification_reports() {
    for family in FamilyId::all_defaults() {
        let Ok(pair) = make_pair(&family) else {
            continue;
        };
        let report = verify_pair(&pair).unwrap();
        assert!(report.passed(), "{family}: {:?}", report.failures());
        if let Some(b) = report.bargmann_bound {
            assert!(report.node_count as f64 <= b.floor().max(0.0) + 1e-12);
        }
    }
    let report = verify_pair(&pair_of("free")).unwrap();
    let json = serde_json::to_value(&report).unwrap();
    assert_eq!(json["node_count"], 0);
    assert!(json["flags"].as_array().unwrap().len() >= 3);
}
