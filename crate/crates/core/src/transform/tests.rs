use super::*;
use crate::catalog::{make_pair, make_potential, numeric_pair, FamilyId};
use approx::assert_relative_eq;

fn pair_of(text: &str) -> SolutionPair {
    make_pair(&FamilyId::parse(text).unwrap()).unwrap()
}

fn potential_of(text: &str) -> PotentialSpec {
    make_potential(&FamilyId::parse(text).unwrap()).unwrap()
}

fn quartic_phi() -> RegularFn {
    Arc::new(|r: f64| {
        if r == 0.0 {
            return (0.0, 0.0);
        }
        let e = (-1.0 / r).exp();
        (r * e, e * (1.0 + 1.0 / r))
    })
}

#[test]
fn chi_from_phi_recovers_sinh_form() {
    let chi = chi_from_phi(quartic_phi(), &TailModel::linear(1.0, -1.0), 0, &Tolerance::default()).unwrap();
    for r in [0.05, 0.3, 1.0, 4.0, 50.0, 500.0] {
        let (c, dc) = chi.eval(r).unwrap();
        let s = 1.0 / r;
        assert_relative_eq!(c, r * s.sinh(), max_relative = 1e-9);
        assert_relative_eq!(dc, s.sinh() - s.cosh() / r, max_relative = 1e-8, epsilon = 1e-12);
    }
}

#[test]
fn chi_from_phi_origin_values() {
    let pair = pair_of("rational-exp-22:lambda=1,a=1");
    let chi = chi_from_phi(pair.regular(), &pair.tail, 0, &Tolerance::default().with_rel(1e-12)).unwrap();
    let (c0, dc0) = chi.eval(0.0).unwrap();
    assert_relative_eq!(c0, 1.0, max_relative = 1e-12);
    // 1 - coth(1)
    assert_relative_eq!(dc0, -0.3130352854993313, max_relative = 1e-7);
    assert_relative_eq!(chi.eval(1.0).unwrap().0, 0.8868188839700739, max_relative = 1e-10);
}

#[test]
fn chi_from_phi_rejects_nodes_and_resonances() {
    let oscillating: RegularFn = Arc::new(|r: f64| (r.sin(), r.cos()));
    assert!(matches!(
        chi_from_phi(oscillating, &TailModel::none(), 0, &Tolerance::default()),
        Err(Error::NoBoundStateViolation { .. })
    ));
    let free: RegularFn = Arc::new(|r: f64| (r, 1.0));
    assert!(matches!(
        chi_from_phi(free, &TailModel::linear(0.0, 1.0), 0, &Tolerance::default()),
        Err(Error::TailDivergence { .. })
    ));
}

#[test]
fn phi_from_chi_for_free_and_exponential_profiles() {
    let one: RegularFn = Arc::new(|_| (1.0, 0.0));
    let table = phi_from_chi(one, 1.0, &Tolerance::default()).unwrap();
    assert_relative_eq!(table.eval(2.5).0, 2.5, max_relative = 1e-13);
    assert_relative_eq!(table.intercept(), 0.0, epsilon = 1e-12);

    // int_0^r 4/(1+e^-t)^2 dt = 4r + 4 ln(1+e^-r) + 4/(1+e^r) - 4 ln2 - 2
    let chi: RegularFn = Arc::new(|r: f64| {
        let e = (-r).exp();
        (0.5 * (1.0 + e), -0.5 * e)
    });
    let table = phi_from_chi(chi, 0.5, &Tolerance::default().with_rel(1e-12)).unwrap();
    for r in [0.1f64, 1.0, 8.0, 300.0] {
        let e = (-r).exp();
        let f = 4.0 * r + 4.0 * e.ln_1p() + 4.0 / (1.0 + r.exp()) - 4.0 * std::f64::consts::LN_2 - 2.0;
        assert_relative_eq!(table.integral(r), f, max_relative = 1e-11);
    }
    assert_relative_eq!(table.slope(), 2.0);
    assert_relative_eq!(
        table.intercept(),
        -1.0 - 2.0 * std::f64::consts::LN_2,
        max_relative = 1e-9
    );
}

#[test]
fn phi_from_chi_probe_rejects_vanishing_limit() {
    let decaying: RegularFn = Arc::new(|r: f64| (1.0 / (1.0 + r), -1.0 / (1.0 + r).powi(2)));
    assert!(matches!(
        phi_from_chi(decaying, None, &Tolerance::default()),
        Err(Error::NotAdmissible(_))
    ));
    let negative: RegularFn = Arc::new(|r: f64| (1.0 - r, -1.0));
    assert!(phi_from_chi(negative, 0.5, &Tolerance::default()).is_err());
}

#[test]
fn mapping_inverse_round_trips() {
    let base = pair_of("inverse-square-quartic-23:g=4,b=1");
    let map = build_mapping(&base, 60.0).unwrap();
    for r in [1e-6, 1e-3, 0.4, 3.0, 60.0, 200.0, 5e4] {
        let x = map.forward(r);
        assert_relative_eq!(map.inverse(x).unwrap(), r, max_relative = 1e-12);
        assert!(map.derivative(r) > 0.0);
    }
    assert_eq!(map.inverse(0.0).unwrap(), 0.0);
    let h = 1e-5;
    let fd = (map.derivative(1.0 + h) - map.derivative(1.0 - h)) / (2.0 * h);
    assert_relative_eq!(map.second_derivative(1.0), fd, max_relative = 1e-7);
}

#[test]
fn long_range_mapping_is_limited() {
    let base = pair_of("coulomb-72p:alpha=1");
    let map = build_mapping(&base, 30.0).unwrap();
    assert!(map.inverse(map.forward(29.0)).is_ok());
    assert!(matches!(
        map.inverse(2.0 * map.forward(30.0)),
        Err(Error::NotBracketed { .. })
    ));
}

#[test]
fn free_base_is_the_identity() {
    let free = pair_of("free");
    let inner = potential_of("exp:lambda=-5,mu=1");
    let sys = compose(&free, &inner).unwrap();
    assert!(!sys.inner_solution.is_closed_form());
    for r in [0.01, 0.7, 3.0, 25.0] {
        assert_eq!(sys.value(r), inner.value(r));
    }
}

#[test]
fn composed_solution_behaves_like_r_at_origin() {
    let base = pair_of("rational-exp-22:lambda=1,a=1");
    let inner = potential_of("inverse-square-quartic-23:g=4,b=1");
    let sys = compose(&base, &inner).unwrap();
    let (phi, dphi) = sys.eval_solution(1e-8);
    assert_relative_eq!(phi / 1e-8, 1.0, max_relative = 1e-6);
    assert_relative_eq!(dphi, 1.0, max_relative = 1e-6);
    assert_eq!(sys.depth, 1);
    assert_eq!(sys.provenance.len(), 2);
}

#[test]
fn tabulated_and_closed_form_inner_agree() {
    let base = pair_of("rational-exp-22:lambda=1,a=1");
    let closed = potential_of("inverse-square-quartic-23:g=4,b=1");
    let mut bare = closed.clone();
    bare.solution = None;
    let a = compose(&base, &closed).unwrap();
    let b = compose(&base, &bare).unwrap();
    for r in [0.01, 1.0, 10.0, 50.0] {
        assert_relative_eq!(a.eval_solution(r).0, b.eval_solution(r).0, max_relative = 1e-8);
    }
}

#[test]
fn composition_preconditions() {
    let good = pair_of("rational-exp-22");
    let inner = potential_of("inverse-square-quartic-23");

    let attractive = PotentialSpec::from_fn("well", |r: f64| -5.0 * (-r).exp());
    let bad_base = numeric_pair(&attractive, 40.0, &Tolerance::default()).unwrap();
    assert!(matches!(compose(&bad_base, &inner), Err(Error::Admissibility(_))));

    let p_wave = inner.clone().with_ell(1);
    assert!(matches!(compose(&good, &p_wave), Err(Error::Admissibility(_))));

    let coulomb = potential_of("coulomb");
    assert!(matches!(compose(&good, &coulomb), Err(Error::Admissibility(_))));

    let mut singular = PotentialSpec::from_fn("singular", |r: f64| r.powi(-3));
    singular.origin_class = OriginClass::StronglySingular;
    assert!(matches!(compose(&good, &singular), Err(Error::Admissibility(_))));

    let quartic = potential_of("inverse-quartic-74");
    assert!(compose(&good, &quartic).is_ok());
}

#[test]
fn iteration_depth_limits() {
    let base = pair_of("rational-exp-22");
    let inner = potential_of("inverse-square-quartic-23");
    let opts = ComposeOptions::default();
    assert!(matches!(iterate(&base, &inner, 0, &opts), Err(Error::Config(_))));
    assert!(matches!(
        iterate(&base, &inner, 5, &opts),
        Err(Error::DepthLimit { depth: 5, max: 4 })
    ));
    let sys = iterate(&base, &inner, 3, &opts).unwrap();
    assert_eq!(sys.depth, 3);
    assert_eq!(sys.provenance.len(), 4);
}

#[test]
fn iteration_matches_manual_nesting() {
    let base = pair_of("rational-exp-22");
    let inner = potential_of("inverse-square-quartic-23");
    let once = compose(&base, &inner).unwrap();
    let twice = compose(&base, &once.potential()).unwrap();
    let iterated = iterate(&base, &inner, 2, &ComposeOptions::default()).unwrap();
    for r in [0.05, 1.0, 9.0] {
        assert_relative_eq!(twice.value(r), iterated.value(r), max_relative = 1e-14);
        assert_relative_eq!(
            twice.eval_solution(r).0,
            iterated.eval_solution(r).0,
            max_relative = 1e-14
        );
    }
}

#[test]
fn higher_partial_wave_base() {
    let base = pair_of("free:ell=1");
    let inner = potential_of("exponential-70:lambda=1,mu=1");
    let sys = compose(&base, &inner).unwrap();
    assert_eq!(sys.ell(), 1);
    let r = 1e-3;
    let (phi, _) = sys.eval_solution(r);
    assert_relative_eq!(phi, r * r / 3.0, max_relative = 1e-5);
    // x = r^3/3, chi^-4 = r^4
    assert_relative_eq!(sys.added(2.0), 16.0 * (-8.0f64 / 3.0).exp(), max_relative = 1e-13);
    assert!(solve_in_mapped_variable(&sys, 1.0, &Tolerance::default()).is_err());
}

#[test]
fn mapped_variable_equation_reproduces_inner_solution() {
    let base = pair_of("exponential-70:lambda=1,mu=1");
    let inner = potential_of("inverse-square-quartic-23:g=4,b=1");
    let sys = compose(&base, &inner).unwrap();
    let psi = solve_in_mapped_variable(&sys, 5.0, &Tolerance::default().with_rel(1e-11)).unwrap();
    let exact = inner.solution.clone().unwrap();
    for x in [0.1, 1.0, 2.5, 5.0] {
        assert_relative_eq!(psi.eval(x).0, exact(x).0, max_relative = 1e-7);
    }
}
