use super::*;
use approx::assert_relative_eq;

fn pair_of(text: &str) -> SolutionPair {
    make_pair(&FamilyId::parse(text).unwrap()).unwrap()
}

// reference values computed with 30-digit arithmetic
#[test]
fn frozen_reference_values() {
    let cases: [(&str, f64, f64, f64); 8] = [
        (
            "rational-exp-22:lambda=1,a=1",
            1.0,
            1.0421906109874948,
            0.8868188839700739,
        ),
        (
            "rational-exp-22:lambda=1,a=1",
            0.5,
            0.5093108358842252,
            0.9153647029417624,
        ),
        (
            "inverse-square-quartic-23:g=4,b=1",
            1.0,
            1.4864256021722646,
            0.34043584976109403,
        ),
        (
            "exponential-70:lambda=1,mu=1",
            1.0,
            1.106900905356893,
            0.6155191935036817,
        ),
        ("coulomb-72p:alpha=1", 1.0, 1.590636854637329, 0.27973176363304486),
        (
            "inverse-power-72:g=2,n=5,ell=0",
            1.5,
            0.6866002032256832,
            1.0500840791244028,
        ),
        (
            "inverse-power-72:g=1,n=6,ell=1",
            1.5,
            2.030594755795541,
            0.22379345033713205,
        ),
        ("inverse-quartic-74:g=1", 1.0, (-1.0f64).exp(), 1.0f64.sinh()),
    ];
    for (name, r, phi, chi) in cases {
        let p = pair_of(name).eval(r);
        assert_relative_eq!(p.phi, phi, max_relative = 1e-12);
        assert_relative_eq!(p.chi, chi, max_relative = 1e-12);
    }
}

#[test]
fn inverse_power_intercept() {
    let p = pair_of("inverse-power-72:g=1,n=6,ell=1");
    assert_relative_eq!(p.tail.b, -0.49311251986477317, max_relative = 1e-12);
    assert_eq!(p.tail.ell, 1);
}

#[test]
fn unit_wronskian_on_working_ranges() {
    for family in FamilyId::all_defaults() {
        let Ok(pair) = make_pair(&family) else {
            continue;
        };
        let (lo, hi) = pair.working_range;
        for r in GridSpec::log(lo, hi, 200).radii().unwrap() {
            let w = pair.wronskian(r);
            assert!((w - 1.0).abs() < 1e-8, "{family}: W({r}) = {w}");
        }
    }
}

#[test]
fn higher_partial_waves_keep_unit_wronskian() {
    for ell in [1u32, 2, 4] {
        let pair = make_pair(&FamilyId::Free { ell }).unwrap();
        for r in [1e-2, 0.5, 3.0, 40.0] {
            assert_relative_eq!(pair.wronskian(r), 1.0, max_relative = 1e-12);
        }
    }
}

#[test]
fn regular_solution_normalization_at_origin() {
    let pair = pair_of("rational-exp-22:lambda=2,a=0.5");
    let r = 1e-7;
    assert_relative_eq!(pair.phi(r) / r, 1.0, max_relative = 1e-6);
    assert_relative_eq!(pair.eval(0.0).chi, 1.0, max_relative = 1e-12);

    let p = pair_of("inverse-power-72:g=1,n=6,ell=1");
    assert!(p.phi(1e-3) < 1e-100);
}

#[test]
fn parse_accepts_aliases_and_defaults() {
    let f = FamilyId::parse("exp:lambda=-5,mu=1").unwrap();
    assert_eq!(f, FamilyId::Exponential70 { lambda: -5.0, mu: 1.0 });
    assert_eq!(
        FamilyId::parse("quartic").unwrap(),
        FamilyId::InverseQuartic74 { g: 1.0 }
    );
    assert_eq!(FamilyId::parse("free:l=2").unwrap(), FamilyId::Free { ell: 2 });
    let f: FamilyId = "coulomb:alpha=0.5".parse().unwrap();
    assert_eq!(f.label(), "coulomb-72p:alpha=0.5");
    assert_eq!(FamilyId::parse(&f.label()).unwrap(), f);
}

#[test]
fn parse_rejects_bad_input() {
    assert!(matches!(FamilyId::parse("nope"), Err(Error::Config(_))));
    assert!(matches!(FamilyId::parse("exp:nu=1"), Err(Error::Config(_))));
    assert!(matches!(FamilyId::parse("exp:mu"), Err(Error::Config(_))));
    assert!(matches!(FamilyId::parse("exp:mu=x"), Err(Error::Config(_))));
    assert!(matches!(FamilyId::parse("free:ell=1.5"), Err(Error::ParamDomain(_))));
}

#[test]
fn parameter_domains() {
    let bad = [
        "rational-exp-22:a=0",
        "inverse-square-quartic-23:b=-1",
        "exponential-70:mu=0",
        "inverse-power-72:n=2",
        "inverse-power-72:g=-1",
        "inverse-quartic-74:g=0",
        "coulomb-72p:alpha=-1",
        "chi-rational-79:n=1",
        "chi-exponential-82:mu=-2",
        "log-singular-68-numeric:p=2",
    ];
    for text in bad {
        assert!(
            matches!(FamilyId::parse(text), Err(Error::ParamDomain(_))),
            "{text} should be rejected"
        );
    }
}

#[test]
fn pair_domains_are_narrower_than_potential_domains() {
    let attractive = FamilyId::parse("exp:lambda=-5,mu=1").unwrap();
    let v = make_potential(&attractive).unwrap();
    assert_relative_eq!(v.value(0.0), -5.0);
    assert!(v.solution.is_none());
    assert!(matches!(make_pair(&attractive), Err(Error::ParamDomain(_))));

    let weak = FamilyId::parse("inverse-square-quartic-23:g=0.5").unwrap();
    assert!(make_potential(&weak).is_ok());
    assert!(make_pair(&weak).is_err());

    let slow = FamilyId::parse("inverse-power-72:g=1,n=4,ell=1").unwrap();
    assert!(make_pair(&slow).is_err());

    let log = FamilyId::parse("log-singular").unwrap();
    assert!(matches!(make_pair(&log), Err(Error::NoClosedForm(_))));
}

#[test]
fn potentials_carry_their_solutions() {
    for family in FamilyId::all_defaults() {
        let v = make_potential(&family).unwrap();
        assert_eq!(v.solution.is_some(), family.has_closed_form_pair(), "{family}");
    }
}

#[test]
fn coulomb_is_long_range_and_limited() {
    let v = make_potential(&FamilyId::Coulomb72p { alpha: 1.0 }).unwrap();
    assert_eq!(v.tail_class, TailClass::LongRange);
    assert!(v.try_value(30.0).is_ok());
    assert!(v.try_value(31.0).is_err());
    let pair = make_pair(&FamilyId::Coulomb72p { alpha: 1.0 }).unwrap();
    assert_eq!(pair.reach, 30.0);
    let p0 = pair.eval(0.0);
    assert_eq!((p0.phi, p0.dphi, p0.chi), (0.0, 1.0, 1.0));
}

#[test]
fn log_singular_potential_vanishes_beyond_cut() {
    let v = make_potential(&FamilyId::parse("log-singular:g1=1,p=1,r0=0.5").unwrap()).unwrap();
    assert_eq!(v.value(0.6), 0.0);
    let r: f64 = 0.1;
    assert_relative_eq!(v.value(r), 1.0 / (r * r * (1.0 / r).ln()), max_relative = 1e-14);
    assert_eq!(v.origin_class, OriginClass::StronglySingular);
    let v2 = make_potential(&FamilyId::parse("log-singular:g1=1,p=1.5,r0=0.5").unwrap()).unwrap();
    assert_eq!(v2.origin_class, OriginClass::Regular);
}

#[test]
fn chi_first_potentials_match_their_closed_forms() {
    let (v, pair) = make_chi_first(
        &families::chi_profile(&FamilyId::ChiExponential82 { mu: 1.0 }).unwrap(),
        false,
    )
    .unwrap();
    assert_relative_eq!(v.value(0.0), 0.5, max_relative = 1e-14);
    for r in [0.1f64, 1.0, 7.0] {
        let e = (-r).exp();
        assert_relative_eq!(v.value(r), e / (1.0 + e), max_relative = 1e-13);
    }
    assert_relative_eq!(pair.tail.a, 2.0);

    let v79 = make_potential(&FamilyId::ChiRational79 {
        alpha: 1.0,
        beta: 1.0,
        n: 2.0,
    })
    .unwrap();
    assert_relative_eq!(v79.value(0.0), 3.0, max_relative = 1e-14);
    // alpha n (n+1) beta^2 / [(1 + beta r)^(n+2) (1 + alpha) chi]
    let r: f64 = 2.0;
    let chi = (1.0 + 1.0 / 9.0) / 2.0;
    assert_relative_eq!(v79.value(r), 6.0 / (81.0 * 2.0 * chi), max_relative = 1e-13);
}

#[test]
fn chi_first_rejects_inadmissible_profiles() {
    let flat = ChiProfile::new("flat", 1.0, |_| [1.0, 0.0, 0.0]);
    assert!(matches!(make_chi_first(&flat, false), Err(Error::NotAdmissible(_))));
    let (_, pair) = make_chi_first(&flat, true).unwrap();
    assert_relative_eq!(pair.phi(3.0), 3.0, max_relative = 1e-12);

    let rising = ChiProfile::new("rising", 0.5, |r| {
        let e = (-r).exp();
        [0.5 + 0.5 * e + r * e, (0.5 - r) * e, (r - 1.5) * e]
    });
    assert!(make_chi_first(&rising, false).is_err());

    let shifted = ChiProfile::new("shifted", 0.5, |r| {
        let e = (-r).exp();
        [0.9 * (0.5 + 0.5 * e), -0.45 * e, 0.45 * e]
    });
    assert!(matches!(make_chi_first(&shifted, false), Err(Error::NotAdmissible(_))));
}

#[test]
fn sample_potential_on_grids() {
    let v = make_potential(&FamilyId::InverseQuartic74 { g: 1.0 }).unwrap();
    let s = sample_potential(&v, &GridSpec::log(1e-2, 20.0, 400), false).unwrap();
    assert_eq!(s.len(), 400);
    assert_relative_eq!(s.r[0], 1e-2);
    assert_relative_eq!(s.y[0], 1e8, max_relative = 1e-12);
    assert!(sample_potential(&v, &GridSpec::linear(0.0, 1.0, 5), false).is_err());

    let free = PotentialSpec::zero().with_ell(1);
    let s = sample_potential(&free, &GridSpec::linear(1.0, 2.0, 3), true).unwrap();
    assert_eq!(s.y, vec![2.0, 2.0 / 2.25, 0.5]);
    assert!(sample_potential(&free, &GridSpec::linear(1.0, 2.0, 1), true).is_err());
}

#[test]
fn numeric_pair_for_attractive_exponential() {
    let v = PotentialSpec::from_fn("exp", |r: f64| -5.0 * (-r).exp());
    let pair = numeric_pair(&v, 40.0, &Tolerance::default()).unwrap();
    assert!(!pair.no_bound_states);
    assert_eq!(pair.constants["nodes"], 1.0);
    for r in [0.5, 5.0, 30.0] {
        assert!((pair.wronskian(r) - 1.0).abs() < 1e-7);
    }
}

#[test]
fn numeric_pair_agrees_with_closed_form() {
    let family = FamilyId::Exponential70 { lambda: 1.0, mu: 1.0 };
    let v = make_potential(&family).unwrap();
    let numeric = numeric_pair(&v, 40.0, &Tolerance::default().with_rel(1e-11)).unwrap();
    let exact = make_pair(&family).unwrap();
    assert!(numeric.no_bound_states);
    for r in [0.3, 2.0, 20.0] {
        assert_relative_eq!(numeric.phi(r), exact.phi(r), max_relative = 1e-8);
        assert_relative_eq!(numeric.chi(r), exact.chi(r), max_relative = 1e-6);
    }
    assert!(numeric_pair(&v.clone().with_ell(1), 40.0, &Tolerance::default()).is_err());
}

#[test]
fn serde_round_trip() {
    for family in FamilyId::all_defaults() {
        let text = serde_json::to_string(&family).unwrap();
        let back: FamilyId = serde_json::from_str(&text).unwrap();
        assert_eq!(back, family);
    }
}
