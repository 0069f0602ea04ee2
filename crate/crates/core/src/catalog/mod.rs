//! Closed-form base potentials and their zero-energy solution pairs.
//!
//! A [`FamilyId`] names a family together with its parameters. Every family
//! yields a [`PotentialSpec`]; most also yield a [`SolutionPair`] normalized
//! to unit Wronskian. Families defined through their second solution go
//! through [`make_chi_first`].

mod families;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::analysis::{asymptotic_fit, count_nodes};
use crate::error::{Error, Result};
use crate::numerics::{
    solve_linear_ode, solve_regular, GridSample, GridSpec, OdeOptions, TailKind, TailModel, Tolerance,
};
use crate::potential::{OriginClass, PotentialSpec, RegularFn, TailClass};
use crate::transform::phi_from_chi_with;

pub use families::ChiProfile;

/// Values of both solutions and their derivatives at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairPoint {
    pub phi: f64,
    pub dphi: f64,
    pub chi: f64,
    pub dchi: f64,
}

impl PairPoint {
    /// `φ'χ - φχ'`.
    pub fn wronskian(&self) -> f64 {
        self.dphi * self.chi - self.phi * self.dchi
    }
}

pub type PairFn = Arc<dyn Fn(f64) -> PairPoint + Send + Sync>;

/// Regular solution `φ` and second solution `χ` of one potential, with unit
/// Wronskian.
#[derive(Clone)]
pub struct SolutionPair {
    pub name: String,
    pub potential: PotentialSpec,
    pub ell: u32,
    pub tail: TailModel,
    pub no_bound_states: bool,
    /// Radii on which the closed forms are evaluated to full accuracy.
    pub working_range: (f64, f64),
    /// Largest radius at which the pair is evaluated accurately.
    pub reach: f64,
    /// Constants applied to reach unit Wronskian and the standard normalization.
    pub constants: BTreeMap<String, f64>,
    eval: PairFn,
}

impl SolutionPair {
    pub fn new(
        name: impl Into<String>,
        potential: PotentialSpec,
        tail: TailModel,
        no_bound_states: bool,
        working_range: (f64, f64),
        eval: PairFn,
    ) -> Self {
        let ell = potential.ell;
        let reach = potential.r_limit;
        Self {
            name: name.into(),
            potential,
            ell,
            tail,
            no_bound_states,
            working_range,
            reach,
            constants: BTreeMap::new(),
            eval,
        }
    }

    pub fn with_constant(mut self, key: &str, value: f64) -> Self {
        self.constants.insert(key.to_string(), value);
        self
    }

    pub fn with_reach(mut self, reach: f64) -> Self {
        self.reach = reach;
        self
    }

    pub fn eval(&self, r: f64) -> PairPoint {
        (self.eval)(r)
    }

    pub fn phi(&self, r: f64) -> f64 {
        self.eval(r).phi
    }

    pub fn chi(&self, r: f64) -> f64 {
        self.eval(r).chi
    }

    pub fn wronskian(&self, r: f64) -> f64 {
        self.eval(r).wronskian()
    }

    pub fn regular(&self) -> RegularFn {
        let f = Arc::clone(&self.eval);
        Arc::new(move |r| {
            let p = f(r);
            (p.phi, p.dphi)
        })
    }

    pub fn second(&self) -> RegularFn {
        let f = Arc::clone(&self.eval);
        Arc::new(move |r| {
            let p = f(r);
            (p.chi, p.dchi)
        })
    }

    pub fn pair_fn(&self) -> PairFn {
        Arc::clone(&self.eval)
    }

    pub fn is_long_range(&self) -> bool {
        self.potential.tail_class == TailClass::LongRange
    }
}

impl fmt::Debug for SolutionPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SolutionPair")
            .field("name", &self.name)
            .field("ell", &self.ell)
            .field("tail", &self.tail)
            .field("no_bound_states", &self.no_bound_states)
            .field("working_range", &self.working_range)
            .field("reach", &self.reach)
            .field("constants", &self.constants)
            .finish_non_exhaustive()
    }
}

/// A catalog family with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FamilyId {
    Free {
        ell: u32,
    },
    RationalExp22 {
        lambda: f64,
        a: f64,
    },
    InverseSquareQuartic23 {
        g: f64,
        b: f64,
    },
    Exponential70 {
        lambda: f64,
        mu: f64,
    },
    InversePower72 {
        g: f64,
        n: f64,
        ell: u32,
    },
    InverseQuartic74 {
        g: f64,
    },
    Coulomb72p {
        alpha: f64,
    },
    ChiRational79 {
        alpha: f64,
        beta: f64,
        n: f64,
    },
    ChiExponential82 {
        mu: f64,
    },
    LogSingular68Numeric {
        g1: f64,
        g2: f64,
        p: f64,
        r0: f64,
        ell: u32,
    },
}

const CANONICAL: [&str; 10] = [
    "free",
    "rational-exp-22",
    "inverse-square-quartic-23",
    "exponential-70",
    "inverse-power-72",
    "inverse-quartic-74",
    "coulomb-72p",
    "chi-rational-79",
    "chi-exponential-82",
    "log-singular-68-numeric",
];

fn canonical_name(name: &str) -> Option<&'static str> {
    let name = name.trim().to_ascii_lowercase();
    let hit = match name.as_str() {
        "free" | "zero" => "free",
        "rational-exp-22" | "rational-exp" | "rational" => "rational-exp-22",
        "inverse-square-quartic-23" | "inverse-square-quartic" | "lorentzian-square" => "inverse-square-quartic-23",
        "exponential-70" | "exponential" | "exp" => "exponential-70",
        "inverse-power-72" | "inverse-power" | "power" => "inverse-power-72",
        "inverse-quartic-74" | "inverse-quartic" | "quartic" => "inverse-quartic-74",
        "coulomb-72p" | "coulomb" => "coulomb-72p",
        "chi-rational-79" | "chi-rational" => "chi-rational-79",
        "chi-exponential-82" | "chi-exponential" | "chi-exp" => "chi-exponential-82",
        "log-singular-68-numeric" | "log-singular" | "log" => "log-singular-68-numeric",
        _ => return None,
    };
    Some(hit)
}

fn param_names(family: &str) -> &'static [&'static str] {
    match family {
        "free" => &["ell"],
        "rational-exp-22" => &["lambda", "a"],
        "inverse-square-quartic-23" => &["g", "b"],
        "exponential-70" => &["lambda", "mu"],
        "inverse-power-72" => &["g", "n", "ell"],
        "inverse-quartic-74" => &["g"],
        "coulomb-72p" => &["alpha"],
        "chi-rational-79" => &["alpha", "beta", "n"],
        "chi-exponential-82" => &["mu"],
        "log-singular-68-numeric" => &["g1", "g2", "p", "r0", "ell"],
        _ => &[],
    }
}

fn param_alias(key: &str) -> String {
    match key.trim().to_ascii_lowercase().as_str() {
        "l" => "ell".into(),
        "λ" => "lambda".into(),
        "μ" => "mu".into(),
        "α" => "alpha".into(),
        "β" => "beta".into(),
        "cut" | "r_0" => "r0".into(),
        other => other.to_string(),
    }
}

fn as_ell(v: f64) -> Result<u32> {
    if v >= 0.0 && v.fract() == 0.0 && v <= 50.0 {
        Ok(v as u32)
    } else {
        Err(Error::ParamDomain(format!(
            "ell must be a nonnegative integer <= 50, got {v}"
        )))
    }
}

impl FamilyId {
    /// Every family with its default parameters.
    pub fn all_defaults() -> Vec<FamilyId> {
        CANONICAL
            .iter()
            .map(|n| Self::from_parts(n, &BTreeMap::new()).expect("defaults are valid"))
            .collect()
    }

    /// Builds a family from a name (canonical or alias) and a parameter map;
    /// missing parameters take their defaults.
    pub fn from_parts(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let family = canonical_name(name).ok_or_else(|| {
            Error::Config(format!(
                "unknown family '{name}'; known families: {}",
                CANONICAL.join(", ")
            ))
        })?;
        let allowed = param_names(family);
        let mut map = BTreeMap::new();
        for (k, v) in params {
            let key = param_alias(k);
            if !allowed.contains(&key.as_str()) {
                return Err(Error::Config(format!(
                    "family {family} has no parameter '{k}' (expected one of: {})",
                    allowed.join(", ")
                )));
            }
            if !v.is_finite() {
                return Err(Error::ParamDomain(format!("{key} must be finite, got {v}")));
            }
            map.insert(key, *v);
        }
        let get = |k: &str, default: f64| map.get(k).copied().unwrap_or(default);
        let id = match family {
            "free" => FamilyId::Free {
                ell: as_ell(get("ell", 0.0))?,
            },
            "rational-exp-22" => FamilyId::RationalExp22 {
                lambda: get("lambda", 1.0),
                a: get("a", 1.0),
            },
            "inverse-square-quartic-23" => FamilyId::InverseSquareQuartic23 {
                g: get("g", 4.0),
                b: get("b", 1.0),
            },
            "exponential-70" => FamilyId::Exponential70 {
                lambda: get("lambda", 1.0),
                mu: get("mu", 1.0),
            },
            "inverse-power-72" => FamilyId::InversePower72 {
                g: get("g", 1.0),
                n: get("n", 6.0),
                ell: as_ell(get("ell", 0.0))?,
            },
            "inverse-quartic-74" => FamilyId::InverseQuartic74 { g: get("g", 1.0) },
            "coulomb-72p" => FamilyId::Coulomb72p {
                alpha: get("alpha", 1.0),
            },
            "chi-rational-79" => FamilyId::ChiRational79 {
                alpha: get("alpha", 1.0),
                beta: get("beta", 1.0),
                n: get("n", 2.0),
            },
            "chi-exponential-82" => FamilyId::ChiExponential82 { mu: get("mu", 1.0) },
            _ => FamilyId::LogSingular68Numeric {
                g1: get("g1", 1.0),
                g2: get("g2", 0.0),
                p: get("p", 1.0),
                r0: get("r0", 0.5),
                ell: as_ell(get("ell", 0.0))?,
            },
        };
        id.validate_potential()?;
        Ok(id)
    }

    /// Parses `name` or `name:key=value,key=value`.
    pub fn parse(text: &str) -> Result<Self> {
        let (name, rest) = match text.split_once(':') {
            Some((n, r)) => (n, r),
            None => (text, ""),
        };
        let mut params = BTreeMap::new();
        for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value in family spec, got '{item}'")))?;
            let value: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("parameter {k} is not a number: '{v}'")))?;
            params.insert(k.trim().to_string(), value);
        }
        Self::from_parts(name, &params)
    }

    pub fn name(&self) -> &'static str {
        match self {
            FamilyId::Free { .. } => CANONICAL[0],
            FamilyId::RationalExp22 { .. } => CANONICAL[1],
            FamilyId::InverseSquareQuartic23 { .. } => CANONICAL[2],
            FamilyId::Exponential70 { .. } => CANONICAL[3],
            FamilyId::InversePower72 { .. } => CANONICAL[4],
            FamilyId::InverseQuartic74 { .. } => CANONICAL[5],
            FamilyId::Coulomb72p { .. } => CANONICAL[6],
            FamilyId::ChiRational79 { .. } => CANONICAL[7],
            FamilyId::ChiExponential82 { .. } => CANONICAL[8],
            FamilyId::LogSingular68Numeric { .. } => CANONICAL[9],
        }
    }

    pub fn params(&self) -> BTreeMap<String, f64> {
        let pairs: Vec<(&str, f64)> = match *self {
            FamilyId::Free { ell } => vec![("ell", ell as f64)],
            FamilyId::RationalExp22 { lambda, a } => vec![("lambda", lambda), ("a", a)],
            FamilyId::InverseSquareQuartic23 { g, b } => vec![("g", g), ("b", b)],
            FamilyId::Exponential70 { lambda, mu } => vec![("lambda", lambda), ("mu", mu)],
            FamilyId::InversePower72 { g, n, ell } => vec![("g", g), ("n", n), ("ell", ell as f64)],
            FamilyId::InverseQuartic74 { g } => vec![("g", g)],
            FamilyId::Coulomb72p { alpha } => vec![("alpha", alpha)],
            FamilyId::ChiRational79 { alpha, beta, n } => {
                vec![("alpha", alpha), ("beta", beta), ("n", n)]
            }
            FamilyId::ChiExponential82 { mu } => vec![("mu", mu)],
            FamilyId::LogSingular68Numeric { g1, g2, p, r0, ell } => {
                vec![("g1", g1), ("g2", g2), ("p", p), ("r0", r0), ("ell", ell as f64)]
            }
        };
        pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    /// Display label `name:key=value,...`.
    pub fn label(&self) -> String {
        let params: Vec<String> = self.params().iter().map(|(k, v)| format!("{k}={v}")).collect();
        if params.is_empty() {
            self.name().to_string()
        } else {
            format!("{}:{}", self.name(), params.join(","))
        }
    }

    pub fn ell(&self) -> u32 {
        match *self {
            FamilyId::Free { ell }
            | FamilyId::InversePower72 { ell, .. }
            | FamilyId::LogSingular68Numeric { ell, .. } => ell,
            _ => 0,
        }
    }

    pub fn formula(&self) -> &'static str {
        match self {
            FamilyId::Free { .. } => "V = 0",
            FamilyId::RationalExp22 { .. } => "V = lambda a^2 / (1 + a r)^4",
            FamilyId::InverseSquareQuartic23 { .. } => "V = g b^2 / (b^2 + r^2)^2",
            FamilyId::Exponential70 { .. } => "V = lambda exp(-mu r)",
            FamilyId::InversePower72 { .. } => "V = g / r^n",
            FamilyId::InverseQuartic74 { .. } => "V = g / r^4",
            FamilyId::Coulomb72p { .. } => "V = alpha / r",
            FamilyId::ChiRational79 { .. } => "chi = [1 + alpha/(1 + beta r)^n] / (1 + alpha), V = chi''/chi",
            FamilyId::ChiExponential82 { .. } => "chi = (1 + exp(-mu r)) / 2, V = chi''/chi",
            FamilyId::LogSingular68Numeric { .. } => {
                "V = [g1/(r^2 ln(1/r)^p) + g2/(r^2 ln(1/r)^2)] for r < r0, 0 beyond"
            }
        }
    }

    /// Parameter domains, as shown by the catalog listing.
    pub fn domain_text(&self) -> &'static str {
        match self {
            FamilyId::Free { .. } => "ell >= 0",
            FamilyId::RationalExp22 { .. } => "a > 0; pair needs lambda > 0",
            FamilyId::InverseSquareQuartic23 { .. } => "b > 0; pair needs g > 1",
            FamilyId::Exponential70 { .. } => "mu > 0; pair needs lambda > 0",
            FamilyId::InversePower72 { .. } => "g > 0, n > 2; pair needs n > 2 ell + 3",
            FamilyId::InverseQuartic74 { .. } => "g > 0",
            FamilyId::Coulomb72p { .. } => "alpha > 0 (long range, r <= 30)",
            FamilyId::ChiRational79 { .. } => "alpha > 0, beta > 0, n > 1",
            FamilyId::ChiExponential82 { .. } => "mu > 0",
            FamilyId::LogSingular68Numeric { .. } => "g1 > 0, p < 2, 0 < r0 < 1; potential only",
        }
    }

    /// The χ profile behind a χ-first family.
    pub fn chi_profile(&self) -> Option<ChiProfile> {
        families::chi_profile(self)
    }

    pub fn has_closed_form_pair(&self) -> bool {
        !matches!(self, FamilyId::LogSingular68Numeric { .. })
    }

    fn validate_potential(&self) -> Result<()> {
        let fail = |what: &str| Err(Error::ParamDomain(format!("{}: {what}", self.name())));
        match *self {
            FamilyId::RationalExp22 { a, .. } if !(a > 0.0) => fail("requires a > 0"),
            FamilyId::InverseSquareQuartic23 { b, .. } if !(b > 0.0) => fail("requires b > 0"),
            FamilyId::Exponential70 { mu, .. } if !(mu > 0.0) => fail("requires mu > 0"),
            FamilyId::InversePower72 { g, n, .. } if !(g > 0.0 && n > 2.0) => fail("requires g > 0 and n > 2"),
            FamilyId::InverseQuartic74 { g } if !(g > 0.0) => fail("requires g > 0"),
            FamilyId::Coulomb72p { alpha } if !(alpha > 0.0) => fail("requires alpha > 0"),
            FamilyId::ChiRational79 { alpha, beta, n } if !(alpha > 0.0 && beta > 0.0 && n > 1.0) => {
                fail("requires alpha > 0, beta > 0, n > 1")
            }
            FamilyId::ChiExponential82 { mu } if !(mu > 0.0) => fail("requires mu > 0"),
            FamilyId::LogSingular68Numeric { g1, p, r0, .. } if !(g1 > 0.0 && p < 2.0 && r0 > 0.0 && r0 < 1.0) => {
                fail("requires g1 > 0, p < 2 and 0 < r0 < 1")
            }
            _ => Ok(()),
        }
    }

    fn validate_pair(&self) -> Result<()> {
        self.validate_potential()?;
        let fail = |what: &str| Err(Error::ParamDomain(format!("{}: {what}", self.name())));
        match *self {
            FamilyId::RationalExp22 { lambda, .. } if !(lambda > 0.0) => fail("closed-form pair requires lambda > 0"),
            FamilyId::InverseSquareQuartic23 { g, .. } if !(g > 1.0) => fail("closed-form pair requires g > 1"),
            FamilyId::Exponential70 { lambda, mu } if !(lambda > 0.0) || 2.0 * lambda.sqrt() / mu > 700.0 => {
                fail("closed-form pair requires lambda > 0 and 2 sqrt(lambda)/mu <= 700")
            }
            FamilyId::InversePower72 { n, ell, .. } if !(n > 2.0 * ell as f64 + 3.0) => {
                fail("closed-form pair requires n > 2 ell + 3")
            }
            FamilyId::LogSingular68Numeric { .. } => Err(Error::NoClosedForm(self.label())),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl std::str::FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// The potential of a family, with its closed-form regular solution attached
/// when one exists.
pub fn make_potential(family: &FamilyId) -> Result<PotentialSpec> {
    family.validate_potential()?;
    let spec = families::potential(family);
    if family.validate_pair().is_ok() {
        let pair = make_pair(family)?;
        return Ok(spec.with_solution(pair.regular()));
    }
    Ok(spec)
}

/// The closed-form solution pair of a family.
pub fn make_pair(family: &FamilyId) -> Result<SolutionPair> {
    family.validate_pair()?;
    match *family {
        FamilyId::ChiRational79 { .. } | FamilyId::ChiExponential82 { .. } => {
            let profile = families::chi_profile(family).expect("chi-first family");
            let (_, pair) = make_chi_first(&profile, false)?;
            Ok(pair)
        }
        _ => {
            let mut pair = families::closed_pair(family);
            pair.potential = pair.potential.clone().with_solution(pair.regular());
            Ok(pair)
        }
    }
}

/// Builds `V₀ = χ''/χ` and the pair `(φ, χ)` from an admissible second
/// solution. `permissive` admits the boundary case `χ(∞) = 1`.
pub fn make_chi_first(profile: &ChiProfile, permissive: bool) -> Result<(PotentialSpec, SolutionPair)> {
    let chi_inf = profile.chi_inf;
    let upper = if permissive { 1.0 } else { 1.0 - 1e-12 };
    if !(chi_inf > 0.0 && chi_inf <= upper) {
        return Err(Error::NotAdmissible(format!(
            "chi(inf) = {chi_inf} must lie in (0, 1{}",
            if permissive { "]" } else { ")" }
        )));
    }
    let c0 = (profile.chi)(0.0);
    if (c0[0] - 1.0).abs() > 1e-12 {
        return Err(Error::NotAdmissible(format!("chi(0) = {} but must equal 1", c0[0])));
    }
    let probe = GridSpec::log(1e-3, 1e4, 400).radii()?;
    let mut last = c0[0];
    for &r in &probe {
        let [c, dc, d2c] = (profile.chi)(r);
        if !(c > 0.0) || !c.is_finite() || !dc.is_finite() || !d2c.is_finite() {
            return Err(Error::NotAdmissible(format!(
                "chi must be positive and twice differentiable; chi({r:e}) = {c:e}"
            )));
        }
        if c > last * (1.0 + 1e-14) || dc > 0.0 {
            return Err(Error::NotAdmissible(format!(
                "chi must be decreasing; it increases near r = {r:e}"
            )));
        }
        last = c;
    }
    let far = (profile.chi)(1e6)[0];
    if (far - chi_inf).abs() > 1e-4 * chi_inf {
        return Err(Error::NotAdmissible(format!(
            "chi(r) tends to {far:e}, not to the declared limit {chi_inf:e}"
        )));
    }

    let chi_fn = Arc::clone(&profile.chi);
    let potential = PotentialSpec::new(
        profile.name.clone(),
        0,
        OriginClass::Regular,
        TailClass::ShortRange,
        profile.params.clone(),
        Arc::new(move |r| {
            let [c, _, d2c] = chi_fn(r);
            d2c / c
        }),
    );

    let chi_pair = Arc::clone(&profile.chi);
    let second: RegularFn = Arc::new(move |r| {
        let [c, dc, _] = chi_pair(r);
        (c, dc)
    });
    let tol = Tolerance::default().with_rel(1e-13);
    let phi_table = phi_from_chi_with(second, chi_inf, profile.excess.clone(), &tol)?;
    let a = 1.0 / chi_inf;
    let b = phi_table.intercept();
    let chi_eval = Arc::clone(&profile.chi);
    let eval: PairFn = Arc::new(move |r| {
        let [c, dc, _] = chi_eval(r);
        let (phi, dphi) = phi_table.eval_with(r, c, dc);
        PairPoint {
            phi,
            dphi,
            chi: c,
            dchi: dc,
        }
    });
    let pair = SolutionPair::new(
        profile.name.clone(),
        potential.clone(),
        TailModel::linear(a, b),
        true,
        (1e-3, 50.0),
        eval,
    );
    let potential = potential.with_solution(pair.regular());
    let mut pair = pair;
    pair.potential = potential.clone();
    Ok((potential, pair))
}

/// Samples `V` (optionally with the centrifugal term) on a grid.
pub fn sample_potential(p: &PotentialSpec, grid: &GridSpec, centrifugal: bool) -> Result<GridSample> {
    let r = grid.radii()?;
    let y = r
        .iter()
        .map(|&x| {
            if centrifugal {
                p.try_effective(x)
            } else {
                p.try_value(x)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    GridSample::new(r, y, None)
}

/// Solution pair of an s-wave potential regular at the origin, built by
/// integrating both solutions outward from `r = 0`.
///
/// `φ` starts as `(0, 1)` and an auxiliary solution as `(1, 0)`, so their
/// Wronskian is 1; subtracting the multiple of `φ` that removes the linear
/// growth of the auxiliary solution gives `χ`. Beyond `r_max` both solutions
/// continue linearly. The pair is flagged as having no bound states only when
/// `φ` has no node and a positive tail slope.
pub fn numeric_pair(potential: &PotentialSpec, r_max: f64, tol: &Tolerance) -> Result<SolutionPair> {
    if potential.ell != 0 || potential.origin_class != OriginClass::Regular {
        return Err(Error::NotAdmissible(format!(
            "numeric pairs need an s-wave potential regular at the origin, got {}",
            potential.name
        )));
    }
    if !potential.value(0.0).is_finite() {
        return Err(Error::NotAdmissible(format!(
            "{} is not finite at r = 0",
            potential.name
        )));
    }
    let phi = solve_regular(potential, r_max, tol)?;
    let v = potential.function();
    let aux = solve_linear_ode(move |r| v(r), 0.0, 1.0, 0.0, r_max, tol, &OdeOptions::default())?;

    let window = (0.7 * r_max, r_max);
    let fit_phi = asymptotic_fit(&|r| phi.eval(r).0, 0, window)?;
    let fit_aux = asymptotic_fit(&|r| aux.eval(r).0, 0, window)?;
    let a = fit_phi.tail.a;
    let nodes = count_nodes(&|r| phi.eval(r).0, (0.0, r_max), 0)?;
    let no_bound_states = nodes == 0 && a > 1e-6;
    let ratio = if a != 0.0 { fit_aux.tail.a / a } else { 0.0 };

    let eval: PairFn = Arc::new(move |r| {
        let (p, dp) = phi.eval(r);
        let (c, dc) = aux.eval(r);
        PairPoint {
            phi: p,
            dphi: dp,
            chi: c - ratio * p,
            dchi: dc - ratio * dp,
        }
    });
    let tail = if a > 0.0 {
        TailModel::linear(a, fit_phi.tail.b)
    } else {
        TailModel {
            kind: TailKind::None,
            a,
            b: fit_phi.tail.b,
            ell: 0,
        }
    };
    Ok(SolutionPair::new(
        format!("numeric:{}", potential.name),
        potential.clone(),
        tail,
        no_bound_states,
        (1e-3, r_max),
        eval,
    )
    .with_reach(r_max)
    .with_constant("aux_slope_ratio", ratio)
    .with_constant("nodes", nodes as f64))
}

#[cfg(test)]
mod tests;
