use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, LN_2};
use std::sync::Arc;

use super::{FamilyId, PairFn, PairPoint, SolutionPair};
use crate::numerics::{double_factorial_odd, TailModel};
use crate::potential::{OriginClass, PotentialSpec, RadialFn, TailClass};
use crate::special::{
    bessel_i, bessel_i_derivative_scaled, bessel_i_scaled, bessel_k, bessel_k_derivative_scaled, bessel_k_scaled,
    BesselOrder,
};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Working radius range used for closed-form checks unless a family needs a
/// narrower one.
const DEFAULT_RANGE: (f64, f64) = (1e-3, 50.0);

/// Bessel arguments above this are treated as the r → 0 limit of singular
/// families.
const SINGULAR_ARG_CAP: f64 = 700.0;

pub(crate) const COULOMB_R_MAX: f64 = 30.0;

/// A second solution `χ` given with its first two derivatives, returned as
/// `[χ, χ', χ'']`, and its limit at infinity.
#[derive(Clone)]
pub struct ChiProfile {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub chi: Arc<dyn Fn(f64) -> [f64; 3] + Send + Sync>,
    pub chi_inf: f64,
    /// `χ(r) - χ(∞)` evaluated without cancellation, when known.
    pub excess: Option<RadialFn>,
}

impl ChiProfile {
    pub fn new(name: impl Into<String>, chi_inf: f64, chi: impl Fn(f64) -> [f64; 3] + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            params: BTreeMap::new(),
            chi: Arc::new(chi),
            chi_inf,
            excess: None,
        }
    }

    pub fn with_excess(mut self, excess: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.excess = Some(Arc::new(excess));
        self
    }
}

fn spec(
    family: &FamilyId,
    origin: OriginClass,
    tail: TailClass,
    f: impl Fn(f64) -> f64 + Send + Sync + 'static,
) -> PotentialSpec {
    PotentialSpec::new(family.name(), family.ell(), origin, tail, family.params(), Arc::new(f))
}

pub(super) fn potential(family: &FamilyId) -> PotentialSpec {
    use OriginClass::{Regular, StronglySingular};
    use TailClass::{LongRange, ShortRange};
    match *family {
        FamilyId::Free { .. } => spec(family, Regular, ShortRange, |_| 0.0),
        FamilyId::RationalExp22 { lambda, a } => spec(family, Regular, ShortRange, move |r| {
            lambda * a * a / (1.0 + a * r).powi(4)
        }),
        FamilyId::InverseSquareQuartic23 { g, b } => spec(family, Regular, ShortRange, move |r| {
            g * b * b / (b * b + r * r).powi(2)
        }),
        FamilyId::Exponential70 { lambda, mu } => spec(family, Regular, ShortRange, move |r| lambda * (-mu * r).exp()),
        FamilyId::InversePower72 { g, n, .. } => spec(family, StronglySingular, ShortRange, move |r| g * r.powf(-n)),
        FamilyId::InverseQuartic74 { g } => spec(family, StronglySingular, ShortRange, move |r| g / r.powi(4)),
        FamilyId::Coulomb72p { alpha } => {
            spec(family, Regular, LongRange, move |r| alpha / r).with_r_limit(COULOMB_R_MAX)
        }
        FamilyId::ChiRational79 { alpha, beta, n } => spec(family, Regular, ShortRange, move |r| {
            let q = (1.0 + beta * r).powf(-n);
            alpha * n * (n + 1.0) * beta * beta * q / ((1.0 + beta * r).powi(2) * (1.0 + alpha * q))
        }),
        FamilyId::ChiExponential82 { mu } => spec(family, Regular, ShortRange, move |r| {
            let e = (-mu * r).exp();
            mu * mu * e / (1.0 + e)
        }),
        FamilyId::LogSingular68Numeric { g1, g2, p, r0, .. } => {
            let origin = if p > 1.0 { Regular } else { StronglySingular };
            spec(family, origin, ShortRange, move |r| {
                if r >= r0 {
                    return 0.0;
                }
                let l = (1.0 / r).ln();
                g1 / (r * r * l.powf(p)) + g2 / (r * r * l * l)
            })
        }
    }
}

pub(super) fn chi_profile(family: &FamilyId) -> Option<ChiProfile> {
    let mut profile = match *family {
        FamilyId::ChiRational79 { alpha, beta, n } => ChiProfile::new(family.name(), 1.0 / (1.0 + alpha), move |r| {
            let s = 1.0 + beta * r;
            let q = s.powf(-n);
            let norm = 1.0 + alpha;
            [
                (1.0 + alpha * q) / norm,
                -alpha * n * beta * q / (s * norm),
                alpha * n * (n + 1.0) * beta * beta * q / (s * s * norm),
            ]
        })
        .with_excess(move |r| alpha * (1.0 + beta * r).powf(-n) / (1.0 + alpha)),
        FamilyId::ChiExponential82 { mu } => ChiProfile::new(family.name(), 0.5, move |r| {
            let e = (-mu * r).exp();
            [0.5 * (1.0 + e), -0.5 * mu * e, 0.5 * mu * mu * e]
        })
        .with_excess(move |r| 0.5 * (-mu * r).exp()),
        _ => return None,
    };
    profile.params = family.params();
    Some(profile)
}

fn pair(
    family: &FamilyId,
    tail: TailModel,
    range: (f64, f64),
    f: impl Fn(f64) -> PairPoint + Send + Sync + 'static,
) -> SolutionPair {
    let eval: PairFn = Arc::new(f);
    SolutionPair::new(family.label(), potential(family), tail, true, range, eval)
}

pub(super) fn closed_pair(family: &FamilyId) -> SolutionPair {
    match *family {
        FamilyId::Free { ell } => free_pair(family, ell),
        FamilyId::RationalExp22 { lambda, a } => rational_exp_pair(family, lambda, a),
        FamilyId::InverseSquareQuartic23 { g, b } => inverse_square_quartic_pair(family, g, b),
        FamilyId::Exponential70 { lambda, mu } => exponential_pair(family, lambda, mu),
        FamilyId::InversePower72 { g, n, ell } => inverse_power_pair(family, g, n, ell),
        FamilyId::InverseQuartic74 { g } => inverse_quartic_pair(family, g),
        FamilyId::Coulomb72p { alpha } => coulomb_pair(family, alpha),
        FamilyId::ChiRational79 { .. } | FamilyId::ChiExponential82 { .. } | FamilyId::LogSingular68Numeric { .. } => {
            unreachable!("no direct closed form for {}", family.name())
        }
    }
}

fn free_pair(family: &FamilyId, ell: u32) -> SolutionPair {
    let l = ell as f64;
    let phi_norm = double_factorial_odd(ell + 1);
    let chi_norm = double_factorial_odd(ell);
    pair(
        family,
        TailModel::asymptote(ell, 1.0 / phi_norm, 0.0),
        DEFAULT_RANGE,
        move |r| {
            if ell == 0 {
                return PairPoint {
                    phi: r,
                    dphi: 1.0,
                    chi: 1.0,
                    dchi: 0.0,
                };
            }
            PairPoint {
                phi: r.powi(ell as i32 + 1) / phi_norm,
                dphi: (l + 1.0) * r.powi(ell as i32) / phi_norm,
                chi: chi_norm * r.powi(-(ell as i32)),
                dchi: -l * chi_norm * r.powi(-(ell as i32) - 1),
            }
        },
    )
}

fn rational_exp_pair(family: &FamilyId, lambda: f64, a: f64) -> SolutionPair {
    let k = lambda.sqrt();
    let (sk, ck) = (k.sinh(), k.cosh());
    let tail = TailModel::linear(sk / k, (sk / k - ck) / a);
    pair(family, tail, DEFAULT_RANGE, move |r| {
        let u = 1.0 + a * r;
        let s = k * a * r / u;
        let rest = k / u;
        PairPoint {
            phi: u / (a * k) * s.sinh(),
            dphi: s.sinh() / k + s.cosh() / u,
            chi: u * rest.sinh() / sk,
            dchi: (a * rest.sinh() - k * a * rest.cosh() / u) / sk,
        }
    })
    .with_constant("A", sk / k)
}

fn inverse_square_quartic_pair(family: &FamilyId, g: f64, b: f64) -> SolutionPair {
    let k = (g - 1.0).sqrt();
    let norm = b * (k * FRAC_PI_2).sinh();
    let tail = TailModel::linear((k * FRAC_PI_2).sinh() / k, -b * (k * FRAC_PI_2).cosh());
    pair(family, tail, DEFAULT_RANGE, move |r| {
        let rho = (b * b + r * r).sqrt();
        let theta = (r / b).atan();
        let rest = if r > 0.0 { (b / r).atan() } else { FRAC_PI_2 };
        PairPoint {
            phi: rho * (k * theta).sinh() / k,
            dphi: (r * (k * theta).sinh() / k + b * (k * theta).cosh()) / rho,
            chi: rho * (k * rest).sinh() / norm,
            dchi: (r * (k * rest).sinh() - k * b * (k * rest).cosh()) / (rho * norm),
        }
    })
    .with_constant("chi_scale", 1.0 / norm)
}

fn exponential_pair(family: &FamilyId, lambda: f64, mu: f64) -> SolutionPair {
    let z0 = 2.0 * lambda.sqrt() / mu;
    let i00 = bessel_i(BesselOrder::ZERO, z0).expect("z0 within range");
    let k00 = bessel_k(BesselOrder::ZERO, z0).expect("z0 > 0");
    let tail = TailModel::linear(i00, -(2.0 / mu) * (i00 * ((0.5 * z0).ln() + EULER_GAMMA) + k00));
    let ln_z0 = z0.ln();
    pair(family, tail, DEFAULT_RANGE, move |r| {
        let ln_z = ln_z0 - 0.5 * mu * r;
        let z = ln_z.exp();
        // (I0(z), z I1(z), K0(z), z K1(z))
        let (i0, zi1, k0, zk1) = if z > 1e-8 {
            (
                bessel_i(BesselOrder::ZERO, z).unwrap_or(f64::NAN),
                z * bessel_i(BesselOrder::ONE, z).unwrap_or(f64::NAN),
                bessel_k(BesselOrder::ZERO, z).unwrap_or(f64::NAN),
                z * bessel_k(BesselOrder::ONE, z).unwrap_or(f64::NAN),
            )
        } else {
            let l = ln_z - LN_2 + EULER_GAMMA;
            let z2 = if ln_z > -300.0 { z * z } else { 0.0 };
            (
                1.0 + 0.25 * z2,
                0.5 * z2,
                -l * (1.0 + 0.25 * z2) + 0.25 * z2,
                1.0 + 0.5 * z2 * (l - 0.5),
            )
        };
        PairPoint {
            phi: (2.0 / mu) * (i00 * k0 - k00 * i0),
            dphi: i00 * zk1 + k00 * zi1,
            chi: i0 / i00,
            dchi: -0.5 * mu * zi1 / i00,
        }
    })
    .with_constant("I0(z0)", i00)
    .with_constant("K0(z0)", k00)
}

fn inverse_power_pair(family: &FamilyId, g: f64, n: f64, ell: u32) -> SolutionPair {
    let l = ell as f64;
    let nu = (2.0 * l + 1.0) / (n - 2.0);
    let sigma = 0.5 * (n - 2.0);
    let beta = 2.0 * g.sqrt() / (n - 2.0);
    let order = BesselOrder::new(nu).expect("nu > 0");
    let c = 0.5 * libm::tgamma(nu) * (2.0 / beta).powf(nu);
    let b_coef = -libm::tgamma(1.0 - nu) * (0.5 * beta).powf(2.0 * nu) / libm::tgamma(nu + 1.0);
    let r_low = (beta / 200.0).powf(1.0 / sigma).max(DEFAULT_RANGE.0);
    pair(
        family,
        TailModel::asymptote(ell, 1.0, b_coef),
        (r_low, DEFAULT_RANGE.1),
        move |r| {
            let y = beta * r.powf(-sigma);
            if !(y < SINGULAR_ARG_CAP) {
                return PairPoint {
                    phi: 0.0,
                    dphi: 0.0,
                    chi: f64::INFINITY,
                    dchi: f64::NEG_INFINITY,
                };
            }
            let (ey, eny) = (y.exp(), (-y).exp());
            let ks = bessel_k_scaled(order, y).unwrap_or(f64::NAN);
            let dks = bessel_k_derivative_scaled(order, y).unwrap_or(f64::NAN);
            let is = bessel_i_scaled(order, y).unwrap_or(f64::NAN);
            let dis = bessel_i_derivative_scaled(order, y).unwrap_or(f64::NAN);
            let sr = r.sqrt();
            PairPoint {
                phi: sr * ks * eny / c,
                dphi: (0.5 * ks - sigma * y * dks) * eny / (c * sr),
                chi: c / sigma * sr * is * ey,
                dchi: c / sigma * (0.5 * is - sigma * y * dis) * ey / sr,
            }
        },
    )
    .with_constant("phi_scale", 1.0 / c)
    .with_constant("chi_scale", c / sigma)
    .with_constant("nu", nu)
}

fn inverse_quartic_pair(family: &FamilyId, g: f64) -> SolutionPair {
    let sg = g.sqrt();
    let r_low = (sg / 300.0).max(DEFAULT_RANGE.0);
    pair(
        family,
        TailModel::linear(1.0, -sg),
        (r_low, DEFAULT_RANGE.1),
        move |r| {
            let s = sg / r;
            if !(s < SINGULAR_ARG_CAP) {
                return PairPoint {
                    phi: 0.0,
                    dphi: 0.0,
                    chi: f64::INFINITY,
                    dchi: f64::NEG_INFINITY,
                };
            }
            let e = (-s).exp();
            PairPoint {
                phi: r * e,
                dphi: e * (1.0 + s),
                chi: r / sg * s.sinh(),
                dchi: s.sinh() / sg - s.cosh() / r,
            }
        },
    )
}

fn coulomb_pair(family: &FamilyId, alpha: f64) -> SolutionPair {
    let tail = TailModel::none();
    let sa = alpha.sqrt();
    pair(family, tail, (DEFAULT_RANGE.0, COULOMB_R_MAX), move |r| {
        if r == 0.0 {
            return PairPoint {
                phi: 0.0,
                dphi: 1.0,
                chi: 1.0,
                dchi: f64::NEG_INFINITY,
            };
        }
        let u = 2.0 * sa * r.sqrt();
        let i1 = bessel_i(BesselOrder::ONE, u).unwrap_or(f64::INFINITY);
        let i0 = bessel_i(BesselOrder::ZERO, u).unwrap_or(f64::INFINITY);
        let k1 = bessel_k(BesselOrder::ONE, u).unwrap_or(0.0);
        let k0 = bessel_k(BesselOrder::ZERO, u).unwrap_or(0.0);
        PairPoint {
            phi: (r / alpha).sqrt() * i1,
            dphi: i0,
            chi: u * k1,
            dchi: -2.0 * alpha * k0,
        }
    })
    .with_constant("chi_scale_vs_printed", -2.0 / std::f64::consts::PI)
}
