//! Independent checks on solution pairs and composed systems.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::SolutionPair;
use crate::error::{Error, Result};
use crate::numerics::{integrate_improper, GridSpec, TailKind, TailModel, Tolerance};
use crate::potential::{OriginClass, PotentialSpec, TailClass};
use crate::transform::ComposedSystem;

/// Default relative RMS threshold for [`asymptotic_fit`].
pub const FIT_THRESHOLD: f64 = 1e-6;
/// Tail slopes at or below this count as a zero-energy resonance.
pub const A_MIN: f64 = 1e-6;
pub const RESIDUAL_GATE: f64 = 1e-6;
pub const WRONSKIAN_GATE: f64 = 1e-8;

const STENCIL_LEVELS: i32 = 11;

fn five_point(f: &(dyn Fn(f64) -> f64 + Sync), r: f64, h: f64) -> f64 {
    (f(r - 2.0 * h) - 8.0 * f(r - h) + 8.0 * f(r + h) - f(r + 2.0 * h)) / (12.0 * h)
}

/// `φ''(r)` by differentiating `φ'` with a 5-point stencil. The step is
/// halved from `0.1 r`; the estimate that agrees best with both of its
/// neighbours is kept.
pub fn second_derivative(sol: &(dyn Fn(f64) -> (f64, f64) + Sync), r: f64) -> f64 {
    let d = |t: f64| sol(t).1;
    let est: Vec<f64> = (0..STENCIL_LEVELS)
        .map(|k| five_point(&d, r, 0.1 * r * 0.5f64.powi(k)))
        .collect();
    let mut best = (f64::INFINITY, est[1]);
    for k in 1..est.len() - 1 {
        let spread = (est[k] - est[k - 1]).abs().max((est[k + 1] - est[k]).abs());
        if spread < best.0 {
            best = (spread, est[k]);
        }
    }
    best.1
}

/// Pointwise relative residual of `φ'' = (V + ℓ(ℓ+1)/r²)φ` on `grid`.
///
/// The denominator is `|V_eff φ| + floor` with `floor = 1e-3·max|V_eff φ|`
/// over the grid; for `V_eff ≡ 0` the floor is `1e-3·max|φ|/r_max²`.
pub fn residual_profile(v: &PotentialSpec, sol: &(dyn Fn(f64) -> (f64, f64) + Sync), grid: &[f64]) -> Vec<f64> {
    let rows: Vec<(f64, f64, f64)> = grid
        .par_iter()
        .map(|&r| {
            let phi = sol(r).0;
            let rhs = v.effective(r) * phi;
            (phi, rhs, second_derivative(sol, r))
        })
        .collect();
    let max_rhs = rows.iter().fold(0.0f64, |m, row| m.max(row.1.abs()));
    let floor = if max_rhs > 0.0 {
        1e-3 * max_rhs
    } else {
        let max_phi = rows.iter().fold(0.0f64, |m, row| m.max(row.0.abs()));
        let r_max = grid.iter().fold(0.0f64, |m, &r| m.max(r));
        1e-3 * max_phi / (r_max * r_max)
    };
    rows.iter()
        .map(|&(_, rhs, d2)| {
            let rel = (d2 - rhs).abs() / (rhs.abs() + floor);
            if rel.is_nan() {
                f64::INFINITY
            } else {
                rel
            }
        })
        .collect()
}

/// Maximum of [`residual_profile`].
pub fn residual(v: &PotentialSpec, sol: &(dyn Fn(f64) -> (f64, f64) + Sync), grid: &[f64]) -> f64 {
    residual_profile(v, sol, grid).into_iter().fold(0.0, f64::max)
}

fn sign_changes(f: &dyn Fn(f64) -> f64, grid: &[f64]) -> usize {
    let mut count = 0;
    let mut sign = 0.0f64;
    for &r in grid {
        let y = f(r);
        if y == 0.0 || y.is_nan() {
            continue;
        }
        let s = y.signum();
        if sign != 0.0 && s != sign {
            count += 1;
        }
        sign = s;
    }
    count
}

fn node_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut g: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let (l0, l1) = (lo.ln(), hi.ln());
    g.extend((0..n).map(|i| (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp()));
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// Sign changes of `f` on `(lo, hi]`, away from the structural zero at the
/// origin. The grid is doubled until two successive levels agree.
pub fn count_nodes(f: &dyn Fn(f64) -> f64, domain: (f64, f64), ell: u32) -> Result<usize> {
    let (lo, hi) = domain;
    if !(hi > lo) || !(lo >= 0.0) {
        return Err(Error::Config(format!(
            "node-count domain must satisfy 0 <= lo < hi, got ({lo}, {hi})"
        )));
    }
    let r_excl = hi * 1e-12f64.powf(1.0 / (ell as f64 + 1.0));
    let start = lo.max(r_excl);
    let mut n = 200;
    let mut prev = sign_changes(f, &node_grid(start, hi, n));
    for _ in 0..8 {
        n *= 2;
        let next = sign_changes(f, &node_grid(start, hi, n));
        if next == prev {
            return Ok(next);
        }
        prev = next;
    }
    let fine = sign_changes(f, &node_grid(start, hi, 2 * n));
    Err(Error::Unstable { coarse: prev, fine })
}

/// `∫_0^∞ r|V(r)| dr`.
pub fn bargmann_bound(v: &PotentialSpec) -> Result<f64> {
    if v.tail_class == TailClass::LongRange {
        return Err(Error::NonConvergent {
            steps: 0,
            estimate: f64::INFINITY,
        });
    }
    if v.origin_class == OriginClass::StronglySingular {
        return Err(Error::Domain(format!(
            "r|V| is not integrable at the origin for {}",
            v.name
        )));
    }
    let tol = Tolerance::default().with_rel(1e-10);
    integrate_improper(|r| r * v.value(r).abs(), 0.0, &TailModel::power_decay(), &tol)
}

/// Least-squares tail coefficients with the relative RMS residual of the fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub tail: TailModel,
    pub residual: f64,
    pub window: (f64, f64),
}

/// Fits `f ≈ A r^(ℓ+1) + B r^(-ℓ)` on `window` with threshold
/// [`FIT_THRESHOLD`].
pub fn asymptotic_fit(f: &dyn Fn(f64) -> f64, ell: u32, window: (f64, f64)) -> Result<Fit> {
    asymptotic_fit_with(f, ell, window, FIT_THRESHOLD)
}

/// Relative (weighted) least squares on 64 points, solved by modified
/// Gram-Schmidt on scaled columns.
pub fn asymptotic_fit_with(f: &dyn Fn(f64) -> f64, ell: u32, window: (f64, f64), threshold: f64) -> Result<Fit> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Config(format!(
            "fit window must satisfy 0 < lo < hi, got ({lo}, {hi})"
        )));
    }
    let l = ell as i32;
    let (s1, s2) = (hi.powi(l + 1), lo.powi(-l));
    let m = 64;
    let mut c1 = Vec::with_capacity(m);
    let mut c2 = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for i in 0..m {
        let r = lo + (hi - lo) * i as f64 / (m - 1) as f64;
        let y = f(r);
        if !y.is_finite() || y == 0.0 {
            return Err(Error::Domain(format!("cannot fit: f({r}) = {y:e}")));
        }
        let w = 1.0 / y.abs();
        c1.push(r.powi(l + 1) / s1 * w);
        c2.push(r.powi(-l) / s2 * w);
        rhs.push(y * w);
    }
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let n1 = dot(&c1, &c1).sqrt();
    let q1: Vec<f64> = c1.iter().map(|x| x / n1).collect();
    let r12 = dot(&q1, &c2);
    let mut q2: Vec<f64> = c2.iter().zip(&q1).map(|(c, q)| c - r12 * q).collect();
    let n2 = dot(&q2, &q2).sqrt();
    q2.iter_mut().for_each(|x| *x /= n2);
    let (t1, t2) = (dot(&q1, &rhs), dot(&q2, &rhs));
    let b = t2 / n2;
    let a = (t1 - r12 * b) / n1;
    let (a, b) = (a / s1, b / s2);

    let mut ss = 0.0;
    for i in 0..m {
        let fitted = a * c1[i] * s1 + b * c2[i] * s2;
        ss += (fitted - rhs[i]).powi(2);
    }
    let residual = (ss / m as f64).sqrt();
    if !(residual <= threshold) {
        return Err(Error::PoorFit { residual, threshold });
    }
    Ok(Fit {
        tail: TailModel::asymptote(ell, a, b),
        residual,
        window,
    })
}

/// Fit window `[0.7 R, R]` used for a pair, with `R` bounded by its reach.
pub fn fit_window(pair: &SolutionPair) -> (f64, f64) {
    let r = pair.reach.min(1e4);
    (0.7 * r, r)
}

/// Outcome of [`certify_no_bound_states`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub certified: bool,
    pub node_count: usize,
    pub tail_slope: Option<f64>,
    pub detail: String,
}

/// True when `φ` has no node on `(0, R]` and a positive tail slope.
pub fn certify_no_bound_states(pair: &SolutionPair) -> Certificate {
    let r_nodes = pair.reach.min(50.0);
    let phi = |r: f64| pair.phi(r);
    let nodes = match count_nodes(&phi, (0.0, r_nodes), pair.ell) {
        Ok(n) => n,
        Err(e) => {
            return Certificate {
                certified: false,
                node_count: 0,
                tail_slope: None,
                detail: e.to_string(),
            }
        }
    };
    if nodes > 0 {
        return Certificate {
            certified: false,
            node_count: nodes,
            tail_slope: None,
            detail: format!("regular solution has {nodes} node(s) on (0, {r_nodes}]"),
        };
    }
    if pair.tail.kind == TailKind::None {
        let p = pair.eval(pair.reach.min(1e4));
        let ok = p.phi > 0.0 && p.dphi > 0.0;
        return Certificate {
            certified: ok,
            node_count: 0,
            tail_slope: None,
            detail: if ok {
                "no nodes; solution positive and increasing at the edge".into()
            } else {
                "solution not increasing at the edge".into()
            },
        };
    }
    match asymptotic_fit(&phi, pair.ell, fit_window(pair)) {
        Ok(fit) => {
            let ok = fit.tail.a > A_MIN;
            Certificate {
                certified: ok,
                node_count: 0,
                tail_slope: Some(fit.tail.a),
                detail: if ok {
                    format!("no nodes; tail slope {:e}", fit.tail.a)
                } else {
                    format!("tail slope {:e} does not exceed {A_MIN:e}", fit.tail.a)
                },
            }
        }
        Err(e) => Certificate {
            certified: false,
            node_count: 0,
            tail_slope: None,
            detail: e.to_string(),
        },
    }
}

/// One named check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub detail: String,
}

impl Check {
    fn below(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            passed: value < threshold,
            value,
            threshold,
            detail: String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub subject: String,
    pub max_wronskian_dev: Option<f64>,
    pub max_residual_rel: f64,
    pub node_count: usize,
    pub bargmann_bound: Option<f64>,
    pub tail: Option<TailModel>,
    pub flags: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.flags.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.flags.iter().filter(|c| !c.passed).collect()
    }
}

/// Default verification grid of a pair: 400 log points over its working
/// range.
pub fn working_grid(pair: &SolutionPair) -> Result<Vec<f64>> {
    let (lo, hi) = pair.working_range;
    GridSpec::log(lo, hi, 400).radii()
}

/// Wronskian, residual, nodes, tail fit and `χ(∞)·A = 1` for one pair.
pub fn verify_pair(pair: &SolutionPair) -> Result<VerificationReport> {
    let grid = working_grid(pair)?;
    let pf = pair.pair_fn();
    let wdev = grid
        .par_iter()
        .map(|&r| (pf(r).wronskian() - 1.0).abs())
        .reduce(|| 0.0, |a, b| if b.is_nan() { f64::INFINITY } else { a.max(b) });
    let reg = pair.regular();
    let res = residual(&pair.potential, &*reg, &grid);
    let cert = certify_no_bound_states(pair);

    let mut flags = vec![
        Check::below("wronskian", wdev, WRONSKIAN_GATE),
        Check::below("residual", res, RESIDUAL_GATE),
        Check {
            name: "no-bound-states".into(),
            passed: cert.certified == pair.no_bound_states,
            value: cert.node_count as f64,
            threshold: 0.0,
            detail: cert.detail.clone(),
        },
    ];

    let mut tail = None;
    if pair.tail.kind == TailKind::LinearAsymptote {
        let phi = |r: f64| pair.phi(r);
        match asymptotic_fit(&phi, pair.ell, fit_window(pair)) {
            Ok(fit) => {
                let dev = (fit.tail.a / pair.tail.a - 1.0).abs();
                flags.push(Check::below("tail-slope", dev, 1e-6));
                if pair.ell == 0 {
                    let far = fit_window(pair).1;
                    let chi_inf = pair.chi(far);
                    flags.push(Check::below(
                        "chi-inf-times-a",
                        (chi_inf * fit.tail.a - 1.0).abs(),
                        1e-6,
                    ));
                }
                tail = Some(fit.tail);
            }
            Err(e) => flags.push(Check {
                name: "tail-slope".into(),
                passed: false,
                value: f64::NAN,
                threshold: 1e-6,
                detail: e.to_string(),
            }),
        }
    }

    let bound = bargmann_bound(&pair.potential).ok();
    if let Some(b) = bound {
        flags.push(Check {
            name: "bargmann".into(),
            passed: cert.node_count as f64 <= b + 1e-9,
            value: cert.node_count as f64,
            threshold: b,
            detail: String::new(),
        });
    }

    Ok(VerificationReport {
        subject: pair.name.clone(),
        max_wronskian_dev: Some(wdev),
        max_residual_rel: res,
        node_count: cert.node_count,
        bargmann_bound: bound,
        tail,
        flags,
    })
}

/// Residual of the composed solution against the composed potential, node
/// preservation and the bound on the inner potential.
pub fn verify_composed(sys: &ComposedSystem, grid: &[f64]) -> Result<VerificationReport> {
    let potential = sys.potential();
    let sol = sys.solution();
    let res = residual(&potential, &*sol, grid);
    let r_nodes = sys.r_max.min(50.0);
    let composed_nodes = count_nodes(&|r| sol(r).0, (0.0, r_nodes), sys.ell())?;
    let x_end = sys.mapping.forward(r_nodes);
    let inner_nodes = count_nodes(&|x| sys.inner_solution.eval(x).0, (0.0, x_end), 0)?;
    let bound = bargmann_bound(&sys.inner).ok();

    let mut flags = vec![
        Check::below("residual", res, RESIDUAL_GATE),
        Check {
            name: "node-preservation".into(),
            passed: composed_nodes == inner_nodes,
            value: composed_nodes as f64,
            threshold: inner_nodes as f64,
            detail: String::new(),
        },
    ];
    if let Some(b) = bound {
        flags.push(Check {
            name: "bargmann".into(),
            passed: composed_nodes as f64 <= b + 1e-9,
            value: composed_nodes as f64,
            threshold: b,
            detail: String::new(),
        });
    }
    Ok(VerificationReport {
        subject: sys.label(),
        max_wronskian_dev: None,
        max_residual_rel: res,
        node_count: composed_nodes,
        bargmann_bound: bound,
        tail: None,
        flags,
    })
}

#[cfg(test)]
mod tests;
