use super::{double_factorial_odd, GridSample, QuinticHermite, Tolerance};
use crate::error::{Error, Result};
use crate::potential::{OriginClass, PotentialSpec};

/// Solutions whose magnitude exceeds this value are reported as overflow.
pub const MAGNITUDE_CAP: f64 = 1e300;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Offset used to evaluate `q(r)·y` at `r = 0` when `q` is singular there
/// but `r·q(r)` is bounded (Coulomb-like origins).
const ORIGIN_DELTA: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OdeOptions {
    /// Upper bound on the step size.
    pub h_max: Option<f64>,
    /// First trial step; chosen from the interval length when absent.
    pub h_init: Option<f64>,
}

/// Dense solution of `y'' = q(r)·y` on `[r_start, r_end]`.
///
/// Interpolation between accepted steps is quintic Hermite in `(y, y', y'')`,
/// so `y` is C² and `y''` matches `q·y` at every knot. Below the first knot a
/// pure power law `y ∝ r^p` is used when one was supplied.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    table: QuinticHermite,
    origin_power: Option<f64>,
}

impl DenseSolution {
    /// Value and derivative. Beyond the last knot the solution continues
    /// along its tangent line.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let (lo, hi) = self.table.domain();
        if r > hi {
            let n = self.table.knots().len() - 1;
            let (y, dy) = (self.table.values()[n], self.table.derivatives()[n]);
            return (y + dy * (r - hi), dy);
        }
        match self.origin_power {
            Some(p) if r < lo && lo > 0.0 => {
                let y0 = self.table.values()[0];
                let y = y0 * (r / lo).powf(p);
                (y, if r > 0.0 { p * y / r } else { 0.0 })
            }
            _ => self.table.eval(r),
        }
    }

    pub fn eval_all(&self, r: f64) -> (f64, f64, f64) {
        self.table.eval_all(r)
    }

    pub fn domain(&self) -> (f64, f64) {
        self.table.domain()
    }

    pub fn steps(&self) -> usize {
        self.table.knots().len() - 1
    }

    /// The accepted knots as a grid sample with derivatives.
    pub fn grid(&self) -> GridSample {
        GridSample {
            r: self.table.knots().to_vec(),
            y: self.table.values().to_vec(),
            dy: Some(self.table.derivatives().to_vec()),
        }
    }

    pub fn into_table(self) -> QuinticHermite {
        self.table
    }
}

fn accel<Q: Fn(f64) -> f64>(q: &Q, r: f64, y: f64, dy: f64) -> f64 {
    let v = q(r);
    if r == 0.0 && !v.is_finite() {
        q(ORIGIN_DELTA) * (y + ORIGIN_DELTA * dy)
    } else if y == 0.0 {
        0.0
    } else {
        v * y
    }
}

/// Integrates `y'' = q(r)·y` from `(r0, y0, dy0)` to `r_end > r0` with the
/// Dormand-Prince 5(4) pair.
pub fn solve_linear_ode<Q: Fn(f64) -> f64>(
    q: Q,
    r0: f64,
    y0: f64,
    dy0: f64,
    r_end: f64,
    tol: &Tolerance,
    opts: &OdeOptions,
) -> Result<DenseSolution> {
    if !(r_end > r0) || !r0.is_finite() || !r_end.is_finite() {
        return Err(Error::Config(format!(
            "integration interval [{r0}, {r_end}] is empty or not finite"
        )));
    }
    if !y0.is_finite() || !dy0.is_finite() {
        return Err(Error::Config("initial values must be finite".into()));
    }
    let span = r_end - r0;
    let h_max = opts.h_max.unwrap_or(span).min(span);
    let f = |r: f64, y: [f64; 2]| [y[1], accel(&q, r, y[0], y[1])];

    let mut r = r0;
    let mut y = [y0, dy0];
    let mut k1 = f(r, y);
    let mut h = opts
        .h_init
        .unwrap_or_else(|| (1e-3 * r0.abs().max(1e-2)).min(1e-2 * span))
        .min(h_max);

    let mut xs = vec![r];
    let mut ys = vec![y[0]];
    let mut dys = vec![y[1]];
    let mut d2ys = vec![k1[1]];
    let mut steps = 0usize;

    while r < r_end {
        if steps >= tol.max_steps {
            return Err(Error::NonConvergent { steps, estimate: r });
        }
        steps += 1;
        let last = r + h >= r_end;
        if last {
            h = r_end - r;
        }
        if h < 1e-14 * r.abs().max(1.0) {
            return Err(Error::StepUnderflow { r });
        }

        let stage = |c: &[(f64, &[f64; 2])]| {
            let mut out = y;
            for (a, k) in c {
                out[0] += h * a * k[0];
                out[1] += h * a * k[1];
            }
            out
        };
        let k2 = f(r + C2 * h, stage(&[(A21, &k1)]));
        let k3 = f(r + C3 * h, stage(&[(A31, &k1), (A32, &k2)]));
        let k4 = f(r + C4 * h, stage(&[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(r + C5 * h, stage(&[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = f(
            r + h,
            stage(&[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = stage(&[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let r_new = if last { r_end } else { r + h };
        let k7 = f(r_new, y_new);

        let mut err2 = 0.0;
        for i in 0..2 {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = (tol.abs + tol.rel * y[i].abs().max(y_new[i].abs())).max(1e-300);
            err2 += (e / sc).powi(2);
        }
        let err = (err2 / 2.0).sqrt();

        if !err.is_finite() || !y_new.iter().chain(k7.iter()).all(|v| v.is_finite()) {
            h *= 0.2;
            continue;
        }
        let factor = if err == 0.0 {
            10.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 10.0)
        };
        if err <= 1.0 {
            r = r_new;
            y = y_new;
            k1 = k7;
            if y[0].abs() > MAGNITUDE_CAP || y[1].abs() > MAGNITUDE_CAP {
                return Err(Error::Overflow {
                    at: r,
                    cap: MAGNITUDE_CAP,
                });
            }
            xs.push(r);
            ys.push(y[0]);
            dys.push(y[1]);
            d2ys.push(k1[1]);
            h = (h * factor).min(h_max);
        } else {
            h *= factor.min(1.0);
        }
    }
    let table = QuinticHermite::new(xs, ys, dys, d2ys)?;
    Ok(DenseSolution {
        table,
        origin_power: None,
    })
}

/// Integrates the zero-energy radial equation `y'' = [V + ℓ(ℓ+1)/r²]·y`.
///
/// `r0 = 0` is accepted only for an s-wave potential that is regular at the
/// origin.
pub fn solve_zero_energy_ivp(
    v: &PotentialSpec,
    r0: f64,
    y0: f64,
    dy0: f64,
    r_end: f64,
    tol: &Tolerance,
) -> Result<DenseSolution> {
    if r0 < 0.0 {
        return Err(Error::Domain(format!("start radius must be >= 0, got {r0}")));
    }
    if r0 == 0.0 && (v.ell > 0 || v.origin_class == OriginClass::StronglySingular) {
        return Err(Error::Domain(format!(
            "{} (ell = {}) needs a start radius r0 > 0",
            v.name, v.ell
        )));
    }
    if r_end > v.r_limit {
        return Err(Error::Domain(format!(
            "{} is only defined for r <= {}",
            v.name, v.r_limit
        )));
    }
    solve_linear_ode(|r| v.effective(r), r0, y0, dy0, r_end, tol, &OdeOptions::default())
}

/// Start point `(r0, y0, dy0)` for the regular solution.
///
/// s-wave potentials regular at the origin start at `r = 0` with `(0, 1)`.
/// For `ℓ > 0` the two-term series `r^(ℓ+1)/(2ℓ+1)!!·[1 + V r²/(2(2ℓ+3))]`
/// is used at a radius small enough that `|V|·r²` is negligible.
pub fn regular_series_start(v: &PotentialSpec) -> Result<(f64, f64, f64)> {
    if v.origin_class == OriginClass::StronglySingular {
        return Err(Error::Domain(format!(
            "{} is strongly singular at the origin; supply an explicit start",
            v.name
        )));
    }
    if v.ell == 0 {
        return Ok((0.0, 0.0, 1.0));
    }
    let l = v.ell as f64;
    let mut r0: f64 = 1e-4;
    while r0 > 1e-12 && (v.value(r0).abs() * r0 * r0 > 1e-6 || !v.value(r0).is_finite()) {
        r0 *= 0.1;
    }
    let c = v.value(r0) / (2.0 * (2.0 * l + 3.0));
    let norm = double_factorial_odd(v.ell + 1);
    let y0 = r0.powf(l + 1.0) / norm * (1.0 + c * r0 * r0);
    let dy0 = r0.powf(l) / norm * ((l + 1.0) + c * (l + 3.0) * r0 * r0);
    Ok((r0, y0, dy0))
}

/// Regular solution from the origin series out to `r_end`, normalized as
/// `r` (s-wave) or `r^(ℓ+1)/(2ℓ+1)!!`.
pub fn solve_regular(v: &PotentialSpec, r_end: f64, tol: &Tolerance) -> Result<DenseSolution> {
    let (r0, y0, dy0) = regular_series_start(v)?;
    let mut sol = solve_zero_energy_ivp(v, r0, y0, dy0, r_end, tol)?;
    if r0 > 0.0 {
        sol.origin_power = Some(v.ell as f64 + 1.0);
    }
    Ok(sol)
}
