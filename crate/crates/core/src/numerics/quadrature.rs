use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{TailKind, TailModel, Tolerance};
use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Relative mismatch between `1/sqrt(f)` and the fitted asymptote that fixes
/// the tail cutoff.
const ASYMPTOTE_MATCH: f64 = 1e-9;
const MAX_DOUBLINGS: usize = 80;

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    /// Roundoff floor `50ε·∫|f|` included in `error`.
    floor: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// 21-point Kronrod rule on `[a, b]` with the embedded 10-point Gauss rule.
/// Returns `(value, error_estimate)`.
pub fn gauss_kronrod21<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> (f64, f64) {
    let (value, err, _) = kronrod_with_floor(f, a, b);
    (value, err)
}

fn kronrod_with_floor<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    let mut res_abs = kronrod.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let width = half.abs();
    let value = kronrod * half;
    let res_abs = res_abs * width;
    let res_asc = res_asc * width;

    // QUADPACK error rescaling
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(floor);
    }
    (value, err, floor)
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let (value, error, floor) = kronrod_with_floor(f, a, b);
    if !value.is_finite() || !error.is_finite() {
        return Err(Error::Domain(format!("integrand is not finite on [{a:e}, {b:e}]")));
    }
    Ok(Panel {
        a,
        b,
        value,
        error,
        floor: floor.min(error),
    })
}

/// Globally adaptive Gauss-Kronrod integration over consecutive panels
/// `[breaks[0], breaks[1]], [breaks[1], breaks[2]], ...`.
pub fn integrate_panels<F: Fn(f64) -> f64>(f: F, breaks: &[f64], tol: &Tolerance) -> Result<f64> {
    if breaks.len() < 2 {
        return Ok(0.0);
    }
    let mut heap = BinaryHeap::new();
    for w in breaks.windows(2) {
        if w[1] != w[0] {
            heap.push(panel(&f, w[0], w[1])?);
        }
    }
    let mut steps = 0;
    loop {
        let total: f64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        let floor: f64 = heap.iter().map(|p| p.floor).sum();
        // the roundoff part of the estimate cannot be reduced by subdivision
        if error - floor <= tol.bound(total) {
            return Ok(total);
        }
        if steps >= tol.max_steps {
            return Err(Error::NonConvergent { steps, estimate: error });
        }
        let Some(worst) = heap.pop() else {
            return Ok(0.0);
        };
        let mid = 0.5 * (worst.a + worst.b);
        if (worst.b - worst.a).abs() <= 64.0 * f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE) {
            // roundoff limited; nothing more to gain
            heap.push(worst);
            return Ok(heap.iter().map(|p| p.value).sum());
        }
        heap.push(panel(&f, worst.a, mid)?);
        heap.push(panel(&f, mid, worst.b)?);
        steps += 1;
    }
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: &Tolerance) -> Result<f64> {
    integrate_panels(f, &[a, b], tol)
}

/// Breakpoints `a, 2a, 4a, ..., b` (or `0, 1, 2, 4, ...` when `a = 0`).
pub(crate) fn geometric_breaks(a: f64, b: f64) -> Vec<f64> {
    let mut breaks = vec![a];
    let mut x = if a > 0.0 { 2.0 * a } else { (b * 1e-6).clamp(1e-3, 1.0) };
    while x < b && breaks.len() < 200 {
        breaks.push(x);
        x *= 2.0;
    }
    breaks.push(b);
    breaks
}

/// Radius beyond which `1/sqrt(f)` matches the tail asymptote to
/// [`ASYMPTOTE_MATCH`] relative.
pub(crate) fn asymptote_cutoff<F: Fn(f64) -> f64>(f: &F, a: f64, tail: &TailModel) -> Result<f64> {
    let mut r = (2.0 * a).max(2.0);
    for _ in 0..MAX_DOUBLINGS {
        let fr = f(r);
        if fr > 0.0 && fr.is_finite() {
            let phi = fr.sqrt().recip();
            let model = tail.asymptote_at(r);
            if (phi - model).abs() <= ASYMPTOTE_MATCH * phi.abs() {
                return Ok(r);
            }
        }
        r *= 2.0;
    }
    Err(Error::BadTail(format!(
        "integrand never approaches the asymptote {}·r^{} + {}·r^-{} (searched to r = {r:e})",
        tail.a,
        tail.ell + 1,
        tail.b,
        tail.ell
    )))
}

/// `∫_R^∞ dt / (a t^(ℓ+1) + b t^(-ℓ))²`, exact for ℓ = 0 and a three-term
/// expansion in `b/(a R^(2ℓ+1))` otherwise.
pub(crate) fn asymptote_remainder(tail: &TailModel, r: f64) -> f64 {
    let (a, b) = (tail.a, tail.b);
    if tail.ell == 0 {
        return 1.0 / (a * (a * r + b));
    }
    let m = (2 * tail.ell + 1) as f64;
    let q = r.powf(-m);
    let eps = b / a * q;
    q / (a * a) * (1.0 / m - eps / m + eps * eps / m)
}

/// `∫_a^∞ f(t) dt` with adaptive subdivision on `[a, R]` and an analytic or
/// probed tail beyond `R`.
pub fn integrate_improper<F: Fn(f64) -> f64>(f: F, a: f64, tail: &TailModel, tol: &Tolerance) -> Result<f64> {
    if !(a >= 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!("lower limit must be finite and >= 0, got {a}")));
    }
    match tail.kind {
        TailKind::LinearAsymptote => {
            tail.validate()?;
            let cutoff = asymptote_cutoff(&f, a, tail)?;
            let body = integrate_panels(&f, &geometric_breaks(a, cutoff), tol)?;
            Ok(body + asymptote_remainder(tail, cutoff))
        }
        TailKind::PowerDecay => power_decay_tail(&f, a, tail, tol),
        TailKind::None => probed_tail(&f, a, tol),
    }
}

/// Tolerance for one outer piece: its error is measured against the
/// accumulated integral, not against the piece itself.
fn piece_tol(tol: &Tolerance, body: f64) -> Tolerance {
    tol.with_abs(tol.abs.max(0.1 * tol.rel * body.abs()))
}

fn decay_exponent(f1: f64, f2: f64) -> Option<f64> {
    if f1 == 0.0 || f2 == 0.0 || f1.signum() != f2.signum() {
        return None;
    }
    Some((f1 / f2).log2())
}

fn power_decay_tail<F: Fn(f64) -> f64>(f: &F, a: f64, tail: &TailModel, tol: &Tolerance) -> Result<f64> {
    let mut r = (2.0 * a).max(1.0);
    let mut body = integrate_panels(f, &geometric_breaks(a, r), tol)?;
    for _ in 0..MAX_DOUBLINGS {
        let (f1, f2, f4) = (f(r), f(2.0 * r), f(4.0 * r));
        if f1 == 0.0 && f2 == 0.0 && f4 == 0.0 {
            return Ok(body);
        }
        let known = (tail.b > 1.0).then_some(tail.b);
        if let (Some(p), Some(p_next)) = (
            known.or_else(|| decay_exponent(f1, f2)),
            known.or_else(|| decay_exponent(f2, f4)),
        ) {
            if p > 1.0 && p_next > 1.0 {
                let rem = f1 * r / (p - 1.0);
                let rem_err = rem.abs() * ((p - p_next).abs() / (p_next - 1.0)).max(f64::EPSILON);
                if rem_err <= 0.5 * tol.bound(body + rem) {
                    return Ok(body + rem);
                }
            }
        }
        body += integrate(f, r, 2.0 * r, &piece_tol(tol, body))?;
        r *= 2.0;
    }
    Err(Error::BadTail(format!(
        "no integrable power-law decay found up to r = {r:e}"
    )))
}

fn probed_tail<F: Fn(f64) -> f64>(f: &F, a: f64, tol: &Tolerance) -> Result<f64> {
    let mut r = (2.0 * a).max(1.0);
    let mut body = integrate_panels(f, &geometric_breaks(a, r), tol)?;
    let mut previous = f64::INFINITY;
    for _ in 0..MAX_DOUBLINGS {
        let piece = integrate(f, r, 2.0 * r, &piece_tol(tol, body))?;
        body += piece;
        r *= 2.0;
        if piece.abs() <= 0.1 * tol.bound(body) && piece.abs() <= 0.5 * previous {
            return Ok(body);
        }
        previous = piece.abs();
    }
    Err(Error::BadTail(format!(
        "integrand does not decay integrably within r <= {r:e}"
    )))
}
