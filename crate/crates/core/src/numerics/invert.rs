use super::Tolerance;
use crate::error::{Error, Result};

const MAX_ITER: usize = 400;

/// Solves `m(r) = target` for a strictly increasing `m` on `bracket`.
///
/// Safeguarded Newton steps are used when `dm` is supplied, Illinois steps
/// otherwise; bisection takes over whenever the residual fails to halve.
pub fn invert_monotone<M, D>(m: M, dm: Option<D>, target: f64, bracket: (f64, f64), tol: &Tolerance) -> Result<f64>
where
    M: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (mut a, mut b) = bracket;
    let (m_lo, m_hi) = (m(a), m(b));
    let not_bracketed = || Error::NotBracketed {
        target,
        lo: bracket.0,
        hi: bracket.1,
        m_lo,
        m_hi,
    };
    if !(a < b) || !(m_lo <= target && target <= m_hi) {
        return Err(not_bracketed());
    }
    let accept = tol.abs + tol.rel * target.abs();
    let (mut fa, mut fb) = (m_lo - target, m_hi - target);
    if fa.abs() <= accept {
        return Ok(a);
    }
    if fb.abs() <= accept {
        return Ok(b);
    }

    let mut x = a - fa * (b - a) / (fb - fa);
    let mut last_side = 0i8;
    let mut prev_fx = f64::INFINITY;
    for _ in 0..MAX_ITER.min(tol.max_steps.max(64)) {
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        let fx = m(x) - target;
        if !fx.is_finite() {
            return Err(Error::Domain(format!("monotone map is not finite at r = {x:e}")));
        }
        if fx.abs() <= accept {
            return Ok(x);
        }
        if fx < 0.0 {
            a = x;
            fa = fx;
            if last_side == -1 {
                fb *= 0.5;
            }
            last_side = -1;
        } else {
            b = x;
            fb = fx;
            if last_side == 1 {
                fa *= 0.5;
            }
            last_side = 1;
        }
        if b - a <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
            return Ok(if fa.abs() < fb.abs() { a } else { b });
        }

        let newton = dm.as_ref().and_then(|d| {
            let slope = d(x);
            let c = x - fx / slope;
            (slope > 0.0 && c > a && c < b).then_some(c)
        });
        x = if fx.abs() > 0.5 * prev_fx {
            0.5 * (a + b)
        } else {
            newton.unwrap_or_else(|| a - fa * (b - a) / (fb - fa))
        };
        prev_fx = fx.abs();
    }
    Err(Error::NonConvergent {
        steps: MAX_ITER,
        estimate: b - a,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    type NoDeriv = fn(f64) -> f64;

    fn tol() -> Tolerance {
        Tolerance::default().with_rel(1e-13)
    }

    #[test]
    fn identity_map() {
        let r = invert_monotone(|r| r, None::<NoDeriv>, 3.7, (0.0, 10.0), &tol()).unwrap();
        assert_relative_eq!(r, 3.7, max_relative = 1e-13);
    }

    #[test]
    fn cube_root_with_and_without_derivative() {
        let r = invert_monotone(|r: f64| r.powi(3), None::<NoDeriv>, 8.0, (0.0, 5.0), &tol()).unwrap();
        assert_relative_eq!(r, 2.0, max_relative = 1e-12);
        let r = invert_monotone(|r: f64| r.powi(3), Some(|r: f64| 3.0 * r * r), 8.0, (0.0, 5.0), &tol()).unwrap();
        assert_relative_eq!(r, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn outside_bracket_is_reported() {
        let err = invert_monotone(|r| r, None::<NoDeriv>, 11.0, (0.0, 10.0), &tol()).unwrap_err();
        assert!(matches!(err, Error::NotBracketed { .. }));
    }

    #[test]
    fn steep_map_converges() {
        let m = |r: f64| r.exp() - 1.0;
        let r = invert_monotone(m, None::<NoDeriv>, 1e6, (0.0, 100.0), &tol()).unwrap();
        assert_relative_eq!(r, (1e6f64 + 1.0).ln(), max_relative = 1e-12);
    }

    proptest! {
        #[test]
        fn round_trip(r in 1e-3f64..50.0, k in 0.1f64..3.0) {
            let m = |t: f64| t * t * t + k * t + (t / (1.0 + t)).atan();
            let found = invert_monotone(m, None::<NoDeriv>, m(r), (0.0, 60.0), &tol()).unwrap();
            prop_assert!((found - r).abs() <= 1e-9 * r.max(1.0));
            let d = |t: f64| 3.0 * t * t + k + 1.0 / ((1.0 + t).powi(2) + t * t);
            let found = invert_monotone(m, Some(d), m(r), (0.0, 60.0), &tol()).unwrap();
            prop_assert!((found - r).abs() <= 1e-9 * r.max(1.0));
        }
    }
}
