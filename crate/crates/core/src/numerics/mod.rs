//! Numerical kernels shared by the rest of the crate: adaptive quadrature on
//! semi-infinite intervals, adaptive Runge-Kutta integration of the
//! zero-energy radial equation, monotone inversion and Hermite tables.

mod hermite;
mod invert;
mod ode;
mod quadrature;

pub use hermite::QuinticHermite;
pub use invert::invert_monotone;
pub use ode::{
    regular_series_start, solve_linear_ode, solve_regular, solve_zero_energy_ivp, DenseSolution, OdeOptions,
    MAGNITUDE_CAP,
};
pub(crate) use quadrature::{asymptote_cutoff, asymptote_remainder};
pub use quadrature::{gauss_kronrod21, integrate, integrate_improper, integrate_panels};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Accuracy request passed to the numerical kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_steps: usize,
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64, max_steps: usize) -> Result<Self> {
        if !(rel > 0.0) || !rel.is_finite() {
            return Err(Error::Config(format!("tolerance rel must be > 0, got {rel}")));
        }
        if !(abs >= 0.0) || !abs.is_finite() {
            return Err(Error::Config(format!("tolerance abs must be >= 0, got {abs}")));
        }
        if max_steps == 0 {
            return Err(Error::Config("tolerance max_steps must be >= 1".into()));
        }
        Ok(Self { rel, abs, max_steps })
    }

    pub fn with_rel(self, rel: f64) -> Self {
        Self { rel, ..self }
    }

    pub fn with_abs(self, abs: f64) -> Self {
        Self { abs, ..self }
    }

    /// Accepted error for a quantity of magnitude `scale`.
    pub fn bound(&self, scale: f64) -> f64 {
        self.abs + self.rel * scale.abs()
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel: 1e-10,
            abs: 1e-30,
            max_steps: 100_000,
        }
    }
}

/// Sampled function on a strictly increasing radial grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSample {
    pub r: Vec<f64>,
    pub y: Vec<f64>,
    pub dy: Option<Vec<f64>>,
}

impl GridSample {
    pub fn new(r: Vec<f64>, y: Vec<f64>, dy: Option<Vec<f64>>) -> Result<Self> {
        if r.len() < 2 {
            return Err(Error::Config("grid needs at least two radii".into()));
        }
        if y.len() != r.len() || dy.as_ref().is_some_and(|d| d.len() != r.len()) {
            return Err(Error::Config("grid arrays differ in length".into()));
        }
        if r[0] < 0.0 || r.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config(
                "grid radii must be non-negative and strictly increasing".into(),
            ));
        }
        Ok(Self { r, y, dy })
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

/// Recipe for a radial grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn linear(r_min: f64, r_max: f64, points: usize) -> Self {
        Self {
            r_min,
            r_max,
            points,
            spacing: Spacing::Linear,
        }
    }

    pub fn log(r_min: f64, r_max: f64, points: usize) -> Self {
        Self {
            r_min,
            r_max,
            points,
            spacing: Spacing::Log,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::Config("grid points must be >= 2".into()));
        }
        if !(self.r_min >= 0.0) || !(self.r_max > self.r_min) || !self.r_max.is_finite() {
            return Err(Error::Config(format!(
                "grid range must satisfy 0 <= r_min < r_max, got [{}, {}]",
                self.r_min, self.r_max
            )));
        }
        if self.spacing == Spacing::Log && self.r_min <= 0.0 {
            return Err(Error::Config("log grid needs r_min > 0".into()));
        }
        Ok(())
    }

    pub fn radii(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let n = self.points;
        let last = (n - 1) as f64;
        let mut r: Vec<f64> = match self.spacing {
            Spacing::Linear => (0..n)
                .map(|i| self.r_min + (self.r_max - self.r_min) * i as f64 / last)
                .collect(),
            Spacing::Log => {
                let (l0, l1) = (self.r_min.ln(), self.r_max.ln());
                (0..n).map(|i| (l0 + (l1 - l0) * i as f64 / last).exp()).collect()
            }
        };
        r[0] = self.r_min;
        r[n - 1] = self.r_max;
        Ok(r)
    }

    /// Same grid restricted to `[lo, hi]`.
    pub fn clamped(&self, lo: f64, hi: f64) -> Self {
        Self {
            r_min: self.r_min.max(lo),
            r_max: self.r_max.min(hi),
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailKind {
    LinearAsymptote,
    PowerDecay,
    None,
}

/// Large-r behaviour of a function.
///
/// For `LinearAsymptote` the function behaves like `a·r^(ell+1) + b·r^(-ell)`;
/// with `ell = 0` this is the straight line `a·r + b`. For `PowerDecay` a
/// positive `b` is taken as a known decay exponent, otherwise the exponent is
/// probed numerically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailModel {
    pub kind: TailKind,
    pub a: f64,
    pub b: f64,
    #[serde(default)]
    pub ell: u32,
}

impl TailModel {
    pub fn linear(a: f64, b: f64) -> Self {
        Self::asymptote(0, a, b)
    }

    pub fn asymptote(ell: u32, a: f64, b: f64) -> Self {
        Self {
            kind: TailKind::LinearAsymptote,
            a,
            b,
            ell,
        }
    }

    pub fn power_decay() -> Self {
        Self {
            kind: TailKind::PowerDecay,
            a: 0.0,
            b: 0.0,
            ell: 0,
        }
    }

    pub fn none() -> Self {
        Self {
            kind: TailKind::None,
            a: 0.0,
            b: 0.0,
            ell: 0,
        }
    }

    /// `a·r^(ell+1) + b·r^(-ell)`.
    pub fn asymptote_at(&self, r: f64) -> f64 {
        let l = self.ell as i32;
        self.a * r.powi(l + 1) + self.b * r.powi(-l)
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind == TailKind::LinearAsymptote && !(self.a > 0.0) {
            return Err(Error::TailDivergence { a: self.a });
        }
        Ok(())
    }
}

/// `(2k-1)!!` with the conventions `(-1)!! = 1`, `1!! = 1`.
pub fn double_factorial_odd(k: u32) -> f64 {
    (1..=k).map(|j| (2 * j - 1) as f64).product()
}
