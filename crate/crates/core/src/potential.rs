use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shared scalar function of the radius.
pub type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Shared function returning a value together with its first derivative.
pub type RegularFn = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OriginClass {
    /// `r·V(r)` is integrable at the origin.
    Regular,
    StronglySingular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailClass {
    ShortRange,
    LongRange,
}

/// An evaluatable radial potential `V(r)` with angular momentum `ell`.
#[derive(Clone)]
pub struct PotentialSpec {
    pub name: String,
    pub ell: u32,
    pub origin_class: OriginClass,
    pub tail_class: TailClass,
    pub params: BTreeMap<String, f64>,
    /// Evaluation beyond this radius is refused.
    pub r_limit: f64,
    /// Known regular solution `(φ, φ')` normalized as `r^(ℓ+1)/(2ℓ+1)!!` at
    /// the origin, when one is available in closed form.
    pub solution: Option<RegularFn>,
    func: RadialFn,
}

impl PotentialSpec {
    pub fn new(
        name: impl Into<String>,
        ell: u32,
        origin_class: OriginClass,
        tail_class: TailClass,
        params: BTreeMap<String, f64>,
        func: RadialFn,
    ) -> Self {
        Self {
            name: name.into(),
            ell,
            origin_class,
            tail_class,
            params,
            r_limit: f64::INFINITY,
            solution: None,
            func,
        }
    }

    /// Short-range, origin-regular s-wave potential from a closure.
    pub fn from_fn(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(
            name,
            0,
            OriginClass::Regular,
            TailClass::ShortRange,
            BTreeMap::new(),
            Arc::new(f),
        )
    }

    pub fn zero() -> Self {
        Self::from_fn("free", |_| 0.0)
    }

    pub fn with_ell(mut self, ell: u32) -> Self {
        self.ell = ell;
        self
    }

    pub fn with_r_limit(mut self, r_limit: f64) -> Self {
        self.r_limit = r_limit;
        self
    }

    pub fn with_solution(mut self, solution: RegularFn) -> Self {
        self.solution = Some(solution);
        self
    }

    /// `V(r)` without domain checks.
    pub fn value(&self, r: f64) -> f64 {
        (self.func)(r)
    }

    /// `V(r) + ℓ(ℓ+1)/r²`.
    pub fn effective(&self, r: f64) -> f64 {
        let v = self.value(r);
        if self.ell == 0 {
            v
        } else {
            let l = self.ell as f64;
            v + l * (l + 1.0) / (r * r)
        }
    }

    pub fn try_value(&self, r: f64) -> Result<f64> {
        self.check_domain(r)?;
        Ok(self.value(r))
    }

    pub fn try_effective(&self, r: f64) -> Result<f64> {
        self.check_domain(r)?;
        if r == 0.0 && self.ell > 0 {
            return Err(Error::Domain(format!(
                "centrifugal term of {} diverges at r = 0",
                self.name
            )));
        }
        Ok(self.effective(r))
    }

    pub fn function(&self) -> RadialFn {
        Arc::clone(&self.func)
    }

    fn check_domain(&self, r: f64) -> Result<()> {
        if !(r >= 0.0) {
            return Err(Error::Domain(format!("radius must be >= 0, got {r}")));
        }
        if r == 0.0 && self.origin_class == OriginClass::StronglySingular {
            return Err(Error::Domain(format!("{} is strongly singular at r = 0", self.name)));
        }
        if r > self.r_limit {
            return Err(Error::Domain(format!(
                "{} is only defined for r <= {}",
                self.name, self.r_limit
            )));
        }
        Ok(())
    }
}

impl fmt::Debug for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialSpec")
            .field("name", &self.name)
            .field("ell", &self.ell)
            .field("origin_class", &self.origin_class)
            .field("tail_class", &self.tail_class)
            .field("params", &self.params)
            .field("r_limit", &self.r_limit)
            .field("has_solution", &self.solution.is_some())
            .finish_non_exhaustive()
    }
}
