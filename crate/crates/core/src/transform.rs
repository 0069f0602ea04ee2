//! Composition of zero-energy solvable potentials.
//!
//! Given a base pair `(φ₀, χ₀)` with unit Wronskian and no bound states, the
//! map `x(r) = φ₀(r)/χ₀(r)` is a smooth bijection of the half line with
//! `x'(r) = χ₀(r)⁻²`. If `φ₁` is the regular solution for an s-wave potential
//! `V₁`, then `χ₀(r)·φ₁(x(r))` is the regular solution for
//!
//! ```text
//! V(r) = V₀(r) + ℓ(ℓ+1)/r² + χ₀(r)⁻⁴ · V₁(x(r)).
//! ```
//!
//! Compositions can be repeated with the same base. Everything is kept as
//! closures over the inputs; nothing is expanded symbolically.

use std::sync::{Arc, OnceLock};

use crate::catalog::{PairFn, SolutionPair};
use crate::error::{Error, Result};
use crate::numerics::{
    asymptote_cutoff, asymptote_remainder, integrate, integrate_improper, invert_monotone, solve_linear_ode,
    solve_regular, DenseSolution, OdeOptions, TailKind, TailModel, Tolerance,
};
use crate::potential::{OriginClass, PotentialSpec, RadialFn, RegularFn, TailClass};

/// Default outer radius of the tabulated region for short-range bases.
pub const DEFAULT_R_MAX: f64 = 60.0;
/// Outer radius for long-range bases; evaluation beyond is refused.
pub const LONG_RANGE_R_MAX: f64 = 30.0;
pub const DEFAULT_MAX_DEPTH: usize = 4;

/// Knots used by the cumulative tables: geometric up to 1, uniform up to 64,
/// geometric beyond.
fn table_knots(lo: f64, hi: f64) -> Vec<f64> {
    let mut knots = vec![lo];
    let mut r = lo;
    while r < hi {
        r = if r < 1.0 {
            (r * 1.25).min(1.0).max(r + 1e-300)
        } else if r < 64.0 {
            r + 0.25
        } else {
            r * 1.25
        };
        knots.push(r.min(hi));
    }
    knots.dedup();
    knots
}

/// Second solution `χ(r) = φ(r)·∫_r^∞ dt/φ(t)²` built from a regular
/// solution without nodes.
///
/// The integral is tabulated at fixed knots once; an evaluation adds one
/// adaptive piece from `r` to the next knot.
pub struct ChiFromPhi {
    phi: RegularFn,
    tail: TailModel,
    knots: Vec<f64>,
    values: Vec<f64>,
    /// `(χ(0), χ'(0))` for s-wave regular solutions.
    origin: Option<(f64, f64)>,
    tol: Tolerance,
}

impl ChiFromPhi {
    fn integrand(&self) -> impl Fn(f64) -> f64 + '_ {
        move |t| (self.phi)(t).0.powi(-2)
    }

    /// `∫_r^∞ dt/φ²`.
    pub fn tail_integral(&self, r: f64) -> Result<f64> {
        let f = self.integrand();
        let last = *self.knots.last().expect("knots are non-empty");
        if r >= last {
            return match self.tail.kind {
                TailKind::LinearAsymptote => Ok(asymptote_remainder(&self.tail, r)),
                _ => integrate_improper(f, r, &self.tail, &self.tol),
            };
        }
        let k = self.knots.partition_point(|&x| x < r);
        let piece = if self.knots[k] > r {
            integrate(&f, r, self.knots[k], &self.tol)?
        } else {
            0.0
        };
        Ok(self.values[k] + piece)
    }

    /// `(χ(r), χ'(r))`.
    pub fn eval(&self, r: f64) -> Result<(f64, f64)> {
        if r == 0.0 {
            return Ok(self.origin.unwrap_or((f64::INFINITY, f64::NEG_INFINITY)));
        }
        let (p, dp) = (self.phi)(r);
        if p == 0.0 {
            return Ok((f64::INFINITY, f64::NEG_INFINITY));
        }
        let g = self.tail_integral(r)?;
        Ok((p * g, dp * g - 1.0 / p))
    }

    /// Shared evaluation closure; failures surface as NaN.
    pub fn into_fn(self) -> RegularFn {
        let this = Arc::new(self);
        Arc::new(move |r| this.eval(r).unwrap_or((f64::NAN, f64::NAN)))
    }
}

/// Builds `χ` from `φ`. `ell` selects the near-origin behaviour; for s-waves
/// `χ(0) = 1/φ'(0)`.
pub fn chi_from_phi(phi: RegularFn, tail: &TailModel, ell: u32, tol: &Tolerance) -> Result<ChiFromPhi> {
    tail.validate()?;
    let f = |t: f64| phi(t).0.powi(-2);

    let mut lo = 1e-6;
    while lo < 1.0 {
        let p = phi(lo).0;
        if p > 1e-150 && f(lo).is_finite() {
            break;
        }
        lo *= 10.0;
    }
    let hi = match tail.kind {
        TailKind::LinearAsymptote => asymptote_cutoff(&f, 1.0, tail)?,
        _ => 64.0,
    };
    let knots = table_knots(lo, hi);

    for w in knots.windows(2) {
        for j in 0..4 {
            let r = w[0] + (w[1] - w[0]) * j as f64 / 4.0;
            if !(phi(r).0 > 0.0) {
                return Err(Error::NoBoundStateViolation { r });
            }
        }
    }

    let last = *knots.last().expect("non-empty");
    let mut values = vec![0.0; knots.len()];
    values[knots.len() - 1] = match tail.kind {
        TailKind::LinearAsymptote => asymptote_remainder(tail, last),
        _ => integrate_improper(f, last, tail, tol)?,
    };
    for i in (0..knots.len() - 1).rev() {
        values[i] = values[i + 1] + integrate(f, knots[i], knots[i + 1], tol)?;
    }

    let mut table = ChiFromPhi {
        phi: Arc::clone(&phi),
        tail: *tail,
        knots,
        values,
        origin: None,
        tol: *tol,
    };
    let (p0, dp0) = phi(0.0);
    if ell == 0 && p0 == 0.0 && dp0 > 0.0 && dp0.is_finite() {
        // χ'(0) = φ'(0)·∫_0^∞ [φ⁻² - (φ'(0) t)⁻²] dt; the bounded integrand
        // is extrapolated linearly on [0, δ] where cancellation dominates
        let edge = 1e-3f64.max(table.knots[0]);
        let delta = 0.1 * edge;
        let g = |t: f64| f(t) - (dp0 * t).powi(-2);
        let near = integrate(g, delta, edge, &tol.with_abs(tol.abs.max(1e-11)))?
            + delta * (1.5 * g(delta) - 0.5 * g(2.0 * delta));
        let far = table.tail_integral(edge)? - 1.0 / (dp0 * dp0 * edge);
        table.origin = Some((1.0 / dp0, dp0 * (near + far)));
    }
    Ok(table)
}

/// Regular solution `φ(r) = χ(r)·∫_0^r dt/χ(t)²` built from a positive second
/// solution with `χ(0) = 1`.
pub struct PhiFromChi {
    chi: RegularFn,
    knots: Vec<f64>,
    values: Vec<f64>,
    slope_sq: f64,
    intercept: f64,
    tol: Tolerance,
}

impl PhiFromChi {
    /// `∫_0^r dt/χ²`.
    pub fn integral(&self, r: f64) -> f64 {
        let n = self.knots.len() - 1;
        if r >= self.knots[n] {
            return self.values[n] + self.slope_sq * (r - self.knots[n]);
        }
        let k = self.knots.partition_point(|&x| x <= r).saturating_sub(1);
        let f = |t: f64| (self.chi)(t).0.powi(-2);
        let piece = if r > self.knots[k] {
            integrate(f, self.knots[k], r, &self.tol).unwrap_or(f64::NAN)
        } else {
            0.0
        };
        self.values[k] + piece
    }

    /// `(φ, φ')` given `χ(r)` and `χ'(r)` already evaluated.
    pub fn eval_with(&self, r: f64, chi: f64, dchi: f64) -> (f64, f64) {
        let f = self.integral(r);
        (chi * f, dchi * f + 1.0 / chi)
    }

    pub fn eval(&self, r: f64) -> (f64, f64) {
        let (c, dc) = (self.chi)(r);
        self.eval_with(r, c, dc)
    }

    /// Slope `A = 1/χ(∞)` of `φ` at infinity.
    pub fn slope(&self) -> f64 {
        self.slope_sq.sqrt()
    }

    /// `B = lim (φ(r) - A r)`.
    pub fn intercept(&self) -> f64 {
        self.intercept
    }
}

/// Builds `φ` from `χ`. `chi_inf` is the limit of `χ` at infinity; pass
/// `None` to probe it.
pub fn phi_from_chi(chi: RegularFn, chi_inf: impl Into<Option<f64>>, tol: &Tolerance) -> Result<PhiFromChi> {
    phi_from_chi_with(chi, chi_inf, None, tol)
}

/// As [`phi_from_chi`], with `excess(r) = χ(r) - χ(∞)` supplied so that the
/// intercept integral avoids cancellation at large `r`.
pub fn phi_from_chi_with(
    chi: RegularFn,
    chi_inf: impl Into<Option<f64>>,
    excess: Option<RadialFn>,
    tol: &Tolerance,
) -> Result<PhiFromChi> {
    let chi_inf = match chi_inf.into() {
        Some(c) => c,
        None => {
            let (c6, c7) = (chi(1e6).0, chi(1e7).0);
            if !((c6 - c7).abs() <= 1e-3 * c7.abs()) {
                return Err(Error::NotAdmissible(format!(
                    "chi does not settle to a positive limit (chi(1e6) = {c6:e}, chi(1e7) = {c7:e})"
                )));
            }
            c7
        }
    };
    if !(chi_inf > 0.0) || !chi_inf.is_finite() {
        return Err(Error::NotAdmissible(format!(
            "chi(inf) = {chi_inf:e}; the tail slope 1/chi(inf) must be finite and positive"
        )));
    }
    let f = |t: f64| chi(t).0.powi(-2);
    let knots = {
        let mut k = vec![0.0];
        k.extend(table_knots(0.125, 1e7));
        k
    };
    let mut values = vec![0.0; knots.len()];
    for i in 1..knots.len() {
        let c = chi(knots[i]).0;
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Domain(format!(
                "chi must be positive and finite; chi({}) = {c:e}",
                knots[i]
            )));
        }
        values[i] = values[i - 1] + integrate(f, knots[i - 1], knots[i], tol)?;
    }
    let slope_sq = chi_inf.powi(-2);
    let deficit = |t: f64| match &excess {
        Some(e) => {
            let c = chi(t).0;
            -e(t) * (c + chi_inf) / (c * c * chi_inf * chi_inf)
        }
        None => f(t) - slope_sq,
    };
    let excess = integrate_improper(deficit, 0.0, &TailModel::power_decay(), tol)?;
    Ok(PhiFromChi {
        chi,
        knots,
        values,
        slope_sq,
        intercept: excess * chi_inf,
        tol: *tol,
    })
}

/// The change of variable `x(r) = φ₀(r)/χ₀(r)` with a cached inverse.
pub struct MappingFn {
    pair: PairFn,
    r_max: f64,
    limit: f64,
    cache: OnceLock<Vec<(f64, f64)>>,
    tol: Tolerance,
}

impl MappingFn {
    pub fn forward(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let p = (self.pair)(r);
        if p.phi == 0.0 {
            0.0
        } else {
            p.phi / p.chi
        }
    }

    /// `dx/dr = χ₀⁻²`.
    pub fn derivative(&self, r: f64) -> f64 {
        (self.pair)(r).chi.powi(-2)
    }

    /// `d²x/dr² = -2χ₀'/χ₀³`.
    pub fn second_derivative(&self, r: f64) -> f64 {
        let p = (self.pair)(r);
        -2.0 * p.dchi / p.chi.powi(3)
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Largest radius accepted by the inverse.
    pub fn limit(&self) -> f64 {
        self.limit
    }

    fn cache(&self) -> &[(f64, f64)] {
        self.cache.get_or_init(|| {
            let n = 256;
            let lo = self.r_max * 1e-8;
            (0..n)
                .map(|i| {
                    let r = lo * (self.r_max / lo).powf(i as f64 / (n - 1) as f64);
                    (r, self.forward(r))
                })
                .collect()
        })
    }

    /// `r(x)`, found by safeguarded Newton iteration inside a bracket taken
    /// from the cache and grown by doubling when needed.
    pub fn inverse(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        let cache = self.cache();
        let idx = cache.partition_point(|&(_, xi)| xi < x);
        let (lo, hi) = if idx == 0 {
            (0.0, cache[0].0)
        } else if idx < cache.len() {
            (cache[idx - 1].0, cache[idx].0)
        } else {
            let mut lo = self.r_max;
            let mut hi = 2.0 * self.r_max;
            loop {
                if hi > self.limit {
                    if self.forward(self.limit) >= x {
                        break (lo, self.limit);
                    }
                    return Err(Error::NotBracketed {
                        target: x,
                        lo: 0.0,
                        hi: self.limit,
                        m_lo: 0.0,
                        m_hi: self.forward(self.limit),
                    });
                }
                if self.forward(hi) >= x {
                    break (lo, hi);
                }
                lo = hi;
                hi *= 2.0;
            }
        };
        invert_monotone(
            |r| self.forward(r),
            Some(|r| self.derivative(r)),
            x,
            (lo, hi),
            &self.tol,
        )
    }
}

/// Mapping for a pair without bound states. Long-range bases are limited to
/// `r ≤ r_max`.
pub fn build_mapping(pair: &SolutionPair, r_max: f64) -> Result<MappingFn> {
    if !pair.no_bound_states {
        return Err(Error::Admissibility(format!(
            "base {} has bound states; x = phi/chi is not monotone",
            pair.name
        )));
    }
    if !(r_max > 0.0) {
        return Err(Error::Config(format!("r_max must be > 0, got {r_max}")));
    }
    let limit = if pair.is_long_range() {
        r_max
    } else {
        f64::INFINITY.min(1e12)
    };
    Ok(MappingFn {
        pair: pair.pair_fn(),
        r_max,
        limit,
        cache: OnceLock::new(),
        tol: Tolerance::default().with_rel(1e-15).with_abs(0.0),
    })
}

/// Regular solution of the inner potential in the mapped variable.
#[derive(Clone)]
pub enum InnerSolution {
    ClosedForm(RegularFn),
    Tabulated(Arc<DenseSolution>),
}

impl InnerSolution {
    pub fn eval(&self, x: f64) -> (f64, f64) {
        match self {
            InnerSolution::ClosedForm(f) => f(x),
            InnerSolution::Tabulated(t) => t.eval(x),
        }
    }

    pub fn is_closed_form(&self) -> bool {
        matches!(self, InnerSolution::ClosedForm(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComposeOptions {
    /// Outer radius of the tabulated region; the default depends on the base.
    pub r_max: Option<f64>,
    pub tol: Tolerance,
    pub max_depth: usize,
}

impl Default for ComposeOptions {
    fn default() -> Self {
        Self {
            r_max: None,
            tol: Tolerance::default().with_rel(1e-12),
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }
}

/// A composed potential with its regular solution.
#[derive(Clone)]
pub struct ComposedSystem {
    pub base: SolutionPair,
    pub inner: PotentialSpec,
    pub inner_solution: InnerSolution,
    pub mapping: Arc<MappingFn>,
    pub depth: usize,
    pub provenance: Vec<String>,
    pub r_max: f64,
}

impl ComposedSystem {
    pub fn ell(&self) -> u32 {
        self.base.ell
    }

    /// `V₀(r) + χ₀⁻⁴(r)·V₁(x(r))`, without the centrifugal term.
    pub fn value(&self, r: f64) -> f64 {
        composed_value(&self.base, &self.inner, r)
    }

    /// `χ₀⁻⁴(r)·V₁(x(r))`.
    pub fn added(&self, r: f64) -> f64 {
        let chi = self.base.chi(r);
        let w = chi.powi(-4);
        if w == 0.0 {
            0.0
        } else {
            w * self.inner.value(self.mapping.forward(r))
        }
    }

    /// `(φ, φ')` with `φ = χ₀·φ₁(x)`.
    pub fn eval_solution(&self, r: f64) -> (f64, f64) {
        composed_solution(&self.base.pair_fn(), &self.inner_solution, r)
    }

    pub fn solution(&self) -> RegularFn {
        let pair = self.base.pair_fn();
        let inner = self.inner_solution.clone();
        Arc::new(move |r| composed_solution(&pair, &inner, r))
    }

    /// The composed potential, carrying its regular solution.
    pub fn potential(&self) -> PotentialSpec {
        let base = self.base.clone();
        let inner = self.inner.clone();
        let tail = if base.potential.tail_class == TailClass::ShortRange && inner.tail_class == TailClass::ShortRange {
            TailClass::ShortRange
        } else {
            TailClass::LongRange
        };
        let mut params = base.potential.params.clone();
        for (k, v) in &inner.params {
            params.insert(format!("inner.{k}"), *v);
        }
        let mut spec = PotentialSpec::new(
            self.label(),
            base.ell,
            base.potential.origin_class,
            tail,
            params,
            Arc::new(move |r| composed_value(&base, &inner, r)),
        )
        .with_solution(self.solution());
        if self.base.is_long_range() {
            spec = spec.with_r_limit(self.r_max);
        }
        spec
    }

    /// Composed potential recast as an s-wave inner potential for the next
    /// iteration. With `ℓ > 0` the centrifugal term is folded in.
    pub fn as_inner(&self) -> PotentialSpec {
        let mut spec = self.potential();
        let ell = spec.ell;
        if ell > 0 {
            let f = spec.function();
            let l = ell as f64;
            let mut folded = PotentialSpec::new(
                spec.name.clone(),
                0,
                OriginClass::StronglySingular,
                spec.tail_class,
                spec.params.clone(),
                Arc::new(move |r| f(r) + l * (l + 1.0) / (r * r)),
            );
            folded.r_limit = spec.r_limit;
            folded.solution = spec.solution.take();
            spec = folded;
        }
        spec
    }

    pub fn label(&self) -> String {
        self.provenance.join(" <- ")
    }
}

fn composed_value(base: &SolutionPair, inner: &PotentialSpec, r: f64) -> f64 {
    let v0 = base.potential.value(r);
    let p = base.eval(r);
    let w = p.chi.powi(-4);
    if w == 0.0 {
        return v0;
    }
    let x = if p.phi == 0.0 { 0.0 } else { p.phi / p.chi };
    v0 + w * inner.value(x)
}

fn composed_solution(pair: &PairFn, inner: &InnerSolution, r: f64) -> (f64, f64) {
    let p = pair(r);
    if !p.chi.is_finite() {
        return (0.0, 0.0);
    }
    let x = if p.phi == 0.0 { 0.0 } else { p.phi / p.chi };
    let (f1, df1) = inner.eval(x);
    let value = p.chi * f1;
    let slope = if f1 == 0.0 {
        df1 / p.chi
    } else {
        p.dchi * f1 + df1 / p.chi
    };
    (value, slope)
}

fn check_admissible(base: &SolutionPair, inner: &PotentialSpec) -> Result<()> {
    if !base.no_bound_states {
        return Err(Error::Admissibility(format!(
            "base {} must have no bound states",
            base.name
        )));
    }
    if base.tail.kind == TailKind::LinearAsymptote && !(base.tail.a > 0.0) {
        return Err(Error::Admissibility(format!(
            "base {} has tail slope A = {} <= 0",
            base.name, base.tail.a
        )));
    }
    if inner.ell != 0 {
        return Err(Error::Admissibility(format!(
            "inner potential {} must be an s-wave potential (ell = 0), got ell = {}",
            inner.name, inner.ell
        )));
    }
    if inner.origin_class != OriginClass::Regular && inner.solution.is_none() {
        return Err(Error::Admissibility(format!(
            "inner potential {} must satisfy r|V| integrable at the origin",
            inner.name
        )));
    }
    if inner.tail_class != TailClass::ShortRange {
        return Err(Error::Admissibility(format!(
            "inner potential {} must be short range (r^2 |V| integrable at infinity)",
            inner.name
        )));
    }
    Ok(())
}

/// Composes with default options.
pub fn compose(base: &SolutionPair, inner: &PotentialSpec) -> Result<ComposedSystem> {
    compose_with(base, inner, &ComposeOptions::default())
}

pub fn compose_with(base: &SolutionPair, inner: &PotentialSpec, opts: &ComposeOptions) -> Result<ComposedSystem> {
    check_admissible(base, inner)?;
    let r_max = match (opts.r_max, base.is_long_range()) {
        (Some(r), true) => r.min(LONG_RANGE_R_MAX),
        (Some(r), false) => r,
        (None, true) => LONG_RANGE_R_MAX,
        (None, false) => DEFAULT_R_MAX,
    };
    let mapping = Arc::new(build_mapping(base, r_max)?);
    let inner_solution = match &inner.solution {
        Some(f) => InnerSolution::ClosedForm(Arc::clone(f)),
        None => {
            let x_max = mapping.forward(r_max) * 1.1;
            if !x_max.is_finite() || !(x_max > 0.0) {
                return Err(Error::Domain(format!("mapped range x(r_max) = {x_max:e} is unusable")));
            }
            InnerSolution::Tabulated(Arc::new(solve_regular(inner, x_max, &opts.tol)?))
        }
    };
    Ok(ComposedSystem {
        base: base.clone(),
        inner: inner.clone(),
        inner_solution,
        mapping,
        depth: 1,
        provenance: vec![base.name.clone(), inner.name.clone()],
        r_max,
    })
}

/// `compose_solution`: the regular solution of a composed system.
pub fn compose_solution(sys: &ComposedSystem) -> RegularFn {
    sys.solution()
}

/// Applies the composition `depth` times with the same base: depth 1 is
/// [`compose`], depth `k+1` uses the depth-`k` potential as the inner one.
pub fn iterate(
    base: &SolutionPair,
    inner: &PotentialSpec,
    depth: usize,
    opts: &ComposeOptions,
) -> Result<ComposedSystem> {
    if depth == 0 {
        return Err(Error::Config("iteration depth must be >= 1".into()));
    }
    if depth > opts.max_depth {
        return Err(Error::DepthLimit {
            depth,
            max: opts.max_depth,
        });
    }
    let mut sys = compose_with(base, inner, opts)?;
    for k in 2..=depth {
        let next_inner = sys.as_inner();
        let provenance = sys.provenance.clone();
        sys = compose_with(base, &next_inner, opts)?;
        sys.depth = k;
        sys.provenance = {
            let mut p = vec![base.name.clone()];
            p.extend(provenance);
            p
        };
    }
    Ok(sys)
}

/// Integrates `ψ̈(x) = [χ₀⁴ (V - V₀ - ℓ(ℓ+1)/r²)]_{r = r(x)} ψ(x)` from
/// `ψ(0) = 0, ψ̇(0) = 1` to `x_end`, reading the added potential through the
/// inverse map. For an s-wave composition this reproduces `φ₁`.
pub fn solve_in_mapped_variable(sys: &ComposedSystem, x_end: f64, tol: &Tolerance) -> Result<DenseSolution> {
    if sys.ell() != 0 {
        return Err(Error::Config(
            "the mapped-variable equation is set up for s-wave bases".into(),
        ));
    }
    let failure: OnceLock<Error> = OnceLock::new();
    let q = |x: f64| match sys.mapping.inverse(x) {
        Ok(r) => {
            let chi = sys.base.chi(r);
            let added = sys.value(r) - sys.base.potential.value(r);
            chi.powi(4) * added
        }
        Err(e) => {
            let _ = failure.set(e);
            f64::NAN
        }
    };
    let result = solve_linear_ode(q, 0.0, 0.0, 1.0, x_end, tol, &OdeOptions::default());
    match (result, failure.into_inner()) {
        (Ok(sol), _) => Ok(sol),
        (Err(_), Some(e)) => Err(e),
        (Err(e), None) => Err(e),
    }
}

#[cfg(test)]
mod tests;
