use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quadrature did not converge after {steps} subdivisions (error estimate {estimate:e})")]
    NonConvergent { steps: usize, estimate: f64 },

    #[error("tail is not integrable: {0}")]
    BadTail(String),

    #[error("step size underflow at r = {r:e}")]
    StepUnderflow { r: f64 },

    #[error("magnitude cap of {cap:e} exceeded at r = {at:e}")]
    Overflow { at: f64, cap: f64 },

    #[error("target {target:e} not bracketed by m({lo:e}) = {m_lo:e} and m({hi:e}) = {m_hi:e}")]
    NotBracketed {
        target: f64,
        lo: f64,
        hi: f64,
        m_lo: f64,
        m_hi: f64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parameter out of domain: {0}")]
    ParamDomain(String),

    #[error("not admissible: {0}")]
    NotAdmissible(String),

    #[error("regular solution changes sign near r = {r:e}; the potential has bound states")]
    NoBoundStateViolation { r: f64 },

    #[error("tail slope A = {a:e} is not positive (zero-energy resonance or bound state)")]
    TailDivergence { a: f64 },

    #[error("composition precondition violated: {0}")]
    Admissibility(String),

    #[error("iteration depth {depth} exceeds the configured maximum {max}")]
    DepthLimit { depth: usize, max: usize },

    #[error("asymptotic fit residual {residual:e} exceeds {threshold:e}")]
    PoorFit { residual: f64, threshold: f64 },

    #[error("node count unstable under refinement ({coarse} vs {fine})")]
    Unstable { coarse: usize, fine: usize },

    #[error("no closed-form solution pair for {0}")]
    NoClosedForm(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
