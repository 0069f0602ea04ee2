//! Command-line front end.
//!
//! Every subcommand resolves flags and an optional JSON config file into a
//! [`JobConfig`], runs it, and writes CSV or JSON. Exit status is 0 on
//! success, 1 when a verification check fails or a computation errors, and 2
//! for invalid configuration.

mod output;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{verify_composed, verify_pair, Check, VerificationReport};
use crate::catalog::{make_pair, make_potential, sample_potential, FamilyId};
use crate::error::{Error, Result};
use crate::numerics::{GridSpec, Spacing, Tolerance};
use crate::transform::{compose_with, iterate, ComposeOptions, ComposedSystem};

pub use output::{Table, VERSION_HEADER};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

const DEFAULT_GRID: &str = "log:1e-3,20,400";

#[derive(Debug, Parser)]
#[command(
    name = "zepot",
    version,
    about = "Compose and verify zero-energy solvable radial potentials"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// JSON job file; flags given on the command line take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Tolerance profile.
    #[arg(long, global = true, env = "ZEPOT_TOL_PROFILE", value_enum)]
    pub tol_profile: Option<TolProfile>,

    /// Relative tolerance, overriding the profile.
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,

    /// Absolute tolerance, overriding the profile.
    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Output file; standard output when absent.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the catalog families with their parameter domains.
    Catalog,
    /// Compose a base pair with an inner potential and sample the result.
    Compose(ComposeArgs),
    /// Apply the composition repeatedly with the same base.
    Iterate(IterateArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
    /// Sample a catalog potential and its solution pair.
    Sample(SampleArgs),
}

#[derive(Debug, Args, Default)]
pub struct ComposeArgs {
    /// Base family, e.g. `rational-exp-22:lambda=1,a=1`.
    #[arg(long)]
    pub base: Option<String>,
    /// Inner family, e.g. `exp:lambda=-5,mu=1`.
    #[arg(long)]
    pub inner: Option<String>,
    /// Sampling grid `spacing:r_min,r_max,points`.
    #[arg(long)]
    pub grid: Option<String>,
    /// Outer radius of the tabulated region.
    #[arg(long)]
    pub r_max: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct IterateArgs {
    #[command(flatten)]
    pub compose: ComposeArgs,
    #[arg(long)]
    pub depth: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct VerifyArgs {
    /// Verify every catalog family with default parameters.
    #[arg(long)]
    pub all: bool,
    /// Families to verify; repeatable.
    #[arg(long = "family")]
    pub families: Vec<String>,
}

#[derive(Debug, Args, Default)]
pub struct SampleArgs {
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub grid: Option<String>,
    #[command(flatten)]
    pub params: ParamFlags,
}

/// Family parameters as individual flags.
#[derive(Debug, Args, Default, Clone)]
pub struct ParamFlags {
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub n: Option<f64>,
    #[arg(long)]
    pub ell: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub g1: Option<f64>,
    #[arg(long)]
    pub g2: Option<f64>,
    #[arg(long)]
    pub r0: Option<f64>,
}

impl ParamFlags {
    fn to_map(&self) -> BTreeMap<String, f64> {
        [
            ("g", self.g),
            ("lambda", self.lambda),
            ("mu", self.mu),
            ("a", self.a),
            ("b", self.b),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("n", self.n),
            ("ell", self.ell),
            ("p", self.p),
            ("g1", self.g1),
            ("g2", self.g2),
            ("r0", self.r0),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
        .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum TolProfile {
    Strict,
    Default,
    Fast,
}

impl TolProfile {
    pub fn tolerance(self) -> Tolerance {
        let rel = match self {
            TolProfile::Strict => 1e-12,
            TolProfile::Default => 1e-10,
            TolProfile::Fast => 1e-8,
        };
        Tolerance::default().with_rel(rel)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct ToleranceConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<TolProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs: Option<f64>,
}

/// A job as read from a config file, with every field optional, or as
/// resolved after merging with the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub families: Vec<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub all: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    #[serde(default)]
    pub tolerance: ToleranceConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

impl JobConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config file: {e}")))
    }

    pub fn tolerance(&self) -> Result<Tolerance> {
        let base = self.tolerance.profile.unwrap_or(TolProfile::Default).tolerance();
        Tolerance::new(
            self.tolerance.rel.unwrap_or(base.rel),
            self.tolerance.abs.unwrap_or(base.abs),
            base.max_steps,
        )
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        parse_grid(self.grid.as_deref().unwrap_or(DEFAULT_GRID))
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Csv)
    }

    /// Checks the structural invariants: known command, grid with at least
    /// two points, `r_min ≥ 0` and `depth ≥ 1`.
    pub fn validate(&self) -> Result<()> {
        let command = self.command.as_deref().unwrap_or("");
        if !["catalog", "compose", "iterate", "verify", "sample"].contains(&command) {
            return Err(Error::Config(format!("unknown command '{command}'")));
        }
        self.grid_spec()?.validate()?;
        self.tolerance()?;
        if let Some(d) = self.depth {
            if d < 1 {
                return Err(Error::Config("depth must be >= 1".into()));
            }
        }
        if let Some(r) = self.r_max {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::Config(format!("r_max must be positive, got {r}")));
            }
        }
        Ok(())
    }
}

/// Parses `log:1e-2,20,400` or `linear:0,10,101`.
pub fn parse_grid(text: &str) -> Result<GridSpec> {
    let bad = || Error::Config(format!("grid must look like 'log:r_min,r_max,points', got '{text}'"));
    let (kind, rest) = text.split_once(':').ok_or_else(bad)?;
    let spacing = match kind.trim() {
        "log" => Spacing::Log,
        "linear" | "lin" => Spacing::Linear,
        _ => return Err(bad()),
    };
    let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let r_min: f64 = parts[0].parse().map_err(|_| bad())?;
    let r_max: f64 = parts[1].parse().map_err(|_| bad())?;
    let points: usize = parts[2].parse().map_err(|_| bad())?;
    let spec = GridSpec {
        r_min,
        r_max,
        points,
        spacing,
    };
    spec.validate()?;
    Ok(spec)
}

fn merge(cli: &Cli, file: Option<JobConfig>) -> Result<JobConfig> {
    let mut job = file.unwrap_or_default();
    let name = match &cli.command {
        Command::Catalog => "catalog",
        Command::Compose(_) => "compose",
        Command::Iterate(_) => "iterate",
        Command::Verify(_) => "verify",
        Command::Sample(_) => "sample",
    };
    if let Some(c) = &job.command {
        if c != name {
            return Err(Error::Config(format!(
                "config file is for '{c}' but the command line asks for '{name}'"
            )));
        }
    }
    job.command = Some(name.to_string());
    let compose_args = |job: &mut JobConfig, a: &ComposeArgs| {
        if a.base.is_some() {
            job.base = a.base.clone();
        }
        if a.inner.is_some() {
            job.inner = a.inner.clone();
        }
        if a.grid.is_some() {
            job.grid = a.grid.clone();
        }
        if a.r_max.is_some() {
            job.r_max = a.r_max;
        }
    };
    match &cli.command {
        Command::Catalog => {}
        Command::Compose(a) => compose_args(&mut job, a),
        Command::Iterate(a) => {
            compose_args(&mut job, &a.compose);
            if a.depth.is_some() {
                job.depth = a.depth;
            }
        }
        Command::Verify(a) => {
            job.all |= a.all;
            if !a.families.is_empty() {
                job.families = a.families.clone();
            }
        }
        Command::Sample(a) => {
            if let Some(f) = &a.family {
                job.families = vec![f.clone()];
            }
            if a.grid.is_some() {
                job.grid = a.grid.clone();
            }
            job.params.extend(a.params.to_map());
        }
    }
    if cli.tol_profile.is_some() {
        job.tolerance.profile = cli.tol_profile;
    }
    if cli.rel_tol.is_some() {
        job.tolerance.rel = cli.rel_tol;
    }
    if cli.abs_tol.is_some() {
        job.tolerance.abs = cli.abs_tol;
    }
    if cli.format.is_some() {
        job.format = cli.format;
    }
    if cli.output.is_some() {
        job.output = cli.output.clone();
    }
    job.validate()?;
    Ok(job)
}

/// Resolves the command line and config file into a validated job.
pub fn resolve(cli: &Cli) -> Result<JobConfig> {
    let file = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            Some(JobConfig::from_json(&text)?)
        }
        None => None,
    };
    merge(cli, file)
}

/// Family from text, with extra parameters layered on top.
fn family_with(text: &str, extra: &BTreeMap<String, f64>) -> Result<FamilyId> {
    let parsed = FamilyId::parse(text)?;
    if extra.is_empty() {
        return Ok(parsed);
    }
    let (name, _) = text.split_once(':').unwrap_or((text, ""));
    let mut params: BTreeMap<String, f64> = BTreeMap::new();
    let given: Vec<&str> = text
        .split_once(':')
        .map(|(_, r)| {
            r.split(',')
                .filter_map(|kv| kv.split_once('=').map(|(k, _)| k.trim()))
                .collect()
        })
        .unwrap_or_default();
    for (k, v) in parsed.params() {
        if given.contains(&k.as_str()) {
            params.insert(k, v);
        }
    }
    params.extend(extra.clone());
    FamilyId::from_parts(name, &params)
}

/// Outcome of one job: the document to write and the exit status.
#[derive(Debug)]
pub struct JobOutput {
    pub body: String,
    pub status: i32,
    pub diagnostics: Vec<String>,
}

fn require<'a>(field: &'a Option<String>, what: &str) -> Result<&'a str> {
    field
        .as_deref()
        .ok_or_else(|| Error::Config(format!("missing --{what}")))
}

fn compose_options(job: &JobConfig) -> Result<ComposeOptions> {
    let defaults = ComposeOptions::default();
    // Composition tables are built tighter than the profile unless asked otherwise.
    let tol = if job.tolerance == ToleranceConfig::default() {
        defaults.tol
    } else {
        job.tolerance()?
    };
    Ok(ComposeOptions {
        r_max: job.r_max,
        tol,
        ..defaults
    })
}

fn build_system(job: &JobConfig) -> Result<ComposedSystem> {
    let base = make_pair(&FamilyId::parse(require(&job.base, "base")?)?)?;
    let inner = make_potential(&FamilyId::parse(require(&job.inner, "inner")?)?)?;
    let opts = compose_options(job)?;
    if job.command.as_deref() == Some("iterate") {
        iterate(&base, &inner, job.depth.unwrap_or(1), &opts)
    } else {
        compose_with(&base, &inner, &opts)
    }
}

fn failure_lines(subject: &str, report: &VerificationReport) -> Vec<String> {
    report
        .failures()
        .iter()
        .map(|c: &&Check| {
            format!(
                "verification failed: {subject}: check '{}' value {:e} vs threshold {:e}{}",
                c.name,
                c.value,
                c.threshold,
                if c.detail.is_empty() {
                    String::new()
                } else {
                    format!(" ({})", c.detail)
                }
            )
        })
        .collect()
}

fn run_composed(job: &JobConfig) -> Result<JobOutput> {
    let sys = build_system(job)?;
    let grid = job.grid_spec()?.clamped(0.0, sys.r_max).radii()?;
    let report = verify_composed(&sys, &grid)?;
    let potential = sys.potential();
    let sol = sys.solution();
    let residual = crate::analysis::residual_profile(&potential, &*sol, &grid);
    let mut table = Table::new(&["r", "V", "phi", "x", "residual"]);
    for (i, &r) in grid.iter().enumerate() {
        table.push(vec![r, sys.value(r), sol(r).0, sys.mapping.forward(r), residual[i]]);
    }
    let status = if report.passed() { EXIT_OK } else { EXIT_VERIFY };
    let diagnostics = failure_lines(&report.subject, &report);
    let body = match job.format() {
        Format::Csv => table.to_csv(),
        Format::Json => output::json_document(job, &sys.provenance, &[report], Some(&table))?,
    };
    Ok(JobOutput {
        body,
        status,
        diagnostics,
    })
}

fn run_sample(job: &JobConfig) -> Result<JobOutput> {
    let text = job
        .families
        .first()
        .ok_or_else(|| Error::Config("missing --family".into()))?;
    let family = family_with(text, &job.params)?;
    let potential = make_potential(&family)?;
    let spec = job.grid_spec()?;
    let spec = if potential.r_limit.is_finite() {
        spec.clamped(0.0, potential.r_limit)
    } else {
        spec
    };
    let sample = sample_potential(&potential, &spec, false)?;
    let body = match make_pair(&family) {
        Ok(pair) => {
            let reg = pair.regular();
            let residual = crate::analysis::residual_profile(&pair.potential, &*reg, &sample.r);
            let mut table = Table::new(&["r", "V", "phi", "chi", "residual"]);
            for (i, &r) in sample.r.iter().enumerate() {
                let p = pair.eval(r);
                table.push(vec![r, sample.y[i], p.phi, p.chi, residual[i]]);
            }
            match job.format() {
                Format::Csv => table.to_csv(),
                Format::Json => output::json_document(job, &[family.label()], &[], Some(&table))?,
            }
        }
        Err(Error::ParamDomain(_)) | Err(Error::NoClosedForm(_)) => {
            let mut table = Table::new(&["r", "V"]);
            for (r, v) in sample.r.iter().zip(&sample.y) {
                table.push(vec![*r, *v]);
            }
            match job.format() {
                Format::Csv => table.to_csv(),
                Format::Json => output::json_document(job, &[family.label()], &[], Some(&table))?,
            }
        }
        Err(e) => return Err(e),
    };
    Ok(JobOutput {
        body,
        status: EXIT_OK,
        diagnostics: Vec::new(),
    })
}

/// Reports for one family: the pair itself and, when it can serve as a
/// base, a composition with a fixed repulsive inner potential.
fn verify_family(family: &FamilyId) -> Result<Vec<VerificationReport>> {
    let pair = match make_pair(family) {
        Ok(pair) => pair,
        Err(Error::NoClosedForm(_)) => {
            let v = make_potential(family)?;
            let grid = GridSpec::log(1e-3, 20.0, 400).radii()?;
            let finite = grid.iter().all(|&r| v.value(r).is_finite());
            return Ok(vec![VerificationReport {
                subject: family.label(),
                max_wronskian_dev: None,
                max_residual_rel: 0.0,
                node_count: 0,
                bargmann_bound: None,
                tail: None,
                flags: vec![Check {
                    name: "potential-finite".into(),
                    passed: finite,
                    value: if finite { 1.0 } else { 0.0 },
                    threshold: 1.0,
                    detail: "no closed-form pair; potential sampled only".into(),
                }],
            }]);
        }
        Err(e) => return Err(e),
    };
    let mut reports = vec![verify_pair(&pair)?];
    if pair.ell == 0 && pair.no_bound_states {
        let inner = make_potential(&FamilyId::InverseSquareQuartic23 { g: 4.0, b: 1.0 })?;
        let sys = compose_with(&pair, &inner, &ComposeOptions::default())?;
        let hi = sys.r_max.min(20.0);
        let grid = GridSpec::log(pair.working_range.0.max(1e-3), hi, 200).radii()?;
        reports.push(verify_composed(&sys, &grid)?);
    }
    Ok(reports)
}

fn run_verify(job: &JobConfig) -> Result<JobOutput> {
    let families: Vec<FamilyId> = if job.all {
        FamilyId::all_defaults()
    } else if job.families.is_empty() {
        return Err(Error::Config("verify needs --all or at least one --family".into()));
    } else {
        job.families
            .iter()
            .map(|t| family_with(t, &job.params))
            .collect::<Result<_>>()?
    };
    let results: Vec<Result<Vec<VerificationReport>>> = families.par_iter().map(verify_family).collect();
    let mut reports = Vec::new();
    let mut diagnostics = Vec::new();
    for (family, result) in families.iter().zip(results) {
        match result {
            Ok(r) => reports.extend(r),
            Err(e) => {
                diagnostics.push(format!("verification failed: {}: {e}", family.label()));
                reports.push(VerificationReport {
                    subject: family.label(),
                    max_wronskian_dev: None,
                    max_residual_rel: f64::NAN,
                    node_count: 0,
                    bargmann_bound: None,
                    tail: None,
                    flags: vec![Check {
                        name: "evaluation".into(),
                        passed: false,
                        value: f64::NAN,
                        threshold: 0.0,
                        detail: e.to_string(),
                    }],
                });
            }
        }
    }
    for r in &reports {
        diagnostics.extend(failure_lines(&r.subject, r));
    }
    diagnostics.dedup();
    let status = if reports.iter().all(VerificationReport::passed) {
        EXIT_OK
    } else {
        EXIT_VERIFY
    };
    let labels: Vec<String> = families.iter().map(FamilyId::label).collect();
    let body = match job.format() {
        Format::Csv => output::verify_text(&reports),
        Format::Json => output::json_document(job, &labels, &reports, None)?,
    };
    Ok(JobOutput {
        body,
        status,
        diagnostics,
    })
}

fn run_catalog(job: &JobConfig) -> Result<JobOutput> {
    let families = FamilyId::all_defaults();
    let body = match job.format() {
        Format::Csv => output::catalog_text(&families),
        Format::Json => output::catalog_json(&families)?,
    };
    Ok(JobOutput {
        body,
        status: EXIT_OK,
        diagnostics: Vec::new(),
    })
}

/// Runs a resolved job.
pub fn run(job: &JobConfig) -> Result<JobOutput> {
    match job.command.as_deref() {
        Some("catalog") => run_catalog(job),
        Some("compose") | Some("iterate") => run_composed(job),
        Some("verify") => run_verify(job),
        Some("sample") => run_sample(job),
        other => Err(Error::Config(format!("unknown command {other:?}"))),
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::ParamDomain(_)
        | Error::NotAdmissible(_)
        | Error::Admissibility(_)
        | Error::DepthLimit { .. }
        | Error::NoClosedForm(_) => EXIT_CONFIG,
        _ => EXIT_VERIFY,
    }
}

/// Parses `args`, runs the job and writes results; returns the exit status.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    let job = match resolve(&cli) {
        Ok(job) => job,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    let result = match run(&job) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    for line in &result.diagnostics {
        let _ = writeln!(err, "{line}");
    }
    let written = match &job.output {
        Some(path) => std::fs::write(path, &result.body).map_err(|e| e.to_string()),
        None => out.write_all(result.body.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: cannot write output: {e}");
        return EXIT_VERIFY;
    }
    result.status
}

/// Entry point for the binary.
pub fn main_from_env() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    main_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests;
