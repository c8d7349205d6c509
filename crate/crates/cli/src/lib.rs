//! Command-line front end: argument parsing, dispatch to the verifiers, and
//! report rendering.

use std::io::Write;
use std::ops::RangeInclusive;

use clap::{Args, Parser, Subcommand, ValueEnum};
use conflap_core::exactfn::{parse_polynomial, FnElem};
use conflap_core::flat::{self, ConformalMotion};
use conflap_core::numcheck::{self, SampleConfig, ShadowPlan};
use conflap_core::report::Case;
use conflap_core::{properties, sphere, CaseStatus, Error, RadicalMode, Report, VerifyOptions};

pub mod plan;

pub use plan::SuitePlan;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "conflap", version, about = "Exact verification of conformal Laplacian power identities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Verify one identity family exactly
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Apply the sphere operator to explicit harmonics and compare with the eigenvalue formula
    Spectrum(SpectrumArgs),
    /// Floating-point shadow of the exact verifiers, plus a finite-difference suite
    Numcheck(SuiteArgs),
    /// Every verifier, the property suites and the numeric shadow
    All(AllArgs),
}

#[derive(Subcommand, Debug)]
pub enum VerifyCommand {
    /// Product formula for powers of the flat Laplacian conjugated by the Euler field
    Rn(RnArgs),
    /// Commutators of the Laplacian, the Euler field and the weight multipliers
    Comm(CommArgs),
    /// Covariance of Laplacian powers under conformal motions of flat space
    Covariance(CovarianceArgs),
    /// Inverse stereographic projection is conformal with the expected factor
    Conformality(ConformalityArgs),
    /// Intertwining of the conformal Laplacian of the sphere with the flat Laplacian
    Yamabe(YamabeArgs),
    /// Intertwining of the factorized sphere operator with a flat Laplacian power
    Main(MainArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RadicalArg {
    On,
    Off,
    Auto,
}

impl From<RadicalArg> for RadicalMode {
    fn from(r: RadicalArg) -> Self {
        match r {
            RadicalArg::On => RadicalMode::On,
            RadicalArg::Off => RadicalMode::Off,
            RadicalArg::Auto => RadicalMode::Auto,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[arg(long, value_enum, default_value = "auto")]
    pub radical: RadicalArg,
    /// Maximum number of terms in an intermediate operator
    #[arg(long)]
    pub term_cap: Option<usize>,
    /// Perturb every right-hand side (test harness only)
    #[arg(long, hide = true)]
    pub inject_bug: bool,
}

impl Common {
    pub fn options(&self) -> VerifyOptions {
        let mut o = VerifyOptions::from_env();
        if let Some(cap) = self.term_cap {
            o.term_cap = cap;
        }
        o.radical = self.radical.into();
        o.inject_bug = self.inject_bug;
        o
    }
}

#[derive(Args, Debug, Clone)]
pub struct Sampling {
    #[arg(long, default_value_t = numcheck::DEFAULT_SAMPLES)]
    pub samples: usize,
    #[arg(long, default_value_t = numcheck::DEFAULT_TOLERANCE)]
    pub tol: f64,
    #[arg(long, default_value_t = numcheck::DEFAULT_SEED)]
    pub seed: u64,
}

impl Sampling {
    pub fn config(&self) -> Result<SampleConfig, Error> {
        let cfg = SampleConfig {
            samples: self.samples,
            tolerance: self.tol,
            seed: self.seed,
            ..SampleConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
pub struct RnArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct CommArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Inclusive weight range `a..b`
    #[arg(long, default_value = "-3..3", allow_hyphen_values = true, value_parser = parse_w_range)]
    pub w_range: RangeInclusive<i32>,
    #[arg(long, default_value_t = 5)]
    pub k_max: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct CovarianceArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// `all`, a generator name, or a comma-separated word applied left to right
    #[arg(long, default_value = "all")]
    pub motion: String,
    #[arg(long)]
    pub max_degree: Option<u32>,
    /// Polynomial test function in y1..yn instead of the monomial family
    #[arg(long)]
    pub apply_to: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct ConformalityArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct YamabeArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub max_degree: u32,
    #[arg(long)]
    pub apply_to: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct MainArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long)]
    pub max_degree: Option<u32>,
    #[arg(long)]
    pub apply_to: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 4)]
    pub l_max: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct SuiteArgs {
    #[arg(long, default_value_t = 4)]
    pub n_max: usize,
    #[arg(long, default_value_t = 3)]
    pub k_max: usize,
    #[command(flatten)]
    pub sampling: Sampling,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct AllArgs {
    #[command(flatten)]
    pub suite: SuiteArgs,
    /// Random instances per property suite
    #[arg(long, default_value_t = properties::DEFAULT_INSTANCES)]
    pub instances: usize,
}

/// Parses `a..b` (inclusive); both ends may be negative.
pub fn parse_w_range(s: &str) -> Result<RangeInclusive<i32>, String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got '{s}'"))?;
    let a: i32 = a.trim().parse().map_err(|_| format!("bad lower bound '{a}'"))?;
    let b: i32 = b.trim().parse().map_err(|_| format!("bad upper bound '{b}'"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok(a..=b)
}

fn parse_test_function(src: &str, n: usize) -> Result<Vec<FnElem>, Error> {
    Ok(vec![FnElem::from(parse_polynomial(src, n)?)])
}

fn motions(word: &str, n: usize) -> Result<Vec<ConformalMotion>, Error> {
    if word == "all" {
        Ok(ConformalMotion::test_family(n))
    } else {
        Ok(vec![ConformalMotion::parse(word, n)?])
    }
}

/// Appends cases, dropping exact duplicates produced by overlapping runs.
fn merge(into: &mut Report, from: Report) {
    for case in from.cases {
        if !into.cases.contains(&case) {
            into.push(case);
        }
    }
}

fn covariance(args: &CovarianceArgs) -> Result<Report, Error> {
    let opts = args.common.options();
    let tests = args.apply_to.as_deref().map(|s| parse_test_function(s, args.n)).transpose()?;
    let list = motions(&args.motion, args.n)?;
    let degree = args.max_degree.unwrap_or_else(|| flat::default_translaw_degree(args.k));
    let mut report = Report::new("verify covariance")
        .with_param("n", args.n)
        .with_param("k", args.k)
        .with_param("motion", &args.motion)
        .with_param("max_degree", degree)
        .with_param("radical", opts.radical.as_str());
    if let Some(src) = &args.apply_to {
        report.set_param("apply_to", src);
    }
    for m in &list {
        merge(&mut report, flat::verify_translaw(args.k, m, Some(degree), tests.clone(), &opts)?);
    }
    Ok(report.finalize())
}

/// Runs every exact verifier over `plan`.
pub fn exact_suite(plan: &SuitePlan, opts: &VerifyOptions) -> Result<Report, Error> {
    let mut report = Report::new("exact");
    for &(n, k) in &plan.rn {
        merge(&mut report, flat::verify_rn(n, k, opts)?);
    }
    for &n in &plan.comm_n {
        merge(&mut report, flat::verify_commutators(n, plan.w_range.clone(), plan.comm_k_max, opts)?);
    }
    for &(n, k) in &plan.covariance {
        for m in ConformalMotion::test_family(n) {
            merge(&mut report, flat::verify_translaw(k, &m, None, None, opts)?);
        }
    }
    for &n in &plan.conformality_n {
        merge(&mut report, sphere::verify_conformality(n)?);
    }
    for &n in &plan.yamabe_n {
        merge(&mut report, sphere::verify_yamabe(n, plan.yamabe_degree, None, opts)?);
    }
    for &(n, k) in &plan.main {
        merge(&mut report, sphere::verify_main(n, k, None, None, opts)?);
    }
    for &(n, k) in &plan.spectrum {
        merge(&mut report, sphere::verify_spectrum(n, k, plan.l_max)?);
    }
    Ok(report.finalize())
}

fn suite_params(report: Report, args: &SuiteArgs) -> Report {
    let mut r = report
        .with_param("n_max", args.n_max)
        .with_param("k_max", args.k_max)
        .with_param("samples", args.sampling.samples)
        .with_param("tolerance", args.sampling.tol);
    r.seed = Some(args.sampling.seed);
    r
}

fn numcheck_report(args: &SuiteArgs) -> Result<Report, Error> {
    let cfg = args.sampling.config()?;
    let plan = SuitePlan::acceptance(args.n_max, args.k_max)?;
    let shadow = numcheck::shadow_suite(&ShadowPlan::from(&plan), &cfg, &args.common.options())?;
    let mut report = suite_params(Report::new("numcheck"), args);
    merge(&mut report, shadow);
    Ok(report.finalize())
}

fn all_report(args: &AllArgs) -> Result<Report, Error> {
    let suite = &args.suite;
    let cfg = suite.sampling.config()?;
    let opts = suite.common.options();
    let plan = SuitePlan::acceptance(suite.n_max, suite.k_max)?;
    let mut report = suite_params(Report::new("all"), suite).with_param("instances", args.instances);
    merge(&mut report, exact_suite(&plan, &opts)?);
    merge(&mut report, properties::run_all(suite.sampling.seed, args.instances));
    merge(&mut report, numcheck::shadow_suite(&ShadowPlan::from(&plan), &cfg, &opts)?);
    Ok(report.finalize())
}

/// Builds the report for a parsed command line.
pub fn dispatch(cli: &Cli) -> Result<Report, Error> {
    match &cli.command {
        Command::Verify(v) => match v {
            VerifyCommand::Rn(a) => flat::verify_rn(a.n, a.k, &a.common.options()),
            VerifyCommand::Comm(a) => flat::verify_commutators(a.n, a.w_range.clone(), a.k_max, &a.common.options()),
            VerifyCommand::Covariance(a) => covariance(a),
            VerifyCommand::Conformality(a) => sphere::verify_conformality(a.n),
            VerifyCommand::Yamabe(a) => {
                let tests = a.apply_to.as_deref().map(|s| parse_test_function(s, a.n)).transpose()?;
                sphere::verify_yamabe(a.n, a.max_degree, tests, &a.common.options())
            }
            VerifyCommand::Main(a) => {
                let tests = a.apply_to.as_deref().map(|s| parse_test_function(s, a.n)).transpose()?;
                sphere::verify_main(a.n, a.k, a.max_degree, tests, &a.common.options())
            }
        },
        Command::Spectrum(a) => sphere::verify_spectrum(a.n, a.k, a.l_max),
        Command::Numcheck(a) => numcheck_report(a),
        Command::All(a) => all_report(a),
    }
}

fn format_of(cli: &Cli) -> Format {
    let common = match &cli.command {
        Command::Verify(v) => match v {
            VerifyCommand::Rn(a) => &a.common,
            VerifyCommand::Comm(a) => &a.common,
            VerifyCommand::Covariance(a) => &a.common,
            VerifyCommand::Conformality(a) => &a.common,
            VerifyCommand::Yamabe(a) => &a.common,
            VerifyCommand::Main(a) => &a.common,
        },
        Command::Spectrum(a) => &a.common,
        Command::Numcheck(a) => &a.common,
        Command::All(a) => &a.suite.common,
    };
    common.format
}

pub fn exit_code(status: CaseStatus) -> i32 {
    match status {
        CaseStatus::Pass | CaseStatus::Skipped => EXIT_PASS,
        CaseStatus::Fail => EXIT_FAIL,
        CaseStatus::Limit => EXIT_LIMIT,
    }
}

pub fn error_exit_code(err: &Error) -> i32 {
    match err {
        Error::LimitExceeded { .. } => EXIT_LIMIT,
        _ => EXIT_USAGE,
    }
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => report.to_text(),
    }
}

/// Runs the tool with explicit output streams and returns the exit code.
pub fn run_with_output<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_PASS
            };
        }
    };
    match dispatch(&cli) {
        Ok(report) => {
            let _ = write!(out, "{}", render(&report, format_of(&cli)));
            exit_code(report.overall)
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if let (Error::Parse { pos, .. }, Some(src)) = (&e, apply_to(&cli)) {
                let _ = writeln!(err, "  {src}\n  {:>width$}", "^", width = src[..*pos].chars().count() + 1);
            }
            error_exit_code(&e)
        }
    }
}

fn apply_to(cli: &Cli) -> Option<&str> {
    match &cli.command {
        Command::Verify(VerifyCommand::Covariance(a)) => a.apply_to.as_deref(),
        Command::Verify(VerifyCommand::Yamabe(a)) => a.apply_to.as_deref(),
        Command::Verify(VerifyCommand::Main(a)) => a.apply_to.as_deref(),
        _ => None,
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with_output(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Output of one in-process invocation.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run_captured(args: &[&str]) -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("conflap").chain(args.iter().copied());
    let code = run_with_output(argv, &mut out, &mut err);
    Outcome {
        code,
        stdout: String::from_utf8(out).expect("utf8"),
        stderr: String::from_utf8(err).expect("utf8"),
    }
}

/// Convenience used by the acceptance harness: one case summarising a report.
pub fn summary_case(id: &str, report: &Report) -> Case {
    match report.first_problem() {
        None => Case::pass(id, format!("{} cases", report.cases.len())),
        Some(c) => Case {
            id: id.to_string(),
            description: format!("{} cases", report.cases.len()),
            status: c.status,
            witness: Some(format!("{}: {}", c.id, c.witness.clone().unwrap_or_default())),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn w_range_parsing() {
        assert_eq!(parse_w_range("-3..3").unwrap(), -3..=3);
        assert_eq!(parse_w_range("-5..-2").unwrap(), -5..=-2);
        assert!(parse_w_range("3..-3").is_err());
        assert!(parse_w_range("3").is_err());
    }

    #[test]
    fn rn_pass_json() {
        let o = run_captured(&["verify", "rn", "--n", "2", "--k", "3", "--format", "json"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["status"], "pass");
    }

    #[test]
    fn zero_order_is_usage_error() {
        let o = run_captured(&["verify", "main", "--k", "0"]);
        assert_eq!(o.code, EXIT_USAGE);
        assert!(o.stderr.contains("k >= 1"), "{}", o.stderr);
    }

    #[test]
    fn limit_maps_to_three() {
        let o = run_captured(&["verify", "rn", "--n", "3", "--k", "4", "--term-cap", "5"]);
        assert_eq!(o.code, EXIT_LIMIT, "{}{}", o.stdout, o.stderr);
    }

    #[test]
    fn parse_error_points_at_position() {
        let o = run_captured(&["verify", "main", "--n", "2", "--apply-to", "y1 + y3"]);
        assert_eq!(o.code, EXIT_USAGE);
        let lines: Vec<&str> = o.stderr.lines().collect();
        assert_eq!(lines[1], "  y1 + y3");
        assert_eq!(lines[2], "        ^");
    }

    #[test]
    fn help_is_not_an_error() {
        let o = run_captured(&["--help"]);
        assert_eq!(o.code, 0);
        assert!(o.stdout.contains("verify"));
        assert_eq!(run_captured(&["frobnicate"]).code, EXIT_USAGE);
    }
}
