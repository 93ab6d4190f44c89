//! `matvar`: evaluate, reduce, sample and verify matrix-variate gamma and
//! beta integrals.
//!
//! Exit status: 0 on success, 1 when a verification check fails, 2 on usage,
//! domain or configuration errors.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use matvar_core::densities::{BetaKind, MatrixBetaParams};
use matvar_core::gammafn::{log_beta_p, log_mvgamma, Case, LinearScale};
use matvar_core::matcore::json::JsonScalar;
use matvar_core::matcore::{MatrixRecord, PdMatrix};
use matvar_core::reduction::{reduce, render_text, BlockMethod, Family};
use matvar_core::samplers::{SampleScalar, Sampler};
use matvar_core::verify::{default_config, run_suite, CheckSpec, Oracle, SuiteConfig, VerifyReport};

#[derive(Parser, Debug)]
#[command(name = "matvar", version, about = "Matrix-variate gamma and beta integrals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate Γ_p(α), Γ̃_p(α) or B_p(α, β) in log and linear scale.
    Eval(EvalArgs),
    /// Print the symbolic reduction trace of an integral.
    Reduce(ReduceArgs),
    /// Draw matrices and write them as JSON lines.
    Sample(SampleArgs),
    /// Run the numerical verification suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Gamma,
    Beta1,
    Beta2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CaseArg {
    Real,
    Complex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args, Debug)]
struct Target {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long, value_enum, default_value = "real")]
    case: CaseArg,
    #[arg(long)]
    p: usize,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    target: Target,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    #[command(flatten)]
    target: Target,
    /// Block sizes eliminated in order, e.g. `3,2`.
    #[arg(long, value_delimiter = ',')]
    schedule: Option<Vec<usize>>,
    /// one_at_a_time | gaussian | gaussian_mirror | stiefel
    #[arg(long)]
    method: Option<BlockMethod>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Show the gamma factors produced by each substitution.
    #[arg(long)]
    audit: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    target: Target,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    stream: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Run the built-in suite.
    #[arg(long, conflicts_with_all = ["config", "family"])]
    default: bool,
    /// JSON suite configuration.
    #[arg(long, conflicts_with = "family")]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    #[arg(long, value_enum, default_value = "real")]
    case: CaseArg,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, value_parser = ["quadrature", "mc"], default_value = "quadrature")]
    oracle: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo worker threads; defaults to MATVAR_THREADS, then all cores.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

/// A failure mapped to an exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure { code: 2, message: format!("i/o error: {e}") }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::usage(format!("json error: {e}"))
    }
}

fn family_of(family: FamilyArg, case: CaseArg) -> Result<Family, Failure> {
    match (family, case) {
        (FamilyArg::Gamma, CaseArg::Real) => Ok(Family::GammaReal),
        (FamilyArg::Gamma, CaseArg::Complex) => Ok(Family::GammaComplex),
        (FamilyArg::Beta1, CaseArg::Real) => Ok(Family::Beta1Real),
        (FamilyArg::Beta1, CaseArg::Complex) => Ok(Family::Beta1Complex),
        (FamilyArg::Beta2, CaseArg::Real) => Ok(Family::Beta2Real),
        (FamilyArg::Beta2, CaseArg::Complex) => Err(Failure::usage("beta2 is available for the real case only")),
    }
}

fn check_p(p: usize) -> Result<(), Failure> {
    if p == 0 {
        Err(Failure::usage("--p must be at least 1"))
    } else {
        Ok(())
    }
}

fn beta_for(family: Family, beta: Option<f64>) -> Result<Option<f64>, Failure> {
    match (family.has_beta(), beta) {
        (true, None) => Err(Failure::usage(format!("{family} needs --beta"))),
        (false, Some(_)) => Err(Failure::usage(format!("{family} takes no --beta"))),
        (_, b) => Ok(b),
    }
}

fn domain_failure(e: matvar_core::GammaDomainError) -> Failure {
    let rule = match e.case {
        Case::Real => "(p−1)/2",
        Case::Complex => "p−1",
    };
    Failure::usage(format!("domain error: {e} (bound {rule} = {})", e.required_bound))
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_eval(args: EvalArgs) -> Result<(), Failure> {
    check_p(args.target.p)?;
    let family = family_of(args.target.family, args.target.case)?;
    let beta = beta_for(family, args.beta)?;
    let (p, alpha) = (args.target.p, args.alpha);
    let log_value = match beta {
        Some(b) => log_beta_p(p, alpha, b, family.case()),
        None => log_mvgamma(p, alpha, family.case()),
    }
    .map_err(domain_failure)?;
    let linear = LinearScale::default().exp(log_value).ok();
    let symbol = family.closed_form_symbol(p);
    let mut out = open_output(&args.output)?;
    match args.format {
        Format::Json => {
            let v = json!({
                "family": family,
                "p": p,
                "alpha": alpha,
                "beta": beta,
                "symbol": symbol,
                "log_value": log_value,
                "linear_value": linear,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
        }
        Format::Text => {
            writeln!(out, "{symbol} with p = {p}, α = {alpha}{}", beta.map(|b| format!(", β = {b}")).unwrap_or_default())?;
            writeln!(out, "log value:    {log_value:.15e}")?;
            match linear {
                Some(v) => writeln!(out, "linear value: {v:.15e}")?,
                None => writeln!(out, "linear value: not representable in f64")?,
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_reduce(args: ReduceArgs) -> Result<(), Failure> {
    check_p(args.target.p)?;
    let family = family_of(args.target.family, args.target.case)?;
    let trace = reduce(family, args.target.p, args.schedule.as_deref(), args.method)
        .map_err(|e| Failure::usage(format!("reduction error: {e}")))?;
    let mut out = open_output(&args.output)?;
    match args.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&trace)?)?,
        Format::Text => write!(out, "{}", render_text(&trace, args.audit))?,
    }
    out.flush()?;
    Ok(())
}

fn write_draws<T: SampleScalar + JsonScalar>(
    out: &mut dyn Write,
    n: usize,
    mut draw: impl FnMut() -> Result<PdMatrix<T>, Failure>,
) -> Result<(), Failure> {
    for _ in 0..n {
        let x = draw()?;
        writeln!(out, "{}", serde_json::to_string(&MatrixRecord::from_matrix(x.matrix()))?)?;
    }
    Ok(())
}

fn cmd_sample(args: SampleArgs) -> Result<(), Failure> {
    check_p(args.target.p)?;
    let family = family_of(args.target.family, args.target.case)?;
    let beta = beta_for(family, args.beta)?;
    let p = args.target.p;
    let case = family.case();
    // Validate before writing anything.
    let params = match (family, beta) {
        (Family::GammaReal | Family::GammaComplex, _) => {
            log_mvgamma(p, args.alpha, case).map_err(domain_failure)?;
            None
        }
        (_, Some(b)) => {
            let kind = if family == Family::Beta2Real { BetaKind::Type2 } else { BetaKind::Type1 };
            Some(MatrixBetaParams::new(p, args.alpha, b, kind, case).map_err(|e| Failure::usage(format!("domain error: {e}")))?)
        }
        (_, None) => unreachable!("beta presence checked above"),
    };
    let mut sampler = Sampler::from_seed(args.seed, args.stream);
    let mut out = open_output(&args.output)?;
    let header = json!({
        "seed": args.seed,
        "stream": args.stream,
        "family": family,
        "p": p,
        "alpha": args.alpha,
        "beta": beta,
        "n": args.n,
        "version": env!("CARGO_PKG_VERSION"),
    });
    writeln!(out, "{}", serde_json::to_string(&header)?)?;
    let fail = |e: matvar_core::Error| Failure::usage(e.to_string());
    match (case, params) {
        (Case::Real, None) => {
            write_draws::<f64>(&mut out, args.n, || sampler.gamma_matrix(p, args.alpha).map_err(|e| fail(e.into())))?
        }
        (Case::Complex, None) => write_draws::<Complex64>(&mut out, args.n, || {
            sampler.gamma_matrix(p, args.alpha).map_err(|e| fail(e.into()))
        })?,
        (Case::Real, Some(ref bp)) => {
            write_draws::<f64>(&mut out, args.n, || sampler.beta_matrix(bp).map_err(|e| fail(e.into())))?
        }
        (Case::Complex, Some(ref bp)) => {
            write_draws::<Complex64>(&mut out, args.n, || sampler.beta_matrix(bp).map_err(|e| fail(e.into())))?
        }
    }
    out.flush()?;
    Ok(())
}

fn suite_from_args(args: &VerifyArgs) -> Result<SuiteConfig, Failure> {
    if args.default {
        return Ok(default_config());
    }
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
        return SuiteConfig::from_json(&text).map_err(|e| Failure::usage(e.to_string()));
    }
    let Some(family) = args.family else {
        return Err(Failure::usage("verify needs --default, --config, or --family with --p and --alpha"));
    };
    let family = family_of(family, args.case)?;
    let p = args.p.ok_or_else(|| Failure::usage("--p is required with --family"))?;
    check_p(p)?;
    let alpha = args.alpha.ok_or_else(|| Failure::usage("--alpha is required with --family"))?;
    let beta = beta_for(family, args.beta)?;
    let oracle: Oracle = args.oracle.parse().map_err(Failure::usage)?;
    Ok(SuiteConfig {
        checks: vec![CheckSpec { family, p, alpha, beta, oracle, n: args.n, seed: args.seed }],
        ..SuiteConfig::default()
    })
}

fn text_report(r: &VerifyReport) -> String {
    let status = if r.pass { "PASS" } else { "FAIL" };
    let params = match r.beta {
        Some(b) => format!("p={} α={} β={}", r.p, r.alpha, b),
        None => format!("p={} α={}", r.p, r.alpha),
    };
    let oracle = match r.oracle {
        Oracle::Quadrature => "quadrature",
        Oracle::Mc => "mc",
    };
    let detail = if let Some(e) = &r.error {
        format!("error: {e}")
    } else if let Some(rel) = r.rel_error {
        format!("log closed={:.10} log oracle={:.10} rel_error={rel:.2e}", r.closed_form_log.unwrap_or(f64::NAN), r.oracle_log.unwrap_or(f64::NAN))
    } else {
        format!(
            "log closed={:.6} log oracle={:.6} se={:.2e} z={:+.2}",
            r.closed_form_log.unwrap_or(f64::NAN),
            r.oracle_log.unwrap_or(f64::NAN),
            r.std_error.unwrap_or(f64::NAN),
            r.discrepancy_sigma.unwrap_or(f64::NAN)
        )
    };
    format!("{status} {:<14} {oracle:<10} {params:<18} {detail}", r.family.name())
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    let mut config = suite_from_args(&args)?;
    if args.threads.is_some() {
        config.threads = args.threads;
    }
    let reports = run_suite(&config);
    let mut out = open_output(&args.output)?;
    match args.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&reports)?)?,
        Format::Text => {
            for r in &reports {
                writeln!(out, "{}", text_report(r))?;
            }
        }
    }
    out.flush()?;
    let failed = reports.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        return Err(Failure { code: 1, message: format!("{failed} of {} checks failed", reports.len()) });
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Reduce(a) => cmd_reduce(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("matvar: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
