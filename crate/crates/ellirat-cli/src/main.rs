//! Batch front end: parse function specs, run the pipelines, emit flat
//! key/value reports and comma-separated plot data.
//!
//! Exit codes: 0 success, 2 spec/validation failure, 3 solver failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ellirat::asplund;
use ellirat::funcspec::FunctionSpec;
use ellirat::john;
use ellirat::logconcave::LogConcaveFn;
use ellirat::mvie;
use ellirat::projection;
use ellirat::verify;
use ellirat::Error;

#[derive(Parser)]
#[command(
    name = "ellirat",
    version,
    about = "John ellipsoids, optimal levels and integral ratios of log-concave functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inscribed ellipsoid of the spec's body polytope
    Mvie(RunArgs),
    /// Optimal level t0, John ellipsoid and integral ratio
    John(RunArgs),
    /// Integral ratio only
    Irat(RunArgs),
    /// Comma-separated log φ curve: s,t,log_phi,volume
    PhiCurve(RunArgs),
    /// Polar projection body and inequality report
    Petty(RunArgs),
    /// John-position certificate: weights, residuals, inradius interval
    Certify(RunArgs),
    /// Sup-convolution derivative ladder against the analytic target
    AsplundCheck(RunArgs),
    /// Run every built-in verification check and print the matrix
    VerifyAll(VerifyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON function-spec file
    #[arg(long)]
    spec: PathBuf,
    /// Solver tolerance (within [1e-12, 1e-2])
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for Monte Carlo paths (recorded in the report header)
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample count for spherical integration / curve resolution (0 = default)
    #[arg(long, default_value_t = 0)]
    samples: usize,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Accepted for interface uniformity; every check is deterministic, so
    /// the seed does not change the matrix
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Accepted for interface uniformity
    #[arg(long, default_value_t = 0)]
    samples: usize,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(classify(&err))
        }
    }
}

/// Validation problems exit 2; numerical/solver problems exit 3.
fn classify(err: &Error) -> u8 {
    match err {
        Error::SpecParse(_)
        | Error::InvalidArgument(_)
        | Error::DimensionTooLarge { .. }
        | Error::DimensionUnsupported { .. }
        | Error::OriginNotInterior { .. }
        | Error::NotSymmetric
        | Error::ZeroDirection
        | Error::Unbounded
        | Error::Infeasible
        | Error::EmptyInterior => 2,
        Error::NoConvergence { .. }
        | Error::TooFewContacts { .. }
        | Error::EmptyLevel { .. }
        | Error::TailNotConverged { .. }
        | Error::KinkPoint
        | Error::AllLevelsDegenerate
        | Error::Numerical(_) => 3,
    }
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Mvie(args) => {
            let (spec, _f) = load(&args)?;
            let body = spec
                .body
                .as_ref()
                .ok_or_else(|| Error::SpecParse("field 'body': required for mvie".into()))?;
            let k = ellirat::funcspec::parse_polytope(body, "body")?;
            let symmetric = k.is_origin_symmetric(1e-9);
            let sol = mvie::mvie(&k, symmetric, args.tol)?;
            let mut report = header("mvie", &args);
            push(&mut report, "symmetric", &symmetric.to_string());
            push_vector(&mut report, "center", sol.ellipsoid.center());
            push_matrix(&mut report, "shape", sol.ellipsoid.shape());
            push_f64(&mut report, "log_det", sol.objective);
            push_f64(&mut report, "volume", sol.ellipsoid.volume());
            push(
                &mut report,
                "contacts",
                &sol.contact_points.len().to_string(),
            );
            push(
                &mut report,
                "active_rows",
                &format!("{:?}", sol.active_rows),
            );
            push_f64(&mut report, "kkt_residual", sol.kkt_residual);
            push(&mut report, "iterations", &sol.iterations.to_string());
            emit(&args.out, &render(&report))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::John(args) => {
            let (_, f) = load(&args)?;
            let jr = john::find_t0(&f, john::DEFAULT_TOL_S)?;
            let mut report = header("john", &args);
            push_f64(&mut report, "t0", jr.t0);
            push_f64(&mut report, "s0", -jr.t0.ln());
            push_f64(&mut report, "phi_at_t0", jr.phi_at_t0);
            push_f64(&mut report, "integral_ratio", jr.integral_ratio);
            push_vector(&mut report, "center", jr.ellipsoid.center());
            push_matrix(&mut report, "shape", jr.ellipsoid.shape());
            push(&mut report, "trace_points", &jr.trace.len().to_string());
            emit(&args.out, &render(&report))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Irat(args) => {
            let (_, f) = load(&args)?;
            let jr = john::find_t0(&f, john::DEFAULT_TOL_S)?;
            let mut report = header("irat", &args);
            push_f64(&mut report, "integral_ratio", jr.integral_ratio);
            push_f64(&mut report, "t0", jr.t0);
            push_f64(&mut report, "integral", f.integral()?);
            push_f64(&mut report, "phi_at_t0", jr.phi_at_t0);
            emit(&args.out, &render(&report))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::PhiCurve(args) => {
            let (_, f) = load(&args)?;
            let samples = if args.samples > 0 { args.samples } else { 64 };
            let n = f.dim() as f64;
            let grid: Vec<f64> = (0..samples)
                .map(|i| n * i as f64 / (samples - 1).max(1) as f64)
                .collect();
            let entries = john::phi_curve(&f, &grid)?;
            let mut text = String::from("s,t,log_phi,volume\n");
            for e in entries {
                text.push_str(&format!(
                    "{:.12e},{:.12e},{:.12e},{:.12e}\n",
                    e.s,
                    (-e.s).exp(),
                    e.log_phi,
                    e.volume
                ));
            }
            emit(&args.out, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Petty(args) => {
            let (_, f) = load(&args)?;
            let report_data = projection::petty_report(&f)?;
            let (pp_vol, pp_err) = projection::pp_volume(&f, args.samples, args.seed)?;
            let mut report = header("petty", &args);
            push_f64(&mut report, "lhs", report_data.lhs);
            push_f64(&mut report, "rhs_lower", report_data.rhs_lower);
            push_f64(&mut report, "entropy_power", report_data.entropy_power);
            push_f64(&mut report, "entropy_bound", report_data.entropy_bound);
            push_f64(&mut report, "mc_error", report_data.mc_error);
            push_f64(&mut report, "pp_volume", pp_vol);
            push_f64(&mut report, "pp_volume_error", pp_err);
            emit(&args.out, &render(&report))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Certify(args) => {
            let (_, f) = load(&args)?;
            let (jr, cert) = john::certify_function(&f, args.tol.max(1e-8))?;
            let mut report = header("certify", &args);
            push_f64(&mut report, "t0", jr.t0);
            push(&mut report, "passed", &cert.passed.to_string());
            push_f64(&mut report, "identity_residual", cert.identity_residual);
            push_f64(&mut report, "barycenter_residual", cert.barycenter_residual);
            let weights: Vec<String> = cert.weights.iter().map(|w| format!("{w:.12e}")).collect();
            push(&mut report, "weights", &format!("[{}]", weights.join(", ")));
            let total: f64 = cert.weights.iter().sum();
            push_f64(&mut report, "weight_sum", total);
            if let Some((lo, hi)) = cert.inradius_derivative_interval {
                push_f64(&mut report, "inradius_derivative_lo", lo);
                push_f64(&mut report, "inradius_derivative_hi", hi);
            }
            emit(&args.out, &render(&report))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::AsplundCheck(args) => {
            let (_, f) = load(&args)?;
            let check = asplund::self_product_derivative_check(&f, &asplund::DEFAULT_LADDER)?;
            let mut report = header("asplund-check", &args);
            for (eps, q) in check.ladder.eps_values.iter().zip(&check.ladder.quotients) {
                push(
                    &mut report,
                    &format!("quotient[{eps:.0e}]"),
                    &format!("{q:.12e}"),
                );
            }
            push_f64(&mut report, "extrapolated", check.ladder.extrapolated);
            push_f64(&mut report, "target", check.target);
            push(
                &mut report,
                "converged",
                &check.ladder.converged.to_string(),
            );
            push_f64(&mut report, "absolute_error", check.absolute_error());
            emit(&args.out, &render(&report))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyAll(args) => {
            let _ = (args.seed, args.samples);
            let outcomes = verify::run_all();
            let mut text = String::new();
            let mut all_passed = true;
            for o in &outcomes {
                text.push_str(&format!(
                    "[{}] {:<24} {}\n",
                    if o.passed { "PASS" } else { "FAIL" },
                    o.name,
                    o.detail
                ));
                all_passed &= o.passed;
            }
            text.push_str(&format!(
                "{} of {} checks passed\n",
                outcomes.iter().filter(|o| o.passed).count(),
                outcomes.len()
            ));
            emit(&args.out, &text)?;
            Ok(if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn load(args: &RunArgs) -> Result<(FunctionSpec, LogConcaveFn), Error> {
    if !(args.tol >= 1e-12 && args.tol <= 1e-2) {
        return Err(Error::InvalidArgument(format!(
            "tol = {} outside [1e-12, 1e-2]",
            args.tol
        )));
    }
    let text = std::fs::read_to_string(&args.spec)
        .map_err(|e| Error::SpecParse(format!("cannot read {}: {e}", args.spec.display())))?;
    let spec = FunctionSpec::parse(&text)?;
    let f = spec.build()?;
    Ok((spec, f))
}

fn header(command: &str, args: &RunArgs) -> Vec<(String, String)> {
    vec![
        ("command".into(), command.into()),
        ("spec".into(), args.spec.display().to_string()),
        ("tol".into(), format!("{:e}", args.tol)),
        ("seed".into(), args.seed.to_string()),
        ("samples".into(), args.samples.to_string()),
    ]
}

fn push(report: &mut Vec<(String, String)>, key: &str, value: &str) {
    report.push((key.to_string(), value.to_string()));
}

fn push_f64(report: &mut Vec<(String, String)>, key: &str, value: f64) {
    report.push((key.to_string(), format!("{value:.12e}")));
}

fn push_vector(report: &mut Vec<(String, String)>, key: &str, v: &ellirat::geometry::Vector) {
    for (i, x) in v.iter().enumerate() {
        push_f64(report, &format!("{key}[{i}]"), *x);
    }
}

fn push_matrix(report: &mut Vec<(String, String)>, key: &str, m: &ellirat::geometry::Matrix) {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            push_f64(report, &format!("{key}[{i}][{j}]"), m[(i, j)]);
        }
    }
}

fn render(report: &[(String, String)]) -> String {
    let mut text = String::new();
    for (k, v) in report {
        text.push_str(&format!("{k} = {v}\n"));
    }
    text
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| Error::Numerical(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}
