use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use tilde_verify::config::{parse_tol, FileConfig, SuiteConfig, XiSelection};
use tilde_verify::{explain_check, list_catalog, run_suite, VerifyError, EXIT_FAIL, EXIT_PASS};

#[derive(Parser)]
#[command(name = "tildecheck", version, about = "Run tensor-calculus and energy-momentum identity suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one suite and write its report
    Verify(VerifyArgs),
    /// List catalog metrics, fields, suites and checks
    List,
    /// Describe a check
    Explain { id: String },
}

#[derive(Args, Default)]
struct VerifyArgs {
    /// TOML file with the same keys as the flags; flags win
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    metric: Option<String>,
    /// scalar | maxwell
    #[arg(long)]
    theory: Option<String>,
    /// comma-separated field names
    #[arg(long, value_delimiter = ',')]
    fields: Vec<String>,
    /// killing | random | random:N
    #[arg(long)]
    xi: Option<String>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    jet_order: Option<usize>,
    /// global tolerance, or check-id=value; repeatable
    #[arg(long)]
    tol: Vec<String>,
    /// variational quadrature cells per axis
    #[arg(long)]
    grid: Option<usize>,
    /// report path, `-` for stdout
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    quiet: bool,
    /// record wall time in the report (makes it run-dependent)
    #[arg(long)]
    timing: bool,
}

struct Output {
    report: Option<PathBuf>,
    quiet: bool,
    timing: bool,
}

fn resolve(args: VerifyArgs) -> Result<(SuiteConfig, Output), VerifyError> {
    let file = match &args.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let suite = args
        .suite
        .or(file.suite)
        .ok_or_else(|| VerifyError::Config("no suite given (--suite or `suite` in the config file)".into()))?;
    let metric = args.metric.or(file.metric).unwrap_or_else(|| "minkowski4".into());
    let mut cfg = SuiteConfig::new(&suite, &metric);
    cfg.theory = args.theory.or(file.theory);
    cfg.fields = if args.fields.is_empty() {
        file.fields.unwrap_or_default()
    } else {
        args.fields
    };
    if let Some(xi) = args.xi.or(file.xi) {
        cfg.xi = XiSelection::parse(&xi)?;
    }
    cfg.points = args.points.or(file.points).unwrap_or(cfg.points);
    cfg.seed = args.seed.or(file.seed).unwrap_or(cfg.seed);
    cfg.jet_order = args.jet_order.or(file.jet_order).unwrap_or(cfg.jet_order);
    cfg.grid = args.grid.or(file.grid);
    cfg.tol = file.tol;
    cfg.tolerances = file.tolerances.unwrap_or_default();
    for t in &args.tol {
        match parse_tol(t)? {
            (Some(id), v) => {
                cfg.tolerances.insert(id, v);
            }
            (None, v) => cfg.tol = Some(v),
        }
    }
    cfg.validate()?;
    let out = Output {
        report: args.report.or(file.report.map(PathBuf::from)),
        quiet: args.quiet || file.quiet.unwrap_or(false),
        timing: args.timing || file.timing.unwrap_or(false),
    };
    Ok((cfg, out))
}

fn verify(args: VerifyArgs) -> Result<i32, VerifyError> {
    let (cfg, out) = resolve(args)?;
    let start = Instant::now();
    let mut report = run_suite(&cfg)?;
    if out.timing {
        report.summary.wall_ms = Some(start.elapsed().as_millis() as u64);
    }
    let to_stdout = out.report.as_deref().is_some_and(|p| p.as_os_str() == "-");
    if !out.quiet {
        if to_stdout {
            eprint!("{}", report.table());
        } else {
            print!("{}", report.table());
        }
    }
    match &out.report {
        Some(_) if to_stdout => print!("{}", report.to_json()),
        Some(path) => std::fs::write(path, report.to_json())
            .map_err(|e| VerifyError::Config(format!("cannot write {}: {e}", path.display())))?,
        None => {}
    }
    Ok(if report.passed() { EXIT_PASS } else { EXIT_FAIL })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(args) => verify(args),
        Command::List => {
            print!("{}", list_catalog());
            Ok(EXIT_PASS)
        }
        Command::Explain { id } => explain_check(&id).map(|text| {
            print!("{text}");
            EXIT_PASS
        }),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
