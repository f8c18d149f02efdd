//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage errors (bad arguments, unknown
//! ids), 2 on numerical failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bench::{
    default_ns, problem, problem_summary, run_sweep, write_convergence_csv, write_convergence_json,
    write_stability_csv, write_stability_json, PROBLEM_IDS,
};
use crate::classical::{ImplicitMode, ImplicitSolveConfig};
use crate::driver::{integrate, SolveOptions, Startup};
use crate::error::{Error, Result};
use crate::ivp::global_error;
use crate::method::MethodId;
use crate::stability::{scan_region, PolyMode, Window};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "rbfode",
    version,
    about = "Classical and adaptive RBF Adams integrators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one problem with one method.
    Solve(SolveArgs),
    /// Global error and observed order over a doubling sequence of N.
    Converge(ConvergeArgs),
    /// Scan the absolute stability region on a grid.
    Stability(StabilityArgs),
    /// List methods and problems.
    List,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StartupArg {
    Exact,
    Rk4,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ImplicitArg {
    Pece,
    Fixed,
    Newton,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Derived,
    Printed,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Source of the startup values.
    #[arg(long, value_enum, default_value = "exact")]
    pub startup: StartupArg,
    /// Treatment of the implicit corrector.
    #[arg(long, value_enum, default_value = "pece")]
    pub implicit: ImplicitArg,
    /// Use zero shape parameter on every adaptive step.
    #[arg(long)]
    pub force_fallback: bool,
}

impl RunArgs {
    fn options(&self) -> SolveOptions {
        let mode = match self.implicit {
            ImplicitArg::Pece => ImplicitMode::Pece,
            ImplicitArg::Fixed => ImplicitMode::FixedPoint,
            ImplicitArg::Newton => ImplicitMode::Newton,
        };
        SolveOptions {
            startup: match self.startup {
                StartupArg::Exact => Startup::Exact,
                StartupArg::Rk4 => Startup::Rk4,
            },
            implicit: ImplicitSolveConfig::with_mode(mode),
            force_fallback: self.force_fallback,
            eps_sq_bound: None,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub problem: String,
    #[arg(long)]
    pub method: MethodId,
    #[arg(long)]
    pub n: usize,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[arg(long)]
    pub problem: String,
    /// Comma-separated method ids.
    #[arg(long, value_delimiter = ',', required = true)]
    pub methods: Vec<MethodId>,
    /// Comma-separated step counts, each double the previous.
    #[arg(long, value_delimiter = ',')]
    pub ns: Option<Vec<usize>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[arg(long)]
    pub method: MethodId,
    /// re_min:re_max:im_min:im_max
    #[arg(long, default_value = "-3:1:-2:2", allow_hyphen_values = true)]
    pub window: Window,
    #[arg(long, default_value_t = 400)]
    pub resolution: usize,
    #[arg(long, value_enum, default_value = "derived")]
    pub mode: ModeArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

fn open_out<'a>(path: &Option<PathBuf>, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(stdout),
    })
}

#[derive(Serialize)]
struct SolveReport<'a> {
    method: MethodId,
    problem: &'a str,
    #[serde(rename = "N")]
    n: usize,
    global_error: Option<f64>,
    fe_count: u64,
    startup_fe_count: u64,
    stencil_fe_per_step: u64,
    fallback_count: usize,
    times: &'a [f64],
    values: &'a [f64],
}

fn solve(args: &SolveArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let p = problem(&args.problem)?;
    let tr = integrate(&p, args.method, args.n, &args.run.options())?;
    let err = global_error(&tr, &p).ok();
    {
        let mut out = open_out(&args.out, stdout)?;
        if args.json {
            let report = SolveReport {
                method: args.method,
                problem: p.id(),
                n: args.n,
                global_error: err,
                fe_count: tr.fe_count,
                startup_fe_count: tr.startup_fe_count,
                stencil_fe_per_step: args.method.stencil_fe(),
                fallback_count: tr.fallback_count,
                times: &tr.times,
                values: &tr.values,
            };
            serde_json::to_writer_pretty(&mut out, &report)?;
            writeln!(out)?;
        } else {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(["t", "v", "exact"])?;
            for (&t, &v) in tr.times.iter().zip(&tr.values) {
                let exact = p.exact(t).map(|u| format!("{u:e}")).unwrap_or_default();
                w.write_record([format!("{t}"), format!("{v:e}"), exact])?;
            }
            w.flush()?;
        }
        out.flush()?;
    }
    let err_text = err
        .map(crate::bench::format_sci)
        .unwrap_or_else(|| "n/a".into());
    writeln!(
        stderr,
        "{} on {} with N = {}: global error {}, rhs evaluations {} (startup {}), stencil FE per step {}, fallbacks {}",
        args.method, p.id(), args.n, err_text, tr.fe_count, tr.startup_fe_count, args.method.stencil_fe(), tr.fallback_count
    )?;
    Ok(EXIT_OK)
}

fn converge(args: &ConvergeArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let p = problem(&args.problem)?;
    let ns = args.ns.clone().unwrap_or_else(|| default_ns(p.id()));
    let rows = run_sweep(&p, &args.methods, &ns, &args.run.options())?;
    {
        let mut out = open_out(&args.out, stdout)?;
        if args.json {
            write_convergence_json(&rows, &mut out)?;
        } else {
            write_convergence_csv(&rows, &mut out)?;
        }
        out.flush()?;
    }
    let mut code = EXIT_OK;
    for r in &rows {
        if let Some(f) = &r.failure {
            writeln!(stderr, "{} N = {}: {f}", r.method, r.n)?;
            code = EXIT_NUMERICAL;
        }
    }
    Ok(code)
}

fn stability(args: &StabilityArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let mode = match args.mode {
        ModeArg::Derived => PolyMode::Derived,
        ModeArg::Printed => PolyMode::Printed,
    };
    let scan = scan_region(args.method, args.window, args.resolution, mode)?;
    {
        let mut out = open_out(&args.out, stdout)?;
        if args.json {
            write_stability_json(&scan, &mut out)?;
        } else {
            write_stability_csv(&scan, &mut out)?;
        }
        out.flush()?;
    }
    if mode == PolyMode::Printed && scan.mode != mode {
        writeln!(
            stderr,
            "{} has no printed form; used the derived polynomial",
            args.method
        )?;
    }
    if scan.failures > 0 {
        writeln!(
            stderr,
            "warning: root finding failed in {} cells (marked unstable)",
            scan.failures
        )?;
    }
    Ok(EXIT_OK)
}

fn list(stdout: &mut dyn Write) -> Result<i32> {
    writeln!(stdout, "methods:")?;
    for m in MethodId::ALL {
        writeln!(
            stdout,
            "  {:<8} order {}  startup nodes {}  rhs evaluations per step {}",
            m.cli_id(),
            m.order(),
            m.startup_nodes(),
            m.fe_per_step_pece()
        )?;
    }
    writeln!(stdout, "problems:")?;
    for id in PROBLEM_IDS {
        writeln!(stdout, "  {id}  {}", problem_summary(id).unwrap_or(""))?;
    }
    Ok(EXIT_OK)
}

fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_USAGE
    }
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => solve(a, stdout, stderr),
        Command::Converge(a) => converge(a, stdout, stderr),
        Command::Stability(a) => stability(a, stdout, stderr),
        Command::List => list(stdout),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}
