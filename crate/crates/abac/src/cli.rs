use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::{ExperimentConfig, NormChoice, OutputFormat, PreconditionerKind, Stopping};
use crate::error::{CliError, ExitStatus, Result};
use crate::runner::{self, SolveOutcome};
use crate::spectrum;
use crate::table::{self, TableRow};
use crate::verify::{self, VerifyOptions};

#[derive(Debug, Parser)]
#[command(name = "abac", version, about = "All-at-once leap-frog wave solver with the ABAC preconditioner")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve on a single (tau, h) mesh.
    Solve(RunArgs),
    /// Solve over the Cartesian product of tau and h exponents.
    Sweep(RunArgs),
    /// Dense spectrum of the preconditioned matrix on a small mesh (JSON).
    Spectrum(SpectrumArgs),
    /// Run the dense oracle checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON experiment file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// example1, example2, homogeneous, or a JSON problem file.
    #[arg(long)]
    pub problem: Option<String>,
    /// tau = 2^-e; comma separated for sweeps.
    #[arg(long = "tau-exp", value_delimiter = ',')]
    pub tau_exp: Option<Vec<u32>>,
    /// h = 2^-e; comma separated for sweeps.
    #[arg(long = "h-exp", value_delimiter = ',')]
    pub h_exp: Option<Vec<u32>>,
    #[arg(long, value_enum)]
    pub precond: Option<PreconditionerKind>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
    #[arg(long, value_enum)]
    pub stopping: Option<Stopping>,
    #[arg(long = "residual-norm", value_enum)]
    pub residual_norm: Option<NormChoice>,
    /// Spatial dimension.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Final time T.
    #[arg(long = "t-final")]
    pub t_final: Option<f64>,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Write the solution vector of a single solve as JSON.
    #[arg(long = "solution-out")]
    pub solution_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Use the ideal s(T)-based preconditioner.
    #[arg(long)]
    pub ideal: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct VerifyArgs {
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long = "perturb-diagonal", hide = true, allow_hyphen_values = true)]
    pub perturb_diagonal: Option<f64>,
}

impl RunArgs {
    /// File values (or defaults), then flags on top.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::from_json_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = &self.problem {
            c.problem = v.clone();
        }
        if let Some(v) = &self.tau_exp {
            c.tau_exponents = v.clone();
        }
        if let Some(v) = &self.h_exp {
            c.h_exponents = v.clone();
        }
        if let Some(v) = self.precond {
            c.preconditioner = v;
        }
        if self.alpha.is_some() {
            c.alpha = self.alpha;
        }
        if let Some(v) = self.tol {
            c.tol = v;
        }
        if let Some(v) = self.max_iter {
            c.max_iter = v;
        }
        if let Some(v) = self.stopping {
            c.stopping = v;
        }
        if let Some(v) = self.residual_norm {
            c.residual_norm = v;
        }
        if let Some(v) = self.dim {
            c.dim = v;
        }
        if let Some(v) = self.t_final {
            c.t_final = v;
        }
        if self.out.is_some() {
            c.output = self.out.clone();
        }
        if let Some(v) = self.format {
            c.format = v;
        }
        if self.solution_out.is_some() {
            c.solution_output = self.solution_out.clone();
        }
        c.validate()?;
        Ok(c)
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::io(p, e))?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn write_rows(cfg: &ExperimentConfig, rows: &[TableRow]) -> Result<()> {
    let out = open_output(cfg.output.as_deref())?;
    match cfg.format {
        OutputFormat::Csv => table::write_csv(out, rows),
        OutputFormat::Json => table::write_json(out, rows),
    }
}

#[derive(Serialize)]
struct SolutionFile<'a> {
    n: usize,
    m: usize,
    tau: f64,
    h: f64,
    /// Block `k` holds the unknowns at time `(k + 1) tau`.
    data: &'a [f64],
}

fn write_solution(path: &Path, outcome: &SolveOutcome) -> Result<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let sol = &outcome.report.solution;
    serde_json::to_writer(
        BufWriter::new(file),
        &SolutionFile { n: sol.n(), m: sol.m(), tau: outcome.mesh.tau, h: outcome.mesh.h, data: sol.as_slice() },
    )?;
    Ok(())
}

pub fn cmd_solve(args: &RunArgs) -> Result<ExitStatus> {
    let cfg = args.resolve()?;
    let (te, he) = match (cfg.tau_exponents.as_slice(), cfg.h_exponents.as_slice()) {
        ([te], [he]) => (*te, *he),
        _ => return Err(CliError::Config("solve takes exactly one tau and one h exponent; use sweep".into())),
    };
    let problem = cfg.load_problem()?;
    let outcome = runner::solve_case(&cfg, &problem, te, he)?;
    write_rows(&cfg, std::slice::from_ref(&outcome.row))?;
    if let Some(path) = &cfg.solution_output {
        write_solution(path, &outcome)?;
    }
    Ok(if outcome.converged() { ExitStatus::Success } else { ExitStatus::NotConverged })
}

pub fn cmd_sweep(args: &RunArgs) -> Result<ExitStatus> {
    let cfg = args.resolve()?;
    let problem = cfg.load_problem()?;
    let mut rows = Vec::new();
    let mut status = ExitStatus::Success;
    for ((te, he), res) in runner::sweep(&cfg, &problem) {
        match res {
            Ok(o) => {
                if !o.converged() {
                    status = status.max(ExitStatus::NotConverged);
                }
                rows.push(o.row);
            }
            Err(e) => {
                eprintln!("tau=2^-{te} h=2^-{he}: {e}");
                status = status.max(e.status());
            }
        }
    }
    write_rows(&cfg, &rows)?;
    Ok(status)
}

pub fn cmd_spectrum(args: &SpectrumArgs) -> Result<ExitStatus> {
    let cfg = args.run.resolve()?;
    let problem = cfg.load_problem()?;
    let report = spectrum::run_spectrum(&cfg, &problem, args.ideal)?;
    let mut out = open_output(cfg.output.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    Ok(ExitStatus::Success)
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<ExitStatus> {
    let report = verify::run_verify(&VerifyOptions { perturb_diagonal: args.perturb_diagonal })?;
    let mut out = open_output(args.out.as_deref())?;
    out.write_all(report.render().as_bytes())?;
    out.flush()?;
    match report.failures() {
        0 => Ok(ExitStatus::Success),
        k => Err(CliError::Verification(k)),
    }
}

pub fn dispatch(cli: &Cli) -> Result<ExitStatus> {
    match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

/// Parses arguments, runs the subcommand and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitStatus::InvalidConfig.code() } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(status) => status.code(),
        Err(e) => {
            eprintln!("error: {e}");
            e.status().code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(&path, r#"{"problem": "example2", "tol": 1e-8, "tau_exponents": [5]}"#).unwrap();
        let args = RunArgs { config: Some(path), tol: Some(1e-4), h_exp: Some(vec![3]), ..Default::default() };
        let c = args.resolve().unwrap();
        assert_eq!(c.problem, "example2");
        assert_eq!(c.tol, 1e-4);
        assert_eq!(c.tau_exponents, vec![5]);
        assert_eq!(c.h_exponents, vec![3]);
    }

    #[test]
    fn parses_lists() {
        let cli = Cli::try_parse_from(["abac", "sweep", "--tau-exp", "4,5", "--h-exp", "4", "--precond", "none"]).unwrap();
        let Command::Sweep(a) = cli.command else { panic!() };
        assert_eq!(a.tau_exp, Some(vec![4, 5]));
        assert_eq!(a.precond, Some(PreconditionerKind::None));
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["abac", "solve", "--precond", "bogus"]), 2);
        assert_eq!(run(["abac", "sweep", "--tau-exp", ""]), 2);
        assert_eq!(run(["abac", "solve", "--alpha", "2"]), 2);
    }
}
