use std::path::{Path, PathBuf};

use abac_core::discretization::WaveProblem;
use abac_core::minres::{ResidualNorm, SolverConfig, StoppingRule};
use abac_core::preconditioner::DEFAULT_ALPHA;
use abac_core::problems;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PreconditionerKind {
    Abac,
    /// The `alpha = 1` member of the family.
    Abc,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Stopping {
    #[default]
    Relative,
    Absolute,
}

/// Norm of the residual used by the stopping test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum NormChoice {
    #[default]
    Preconditioned,
    Euclidean,
}

/// Everything a solve, sweep or spectrum run needs. `alpha` stays optional so
/// that `abc` can tell an explicit conflicting value from the default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `example1`, `example2`, `homogeneous`, or a path to a JSON problem file.
    pub problem: String,
    pub tau_exponents: Vec<u32>,
    pub h_exponents: Vec<u32>,
    pub preconditioner: PreconditionerKind,
    pub alpha: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
    pub stopping: Stopping,
    pub residual_norm: NormChoice,
    pub dim: usize,
    pub t_final: f64,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub solution_output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            problem: "example1".into(),
            tau_exponents: vec![4],
            h_exponents: vec![4],
            preconditioner: PreconditionerKind::Abac,
            alpha: None,
            tol: 1e-6,
            max_iter: 200_000,
            stopping: Stopping::Relative,
            residual_norm: NormChoice::Preconditioned,
            dim: 2,
            t_final: 1.0,
            output: None,
            format: OutputFormat::Csv,
            solution_output: None,
        }
    }
}

/// Spatially constant problem data read from a JSON file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CustomProblem {
    pub coefficient: f64,
    pub source: f64,
    pub psi0: f64,
    pub psi1: f64,
}

impl Default for CustomProblem {
    fn default() -> Self {
        CustomProblem { coefficient: 1.0, source: 0.0, psi0: 0.0, psi1: 0.0 }
    }
}

impl CustomProblem {
    pub fn into_problem(self) -> Result<WaveProblem> {
        if !(self.coefficient > 0.0) {
            return Err(CliError::Config("custom problem coefficient must be positive".into()));
        }
        Ok(problems::constant("custom", self.coefficient, self.source, self.psi0, self.psi1))
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        read_json(path)
    }

    /// The alpha actually used: 1 for `abc`, the configured value (default
    /// `1e-6`) otherwise.
    pub fn effective_alpha(&self) -> Result<f64> {
        match (self.preconditioner, self.alpha) {
            (PreconditionerKind::Abc, Some(a)) if a != 1.0 => Err(CliError::Config(format!(
                "the abc preconditioner fixes alpha = 1, got {a}"
            ))),
            (PreconditionerKind::Abc, _) => Ok(1.0),
            (_, Some(a)) => Ok(a),
            (_, None) => Ok(DEFAULT_ALPHA),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(CliError::Config(msg.into()));
        if self.tau_exponents.is_empty() || self.h_exponents.is_empty() {
            return bad("exponent lists must be non-empty");
        }
        let alpha = self.effective_alpha()?;
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(CliError::Config(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        if !(self.tol > 0.0) {
            return bad("tol must be positive");
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1");
        }
        if !(1..=3).contains(&self.dim) {
            return bad("dim must be 1, 2 or 3");
        }
        if !(self.t_final > 0.0) {
            return bad("t_final must be positive");
        }
        if self.problem == "example2" && self.dim != 2 {
            return bad("example2 is only defined for dim 2");
        }
        if self.tau_exponents.iter().chain(&self.h_exponents).any(|&e| e > 30) {
            return bad("exponents above 30 are not supported");
        }
        Ok(())
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            tol: self.tol,
            max_iter: self.max_iter,
            stopping: match self.stopping {
                Stopping::Relative => StoppingRule::Relative,
                Stopping::Absolute => StoppingRule::Absolute,
            },
            norm: match self.residual_norm {
                NormChoice::Preconditioned => ResidualNorm::Preconditioned,
                NormChoice::Euclidean => ResidualNorm::Euclidean,
            },
            record_history: true,
        }
    }

    pub fn load_problem(&self) -> Result<WaveProblem> {
        if let Some(p) = problems::by_name(&self.problem) {
            return Ok(p);
        }
        let path = Path::new(&self.problem);
        if path.exists() {
            return read_json::<CustomProblem>(path)?.into_problem();
        }
        Err(CliError::Config(format!(
            "unknown problem '{}' (expected example1, example2, homogeneous or a JSON file)",
            self.problem
        )))
    }
}
