use abac_core::discretization::{preconditioner_coefficient, SpaceTimeMesh, SpatialOperator, WaveProblem};
use abac_core::oracle::{self, SpectralReport, SIZE_GUARD};
use abac_core::preconditioner::AlphaCirculantSpec;
use abac_core::Error;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, PreconditionerKind};
use crate::error::{CliError, Result};

/// JSON form of a dense spectral report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumOutput {
    pub problem: String,
    pub d: usize,
    pub n: usize,
    pub m: usize,
    pub tau: f64,
    pub h: f64,
    pub ideal: bool,
    pub alpha: f64,
    /// `[re, im]` pairs in lexicographic order.
    pub eigenvalues: Vec<[f64; 2]>,
    #[serde(rename = "norm_E_alpha")]
    pub norm_e_alpha: f64,
    pub c0: f64,
    pub c1: f64,
    pub interval_violation: f64,
    pub max_imag: f64,
}

impl SpectrumOutput {
    fn new(cfg: &ExperimentConfig, mesh: &SpaceTimeMesh, ideal: bool, mut rep: SpectralReport) -> Self {
        oracle::sort_eigenvalues(&mut rep.eigenvalues);
        SpectrumOutput {
            problem: cfg.problem.clone(),
            d: mesh.d,
            n: mesh.n,
            m: mesh.m,
            tau: mesh.tau,
            h: mesh.h,
            ideal,
            alpha: rep.alpha,
            eigenvalues: rep.eigenvalues.iter().map(|z| [z.re, z.im]).collect(),
            norm_e_alpha: rep.norm_e_alpha,
            c0: rep.c0,
            c1: rep.c1,
            interval_violation: rep.interval_violation,
            max_imag: rep.max_imag,
        }
    }
}

/// Dense spectrum of the preconditioned all-at-once matrix for the single
/// mesh named in `cfg`.
pub fn run_spectrum(cfg: &ExperimentConfig, problem: &WaveProblem, ideal: bool) -> Result<SpectrumOutput> {
    cfg.validate()?;
    let (&te, &he) = match (cfg.tau_exponents.as_slice(), cfg.h_exponents.as_slice()) {
        ([te], [he]) => (te, he),
        _ => return Err(CliError::Config("spectrum needs exactly one tau and one h exponent".into())),
    };
    let mesh = SpaceTimeMesh::from_exponents(cfg.dim, te, he, cfg.t_final)?;
    if mesh.dof() > SIZE_GUARD {
        return Err(Error::SizeGuard { size: mesh.dof(), limit: SIZE_GUARD }.into());
    }
    let op = SpatialOperator::for_problem(&mesh, problem)?;
    if ideal {
        return Ok(SpectrumOutput::new(cfg, &mesh, true, oracle::ideal_spectrum(&mesh, &op)?));
    }
    if cfg.preconditioner == PreconditionerKind::None {
        return Err(CliError::Config("spectrum needs --precond abac or abc, or --ideal".into()));
    }
    let alpha = cfg.effective_alpha()?;
    // surfaces a singular symbol by name before the dense square root fails
    AlphaCirculantSpec::build(&mesh, alpha, mesh.tau, preconditioner_coefficient(&mesh, problem))?;
    let rep = oracle::preconditioned_spectrum(&mesh, &op, alpha, None)?;
    Ok(SpectrumOutput::new(cfg, &mesh, false, rep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use abac_core::problems;

    fn small() -> ExperimentConfig {
        ExperimentConfig { dim: 1, tau_exponents: vec![2], h_exponents: vec![2], ..Default::default() }
    }

    #[test]
    fn small_mesh_spectrum() {
        let out = run_spectrum(&small(), &problems::example1(), false).unwrap();
        assert_eq!((out.n, out.m), (4, 3));
        assert_eq!(out.eigenvalues.len(), 12);
        assert!(out.interval_violation <= 1e-9);
        let json = serde_json::to_string(&out).unwrap();
        assert!(json.contains("\"norm_E_alpha\""));
        assert_eq!(serde_json::from_str::<SpectrumOutput>(&json).unwrap(), out);
    }

    #[test]
    fn ideal_spectrum_is_plus_minus_one() {
        let out = run_spectrum(&small(), &problems::example1(), true).unwrap();
        for [re, im] in out.eigenvalues {
            assert!((re.abs() - 1.0).abs() <= 1e-9 && im.abs() <= 1e-9);
        }
    }

    #[test]
    fn singular_abc_symbol_is_reported() {
        // tau = 1/2, h = 1/2, T = 3: Lambda = 2 and cos(2 pi k / 6) = 1/2
        let cfg = ExperimentConfig {
            preconditioner: PreconditionerKind::Abc,
            tau_exponents: vec![1],
            h_exponents: vec![1],
            t_final: 3.0,
            ..small()
        };
        let err = run_spectrum(&cfg, &problems::example1(), false).unwrap_err();
        assert!(matches!(err, CliError::Core(Error::SingularSymbol { .. })), "{err}");
    }

    #[test]
    fn guard_is_enforced() {
        let cfg = ExperimentConfig { dim: 2, tau_exponents: vec![5], h_exponents: vec![5], ..Default::default() };
        let err = run_spectrum(&cfg, &problems::example1(), false).unwrap_err();
        assert!(matches!(err, CliError::Core(Error::SizeGuard { .. })));
    }
}
