use std::time::Instant;

use abac_core::discretization::{
    assemble_rhs, error_metric, preconditioner_coefficient, y_apply, AllAtOnceOperator, SpaceTimeMesh,
    SpatialOperator, WaveProblem,
};
use abac_core::minres::{minres_solve, SolveReport};
use abac_core::preconditioner::AbacPreconditioner;
use abac_core::SpaceTimeVector;

use crate::config::{ExperimentConfig, PreconditionerKind};
use crate::error::Result;
use crate::table::{Iterations, TableRow};

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub mesh: SpaceTimeMesh,
    pub row: TableRow,
    pub report: SolveReport,
}

impl SolveOutcome {
    pub fn converged(&self) -> bool {
        self.report.converged
    }
}

/// Solves `Y T u = Y f` on the mesh `tau = 2^-tau_exp`, `h = 2^-h_exp`. Only
/// the MINRES call is timed.
pub fn solve_case(cfg: &ExperimentConfig, problem: &WaveProblem, tau_exp: u32, h_exp: u32) -> Result<SolveOutcome> {
    cfg.validate()?;
    let mesh = SpaceTimeMesh::from_exponents(cfg.dim, tau_exp, h_exp, cfg.t_final)?;
    let op = SpatialOperator::for_problem(&mesh, problem)?;
    let b = y_apply(&assemble_rhs(&mesh, problem)?);
    let aao = AllAtOnceOperator::new(mesh, op)?;
    let x0 = SpaceTimeVector::zeros(mesh.n, mesh.m);
    let solver = cfg.solver_config();
    let apply_a = |x: &SpaceTimeVector| aao.yt_apply(x);

    let (mut report, seconds) = match cfg.preconditioner {
        PreconditionerKind::None => {
            let start = Instant::now();
            let r = minres_solve(apply_a, |r: &SpaceTimeVector| Ok(r.clone()), &b, &x0, &solver)?;
            (r, start.elapsed().as_secs_f64())
        }
        PreconditionerKind::Abac | PreconditionerKind::Abc => {
            let coefficient = preconditioner_coefficient(&mesh, problem);
            let pre = AbacPreconditioner::new(&mesh, cfg.effective_alpha()?, coefficient)?;
            let start = Instant::now();
            let r = minres_solve(apply_a, |r: &SpaceTimeVector| pre.apply_p_inv(r), &b, &x0, &solver)?;
            (r, start.elapsed().as_secs_f64())
        }
    };
    report.wall_time = Some(seconds);

    let error = match problem.exact {
        Some(_) => Some(error_metric(&mesh, problem, &report.solution)?),
        None => None,
    };
    let row = TableRow {
        tau: mesh.tau,
        h: mesh.h,
        dof: mesh.dof(),
        iter: if report.converged {
            Iterations::Count(report.iterations)
        } else {
            Iterations::Exceeded
        },
        cpu_s: seconds,
        error,
    };
    Ok(SolveOutcome { mesh, row, report })
}

/// One entry per `(tau_exp, h_exp)` pair, in the order of the exponent lists;
/// a failing pair does not stop the others.
pub fn sweep(cfg: &ExperimentConfig, problem: &WaveProblem) -> Vec<((u32, u32), Result<SolveOutcome>)> {
    let mut out = Vec::new();
    for &te in &cfg.tau_exponents {
        for &he in &cfg.h_exponents {
            out.push(((te, he), solve_case(cfg, problem, te, he)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use abac_core::problems;

    #[test]
    fn homogeneous_problem_needs_no_iterations() {
        let cfg = ExperimentConfig { dim: 1, ..Default::default() };
        let out = solve_case(&cfg, &problems::homogeneous(), 3, 3).unwrap();
        assert_eq!(out.row.iter, Iterations::Count(0));
        assert_eq!(out.row.error, Some(0.0));
        assert!(out.report.solution.as_slice().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn small_example1_solve() {
        let cfg = ExperimentConfig::default();
        let out = solve_case(&cfg, &problems::example1(), 3, 3).unwrap();
        assert_eq!(out.row.dof, 8 * 49);
        assert!(matches!(out.row.iter, Iterations::Count(k) if k <= 4));
        assert!(out.row.error.unwrap() < 1e-2);
    }

    #[test]
    fn example2_has_no_error_column() {
        let cfg = ExperimentConfig { problem: "example2".into(), ..Default::default() };
        let out = solve_case(&cfg, &problems::example2(), 3, 3).unwrap();
        assert_eq!(out.row.error, None);
        assert!(out.converged());
    }

    #[test]
    fn max_iter_gives_the_sentinel() {
        let cfg = ExperimentConfig { preconditioner: PreconditionerKind::None, max_iter: 3, ..Default::default() };
        let out = solve_case(&cfg, &problems::example1(), 3, 3).unwrap();
        assert_eq!(out.row.iter, Iterations::Exceeded);
    }

    #[test]
    fn sweep_keeps_order() {
        let cfg = ExperimentConfig { tau_exponents: vec![3, 2], h_exponents: vec![2, 3], ..Default::default() };
        let keys: Vec<_> = sweep(&cfg, &problems::example1()).into_iter().map(|(k, _)| k).collect();
        assert_eq!(keys, vec![(3, 2), (3, 3), (2, 2), (2, 3)]);
    }
}
