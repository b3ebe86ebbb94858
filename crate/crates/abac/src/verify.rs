use std::fmt::Write as _;

use abac_core::discretization::{SpaceTimeMesh, SpatialOperator};
use abac_core::oracle::{self, DensePreconditioner};
use abac_core::preconditioner::{spatial_eigenvalues, AbacPreconditioner, AlphaCirculantSpec};
use abac_core::vector::norm2;
use abac_core::SpaceTimeVector;
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::Result;

/// `(d, m1, n, alpha)`; every case has `n <= 6` and `m <= 25`.
pub const CASES: &[(usize, usize, usize, f64)] = &[
    (1, 1, 2, 0.3),
    (1, 3, 4, 1e-6),
    (1, 3, 4, 0.2),
    (1, 3, 4, 0.4),
    (1, 5, 6, 1e-3),
    (2, 3, 4, 1e-2),
    (2, 3, 6, 1e-6),
    (2, 5, 3, 0.1),
];

pub const RANDOM_VECTORS: usize = 20;
const SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    /// Added to the first fused symbol before the fast-path checks
    /// (negative control).
    pub perturb_diagonal: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub case: String,
    pub value: f64,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.value <= self.tolerance
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
    pub notes: Vec<String>,
}

impl VerifyReport {
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed()).count()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for note in &self.notes {
            let _ = writeln!(s, "# {note}");
        }
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{} {:<18} {:<28} value={:.3e} tol={:.1e}",
                if c.passed() { "PASS" } else { "FAIL" },
                c.name,
                c.case,
                c.value,
                c.tolerance
            );
        }
        let _ = writeln!(s, "{} of {} checks passed", self.checks.len() - self.failures(), self.checks.len());
        s
    }
}

struct Case {
    mesh: SpaceTimeMesh,
    op: SpatialOperator,
    alpha: f64,
    label: String,
}

impl Case {
    fn check(&self, report: &mut VerifyReport, name: &'static str, value: f64, tolerance: f64) {
        report.checks.push(CheckResult { name, case: self.label.clone(), value, tolerance });
    }
}

fn relative_error(got: &[f64], want: &[f64]) -> f64 {
    let diff: Vec<f64> = got.iter().zip(want).map(|(a, b)| a - b).collect();
    norm2(&diff) / norm2(want).max(f64::MIN_POSITIVE)
}

/// Runs every dense-oracle check over [`CASES`]. Output is deterministic.
pub fn run_verify(opts: &VerifyOptions) -> Result<VerifyReport> {
    let mut report = VerifyReport::default();
    let mut constants: Vec<((usize, usize, usize), (f64, f64))> = Vec::new();
    for &(d, m1, n, alpha) in CASES {
        let mesh = SpaceTimeMesh::new(d, m1, n, 1.0)?;
        let op = SpatialOperator::laplacian(&mesh);
        let case = Case { mesh, op, alpha, label: format!("d={d} m1={m1} n={n} alpha={alpha:.0e}") };
        let key = (d, m1, n);
        let (c0, c1) = match constants.iter().find(|(k, _)| *k == key) {
            Some(&(_, c)) => c,
            None => {
                let c = oracle::compute_constants(&case.mesh, &case.op)?;
                report.notes.push(format!("d={d} m1={m1} n={n}: c0={:.6e} c1={:.6e}", c.0, c.1));
                constants.push((key, c));
                c
            }
        };
        run_case(&case, (c0, c1), opts, &mut report)?;
    }
    Ok(report)
}

fn run_case(case: &Case, (c0, c1): (f64, f64), opts: &VerifyOptions, report: &mut VerifyReport) -> Result<()> {
    let (mesh, op, alpha) = (&case.mesh, &case.op, case.alpha);
    let dense_c = oracle::dense_c_alpha(mesh, op, alpha)?;
    let dense_eigs = oracle::real_eigenvalues_of(&dense_c)?;

    let mut spec = AlphaCirculantSpec::build(mesh, alpha, mesh.tau, 1.0)?;
    if let Some(delta) = opts.perturb_diagonal {
        spec.perturb_symbol(0, 0, Complex64::new(delta, 0.0));
    }
    case.check(report, "symbols-vs-dense", oracle::multiset_distance(&spec.diag, &dense_eigs), 1e-9);

    let lams = spatial_eigenvalues(mesh, mesh.tau, 1.0)?;
    let mut formula = Vec::with_capacity(mesh.dof());
    for k in 1..=mesh.n {
        for &lam in &lams {
            formula.push(oracle::appendix_eigenvalue_formula(alpha, lam, k, mesh.n)?);
        }
    }
    case.check(report, "appendix-formula", oracle::multiset_distance(&formula, &dense_eigs), 1e-10);

    let (sqrt_imag, sqrt_residual) = oracle::sqrt_check(mesh, op, alpha)?;
    case.check(report, "sqrt-real", sqrt_imag, 1e-10);
    case.check(report, "sqrt-residual", sqrt_residual, 1e-9);

    let q = oracle::q_alpha_report(mesh, op, alpha)?;
    case.check(report, "q-orthogonal", q.worst(), 1e-9);
    case.check(report, "q-spectrum", q.eigen_distance, 1e-9);

    if mesh.n >= 3 {
        let r = oracle::r_norm(mesh, op, alpha)?;
        case.check(report, "r-norm", oracle::check_r_norm(mesh, op, alpha)? / r, 1e-10);
    }

    let spectrum = oracle::preconditioned_spectrum(mesh, op, alpha, Some((c0, c1)))?;
    case.check(report, "e-alpha-bound", (spectrum.norm_e_alpha - c1 * alpha).max(0.0), 1e-9);
    case.check(report, "spectrum-real", spectrum.max_imag, 1e-9);
    case.check(report, "spectrum-interval", spectrum.interval_violation, 1e-9);

    let dense = DensePreconditioner::from_matrix(&dense_c)?;
    let fast = AbacPreconditioner::from_spec(spec, mesh.d)?;
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for _ in 0..RANDOM_VECTORS {
        let y: Vec<f64> = (0..mesh.dof()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let got = fast.apply_p_inv(&SpaceTimeVector::from_vec(mesh.n, mesh.m, y.clone())?)?;
        worst = worst.max(relative_error(got.as_slice(), &dense.apply_p_inv(&y)));
    }
    case.check(report, "fast-vs-dense", worst, 1e-9);

    let ideal = oracle::ideal_spectrum(mesh, op)?;
    case.check(report, "ideal-spectrum", ideal.interval_violation.max(ideal.max_imag), 1e-9);
    Ok(())
}
