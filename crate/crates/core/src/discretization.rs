//! Space-time mesh, finite-difference spatial operators and the matrix-free
//! all-at-once leap-frog operator.
//!
//! Unknowns are ordered time-major; inside a block the spatial points of the
//! interior grid `{h, 2h, .., m1 h}^d` are ordered lexicographically with the
//! first coordinate fastest. Dirichlet boundary values are zero.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;


use crate::error::{Error, Result};
use crate::vector::{norm2, SpaceTimeVector};
#[cfg(not(any(feature = "std", test)))]
use num_traits::Float;

pub const MAX_DIM: usize = 3;

/// Uniform grid on `(0, T] x (0, 1)^d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimeMesh {
    pub d: usize,
    pub m1: usize,
    pub m: usize,
    pub n: usize,
    pub t_final: f64,
    pub tau: f64,
    pub h: f64,
}

impl SpaceTimeMesh {
    pub fn new(d: usize, m1: usize, n: usize, t_final: f64) -> Result<Self> {
        if d == 0 || d > MAX_DIM {
            return Err(Error::InvalidParameter("spatial dimension must be 1, 2 or 3"));
        }
        if m1 == 0 || n == 0 {
            return Err(Error::EmptyInput);
        }
        if !(t_final > 0.0) || !t_final.is_finite() {
            return Err(Error::InvalidParameter("final time must be positive"));
        }
        let m = m1
            .checked_pow(d as u32)
            .ok_or(Error::InvalidParameter("spatial grid too large"))?;
        Ok(SpaceTimeMesh {
            d,
            m1,
            m,
            n,
            t_final,
            tau: t_final / n as f64,
            h: 1.0 / (m1 + 1) as f64,
        })
    }

    /// `tau = 2^-tau_exp`, `h = 2^-h_exp`, so `m1 = 2^h_exp - 1` and
    /// `n = T 2^tau_exp` (which must be an integer).
    pub fn from_exponents(d: usize, tau_exp: u32, h_exp: u32, t_final: f64) -> Result<Self> {
        if h_exp == 0 || h_exp > 24 || tau_exp > 30 {
            return Err(Error::InvalidParameter("mesh exponent out of range"));
        }
        let steps = t_final * (1u64 << tau_exp) as f64;
        let n = steps.round();
        if (steps - n).abs() > 1e-9 * steps.max(1.0) || n < 1.0 {
            return Err(Error::InvalidParameter("T / tau must be a positive integer"));
        }
        Self::new(d, (1usize << h_exp) - 1, n as usize, t_final)
    }

    pub fn dof(&self) -> usize {
        self.n * self.m
    }

    /// Coordinates of spatial point `p`; only the first `d` entries are used.
    pub fn point(&self, p: usize) -> [f64; MAX_DIM] {
        let mut x = [0.0; MAX_DIM];
        let mut rest = p;
        for xi in x.iter_mut().take(self.d) {
            *xi = ((rest % self.m1) + 1) as f64 * self.h;
            rest /= self.m1;
        }
        x
    }

    /// Samples `g` on the interior grid.
    pub fn sample(&self, g: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        (0..self.m)
            .map(|p| {
                let x = self.point(p);
                g(&x[..self.d])
            })
            .collect()
    }
}

pub type ScalarField = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type SpaceTimeField = Box<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;

pub enum Coefficient {
    Constant(f64),
    Variable(ScalarField),
}

/// `u_tt = div(a grad u) + f` on `(0,1)^d`, `u = 0` on the boundary,
/// `u(., 0) = psi0`, `u_t(., 0) = psi1`.
pub struct WaveProblem {
    pub name: &'static str,
    pub coefficient: Coefficient,
    pub source: SpaceTimeField,
    pub initial_value: ScalarField,
    pub initial_velocity: ScalarField,
    pub exact: Option<SpaceTimeField>,
}

impl core::fmt::Debug for WaveProblem {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("WaveProblem")
            .field("name", &self.name)
            .field("variable_coefficient", &matches!(self.coefficient, Coefficient::Variable(_)))
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    ConstantLaplacian,
    VariableCoefficient,
    MeanCoefficient,
}

/// `Delta_h`, `a_bar Delta_h` or `Delta_{a,h}` on a mesh.
#[derive(Debug, Clone)]
pub struct SpatialOperator {
    kind: OperatorKind,
    d: usize,
    m1: usize,
    m: usize,
    inv_h2: f64,
    scale: f64,
    /// For the variable kind: `a(x_p + h/2 e_axis)` and `a(x_p - h/2 e_axis)`
    /// indexed `[axis][p]`.
    plus: Vec<Vec<f64>>,
    minus: Vec<Vec<f64>>,
}

impl SpatialOperator {
    pub fn laplacian(mesh: &SpaceTimeMesh) -> Self {
        Self::constant(mesh, OperatorKind::ConstantLaplacian, 1.0)
    }

    /// `a_bar Delta_h`.
    pub fn mean(mesh: &SpaceTimeMesh, a_bar: f64) -> Result<Self> {
        if !(a_bar > 0.0) {
            return Err(Error::NonPositiveCoefficient { value: a_bar });
        }
        Ok(Self::constant(mesh, OperatorKind::MeanCoefficient, a_bar))
    }

    fn constant(mesh: &SpaceTimeMesh, kind: OperatorKind, scale: f64) -> Self {
        SpatialOperator {
            kind,
            d: mesh.d,
            m1: mesh.m1,
            m: mesh.m,
            inv_h2: 1.0 / (mesh.h * mesh.h),
            scale,
            plus: Vec::new(),
            minus: Vec::new(),
        }
    }

    /// Conservative central differences of `div(a grad .)` with `a` sampled
    /// at the cell faces `x +- (h/2) e_i`.
    pub fn variable(mesh: &SpaceTimeMesh, a: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let mut plus = vec![vec![0.0; mesh.m]; mesh.d];
        let mut minus = vec![vec![0.0; mesh.m]; mesh.d];
        for p in 0..mesh.m {
            let x = mesh.point(p);
            for axis in 0..mesh.d {
                let mut y = x;
                y[axis] = x[axis] + 0.5 * mesh.h;
                let ap = a(&y[..mesh.d]);
                y[axis] = x[axis] - 0.5 * mesh.h;
                let am = a(&y[..mesh.d]);
                for v in [ap, am] {
                    if !(v > 0.0) || !v.is_finite() {
                        return Err(Error::NonPositiveCoefficient { value: v });
                    }
                }
                plus[axis][p] = ap;
                minus[axis][p] = am;
            }
        }
        let mut op = Self::constant(mesh, OperatorKind::VariableCoefficient, 1.0);
        op.plus = plus;
        op.minus = minus;
        Ok(op)
    }

    /// The operator discretizing the problem's own coefficient.
    pub fn for_problem(mesh: &SpaceTimeMesh, problem: &WaveProblem) -> Result<Self> {
        match &problem.coefficient {
            Coefficient::Constant(c) if *c == 1.0 => Ok(Self::laplacian(mesh)),
            Coefficient::Constant(c) => Self::mean(mesh, *c),
            Coefficient::Variable(a) => Self::variable(mesh, a),
        }
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Constant multiplier of `Delta_h` for the constant and mean kinds.
    pub fn scale(&self) -> Option<f64> {
        match self.kind {
            OperatorKind::VariableCoefficient => None,
            _ => Some(self.scale),
        }
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                found: len,
            });
        }
        Ok(())
    }

    /// `out = A v` for whichever kind this operator is.
    pub fn apply_into(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        self.check_len(v.len())?;
        self.check_len(out.len())?;
        let m1 = self.m1;
        let mut stride = 1;
        match self.kind {
            OperatorKind::VariableCoefficient => {
                out.iter_mut().for_each(|o| *o = 0.0);
                for axis in 0..self.d {
                    let (plus, minus) = (&self.plus[axis], &self.minus[axis]);
                    for p in 0..self.m {
                        let digit = (p / stride) % m1;
                        let vp = v[p];
                        let east = if digit + 1 < m1 { v[p + stride] } else { 0.0 };
                        let west = if digit > 0 { v[p - stride] } else { 0.0 };
                        out[p] += plus[p] * (east - vp) - minus[p] * (vp - west);
                    }
                    stride *= m1;
                }
                let s = self.inv_h2;
                out.iter_mut().for_each(|o| *o *= s);
            }
            _ => {
                out.iter_mut().for_each(|o| *o = 0.0);
                for _ in 0..self.d {
                    for p in 0..self.m {
                        let digit = (p / stride) % m1;
                        let vp = v[p];
                        let east = if digit + 1 < m1 { v[p + stride] } else { 0.0 };
                        let west = if digit > 0 { v[p - stride] } else { 0.0 };
                        out[p] += (east - vp) - (vp - west);
                    }
                    stride *= m1;
                }
                let s = self.scale * self.inv_h2;
                out.iter_mut().for_each(|o| *o *= s);
            }
        }
        Ok(())
    }

    /// `Delta_h v` (or `a_bar Delta_h v` for the mean kind).
    pub fn laplacian_apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if self.kind == OperatorKind::VariableCoefficient {
            return Err(Error::InvalidParameter("expected a constant or mean-coefficient operator"));
        }
        let mut out = vec![0.0; self.m];
        self.apply_into(v, &mut out)?;
        Ok(out)
    }

    /// `Delta_{a,h} v`.
    pub fn variable_laplacian_apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if self.kind != OperatorKind::VariableCoefficient {
            return Err(Error::InvalidParameter("expected a variable-coefficient operator"));
        }
        let mut out = vec![0.0; self.m];
        self.apply_into(v, &mut out)?;
        Ok(out)
    }

    /// `out = (I - tau^2/2 A) v`.
    pub fn l_apply_into(&self, tau: f64, v: &[f64], out: &mut [f64]) -> Result<()> {
        self.apply_into(v, out)?;
        let c = 0.5 * tau * tau;
        for (o, &x) in out.iter_mut().zip(v) {
            *o = x - c * *o;
        }
        Ok(())
    }

    pub fn l_apply(&self, tau: f64, v: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.m];
        self.l_apply_into(tau, v, &mut out)?;
        Ok(out)
    }
}

/// Arithmetic mean of `a` over the interior grid points.
pub fn mean_coefficient(mesh: &SpaceTimeMesh, a: impl Fn(&[f64]) -> f64) -> f64 {
    mesh.sample(a).iter().sum::<f64>() / mesh.m as f64
}

/// Coefficient of the constant-coefficient operator used to build the
/// preconditioner for `problem`: the constant itself, or the grid mean.
pub fn preconditioner_coefficient(mesh: &SpaceTimeMesh, problem: &WaveProblem) -> f64 {
    match &problem.coefficient {
        Coefficient::Constant(c) => *c,
        Coefficient::Variable(a) => mean_coefficient(mesh, a),
    }
}

/// The block lower-triangular Toeplitz operator
/// `T = tridiag_lower(L, -2I, L)` and the time reversal `Y`, applied
/// matrix-free.
#[derive(Debug, Clone)]
pub struct AllAtOnceOperator {
    mesh: SpaceTimeMesh,
    op: SpatialOperator,
}

impl AllAtOnceOperator {
    pub fn new(mesh: SpaceTimeMesh, op: SpatialOperator) -> Result<Self> {
        if op.m() != mesh.m {
            return Err(Error::DimensionMismatch {
                expected: mesh.m,
                found: op.m(),
            });
        }
        Ok(AllAtOnceOperator { mesh, op })
    }

    pub fn mesh(&self) -> &SpaceTimeMesh {
        &self.mesh
    }

    pub fn spatial(&self) -> &SpatialOperator {
        &self.op
    }

    fn check(&self, v: &SpaceTimeVector) -> Result<()> {
        if v.n() != self.mesh.n || v.m() != self.mesh.m {
            return Err(Error::DimensionMismatch {
                expected: self.mesh.dof(),
                found: v.len(),
            });
        }
        Ok(())
    }

    /// Block `k` of the result is `L v_k - 2 v_{k-1} + L v_{k-2}`.
    pub fn t_apply(&self, v: &SpaceTimeVector) -> Result<SpaceTimeVector> {
        self.check(v)?;
        let (n, m) = (self.mesh.n, self.mesh.m);
        let mut lv = SpaceTimeVector::zeros(n, m);
        for (src, dst) in v.blocks().zip(lv.blocks_mut()) {
            self.op.l_apply_into(self.mesh.tau, src, dst)?;
        }
        let mut out = lv.clone();
        for k in 1..n {
            let prev = v.block(k - 1);
            for (o, &x) in out.block_mut(k).iter_mut().zip(prev) {
                *o -= 2.0 * x;
            }
        }
        for k in 2..n {
            for (o, &x) in out.block_mut(k).iter_mut().zip(lv.block(k - 2)) {
                *o += x;
            }
        }
        Ok(out)
    }

    /// `Y T v`, the symmetric form of the all-at-once operator.
    pub fn yt_apply(&self, v: &SpaceTimeVector) -> Result<SpaceTimeVector> {
        Ok(y_apply(&self.t_apply(v)?))
    }
}

/// Reverses the order of the time blocks.
pub fn y_apply<T: Copy + Default>(v: &SpaceTimeVector<T>) -> SpaceTimeVector<T> {
    let (n, m) = (v.n(), v.m());
    let mut out = SpaceTimeVector::zeros(n, m);
    for (k, block) in v.blocks().enumerate() {
        out.block_mut(n - 1 - k).copy_from_slice(block);
    }
    out
}

/// Right-hand side of the all-at-once system:
/// `tau^2 [f0/2 + Psi1/tau + Psi0/tau^2; f1 - L Psi0/tau^2; f2; ..; f_{n-1}]`
/// with `f_k = f(., k tau)` and `L` built from the problem's own operator.
pub fn assemble_rhs(mesh: &SpaceTimeMesh, problem: &WaveProblem) -> Result<SpaceTimeVector> {
    let op = SpatialOperator::for_problem(mesh, problem)?;
    assemble_rhs_with(mesh, problem, &op)
}

pub fn assemble_rhs_with(mesh: &SpaceTimeMesh, problem: &WaveProblem, op: &SpatialOperator) -> Result<SpaceTimeVector> {
    if mesh.n < 2 {
        return Err(Error::InvalidParameter("the right-hand side needs at least two time steps"));
    }
    let (n, m, tau) = (mesh.n, mesh.m, mesh.tau);
    let tau2 = tau * tau;
    let psi0 = mesh.sample(&problem.initial_value);
    let psi1 = mesh.sample(&problem.initial_velocity);
    let source_at = |k: usize| mesh.sample(|x| (problem.source)(x, k as f64 * tau));
    let mut rhs = SpaceTimeVector::zeros(n, m);

    let f0 = source_at(0);
    for (p, r) in rhs.block_mut(0).iter_mut().enumerate() {
        *r = 0.5 * tau2 * f0[p] + tau * psi1[p] + psi0[p];
    }
    let f1 = source_at(1);
    let lpsi0 = op.l_apply(tau, &psi0)?;
    for (p, r) in rhs.block_mut(1).iter_mut().enumerate() {
        *r = tau2 * f1[p] - lpsi0[p];
    }
    for k in 2..n {
        let fk = source_at(k);
        for (r, f) in rhs.block_mut(k).iter_mut().zip(fk) {
            *r = tau2 * f;
        }
    }
    Ok(rhs)
}

/// `max_k h^{d/2} || u_k - u(G_h, k tau) ||_2`, `k = 1..n`.
pub fn error_metric(mesh: &SpaceTimeMesh, problem: &WaveProblem, u: &SpaceTimeVector) -> Result<f64> {
    let exact = problem.exact.as_ref().ok_or(Error::MissingExactSolution)?;
    if u.n() != mesh.n || u.m() != mesh.m {
        return Err(Error::DimensionMismatch {
            expected: mesh.dof(),
            found: u.len(),
        });
    }
    let weight = mesh.h.powf(0.5 * mesh.d as f64);
    let mut worst = 0.0f64;
    for (k, block) in u.blocks().enumerate() {
        let t = (k + 1) as f64 * mesh.tau;
        let diff: Vec<f64> = mesh
            .sample(|x| exact(x, t))
            .iter()
            .zip(block)
            .map(|(e, v)| v - e)
            .collect();
        worst = worst.max(weight * norm2(&diff));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems;
    use crate::testutil::random_real;
    use core::f64::consts::PI;

    fn dense_of(op: &SpatialOperator) -> Vec<Vec<f64>> {
        let m = op.m();
        let mut cols = Vec::new();
        for j in 0..m {
            let mut e = vec![0.0; m];
            e[j] = 1.0;
            let mut out = vec![0.0; m];
            op.apply_into(&e, &mut out).unwrap();
            cols.push(out);
        }
        (0..m).map(|i| (0..m).map(|j| cols[j][i]).collect()).collect()
    }

    #[test]
    fn mesh_dof_convention() {
        let mesh = SpaceTimeMesh::from_exponents(2, 4, 4, 1.0).unwrap();
        assert_eq!((mesh.n, mesh.m1, mesh.m, mesh.dof()), (16, 15, 225, 3600));
        assert!((mesh.tau * mesh.n as f64 - 1.0).abs() < 1e-15);
        assert!((mesh.h * (mesh.m1 + 1) as f64 - 1.0).abs() < 1e-15);
        assert!(SpaceTimeMesh::from_exponents(2, 1, 2, 0.3).is_err());
    }

    #[test]
    fn laplacian_stencil_1d() {
        let mesh = SpaceTimeMesh::new(1, 3, 2, 1.0).unwrap();
        let op = SpatialOperator::laplacian(&mesh);
        assert_eq!(op.laplacian_apply(&[0.0, 1.0, 0.0]).unwrap(), vec![16.0, -32.0, 16.0]);
        assert_eq!(op.laplacian_apply(&[0.0; 3]).unwrap(), vec![0.0; 3]);
        assert!(op.laplacian_apply(&[0.0; 4]).is_err());
        assert!(op.variable_laplacian_apply(&[0.0; 3]).is_err());
    }

    #[test]
    fn laplacian_sine_modes_are_eigenvectors() {
        for d in [1usize, 2] {
            let mesh = SpaceTimeMesh::new(d, 7, 2, 1.0).unwrap();
            let op = SpatialOperator::laplacian(&mesh);
            let h = mesh.h;
            for k in 1..=mesh.m1 {
                let mode = |x: &[f64]| x.iter().map(|xi| (k as f64 * PI * xi).sin()).product::<f64>();
                let v = mesh.sample(mode);
                let lam = d as f64 * -(4.0 / (h * h)) * (k as f64 * PI * h / 2.0).sin().powi(2);
                let out = op.laplacian_apply(&v).unwrap();
                for (a, b) in out.iter().zip(&v) {
                    assert!((a - lam * b).abs() < 1e-12 * lam.abs());
                }
            }
        }
    }

    #[test]
    fn variable_operator_degenerates_to_constant() {
        let mesh = SpaceTimeMesh::new(2, 5, 2, 1.0).unwrap();
        let lap = SpatialOperator::laplacian(&mesh);
        let one = SpatialOperator::variable(&mesh, |_| 1.0).unwrap();
        let three = SpatialOperator::variable(&mesh, |_| 3.0).unwrap();
        let v = random_real(mesh.m, 4);
        let base = lap.laplacian_apply(&v).unwrap();
        assert_eq!(one.variable_laplacian_apply(&v).unwrap(), base);
        for (a, b) in three.variable_laplacian_apply(&v).unwrap().iter().zip(&base) {
            assert!((a - 3.0 * b).abs() <= 1e-13 * b.abs().max(1.0) * 3.0);
        }
    }

    #[test]
    fn variable_operator_matches_hand_assembly() {
        // h = 1/3; faces at 1/6, 1/2, 5/6 give a = 7/6, 3/2, 11/6.
        let mesh = SpaceTimeMesh::new(1, 2, 2, 1.0).unwrap();
        let op = SpatialOperator::variable(&mesh, |x| 1.0 + x[0]).unwrap();
        let dense = dense_of(&op);
        let expect = [[-24.0, 13.5], [13.5, -30.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((dense[i][j] - expect[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn variable_operator_rejects_nonpositive() {
        let mesh = SpaceTimeMesh::new(1, 3, 2, 1.0).unwrap();
        assert!(matches!(
            SpatialOperator::variable(&mesh, |x| x[0] - 0.5),
            Err(Error::NonPositiveCoefficient { .. })
        ));
    }

    #[test]
    fn operators_are_symmetric_negative_definite() {
        let mesh = SpaceTimeMesh::new(2, 6, 2, 1.0).unwrap();
        let ops = [
            SpatialOperator::laplacian(&mesh),
            SpatialOperator::mean(&mesh, 2.5).unwrap(),
            SpatialOperator::variable(&mesh, |x| (30.0 + x[0].sin().powi(2)) * (30.0 + x[1].sin().powi(2))).unwrap(),
        ];
        for op in &ops {
            for seed in 0..5 {
                let v = random_real(mesh.m, seed);
                let w = random_real(mesh.m, 100 + seed);
                let mut av = vec![0.0; mesh.m];
                let mut aw = vec![0.0; mesh.m];
                op.apply_into(&v, &mut av).unwrap();
                op.apply_into(&w, &mut aw).unwrap();
                let (x, y) = (crate::vector::dot(&av, &w), crate::vector::dot(&v, &aw));
                assert!((x - y).abs() <= 1e-12 * x.abs().max(y.abs()));
                assert!(crate::vector::dot(&av, &v) < 0.0);
            }
        }
    }

    #[test]
    fn l_apply_examples() {
        let mesh = SpaceTimeMesh::new(1, 1, 4, 1.0).unwrap();
        let op = SpatialOperator::laplacian(&mesh);
        assert_eq!(op.laplacian_apply(&[1.0]).unwrap(), vec![-8.0]);
        assert!((op.l_apply(0.25, &[2.0]).unwrap()[0] - 2.5).abs() < 1e-15);
        let mesh = SpaceTimeMesh::new(2, 5, 4, 1.0).unwrap();
        let op = SpatialOperator::laplacian(&mesh);
        let v = random_real(mesh.m, 1);
        assert_eq!(op.l_apply(0.0, &v).unwrap(), v);
        let lv = op.l_apply(0.1, &v).unwrap();
        let rq = crate::vector::dot(&lv, &v) / crate::vector::dot(&v, &v);
        assert!(rq > 1.0);
    }

    fn dense_t(mesh: &SpaceTimeMesh, op: &SpatialOperator) -> Vec<Vec<f64>> {
        let (n, m) = (mesh.n, mesh.m);
        let a = dense_of(op);
        let c = 0.5 * mesh.tau * mesh.tau;
        let l: Vec<Vec<f64>> = (0..m)
            .map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 } - c * a[i][j]).collect())
            .collect();
        let mut t = vec![vec![0.0; n * m]; n * m];
        for bi in 0..n {
            for i in 0..m {
                for j in 0..m {
                    t[bi * m + i][bi * m + j] = l[i][j];
                    if bi >= 2 {
                        t[bi * m + i][(bi - 2) * m + j] = l[i][j];
                    }
                }
                if bi >= 1 {
                    t[bi * m + i][(bi - 1) * m + i] = -2.0;
                }
            }
        }
        t
    }

    #[test]
    fn t_apply_structure_and_dense_oracle() {
        let mesh = SpaceTimeMesh::new(1, 3, 4, 1.0).unwrap();
        let op = SpatialOperator::laplacian(&mesh);
        let aao = AllAtOnceOperator::new(mesh, op.clone()).unwrap();
        let t = dense_t(&mesh, &op);
        for seed in 0..5 {
            let v = random_real(mesh.dof(), seed);
            let sv = SpaceTimeVector::from_vec(4, 3, v.clone()).unwrap();
            let out = aao.t_apply(&sv).unwrap();
            for i in 0..mesh.dof() {
                let e: f64 = t[i].iter().zip(&v).map(|(a, b)| a * b).sum();
                assert!((out[i] - e).abs() < 1e-13 * e.abs().max(1.0));
            }
        }
        // n = 1 and n = 3 structure
        let mesh1 = SpaceTimeMesh::new(1, 3, 1, 1.0).unwrap();
        let aao1 = AllAtOnceOperator::new(mesh1, SpatialOperator::laplacian(&mesh1)).unwrap();
        let v = SpaceTimeVector::from_vec(1, 3, vec![1.0, 2.0, 3.0]).unwrap();
        let lv = SpatialOperator::laplacian(&mesh1).l_apply(mesh1.tau, v.as_slice()).unwrap();
        assert_eq!(aao1.t_apply(&v).unwrap().as_slice(), &lv[..]);

        let mesh3 = SpaceTimeMesh::new(1, 2, 3, 1.0).unwrap();
        let op3 = SpatialOperator::laplacian(&mesh3);
        let aao3 = AllAtOnceOperator::new(mesh3, op3.clone()).unwrap();
        let v = SpaceTimeVector::from_vec(3, 2, random_real(6, 3)).unwrap();
        let out = aao3.t_apply(&v).unwrap();
        let l = |b: &[f64]| op3.l_apply(mesh3.tau, b).unwrap();
        let (l1, l2, l3) = (l(v.block(0)), l(v.block(1)), l(v.block(2)));
        for p in 0..2 {
            assert!((out.block(0)[p] - l1[p]).abs() < 1e-14);
            assert!((out.block(1)[p] - (-2.0 * v.block(0)[p] + l2[p])).abs() < 1e-13);
            assert!((out.block(2)[p] - (l1[p] - 2.0 * v.block(1)[p] + l3[p])).abs() < 1e-13);
        }
    }

    #[test]
    fn t_apply_rejects_mismatch() {
        let mesh = SpaceTimeMesh::new(1, 3, 4, 1.0).unwrap();
        let aao = AllAtOnceOperator::new(mesh, SpatialOperator::laplacian(&mesh)).unwrap();
        assert!(aao.t_apply(&SpaceTimeVector::zeros(3, 3)).is_err());
    }

    #[test]
    fn y_apply_reverses_blocks() {
        let v = SpaceTimeVector::from_vec(3, 2, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let y = y_apply(&v);
        assert_eq!(y.as_slice(), &[5.0, 6.0, 3.0, 4.0, 1.0, 2.0]);
        assert_eq!(y_apply(&y), v);
        assert_eq!(y.norm(), v.norm());
        let one = SpaceTimeVector::from_vec(1, 2, vec![1.0, 2.0]).unwrap();
        assert_eq!(y_apply(&one), one);
    }

    #[test]
    fn yt_is_symmetric() {
        let mesh = SpaceTimeMesh::new(2, 4, 6, 1.0).unwrap();
        let op = SpatialOperator::variable(&mesh, |x| 1.0 + x[0] * x[1]).unwrap();
        let aao = AllAtOnceOperator::new(mesh, op).unwrap();
        for seed in 0..5 {
            let v = SpaceTimeVector::from_vec(6, 16, random_real(96, seed)).unwrap();
            let w = SpaceTimeVector::from_vec(6, 16, random_real(96, 50 + seed)).unwrap();
            let a = aao.yt_apply(&v).unwrap().dot(&w);
            let b = v.dot(&aao.yt_apply(&w).unwrap());
            assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()));
        }
    }

    #[test]
    fn rhs_homogeneous_and_isolated_terms() {
        let mesh = SpaceTimeMesh::new(2, 3, 4, 1.0).unwrap();
        let zero = problems::homogeneous();
        let rhs = assemble_rhs(&mesh, &zero).unwrap();
        assert!(rhs.as_slice().iter().all(|&x| x == 0.0));

        let mut p = problems::homogeneous();
        p.initial_velocity = Box::new(|x: &[f64]| x[0] + 2.0 * x[1]);
        let rhs = assemble_rhs(&mesh, &p).unwrap();
        let psi1 = mesh.sample(|x| x[0] + 2.0 * x[1]);
        for (a, b) in rhs.block(0).iter().zip(&psi1) {
            assert!((a - mesh.tau * b).abs() < 1e-15);
        }
        assert!(rhs.as_slice()[mesh.m..].iter().all(|&x| x == 0.0));

        let short = SpaceTimeMesh::new(2, 3, 1, 1.0).unwrap();
        assert!(assemble_rhs(&short, &zero).is_err());
    }

    #[test]
    fn error_metric_definition() {
        let mesh = SpaceTimeMesh::new(2, 3, 2, 1.0).unwrap();
        let p = problems::example1();
        let exact = p.exact.as_ref().unwrap();
        let mut u = SpaceTimeVector::zeros(2, mesh.m);
        for k in 0..2 {
            let vals = mesh.sample(|x| exact(x, (k + 1) as f64 * mesh.tau));
            u.block_mut(k).copy_from_slice(&vals);
        }
        assert!(error_metric(&mesh, &p, &u).unwrap() < 1e-16);
        u.block_mut(1)[4] += 0.3;
        let e = error_metric(&mesh, &p, &u).unwrap();
        assert!((e - mesh.h * 0.3).abs() < 1e-15);
        let mut no_exact = problems::homogeneous();
        no_exact.exact = None;
        assert_eq!(error_metric(&mesh, &no_exact, &u), Err(Error::MissingExactSolution));
    }
}
