//! Dense reference computations for small meshes.
//!
//! Everything here is built from the block definitions directly (no fast
//! transforms), so it can certify the fast preconditioner and the spectral
//! statements behind it: the eigenvalues of `C_alpha`, realness of its
//! principal square root, orthogonality of
//! `Q = P^{-1/2} Y C P^{-1/2}`, the norm of `R = C - T`, the constants
//! `c0 = sup ||s(C_alpha)^{-1}||_2^2` and `c1 = c0 (sqrt(||L||^2+1)+1)`, and
//! the clustering of `sigma(P^{-1} Y T)` around `+-1`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::discretization::{OperatorKind, SpaceTimeMesh, SpatialOperator};
use crate::error::{Error, Result};
#[cfg(not(any(feature = "std", test)))]
use num_traits::Float;

/// Dense complex matrix.
pub type DenseMatrix = DMatrix<Complex64>;

/// Largest `n * m` the dense routines accept.
pub const SIZE_GUARD: usize = 4096;

/// Points on the logarithmic alpha-grid used to estimate `c0`.
pub const C0_GRID_POINTS: usize = 25;
/// Smallest alpha on that grid; the largest is 1/2.
pub const C0_GRID_MIN: f64 = 1e-10;


fn guard(mesh: &SpaceTimeMesh) -> Result<()> {
    let size = mesh.dof();
    if size > SIZE_GUARD {
        return Err(Error::SizeGuard { size, limit: SIZE_GUARD });
    }
    Ok(())
}

fn to_complex(a: &DMatrix<f64>) -> DenseMatrix {
    a.map(|x| Complex64::new(x, 0.0))
}

fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    DMatrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

fn second_difference(m1: usize) -> DMatrix<f64> {
    DMatrix::from_fn(m1, m1, |i, j| match i.abs_diff(j) {
        0 => -2.0,
        1 => 1.0,
        _ => 0.0,
    })
}

/// Dense spatial operator. Constant kinds are assembled as the Kronecker sum
/// of 1-D second differences; the variable kind column by column.
pub fn dense_spatial(mesh: &SpaceTimeMesh, op: &SpatialOperator) -> Result<DMatrix<f64>> {
    if op.m() != mesh.m {
        return Err(Error::DimensionMismatch { expected: mesh.m, found: op.m() });
    }
    let m = mesh.m;
    match (op.kind(), op.scale()) {
        (OperatorKind::VariableCoefficient, _) | (_, None) => {
            let mut a = DMatrix::zeros(m, m);
            let mut e = vec![0.0; m];
            let mut col = vec![0.0; m];
            for j in 0..m {
                e[j] = 1.0;
                op.apply_into(&e, &mut col)?;
                e[j] = 0.0;
                a.set_column(j, &DVector::from_column_slice(&col));
            }
            Ok(a)
        }
        (_, Some(c)) => {
            let k = second_difference(mesh.m1);
            let eye = DMatrix::<f64>::identity(mesh.m1, mesh.m1);
            let mut sum = DMatrix::zeros(m, m);
            for axis in 0..mesh.d {
                let mut term = DMatrix::<f64>::identity(1, 1);
                // first coordinate fastest: the axis-0 factor is the innermost
                for other in (0..mesh.d).rev() {
                    term = kron(&term, if other == axis { &k } else { &eye });
                }
                sum += term;
            }
            Ok(sum * (c / (mesh.h * mesh.h)))
        }
    }
}

/// `L = I - (tau^2/2) A`.
pub fn dense_l(mesh: &SpaceTimeMesh, op: &SpatialOperator) -> Result<DMatrix<f64>> {
    let a = dense_spatial(mesh, op)?;
    Ok(DMatrix::identity(mesh.m, mesh.m) - a * (0.5 * mesh.tau * mesh.tau))
}

/// `B2` of the alpha-circulant splitting: unit subdiagonal and `alpha` in the
/// top-right corner.
fn b2(n: usize, alpha: f64) -> DMatrix<f64> {
    let mut b = DMatrix::zeros(n, n);
    for i in 1..n {
        b[(i, i - 1)] = 1.0;
    }
    b[(0, n - 1)] += alpha;
    b
}

/// `C_alpha = (I + B2^2) (x) L + B2 (x) (-2 I)`; `alpha = 0` gives `T`.
pub fn dense_c_alpha(mesh: &SpaceTimeMesh, op: &SpatialOperator, alpha: f64) -> Result<DMatrix<f64>> {
    guard(mesh)?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter("alpha must lie in [0, 1]"));
    }
    let n = mesh.n;
    let l = dense_l(mesh, op)?;
    let shift = b2(n, alpha);
    let b1 = DMatrix::identity(n, n) + &shift * &shift;
    Ok(kron(&b1, &l) + kron(&shift, &DMatrix::identity(mesh.m, mesh.m)) * -2.0)
}

pub fn dense_t(mesh: &SpaceTimeMesh, op: &SpatialOperator) -> Result<DMatrix<f64>> {
    dense_c_alpha(mesh, op, 0.0)
}

pub fn dense_y(mesh: &SpaceTimeMesh) -> Result<DMatrix<f64>> {
    guard(mesh)?;
    let (n, m) = (mesh.n, mesh.m);
    let yn = DMatrix::from_fn(n, n, |i, j| if i + j == n - 1 { 1.0 } else { 0.0 });
    Ok(kron(&yn, &DMatrix::identity(m, m)))
}

fn schur(a: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    crate::schur::schur(a)
}

/// Eigenvalues of a general complex matrix (diagonal of its Schur form).
pub fn eigenvalues(a: &DenseMatrix) -> Result<Vec<Complex64>> {
    let (_, t) = schur(a)?;
    Ok(t.diagonal().iter().copied().collect())
}

pub fn real_eigenvalues_of(a: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    eigenvalues(&to_complex(a))
}

/// Principal square root by the Schur method: `A = Q T Q^*`, then the upper
/// triangular `R` with `R^2 = T` and `Re(R_ii) > 0` by column recurrence.
pub fn dense_principal_sqrt(a: &DenseMatrix) -> Result<DenseMatrix> {
    let k = a.nrows();
    if k != a.ncols() {
        return Err(Error::DimensionMismatch { expected: k, found: a.ncols() });
    }
    let scale = a.norm().max(f64::MIN_POSITIVE);
    let (q, t) = schur(a)?;
    for i in 0..k {
        let z = t[(i, i)];
        if z.im.abs() <= 1e-14 * scale && z.re <= 1e-14 * scale {
            return Err(Error::BranchCut { re: z.re, im: z.im });
        }
    }
    let mut r = DenseMatrix::zeros(k, k);
    for j in 0..k {
        r[(j, j)] = crate::preconditioner::principal_sqrt(t[(j, j)]);
        for i in (0..j).rev() {
            let mut s = t[(i, j)];
            for l in i + 1..j {
                s -= r[(i, l)] * r[(l, j)];
            }
            r[(i, j)] = s / (r[(i, i)] + r[(j, j)]);
        }
    }
    let b = &q * r * q.adjoint();
    let residual = (&b * &b - a).norm();
    if residual > 1e-9 * scale {
        return Err(Error::NotConverged("principal square root residual check"));
    }
    Ok(b)
}

/// Principal square root of a real matrix: the real part of the result and
/// the largest discarded imaginary entry.
pub fn real_principal_sqrt(a: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    let b = dense_principal_sqrt(&to_complex(a))?;
    let max_imag = b.iter().fold(0.0f64, |acc, z| acc.max(z.im.abs()));
    Ok((b.map(|z| z.re), max_imag))
}

fn inverse(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    a.clone().try_inverse().ok_or(Error::NotConverged("dense inverse"))
}

/// Largest imaginary entry of the computed `s(C_alpha)` and the relative
/// residual `||Re(s)^2 - C||_F / ||C||_F`.
pub fn sqrt_check(mesh: &SpaceTimeMesh, op: &SpatialOperator, alpha: f64) -> Result<(f64, f64)> {
    let c = dense_c_alpha(mesh, op, alpha)?;
    let (s, max_imag) = real_principal_sqrt(&c)?;
    Ok((max_imag, (&s * &s - &c).norm() / c.norm()))
}

/// `(s(C)^T s(C))^{-1}` for `C = C_alpha`, plus `s(C)` and its realness residue.
pub struct DensePreconditioner {
    pub sqrt: DMatrix<f64>,
    pub sqrt_max_imag: f64,
    pub sqrt_inv: DMatrix<f64>,
    pub p_inv: DMatrix<f64>,
}

impl DensePreconditioner {
    pub fn from_matrix(c: &DMatrix<f64>) -> Result<Self> {
        let (sqrt, sqrt_max_imag) = real_principal_sqrt(c)?;
        let sqrt_inv = inverse(&sqrt)?;
        let p_inv = &sqrt_inv * sqrt_inv.transpose();
        Ok(DensePreconditioner { sqrt, sqrt_max_imag, sqrt_inv, p_inv })
    }

    pub fn abac(mesh: &SpaceTimeMesh, op: &SpatialOperator, alpha: f64) -> Result<Self> {
        Self::from_matrix(&dense_c_alpha(mesh, op, alpha)?)
    }

    /// The ideal preconditioner `s(T)^T s(T)`.
    pub fn ideal(mesh: &SpaceTimeMesh, op: &SpatialOperator) -> Result<Self> {
        Self::from_matrix(&dense_t(mesh, op)?)
    }

    pub fn apply_p_inv(&self, y: &[f64]) -> Vec<f64> {
        (&self.p_inv * DVector::from_column_slice(y)).as_slice().to_vec()
    }
}

/// Symmetric inverse square root of an SPD matrix.
fn spd_inv_sqrt(p_inv: &DMatrix<f64>) -> DMatrix<f64> {
    // P^{-1/2} = sqrt(P^{-1}); symmetrize first to kill roundoff asymmetry.
    let sym = (p_inv + p_inv.transpose()) * 0.5;
    let eig = nalgebra::linalg::SymmetricEigen::new(sym);
    let d = eig.eigenvalues.map(|x| x.max(0.0).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.transpose()
}

fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

fn spectral_norm(a: &DMatrix<f64>) -> f64 {
    a.clone().singular_values().max()
}

/// Diagnostics for `Q_alpha = P^{-1/2} Y C_alpha P^{-1/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QAlphaReport {
    /// `||Q^T Q - I||_max`
    pub orthogonality: f64,
    /// `||Q - Q^T||_max`
    pub symmetry: f64,
    /// Largest imaginary entry of the computed `s(C_alpha)`, the only source
    /// of a complex part in `Q`.
    pub imaginary: f64,
    /// Largest distance of an eigenvalue of `Q` from `{-1, +1}`.
    pub eigen_distance: f64,
}

impl QAlphaReport {
    pub fn worst(&self) -> f64 {
        self.orthogonality.max(self.symmetry).max(self.imaginary)
    }
}

pub fn q_alpha_report(mesh: &SpaceTimeMesh, op: &SpatialOperator, alpha: f64) -> Result<QAlphaReport> {
    let c = dense_c_alpha(mesh, op, alpha)?;
    let pre = DensePreconditioner::from_matrix(&c)?;
    let half = spd_inv_sqrt(&pre.p_inv);
    let y = dense_y(mesh)?;
    let q = &half * y * c * &half;
    let k = q.nrows();
    let orthogonality = max_abs(&(q.transpose() * &q - DMatrix::identity(k, k)));
    let symmetry = max_abs(&(&q - q.transpose()));
    let qs = (&q + q.transpose()) * 0.5;
    let eigen_distance = nalgebra::linalg::SymmetricEigen::new(qs)
        .eigenvalues
        .iter()
        .map(|&l| (l.abs() - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(QAlphaReport {
        orthogonality,
        symmetry,
        imaginary: pre.sqrt_max_imag,
        eigen_distance,
    })
}

/// `max(||Q^T Q - I||_max, ||Q - Q^T||_max, max |Im Q|)`.
pub fn check_q_alpha(mesh: &SpaceTimeMesh, op: &SpatialOperator, alpha: f64) -> Result<f64> {
    Ok(q_alpha_report(mesh, op, alpha)?.worst())
}

/// `||L||_2`, the largest eigenvalue of the SPD matrix `L`.
pub fn l_norm(mesh: &SpaceTimeMesh, op: &SpatialOperator) -> Result<f64> {
    let l = dense_l(mesh, op)?;
    Ok(nalgebra::linalg::SymmetricEigen::new(l).eigenvalues.max())
}

/// `||R_alpha||_2` for `R_alpha = C_alpha - T`, computed by SVD.
pub fn r_norm(mesh: &SpaceTimeMesh, op: &SpatialOperator, alpha: f64) -> Result<f64> {
    let r = dense_c_alpha(mesh, op, alpha)? - dense_t(mesh, op)?;
    Ok(spectral_norm(&r))
}

/// `|| ||R_alpha||_2 - alpha (sqrt(||L||_2^2 + 1) + 1) |`. The closed form
/// needs `n >= 3`: for `n = 2` the corner blocks overlap.
pub fn check_r_norm(mesh: &SpaceTimeMesh, op: &SpatialOperator, alpha: f64) -> Result<f64> {
    if mesh.n < 3 {
        return Err(Error::InvalidParameter("the R_alpha norm formula needs n >= 3"));
    }
    let predicted = alpha * ((l_norm(mesh, op)?.powi(2) + 1.0).sqrt() + 1.0);
    Ok((r_norm(mesh, op, alpha)? - predicted).abs())
}

/// Logarithmic alpha-grid on `[C0_GRID_MIN, 1/2]`.
pub fn c0_alpha_grid() -> Vec<f64> {
    let (lo, hi) = (C0_GRID_MIN.ln(), 0.5f64.ln());
    (0..C0_GRID_POINTS)
        .map(|i| (lo + (hi - lo) * i as f64 / (C0_GRID_POINTS - 1) as f64).exp())
        .collect()
}

/// `||s(C_alpha)^{-1}||_2^2`.
pub fn inv_sqrt_norm_sq(mesh: &SpaceTimeMesh, op: &SpatialOperator, alpha: f64) -> Result<f64> {
    let pre = DensePreconditioner::abac(mesh, op, alpha)?;
    Ok(spectral_norm(&pre.sqrt_inv).powi(2))
}

/// `(c0, c1)`. `c0` is the maximum over [`c0_alpha_grid`], a lower bound of
/// the true supremum over `(0, 1/2]`.
pub fn compute_constants(mesh: &SpaceTimeMesh, op: &SpatialOperator) -> Result<(f64, f64)> {
    guard(mesh)?;
    let mut c0 = 0.0f64;
    for alpha in c0_alpha_grid() {
        c0 = c0.max(inv_sqrt_norm_sq(mesh, op, alpha)?);
    }
    let c1 = c0 * ((l_norm(mesh, op)?.powi(2) + 1.0).sqrt() + 1.0);
    Ok((c0, c1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    pub alpha: f64,
    pub eigenvalues: Vec<Complex64>,
    /// `||E_alpha||_2` with `E = P^{-1/2} Y R_alpha P^{-1/2}`.
    pub norm_e_alpha: f64,
    pub c0: f64,
    pub c1: f64,
    /// `max(0, max_i dist(mu_i, {-1, 1}) - c1 alpha)`
    pub interval_violation: f64,
    pub max_imag: f64,
}

fn distance_to_unit_pair(z: Complex64) -> f64 {
    (z - Complex64::new(1.0, 0.0)).norm().min((z + Complex64::new(1.0, 0.0)).norm())
}

fn spectrum_of(pre: &DensePreconditioner, mesh: &SpaceTimeMesh, op: &SpatialOperator) -> Result<Vec<Complex64>> {
    let yt = dense_y(mesh)? * dense_t(mesh, op)?;
    real_eigenvalues_of(&(&pre.p_inv * yt))
}

/// Dense spectrum of `P_alpha^{-1} Y T` against the `[+-1 - c1 alpha, +-1 + c1 alpha]`
/// enclosure. Pass `constants` to reuse `(c0, c1)`.
pub fn preconditioned_spectrum(
    mesh: &SpaceTimeMesh,
    op: &SpatialOperator,
    alpha: f64,
    constants: Option<(f64, f64)>,
) -> Result<SpectralReport> {
    let (c0, c1) = match constants {
        Some(c) => c,
        None => compute_constants(mesh, op)?,
    };
    let c = dense_c_alpha(mesh, op, alpha)?;
    let pre = DensePreconditioner::from_matrix(&c)?;
    let eigenvalues = spectrum_of(&pre, mesh, op)?;
    let half = spd_inv_sqrt(&pre.p_inv);
    let r = c - dense_t(mesh, op)?;
    let e = &half * dense_y(mesh)? * r * &half;
    let norm_e_alpha = spectral_norm(&e);
    Ok(summarize(alpha, eigenvalues, norm_e_alpha, c0, c1))
}

fn summarize(alpha: f64, eigenvalues: Vec<Complex64>, norm_e_alpha: f64, c0: f64, c1: f64) -> SpectralReport {
    let worst = eigenvalues.iter().map(|&z| distance_to_unit_pair(z)).fold(0.0, f64::max);
    let max_imag = eigenvalues.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    SpectralReport {
        alpha,
        eigenvalues,
        norm_e_alpha,
        c0,
        c1,
        interval_violation: (worst - c1 * alpha).max(0.0),
        max_imag,
    }
}

/// Spectrum of `(s(T)^T s(T))^{-1} Y T`, which is exactly `{-1, +1}`; the
/// violation is the distance from that pair.
pub fn ideal_spectrum(mesh: &SpaceTimeMesh, op: &SpatialOperator) -> Result<SpectralReport> {
    let pre = DensePreconditioner::ideal(mesh, op)?;
    let eigenvalues = spectrum_of(&pre, mesh, op)?;
    Ok(summarize(0.0, eigenvalues, 0.0, 0.0, 0.0))
}

/// `mu = lambda lambda1_k + lambda2_k` written out in real and imaginary
/// parts with `omega_k = 2 pi (k-1)/n`, `k` 1-based.
pub fn appendix_eigenvalue_formula(alpha: f64, lambda: f64, k: usize, n: usize) -> Result<Complex64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter("alpha must lie in (0, 1)"));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidParameter("k must lie in 1..=n"));
    }
    let r = alpha.powf(1.0 / n as f64);
    let omega = 2.0 * core::f64::consts::PI * (k - 1) as f64 / n as f64;
    let (s, c) = omega.sin_cos();
    let common = lambda * r * c - 1.0;
    Ok(Complex64::new(lambda * (1.0 - r * r) + 2.0 * r * c * common, 2.0 * r * s * common))
}

/// Largest distance between two eigenvalue multisets, pairing each entry of
/// `a` with its nearest unused entry of `b`.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut sorted: Vec<Complex64> = a.to_vec();
    sort_eigenvalues(&mut sorted);
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for z in sorted {
        let mut best = (f64::INFINITY, usize::MAX);
        for (i, w) in b.iter().enumerate() {
            if !used[i] {
                let d = (z - w).norm();
                if d < best.0 {
                    best = (d, i);
                }
            }
        }
        used[best.1] = true;
        worst = worst.max(best.0);
    }
    worst
}

/// Lexicographic `(Re, Im)` order, ties broken by magnitude.
pub fn sort_eigenvalues(v: &mut [Complex64]) {
    v.sort_by(|a, b| {
        a.re.total_cmp(&b.re)
            .then(a.im.total_cmp(&b.im))
            .then(a.norm().total_cmp(&b.norm()))
    });
}
