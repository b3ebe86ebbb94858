//! The absolute-value block alpha-circulant (ABAC) preconditioner
//! `P = s(C)^T s(C)` for the symmetrized all-at-once system.
//!
//! `C_alpha = B1 (x) L + B2 (x) (-2 I)` is block diagonalized by
//! `V = (F D_alpha) (x) U`:
//!
//! ```text
//! C_alpha = V^{-1} (Lambda_1 (x) Lambda + Lambda_2 (x) I) V
//! ```
//!
//! with `U` the tensor DST-I and `Lambda = diag(eig(L))`. The convention
//! `B_j = D^{-1} F^* Lambda_j F D` (positive-exponent `F`) is the one that
//! reproduces the dense `C_alpha`; the dense oracle pins it down. Hence
//!
//! * `s(C)^{-1} y = (D^{-1} F^* (x) U) G (F D (x) U) y`
//! * `(s(C)^{-1})^T y = (D F (x) U) G (F^* D^{-1} (x) U) y`
//!
//! with `G` the principal inverse square root of the fused diagonal, and
//! `P^{-1} y = s(C)^{-1} (s(C)^{-1})^T y`. Every application is
//! `O(mn log n)` for power-of-two `n`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::discretization::SpaceTimeMesh;
use crate::error::{Error, Result};
use crate::transforms::{scale_time_in_place, time_scaling, SineTransform, TimeDft};
use crate::vector::{ComplexSpaceTimeVector, SpaceTimeVector};
#[cfg(not(any(feature = "std", test)))]
use num_traits::Float;

/// Relative distance to the branch cut below which a symbol counts as singular.
pub const CUT_TOLERANCE: f64 = 1e-14;

/// Threshold factor for the imaginary residue of `P^{-1} y`.
pub const IMAGINARY_LEAK_FACTOR: f64 = 1e-8;

/// Default alpha used throughout the experiments.
pub const DEFAULT_ALPHA: f64 = 1e-6;

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter("alpha must lie in (0, 1]"))
    }
}

/// `lambda1_k = 1 + alpha^{2/n} theta^{2(k-1)}` and
/// `lambda2_k = -2 alpha^{1/n} theta^{k-1}`, `theta = exp(2 pi i / n)`.
pub fn time_symbols(alpha: f64, n: usize) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    check_alpha(alpha)?;
    if n < 2 {
        return Err(Error::InvalidParameter("need at least two time steps"));
    }
    let root = alpha.powf(1.0 / n as f64);
    let lambda1 = (0..n)
        .map(|k| {
            let phase = 2.0 * PI * ((2 * k) % n) as f64 / n as f64;
            Complex64::new(1.0, 0.0) + Complex64::from_polar(root * root, phase)
        })
        .collect();
    let lambda2 = (0..n)
        .map(|k| Complex64::from_polar(-2.0 * root, 2.0 * PI * k as f64 / n as f64))
        .collect();
    Ok((lambda1, lambda2))
}

/// Eigenvalues of `L = I - (tau^2/2) c Delta_h`, in the order produced by
/// the tensor DST:
/// `1 + (tau^2/2) c sum_i (4/h^2) sin^2(k_i pi h / 2)`.
pub fn spatial_eigenvalues(mesh: &SpaceTimeMesh, tau: f64, coefficient: f64) -> Result<Vec<f64>> {
    if !(coefficient > 0.0) {
        return Err(Error::NonPositiveCoefficient { value: coefficient });
    }
    let h = mesh.h;
    let modes: Vec<f64> = (1..=mesh.m1)
        .map(|k| 4.0 / (h * h) * (k as f64 * PI * h / 2.0).sin().powi(2))
        .collect();
    let c = 0.5 * tau * tau * coefficient;
    Ok((0..mesh.m)
        .map(|p| {
            let mut rest = p;
            let mut sum = 0.0;
            for _ in 0..mesh.d {
                sum += modes[rest % mesh.m1];
                rest /= mesh.m1;
            }
            1.0 + c * sum
        })
        .collect())
}

/// Principal square root with the branch cut on `(-inf, 0]`, computed in
/// half-angle form.
pub fn principal_sqrt(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    if z.re >= 0.0 {
        let a = (0.5 * (r + z.re)).sqrt();
        Complex64::new(a, z.im / (2.0 * a))
    } else {
        let b = (0.5 * (r - z.re)).sqrt().copysign(z.im);
        Complex64::new(z.im / (2.0 * b), b)
    }
}

/// Spectral data of `C_alpha` in the transformed basis.
#[derive(Debug, Clone)]
pub struct AlphaCirculantSpec {
    pub alpha: f64,
    pub n: usize,
    pub m: usize,
    pub lambda1: Vec<Complex64>,
    pub lambda2: Vec<Complex64>,
    pub spatial_eigs: Vec<f64>,
    /// `d_{k,j} = lambda1_k Lambda_j + lambda2_k`, stored at `k * m + j`.
    pub diag: Vec<Complex64>,
    /// `1 / s(d_{k,j})`.
    pub inv_sqrt_diag: Vec<Complex64>,
}

impl AlphaCirculantSpec {
    pub fn build(mesh: &SpaceTimeMesh, alpha: f64, tau: f64, coefficient: f64) -> Result<Self> {
        let spatial_eigs = spatial_eigenvalues(mesh, tau, coefficient)?;
        Self::from_parts(alpha, mesh.n, spatial_eigs)
    }

    /// Builds the spec from arbitrary eigenvalues of `L`.
    pub fn from_parts(alpha: f64, n: usize, spatial_eigs: Vec<f64>) -> Result<Self> {
        let (lambda1, lambda2) = time_symbols(alpha, n)?;
        let m = spatial_eigs.len();
        if m == 0 {
            return Err(Error::EmptyInput);
        }
        let mut diag = Vec::with_capacity(n * m);
        let mut inv_sqrt_diag = Vec::with_capacity(n * m);
        for k in 0..n {
            for (j, &lam) in spatial_eigs.iter().enumerate() {
                let d = lambda1[k] * lam + lambda2[k];
                let scale = lambda1[k].norm() * lam.abs() + lambda2[k].norm();
                if d.im.abs() <= CUT_TOLERANCE * scale && d.re <= CUT_TOLERANCE * scale {
                    return Err(Error::SingularSymbol { k, j, re: d.re, im: d.im });
                }
                diag.push(d);
                inv_sqrt_diag.push(principal_sqrt(d).inv());
            }
        }
        Ok(AlphaCirculantSpec {
            alpha,
            n,
            m,
            lambda1,
            lambda2,
            spatial_eigs,
            diag,
            inv_sqrt_diag,
        })
    }

    /// Negative-control hook: shifts one fused symbol (0-based indices) and
    /// recomputes its inverse square root.
    pub fn perturb_symbol(&mut self, k: usize, j: usize, delta: Complex64) {
        let idx = k * self.m + j;
        self.diag[idx] += delta;
        self.inv_sqrt_diag[idx] = principal_sqrt(self.diag[idx]).inv();
    }
}

/// `min(nu^2 / c1, 1/2)`: any alpha in `(0, eta]` gives the rate bound
/// `||r_k|| <= 2 nu^{k-1} ||r_0||`.
pub fn choose_alpha(nu: f64, c1: f64) -> Result<f64> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::InvalidParameter("nu must lie in (0, 1)"));
    }
    if !(c1 > 0.0) || !c1.is_finite() {
        return Err(Error::InvalidParameter("c1 must be positive"));
    }
    Ok((nu * nu / c1).min(0.5))
}

/// Fast application of the ABAC preconditioner and its square-root factors.
#[derive(Debug, Clone)]
pub struct AbacPreconditioner {
    spec: AlphaCirculantSpec,
    sine: SineTransform,
    dft: TimeDft,
    up: Vec<f64>,
    down: Vec<f64>,
}

impl AbacPreconditioner {
    pub fn new(mesh: &SpaceTimeMesh, alpha: f64, coefficient: f64) -> Result<Self> {
        let spec = AlphaCirculantSpec::build(mesh, alpha, mesh.tau, coefficient)?;
        Self::from_spec(spec, mesh.d)
    }

    pub fn from_spec(spec: AlphaCirculantSpec, d: usize) -> Result<Self> {
        let sine = SineTransform::new(spec.m, d)?;
        let dft = TimeDft::new(spec.n)?;
        let up = time_scaling(spec.alpha, spec.n, 1)?;
        let down = time_scaling(spec.alpha, spec.n, -1)?;
        Ok(AbacPreconditioner {
            spec,
            sine,
            dft,
            up,
            down,
        })
    }

    pub fn spec(&self) -> &AlphaCirculantSpec {
        &self.spec
    }

    fn check<T>(&self, y: &SpaceTimeVector<T>) -> Result<()> {
        if y.n() != self.spec.n || y.m() != self.spec.m {
            return Err(Error::DimensionMismatch {
                expected: self.spec.n * self.spec.m,
                found: y.len(),
            });
        }
        Ok(())
    }

    fn multiply_diag(&self, v: &mut ComplexSpaceTimeVector) {
        for (x, g) in v.as_mut_slice().iter_mut().zip(&self.spec.inv_sqrt_diag) {
            *x *= g;
        }
    }

    fn c_inv_sqrt_t_in_place(&self, v: &mut ComplexSpaceTimeVector) -> Result<()> {
        scale_time_in_place(v, &self.down);
        self.dft.apply(v, true)?;
        self.sine.apply(v)?;
        self.multiply_diag(v);
        self.sine.apply(v)?;
        self.dft.apply(v, false)?;
        scale_time_in_place(v, &self.up);
        Ok(())
    }

    fn c_inv_sqrt_in_place(&self, v: &mut ComplexSpaceTimeVector) -> Result<()> {
        scale_time_in_place(v, &self.up);
        self.dft.apply(v, false)?;
        self.sine.apply(v)?;
        self.multiply_diag(v);
        self.sine.apply(v)?;
        self.dft.apply(v, true)?;
        scale_time_in_place(v, &self.down);
        Ok(())
    }

    /// `(s(C_alpha)^{-1})^T y`.
    pub fn apply_c_inv_sqrt_t(&self, y: &ComplexSpaceTimeVector) -> Result<ComplexSpaceTimeVector> {
        self.check(y)?;
        let mut v = y.clone();
        self.c_inv_sqrt_t_in_place(&mut v)?;
        Ok(v)
    }

    /// `s(C_alpha)^{-1} y`.
    pub fn apply_c_inv_sqrt(&self, y: &ComplexSpaceTimeVector) -> Result<ComplexSpaceTimeVector> {
        self.check(y)?;
        let mut v = y.clone();
        self.c_inv_sqrt_in_place(&mut v)?;
        Ok(v)
    }

    /// `P^{-1} y` without the realness check.
    pub fn apply_p_inv_complex(&self, y: &ComplexSpaceTimeVector) -> Result<ComplexSpaceTimeVector> {
        self.check(y)?;
        let mut v = y.clone();
        self.c_inv_sqrt_t_in_place(&mut v)?;
        self.c_inv_sqrt_in_place(&mut v)?;
        Ok(v)
    }

    /// `P^{-1} y` for real `y`. The exact result is real; a residual
    /// imaginary part above `1e-8 max(||y||, ||P^{-1} y||)` is reported as an
    /// error. `||P^{-1}||` grows like `n^2`, so rounding alone would trip a
    /// bound on `||y||` for long horizons and small alpha.
    pub fn apply_p_inv(&self, y: &SpaceTimeVector) -> Result<SpaceTimeVector> {
        self.check(y)?;
        let (out, max_imag) = self.apply_p_inv_complex(&y.to_complex())?.into_real();
        let threshold = IMAGINARY_LEAK_FACTOR * y.norm().max(out.norm());
        if max_imag > threshold {
            return Err(Error::ImaginaryLeak { max_imag, threshold });
        }
        Ok(out)
    }
}
