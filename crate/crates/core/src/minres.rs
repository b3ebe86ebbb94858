//! Preconditioned MINRES (Paige-Saunders short recurrence) for symmetric,
//! possibly indefinite systems with a symmetric positive definite
//! preconditioner.
//!
//! The residual tracked is `||b - A x_k||_{M^{-1}}`, which the Lanczos
//! recurrence yields for free and which MINRES minimizes; it is
//! non-increasing by construction. The plain 2-norm of the residual can be
//! used for stopping instead; it is updated by a recurrence on `A w_k`, so it
//! costs vector updates but no extra operator applications.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::vector::{axpy, dot, norm2, SpaceTimeVector};
#[cfg(not(any(feature = "std", test)))]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StoppingRule {
    /// `||r_k|| <= tol ||r_0||`
    Relative,
    /// `||r_k|| <= tol`
    Absolute,
}

/// The norm the stopping test is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualNorm {
    /// `||r||_{M^{-1}}`
    Preconditioned,
    /// `||r||_2`
    Euclidean,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub stopping: StoppingRule,
    pub norm: ResidualNorm,
    pub record_history: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-6,
            max_iter: 200_000,
            stopping: StoppingRule::Relative,
            norm: ResidualNorm::Preconditioned,
            record_history: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter("tolerance must be positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: SpaceTimeVector,
    pub iterations: usize,
    /// `||r_0||, ||r_1||, ..` in the preconditioner-induced norm.
    pub residual_history: Vec<f64>,
    /// The same in the 2-norm; only filled for [`ResidualNorm::Euclidean`].
    pub euclidean_history: Vec<f64>,
    pub converged: bool,
    /// Filled in by callers that own a clock.
    pub wall_time: Option<f64>,
}

impl SolveReport {
    pub fn final_residual(&self) -> Option<f64> {
        self.residual_history.last().copied()
    }
}

/// Below this, the Lanczos `beta` counts as zero.
const BREAKDOWN: f64 = 1e-300;

/// Solves `A x = b` with MINRES preconditioned by `M`, where `apply_m_inv`
/// computes `M^{-1} v`. With `apply_m_inv` the identity this is plain MINRES.
pub fn minres_solve<A, P>(
    mut apply_a: A,
    mut apply_m_inv: P,
    b: &SpaceTimeVector,
    x0: &SpaceTimeVector,
    config: &SolverConfig,
) -> Result<SolveReport>
where
    A: FnMut(&SpaceTimeVector) -> Result<SpaceTimeVector>,
    P: FnMut(&SpaceTimeVector) -> Result<SpaceTimeVector>,
{
    config.validate()?;
    b.check_shape(x0)?;
    let (n, m) = (b.n(), b.m());
    let len = b.len();
    let wrap = |data: Vec<f64>| SpaceTimeVector::from_vec(n, m, data);

    let mut x = x0.as_slice().to_vec();
    let ax = apply_a(x0)?;
    b.check_shape(&ax)?;
    let mut r1: Vec<f64> = b.as_slice().iter().zip(ax.as_slice()).map(|(bi, ai)| bi - ai).collect();
    let mut y = apply_m_inv(&wrap(r1.clone())?)?.into_vec();
    let beta1_sq = dot(&r1, &y);
    if beta1_sq < 0.0 {
        return Err(Error::IndefinitePreconditioner {
            iteration: 0,
            value: beta1_sq,
        });
    }
    let beta1 = beta1_sq.sqrt();
    let euclidean = config.norm == ResidualNorm::Euclidean;
    // r = b - A x in the 2-norm, kept only when it drives the stopping test
    let mut r_true = if euclidean { r1.clone() } else { Vec::new() };
    let rnorm0 = if euclidean { norm2(&r_true) } else { beta1 };
    let mut history = vec![beta1];
    let mut euclidean_history = if euclidean { vec![rnorm0] } else { Vec::new() };
    let threshold = match config.stopping {
        StoppingRule::Relative => config.tol * rnorm0,
        StoppingRule::Absolute => config.tol,
    };
    if beta1 == 0.0 || rnorm0 <= threshold {
        return Ok(SolveReport {
            solution: wrap(x)?,
            iterations: 0,
            residual_history: history,
            euclidean_history,
            converged: true,
            wall_time: None,
        });
    }

    let mut r2 = r1.clone();
    let mut oldb = 0.0;
    let mut beta = beta1;
    let mut dbar = 0.0;
    let mut epsln = 0.0;
    let mut phibar = beta1;
    let mut cs = -1.0;
    let mut sn = 0.0;
    let mut w = vec![0.0; len];
    let mut w2 = vec![0.0; len];
    let mut v = vec![0.0; len];
    let (mut aw, mut aw2) = if euclidean {
        (vec![0.0; len], vec![0.0; len])
    } else {
        (Vec::new(), Vec::new())
    };

    let mut converged = false;
    let mut iterations = 0;
    for itn in 1..=config.max_iter {
        iterations = itn;
        let s = 1.0 / beta;
        for (vi, yi) in v.iter_mut().zip(&y) {
            *vi = s * yi;
        }
        let av = apply_a(&wrap(v.clone())?)?.into_vec();
        y.copy_from_slice(&av);
        if itn >= 2 {
            axpy(-beta / oldb, &r1, &mut y);
        }
        let alfa = dot(&v, &y);
        axpy(-alfa / beta, &r2, &mut y);
        core::mem::swap(&mut r1, &mut r2);
        r2.copy_from_slice(&y);
        y = apply_m_inv(&wrap(r2.clone())?)?.into_vec();
        oldb = beta;
        let beta_sq = dot(&r2, &y);
        if beta_sq < 0.0 {
            return Err(Error::IndefinitePreconditioner {
                iteration: itn,
                value: beta_sq,
            });
        }
        beta = beta_sq.sqrt();

        // Apply the previous rotation, then build the new one.
        let oldeps = epsln;
        let delta = cs * dbar + sn * alfa;
        let gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        let gamma = gbar.hypot(beta).max(f64::EPSILON);
        cs = gbar / gamma;
        sn = beta / gamma;
        let phi = cs * phibar;
        phibar *= sn;

        // w = (v - oldeps w1 - delta w2) / gamma with w1 <- w2 <- w.
        let denom = 1.0 / gamma;
        for i in 0..len {
            let w1 = w2[i];
            w2[i] = w[i];
            w[i] = (v[i] - oldeps * w1 - delta * w2[i]) * denom;
            x[i] += phi * w[i];
        }
        let mut rnorm = phibar.abs();
        if config.record_history {
            history.push(rnorm);
        }
        if euclidean {
            // A w follows the same recurrence as w, and r -= phi A w
            for i in 0..len {
                let a1 = aw2[i];
                aw2[i] = aw[i];
                aw[i] = (av[i] - oldeps * a1 - delta * aw2[i]) * denom;
                r_true[i] -= phi * aw[i];
            }
            rnorm = norm2(&r_true);
            if config.record_history {
                euclidean_history.push(rnorm);
            }
        }
        if rnorm <= threshold {
            converged = true;
            break;
        }
        if beta < BREAKDOWN {
            return Err(Error::Breakdown {
                iteration: itn,
                residual: rnorm,
            });
        }
    }
    if !config.record_history {
        history.push(phibar.abs());
        if euclidean {
            euclidean_history.push(norm2(&r_true));
        }
    }

    Ok(SolveReport {
        solution: wrap(x)?,
        iterations,
        residual_history: history,
        euclidean_history,
        converged,
        wall_time: None,
    })
}
