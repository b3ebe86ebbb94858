//! Orthonormal trigonometric transforms acting on time-major space-time
//! vectors.
//!
//! * [`SineTransform`] applies `I_n (x) U`, with `U` the `d`-fold tensor
//!   product of the orthonormal DST-I. `U` is symmetric and orthogonal, so it
//!   is its own inverse.
//! * [`TimeDft`] applies `F (x) I_m` or `F^* (x) I_m`, where
//!   `F = n^{-1/2} [theta^{(i-1)(j-1)}]` and `theta = exp(2 pi i / n)`.
//!   `F` is unitary and symmetric.
//! * [`scale_time`] applies `D_alpha^{+-1} (x) I_m` with
//!   `D_alpha = diag(alpha^{(i-1)/n})`.
//!
//! The DST-I is computed from a complex FFT of the odd extension of length
//! `2(m1 + 1)`, so every transform here goes through the one FFT backend.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::FftPlan;
use crate::vector::SpaceTimeVector;
#[cfg(not(any(feature = "std", test)))]
use num_traits::Float;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Scalars the transforms accept: real values are embedded in the complex
/// plane and projected back afterwards.
pub trait TransformScalar: Copy + Default {
    fn to_complex(self) -> Complex64;
    fn from_complex(z: Complex64) -> Self;
}

impl TransformScalar for f64 {
    #[inline]
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    #[inline]
    fn from_complex(z: Complex64) -> Self {
        z.re
    }
}

impl TransformScalar for Complex64 {
    #[inline]
    fn to_complex(self) -> Complex64 {
        self
    }
    #[inline]
    fn from_complex(z: Complex64) -> Self {
        z
    }
}

/// Orthonormal DST-I of one length.
#[derive(Debug, Clone)]
pub struct DstPlan {
    m1: usize,
    fft: FftPlan,
    scale: f64,
}

impl DstPlan {
    pub fn new(m1: usize) -> Result<Self> {
        if m1 == 0 {
            return Err(Error::EmptyInput);
        }
        Ok(DstPlan {
            m1,
            fft: FftPlan::new(2 * (m1 + 1)),
            scale: (2.0 / (m1 + 1) as f64).sqrt(),
        })
    }

    pub fn len(&self) -> usize {
        self.m1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// In-place transform; `work` must hold `2(m1 + 1)` entries.
    pub fn apply(&self, v: &mut [Complex64], work: &mut [Complex64]) {
        let m1 = self.m1;
        debug_assert_eq!(v.len(), m1);
        debug_assert_eq!(work.len(), self.fft.len());
        let big = 2 * (m1 + 1);
        work[0] = ZERO;
        work[m1 + 1] = ZERO;
        for j in 0..m1 {
            work[j + 1] = v[j];
            work[big - 1 - j] = -v[j];
        }
        self.fft.forward(work);
        // X_k = -2i sum_j v_j sin(pi jk/(m1+1))
        let half = 0.5 * self.scale;
        for k in 0..m1 {
            let x = work[k + 1];
            v[k] = Complex64::new(-x.im * half, x.re * half);
        }
    }

    fn strided(&self, data: &mut [Complex64], offset: usize, stride: usize, fiber: &mut [Complex64], work: &mut [Complex64]) {
        for (i, f) in fiber.iter_mut().enumerate() {
            *f = data[offset + i * stride];
        }
        self.apply(fiber, work);
        for (i, f) in fiber.iter().enumerate() {
            data[offset + i * stride] = *f;
        }
    }
}

/// Orthonormal DST-I of a single sequence.
pub fn dst1<T: TransformScalar>(v: &[T]) -> Result<Vec<T>> {
    let plan = DstPlan::new(v.len())?;
    let mut buf: Vec<Complex64> = v.iter().map(|x| x.to_complex()).collect();
    let mut work = vec![ZERO; 2 * (v.len() + 1)];
    plan.apply(&mut buf, &mut work);
    Ok(buf.into_iter().map(T::from_complex).collect())
}

/// Returns `m1` with `m1^d == m`.
pub fn integer_root(m: usize, d: usize) -> Result<usize> {
    if m == 0 || d == 0 {
        return Err(Error::EmptyInput);
    }
    let guess = (m as f64).powf(1.0 / d as f64).round() as usize;
    for cand in guess.saturating_sub(1)..=guess + 1 {
        if cand > 0 && cand.checked_pow(d as u32) == Some(m) {
            return Ok(cand);
        }
    }
    Err(Error::NotAPerfectPower { m, d })
}

/// Tensor-product DST-I over a `d`-dimensional block of `m1^d` points,
/// first coordinate fastest.
#[derive(Debug, Clone)]
pub struct SineTransform {
    d: usize,
    m1: usize,
    m: usize,
    plan: DstPlan,
}

impl SineTransform {
    pub fn new(m: usize, d: usize) -> Result<Self> {
        let m1 = integer_root(m, d)?;
        Ok(SineTransform {
            d,
            m1,
            m,
            plan: DstPlan::new(m1)?,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Transforms one spatial block in place.
    pub fn apply_block(&self, block: &mut [Complex64], fiber: &mut [Complex64], work: &mut [Complex64]) {
        let m1 = self.m1;
        let mut stride = 1;
        for _ in 0..self.d {
            // Fibers along this axis start at every index whose axis digit is 0.
            let outer = self.m / (stride * m1);
            for hi in 0..outer {
                for lo in 0..stride {
                    let offset = hi * stride * m1 + lo;
                    self.plan.strided(block, offset, stride, fiber, work);
                }
            }
            stride *= m1;
        }
    }

    fn buffers(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        (vec![ZERO; self.m1], vec![ZERO; 2 * (self.m1 + 1)])
    }

    /// `(I_n (x) U) v` in place.
    pub fn apply(&self, v: &mut SpaceTimeVector<Complex64>) -> Result<()> {
        if v.m() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                found: v.m(),
            });
        }
        let (mut fiber, mut work) = self.buffers();
        for block in v.blocks_mut() {
            self.apply_block(block, &mut fiber, &mut work);
        }
        Ok(())
    }
}

/// `(I_n (x) U) v` for real or complex input.
pub fn dst_space<T: TransformScalar>(v: &SpaceTimeVector<T>, d: usize) -> Result<SpaceTimeVector<T>> {
    let st = SineTransform::new(v.m(), d)?;
    let mut c = map_vector(v, |x| x.to_complex());
    st.apply(&mut c)?;
    Ok(map_vector(&c, T::from_complex))
}

fn map_vector<T: Copy, U>(v: &SpaceTimeVector<T>, f: impl Fn(T) -> U) -> SpaceTimeVector<U> {
    let data = v.as_slice().iter().map(|&x| f(x)).collect();
    SpaceTimeVector::from_vec(v.n(), v.m(), data).expect("shape preserved")
}

/// Unitary DFT along the time axis.
#[derive(Debug, Clone)]
pub struct TimeDft {
    n: usize,
    fft: FftPlan,
    scale: f64,
}

impl TimeDft {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        Ok(TimeDft {
            n,
            fft: FftPlan::new(n),
            scale: 1.0 / (n as f64).sqrt(),
        })
    }

    /// `F w` (or `F^* w` when `inverse`) for one length-`n` sequence, in place.
    pub fn apply_seq(&self, w: &mut [Complex64], inverse: bool) {
        // F has the positive exponent.
        if inverse {
            self.fft.forward(w);
        } else {
            self.fft.backward(w);
        }
        for z in w.iter_mut() {
            *z *= self.scale;
        }
    }

    /// `(F (x) I_m) v` or `(F^* (x) I_m) v` in place.
    pub fn apply(&self, v: &mut SpaceTimeVector<Complex64>, inverse: bool) -> Result<()> {
        if v.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: v.n(),
            });
        }
        let (n, m) = (v.n(), v.m());
        let data = v.as_mut_slice();
        let mut fiber = vec![ZERO; n];
        for j in 0..m {
            for (i, f) in fiber.iter_mut().enumerate() {
                *f = data[i * m + j];
            }
            self.apply_seq(&mut fiber, inverse);
            for (i, f) in fiber.iter().enumerate() {
                data[i * m + j] = *f;
            }
        }
        Ok(())
    }
}

/// Unitary DFT of a single sequence.
pub fn unitary_dft(w: &[Complex64], inverse: bool) -> Result<Vec<Complex64>> {
    let plan = TimeDft::new(w.len())?;
    let mut out = w.to_vec();
    plan.apply_seq(&mut out, inverse);
    Ok(out)
}

pub fn dft_time(v: &SpaceTimeVector<Complex64>, inverse: bool) -> Result<SpaceTimeVector<Complex64>> {
    let plan = TimeDft::new(v.n())?;
    let mut out = v.clone();
    plan.apply(&mut out, inverse)?;
    Ok(out)
}

/// Multipliers `alpha^{sign (i-1)/n}` for `i = 1..n`.
pub fn time_scaling(alpha: f64, n: usize, sign: i32) -> Result<Vec<f64>> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter("alpha must be positive"));
    }
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidParameter("sign must be +1 or -1"));
    }
    let s = sign as f64;
    Ok((0..n).map(|i| alpha.powf(s * i as f64 / n as f64)).collect())
}

/// `(D_alpha^{sign} (x) I_m) v` in place.
pub fn scale_time_in_place<T>(v: &mut SpaceTimeVector<T>, factors: &[f64])
where
    T: Copy + core::ops::MulAssign<f64>,
{
    for (block, &f) in v.blocks_mut().zip(factors) {
        for x in block {
            *x *= f;
        }
    }
}

pub fn scale_time<T>(v: &SpaceTimeVector<T>, alpha: f64, sign: i32) -> Result<SpaceTimeVector<T>>
where
    T: Copy + core::ops::MulAssign<f64>,
{
    let factors = time_scaling(alpha, v.n(), sign)?;
    let mut out = v.clone();
    scale_time_in_place(&mut out, &factors);
    Ok(out)
}
