//! Complex FFT backend: iterative radix-2 for power-of-two lengths and
//! Bluestein's chirp-z reduction for everything else.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[cfg(not(any(feature = "std", test)))]
use num_traits::Float;

#[derive(Debug, Clone)]
pub(crate) struct FftPlan {
    len: usize,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    Radix2(Radix2),
    Bluestein(Bluestein),
}

#[derive(Debug, Clone)]
struct Radix2 {
    n: usize,
    /// `exp(-2 pi i k / n)` for `k < n/2`.
    twiddles: Vec<Complex64>,
    rev: Vec<usize>,
}

#[derive(Debug, Clone)]
struct Bluestein {
    inner: Radix2,
    /// `exp(-i pi k^2 / n)`
    chirp: Vec<Complex64>,
    /// Forward transform of the conjugate chirp, zero padded and wrapped.
    kernel: Vec<Complex64>,
}

fn expi(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}

impl Radix2 {
    fn new(n: usize) -> Self {
        debug_assert!(n.is_power_of_two());
        let twiddles = (0..n / 2)
            .map(|k| expi(-2.0 * PI * k as f64 / n as f64))
            .collect();
        let bits = n.trailing_zeros();
        let rev = (0..n)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        Radix2 { n, twiddles, rev }
    }

    /// Unnormalized forward transform, negative exponent.
    fn forward(&self, buf: &mut [Complex64]) {
        let n = self.n;
        for i in 0..n {
            let j = self.rev[i];
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut half = 1;
        while half < n {
            let step = n / (2 * half);
            for start in (0..n).step_by(2 * half) {
                for k in 0..half {
                    let w = self.twiddles[k * step];
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            half *= 2;
        }
    }

    fn backward(&self, buf: &mut [Complex64]) {
        conj_in_place(buf);
        self.forward(buf);
        conj_in_place(buf);
    }
}

fn conj_in_place(buf: &mut [Complex64]) {
    for z in buf.iter_mut() {
        z.im = -z.im;
    }
}

impl Bluestein {
    fn new(n: usize) -> Self {
        let big = (2 * n - 1).next_power_of_two();
        let inner = Radix2::new(big);
        // k^2 mod 2n keeps the chirp angle small for large k.
        let chirp: Vec<Complex64> = (0..n)
            .map(|k| {
                let q = (k as u128 * k as u128 % (2 * n as u128)) as f64;
                expi(-PI * q / n as f64)
            })
            .collect();
        let mut kernel = vec![Complex64::new(0.0, 0.0); big];
        kernel[0] = chirp[0].conj();
        for k in 1..n {
            kernel[k] = chirp[k].conj();
            kernel[big - k] = chirp[k].conj();
        }
        inner.forward(&mut kernel);
        Bluestein {
            inner,
            chirp,
            kernel,
        }
    }

    fn forward(&self, buf: &mut [Complex64]) {
        let n = buf.len();
        let big = self.inner.n;
        let mut work = vec![Complex64::new(0.0, 0.0); big];
        for k in 0..n {
            work[k] = buf[k] * self.chirp[k];
        }
        self.inner.forward(&mut work);
        for (w, h) in work.iter_mut().zip(&self.kernel) {
            *w *= h;
        }
        self.inner.backward(&mut work);
        let scale = 1.0 / big as f64;
        for k in 0..n {
            buf[k] = work[k] * self.chirp[k] * scale;
        }
    }
}

impl FftPlan {
    pub(crate) fn new(len: usize) -> Self {
        assert!(len >= 1, "FFT length must be positive");
        let kind = if len.is_power_of_two() {
            Kind::Radix2(Radix2::new(len))
        } else {
            Kind::Bluestein(Bluestein::new(len))
        };
        FftPlan { len, kind }
    }

    #[inline]
    pub(crate) fn len(&self) -> usize {
        self.len
    }

    /// `X_k = sum_j x_j exp(-2 pi i jk / n)`, unnormalized.
    pub(crate) fn forward(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.len);
        match &self.kind {
            Kind::Radix2(r) => r.forward(buf),
            Kind::Bluestein(b) => b.forward(buf),
        }
    }

    /// `X_k = sum_j x_j exp(+2 pi i jk / n)`, unnormalized.
    pub(crate) fn backward(&self, buf: &mut [Complex64]) {
        conj_in_place(buf);
        self.forward(buf);
        conj_in_place(buf);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(x: &[Complex64], sign: f64) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(j, &v)| {
                        let q = (j * k % n) as f64;
                        v * expi(sign * 2.0 * PI * q / n as f64)
                    })
                    .sum()
            })
            .collect()
    }

    fn sample(n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|j| Complex64::new((j as f64 * 0.37).sin() + 0.1, (j as f64 * 1.3).cos()))
            .collect()
    }

    #[test]
    fn matches_naive_dft_for_many_lengths() {
        for n in [1usize, 2, 3, 4, 5, 6, 7, 8, 12, 15, 16, 31, 32, 100] {
            let x = sample(n);
            let plan = FftPlan::new(n);
            let mut fwd = x.clone();
            plan.forward(&mut fwd);
            let mut bwd = x.clone();
            plan.backward(&mut bwd);
            let ef = naive(&x, -1.0);
            let eb = naive(&x, 1.0);
            for k in 0..n {
                assert!((fwd[k] - ef[k]).norm() < 1e-11 * n as f64, "n={n} k={k}");
                assert!((bwd[k] - eb[k]).norm() < 1e-11 * n as f64, "n={n} k={k}");
            }
        }
    }
}
