//! Time-major space-time vectors.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};
#[cfg(not(any(feature = "std", test)))]
use num_traits::Float;

/// `n` blocks of `m` scalars; block `i` holds the unknowns at time level
/// `i + 1` with spatial points in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeVector<T = f64> {
    n: usize,
    m: usize,
    data: Vec<T>,
}

pub type ComplexSpaceTimeVector = SpaceTimeVector<Complex64>;

impl<T: Copy + Default> SpaceTimeVector<T> {
    pub fn zeros(n: usize, m: usize) -> Self {
        SpaceTimeVector {
            n,
            m,
            data: vec![T::default(); n * m],
        }
    }
}

impl<T> SpaceTimeVector<T> {
    pub fn from_vec(n: usize, m: usize, data: Vec<T>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::EmptyInput);
        }
        if data.len() != n * m {
            return Err(Error::DimensionMismatch {
                expected: n * m,
                found: data.len(),
            });
        }
        Ok(SpaceTimeVector { n, m, data })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    /// Block `i` (0-based time level).
    pub fn block(&self, i: usize) -> &[T] {
        &self.data[i * self.m..(i + 1) * self.m]
    }

    pub fn block_mut(&mut self, i: usize) -> &mut [T] {
        let m = self.m;
        &mut self.data[i * m..(i + 1) * m]
    }

    pub fn blocks(&self) -> core::slice::ChunksExact<'_, T> {
        self.data.chunks_exact(self.m)
    }

    pub fn blocks_mut(&mut self) -> core::slice::ChunksExactMut<'_, T> {
        self.data.chunks_exact_mut(self.m)
    }

    pub fn same_shape<U>(&self, other: &SpaceTimeVector<U>) -> bool {
        self.n == other.n && self.m == other.m
    }

    pub(crate) fn check_shape<U>(&self, other: &SpaceTimeVector<U>) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            })
        }
    }
}

impl<T> Index<usize> for SpaceTimeVector<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.data[i]
    }
}

impl<T> IndexMut<usize> for SpaceTimeVector<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.data[i]
    }
}

impl SpaceTimeVector<f64> {
    pub fn dot(&self, other: &Self) -> f64 {
        dot(&self.data, &other.data)
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn to_complex(&self) -> ComplexSpaceTimeVector {
        SpaceTimeVector {
            n: self.n,
            m: self.m,
            data: self.data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }
}

impl SpaceTimeVector<Complex64> {
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Splits into the real part and the largest absolute imaginary part.
    pub fn into_real(self) -> (SpaceTimeVector<f64>, f64) {
        let max_imag = self.data.iter().fold(0.0f64, |acc, z| acc.max(z.im.abs()));
        let data = self.data.into_iter().map(|z| z.re).collect();
        (
            SpaceTimeVector {
                n: self.n,
                m: self.m,
                data,
            },
            max_imag,
        )
    }
}

/// Sequential dot product; the fixed reduction order keeps solves reproducible.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += a * x`
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}
