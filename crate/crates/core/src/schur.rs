//! Complex Schur decomposition `A = Q T Q^*` by Hessenberg reduction and
//! single-shift QR with Wilkinson shifts, plus an exceptional shift every
//! tenth sweep without deflation.

use nalgebra::linalg::Hessenberg;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
#[cfg(not(any(feature = "std", test)))]
use num_traits::Float;

type C = Complex64;

fn abs1(z: C) -> f64 {
    z.re.abs() + z.im.abs()
}

/// `G = [[c, s], [-conj(s), c]]` with `G [x; y] = [r; 0]`.
fn givens(x: C, y: C) -> (f64, C) {
    if y == C::new(0.0, 0.0) {
        return (1.0, C::new(0.0, 0.0));
    }
    let ax = x.norm();
    let norm = ax.hypot(y.norm());
    if ax == 0.0 {
        return (0.0, y.conj() / y.norm());
    }
    (ax / norm, (x / ax) * y.conj() / norm)
}

fn wilkinson_shift(a: C, b: C, c: C, d: C) -> C {
    let p = (a - d) * 0.5;
    let bc = b * c;
    if bc == C::new(0.0, 0.0) {
        return d;
    }
    let disc = (p * p + bc).sqrt();
    let den = if (p + disc).norm() >= (p - disc).norm() { p + disc } else { p - disc };
    if den == C::new(0.0, 0.0) {
        d
    } else {
        d - bc / den
    }
}

pub(crate) fn schur(a: &DMatrix<C>) -> Result<(DMatrix<C>, DMatrix<C>)> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch { expected: n, found: a.ncols() });
    }
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let (mut q, mut h) = Hessenberg::new(a.clone()).unpack();
    let scale = h.iter().map(|&z| abs1(z)).fold(0.0, f64::max);
    let tiny = f64::MIN_POSITIVE * (n as f64);
    let eps = f64::EPSILON;
    let max_sweeps = 30 * n.max(10);

    let mut hi = n - 1;
    let mut sweeps = 0;
    while hi > 0 {
        // find the start of the active unreduced block
        let mut lo = hi;
        while lo > 0 {
            let sub = abs1(h[(lo, lo - 1)]);
            let mut diag = abs1(h[(lo, lo)]) + abs1(h[(lo - 1, lo - 1)]);
            if diag == 0.0 {
                diag = scale;
            }
            if sub <= tiny || sub <= eps * diag {
                h[(lo, lo - 1)] = C::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            sweeps = 0;
            continue;
        }
        sweeps += 1;
        if sweeps > max_sweeps {
            return Err(Error::NotConverged("complex Schur decomposition"));
        }
        let shift = if sweeps % 10 == 0 {
            h[(hi, hi)] + 0.75 * h[(hi, hi - 1)].re.abs()
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        for k in lo..hi {
            let (x, y) = if k == lo {
                (h[(lo, lo)] - shift, h[(lo + 1, lo)])
            } else {
                (h[(k, k - 1)], h[(k + 1, k - 1)])
            };
            let (c, s) = givens(x, y);
            let first = if k == lo { lo } else { k - 1 };
            for j in first..n {
                let (u, v) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = u * c + s * v;
                h[(k + 1, j)] = -s.conj() * u + v * c;
            }
            if k > lo {
                h[(k + 1, k - 1)] = C::new(0.0, 0.0);
            }
            let last = (k + 2).min(hi);
            for i in 0..=last {
                let (u, v) = (h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = u * c + s.conj() * v;
                h[(i, k + 1)] = -s * u + v * c;
            }
            for i in 0..n {
                let (u, v) = (q[(i, k)], q[(i, k + 1)]);
                q[(i, k)] = u * c + s.conj() * v;
                q[(i, k + 1)] = -s * u + v * c;
            }
        }
    }
    for j in 0..n {
        for i in j + 1..n {
            h[(i, j)] = C::new(0.0, 0.0);
        }
    }
    Ok((q, h))
}
