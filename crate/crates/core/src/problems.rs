//! Built-in problem presets on the unit square, `T = 1`.

use alloc::boxed::Box;

use crate::discretization::{Coefficient, WaveProblem};
#[cfg(not(any(feature = "std", test)))]
use num_traits::Float;

fn bubble(x: &[f64]) -> f64 {
    x.iter().map(|&xi| xi * (xi - 1.0)).product()
}

// Laplacian of `bubble`: sum over i of 2 prod_{j != i} xj(xj-1).
fn bubble_laplacian(x: &[f64]) -> f64 {
    (0..x.len())
        .map(|i| {
            let rest: f64 = x.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &xj)| xj * (xj - 1.0)).product();
            2.0 * rest
        })
        .sum()
}

/// Constant coefficients with exact solution
/// `u = exp(-t) x1(x1-1) x2(x2-1)`; in other dimensions the product runs
/// over every coordinate.
pub fn example1() -> WaveProblem {
    WaveProblem {
        name: "example1",
        coefficient: Coefficient::Constant(1.0),
        source: Box::new(|x, t| (-t).exp() * (bubble(x) - bubble_laplacian(x))),
        initial_value: Box::new(bubble),
        initial_velocity: Box::new(|x| -bubble(x)),
        exact: Some(Box::new(|x, t| (-t).exp() * bubble(x))),
    }
}

fn example2_coefficient(x: &[f64]) -> f64 {
    (30.0 + x[0].sin().powi(2)) * (30.0 + x[1].sin().powi(2))
}

/// `u = exp(t) x1(1-x1) x2(1-x2)`, which solves [`example2`]. The preset
/// itself carries no exact solution, so tables leave its error column empty.
pub fn example2_reference(x: &[f64], t: f64) -> f64 {
    t.exp() * bubble(x)
}

/// `a(x) = (30 + sin^2 x1)(30 + sin^2 x2)`. Two-dimensional only.
pub fn example2() -> WaveProblem {
    WaveProblem {
        name: "example2",
        coefficient: Coefficient::Variable(Box::new(example2_coefficient)),
        source: Box::new(|x, t| {
            let (x1, x2) = (x[0], x[1]);
            let (g1, g2) = (x1 * (1.0 - x1), x2 * (1.0 - x2));
            let a = example2_coefficient(x);
            t.exp()
                * (g1 * g2
                    - (2.0 * x1).sin() * (30.0 + x2.sin().powi(2)) * (1.0 - 2.0 * x1) * g2
                    - (2.0 * x2).sin() * (30.0 + x1.sin().powi(2)) * (1.0 - 2.0 * x2) * g1
                    + 2.0 * a * (g1 + g2))
        }),
        initial_value: Box::new(bubble),
        initial_velocity: Box::new(bubble),
        exact: None,
    }
}

/// `f = 0`, `psi0 = psi1 = 0`; the solution is identically zero.
pub fn homogeneous() -> WaveProblem {
    constant("homogeneous", 1.0, 0.0, 0.0, 0.0)
}

/// Spatially constant data. The exact solution is only known (and set) when
/// everything vanishes.
pub fn constant(name: &'static str, coefficient: f64, source: f64, psi0: f64, psi1: f64) -> WaveProblem {
    let trivial = source == 0.0 && psi0 == 0.0 && psi1 == 0.0;
    WaveProblem {
        name,
        coefficient: Coefficient::Constant(coefficient),
        source: Box::new(move |_, _| source),
        initial_value: Box::new(move |_| psi0),
        initial_velocity: Box::new(move |_| psi1),
        exact: if trivial {
            Some(Box::new(|_, _| 0.0))
        } else {
            None
        },
    }
}

pub fn by_name(name: &str) -> Option<WaveProblem> {
    match name {
        "example1" => Some(example1()),
        "example2" => Some(example2()),
        "homogeneous" | "zero" => Some(homogeneous()),
        _ => None,
    }
}
