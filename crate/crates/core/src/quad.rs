//! Quadrature helpers.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Trapezoid rule over the square `[-half_width, half_width]^2` with
/// `n + 1` points per axis.
pub fn trapezoid_2d<F>(f: F, half_width: f64, n: usize) -> C64
where
    F: Fn(f64, f64) -> C64,
{
    let step = 2.0 * half_width / n as f64;
    let coord = |i: usize| -half_width + step * i as f64;
    let edge = |i: usize| i == 0 || i == n;
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..=n {
        let x = coord(i);
        let wx = if edge(i) { 0.5 } else { 1.0 };
        let mut row = C64::new(0.0, 0.0);
        for j in 0..=n {
            let wy = if edge(j) { 0.5 } else { 1.0 };
            row += wy * f(x, coord(j));
        }
        acc += wx * row;
    }
    acc * step * step
}

/// Refines [`trapezoid_2d`] by doubling the resolution until successive
/// estimates differ by less than `tol * max(|estimate|, scale)`. The `scale`
/// keeps the stop criterion meaningful for integrals whose true value is
/// close to zero.
pub fn adaptive_trapezoid_2d<F>(f: F, half_width: f64, tol: f64, scale: f64) -> Result<C64>
where
    F: Fn(f64, f64) -> C64,
{
    let mut n = 32;
    let mut prev = trapezoid_2d(&f, half_width, n);
    let mut last_change = f64::INFINITY;
    while n < 4096 {
        n *= 2;
        let cur = trapezoid_2d(&f, half_width, n);
        last_change = (cur - prev).norm();
        if last_change <= tol * cur.norm().max(scale) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::QuadratureNonconvergence {
        last_change,
        tolerance: tol,
    })
}
