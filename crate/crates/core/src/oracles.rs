//! Independent numerical routes used to cross-check the closed forms: direct
//! differentiation of the Gaussian kernel, longitudinal and volume
//! quadratures, and Gauss-Legendre nodes. Nothing here calls the closed-form
//! expressions it is used to verify.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::modes::{egh_eval, gaussian_kernel, ModeIndex, PumpGeometry, TransversePoint};
use crate::phasematch::CrystalConfig;
use crate::transforms::SpatialFrequency;

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 1..n {
                let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Mixed derivative `∂^n_x ∂^m_y` of the Gaussian kernel at a point, by
/// trapezoid Cauchy contour integrals (the kernel is entire in x and y, so
/// this converges to machine precision):
/// `∂^n f = n!/(2 pi i) ∮ f(ζ) / (ζ - x)^{n+1} dζ` per axis.
pub fn contour_kernel_derivative(
    idx: ModeIndex,
    geom: &PumpGeometry,
    p: TransversePoint,
    samples: usize,
) -> C64 {
    let radius = (geom.waist() * geom.xi(p.z).sqrt()).norm();
    let fact = |k: u32| (1..=k).fold(1.0, |acc, v| acc * v as f64);
    let mut acc = C64::new(0.0, 0.0);
    for a in 0..samples {
        let tha = 2.0 * PI * a as f64 / samples as f64;
        let zx = C64::new(p.x + radius * tha.cos(), radius * tha.sin());
        let wa = C64::new(0.0, -(idx.n as f64) * tha).exp();
        let mut row = C64::new(0.0, 0.0);
        for b in 0..samples {
            let thb = 2.0 * PI * b as f64 / samples as f64;
            let zy = C64::new(p.y + radius * thb.cos(), radius * thb.sin());
            let wb = C64::new(0.0, -(idx.m as f64) * thb).exp();
            row += wb * gaussian_kernel(geom, zx, zy, p.z);
        }
        acc += wa * row;
    }
    acc * fact(idx.n) * fact(idx.m)
        / (radius.powi(idx.n as i32) * radius.powi(idx.m as i32) * (samples * samples) as f64)
}

/// Central finite-difference stencils, fourth-order accurate, for
/// derivative orders 1..=4.
const FD_STENCILS: [&[(i32, f64)]; 5] = [
    &[(0, 1.0)],
    &[
        (-2, 1.0 / 12.0),
        (-1, -2.0 / 3.0),
        (1, 2.0 / 3.0),
        (2, -1.0 / 12.0),
    ],
    &[
        (-2, -1.0 / 12.0),
        (-1, 4.0 / 3.0),
        (0, -5.0 / 2.0),
        (1, 4.0 / 3.0),
        (2, -1.0 / 12.0),
    ],
    &[
        (-3, 1.0 / 8.0),
        (-2, -1.0),
        (-1, 13.0 / 8.0),
        (1, -13.0 / 8.0),
        (2, 1.0),
        (3, -1.0 / 8.0),
    ],
    &[
        (-3, -1.0 / 6.0),
        (-2, 2.0),
        (-1, -13.0 / 2.0),
        (0, 28.0 / 3.0),
        (1, -13.0 / 2.0),
        (2, 2.0),
        (3, -1.0 / 6.0),
    ],
];

/// Mixed derivative of the Gaussian kernel by central finite differences
/// (orders up to 4 per axis). Cruder than [`contour_kernel_derivative`] but
/// a fully independent second route.
pub fn fd_kernel_derivative(
    idx: ModeIndex,
    geom: &PumpGeometry,
    p: TransversePoint,
    step: f64,
) -> C64 {
    assert!(idx.n <= 4 && idx.m <= 4, "stencils cover orders <= 4");
    let sx = FD_STENCILS[idx.n as usize];
    let sy = FD_STENCILS[idx.m as usize];
    let mut acc = C64::new(0.0, 0.0);
    for &(ox, cx) in sx {
        for &(oy, cy) in sy {
            acc += cx
                * cy
                * gaussian_kernel(
                    geom,
                    C64::new(p.x + ox as f64 * step, 0.0),
                    C64::new(p.y + oy as f64 * step, 0.0),
                    p.z,
                );
        }
    }
    acc / step.powi((idx.n + idx.m) as i32)
}

/// The derivative definition of the mode,
/// `u0 (-w0)^(n+m) / xi * ∂^n_x ∂^m_y exp(-pi rho^2/(lambda z_r xi))`,
/// with the derivative taken numerically.
pub fn egh_from_kernel_derivatives(
    idx: ModeIndex,
    geom: &PumpGeometry,
    p: TransversePoint,
) -> C64 {
    let derivative = contour_kernel_derivative(idx, geom, p, 64);
    geom.amplitude() * (-geom.waist()).powi(idx.order() as i32) / geom.xi(p.z) * derivative
}

/// Longitudinal phase-matching integral `∫_0^L exp(i 2 pi dnu (z - z0)) dz`
/// with `z0 = L/2 - delta_z`, by Gauss-Legendre quadrature. Equals
/// `phi(dnu) * L` for a single segment.
pub fn z_integral(dnu: f64, crystal: &CrystalConfig, nodes: usize) -> C64 {
    let (xs, ws) = gauss_legendre(nodes);
    let z0 = 0.5 * crystal.length - crystal.delta_z;
    let half = 0.5 * crystal.length;
    let mut acc = C64::new(0.0, 0.0);
    for (x, w) in xs.iter().zip(&ws) {
        let z = half + half * x;
        acc += *w * C64::new(0.0, 2.0 * PI * dnu * (z - z0)).exp();
    }
    acc * half
}

/// Fits the phase slope (in cycles/meter) of the longitudinal integrand
/// `exp(i 2 pi z / lambda) exp(-i 2 pi nu_+z z) exp(-i pi lambda z nu_+perp^2)`
/// by unwrapped finite-difference phases over the crystal length. The slope
/// is the momentum mismatch actually seen by the z-integral.
pub fn integrand_phase_slope(
    geom: &PumpGeometry,
    nu_s: &SpatialFrequency,
    nu_i: &SpatialFrequency,
    length: f64,
) -> f64 {
    let plus = nu_s.plus(nu_i);
    let value = |z: f64| -> C64 {
        C64::new(0.0, 2.0 * PI * z / geom.lambda()).exp()
            * C64::new(0.0, -2.0 * PI * plus.nu_z * z).exp()
            * C64::new(0.0, -PI * geom.lambda() * z * plus.perp_sqr()).exp()
    };
    let steps = 256;
    let dz = length / steps as f64;
    let mut total_phase = 0.0;
    for k in 0..steps {
        let z = -0.5 * length + k as f64 * dz;
        total_phase += (value(z + dz) / value(z)).arg();
    }
    total_phase / (2.0 * PI * length)
}

/// Brute-force quadrature of the interaction integrand over the crystal
/// volume, divided by `A L = pi w0^2 L` so it is directly comparable with
/// the shape part of the closed-form amplitude (without envelope and energy
/// factors):
///
/// `1/(A L) * sum_segments ∫ dz ∬ dx dy u_pump(r) e^{i 2 pi z / lambda}
///  e^{+2 pi i nu_+perp . r_perp} e^{-2 pi i nu_+z z}`
///
/// Each segment spans `[offset + delta_z - L/2, offset + delta_z + L/2]`
/// around the pump focus; transverse integration is a trapezoid over
/// +-10 w0.
pub fn volume_quadrature_shape(
    coefficients: &[(ModeIndex, C64)],
    geom: &PumpGeometry,
    crystal: &CrystalConfig,
    nu_s: &SpatialFrequency,
    nu_i: &SpatialFrequency,
    transverse_points: usize,
    z_nodes: usize,
) -> C64 {
    let plus = nu_s.plus(nu_i);
    let half_width = 10.0 * geom.waist();
    let n = transverse_points;
    let step = 2.0 * half_width / n as f64;
    let xs: Vec<f64> = (0..=n).map(|i| -half_width + step * i as f64).collect();
    let w_edge = |i: usize| if i == 0 || i == n { 0.5 } else { 1.0 };
    // Separable transverse phase and weight factors.
    let col_x: Vec<C64> = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| w_edge(i) * C64::new(0.0, 2.0 * PI * plus.nu_x * x).exp())
        .collect();
    let col_y: Vec<C64> = xs
        .iter()
        .enumerate()
        .map(|(i, &y)| w_edge(i) * C64::new(0.0, 2.0 * PI * plus.nu_y * y).exp())
        .collect();

    let (gl_x, gl_w) = gauss_legendre(z_nodes);
    let residual_carrier = 1.0 / geom.lambda() - plus.nu_z;

    let mut total = C64::new(0.0, 0.0);
    for offset in &crystal.segment_offsets {
        let centre = offset + crystal.delta_z;
        let half = 0.5 * crystal.length;
        for (gx, gw) in gl_x.iter().zip(&gl_w) {
            let z = centre + half * gx;
            let mut transverse = C64::new(0.0, 0.0);
            for (cx, &x) in col_x.iter().zip(&xs) {
                let mut row = C64::new(0.0, 0.0);
                for (cy, &y) in col_y.iter().zip(&xs) {
                    let p = TransversePoint::new(x, y, z);
                    let pump: C64 = coefficients
                        .iter()
                        .map(|&(idx, c)| c * egh_eval(idx, geom, p))
                        .sum();
                    row += *cy * pump;
                }
                transverse += *cx * row;
            }
            transverse *= step * step;
            total += *gw * half * transverse * C64::new(0.0, 2.0 * PI * residual_carrier * z).exp();
        }
    }
    total / (PI * geom.waist() * geom.waist() * crystal.length)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (xs, ws) = gauss_legendre(8);
        let quad = |f: &dyn Fn(f64) -> f64| -> f64 {
            xs.iter().zip(&ws).map(|(x, w)| w * f(*x)).sum()
        };
        assert!((quad(&|x| x * x) - 2.0 / 3.0).abs() < 1e-14);
        assert!((quad(&|x| x.exp()) - (1f64.exp() - (-1f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn contour_derivative_of_plain_gaussian() {
        // At the waist the kernel is exp(-rho^2 / w0^2); d/dx at x0 is
        // -2 x0 / w0^2 times the kernel.
        let geom = PumpGeometry::new(5e-7, 2e-5).unwrap();
        let x0 = 0.4 * geom.waist();
        let p = TransversePoint::new(x0, 0.0, 0.0);
        let d = contour_kernel_derivative(ModeIndex::new(1, 0), &geom, p, 64);
        let w0 = geom.waist();
        let expect = -2.0 * x0 / (w0 * w0) * (-(x0 * x0) / (w0 * w0)).exp();
        assert!((d - C64::new(expect, 0.0)).norm() < 1e-12 * expect.abs());
    }

    #[test]
    fn fd_derivative_agrees_with_contour_at_low_order() {
        let geom = PumpGeometry::new(5e-7, 2e-5).unwrap();
        let p = TransversePoint::new(0.3 * geom.waist(), -0.2 * geom.waist(), 1e-3);
        let idx = ModeIndex::new(2, 1);
        let h = (geom.waist() * geom.xi(p.z).sqrt()).norm() / 100.0;
        let a = fd_kernel_derivative(idx, &geom, p, h);
        let b = contour_kernel_derivative(idx, &geom, p, 64);
        assert!((a - b).norm() < 1e-6 * b.norm());
    }
}
