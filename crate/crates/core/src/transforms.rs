//! Analytic transverse Fourier transforms of the pump modes and a discrete
//! oracle for validating them.
//!
//! Transform convention: `F(nu) = ∬ f(r) exp(-2 pi i nu . r) dr`, in-medium
//! spatial frequencies throughout.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use crate::decompose::SampledField;
use crate::error::{Error, Result};
use crate::modes::{hermite, ModeIndex, PumpGeometry};

/// A spatial-frequency 3-vector in cycles/meter (in-medium).
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct SpatialFrequency {
    pub nu_x: f64,
    pub nu_y: f64,
    pub nu_z: f64,
}

impl SpatialFrequency {
    pub fn new(nu_x: f64, nu_y: f64, nu_z: f64) -> Self {
        Self { nu_x, nu_y, nu_z }
    }

    /// Component-wise sum, used for the signal + idler combination.
    pub fn plus(&self, other: &SpatialFrequency) -> SpatialFrequency {
        SpatialFrequency::new(
            self.nu_x + other.nu_x,
            self.nu_y + other.nu_y,
            self.nu_z + other.nu_z,
        )
    }

    /// Squared transverse magnitude.
    pub fn perp_sqr(&self) -> f64 {
        self.nu_x * self.nu_x + self.nu_y * self.nu_y
    }
}

/// Closed-form transverse Fourier transform of the (n, m) mode at plane z:
/// `u0 A (-2 pi i w0 nu_x)^n (-2 pi i w0 nu_y)^m exp(-pi lambda z_r xi (nu_x^2 + nu_y^2))`
/// with `A = pi w0^2`.
pub fn egh_transverse_ft(
    idx: ModeIndex,
    geom: &PumpGeometry,
    nu_x: f64,
    nu_y: f64,
    z: f64,
) -> C64 {
    let xi = geom.xi(z);
    let area = PI * geom.waist() * geom.waist();
    let mono_x = C64::new(0.0, -2.0 * PI * geom.waist() * nu_x).powu(idx.n);
    let mono_y = C64::new(0.0, -2.0 * PI * geom.waist() * nu_y).powu(idx.m);
    let damping =
        (-xi * PI * geom.lambda() * geom.rayleigh_range() * (nu_x * nu_x + nu_y * nu_y)).exp();
    geom.amplitude() * area * mono_x * mono_y * damping
}

/// A sampled transverse spectrum on uniform frequency axes (the conjugate
/// grid of the source field). Row-major with nu_x as the outer index.
#[derive(Clone, Debug)]
pub struct SampledSpectrum {
    nu_x: Vec<f64>,
    nu_y: Vec<f64>,
    values: Vec<C64>,
}

impl SampledSpectrum {
    pub fn nu_x(&self) -> &[f64] {
        &self.nu_x
    }

    pub fn nu_y(&self) -> &[f64] {
        &self.nu_y
    }

    pub fn value(&self, ix: usize, iy: usize) -> C64 {
        self.values[ix * self.nu_y.len() + iy]
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn nu_x_step(&self) -> f64 {
        self.nu_x[1] - self.nu_x[0]
    }

    pub fn nu_y_step(&self) -> f64 {
        self.nu_y[1] - self.nu_y[0]
    }
}

fn is_pow2(n: usize) -> bool {
    n >= 2 && n & (n - 1) == 0
}

/// One centered-DFT pass along contiguous rows of length `n`:
/// `S_k = (-1)^(n/2) (-1)^k FFT[(-1)^j f_j]_k`, which equals
/// `sum_j f_j exp(-2 pi i (k - n/2)(j - n/2)/n)`. Applying it per axis turns
/// the FFT into a direct sample of the continuous kernel on the centered
/// grid, without any circular shift.
fn centered_dft_rows(data: &mut [C64], n: usize) {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let centre_sign = if (n / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    for row in data.chunks_mut(n) {
        for (j, v) in row.iter_mut().enumerate() {
            if j % 2 == 1 {
                *v = -*v;
            }
        }
        fft.process(row);
        for (k, v) in row.iter_mut().enumerate() {
            let sign = if k % 2 == 1 { -centre_sign } else { centre_sign };
            *v *= sign;
        }
    }
}

fn transpose(data: &[C64], rows: usize, cols: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); data.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = data[r * cols + c];
        }
    }
    out
}

fn check_dft_grid(axis: &[f64]) -> Result<()> {
    if !is_pow2(axis.len()) {
        return Err(Error::InvalidInput(format!(
            "DFT oracle needs a power-of-two grid, got {} samples",
            axis.len()
        )));
    }
    let extent = (axis[1] - axis[0]) * axis.len() as f64;
    if axis[axis.len() / 2].abs() > 1e-9 * extent {
        return Err(Error::InvalidInput(
            "DFT oracle needs a centered grid with x = 0 on-grid".into(),
        ));
    }
    Ok(())
}

/// Discrete approximation of the continuous transverse Fourier transform of
/// a sampled field, scaled by the cell area and returned on physical
/// frequency axes `(k - n/2) / extent`.
///
/// The samples must decay below 1e-6 of their peak before the grid boundary;
/// otherwise the periodic extension leaks and the call fails.
pub fn dft_oracle(field: &SampledField) -> Result<SampledSpectrum> {
    let (nx, ny) = (field.xs().len(), field.ys().len());
    check_dft_grid(field.xs())?;
    check_dft_grid(field.ys())?;

    let peak = field.peak();
    if peak == 0.0 {
        return Err(Error::InsufficientPower);
    }
    let ratio = field.boundary_peak() / peak;
    if ratio > 1e-6 {
        return Err(Error::InsufficientDomain { ratio, limit: 1e-6 });
    }

    let dx = field.x_step();
    let dy = field.y_step();
    let mut data = field.values().to_vec();
    // y axis (contiguous), then x axis via transpose.
    centered_dft_rows(&mut data, ny);
    let mut data = transpose(&data, nx, ny);
    centered_dft_rows(&mut data, nx);
    let data = transpose(&data, ny, nx);

    let cell = dx * dy;
    let values = data.into_iter().map(|v| v * cell).collect();
    let extent_x = dx * nx as f64;
    let extent_y = dy * ny as f64;
    let nu_x = (0..nx)
        .map(|k| (k as f64 - (nx / 2) as f64) / extent_x)
        .collect();
    let nu_y = (0..ny)
        .map(|k| (k as f64 - (ny / 2) as f64) / extent_y)
        .collect();
    Ok(SampledSpectrum { nu_x, nu_y, values })
}

/// 1-D counterpart of [`dft_oracle`] for scaling-rule checks. Returns the
/// frequency axis and the transform values.
pub fn dft_oracle_1d(values: &[C64], xs: &[f64]) -> Result<(Vec<f64>, Vec<C64>)> {
    let n = xs.len();
    check_dft_grid(xs)?;
    if values.len() != n {
        return Err(Error::InvalidInput("value/axis length mismatch".into()));
    }
    let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Err(Error::InsufficientPower);
    }
    let boundary = values[0].norm().max(values[n - 1].norm());
    if boundary / peak > 1e-6 {
        return Err(Error::InsufficientDomain {
            ratio: boundary / peak,
            limit: 1e-6,
        });
    }
    let dx = xs[1] - xs[0];
    let mut data = values.to_vec();
    centered_dft_rows(&mut data, n);
    let extent = dx * n as f64;
    let nu = (0..n)
        .map(|k| (k as f64 - (n / 2) as f64) / extent)
        .collect();
    Ok((nu, data.into_iter().map(|v| v * dx).collect()))
}

/// Numerically validates, in one dimension, that differentiation under the
/// transform picks up a bare `(2 pi i nu)^n` factor while only the argument
/// of the transformed profile carries the scale `a`:
/// `FT(d^n/dx^n f(x/a)) = a (2 pi i nu)^n F(a nu)` for the unit Gaussian
/// `f(x) = exp(-pi x^2)`.
///
/// Returns the maximum discrepancy relative to the analytic peak over the
/// central half of the frequency grid.
pub fn scaling_rule_check(n: u32, a: f64, samples: usize) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::InvalidInput("scale must be positive".into()));
    }
    let half_width = 12.0 * a;
    let step = 2.0 * half_width / samples as f64;
    let xs: Vec<f64> = (0..samples)
        .map(|j| (j as f64 - (samples / 2) as f64) * step)
        .collect();
    // d^n/dx^n exp(-pi (x/a)^2) in closed form, s = a / sqrt(pi).
    let s = a / PI.sqrt();
    let g: Vec<C64> = xs
        .iter()
        .map(|&x| {
            let arg = C64::new(x / s, 0.0);
            C64::new(-1.0 / s, 0.0).powu(n) * hermite(n, arg) * (-((x / s) * (x / s))).exp()
        })
        .collect();
    let (nu, dft) = dft_oracle_1d(&g, &xs)?;

    let analytic: Vec<C64> = nu
        .iter()
        .map(|&v| a * C64::new(0.0, 2.0 * PI * v).powu(n) * (-PI * (a * v) * (a * v)).exp())
        .collect();
    let peak = analytic.iter().map(|v| v.norm()).fold(0.0, f64::max);

    let lo = samples / 4;
    let hi = 3 * samples / 4;
    let mut worst = 0.0f64;
    for k in lo..hi {
        worst = worst.max((dft[k] - analytic[k]).norm() / peak);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::TransversePoint;

    fn geom() -> PumpGeometry {
        PumpGeometry::new(5e-7, 2e-5).unwrap()
    }

    #[test]
    fn ft_at_zero_frequency_is_beam_area() {
        let g = geom();
        let v = egh_transverse_ft(ModeIndex::new(0, 0), &g, 0.0, 0.0, 0.0);
        let area = PI * g.waist() * g.waist();
        assert!((v - C64::new(area, 0.0)).norm() < 1e-15 * area);
    }

    #[test]
    fn ft_monomial_zero_kills_odd_mode() {
        let g = geom();
        let v = egh_transverse_ft(ModeIndex::new(1, 0), &g, 0.0, 0.37 / g.waist(), 1e-3);
        assert_eq!(v, C64::new(0.0, 0.0));
    }

    #[test]
    fn ft_sign_convention_first_order() {
        let g = geom();
        let v = egh_transverse_ft(ModeIndex::new(1, 0), &g, 0.05 / g.waist(), 0.0, 0.0);
        assert!((v.arg() + PI / 2.0).abs() < 1e-15, "arg = {}", v.arg());
    }

    #[test]
    fn oracle_reproduces_gaussian_self_transform() {
        // exp(-pi rho^2 / a^2) -> a^2 exp(-pi a^2 nu^2)
        let a = 1.7e-5;
        let field = SampledField::new(
            dft_axis(256, 16.0 * a),
            dft_axis(256, 16.0 * a),
            dft_axis(256, 16.0 * a)
                .iter()
                .flat_map(|&x| {
                    dft_axis(256, 16.0 * a)
                        .iter()
                        .map(|&y| C64::new((-PI * (x * x + y * y) / (a * a)).exp(), 0.0))
                        .collect::<Vec<_>>()
                })
                .collect(),
        )
        .unwrap();
        let spec = dft_oracle(&field).unwrap();
        let mut worst = 0.0f64;
        for ix in 64..192 {
            for iy in 64..192 {
                let nu2 = spec.nu_x()[ix].powi(2) + spec.nu_y()[iy].powi(2);
                let expect = a * a * (-PI * a * a * nu2).exp();
                worst = worst.max((spec.value(ix, iy) - C64::new(expect, 0.0)).norm() / (a * a));
            }
        }
        assert!(worst < 1e-6, "worst rel {worst}");
    }

    #[test]
    fn oracle_rejects_constant_field() {
        let field = SampledField::new(
            dft_axis(64, 1.0),
            dft_axis(64, 1.0),
            vec![C64::new(1.0, 0.0); 64 * 64],
        )
        .unwrap();
        assert!(matches!(
            dft_oracle(&field),
            Err(Error::InsufficientDomain { .. })
        ));
    }

    #[test]
    fn oracle_rejects_non_pow2_grid() {
        let g = geom();
        let field = SampledField::new(
            dft_axis(100, 10.0 * g.waist()),
            dft_axis(100, 10.0 * g.waist()),
            dft_axis(100, 10.0 * g.waist())
                .iter()
                .flat_map(|&x| {
                    dft_axis(100, 10.0 * g.waist())
                        .iter()
                        .map(|&y| {
                            egh_eval(
                                ModeIndex::new(0, 0),
                                &g,
                                TransversePoint::new(x, y, 0.0),
                            )
                        })
                        .collect::<Vec<_>>()
                })
                .collect(),
        )
        .unwrap();
        assert!(dft_oracle(&field).is_err());
    }

    #[test]
    fn scaling_rule_plain_gaussian() {
        let worst = scaling_rule_check(0, 2e-5, 2048).unwrap();
        assert!(worst < 1e-8, "worst {worst}");
    }

    fn dft_axis(n: usize, half_width: f64) -> Vec<f64> {
        let step = 2.0 * half_width / n as f64;
        (0..n)
            .map(|j| (j as f64 - (n / 2) as f64) * step)
            .collect()
    }

    use crate::modes::egh_eval;
}
