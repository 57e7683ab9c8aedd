//! Elegant (complex-argument) Gauss-Hermite pump modes.
//!
//! The mode of order (n, m) is the n-th x-derivative and m-th y-derivative of
//! the complex Gaussian kernel `exp(-pi rho^2 / (lambda z_r xi))`, scaled by
//! `u0 (-w0)^(n+m) / xi` with `xi = 1 + i z / z_r`. Evaluation uses the
//! closed Hermite-polynomial form of those derivatives.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::quad::adaptive_trapezoid_2d;

/// Transverse mode order labels (n along x, m along y).
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeIndex {
    pub n: u32,
    pub m: u32,
}

impl ModeIndex {
    pub fn new(n: u32, m: u32) -> Self {
        Self { n, m }
    }

    /// Total order n + m.
    pub fn order(&self) -> u32 {
        self.n + self.m
    }
}

/// A point in pump-beam coordinates; z runs along the pump optic axis with
/// the origin at the focus.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct TransversePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl TransversePoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }
}

/// Pump beam geometry. The wavelength is the in-medium value (free-space
/// wavelength divided by the pump refractive index); the Rayleigh range is
/// always derived as `pi w0^2 / lambda` and never set independently.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct PumpGeometry {
    lambda: f64,
    w0: f64,
    z_r: f64,
    u0: C64,
}

impl PumpGeometry {
    /// Geometry with unit amplitude. Rejects non-positive wavelength or waist.
    pub fn new(lambda: f64, w0: f64) -> Result<Self> {
        Self::with_amplitude(lambda, w0, C64::new(1.0, 0.0))
    }

    pub fn with_amplitude(lambda: f64, w0: f64, u0: C64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidGeometry(format!(
                "wavelength must be positive and finite, got {lambda}"
            )));
        }
        if !(w0 > 0.0) || !w0.is_finite() {
            return Err(Error::InvalidGeometry(format!(
                "waist must be positive and finite, got {w0}"
            )));
        }
        Ok(Self {
            lambda,
            w0,
            z_r: PI * w0 * w0 / lambda,
            u0,
        })
    }

    /// In-medium pump wavelength.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Beam waist w0.
    pub fn waist(&self) -> f64 {
        self.w0
    }

    /// Rayleigh range `pi w0^2 / lambda`.
    pub fn rayleigh_range(&self) -> f64 {
        self.z_r
    }

    /// Amplitude constant u0.
    pub fn amplitude(&self) -> C64 {
        self.u0
    }

    /// Pump wavenumber `2 pi / lambda`.
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.lambda
    }

    /// Complex beam parameter `xi(z) = 1 + i z / z_r`.
    pub fn xi(&self, z: f64) -> C64 {
        C64::new(1.0, z / self.z_r)
    }
}

/// `xi^p` through the principal logarithm. `Re xi = 1`, so the branch cut is
/// never crossed and the result is smooth in z.
pub(crate) fn xi_pow(xi: C64, p: f64) -> C64 {
    (xi.ln() * p).exp()
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Physicists' Hermite polynomial H_n at a complex argument, by the
/// recursion `H_{k+1} = 2 w H_k - 2 k H_{k-1}`.
pub fn hermite(n: u32, w: C64) -> C64 {
    if n == 0 {
        return C64::new(1.0, 0.0);
    }
    let mut prev = C64::new(1.0, 0.0);
    let mut cur = 2.0 * w;
    for k in 1..n {
        let next = 2.0 * w * cur - 2.0 * (k as f64) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// The complex Gaussian kernel `exp(-pi (x^2 + y^2) / (lambda z_r xi(z)))`
/// at a possibly complex transverse position. Exposed for derivative-based
/// cross-checks of [`egh_eval`].
pub fn gaussian_kernel(geom: &PumpGeometry, x: C64, y: C64, z: f64) -> C64 {
    let xi = geom.xi(z);
    (-(x * x + y * y) * PI / (geom.lambda() * geom.rayleigh_range() * xi)).exp()
}

/// Elegant Gauss-Hermite mode u_nm at a point:
/// `u0 xi^(-1-(n+m)/2) H_n(x/(w0 sqrt(xi))) H_m(y/(w0 sqrt(xi))) exp(-pi rho^2/(lambda z_r xi))`.
pub fn egh_eval(idx: ModeIndex, geom: &PumpGeometry, p: TransversePoint) -> C64 {
    let xi = geom.xi(p.z);
    let s = geom.waist() * xi.sqrt();
    let pref = geom.amplitude() * xi_pow(xi, -1.0 - 0.5 * idx.order() as f64);
    pref
        * hermite(idx.n, C64::new(p.x, 0.0) / s)
        * hermite(idx.m, C64::new(p.y, 0.0) / s)
        * gaussian_kernel(geom, C64::new(p.x, 0.0), C64::new(p.y, 0.0), p.z)
}

/// Biorthogonal companion polynomial
/// `H_n(sqrt(pi/(lambda z_r xi*)) x) H_m(sqrt(pi/(lambda z_r xi*)) y)`,
/// with `xi*` the conjugate of `xi(z)`. At the waist plane (z = 0, xi = 1)
/// this is the exact dual of u_nm under the plain overlap integral; away
/// from the waist use [`biorthogonal_adjoint`], which keeps the pairing
/// z-invariant.
pub fn psi_eval(idx: ModeIndex, geom: &PumpGeometry, p: TransversePoint) -> C64 {
    let xi_c = geom.xi(p.z).conj();
    let scale = (C64::new(PI / (geom.lambda() * geom.rayleigh_range()), 0.0) / xi_c).sqrt();
    hermite(idx.n, scale * p.x) * hermite(idx.m, scale * p.y)
}

/// Propagation-invariant adjoint of u_nm:
/// `xi^((n+m)/2) H_n(x/(w0 sqrt(xi))) H_m(y/(w0 sqrt(xi)))`.
///
/// Pairing u_a against this function makes the overlap integral vanish for
/// a != b at every plane and keeps the diagonal constant in z; it reduces to
/// [`psi_eval`] at z = 0.
pub fn biorthogonal_adjoint(idx: ModeIndex, geom: &PumpGeometry, p: TransversePoint) -> C64 {
    let xi = geom.xi(p.z);
    let s = geom.waist() * xi.sqrt();
    xi_pow(xi, 0.5 * idx.order() as f64)
        * hermite(idx.n, C64::new(p.x, 0.0) / s)
        * hermite(idx.m, C64::new(p.y, 0.0) / s)
}

/// Closed form of the diagonal overlap constant
/// `f_nm = u0 lambda z_r 2^(n+m) n! m!`.
pub fn overlap_normalization(idx: ModeIndex, geom: &PumpGeometry) -> C64 {
    geom.amplitude()
        * geom.lambda()
        * geom.rayleigh_range()
        * 2f64.powi(idx.order() as i32)
        * factorial(idx.n)
        * factorial(idx.m)
}

/// Overlap `∬ u_a(x,y,z) · adjoint_b(x,y,z) dx dy` by adaptive quadrature on
/// the square `[-R, R]^2`, `R = 8 w0 max(1, |sqrt(xi)|)`. Approximately zero
/// for a != b and equal to [`overlap_normalization`] for a = b, at any plane.
pub fn biorthogonal_overlap(
    a: ModeIndex,
    b: ModeIndex,
    geom: &PumpGeometry,
    z: f64,
) -> Result<C64> {
    let half_width = 8.0 * geom.waist() * geom.xi(z).sqrt().norm().max(1.0);
    let scale = (geom.amplitude() * geom.lambda() * geom.rayleigh_range()).norm();
    adaptive_trapezoid_2d(
        |x, y| {
            let p = TransversePoint::new(x, y, z);
            egh_eval(a, geom, p) * biorthogonal_adjoint(b, geom, p)
        },
        half_width,
        1e-10,
        scale,
    )
}

/// Rectangular set of sample points for finite-difference checks.
#[derive(Clone, Debug)]
pub struct SampleGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub zs: Vec<f64>,
}

impl SampleGrid {
    /// Reference grid for paraxial-equation checks: 7 x 7 transverse points
    /// within +-1.5 w0 and three planes within +-0.4 z_r.
    pub fn paraxial_reference(geom: &PumpGeometry) -> Self {
        let lin = |half: f64, count: usize| -> Vec<f64> {
            (0..count)
                .map(|i| half * (2.0 * i as f64 / (count - 1) as f64 - 1.0))
                .collect()
        };
        Self {
            xs: lin(1.5 * geom.waist(), 7),
            ys: lin(1.5 * geom.waist(), 7),
            zs: lin(0.4 * geom.rayleigh_range(), 3),
        }
    }
}

/// Worst-case paraxial residual of an arbitrary field over a sample grid:
/// `max |laplacian_perp u + 2 i k du/dz| / (k^2 max |u|)`, both derivatives
/// by second-order central differences with steps (hx, hz).
pub fn paraxial_residual_of<F>(field: F, k: f64, grid: &SampleGrid, hx: f64, hz: f64) -> f64
where
    F: Fn(f64, f64, f64) -> C64,
{
    let mut max_residual = 0.0f64;
    let mut max_field = 0.0f64;
    for &x in &grid.xs {
        for &y in &grid.ys {
            for &z in &grid.zs {
                let u = field(x, y, z);
                let lap = (field(x + hx, y, z) - 2.0 * u + field(x - hx, y, z)
                    + field(x, y + hx, z)
                    - 2.0 * u
                    + field(x, y - hx, z))
                    / (hx * hx);
                let du_dz = (field(x, y, z + hz) - field(x, y, z - hz)) / (2.0 * hz);
                let res = (lap + C64::new(0.0, 2.0 * k) * du_dz).norm();
                max_residual = max_residual.max(res);
                max_field = max_field.max(u.norm());
            }
        }
    }
    max_residual / (k * k * max_field)
}

/// Paraxial residual of the (n, m) mode with the default steps
/// (w0 / 200, z_r / 200).
pub fn paraxial_residual(idx: ModeIndex, geom: &PumpGeometry, grid: &SampleGrid) -> f64 {
    paraxial_residual_of(
        |x, y, z| egh_eval(idx, geom, TransversePoint::new(x, y, z)),
        geom.wavenumber(),
        grid,
        geom.waist() / 200.0,
        geom.rayleigh_range() / 200.0,
    )
}

/// A normalized set of pump mode coefficients over indices with
/// `n + m <= max_order`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeExpansion {
    coefficients: BTreeMap<ModeIndex, C64>,
    max_order: u32,
}

impl ModeExpansion {
    /// Builds an expansion from raw coefficients, renormalizing so that
    /// `sum |c|^2 = 1`. Rejects empty/zero input and indices above the order
    /// bound.
    pub fn new(coefficients: BTreeMap<ModeIndex, C64>, max_order: u32) -> Result<Self> {
        for idx in coefficients.keys() {
            if idx.order() > max_order {
                return Err(Error::InvalidExpansion(format!(
                    "index ({}, {}) exceeds max order {max_order}",
                    idx.n, idx.m
                )));
            }
        }
        let power: f64 = coefficients.values().map(|c| c.norm_sqr()).sum();
        if !(power > 0.0) || !power.is_finite() {
            return Err(Error::InvalidExpansion(format!(
                "total coefficient power must be positive and finite, got {power}"
            )));
        }
        let scale = power.sqrt();
        let coefficients = coefficients
            .into_iter()
            .map(|(k, v)| (k, v / scale))
            .collect();
        Ok(Self {
            coefficients,
            max_order,
        })
    }

    /// The pure (n, m) mode.
    pub fn single(idx: ModeIndex) -> Self {
        let mut coefficients = BTreeMap::new();
        coefficients.insert(idx, C64::new(1.0, 0.0));
        Self {
            coefficients,
            max_order: idx.order(),
        }
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    /// Coefficient for an index, zero if absent.
    pub fn coefficient(&self, idx: ModeIndex) -> C64 {
        self.coefficients
            .get(&idx)
            .copied()
            .unwrap_or(C64::new(0.0, 0.0))
    }

    /// Coefficients in index order.
    pub fn iter(&self) -> impl Iterator<Item = (ModeIndex, C64)> + '_ {
        self.coefficients.iter().map(|(k, v)| (*k, *v))
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `sum |c|^2`; 1 within 1e-12 by construction.
    pub fn total_power(&self) -> f64 {
        self.coefficients.values().map(|c| c.norm_sqr()).sum()
    }

    /// Synthesized field value `sum c_nm u_nm` at a point.
    pub fn field_at(&self, geom: &PumpGeometry, p: TransversePoint) -> C64 {
        self.iter()
            .map(|(idx, c)| c * egh_eval(idx, geom, p))
            .sum()
    }
}
