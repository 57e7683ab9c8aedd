//! Decomposition of sampled transverse fields into mode coefficients.
//!
//! The overlap against the companion polynomials is taken at the waist plane
//! (z = 0), where the pump field and the mode basis share their origin.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::modes::{
    egh_eval, overlap_normalization, psi_eval, ModeExpansion, ModeIndex, PumpGeometry,
    TransversePoint,
};

/// A complex field sampled on a uniform rectangular grid at the waist plane.
/// Values are stored row-major with x as the outer index.
#[derive(Clone, Debug)]
pub struct SampledField {
    xs: Vec<f64>,
    ys: Vec<f64>,
    values: Vec<C64>,
}

impl SampledField {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, values: Vec<C64>) -> Result<Self> {
        if xs.len() < 2 || ys.len() < 2 {
            return Err(Error::InvalidInput(
                "sampled field needs at least 2 points per axis".into(),
            ));
        }
        if values.len() != xs.len() * ys.len() {
            return Err(Error::InvalidInput(format!(
                "value count {} does not match {} x {} grid",
                values.len(),
                xs.len(),
                ys.len()
            )));
        }
        check_uniform(&xs)?;
        check_uniform(&ys)?;
        Ok(Self { xs, ys, values })
    }

    /// Samples a function on a centered square grid of `n x n` points
    /// spanning `[-half_width, half_width]` per axis.
    pub fn from_fn<F>(f: F, half_width: f64, n: usize) -> Result<Self>
    where
        F: Fn(f64, f64) -> C64,
    {
        let step = 2.0 * half_width / (n - 1) as f64;
        let axis: Vec<f64> = (0..n).map(|i| -half_width + step * i as f64).collect();
        let mut values = Vec::with_capacity(n * n);
        for &x in &axis {
            for &y in &axis {
                values.push(f(x, y));
            }
        }
        Self::new(axis.clone(), axis, values)
    }

    /// Samples a function on the DFT-convention grid `x_j = (j - n/2) d`,
    /// `d = 2 half_width / n`, which puts x = 0 on-grid and excludes the
    /// upper endpoint. This is the layout [`crate::transforms::dft_oracle`]
    /// expects.
    pub fn dft_grid<F>(f: F, half_width: f64, n: usize) -> Result<Self>
    where
        F: Fn(f64, f64) -> C64,
    {
        let step = 2.0 * half_width / n as f64;
        let axis: Vec<f64> = (0..n)
            .map(|j| (j as f64 - (n / 2) as f64) * step)
            .collect();
        let mut values = Vec::with_capacity(n * n);
        for &x in &axis {
            for &y in &axis {
                values.push(f(x, y));
            }
        }
        Self::new(axis.clone(), axis, values)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn value(&self, ix: usize, iy: usize) -> C64 {
        self.values[ix * self.ys.len() + iy]
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn x_step(&self) -> f64 {
        self.xs[1] - self.xs[0]
    }

    pub fn y_step(&self) -> f64 {
        self.ys[1] - self.ys[0]
    }

    /// Largest |value| over the grid.
    pub fn peak(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest |value| over the outermost ring of samples.
    pub fn boundary_peak(&self) -> f64 {
        let (nx, ny) = (self.xs.len(), self.ys.len());
        let mut peak = 0.0f64;
        for ix in 0..nx {
            for iy in 0..ny {
                if ix == 0 || ix == nx - 1 || iy == 0 || iy == ny - 1 {
                    peak = peak.max(self.value(ix, iy).norm());
                }
            }
        }
        peak
    }

    /// Trapezoid weight for an index along an axis of length `len`.
    fn weight(i: usize, len: usize) -> f64 {
        if i == 0 || i == len - 1 {
            0.5
        } else {
            1.0
        }
    }

    /// Trapezoid integral of `field * g` over the grid.
    pub fn integrate_against<G>(&self, g: G) -> C64
    where
        G: Fn(f64, f64) -> C64,
    {
        let (nx, ny) = (self.xs.len(), self.ys.len());
        let mut acc = C64::new(0.0, 0.0);
        for ix in 0..nx {
            let wx = Self::weight(ix, nx);
            let mut row = C64::new(0.0, 0.0);
            for iy in 0..ny {
                row += Self::weight(iy, ny) * self.value(ix, iy) * g(self.xs[ix], self.ys[iy]);
            }
            acc += wx * row;
        }
        acc * self.x_step() * self.y_step()
    }

    /// Trapezoid integral of `|field|^2`.
    pub fn power(&self) -> f64 {
        let (nx, ny) = (self.xs.len(), self.ys.len());
        let mut acc = 0.0;
        for ix in 0..nx {
            let wx = Self::weight(ix, nx);
            for iy in 0..ny {
                acc += wx * Self::weight(iy, ny) * self.value(ix, iy).norm_sqr();
            }
        }
        acc * self.x_step() * self.y_step()
    }
}

fn check_uniform(axis: &[f64]) -> Result<()> {
    let step = axis[1] - axis[0];
    if !(step > 0.0) {
        return Err(Error::InvalidInput("axis must be strictly increasing".into()));
    }
    for w in axis.windows(2) {
        if ((w[1] - w[0]) - step).abs() > 1e-9 * step {
            return Err(Error::InvalidInput("axis spacing is not uniform".into()));
        }
    }
    Ok(())
}

/// Result of a field decomposition.
#[derive(Clone, Debug)]
pub struct Decomposition {
    /// Normalized coefficients.
    pub expansion: ModeExpansion,
    /// Raw (unnormalized) coefficients as projected from the field.
    pub raw_coefficients: BTreeMap<ModeIndex, C64>,
    /// Power of the synthesized truncated expansion, `∬ |Σ c u_nm|^2`.
    pub captured_power: f64,
    /// Power of the input samples, `∬ |field|^2`.
    pub input_power: f64,
}

/// Projects a sampled waist-plane field onto all modes with order <= N:
/// `c_nm = (∬ field ψ_nm dx dy) / f_nm`, then renormalizes.
///
/// The grid must span at least +-5 w0 per axis and the samples must decay
/// below 1e-6 of their peak before the boundary.
pub fn decompose(
    field: &SampledField,
    geom: &PumpGeometry,
    max_order: u32,
) -> Result<Decomposition> {
    let reach = 5.0 * geom.waist();
    let eps = 1e-9 * geom.waist();
    if field.xs()[0] > -reach + eps
        || *field.xs().last().unwrap() < reach - eps
        || field.ys()[0] > -reach + eps
        || *field.ys().last().unwrap() < reach - eps
    {
        return Err(Error::InvalidInput(format!(
            "grid must cover at least +-{reach:.3e} m per axis"
        )));
    }
    let peak = field.peak();
    if peak == 0.0 {
        return Err(Error::InsufficientPower);
    }
    let ratio = field.boundary_peak() / peak;
    if ratio > 1e-6 {
        return Err(Error::InsufficientDomain { ratio, limit: 1e-6 });
    }

    let mut raw = BTreeMap::new();
    for n in 0..=max_order {
        for m in 0..=(max_order - n) {
            let idx = ModeIndex::new(n, m);
            let overlap = field.integrate_against(|x, y| {
                psi_eval(idx, geom, TransversePoint::new(x, y, 0.0))
            });
            raw.insert(idx, overlap / overlap_normalization(idx, geom));
        }
    }

    let raw_power: f64 = raw.values().map(|c| c.norm_sqr()).sum();
    if !(raw_power > 0.0) {
        return Err(Error::InsufficientPower);
    }
    let expansion = ModeExpansion::new(raw.clone(), max_order)?;

    // Power actually reconstructed by the truncated expansion, on the same grid.
    let synth = synthesize(&raw, geom, field.xs(), field.ys(), 0.0);
    Ok(Decomposition {
        expansion,
        raw_coefficients: raw,
        captured_power: synth.power(),
        input_power: field.power(),
    })
}

/// Evaluates `Σ c_nm u_nm` over a grid at plane z.
pub fn synthesize(
    coefficients: &BTreeMap<ModeIndex, C64>,
    geom: &PumpGeometry,
    xs: &[f64],
    ys: &[f64],
    z: f64,
) -> SampledField {
    let mut values = Vec::with_capacity(xs.len() * ys.len());
    for &x in xs {
        for &y in ys {
            let p = TransversePoint::new(x, y, z);
            values.push(
                coefficients
                    .iter()
                    .map(|(idx, c)| c * egh_eval(*idx, geom, p))
                    .sum(),
            );
        }
    }
    SampledField {
        xs: xs.to_vec(),
        ys: ys.to_vec(),
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom() -> PumpGeometry {
        PumpGeometry::new(5e-7, 2e-5).unwrap()
    }

    fn sample_mode(idx: ModeIndex, g: &PumpGeometry) -> SampledField {
        SampledField::from_fn(
            |x, y| egh_eval(idx, g, TransversePoint::new(x, y, 0.0)),
            6.0 * g.waist(),
            257,
        )
        .unwrap()
    }

    #[test]
    fn recovers_pure_fundamental() {
        let g = geom();
        let d = decompose(&sample_mode(ModeIndex::new(0, 0), &g), &g, 3).unwrap();
        let c00 = d.expansion.coefficient(ModeIndex::new(0, 0));
        assert!((c00 - C64::new(1.0, 0.0)).norm() < 1e-8);
        for (idx, c) in d.expansion.iter() {
            if idx != ModeIndex::new(0, 0) {
                assert!(c.norm() < 1e-8, "({},{}) = {c}", idx.n, idx.m);
            }
        }
        assert!((d.captured_power / d.input_power - 1.0).abs() < 1e-8);
    }

    #[test]
    fn zero_field_is_rejected() {
        let g = geom();
        let f = SampledField::from_fn(|_, _| C64::new(0.0, 0.0), 6.0 * g.waist(), 65).unwrap();
        assert!(matches!(
            decompose(&f, &g, 2),
            Err(Error::InsufficientPower)
        ));
    }

    #[test]
    fn leaking_field_is_rejected() {
        let g = geom();
        let f = SampledField::from_fn(|_, _| C64::new(1.0, 0.0), 6.0 * g.waist(), 65).unwrap();
        assert!(matches!(
            decompose(&f, &g, 2),
            Err(Error::InsufficientDomain { .. })
        ));
    }

    #[test]
    fn narrow_grid_is_rejected() {
        let g = geom();
        let f = sample_mode(ModeIndex::new(0, 0), &g);
        let narrow = SampledField::from_fn(
            |x, y| egh_eval(ModeIndex::new(0, 0), &g, TransversePoint::new(x, y, 0.0)),
            4.0 * g.waist(),
            129,
        )
        .unwrap();
        assert!(decompose(&narrow, &g, 2).is_err());
        assert!(decompose(&f, &g, 2).is_ok());
    }
}
