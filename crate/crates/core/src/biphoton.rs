//! Assembly of the biphoton joint spectral amplitude.
//!
//! For a pump expanded over modes with coefficients `c_nm`, the amplitude at
//! an on-shell signal/idler pair is
//!
//! ```text
//! A = 2 h chi_eff V u0 * u~(f_s + f_i) * sqrt(f_s f_i) * Phi(delta_nu)
//!     * exp(-pi lambda z_r |nu_+perp|^2)
//!     * sum_nm c_nm (2 pi i w0 nu_+x)^n (2 pi i w0 nu_+y)^m
//! ```
//!
//! with `nu_+ = nu_s + nu_i` and `V = pi w0^2 L`. The constant
//! `2 h chi_eff V u0` is kept as a separate prefactor so that shape
//! comparisons can ignore the absolute normalization.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::modes::{ModeExpansion, ModeIndex, PumpGeometry};
use crate::phasematch::{
    delta_nu, on_shell_nu_z, phi_multi, ChiTensor, CrystalConfig, MismatchConvention,
};
use crate::transforms::SpatialFrequency;

/// Planck constant, J s.
pub const PLANCK: f64 = 6.626_070_15e-34;

/// A single signal or idler plane-wave label.
#[derive(Clone, Debug)]
pub struct PhotonMode {
    pub nu: SpatialFrequency,
    /// Temporal frequency in Hz; h f is the photon energy.
    pub f: f64,
    /// Complex polarization unit 3-vector.
    pub pol: [C64; 3],
}

impl PhotonMode {
    /// Builds a mode from explicit components, normalizing the polarization.
    pub fn new(nu: SpatialFrequency, f: f64, pol: [C64; 3]) -> Result<Self> {
        if !(f > 0.0) || !f.is_finite() {
            return Err(Error::InvalidInput(format!(
                "photon frequency must be positive, got {f}"
            )));
        }
        let norm = pol.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidInput("polarization vector is zero".into()));
        }
        let pol = [pol[0] / norm, pol[1] / norm, pol[2] / norm];
        Ok(Self { nu, f, pol })
    }

    /// Builds an on-shell mode: nu_z from the in-medium dispersion sphere of
    /// radius `n f / c`.
    pub fn on_shell(nu_x: f64, nu_y: f64, f: f64, n: f64, pol: [C64; 3]) -> Result<Self> {
        let nu_perp = (nu_x * nu_x + nu_y * nu_y).sqrt();
        let nu_z = on_shell_nu_z(f, n, nu_perp)?;
        Self::new(SpatialFrequency::new(nu_x, nu_y, nu_z), f, pol)
    }
}

/// Pump spectral envelope `u~(f)` evaluated at the sum frequency.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum PumpEnvelope {
    /// Monochromatic pump: a Kronecker delta discretized on a frequency grid
    /// cell, so that probabilities stay finite.
    Cw { f_p: f64, grid_cell: f64 },
    /// Transform-limited Gaussian pulse with rms bandwidth sigma_f.
    GaussianPulse { f_p: f64, sigma_f: f64 },
}

impl PumpEnvelope {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            PumpEnvelope::Cw { f_p, grid_cell } => *f_p > 0.0 && *grid_cell > 0.0,
            PumpEnvelope::GaussianPulse { f_p, sigma_f } => *f_p > 0.0 && *sigma_f > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid pump envelope {self:?}")))
        }
    }

    pub fn center(&self) -> f64 {
        match self {
            PumpEnvelope::Cw { f_p, .. } | PumpEnvelope::GaussianPulse { f_p, .. } => *f_p,
        }
    }
}

/// `u~(f_plus)`: 1/0 within half a grid cell for CW,
/// `exp(-(f_plus - f_p)^2 / (4 sigma_f^2))` for a Gaussian pulse.
pub fn envelope_eval(env: &PumpEnvelope, f_plus: f64) -> C64 {
    match env {
        PumpEnvelope::Cw { f_p, grid_cell } => {
            if (f_plus - f_p).abs() <= 0.5 * grid_cell {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }
        PumpEnvelope::GaussianPulse { f_p, sigma_f } => {
            let d = f_plus - f_p;
            C64::new((-d * d / (4.0 * sigma_f * sigma_f)).exp(), 0.0)
        }
    }
}

/// Contraction of the susceptibility tensor with the pump polarization and
/// the conjugated signal/idler polarizations:
/// `sum_oqr chi[o][q][r] e_p[o] e_s*[q] e_i*[r]`.
pub fn chi_effective(chi: &ChiTensor, e_p: &[C64; 3], e_s: &[C64; 3], e_i: &[C64; 3]) -> C64 {
    chi.0
        .iter()
        .enumerate()
        .flat_map(|(o, plane)| {
            plane.iter().enumerate().flat_map(move |(q, row)| {
                row.iter()
                    .enumerate()
                    .map(move |(r, &x)| x * e_p[o] * e_s[q].conj() * e_i[r].conj())
            })
        })
        .sum()
}

/// The global coupling constant `2 h chi_eff V u0` with `V = pi w0^2 L`.
pub fn jsa_prefactor(
    geom: &PumpGeometry,
    crystal: &CrystalConfig,
    pump_pol: &[C64; 3],
    s_pol: &[C64; 3],
    i_pol: &[C64; 3],
) -> C64 {
    let volume = PI * geom.waist() * geom.waist() * crystal.length;
    2.0 * PLANCK
        * chi_effective(&crystal.chi, pump_pol, s_pol, i_pol)
        * volume
        * geom.amplitude()
}

/// Shape part of the amplitude (everything except the prefactor) for an
/// arbitrary, not necessarily normalized, coefficient set. Linear in the
/// coefficients.
pub fn jsa_shape(
    coefficients: &[(ModeIndex, C64)],
    geom: &PumpGeometry,
    crystal: &CrystalConfig,
    env: &PumpEnvelope,
    signal: &PhotonMode,
    idler: &PhotonMode,
    convention: MismatchConvention,
) -> Result<C64> {
    let plus = signal.nu.plus(&idler.nu);
    let dnu = delta_nu(&signal.nu, &idler.nu, geom, convention);
    let matching = phi_multi(dnu, crystal)?;
    let damping = (-PI * geom.lambda() * geom.rayleigh_range() * plus.perp_sqr()).exp();
    let mode_sum: C64 = coefficients
        .iter()
        .map(|&(idx, c)| {
            c * C64::new(0.0, 2.0 * PI * geom.waist() * plus.nu_x).powu(idx.n)
                * C64::new(0.0, 2.0 * PI * geom.waist() * plus.nu_y).powu(idx.m)
        })
        .sum();
    let energy = (signal.f * idler.f).sqrt();
    Ok(envelope_eval(env, signal.f + idler.f) * energy * matching * damping * mode_sum)
}

/// Joint spectral amplitude at a single signal/idler pair.
#[allow(clippy::too_many_arguments)]
pub fn jsa_point(
    expansion: &ModeExpansion,
    geom: &PumpGeometry,
    crystal: &CrystalConfig,
    env: &PumpEnvelope,
    pump_pol: &[C64; 3],
    signal: &PhotonMode,
    idler: &PhotonMode,
    convention: MismatchConvention,
) -> Result<C64> {
    let coeffs: Vec<(ModeIndex, C64)> = expansion.iter().collect();
    let shape = jsa_shape(&coeffs, geom, crystal, env, signal, idler, convention)?;
    Ok(jsa_prefactor(geom, crystal, pump_pol, &signal.pol, &idler.pol) * shape)
}

/// A uniform closed range of `count` samples; a single sample sits at
/// `start`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct AxisSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.count <= 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| self.start + step * i as f64)
            .collect()
    }
}

/// Transverse-frequency grid specification for the two photons.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub nu_sx: AxisSpec,
    pub nu_sy: AxisSpec,
    pub nu_ix: AxisSpec,
    pub nu_iy: AxisSpec,
}

/// Sampled joint amplitude over the transverse-frequency grid at fixed
/// photon frequencies. `values` holds the shape part; multiply by
/// `prefactor` for the full amplitude. Storage order: nu_sx outermost,
/// then nu_sy, nu_ix, with nu_iy innermost.
#[derive(Clone, Debug)]
pub struct JointAmplitudeGrid {
    pub nu_sx: Vec<f64>,
    pub nu_sy: Vec<f64>,
    pub nu_ix: Vec<f64>,
    pub nu_iy: Vec<f64>,
    pub f_s: f64,
    pub f_i: f64,
    pub values: Vec<C64>,
    pub prefactor: C64,
}

impl JointAmplitudeGrid {
    pub fn shape(&self) -> [usize; 4] {
        [
            self.nu_sx.len(),
            self.nu_sy.len(),
            self.nu_ix.len(),
            self.nu_iy.len(),
        ]
    }

    fn flat(&self, i: [usize; 4]) -> usize {
        ((i[0] * self.nu_sy.len() + i[1]) * self.nu_ix.len() + i[2]) * self.nu_iy.len() + i[3]
    }

    /// Shape value (without the prefactor).
    pub fn value(&self, i: [usize; 4]) -> C64 {
        self.values[self.flat(i)]
    }

    /// Full amplitude including the prefactor.
    pub fn amplitude(&self, i: [usize; 4]) -> C64 {
        self.prefactor * self.value(i)
    }
}

/// Evaluates the amplitude over a Cartesian grid of transverse frequencies.
/// nu_z components are constructed on-shell from the fixed frequencies and
/// per-photon refractive indices; any evanescent grid point aborts the whole
/// evaluation with the offending indices listed.
#[allow(clippy::too_many_arguments)]
pub fn jsa_grid(
    expansion: &ModeExpansion,
    geom: &PumpGeometry,
    crystal: &CrystalConfig,
    env: &PumpEnvelope,
    pump_pol: &[C64; 3],
    spec: &GridSpec,
    f_s: f64,
    f_i: f64,
    s_pol: [C64; 3],
    i_pol: [C64; 3],
    convention: MismatchConvention,
) -> Result<JointAmplitudeGrid> {
    let prefactor = jsa_prefactor(geom, crystal, pump_pol, &s_pol, &i_pol);
    if prefactor.norm() == 0.0 {
        return Err(Error::InvalidInput(
            "susceptibility contraction vanishes for the given polarizations".into(),
        ));
    }

    let nu_sx = spec.nu_sx.values();
    let nu_sy = spec.nu_sy.values();
    let nu_ix = spec.nu_ix.values();
    let nu_iy = spec.nu_iy.values();

    let signal_modes: Vec<Vec<Option<PhotonMode>>> = nu_sx
        .iter()
        .map(|&sx| {
            nu_sy
                .iter()
                .map(|&sy| PhotonMode::on_shell(sx, sy, f_s, crystal.n_s, s_pol).ok())
                .collect()
        })
        .collect();
    let idler_modes: Vec<Vec<Option<PhotonMode>>> = nu_ix
        .iter()
        .map(|&ix| {
            nu_iy
                .iter()
                .map(|&iy| PhotonMode::on_shell(ix, iy, f_i, crystal.n_i, i_pol).ok())
                .collect()
        })
        .collect();

    let mut evanescent = Vec::new();
    for (a, row) in signal_modes.iter().enumerate() {
        for (b, mode) in row.iter().enumerate() {
            if mode.is_none() {
                for c in 0..nu_ix.len() {
                    for d in 0..nu_iy.len() {
                        evanescent.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    for (c, row) in idler_modes.iter().enumerate() {
        for (d, mode) in row.iter().enumerate() {
            if mode.is_none() {
                for a in 0..nu_sx.len() {
                    for b in 0..nu_sy.len() {
                        let idx = [a, b, c, d];
                        if !evanescent.contains(&idx) {
                            evanescent.push(idx);
                        }
                    }
                }
            }
        }
    }
    if !evanescent.is_empty() {
        evanescent.sort();
        return Err(Error::EvanescentGridPoints {
            indices: evanescent,
        });
    }

    let coeffs: Vec<(ModeIndex, C64)> = expansion.iter().collect();
    let dims = [nu_sx.len(), nu_sy.len(), nu_ix.len(), nu_iy.len()];
    let total = dims.iter().product::<usize>();
    let values: Result<Vec<C64>> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let d = flat % dims[3];
            let rest = flat / dims[3];
            let c = rest % dims[2];
            let rest = rest / dims[2];
            let b = rest % dims[1];
            let a = rest / dims[1];
            let s = signal_modes[a][b].as_ref().expect("validated above");
            let i = idler_modes[c][d].as_ref().expect("validated above");
            jsa_shape(&coeffs, geom, crystal, env, s, i, convention)
        })
        .collect();

    Ok(JointAmplitudeGrid {
        nu_sx,
        nu_sy,
        nu_ix,
        nu_iy,
        f_s,
        f_i,
        values: values?,
        prefactor,
    })
}

/// Point-detector coincidence probability: `|amp * window_s * window_i|^2`,
/// with the windows the k-space acceptance volumes of the two detectors.
pub fn coincidence_probability(amp: C64, window_s: f64, window_i: f64) -> f64 {
    (amp * window_s * window_i).norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phasematch::SPEED_OF_LIGHT;

    const X_POL: [C64; 3] = [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
    const Y_POL: [C64; 3] = [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    const Z_POL: [C64; 3] = [C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)];

    fn geom() -> PumpGeometry {
        PumpGeometry::new(5e-7, 2e-5).unwrap()
    }

    fn crystal() -> CrystalConfig {
        // chi couples a z-polarized pump to an x-polarized signal and a
        // y-polarized idler, matching the polarizations used below.
        CrystalConfig::new(
            1e-3,
            2e-4,
            1.655,
            1.655,
            1.655,
            ChiTensor::single(2, 0, 1, C64::new(1.0, 0.0)),
        )
        .unwrap()
    }

    fn pump_frequency(g: &PumpGeometry, n_p: f64) -> f64 {
        // n_p f_p / c = 1 / lambda for the in-medium wavelength
        SPEED_OF_LIGHT / (n_p * g.lambda())
    }

    #[test]
    fn chi_contraction_single_entry() {
        let chi = ChiTensor::single(2, 0, 1, C64::new(3.5, 0.0));
        let v = chi_effective(&chi, &Z_POL, &X_POL, &Y_POL);
        assert_eq!(v, C64::new(3.5, 0.0));
        // signal polarization orthogonal to every row touched by chi
        let v = chi_effective(&chi, &Z_POL, &Y_POL, &Y_POL);
        assert_eq!(v, C64::new(0.0, 0.0));
    }

    #[test]
    fn envelope_reference_values() {
        let cw = PumpEnvelope::Cw {
            f_p: 7e14,
            grid_cell: 1e9,
        };
        assert_eq!(envelope_eval(&cw, 7e14), C64::new(1.0, 0.0));
        assert_eq!(envelope_eval(&cw, 7e14 + 1e10), C64::new(0.0, 0.0));

        let pulse = PumpEnvelope::GaussianPulse {
            f_p: 7e14,
            sigma_f: 1e12,
        };
        assert_eq!(envelope_eval(&pulse, 7e14), C64::new(1.0, 0.0));
        let v = envelope_eval(&pulse, 7e14 + 2e12);
        assert!((v.re - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn collinear_fundamental_reduces_to_prefactor_and_energy() {
        let g = geom();
        let c = crystal();
        let f_p = pump_frequency(&g, c.n_p);
        let env = PumpEnvelope::Cw {
            f_p,
            grid_cell: f_p * 1e-9,
        };
        let f_half = 0.5 * f_p;
        let s = PhotonMode::on_shell(0.0, 0.0, f_half, c.n_s, X_POL).unwrap();
        let i = PhotonMode::on_shell(0.0, 0.0, f_half, c.n_i, Y_POL).unwrap();
        // nu_z sum matches 1/lambda exactly, so dnu = 0 and phi = 1.
        let exp = ModeExpansion::single(ModeIndex::new(0, 0));
        let amp = jsa_point(&exp, &g, &c, &env, &Z_POL, &s, &i,
            MismatchConvention::ExponentConsistent)
            .unwrap();
        let pref = jsa_prefactor(&g, &c, &Z_POL, &s.pol, &i.pol);
        let expect = pref * f_half;
        assert!(
            (amp - expect).norm() < 1e-12 * expect.norm(),
            "amp {amp}, expect {expect}"
        );
    }

    #[test]
    fn odd_mode_vanishes_on_axis() {
        let g = geom();
        let c = crystal();
        let f_p = pump_frequency(&g, c.n_p);
        let env = PumpEnvelope::GaussianPulse {
            f_p,
            sigma_f: 0.01 * f_p,
        };
        let exp = ModeExpansion::single(ModeIndex::new(1, 0));
        // nu_+x = 0 while nu_+y != 0
        let s = PhotonMode::on_shell(0.01 / g.waist(), 0.02 / g.waist(), 0.5 * f_p, c.n_s, X_POL)
            .unwrap();
        let i = PhotonMode::on_shell(-0.01 / g.waist(), 0.015 / g.waist(), 0.5 * f_p, c.n_i, Y_POL)
            .unwrap();
        let amp = jsa_point(&exp, &g, &c, &env, &Z_POL, &s, &i,
            MismatchConvention::ExponentConsistent)
            .unwrap();
        assert_eq!(amp, C64::new(0.0, 0.0));
    }

    #[test]
    fn grid_single_point_matches_jsa_point() {
        let g = geom();
        let c = crystal();
        let f_p = pump_frequency(&g, c.n_p);
        let env = PumpEnvelope::GaussianPulse {
            f_p,
            sigma_f: 0.01 * f_p,
        };
        let exp = ModeExpansion::single(ModeIndex::new(0, 0));
        let point = |v| AxisSpec {
            start: v,
            stop: v,
            count: 1,
        };
        let spec = GridSpec {
            nu_sx: point(0.01 / g.waist()),
            nu_sy: point(0.0),
            nu_ix: point(-0.008 / g.waist()),
            nu_iy: point(0.002 / g.waist()),
        };
        let grid = jsa_grid(
            &exp,
            &g,
            &c,
            &env,
            &Z_POL,
            &spec,
            0.5 * f_p,
            0.5 * f_p,
            X_POL,
            Y_POL,
            MismatchConvention::ExponentConsistent,
        )
        .unwrap();
        assert_eq!(grid.shape(), [1, 1, 1, 1]);
        let s = PhotonMode::on_shell(0.01 / g.waist(), 0.0, 0.5 * f_p, c.n_s, X_POL).unwrap();
        let i = PhotonMode::on_shell(-0.008 / g.waist(), 0.002 / g.waist(), 0.5 * f_p, c.n_i, Y_POL)
            .unwrap();
        let point_amp = jsa_point(&exp, &g, &c, &env, &Z_POL, &s, &i,
            MismatchConvention::ExponentConsistent)
            .unwrap();
        assert_eq!(grid.amplitude([0, 0, 0, 0]), point_amp);
    }

    #[test]
    fn grid_matches_pointwise_evaluation() {
        let g = geom();
        let c = crystal();
        let f_p = pump_frequency(&g, c.n_p);
        let env = PumpEnvelope::GaussianPulse {
            f_p,
            sigma_f: 0.01 * f_p,
        };
        let mut coeffs = std::collections::BTreeMap::new();
        coeffs.insert(ModeIndex::new(0, 0), C64::new(0.8, 0.0));
        coeffs.insert(ModeIndex::new(1, 0), C64::new(0.0, 0.36));
        coeffs.insert(ModeIndex::new(1, 1), C64::new(-0.48, 0.0));
        let exp = ModeExpansion::new(coeffs, 2).unwrap();
        let axis = AxisSpec {
            start: -0.012 / g.waist(),
            stop: 0.012 / g.waist(),
            count: 8,
        };
        let spec = GridSpec {
            nu_sx: axis,
            nu_sy: axis,
            nu_ix: axis,
            nu_iy: axis,
        };
        let conv = MismatchConvention::ExponentConsistent;
        let grid = jsa_grid(
            &exp, &g, &c, &env, &Z_POL, &spec, 0.5 * f_p, 0.5 * f_p, X_POL, Y_POL, conv,
        )
        .unwrap();
        assert_eq!(grid.shape(), [8, 8, 8, 8]);
        let values = axis.values();
        for (a, &sx) in values.iter().enumerate() {
            for (b, &sy) in values.iter().enumerate() {
                for (cc, &ix) in values.iter().enumerate() {
                    for (d, &iy) in values.iter().enumerate() {
                        let s = PhotonMode::on_shell(sx, sy, 0.5 * f_p, c.n_s, X_POL).unwrap();
                        let i = PhotonMode::on_shell(ix, iy, 0.5 * f_p, c.n_i, Y_POL).unwrap();
                        let point =
                            jsa_point(&exp, &g, &c, &env, &Z_POL, &s, &i, conv).unwrap();
                        assert_eq!(grid.amplitude([a, b, cc, d]), point);
                    }
                }
            }
        }
    }

    #[test]
    fn grid_reports_evanescent_indices() {
        let g = geom();
        let c = crystal();
        let f_p = pump_frequency(&g, c.n_p);
        let env = PumpEnvelope::GaussianPulse {
            f_p,
            sigma_f: 0.01 * f_p,
        };
        let exp = ModeExpansion::single(ModeIndex::new(0, 0));
        // Half the pump frequency has on-shell radius n f / c; exceed it.
        let radius = c.n_s * 0.5 * f_p / SPEED_OF_LIGHT;
        let spec = GridSpec {
            nu_sx: AxisSpec {
                start: 0.0,
                stop: 1.5 * radius,
                count: 2,
            },
            nu_sy: AxisSpec {
                start: 0.0,
                stop: 0.0,
                count: 1,
            },
            nu_ix: AxisSpec {
                start: 0.0,
                stop: 0.0,
                count: 1,
            },
            nu_iy: AxisSpec {
                start: 0.0,
                stop: 0.0,
                count: 1,
            },
        };
        let err = jsa_grid(
            &exp,
            &g,
            &c,
            &env,
            &Z_POL,
            &spec,
            0.5 * f_p,
            0.5 * f_p,
            X_POL,
            Y_POL,
            MismatchConvention::ExponentConsistent,
        )
        .unwrap_err();
        match err {
            Error::EvanescentGridPoints { indices } => {
                assert_eq!(indices, vec![[1, 0, 0, 0]]);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn coincidence_scaling() {
        let amp = C64::new(0.3, -0.4);
        assert_eq!(coincidence_probability(amp, 0.0, 1.0), 0.0);
        assert_eq!(
            coincidence_probability(C64::new(1.0, 0.0), 1.0, 1.0),
            1.0
        );
        let p1 = coincidence_probability(amp, 2.0, 3.0);
        let p2 = coincidence_probability(amp, 4.0, 3.0);
        assert!((p2 / p1 - 4.0).abs() < 1e-12);
    }
}
