//! Momentum mismatch and the longitudinal phase-matching function.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::modes::PumpGeometry;
use crate::transforms::SpatialFrequency;

/// Vacuum speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Rank-3 susceptibility tensor, indexed `[o][q][r]` for the pump, signal
/// and idler polarization components. Effective units are absorbed into the
/// global coupling prefactor.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ChiTensor(pub [[[C64; 3]; 3]; 3]);

impl ChiTensor {
    pub fn zero() -> Self {
        Self([[[C64::new(0.0, 0.0); 3]; 3]; 3])
    }

    /// Tensor with a single nonzero entry.
    pub fn single(o: usize, q: usize, r: usize, value: C64) -> Self {
        let mut t = Self::zero();
        t.0[o][q][r] = value;
        t
    }

    /// Isotropic-like stand-in: the same value on every entry that couples
    /// distinct Cartesian axes is rarely wanted; this puts `value` on the
    /// zzz entry, the common effective-scalar reduction.
    pub fn scalar(value: C64) -> Self {
        Self::single(2, 2, 2, value)
    }
}

/// Convention for the transverse term of the momentum mismatch.
///
/// The longitudinal integrand of the interaction carries
/// `exp(-i 2 pi (lambda nu_perp^2 / 2) z)`, so the self-consistent mismatch
/// has a factor 1/2 on the transverse term; the other convention, often
/// quoted as a label, omits it.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum MismatchConvention {
    /// `1/lambda - lambda nu_perp^2 - nu_z`
    PaperLiteral,
    /// `1/lambda - (lambda/2) nu_perp^2 - nu_z`
    #[default]
    ExponentConsistent,
}

/// Crystal interaction region: length, focus offset, optional repeated
/// segments (offsets along z of each segment's carrier phase), refractive
/// indices and susceptibility.
#[derive(Clone, Debug)]
pub struct CrystalConfig {
    pub length: f64,
    pub delta_z: f64,
    pub segment_offsets: Vec<f64>,
    pub n_p: f64,
    pub n_s: f64,
    pub n_i: f64,
    pub chi: ChiTensor,
}

impl CrystalConfig {
    /// Single-segment crystal.
    pub fn new(
        length: f64,
        delta_z: f64,
        n_p: f64,
        n_s: f64,
        n_i: f64,
        chi: ChiTensor,
    ) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidInput(format!(
                "crystal length must be positive, got {length}"
            )));
        }
        for (label, n) in [("n_p", n_p), ("n_s", n_s), ("n_i", n_i)] {
            if !(n >= 1.0) || !n.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "refractive index {label} must be >= 1, got {n}"
                )));
            }
        }
        Ok(Self {
            length,
            delta_z,
            segment_offsets: vec![0.0],
            n_p,
            n_s,
            n_i,
            chi,
        })
    }

    /// Replaces the segment offsets. Segments all share the configured
    /// length; overlap is checked here and again in [`phi_multi`].
    pub fn with_segments(mut self, offsets: Vec<f64>) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::InvalidInput("at least one segment required".into()));
        }
        check_segments(&offsets, self.length)?;
        self.segment_offsets = offsets;
        Ok(self)
    }
}

fn check_segments(offsets: &[f64], length: f64) -> Result<()> {
    let mut sorted = offsets.to_vec();
    sorted.sort_by(f64::total_cmp);
    for w in sorted.windows(2) {
        if w[1] - w[0] < length * (1.0 - 1e-12) {
            return Err(Error::OverlappingSegments {
                a: w[0],
                b: w[1],
                length,
            });
        }
    }
    Ok(())
}

/// Momentum mismatch of a signal/idler pair against the pump carrier, in
/// cycles/meter. `nu_plus = nu_s + nu_i` component-wise.
pub fn delta_nu(
    nu_s: &SpatialFrequency,
    nu_i: &SpatialFrequency,
    geom: &PumpGeometry,
    convention: MismatchConvention,
) -> f64 {
    let plus = nu_s.plus(nu_i);
    let transverse = match convention {
        MismatchConvention::PaperLiteral => geom.lambda() * plus.perp_sqr(),
        MismatchConvention::ExponentConsistent => 0.5 * geom.lambda() * plus.perp_sqr(),
    };
    1.0 / geom.lambda() - transverse - plus.nu_z
}

/// `sin(w)/w` with the series limit below `|w| = 1e-8`.
fn sinc(w: f64) -> f64 {
    if w.abs() < 1e-8 {
        1.0 - w * w / 6.0
    } else {
        w.sin() / w
    }
}

/// Single-crystal phase-matching function
/// `exp(i 2 pi dnu delta_z) sin(pi dnu L) / (pi dnu L)`; `|phi| <= 1`.
pub fn phi(dnu: f64, crystal: &CrystalConfig) -> C64 {
    let carrier = C64::new(0.0, 2.0 * PI * dnu * crystal.delta_z).exp();
    carrier * sinc(PI * dnu * crystal.length)
}

/// Multi-segment phase matching: the coherent sum
/// `sum_j exp(i 2 pi dnu offset_j) phi(dnu)` over identical segments.
pub fn phi_multi(dnu: f64, crystal: &CrystalConfig) -> Result<C64> {
    check_segments(&crystal.segment_offsets, crystal.length)?;
    let single = phi(dnu, crystal);
    Ok(crystal
        .segment_offsets
        .iter()
        .map(|&off| C64::new(0.0, 2.0 * PI * dnu * off).exp())
        .sum::<C64>()
        * single)
}

/// Longitudinal spatial frequency of an on-shell plane wave:
/// `sqrt((n f / c)^2 - nu_perp^2)`. Fails for evanescent combinations.
pub fn on_shell_nu_z(f: f64, n: f64, nu_perp: f64) -> Result<f64> {
    let radius = n * f / SPEED_OF_LIGHT;
    let remainder = radius * radius - nu_perp * nu_perp;
    if remainder < 0.0 {
        return Err(Error::EvanescentMode {
            nu_perp,
            limit: radius,
        });
    }
    Ok(remainder.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom() -> PumpGeometry {
        PumpGeometry::new(5e-7, 2e-5).unwrap()
    }

    fn crystal() -> CrystalConfig {
        CrystalConfig::new(1e-3, 0.0, 1.6, 1.6, 1.6, ChiTensor::scalar(C64::new(1.0, 0.0)))
            .unwrap()
    }

    #[test]
    fn collinear_perfect_matching() {
        let g = geom();
        let half = SpatialFrequency::new(0.0, 0.0, 0.5 / g.lambda());
        for conv in [
            MismatchConvention::PaperLiteral,
            MismatchConvention::ExponentConsistent,
        ] {
            assert_eq!(delta_nu(&half, &half, &g, conv), 0.0);
        }
    }

    #[test]
    fn transverse_term_differs_between_conventions() {
        let g = geom();
        let q = 2.0e4;
        let s = SpatialFrequency::new(q, 0.0, 0.5 / g.lambda());
        let i = SpatialFrequency::new(0.0, 0.0, 0.5 / g.lambda());
        let lit = delta_nu(&s, &i, &g, MismatchConvention::PaperLiteral);
        let cons = delta_nu(&s, &i, &g, MismatchConvention::ExponentConsistent);
        assert!((lit - (-g.lambda() * q * q)).abs() < 1e-9 * (g.lambda() * q * q).abs());
        assert!((cons - (-0.5 * g.lambda() * q * q)).abs() < 1e-9 * (g.lambda() * q * q).abs());
    }

    #[test]
    fn phi_reference_values() {
        let c = crystal();
        assert_eq!(phi(0.0, &c), C64::new(1.0, 0.0));
        assert!(phi(1.0 / c.length, &c).norm() < 1e-15);
        let v = phi(0.5 / c.length, &c);
        assert!((v.re - 2.0 / PI).abs() < 1e-14 && v.im == 0.0);
    }

    #[test]
    fn phi_is_continuous_at_zero() {
        let c = crystal();
        let eps = 1e-8 / (PI * c.length);
        let below = phi(eps * 0.999, &c);
        let above = phi(eps * 1.001, &c);
        assert!((below - above).norm() < 1e-12);
        assert!(phi(eps, &c).norm() <= 1.0);
    }

    #[test]
    fn phi_multi_reduces_to_phi() {
        let c = crystal();
        for dnu in [0.0, 0.3 / c.length, -2.7 / c.length] {
            assert_eq!(phi_multi(dnu, &c).unwrap(), phi(dnu, &c));
        }
    }

    #[test]
    fn phi_multi_two_segments() {
        let c = crystal()
            .with_segments(vec![0.0, 1e-3])
            .unwrap();
        let v = phi_multi(0.0, &c).unwrap();
        assert!((v - C64::new(2.0, 0.0)).norm() < 1e-15);

        // offsets {0, 1/(2 dnu)} cancel at that dnu
        let dnu = 0.25 / 1e-3;
        let c2 = crystal()
            .with_segments(vec![0.0, 1.0 / (2.0 * dnu)])
            .unwrap();
        assert!(phi_multi(dnu, &c2).unwrap().norm() < 1e-12);
    }

    #[test]
    fn overlapping_segments_rejected() {
        let c = crystal().with_segments(vec![0.0, 0.5e-3]);
        assert!(matches!(c, Err(Error::OverlappingSegments { .. })));
    }

    #[test]
    fn on_shell_reference_values() {
        let f = 3.6e14;
        let n = 1.6;
        let radius = n * f / SPEED_OF_LIGHT;
        assert!((on_shell_nu_z(f, n, 0.0).unwrap() - radius).abs() < 1e-9 * radius);
        assert!(on_shell_nu_z(f, n, radius).unwrap().abs() < 1e-3 * radius);
        // 3-4-5 triangle
        let v = on_shell_nu_z(f, n, 0.6 * radius).unwrap();
        assert!((v - 0.8 * radius).abs() < 1e-12 * radius);
        assert!(matches!(
            on_shell_nu_z(f, n, 1.01 * radius),
            Err(Error::EvanescentMode { .. })
        ));
    }
}
