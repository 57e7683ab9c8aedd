//! JSON run configuration: SI quantities with unit-suffixed field names,
//! converted into core types after validation.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use egh_spdc::biphoton::{AxisSpec, GridSpec, PumpEnvelope};
use egh_spdc::modes::{ModeExpansion, ModeIndex, PumpGeometry};
use egh_spdc::optimizer::{IndexSet, TargetDirection};
use egh_spdc::phasematch::{ChiTensor, CrystalConfig, MismatchConvention};

use crate::CliError;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ComplexField {
    pub re: f64,
    pub im: f64,
}

impl From<ComplexField> for C64 {
    fn from(c: ComplexField) -> Self {
        C64::new(c.re, c.im)
    }
}

impl From<C64> for ComplexField {
    fn from(c: C64) -> Self {
        Self { re: c.re, im: c.im }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub pump: PumpSection,
    #[serde(default)]
    pub crystal: Option<CrystalSection>,
    #[serde(default)]
    pub photons: Option<PhotonsSection>,
    #[serde(default)]
    pub grid: Option<GridSection>,
    #[serde(default)]
    pub target: Option<TargetSection>,
    #[serde(default)]
    pub modes: Option<ModesSection>,
    #[serde(default)]
    pub decompose: Option<DecomposeSection>,
    #[serde(default)]
    pub convention: Option<ConventionName>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ConventionName {
    Paper,
    Exponent,
}

impl From<ConventionName> for MismatchConvention {
    fn from(c: ConventionName) -> Self {
        match c {
            ConventionName::Paper => MismatchConvention::PaperLiteral,
            ConventionName::Exponent => MismatchConvention::ExponentConsistent,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpSection {
    pub wavelength_m: f64,
    pub waist_m: f64,
    #[serde(default)]
    pub u0: Option<ComplexField>,
    /// Pump polarization as three complex components; defaults to x-hat.
    #[serde(default)]
    pub polarization: Option<[ComplexField; 3]>,
    #[serde(default)]
    pub envelope: Option<EnvelopeSection>,
    #[serde(default)]
    pub expansion: Option<ExpansionSection>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvelopeSection {
    Cw { f_p_hz: f64, grid_cell_hz: f64 },
    GaussianPulse { f_p_hz: f64, sigma_f_hz: f64 },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionSection {
    pub max_order: u32,
    pub coefficients: Vec<CoefficientEntry>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientEntry {
    pub n: u32,
    pub m: u32,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalSection {
    pub length_m: f64,
    #[serde(default)]
    pub delta_z_m: f64,
    #[serde(default)]
    pub segment_offsets_m: Option<Vec<f64>>,
    pub n_p: f64,
    pub n_s: f64,
    pub n_i: f64,
    /// Sparse tensor entries; indices 0..=2 per axis.
    pub chi: Vec<ChiEntry>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChiEntry {
    pub o: usize,
    pub q: usize,
    pub r: usize,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhotonsSection {
    pub f_s_hz: f64,
    pub f_i_hz: f64,
    pub signal_polarization: [ComplexField; 3],
    pub idler_polarization: [ComplexField; 3],
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSection {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl From<AxisSection> for AxisSpec {
    fn from(a: AxisSection) -> Self {
        AxisSpec {
            start: a.start,
            stop: a.stop,
            count: a.count,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub nu_sx_per_m: AxisSection,
    pub nu_sy_per_m: AxisSection,
    pub nu_ix_per_m: AxisSection,
    pub nu_iy_per_m: AxisSection,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSection {
    pub x: f64,
    pub y: f64,
    pub max_order: u32,
    #[serde(default)]
    pub index_set: Option<IndexSetName>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum IndexSetName {
    AllNonzeroOrders,
    StrictlyPositivePairs,
}

impl From<IndexSetName> for IndexSet {
    fn from(s: IndexSetName) -> Self {
        match s {
            IndexSetName::AllNonzeroOrders => IndexSet::AllNonzeroOrders,
            IndexSetName::StrictlyPositivePairs => IndexSet::StrictlyPositivePairs,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModesSection {
    /// (n, m) order labels of the exported mode.
    pub index: [u32; 2],
    pub x_m: AxisSection,
    pub y_m: AxisSection,
    pub z_m: AxisSection,
    pub nu_x_per_m: AxisSection,
    pub nu_y_per_m: AxisSection,
    #[serde(default)]
    pub spectrum_z_m: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecomposeSection {
    /// CSV with header `x_m,y_m,re,im`, rows in x-major grid order.
    pub field_csv: String,
    pub max_order: u32,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn geometry(&self) -> Result<PumpGeometry, CliError> {
        let u0 = self.pump.u0.map(C64::from).unwrap_or(C64::new(1.0, 0.0));
        PumpGeometry::with_amplitude(self.pump.wavelength_m, self.pump.waist_m, u0)
            .map_err(|e| CliError::Config(format!("pump: {e}")))
    }

    pub fn pump_polarization(&self) -> [C64; 3] {
        match self.pump.polarization {
            Some(p) => [p[0].into(), p[1].into(), p[2].into()],
            None => [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
        }
    }

    pub fn envelope(&self) -> Result<PumpEnvelope, CliError> {
        let section = self
            .pump
            .envelope
            .as_ref()
            .ok_or_else(|| CliError::Config("pump.envelope section required".into()))?;
        let env = match *section {
            EnvelopeSection::Cw {
                f_p_hz,
                grid_cell_hz,
            } => PumpEnvelope::Cw {
                f_p: f_p_hz,
                grid_cell: grid_cell_hz,
            },
            EnvelopeSection::GaussianPulse { f_p_hz, sigma_f_hz } => PumpEnvelope::GaussianPulse {
                f_p: f_p_hz,
                sigma_f: sigma_f_hz,
            },
        };
        env.validate()
            .map_err(|e| CliError::Config(format!("pump.envelope: {e}")))?;
        Ok(env)
    }

    pub fn expansion(&self) -> Result<ModeExpansion, CliError> {
        let section = self
            .pump
            .expansion
            .as_ref()
            .ok_or_else(|| CliError::Config("pump.expansion section required".into()))?;
        let mut coefficients = BTreeMap::new();
        for entry in &section.coefficients {
            let prev = coefficients.insert(
                ModeIndex::new(entry.n, entry.m),
                C64::new(entry.re, entry.im),
            );
            if prev.is_some() {
                return Err(CliError::Config(format!(
                    "pump.expansion: duplicate index ({}, {})",
                    entry.n, entry.m
                )));
            }
        }
        ModeExpansion::new(coefficients, section.max_order)
            .map_err(|e| CliError::Config(format!("pump.expansion: {e}")))
    }

    pub fn crystal(&self) -> Result<CrystalConfig, CliError> {
        let section = self
            .crystal
            .as_ref()
            .ok_or_else(|| CliError::Config("crystal section required".into()))?;
        let mut chi = ChiTensor::zero();
        for entry in &section.chi {
            if entry.o > 2 || entry.q > 2 || entry.r > 2 {
                return Err(CliError::Config(format!(
                    "crystal.chi: indices must be 0..=2, got ({}, {}, {})",
                    entry.o, entry.q, entry.r
                )));
            }
            chi.0[entry.o][entry.q][entry.r] = C64::new(entry.re, entry.im);
        }
        let crystal = CrystalConfig::new(
            section.length_m,
            section.delta_z_m,
            section.n_p,
            section.n_s,
            section.n_i,
            chi,
        )
        .map_err(|e| CliError::Config(format!("crystal: {e}")))?;
        match &section.segment_offsets_m {
            Some(offsets) => crystal
                .with_segments(offsets.clone())
                .map_err(|e| CliError::Config(format!("crystal.segment_offsets_m: {e}"))),
            None => Ok(crystal),
        }
    }

    pub fn photons(&self) -> Result<&PhotonsSection, CliError> {
        self.photons
            .as_ref()
            .ok_or_else(|| CliError::Config("photons section required".into()))
    }

    pub fn grid_spec(&self) -> Result<GridSpec, CliError> {
        // 2^24 complex values = 256 MiB; keeps a misconfigured grid from
        // exhausting memory.
        const MAX_GRID_POINTS: usize = 1 << 24;
        let g = self
            .grid
            .as_ref()
            .ok_or_else(|| CliError::Config("grid section required".into()))?;
        let mut total: usize = 1;
        for (name, axis) in [
            ("nu_sx_per_m", &g.nu_sx_per_m),
            ("nu_sy_per_m", &g.nu_sy_per_m),
            ("nu_ix_per_m", &g.nu_ix_per_m),
            ("nu_iy_per_m", &g.nu_iy_per_m),
        ] {
            if axis.count == 0 {
                return Err(CliError::Config(format!("grid.{name}: count must be >= 1")));
            }
            total = total.saturating_mul(axis.count);
        }
        if total > MAX_GRID_POINTS {
            return Err(CliError::Config(format!(
                "grid has {total} points, above the budget of {MAX_GRID_POINTS}"
            )));
        }
        Ok(GridSpec {
            nu_sx: g.nu_sx_per_m.into(),
            nu_sy: g.nu_sy_per_m.into(),
            nu_ix: g.nu_ix_per_m.into(),
            nu_iy: g.nu_iy_per_m.into(),
        })
    }

    pub fn target(&self) -> Result<(TargetDirection, u32, IndexSet), CliError> {
        let t = self
            .target
            .as_ref()
            .ok_or_else(|| CliError::Config("target section required".into()))?;
        let set = t
            .index_set
            .map(IndexSet::from)
            .unwrap_or(IndexSet::AllNonzeroOrders);
        Ok((TargetDirection::new(t.x, t.y), t.max_order, set))
    }

    pub fn convention(&self, flag: Option<ConventionName>) -> MismatchConvention {
        flag.or(self.convention)
            .map(MismatchConvention::from)
            .unwrap_or_default()
    }

    pub fn seed(&self, flag: Option<u64>) -> u64 {
        flag.or(self.seed).unwrap_or(0)
    }
}

pub fn polarization_to_core(p: &[ComplexField; 3]) -> [C64; 3] {
    [p[0].into(), p[1].into(), p[2].into()]
}
