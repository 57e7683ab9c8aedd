//! Biphoton joint spectral amplitudes for spontaneous parametric
//! down-conversion pumped by superpositions of elegant (complex-argument)
//! Gauss-Hermite beam modes.
//!
//! The crate provides:
//!
//! - evaluation and biorthogonal decomposition of the pump modes
//!   ([`modes`], [`decompose`]);
//! - their closed-form transverse Fourier transforms with a discrete
//!   oracle for validation ([`transforms`]);
//! - momentum mismatch and single/multi-crystal phase matching
//!   ([`phasematch`]);
//! - assembly of the joint spectral amplitude over signal/idler
//!   spatial-frequency labels ([`biphoton`]);
//! - closed-form and brute-force pump-coefficient optimization for a chosen
//!   detection direction ([`optimizer`]);
//! - a named-invariant validation suite and the independent numerical
//!   oracles behind it ([`validate`], [`oracles`]).

pub mod biphoton;
pub mod decompose;
pub mod error;
pub mod modes;
pub mod optimizer;
pub mod oracles;
pub mod phasematch;
pub mod quad;
pub mod transforms;
pub mod validate;

pub use error::{Error, Result};

pub use biphoton::{
    chi_effective, coincidence_probability, envelope_eval, jsa_grid, jsa_point, jsa_prefactor,
    jsa_shape, AxisSpec, GridSpec, JointAmplitudeGrid, PhotonMode, PumpEnvelope, PLANCK,
};
pub use decompose::{decompose, synthesize, Decomposition, SampledField};
pub use modes::{
    biorthogonal_adjoint, biorthogonal_overlap, egh_eval, hermite, overlap_normalization,
    paraxial_residual, paraxial_residual_of, psi_eval, ModeExpansion, ModeIndex, PumpGeometry,
    SampleGrid, TransversePoint,
};
pub use optimizer::{
    brute_force_optimal, measurement_objective, optimal_expansion, IndexSet, Method,
    OptimizationResult, TargetDirection,
};
pub use phasematch::{
    delta_nu, on_shell_nu_z, phi, phi_multi, ChiTensor, CrystalConfig, MismatchConvention,
    SPEED_OF_LIGHT,
};
pub use transforms::{
    dft_oracle, dft_oracle_1d, egh_transverse_ft, scaling_rule_check, SampledSpectrum,
    SpatialFrequency,
};
pub use validate::{run_all, InvariantCheck, ValidateOptions};
