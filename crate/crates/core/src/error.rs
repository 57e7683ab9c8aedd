//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid mode expansion: {0}")]
    InvalidExpansion(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Adaptive quadrature stopped refining without meeting its tolerance.
    #[error("quadrature did not converge: last change {last_change:.3e} vs tolerance {tolerance:.3e}")]
    QuadratureNonconvergence { last_change: f64, tolerance: f64 },

    /// Sampled field does not decay enough before the grid edge.
    #[error("field magnitude at the grid boundary is {ratio:.3e} of its peak (limit {limit:.3e})")]
    InsufficientDomain { ratio: f64, limit: f64 },

    #[error("field carries no usable power")]
    InsufficientPower,

    /// Transverse spatial frequency exceeds the on-shell sphere radius.
    #[error("evanescent mode: nu_perp = {nu_perp:.6e} exceeds n*f/c = {limit:.6e} cycles/m")]
    EvanescentMode { nu_perp: f64, limit: f64 },

    /// Grid evaluation hit evanescent points; indices are (i_sx, i_sy, i_ix, i_iy).
    #[error("evanescent grid points at indices {indices:?}")]
    EvanescentGridPoints { indices: Vec<[usize; 4]> },

    #[error("crystal segments at offsets {a:.6e} and {b:.6e} overlap (length {length:.6e})")]
    OverlappingSegments { a: f64, b: f64, length: f64 },

    #[error("optimizer failed to converge within {iterations} iterations")]
    NonConvergence { iterations: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
