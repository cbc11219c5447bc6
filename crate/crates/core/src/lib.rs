//! Near-field beam depth of rectangular and circular apertures: exact and
//! closed-form normalized array gains, 3 dB beam depths, and distance-domain
//! multiplexing with MMSE precoding.

pub mod beam_depth;
pub mod config;
pub mod error;
pub mod experiments;
pub mod field;
pub mod fresnel;
pub mod gain;
pub mod geometry;
pub mod multiplexing;
pub mod presets;
pub mod quadrature;

pub use error::{Error, Result};
