//! Micro-motion Doppler tomography for single-look-complex SAR imagery.
//!
//! The crate is organised bottom-up:
//!
//! - [`radar`], [`image`] and [`slc_io`]: acquisition geometry, the complex
//!   raster container and its on-disk format.
//! - [`sim`]: point-target synthesis (stationary, moving and vibrating) and
//!   the 2-D spectral transform pair.
//! - [`oscillator`]: the spring-mass surface model, its integrator and the
//!   closed-form two-degree-of-freedom solution.
//! - [`subaperture`]: Doppler band allocation and master/slave bank
//!   extraction.
//! - [`coreg`]: sub-pixel offset tracking and phasor assembly.
//! - [`tomo`]: steering matrix, forward model and depth focusing.
//! - [`insar`]: interferometric phase and coherence.
//! - [`metrics`] and [`fixtures`]: impulse-response measurement and
//!   synthetic scenes used to validate every stage.

pub mod coreg;
pub mod error;
pub mod fft;
pub mod fixtures;
pub mod image;
pub mod insar;
pub mod metrics;
pub mod oscillator;
pub mod radar;
pub mod scene;
pub mod sim;
pub mod slc_io;
pub mod subaperture;
pub mod text;
pub mod tomo;

pub use error::{Error, Result};
pub use image::{Band, Raster, SlcImage, SlcMeta, Spectrum};
pub use radar::RadarConfig;

/// Complex sample type used across the crate.
pub type C64 = num_complex::Complex64;
