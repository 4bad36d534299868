//! Orthonormal wavelets from multiresolution analyses by multiplier fusion,
//! and frames of integer translates analysed fiber by fiber.

pub mod cli;
pub mod error;
pub mod frame;
pub mod io;
pub mod mra;
pub mod spectral;
pub mod wavelet;

pub use error::{Error, Result};
pub use frame::{
    canonical_tight, complement_by_projection, fiberize, frame_bounds, fusable, fuse,
    minimal_complement, multiplicity, FrameDiagnostics, FrameOperatorSymbol, GeneratorSet,
};
pub use mra::{Mra, ScalingFilter, V1Coefficients};
pub use spectral::{CircleGrid, Complex, LineSpectrum, PeriodicFn, SupportSet};
pub use wavelet::{build_wavelet, verify_wavelet, BuildParams, Tolerances, WaveletBuildResult, WaveletReport};
