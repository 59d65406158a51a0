//! Empirical mode decomposition with classical (envelope-mean), midpoint and
//! hybrid sifting, together with the analysis tools used to evaluate them:
//! periodograms, Fourier-projection amplitudes, high-pass filter fits,
//! spectral slopes, and a delay-embedded principal-component decomposition.
//!
//! Batch entry points in [`batch`] run independent work on the rayon pool when
//! the `parallel` feature is enabled (the default) and sequentially otherwise.

pub mod batch;
pub mod emd;
pub mod envelope;
pub mod error;
pub mod pca;
pub mod presets;
pub mod report;
pub mod signal;
pub mod spectral;

pub use batch::Execution;
pub use emd::{decompose, extract_imf, sift_once, Decomposition, Imf, Norm, SiftConfig, Strategy};
pub use envelope::{Boundary, CurveKind, ExtremaSet, SiftingCurve};
pub use error::{Error, Result};
pub use signal::{NoiseSpec, Signal, ToneSpec};
