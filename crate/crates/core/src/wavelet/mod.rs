//! Orthonormal wavelet filters and the periodized transform on `[0, 1]`.

mod filters;
mod transform;

pub use filters::WaveletFilter;
pub use transform::{analyze, lp_norm, lp_norm_pow, synthesize, GridSignal};
