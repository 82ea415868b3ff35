//! Filter design, band splitting and the one-ear phase-inversion chain.

pub mod booster;
pub mod fir;
pub mod response;

pub use booster::{
    apply_booster, apply_booster_with, recombine_bands, BandCoefficients, BandSign, BandSplitter,
    BoosterKind, BoosterMethod, CROSSOVERS_HZ,
};
pub use fir::{apply_fir, derive_complementary_highpass, design_lowpass_fir, FirFilter, DEFAULT_TAPS};
pub use response::{frequency_response, log_grid, ResponseCurve, DEFAULT_GRID_POINTS};
