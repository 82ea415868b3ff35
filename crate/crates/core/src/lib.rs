//! One-ear band-limited phase inversion ("booster") processing, stimulus
//! preparation, listening-session planning and BHLD statistics.
//!
//! The left ear's speech is split at a crossover into complementary
//! linear-phase bands and one or both bands are sign-inverted before the
//! bands are summed again; the right ear goes through the same filters
//! without inversion so both ears share one delay.

pub mod audio;
pub mod condition;
pub mod dsp;
pub mod error;
pub mod plan;
pub mod record;
pub mod stats;
pub mod stimulus;

pub use audio::{AudioBuffer, StereoBuffer, SAMPLE_RATE_HZ};
pub use condition::{enumerate_conditions, Condition, NoiseId, SignalId};
pub use dsp::{BandCoefficients, BoosterKind, BoosterMethod, FirFilter};
pub use error::{Error, Result};
