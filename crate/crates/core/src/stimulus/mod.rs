//! Stimulus preparation and A/B rendering.

pub mod fixtures;
pub mod gains;
pub mod levels;
pub mod noise;
pub mod prepare;
pub mod render;
pub mod wav;

pub use gains::GainTable;
pub use levels::{
    amplitude_to_db, apply_gain_db, db_to_amplitude, measure_levels, normalize_rms, LevelReport, Normalized,
    DEFAULT_PEAK_CEILING_DB,
};
pub use noise::{downmix_mono, generate_uniform_noise, loop_discontinuity, mix_equal_energy};
pub use prepare::{prepare, LevelRow, NoiseSource, PrepareConfig, StimulusSet};
pub use render::{render_trial_pair, PreparedTrial, TrialStimulus};
