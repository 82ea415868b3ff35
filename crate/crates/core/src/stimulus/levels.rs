//! Level measurement and gain staging. RMS is referenced to a full-scale
//! square wave: a constant ±1.0 signal reads 0 dBFS.

use serde::Serialize;

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};

/// Peak ceiling used when normalising would otherwise clip.
pub const DEFAULT_PEAK_CEILING_DB: f64 = -0.1;

pub fn db_to_amplitude(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

pub fn amplitude_to_db(amplitude: f64) -> f64 {
    if amplitude > 0.0 {
        20.0 * amplitude.log10()
    } else {
        f64::NEG_INFINITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelReport {
    pub peak_db: f64,
    pub rms_db: f64,
    /// Set when every sample is zero; both levels are then negative infinity.
    pub silent: bool,
}

impl LevelReport {
    pub fn crest_db(&self) -> f64 {
        self.peak_db - self.rms_db
    }
}

pub fn measure_levels(buffer: &AudioBuffer) -> Result<LevelReport> {
    if buffer.is_empty() {
        return Err(Error::param("cannot measure an empty buffer"));
    }
    let x = buffer.samples();
    let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mean_sq = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
    Ok(LevelReport {
        peak_db: amplitude_to_db(peak),
        rms_db: amplitude_to_db(mean_sq.sqrt()),
        silent: peak == 0.0,
    })
}

pub fn apply_gain_db(buffer: &AudioBuffer, gain_db: f64) -> Result<AudioBuffer> {
    if !gain_db.is_finite() {
        return Err(Error::param(format!("gain must be finite, got {gain_db}")));
    }
    let g = db_to_amplitude(gain_db);
    Ok(AudioBuffer::from_parts(
        buffer.samples().iter().map(|v| v * g).collect(),
        buffer.sample_rate_hz(),
    ))
}

#[derive(Debug, Clone)]
pub struct Normalized {
    pub buffer: AudioBuffer,
    pub levels: LevelReport,
    pub gain_db: f64,
    /// True when the peak ceiling capped the gain short of the RMS target.
    pub ceiling_hit: bool,
}

/// Scale to `target_rms_db`, unless that would put the peak above
/// `peak_ceiling_db`; then the gain is capped so the peak sits on the ceiling
/// and the RMS lands wherever that leaves it.
pub fn normalize_rms(
    buffer: &AudioBuffer,
    target_rms_db: f64,
    peak_ceiling_db: f64,
) -> Result<Normalized> {
    if !target_rms_db.is_finite() || !peak_ceiling_db.is_finite() {
        return Err(Error::param("normalization targets must be finite"));
    }
    let before = measure_levels(buffer)?;
    if before.silent {
        return Err(Error::Silent);
    }
    let wanted = target_rms_db - before.rms_db;
    let headroom = peak_ceiling_db - before.peak_db;
    let (gain_db, ceiling_hit) = if wanted > headroom {
        (headroom, true)
    } else {
        (wanted, false)
    };
    let out = apply_gain_db(buffer, gain_db)?;
    let levels = measure_levels(&out)?;
    Ok(Normalized {
        buffer: out,
        levels,
        gain_db,
        ceiling_hit,
    })
}

/// Peak-normalise to `peak_db`.
pub fn normalize_peak(buffer: &AudioBuffer, peak_db: f64) -> Result<AudioBuffer> {
    let before = measure_levels(buffer)?;
    if before.silent {
        return Err(Error::Silent);
    }
    apply_gain_db(buffer, peak_db - before.peak_db)
}
