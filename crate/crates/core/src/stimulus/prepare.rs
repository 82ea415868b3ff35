//! Source alignment: noise generation/mixing, RMS normalisation and the
//! level manifest, plus the on-disk layout of a prepared stimulus set.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::audio::{AudioBuffer, SAMPLE_RATE_HZ};
use crate::condition::{NoiseId, SignalId};
use crate::error::{Error, Result};
use crate::stimulus::gains::GainTable;
use crate::stimulus::levels::{measure_levels, normalize_rms, LevelReport, DEFAULT_PEAK_CEILING_DB};
use crate::stimulus::noise::{generate_uniform_noise, loop_discontinuity, mix_equal_energy, MIX_PEAK_DB};
use crate::stimulus::wav;

pub const SPEECH_TARGET_RMS_DB: f64 = -14.0;
pub const NOISE_TARGET_RMS_DB: f64 = -8.0;

#[derive(Debug, Clone, Copy)]
pub struct PrepareConfig {
    pub speech_target_rms_db: f64,
    pub noise_target_rms_db: f64,
    pub peak_ceiling_db: f64,
}

impl Default for PrepareConfig {
    fn default() -> Self {
        Self {
            speech_target_rms_db: SPEECH_TARGET_RMS_DB,
            noise_target_rms_db: NOISE_TARGET_RMS_DB,
            peak_ceiling_db: DEFAULT_PEAK_CEILING_DB,
        }
    }
}

/// Where a noise comes from before alignment.
#[derive(Debug, Clone)]
pub enum NoiseSource {
    /// Seeded uniform white noise.
    Uniform { seed: u64 },
    /// A single mono recording.
    Recording(AudioBuffer),
    /// Several recordings mixed at equal energy, then peak-normalised.
    Mix(Vec<AudioBuffer>),
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelRow {
    pub id: String,
    pub peak_db_before: f64,
    pub peak_db_after: f64,
    pub rms_db_before: f64,
    pub rms_db_after: f64,
    pub ceiling_hit: bool,
    pub loop_discontinuity: f64,
}

impl LevelRow {
    fn new(id: String, before: LevelReport, after: LevelReport, ceiling_hit: bool, loop_disc: f64) -> Self {
        Self {
            id,
            peak_db_before: before.peak_db,
            peak_db_after: after.peak_db,
            rms_db_before: before.rms_db,
            rms_db_after: after.rms_db,
            ceiling_hit,
            loop_discontinuity: loop_disc,
        }
    }
}

/// Aligned speech and noise, ready for rendering.
#[derive(Debug, Clone)]
pub struct StimulusSet {
    pub signals: BTreeMap<SignalId, AudioBuffer>,
    pub noises: BTreeMap<NoiseId, AudioBuffer>,
    pub gains: GainTable,
    pub manifest: Vec<LevelRow>,
}

fn signal_file(id: SignalId) -> String {
    format!("signal_{id}.wav")
}

fn noise_file(id: NoiseId) -> String {
    format!("noise_{id}.wav")
}

pub const GAINS_FILE: &str = "gains.toml";
pub const MANIFEST_FILE: &str = "levels.csv";

/// Normalise speech to the RMS target; generate or mix each noise, cut it to
/// the longest speech length and normalise it to the noise target.
pub fn prepare(
    signals: Vec<(SignalId, AudioBuffer)>,
    noises: Vec<(NoiseId, NoiseSource)>,
    gains: GainTable,
    config: &PrepareConfig,
) -> Result<StimulusSet> {
    let segment = signals
        .iter()
        .map(|(_, b)| b.len())
        .max()
        .ok_or_else(|| Error::param("no speech signals supplied"))?;
    let mut manifest = Vec::new();

    let mut aligned_signals = BTreeMap::new();
    for (id, raw) in signals {
        if raw.sample_rate_hz() != SAMPLE_RATE_HZ {
            return Err(Error::UnsupportedFormat(format!("signal {id}: {} Hz", raw.sample_rate_hz())));
        }
        let before = measure_levels(&raw)?;
        let n = normalize_rms(&raw, config.speech_target_rms_db, config.peak_ceiling_db)?;
        manifest.push(LevelRow::new(format!("signal_{id}"), before, n.levels, n.ceiling_hit, f64::NAN));
        aligned_signals.insert(id, n.buffer);
    }

    let mut aligned_noises = BTreeMap::new();
    for (id, source) in noises {
        let raw = match source {
            NoiseSource::Uniform { seed } => {
                generate_uniform_noise(segment as f64 / SAMPLE_RATE_HZ as f64, SAMPLE_RATE_HZ, seed)?
            }
            NoiseSource::Recording(b) => b,
            NoiseSource::Mix(parts) => mix_equal_energy(&parts, MIX_PEAK_DB)?,
        };
        if raw.sample_rate_hz() != SAMPLE_RATE_HZ {
            return Err(Error::UnsupportedFormat(format!("noise {id}: {} Hz", raw.sample_rate_hz())));
        }
        if raw.len() < segment {
            return Err(Error::param(format!(
                "noise {id} has {} samples, speech needs {segment}",
                raw.len()
            )));
        }
        let cut = raw.truncated(segment)?;
        let before = measure_levels(&cut)?;
        let n = normalize_rms(&cut, config.noise_target_rms_db, config.peak_ceiling_db)?;
        let disc = loop_discontinuity(&n.buffer)?;
        manifest.push(LevelRow::new(format!("noise_{id}"), before, n.levels, n.ceiling_hit, disc));
        aligned_noises.insert(id, n.buffer);
    }

    Ok(StimulusSet {
        signals: aligned_signals,
        noises: aligned_noises,
        gains,
        manifest,
    })
}

pub fn write_manifest<W: Write>(rows: &[LevelRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

impl StimulusSet {
    pub fn signal(&self, id: SignalId) -> Result<&AudioBuffer> {
        self.signals
            .get(&id)
            .ok_or_else(|| Error::param(format!("signal {id} not prepared")))
    }

    pub fn noise(&self, id: NoiseId) -> Result<&AudioBuffer> {
        self.noises
            .get(&id)
            .ok_or_else(|| Error::param(format!("noise {id} not prepared")))
    }

    /// Writes `signal_X.wav`, `noise_X.wav` (32-bit float mono), the gain
    /// table and the level manifest into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (id, b) in &self.signals {
            wav::write_mono_f32(&dir.join(signal_file(*id)), b)?;
        }
        for (id, b) in &self.noises {
            wav::write_mono_f32(&dir.join(noise_file(*id)), b)?;
        }
        std::fs::write(dir.join(GAINS_FILE), self.gains.to_config_string())?;
        write_manifest(&self.manifest, std::fs::File::create(dir.join(MANIFEST_FILE))?)?;
        Ok(())
    }

    /// Loads a directory written by [`StimulusSet::save`]. A missing gain file
    /// falls back to the default table. The manifest is not reloaded.
    pub fn load(dir: &Path) -> Result<Self> {
        let mut signals = BTreeMap::new();
        for id in SignalId::ALL {
            signals.insert(id, wav::read_mono_file(&dir.join(signal_file(id)))?);
        }
        let mut noises = BTreeMap::new();
        for id in NoiseId::ALL {
            noises.insert(id, wav::read_mono_file(&dir.join(noise_file(id)))?);
        }
        let gains_path = dir.join(GAINS_FILE);
        let gains = if gains_path.exists() {
            GainTable::load(&gains_path)?
        } else {
            GainTable::default()
        };
        Ok(Self {
            signals,
            noises,
            gains,
            manifest: Vec::new(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stimulus::fixtures;

    #[test]
    fn uniform_noise_aligns_exactly() {
        let speech = fixtures::speech_fixture(SignalId::C);
        let set = prepare(
            vec![(SignalId::C, speech)],
            vec![(NoiseId::A, NoiseSource::Uniform { seed: 7 })],
            GainTable::default(),
            &PrepareConfig::default(),
        )
        .unwrap();
        let row = set.manifest.iter().find(|r| r.id == "noise_A").unwrap();
        assert!((row.rms_db_after + 8.0).abs() < 1e-9);
        assert!((row.peak_db_before + 6.0).abs() < 1e-9);
        assert!(!row.ceiling_hit);
        assert_eq!(set.noise(NoiseId::A).unwrap().len(), 144_000);
    }

    #[test]
    fn short_noise_rejected() {
        let speech = fixtures::speech_fixture(SignalId::A);
        let short = AudioBuffer::new(vec![0.1; 100], SAMPLE_RATE_HZ).unwrap();
        assert!(prepare(
            vec![(SignalId::A, speech)],
            vec![(NoiseId::B, NoiseSource::Recording(short))],
            GainTable::default(),
            &PrepareConfig::default(),
        )
        .is_err());
    }

    #[test]
    fn manifest_columns() {
        let row = LevelRow {
            id: "noise_A".into(),
            peak_db_before: -6.0,
            peak_db_after: -3.2,
            rms_db_before: -10.8,
            rms_db_after: -8.0,
            ceiling_hit: false,
            loop_discontinuity: 0.5,
        };
        let mut out = Vec::new();
        write_manifest(&[row], &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with(
            "id,peak_db_before,peak_db_after,rms_db_before,rms_db_after,ceiling_hit,loop_discontinuity\n"
        ));
    }
}
