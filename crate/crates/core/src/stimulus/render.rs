//! Sound A / Sound B rendering for one trial.
//!
//! Sound A carries unprocessed speech (both ears through the band splitter,
//! recombined with `[+1, +1]`) at the initial gain plus the listener's variable gain. Sound B
//! carries the condition's processed speech at the initial gain only. Both mix
//! the same diotic noise, which is never filtered or scaled here.

use crate::audio::{AudioBuffer, StereoBuffer};
use crate::condition::Condition;
use crate::dsp::{recombine_bands, BandCoefficients, BandSplitter};
use crate::error::{Error, Result};
use crate::stimulus::gains::GainTable;
use crate::stimulus::levels::apply_gain_db;

#[derive(Debug, Clone)]
pub struct TrialStimulus {
    pub sound_a: StereoBuffer,
    pub sound_b: StereoBuffer,
    pub condition: Condition,
    pub initial_gain_db: f64,
    pub variable_gain_db: f64,
    /// Samples (over both sounds and both ears) clamped to ±1.0.
    pub clipped_samples: usize,
}

/// Speech paths of one trial, filtered once and reused for every gain step.
#[derive(Debug, Clone)]
pub struct PreparedTrial {
    condition: Condition,
    initial_gain_db: f64,
    noise: AudioBuffer,
    reference: StereoBuffer,
    processed: StereoBuffer,
}

impl PreparedTrial {
    pub fn new(
        speech: &AudioBuffer,
        noise: &AudioBuffer,
        condition: Condition,
        gains: &GainTable,
        taps: usize,
    ) -> Result<Self> {
        if speech.sample_rate_hz() != noise.sample_rate_hz() {
            return Err(Error::SampleRateMismatch {
                left: speech.sample_rate_hz(),
                right: noise.sample_rate_hz(),
            });
        }
        let initial_gain_db = gains.get(condition.signal, condition.noise)?;
        let noise = noise.truncated(speech.len())?;
        let speech = apply_gain_db(speech, initial_gain_db)?;

        // The speech is diotic, so one split serves both ears and both sounds.
        let method = condition.method;
        let splitter = BandSplitter::new(method.fc_hz() as f64, speech.sample_rate_hz(), taps)?;
        let (low, high) = splitter.split(&speech)?;
        let pass = recombine_bands(&low, &high, BandCoefficients::PASS)?;
        let processed = StereoBuffer::new(recombine_bands(&low, &high, method.band_coefficients())?, pass.clone())?;
        let reference = StereoBuffer::diotic(pass);
        Ok(Self {
            condition,
            initial_gain_db,
            noise,
            reference,
            processed,
        })
    }

    pub fn condition(&self) -> Condition {
        self.condition
    }

    pub fn initial_gain_db(&self) -> f64 {
        self.initial_gain_db
    }

    pub fn len(&self) -> usize {
        self.noise.len()
    }

    pub fn is_empty(&self) -> bool {
        self.noise.is_empty()
    }

    /// Sound A at `variable_gain_db`, with its clipped-sample count.
    pub fn sound_a(&self, variable_gain_db: f64) -> Result<(StereoBuffer, usize)> {
        let left = apply_gain_db(self.reference.left(), variable_gain_db)?;
        let right = apply_gain_db(self.reference.right(), variable_gain_db)?;
        self.mix(&left, &right)
    }

    pub fn sound_b(&self) -> Result<(StereoBuffer, usize)> {
        self.mix(self.processed.left(), self.processed.right())
    }

    pub fn render(&self, variable_gain_db: f64) -> Result<TrialStimulus> {
        let (sound_a, clip_a) = self.sound_a(variable_gain_db)?;
        let (sound_b, clip_b) = self.sound_b()?;
        Ok(TrialStimulus {
            sound_a,
            sound_b,
            condition: self.condition,
            initial_gain_db: self.initial_gain_db,
            variable_gain_db,
            clipped_samples: clip_a + clip_b,
        })
    }

    fn mix(&self, left: &AudioBuffer, right: &AudioBuffer) -> Result<(StereoBuffer, usize)> {
        let (l, cl) = add_clamped(&self.noise, left);
        let (r, cr) = add_clamped(&self.noise, right);
        Ok((StereoBuffer::new(l, r)?, cl + cr))
    }
}

fn add_clamped(noise: &AudioBuffer, speech: &AudioBuffer) -> (AudioBuffer, usize) {
    let mut clipped = 0;
    let out = noise
        .samples()
        .iter()
        .zip(speech.samples())
        .map(|(n, s)| {
            let v = n + s;
            if v.abs() > 1.0 {
                clipped += 1;
                v.clamp(-1.0, 1.0)
            } else {
                v
            }
        })
        .collect();
    (AudioBuffer::from_parts(out, noise.sample_rate_hz()), clipped)
}

/// Render the A/B pair for one condition at the given variable gain.
pub fn render_trial_pair(
    speech: &AudioBuffer,
    noise: &AudioBuffer,
    condition: Condition,
    gains: &GainTable,
    variable_gain_db: f64,
    taps: usize,
) -> Result<TrialStimulus> {
    PreparedTrial::new(speech, noise, condition, gains, taps)?.render(variable_gain_db)
}
