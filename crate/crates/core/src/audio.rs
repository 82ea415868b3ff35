//! Sample containers shared by every processing stage.

use crate::error::{Error, Result};

/// Sample rate used for every stimulus in the experiment.
pub const SAMPLE_RATE_HZ: u32 = 48_000;

/// A mono block of samples at a fixed rate. Full scale is ±1.0.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    samples: Vec<f64>,
    sample_rate_hz: u32,
}

impl AudioBuffer {
    pub fn new(samples: Vec<f64>, sample_rate_hz: u32) -> Result<Self> {
        if sample_rate_hz == 0 {
            return Err(Error::param("sample rate must be positive"));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::param(format!("sample {i} is not finite")));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    pub fn silence(len: usize, sample_rate_hz: u32) -> Result<Self> {
        Self::new(vec![0.0; len], sample_rate_hz)
    }

    /// Internal constructor for results of finite arithmetic on finite inputs.
    pub(crate) fn from_parts(samples: Vec<f64>, sample_rate_hz: u32) -> Self {
        debug_assert!(samples.iter().all(|s| s.is_finite()));
        Self {
            samples,
            sample_rate_hz,
        }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz as f64
    }

    /// First `len` samples; errors if the buffer is shorter.
    pub fn truncated(&self, len: usize) -> Result<Self> {
        if len > self.samples.len() {
            return Err(Error::LengthMismatch {
                left: self.samples.len(),
                right: len,
            });
        }
        Ok(Self::from_parts(
            self.samples[..len].to_vec(),
            self.sample_rate_hz,
        ))
    }

    /// Shift right by `delay` samples, keeping the length.
    pub fn delayed(&self, delay: usize) -> Self {
        let n = self.samples.len();
        let mut out = vec![0.0; n];
        if delay < n {
            out[delay..].copy_from_slice(&self.samples[..n - delay]);
        }
        Self::from_parts(out, self.sample_rate_hz)
    }

    pub(crate) fn check_compatible(&self, other: &AudioBuffer) -> Result<()> {
        if self.sample_rate_hz != other.sample_rate_hz {
            return Err(Error::SampleRateMismatch {
                left: self.sample_rate_hz,
                right: other.sample_rate_hz,
            });
        }
        if self.samples.len() != other.samples.len() {
            return Err(Error::LengthMismatch {
                left: self.samples.len(),
                right: other.samples.len(),
            });
        }
        Ok(())
    }
}

/// Two channels of equal length and rate. Left is the processed ear.
#[derive(Debug, Clone, PartialEq)]
pub struct StereoBuffer {
    left: AudioBuffer,
    right: AudioBuffer,
}

impl StereoBuffer {
    pub fn new(left: AudioBuffer, right: AudioBuffer) -> Result<Self> {
        left.check_compatible(&right)?;
        Ok(Self { left, right })
    }

    /// Same signal at both ears.
    pub fn diotic(mono: AudioBuffer) -> Self {
        Self {
            right: mono.clone(),
            left: mono,
        }
    }

    pub fn left(&self) -> &AudioBuffer {
        &self.left
    }

    pub fn right(&self) -> &AudioBuffer {
        &self.right
    }

    pub fn into_channels(self) -> (AudioBuffer, AudioBuffer) {
        (self.left, self.right)
    }

    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.left.sample_rate_hz()
    }

    /// Frame-interleaved samples (L, R, L, R, ...).
    pub fn interleaved(&self) -> Vec<f64> {
        self.left
            .samples()
            .iter()
            .zip(self.right.samples())
            .flat_map(|(&l, &r)| [l, r])
            .collect()
    }
}
