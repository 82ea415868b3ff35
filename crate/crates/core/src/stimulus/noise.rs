//! Noise generation, channel downmix and equal-energy mixing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::audio::{AudioBuffer, StereoBuffer};
use crate::error::{Error, Result};
use crate::stimulus::levels::{apply_gain_db, db_to_amplitude, measure_levels, normalize_peak};

/// Peak level of generated white noise.
pub const UNIFORM_NOISE_PEAK_DB: f64 = -6.0;
/// Peak level of a summed multi-source noise.
pub const MIX_PEAK_DB: f64 = -1.0;

/// I.i.d. uniform noise scaled so its largest magnitude is exactly -6 dBFS.
pub fn generate_uniform_noise(duration_s: f64, sample_rate_hz: u32, seed: u64) -> Result<AudioBuffer> {
    if !(duration_s > 0.0 && duration_s.is_finite()) {
        return Err(Error::param(format!("duration must be positive, got {duration_s}")));
    }
    if sample_rate_hz == 0 {
        return Err(Error::param("sample rate must be positive"));
    }
    let len = (duration_s * sample_rate_hz as f64).round() as usize;
    if len == 0 {
        return Err(Error::param("duration shorter than one sample"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let peak = raw.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = db_to_amplitude(UNIFORM_NOISE_PEAK_DB) / peak;
    Ok(AudioBuffer::from_parts(
        raw.into_iter().map(|v| v * scale).collect(),
        sample_rate_hz,
    ))
}

/// Average of left and right.
pub fn downmix_mono(stereo: &StereoBuffer) -> AudioBuffer {
    let out = stereo
        .left()
        .samples()
        .iter()
        .zip(stereo.right().samples())
        .map(|(l, r)| 0.5 * (l + r))
        .collect();
    AudioBuffer::from_parts(out, stereo.sample_rate_hz())
}

/// Bring every source down to the quietest source's RMS, sum them, and
/// peak-normalise the sum to `peak_db`. Sources are truncated to the shortest.
pub fn mix_equal_energy(sources: &[AudioBuffer], peak_db: f64) -> Result<AudioBuffer> {
    let first = sources
        .first()
        .ok_or_else(|| Error::param("no sources to mix"))?;
    let rate = first.sample_rate_hz();
    if let Some(bad) = sources.iter().find(|s| s.sample_rate_hz() != rate) {
        return Err(Error::SampleRateMismatch {
            left: rate,
            right: bad.sample_rate_hz(),
        });
    }
    let len = sources.iter().map(AudioBuffer::len).min().unwrap_or(0);
    if len == 0 {
        return Err(Error::param("empty source"));
    }
    let trimmed = sources
        .iter()
        .map(|s| s.truncated(len))
        .collect::<Result<Vec<_>>>()?;
    let levels = trimmed
        .iter()
        .map(measure_levels)
        .collect::<Result<Vec<_>>>()?;
    if levels.iter().any(|l| l.silent) {
        return Err(Error::Silent);
    }
    let floor = levels
        .iter()
        .map(|l| l.rms_db)
        .fold(f64::INFINITY, f64::min);

    let mut sum = vec![0.0; len];
    for (src, lv) in trimmed.iter().zip(&levels) {
        let matched = apply_gain_db(src, floor - lv.rms_db)?;
        sum.iter_mut()
            .zip(matched.samples())
            .for_each(|(acc, v)| *acc += v);
    }
    normalize_peak(&AudioBuffer::from_parts(sum, rate), peak_db)
}

/// Jump at the loop point, |x[last] - x[0]|, relative to the buffer's RMS.
/// Values near the typical sample-to-sample step indicate a seamless loop.
pub fn loop_discontinuity(buffer: &AudioBuffer) -> Result<f64> {
    let x = buffer.samples();
    if x.len() < 2 {
        return Err(Error::param("buffer too short to loop"));
    }
    let rms = (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt();
    if rms == 0.0 {
        return Ok(0.0);
    }
    Ok((x[x.len() - 1] - x[0]).abs() / rms)
}
