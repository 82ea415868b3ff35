//! WAV input and output.
//!
//! Inputs must be 48 kHz mono, stored as 16- or 24-bit PCM or 32-bit float.
//! Rendered stimuli are written as 16-bit stereo: each sample is scaled by
//! 32768, rounded to nearest (no dither) and saturated to the i16 range.

use std::io::{Cursor, Read, Seek, Write};
use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use crate::audio::{AudioBuffer, StereoBuffer, SAMPLE_RATE_HZ};
use crate::error::{Error, Result};

fn check_input_spec(spec: &WavSpec) -> Result<()> {
    if spec.sample_rate != SAMPLE_RATE_HZ {
        return Err(Error::UnsupportedFormat(format!(
            "sample rate {} Hz (need {SAMPLE_RATE_HZ} Hz; resample first)",
            spec.sample_rate
        )));
    }
    if spec.channels != 1 {
        return Err(Error::UnsupportedFormat(format!(
            "{} channels (need mono; downmix first)",
            spec.channels
        )));
    }
    match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, 16) | (SampleFormat::Int, 24) | (SampleFormat::Float, 32) => Ok(()),
        (fmt, bits) => Err(Error::UnsupportedFormat(format!("{bits}-bit {fmt:?} samples"))),
    }
}

pub fn read_mono<R: Read>(reader: R) -> Result<AudioBuffer> {
    let mut wav = WavReader::new(reader)?;
    let spec = wav.spec();
    check_input_spec(&spec)?;
    let samples: Vec<f64> = match spec.sample_format {
        SampleFormat::Float => wav
            .samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>()?,
        SampleFormat::Int => {
            let scale = (1i64 << (spec.bits_per_sample - 1)) as f64;
            wav.samples::<i32>()
                .map(|s| s.map(|v| v as f64 / scale))
                .collect::<std::result::Result<_, _>>()?
        }
    };
    AudioBuffer::new(samples, spec.sample_rate)
}

pub fn read_mono_file(path: &Path) -> Result<AudioBuffer> {
    read_mono(std::io::BufReader::new(std::fs::File::open(path)?))
}

/// Stereo input of the same formats, for sources that still need a downmix.
pub fn read_stereo_file(path: &Path) -> Result<StereoBuffer> {
    let mut wav = WavReader::open(path)?;
    let spec = wav.spec();
    if spec.channels != 2 {
        return Err(Error::UnsupportedFormat(format!("{} channels (need stereo)", spec.channels)));
    }
    check_input_spec(&WavSpec { channels: 1, ..spec })?;
    let inter: Vec<f64> = match spec.sample_format {
        SampleFormat::Float => wav
            .samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>()?,
        SampleFormat::Int => {
            let scale = (1i64 << (spec.bits_per_sample - 1)) as f64;
            wav.samples::<i32>()
                .map(|s| s.map(|v| v as f64 / scale))
                .collect::<std::result::Result<_, _>>()?
        }
    };
    let left = inter.iter().step_by(2).copied().collect();
    let right = inter.iter().skip(1).step_by(2).copied().collect();
    StereoBuffer::new(
        AudioBuffer::new(left, spec.sample_rate)?,
        AudioBuffer::new(right, spec.sample_rate)?,
    )
}

/// Mono 32-bit float, for prepared intermediate files.
pub fn write_mono_f32(path: &Path, buffer: &AudioBuffer) -> Result<()> {
    let spec = WavSpec {
        channels: 1,
        sample_rate: buffer.sample_rate_hz(),
        bits_per_sample: 32,
        sample_format: SampleFormat::Float,
    };
    let mut w = WavWriter::create(path, spec)?;
    for &s in buffer.samples() {
        w.write_sample(s as f32)?;
    }
    w.finalize()?;
    Ok(())
}

pub fn quantize_i16(x: f64) -> i16 {
    (x * 32768.0).round().clamp(i16::MIN as f64, i16::MAX as f64) as i16
}

pub fn write_stereo_i16<W: Write + Seek>(out: W, buffer: &StereoBuffer) -> Result<()> {
    let spec = WavSpec {
        channels: 2,
        sample_rate: buffer.sample_rate_hz(),
        bits_per_sample: 16,
        sample_format: SampleFormat::Int,
    };
    let mut w = WavWriter::new(out, spec)?;
    for s in buffer.interleaved() {
        w.write_sample(quantize_i16(s))?;
    }
    w.finalize()?;
    Ok(())
}

/// Complete 16-bit stereo WAV file as bytes.
pub fn stereo_i16_bytes(buffer: &StereoBuffer) -> Result<Vec<u8>> {
    let mut cur = Cursor::new(Vec::new());
    write_stereo_i16(&mut cur, buffer)?;
    Ok(cur.into_inner())
}

pub fn write_stereo_i16_file(path: &Path, buffer: &StereoBuffer) -> Result<()> {
    write_stereo_i16(std::io::BufWriter::new(std::fs::File::create(path)?), buffer)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_mono_int(bits: u16, rate: u32, samples: &[i32]) -> Vec<u8> {
        let spec = WavSpec {
            channels: 1,
            sample_rate: rate,
            bits_per_sample: bits,
            sample_format: SampleFormat::Int,
        };
        let mut cur = Cursor::new(Vec::new());
        let mut w = WavWriter::new(&mut cur, spec).unwrap();
        for &s in samples {
            w.write_sample(s).unwrap();
        }
        w.finalize().unwrap();
        cur.into_inner()
    }

    #[test]
    fn reads_16_and_24_bit() {
        let b = read_mono(Cursor::new(write_mono_int(16, 48_000, &[16384, -32768]))).unwrap();
        assert_eq!(b.samples(), &[0.5, -1.0]);
        let b = read_mono(Cursor::new(write_mono_int(24, 48_000, &[1 << 22]))).unwrap();
        assert_eq!(b.samples(), &[0.5]);
    }

    #[test]
    fn rejects_other_rates_and_depths() {
        assert!(matches!(
            read_mono(Cursor::new(write_mono_int(16, 44_100, &[0]))),
            Err(Error::UnsupportedFormat(_))
        ));
        assert!(matches!(
            read_mono(Cursor::new(write_mono_int(8, 48_000, &[0]))),
            Err(Error::UnsupportedFormat(_))
        ));
    }

    #[test]
    fn quantization_rounds_and_saturates() {
        assert_eq!(quantize_i16(0.0), 0);
        assert_eq!(quantize_i16(1.0), i16::MAX);
        assert_eq!(quantize_i16(-1.0), i16::MIN);
        assert_eq!(quantize_i16(0.5 / 32768.0 * 1.01), 1);
        assert_eq!(quantize_i16(0.49 / 32768.0), 0);
    }

    #[test]
    fn stereo_bytes_decode() {
        let l = AudioBuffer::new(vec![0.25, -0.25], 48_000).unwrap();
        let r = AudioBuffer::new(vec![0.5, 0.0], 48_000).unwrap();
        let bytes = stereo_i16_bytes(&StereoBuffer::new(l, r).unwrap()).unwrap();
        let mut rd = WavReader::new(Cursor::new(bytes)).unwrap();
        assert_eq!(rd.spec().channels, 2);
        let v: Vec<i16> = rd.samples::<i16>().map(|s| s.unwrap()).collect();
        assert_eq!(v, vec![8192, 16384, -8192, 0]);
    }
}
