//! Magnitude responses of single filters and of recombined band pairs.

use std::f64::consts::PI;
use std::io::Write;

use crate::dsp::booster::BandCoefficients;
use crate::dsp::fir::{derive_complementary_highpass, FirFilter};
use crate::error::{Error, Result};

/// Default report resolution.
pub const DEFAULT_GRID_POINTS: usize = 4096;
/// Lowest frequency on the report grid.
pub const GRID_START_HZ: f64 = 10.0;

// Floor for exact nulls so the dB value stays finite.
const MIN_MAGNITUDE: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub struct ResponseCurve {
    pub freq_hz: Vec<f64>,
    pub magnitude_db: Vec<f64>,
}

impl ResponseCurve {
    pub fn len(&self) -> usize {
        self.freq_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freq_hz.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.freq_hz.iter().copied().zip(self.magnitude_db.iter().copied())
    }

    /// (frequency, dB) of the smallest magnitude.
    pub fn minimum(&self) -> Option<(f64, f64)> {
        self.points().min_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// CSV with header `freq_hz,magnitude_db`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["freq_hz", "magnitude_db"])?;
        for (f, m) in self.points() {
            w.write_record([format!("{f:.6}"), format!("{m:.6}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `grid_points` log-spaced frequencies from 10 Hz to Nyquist inclusive.
pub fn log_grid(sample_rate_hz: u32, grid_points: usize) -> Result<Vec<f64>> {
    if grid_points < 2 {
        return Err(Error::param("grid needs at least 2 points"));
    }
    let nyquist = sample_rate_hz as f64 / 2.0;
    if nyquist <= GRID_START_HZ {
        return Err(Error::param("sample rate too low for the report grid"));
    }
    let (a, b) = (GRID_START_HZ.ln(), nyquist.ln());
    let last = (grid_points - 1) as f64;
    Ok((0..grid_points)
        .map(|i| {
            if i == grid_points - 1 {
                nyquist
            } else {
                (a + (b - a) * i as f64 / last).exp()
            }
        })
        .collect())
}

/// Complex DTFT of `h` at `f_hz`, as (re, im).
pub fn dtft(h: &[f64], f_hz: f64, sample_rate_hz: u32) -> (f64, f64) {
    let w = 2.0 * PI * f_hz / sample_rate_hz as f64;
    h.iter().enumerate().fold((0.0, 0.0), |(re, im), (n, &c)| {
        let (s, co) = (w * n as f64).sin_cos();
        (re + c * co, im - c * s)
    })
}

fn to_db(mag: f64) -> f64 {
    20.0 * mag.max(MIN_MAGNITUDE).log10()
}

/// Magnitude of `filter` alone, or, with `band_coeffs`, of the recombined pair
/// `low * L + high * H` where `filter` is the lowpass and `H` its complement.
pub fn frequency_response(
    filter: &FirFilter,
    band_coeffs: Option<BandCoefficients>,
    grid_points: usize,
) -> Result<ResponseCurve> {
    let fs = filter.sample_rate_hz();
    let freq_hz = log_grid(fs, grid_points)?;
    let h: Vec<f64> = match band_coeffs {
        None => filter.coefficients().to_vec(),
        Some(c) => {
            let hpf = derive_complementary_highpass(filter)?;
            filter
                .coefficients()
                .iter()
                .zip(hpf.coefficients())
                .map(|(l, h)| c.low.value() * l + c.high.value() * h)
                .collect()
        }
    };
    let magnitude_db = freq_hz
        .iter()
        .map(|&f| {
            let (re, im) = dtft(&h, f, fs);
            to_db(re.hypot(im))
        })
        .collect();
    Ok(ResponseCurve {
        freq_hz,
        magnitude_db,
    })
}
