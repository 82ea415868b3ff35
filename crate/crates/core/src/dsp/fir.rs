//! Linear-phase FIR design by the window method and direct-form filtering.

use std::f64::consts::PI;

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};

/// Default tap length: 2^9 + 1, giving an integer delay of 256 samples.
pub const DEFAULT_TAPS: usize = 513;

const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Linear-phase FIR filter with odd length and integer group delay.
#[derive(Debug, Clone, PartialEq)]
pub struct FirFilter {
    coefficients: Vec<f64>,
    cutoff_hz: f64,
    sample_rate_hz: u32,
}

impl FirFilter {
    /// Wrap an existing impulse response. The response must be odd-length and
    /// symmetric about its centre.
    pub fn from_coefficients(
        coefficients: Vec<f64>,
        cutoff_hz: f64,
        sample_rate_hz: u32,
    ) -> Result<Self> {
        check_taps(coefficients.len())?;
        if sample_rate_hz == 0 {
            return Err(Error::param("sample rate must be positive"));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::param("coefficients must be finite"));
        }
        if !is_symmetric(&coefficients) {
            return Err(Error::param("coefficients are not linear phase"));
        }
        Ok(Self {
            coefficients,
            cutoff_hz,
            sample_rate_hz,
        })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn taps(&self) -> usize {
        self.coefficients.len()
    }

    pub fn cutoff_hz(&self) -> f64 {
        self.cutoff_hz
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    /// (taps - 1) / 2.
    pub fn group_delay_samples(&self) -> usize {
        (self.coefficients.len() - 1) / 2
    }
}

fn check_taps(taps: usize) -> Result<()> {
    if taps < 3 || taps % 2 == 0 {
        return Err(Error::param(format!(
            "tap length must be odd and at least 3, got {taps}"
        )));
    }
    Ok(())
}

fn is_symmetric(h: &[f64]) -> bool {
    let n = h.len();
    (0..n / 2).all(|i| (h[i] - h[n - 1 - i]).abs() <= SYMMETRY_TOLERANCE)
}

/// Blackman window value at offset `k` from the centre of an `taps`-point window.
fn blackman(k: f64, taps: usize) -> f64 {
    let m = (taps - 1) as f64;
    let x = 2.0 * PI * (k + m / 2.0) / m;
    0.42 - 0.5 * x.cos() + 0.08 * (2.0 * x).cos()
}

/// Blackman-windowed sinc lowpass with unity DC gain. The ideal response cuts
/// at `fc_hz`, which places the -6 dB point of the windowed design there.
pub fn design_lowpass_fir(fc_hz: f64, sample_rate_hz: u32, taps: usize) -> Result<FirFilter> {
    check_taps(taps)?;
    if sample_rate_hz == 0 {
        return Err(Error::param("sample rate must be positive"));
    }
    let nyquist = sample_rate_hz as f64 / 2.0;
    if !(fc_hz > 0.0 && fc_hz < nyquist) {
        return Err(Error::param(format!(
            "cutoff {fc_hz} Hz outside (0, {nyquist}) Hz"
        )));
    }

    let center = (taps - 1) / 2;
    let wc = 2.0 * PI * fc_hz / sample_rate_hz as f64;
    // Compute one half and mirror so the result is exactly symmetric.
    let half: Vec<f64> = (0..=center)
        .map(|k| {
            let k = k as f64;
            let ideal = if k == 0.0 { wc / PI } else { (wc * k).sin() / (PI * k) };
            ideal * blackman(k, taps)
        })
        .collect();
    let mut h = vec![0.0; taps];
    for (k, &v) in half.iter().enumerate() {
        h[center + k] = v;
        h[center - k] = v;
    }
    let dc: f64 = h.iter().sum();
    h.iter_mut().for_each(|c| *c /= dc);

    Ok(FirFilter {
        coefficients: h,
        cutoff_hz: fc_hz,
        sample_rate_hz,
    })
}

/// Highpass as a delayed unit impulse minus the lowpass. The two filters sum to
/// a pure delay, so splitting and re-adding restores the input exactly.
pub fn derive_complementary_highpass(lpf: &FirFilter) -> Result<FirFilter> {
    check_taps(lpf.taps())?;
    if !is_symmetric(lpf.coefficients()) {
        return Err(Error::param("lowpass is not linear phase"));
    }
    let center = lpf.group_delay_samples();
    let mut h: Vec<f64> = lpf.coefficients().iter().map(|c| -c).collect();
    h[center] += 1.0;
    Ok(FirFilter {
        coefficients: h,
        cutoff_hz: lpf.cutoff_hz(),
        sample_rate_hz: lpf.sample_rate_hz(),
    })
}

/// Causal convolution with zero history, truncated to the input length. The
/// output carries the filter's group delay.
pub fn apply_fir(buffer: &AudioBuffer, filter: &FirFilter) -> Result<AudioBuffer> {
    if buffer.sample_rate_hz() != filter.sample_rate_hz() {
        return Err(Error::SampleRateMismatch {
            left: buffer.sample_rate_hz(),
            right: filter.sample_rate_hz(),
        });
    }
    let x = buffer.samples();
    let h = filter.coefficients();
    let out = (0..x.len())
        .map(|k| {
            let m_max = k.min(h.len() - 1);
            // y[k] = sum_m h[m] x[k - m]
            h[..=m_max]
                .iter()
                .zip(x[k - m_max..=k].iter().rev())
                .map(|(a, b)| a * b)
                .sum()
        })
        .collect();
    Ok(AudioBuffer::from_parts(out, buffer.sample_rate_hz()))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent DTFT magnitude by direct summation.
    fn dtft_mag(h: &[f64], f_hz: f64, fs: f64) -> f64 {
        let w = 2.0 * PI * f_hz / fs;
        let (mut re, mut im) = (0.0, 0.0);
        for (n, &c) in h.iter().enumerate() {
            re += c * (w * n as f64).cos();
            im -= c * (w * n as f64).sin();
        }
        (re * re + im * im).sqrt()
    }

    fn db(x: f64) -> f64 {
        20.0 * x.log10()
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(design_lowpass_fir(250.0, 48_000, 512).is_err());
        assert!(design_lowpass_fir(250.0, 48_000, 1).is_err());
        assert!(design_lowpass_fir(0.0, 48_000, 513).is_err());
        assert!(design_lowpass_fir(24_000.0, 48_000, 513).is_err());
        assert!(design_lowpass_fir(-5.0, 48_000, 513).is_err());
    }

    #[test]
    fn unity_dc_and_symmetric() {
        for &(fc, taps) in &[(250.0, 513), (500.0, 513), (1000.0, 1025), (3000.0, 65)] {
            let f = design_lowpass_fir(fc, 48_000, taps).unwrap();
            let sum: f64 = f.coefficients().iter().sum();
            assert!((sum - 1.0).abs() <= 1e-9, "sum {sum}");
            assert!(is_symmetric(f.coefficients()));
            assert_eq!(f.group_delay_samples(), (taps - 1) / 2);
        }
    }

    #[test]
    fn minus_six_db_at_cutoff() {
        let f = design_lowpass_fir(500.0, 48_000, 513).unwrap();
        let g = db(dtft_mag(f.coefficients(), 500.0, 48_000.0));
        assert!((g + 6.0).abs() <= 0.5, "gain at fc {g} dB");
    }

    #[test]
    fn minus_six_db_point_within_two_percent() {
        for fc in [250.0, 500.0, 1000.0] {
            let f = design_lowpass_fir(fc, 48_000, 513).unwrap();
            let target = 10f64.powf(-6.0 / 20.0);
            // bisection on the monotone transition of the oracle response
            let (mut lo, mut hi) = (fc * 0.5, fc * 1.5);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if dtft_mag(f.coefficients(), mid, 48_000.0) > target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            assert!((lo - fc).abs() <= 0.02 * fc, "fc {fc}: -6 dB at {lo}");
        }
    }

    #[test]
    fn stopband_floor_for_250() {
        let f = design_lowpass_fir(250.0, 48_000, 513).unwrap();
        // Blackman transition width is about 5.5 fs / taps.
        let edge = 250.0 + 0.5 * 5.5 * 48_000.0 / 513.0;
        let mut f_hz = edge;
        while f_hz < 24_000.0 {
            let g = db(dtft_mag(f.coefficients(), f_hz, 48_000.0));
            assert!(g <= -55.0, "{g} dB at {f_hz} Hz");
            f_hz += 7.3;
        }
    }

    #[test]
    fn highpass_is_complementary() {
        let lpf = design_lowpass_fir(250.0, 48_000, 513).unwrap();
        let hpf = derive_complementary_highpass(&lpf).unwrap();
        assert_eq!(hpf.group_delay_samples(), 256);
        for (i, (l, h)) in lpf.coefficients().iter().zip(hpf.coefficients()).enumerate() {
            let expected = if i == 256 { 1.0 } else { 0.0 };
            assert!((l + h - expected).abs() < 1e-15);
        }
        assert!(db(dtft_mag(hpf.coefficients(), 0.0, 48_000.0)) <= -100.0);

        let lpf = design_lowpass_fir(1000.0, 48_000, 513).unwrap();
        let hpf = derive_complementary_highpass(&lpf).unwrap();
        assert_eq!(hpf.group_delay_samples(), 256);
        assert_eq!(hpf.taps(), 513);
    }

    #[test]
    fn highpass_rejects_asymmetric_input() {
        let bad = FirFilter {
            coefficients: vec![0.1, 0.5, 0.2],
            cutoff_hz: 100.0,
            sample_rate_hz: 48_000,
        };
        assert!(derive_complementary_highpass(&bad).is_err());
        assert!(FirFilter::from_coefficients(vec![0.1, 0.5, 0.2], 100.0, 48_000).is_err());
    }

    #[test]
    fn impulse_returns_coefficients() {
        let f = design_lowpass_fir(500.0, 48_000, 513).unwrap();
        let mut x = vec![0.0; 1000];
        x[0] = 1.0;
        let y = apply_fir(&AudioBuffer::new(x, 48_000).unwrap(), &f).unwrap();
        assert_eq!(&y.samples()[..513], f.coefficients());
        assert!(y.samples()[513..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn dc_settles_to_input_level() {
        let f = design_lowpass_fir(250.0, 48_000, 513).unwrap();
        let x = AudioBuffer::new(vec![0.5; 2000], 48_000).unwrap();
        let y = apply_fir(&x, &f).unwrap();
        for &v in &y.samples()[513..] {
            assert!((v - 0.5).abs() <= 1e-9);
        }
    }

    #[test]
    fn sample_rate_mismatch_is_rejected() {
        let f = design_lowpass_fir(500.0, 48_000, 33).unwrap();
        let x = AudioBuffer::new(vec![0.0; 10], 44_100).unwrap();
        assert!(matches!(apply_fir(&x, &f), Err(Error::SampleRateMismatch { .. })));
    }
}
