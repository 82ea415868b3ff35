//! Band-limited phase inversion for one ear.
//!
//! Both channels are split into low and high bands by the same complementary
//! filter pair, so they share the same group delay. The left channel is
//! recombined with per-band signs chosen by the method; the right channel is
//! always recombined with `[+1, +1]`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::audio::{AudioBuffer, StereoBuffer};
use crate::dsp::fir::{apply_fir, derive_complementary_highpass, design_lowpass_fir, FirFilter};
use crate::error::{Error, Result};

/// Crossover frequencies used by the Low and High variants.
pub const CROSSOVERS_HZ: [u32; 3] = [250, 500, 1000];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BoosterKind {
    Original,
    LowBooster,
    HighBooster,
    AllBooster,
}

/// One of the eight processing methods. `Original` and `AllBooster` carry a
/// nominal 250 Hz crossover so every method keys uniformly on (kind, fc).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoosterMethod {
    kind: BoosterKind,
    fc_hz: u32,
}

impl BoosterMethod {
    pub const ORIGINAL: Self = Self {
        kind: BoosterKind::Original,
        fc_hz: 250,
    };
    pub const ALL_250: Self = Self {
        kind: BoosterKind::AllBooster,
        fc_hz: 250,
    };

    pub fn new(kind: BoosterKind, fc_hz: u32) -> Result<Self> {
        let ok = match kind {
            BoosterKind::Original | BoosterKind::AllBooster => fc_hz == 250,
            BoosterKind::LowBooster | BoosterKind::HighBooster => CROSSOVERS_HZ.contains(&fc_hz),
        };
        if !ok {
            return Err(Error::param(format!(
                "unsupported crossover {fc_hz} Hz for {kind:?}"
            )));
        }
        Ok(Self { kind, fc_hz })
    }

    pub fn low(fc_hz: u32) -> Result<Self> {
        Self::new(BoosterKind::LowBooster, fc_hz)
    }

    pub fn high(fc_hz: u32) -> Result<Self> {
        Self::new(BoosterKind::HighBooster, fc_hz)
    }

    /// The eight methods in canonical order: Original, Low x3, High x3, All.
    pub fn all() -> [Self; 8] {
        let low = |fc| Self {
            kind: BoosterKind::LowBooster,
            fc_hz: fc,
        };
        let high = |fc| Self {
            kind: BoosterKind::HighBooster,
            fc_hz: fc,
        };
        [
            Self::ORIGINAL,
            low(250),
            low(500),
            low(1000),
            high(250),
            high(500),
            high(1000),
            Self::ALL_250,
        ]
    }

    pub fn kind(&self) -> BoosterKind {
        self.kind
    }

    pub fn fc_hz(&self) -> u32 {
        self.fc_hz
    }

    pub fn is_original(&self) -> bool {
        self.kind == BoosterKind::Original
    }

    /// Signs applied to the left-ear low and high bands.
    pub fn band_coefficients(&self) -> BandCoefficients {
        use BandSign::{Minus, Plus};
        let (low, high) = match self.kind {
            BoosterKind::Original => (Plus, Plus),
            BoosterKind::LowBooster => (Minus, Plus),
            BoosterKind::HighBooster => (Plus, Minus),
            BoosterKind::AllBooster => (Minus, Minus),
        };
        BandCoefficients { low, high }
    }
}

impl fmt::Display for BoosterMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            BoosterKind::Original => write!(f, "Original"),
            BoosterKind::LowBooster => write!(f, "Low{}", self.fc_hz),
            BoosterKind::HighBooster => write!(f, "High{}", self.fc_hz),
            BoosterKind::AllBooster => write!(f, "All{}", self.fc_hz),
        }
    }
}

impl FromStr for BoosterMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("original") {
            return Ok(Self::ORIGINAL);
        }
        let split = s
            .find(|c: char| c.is_ascii_digit())
            .ok_or_else(|| Error::param(format!("unknown method `{s}`")))?;
        let (name, fc) = s.split_at(split);
        let fc: u32 = fc
            .parse()
            .map_err(|_| Error::param(format!("bad crossover in `{s}`")))?;
        let kind = match name.to_ascii_lowercase().as_str() {
            "low" => BoosterKind::LowBooster,
            "high" => BoosterKind::HighBooster,
            "all" => BoosterKind::AllBooster,
            _ => return Err(Error::param(format!("unknown method `{s}`"))),
        };
        Self::new(kind, fc)
    }
}

impl Serialize for BoosterMethod {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BoosterMethod {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BandSign {
    Plus,
    Minus,
}

impl BandSign {
    pub fn value(self) -> f64 {
        match self {
            BandSign::Plus => 1.0,
            BandSign::Minus => -1.0,
        }
    }
}

impl TryFrom<i32> for BandSign {
    type Error = Error;

    fn try_from(v: i32) -> Result<Self> {
        match v {
            1 => Ok(BandSign::Plus),
            -1 => Ok(BandSign::Minus),
            _ => Err(Error::param(format!("band coefficient must be +1 or -1, got {v}"))),
        }
    }
}

/// Per-band signs used when adding the low and high bands back together.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BandCoefficients {
    pub low: BandSign,
    pub high: BandSign,
}

impl BandCoefficients {
    pub const PASS: Self = Self {
        low: BandSign::Plus,
        high: BandSign::Plus,
    };

    pub fn new(low: i32, high: i32) -> Result<Self> {
        Ok(Self {
            low: low.try_into()?,
            high: high.try_into()?,
        })
    }
}

impl FromStr for BandCoefficients {
    type Err = Error;

    /// Parses `"1,-1"` or `"[1, -1]"`.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        let [low, high] = parts.as_slice() else {
            return Err(Error::param(format!("expected two coefficients, got `{s}`")));
        };
        let parse = |p: &str| {
            p.parse::<i32>()
                .map_err(|_| Error::param(format!("bad coefficient `{p}`")))
        };
        Self::new(parse(low)?, parse(high)?)
    }
}

/// `low_sign * low + high_sign * high`.
pub fn recombine_bands(
    low: &AudioBuffer,
    high: &AudioBuffer,
    coeffs: BandCoefficients,
) -> Result<AudioBuffer> {
    low.check_compatible(high)?;
    let (a, b) = (coeffs.low.value(), coeffs.high.value());
    let out = low
        .samples()
        .iter()
        .zip(high.samples())
        .map(|(l, h)| a * l + b * h)
        .collect();
    Ok(AudioBuffer::from_parts(out, low.sample_rate_hz()))
}

/// A complementary lowpass/highpass pair.
#[derive(Debug, Clone)]
pub struct BandSplitter {
    lowpass: FirFilter,
    highpass: FirFilter,
}

impl BandSplitter {
    pub fn new(fc_hz: f64, sample_rate_hz: u32, taps: usize) -> Result<Self> {
        let lowpass = design_lowpass_fir(fc_hz, sample_rate_hz, taps)?;
        let highpass = derive_complementary_highpass(&lowpass)?;
        Ok(Self { lowpass, highpass })
    }

    pub fn lowpass(&self) -> &FirFilter {
        &self.lowpass
    }

    pub fn highpass(&self) -> &FirFilter {
        &self.highpass
    }

    pub fn delay_samples(&self) -> usize {
        self.lowpass.group_delay_samples()
    }

    /// Returns (low band, high band).
    pub fn split(&self, buffer: &AudioBuffer) -> Result<(AudioBuffer, AudioBuffer)> {
        Ok((
            apply_fir(buffer, &self.lowpass)?,
            apply_fir(buffer, &self.highpass)?,
        ))
    }

    pub fn process(&self, buffer: &AudioBuffer, coeffs: BandCoefficients) -> Result<AudioBuffer> {
        let (low, high) = self.split(buffer)?;
        recombine_bands(&low, &high, coeffs)
    }
}

/// Apply `method` to the left ear. Both ears pass through the same filter pair
/// and come out delayed by `(taps - 1) / 2` samples.
pub fn apply_booster(
    stimulus: &StereoBuffer,
    method: BoosterMethod,
    taps: usize,
) -> Result<StereoBuffer> {
    let splitter = BandSplitter::new(method.fc_hz() as f64, stimulus.sample_rate_hz(), taps)?;
    apply_booster_with(stimulus, method, &splitter)
}

/// Like [`apply_booster`] with a caller-supplied filter pair.
pub fn apply_booster_with(
    stimulus: &StereoBuffer,
    method: BoosterMethod,
    splitter: &BandSplitter,
) -> Result<StereoBuffer> {
    if splitter.lowpass().cutoff_hz() != method.fc_hz() as f64 {
        return Err(Error::param(format!(
            "splitter crossover {} Hz does not match {method}",
            splitter.lowpass().cutoff_hz()
        )));
    }
    let left = splitter.process(stimulus.left(), method.band_coefficients())?;
    let right = splitter.process(stimulus.right(), BandCoefficients::PASS)?;
    StereoBuffer::new(left, right)
}
