//! Initial speech gains per (signal, noise) pair.
//!
//! The file format is TOML with dotted keys, one line per pair:
//!
//! ```text
//! A.A = -21.2
//! A.B = -27.7
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::condition::{NoiseId, SignalId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GainTable {
    gains: BTreeMap<(SignalId, NoiseId), f64>,
}

impl Default for GainTable {
    /// Listener-calibrated defaults: the quietest level at which the speech is
    /// still detectable in each noise.
    fn default() -> Self {
        use NoiseId as N;
        use SignalId as S;
        let gains = [
            ((S::A, N::A), -21.2),
            ((S::A, N::B), -27.7),
            ((S::A, N::C), -17.1),
            ((S::B, N::A), -22.6),
            ((S::B, N::B), -30.5),
            ((S::B, N::C), -21.1),
            ((S::C, N::A), -19.7),
            ((S::C, N::B), -22.1),
            ((S::C, N::C), -20.0),
        ]
        .into_iter()
        .collect();
        Self { gains }
    }
}

impl GainTable {
    /// Build from explicit entries; all nine pairs are required.
    pub fn from_entries(entries: impl IntoIterator<Item = ((SignalId, NoiseId), f64)>) -> Result<Self> {
        let gains: BTreeMap<_, _> = entries.into_iter().collect();
        let table = Self { gains };
        table.validate()?;
        Ok(table)
    }

    fn validate(&self) -> Result<()> {
        for s in SignalId::ALL {
            for n in NoiseId::ALL {
                match self.gains.get(&(s, n)) {
                    None => {
                        return Err(Error::MissingGain {
                            signal: s.letter(),
                            noise: n.letter(),
                        })
                    }
                    Some(g) if !g.is_finite() => {
                        return Err(Error::GainTable(format!("non-finite gain for {s}.{n}")))
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(())
    }

    pub fn get(&self, signal: SignalId, noise: NoiseId) -> Result<f64> {
        self.gains
            .get(&(signal, noise))
            .copied()
            .ok_or(Error::MissingGain {
                signal: signal.letter(),
                noise: noise.letter(),
            })
    }

    pub fn set(&mut self, signal: SignalId, noise: NoiseId, gain_db: f64) {
        self.gains.insert((signal, noise), gain_db);
    }

    pub fn iter(&self) -> impl Iterator<Item = ((SignalId, NoiseId), f64)> + '_ {
        self.gains.iter().map(|(k, v)| (*k, *v))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let root: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::GainTable(e.message().to_string()))?;
        let mut gains = BTreeMap::new();
        for (signal_key, row) in &root {
            let signal: SignalId = signal_key.parse()?;
            let row = row
                .as_table()
                .ok_or_else(|| Error::GainTable(format!("expected `{signal_key}.<noise> = dB`")))?;
            for (noise_key, value) in row {
                let noise: NoiseId = noise_key.parse()?;
                let db = match value {
                    toml::Value::Float(f) => *f,
                    toml::Value::Integer(i) => *i as f64,
                    other => {
                        return Err(Error::GainTable(format!(
                            "{signal_key}.{noise_key}: expected a number, got {}",
                            other.type_str()
                        )))
                    }
                };
                gains.insert((signal, noise), db);
            }
        }
        let table = Self { gains };
        table.validate()?;
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        for ((s, n), g) in self.iter() {
            let _ = writeln!(out, "{s}.{n} = {g:?}");
        }
        out
    }
}
