//! Experimental condition keys: speech signal, noise, processing method.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dsp::BoosterMethod;
use crate::error::{Error, Result};

macro_rules! source_id {
    ($name:ident, $what:literal) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum $name {
            A,
            B,
            C,
        }

        impl $name {
            pub const ALL: [Self; 3] = [Self::A, Self::B, Self::C];

            pub fn letter(self) -> char {
                match self {
                    Self::A => 'A',
                    Self::B => 'B',
                    Self::C => 'C',
                }
            }

            pub fn index(self) -> usize {
                self as usize
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.letter())
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s.trim().to_ascii_uppercase().as_str() {
                    "A" => Ok(Self::A),
                    "B" => Ok(Self::B),
                    "C" => Ok(Self::C),
                    _ => Err(Error::param(format!(concat!("unknown ", $what, " id `{}`"), s))),
                }
            }
        }
    };
}

source_id!(SignalId, "signal");
source_id!(NoiseId, "noise");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Condition {
    pub signal: SignalId,
    pub noise: NoiseId,
    pub method: BoosterMethod,
}

impl Condition {
    pub fn new(signal: SignalId, noise: NoiseId, method: BoosterMethod) -> Self {
        Self {
            signal,
            noise,
            method,
        }
    }

    /// Both sounds unprocessed; used to screen listeners.
    pub fn is_dummy(&self) -> bool {
        self.method.is_original()
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{}/N{}/{}", self.signal, self.noise, self.method)
    }
}

/// All 72 conditions ordered by signal, then noise, then method.
pub fn enumerate_conditions() -> Vec<Condition> {
    SignalId::ALL
        .into_iter()
        .flat_map(|s| {
            NoiseId::ALL.into_iter().flat_map(move |n| {
                BoosterMethod::all()
                    .into_iter()
                    .map(move |m| Condition::new(s, n, m))
            })
        })
        .collect()
}
