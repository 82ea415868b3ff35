#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use booster_core::plan::{rotation, Schedule, ScheduledTrial};
use booster_core::stimulus::{GainTable, StimulusSet};
use booster_core::{AudioBuffer, NoiseId, SignalId, SAMPLE_RATE_HZ};

/// 0.1 s tones and seeded noise: enough to exercise the run logic quickly.
pub fn short_set() -> Arc<StimulusSet> {
    let n = SAMPLE_RATE_HZ as usize / 10;
    let tone = |f: f64, a: f64| {
        let s = (0..n)
            .map(|i| a * (2.0 * std::f64::consts::PI * f * i as f64 / SAMPLE_RATE_HZ as f64).sin())
            .collect();
        AudioBuffer::new(s, SAMPLE_RATE_HZ).unwrap()
    };
    let mut state = 12345u64;
    let mut noise = |a: f64| {
        let s = (0..n)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                a * ((state >> 11) as f64 / (1u64 << 53) as f64 - 0.5)
            })
            .collect();
        AudioBuffer::new(s, SAMPLE_RATE_HZ).unwrap()
    };
    let signals: BTreeMap<_, _> = [
        (SignalId::A, tone(220.0, 0.3)),
        (SignalId::B, tone(440.0, 0.3)),
        (SignalId::C, tone(880.0, 0.3)),
    ]
    .into_iter()
    .collect();
    let noises: BTreeMap<_, _> = [
        (NoiseId::A, noise(0.5)),
        (NoiseId::B, noise(0.4)),
        (NoiseId::C, noise(0.3)),
    ]
    .into_iter()
    .collect();
    Arc::new(StimulusSet {
        signals,
        noises,
        gains: GainTable::default(),
        manifest: Vec::new(),
    })
}

pub fn participants(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("P{i}")).collect()
}

pub fn schedule(n: usize) -> BTreeMap<String, Vec<ScheduledTrial>> {
    Schedule::build(&participants(n), &rotation(n), 7, 100)
        .unwrap()
        .trials_by_participant()
}

/// Small filters keep the per-trial split cheap in tests.
pub const TEST_TAPS: usize = 65;
