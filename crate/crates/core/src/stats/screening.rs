//! Listener screening from Dummy (both-unprocessed) trials.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::record::TrialRecord;

pub const DEFAULT_THRESHOLD_DB: i32 = 5;
/// Three scored sessions hold at least one Dummy trial each.
pub const MIN_DUMMY_TRIALS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScreeningOutcome {
    pub threshold_db: i32,
    pub excluded: BTreeSet<String>,
    pub dummy_adjustments: BTreeMap<String, Vec<i32>>,
}

impl ScreeningOutcome {
    pub fn retains(&self, participant: &str) -> bool {
        !self.excluded.contains(participant)
    }
}

/// Exclude anyone with at least one Dummy adjustment of magnitude
/// `threshold_db` or more.
pub fn screen_dummies(dummies: BTreeMap<String, Vec<i32>>, threshold_db: i32) -> Result<ScreeningOutcome> {
    if threshold_db <= 0 {
        return Err(Error::Screening(format!("threshold must be positive, got {threshold_db}")));
    }
    for (p, adj) in &dummies {
        if adj.len() < MIN_DUMMY_TRIALS {
            return Err(Error::Screening(format!(
                "participant {p} has {} dummy trials, need {MIN_DUMMY_TRIALS}",
                adj.len()
            )));
        }
    }
    let excluded = dummies
        .iter()
        .filter(|(_, adj)| adj.iter().any(|a| a.abs() >= threshold_db))
        .map(|(p, _)| p.clone())
        .collect();
    Ok(ScreeningOutcome {
        threshold_db,
        excluded,
        dummy_adjustments: dummies,
    })
}

/// Screen from scored trial records. Every participant that appears in the
/// records must have enough Dummy trials.
pub fn screen_participants(records: &[TrialRecord], threshold_db: i32) -> Result<ScreeningOutcome> {
    let mut dummies: BTreeMap<String, Vec<i32>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.scored) {
        let entry = dummies.entry(r.participant.clone()).or_default();
        if r.is_dummy() {
            entry.push(r.bhld_db);
        }
    }
    screen_dummies(dummies, threshold_db)
}

/// Scored records from retained participants.
pub fn retain_screened(records: &[TrialRecord], outcome: &ScreeningOutcome) -> Vec<TrialRecord> {
    records
        .iter()
        .filter(|r| r.scored && outcome.retains(&r.participant))
        .cloned()
        .collect()
}
