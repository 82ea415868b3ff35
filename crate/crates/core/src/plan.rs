//! Condition scheduling.
//!
//! A block of eight tentative sessions covers all 72 conditions once. Each
//! (signal, noise) row gets the same seeded method order, rotated by a
//! row-specific offset; the nine offsets cover all eight residues once plus
//! one repeat, so every session holds nine distinct rows, eight distinct
//! methods, and exactly one method twice.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::condition::{Condition, NoiseId, SignalId};
use crate::dsp::{BoosterKind, BoosterMethod};
use crate::error::{Error, Result};

pub const SESSIONS_PER_BLOCK: usize = 8;
pub const TRIALS_PER_SESSION: usize = 9;
pub const SCORED_SESSIONS: usize = 3;
pub const SCHEDULE_SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TentativeSession {
    pub trials: Vec<Condition>,
}

impl TentativeSession {
    /// Checks the session shape: nine distinct (signal, noise) pairs and
    /// exactly eight distinct methods.
    pub fn validate(&self) -> Result<()> {
        if self.trials.len() != TRIALS_PER_SESSION {
            return Err(Error::Schedule(format!("session has {} trials", self.trials.len())));
        }
        let mut pairs: Vec<_> = self.trials.iter().map(|c| (c.signal, c.noise)).collect();
        pairs.sort();
        pairs.dedup();
        if pairs.len() != TRIALS_PER_SESSION {
            return Err(Error::Schedule("repeated signal/noise pair in session".into()));
        }
        let mut methods: Vec<_> = self.trials.iter().map(|c| c.method).collect();
        methods.sort();
        methods.dedup();
        if methods.len() != SESSIONS_PER_BLOCK {
            return Err(Error::Schedule(format!("session has {} distinct methods", methods.len())));
        }
        Ok(())
    }

    pub fn dummy_count(&self) -> usize {
        self.trials.iter().filter(|c| c.is_dummy()).count()
    }
}

fn pairs() -> Vec<(SignalId, NoiseId)> {
    SignalId::ALL
        .into_iter()
        .flat_map(|s| NoiseId::ALL.into_iter().map(move |n| (s, n)))
        .collect()
}

pub fn build_tentative_block(seed: u64) -> Vec<TentativeSession> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order = BoosterMethod::all();
    order.shuffle(&mut rng);

    let mut offsets: Vec<usize> = (0..SESSIONS_PER_BLOCK).collect();
    offsets.push(rng.gen_range(0..SESSIONS_PER_BLOCK));
    offsets.shuffle(&mut rng);

    let rows = pairs();
    (0..SESSIONS_PER_BLOCK)
        .map(|s| {
            let mut trials: Vec<Condition> = rows
                .iter()
                .zip(&offsets)
                .map(|(&(sig, noise), &off)| Condition::new(sig, noise, order[(s + off) % SESSIONS_PER_BLOCK]))
                .collect();
            trials.shuffle(&mut rng);
            TentativeSession { trials }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduledTrial {
    /// 0 for practice, 1..=3 for scored sessions.
    pub session: u32,
    /// 1-based position in the participant's run.
    pub trial: u32,
    pub condition: Condition,
}

impl ScheduledTrial {
    pub fn scored(&self) -> bool {
        self.session > 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticipantPlan {
    pub participant_id: String,
    pub practice: TentativeSession,
    pub practice_index: usize,
    pub session_indices: [usize; SCORED_SESSIONS],
    pub sessions: Vec<TentativeSession>,
    /// Shuffled union of the three scored sessions.
    pub playlist: Vec<Condition>,
    pub seed: u64,
}

impl ParticipantPlan {
    /// Practice trials first, then the playlist split into three sessions.
    pub fn trials(&self) -> Vec<ScheduledTrial> {
        let practice = self.practice.trials.iter().map(|&c| (0u32, c));
        let scored = self
            .playlist
            .iter()
            .enumerate()
            .map(|(i, &c)| ((i / TRIALS_PER_SESSION) as u32 + 1, c));
        practice
            .chain(scored)
            .enumerate()
            .map(|(i, (session, condition))| ScheduledTrial {
                session,
                trial: i as u32 + 1,
                condition,
            })
            .collect()
    }
}

/// Assign three sessions of `block` to a participant and shuffle their 27
/// trials. The practice session is a seeded pick among the unassigned ones.
pub fn build_participant_plan(
    participant_id: &str,
    block: &[TentativeSession],
    which: [usize; SCORED_SESSIONS],
    seed: u64,
) -> Result<ParticipantPlan> {
    if block.len() != SESSIONS_PER_BLOCK {
        return Err(Error::Schedule(format!("block has {} sessions", block.len())));
    }
    if let Some(&bad) = which.iter().find(|&&i| i >= SESSIONS_PER_BLOCK) {
        return Err(Error::Schedule(format!("session index {bad} out of range")));
    }
    if which[0] == which[1] || which[0] == which[2] || which[1] == which[2] {
        return Err(Error::Schedule(format!("duplicate session indices {which:?}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sessions: Vec<TentativeSession> = which.iter().map(|&i| block[i].clone()).collect();
    let mut playlist: Vec<Condition> = sessions.iter().flat_map(|s| s.trials.iter().copied()).collect();
    playlist.shuffle(&mut rng);

    let spare: Vec<usize> = (0..SESSIONS_PER_BLOCK).filter(|i| !which.contains(i)).collect();
    let practice_index = *spare.choose(&mut rng).expect("five spare sessions");
    let mut practice = block[practice_index].clone();
    practice.trials.shuffle(&mut rng);

    Ok(ParticipantPlan {
        participant_id: participant_id.to_string(),
        practice,
        practice_index,
        session_indices: which,
        sessions,
        playlist,
        seed,
    })
}

/// Participant `p` gets sessions 3p, 3p+1, 3p+2 (mod 8). Over sixteen
/// participants every session is used six times.
pub fn rotation(participants: usize) -> Vec<[usize; SCORED_SESSIONS]> {
    (0..participants)
        .map(|p| {
            let b = SCORED_SESSIONS * p;
            [b % 8, (b + 1) % 8, (b + 2) % 8]
        })
        .collect()
}

/// One line of the schedule file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleRecord {
    pub schema: u32,
    pub participant: String,
    pub session: u32,
    pub trial: u32,
    pub signal: SignalId,
    pub noise: NoiseId,
    pub method: BoosterKind,
    pub fc: u32,
    pub seed: u64,
}

impl ScheduleRecord {
    pub fn condition(&self) -> Result<Condition> {
        Ok(Condition::new(self.signal, self.noise, BoosterMethod::new(self.method, self.fc)?))
    }
}

#[derive(Debug, Clone)]
pub struct Schedule {
    pub block_seed: u64,
    pub block: Vec<TentativeSession>,
    pub plans: Vec<ParticipantPlan>,
}

impl Schedule {
    /// Plans for `participants` using `assignment` (one entry per
    /// participant). Per-participant shuffle seeds are `plan_seed + index`.
    pub fn build(
        participants: &[String],
        assignment: &[[usize; SCORED_SESSIONS]],
        block_seed: u64,
        plan_seed: u64,
    ) -> Result<Self> {
        if participants.len() != assignment.len() {
            return Err(Error::Schedule(format!(
                "{} participants but {} assignment rows",
                participants.len(),
                assignment.len()
            )));
        }
        let block = build_tentative_block(block_seed);
        let plans = participants
            .iter()
            .zip(assignment)
            .enumerate()
            .map(|(i, (id, which))| build_participant_plan(id, &block, *which, plan_seed.wrapping_add(i as u64)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            block_seed,
            block,
            plans,
        })
    }

    pub fn records(&self) -> Vec<ScheduleRecord> {
        self.plans
            .iter()
            .flat_map(|p| {
                p.trials().into_iter().map(move |t| ScheduleRecord {
                    schema: SCHEDULE_SCHEMA,
                    participant: p.participant_id.clone(),
                    session: t.session,
                    trial: t.trial,
                    signal: t.condition.signal,
                    noise: t.condition.noise,
                    method: t.condition.method.kind(),
                    fc: t.condition.method.fc_hz(),
                    seed: p.seed,
                })
            })
            .collect()
    }

    /// The same mapping [`read_schedule`] produces from the written file.
    pub fn trials_by_participant(&self) -> BTreeMap<String, Vec<ScheduledTrial>> {
        self.plans
            .iter()
            .map(|p| (p.participant_id.clone(), p.trials()))
            .collect()
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        for r in self.records() {
            serde_json::to_writer(&mut out, &r)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Scored-trial count per condition across all participants.
    pub fn condition_counts(&self) -> BTreeMap<Condition, usize> {
        let mut counts = BTreeMap::new();
        for p in &self.plans {
            for c in &p.playlist {
                *counts.entry(*c).or_insert(0) += 1;
            }
        }
        counts
    }
}

/// Reads a schedule file into per-participant trial lists in trial order.
pub fn read_schedule<R: BufRead>(input: R) -> Result<BTreeMap<String, Vec<ScheduledTrial>>> {
    let mut out: BTreeMap<String, Vec<ScheduledTrial>> = BTreeMap::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r: ScheduleRecord = serde_json::from_str(&line)
            .map_err(|e| Error::Schedule(format!("line {}: {e}", n + 1)))?;
        if r.schema != SCHEDULE_SCHEMA {
            return Err(Error::Schedule(format!("line {}: unsupported schema {}", n + 1, r.schema)));
        }
        let condition = r.condition()?;
        out.entry(r.participant).or_default().push(ScheduledTrial {
            session: r.session,
            trial: r.trial,
            condition,
        });
    }
    for (p, trials) in &mut out {
        trials.sort_by_key(|t| t.trial);
        for (i, t) in trials.iter().enumerate() {
            if t.trial as usize != i + 1 {
                return Err(Error::Schedule(format!("participant {p}: trial numbers are not 1..{}", trials.len())));
            }
        }
    }
    Ok(out)
}
