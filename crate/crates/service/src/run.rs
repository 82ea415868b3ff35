//! Per-participant run state machine.
//!
//! All mutations go through `&mut self`; the HTTP layer serialises them behind
//! a mutex. Rendered WAV bytes are handed out as `Arc`s so streaming can
//! proceed without holding the lock.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use booster_core::plan::ScheduledTrial;
use booster_core::record::{TrialLog, TrialRecord, LOG_SCHEMA};
use booster_core::stimulus::wav::stereo_i16_bytes;
use booster_core::stimulus::{PreparedTrial, StimulusSet};
use serde::Serialize;

use crate::error::{Result, ServiceError};

pub const DEFAULT_CLAMP_DB: i32 = 30;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub clamp_db: i32,
    pub taps: usize,
    /// Tell the client to loop playback instead of playing once per press.
    pub loop_playback: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            clamp_db: DEFAULT_CLAMP_DB,
            taps: booster_core::dsp::DEFAULT_TAPS,
            loop_playback: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Idle,
    PlayingA,
    PlayingB,
    Stopped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    A,
    B,
}

impl std::str::FromStr for Which {
    type Err = ServiceError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Which::A),
            "B" | "b" => Ok(Which::B),
            _ => Err(ServiceError::BadRequest(format!("which must be A or B, got `{s}`"))),
        }
    }
}

/// What the listener's screen may show. Carries no condition details.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialView {
    pub number: u32,
    pub total: u32,
    pub session: u32,
    pub gain_db: i32,
    pub phase: Phase,
    pub complete: bool,
    #[serde(rename = "loop")]
    pub loop_playback: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GainOutcome {
    pub gain_db: i32,
    /// The step was refused because the gain is at the clamp.
    pub clamped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Progress {
    pub participant: String,
    pub completed: usize,
    pub total: usize,
    pub complete: bool,
}

/// State that must survive a restart; compared by the replay tests.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSnapshot {
    pub participant: String,
    pub cursor: usize,
    pub gain_db: i32,
    pub phase: Phase,
    pub committed: Vec<TrialRecord>,
}

struct LoadedTrial {
    prepared: PreparedTrial,
    sound_b: Arc<Vec<u8>>,
    sound_a: (i32, Arc<Vec<u8>>),
    clip_b: usize,
    max_clip_a: usize,
}

pub struct Run {
    participant: String,
    trials: Vec<ScheduledTrial>,
    stimuli: Arc<StimulusSet>,
    config: RunConfig,
    log: TrialLog,
    committed: Vec<TrialRecord>,
    gain_db: i32,
    phase: Phase,
    playback: [u32; 2],
    started_at_ms: u64,
    loaded: Option<LoadedTrial>,
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

impl Run {
    /// Start or resume `participant`'s run. Records already in the log for
    /// this participant are checked against the schedule and skipped.
    pub fn start(
        schedule: &BTreeMap<String, Vec<ScheduledTrial>>,
        participant: &str,
        stimuli: Arc<StimulusSet>,
        log_path: impl Into<PathBuf>,
        config: RunConfig,
    ) -> Result<Self> {
        let trials = schedule
            .get(participant)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownParticipant(participant.to_string()))?;
        let log = TrialLog::open(log_path)?;
        let committed: Vec<TrialRecord> = log
            .read_all()?
            .into_iter()
            .filter(|r| r.participant == participant)
            .collect();
        if committed.len() > trials.len() {
            return Err(ServiceError::LogMismatch(format!(
                "{} records for {} scheduled trials",
                committed.len(),
                trials.len()
            )));
        }
        for (r, t) in committed.iter().zip(&trials) {
            if r.trial != t.trial || r.condition != t.condition || r.session != t.session {
                return Err(ServiceError::LogMismatch(format!(
                    "record for trial {} does not match scheduled trial {}",
                    r.trial, t.trial
                )));
            }
        }
        let mut run = Self {
            participant: participant.to_string(),
            trials,
            stimuli,
            config,
            log,
            committed,
            gain_db: 0,
            phase: Phase::Idle,
            playback: [0, 0],
            started_at_ms: now_ms(),
            loaded: None,
        };
        run.load_current()?;
        Ok(run)
    }

    fn cursor(&self) -> usize {
        self.committed.len()
    }

    pub fn participant(&self) -> &str {
        &self.participant
    }

    pub fn is_complete(&self) -> bool {
        self.cursor() >= self.trials.len()
    }

    pub fn current(&self) -> Option<&ScheduledTrial> {
        self.trials.get(self.cursor())
    }

    pub fn committed(&self) -> &[TrialRecord] {
        &self.committed
    }

    pub fn gain_db(&self) -> i32 {
        self.gain_db
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    fn load_current(&mut self) -> Result<()> {
        self.loaded = None;
        let Some(trial) = self.current().copied() else {
            return Ok(());
        };
        let c = trial.condition;
        let prepared = PreparedTrial::new(
            self.stimuli.signal(c.signal)?,
            self.stimuli.noise(c.noise)?,
            c,
            &self.stimuli.gains,
            self.config.taps,
        )?;
        let (b, clip_b) = prepared.sound_b()?;
        let (a, clip_a) = prepared.sound_a(0.0)?;
        self.loaded = Some(LoadedTrial {
            sound_b: Arc::new(stereo_i16_bytes(&b)?),
            sound_a: (0, Arc::new(stereo_i16_bytes(&a)?)),
            clip_b,
            max_clip_a: clip_a,
            prepared,
        });
        Ok(())
    }

    pub fn view(&self) -> TrialView {
        let current = self.current();
        TrialView {
            number: current.map(|t| t.trial).unwrap_or(self.trials.len() as u32),
            total: self.trials.len() as u32,
            session: current.map(|t| t.session).unwrap_or(0),
            gain_db: self.gain_db,
            phase: self.phase,
            complete: self.is_complete(),
            loop_playback: self.config.loop_playback,
        }
    }

    pub fn progress(&self) -> Progress {
        Progress {
            participant: self.participant.clone(),
            completed: self.cursor(),
            total: self.trials.len(),
            complete: self.is_complete(),
        }
    }

    /// WAV bytes for Sound A at the current gain or Sound B. Every call starts
    /// playback from the beginning.
    pub fn request_audio(&mut self, which: Which) -> Result<Arc<Vec<u8>>> {
        let gain = self.gain_db;
        let loaded = self.loaded.as_mut().ok_or(ServiceError::RunComplete)?;
        let bytes = match which {
            Which::B => loaded.sound_b.clone(),
            Which::A => {
                if loaded.sound_a.0 != gain {
                    let (a, clip) = loaded.prepared.sound_a(gain as f64)?;
                    loaded.max_clip_a = loaded.max_clip_a.max(clip);
                    loaded.sound_a = (gain, Arc::new(stereo_i16_bytes(&a)?));
                }
                loaded.sound_a.1.clone()
            }
        };
        match which {
            Which::A => {
                self.playback[0] += 1;
                self.phase = Phase::PlayingA;
            }
            Which::B => {
                self.playback[1] += 1;
                self.phase = Phase::PlayingB;
            }
        }
        Ok(bytes)
    }

    /// Step Sound A's speech by ±1 dB. At the clamp the step is refused and
    /// flagged rather than treated as an error.
    pub fn adjust_gain(&mut self, delta: i32) -> Result<GainOutcome> {
        if delta != 1 && delta != -1 {
            return Err(ServiceError::InvalidDelta(delta));
        }
        if self.is_complete() {
            return Err(ServiceError::RunComplete);
        }
        let next = self.gain_db + delta;
        if next.abs() > self.config.clamp_db {
            return Ok(GainOutcome {
                gain_db: self.gain_db,
                clamped: true,
            });
        }
        self.gain_db = next;
        Ok(GainOutcome {
            gain_db: next,
            clamped: false,
        })
    }

    pub fn stop(&mut self) {
        if self.phase != Phase::Idle {
            self.phase = Phase::Stopped;
        }
    }

    /// Persist the current trial and advance. If the log write fails the run
    /// stays on the same trial.
    pub fn commit(&mut self) -> Result<TrialRecord> {
        let trial = *self.current().ok_or(ServiceError::RunComplete)?;
        let loaded = self.loaded.as_ref().ok_or(ServiceError::RunComplete)?;
        let record = TrialRecord {
            schema: LOG_SCHEMA,
            participant: self.participant.clone(),
            session: trial.session,
            trial: trial.trial,
            scored: trial.scored(),
            condition: trial.condition,
            initial_gain_db: loaded.prepared.initial_gain_db(),
            final_variable_gain_db: self.gain_db,
            bhld_db: self.gain_db,
            playback_a: self.playback[0],
            playback_b: self.playback[1],
            clip_count: loaded.clip_b + loaded.max_clip_a,
            started_at_ms: self.started_at_ms,
            committed_at_ms: now_ms(),
        };
        self.log.append(&record)?;
        self.committed.push(record.clone());
        self.gain_db = 0;
        self.phase = Phase::Idle;
        self.playback = [0, 0];
        self.started_at_ms = now_ms();
        self.load_current()?;
        Ok(record)
    }

    pub fn snapshot(&self) -> RunSnapshot {
        RunSnapshot {
            participant: self.participant.clone(),
            cursor: self.cursor(),
            gain_db: self.gain_db,
            phase: self.phase,
            committed: self.committed.clone(),
        }
    }
}
