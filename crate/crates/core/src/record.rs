//! Trial records and the append-only trial log (one JSON object per line).

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::condition::Condition;
use crate::error::{Error, Result};

pub const LOG_SCHEMA: u32 = 1;

/// One committed comparison. `bhld_db` is the final variable gain minus the
/// starting variable gain, which is always 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub schema: u32,
    pub participant: String,
    pub session: u32,
    pub trial: u32,
    pub scored: bool,
    pub condition: Condition,
    pub initial_gain_db: f64,
    pub final_variable_gain_db: i32,
    pub bhld_db: i32,
    pub playback_a: u32,
    pub playback_b: u32,
    pub clip_count: usize,
    pub started_at_ms: u64,
    pub committed_at_ms: u64,
}

impl TrialRecord {
    pub fn is_dummy(&self) -> bool {
        self.condition.is_dummy()
    }

    /// Copy with timestamps zeroed, for comparisons that ignore wall time.
    pub fn without_timestamps(&self) -> Self {
        Self {
            started_at_ms: 0,
            committed_at_ms: 0,
            ..self.clone()
        }
    }
}

/// Append-only log file. Each append is flushed and synced before returning.
#[derive(Debug)]
pub struct TrialLog {
    path: PathBuf,
    file: File,
}

impl TrialLog {
    pub fn open(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(Self { path, file })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&mut self, record: &TrialRecord) -> Result<()> {
        let mut line = serde_json::to_vec(record)?;
        line.push(b'\n');
        self.file.write_all(&line)?;
        self.file.flush()?;
        self.file.sync_data()?;
        Ok(())
    }

    pub fn read_all(&self) -> Result<Vec<TrialRecord>> {
        read_log_file(&self.path)
    }
}

/// Parses a log. A final line without a newline that fails to parse is a
/// torn write from a crash and is skipped; any other bad line is an error.
pub fn read_log<R: BufRead>(mut input: R) -> Result<Vec<TrialRecord>> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let complete = text.ends_with('\n');
    let lines: Vec<&str> = text.lines().collect();
    let mut out = Vec::with_capacity(lines.len());
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<TrialRecord>(line) {
            Ok(r) if r.schema == LOG_SCHEMA => out.push(r),
            Ok(r) => {
                return Err(Error::TrialLog(format!("line {}: unsupported schema {}", i + 1, r.schema)))
            }
            Err(_) if i + 1 == lines.len() && !complete => break,
            Err(e) => return Err(Error::TrialLog(format!("line {}: {e}", i + 1))),
        }
    }
    Ok(out)
}

pub fn read_log_file(path: &Path) -> Result<Vec<TrialRecord>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    read_log(BufReader::new(File::open(path)?))
}
