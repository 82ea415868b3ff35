use std::path::Path;
use std::process::{Command, Output};

use booster_core::plan::{rotation, Schedule};
use booster_core::record::{TrialLog, TrialRecord, LOG_SCHEMA};

fn booster(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_booster"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn filter_report_writes_full_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = booster(&["filter-report", "--fc", "1000", "--combine", "-1,1", "-o", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("freq_hz,magnitude_db"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (f, m) = l.split_once(',').unwrap();
            (f.parse().unwrap(), m.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 4096);
    let (f, m) = rows.iter().copied().fold((0.0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    assert!(m < -40.0 && (f - 1000.0).abs() < 200.0, "dip {m} dB at {f} Hz");
}

#[test]
fn filter_report_rejects_bad_coefficients() {
    let o = booster(&["filter-report", "--combine", "2,1"]);
    assert!(!o.status.success());
    let o = booster(&["filter-report", "--fc", "30000"]);
    assert!(!o.status.success());
}

#[test]
fn plan_is_deterministic_and_complete() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    for p in [&a, &b] {
        let o = booster(&["plan", "--participants", "16", "--block-seed", "9", "-o", s(p)]);
        assert!(o.status.success());
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().count(), 16 * 36);
    let sched = booster_core::plan::read_schedule(text.as_bytes()).unwrap();
    assert_eq!(sched.len(), 16);
    assert!(sched.values().all(|t| t.len() == 36));
}

#[test]
fn prepare_synthetic_then_render() {
    let dir = tempfile::tempdir().unwrap();
    let stim = dir.path().join("stim");
    let o = booster(&["prepare", "--synthetic", "-o", s(&stim)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = std::fs::read_to_string(stim.join("levels.csv")).unwrap();
    assert_eq!(manifest.lines().count(), 7);
    assert!(std::fs::read_to_string(stim.join("gains.toml")).unwrap().contains("B.B = -30.5"));

    let out = dir.path().join("pair");
    let o = booster(&[
        "render", "--stimuli", s(&stim), "--signal", "C", "--noise", "A", "--method", "Original", "-o", s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let a = std::fs::read(out.join("sound_a.wav")).unwrap();
    let b = std::fs::read(out.join("sound_b.wav")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn prepare_requires_all_recordings() {
    let dir = tempfile::tempdir().unwrap();
    let o = booster(&["prepare", "--noise-b", "x.wav", "-o", s(dir.path())]);
    assert!(!o.status.success());
}

fn write_log(path: &Path, dummy_gain: &[(&str, i32)]) {
    let ids: Vec<String> = dummy_gain.iter().map(|(p, _)| p.to_string()).collect();
    let sched = Schedule::build(&ids, &rotation(ids.len()), 3, 4).unwrap();
    let mut log = TrialLog::open(path).unwrap();
    for (plan, (_, worst)) in sched.plans.iter().zip(dummy_gain) {
        let mut first_dummy = true;
        for t in plan.trials() {
            let bhld = if t.condition.is_dummy() && t.scored() && first_dummy {
                first_dummy = false;
                *worst
            } else if t.condition.is_dummy() {
                0
            } else {
                2
            };
            log.append(&TrialRecord {
                schema: LOG_SCHEMA,
                participant: plan.participant_id.clone(),
                session: t.session,
                trial: t.trial,
                scored: t.scored(),
                condition: t.condition,
                initial_gain_db: -20.0,
                final_variable_gain_db: bhld,
                bhld_db: bhld,
                playback_a: 1,
                playback_b: 1,
                clip_count: 0,
                started_at_ms: 0,
                committed_at_ms: 0,
            })
            .unwrap();
        }
    }
}

#[test]
fn analyze_flags_exclusions_through_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("log.jsonl");
    write_log(&log, &[("P1", 4), ("P2", -5), ("P3", 0)]);
    let out = dir.path().join("fig.csv");

    let o = booster(&["analyze", s(&log), "-o", s(&out)]);
    assert_eq!(o.status.code(), Some(3));
    let o = booster(&["analyze", s(&log), "--allow-exclusions", "--grouping", "by-noise", "-o", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("grouping,group,method,"));
    assert!(csv.lines().skip(1).all(|l| l.starts_with("by-noise,")));

    let o = booster(&["analyze", s(&log), "--threshold", "6", "-o", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let o = booster(&["analyze", s(&log), "--grouping", "sideways"]);
    assert_eq!(o.status.code(), Some(1));
}
