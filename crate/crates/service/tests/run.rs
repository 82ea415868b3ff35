mod common;

use booster_core::record::read_log_file;
use booster_core::stimulus::wav::stereo_i16_bytes;
use booster_core::stimulus::PreparedTrial;
use booster_service::{Phase, Run, RunConfig, ServiceError, Which};
use common::{schedule, short_set, TEST_TAPS};

fn config() -> RunConfig {
    RunConfig {
        taps: TEST_TAPS,
        ..RunConfig::default()
    }
}

fn start(dir: &tempfile::TempDir, who: &str) -> Run {
    Run::start(&schedule(4), who, short_set(), dir.path().join("log.jsonl"), config()).unwrap()
}

#[test]
fn start_places_cursor_on_first_practice_trial() {
    let dir = tempfile::tempdir().unwrap();
    let run = start(&dir, "P1");
    let v = run.view();
    assert_eq!((v.number, v.total, v.session, v.gain_db), (1, 36, 0, 0));
    assert_eq!(v.phase, Phase::Idle);
    assert!(!v.complete);
}

#[test]
fn unknown_participant_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let err = Run::start(&schedule(2), "P99", short_set(), dir.path().join("l"), config()).err();
    assert!(matches!(err, Some(ServiceError::UnknownParticipant(_))));
}

#[test]
fn gain_steps_and_clamp() {
    let dir = tempfile::tempdir().unwrap();
    let mut run = start(&dir, "P1");
    for _ in 0..3 {
        run.adjust_gain(1).unwrap();
    }
    assert_eq!(run.adjust_gain(-1).unwrap().gain_db, 2);
    assert!(matches!(run.adjust_gain(2), Err(ServiceError::InvalidDelta(2))));

    let mut flagged = 0;
    for _ in 0..31 {
        if run.adjust_gain(1).unwrap().clamped {
            flagged += 1;
        }
    }
    assert_eq!(run.gain_db(), 30);
    assert_eq!(flagged, 3);
}

#[test]
fn sound_a_follows_gain_and_sound_b_is_fixed() {
    let dir = tempfile::tempdir().unwrap();
    let mut run = start(&dir, "P1");
    let trial = *run.current().unwrap();
    let set = short_set();
    let prepared = PreparedTrial::new(
        set.signal(trial.condition.signal).unwrap(),
        set.noise(trial.condition.noise).unwrap(),
        trial.condition,
        &set.gains,
        TEST_TAPS,
    )
    .unwrap();

    let b0 = run.request_audio(Which::B).unwrap();
    for _ in 0..4 {
        run.adjust_gain(1).unwrap();
    }
    let a4 = run.request_audio(Which::A).unwrap();
    let b4 = run.request_audio(Which::B).unwrap();
    assert_eq!(b0, b4);
    assert_eq!(*a4, stereo_i16_bytes(&prepared.sound_a(4.0).unwrap().0).unwrap());
    assert_eq!(*b4, stereo_i16_bytes(&prepared.sound_b().unwrap().0).unwrap());
}

#[test]
fn dummy_trials_serve_identical_a_and_b() {
    let dir = tempfile::tempdir().unwrap();
    let mut run = start(&dir, "P1");
    let mut seen = 0;
    while let Some(t) = run.current().copied() {
        if t.condition.is_dummy() {
            assert_eq!(run.request_audio(Which::A).unwrap(), run.request_audio(Which::B).unwrap());
            seen += 1;
        }
        run.commit().unwrap();
    }
    assert!(seen >= 3);
}

#[test]
fn stop_and_restart_playback() {
    let dir = tempfile::tempdir().unwrap();
    let mut run = start(&dir, "P1");
    run.stop();
    assert_eq!(run.phase(), Phase::Idle);
    let first = run.request_audio(Which::A).unwrap();
    assert_eq!(run.phase(), Phase::PlayingA);
    run.stop();
    assert_eq!(run.phase(), Phase::Stopped);
    assert_eq!(run.request_audio(Which::A).unwrap(), first);
    run.request_audio(Which::B).unwrap();
    assert_eq!(run.phase(), Phase::PlayingB);
}

#[test]
fn commit_records_bhld_and_advances() {
    let dir = tempfile::tempdir().unwrap();
    let mut run = start(&dir, "P2");
    for _ in 0..6 {
        run.adjust_gain(1).unwrap();
    }
    run.request_audio(Which::A).unwrap();
    run.request_audio(Which::B).unwrap();
    run.request_audio(Which::A).unwrap();
    let rec = run.commit().unwrap();
    assert_eq!(rec.bhld_db, 6);
    assert_eq!(rec.final_variable_gain_db, 6);
    assert!(!rec.scored);
    assert_eq!((rec.playback_a, rec.playback_b), (2, 1));
    assert_eq!(
        rec.initial_gain_db,
        short_set().gains.get(rec.condition.signal, rec.condition.noise).unwrap()
    );
    let v = run.view();
    assert_eq!((v.number, v.gain_db), (2, 0));
    assert_eq!(v.phase, Phase::Idle);
}

#[test]
fn full_run_completes_with_36_records() {
    let dir = tempfile::tempdir().unwrap();
    let mut run = start(&dir, "P3");
    while !run.is_complete() {
        run.commit().unwrap();
    }
    let log = read_log_file(&dir.path().join("log.jsonl")).unwrap();
    assert_eq!(log.len(), 36);
    assert_eq!(log.iter().filter(|r| r.scored).count(), 27);
    assert!(run.view().complete);
    assert!(matches!(run.commit(), Err(ServiceError::RunComplete)));
    assert!(matches!(run.request_audio(Which::A), Err(ServiceError::RunComplete)));
    assert!(matches!(run.adjust_gain(1), Err(ServiceError::RunComplete)));
}

#[test]
fn restart_resumes_after_last_commit() {
    let dir = tempfile::tempdir().unwrap();
    let mut run = start(&dir, "P1");
    for i in 0..10 {
        for _ in 0..(i % 4) {
            run.adjust_gain(-1).unwrap();
        }
        run.commit().unwrap();
    }
    let before = run.snapshot();
    drop(run);
    // another participant sharing the log must not disturb the replay
    let mut other = start(&dir, "P2");
    other.commit().unwrap();

    let resumed = start(&dir, "P1");
    assert_eq!(resumed.snapshot(), before);
    assert_eq!(resumed.view().number, 11);
}

#[test]
fn replay_rejects_log_from_another_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let mut run = start(&dir, "P1");
    run.commit().unwrap();
    run.commit().unwrap();
    drop(run);
    let other = booster_core::plan::Schedule::build(&common::participants(1), &[[4, 5, 6]], 99, 1)
        .unwrap()
        .trials_by_participant();
    let err = Run::start(&other, "P1", short_set(), dir.path().join("log.jsonl"), config()).err();
    assert!(matches!(err, Some(ServiceError::LogMismatch(_))));
}

#[test]
fn identical_inputs_give_identical_logs() {
    let logs: Vec<_> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            let mut run = start(&dir, "P4");
            for i in 0..36 {
                for _ in 0..(i % 5) {
                    run.adjust_gain(if i % 2 == 0 { 1 } else { -1 }).unwrap();
                }
                run.request_audio(Which::A).unwrap();
                run.commit().unwrap();
            }
            read_log_file(&dir.path().join("log.jsonl"))
                .unwrap()
                .iter()
                .map(|r| r.without_timestamps())
                .collect::<Vec<_>>()
        })
        .collect();
    assert_eq!(logs[0], logs[1]);
}
