use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use booster_core::dsp::{design_lowpass_fir, frequency_response};
use booster_core::plan::{read_schedule, rotation, Schedule};
use booster_core::record::read_log_file;
use booster_core::stats::{aggregate_bhld, export_figure_data, retain_screened, screen_participants, Grouping};
use booster_core::stimulus::{fixtures, prepare as prepare_set, wav, GainTable, NoiseSource, PrepareConfig, PreparedTrial, StimulusSet};
use booster_core::{BandCoefficients, BoosterMethod, Condition, NoiseId, SignalId, SAMPLE_RATE_HZ};
use booster_service::{RunConfig, Service};

use crate::{AnalyzeArgs, FilterReportArgs, PlanArgs, PrepareArgs, RenderArgs, ServeArgs};

/// Exit status of `analyze` when screening removed someone.
pub const EXIT_EXCLUSIONS: u8 = 3;

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

pub fn filter_report(args: &FilterReportArgs) -> Result<()> {
    let lpf = design_lowpass_fir(args.fc, SAMPLE_RATE_HZ, args.taps)?;
    let coeffs = args
        .combine
        .as_deref()
        .map(str::parse::<BandCoefficients>)
        .transpose()?;
    let curve = frequency_response(&lpf, coeffs, args.points)?;
    if let Some((f, db)) = curve.minimum() {
        tracing::info!("minimum {db:.1} dB at {f:.1} Hz");
    }
    curve.write_csv(output(args.out.as_deref())?)?;
    Ok(())
}

fn parse_signal_arg(s: &str) -> Result<(SignalId, &Path)> {
    let (id, path) = s
        .split_once('=')
        .ok_or_else(|| anyhow!("expected ID=PATH, got `{s}`"))?;
    Ok((id.parse()?, Path::new(path)))
}

pub fn prepare(args: &PrepareArgs) -> Result<()> {
    let (signals, noises) = if args.synthetic {
        fixtures::synthetic_inputs()
    } else {
        let mut signals = Vec::new();
        for s in &args.signals {
            let (id, path) = parse_signal_arg(s)?;
            let b = wav::read_mono_file(path).with_context(|| format!("reading {}", path.display()))?;
            signals.push((id, b));
        }
        for id in SignalId::ALL {
            if !signals.iter().any(|(s, _)| *s == id) {
                bail!("missing --signal {id}=PATH");
            }
        }
        let noise_b = args.noise_b.as_deref().ok_or_else(|| anyhow!("missing --noise-b"))?;
        if args.noise_c.is_empty() {
            bail!("missing --noise-c");
        }
        let parts = args
            .noise_c
            .iter()
            .map(|p| wav::read_mono_file(p).with_context(|| format!("reading {}", p.display())))
            .collect::<Result<Vec<_>>>()?;
        let noises = vec![
            (NoiseId::A, NoiseSource::Uniform { seed: args.noise_a_seed }),
            (NoiseId::B, NoiseSource::Recording(wav::read_mono_file(noise_b)?)),
            (NoiseId::C, NoiseSource::Mix(parts)),
        ];
        (signals, noises)
    };
    let gains = match &args.gains {
        Some(p) => GainTable::load(p)?,
        None => GainTable::default(),
    };
    let set = prepare_set(signals, noises, gains, &PrepareConfig::default())?;
    for row in &set.manifest {
        tracing::info!(
            "{}: rms {:.1} -> {:.1} dB, peak {:.1} -> {:.1} dB{}",
            row.id,
            row.rms_db_before,
            row.rms_db_after,
            row.peak_db_before,
            row.peak_db_after,
            if row.ceiling_hit { " (ceiling)" } else { "" }
        );
    }
    set.save(&args.out)?;
    Ok(())
}

pub fn render(args: &RenderArgs) -> Result<()> {
    let set = StimulusSet::load(&args.stimuli)?;
    let condition = Condition::new(args.signal.parse()?, args.noise.parse()?, args.method.parse::<BoosterMethod>()?);
    let trial = PreparedTrial::new(
        set.signal(condition.signal)?,
        set.noise(condition.noise)?,
        condition,
        &set.gains,
        args.taps,
    )?;
    let (a, clip_a) = trial.sound_a(args.gain)?;
    let (b, clip_b) = trial.sound_b()?;
    std::fs::create_dir_all(&args.out)?;
    wav::write_stereo_i16_file(&args.out.join("sound_a.wav"), &a)?;
    wav::write_stereo_i16_file(&args.out.join("sound_b.wav"), &b)?;
    if clip_a + clip_b > 0 {
        tracing::warn!("clipped samples: A {clip_a}, B {clip_b}");
    }
    Ok(())
}

pub fn plan(args: &PlanArgs) -> Result<()> {
    let ids: Vec<String> = (1..=args.participants).map(|i| format!("P{i}")).collect();
    let schedule = Schedule::build(&ids, &rotation(args.participants), args.block_seed, args.plan_seed)?;
    let mut out = BufWriter::new(File::create(&args.out)?);
    schedule.write(&mut out)?;
    out.flush()?;
    let counts = schedule.condition_counts();
    if let (Some(lo), Some(hi)) = (counts.values().min(), counts.values().max()) {
        tracing::info!(
            "{} participants, {} scored trials, {} conditions covered {lo}..{hi} times",
            ids.len(),
            counts.values().sum::<usize>(),
            counts.len()
        );
    }
    Ok(())
}

pub fn serve(args: &ServeArgs) -> Result<()> {
    let schedule = read_schedule(BufReader::new(
        File::open(&args.schedule).with_context(|| format!("opening {}", args.schedule.display()))?,
    ))?;
    let stimuli = match &args.stimuli {
        Some(dir) => StimulusSet::load(dir)?,
        None => {
            tracing::warn!("no --stimuli given, serving synthetic material");
            fixtures::synthetic_set()?
        }
    };
    let log = args.storage_dir.join(&args.log);
    let config = RunConfig {
        clamp_db: args.clamp,
        taps: args.taps,
        loop_playback: args.loop_playback,
    };
    let service = Arc::new(Service::new(schedule, Arc::new(stimuli), &log, config));
    let server = booster_service::spawn(service, &format!("{}:{}", args.host, args.port))?;
    tracing::info!("listening on http://{}, logging to {}", server.addr(), log.display());
    server.join();
    Ok(())
}

pub fn analyze(args: &AnalyzeArgs) -> Result<ExitCode> {
    let grouping: Grouping = args.grouping.parse()?;
    let mut records = Vec::new();
    for p in &args.logs {
        records.extend(read_log_file(p).with_context(|| format!("reading {}", p.display()))?);
    }
    let screening = screen_participants(&records, args.threshold)?;
    for id in &screening.excluded {
        tracing::warn!("excluded {id}: dummy adjustments {:?}", screening.dummy_adjustments[id]);
    }
    let kept = retain_screened(&records, &screening);
    let agg = aggregate_bhld(&kept, grouping)?;
    for g in &agg.empty_groups {
        tracing::warn!("no trials for {g}");
    }
    export_figure_data(&agg.rows, output(args.out.as_deref())?)?;
    if !screening.excluded.is_empty() && !args.allow_exclusions {
        return Ok(ExitCode::from(EXIT_EXCLUSIONS));
    }
    Ok(ExitCode::SUCCESS)
}
