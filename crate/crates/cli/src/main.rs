use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

mod commands;

#[derive(Parser)]
#[command(name = "booster", version, about = "Band-limited interaural phase inversion toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Magnitude response of the crossover lowpass or a recombined band pair.
    FilterReport(FilterReportArgs),
    /// Level-align speech and noise and write a stimulus directory.
    Prepare(PrepareArgs),
    /// Render one condition's Sound A / Sound B pair as 16-bit stereo WAVs.
    Render(RenderArgs),
    /// Build the session schedule for a group of participants.
    Plan(PlanArgs),
    /// Run the listening service.
    Serve(ServeArgs),
    /// Screen listeners and summarise BHLD per method.
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
pub struct FilterReportArgs {
    /// Crossover frequency in Hz.
    #[arg(long, default_value_t = 500.0)]
    pub fc: f64,
    #[arg(long, default_value_t = booster_core::dsp::DEFAULT_TAPS)]
    pub taps: usize,
    /// Band coefficients "low,high", e.g. "1,-1". Omit for the lowpass alone.
    #[arg(long, allow_hyphen_values = true)]
    pub combine: Option<String>,
    #[arg(long, default_value_t = booster_core::dsp::DEFAULT_GRID_POINTS)]
    pub points: usize,
    /// CSV output path; stdout when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct PrepareArgs {
    /// Speech recordings as ID=PATH, e.g. A=speech_a.wav. All of A, B, C are required.
    #[arg(long = "signal", value_name = "ID=PATH")]
    pub signals: Vec<String>,
    /// Noise B recording.
    #[arg(long)]
    pub noise_b: Option<PathBuf>,
    /// Noise C source recordings, mixed at equal energy.
    #[arg(long = "noise-c", value_name = "PATH")]
    pub noise_c: Vec<PathBuf>,
    /// Seed of the uniform noise used as Noise A.
    #[arg(long, default_value_t = booster_core::stimulus::fixtures::UNIFORM_NOISE_SEED)]
    pub noise_a_seed: u64,
    /// Use the built-in synthetic speech and noise instead of recordings.
    #[arg(long, conflicts_with_all = ["signals", "noise_b", "noise_c"])]
    pub synthetic: bool,
    /// Gain table (`S.N = dB` lines); defaults apply when absent.
    #[arg(long)]
    pub gains: Option<PathBuf>,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub stimuli: PathBuf,
    #[arg(long)]
    pub signal: String,
    #[arg(long)]
    pub noise: String,
    /// Method name such as Original, Low500, High1000, All250.
    #[arg(long)]
    pub method: String,
    /// Variable gain of Sound A in dB.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub gain: f64,
    #[arg(long, default_value_t = booster_core::dsp::DEFAULT_TAPS)]
    pub taps: usize,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct PlanArgs {
    /// Number of participants, named P1..Pn.
    #[arg(long, default_value_t = 16)]
    pub participants: usize,
    #[arg(long, default_value_t = 1)]
    pub block_seed: u64,
    /// Per-participant shuffle seeds are this plus the participant index.
    #[arg(long, default_value_t = 1000)]
    pub plan_seed: u64,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub schedule: PathBuf,
    /// Trial log; relative paths resolve against the storage directory.
    #[arg(long, default_value = "trials.jsonl")]
    pub log: PathBuf,
    /// Prepared stimulus directory; synthetic stimuli when absent.
    #[arg(long)]
    pub stimuli: Option<PathBuf>,
    #[arg(long, env = "BOOSTER_STORAGE_DIR", default_value = ".")]
    pub storage_dir: PathBuf,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    #[arg(long, default_value_t = 8750)]
    pub port: u16,
    /// Largest variable gain magnitude in dB.
    #[arg(long, default_value_t = booster_service::DEFAULT_CLAMP_DB)]
    pub clamp: i32,
    #[arg(long, default_value_t = booster_core::dsp::DEFAULT_TAPS)]
    pub taps: usize,
    /// Ask the client to loop playback.
    #[arg(long = "loop")]
    pub loop_playback: bool,
}

#[derive(Args)]
pub struct AnalyzeArgs {
    /// Trial logs to pool.
    #[arg(required = true)]
    pub logs: Vec<PathBuf>,
    /// Exclude listeners with any Dummy adjustment of at least this many dB.
    #[arg(long, default_value_t = booster_core::stats::DEFAULT_THRESHOLD_DB)]
    pub threshold: i32,
    /// overall, by-signal or by-noise.
    #[arg(long, default_value = "overall")]
    pub grouping: String,
    /// CSV output path; stdout when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Exit 0 even when listeners were excluded.
    #[arg(long)]
    pub allow_exclusions: bool,
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    let result: Result<ExitCode> = match cli.command {
        Command::FilterReport(a) => commands::filter_report(&a).map(|_| ExitCode::SUCCESS),
        Command::Prepare(a) => commands::prepare(&a).map(|_| ExitCode::SUCCESS),
        Command::Render(a) => commands::render(&a).map(|_| ExitCode::SUCCESS),
        Command::Plan(a) => commands::plan(&a).map(|_| ExitCode::SUCCESS),
        Command::Serve(a) => commands::serve(&a).map(|_| ExitCode::SUCCESS),
        Command::Analyze(a) => commands::analyze(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        super::Cli::command().debug_assert();
    }
}
