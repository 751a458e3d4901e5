//! Command-line front end: `simulate`, `track`, `eval`, `sweep`.
//!
//! Every command reads all of its inputs before writing anything, so a
//! failed run leaves no partial output behind. Exit codes: 0 success,
//! 1 invalid input or configuration, 2 I/O failure, 3 internal error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::decode::DEFAULT_MIN_CONFIDENCE;
use crate::error::{Error, Result};
use crate::evaluator::{evaluate, format_table, render_svg, EvalReport, DEFAULT_MATCH_THRESHOLD};
use crate::io;
use crate::pipeline::{self, decode_records, Sequence};
use crate::simulator::{generate, ScenarioConfig, ShakeConfig};
use crate::stabilizer::{SmoothingMethod, StabilizationConfig, WindowNorm};
use crate::tracker::TrackerConfig;

pub const DETECTIONS_FILE: &str = "detections.txt";
pub const RIPPLE_FILE: &str = "ripple.txt";
pub const GROUND_TRUTH_FILE: &str = "ground_truth.txt";
pub const TRANSFORMS_FILE: &str = "transforms.txt";

#[derive(Debug, Parser)]
#[command(
    name = "trajmap",
    version,
    about = "Pellet trajectory mapping: simulate, track, evaluate"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic scenario and write its files into a directory.
    Simulate(SimulateArgs),
    /// Track pellets in a detection file and write the trajectories.
    Track(TrackArgs),
    /// Score a trajectory file against ground truth.
    Eval(EvalArgs),
    /// Simulate a scenario and run the commit-count sweep on it.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ScenarioArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 419)]
    pub n_frames: usize,
    #[arg(long, default_value_t = 30)]
    pub n_pellets: usize,
    #[arg(long, default_value_t = 0.0)]
    pub noise_sigma: f64,
    #[arg(long, default_value_t = 0.0)]
    pub dropout_prob: f64,
    #[arg(long, default_value_t = 0.0)]
    pub clutter_rate: f64,
    #[arg(long, default_value_t = 1.2)]
    pub gravity: f64,
    #[arg(long, default_value_t = 23.8)]
    pub mean_flight_frames: f64,
    /// Shake amplitude in px; 0 disables shake.
    #[arg(long, default_value_t = 0.0)]
    pub shake_amplitude: f64,
    #[arg(long, default_value_t = 30.5)]
    pub shake_period: f64,
}

impl ScenarioArgs {
    pub fn to_config(&self, frame: &FrameArgs) -> ScenarioConfig {
        ScenarioConfig {
            seed: self.seed,
            n_frames: self.n_frames,
            n_pellets: self.n_pellets,
            noise_sigma: self.noise_sigma,
            dropout_prob: self.dropout_prob,
            clutter_rate: self.clutter_rate,
            gravity: self.gravity,
            mean_flight_frames: self.mean_flight_frames,
            frame_w: frame.frame_w,
            frame_h: frame.frame_h,
            shake: (self.shake_amplitude > 0.0).then_some(ShakeConfig {
                amplitude: self.shake_amplitude,
                period_frames: self.shake_period,
            }),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct FrameArgs {
    #[arg(long, default_value_t = 1920.0)]
    pub frame_w: f64,
    #[arg(long, default_value_t = 1080.0)]
    pub frame_h: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Smoothing {
    MovingAverage,
    Recurrence,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Norm {
    Samples,
    Radius,
}

#[derive(Debug, Clone, Args)]
pub struct TrackerArgs {
    #[arg(long, default_value_t = 6)]
    pub commit_count: usize,
    #[arg(long, default_value_t = 0.9)]
    pub cut_fraction: f64,
    #[arg(long, default_value_t = 30.0)]
    pub angle_tolerance: f64,
    #[arg(long, default_value_t = 3)]
    pub max_misses: usize,
    /// Largest per-frame move in px; `inf` disables the check.
    #[arg(long, default_value_t = 120.0)]
    pub max_step: f64,
    #[arg(long, default_value_t = 30)]
    pub smoothing_radius: usize,
    #[arg(long, value_enum, default_value_t = Smoothing::MovingAverage)]
    pub smoothing: Smoothing,
    #[arg(long, value_enum, default_value_t = Norm::Samples)]
    pub window_norm: Norm,
}

impl TrackerArgs {
    pub fn tracker(&self, frame: &FrameArgs) -> TrackerConfig {
        TrackerConfig {
            cut_fraction: self.cut_fraction,
            commit_count: self.commit_count,
            angle_tolerance_deg: self.angle_tolerance,
            max_misses: self.max_misses,
            max_step: self.max_step,
            frame_w: frame.frame_w,
            frame_h: frame.frame_h,
        }
    }

    pub fn stabilization(&self) -> StabilizationConfig {
        StabilizationConfig {
            smoothing_radius: self.smoothing_radius,
            method: match self.smoothing {
                Smoothing::MovingAverage => SmoothingMethod::MovingAverage,
                Smoothing::Recurrence => SmoothingMethod::Recurrence,
            },
            norm: match self.window_norm {
                Norm::Samples => WindowNorm::SampleCount,
                Norm::Radius => WindowNorm::Radius,
            },
        }
    }

    fn validated(&self, frame: &FrameArgs) -> Result<(TrackerConfig, StabilizationConfig)> {
        let t = self.tracker(frame);
        t.validate()?;
        let s = self.stabilization();
        s.validate()?;
        Ok((t, s))
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub frame: FrameArgs,
    /// Output directory, created if needed.
    #[arg(long)]
    pub out_dir: PathBuf,
}

/// Observation inputs shared by `track` and `eval --sweep`.
#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Box file with nutriment (and optionally ripple) rows.
    #[arg(long, conflicts_with = "raw")]
    pub detections: Option<PathBuf>,
    /// Raw grid-cell predictions, decoded before tracking.
    #[arg(long)]
    pub raw: Option<PathBuf>,
    /// Reference width and height for decoding raw size terms.
    #[arg(long, default_value_t = 1.0)]
    pub ref_w: f64,
    #[arg(long, default_value_t = 1.0)]
    pub ref_h: f64,
    #[arg(long, default_value_t = DEFAULT_MIN_CONFIDENCE)]
    pub min_confidence: f64,
    #[arg(long)]
    pub ripple: Option<PathBuf>,
    /// Per-frame camera motion; enables stabilization.
    #[arg(long)]
    pub transforms: Option<PathBuf>,
}

impl InputArgs {
    fn load(&self) -> Result<Sequence> {
        let mut boxes = match (&self.detections, &self.raw) {
            (Some(p), _) => io::read_detections(p)?,
            (None, Some(p)) => decode_records(
                &io::read_raw(p)?,
                self.ref_w,
                self.ref_h,
                self.min_confidence,
            )?,
            (None, None) => {
                return Err(Error::InvalidConfig(
                    "one of --detections or --raw is required".into(),
                ))
            }
        };
        if let Some(p) = &self.ripple {
            boxes.ripple = io::read_ripple(p)?;
        }
        let transforms = self
            .transforms
            .as_deref()
            .map(io::read_transforms)
            .transpose()?;
        Ok(Sequence::from_boxes(boxes, transforms))
    }
}

#[derive(Debug, Clone, Args)]
pub struct TrackArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub tracker: TrackerArgs,
    #[command(flatten)]
    pub frame: FrameArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// Trajectory file to score (ignored with --sweep).
    #[arg(long, required_unless_present = "sweep")]
    pub trajectories: Option<PathBuf>,
    #[arg(long)]
    pub ground_truth: PathBuf,
    /// Re-track the inputs once per commit count in 3..=9.
    #[arg(long)]
    pub sweep: bool,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub tracker: TrackerArgs,
    #[command(flatten)]
    pub frame: FrameArgs,
    #[arg(long, default_value_t = DEFAULT_MATCH_THRESHOLD)]
    pub match_threshold: f64,
    /// Machine-readable report.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub tracker: TrackerArgs,
    #[command(flatten)]
    pub frame: FrameArgs,
    #[arg(long, default_value_t = DEFAULT_MATCH_THRESHOLD)]
    pub match_threshold: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cmd: &Command) -> Result<()> {
    match cmd {
        Command::Simulate(a) => simulate(a),
        Command::Track(a) => track(a),
        Command::Eval(a) => eval(a),
        Command::Sweep(a) => sweep(a),
    }
}

fn simulate(a: &SimulateArgs) -> Result<()> {
    let s = generate(&a.scenario.to_config(&a.frame))?;
    let mut out = vec![
        (DETECTIONS_FILE, io::format_detections(&s.frames)),
        (RIPPLE_FILE, io::format_ripple(&s.ripple)),
        (GROUND_TRUTH_FILE, io::format_ground_truth(&s.ground_truth)),
    ];
    if let Some(t) = &s.transforms {
        out.push((TRANSFORMS_FILE, io::format_transforms(t)));
    }
    fs::create_dir_all(&a.out_dir).map_err(|e| Error::io(&a.out_dir, e))?;
    for (name, text) in out {
        io::write_text(&a.out_dir.join(name), &text)?;
    }
    eprintln!(
        "simulated {} frames, {} pellets, {} detections",
        s.frames.len(),
        s.ground_truth.len(),
        s.detection_count()
    );
    Ok(())
}

fn track(a: &TrackArgs) -> Result<()> {
    let (cfg, stab) = a.tracker.validated(&a.frame)?;
    let seq = a.input.load()?;
    let trajs = pipeline::track(&seq, &stab, &cfg)?;
    io::write_text(&a.out, &io::format_trajectories(&trajs, cfg.commit_count)?)?;
    eprintln!("{} trajectories", trajs.len());
    Ok(())
}

fn emit_report(report: &EvalReport, out: Option<&Path>, svg: Option<&Path>) -> Result<()> {
    let table = format_table(report);
    let machine = io::format_report(report);
    let picture = render_svg(report);
    if let Some(p) = out {
        io::write_text(p, &machine)?;
    }
    if let Some(p) = svg {
        io::write_text(p, &picture)?;
    }
    print!("{table}");
    Ok(())
}

fn eval(a: &EvalArgs) -> Result<()> {
    let gts = io::read_ground_truth(&a.ground_truth)?;
    let report = if a.sweep {
        let (cfg, stab) = a.tracker.validated(&a.frame)?;
        let seq = a.input.load()?;
        pipeline::sweep(&seq, &gts, &stab, &cfg, a.match_threshold)?
    } else {
        let path = a.trajectories.as_deref().ok_or_else(|| {
            Error::InvalidConfig("--trajectories is required without --sweep".into())
        })?;
        let (trajs, nf) = io::read_trajectories(path)?;
        let ev = evaluate(&trajs, &gts, nf, a.match_threshold)?;
        for id in &ev.no_overlap {
            eprintln!("trajectory {id}: no committed points overlap its ground truth, skipped");
        }
        EvalReport::from_rows(vec![ev.row])?
    };
    emit_report(&report, a.out.as_deref(), a.svg.as_deref())
}

fn sweep(a: &SweepArgs) -> Result<()> {
    let (cfg, stab) = a.tracker.validated(&a.frame)?;
    let s = generate(&a.scenario.to_config(&a.frame))?;
    let seq = Sequence::from_scenario(&s);
    let report = pipeline::sweep(&seq, &s.ground_truth, &stab, &cfg, a.match_threshold)?;
    emit_report(&report, a.out.as_deref(), a.svg.as_deref())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["trajmap", "bogus"]), 1);
        assert_eq!(run(["trajmap", "simulate"]), 1);
        assert_eq!(run(["trajmap", "--help"]), 0);
    }

    #[test]
    fn zero_frames_is_a_validation_error() {
        let dir = std::env::temp_dir().join("trajmap-cli-zero-frames");
        let code = run([
            "trajmap",
            "simulate",
            "--n-frames",
            "0",
            "--out-dir",
            dir.to_str().unwrap(),
        ]);
        assert_eq!(code, 1);
        assert!(!dir.join(DETECTIONS_FILE).exists());
    }
}
