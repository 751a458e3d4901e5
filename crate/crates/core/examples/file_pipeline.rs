//! Writes a scenario to text files, reads them back, tracks, and scores the
//! result, the same steps the command-line tool takes.

use trajmap::evaluator::{evaluate, DEFAULT_MATCH_THRESHOLD};
use trajmap::io;
use trajmap::pipeline::{track, Sequence};
use trajmap::simulator::{generate, ScenarioConfig, ShakeConfig};
use trajmap::stabilizer::StabilizationConfig;
use trajmap::tracker::TrackerConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("trajmap-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let cfg = ScenarioConfig {
        shake: Some(ShakeConfig::default()),
        ..ScenarioConfig::noisy(5)
    };
    let s = generate(&cfg)?;
    io::write_text(
        &dir.join("detections.txt"),
        &io::format_detections(&s.frames),
    )?;
    io::write_text(&dir.join("ripple.txt"), &io::format_ripple(&s.ripple))?;
    io::write_text(
        &dir.join("ground_truth.txt"),
        &io::format_ground_truth(&s.ground_truth),
    )?;
    if let Some(t) = &s.transforms {
        io::write_text(&dir.join("transforms.txt"), &io::format_transforms(t))?;
    }

    let mut boxes = io::read_detections(&dir.join("detections.txt"))?;
    boxes.ripple = io::read_ripple(&dir.join("ripple.txt"))?;
    let transforms = io::read_transforms(&dir.join("transforms.txt"))?;
    let gts = io::read_ground_truth(&dir.join("ground_truth.txt"))?;

    let tc = TrackerConfig::default();
    let tracks = track(
        &Sequence::from_boxes(boxes, Some(transforms)),
        &StabilizationConfig::default(),
        &tc,
    )?;
    io::write_text(
        &dir.join("trajectories.txt"),
        &io::format_trajectories(&tracks, tc.commit_count)?,
    )?;
    let (read_back, nf) = io::read_trajectories(&dir.join("trajectories.txt"))?;

    let e = evaluate(&read_back, &gts, nf, DEFAULT_MATCH_THRESHOLD)?;
    println!("files in {}", dir.display());
    println!(
        "{} tracks, {} matched, mean error {:.2} px, detected {:.3}, precision {:.3}",
        read_back.len(),
        e.matches.len(),
        e.row.stats.mean,
        e.row.detected_fraction,
        e.row.precision_trajectory
    );
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
