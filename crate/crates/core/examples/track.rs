//! Tracks a noisy scenario frame by frame and lists the resulting tracks.

use trajmap::evaluator::{detection_metrics, match_tracks, DEFAULT_MATCH_THRESHOLD};
use trajmap::simulator::{generate, ScenarioConfig};
use trajmap::tracker::{run_into, PointSource, Tracker, TrackerConfig};

fn main() -> trajmap::Result<()> {
    let s = generate(&ScenarioConfig::noisy(42))?;
    let mut tracker = Tracker::new(TrackerConfig::default())?;
    run_into(&mut tracker, &s.frames, &s.ripple)?;
    let tracks = tracker.finish();

    for t in &tracks {
        let filled = t
            .points
            .iter()
            .filter(|p| p.source == PointSource::Extrapolated)
            .count();
        let last = t.last().point;
        println!(
            "track {:3}: frames {:3}..={:3}, {:2} detected, {} filled, {:8}, ends at ({:.0}, {:.0})",
            t.id,
            t.seed_frame,
            t.last().frame,
            t.detected_count(),
            filled,
            t.state.as_str(),
            last.x,
            last.y
        );
    }
    let matches = match_tracks(&tracks, &s.ground_truth, DEFAULT_MATCH_THRESHOLD);
    let (detected, precision) = detection_metrics(&tracks, s.ground_truth.len(), &matches);
    println!(
        "{} tracks, detected {detected:.3}, precision {precision:.3}",
        tracks.len()
    );
    Ok(())
}
