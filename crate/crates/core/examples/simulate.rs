//! Generates a noisy scenario and summarizes what the detector would see.

use trajmap::io::{format_detections, format_ground_truth};
use trajmap::simulator::{generate, ScenarioConfig};

fn main() -> trajmap::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(7);
    let s = generate(&ScenarioConfig::noisy(seed))?;
    let true_points: usize = s.ground_truth.iter().map(|g| g.points.len()).sum();
    let labelled = s.frames.iter().flatten().filter(|d| d.id.is_some()).count();
    println!(
        "{} frames, {} pellets",
        s.frames.len(),
        s.ground_truth.len()
    );
    println!(
        "{true_points} true positions, {labelled} detected, {} clutter",
        s.detection_count() - labelled
    );

    let flights: Vec<usize> = s.ground_truth.iter().map(|g| g.points.len()).collect();
    let mean = flights.iter().sum::<usize>() as f64 / flights.len() as f64;
    println!("mean visible flight {mean:.1} frames");
    for g in s.ground_truth.iter().take(3) {
        let l = g.landing();
        println!(
            "pellet {}: frames {}..={}, lands at ({:.0}, {:.0})",
            g.id,
            g.start_frame,
            g.end_frame(),
            l.x,
            l.y
        );
    }

    let det = format_detections(&s.frames);
    let gt = format_ground_truth(&s.ground_truth);
    println!(
        "detection file {} lines, ground truth file {} lines",
        det.lines().count(),
        gt.lines().count()
    );
    println!("{}", det.lines().next().unwrap_or_default());
    Ok(())
}
