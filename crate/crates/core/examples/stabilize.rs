//! Removes a sinusoidal camera shake from a detection stream.

use trajmap::simulator::{generate, ScenarioConfig, ShakeConfig};
use trajmap::stabilizer::{
    cumulative_trajectory, smooth_trajectory, stabilize, StabilizationConfig,
};
use trajmap::Point;

fn main() -> trajmap::Result<()> {
    let base = ScenarioConfig {
        n_pellets: 5,
        seed: 9,
        ..Default::default()
    };
    let still = generate(&base)?;
    let shaken = generate(&ScenarioConfig {
        shake: Some(ShakeConfig::default()),
        ..base
    })?;
    let transforms = shaken
        .transforms
        .as_ref()
        .expect("shake produces transforms");

    let cfg = StabilizationConfig::with_radius(30);
    let path = cumulative_trajectory(transforms)?;
    let smooth = smooth_trajectory(&path, &cfg)?;
    for f in [0, 15, 30, 60] {
        println!(
            "frame {f:3}: camera ({:7.2}, {:7.2}), smoothed ({:6.2}, {:6.2})",
            path[f].dx, path[f].dy, smooth[f].dx, smooth[f].dy
        );
    }

    let center = Point::new(960.0, 540.0);
    let fixed = stabilize(&shaken.frames, transforms, &cfg, center)?;
    let fixed_still = stabilize(
        &still.frames,
        &vec![Default::default(); transforms.len()],
        &cfg,
        center,
    )?;
    let mut worst = 0.0f64;
    for (a, b) in fixed.iter().zip(&fixed_still) {
        for (p, q) in a.iter().zip(b) {
            worst = worst.max(p.centroid().distance(&q.centroid()));
        }
    }
    let raw_worst = shaken
        .frames
        .iter()
        .zip(&still.frames)
        .flat_map(|(a, b)| {
            a.iter()
                .zip(b)
                .map(|(p, q)| p.centroid().distance(&q.centroid()))
        })
        .fold(0.0, f64::max);
    println!("largest shake offset {raw_worst:.2} px, after stabilization {worst:.2} px");
    Ok(())
}
