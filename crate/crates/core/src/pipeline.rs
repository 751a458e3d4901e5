//! End-to-end helpers: stabilize, track, score.

use crate::decode::{decode_box, ObjectClass};
use crate::error::{Error, Result};
use crate::evaluator::{sweep_nf, EvalReport};
use crate::geometry::{BBox, Detection, Point, RipplePair};
use crate::io::{BoxFile, RawRecord};
use crate::simulator::{GroundTruthTrack, Scenario};
use crate::stabilizer::{
    apply_stabilization, apply_stabilization_ripple, cumulative_trajectory, smooth_trajectory,
    StabilizationConfig, TransformSample,
};
use crate::tracker::{track_sequence, TrackerConfig, Trajectory};

/// Observations of one sequence, optionally with the camera motion.
#[derive(Debug, Clone, PartialEq)]
pub struct Sequence {
    pub frames: Vec<Vec<Detection>>,
    pub ripple: Vec<RipplePair>,
    pub transforms: Option<Vec<TransformSample>>,
}

impl Sequence {
    pub fn from_scenario(s: &Scenario) -> Self {
        Sequence {
            frames: s.frames.clone(),
            ripple: s.ripple.clone(),
            transforms: s.transforms.clone(),
        }
    }

    pub fn from_boxes(boxes: BoxFile, transforms: Option<Vec<TransformSample>>) -> Self {
        Sequence {
            frames: boxes.frames,
            ripple: boxes.ripple,
            transforms,
        }
    }

    /// Removes the camera motion when transforms are present. Every frame
    /// with observations needs a transform.
    pub fn stabilized(&self, cfg: &StabilizationConfig, center: Point) -> Result<Sequence> {
        let Some(t) = &self.transforms else {
            return Ok(self.clone());
        };
        let path = cumulative_trajectory(t)?;
        let chi = smooth_trajectory(&path, cfg)?;
        Ok(Sequence {
            frames: apply_stabilization(&self.frames, &chi, &path, center)?,
            ripple: apply_stabilization_ripple(&self.ripple, &chi, &path, center)?,
            transforms: None,
        })
    }
}

/// Stabilizes (when transforms are present) and tracks.
pub fn track(
    seq: &Sequence,
    stab: &StabilizationConfig,
    cfg: &TrackerConfig,
) -> Result<Vec<Trajectory>> {
    let center = Point::new(cfg.frame_w / 2.0, cfg.frame_h / 2.0);
    let s = seq.stabilized(stab, center)?;
    track_sequence(&s.frames, &s.ripple, cfg)
}

/// Stabilizes once and runs the commit-count sweep.
pub fn sweep(
    seq: &Sequence,
    gts: &[GroundTruthTrack],
    stab: &StabilizationConfig,
    cfg: &TrackerConfig,
    threshold: f64,
) -> Result<EvalReport> {
    let center = Point::new(cfg.frame_w / 2.0, cfg.frame_h / 2.0);
    let s = seq.stabilized(stab, center)?;
    sweep_nf(&s.frames, &s.ripple, gts, cfg, threshold)
}

/// Decodes raw predictions into boxes. Predictions under `min_confidence`
/// are dropped; each frame keeps its two most confident ripple boxes.
pub fn decode_records(
    records: &[RawRecord],
    ref_w: f64,
    ref_h: f64,
    min_confidence: f64,
) -> Result<BoxFile> {
    let n_frames = records.iter().map(|r| r.frame + 1).max().unwrap_or(0);
    let mut frames: Vec<Vec<Detection>> = vec![Vec::new(); n_frames];
    let mut ripple: Vec<Vec<(f64, BBox)>> = vec![Vec::new(); n_frames];
    for r in records {
        if r.prediction.confidence < min_confidence {
            continue;
        }
        let b = decode_box(&r.prediction, ref_w, ref_h)?;
        match r.class {
            ObjectClass::Nutriment => frames[r.frame].push(Detection::new(r.frame, b)),
            ObjectClass::Ripple => ripple[r.frame].push((r.prediction.confidence, b)),
        }
    }
    let mut pairs = Vec::new();
    for (frame, mut boxes) in ripple.into_iter().enumerate() {
        if boxes.is_empty() {
            continue;
        }
        if boxes.len() < 2 {
            return Err(Error::MissingRipple { frame });
        }
        boxes.sort_by(|a, b| b.0.total_cmp(&a.0));
        pairs.push(RipplePair::new(frame, boxes[0].1, boxes[1].1));
    }
    Ok(BoxFile {
        frames,
        ripple: pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decode::RawPrediction;
    use crate::simulator::{generate, ScenarioConfig, ShakeConfig};

    #[test]
    fn shaken_run_matches_still_run() {
        let base = ScenarioConfig {
            noise_sigma: 1.0,
            clutter_rate: 2.0,
            seed: 21,
            ..Default::default()
        };
        let still = generate(&base).unwrap();
        let shaken = generate(&ScenarioConfig {
            shake: Some(ShakeConfig::default()),
            ..base
        })
        .unwrap();
        let cfg = TrackerConfig::default();
        let stab = StabilizationConfig::default();
        let a = track(&Sequence::from_scenario(&still), &stab, &cfg).unwrap();
        let b = track(&Sequence::from_scenario(&shaken), &stab, &cfg).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.points.len(), y.points.len());
            for (p, q) in x.points.iter().zip(&y.points) {
                assert_eq!(p.frame, q.frame);
                assert!(p.point.distance(&q.point) < 1e-3);
            }
        }
    }

    #[test]
    fn decode_keeps_confident_boxes() {
        let raw = |frame, class, confidence, cell_x| RawRecord {
            frame,
            prediction: RawPrediction {
                px: 0.0,
                py: 0.0,
                pw: 0.0,
                ph: 0.0,
                cell_x,
                cell_y: 10.0,
                confidence,
            },
            class,
        };
        let recs = vec![
            raw(0, ObjectClass::Nutriment, 0.9, 1800.0),
            raw(0, ObjectClass::Nutriment, 0.1, 1700.0),
            raw(0, ObjectClass::Ripple, 0.9, 500.0),
            raw(0, ObjectClass::Ripple, 0.3, 900.0),
            raw(0, ObjectClass::Ripple, 0.8, 1200.0),
            raw(2, ObjectClass::Nutriment, 0.5, 1600.0),
        ];
        let b = decode_records(&recs, 10.0, 10.0, 0.25).unwrap();
        assert_eq!(b.frames.len(), 3);
        assert_eq!(b.frames[0].len(), 1);
        assert_eq!(b.frames[0][0].centroid().x, 1800.5);
        assert_eq!(b.ripple.len(), 1);
        assert_eq!(
            (b.ripple[0].left.cx(), b.ripple[0].right.cx()),
            (500.5, 1200.5)
        );
        let lonely = vec![raw(0, ObjectClass::Ripple, 0.9, 500.0)];
        assert!(matches!(
            decode_records(&lonely, 10.0, 10.0, 0.25),
            Err(Error::MissingRipple { frame: 0 })
        ));
    }
}
