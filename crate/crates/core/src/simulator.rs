//! Synthetic pellet scenarios with exact ballistic ground truth.
//!
//! Each pellet is launched from the feeder band at the right edge of the
//! image and follows `x_t = x0 + vx·t`, `y_t = y0 + vy·t + g·t²/2` (y down)
//! until its first position inside a ripple box. The launch velocity is
//! solved from a flight duration and a landing point drawn inside one of the
//! two ripple boxes, so every track ends in a ripple area.
//!
//! Observations add truncated Gaussian noise, independent dropout and
//! uniform clutter. An optional sinusoidal camera shake moves every
//! observation (and the ripple boxes) and is reported as a per-frame
//! transform sequence for the stabilizer.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{BBox, Detection, Point, RipplePair};
use crate::rng::SplitMix64;
use crate::stabilizer::TransformSample;

/// Camera shake `s_φ = A·(sin(2πφ/P), sin(2πφ/P + π/3))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShakeConfig {
    pub amplitude: f64,
    pub period_frames: f64,
}

impl ShakeConfig {
    pub fn offset(&self, frame: usize) -> Point {
        let phase = 2.0 * PI * frame as f64 / self.period_frames;
        Point::new(
            self.amplitude * phase.sin(),
            self.amplitude * (phase + PI / 3.0).sin(),
        )
    }
}

impl Default for ShakeConfig {
    /// 15 px at two periods per 61-frame smoothing window.
    fn default() -> Self {
        ShakeConfig {
            amplitude: 15.0,
            period_frames: 30.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub frame_w: f64,
    pub frame_h: f64,
    pub fps: f64,
    pub n_frames: usize,
    pub n_pellets: usize,
    /// Launch x is drawn from `[w·lo, w·hi]`.
    pub launch_band: (f64, f64),
    pub launch_y: (f64, f64),
    pub mean_flight_frames: f64,
    pub flight_sd_frames: f64,
    pub flight_range: (usize, usize),
    /// px/frame², positive downward.
    pub gravity: f64,
    pub noise_sigma: f64,
    pub dropout_prob: f64,
    /// Mean number of false detections per frame.
    pub clutter_rate: f64,
    pub pellet_w: (f64, f64),
    pub pellet_h: (f64, f64),
    pub ripple_left: BBox,
    pub ripple_right: BBox,
    pub shake: Option<ShakeConfig>,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            frame_w: 1920.0,
            frame_h: 1080.0,
            fps: 30.0,
            n_frames: 419,
            n_pellets: 30,
            launch_band: (0.9, 1.0),
            launch_y: (380.0, 520.0),
            mean_flight_frames: 23.8,
            flight_sd_frames: 2.5,
            flight_range: (16, 32),
            gravity: 1.2,
            noise_sigma: 0.0,
            dropout_prob: 0.0,
            clutter_rate: 0.0,
            pellet_w: (9.0, 13.0),
            pellet_h: (6.0, 36.0),
            ripple_left: BBox::new(560.0, 960.0, 480.0, 120.0).expect("valid box"),
            ripple_right: BBox::new(1180.0, 960.0, 480.0, 120.0).expect("valid box"),
            shake: None,
            seed: 0,
        }
    }
}

impl ScenarioConfig {
    /// The noisy benchmark setting: 2 px noise, 10% dropout, 5 clutter
    /// detections per frame.
    pub fn noisy(seed: u64) -> Self {
        ScenarioConfig {
            noise_sigma: 2.0,
            dropout_prob: 0.1,
            clutter_rate: 5.0,
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.frame_w > 0.0 && self.frame_h > 0.0) {
            return bad(format!(
                "frame size must be positive, got {}x{}",
                self.frame_w, self.frame_h
            ));
        }
        if self.n_frames == 0 {
            return bad("n_frames must be at least 1".into());
        }
        if !(self.fps > 0.0) {
            return bad(format!("fps must be positive, got {}", self.fps));
        }
        if !(self.noise_sigma >= 0.0) || !(self.clutter_rate >= 0.0) || !(self.gravity >= 0.0) {
            return bad("noise, clutter rate and gravity must be non-negative".into());
        }
        if !(0.0..=1.0).contains(&self.dropout_prob) {
            return bad(format!(
                "dropout probability must lie in [0, 1], got {}",
                self.dropout_prob
            ));
        }
        let (lo, hi) = self.launch_band;
        if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
            return bad(format!(
                "launch band must satisfy 0 <= lo <= hi <= 1, got ({lo}, {hi})"
            ));
        }
        let (fmin, fmax) = self.flight_range;
        if fmin < 2 || fmin > fmax {
            return bad(format!(
                "flight range must satisfy 2 <= min <= max, got ({fmin}, {fmax})"
            ));
        }
        if self.n_pellets > 0 && self.n_frames < fmax + 2 {
            return bad(format!(
                "{} frames cannot hold a {}-frame flight",
                self.n_frames, fmax
            ));
        }
        if self.pellet_w.0 <= 0.0
            || self.pellet_h.0 <= 0.0
            || self.pellet_w.0 > self.pellet_w.1
            || self.pellet_h.0 > self.pellet_h.1
        {
            return bad("pellet size ranges must be positive and ordered".into());
        }
        let pair = RipplePair::new(0, self.ripple_left, self.ripple_right);
        if !pair.within_frame(self.frame_w, self.frame_h) {
            return bad("ripple boxes must lie inside the frame".into());
        }
        if let Some(s) = &self.shake {
            if !(s.amplitude >= 0.0 && s.period_frames > 0.0) {
                return bad("shake amplitude must be non-negative and period positive".into());
            }
        }
        Ok(())
    }
}

/// True path of one pellet, one point per frame from launch to landing.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthTrack {
    pub id: u64,
    pub start_frame: usize,
    pub points: Vec<Point>,
}

impl GroundTruthTrack {
    pub fn end_frame(&self) -> usize {
        self.start_frame + self.points.len() - 1
    }

    pub fn landing_frame(&self) -> usize {
        self.end_frame()
    }

    pub fn landing(&self) -> Point {
        *self.points.last().expect("non-empty track")
    }

    pub fn point_at(&self, frame: usize) -> Option<Point> {
        frame
            .checked_sub(self.start_frame)
            .and_then(|k| self.points.get(k))
            .copied()
    }

    pub fn frames(&self) -> impl Iterator<Item = (usize, Point)> + '_ {
        self.points
            .iter()
            .enumerate()
            .map(move |(k, p)| (self.start_frame + k, *p))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub config: ScenarioConfig,
    /// `frames[k]` holds the observations of frame k.
    pub frames: Vec<Vec<Detection>>,
    pub ripple: Vec<RipplePair>,
    pub ground_truth: Vec<GroundTruthTrack>,
    /// Per-frame camera motion, present when shake is enabled.
    pub transforms: Option<Vec<TransformSample>>,
}

impl Scenario {
    pub fn detection_count(&self) -> usize {
        self.frames.iter().map(Vec::len).sum()
    }
}

struct Launch {
    frame: usize,
    origin: Point,
    velocity: Point,
    size: (f64, f64),
}

pub fn generate(cfg: &ScenarioConfig) -> Result<Scenario> {
    cfg.validate()?;
    let mut rng = SplitMix64::new(cfg.seed);
    let pair = RipplePair::new(0, cfg.ripple_left, cfg.ripple_right);

    let launches = plan_launches(cfg, &pair, &mut rng);
    let ground_truth: Vec<GroundTruthTrack> = launches
        .iter()
        .enumerate()
        .map(|(id, l)| fly(id as u64, l, cfg, &pair))
        .collect();

    let mut frames: Vec<Vec<Detection>> = vec![Vec::new(); cfg.n_frames];
    for frame in 0..cfg.n_frames {
        let dets = &mut frames[frame];
        for (gt, launch) in ground_truth.iter().zip(&launches) {
            let Some(truth) = gt.point_at(frame) else {
                continue;
            };
            if rng.bernoulli(cfg.dropout_prob) {
                continue;
            }
            let (nx, ny) = if cfg.noise_sigma > 0.0 {
                (
                    cfg.noise_sigma * rng.truncated_normal(3.0),
                    cfg.noise_sigma * rng.truncated_normal(3.0),
                )
            } else {
                (0.0, 0.0)
            };
            let p = clamp_to_frame(Point::new(truth.x + nx, truth.y + ny), cfg);
            let b = BBox::new(p.x, p.y, launch.size.0, launch.size.1)?;
            dets.push(Detection::new(frame, b).with_id(gt.id));
        }
        for _ in 0..rng.poisson(cfg.clutter_rate) {
            let x = rng.uniform_in(0.0, cfg.frame_w);
            let y = rng.uniform_in(0.0, cfg.frame_h);
            let w = rng.uniform_in(cfg.pellet_w.0, cfg.pellet_w.1);
            let h = rng.uniform_in(cfg.pellet_h.0, cfg.pellet_h.1);
            dets.push(Detection::new(frame, BBox::new(x, y, w, h)?));
        }
        dets.sort_by(|a, b| {
            let (pa, pb) = (a.centroid(), b.centroid());
            pa.x.total_cmp(&pb.x).then(pa.y.total_cmp(&pb.y))
        });
    }

    let mut ripple: Vec<RipplePair> = (0..cfg.n_frames)
        .map(|f| RipplePair::new(f, cfg.ripple_left, cfg.ripple_right))
        .collect();

    let transforms = match &cfg.shake {
        Some(shake) => {
            for (frame, dets) in frames.iter_mut().enumerate() {
                let s = shake.offset(frame);
                for d in dets.iter_mut() {
                    let c = d.centroid();
                    d.bbox = d.bbox.with_center(Point::new(c.x + s.x, c.y + s.y));
                }
            }
            for r in ripple.iter_mut() {
                let s = shake.offset(r.frame);
                let mv = |b: BBox| b.with_center(Point::new(b.cx() + s.x, b.cy() + s.y));
                *r = RipplePair::new(r.frame, mv(r.left), mv(r.right));
            }
            Some(shake_transforms(shake, cfg.n_frames))
        }
        None => None,
    };

    Ok(Scenario {
        config: cfg.clone(),
        frames,
        ripple,
        ground_truth,
        transforms,
    })
}

/// Per-frame motion whose running sum is the shake offset.
pub fn shake_transforms(shake: &ShakeConfig, n_frames: usize) -> Vec<TransformSample> {
    (0..n_frames)
        .map(|f| {
            let s = shake.offset(f);
            let prev = if f == 0 {
                Point::new(0.0, 0.0)
            } else {
                shake.offset(f - 1)
            };
            TransformSample::new(s.x - prev.x, s.y - prev.y, 0.0)
        })
        .collect()
}

fn clamp_to_frame(p: Point, cfg: &ScenarioConfig) -> Point {
    Point::new(p.x.clamp(0.0, cfg.frame_w), p.y.clamp(0.0, cfg.frame_h))
}

fn plan_launches(cfg: &ScenarioConfig, pair: &RipplePair, rng: &mut SplitMix64) -> Vec<Launch> {
    if cfg.n_pellets == 0 {
        return Vec::new();
    }
    let (fmin, fmax) = cfg.flight_range;
    // every flight fits inside the video
    let usable = (cfg.n_frames - fmax - 1) as f64;
    let slot = usable / cfg.n_pellets.max(1) as f64;
    (0..cfg.n_pellets)
        .map(|i| {
            let frame = ((i as f64 + 0.8 * rng.uniform()) * slot).floor() as usize;
            let x0 = cfg.frame_w * rng.uniform_in(cfg.launch_band.0, cfg.launch_band.1);
            let y0 = rng.uniform_in(cfg.launch_y.0, cfg.launch_y.1);
            let duration = (cfg.mean_flight_frames + cfg.flight_sd_frames * rng.normal())
                .round()
                .clamp(fmin as f64, fmax as f64);
            let target = if rng.bernoulli(0.5) {
                pair.left
            } else {
                pair.right
            };
            let (tl, br) = target.corners();
            let margin = 0.1 * target.w();
            let xl = rng.uniform_in(tl.x + margin, br.x - margin);
            let yl = rng.uniform_in(tl.y + 0.05 * target.h(), tl.y + 0.3 * target.h());
            let vx = (xl - x0) / duration;
            let vy = (yl - y0 - 0.5 * cfg.gravity * duration * duration) / duration;
            let size = (
                rng.uniform_in(cfg.pellet_w.0, cfg.pellet_w.1),
                rng.uniform_in(cfg.pellet_h.0, cfg.pellet_h.1),
            );
            Launch {
                frame,
                origin: Point::new(x0, y0),
                velocity: Point::new(vx, vy),
                size,
            }
        })
        .collect()
}

fn fly(id: u64, l: &Launch, cfg: &ScenarioConfig, pair: &RipplePair) -> GroundTruthTrack {
    let mut points = Vec::new();
    for t in 0..=cfg.flight_range.1 {
        let t = t as f64;
        let p = Point::new(
            l.origin.x + l.velocity.x * t,
            l.origin.y + l.velocity.y * t + 0.5 * cfg.gravity * t * t,
        );
        points.push(p);
        if pair.contains(&p) {
            break;
        }
    }
    GroundTruthTrack {
        id,
        start_frame: l.frame,
        points,
    }
}
