//! Trajectory mapping: per-pellet quadratic tracks grown frame by frame.
//!
//! A pellet enters near the right edge of the image (the feeder side) and
//! travels toward decreasing x until it reaches one of the two ripple areas
//! at the water surface. Each track keeps two limit curves bounding where its
//! next detection may appear:
//!
//! * the upper curve, fitted through the accepted centroids, the running mean
//!   of the per-frame max-height points, and the top-left corner of the target
//!   ripple box;
//! * the lower curve, a line from the first centroid to the bottom-right
//!   corner of the target ripple box.
//!
//! A candidate must lie between the curves (y grows downward, so the upper
//! curve has the smaller y), lie left of the last point, and, once three
//! centroids exist, leave the last point within the angle tolerance of the
//! fitted curve's tangent. The nearest such candidate is accepted. A frame
//! without one extends the track with the third-difference speed estimate
//! (constant velocity while the track has no curve yet) until `max_misses`
//! consecutive misses, after which the track is lost. A lone seed point is
//! held for one empty frame; if the pellet shows up in the frame after, the
//! skipped frame is filled in halfway and tracking goes on.

use crate::error::{Error, Result};
use crate::geometry::{BBox, Detection, Point, RipplePair};
use crate::polyfit::{fit_poly, fit_up_to, tangent_angle, Quadratic};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackerConfig {
    /// Seeds must start at x >= frame_w * cut_fraction.
    pub cut_fraction: f64,
    /// Number of detected centroids after which the track curve is frozen.
    pub commit_count: usize,
    pub angle_tolerance_deg: f64,
    pub max_misses: usize,
    /// Largest distance a candidate may lie from the track's last point;
    /// infinite disables the check.
    pub max_step: f64,
    pub frame_w: f64,
    pub frame_h: f64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            cut_fraction: 0.9,
            commit_count: 6,
            angle_tolerance_deg: 30.0,
            max_misses: 3,
            max_step: 120.0,
            frame_w: 1920.0,
            frame_h: 1080.0,
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cut_fraction > 0.0 && self.cut_fraction < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "cut fraction must lie in (0, 1), got {}",
                self.cut_fraction
            )));
        }
        if self.commit_count < 3 {
            return Err(Error::InvalidConfig(format!(
                "commit count must be at least 3, got {}",
                self.commit_count
            )));
        }
        if !(self.angle_tolerance_deg > 0.0 && self.angle_tolerance_deg <= 90.0) {
            return Err(Error::InvalidConfig(format!(
                "angle tolerance must lie in (0, 90], got {}",
                self.angle_tolerance_deg
            )));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "max step must be positive, got {}",
                self.max_step
            )));
        }
        if !(self.frame_w > 0.0 && self.frame_h > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "frame size must be positive, got {}x{}",
                self.frame_w, self.frame_h
            )));
        }
        Ok(())
    }

    pub fn with_commit_count(self, commit_count: usize) -> Self {
        TrackerConfig {
            commit_count,
            ..self
        }
    }

    fn in_cut_band(&self, x: f64) -> bool {
        self.frame_w * self.cut_fraction <= x && x <= self.frame_w
    }

    fn in_frame(&self, p: &Point) -> bool {
        (0.0..=self.frame_w).contains(&p.x) && (0.0..=self.frame_h).contains(&p.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointSource {
    Detected,
    Extrapolated,
}

impl PointSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            PointSource::Detected => "detected",
            PointSource::Extrapolated => "extrapolated",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "detected" => Some(PointSource::Detected),
            "extrapolated" => Some(PointSource::Extrapolated),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackPoint {
    pub frame: usize,
    pub point: Point,
    pub source: PointSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RippleSide {
    Left,
    Right,
}

impl RippleSide {
    pub fn pick(&self, pair: &RipplePair) -> BBox {
        match self {
            RippleSide::Left => pair.left,
            RippleSide::Right => pair.right,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitPair {
    pub upper_points: Vec<Point>,
    pub lower_points: Vec<Point>,
    pub upper_curve: Quadratic,
    pub lower_curve: Quadratic,
}

impl LimitPair {
    pub fn fit(upper_points: Vec<Point>, lower_points: Vec<Point>) -> Result<Self> {
        let upper_curve = fit_up_to(&upper_points, 2)?;
        let lower_curve = fit_up_to(&lower_points, 2)?;
        Ok(LimitPair {
            upper_points,
            lower_points,
            upper_curve,
            lower_curve,
        })
    }

    /// Closed band test at the point's own x.
    pub fn contains(&self, p: &Point) -> bool {
        self.upper_curve.eval(p.x) <= p.y && p.y <= self.lower_curve.eval(p.x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Last point fell inside a ripple box.
    Arrived,
    /// Too many consecutive misses.
    Lost,
    /// Last point left the image.
    Exited,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackState {
    Growing,
    Committed,
    Terminated(Termination),
}

impl TrackState {
    pub fn as_str(&self) -> &'static str {
        match self {
            TrackState::Growing => "growing",
            TrackState::Committed => "committed",
            TrackState::Terminated(Termination::Arrived) => "arrived",
            TrackState::Terminated(Termination::Lost) => "lost",
            TrackState::Terminated(Termination::Exited) => "exited",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "growing" => TrackState::Growing,
            "committed" => TrackState::Committed,
            "arrived" => TrackState::Terminated(Termination::Arrived),
            "lost" => TrackState::Terminated(Termination::Lost),
            "exited" => TrackState::Terminated(Termination::Exited),
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub id: u64,
    pub seed_frame: usize,
    pub points: Vec<TrackPoint>,
    /// Fit of the detected centroids; present from the third one on and
    /// frozen once the track commits.
    pub curve: Option<Quadratic>,
    pub limits: LimitPair,
    pub state: TrackState,
    /// Per-frame max-height points, one per detected centroid.
    pub max_height_samples: Vec<Point>,
    pub target: RippleSide,
    pub commit_frame: Option<usize>,
    misses: usize,
}

impl Trajectory {
    pub fn last(&self) -> &TrackPoint {
        self.points
            .last()
            .expect("trajectory has at least its seed point")
    }

    pub fn first_point(&self) -> Point {
        self.points[0].point
    }

    pub fn detected_points(&self) -> Vec<Point> {
        self.points
            .iter()
            .filter(|p| p.source == PointSource::Detected)
            .map(|p| p.point)
            .collect()
    }

    pub fn detected_count(&self) -> usize {
        self.points
            .iter()
            .filter(|p| p.source == PointSource::Detected)
            .count()
    }

    pub fn is_live(&self) -> bool {
        !matches!(self.state, TrackState::Terminated(_))
    }

    pub fn is_committed(&self) -> bool {
        self.commit_frame.is_some()
    }

    pub fn termination(&self) -> Option<Termination> {
        match self.state {
            TrackState::Terminated(t) => Some(t),
            _ => None,
        }
    }

    /// Points from the commit frame on; empty for uncommitted tracks.
    pub fn post_commit_points(&self) -> Vec<TrackPoint> {
        match self.commit_frame {
            Some(f) => self
                .points
                .iter()
                .filter(|p| p.frame >= f)
                .copied()
                .collect(),
            None => Vec::new(),
        }
    }

    /// Rebuilds a finished track from stored points, e.g. after reading a
    /// trajectory file. Limits are reduced to the seed line.
    pub fn from_points(
        id: u64,
        points: Vec<TrackPoint>,
        curve: Option<Quadratic>,
        state: TrackState,
        commit_count: Option<usize>,
    ) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyInput)?;
        let commit_frame = commit_count.and_then(|n| {
            points
                .iter()
                .filter(|p| p.source == PointSource::Detected)
                .nth(n.saturating_sub(1))
                .map(|p| p.frame)
        });
        let line = vec![first.point, Point::new(first.point.x - 1.0, first.point.y)];
        Ok(Trajectory {
            id,
            seed_frame: first.frame,
            limits: LimitPair::fit(line.clone(), line)?,
            points,
            curve,
            state,
            max_height_samples: Vec::new(),
            target: RippleSide::Left,
            commit_frame,
            misses: 0,
        })
    }
}

/// Minimum centroid y among the frame's detections.
fn highest_y(frame_dets: &[Detection]) -> Option<f64> {
    frame_dets
        .iter()
        .map(|d| d.centroid().y)
        .min_by(f64::total_cmp)
}

fn max_height_point(alpha: &Point, min_y: f64, cfg: &TrackerConfig) -> Point {
    Point::new((alpha.x + cfg.frame_w) / 2.0, min_y)
}

/// Starts a track for every unclaimed detection inside the cut band.
///
/// `claimed[i]` marks detections already taken by live tracks this frame.
/// New tracks are ordered by seed x, rightmost first.
pub fn seed_trajectories(
    frame: usize,
    frame_dets: &[Detection],
    claimed: &[bool],
    ripple: Option<&RipplePair>,
    cfg: &TrackerConfig,
    next_id: &mut u64,
) -> Result<Vec<Trajectory>> {
    let mut seeds: Vec<Point> = frame_dets
        .iter()
        .enumerate()
        .filter(|(i, d)| {
            !claimed.get(*i).copied().unwrap_or(false) && cfg.in_cut_band(d.centroid().x)
        })
        .map(|(_, d)| d.centroid())
        .collect();
    if seeds.is_empty() {
        return Ok(Vec::new());
    }
    let ripple = ripple.ok_or(Error::MissingRipple { frame })?;
    seeds.sort_by(|a, b| b.x.total_cmp(&a.x).then(a.y.total_cmp(&b.y)));

    let min_y = highest_y(frame_dets).expect("non-empty frame");
    let target = RippleSide::Left;
    let (alpha, theta) = target.pick(ripple).corners();
    let delta = max_height_point(&alpha, min_y, cfg);

    let mut out = Vec::with_capacity(seeds.len());
    for c in seeds {
        // a seed sharing x with both limit anchors cannot bound anything
        let Ok(limits) = LimitPair::fit(vec![c, delta, alpha], vec![c, theta]) else {
            continue;
        };
        out.push(Trajectory {
            id: *next_id,
            seed_frame: frame,
            points: vec![TrackPoint {
                frame,
                point: c,
                source: PointSource::Detected,
            }],
            curve: None,
            limits,
            state: TrackState::Growing,
            max_height_samples: vec![delta],
            target,
            commit_frame: None,
            misses: 0,
        });
        *next_id += 1;
    }
    Ok(out)
}

/// Signed difference between two line inclinations, folded into [-90, 90).
fn angle_between(a_deg: f64, b_deg: f64) -> f64 {
    (a_deg - b_deg + 90.0).rem_euclid(180.0) - 90.0
}

/// Whether `p` may be the next point of `traj`.
pub fn passes_gate(traj: &Trajectory, p: &Point, cfg: &TrackerConfig) -> bool {
    let last = traj.last().point;
    let reach = cfg.max_step * (1 + held_frames(traj)) as f64;
    if p.x >= last.x || last.distance_sq(p) > reach * reach {
        return false;
    }
    if !traj.limits.contains(p) {
        return false;
    }
    if let Some(curve) = &traj.curve {
        let segment = ((p.y - last.y) / (p.x - last.x)).atan().to_degrees();
        let tangent = tangent_angle(curve, last.x);
        if angle_between(segment, tangent).abs() > cfg.angle_tolerance_deg {
            return false;
        }
    }
    true
}

/// Indices of the detections that pass the gate.
pub fn gate_candidates(
    traj: &Trajectory,
    frame_dets: &[Detection],
    cfg: &TrackerConfig,
) -> Vec<usize> {
    frame_dets
        .iter()
        .enumerate()
        .filter(|(_, d)| passes_gate(traj, &d.centroid(), cfg))
        .map(|(i, _)| i)
        .collect()
}

/// Index of the candidate closest to `from`; ties go to smaller y, then
/// smaller x.
pub fn nearest(from: &Point, candidates: &[Point]) -> Option<usize> {
    candidates
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            from.distance_sq(a)
                .total_cmp(&from.distance_sq(b))
                .then(a.y.total_cmp(&b.y))
                .then(a.x.total_cmp(&b.x))
        })
        .map(|(i, _)| i)
}

/// Index of the gated candidate nearest to the track's last point.
pub fn associate(traj: &Trajectory, candidates: &[Detection]) -> Option<usize> {
    let pts: Vec<Point> = candidates.iter().map(|d| d.centroid()).collect();
    nearest(&traj.last().point, &pts)
}

/// Ripple box closest to where the fitted path crosses the ripple band.
fn choose_target(
    fit: &Quadratic,
    last: &Point,
    ripple: &RipplePair,
    cfg: &TrackerConfig,
) -> Option<RippleSide> {
    let level = (ripple.left.cy() + ripple.right.cy()) / 2.0;
    let landing = fit
        .solve_for(level)
        .into_iter()
        .filter(|x| *x < last.x && (0.0..=cfg.frame_w).contains(x))
        .max_by(f64::total_cmp)?;
    let dl = (ripple.left.cx() - landing).abs();
    let dr = (ripple.right.cx() - landing).abs();
    Some(if dr < dl {
        RippleSide::Right
    } else {
        RippleSide::Left
    })
}

/// Appends a detected centroid and rebuilds the limit curves.
pub fn accept_point(
    traj: &mut Trajectory,
    det: &Detection,
    frame_dets: &[Detection],
    ripple: &RipplePair,
    cfg: &TrackerConfig,
) -> Result<()> {
    let c = det.centroid();
    // a held seed gets the frames it skipped filled in linearly
    let last = *traj.last();
    let gap = det.frame.saturating_sub(last.frame);
    for k in 1..gap {
        let t = k as f64 / gap as f64;
        traj.points.push(TrackPoint {
            frame: last.frame + k,
            point: Point::new(
                last.point.x + t * (c.x - last.point.x),
                last.point.y + t * (c.y - last.point.y),
            ),
            source: PointSource::Extrapolated,
        });
    }
    traj.points.push(TrackPoint {
        frame: det.frame,
        point: c,
        source: PointSource::Detected,
    });
    traj.misses = 0;

    let detected = traj.detected_points();
    if detected.len() >= 3 {
        // the running fit keeps refining the landing estimate after commit
        let running = fit_poly(&detected, 2).or_else(|_| fit_up_to(&detected, 2))?;
        if !traj.is_committed() {
            traj.curve = Some(running);
        }
        if let Some(side) = choose_target(&running, &c, ripple, cfg) {
            traj.target = side;
        }
    }

    let (alpha, theta) = traj.target.pick(ripple).corners();
    let min_y = highest_y(frame_dets).unwrap_or(c.y).min(c.y);
    traj.max_height_samples
        .push(max_height_point(&alpha, min_y, cfg));
    let delta_mean = Point::mean(&traj.max_height_samples).expect("non-empty");

    let mut upper = detected.clone();
    upper.push(delta_mean);
    upper.push(alpha);
    traj.limits = LimitPair::fit(upper, vec![traj.first_point(), theta])?;

    if !traj.is_committed() && detected.len() >= cfg.commit_count {
        traj.commit_frame = Some(det.frame);
        traj.state = TrackState::Committed;
    }
    Ok(())
}

/// Next position from the last three x values (constant second difference)
/// placed on the track curve.
pub fn extrapolate(traj: &Trajectory) -> Result<Point> {
    let n = traj.points.len();
    let curve = match &traj.curve {
        Some(c) if n >= 3 => c,
        _ => return Err(Error::TooFewPoints { got: n }),
    };
    let x1 = traj.points[n - 1].point.x;
    let x2 = traj.points[n - 2].point.x;
    let x3 = traj.points[n - 3].point.x;
    let x = 3.0 * x1 - 3.0 * x2 + x3;
    Ok(Point::new(x, curve.eval(x)))
}

/// Frames a lone seed point has gone unmatched.
fn held_frames(traj: &Trajectory) -> usize {
    if traj.points.len() == 1 {
        traj.misses
    } else {
        0
    }
}

fn coastable(traj: &Trajectory) -> bool {
    traj.curve.is_some() || traj.points.len() >= 2
}

/// Position for a frame without a match: the curve extrapolation once a
/// curve exists, otherwise constant velocity from the last two points.
pub fn coast(traj: &Trajectory) -> Result<Point> {
    if traj.curve.is_some() {
        return extrapolate(traj);
    }
    let n = traj.points.len();
    if n < 2 {
        return Err(Error::TooFewPoints { got: n });
    }
    let (a, b) = (traj.points[n - 1].point, traj.points[n - 2].point);
    Ok(Point::new(2.0 * a.x - b.x, 2.0 * a.y - b.y))
}

/// One association decision, recorded when auditing is enabled.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociationRecord {
    pub frame: usize,
    pub trajectory: u64,
    pub from: Point,
    pub candidates: Vec<Point>,
    pub chosen: Option<usize>,
}

/// Frame-by-frame tracker state.
#[derive(Debug, Clone)]
pub struct Tracker {
    cfg: TrackerConfig,
    live: Vec<Trajectory>,
    finished: Vec<Trajectory>,
    next_id: u64,
    last_frame: Option<usize>,
    ripple: Option<RipplePair>,
    audit: Option<Vec<AssociationRecord>>,
}

impl Tracker {
    pub fn new(cfg: TrackerConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Tracker {
            cfg,
            live: Vec::new(),
            finished: Vec::new(),
            next_id: 0,
            last_frame: None,
            ripple: None,
            audit: None,
        })
    }

    /// Records every association decision for later inspection.
    pub fn with_audit(mut self) -> Self {
        self.audit = Some(Vec::new());
        self
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.cfg
    }

    pub fn live(&self) -> &[Trajectory] {
        &self.live
    }

    pub fn audit_log(&self) -> &[AssociationRecord] {
        self.audit.as_deref().unwrap_or(&[])
    }

    /// Processes one frame. Skipped frames are processed as empty, and the
    /// most recent ripple pair stays in effect until a new one arrives.
    pub fn step(
        &mut self,
        frame: usize,
        dets: &[Detection],
        ripple: Option<&RipplePair>,
    ) -> Result<()> {
        if let Some(last) = self.last_frame {
            if frame <= last {
                return Err(Error::OutOfOrderFrame { frame, last });
            }
            for gap in last + 1..frame {
                self.process(gap, &[], None)?;
            }
        }
        self.process(frame, dets, ripple)
    }

    fn process(
        &mut self,
        frame: usize,
        dets: &[Detection],
        ripple: Option<&RipplePair>,
    ) -> Result<()> {
        if let Some(r) = ripple {
            self.ripple = Some(*r);
        }
        let cfg = self.cfg;
        let mut claimed = vec![false; dets.len()];
        let mut kept = Vec::with_capacity(self.live.len());

        for mut traj in std::mem::take(&mut self.live) {
            let from = traj.last().point;
            let open: Vec<usize> = (0..dets.len())
                .filter(|&i| !claimed[i] && passes_gate(&traj, &dets[i].centroid(), &cfg))
                .collect();
            let points: Vec<Point> = open.iter().map(|&i| dets[i].centroid()).collect();
            let chosen = nearest(&from, &points);
            if let Some(log) = self.audit.as_mut() {
                log.push(AssociationRecord {
                    frame,
                    trajectory: traj.id,
                    from,
                    candidates: points,
                    chosen,
                });
            }

            match chosen {
                Some(k) => {
                    let idx = open[k];
                    claimed[idx] = true;
                    let ripple = self.ripple.ok_or(Error::MissingRipple { frame })?;
                    accept_point(&mut traj, &dets[idx], dets, &ripple, &cfg)?;
                }
                None if traj.misses < cfg.max_misses && coastable(&traj) => {
                    let p = coast(&traj)?;
                    traj.points.push(TrackPoint {
                        frame,
                        point: p,
                        source: PointSource::Extrapolated,
                    });
                    traj.misses += 1;
                }
                None if traj.points.len() == 1 && traj.misses < cfg.max_misses.min(1) => {
                    traj.misses += 1
                }
                None => traj.state = TrackState::Terminated(Termination::Lost),
            }

            if traj.is_live() {
                let p = traj.last().point;
                if self.ripple.is_some_and(|r| r.contains(&p)) {
                    traj.state = TrackState::Terminated(Termination::Arrived);
                } else if !cfg.in_frame(&p) {
                    traj.state = TrackState::Terminated(Termination::Exited);
                }
            }

            if traj.is_live() {
                kept.push(traj);
            } else if traj.curve.is_some() {
                self.finished.push(traj);
            }
        }

        let seeds = seed_trajectories(
            frame,
            dets,
            &claimed,
            self.ripple.as_ref(),
            &cfg,
            &mut self.next_id,
        )?;
        kept.extend(seeds);
        self.live = kept;
        self.last_frame = Some(frame);
        Ok(())
    }

    /// Confirmed tracks (at least three detected centroids), ordered by id.
    /// Tracks still in flight keep their growing/committed state.
    pub fn finish(self) -> Vec<Trajectory> {
        let mut out = self.finished;
        out.extend(self.live.into_iter().filter(|t| t.curve.is_some()));
        out.sort_by_key(|t| t.id);
        out
    }
}

/// Tracks a whole sequence. `frames[k]` holds the detections of frame k;
/// ripple pairs are looked up by their frame index.
pub fn track_sequence(
    frames: &[Vec<Detection>],
    ripple: &[RipplePair],
    cfg: &TrackerConfig,
) -> Result<Vec<Trajectory>> {
    let mut tracker = Tracker::new(*cfg)?;
    run_into(&mut tracker, frames, ripple)?;
    Ok(tracker.finish())
}

/// Feeds every frame of the sequence into an existing tracker.
pub fn run_into(
    tracker: &mut Tracker,
    frames: &[Vec<Detection>],
    ripple: &[RipplePair],
) -> Result<()> {
    let mut by_frame: Vec<Option<&RipplePair>> = vec![None; frames.len()];
    for r in ripple {
        if let Some(slot) = by_frame.get_mut(r.frame) {
            *slot = Some(r);
        }
    }
    for (k, dets) in frames.iter().enumerate() {
        tracker.step(k, dets, by_frame[k])?;
    }
    Ok(())
}
