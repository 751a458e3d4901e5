//! Camera-motion removal on detection coordinates.
//!
//! Per-frame rigid transforms (frame φ relative to frame φ-1) are accumulated
//! into a camera path `L`, the path is smoothed into `χ`, and every detection
//! in frame φ is moved by the correction `χ_φ - L_φ`.
//!
//! Two smoothers are provided:
//!
//! * [`SmoothingMethod::MovingAverage`] (default): `χ_φ` is the centered
//!   moving average of `L` over `2r + 1` frames. Frames closer than `r` to an
//!   end of the video have no full centered window; there `χ_φ` is linearly
//!   extrapolated from the two nearest full-window averages, so constant-rate
//!   camera motion passes through untouched and any oscillation the full
//!   window annihilates (periods dividing `2r + 1`) is removed on every frame.
//! * [`SmoothingMethod::Recurrence`]: the incremental form
//!   `χ_φ = χ_{φ-1} + mean(L_{φ-r..=φ+r}) - L_{φ-1}` with `χ_0 = L_0`, windows
//!   truncated at the sequence ends.

use crate::error::{Error, Result};
use crate::geometry::{Detection, Point, RipplePair};

/// Inter-frame rigid motion: translation in pixels, rotation in radians.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TransformSample {
    pub dx: f64,
    pub dy: f64,
    pub da: f64,
}

impl TransformSample {
    pub fn new(dx: f64, dy: f64, da: f64) -> Self {
        TransformSample { dx, dy, da }
    }

    pub fn is_finite(&self) -> bool {
        self.dx.is_finite() && self.dy.is_finite() && self.da.is_finite()
    }

    fn add(self, o: TransformSample) -> TransformSample {
        TransformSample::new(self.dx + o.dx, self.dy + o.dy, self.da + o.da)
    }

    fn sub(self, o: TransformSample) -> TransformSample {
        TransformSample::new(self.dx - o.dx, self.dy - o.dy, self.da - o.da)
    }

    fn scale(self, k: f64) -> TransformSample {
        TransformSample::new(self.dx * k, self.dy * k, self.da * k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SmoothingMethod {
    #[default]
    MovingAverage,
    Recurrence,
}

/// How a window sum is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WindowNorm {
    /// Divide by the number of samples actually inside the window.
    #[default]
    SampleCount,
    /// Divide by the radius itself, as the incremental formula is sometimes
    /// written. Kept for comparison; it roughly doubles the window mean.
    Radius,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilizationConfig {
    pub smoothing_radius: usize,
    pub method: SmoothingMethod,
    pub norm: WindowNorm,
}

impl Default for StabilizationConfig {
    fn default() -> Self {
        StabilizationConfig {
            smoothing_radius: 30,
            method: SmoothingMethod::default(),
            norm: WindowNorm::default(),
        }
    }
}

impl StabilizationConfig {
    pub fn with_radius(radius: usize) -> Self {
        StabilizationConfig {
            smoothing_radius: radius,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.smoothing_radius < 1 {
            return Err(Error::InvalidConfig(
                "smoothing radius must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Running sum of the per-frame transforms.
pub fn cumulative_trajectory(transforms: &[TransformSample]) -> Result<Vec<TransformSample>> {
    if transforms.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut acc = TransformSample::default();
    Ok(transforms
        .iter()
        .map(|t| {
            acc = acc.add(*t);
            acc
        })
        .collect())
}

/// Smoothed camera path `χ`, one sample per frame of `path`.
pub fn smooth_trajectory(
    path: &[TransformSample],
    cfg: &StabilizationConfig,
) -> Result<Vec<TransformSample>> {
    cfg.validate()?;
    if path.is_empty() {
        return Err(Error::EmptyInput);
    }
    let sums = PrefixSums::new(path);
    Ok(match cfg.method {
        SmoothingMethod::Recurrence => recurrence(path, &sums, cfg),
        SmoothingMethod::MovingAverage => moving_average(path, &sums, cfg),
    })
}

fn recurrence(
    path: &[TransformSample],
    sums: &PrefixSums,
    cfg: &StabilizationConfig,
) -> Vec<TransformSample> {
    let n = path.len();
    let r = cfg.smoothing_radius;
    let mut chi = Vec::with_capacity(n);
    chi.push(path[0]);
    for phi in 1..n {
        let lo = phi.saturating_sub(r);
        let hi = (phi + r).min(n - 1);
        let mean = window_mean(sums, lo, hi, cfg);
        chi.push(chi[phi - 1].add(mean).sub(path[phi - 1]));
    }
    chi
}

fn moving_average(
    path: &[TransformSample],
    sums: &PrefixSums,
    cfg: &StabilizationConfig,
) -> Vec<TransformSample> {
    let n = path.len();
    let r = cfg.smoothing_radius;
    let width = 2 * r + 1;
    let centered = |phi: usize| window_mean(sums, phi - r, phi + r, cfg);

    if n < 2 * width {
        // not enough frames for two disjoint full windows: truncate instead
        return (0..n)
            .map(|phi| window_mean(sums, phi.saturating_sub(r), (phi + r).min(n - 1), cfg))
            .collect();
    }

    let first = r;
    let last = n - 1 - r;
    let head = (centered(first), centered(first + width));
    let tail = (centered(last - width), centered(last));
    (0..n)
        .map(|phi| {
            if phi < first {
                lerp(head, first as f64, width as f64, phi as f64)
            } else if phi > last {
                lerp(tail, (last - width) as f64, width as f64, phi as f64)
            } else {
                centered(phi)
            }
        })
        .collect()
}

// value at `at` on the line through (origin, a) and (origin + span, b)
fn lerp(
    (a, b): (TransformSample, TransformSample),
    origin: f64,
    span: f64,
    at: f64,
) -> TransformSample {
    let t = (at - origin) / span;
    a.add(b.sub(a).scale(t))
}

fn window_mean(
    sums: &PrefixSums,
    lo: usize,
    hi: usize,
    cfg: &StabilizationConfig,
) -> TransformSample {
    let total = sums.range(lo, hi);
    let denom = match cfg.norm {
        WindowNorm::SampleCount => (hi - lo + 1) as f64,
        WindowNorm::Radius => cfg.smoothing_radius as f64,
    };
    total.scale(1.0 / denom)
}

struct PrefixSums(Vec<TransformSample>);

impl PrefixSums {
    fn new(v: &[TransformSample]) -> Self {
        let mut out = Vec::with_capacity(v.len() + 1);
        out.push(TransformSample::default());
        let mut acc = TransformSample::default();
        for t in v {
            acc = acc.add(*t);
            out.push(acc);
        }
        PrefixSums(out)
    }

    // inclusive
    fn range(&self, lo: usize, hi: usize) -> TransformSample {
        self.0[hi + 1].sub(self.0[lo])
    }
}

/// Per-frame correction `χ_φ - L_φ`.
pub fn corrections(
    chi: &[TransformSample],
    path: &[TransformSample],
) -> Result<Vec<TransformSample>> {
    if chi.len() != path.len() {
        return Err(Error::InvalidConfig(format!(
            "smoothed path has {} frames, camera path has {}",
            chi.len(),
            path.len()
        )));
    }
    Ok(chi.iter().zip(path).map(|(c, l)| c.sub(*l)).collect())
}

/// Moves `p` by the correction: translate, then rotate about `center`.
pub fn correct_point(p: Point, c: &TransformSample, center: Point) -> Point {
    let tx = p.x + c.dx - center.x;
    let ty = p.y + c.dy - center.y;
    let (s, co) = c.da.sin_cos();
    Point::new(center.x + co * tx - s * ty, center.y + s * tx + co * ty)
}

fn correction_at(
    chi: &[TransformSample],
    path: &[TransformSample],
    frame: usize,
) -> Result<TransformSample> {
    let len = chi.len().min(path.len());
    if frame >= len {
        return Err(Error::FrameOutOfRange { frame, len });
    }
    Ok(chi[frame].sub(path[frame]))
}

/// Applies `χ_φ - L_φ` to every detection; box sizes are unchanged.
pub fn apply_stabilization(
    frames: &[Vec<Detection>],
    chi: &[TransformSample],
    path: &[TransformSample],
    center: Point,
) -> Result<Vec<Vec<Detection>>> {
    frames
        .iter()
        .map(|dets| {
            dets.iter()
                .map(|d| {
                    let c = correction_at(chi, path, d.frame)?;
                    let moved = correct_point(d.centroid(), &c, center);
                    Ok(Detection {
                        bbox: d.bbox.with_center(moved),
                        ..*d
                    })
                })
                .collect()
        })
        .collect()
}

/// Same correction for the ripple boxes (centers move, sizes kept).
pub fn apply_stabilization_ripple(
    ripple: &[RipplePair],
    chi: &[TransformSample],
    path: &[TransformSample],
    center: Point,
) -> Result<Vec<RipplePair>> {
    ripple
        .iter()
        .map(|r| {
            let c = correction_at(chi, path, r.frame)?;
            let left = r
                .left
                .with_center(correct_point(r.left.center(), &c, center));
            let right = r
                .right
                .with_center(correct_point(r.right.center(), &c, center));
            Ok(RipplePair::new(r.frame, left, right))
        })
        .collect()
}

/// Convenience: per-frame transforms in, stabilized detections out.
pub fn stabilize(
    frames: &[Vec<Detection>],
    transforms: &[TransformSample],
    cfg: &StabilizationConfig,
    center: Point,
) -> Result<Vec<Vec<Detection>>> {
    let path = cumulative_trajectory(transforms)?;
    let chi = smooth_trajectory(&path, cfg)?;
    apply_stabilization(frames, &chi, &path, center)
}
