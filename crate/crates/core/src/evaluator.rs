//! Scoring tracks against simulator ground truth.
//!
//! A trajectory's prediction is everything it reports from its commit frame
//! on: the centroids it accepted and the points it extrapolated through
//! missed frames. Those points are compared with the true pellet position of
//! the same frame, and the per-trajectory mean distance is the error sample
//! for one `n_f`.

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::geometry::{Detection, Point, RipplePair};
use crate::simulator::GroundTruthTrack;
use crate::tracker::{track_sequence, Termination, TrackerConfig, Trajectory};

/// Mean distance above which a prediction is not paired with a track.
pub const DEFAULT_MATCH_THRESHOLD: f64 = 50.0;

/// Commit counts evaluated by the sweep.
pub const NF_RANGE: std::ops::RangeInclusive<usize> = 3..=9;

/// Mean euclidean distance over the frames shared by `points` and `gt`.
pub fn points_error(points: &[(usize, Point)], gt: &GroundTruthTrack) -> Result<f64> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for (frame, p) in points {
        if let Some(truth) = gt.point_at(*frame) {
            sum += p.distance(&truth);
            n += 1;
        }
    }
    if n == 0 {
        return Err(Error::NoOverlap);
    }
    Ok(sum / n as f64)
}

/// Mean distance between the tracked points and the true positions.
pub fn trajectory_error(pred: &Trajectory, gt: &GroundTruthTrack) -> Result<f64> {
    let pts: Vec<(usize, Point)> = pred.points.iter().map(|p| (p.frame, p.point)).collect();
    points_error(&pts, gt)
}

/// Error of the points from the commit frame on; `NoOverlap` for
/// uncommitted tracks.
pub fn committed_error(pred: &Trajectory, gt: &GroundTruthTrack) -> Result<f64> {
    let pts: Vec<(usize, Point)> = pred
        .post_commit_points()
        .iter()
        .map(|p| (p.frame, p.point))
        .collect();
    points_error(&pts, gt)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackMatch {
    pub pred: usize,
    pub gt: usize,
    pub error: f64,
}

/// Greedy pairing: repeatedly take the globally closest unpaired
/// (prediction, track) with overlapping frames and mean distance under
/// `threshold`. Ties go to the lower prediction index, then the lower track
/// index. Returned in pairing order.
pub fn match_tracks(
    preds: &[Trajectory],
    gts: &[GroundTruthTrack],
    threshold: f64,
) -> Vec<TrackMatch> {
    let mut cands = Vec::new();
    for (i, p) in preds.iter().enumerate() {
        for (j, g) in gts.iter().enumerate() {
            if let Ok(e) = trajectory_error(p, g) {
                if e < threshold {
                    cands.push(TrackMatch {
                        pred: i,
                        gt: j,
                        error: e,
                    });
                }
            }
        }
    }
    cands.sort_by(|a, b| {
        a.error
            .total_cmp(&b.error)
            .then(a.pred.cmp(&b.pred))
            .then(a.gt.cmp(&b.gt))
    });
    let mut pred_used = vec![false; preds.len()];
    let mut gt_used = vec![false; gts.len()];
    let mut out = Vec::new();
    for c in cands {
        if !pred_used[c.pred] && !gt_used[c.gt] {
            pred_used[c.pred] = true;
            gt_used[c.gt] = true;
            out.push(c);
        }
    }
    out
}

/// `(detected_fraction, precision_trajectory)`: matched tracks over all
/// tracks, and matched predictions that arrived in a ripple box over
/// matched predictions. Both are 0 when their denominator is.
pub fn detection_metrics(preds: &[Trajectory], n_gt: usize, matches: &[TrackMatch]) -> (f64, f64) {
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let arrived = matches
        .iter()
        .filter(|m| preds[m.pred].termination() == Some(Termination::Arrived))
        .count();
    (ratio(matches.len(), n_gt), ratio(arrived, matches.len()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TStats {
    pub n: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Two-sided 95% critical value of Student's t with `df` degrees of freedom.
pub fn t_critical(df: usize) -> f64 {
    StudentsT::new(0.0, 1.0, df as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.975)
}

/// Confidence interval from summary values.
pub fn t_interval(n: usize, mean: f64, std_dev: f64) -> Result<TStats> {
    if n < 2 {
        return Err(Error::TooFewSamples { got: n });
    }
    let std_error = std_dev / (n as f64).sqrt();
    let half = t_critical(n - 1) * std_error;
    Ok(TStats {
        n,
        mean,
        std_dev,
        std_error,
        ci_low: mean - half,
        ci_high: mean + half,
    })
}

/// One-sample statistics with the unbiased standard deviation.
pub fn t_statistics(samples: &[f64]) -> Result<TStats> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::TooFewSamples { got: n });
    }
    let rough = samples.iter().sum::<f64>() / n as f64;
    // second pass removes the rounding left in the first mean
    let mean = rough + samples.iter().map(|v| v - rough).sum::<f64>() / n as f64;
    let ss: f64 = samples.iter().map(|v| (v - mean) * (v - mean)).sum();
    t_interval(n, mean, (ss / (n - 1) as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct NfRow {
    pub nf: usize,
    pub stats: TStats,
    pub detected_fraction: f64,
    pub precision_trajectory: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub rows: Vec<NfRow>,
    pub best_nf: usize,
    /// Metrics of the best row.
    pub detected_fraction: f64,
    pub precision_trajectory: f64,
}

impl EvalReport {
    /// Picks the row with the smallest mean; ties keep the earlier row.
    pub fn from_rows(rows: Vec<NfRow>) -> Result<Self> {
        let mut best = rows.first().ok_or(Error::EmptyInput)?;
        for r in &rows[1..] {
            if r.stats.mean < best.stats.mean {
                best = r;
            }
        }
        Ok(EvalReport {
            best_nf: best.nf,
            detected_fraction: best.detected_fraction,
            precision_trajectory: best.precision_trajectory,
            rows,
        })
    }

    pub fn row(&self, nf: usize) -> Option<&NfRow> {
        self.rows.iter().find(|r| r.nf == nf)
    }
}

/// Scores of one tracker run.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub row: NfRow,
    pub samples: Vec<f64>,
    pub matches: Vec<TrackMatch>,
    /// Ids of matched trajectories with no committed points on their track.
    pub no_overlap: Vec<u64>,
}

/// Scores one tracker output.
pub fn evaluate(
    preds: &[Trajectory],
    gts: &[GroundTruthTrack],
    nf: usize,
    threshold: f64,
) -> Result<Evaluation> {
    let matches = match_tracks(preds, gts, threshold);
    let (detected_fraction, precision_trajectory) = detection_metrics(preds, gts.len(), &matches);
    let mut samples = Vec::new();
    let mut no_overlap = Vec::new();
    for m in &matches {
        match committed_error(&preds[m.pred], &gts[m.gt]) {
            Ok(e) => samples.push(e),
            Err(Error::NoOverlap) => no_overlap.push(preds[m.pred].id),
            Err(e) => return Err(e),
        }
    }
    let stats = t_statistics(&samples)?;
    Ok(Evaluation {
        row: NfRow {
            nf,
            stats,
            detected_fraction,
            precision_trajectory,
        },
        samples,
        matches,
        no_overlap,
    })
}

/// Runs the tracker once per commit count in 3..=9 and scores each run.
pub fn sweep_nf(
    frames: &[Vec<Detection>],
    ripple: &[RipplePair],
    gts: &[GroundTruthTrack],
    base: &TrackerConfig,
    threshold: f64,
) -> Result<EvalReport> {
    let rows = NF_RANGE
        .map(|nf| {
            let preds = track_sequence(frames, ripple, &base.with_commit_count(nf))?;
            Ok(evaluate(&preds, gts, nf, threshold)?.row)
        })
        .collect::<Result<Vec<_>>>()?;
    EvalReport::from_rows(rows)
}

/// Fixed-width table, one row per `n_f`.
pub fn format_table(report: &EvalReport) -> String {
    let mut s = format!(
        "{:>3} {:>4} {:>12} {:>12} {:>12} {:>12} {:>12} {:>9} {:>9}\n",
        "nf",
        "n",
        "mean_px",
        "std_px",
        "stderr_px",
        "ci_low_px",
        "ci_high_px",
        "detected",
        "precision"
    );
    for r in &report.rows {
        let t = &r.stats;
        s.push_str(&format!(
            "{:>3} {:>4} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>9.6} {:>9.6}\n",
            r.nf,
            t.n,
            t.mean,
            t.std_dev,
            t.std_error,
            t.ci_low,
            t.ci_high,
            r.detected_fraction,
            r.precision_trajectory
        ));
    }
    s.push_str(&format!("best_nf {}\n", report.best_nf));
    s
}

/// Mean with 95% interval per `n_f` as a standalone SVG.
pub fn render_svg(report: &EvalReport) -> String {
    let (w, h, pad) = (640.0, 400.0, 50.0);
    let hi = report
        .rows
        .iter()
        .map(|r| r.stats.ci_high)
        .fold(0.0f64, f64::max)
        .max(1e-9)
        * 1.1;
    let n = report.rows.len().max(1) as f64;
    let px = |i: usize| pad + (w - 2.0 * pad) * (i as f64 + 0.5) / n;
    let py = |v: f64| h - pad - (h - 2.0 * pad) * (v / hi);
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    );
    s.push_str(&format!(
        "<line x1=\"{pad}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"black\"/>\n",
        h - pad,
        w - pad,
        h - pad
    ));
    s.push_str(&format!(
        "<line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{:.3}\" stroke=\"black\"/>\n",
        h - pad
    ));
    s.push_str(&format!(
        "<text x=\"{:.3}\" y=\"{:.3}\" font-size=\"12\" text-anchor=\"middle\">n_f</text>\n",
        w / 2.0,
        h - 10.0
    ));
    s.push_str(&format!(
        "<text x=\"12\" y=\"{:.3}\" font-size=\"12\" transform=\"rotate(-90 12 {:.3})\" text-anchor=\"middle\">error (px)</text>\n",
        h / 2.0,
        h / 2.0
    ));
    for (i, r) in report.rows.iter().enumerate() {
        let x = px(i);
        let t = &r.stats;
        s.push_str(&format!(
            "<line x1=\"{x:.3}\" y1=\"{:.3}\" x2=\"{x:.3}\" y2=\"{:.3}\" stroke=\"steelblue\" stroke-width=\"2\"/>\n",
            py(t.ci_low.max(0.0)),
            py(t.ci_high)
        ));
        s.push_str(&format!(
            "<circle cx=\"{x:.3}\" cy=\"{:.3}\" r=\"4\" fill=\"{}\"/>\n",
            py(t.mean),
            if r.nf == report.best_nf {
                "crimson"
            } else {
                "steelblue"
            }
        ));
        s.push_str(&format!(
            "<text x=\"{x:.3}\" y=\"{:.3}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
            h - pad + 16.0,
            r.nf
        ));
    }
    s.push_str(&format!(
        "<text x=\"{:.3}\" y=\"{:.3}\" font-size=\"11\" text-anchor=\"end\">{:.3}</text>\n",
        pad - 4.0,
        pad + 4.0,
        hi
    ));
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyfit::Quadratic;
    use crate::tracker::{PointSource, TrackPoint, TrackState};
    use proptest::prelude::*;

    fn gt(id: u64, start: usize, pts: &[(f64, f64)]) -> GroundTruthTrack {
        GroundTruthTrack {
            id,
            start_frame: start,
            points: pts.iter().map(|&(x, y)| Point::new(x, y)).collect(),
        }
    }

    fn pred(id: u64, start: usize, pts: &[(f64, f64)], state: TrackState) -> Trajectory {
        let points = pts
            .iter()
            .enumerate()
            .map(|(k, &(x, y))| TrackPoint {
                frame: start + k,
                point: Point::new(x, y),
                source: PointSource::Detected,
            })
            .collect();
        Trajectory::from_points(
            id,
            points,
            Some(Quadratic::new(0.0, 0.0, 0.0)),
            state,
            Some(3),
        )
        .unwrap()
    }

    fn arrived() -> TrackState {
        TrackState::Terminated(Termination::Arrived)
    }

    fn line(x0: f64, n: usize, dy: f64) -> Vec<(f64, f64)> {
        (0..n)
            .map(|k| (x0 - 10.0 * k as f64, 100.0 + dy + k as f64))
            .collect()
    }

    #[test]
    fn identical_is_zero_and_shift_is_five() {
        let g = gt(0, 4, &line(1800.0, 6, 0.0));
        assert_eq!(
            trajectory_error(&pred(0, 4, &line(1800.0, 6, 0.0), arrived()), &g).unwrap(),
            0.0
        );
        let shifted: Vec<_> = line(1800.0, 6, 0.0)
            .iter()
            .map(|&(x, y)| (x + 3.0, y + 4.0))
            .collect();
        let e = trajectory_error(&pred(0, 4, &shifted, arrived()), &g).unwrap();
        assert!((e - 5.0).abs() < 1e-12);
    }

    #[test]
    fn only_common_frames_count() {
        let g = gt(0, 10, &[(0.0, 0.0), (0.0, 0.0)]);
        let p = pred(
            0,
            9,
            &[(100.0, 0.0), (3.0, 4.0), (0.0, 0.0), (100.0, 0.0)],
            arrived(),
        );
        assert!((trajectory_error(&p, &g).unwrap() - 2.5).abs() < 1e-12);
        let far = pred(0, 50, &[(0.0, 0.0)], arrived());
        assert!(matches!(trajectory_error(&far, &g), Err(Error::NoOverlap)));
    }

    #[test]
    fn matcher_examples() {
        let g1 = gt(0, 0, &line(1800.0, 8, 0.0));
        let g2 = gt(1, 0, &line(1800.0, 8, 600.0));
        let p1 = pred(0, 0, &line(1800.0, 8, 1.0), arrived());
        let p2 = pred(1, 0, &line(1800.0, 8, 598.0), arrived());
        let m = match_tracks(
            &[p2.clone(), p1.clone()],
            &[g1.clone(), g2.clone()],
            DEFAULT_MATCH_THRESHOLD,
        );
        assert_eq!(m.len(), 2);
        assert_eq!((m[0].pred, m[0].gt), (1, 0));
        assert_eq!((m[1].pred, m[1].gt), (0, 1));
        let none = match_tracks(
            &[pred(0, 0, &line(1800.0, 8, 60.0), arrived())],
            &[g1],
            DEFAULT_MATCH_THRESHOLD,
        );
        assert!(none.is_empty());
    }

    #[test]
    fn metric_ratios() {
        let gts: Vec<_> = (0..10)
            .map(|i| gt(i, 0, &line(1800.0, 5, 100.0 * i as f64)))
            .collect();
        let preds: Vec<_> = (0..8)
            .map(|i| {
                let st = if i < 6 {
                    arrived()
                } else {
                    TrackState::Terminated(Termination::Lost)
                };
                pred(i, 0, &line(1800.0, 5, 100.0 * i as f64), st)
            })
            .collect();
        let m = match_tracks(&preds, &gts, DEFAULT_MATCH_THRESHOLD);
        assert_eq!(detection_metrics(&preds, gts.len(), &m), (0.8, 0.75));
        assert_eq!(detection_metrics(&[], 0, &[]), (0.0, 0.0));
    }

    #[test]
    fn table_row_arithmetic() {
        let t = t_interval(30, 21.32, 3.08).unwrap();
        assert!((t.std_error - 0.5623).abs() < 1e-4);
        assert!((t.ci_low - 20.17).abs() < 0.005 && (t.ci_high - 22.47).abs() < 0.005);
        let t3 = t_interval(30, 185.47, 93.81).unwrap();
        assert!((t3.std_error - 17.13).abs() < 0.005);
        assert!((t3.ci_low - 150.44).abs() < 0.01 && (t3.ci_high - 220.50).abs() < 0.01);
    }

    #[test]
    fn critical_values_match_printed_tables() {
        for (df, v) in [
            (1, 12.706),
            (2, 4.303),
            (10, 2.228),
            (29, 2.045),
            (60, 2.000),
            (120, 1.980),
        ] {
            assert!((t_critical(df) - v).abs() < 5e-4, "df {df}");
        }
        assert!((t_critical(100_000) - 1.95996).abs() < 1e-4);
    }

    #[test]
    fn constant_samples() {
        let t = t_statistics(&[21.32; 30]).unwrap();
        assert!((t.mean - 21.32).abs() < 1e-12);
        assert_eq!(t.std_dev, 0.0);
        assert_eq!((t.ci_low, t.ci_high), (t.mean, t.mean));
        assert!(matches!(
            t_statistics(&[1.0]),
            Err(Error::TooFewSamples { got: 1 })
        ));
    }

    #[test]
    fn best_row_prefers_earliest_on_ties() {
        let row = |nf, mean| NfRow {
            nf,
            stats: t_interval(5, mean, 1.0).unwrap(),
            detected_fraction: 1.0,
            precision_trajectory: 1.0,
        };
        let r = EvalReport::from_rows(vec![row(3, 0.0), row(4, 0.0), row(5, 1.0)]).unwrap();
        assert_eq!(r.best_nf, 3);
        let r = EvalReport::from_rows(vec![row(3, 2.0), row(4, 1.0), row(5, 1.0)]).unwrap();
        assert_eq!(r.best_nf, 4);
    }

    #[test]
    fn table_and_svg_render() {
        let row = |nf| NfRow {
            nf,
            stats: t_interval(30, 10.0 + nf as f64, 2.0).unwrap(),
            detected_fraction: 1.0,
            precision_trajectory: 0.9,
        };
        let r = EvalReport::from_rows(NF_RANGE.map(row).collect()).unwrap();
        let table = format_table(&r);
        assert_eq!(table.lines().count(), 9);
        assert!(table.ends_with("best_nf 3\n"));
        let svg = render_svg(&r);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 7);
    }

    proptest! {
        #[test]
        fn scale_equivariance(v in prop::collection::vec(0.1..100.0f64, 2..40), c in 0.01..50.0f64) {
            let a = t_statistics(&v).unwrap();
            let scaled: Vec<f64> = v.iter().map(|x| x * c).collect();
            let b = t_statistics(&scaled).unwrap();
            let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * (1.0 + y.abs());
            prop_assert!(close(b.mean, a.mean * c));
            prop_assert!(close(b.std_dev, a.std_dev * c));
            prop_assert!(close(b.std_error, a.std_error * c));
            prop_assert!(close(b.ci_low, a.ci_low * c));
            prop_assert!(close(b.ci_high, a.ci_high * c));
            prop_assert!(a.ci_low <= a.mean && a.mean <= a.ci_high);
        }

        #[test]
        fn error_is_nonnegative(pts in prop::collection::vec((0.0..1920.0f64, 0.0..1080.0f64), 1..20),
                                noise in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 20)) {
            let g = gt(0, 0, &pts);
            let moved: Vec<_> = pts.iter().zip(&noise).map(|(&(x, y), &(a, b))| (x + a, y + b)).collect();
            let e = trajectory_error(&pred(0, 0, &moved, arrived()), &g).unwrap();
            prop_assert!(e >= 0.0);
            prop_assert_eq!(trajectory_error(&pred(0, 0, &pts, arrived()), &g).unwrap(), 0.0);
        }
    }
}
