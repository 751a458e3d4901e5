//! Line-oriented text formats.
//!
//! Every file starts with one header line
//!
//! ```text
//! #<kind> v1 [key=value ...] columns=<c1>,<c2>,...
//! ```
//!
//! followed by comma-separated rows in the declared column order. Reals are
//! written with six decimals, angles in radians, frames 0-based. Blank lines
//! are ignored on read.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::decode::{ObjectClass, RawPrediction};
use crate::error::{Error, Result};
use crate::evaluator::{EvalReport, NfRow, TStats};
use crate::geometry::{BBox, Detection, Point, RipplePair};
use crate::polyfit::Quadratic;
use crate::simulator::GroundTruthTrack;
use crate::stabilizer::TransformSample;
use crate::tracker::{PointSource, TrackPoint, TrackState, Trajectory};

pub const SCHEMA_VERSION: &str = "v1";

const BOX_COLUMNS: &[&str] = &["frame", "cx", "cy", "w", "h", "class"];
const TRANSFORM_COLUMNS: &[&str] = &["frame", "dx", "dy", "da"];
const RAW_COLUMNS: &[&str] = &[
    "frame",
    "px",
    "py",
    "pw",
    "ph",
    "cell_x",
    "cell_y",
    "confidence",
    "class",
];
const TRUTH_COLUMNS: &[&str] = &["track_id", "frame", "x", "y"];
const TRAJECTORY_COLUMNS: &[&str] = &[
    "traj_id", "frame", "x", "y", "source", "a1", "a2", "a3", "state",
];
const REPORT_COLUMNS: &[&str] = &[
    "nf",
    "n",
    "mean",
    "std_dev",
    "std_error",
    "ci_low",
    "ci_high",
    "detected_fraction",
    "precision_trajectory",
];

fn header(kind: &str, meta: &[(&str, String)], columns: &[&str]) -> String {
    let mut s = format!("#{kind} {SCHEMA_VERSION}");
    for (k, v) in meta {
        let _ = write!(s, " {k}={v}");
    }
    let _ = writeln!(s, " columns={}", columns.join(","));
    s
}

fn f6(v: f64) -> String {
    let s = format!("{v:.6}");
    // avoid "-0.000000", which would break byte-identical comparisons
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// A parsed file: header metadata plus rows with their 1-based line numbers.
struct Table<'a> {
    path: PathBuf,
    meta: BTreeMap<String, String>,
    rows: Vec<(usize, Vec<&'a str>)>,
}

impl<'a> Table<'a> {
    fn parse(path: &Path, text: &'a str, kind: &str, columns: &[&str]) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut lines = text.lines().enumerate();
        let (_, head) = lines
            .next()
            .ok_or_else(|| err(1, "missing header line".into()))?;
        let mut words = head.split_whitespace();
        let tag = format!("#{kind}");
        if words.next() != Some(tag.as_str()) {
            return Err(err(1, format!("expected a `{tag}` header")));
        }
        match words.next() {
            Some(SCHEMA_VERSION) => {}
            Some(v) => return Err(err(1, format!("unsupported schema version `{v}`"))),
            None => return Err(err(1, "missing schema version".into())),
        }
        let mut meta = BTreeMap::new();
        for w in words {
            let (k, v) = w
                .split_once('=')
                .ok_or_else(|| err(1, format!("malformed header field `{w}`")))?;
            meta.insert(k.to_string(), v.to_string());
        }
        let declared = meta.get("columns").map(String::as_str).unwrap_or("");
        if declared != columns.join(",") {
            return Err(err(
                1,
                format!("expected columns {}, found `{declared}`", columns.join(",")),
            ));
        }
        let mut rows = Vec::new();
        for (k, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != columns.len() {
                return Err(err(
                    k + 1,
                    format!("expected {} fields, found {}", columns.len(), fields.len()),
                ));
            }
            rows.push((k + 1, fields));
        }
        Ok(Table {
            path: path.to_path_buf(),
            meta,
            rows,
        })
    }

    fn err(&self, line: usize, msg: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line,
            msg: msg.into(),
        }
    }

    fn meta<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.meta
            .get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| self.err(1, format!("bad header value {key}={v}")))
            })
            .transpose()
    }

    fn real(&self, line: usize, field: &str, name: &str) -> Result<f64> {
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(self.err(
                line,
                format!("{name}: expected a finite number, found `{field}`"),
            )),
        }
    }

    fn int<T: std::str::FromStr>(&self, line: usize, field: &str, name: &str) -> Result<T> {
        field.parse().map_err(|_| {
            self.err(
                line,
                format!("{name}: expected a non-negative integer, found `{field}`"),
            )
        })
    }

    fn geometry<T>(&self, line: usize, r: Result<T>) -> Result<T> {
        r.map_err(|e| self.err(line, e.to_string()))
    }
}

/// Per-frame nutriment detections and ripple pairs read from box files.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoxFile {
    pub frames: Vec<Vec<Detection>>,
    pub ripple: Vec<RipplePair>,
}

fn box_row(out: &mut String, frame: usize, b: &BBox, class: ObjectClass) {
    let _ = writeln!(
        out,
        "{frame},{},{},{},{},{}",
        f6(b.cx()),
        f6(b.cy()),
        f6(b.w()),
        f6(b.h()),
        class.as_str()
    );
}

/// Detections, one row per box; `n_frames` keeps trailing empty frames.
pub fn format_detections(frames: &[Vec<Detection>]) -> String {
    let mut s = header(
        "detections",
        &[("n_frames", frames.len().to_string())],
        BOX_COLUMNS,
    );
    for (k, dets) in frames.iter().enumerate() {
        for d in dets {
            box_row(&mut s, k, &d.bbox, ObjectClass::Nutriment);
        }
    }
    s
}

/// Ripple pairs, two rows per frame, left box first.
pub fn format_ripple(ripple: &[RipplePair]) -> String {
    let mut s = header("ripple", &[], BOX_COLUMNS);
    for r in ripple {
        box_row(&mut s, r.frame, &r.left, ObjectClass::Ripple);
        box_row(&mut s, r.frame, &r.right, ObjectClass::Ripple);
    }
    s
}

fn parse_boxes(path: &Path, text: &str, kind: &str) -> Result<BoxFile> {
    let t = Table::parse(path, text, kind, BOX_COLUMNS)?;
    let mut frames: Vec<Vec<Detection>> =
        vec![Vec::new(); t.meta::<usize>("n_frames")?.unwrap_or(0)];
    let mut ripple_boxes: BTreeMap<usize, Vec<(usize, BBox)>> = BTreeMap::new();
    for (line, f) in &t.rows {
        let line = *line;
        let frame: usize = t.int(line, f[0], "frame")?;
        let b = t.geometry(
            line,
            BBox::new(
                t.real(line, f[1], "cx")?,
                t.real(line, f[2], "cy")?,
                t.real(line, f[3], "w")?,
                t.real(line, f[4], "h")?,
            ),
        )?;
        match ObjectClass::parse(f[5]) {
            Some(ObjectClass::Nutriment) => {
                if frames.len() <= frame {
                    frames.resize(frame + 1, Vec::new());
                }
                frames[frame].push(Detection::new(frame, b));
            }
            Some(ObjectClass::Ripple) => ripple_boxes.entry(frame).or_default().push((line, b)),
            None => return Err(t.err(line, format!("unknown class `{}`", f[5]))),
        }
    }
    let mut ripple = Vec::with_capacity(ripple_boxes.len());
    for (frame, boxes) in ripple_boxes {
        if boxes.len() != 2 {
            return Err(t.err(
                boxes[0].0,
                format!("frame {frame} has {} ripple boxes, expected 2", boxes.len()),
            ));
        }
        ripple.push(RipplePair::new(frame, boxes[0].1, boxes[1].1));
    }
    Ok(BoxFile { frames, ripple })
}

pub fn parse_detections(path: &Path, text: &str) -> Result<BoxFile> {
    parse_boxes(path, text, "detections")
}

pub fn parse_ripple(path: &Path, text: &str) -> Result<Vec<RipplePair>> {
    Ok(parse_boxes(path, text, "ripple")?.ripple)
}

pub fn read_detections(path: &Path) -> Result<BoxFile> {
    parse_detections(path, &read_text(path)?)
}

pub fn read_ripple(path: &Path) -> Result<Vec<RipplePair>> {
    parse_ripple(path, &read_text(path)?)
}

pub fn format_transforms(t: &[TransformSample]) -> String {
    let mut s = header("transforms", &[], TRANSFORM_COLUMNS);
    for (k, v) in t.iter().enumerate() {
        let _ = writeln!(s, "{k},{},{},{}", f6(v.dx), f6(v.dy), f6(v.da));
    }
    s
}

/// Transforms must cover frames 0, 1, 2, ... in order.
pub fn parse_transforms(path: &Path, text: &str) -> Result<Vec<TransformSample>> {
    let t = Table::parse(path, text, "transforms", TRANSFORM_COLUMNS)?;
    let mut out = Vec::with_capacity(t.rows.len());
    for (line, f) in &t.rows {
        let line = *line;
        let frame: usize = t.int(line, f[0], "frame")?;
        if frame != out.len() {
            return Err(t.err(line, format!("expected frame {}, found {frame}", out.len())));
        }
        out.push(TransformSample::new(
            t.real(line, f[1], "dx")?,
            t.real(line, f[2], "dy")?,
            t.real(line, f[3], "da")?,
        ));
    }
    Ok(out)
}

pub fn read_transforms(path: &Path) -> Result<Vec<TransformSample>> {
    parse_transforms(path, &read_text(path)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawRecord {
    pub frame: usize,
    pub prediction: RawPrediction,
    pub class: ObjectClass,
}

pub fn format_raw(records: &[RawRecord]) -> String {
    let mut s = header("raw_predictions", &[], RAW_COLUMNS);
    for r in records {
        let p = &r.prediction;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.frame,
            f6(p.px),
            f6(p.py),
            f6(p.pw),
            f6(p.ph),
            f6(p.cell_x),
            f6(p.cell_y),
            f6(p.confidence),
            r.class.as_str()
        );
    }
    s
}

pub fn parse_raw(path: &Path, text: &str) -> Result<Vec<RawRecord>> {
    let t = Table::parse(path, text, "raw_predictions", RAW_COLUMNS)?;
    t.rows
        .iter()
        .map(|(line, f)| {
            let line = *line;
            let r = |i: usize| t.real(line, f[i], RAW_COLUMNS[i]);
            Ok(RawRecord {
                frame: t.int(line, f[0], "frame")?,
                prediction: RawPrediction {
                    px: r(1)?,
                    py: r(2)?,
                    pw: r(3)?,
                    ph: r(4)?,
                    cell_x: r(5)?,
                    cell_y: r(6)?,
                    confidence: r(7)?,
                },
                class: ObjectClass::parse(f[8])
                    .ok_or_else(|| t.err(line, format!("unknown class `{}`", f[8])))?,
            })
        })
        .collect()
}

pub fn read_raw(path: &Path) -> Result<Vec<RawRecord>> {
    parse_raw(path, &read_text(path)?)
}

pub fn format_ground_truth(tracks: &[GroundTruthTrack]) -> String {
    let mut s = header("ground_truth", &[], TRUTH_COLUMNS);
    for g in tracks {
        for (frame, p) in g.frames() {
            let _ = writeln!(s, "{},{frame},{},{}", g.id, f6(p.x), f6(p.y));
        }
    }
    s
}

/// Rows of one track must be contiguous and frame-consecutive.
pub fn parse_ground_truth(path: &Path, text: &str) -> Result<Vec<GroundTruthTrack>> {
    let t = Table::parse(path, text, "ground_truth", TRUTH_COLUMNS)?;
    let mut out: Vec<GroundTruthTrack> = Vec::new();
    for (line, f) in &t.rows {
        let line = *line;
        let id: u64 = t.int(line, f[0], "track_id")?;
        let frame: usize = t.int(line, f[1], "frame")?;
        let p = Point::new(t.real(line, f[2], "x")?, t.real(line, f[3], "y")?);
        match out.last_mut() {
            Some(g) if g.id == id => {
                if frame != g.end_frame() + 1 {
                    return Err(t.err(
                        line,
                        format!(
                            "track {id}: expected frame {}, found {frame}",
                            g.end_frame() + 1
                        ),
                    ));
                }
                g.points.push(p);
            }
            _ => {
                if out.iter().any(|g| g.id == id) {
                    return Err(t.err(line, format!("track {id} rows are not contiguous")));
                }
                out.push(GroundTruthTrack {
                    id,
                    start_frame: frame,
                    points: vec![p],
                });
            }
        }
    }
    Ok(out)
}

pub fn read_ground_truth(path: &Path) -> Result<Vec<GroundTruthTrack>> {
    parse_ground_truth(path, &read_text(path)?)
}

/// Trajectories with their curve coefficients repeated on every row.
pub fn format_trajectories(trajs: &[Trajectory], commit_count: usize) -> Result<String> {
    let mut s = header(
        "trajectories",
        &[("commit_count", commit_count.to_string())],
        TRAJECTORY_COLUMNS,
    );
    for tr in trajs {
        let q = tr
            .curve
            .ok_or_else(|| Error::Invariant(format!("trajectory {} has no curve", tr.id)))?;
        for p in &tr.points {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                tr.id,
                p.frame,
                f6(p.point.x),
                f6(p.point.y),
                p.source.as_str(),
                // full precision keeps the curve consistent with its points
                fmt_coef(q.a1),
                fmt_coef(q.a2),
                fmt_coef(q.a3),
                tr.state.as_str()
            );
        }
    }
    Ok(s)
}

fn fmt_coef(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v:e}")
    }
}

pub fn parse_trajectories(path: &Path, text: &str) -> Result<(Vec<Trajectory>, usize)> {
    let t = Table::parse(path, text, "trajectories", TRAJECTORY_COLUMNS)?;
    let commit_count: usize = t
        .meta("commit_count")?
        .ok_or_else(|| t.err(1, "header is missing commit_count"))?;
    struct Acc {
        id: u64,
        line: usize,
        points: Vec<TrackPoint>,
        curve: Quadratic,
        state: TrackState,
    }
    let mut groups: Vec<Acc> = Vec::new();
    for (line, f) in &t.rows {
        let line = *line;
        let id: u64 = t.int(line, f[0], "traj_id")?;
        let frame: usize = t.int(line, f[1], "frame")?;
        let point = Point::new(t.real(line, f[2], "x")?, t.real(line, f[3], "y")?);
        let source = PointSource::parse(f[4])
            .ok_or_else(|| t.err(line, format!("unknown source `{}`", f[4])))?;
        let curve = Quadratic::new(
            t.real(line, f[5], "a1")?,
            t.real(line, f[6], "a2")?,
            t.real(line, f[7], "a3")?,
        );
        let state = TrackState::parse(f[8])
            .ok_or_else(|| t.err(line, format!("unknown state `{}`", f[8])))?;
        let tp = TrackPoint {
            frame,
            point,
            source,
        };
        match groups.last_mut() {
            Some(g) if g.id == id => {
                if frame <= g.points.last().map_or(0, |p| p.frame) {
                    return Err(t.err(line, format!("trajectory {id}: frames must increase")));
                }
                if curve != g.curve || state != g.state {
                    return Err(t.err(
                        line,
                        format!("trajectory {id}: curve or state differs between rows"),
                    ));
                }
                g.points.push(tp);
            }
            _ => {
                if groups.iter().any(|g| g.id == id) {
                    return Err(t.err(line, format!("trajectory {id} rows are not contiguous")));
                }
                groups.push(Acc {
                    id,
                    line,
                    points: vec![tp],
                    curve,
                    state,
                });
            }
        }
    }
    let trajs = groups
        .into_iter()
        .map(|g| {
            Trajectory::from_points(g.id, g.points, Some(g.curve), g.state, Some(commit_count))
                .map_err(|e| t.err(g.line, e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((trajs, commit_count))
}

pub fn read_trajectories(path: &Path) -> Result<(Vec<Trajectory>, usize)> {
    parse_trajectories(path, &read_text(path)?)
}

pub fn format_report(report: &EvalReport) -> String {
    let mut s = header(
        "eval_report",
        &[
            ("best_nf", report.best_nf.to_string()),
            ("detected_fraction", f6(report.detected_fraction)),
            ("precision_trajectory", f6(report.precision_trajectory)),
        ],
        REPORT_COLUMNS,
    );
    for r in &report.rows {
        let t = &r.stats;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.nf,
            t.n,
            f6(t.mean),
            f6(t.std_dev),
            f6(t.std_error),
            f6(t.ci_low),
            f6(t.ci_high),
            f6(r.detected_fraction),
            f6(r.precision_trajectory)
        );
    }
    s
}

pub fn parse_report(path: &Path, text: &str) -> Result<EvalReport> {
    let t = Table::parse(path, text, "eval_report", REPORT_COLUMNS)?;
    let need = |k: &str| -> Result<String> {
        t.meta
            .get(k)
            .cloned()
            .ok_or_else(|| t.err(1, format!("header is missing {k}")))
    };
    let best_nf: usize = need("best_nf")?
        .parse()
        .map_err(|_| t.err(1, "bad best_nf"))?;
    let detected_fraction = t.real(1, &need("detected_fraction")?, "detected_fraction")?;
    let precision_trajectory = t.real(1, &need("precision_trajectory")?, "precision_trajectory")?;
    let rows = t
        .rows
        .iter()
        .map(|(line, f)| {
            let line = *line;
            let r = |i: usize| t.real(line, f[i], REPORT_COLUMNS[i]);
            Ok(NfRow {
                nf: t.int(line, f[0], "nf")?,
                stats: TStats {
                    n: t.int(line, f[1], "n")?,
                    mean: r(2)?,
                    std_dev: r(3)?,
                    std_error: r(4)?,
                    ci_low: r(5)?,
                    ci_high: r(6)?,
                },
                detected_fraction: r(7)?,
                precision_trajectory: r(8)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalReport {
        rows,
        best_nf,
        detected_fraction,
        precision_trajectory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::{generate, ScenarioConfig, ShakeConfig};
    use crate::tracker::{track_sequence, TrackerConfig};

    fn p() -> &'static Path {
        Path::new("mem.txt")
    }

    fn round6(v: f64) -> f64 {
        f6(v).parse().unwrap()
    }

    fn scenario() -> crate::simulator::Scenario {
        generate(&ScenarioConfig {
            noise_sigma: 1.5,
            clutter_rate: 2.0,
            dropout_prob: 0.1,
            shake: Some(ShakeConfig::default()),
            seed: 9,
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn negative_zero_is_normalized() {
        assert_eq!(f6(-0.0), "0.000000");
        assert_eq!(f6(-1e-9), "0.000000");
        assert_eq!(f6(-0.5), "-0.500000");
        assert_eq!(f6(1.25), "1.250000");
    }

    #[test]
    fn detections_round_trip_at_six_decimals() {
        let s = scenario();
        let text = format_detections(&s.frames);
        let back = parse_detections(p(), &text).unwrap();
        assert_eq!(back.frames.len(), s.frames.len());
        for (a, b) in s.frames.iter().zip(&back.frames) {
            assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(b) {
                assert_eq!(y.bbox.cx(), round6(x.bbox.cx()));
                assert_eq!(y.bbox.h(), round6(x.bbox.h()));
                assert_eq!(y.frame, x.frame);
            }
        }
        assert_eq!(format_detections(&back.frames), text);
    }

    #[test]
    fn ripple_and_transforms_round_trip() {
        let s = scenario();
        let text = format_ripple(&s.ripple);
        let back = parse_ripple(p(), &text).unwrap();
        assert_eq!(back.len(), s.ripple.len());
        assert_eq!(format_ripple(&back), text);

        let tr = s.transforms.unwrap();
        let text = format_transforms(&tr);
        let back = parse_transforms(p(), &text).unwrap();
        for (a, b) in tr.iter().zip(&back) {
            assert_eq!(b.dx, round6(a.dx));
            assert_eq!(b.dy, round6(a.dy));
        }
        assert_eq!(format_transforms(&back), text);
    }

    #[test]
    fn ground_truth_round_trip() {
        let s = scenario();
        let text = format_ground_truth(&s.ground_truth);
        let back = parse_ground_truth(p(), &text).unwrap();
        assert_eq!(back.len(), s.ground_truth.len());
        for (a, b) in s.ground_truth.iter().zip(&back) {
            assert_eq!(
                (a.id, a.start_frame, a.points.len()),
                (b.id, b.start_frame, b.points.len())
            );
        }
        assert_eq!(format_ground_truth(&back), text);
    }

    #[test]
    fn trajectories_round_trip() {
        let s = generate(&ScenarioConfig {
            noise_sigma: 1.0,
            seed: 3,
            ..Default::default()
        })
        .unwrap();
        let trajs = track_sequence(&s.frames, &s.ripple, &TrackerConfig::default()).unwrap();
        assert!(!trajs.is_empty());
        let text = format_trajectories(&trajs, 6).unwrap();
        let (back, n) = parse_trajectories(p(), &text).unwrap();
        assert_eq!(n, 6);
        assert_eq!(back.len(), trajs.len());
        for (a, b) in trajs.iter().zip(&back) {
            assert_eq!(a.id, b.id);
            assert_eq!(a.state, b.state);
            assert_eq!(a.curve, b.curve);
            assert_eq!(a.commit_frame, b.commit_frame);
            assert_eq!(a.points.len(), b.points.len());
        }
        assert_eq!(format_trajectories(&back, 6).unwrap(), text);
    }

    #[test]
    fn raw_round_trip() {
        let recs = vec![RawRecord {
            frame: 4,
            prediction: RawPrediction {
                px: 0.5,
                py: -1.25,
                pw: 0.1,
                ph: -0.2,
                cell_x: 32.0,
                cell_y: 64.0,
                confidence: 0.8,
            },
            class: ObjectClass::Nutriment,
        }];
        let text = format_raw(&recs);
        assert_eq!(parse_raw(p(), &text).unwrap(), recs);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "#detections v1 columns=frame,cx,cy,w,h,class\n0,1,2,3,4,nutriment\n1,1,x,3,4,nutriment\n";
        match parse_detections(p(), text) {
            Err(Error::Parse { line, msg, .. }) => {
                assert_eq!(line, 3);
                assert!(msg.contains("cy"), "{msg}");
            }
            other => panic!("{other:?}"),
        }
        let text = "#detections v1 columns=frame,cx,cy,w,h,class\n0,1,2,3\n";
        assert!(matches!(
            parse_detections(p(), text),
            Err(Error::Parse { line: 2, .. })
        ));
        let text = "#detections v1 columns=frame,cx,cy,w,h,class\n0,1,2,-3,4,nutriment\n";
        assert!(matches!(
            parse_detections(p(), text),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_detections(p(), "#ripple v1 columns=frame,cx,cy,w,h,class\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_detections(p(), "#detections v2 columns=frame,cx,cy,w,h,class\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_detections(p(), ""),
            Err(Error::Parse { line: 1, .. })
        ));
        let text = "#ripple v1 columns=frame,cx,cy,w,h,class\n0,1,2,3,4,ripple\n";
        assert!(matches!(
            parse_ripple(p(), text),
            Err(Error::Parse { line: 2, .. })
        ));
        let text = "#transforms v1 columns=frame,dx,dy,da\n1,0,0,0\n";
        assert!(matches!(
            parse_transforms(p(), text),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn missing_file_is_io_error() {
        let e = read_detections(Path::new("/nonexistent/dets.txt")).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }
}
