//! Points, boxes and per-frame observations in image coordinates.
//!
//! x grows rightward and y grows downward, so the "highest" point on screen
//! is the one with the smallest y.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        debug_assert!(
            x.is_finite() && y.is_finite(),
            "non-finite point ({x}, {y})"
        );
        Point { x, y }
    }

    pub fn try_new(x: f64, y: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() {
            Ok(Point { x, y })
        } else {
            Err(Error::InvalidGeometry(format!(
                "non-finite point ({x}, {y})"
            )))
        }
    }

    pub fn distance_sq(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn distance(&self, other: &Point) -> f64 {
        self.distance_sq(other).sqrt()
    }

    /// Componentwise mean. Returns `None` for an empty slice.
    pub fn mean(points: &[Point]) -> Option<Point> {
        if points.is_empty() {
            return None;
        }
        let n = points.len() as f64;
        let (sx, sy) = points
            .iter()
            .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
        Some(Point::new(sx / n, sy / n))
    }
}

/// Axis-aligned box stored as center and size; width and height are strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    cx: f64,
    cy: f64,
    w: f64,
    h: f64,
}

impl BBox {
    pub fn new(cx: f64, cy: f64, w: f64, h: f64) -> Result<Self> {
        if !(cx.is_finite() && cy.is_finite() && w.is_finite() && h.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "non-finite box ({cx}, {cy}, {w}, {h})"
            )));
        }
        if w <= 0.0 || h <= 0.0 {
            return Err(Error::InvalidGeometry(format!(
                "box size must be positive, got {w}x{h}"
            )));
        }
        Ok(BBox { cx, cy, w, h })
    }

    /// Rebuilds a box from its top-left and bottom-right corners.
    pub fn from_corners(top_left: Point, bottom_right: Point) -> Result<Self> {
        BBox::new(
            (top_left.x + bottom_right.x) / 2.0,
            (top_left.y + bottom_right.y) / 2.0,
            bottom_right.x - top_left.x,
            bottom_right.y - top_left.y,
        )
    }

    pub fn cx(&self) -> f64 {
        self.cx
    }

    pub fn cy(&self) -> f64 {
        self.cy
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn center(&self) -> Point {
        Point::new(self.cx, self.cy)
    }

    /// Same size, new center.
    pub fn with_center(&self, center: Point) -> BBox {
        BBox {
            cx: center.x,
            cy: center.y,
            ..*self
        }
    }

    pub fn corners(&self) -> (Point, Point) {
        box_corners(self)
    }

    pub fn contains(&self, p: &Point) -> bool {
        point_in_box(p, self)
    }
}

/// Top-left and bottom-right corners of `b`.
pub fn box_corners(b: &BBox) -> (Point, Point) {
    let hw = b.w / 2.0;
    let hh = b.h / 2.0;
    (
        Point::new(b.cx - hw, b.cy - hh),
        Point::new(b.cx + hw, b.cy + hh),
    )
}

/// Closed-interval membership test.
pub fn point_in_box(p: &Point, b: &BBox) -> bool {
    let (tl, br) = box_corners(b);
    tl.x <= p.x && p.x <= br.x && tl.y <= p.y && p.y <= br.y
}

/// One observed object in one frame. The centroid is always the box center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub frame: usize,
    pub bbox: BBox,
    pub id: Option<u64>,
}

impl Detection {
    pub fn new(frame: usize, bbox: BBox) -> Self {
        Detection {
            frame,
            bbox,
            id: None,
        }
    }

    pub fn with_id(mut self, id: u64) -> Self {
        self.id = Some(id);
        self
    }

    pub fn centroid(&self) -> Point {
        self.bbox.center()
    }
}

/// The two ripple-area boxes seen in one frame, ordered so that `left`
/// has the smaller center x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RipplePair {
    pub frame: usize,
    pub left: BBox,
    pub right: BBox,
}

impl RipplePair {
    pub fn new(frame: usize, a: BBox, b: BBox) -> Self {
        let (left, right) = if a.cx() <= b.cx() { (a, b) } else { (b, a) };
        RipplePair { frame, left, right }
    }

    pub fn boxes(&self) -> [BBox; 2] {
        [self.left, self.right]
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.left.contains(p) || self.right.contains(p)
    }

    /// Whether both boxes lie inside a `frame_w` x `frame_h` image.
    pub fn within_frame(&self, frame_w: f64, frame_h: f64) -> bool {
        self.boxes().iter().all(|b| {
            let (tl, br) = b.corners();
            tl.x >= 0.0 && tl.y >= 0.0 && br.x <= frame_w && br.y <= frame_h
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bx(cx: f64, cy: f64, w: f64, h: f64) -> BBox {
        BBox::new(cx, cy, w, h).unwrap()
    }

    #[test]
    fn corners_of_reference_boxes() {
        let (tl, br) = box_corners(&bx(100.0, 100.0, 20.0, 10.0));
        assert_eq!((tl.x, tl.y, br.x, br.y), (90.0, 95.0, 110.0, 105.0));

        let (tl, br) = box_corners(&bx(0.0, 0.0, 2.0, 2.0));
        assert_eq!((tl.x, tl.y, br.x, br.y), (-1.0, -1.0, 1.0, 1.0));
    }

    #[test]
    fn corners_match_independent_formula() {
        let b = bx(5.5, 3.25, 1.0, 0.5);
        let (tl, br) = box_corners(&b);
        // left = cx - w/2 etc., written out directly
        let expect = [5.5 - 1.0 * 0.5, 3.25 - 0.5 * 0.5, 5.5 + 0.5, 3.25 + 0.25];
        assert_eq!([tl.x, tl.y, br.x, br.y], expect);
        assert_eq!([tl.x, tl.y, br.x, br.y], [5.0, 3.0, 6.0, 3.5]);
    }

    #[test]
    fn membership_is_closed() {
        let b = bx(100.0, 100.0, 20.0, 10.0);
        assert!(point_in_box(&Point::new(100.0, 100.0), &b));
        assert!(point_in_box(&Point::new(110.0, 105.0), &b));
        assert!(!point_in_box(&Point::new(110.01, 100.0), &b));
    }

    #[test]
    fn rejects_degenerate_boxes() {
        assert!(BBox::new(0.0, 0.0, 0.0, 1.0).is_err());
        assert!(BBox::new(0.0, 0.0, 1.0, -1.0).is_err());
        assert!(BBox::new(f64::NAN, 0.0, 1.0, 1.0).is_err());
        assert!(Point::try_new(f64::INFINITY, 0.0).is_err());
    }

    #[test]
    fn ripple_pair_orders_boxes() {
        let pair = RipplePair::new(
            3,
            bx(900.0, 950.0, 100.0, 50.0),
            bx(300.0, 950.0, 100.0, 50.0),
        );
        assert_eq!(pair.left.cx(), 300.0);
        assert_eq!(pair.right.cx(), 900.0);
        assert!(pair.within_frame(1920.0, 1080.0));
        assert!(!pair.within_frame(800.0, 1080.0));
    }

    proptest! {
        #[test]
        fn corner_round_trip(cx in -2000.0..2000.0f64, cy in -2000.0..2000.0f64,
                             w in 0.01..500.0f64, h in 0.01..500.0f64) {
            let b = bx(cx, cy, w, h);
            let (tl, br) = box_corners(&b);
            let r = BBox::from_corners(tl, br).unwrap();
            prop_assert!((r.cx() - cx).abs() < 1e-9);
            prop_assert!((r.cy() - cy).abs() < 1e-9);
            prop_assert!((r.w() - w).abs() < 1e-9);
            prop_assert!((r.h() - h).abs() < 1e-9);
        }

        #[test]
        fn membership_monotone_in_size(px in -50.0..50.0f64, py in -50.0..50.0f64,
                                       w in 1.0..60.0f64, h in 1.0..60.0f64,
                                       gw in 0.0..40.0f64, gh in 0.0..40.0f64) {
            let small = bx(0.0, 0.0, w, h);
            let big = bx(0.0, 0.0, w + gw, h + gh);
            let p = Point::new(px, py);
            if point_in_box(&p, &small) {
                prop_assert!(point_in_box(&p, &big));
            }
        }
    }
}
