//! Decoding of raw grid-cell box predictions into absolute boxes.
//!
//! The center offsets pass through a logistic sigmoid and are added to the
//! cell's top-left corner; the size terms are log-scales of a reference
//! size (an anchor or the image, at the caller's choice).

use crate::error::{Error, Result};
use crate::geometry::BBox;

/// Default minimum confidence kept at ingestion.
pub const DEFAULT_MIN_CONFIDENCE: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectClass {
    Nutriment,
    Ripple,
}

impl ObjectClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            ObjectClass::Nutriment => "nutriment",
            ObjectClass::Ripple => "ripple",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "nutriment" => Some(ObjectClass::Nutriment),
            "ripple" => Some(ObjectClass::Ripple),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawPrediction {
    pub px: f64,
    pub py: f64,
    pub pw: f64,
    pub ph: f64,
    pub cell_x: f64,
    pub cell_y: f64,
    pub confidence: f64,
}

pub fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

pub fn decode_box(r: &RawPrediction, ref_w: f64, ref_h: f64) -> Result<BBox> {
    if !(ref_w > 0.0 && ref_h > 0.0) {
        return Err(Error::NonPositiveReference { w: ref_w, h: ref_h });
    }
    BBox::new(
        sigmoid(r.px) + r.cell_x,
        sigmoid(r.py) + r.cell_y,
        r.pw.exp() * ref_w,
        r.ph.exp() * ref_h,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn raw(px: f64, py: f64, pw: f64, ph: f64) -> RawPrediction {
        RawPrediction {
            px,
            py,
            pw,
            ph,
            cell_x: 100.0,
            cell_y: 200.0,
            confidence: 0.9,
        }
    }

    #[test]
    fn zero_logits_give_cell_center_offset() {
        let b = decode_box(&raw(0.0, 0.0, 0.0, 0.0), 13.0, 36.0).unwrap();
        assert_eq!((b.cx(), b.cy(), b.w(), b.h()), (100.5, 200.5, 13.0, 36.0));
    }

    #[test]
    fn log_scale_doubles() {
        let b = decode_box(&raw(0.0, 0.0, 2f64.ln(), 0.0), 10.0, 10.0).unwrap();
        assert!((b.w() - 20.0).abs() < 1e-12);
    }

    #[test]
    fn logistic_offset() {
        let b = decode_box(&raw(2.0, 0.0, 0.0, 0.0), 10.0, 10.0).unwrap();
        let expected = 1.0 / (1.0 + (-2.0f64).exp());
        assert!((b.cx() - 100.0 - expected).abs() < 1e-12);
        assert!((b.cx() - 100.8808).abs() < 1e-4);
    }

    #[test]
    fn rejects_bad_reference() {
        assert!(matches!(
            decode_box(&raw(0.0, 0.0, 0.0, 0.0), 0.0, 5.0),
            Err(Error::NonPositiveReference { .. })
        ));
        assert!(decode_box(&raw(0.0, 0.0, 0.0, 0.0), 5.0, -1.0).is_err());
    }

    #[test]
    fn class_names() {
        for c in [ObjectClass::Nutriment, ObjectClass::Ripple] {
            assert_eq!(ObjectClass::parse(c.as_str()), Some(c));
        }
        assert_eq!(ObjectClass::parse("fish"), None);
    }

    proptest! {
        #[test]
        fn center_stays_in_cell(px in -30.0..30.0f64, py in -30.0..30.0f64) {
            let b = decode_box(&raw(px, py, 0.0, 0.0), 10.0, 10.0).unwrap();
            prop_assert!(b.cx() > 100.0 && b.cx() < 101.0);
            prop_assert!(b.cy() > 200.0 && b.cy() < 201.0);
        }

        #[test]
        fn monotone_in_each_field(v in -5.0..5.0f64, d in 0.01..2.0f64) {
            let lo = decode_box(&raw(v, v, v, v), 10.0, 10.0).unwrap();
            let hi_x = decode_box(&raw(v + d, v, v, v), 10.0, 10.0).unwrap();
            let hi_y = decode_box(&raw(v, v + d, v, v), 10.0, 10.0).unwrap();
            let hi_w = decode_box(&raw(v, v, v + d, v), 10.0, 10.0).unwrap();
            let hi_h = decode_box(&raw(v, v, v, v + d), 10.0, 10.0).unwrap();
            prop_assert!(hi_x.cx() > lo.cx());
            prop_assert!(hi_y.cy() > lo.cy());
            prop_assert!(hi_w.w() > lo.w());
            prop_assert!(hi_h.h() > lo.h());
        }
    }
}
