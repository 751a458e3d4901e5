//! Turns raw detector outputs into boxes, filtering weak predictions and
//! picking the two ripple regions per frame.

use trajmap::decode::{decode_box, sigmoid, ObjectClass, RawPrediction};
use trajmap::io::RawRecord;
use trajmap::pipeline::decode_records;

fn main() -> trajmap::Result<()> {
    let raw = |frame, class, cell_x, cell_y, confidence| RawRecord {
        frame,
        prediction: RawPrediction {
            px: 0.2,
            py: -0.4,
            pw: 0.1,
            ph: 1.2,
            cell_x,
            cell_y,
            confidence,
        },
        class,
    };
    let p = raw(0, ObjectClass::Nutriment, 1800.0, 420.0, 0.9).prediction;
    let b = decode_box(&p, 10.0, 8.0)?;
    println!("sigmoid(0.2) = {:.4}", sigmoid(0.2));
    println!(
        "pellet box: center ({:.3}, {:.3}), size {:.2} x {:.2}",
        b.cx(),
        b.cy(),
        b.w(),
        b.h()
    );

    let records = vec![
        raw(0, ObjectClass::Nutriment, 1800.0, 420.0, 0.9),
        raw(0, ObjectClass::Nutriment, 1500.0, 600.0, 0.1),
        raw(0, ObjectClass::Ripple, 800.0, 1000.0, 0.8),
        raw(0, ObjectClass::Ripple, 1400.0, 1000.0, 0.7),
        raw(0, ObjectClass::Ripple, 300.0, 1000.0, 0.3),
        raw(1, ObjectClass::Nutriment, 1760.0, 430.0, 0.8),
    ];
    let boxes = decode_records(&records, 10.0, 8.0, 0.25)?;
    for (f, dets) in boxes.frames.iter().enumerate() {
        println!("frame {f}: {} pellet box(es)", dets.len());
    }
    for r in &boxes.ripple {
        println!(
            "frame {}: ripple at x {:.1} and {:.1}",
            r.frame,
            r.left.cx(),
            r.right.cx()
        );
    }
    Ok(())
}
