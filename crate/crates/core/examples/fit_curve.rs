//! Fits a quadratic through noisy samples of a pellet arc and reports the
//! tangent direction at a few points.

use trajmap::polyfit::{fit_poly, fit_up_to, sse, tangent_angle};
use trajmap::rng::SplitMix64;
use trajmap::Point;

fn main() -> trajmap::Result<()> {
    let mut rng = SplitMix64::new(3);
    let truth = |x: f64| 4e-4 * x * x - 1.1 * x + 1150.0;
    let points: Vec<Point> = (0..12)
        .map(|k| {
            let x = 1850.0 - 60.0 * k as f64;
            Point::new(x, truth(x) + 2.0 * rng.normal())
        })
        .collect();

    let q = fit_poly(&points, 2)?;
    println!("y = {:.6e} x^2 + {:.6} x + {:.3}", q.a3, q.a2, q.a1);
    println!("residual sum of squares {:.3}", sse(&q, &points));
    for x in [1800.0, 1400.0, 1000.0] {
        println!(
            "x {x:6.0}: y {:8.2}, tangent {:6.2} deg",
            q.eval(x),
            tangent_angle(&q, x)
        );
    }

    // two samples only support a line
    let line = fit_up_to(&points[..2], 2)?;
    println!("line through the first two samples: slope {:.4}", line.a2);
    Ok(())
}
