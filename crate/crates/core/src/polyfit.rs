//! Least-squares polynomial fits of degree 1 or 2 through image points.
//!
//! The normal equations `(VᵀV) a = Vᵀy` of the Vandermonde system are formed
//! on x values centered at their mean and solved by explicit inversion of the
//! (at most 3x3) normal matrix. Centering keeps the system well conditioned
//! at pixel-scale abscissae; coefficients are mapped back to raw x on return.

use crate::error::{Error, Result};
use crate::geometry::Point;

/// `y(x) = a3·x² + a2·x + a1`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quadratic {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl Quadratic {
    pub fn new(a1: f64, a2: f64, a3: f64) -> Self {
        Quadratic { a1, a2, a3 }
    }

    pub fn eval(&self, x: f64) -> f64 {
        eval_poly(self, x)
    }

    pub fn slope(&self, x: f64) -> f64 {
        2.0 * self.a3 * x + self.a2
    }

    pub fn is_finite(&self) -> bool {
        self.a1.is_finite() && self.a2.is_finite() && self.a3.is_finite()
    }

    /// Real solutions of `y(x) = level`, ascending.
    pub fn solve_for(&self, level: f64) -> Vec<f64> {
        let (a, b, c) = (self.a3, self.a2, self.a1 - level);
        if a.abs() < 1e-15 {
            if b.abs() < 1e-15 {
                return Vec::new();
            }
            return vec![-c / b];
        }
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return Vec::new();
        }
        // numerically stable form
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        let mut roots = if q == 0.0 {
            vec![0.0]
        } else {
            vec![q / a, c / q]
        };
        roots.sort_by(f64::total_cmp);
        roots.dedup();
        roots
    }
}

pub fn eval_poly(q: &Quadratic, x: f64) -> f64 {
    (q.a3 * x + q.a2) * x + q.a1
}

/// Inclination of the curve at `x`, in degrees within (-90, 90).
pub fn tangent_angle(q: &Quadratic, x: f64) -> f64 {
    q.slope(x).atan().to_degrees()
}

/// Sum of squared vertical residuals of `q` over `points`.
pub fn sse(q: &Quadratic, points: &[Point]) -> f64 {
    points
        .iter()
        .map(|p| {
            let r = p.y - q.eval(p.x);
            r * r
        })
        .sum()
}

/// Least-squares fit of degree 1 or 2.
///
/// Requires `degree + 1` points with at least `degree + 1` distinct x values.
/// A degree-1 fit returns `a3 = 0`.
pub fn fit_poly(points: &[Point], degree: usize) -> Result<Quadratic> {
    if !(1..=2).contains(&degree) {
        return Err(Error::InvalidConfig(format!(
            "polynomial degree must be 1 or 2, got {degree}"
        )));
    }
    if points.len() < degree + 1 {
        return Err(Error::InsufficientPoints {
            needed: degree + 1,
            got: points.len(),
        });
    }
    if distinct_x(points) < degree + 1 {
        return Err(Error::SingularSystem);
    }

    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.x).sum::<f64>() / n;

    // power sums of centered x, and moments of y
    let mut s = [0.0f64; 5];
    let mut t = [0.0f64; 3];
    let mut scale = 0.0f64;
    for p in points {
        let u = p.x - mean_x;
        scale = scale.max(u * u);
        let mut uk = 1.0;
        for k in 0..5 {
            s[k] += uk;
            if k < 3 {
                t[k] += uk * p.y;
            }
            uk *= u;
        }
    }

    let threshold = 1e-12 * scale.powi((degree * (degree + 1) / 2) as i32);
    let (c0, c1, c2) = if degree == 2 {
        let m = [[s[0], s[1], s[2]], [s[1], s[2], s[3]], [s[2], s[3], s[4]]];
        let inv = invert3(&m, threshold)?;
        let c: Vec<f64> = (0..3)
            .map(|i| inv[i][0] * t[0] + inv[i][1] * t[1] + inv[i][2] * t[2])
            .collect();
        (c[0], c[1], c[2])
    } else {
        let det = s[0] * s[2] - s[1] * s[1];
        if det.abs() <= threshold {
            return Err(Error::SingularSystem);
        }
        let c0 = (s[2] * t[0] - s[1] * t[1]) / det;
        let c1 = (s[0] * t[1] - s[1] * t[0]) / det;
        (c0, c1, 0.0)
    };

    // y = c0 + c1 (x - m) + c2 (x - m)^2
    let q = Quadratic {
        a1: c0 - c1 * mean_x + c2 * mean_x * mean_x,
        a2: c1 - 2.0 * c2 * mean_x,
        a3: c2,
    };
    if !q.is_finite() {
        return Err(Error::SingularSystem);
    }
    Ok(q)
}

/// Fits the highest degree (up to `max_degree`) the data supports.
///
/// Two points, or three points sharing an x value, fall back to a line.
pub fn fit_up_to(points: &[Point], max_degree: usize) -> Result<Quadratic> {
    let supported = distinct_x(points).saturating_sub(1);
    let degree = max_degree.min(supported).max(1);
    fit_poly(points, degree)
}

fn distinct_x(points: &[Point]) -> usize {
    let mut xs: Vec<f64> = points.iter().map(|p| p.x).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs.len()
}

fn invert3(m: &[[f64; 3]; 3], threshold: f64) -> Result<[[f64; 3]; 3]> {
    let cof =
        |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    let adj = [
        [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
        [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
        [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
    ];
    let det = m[0][0] * adj[0][0] + m[0][1] * adj[1][0] + m[0][2] * adj[2][0];
    if det.abs() <= threshold || !det.is_finite() {
        return Err(Error::SingularSystem);
    }
    let mut inv = [[0.0; 3]; 3];
    for (i, row) in adj.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            inv[i][j] = v / det;
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn exact_parabola() {
        let q = fit_poly(&pts(&[(0.0, 0.0), (1.0, 1.0), (2.0, 4.0)]), 2).unwrap();
        assert!(close(q.a1, 0.0, 1e-12) && close(q.a2, 0.0, 1e-12) && close(q.a3, 1.0, 1e-12));
    }

    #[test]
    fn constant_data() {
        let q = fit_poly(&pts(&[(0.0, 3.0), (1.0, 3.0), (2.0, 3.0)]), 2).unwrap();
        assert!(close(q.a1, 3.0, 1e-12) && close(q.a2, 0.0, 1e-12) && close(q.a3, 0.0, 1e-12));
    }

    #[test]
    fn line_has_zero_curvature() {
        let q = fit_poly(&pts(&[(1900.0, 500.0), (300.0, 1000.0)]), 1).unwrap();
        assert_eq!(q.a3, 0.0);
        assert!(close(q.eval(1900.0), 500.0, 1e-9));
        assert!(close(q.eval(300.0), 1000.0, 1e-9));
    }

    #[test]
    fn error_paths() {
        assert!(matches!(
            fit_poly(&pts(&[(0.0, 0.0), (1.0, 1.0)]), 2),
            Err(Error::InsufficientPoints { needed: 3, got: 2 })
        ));
        assert!(matches!(
            fit_poly(&pts(&[(1.0, 0.0), (1.0, 1.0), (2.0, 5.0)]), 2),
            Err(Error::SingularSystem)
        ));
        assert!(matches!(
            fit_poly(&pts(&[(4.0, 0.0), (4.0, 1.0)]), 1),
            Err(Error::SingularSystem)
        ));
        assert!(fit_poly(&pts(&[(0.0, 0.0), (1.0, 1.0)]), 3).is_err());
    }

    #[test]
    fn fallback_to_line_for_two_points() {
        let q = fit_up_to(&pts(&[(0.0, 1.0), (2.0, 5.0)]), 2).unwrap();
        assert_eq!(q.a3, 0.0);
        assert!(close(q.a2, 2.0, 1e-12) && close(q.a1, 1.0, 1e-12));
    }

    #[test]
    fn evaluation_and_angles() {
        assert_eq!(eval_poly(&Quadratic::new(0.0, 0.0, 1.0), 3.0), 9.0);
        assert_eq!(eval_poly(&Quadratic::new(5.0, 0.0, 0.0), 1000.0), 5.0);
        assert_eq!(eval_poly(&Quadratic::new(1.0, 2.0, 3.0), 2.0), 17.0);
        assert!(close(
            tangent_angle(&Quadratic::new(0.0, 1.0, 0.0), 123.0),
            45.0,
            1e-12
        ));
        assert_eq!(tangent_angle(&Quadratic::new(0.0, 0.0, 0.0), 7.0), 0.0);
        assert!(close(
            tangent_angle(&Quadratic::new(0.0, 0.0, 0.5), 1.0),
            45.0,
            1e-12
        ));
    }

    #[test]
    fn roots() {
        let q = Quadratic::new(-4.0, 0.0, 1.0);
        assert_eq!(q.solve_for(0.0), vec![-2.0, 2.0]);
        assert_eq!(Quadratic::new(1.0, 2.0, 0.0).solve_for(5.0), vec![2.0]);
        assert!(Quadratic::new(1.0, 0.0, 1.0).solve_for(0.0).is_empty());
    }

    fn sample_points() -> impl Strategy<Value = Vec<Point>> {
        prop::collection::vec((0.0..1920.0f64, -200.0..1200.0f64), 4..25)
            .prop_map(|v| v.into_iter().map(|(x, y)| Point::new(x, y)).collect())
    }

    proptest! {
        #[test]
        fn fit_is_locally_optimal(points in sample_points()) {
            let q = fit_poly(&points, 2).unwrap();
            let base = sse(&q, &points);
            for eps in [1e-3, -1e-3] {
                for k in 0..3 {
                    let mut p = q;
                    match k { 0 => p.a1 += eps, 1 => p.a2 += eps, _ => p.a3 += eps }
                    prop_assert!(base <= sse(&p, &points) * (1.0 + 1e-12));
                }
            }
        }

        #[test]
        fn interpolates_three_points(x0 in 0.0..600.0f64, dx1 in 1.0..600.0f64, dx2 in 1.0..600.0f64,
                                     y in prop::array::uniform3(0.0..1080.0f64)) {
            let points = pts(&[(x0, y[0]), (x0 + dx1, y[1]), (x0 + dx1 + dx2, y[2])]);
            let q = fit_poly(&points, 2).unwrap();
            for p in &points {
                prop_assert!((q.eval(p.x) - p.y).abs() < 1e-6);
            }
        }

        #[test]
        fn translation_covariance(points in sample_points(), c in -500.0..500.0f64) {
            let q = fit_poly(&points, 2).unwrap();
            let shifted: Vec<Point> = points.iter().map(|p| Point::new(p.x, p.y + c)).collect();
            let s = fit_poly(&shifted, 2).unwrap();
            prop_assert!((s.a1 - (q.a1 + c)).abs() < 1e-9 * (1.0 + q.a1.abs()));
            prop_assert!((s.a2 - q.a2).abs() < 1e-9);
            prop_assert!((s.a3 - q.a3).abs() < 1e-9);
        }
    }
}
