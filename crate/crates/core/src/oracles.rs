//! Brute-force validators that share no code with the support-function
//! pipeline: curvature of sampled curves, the polygonal integral Gauss
//! curvature, and fine composite quadrature.

use std::f64::consts::{PI, TAU};

use thiserror::Error;

/// Number of nodes used by [`reference_quadrature`].
pub const REFERENCE_NODES: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("curve needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("curve is not strictly convex and counterclockwise at vertex {0}")]
    NotConvex(usize),
    #[error("only n = 1 and n = 2 are supported, got {0}")]
    UnsupportedDimension(usize),
}

/// Closed convex curve given by vertices in counterclockwise order.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricCurve {
    points: Vec<(f64, f64)>,
}

impl ParametricCurve {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, OracleError> {
        let m = points.len();
        if m < 3 {
            return Err(OracleError::TooFewPoints(m));
        }
        for i in 0..m {
            let (a, b, c) = (points[(i + m - 1) % m], points[i], points[(i + 1) % m]);
            let cross = (b.0 - a.0) * (c.1 - b.1) - (b.1 - a.1) * (c.0 - b.0);
            if !(cross > 0.0) {
                return Err(OracleError::NotConvex(i));
            }
        }
        Ok(Self { points })
    }

    /// `m` samples of `s ↦ γ(s)`, `s = 2πk/m`.
    pub fn sample(m: usize, gamma: impl Fn(f64) -> (f64, f64)) -> Result<Self, OracleError> {
        Self::new((0..m).map(|k| gamma(TAU * k as f64 / m as f64)).collect())
    }

    /// Regular polygon with `m` vertices at radius `rho`, first vertex at angle `phase`.
    pub fn regular_polygon(m: usize, rho: f64, phase: f64) -> Result<Self, OracleError> {
        Self::sample(m, |s| (rho * (s + phase).cos(), rho * (s + phase).sin()))
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    fn edge(&self, i: usize) -> (f64, f64) {
        let m = self.points.len();
        let (a, b) = (self.points[i], self.points[(i + 1) % m]);
        (b.0 - a.0, b.1 - a.1)
    }

    /// Exterior (turning) angle at each vertex.
    pub fn exterior_angles(&self) -> Vec<f64> {
        let m = self.points.len();
        (0..m)
            .map(|i| {
                let (e0, e1) = (self.edge((i + m - 1) % m), self.edge(i));
                let cross = e0.0 * e1.1 - e0.1 * e1.0;
                let dot = e0.0 * e1.0 + e0.1 * e1.1;
                cross.atan2(dot)
            })
            .collect()
    }

    /// Outer normal angle at each vertex, taken as the bisector of the
    /// adjacent edge normals, in `[0, 2π)`.
    pub fn vertex_normal_angles(&self) -> Vec<f64> {
        let m = self.points.len();
        let turning = self.exterior_angles();
        (0..m)
            .map(|i| {
                let e0 = self.edge((i + m - 1) % m);
                // outer normal of a counterclockwise edge is its direction minus π/2
                let n0 = e0.1.atan2(e0.0) - PI / 2.0;
                (n0 + 0.5 * turning[i]).rem_euclid(TAU)
            })
            .collect()
    }
}

/// Curvature at each vertex as turning angle over the mean adjacent edge length.
pub fn parametric_curvature_oracle(curve: &ParametricCurve) -> Vec<f64> {
    let m = curve.points.len();
    let turning = curve.exterior_angles();
    (0..m)
        .map(|i| {
            let (e0, e1) = (curve.edge((i + m - 1) % m), curve.edge(i));
            let len = 0.5 * (e0.0.hypot(e0.1) + e1.0.hypot(e1.1));
            turning[i] / len
        })
        .collect()
}

fn in_arc(angle: f64, a: f64, b: f64) -> bool {
    let width = b - a;
    if width >= TAU {
        return true;
    }
    (angle - a).rem_euclid(TAU) < width
}

/// Sum of exterior angles over vertices whose radial direction lies in the
/// arc `[a, b)` (taken modulo 2π). The polygon must enclose the origin.
pub fn polygon_integral_gauss_curvature(curve: &ParametricCurve, omega: (f64, f64)) -> f64 {
    curve
        .points
        .iter()
        .zip(curve.exterior_angles())
        .filter(|((x, y), _)| in_arc(y.atan2(*x), omega.0, omega.1))
        .map(|(_, angle)| angle)
        .sum()
}

fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0_f64, 0.0_f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `∫_{Sⁿ} g` for a function of the normal (polar) angle with
/// [`REFERENCE_NODES`] nodes: the periodic trapezoid rule on `[0, 2π)` for
/// n = 1, and `2π ∫₀^π g(θ) sin θ dθ` by the midpoint rule for n = 2.
pub fn reference_quadrature(g: impl Fn(f64) -> f64, n: usize) -> Result<f64, OracleError> {
    let m = REFERENCE_NODES;
    match n {
        1 => {
            let h = TAU / m as f64;
            Ok(h * neumaier_sum((0..m).map(|k| g(h * k as f64))))
        }
        2 => Ok(TAU * reference_interval(|t| g(t) * t.sin(), 0.0, PI)),
        other => Err(OracleError::UnsupportedDimension(other)),
    }
}

/// `∫_a^b g` by the composite midpoint rule with [`REFERENCE_NODES`] nodes.
pub fn reference_interval(g: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let m = REFERENCE_NODES;
    let h = (b - a) / m as f64;
    h * neumaier_sum((0..m).map(|k| g(a + h * (k as f64 + 0.5))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_curvature() {
        let rho = 1.7;
        let c = ParametricCurve::regular_polygon(10_000, rho, 0.0).unwrap();
        for k in parametric_curvature_oracle(&c) {
            assert!((k - 1.0 / rho).abs() < 1e-6);
        }
    }

    #[test]
    fn ellipse_curvature() {
        let (a, b) = (2.0_f64, 1.0_f64);
        let m = 10_000;
        let c = ParametricCurve::sample(m, |s| (a * s.cos(), b * s.sin())).unwrap();
        for (k, kappa) in parametric_curvature_oracle(&c).iter().enumerate() {
            let s = TAU * k as f64 / m as f64;
            let exact = a * b / (a * a * s.sin().powi(2) + b * b * s.cos().powi(2)).powf(1.5);
            assert!((kappa - exact).abs() < 1e-5, "vertex {k}: {kappa} vs {exact}");
        }
    }

    #[test]
    fn square_turning() {
        let sq = ParametricCurve::new(vec![(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)]).unwrap();
        let total: f64 = sq.exterior_angles().iter().sum();
        assert!((total - TAU).abs() < 1e-15);
        assert!((polygon_integral_gauss_curvature(&sq, (0.0, TAU)) - TAU).abs() < 1e-12);
        let quadrant = polygon_integral_gauss_curvature(&sq, (0.0, PI / 2.0));
        assert!((quadrant - PI / 2.0).abs() < 1e-15);
        // wrap-around arc containing only the vertex at −π/4
        let wrapped = polygon_integral_gauss_curvature(&sq, (-1.0, 0.5));
        assert!((wrapped - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_convex() {
        let clockwise = vec![(1.0, 1.0), (1.0, -1.0), (-1.0, -1.0), (-1.0, 1.0)];
        assert!(matches!(ParametricCurve::new(clockwise), Err(OracleError::NotConvex(_))));
        let dented = vec![(1.0, 0.0), (0.0, 1.0), (0.0, 0.2), (-1.0, 0.0), (0.0, -1.0)];
        assert!(ParametricCurve::new(dented).is_err());
        assert!(ParametricCurve::new(vec![(0.0, 0.0), (1.0, 0.0)]).is_err());
    }

    #[test]
    fn normal_angles_of_square() {
        let sq = ParametricCurve::new(vec![(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)]).unwrap();
        let n = sq.vertex_normal_angles();
        for (i, angle) in n.iter().enumerate() {
            let expected = PI / 4.0 + PI / 2.0 * i as f64;
            assert!((angle - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn reference_values() {
        assert!((reference_quadrature(|_| 1.0, 1).unwrap() - TAU).abs() < 1e-12);
        assert!((reference_interval(f64::sin, 0.0, PI) - 2.0).abs() < 1e-12);
        assert!((reference_quadrature(|_| 1.0, 2).unwrap() - 4.0 * PI).abs() < 1e-10);
        assert!(reference_quadrature(|_| 1.0, 3).is_err());
    }
}
