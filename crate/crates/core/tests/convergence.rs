//! Observed orders of accuracy under grid refinement.

use std::f64::consts::PI;
use std::sync::Arc;

use aniflow::geometry::{gauss_curvature, SupportFn};
use aniflow::grid::{deriv1_with, deriv2_with, integrate, SphericalGrid, Stencil};

fn max_err(a: &[f64], b: impl Fn(usize) -> f64) -> f64 {
    a.iter().enumerate().map(|(i, v)| (v - b(i)).abs()).fold(0.0, f64::max)
}

/// `log₂` of successive error ratios for grids of `sizes` nodes.
fn orders(sizes: &[usize], err: impl Fn(usize) -> f64) -> Vec<f64> {
    let e: Vec<f64> = sizes.iter().map(|&n| err(n)).collect();
    e.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[test]
fn periodic_stencils_reach_their_order() {
    let g = |t: f64| (3.0 * t).sin() + 0.5 * (2.0 * t).cos();
    let g1 = |t: f64| 3.0 * (3.0 * t).cos() - (2.0 * t).sin();
    let g2 = |t: f64| -9.0 * (3.0 * t).sin() - 2.0 * (2.0 * t).cos();
    for (stencil, expected) in [(Stencil::Second, 2.0), (Stencil::Fourth, 4.0)] {
        let d1 = orders(&[32, 64, 128], |n| {
            let grid = SphericalGrid::circle(n).unwrap();
            let v: Vec<f64> = grid.nodes().iter().map(|&t| g(t)).collect();
            max_err(&deriv1_with(&v, &grid, stencil), |i| g1(grid.nodes()[i]))
        });
        let d2 = orders(&[32, 64, 128], |n| {
            let grid = SphericalGrid::circle(n).unwrap();
            let v: Vec<f64> = grid.nodes().iter().map(|&t| g(t)).collect();
            max_err(&deriv2_with(&v, &grid, stencil), |i| g2(grid.nodes()[i]))
        });
        for p in d1.iter().chain(&d2) {
            assert!((p - expected).abs() < 0.15, "{stencil:?}: order {p}");
        }
    }
}

#[test]
fn pole_reflection_keeps_fourth_order() {
    // cos 2θ is even across both poles
    let d2 = orders(&[33, 65, 129], |n| {
        let grid = SphericalGrid::axisymmetric_sphere(n).unwrap();
        let v: Vec<f64> = grid.nodes().iter().map(|t| (2.0 * t).cos()).collect();
        max_err(&deriv2_with(&v, &grid, Stencil::Fourth), |i| -4.0 * (2.0 * grid.nodes()[i]).cos())
    });
    for p in d2 {
        assert!(p > 3.8, "order {p}");
    }
}

#[test]
fn sphere_quadrature_converges() {
    let errs: Vec<f64> = [33, 65, 129]
        .iter()
        .map(|&n| {
            let grid = SphericalGrid::axisymmetric_sphere(n).unwrap();
            let v: Vec<f64> = grid.nodes().iter().map(|t| t.cos().powi(2)).collect();
            (integrate(&v, &grid) - 4.0 * PI / 3.0).abs()
        })
        .collect();
    assert!(errs[2] < 1e-3);
    assert!(errs[1] / errs[2] > 3.5, "{errs:?}");
}

#[test]
fn ellipse_curvature_converges_at_fourth_order() {
    let (a, b) = (2.0_f64, 1.0_f64);
    let p = orders(&[64, 128, 256], |n| {
        let u = SupportFn::ellipse(Arc::new(SphericalGrid::circle(n).unwrap()), a, b).unwrap();
        let k = gauss_curvature(&u).unwrap();
        // u'' + u = a²b²/u³ for the ellipse
        max_err(&k, |i| u.values()[i].powi(3) / (a * a * b * b))
    });
    for order in p {
        assert!(order > 3.5, "order {order}");
    }
}

#[test]
fn spheroid_curvature_converges() {
    let (a, c) = (1.3_f64, 1.0_f64);
    let p = orders(&[65, 129, 257], |n| {
        let u = SupportFn::ellipse(Arc::new(SphericalGrid::axisymmetric_sphere(n).unwrap()), a, c).unwrap();
        let k = gauss_curvature(&u).unwrap();
        // K = h⁴/(a²b²c²) for an ellipsoid with semi-axes a, b, c
        max_err(&k, |i| u.values()[i].powi(4) / (a.powi(4) * c * c))
    });
    for order in p {
        assert!(order > 3.5, "order {order}");
    }
}
