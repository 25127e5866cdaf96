use std::f64::consts::TAU;
use std::sync::Arc;

use proptest::prelude::*;

use aniflow::flow::{self, barrier_envelope, rhs, FlowConfig, FlowMode, FlowState};
use aniflow::geometry::{self, gauss_curvature, BodySnapshot, SupportFn};
use aniflow::grid::{integrate, SphericalGrid};
use aniflow::measures::{self, AnisotropyF};
use aniflow::scenario::parse_config;
use aniflow::subsolution::Profile;

fn circle(n: usize) -> Arc<SphericalGrid> {
    Arc::new(SphericalGrid::circle(n).unwrap())
}

/// Small Fourier perturbations of a circle of radius `c0`, convex since
/// `Σ (k²−1)(|a_k| + |b_k|) < c0`.
fn body() -> impl Strategy<Value = (f64, Vec<(f64, f64)>)> {
    (
        0.5..2.0f64,
        prop::collection::vec((-0.02..0.02f64, -0.02..0.02f64), 4),
    )
        .prop_map(|(c0, mut coeffs)| {
            coeffs[0] = (0.0, 0.0);
            (c0, coeffs.into_iter().map(|(a, b)| (a * c0, b * c0)).collect())
        })
}

fn support((c0, coeffs): &(f64, Vec<(f64, f64)>), n: usize) -> SupportFn {
    SupportFn::fourier(circle(n), *c0, coeffs).unwrap()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn curvature_scales_inversely_with_dilation(b in body(), lambda in 0.25..4.0f64) {
        let u = support(&b, 256);
        let k = gauss_curvature(&u).unwrap();
        let ks = gauss_curvature(&u.scaled(lambda)).unwrap();
        for (a, s) in k.iter().zip(&ks) {
            // equal up to roundoff in the second differences
            prop_assert!((a / lambda - s).abs() <= 1e-9 * s.abs());
        }
    }

    #[test]
    fn curvature_is_translation_invariant(b in body(), c in -0.3..0.3f64, d in -0.3..0.3f64) {
        // translating by (c, d) adds c cos θ + d sin θ, which lies in the kernel of u'' + u
        let u = support(&b, 256);
        let moved = SupportFn::new(
            Arc::clone(u.shared_grid()),
            u.grid().nodes().iter().zip(u.values()).map(|(t, v)| v + c * t.cos() + d * t.sin()).collect(),
        );
        prop_assume!(moved.is_ok());
        let k0 = gauss_curvature(&u).unwrap();
        let k1 = gauss_curvature(&moved.unwrap()).unwrap();
        prop_assert!(max_diff(&k0, &k1) < 1e-8);
    }

    #[test]
    fn gauss_map_mass_is_total_angle(b in body()) {
        let body = BodySnapshot::from_support(support(&b, 512)).unwrap();
        let mass = integrate(&body.frame().jacobian, body.grid());
        prop_assert!((mass - TAU).abs() < 1e-6, "mass {}", mass);
    }

    #[test]
    fn polar_dual_is_an_involution(b in body()) {
        let body = BodySnapshot::from_support(support(&b, 512)).unwrap();
        let double = geometry::polar_dual(&geometry::polar_dual(&body).unwrap()).unwrap();
        prop_assert!(max_diff(double.support().values(), body.support().values()) < 2e-3);
    }

    #[test]
    fn critical_functional_is_dilation_invariant(b in body(), lambda in 0.5..2.0f64) {
        // with ∫f = |S¹| and α = n+1 the two log terms cancel under dilation, up
        // to the quadrature error of ∫dξ in normal coordinates
        let f = AnisotropyF::cosine(1.0, vec![0.0, 0.2], vec![]);
        let body = BodySnapshot::from_support(support(&b, 256)).unwrap();
        let scaled = BodySnapshot::from_support(body.support().scaled(lambda)).unwrap();
        let j0 = measures::functional_j(&body, &f, 2.0).unwrap();
        let j1 = measures::functional_j(&scaled, &f, 2.0).unwrap();
        prop_assert!((j0 - j1).abs() < 1e-6 * lambda.ln().abs() + 1e-12, "{} vs {}", j0, j1);
    }

    #[test]
    fn support_radial_round_trip(b in body()) {
        let body = BodySnapshot::from_support(support(&b, 512)).unwrap();
        let back = geometry::support_from_radial(body.radial()).unwrap();
        prop_assert!(max_diff(back.values(), body.support().values()) < 1e-3);
    }

    #[test]
    fn normalized_step_preserves_origin_symmetry(c0 in 0.8..1.2f64, a2 in -0.05..0.05f64, b2 in -0.05..0.05f64) {
        let u = SupportFn::fourier(circle(128), c0, &[(0.0, 0.0), (a2, b2)]).unwrap();
        let f = AnisotropyF::cosine(1.0, vec![0.0, 0.3], vec![]);
        let config = FlowConfig::new(1, 0.5, f.clone());
        let mut state = FlowState::new(u, &f).unwrap();
        for _ in 0..20 {
            flow::step(&mut state, &config).unwrap();
        }
        prop_assert!(flow::symmetry_defect(&state.u) < 1e-12);
    }

    #[test]
    fn step_keeps_bodies_convex(b in body(), alpha in 0.0..5.0f64) {
        let u = support(&b, 128);
        let config = FlowConfig::new(1, alpha, AnisotropyF::constant(1.0));
        let mut state = FlowState::new(u, &config.f).unwrap();
        for _ in 0..20 {
            flow::step(&mut state, &config).unwrap();
            prop_assert!(state.dt_last > 0.0);
        }
        prop_assert!(BodySnapshot::from_support(state.u.clone()).is_ok());
    }

    #[test]
    fn barriers_bracket_one(a in 0.2..1.0f64, b in 1.0..3.0f64, q in -3.0..-0.1f64, t in 0.0..20.0f64) {
        let (u1, u2) = barrier_envelope(a, b, q, t).unwrap();
        prop_assert!(a - 1e-15 <= u1 && u1 <= 1.0 + 1e-15);
        prop_assert!(1.0 - 1e-15 <= u2 && u2 <= b + 1e-15);
    }

    #[test]
    fn subsolution_branches_glue(theta in 1.05..4.0f64, t in -0.95..-0.01f64) {
        let p = Profile::new(theta, 1.0, 1).unwrap();
        prop_assert!(p.c1_defect(t) < 1e-12);
    }

    #[test]
    fn parser_never_panics(text in "[\\[\\]a-z_=# .0-9\\n-]{0,200}") {
        let _ = parse_config(&text);
    }
}

#[test]
fn round_sphere_is_stationary_at_the_critical_exponent() {
    for n in [1usize, 2] {
        let grid = Arc::new(SphericalGrid::new(n, 129).unwrap());
        let u = SupportFn::sphere(grid, 1.0).unwrap();
        let v = rhs(&u, &AnisotropyF::constant(1.0), (n + 1) as f64, FlowMode::Normalized).unwrap();
        assert!(v.iter().all(|x| x.abs() < 1e-12), "n = {n}");
    }
}
