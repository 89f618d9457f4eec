use std::sync::Arc;

use approx::assert_relative_eq;
use proptest::prelude::*;
use torsion_flow::flow::{flow_rhs, DensityField};
use torsion_flow::interior::MfsConfig;
use torsion_flow::lab::t_tilde;
use torsion_flow::sphere::{
    boundary_embedding, curvature_data, elementary_symmetric, DerivativeScheme, FieldSnapshot, SphereGrid, SupportField,
};
use torsion_flow::Vec3;

/// Planar body `1 + Σ_{m=2}^{4} (a_m cos mθ + b_m sin mθ)` with
/// `|a_m|, |b_m| ≤ 0.1/(m² − 1)`, so `h″ + h ≥ 0.4`.
fn planar_body() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    let coeff = |m: f64| -0.1 / (m * m - 1.0)..0.1 / (m * m - 1.0);
    (
        (coeff(2.0), coeff(3.0), coeff(4.0)).prop_map(|(a, b, c)| vec![0.0, a, b, c]),
        (coeff(2.0), coeff(3.0), coeff(4.0)).prop_map(|(a, b, c)| vec![0.0, a, b, c]),
    )
}

fn planar(grid: &Arc<SphereGrid>, (cos, sin): &(Vec<f64>, Vec<f64>)) -> SupportField {
    SupportField::fourier(grid.clone(), 1.0, cos, sin).unwrap()
}

/// Spheroid with semi-axes `(a, a, c)`.
fn spheroid(grid: &Arc<SphereGrid>, a: f64, c: f64) -> SupportField {
    SupportField::from_fn(grid.clone(), |t| (a * a * t.sin().powi(2) + c * c * t.cos().powi(2)).sqrt()).unwrap()
}

fn brute_force_symmetric(values: &[f64], m: usize) -> f64 {
    (0u32..1 << values.len())
        .filter(|mask| mask.count_ones() as usize == m)
        .map(|mask| (0..values.len()).filter(|i| mask & (1 << i) != 0).map(|i| values[i]).product::<f64>())
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symmetric_polynomials_match_subset_enumeration(values in prop::collection::vec(-2.0f64..2.0, 0..7), m in 0usize..8) {
        let fast = elementary_symmetric(&values, m);
        let slow = brute_force_symmetric(&values, m);
        prop_assert!((fast - slow).abs() <= 1e-12 * (1.0 + slow.abs()), "{fast} vs {slow}");
    }

    #[test]
    fn cofactor_trace_is_order_times_sigma(a in 0.6f64..1.6, c in 0.6f64..1.6, shift in -0.3f64..0.3, k in 1usize..3) {
        let grid = SphereGrid::axisymmetric(48).unwrap();
        let body = spheroid(&grid, a, c).translated(Vec3::new(0.0, 0.0, shift)).unwrap();
        let curv = curvature_data(&body, k).unwrap();
        for i in 0..curv.len() {
            let expected = (3 - k) as f64 * curv.sigma()[i];
            prop_assert!((curv.cofactor_trace(i) - expected).abs() <= 1e-13 * expected.abs().max(1.0));
        }
    }

    #[test]
    fn curvature_radii_scale_linearly(body in planar_body(), factor in 0.25f64..4.0) {
        let grid = SphereGrid::circle(64).unwrap();
        let h = planar(&grid, &body);
        let base = curvature_data(&h, 1).unwrap();
        let scaled = curvature_data(&h.scaled(factor).unwrap(), 1).unwrap();
        for i in 0..base.len() {
            assert_relative_eq!(scaled.radii(i)[0], factor * base.radii(i)[0], max_relative = 1e-13);
        }
    }

    #[test]
    fn translation_moves_embedding_and_keeps_radii(body in planar_body(), vx in -0.2f64..0.2, vy in -0.2f64..0.2) {
        let grid = SphereGrid::circle(128).unwrap();
        let h = planar(&grid, &body);
        let v = Vec3::new(vx, vy, 0.0);
        let moved = h.translated(v).unwrap();
        let (p, q) = (boundary_embedding(&h).unwrap(), boundary_embedding(&moved).unwrap());
        for (x, y) in p.iter().zip(&q) {
            prop_assert!((y - x - v).norm() < 1e-6);
        }
        let (a, b) = (curvature_data(&h, 1).unwrap(), curvature_data(&moved, 1).unwrap());
        for i in 0..a.len() {
            prop_assert!((a.radii(i)[0] - b.radii(i)[0]).abs() < 1e-7);
        }
    }

    #[test]
    fn planar_area_measure_has_no_first_moment(body in planar_body(), vx in -0.2f64..0.2) {
        let grid = SphereGrid::circle(128).unwrap();
        let h = planar(&grid, &body).translated(Vec3::new(vx, 0.0, 0.0)).unwrap();
        let curv = curvature_data(&h, 1).unwrap();
        prop_assert!(grid.first_moment(curv.sigma()).norm() < 1e-6);
    }

    #[test]
    fn spatial_area_measures_have_no_first_moment(a in 0.6f64..1.6, c in 0.6f64..1.6, shift in -0.3f64..0.3) {
        let grid = SphereGrid::axisymmetric(128).unwrap();
        let body = spheroid(&grid, a, c).translated(Vec3::new(0.0, 0.0, shift)).unwrap();
        let curv = curvature_data(&body, 1).unwrap();
        for m in [1, 2] {
            let sigma = curv.sigma_of_order(m);
            let total = grid.integrate(&sigma);
            prop_assert!(grid.first_moment(&sigma).norm() < 1e-5 * total, "order {m}");
        }
    }

    #[test]
    fn snapshots_round_trip_bit_exact(values in prop::collection::vec(1e-3f64..1e3, 16)) {
        let grid = SphereGrid::circle(16).unwrap();
        let field = SupportField::new(grid, values).unwrap();
        let text = serde_json::to_string(&field.snapshot()).unwrap();
        let back: FieldSnapshot = serde_json::from_str(&text).unwrap();
        let restored = SupportField::from_snapshot(&back, DerivativeScheme::Fd4).unwrap();
        prop_assert_eq!(restored.values(), field.values());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn t_tilde_is_homogeneous_of_degree_four(body in planar_body(), factor in prop::sample::select(vec![0.5, 2.0])) {
        let grid = SphereGrid::circle(128).unwrap();
        let h = planar(&grid, &body);
        let mfs = MfsConfig::default();
        let base = t_tilde(&h, 1, &mfs).unwrap();
        let scaled = t_tilde(&h.scaled(factor).unwrap(), 1, &mfs).unwrap();
        assert_relative_eq!(scaled, factor.powi(4) * base, max_relative = 1e-6);
    }

    #[test]
    fn t_tilde_is_translation_invariant(body in planar_body(), vx in -0.15f64..0.15, vy in -0.15f64..0.15) {
        let grid = SphereGrid::circle(128).unwrap();
        let h = planar(&grid, &body);
        let mfs = MfsConfig::default();
        let base = t_tilde(&h, 1, &mfs).unwrap();
        let moved = t_tilde(&h.translated(Vec3::new(vx, vy, 0.0)).unwrap(), 1, &mfs).unwrap();
        assert_relative_eq!(moved, base, max_relative = 1e-6);
    }

    #[test]
    fn flow_velocity_preserves_phi(body in planar_body(), tilt in -0.2f64..0.2, wobble in -0.2f64..0.2) {
        let grid = SphereGrid::circle(64).unwrap();
        let h = planar(&grid, &body);
        let f = DensityField::fourier(grid, 1.0, &[tilt, wobble], &[]).unwrap();
        let rhs = flow_rhs(&h, &f, 1, &MfsConfig::default()).unwrap();
        let scale: f64 = rhs.values.iter().map(|r| r.abs()).sum::<f64>();
        prop_assert!(rhs.phi_rate(&f).abs() <= 1e-12 * scale.max(1.0));
    }
}
