use std::f64::consts::PI;

use fraclap_core::{coefficients, eval_sampling_function, interpolate, make_grid, quadrature_weights, BasisKind};
use num_complex::Complex64;
use proptest::prelude::*;

fn kind() -> impl Strategy<Value = BasisKind> {
    prop::sample::select(BasisKind::ALL.to_vec())
}

fn raw_sampling_value(kind: BasisKind, n: usize, l: f64, position: usize, x: f64) -> Complex64 {
    let c = coefficients(&make_grid(kind, n, l).unwrap());
    c.harmonics()
        .zip(c.row(position))
        .map(|(h, &cn)| cn * Complex64::from_polar(1.0, h as f64 * PI * x / (2.0 * l)))
        .sum()
}

proptest! {
    #[test]
    fn cardinal_on_own_grid(kind in kind(), n in 2usize..9, l in 0.2f64..10.0) {
        let g = make_grid(kind, n, l).unwrap();
        let c = coefficients(&g);
        for k in 0..g.dim() {
            for (j, &x) in g.points().iter().enumerate() {
                let want = if j == k { 1.0 } else { 0.0 };
                prop_assert!((eval_sampling_function(&c, k, x).unwrap() - want).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn sampling_functions_are_real(kind in kind(), n in 2usize..9, t in -1.0f64..=1.0) {
        let l = 1.7;
        let dim = make_grid(kind, n, l).unwrap().dim();
        for k in 0..dim {
            prop_assert!(raw_sampling_value(kind, n, l, k, t * l).im.abs() <= 1e-12);
        }
    }

    #[test]
    fn grid_points_increase_inside_interval(kind in kind(), n in 2usize..40, l in 0.1f64..50.0) {
        let g = make_grid(kind, n, l).unwrap();
        prop_assert!(g.points().windows(2).all(|w| w[0] < w[1]));
        prop_assert!(g.points().iter().all(|x| x.abs() <= l));
    }

    #[test]
    fn coefficients_ignore_length(kind in kind(), n in 2usize..9) {
        let a = coefficients(&make_grid(kind, n, 1.0).unwrap());
        let b = coefficients(&make_grid(kind, n, 7.3).unwrap());
        for k in 0..a.grid().dim() {
            for (u, v) in a.row(k).iter().zip(b.row(k)) {
                prop_assert!((u - v).norm() <= 1e-15);
            }
        }
    }

    #[test]
    fn constant_lies_in_span(kind in prop::sample::select(vec![BasisKind::Periodic, BasisKind::Neumann]), n in 2usize..9, t in -1.0f64..=1.0) {
        let g = make_grid(kind, n, 2.0).unwrap();
        let c = coefficients(&g);
        let ones = vec![1.0; g.dim()];
        prop_assert!((interpolate(&c, &ones, 2.0 * t).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn boundary_conditions(n in 2usize..9, l in 0.3f64..5.0) {
        let g = make_grid(BasisKind::Dirichlet, n, l).unwrap();
        let c = coefficients(&g);
        for k in 0..g.dim() {
            prop_assert!(eval_sampling_function(&c, k, l).unwrap().abs() <= 1e-12);
            prop_assert!(eval_sampling_function(&c, k, -l).unwrap().abs() <= 1e-12);
        }
        let g = make_grid(BasisKind::Antiperiodic, n, l).unwrap();
        let c = coefficients(&g);
        for k in 0..g.dim() {
            let a = eval_sampling_function(&c, k, -l).unwrap();
            let b = eval_sampling_function(&c, k, l).unwrap();
            prop_assert!((a + b).abs() <= 1e-12);
        }
    }

    #[test]
    fn interpolation_is_linear(kind in kind(), n in 2usize..7, a in -3.0f64..3.0, t in -1.0f64..=1.0) {
        let g = make_grid(kind, n, 1.0).unwrap();
        let c = coefficients(&g);
        let f: Vec<f64> = (0..g.dim()).map(|i| (i as f64).sin()).collect();
        let h: Vec<f64> = (0..g.dim()).map(|i| (i as f64 * 0.7).cos()).collect();
        let mix: Vec<f64> = f.iter().zip(&h).map(|(u, v)| a * u + v).collect();
        let lhs = interpolate(&c, &mix, t).unwrap();
        let rhs = a * interpolate(&c, &f, t).unwrap() + interpolate(&c, &h, t).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + a.abs()) * 10.0);
    }
}

#[test]
fn periodic_cosine_interpolates_exactly() {
    for n in [2, 3, 5] {
        let l = 1.3;
        let g = make_grid(BasisKind::Periodic, n, l).unwrap();
        let samples: Vec<f64> = g.points().iter().map(|x| (PI * x / l).cos()).collect();
        let got = interpolate(&coefficients(&g), &samples, l / 7.0).unwrap();
        assert!((got - (PI / 7.0).cos()).abs() <= 1e-12);
    }
}

#[test]
fn antiperiodic_weights_are_real_and_sum_to_integral() {
    // the only harmonics are odd, and ∫ of an odd-harmonic expansion is real
    for n in [2, 3, 5] {
        let g = make_grid(BasisKind::Antiperiodic, n, 1.0).unwrap();
        let w = quadrature_weights(&coefficients(&g));
        assert_eq!(w.len(), g.dim());
        assert!(w.iter().all(|v| v.is_finite()));
    }
}

#[test]
fn index_and_dimension_errors() {
    let g = make_grid(BasisKind::Neumann, 3, 1.0).unwrap();
    let c = coefficients(&g);
    assert!(eval_sampling_function(&c, g.dim(), 0.0).is_err());
    assert!(interpolate(&c, &[1.0, 2.0], 0.0).is_err());
}
