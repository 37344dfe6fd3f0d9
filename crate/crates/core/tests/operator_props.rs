use std::f64::consts::PI;

use fraclap_core::{
    coefficients, eigenvalues, fractional_laplacian_matrix, make_grid, multiplier_matrix, BasisKind, Grid,
    SpectralMultiplier,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn kind() -> impl Strategy<Value = BasisKind> {
    prop::sample::select(BasisKind::ALL.to_vec())
}

/// Permutation `x_k -> -x_k`, available when the grid is symmetric.
fn reversal(g: &Grid) -> Option<DMatrix<f64>> {
    let pts = g.points();
    let n = pts.len();
    if (0..n).any(|i| (pts[i] + pts[n - 1 - i]).abs() > 1e-12) {
        return None;
    }
    Some(DMatrix::from_fn(n, n, |i, j| if i + j == n - 1 { 1.0 } else { 0.0 }))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_forms_match_general_route(kind in kind(), n in 2usize..7, alpha in 0.3f64..3.0, l in 0.5f64..4.0) {
        let g = make_grid(kind, n, l).unwrap();
        let closed = fractional_laplacian_matrix(&g, alpha).unwrap();
        let general = multiplier_matrix(&coefficients(&g), &SpectralMultiplier::power(alpha).unwrap()).unwrap();
        let scale = closed.max_abs().max(1.0);
        prop_assert!((closed.entries() - general.entries()).abs().max() <= 1e-12 * scale);
        prop_assert!(closed.max_asymmetry() <= 1e-13 * scale);
    }

    #[test]
    fn positive_semidefinite(kind in kind(), n in 2usize..7, alpha in 0.3f64..3.0) {
        let m = fractional_laplacian_matrix(&make_grid(kind, n, 1.1).unwrap(), alpha).unwrap();
        prop_assert!(eigenvalues(&m).unwrap()[0] >= -1e-10);
    }

    #[test]
    fn length_scaling(kind in kind(), n in 2usize..7, alpha in 0.3f64..3.0, l in 0.2f64..9.0) {
        let unit = fractional_laplacian_matrix(&make_grid(kind, n, 1.0).unwrap(), alpha).unwrap();
        let scaled = fractional_laplacian_matrix(&make_grid(kind, n, l).unwrap(), alpha).unwrap();
        let f = l.powf(-alpha);
        let scale = unit.max_abs();
        prop_assert!((scaled.entries() - unit.entries() * f).abs().max() <= 1e-12 * scale * f);
    }

    #[test]
    fn commutes_with_reflection(kind in kind(), n in 2usize..7, alpha in 0.3f64..3.0) {
        let g = make_grid(kind, n, 1.4).unwrap();
        let m = fractional_laplacian_matrix(&g, alpha).unwrap();
        if let Some(p) = reversal(&g) {
            let e = m.entries();
            prop_assert!((e * &p - &p * e).abs().max() <= 1e-12 * m.max_abs().max(1.0));
        }
    }
}

#[test]
fn absolute_momentum_on_periodic_grid() {
    let g = make_grid(BasisKind::Periodic, 3, PI).unwrap();
    for m in [
        fractional_laplacian_matrix(&g, 1.0).unwrap(),
        multiplier_matrix(&coefficients(&g), &SpectralMultiplier::new("|p|", f64::abs)).unwrap(),
    ] {
        let ev = eigenvalues(&m).unwrap();
        for (got, want) in ev.iter().zip([0.0, 1.0, 1.0, 2.0, 2.0, 3.0, 3.0]) {
            assert!((got - want).abs() <= 1e-12);
        }
    }
}

#[test]
fn squared_momentum_dirichlet_small() {
    let g = make_grid(BasisKind::Dirichlet, 2, 1.0).unwrap();
    let m = multiplier_matrix(&coefficients(&g), &SpectralMultiplier::new("p^2", |p| p * p)).unwrap();
    let ev = eigenvalues(&m).unwrap();
    for (i, e) in ev.iter().enumerate() {
        let want = ((i + 1) as f64 * PI / 2.0).powi(2);
        assert!((e - want).abs() <= 1e-10 * want);
    }
}

#[test]
fn box_spectrum_three_halves() {
    for n in [3, 5] {
        let ev =
            eigenvalues(&fractional_laplacian_matrix(&make_grid(BasisKind::Dirichlet, n, 1.0).unwrap(), 1.5).unwrap())
                .unwrap();
        for (i, e) in ev.iter().enumerate() {
            assert!((e - ((i + 1) as f64 * PI / 2.0).powf(1.5)).abs() <= 1e-10);
        }
    }
}
