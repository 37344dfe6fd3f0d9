//! Problem fixtures shared by the benchmarks.

use fraclap_core::{BasisKind, HamiltonianSpec, Potential, Representation};

/// Fractional oscillator `|p|^alpha + x^2` on a Dirichlet grid.
pub fn oscillator(alpha: f64, size: usize) -> HamiltonianSpec {
    HamiltonianSpec::new(alpha, Potential::oscillator(2.0), BasisKind::Dirichlet, size)
}

/// Same oscillator solved in the momentum representation.
pub fn momentum_oscillator(alpha: f64, size: usize) -> HamiltonianSpec {
    oscillator(alpha, size).with_representation(Representation::Momentum)
}

/// Fractional Mathieu problem with `q = 1` on `[-pi, pi]`.
pub fn mathieu(alpha: f64, size: usize) -> HamiltonianSpec {
    HamiltonianSpec::new(alpha, Potential::Mathieu { q: 1.0 }, BasisKind::Periodic, size)
}
