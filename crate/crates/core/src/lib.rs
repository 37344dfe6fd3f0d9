//! Collocation solver for one-dimensional fractional Schrödinger problems
//! `H = D (-ħ²Δ)^{α/2} + V(x)` on little-sinc-function bases.

pub mod basis;
pub mod check;
pub mod eigen;
pub mod error;
pub mod hamiltonian;
pub mod operator;
pub mod potential;
pub mod reference;

mod numeric;

pub use basis::{
    coefficients, eval_sampling_function, interpolate, make_grid, quadrature_weights, BasisKind, Expansion, Grid,
    SpectralCoefficients,
};
pub use eigen::{
    classify_parity, eigendecompose, eigenvalues, evolve, project, reconstruct, Parity, Period, Spectrum, StateLabel,
};
pub use error::{Error, Result};
pub use hamiltonian::{
    assemble, find_pms_length, golden_section, momentum_space_oscillator, pms_search, trace, HamiltonianSpec,
    PmsOptions, PmsResult, Potential, Representation,
};
pub use operator::{fractional_laplacian_matrix, multiplier_matrix, OperatorMatrix, SpectralMultiplier};
pub use potential::{parse, PotentialExpr};
pub use reference::{beta, box_eigenfunction, exact_box_energy, ln_gamma, wkb_energy, WkbModel};
