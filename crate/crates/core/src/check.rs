//! Built-in property suite: structural invariants of the bases, the operator
//! matrices and the solver that hold without any reference data.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::basis::{coefficients, eval_sampling_function, make_grid, BasisKind};
use crate::eigen::{eigendecompose, eigenvalues, evolve, project};
use crate::error::Result;
use crate::hamiltonian::{assemble, HamiltonianSpec, Potential};
use crate::operator::{fractional_laplacian_matrix, multiplier_matrix, SpectralMultiplier};
use crate::reference::exact_box_energy;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    /// Worst deviation observed; `NaN` when the check could not run.
    pub worst: f64,
    pub tolerance: f64,
    pub error: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.worst <= self.tolerance
    }
}

fn outcome(name: &'static str, tolerance: f64, worst: Result<f64>) -> CheckOutcome {
    match worst {
        Ok(worst) => CheckOutcome {
            name,
            worst,
            tolerance,
            error: None,
        },
        Err(e) => CheckOutcome {
            name,
            worst: f64::NAN,
            tolerance,
            error: Some(e.to_string()),
        },
    }
}

const SIZES: [usize; 4] = [2, 3, 5, 8];
const ALPHAS: [f64; 4] = [1.0, 1.5, 2.0, 2.5];

/// `max |s_k(x_j) - δ_kj|` over every kind, `N ∈ {2,3,5,8}`, `L ∈ {1, π}`.
pub fn cardinality() -> Result<f64> {
    let mut worst = 0.0f64;
    for kind in BasisKind::ALL {
        for n in SIZES {
            for l in [1.0, PI] {
                let g = make_grid(kind, n, l)?;
                let c = coefficients(&g);
                for k in 0..g.dim() {
                    for (j, &x) in g.points().iter().enumerate() {
                        let delta = if j == k { 1.0 } else { 0.0 };
                        worst = worst.max((eval_sampling_function(&c, k, x)? - delta).abs());
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// `max |M - Mᵀ|` of `|p̂|^α` over kinds, `N ∈ {2,3,5}` and the test exponents.
pub fn operator_symmetry() -> Result<f64> {
    let mut worst = 0.0f64;
    for kind in BasisKind::ALL {
        for n in [2, 3, 5] {
            for alpha in ALPHAS {
                let m = fractional_laplacian_matrix(&make_grid(kind, n, 1.3)?, alpha)?;
                worst = worst.max(m.max_asymmetry());
            }
        }
    }
    Ok(worst)
}

/// Closed trigonometric forms against the general multiplier route.
pub fn closed_form_agreement() -> Result<f64> {
    let mut worst = 0.0f64;
    for kind in BasisKind::ALL {
        for n in [2, 3, 5] {
            for alpha in ALPHAS {
                let g = make_grid(kind, n, 1.3)?;
                let closed = fractional_laplacian_matrix(&g, alpha)?;
                let general = multiplier_matrix(&coefficients(&g), &SpectralMultiplier::power(alpha)?)?;
                worst = worst.max((closed.entries() - general.entries()).abs().max());
            }
        }
    }
    Ok(worst)
}

/// Relative deviation of the free Dirichlet spectrum from `(nπ/2L)^α`.
pub fn dirichlet_free_spectrum() -> Result<f64> {
    let mut worst = 0.0f64;
    for n in [3, 5, 8] {
        for alpha in ALPHAS {
            let l = 1.0;
            let ev = eigenvalues(&fractional_laplacian_matrix(
                &make_grid(BasisKind::Dirichlet, n, l)?,
                alpha,
            )?)?;
            for (i, e) in ev.iter().enumerate() {
                let exact = exact_box_energy(alpha, 1.0, 1.0, l, i + 1)?;
                worst = worst.max((e - exact).abs() / exact);
            }
        }
    }
    Ok(worst)
}

/// Free periodic spectrum at `L = π`: `0` once, then `n^α` twice each.
pub fn periodic_free_spectrum() -> Result<f64> {
    let mut worst = 0.0f64;
    for n in [3, 5, 8] {
        for alpha in ALPHAS {
            let ev = eigenvalues(&fractional_laplacian_matrix(
                &make_grid(BasisKind::Periodic, n, PI)?,
                alpha,
            )?)?;
            worst = worst.max(ev[0].abs());
            for m in 1..=n {
                let want = (m as f64).powf(alpha);
                worst = worst.max((ev[2 * m - 1] - want).abs()).max((ev[2 * m] - want).abs());
            }
        }
    }
    Ok(worst)
}

/// Drift of `Σ|c_n|²` for a Gaussian packet in a fractional well over `t ∈ {0, 1, 10}`.
pub fn evolution_norm() -> Result<f64> {
    let spec = HamiltonianSpec::new(1.5, Potential::Free, BasisKind::Dirichlet, 12);
    let spectrum = eigendecompose(&assemble(&spec, 2.0)?)?;
    let psi0: Vec<Complex64> = spectrum
        .grid()
        .points()
        .iter()
        .map(|&x| Complex64::new((-(x - 0.3) * (x - 0.3) * 4.0).exp(), 0.0))
        .collect();
    let norm = |psi: &[Complex64]| -> Result<f64> { Ok(project(&spectrum, psi)?.iter().map(|c| c.norm_sqr()).sum()) };
    let base = norm(&psi0)?;
    let mut worst = 0.0f64;
    for t in [0.0, 1.0, 10.0] {
        worst = worst.max((norm(&evolve(&spectrum, &psi0, 1.0, t)?)? - base).abs());
    }
    Ok(worst)
}

/// At `q = 0` the levels `a_1` and `b_1` coincide at `1`.
pub fn mathieu_free_degeneracy() -> Result<f64> {
    let mut worst = 0.0f64;
    for alpha in [1.0, 1.5, 2.0] {
        let spec = HamiltonianSpec::new(alpha, Potential::Mathieu { q: 0.0 }, BasisKind::Periodic, 20);
        let ev = eigenvalues(&assemble(&spec, PI)?)?;
        worst = worst.max(ev[0].abs()).max((ev[1] - 1.0).abs()).max((ev[2] - 1.0).abs());
    }
    Ok(worst)
}

pub fn run_all() -> Vec<CheckOutcome> {
    vec![
        outcome("cardinality", 1e-12, cardinality()),
        outcome("operator symmetry", 1e-13, operator_symmetry()),
        outcome("closed form vs general multiplier", 1e-12, closed_form_agreement()),
        outcome("Dirichlet free spectrum (relative)", 1e-10, dirichlet_free_spectrum()),
        outcome("periodic free spectrum", 1e-12, periodic_free_spectrum()),
        outcome("evolution coefficient norm", 1e-12, evolution_norm()),
        outcome("Mathieu q=0 degeneracy", 1e-12, mathieu_free_degeneracy()),
    ]
}
