//! Collocation matrices of spectral multipliers `m(p̂)` on LSF grids.
//!
//! Entry `[M]_{kj}` is `(m(p̂) s_k)(x_j)`. For even multipliers the matrix is
//! real and symmetric, so it acts on sample vectors from either side.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::basis::{BasisKind, Grid, SpectralCoefficients};
use crate::error::{Error, Result};
use crate::numeric::{cis_pi_ratio, cos_pi_table_dd, int_pow_dd, sign_pow, Dd};

/// A real function applied to the spectrum of the momentum operator.
#[derive(Clone)]
pub struct SpectralMultiplier {
    label: String,
    symbol: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl SpectralMultiplier {
    pub fn new(label: impl Into<String>, symbol: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        SpectralMultiplier {
            label: label.into(),
            symbol: Arc::new(symbol),
        }
    }

    /// `|p|^α`, with `|0|^α = 0`.
    pub fn power(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(SpectralMultiplier::new(format!("|p|^{alpha}"), move |p: f64| {
            if p == 0.0 {
                0.0
            } else {
                p.abs().powf(alpha)
            }
        }))
    }

    pub fn constant(value: f64) -> Self {
        SpectralMultiplier::new(format!("{value}"), move |_| value)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, momentum: f64) -> f64 {
        (self.symbol)(momentum)
    }
}

impl fmt::Debug for SpectralMultiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralMultiplier")
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

/// Dense real square matrix tied to the grid it was built on.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    grid: Grid,
    entries: DMatrix<f64>,
    /// Rounding residue of `entries`, when the builder tracked it.
    low: Option<DMatrix<f64>>,
    label: String,
}

impl OperatorMatrix {
    pub fn new(grid: Grid, entries: DMatrix<f64>, label: impl Into<String>) -> Result<Self> {
        let dim = grid.dim();
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: if entries.nrows() != dim {
                    entries.nrows()
                } else {
                    entries.ncols()
                },
            });
        }
        Ok(OperatorMatrix {
            grid,
            entries,
            low: None,
            label: label.into(),
        })
    }

    fn with_low(mut self, low: DMatrix<f64>) -> Self {
        self.low = Some(low);
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Low-order correction: the exact matrix is `entries + low_order` to
    /// roughly twice working precision.
    pub fn low_order(&self) -> Option<&DMatrix<f64>> {
        self.low.as_ref()
    }

    pub fn into_entries(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// `max_{kj} |M_kj - M_jk|`.
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in (j + 1)..n {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub(crate) fn scale_in_place(&mut self, factor: f64) {
        if factor == 1.0 {
            return;
        }
        match &mut self.low {
            Some(low) => {
                for (hi, lo) in self.entries.iter_mut().zip(low.iter_mut()) {
                    let v = Dd { hi: *hi, lo: *lo }.mul(Dd::new(factor));
                    *hi = v.hi;
                    *lo = v.lo;
                }
            }
            None => self.entries *= factor,
        }
    }

    pub(crate) fn add_diagonal(&mut self, diagonal: &[f64]) {
        for (i, d) in diagonal.iter().enumerate() {
            match &mut self.low {
                Some(low) => {
                    let v = Dd {
                        hi: self.entries[(i, i)],
                        lo: low[(i, i)],
                    }
                    .add(Dd::new(*d));
                    self.entries[(i, i)] = v.hi;
                    low[(i, i)] = v.lo;
                }
                None => self.entries[(i, i)] += d,
            }
        }
    }

    pub(crate) fn relabel(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(())
    } else {
        Err(Error::domain("alpha", format!("need finite alpha > 0, got {alpha}")))
    }
}

/// General route: `[M]_{kj} = Σ_n C_n(k) m(nπ/2L) exp(i n π x_j / 2L)`.
pub fn multiplier_matrix(coeffs: &SpectralCoefficients, multiplier: &SpectralMultiplier) -> Result<OperatorMatrix> {
    let grid = coeffs.grid();
    let dim = grid.dim();
    let den = grid.denominator();

    let symbol: Vec<f64> = coeffs
        .harmonics()
        .map(|h| {
            let p = coeffs.momentum(h);
            let v = multiplier.eval(p);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::MultiplierDomain {
                    label: multiplier.label.clone(),
                    momentum: p,
                })
            }
        })
        .collect::<Result<_>>()?;
    let scale = symbol.iter().fold(1.0f64, |m, v| m.max(v.abs()));

    // x_j / 2L = j / den, so the phase of harmonic n at x_j is π n j / den
    let phases: Vec<Complex64> = (0..2 * den).map(|r| cis_pi_ratio(r, den)).collect();
    let phase = |h: i64, j: i64| phases[(h * j).rem_euclid(2 * den) as usize];

    let mut entries = DMatrix::<f64>::zeros(dim, dim);
    let mut residue = 0.0f64;
    for k in 0..dim {
        let weighted: Vec<(i64, Complex64)> = coeffs
            .harmonics()
            .zip(coeffs.row(k))
            .zip(&symbol)
            .filter(|((_, c), &m)| m != 0.0 && c.norm_sqr() != 0.0)
            .map(|((h, &c), &m)| (h, c * m))
            .collect();
        for j in 0..dim {
            let label_j = grid.label(j);
            let mut acc = Complex64::new(0.0, 0.0);
            for &(h, cm) in &weighted {
                acc += cm * phase(h, label_j);
            }
            residue = residue.max(acc.im.abs());
            entries[(k, j)] = acc.re;
        }
    }
    if residue > 1e-12 * scale {
        return Err(Error::ComplexEntries {
            label: multiplier.label.clone(),
            residue,
        });
    }
    OperatorMatrix::new(grid.clone(), entries, multiplier.label.clone())
}

/// Collocation matrix of `(-Δ)^{α/2} = |p̂|^α`, from the real closed forms of
/// each sampling set.
///
/// Entries depend on the labels only through `k - j` (and `k + j` for the
/// Dirichlet and Neumann sets), so the harmonic sums are tabulated once per
/// offset and then scattered into the matrix. The sums run in double-double
/// arithmetic; the residue is kept in [`OperatorMatrix::low_order`].
pub fn fractional_laplacian_matrix(grid: &Grid, alpha: f64) -> Result<OperatorMatrix> {
    check_alpha(alpha)?;
    let n = grid.size() as i64;
    let l = grid.half_length();
    let dim = grid.dim();
    let first = grid.first_label();
    let span = (2 * n + 1) as usize; // offsets 0..=2N cover every |k ± j|

    // harmonic index h carries momentum h·π/(2L)
    let table = |count: i64, den: i64, harmonic: &dyn Fn(i64) -> i64, signed: bool| {
        let cosines = cos_pi_table_dd(den);
        let weights: Vec<(i64, Dd)> = (1..=count)
            .map(|m| {
                let h = harmonic(m);
                let w = int_pow_dd(h as u64, alpha);
                (h, if signed && sign_pow(h) < 0.0 { w.neg() } else { w })
            })
            .collect();
        (0..span as i64)
            .map(|d| {
                weights.iter().fold(Dd::ZERO, |acc, &(h, w)| {
                    acc.add(w.mul(cosines[(h * d).rem_euclid(2 * den) as usize]))
                })
            })
            .collect::<Vec<Dd>>()
    };

    let (den, norm) = match grid.kind() {
        BasisKind::Periodic => (2 * n + 1, Dd::new(2.0).div_f64((2 * n + 1) as f64)),
        BasisKind::Antiperiodic => (2 * n, Dd::new(1.0).div_f64(n as f64)),
        BasisKind::Dirichlet => (2 * n, Dd::new(1.0).div_f64((2 * n) as f64)),
        BasisKind::Neumann => (2 * n + 1, Dd::new(1.0).div_f64((2 * n + 1) as f64)),
    };
    let factor = norm.mul(Dd::new((PI / (2.0 * l)).powf(alpha)));

    let mut hi = DMatrix::<f64>::zeros(dim, dim);
    let mut lo = DMatrix::<f64>::zeros(dim, dim);
    let mut put = |k: usize, j: usize, v: Dd| {
        let v = factor.mul(v);
        hi[(k, j)] = v.hi;
        lo[(k, j)] = v.lo;
    };
    match grid.kind() {
        BasisKind::Periodic | BasisKind::Antiperiodic => {
            let diff = if grid.kind() == BasisKind::Periodic {
                table(n, den, &|m| 2 * m, false)
            } else {
                table(n, den, &|m| 2 * m - 1, false)
            };
            for k in 0..dim {
                for j in 0..dim {
                    put(k, j, diff[k.abs_diff(j)]);
                }
            }
        }
        BasisKind::Dirichlet | BasisKind::Neumann => {
            let diff = table(2 * n, den, &|m| m, false);
            let sum = table(2 * n, den, &|m| m, true);
            let subtract = grid.kind() == BasisKind::Dirichlet;
            for k in 0..dim {
                let lk = first + k as i64;
                for j in 0..dim {
                    let lj = first + j as i64;
                    let s = sum[(lk + lj).unsigned_abs() as usize];
                    put(k, j, diff[k.abs_diff(j)].add(if subtract { s.neg() } else { s }));
                }
            }
        }
    }
    Ok(OperatorMatrix::new(grid.clone(), hi, format!("|p|^{alpha}"))?.with_low(lo))
}
