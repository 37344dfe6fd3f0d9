//! Little sinc function (LSF) sampling sets on `[-L, L]`.
//!
//! Each boundary-condition family yields a uniform grid and a set of cardinal
//! functions `s_k` with `s_k(x_j) = δ_kj`. Every `s_k` is written as a finite
//! exponential sum
//!
//! ```text
//! s_k(x) = Σ_{n=-2N}^{2N} C_n(k, N) exp(i n π x / 2L)
//! ```
//!
//! whose coefficients do not depend on `L`. Spectral operators act on the
//! exponentials diagonally, which is what [`crate::operator`] builds on.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::{cis_pi_ratio, cos_pi_ratio, i_pow, sign_pow, sin_pi_ratio};

/// Boundary-condition family of a sampling set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisKind {
    /// `f(-L) = f(L)`; LSF₁.
    Periodic,
    /// `f(-L) = f(L) = 0`; LSF₂.
    Dirichlet,
    /// `f(-L) = -f(L)`; LSF₃.
    Antiperiodic,
    /// `f'(-L) = f'(L) = 0`; LSF₄.
    Neumann,
}

impl BasisKind {
    pub const ALL: [BasisKind; 4] = [
        BasisKind::Periodic,
        BasisKind::Dirichlet,
        BasisKind::Antiperiodic,
        BasisKind::Neumann,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BasisKind::Periodic => "periodic",
            BasisKind::Dirichlet => "dirichlet",
            BasisKind::Antiperiodic => "antiperiodic",
            BasisKind::Neumann => "neumann",
        }
    }

    /// Denominator `d` such that `x_k = 2 L k / d`.
    pub(crate) fn denominator(self, size: usize) -> i64 {
        let n = size as i64;
        match self {
            BasisKind::Periodic | BasisKind::Neumann => 2 * n + 1,
            BasisKind::Dirichlet | BasisKind::Antiperiodic => 2 * n,
        }
    }

    /// Inclusive range of grid labels `k`.
    pub(crate) fn label_range(self, size: usize) -> (i64, i64) {
        let n = size as i64;
        match self {
            BasisKind::Periodic | BasisKind::Neumann => (-n, n),
            BasisKind::Dirichlet => (-(n - 1), n - 1),
            BasisKind::Antiperiodic => (-n, n - 1),
        }
    }
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BasisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "periodic" | "lsf1" => Ok(BasisKind::Periodic),
            "dirichlet" | "lsf2" => Ok(BasisKind::Dirichlet),
            "antiperiodic" | "lsf3" => Ok(BasisKind::Antiperiodic),
            "neumann" | "lsf4" => Ok(BasisKind::Neumann),
            other => Err(Error::domain("basis", format!("unknown basis kind `{other}`"))),
        }
    }
}

/// Uniform sampling grid of one LSF family.
///
/// Positions `0..dim()` index the points in increasing order; [`Grid::label`]
/// maps a position back to the signed label `k` of `x_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    kind: BasisKind,
    size: usize,
    half_length: f64,
    points: Vec<f64>,
}

impl Grid {
    pub fn new(kind: BasisKind, size: usize, half_length: f64) -> Result<Self> {
        let min_size = if kind == BasisKind::Dirichlet { 2 } else { 1 };
        if size < min_size {
            return Err(Error::domain(
                "N",
                format!("need N >= {min_size} for {kind}, got {size}"),
            ));
        }
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::domain("L", format!("need finite L > 0, got {half_length}")));
        }
        let den = kind.denominator(size) as f64;
        let (first, last) = kind.label_range(size);
        let points = (first..=last).map(|k| half_length * ((2 * k) as f64 / den)).collect();
        Ok(Grid {
            kind,
            size,
            half_length,
            points,
        })
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    /// Basis size parameter `N`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.points.len()
    }

    /// Signed label `k` of the point at `position`.
    pub fn label(&self, position: usize) -> i64 {
        self.first_label() + position as i64
    }

    pub(crate) fn first_label(&self) -> i64 {
        self.kind.label_range(self.size).0
    }

    pub(crate) fn denominator(&self) -> i64 {
        self.kind.denominator(self.size)
    }

    /// Same kind and `N` on a different interval.
    pub fn with_half_length(&self, half_length: f64) -> Result<Self> {
        Grid::new(self.kind, self.size, half_length)
    }

    /// Image of a sample vector under the inversion `f(x) -> f(-x)`.
    ///
    /// On the antiperiodic grid the point `-L` has no mirror on the grid; its
    /// image is `f(L) = -f(-L)`.
    pub fn reflect(&self, samples: &[f64]) -> Vec<f64> {
        debug_assert_eq!(samples.len(), self.dim());
        match self.kind {
            BasisKind::Antiperiodic => {
                let dim = self.dim();
                let mut out = Vec::with_capacity(dim);
                out.push(-samples[0]);
                out.extend((1..dim).map(|p| samples[dim - p]));
                out
            }
            _ => samples.iter().rev().copied().collect(),
        }
    }

    fn check_position(&self, position: usize) -> Result<()> {
        if position >= self.dim() {
            Err(Error::Index {
                index: position,
                dim: self.dim(),
            })
        } else {
            Ok(())
        }
    }
}

pub fn make_grid(kind: BasisKind, size: usize, half_length: f64) -> Result<Grid> {
    Grid::new(kind, size, half_length)
}

/// Exponential-sum coefficients `C_n(k, N)` for every grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoefficients {
    grid: Grid,
    // row-major: one row of 4N+1 harmonics (n = -2N..=2N) per grid position
    values: Vec<Complex64>,
}

impl SpectralCoefficients {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Largest harmonic index `2N`.
    pub fn max_harmonic(&self) -> i64 {
        2 * self.grid.size as i64
    }

    pub fn harmonics(&self) -> std::ops::RangeInclusive<i64> {
        -self.max_harmonic()..=self.max_harmonic()
    }

    fn width(&self) -> usize {
        (2 * self.max_harmonic() + 1) as usize
    }

    /// Coefficients of `s_k` for the point at `position`, ordered `n = -2N..=2N`.
    pub fn row(&self, position: usize) -> &[Complex64] {
        let w = self.width();
        &self.values[position * w..(position + 1) * w]
    }

    pub fn get(&self, position: usize, harmonic: i64) -> Complex64 {
        self.row(position)[(harmonic + self.max_harmonic()) as usize]
    }

    /// Wave number of harmonic `n`: `n π / 2L`.
    pub fn momentum(&self, harmonic: i64) -> f64 {
        harmonic as f64 * PI / (2.0 * self.grid.half_length)
    }

    /// Exponential-sum coefficients of `Σ_k samples[k] s_k`.
    pub fn expansion(&self, samples: &[f64]) -> Result<Expansion> {
        if samples.len() != self.grid.dim() {
            return Err(Error::Dimension {
                expected: self.grid.dim(),
                got: samples.len(),
            });
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.width()];
        for (position, &f) in samples.iter().enumerate() {
            if f == 0.0 {
                continue;
            }
            for (c, &cn) in coeffs.iter_mut().zip(self.row(position)) {
                *c += cn * f;
            }
        }
        Ok(Expansion {
            half_length: self.grid.half_length,
            max_harmonic: self.max_harmonic(),
            coeffs,
        })
    }
}

pub fn coefficients(grid: &Grid) -> SpectralCoefficients {
    let n = grid.size as i64;
    let max_h = 2 * n;
    let mut values = Vec::with_capacity(grid.dim() * (2 * max_h + 1) as usize);
    for position in 0..grid.dim() {
        let k = grid.label(position);
        for h in -max_h..=max_h {
            let c = match grid.kind {
                BasisKind::Periodic => {
                    let sel = (1.0 + sign_pow(h)) / (2.0 * (2 * n + 1) as f64);
                    cis_pi_ratio(-h * k, 2 * n + 1) * sel
                }
                BasisKind::Dirichlet => {
                    // sin((1/2 + k/2N) n π) = sin(π n (N + k) / 2N)
                    i_pow(h - 1) * (sin_pi_ratio(h * (n + k), 2 * n) / (2 * n) as f64)
                }
                BasisKind::Antiperiodic => {
                    let sel = (1.0 - sign_pow(h)) / (4 * n) as f64;
                    cis_pi_ratio(-h * k, 2 * n) * sel
                }
                BasisKind::Neumann => {
                    // cos((1/2 + k/(2N+1)) n π) = cos(π n (2N + 1 + 2k) / (2(2N+1)))
                    let den = 2 * n + 1;
                    i_pow(h) * (cos_pi_ratio(h * (den + 2 * k), 2 * den) / den as f64)
                }
            };
            values.push(c);
        }
    }
    SpectralCoefficients {
        grid: grid.clone(),
        values,
    }
}

/// A function in the span of one sampling set, stored by its exponential
/// coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    half_length: f64,
    max_harmonic: i64,
    coeffs: Vec<Complex64>,
}

impl Expansion {
    pub fn coefficient(&self, harmonic: i64) -> Complex64 {
        self.coeffs[(harmonic + self.max_harmonic) as usize]
    }

    /// Complex value of the exponential sum at `x`.
    pub fn eval_complex(&self, x: f64) -> Complex64 {
        let theta = PI * x / (2.0 * self.half_length);
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, &c) in self.coeffs.iter().enumerate() {
            let h = idx as i64 - self.max_harmonic;
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            acc += c * Complex64::from_polar(1.0, h as f64 * theta);
        }
        acc
    }

    pub fn eval(&self, x: f64) -> f64 {
        let z = self.eval_complex(x);
        debug_assert!(
            z.im.abs() <= 1e-10 * (1.0 + z.re.abs()),
            "expansion not real at x = {x}: {z}"
        );
        z.re
    }

    /// `∫_{-L}^{L} f(x)^2 dx` of the (real) expansion, evaluated in closed form.
    pub fn norm_squared(&self) -> f64 {
        let l = self.half_length;
        let mut acc = 0.0;
        for (a, &ca) in self.coeffs.iter().enumerate() {
            if ca.norm_sqr() == 0.0 {
                continue;
            }
            for (b, &cb) in self.coeffs.iter().enumerate() {
                let d = a as i64 - b as i64;
                let overlap = if d == 0 {
                    2.0 * l
                } else if d % 2 == 0 {
                    continue;
                } else {
                    4.0 * l * sign_pow((d - 1) / 2) / (d as f64 * PI)
                };
                acc += (ca * cb.conj()).re * overlap;
            }
        }
        acc
    }
}

/// Value of the sampling function at grid `position` evaluated at `x`.
pub fn eval_sampling_function(coeffs: &SpectralCoefficients, position: usize, x: f64) -> Result<f64> {
    coeffs.grid.check_position(position)?;
    let theta = PI * x / (2.0 * coeffs.grid.half_length);
    let mut acc = Complex64::new(0.0, 0.0);
    for (h, &c) in coeffs.harmonics().zip(coeffs.row(position)) {
        acc += c * Complex64::from_polar(1.0, h as f64 * theta);
    }
    debug_assert!(acc.im.abs() <= 1e-12, "s_k not real at x = {x}: {acc}");
    Ok(acc.re)
}

/// `Σ_k samples[k] s_k(x)`.
pub fn interpolate(coeffs: &SpectralCoefficients, samples: &[f64], x: f64) -> Result<f64> {
    Ok(coeffs.expansion(samples)?.eval(x))
}

/// `w_k = ∫_{-L}^{L} s_k(x) dx`, integrated term by term.
pub fn quadrature_weights(coeffs: &SpectralCoefficients) -> Vec<f64> {
    let l = coeffs.grid.half_length;
    (0..coeffs.grid.dim())
        .map(|position| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (h, &c) in coeffs.harmonics().zip(coeffs.row(position)) {
                let integral = if h == 0 {
                    2.0 * l
                } else {
                    4.0 * l * sin_pi_ratio(h, 2) / (h as f64 * PI)
                };
                acc += c * integral;
            }
            debug_assert!(acc.im.abs() <= 1e-12 * l.max(1.0));
            acc.re
        })
        .collect()
}
