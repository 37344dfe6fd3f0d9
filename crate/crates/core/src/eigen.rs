//! Dense real-symmetric eigensolver and eigenvector post-processing.
//!
//! The decomposition is Householder reduction to tridiagonal form followed by
//! the implicit-shift QL iteration (the EISPACK `tred2`/`tql2` pair). Storage
//! is column-major so every inner loop runs over contiguous memory.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::basis::{coefficients, BasisKind, Grid};
use crate::error::{Error, Result};
use crate::numeric::dot_compensated;
use crate::operator::OperatorMatrix;

const SYMMETRY_TOL: f64 = 1e-10;
const DEGENERACY_GAP: f64 = 1e-9;
const MAX_QL_SWEEPS: usize = 60;

/// Ascending eigenvalues with orthonormal eigenvectors (as columns).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
    grid: Grid,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, i: usize) -> &[f64] {
        let n = self.eigenvectors.nrows();
        &self.eigenvectors.as_slice()[i * n..(i + 1) * n]
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Rayleigh quotient `vᵢᵀ H vᵢ` accumulated in doubled precision,
    /// including the low-order part of `H` when present.
    ///
    /// For a converged eigenvector this removes most of the rounding the QL
    /// sweeps leave on the eigenvalue.
    pub fn rayleigh_quotient(&self, h: &OperatorMatrix, i: usize) -> Result<f64> {
        if i >= self.len() {
            return Err(Error::Index {
                index: i,
                dim: self.len(),
            });
        }
        let v = self.eigenvector(i);
        let n = v.len();
        let hs = h.entries().as_slice();
        let low = h.low_order().map(|m| m.as_slice());
        // H is symmetric, so column j of H doubles as row j
        let hv: Vec<f64> = (0..n)
            .map(|j| {
                let col = j * n..(j + 1) * n;
                let correction = low.map_or(0.0, |lo| lo[col.clone()].iter().zip(v).map(|(a, b)| a * b).sum());
                dot_compensated(&hs[col], v) + correction
            })
            .collect();
        Ok(dot_compensated(v, &hv) / dot_compensated(v, v))
    }

    /// Replace the lowest `count` eigenvalues by compensated Rayleigh quotients.
    pub fn refine(mut self, h: &OperatorMatrix, count: usize) -> Result<Self> {
        for i in 0..count.min(self.len()) {
            self.eigenvalues[i] = self.rayleigh_quotient(h, i)?;
        }
        Ok(self)
    }

    /// `max_i ‖H vᵢ - λᵢ vᵢ‖₂ / max(1, |λᵢ|)`.
    pub fn max_relative_residual(&self, h: &OperatorMatrix) -> f64 {
        let hv = h.entries() * &self.eigenvectors;
        (0..self.len())
            .map(|i| {
                let lambda = self.eigenvalues[i];
                let r: f64 = hv
                    .column(i)
                    .iter()
                    .zip(self.eigenvector(i))
                    .map(|(a, b)| (a - lambda * b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                r / lambda.abs().max(1.0)
            })
            .fold(0.0, f64::max)
    }

    /// `max |VᵀV - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let g = self.eigenvectors.transpose() * &self.eigenvectors;
        let id = DMatrix::<f64>::identity(g.nrows(), g.ncols());
        (g - id).abs().max()
    }
}

fn check_symmetric(h: &OperatorMatrix) -> Result<()> {
    let asym = h.max_asymmetry();
    let scale = h.max_abs().max(1.0);
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::Contract(format!(
            "matrix `{}` is not symmetric: max |H - Hᵀ| = {asym:e}",
            h.label()
        )));
    }
    Ok(())
}

/// Full eigendecomposition of a symmetric operator matrix.
///
/// Eigenvalues come out ascending. Each eigenvector is signed so that its
/// largest-magnitude component is positive, and numerically degenerate
/// clusters are rotated onto definite parity under `x -> -x`.
pub fn eigendecompose(h: &OperatorMatrix) -> Result<Spectrum> {
    check_symmetric(h)?;
    let n = h.dim();
    let mut v = h.entries().clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(n, v.as_mut_slice(), &mut d, &mut e, true);
    ql_implicit(n, &mut d, &mut e, Some(v.as_mut_slice()))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut eigenvectors = DMatrix::<f64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &v.column(src));
    }

    let mut spectrum = Spectrum {
        eigenvalues,
        eigenvectors,
        grid: h.grid().clone(),
    };
    spectrum.align_degenerate_parity();
    spectrum.fix_signs();
    Ok(spectrum)
}

/// Eigenvalues only, ascending. Skips eigenvector accumulation.
pub fn eigenvalues(h: &OperatorMatrix) -> Result<Vec<f64>> {
    check_symmetric(h)?;
    let n = h.dim();
    let mut a = h.entries().clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(n, a.as_mut_slice(), &mut d, &mut e, false);
    ql_implicit(n, &mut d, &mut e, None)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

impl Spectrum {
    fn fix_signs(&mut self) {
        let n = self.eigenvectors.nrows();
        for i in 0..self.len() {
            let col = &mut self.eigenvectors.as_mut_slice()[i * n..(i + 1) * n];
            let peak = col.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            // first component within rounding of the peak decides, so mirror
            // images of equal magnitude resolve deterministically
            if let Some(lead) = col.iter().find(|x| x.abs() >= peak * (1.0 - 1e-8)) {
                if *lead < 0.0 {
                    col.iter_mut().for_each(|x| *x = -*x);
                }
            }
        }
    }

    fn align_degenerate_parity(&mut self) {
        let n = self.eigenvectors.nrows();
        let mut start = 0;
        while start < self.len() {
            let mut end = start + 1;
            while end < self.len()
                && self.eigenvalues[end] - self.eigenvalues[end - 1]
                    < DEGENERACY_GAP * self.eigenvalues[end].abs().max(1.0)
            {
                end += 1;
            }
            let size = end - start;
            if size > 1 {
                let block: Vec<Vec<f64>> = (start..end).map(|i| self.eigenvector(i).to_vec()).collect();
                let reflected: Vec<Vec<f64>> = block.iter().map(|b| self.grid.reflect(b)).collect();
                let mut p = DMatrix::<f64>::zeros(size, size);
                for a in 0..size {
                    for b in 0..size {
                        p[(a, b)] = block[a].iter().zip(&reflected[b]).map(|(x, y)| x * y).sum();
                    }
                }
                let p = (&p + p.transpose()) * 0.5;
                let mut rot = p.clone();
                let mut pd = vec![0.0; size];
                let mut pe = vec![0.0; size];
                tridiagonalize(size, rot.as_mut_slice(), &mut pd, &mut pe, true);
                if ql_implicit(size, &mut pd, &mut pe, Some(rot.as_mut_slice())).is_ok() {
                    // even partners first
                    let mut order: Vec<usize> = (0..size).collect();
                    order.sort_by(|&a, &b| pd[b].total_cmp(&pd[a]));
                    for (slot, &col) in order.iter().enumerate() {
                        let mut mixed = vec![0.0; n];
                        for (a, b) in block.iter().enumerate() {
                            let c = rot[(a, col)];
                            mixed.iter_mut().zip(b).for_each(|(m, x)| *m += c * x);
                        }
                        self.eigenvectors
                            .set_column(start + slot, &nalgebra::DVector::from_vec(mixed));
                    }
                }
            }
            start = end;
        }
    }
}

/// Householder reduction of the symmetric matrix held (column-major) in `v`
/// to tridiagonal form: diagonal in `d`, subdiagonal in `e[1..]`.
///
/// With `accumulate`, `v` ends holding the orthogonal transformation.
fn tridiagonalize(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64], accumulate: bool) {
    // v[(row, col)] = v[row + col * n]; the algorithm reads the lower triangle
    // through `at(k, j)` with k >= j, contiguous in k.
    let at = |row: usize, col: usize| row + col * n;
    if n == 0 {
        return;
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in &d[..i] {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for dk in &mut d[..i] {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            e[..i].iter_mut().for_each(|x| *x = 0.0);

            for j in 0..i {
                f = d[j];
                v[at(j, i)] = f;
                g = e[j] + v[at(j, j)] * f;
                let col = &v[at(0, j)..at(0, j) + n];
                for k in (j + 1)..i {
                    g += col[k] * d[k];
                    e[k] += col[k] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                let col = &mut v[at(0, j)..at(0, j) + n];
                for k in j..i {
                    col[k] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    if !accumulate {
        for j in 0..n {
            d[j] = v[at(j, j)];
        }
        e[0] = 0.0;
        return;
    }

    for i in 0..n - 1 {
        v[at(n - 1, i)] = v[at(i, i)];
        v[at(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[at(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[at(k, i + 1)] * v[at(k, j)];
                }
                for k in 0..=i {
                    v[at(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
        v[at(n - 1, j)] = 0.0;
    }
    v[at(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit-shift QL on the tridiagonal `(d, e)`; rotations are applied to
/// the columns of `v` when given. Eigenvalues are left unsorted in `d`.
fn ql_implicit(n: usize, d: &mut [f64], e: &mut [f64], mut v: Option<&mut [f64]>) -> Result<()> {
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut shift = 0.0;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_SWEEPS {
                    return Err(Error::Numerical(format!(
                        "QL iteration did not converge for eigenvalue {l} of {n} after {MAX_QL_SWEEPS} sweeps (|e| = {:e})",
                        e[l].abs()
                    )));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in &mut d[l + 2..n] {
                    *di -= h;
                }
                shift += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = v.as_deref_mut() {
                        let (lo, hi) = v.split_at_mut((i + 1) * n);
                        let col_i = &mut lo[i * n..];
                        let col_next = &mut hi[..n];
                        for (a, b) in col_i.iter_mut().zip(col_next.iter_mut()) {
                            let t = *b;
                            *b = s * *a + c * t;
                            *a = c * *a - s * t;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += shift;
        e[l] = 0.0;
    }
    Ok(())
}

/// Behaviour of a state under `x -> -x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

impl Parity {
    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
            Parity::Mixed => "mixed",
        }
    }
}

/// Minimal period of a state on a periodic grid of length `2L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Period {
    /// `ψ(x + L) = ψ(x)`: period `L`.
    Half,
    /// `ψ(x + L) = -ψ(x)`: period `2L` and no shorter.
    Full,
    Mixed,
}

impl Period {
    /// Length of the period on an interval of half-length `half_length`.
    pub fn length(self, half_length: f64) -> Option<f64> {
        match self {
            Period::Half => Some(half_length),
            Period::Full => Some(2.0 * half_length),
            Period::Mixed => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateLabel {
    pub parity: Parity,
    /// Only set for periodic grids.
    pub period: Option<Period>,
}

fn classify(overlap: f64) -> (f64, f64) {
    // weights of the +1 and -1 eigenspaces of an orthogonal involution
    ((1.0 + overlap) / 2.0, (1.0 - overlap) / 2.0)
}

/// Label every state even/odd (and its period on periodic grids).
///
/// A state whose weight in both symmetry sectors exceeds 0.1 is `Mixed`.
pub fn classify_parity(spectrum: &Spectrum) -> Vec<StateLabel> {
    let grid = spectrum.grid();
    let shift = (grid.kind() == BasisKind::Periodic).then(|| half_shift_matrix(grid));
    (0..spectrum.len())
        .map(|i| {
            let v = spectrum.eigenvector(i);
            let norm2: f64 = v.iter().map(|x| x * x).sum();
            let reflected = grid.reflect(v);
            let overlap = v.iter().zip(&reflected).map(|(a, b)| a * b).sum::<f64>() / norm2;
            let (even, odd) = classify(overlap);
            let parity = if even > 0.1 && odd > 0.1 {
                Parity::Mixed
            } else if even >= odd {
                Parity::Even
            } else {
                Parity::Odd
            };
            let period = shift.as_ref().map(|s| {
                let sv = s * nalgebra::DVector::from_column_slice(v);
                let overlap = v.iter().zip(sv.iter()).map(|(a, b)| a * b).sum::<f64>() / norm2;
                let (same, flipped) = classify(overlap);
                if same > 0.1 && flipped > 0.1 {
                    Period::Mixed
                } else if same >= flipped {
                    Period::Half
                } else {
                    Period::Full
                }
            });
            StateLabel { parity, period }
        })
        .collect()
}

/// Matrix of `f -> f(· + L)` on the periodic sample space.
fn half_shift_matrix(grid: &Grid) -> DMatrix<f64> {
    let coeffs = coefficients(grid);
    let l = grid.half_length();
    let dim = grid.dim();
    let mut s = DMatrix::<f64>::zeros(dim, dim);
    for (row, &x) in grid.points().iter().enumerate() {
        for col in 0..dim {
            // s_col(x + L): harmonic n picks up exp(i n π / 2); only even n survive
            let mut acc = Complex64::new(0.0, 0.0);
            let theta = std::f64::consts::PI * x / (2.0 * l);
            for (h, &c) in coeffs.harmonics().zip(coeffs.row(col)) {
                if c.norm_sqr() == 0.0 {
                    continue;
                }
                let sign = if (h / 2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                acc += c * sign * Complex64::from_polar(1.0, h as f64 * theta);
            }
            s[(row, col)] = acc.re;
        }
    }
    s
}

/// State `i` on `resolution` uniform points of `[-L, L]`, interpolated from
/// its samples and scaled to unit `L²` norm of the interpolant.
pub fn reconstruct(spectrum: &Spectrum, i: usize, resolution: usize) -> Result<Vec<(f64, f64)>> {
    if i >= spectrum.len() {
        return Err(Error::Index {
            index: i,
            dim: spectrum.len(),
        });
    }
    if resolution < 2 {
        return Err(Error::domain(
            "resolution",
            format!("need at least 2 points, got {resolution}"),
        ));
    }
    let grid = spectrum.grid();
    let coeffs = coefficients(grid);
    let expansion = coeffs.expansion(spectrum.eigenvector(i))?;
    let norm = expansion.norm_squared().sqrt();
    let l = grid.half_length();
    let step = 2.0 * l / (resolution - 1) as f64;
    Ok((0..resolution)
        .map(|t| {
            let x = if t == resolution - 1 { l } else { -l + t as f64 * step };
            (x, expansion.eval(x) / norm)
        })
        .collect())
}

/// Projection coefficients `c_n = Σ_k v_n(x_k) ψ0(x_k)` of a sampled state
/// onto the orthonormal eigenvectors.
pub fn project(spectrum: &Spectrum, psi0: &[Complex64]) -> Result<Vec<Complex64>> {
    let dim = spectrum.grid().dim();
    if psi0.len() != dim {
        return Err(Error::Dimension {
            expected: dim,
            got: psi0.len(),
        });
    }
    Ok((0..spectrum.len())
        .map(|n| spectrum.eigenvector(n).iter().zip(psi0).map(|(&v, &p)| p * v).sum())
        .collect())
}

/// `ψ(x_k, t) = Σ_n exp(-i t E_n / ħ) c_n v_n(x_k)`.
pub fn evolve(spectrum: &Spectrum, psi0: &[Complex64], hbar: f64, t: f64) -> Result<Vec<Complex64>> {
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(Error::domain("hbar", format!("need hbar > 0, got {hbar}")));
    }
    let coeffs = project(spectrum, psi0)?;
    let dim = spectrum.grid().dim();
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for (n, c) in coeffs.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -t * spectrum.eigenvalues[n] / hbar);
        let a = c * phase;
        for (o, &v) in out.iter_mut().zip(spectrum.eigenvector(n)) {
            *o += a * v;
        }
    }
    Ok(out)
}

/// `∫_{-L}^{L} |ψ|²` of the interpolant through complex samples.
pub fn continuum_norm_squared(grid: &Grid, samples: &[Complex64]) -> Result<f64> {
    let coeffs = coefficients(grid);
    let re: Vec<f64> = samples.iter().map(|z| z.re).collect();
    let im: Vec<f64> = samples.iter().map(|z| z.im).collect();
    Ok(coeffs.expansion(&re)?.norm_squared() + coeffs.expansion(&im)?.norm_squared())
}
