//! Hamiltonian assembly `H = D ħ^α |p̂|^α + V(x)` and the choice of box
//! half-length by minimizing the trace.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::basis::{make_grid, BasisKind, Grid};
use crate::error::{Error, Result};
use crate::numeric::{cos_pi_ratio, CompensatedSum};
use crate::operator::{fractional_laplacian_matrix, OperatorMatrix};
use crate::potential::{parse, PotentialExpr};
use crate::reference::WkbModel;

/// The potential term `V(x)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    Free,
    /// `q² |x|^β`
    PowerLaw {
        strength: f64,
        exponent: f64,
    },
    /// `2q cos 2x`
    Mathieu {
        q: f64,
    },
    Expr(PotentialExpr),
}

impl Potential {
    pub fn oscillator(exponent: f64) -> Self {
        Potential::PowerLaw {
            strength: 1.0,
            exponent,
        }
    }

    pub fn evaluate(&self, x: f64) -> Result<f64> {
        match self {
            Potential::Free => Ok(0.0),
            Potential::PowerLaw { strength, exponent } => {
                let r = if exponent.fract() == 0.0 && exponent.abs() < 64.0 {
                    x.abs().powi(*exponent as i32)
                } else {
                    x.abs().powf(*exponent)
                };
                let v = strength * strength * r;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::Evaluation {
                        x,
                        reason: format!("non-finite value {v}"),
                    })
                }
            }
            Potential::Mathieu { q } => Ok(2.0 * q * (2.0 * x).cos()),
            Potential::Expr(e) => e.evaluate(x),
        }
    }

    /// `V(x_k)` for every grid point.
    pub fn on_grid(&self, grid: &Grid) -> Result<Vec<f64>> {
        if let Potential::Mathieu { q } = self {
            if grid.half_length() == PI {
                // 2x_k = 4πk/den: reduce the angle exactly
                let den = grid.denominator();
                return Ok((0..grid.dim())
                    .map(|i| 2.0 * q * cos_pi_ratio(4 * grid.label(i), den))
                    .collect());
            }
        }
        grid.points().iter().map(|&x| self.evaluate(x)).collect()
    }

    /// `(q, β)` for the power-law family.
    pub fn power_law(&self) -> Option<(f64, f64)> {
        match *self {
            Potential::PowerLaw { strength, exponent } => Some((strength, exponent)),
            _ => None,
        }
    }

    /// Half-length imposed by the potential itself, if any.
    pub fn natural_half_length(&self) -> Option<f64> {
        match self {
            Potential::Mathieu { .. } => Some(PI),
            _ => None,
        }
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::Free => write!(f, "free"),
            Potential::PowerLaw { strength, exponent } if *strength == 1.0 => write!(f, "oscillator({exponent})"),
            Potential::PowerLaw { strength, exponent } => write!(f, "oscillator({exponent}, {strength})"),
            Potential::Mathieu { q } => write!(f, "mathieu({q})"),
            Potential::Expr(e) => write!(f, "{}", e.source()),
        }
    }
}

fn preset_args(text: &str, name: &str) -> Option<Vec<String>> {
    let rest = text.strip_prefix(name)?.trim_start();
    let inner = rest.strip_prefix('(')?.strip_suffix(')')?;
    Some(inner.split(',').map(|s| s.trim().to_string()).collect())
}

fn preset_number(arg: &str, what: &'static str) -> Result<f64> {
    arg.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::domain(what, format!("not a finite number: `{arg}`")))
}

/// Accepts `free`, `oscillator(β)`, `oscillator(β, q)`, `mathieu(q)`, or any
/// expression in `x`.
impl FromStr for Potential {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let text = s.trim();
        if text == "free" || text == "0" {
            return Ok(Potential::Free);
        }
        if let Some(args) = preset_args(text, "oscillator") {
            let exponent = preset_number(&args[0], "beta")?;
            let strength = match args.len() {
                1 => 1.0,
                2 => preset_number(&args[1], "q")?,
                _ => return Err(Error::domain("potential", "oscillator takes (beta) or (beta, q)")),
            };
            if exponent <= 0.0 {
                return Err(Error::domain("beta", format!("need beta > 0, got {exponent}")));
            }
            return Ok(Potential::PowerLaw { strength, exponent });
        }
        if let Some(args) = preset_args(text, "mathieu") {
            if args.len() != 1 {
                return Err(Error::domain("potential", "mathieu takes a single q"));
            }
            return Ok(Potential::Mathieu {
                q: preset_number(&args[0], "q")?,
            });
        }
        Ok(Potential::Expr(parse(text)?))
    }
}

/// Whether the unknown is sampled in position or in momentum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Representation {
    #[default]
    Position,
    Momentum,
}

impl FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "position" => Ok(Representation::Position),
            "momentum" => Ok(Representation::Momentum),
            other => Err(Error::domain(
                "representation",
                format!("expected position|momentum, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    pub alpha: f64,
    pub diffusion: f64,
    pub hbar: f64,
    pub potential: Potential,
    pub kind: BasisKind,
    pub size: usize,
    pub representation: Representation,
}

impl HamiltonianSpec {
    /// `D = ħ = 1`, position representation.
    pub fn new(alpha: f64, potential: Potential, kind: BasisKind, size: usize) -> Self {
        HamiltonianSpec {
            alpha,
            diffusion: 1.0,
            hbar: 1.0,
            potential,
            kind,
            size,
            representation: Representation::Position,
        }
    }

    pub fn with_representation(mut self, representation: Representation) -> Self {
        self.representation = representation;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha", self.alpha), ("D", self.diffusion), ("hbar", self.hbar)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(name, format!("must be finite and > 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn grid(&self, half_length: f64) -> Result<Grid> {
        make_grid(self.kind, self.size, half_length)
    }

    /// WKB model matching a power-law potential.
    pub fn wkb_model(&self) -> Option<WkbModel> {
        let (q, beta) = self.potential.power_law()?;
        WkbModel::new(self.alpha, beta, self.diffusion, q, self.hbar).ok()
    }
}

/// `H_kj = D ħ^α [|p̂|^α]_kj + δ_kj V(x_k)`; dispatches to
/// [`momentum_space_oscillator`] in the momentum representation.
pub fn assemble(spec: &HamiltonianSpec, half_length: f64) -> Result<OperatorMatrix> {
    spec.validate()?;
    if spec.representation == Representation::Momentum {
        return momentum_space_oscillator(spec, half_length);
    }
    let grid = spec.grid(half_length)?;
    let potential = spec.potential.on_grid(&grid)?;
    let mut h = fractional_laplacian_matrix(&grid, spec.alpha)?;
    h.scale_in_place(spec.diffusion * spec.hbar.powf(spec.alpha));
    h.add_diagonal(&potential);
    h.relabel(format!("H[alpha={}, V={}]", spec.alpha, spec.potential));
    Ok(h)
}

/// The oscillator `D|p|^α + q² x²` with `p` as the sampled variable:
/// `x² = -ħ² d²/dp²` becomes the collocation matrix of the squared conjugate
/// variable, and `D|p_k|^α` sits on the diagonal.
pub fn momentum_space_oscillator(spec: &HamiltonianSpec, half_length: f64) -> Result<OperatorMatrix> {
    spec.validate()?;
    let q = match spec.potential.power_law() {
        Some((q, 2.0)) => q,
        Some((_, beta)) => {
            return Err(Error::Unsupported(format!(
                "momentum representation needs a quadratic potential, got |x|^{beta}"
            )))
        }
        None => {
            return Err(Error::Unsupported(format!(
                "momentum representation needs a quadratic potential, got `{}`",
                spec.potential
            )))
        }
    };
    let grid = spec.grid(half_length)?;
    let kinetic: Vec<f64> = grid
        .points()
        .iter()
        .map(|p| spec.diffusion * p.abs().powf(spec.alpha))
        .collect();
    let mut h = fractional_laplacian_matrix(&grid, 2.0)?;
    h.scale_in_place(q * q * spec.hbar * spec.hbar);
    h.add_diagonal(&kinetic);
    h.relabel(format!("H~[alpha={}, momentum]", spec.alpha));
    Ok(h)
}

/// `Σ_k H_kk`.
pub fn trace(h: &OperatorMatrix) -> f64 {
    let m = h.entries();
    (0..h.dim()).map(|i| m[(i, i)]).collect::<CompensatedSum>().value()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PmsResult {
    pub length: f64,
    pub trace_at_min: f64,
    /// Coarse pre-scan `(L, trace)` pairs.
    pub scan: Vec<(f64, f64)>,
    /// `false` when the scan minimum sits on a bracket edge.
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmsOptions {
    pub bracket: (f64, f64),
    pub tol: f64,
    pub scan_points: usize,
}

impl Default for PmsOptions {
    fn default() -> Self {
        PmsOptions {
            bracket: (0.5, 40.0),
            tol: 1e-3,
            scan_points: 32,
        }
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimization of a unimodal function on `[a, b]`, stopping
/// once the bracket is narrower than `tol`.
pub fn golden_section(mut a: f64, mut b: f64, tol: f64, mut f: impl FnMut(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc <= fd { (c, fc) } else { (d, fd) })
}

/// Uniform pre-scan of `objective` over the bracket followed by golden
/// section around the best scan point.
pub fn pms_search(options: PmsOptions, mut objective: impl FnMut(f64) -> Result<f64>) -> Result<PmsResult> {
    let (lo, hi) = options.bracket;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::domain("bracket", format!("need 0 < lo < hi, got ({lo}, {hi})")));
    }
    if !(options.tol > 0.0) {
        return Err(Error::domain("tol", format!("need tol > 0, got {}", options.tol)));
    }
    let count = options.scan_points.max(3);
    let mut checked = |l: f64| -> Result<f64> {
        let t = objective(l)?;
        if t.is_finite() {
            Ok(t)
        } else {
            Err(Error::Evaluation {
                x: l,
                reason: format!("trace is not finite ({t})"),
            })
        }
    };
    let mut scan = Vec::with_capacity(count);
    for i in 0..count {
        let l = lo + (hi - lo) * i as f64 / (count - 1) as f64;
        scan.push((l, checked(l)?));
    }
    let best = (0..count)
        .min_by(|&a, &b| scan[a].1.total_cmp(&scan[b].1))
        .expect("scan is nonempty");
    if best == 0 || best == count - 1 {
        return Ok(PmsResult {
            length: scan[best].0,
            trace_at_min: scan[best].1,
            scan,
            converged: false,
        });
    }
    let (length, trace_at_min) = golden_section(scan[best - 1].0, scan[best + 1].0, options.tol, &mut checked)?;
    Ok(PmsResult {
        length,
        trace_at_min,
        scan,
        converged: true,
    })
}

/// `L_PMS`: the half-length minimizing `trace(H(L))`.
pub fn find_pms_length(spec: &HamiltonianSpec, options: PmsOptions) -> Result<PmsResult> {
    spec.validate()?;
    pms_search(options, |l| assemble(spec, l).map(|h| trace(&h)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::eigenvalues;
    use nalgebra::DMatrix;

    fn oscillator(alpha: f64, size: usize) -> HamiltonianSpec {
        HamiltonianSpec::new(alpha, Potential::oscillator(2.0), BasisKind::Dirichlet, size)
    }

    #[test]
    fn free_hamiltonian_is_scaled_laplacian() {
        let mut spec = HamiltonianSpec::new(1.5, Potential::Free, BasisKind::Neumann, 4);
        spec.diffusion = 0.7;
        spec.hbar = 1.3;
        let h = assemble(&spec, 2.0).unwrap();
        let mut m = fractional_laplacian_matrix(&spec.grid(2.0).unwrap(), 1.5).unwrap();
        m.scale_in_place(0.7 * 1.3f64.powf(1.5));
        assert_eq!(h.entries(), m.entries());
    }

    #[test]
    fn trace_of_identity() {
        let g = make_grid(BasisKind::Periodic, 2, 1.0).unwrap();
        let id = OperatorMatrix::new(g, DMatrix::identity(5, 5), "I").unwrap();
        assert_eq!(trace(&id), 5.0);
    }

    #[test]
    fn periodic_laplacian_trace_closed_form() {
        for (n, l, alpha) in [(3usize, 1.0, 1.5), (6, PI, 2.5), (10, 2.2, 1.0)] {
            let spec = HamiltonianSpec::new(alpha, Potential::Free, BasisKind::Periodic, n);
            let t = trace(&assemble(&spec, l).unwrap());
            let want: f64 = 2.0 * (1..=n).map(|m| (m as f64 * PI / l).powf(alpha)).sum::<f64>();
            assert!((t - want).abs() <= 1e-12 * want, "{t} vs {want}");
        }
    }

    #[test]
    fn oscillator_trace_has_interior_minimum() {
        let spec = oscillator(2.0, 10);
        let traces: Vec<f64> = (0..=36)
            .map(|i| trace(&assemble(&spec, 2.0 + 0.5 * i as f64).unwrap()))
            .collect();
        let best = (0..traces.len())
            .min_by(|&a, &b| traces[a].total_cmp(&traces[b]))
            .unwrap();
        assert!(best > 0 && best < traces.len() - 1);
        assert!(traces[..=best].windows(2).all(|w| w[1] < w[0]));
        assert!(traces[best..].windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn trace_equals_eigenvalue_sum() {
        for kind in BasisKind::ALL {
            let spec = HamiltonianSpec::new(1.5, Potential::oscillator(2.0), kind, 6);
            let h = assemble(&spec, 3.0).unwrap();
            let sum: f64 = eigenvalues(&h).unwrap().iter().sum();
            assert!((trace(&h) - sum).abs() <= 1e-9 * sum.abs());
        }
    }

    #[test]
    fn assembled_hamiltonian_is_symmetric() {
        for kind in BasisKind::ALL {
            let spec = HamiltonianSpec::new(2.5, "x^4 - 0.5*abs(x)".parse().unwrap(), kind, 7);
            assert!(assemble(&spec, 2.5).unwrap().max_asymmetry() <= 1e-13);
        }
    }

    #[test]
    fn evaluation_error_names_grid_point() {
        let spec = HamiltonianSpec::new(2.0, "1/x".parse().unwrap(), BasisKind::Periodic, 3);
        match assemble(&spec, 1.0) {
            Err(Error::Evaluation { x, .. }) => assert_eq!(x, 0.0),
            other => panic!("expected evaluation error, got {other:?}"),
        }
    }

    #[test]
    fn invalid_parameters_rejected() {
        let mut spec = oscillator(1.5, 5);
        spec.hbar = 0.0;
        assert!(matches!(
            assemble(&spec, 1.0),
            Err(Error::ParameterDomain { name: "hbar", .. })
        ));
        assert!(assemble(&oscillator(-1.0, 5), 1.0).is_err());
    }

    #[test]
    fn table_one_small_basis_at_published_length() {
        let e = eigenvalues(&assemble(&oscillator(1.5, 10), 4.366).unwrap()).unwrap();
        for (got, want) in e.iter().zip([1.010_039_766, 2.710_385_528, 4.183_298_85]) {
            assert!((got - want).abs() <= 1e-6, "{got} vs {want}");
        }
    }

    #[test]
    fn pms_recovers_published_length() {
        let r = find_pms_length(&oscillator(1.5, 10), PmsOptions::default()).unwrap();
        assert!(r.converged);
        assert_eq!(r.scan.len(), 32);
        assert!((r.length / 4.366 - 1.0).abs() < 5e-3, "L_pms = {}", r.length);
        assert!(r.scan.iter().all(|&(_, t)| r.trace_at_min <= t + 1e-9 * t.abs()));
    }

    #[test]
    fn pms_oscillator_alpha_two() {
        let spec = oscillator(2.0, 10);
        let r = find_pms_length(&spec, PmsOptions::default()).unwrap();
        let e = eigenvalues(&assemble(&spec, r.length).unwrap()).unwrap();
        assert!((e[0] - 1.0).abs() <= 1e-9, "E0 - 1 = {:e}", e[0] - 1.0);
        for (n, en) in e.iter().take(5).enumerate() {
            assert!((en - (2 * n + 1) as f64).abs() <= 1e-6);
        }
    }

    #[test]
    fn ground_state_sensitivity_shrinks_with_basis_size() {
        // E0 keeps falling slowly with L for alpha = 3/2; its slope at L_PMS
        // goes to zero only as N grows
        let slopes: Vec<f64> = [10usize, 50, 100]
            .iter()
            .map(|&n| {
                let spec = oscillator(1.5, n);
                let l = find_pms_length(&spec, PmsOptions::default()).unwrap().length;
                let e = |l: f64| eigenvalues(&assemble(&spec, l).unwrap()).unwrap()[0];
                ((e(l + 1e-3) - e(l - 1e-3)) / 2e-3).abs()
            })
            .collect();
        assert!(slopes.windows(2).all(|w| w[1] < 0.5 * w[0]), "{slopes:?}");
        assert!(slopes[2] < 2e-4, "{slopes:?}");
    }

    #[test]
    fn pms_reports_edge_minimum() {
        let r = pms_search(
            PmsOptions {
                bracket: (1.0, 2.0),
                ..PmsOptions::default()
            },
            |l| Ok(l * l),
        )
        .unwrap();
        assert!(!r.converged);
        assert_eq!(r.length, 1.0);
    }

    #[test]
    fn pms_rejects_non_finite_objective() {
        let r = pms_search(PmsOptions::default(), |l| Ok(if l > 10.0 { f64::NAN } else { l }));
        assert!(matches!(r, Err(Error::Evaluation { .. })));
    }

    #[test]
    fn golden_section_on_parabola() {
        let (x, fx) = golden_section(0.0, 5.0, 1e-8, |x| Ok((x - 1.7).powi(2) + 3.0)).unwrap();
        assert!((x - 1.7).abs() < 1e-7);
        assert!((fx - 3.0).abs() < 1e-13);
    }

    #[test]
    fn momentum_oscillator_alpha_two_matches_position() {
        let spec = oscillator(2.0, 20).with_representation(Representation::Momentum);
        let r = find_pms_length(&spec, PmsOptions::default()).unwrap();
        let e = eigenvalues(&assemble(&spec, r.length).unwrap()).unwrap();
        for (n, en) in e.iter().take(4).enumerate() {
            assert!((en - (2 * n + 1) as f64).abs() <= 1e-8, "n={n}: {en}");
        }
    }

    #[test]
    fn momentum_oscillator_needs_quadratic_potential() {
        let spec = HamiltonianSpec::new(1.5, Potential::oscillator(4.0), BasisKind::Dirichlet, 5)
            .with_representation(Representation::Momentum);
        assert!(matches!(assemble(&spec, 2.0), Err(Error::Unsupported(_))));
        let spec = HamiltonianSpec::new(1.5, Potential::Mathieu { q: 1.0 }, BasisKind::Dirichlet, 5);
        assert!(matches!(
            momentum_space_oscillator(&spec, 2.0),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn mathieu_exact_angles_match_direct_cosine() {
        let g = make_grid(BasisKind::Periodic, 7, PI).unwrap();
        let v = Potential::Mathieu { q: 1.3 }.on_grid(&g).unwrap();
        for (vk, x) in v.iter().zip(g.points()) {
            assert!((vk - 2.6 * (2.0 * x).cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn potential_presets_parse() {
        assert_eq!("free".parse::<Potential>().unwrap(), Potential::Free);
        assert_eq!(
            "oscillator(2)".parse::<Potential>().unwrap(),
            Potential::oscillator(2.0)
        );
        assert_eq!(
            "oscillator(4, 0.5)".parse::<Potential>().unwrap(),
            Potential::PowerLaw {
                strength: 0.5,
                exponent: 4.0
            }
        );
        assert_eq!(
            "mathieu(1)".parse::<Potential>().unwrap(),
            Potential::Mathieu { q: 1.0 }
        );
        assert!(matches!("x^2".parse::<Potential>().unwrap(), Potential::Expr(_)));
        assert!("oscillator(-1)".parse::<Potential>().is_err());
        assert!("mathieu(1, 2)".parse::<Potential>().is_err());
        assert!("x +".parse::<Potential>().is_err());
        for p in [
            "free",
            "oscillator(1.5)",
            "oscillator(4, 0.5)",
            "mathieu(2)",
            "x^4 - 0.5*abs(x)",
        ] {
            assert_eq!(p.parse::<Potential>().unwrap().to_string(), p);
        }
    }

    #[test]
    fn power_law_matches_expression() {
        let preset = Potential::oscillator(4.0);
        let expr: Potential = "x^4".parse().unwrap();
        for x in [-2.5, -0.3, 0.0, 1.7] {
            assert_eq!(preset.evaluate(x).unwrap(), expr.evaluate(x).unwrap());
        }
    }
}
