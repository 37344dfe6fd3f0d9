//! One function per job mode; each returns the tables it produced.

use std::fmt;

use fraclap_core::{
    assemble, classify_parity, eigendecompose, evolve, find_pms_length, project, reconstruct, wkb_energy, Error,
    HamiltonianSpec, Parity, PmsOptions, PmsResult, Potential, Spectrum, StateLabel,
};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::{ConfigError, JobConfig, Length, Mode};
use crate::output::{fmt_g15, Cell, Table};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// How many times an edge-bound PMS bracket is doubled before giving up.
const PMS_WIDENINGS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    Config(String),
    Numerical(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 1,
            RunError::Numerical(_) => 2,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "config error: {m}"),
            RunError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e.0)
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::ParameterDomain { .. }
            | Error::Parse(_)
            | Error::Unsupported(_)
            | Error::Index { .. }
            | Error::Dimension { .. } => RunError::Config(e.to_string()),
            _ => RunError::Numerical(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, RunError>;

fn spec_for(cfg: &JobConfig, size: usize, potential: Potential) -> HamiltonianSpec {
    HamiltonianSpec {
        alpha: cfg.alpha,
        diffusion: cfg.diffusion,
        hbar: cfg.hbar,
        potential,
        kind: cfg.basis,
        size,
        representation: cfg.representation,
    }
}

/// PMS search that doubles the bracket outward while the minimum sits on
/// an edge.
pub fn pms_with_widening(spec: &HamiltonianSpec, cfg: &JobConfig) -> Result<PmsResult> {
    let mut options = PmsOptions {
        bracket: cfg.pms_bracket,
        tol: cfg.pms_tol,
        ..PmsOptions::default()
    };
    for _ in 0..=PMS_WIDENINGS {
        let r = find_pms_length(spec, options)?;
        if r.converged {
            return Ok(r);
        }
        let (lo, hi) = options.bracket;
        options.bracket = if r.length >= hi { (lo, 2.0 * hi) } else { (0.5 * lo, hi) };
    }
    Err(RunError::Numerical(format!(
        "trace minimum stays on the edge of the widened bracket ({}, {}); set pms_lo/pms_hi",
        fmt_g15(options.bracket.0),
        fmt_g15(options.bracket.1)
    )))
}

/// Half-length for one solve and, when searched, the PMS result.
fn resolve_length(spec: &HamiltonianSpec, cfg: &JobConfig) -> Result<(f64, Option<PmsResult>)> {
    match cfg.length {
        Length::Fixed(l) => Ok((l, None)),
        Length::Pms => {
            let r = pms_with_widening(spec, cfg)?;
            Ok((r.length, Some(r)))
        }
    }
}

fn metadata(cfg: &JobConfig, size: &str) -> Vec<(String, String)> {
    vec![
        ("mode".into(), cfg.mode.name().into()),
        ("basis".into(), cfg.basis.name().into()),
        ("alpha".into(), fmt_g15(cfg.alpha)),
        ("D".into(), fmt_g15(cfg.diffusion)),
        ("hbar".into(), fmt_g15(cfg.hbar)),
        ("N".into(), size.into()),
        ("potential".into(), cfg.potential_text.clone()),
        (
            "representation".into(),
            match cfg.representation {
                fraclap_core::Representation::Position => "position".into(),
                fraclap_core::Representation::Momentum => "momentum".into(),
            },
        ),
        ("version".into(), format!("fraclap {VERSION}")),
        (
            "precision".into(),
            "double; values printed to 15 significant digits".into(),
        ),
    ]
}

fn length_metadata(table: &mut Table, length: f64, pms: &Option<PmsResult>) {
    match pms {
        Some(r) => {
            table.meta("L_pms", fmt_g15(length));
            table.meta("trace_at_L_pms", fmt_g15(r.trace_at_min));
        }
        None => table.meta("L", fmt_g15(length)),
    }
}

fn parity_text(label: &StateLabel) -> &'static str {
    label.parity.as_str()
}

fn period_cell(label: &StateLabel, half_length: f64) -> Cell {
    match label.period {
        Some(p) => match p.length(half_length) {
            Some(v) => Cell::Num(v),
            None => Cell::Text("mixed".into()),
        },
        None => Cell::Empty,
    }
}

/// Eigendecomposition with the lowest `count` eigenvalues refined.
fn solve(spec: &HamiltonianSpec, length: f64, count: usize) -> Result<Spectrum> {
    let h = assemble(spec, length)?;
    let s = eigendecompose(&h)?;
    let residual = s.max_relative_residual(&h);
    if !(residual <= 1e-9) {
        return Err(RunError::Numerical(format!(
            "eigenpair residual {residual:e} exceeds 1e-9"
        )));
    }
    Ok(s.refine(&h, count)?)
}

pub fn run_spectrum(cfg: &JobConfig) -> Result<Vec<Table>> {
    let spec = spec_for(cfg, cfg.size(), cfg.potential.clone());
    let (length, pms) = resolve_length(&spec, cfg)?;
    let s = solve(&spec, length, cfg.n_states)?;
    let labels = classify_parity(&s);
    let wkb = spec.wkb_model();

    let mut table = Table::new(
        "spectrum",
        metadata(cfg, &cfg.size().to_string()),
        &["n", "energy", "wkb_energy", "parity", "period"],
    );
    length_metadata(&mut table, length, &pms);
    for n in 0..cfg.n_states.min(s.len()) {
        table.push(vec![
            n.into(),
            s.eigenvalues()[n].into(),
            wkb.map(|m| wkb_energy(&m, n)).into(),
            parity_text(&labels[n]).into(),
            period_cell(&labels[n], length),
        ]);
    }
    let mut tables = vec![table];

    if !cfg.wavefunctions.is_empty() {
        let mut columns = vec!["x".to_string()];
        let mut curves = Vec::new();
        for &i in &cfg.wavefunctions {
            curves.push(reconstruct(&s, i, cfg.resolution)?);
            columns.push(format!("psi{i}"));
        }
        let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
        let mut wf = Table::new("wavefunctions", metadata(cfg, &cfg.size().to_string()), &cols);
        length_metadata(&mut wf, length, &pms);
        wf.meta("normalization", "unit L2 norm of the interpolant on [-L, L]");
        for r in 0..cfg.resolution {
            let mut row = vec![Cell::Num(curves[0][r].0)];
            row.extend(curves.iter().map(|c| Cell::Num(c[r].1)));
            wf.push(row);
        }
        tables.push(wf);
    }
    Ok(tables)
}

pub fn run_convergence(cfg: &JobConfig) -> Result<Vec<Table>> {
    let rows: Vec<(usize, f64, Vec<f64>)> = cfg
        .sizes
        .par_iter()
        .map(|&n| {
            let spec = spec_for(cfg, n, cfg.potential.clone());
            let (length, _) = resolve_length(&spec, cfg)?;
            let s = solve(&spec, length, cfg.n_states)?;
            Ok((n, length, s.eigenvalues()[..cfg.n_states.min(s.len())].to_vec()))
        })
        .collect::<Result<_>>()?;

    let sizes: Vec<String> = cfg.sizes.iter().map(usize::to_string).collect();
    let mut columns = vec!["N".to_string(), "L_used".to_string()];
    columns.extend((0..cfg.n_states).map(|i| format!("e{i}")));
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut table = Table::new("convergence", metadata(cfg, &sizes.join(" ")), &cols);
    table.meta(
        "L",
        match cfg.length {
            Length::Fixed(l) => fmt_g15(l),
            Length::Pms => "L_pms per N".into(),
        },
    );
    for (n, l, e) in rows {
        let mut row = vec![Cell::from(n), Cell::from(l)];
        row.extend((0..cfg.n_states).map(|i| Cell::from(e.get(i).copied())));
        table.push(row);
    }
    Ok(vec![table])
}

pub fn run_pms_scan(cfg: &JobConfig) -> Result<Vec<Table>> {
    let spec = spec_for(cfg, cfg.size(), cfg.potential.clone());
    let r = pms_with_widening(&spec, cfg)?;
    let mut table = Table::new("pms_scan", metadata(cfg, &cfg.size().to_string()), &["L", "trace"]);
    table.meta("L_pms", fmt_g15(r.length));
    table.meta("trace_at_L_pms", fmt_g15(r.trace_at_min));
    for (l, t) in &r.scan {
        table.push(vec![(*l).into(), (*t).into()]);
    }
    Ok(vec![table])
}

const SWEEP_BRANCHES: [(&str, Parity, usize); 7] = [
    ("a0", Parity::Even, 0),
    ("b1", Parity::Odd, 0),
    ("a1", Parity::Even, 1),
    ("b2", Parity::Odd, 1),
    ("a2", Parity::Even, 2),
    ("b3", Parity::Odd, 2),
    ("a3", Parity::Even, 3),
];

/// Overlaps below this, or a runner-up within `AMBIGUITY_MARGIN`, are
/// reported instead of assigned.
const MIN_OVERLAP: f64 = 0.5;
const AMBIGUITY_MARGIN: f64 = 0.1;

/// Branch assignment at one sweep point: state index per branch, or the
/// competing candidates when tracking is ambiguous.
#[derive(Debug, Clone, PartialEq)]
pub enum Assignment {
    State(usize),
    Ambiguous(Vec<(usize, f64)>),
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Label the lowest states by parity class and ascending order.
fn initial_assignment(labels: &[StateLabel]) -> Vec<Assignment> {
    SWEEP_BRANCHES
        .iter()
        .map(|&(_, parity, rank)| {
            labels
                .iter()
                .enumerate()
                .filter(|(_, l)| l.parity == parity)
                .nth(rank)
                .map_or(Assignment::Ambiguous(Vec::new()), |(i, _)| Assignment::State(i))
        })
        .collect()
}

/// Follow each branch to the state of the same parity with the largest
/// eigenvector overlap.
pub fn track(previous: &Spectrum, prev: &[Assignment], next: &Spectrum, labels: &[StateLabel]) -> Vec<Assignment> {
    let mut taken = vec![false; next.len()];
    let mut out = Vec::with_capacity(prev.len());
    for (b, assignment) in prev.iter().enumerate() {
        let parity = SWEEP_BRANCHES[b].1;
        let Assignment::State(i) = *assignment else {
            // lost branch: restart from parity order
            out.push(initial_assignment(labels)[b].clone());
            continue;
        };
        let v = previous.eigenvector(i);
        let mut scores: Vec<(usize, f64)> = (0..next.len())
            .filter(|&j| labels[j].parity == parity && !taken[j])
            .map(|j| (j, dot(v, next.eigenvector(j)).abs()))
            .collect();
        scores.sort_by(|a, b| b.1.total_cmp(&a.1));
        match scores.as_slice() {
            [(j, best), rest @ ..]
                if *best >= MIN_OVERLAP && rest.first().is_none_or(|r| best - r.1 > AMBIGUITY_MARGIN) =>
            {
                taken[*j] = true;
                out.push(Assignment::State(*j));
            }
            _ => out.push(Assignment::Ambiguous(scores.into_iter().take(2).collect())),
        }
    }
    out
}

pub fn run_q_sweep(cfg: &JobConfig) -> Result<Vec<Table>> {
    let sweep = cfg.sweep.expect("validated");
    let qs = sweep.values();
    let need = 8;
    let solved: Vec<(Spectrum, Vec<StateLabel>)> = qs
        .par_iter()
        .map(|&q| {
            let spec = spec_for(cfg, cfg.size(), Potential::Mathieu { q });
            let (length, _) = resolve_length(&spec, cfg)?;
            let s = solve(&spec, length, need)?;
            let labels = classify_parity(&s);
            Ok((s, labels))
        })
        .collect::<Result<_>>()?;

    let names: Vec<&str> = SWEEP_BRANCHES.iter().map(|b| b.0).collect();
    let mut columns = vec!["q"];
    columns.extend(&names);
    let mut meta = metadata(cfg, &cfg.size().to_string());
    for (k, v) in meta.iter_mut() {
        if k == "potential" {
            *v = format!(
                "mathieu(q), q from {} to {} in {} steps",
                fmt_g15(sweep.q_min),
                fmt_g15(sweep.q_max),
                sweep.steps
            );
        }
    }
    let mut table = Table::new("sweep", meta, &columns);
    if let Length::Fixed(l) = cfg.length {
        table.meta("L", fmt_g15(l));
    }
    table.meta("tracking", "eigenvector overlap within each parity class");

    let mut assignment = initial_assignment(&solved[0].1);
    for (k, &q) in qs.iter().enumerate() {
        let (s, labels) = &solved[k];
        if k > 0 {
            assignment = track(&solved[k - 1].0, &assignment, s, labels);
        }
        let mut row = vec![Cell::Num(q)];
        for (b, a) in assignment.iter().enumerate() {
            match a {
                Assignment::State(i) => row.push(Cell::Num(s.eigenvalues()[*i])),
                Assignment::Ambiguous(candidates) => {
                    let text: Vec<String> = candidates
                        .iter()
                        .map(|(j, o)| format!("{} (overlap {})", fmt_g15(s.eigenvalues()[*j]), fmt_g15(*o)))
                        .collect();
                    table.meta(format!("ambiguous q={} {}", fmt_g15(q), names[b]), text.join(" | "));
                    row.push(Cell::Empty);
                }
            }
        }
        table.push(row);
    }
    Ok(vec![table])
}

pub fn run_evolve(cfg: &JobConfig) -> Result<Vec<Table>> {
    let spec = spec_for(cfg, cfg.size(), cfg.potential.clone());
    let (length, pms) = resolve_length(&spec, cfg)?;
    let s = solve(&spec, length, 0)?;
    let expr = cfg.psi0.as_ref().expect("validated");
    let psi0: Vec<Complex64> = s
        .grid()
        .points()
        .iter()
        .map(|&x| expr.evaluate(x).map(|v| Complex64::new(v, 0.0)))
        .collect::<std::result::Result<_, _>>()?;
    let norm0: f64 = project(&s, &psi0)?.iter().map(|c| c.norm_sqr()).sum();

    let mut tables = Vec::new();
    let mut norms = Table::new("evolve_norm", metadata(cfg, &cfg.size().to_string()), &["t", "norm"]);
    length_metadata(&mut norms, length, &pms);
    for &t in &cfg.times {
        let psi = evolve(&s, &psi0, cfg.hbar, t)?;
        let norm: f64 = project(&s, &psi)?.iter().map(|c| c.norm_sqr()).sum();
        let mut table = Table::new(
            format!("evolve_t{}", fmt_g15(t)),
            metadata(cfg, &cfg.size().to_string()),
            &["x", "re", "im", "abs2"],
        );
        length_metadata(&mut table, length, &pms);
        table.meta("t", fmt_g15(t));
        table.meta("psi0", expr.source());
        table.meta("coefficient_norm", fmt_g15(norm));
        for (x, z) in s.grid().points().iter().zip(&psi) {
            table.push(vec![(*x).into(), z.re.into(), z.im.into(), z.norm_sqr().into()]);
        }
        tables.push(table);
        norms.push(vec![t.into(), norm.into()]);
    }
    norms.meta("initial_norm", fmt_g15(norm0));
    tables.push(norms);
    Ok(tables)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fit {
    pub intercept: f64,
    pub slope: f64,
    pub max_residual: f64,
}

/// Ordinary least squares of `E_n` on `n`.
pub fn run_fit(levels: &[(f64, f64)]) -> std::result::Result<Fit, String> {
    if levels.len() < 3 {
        return Err(format!("need at least 3 levels, got {}", levels.len()));
    }
    let m = levels.len() as f64;
    let mean_n = levels.iter().map(|l| l.0).sum::<f64>() / m;
    let mean_e = levels.iter().map(|l| l.1).sum::<f64>() / m;
    let sxx: f64 = levels.iter().map(|l| (l.0 - mean_n).powi(2)).sum();
    if sxx == 0.0 {
        return Err("degenerate design: all n are equal".into());
    }
    let sxy: f64 = levels.iter().map(|l| (l.0 - mean_n) * (l.1 - mean_e)).sum();
    let slope = sxy / sxx;
    let intercept = mean_e - slope * mean_n;
    let max_residual = levels
        .iter()
        .map(|l| (l.1 - intercept - slope * l.0).abs())
        .fold(0.0, f64::max);
    Ok(Fit {
        intercept,
        slope,
        max_residual,
    })
}

pub fn run_wkb_compare(cfg: &JobConfig) -> Result<Vec<Table>> {
    let mut tables = run_spectrum(cfg)?;
    let spectrum = &tables[0];
    let (n_col, e_col, w_col) = (0, 1, 2);
    let mut computed = Vec::new();
    let mut wkb = Vec::new();
    for row in spectrum.rows.iter().skip(cfg.fit_from) {
        let (Cell::Int(n), Cell::Num(e), Cell::Num(w)) = (&row[n_col], &row[e_col], &row[w_col]) else {
            return Err(RunError::Numerical("spectrum row without WKB value".into()));
        };
        computed.push((*n as f64, *e));
        wkb.push((*n as f64, *w));
    }
    let mut fit = Table::new(
        "fit",
        spectrum.metadata.clone(),
        &["series", "intercept", "slope", "max_residual"],
    );
    fit.meta(
        "levels",
        format!("{}..{}", cfg.fit_from, cfg.fit_from + computed.len() - 1),
    );
    for (name, data) in [("computed", &computed), ("wkb", &wkb)] {
        let f = run_fit(data).map_err(RunError::Numerical)?;
        fit.push(vec![
            name.into(),
            f.intercept.into(),
            f.slope.into(),
            f.max_residual.into(),
        ]);
    }
    tables.push(fit);
    Ok(tables)
}

pub fn run(cfg: &JobConfig) -> Result<Vec<Table>> {
    match cfg.mode {
        Mode::Spectrum => run_spectrum(cfg),
        Mode::Convergence => run_convergence(cfg),
        Mode::PmsScan => run_pms_scan(cfg),
        Mode::QSweep => run_q_sweep(cfg),
        Mode::Evolve => run_evolve(cfg),
        Mode::WkbCompare => run_wkb_compare(cfg),
    }
}
