//! Flat `key = value` job configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use fraclap_core::{BasisKind, Potential, PotentialExpr, Representation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

macro_rules! bail {
    ($($arg:tt)*) => { return Err(ConfigError(format!($($arg)*))) };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Spectrum,
    Convergence,
    PmsScan,
    QSweep,
    Evolve,
    WkbCompare,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Spectrum => "spectrum",
            Mode::Convergence => "convergence",
            Mode::PmsScan => "pms-scan",
            Mode::QSweep => "q-sweep",
            Mode::Evolve => "evolve",
            Mode::WkbCompare => "wkb-compare",
        }
    }
}

impl FromStr for Mode {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Ok(match s {
            "spectrum" => Mode::Spectrum,
            "convergence" => Mode::Convergence,
            "pms-scan" => Mode::PmsScan,
            "q-sweep" => Mode::QSweep,
            "evolve" => Mode::Evolve,
            "wkb-compare" => Mode::WkbCompare,
            other => bail!("unknown mode `{other}`"),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Length {
    Fixed(f64),
    Pms,
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Length::Fixed(l) => write!(f, "{l}"),
            Length::Pms => f.write_str("pms"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub q_min: f64,
    pub q_max: f64,
    pub steps: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        (0..self.steps)
            .map(|i| self.q_min + (self.q_max - self.q_min) * i as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobConfig {
    pub mode: Mode,
    pub basis: BasisKind,
    pub alpha: f64,
    pub diffusion: f64,
    pub hbar: f64,
    /// Text as written in the config, kept for output headers.
    pub potential_text: String,
    pub potential: Potential,
    pub sizes: Vec<usize>,
    pub length: Length,
    pub n_states: usize,
    pub representation: Representation,
    pub pms_bracket: (f64, f64),
    pub pms_tol: f64,
    pub sweep: Option<Sweep>,
    pub psi0: Option<PotentialExpr>,
    pub times: Vec<f64>,
    /// First level included in the linear fit of `wkb-compare`.
    pub fit_from: usize,
    /// States written to `wavefunctions.csv` in spectrum mode.
    pub wavefunctions: Vec<usize>,
    pub resolution: usize,
    pub format: Format,
    pub output: PathBuf,
}

impl JobConfig {
    pub fn size(&self) -> usize {
        self.sizes[0]
    }
}

const KEYS: [&str; 22] = [
    "mode",
    "basis",
    "alpha",
    "D",
    "hbar",
    "potential",
    "N",
    "L",
    "n_states",
    "representation",
    "pms_lo",
    "pms_hi",
    "pms_tol",
    "sweep",
    "psi0",
    "times",
    "fit_from",
    "wavefunctions",
    "resolution",
    "format",
    "output",
    "q",
];

/// Parse `key = value` lines. `#` starts a comment; blank lines are ignored.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("line {}: expected `key = value`, got `{line}`", i + 1);
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            bail!("line {}: empty key", i + 1);
        }
        if map.insert(k.to_string(), v.to_string()).is_some() {
            bail!("line {}: duplicate key `{k}`", i + 1);
        }
    }
    Ok(map)
}

/// Apply `--set key=value` overrides.
pub fn apply_overrides(map: &mut BTreeMap<String, String>, overrides: &[String]) -> Result<(), ConfigError> {
    for o in overrides {
        let Some((k, v)) = o.split_once('=') else {
            bail!("override `{o}` is not `key=value`");
        };
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(())
}

/// A decimal number or a fraction `a/b`.
fn number(key: &str, v: &str) -> Result<f64, ConfigError> {
    let parsed = match v.split_once('/') {
        Some((a, b)) => a
            .trim()
            .parse::<f64>()
            .and_then(|a| b.trim().parse::<f64>().map(|b| a / b)),
        None => v.parse::<f64>(),
    };
    match parsed {
        Ok(x) if x.is_finite() => Ok(x),
        _ => bail!("`{key}`: expected a finite number, got `{v}`"),
    }
}

fn positive(key: &str, v: &str) -> Result<f64, ConfigError> {
    let x = number(key, v)?;
    if x <= 0.0 {
        bail!("`{key}` must be > 0, got {x}");
    }
    Ok(x)
}

fn integer(key: &str, v: &str) -> Result<usize, ConfigError> {
    v.parse::<usize>()
        .map_err(|_| ConfigError(format!("`{key}`: expected a nonnegative integer, got `{v}`")))
}

fn list<T>(key: &str, v: &str, item: impl Fn(&str, &str) -> Result<T, ConfigError>) -> Result<Vec<T>, ConfigError> {
    v.split(',').map(|s| item(key, s.trim())).collect()
}

impl JobConfig {
    pub fn from_pairs(map: &BTreeMap<String, String>) -> Result<Self, ConfigError> {
        if let Some(unknown) = map.keys().find(|k| !KEYS.contains(&k.as_str())) {
            bail!("unknown key `{unknown}`");
        }
        let get = |k: &str| map.get(k).map(String::as_str);
        let require = |k: &str| get(k).ok_or_else(|| ConfigError(format!("missing required key `{k}`")));

        let mode: Mode = require("mode")?.parse()?;
        let potential_text = match (get("potential"), get("q")) {
            (Some(p), None) => p.to_string(),
            (None, Some(q)) => format!("mathieu({q})"),
            (None, None) if mode == Mode::QSweep => "mathieu(0)".to_string(),
            (None, None) => bail!("missing required key `potential`"),
            (Some(_), Some(_)) => bail!("give either `potential` or `q`, not both"),
        };
        let potential: Potential = potential_text
            .parse()
            .map_err(|e| ConfigError(format!("`potential`: {e}")))?;
        let is_mathieu = matches!(potential, Potential::Mathieu { .. });

        let basis = match get("basis") {
            Some(b) => b
                .parse::<BasisKind>()
                .map_err(|e| ConfigError(format!("`basis`: {e}")))?,
            None if is_mathieu => BasisKind::Periodic,
            None => BasisKind::Dirichlet,
        };
        let alpha = positive("alpha", require("alpha")?)?;
        let diffusion = get("D").map_or(Ok(1.0), |v| positive("D", v))?;
        let hbar = get("hbar").map_or(Ok(1.0), |v| positive("hbar", v))?;

        let sizes = list("N", require("N")?, integer)?;
        let min_size = if basis == BasisKind::Dirichlet { 2 } else { 1 };
        if let Some(n) = sizes.iter().find(|&&n| n < min_size) {
            bail!("`N` must be >= {min_size} for the {basis} basis, got {n}");
        }
        match mode {
            Mode::Convergence if sizes.len() < 2 => bail!("convergence mode needs a list of at least two N values"),
            Mode::Convergence => {}
            _ if sizes.len() != 1 => bail!("`N` must be a single value in {} mode", mode.name()),
            _ => {}
        }

        let length = match get("L") {
            Some("pms") => Length::Pms,
            Some(v) => Length::Fixed(positive("L", v)?),
            None => match potential.natural_half_length() {
                Some(l) => Length::Fixed(l),
                None => Length::Pms,
            },
        };
        if basis == BasisKind::Periodic && length == Length::Pms {
            bail!("the periodic basis takes its length from the potential period; `L = pms` is not allowed");
        }
        if mode == Mode::PmsScan && basis == BasisKind::Periodic {
            bail!("pms-scan needs a non-periodic basis");
        }

        let representation: Representation = get("representation")
            .unwrap_or("position")
            .parse()
            .map_err(|e| ConfigError(format!("{e}")))?;
        if representation == Representation::Momentum {
            if basis != BasisKind::Dirichlet {
                bail!("the momentum representation uses the dirichlet basis");
            }
            if potential.power_law().map(|(_, b)| b) != Some(2.0) {
                bail!("the momentum representation needs `potential = oscillator(2)`");
            }
        }

        let pms_lo = get("pms_lo").map_or(Ok(0.5), |v| positive("pms_lo", v))?;
        let pms_hi = get("pms_hi").map_or(Ok(40.0), |v| positive("pms_hi", v))?;
        if pms_hi <= pms_lo {
            bail!("need pms_lo < pms_hi, got {pms_lo} >= {pms_hi}");
        }
        let pms_tol = get("pms_tol").map_or(Ok(1e-3), |v| positive("pms_tol", v))?;

        let sweep = match get("sweep") {
            Some(v) => {
                let parts: Vec<&str> = v.split(',').map(str::trim).collect();
                if parts.len() != 3 {
                    bail!("`sweep` is `q_min, q_max, steps`, got `{v}`");
                }
                let steps = integer("sweep", parts[2])?;
                if steps < 2 {
                    bail!("`sweep` needs at least 2 steps");
                }
                Some(Sweep {
                    q_min: number("sweep", parts[0])?,
                    q_max: number("sweep", parts[1])?,
                    steps,
                })
            }
            None => None,
        };
        if mode == Mode::QSweep {
            if sweep.is_none() {
                bail!("q-sweep mode needs `sweep = q_min, q_max, steps`");
            }
            if !is_mathieu {
                bail!("q-sweep mode needs the mathieu potential");
            }
        }

        let psi0 = match get("psi0") {
            Some(v) => Some(fraclap_core::parse(v).map_err(|e| ConfigError(format!("`psi0`: {e}")))?),
            None => None,
        };
        let times = match get("times") {
            Some(v) => list("times", v, number)?,
            None => Vec::new(),
        };
        if mode == Mode::Evolve {
            if basis != BasisKind::Dirichlet {
                bail!("evolve mode uses the dirichlet basis");
            }
            if psi0.is_none() || times.is_empty() {
                bail!("evolve mode needs `psi0` and `times`");
            }
        }
        if mode == Mode::WkbCompare && potential.power_law().is_none() {
            bail!("wkb-compare needs a power-law potential `oscillator(beta)`");
        }

        let n_states = get("n_states").map_or(Ok(4), |v| integer("n_states", v))?;
        if n_states == 0 {
            bail!("`n_states` must be >= 1");
        }
        let fit_from = get("fit_from").map_or(Ok(0), |v| integer("fit_from", v))?;
        if mode == Mode::WkbCompare && n_states < fit_from + 3 {
            bail!("wkb-compare fits levels fit_from..n_states and needs at least three of them");
        }
        let wavefunctions = match get("wavefunctions") {
            Some(v) => list("wavefunctions", v, integer)?,
            None => Vec::new(),
        };
        let resolution = get("resolution").map_or(Ok(201), |v| integer("resolution", v))?;
        if resolution < 2 {
            bail!("`resolution` must be >= 2");
        }
        let format = match get("format").unwrap_or("csv") {
            "csv" => Format::Csv,
            "json" => Format::Json,
            "both" => Format::Both,
            other => bail!("`format`: expected csv|json|both, got `{other}`"),
        };
        let output = PathBuf::from(get("output").unwrap_or("out"));

        Ok(JobConfig {
            mode,
            basis,
            alpha,
            diffusion,
            hbar,
            potential_text,
            potential,
            sizes,
            length,
            n_states,
            representation,
            pms_bracket: (pms_lo, pms_hi),
            pms_tol,
            sweep,
            psi0,
            times,
            fit_from,
            wavefunctions,
            resolution,
            format,
            output,
        })
    }

    pub fn parse(text: &str, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut map = parse_pairs(text)?;
        apply_overrides(&mut map, overrides)?;
        JobConfig::from_pairs(&map)
    }
}
