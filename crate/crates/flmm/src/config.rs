//! Experiment configuration: a flat `key = value` file (`#` starts a comment)
//! merged with command-line overrides, which win.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use flmm_core::methods::Method;
use flmm_core::solver::NewtonConfig;
use flmm_core::FractionalOrder;

use crate::convergence::parse_mlist;
use crate::error::{HarnessError, Result};
use crate::output::Format;
use crate::problems::ProblemParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Weights,
    Solve,
    Convergence,
    StabilityBoundary,
    StabilityGrid,
    StabilityCompare,
}

impl Kind {
    pub const ALL: [Kind; 6] = [
        Kind::Weights,
        Kind::Solve,
        Kind::Convergence,
        Kind::StabilityBoundary,
        Kind::StabilityGrid,
        Kind::StabilityCompare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Weights => "weights",
            Kind::Solve => "solve",
            Kind::Convergence => "convergence",
            Kind::StabilityBoundary => "stability-boundary",
            Kind::StabilityGrid => "stability-grid",
            Kind::StabilityCompare => "stability-compare",
        }
    }

    fn allows(self, key: &str) -> bool {
        let specific: &[&str] = match self {
            Kind::Weights => &["method", "beta", "n"],
            Kind::Solve => &[
                "method",
                "beta",
                "problem",
                "y0",
                "lambda",
                "t0",
                "t_end",
                "steps",
                "newton_tol",
                "newton_max_iters",
            ],
            Kind::Convergence => &[
                "method",
                "beta",
                "problem",
                "y0",
                "lambda",
                "mlist",
                "newton_tol",
                "newton_max_iters",
            ],
            Kind::StabilityBoundary => &["method", "beta", "samples"],
            Kind::StabilityGrid => &[
                "method", "beta", "samples", "re_min", "re_max", "im_min", "im_max", "points", "oracle",
            ],
            Kind::StabilityCompare => &["beta"],
        };
        ["kind", "out", "format"].contains(&key) || specific.contains(&key)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            let names: Vec<_> = Kind::ALL.iter().map(|k| k.name()).collect();
            HarnessError::validation(format!("unknown kind {s:?}; expected one of {}", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Oracle {
    Winding,
    Dynamic,
}

impl Oracle {
    pub fn name(self) -> &'static str {
        match self {
            Oracle::Winding => "winding",
            Oracle::Dynamic => "dynamic",
        }
    }
}

/// Rectangle `[re_min, re_max] × [im_min, im_max]` sampled with `points`
/// values per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaWindow {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub points: usize,
}

impl Default for ZetaWindow {
    fn default() -> Self {
        ZetaWindow {
            re_min: -4.0,
            re_max: 4.0,
            im_min: -4.0,
            im_max: 4.0,
            points: 21,
        }
    }
}

impl ZetaWindow {
    pub fn axis(lo: f64, hi: f64, points: usize) -> impl Iterator<Item = f64> {
        let span = hi - lo;
        (0..points).map(move |i| lo + span * i as f64 / (points - 1) as f64)
    }

    /// Grid points, imaginary part outer, real part inner.
    pub fn points(&self) -> Vec<(f64, f64)> {
        ZetaWindow::axis(self.im_min, self.im_max, self.points)
            .flat_map(|im| ZetaWindow::axis(self.re_min, self.re_max, self.points).map(move |re| (re, im)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub methods: Vec<Method>,
    pub betas: Vec<FractionalOrder>,
    pub problem: String,
    pub params: ProblemParams,
    pub t_end: f64,
    pub steps: usize,
    pub mlist: Vec<usize>,
    pub newton: NewtonConfig,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub samples: usize,
    pub n: usize,
    pub window: ZetaWindow,
    pub oracle: Oracle,
}

/// Raw key/value pairs with normalized keys.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

fn normalize_key(key: &str) -> String {
    match key.trim() {
        "T" => "t_end".into(),
        "N" => "steps".into(),
        "M" => "mlist".into(),
        k => k.to_ascii_lowercase().replace('-', "_"),
    }
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| HarnessError::validation(format!("line {}: expected key = value", i + 1)))?;
            let key = normalize_key(k);
            if raw.entries.insert(key.clone(), v.trim().to_owned()).is_some() {
                return Err(HarnessError::validation(format!("line {}: duplicate key {key}", i + 1)));
            }
        }
        Ok(raw)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        RawConfig::parse(&text).map_err(|e| HarnessError::validation(format!("{}: {e}", path.display())))
    }

    /// Sets `key`, replacing any file value.
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(normalize_key(key), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Resolves into a validated config. `kind` comes from the subcommand if
    /// given, otherwise from the `kind` key.
    pub fn resolve(&self, kind: Option<Kind>) -> Result<ExperimentConfig> {
        let file_kind = self.get("kind").map(Kind::from_str).transpose()?;
        let kind = match (kind, file_kind) {
            (Some(k), Some(f)) if k != f => {
                return Err(HarnessError::validation(format!(
                    "config declares kind {f} but the command runs {k}"
                )))
            }
            (Some(k), _) | (None, Some(k)) => k,
            (None, None) => return Err(HarnessError::validation("no kind given")),
        };
        if let Some(k) = self.entries.keys().find(|k| !kind.allows(k)) {
            return Err(HarnessError::validation(format!("key {k} does not apply to {kind}")));
        }

        let methods = match self.get("method") {
            Some(s) => list(s, |m| Method::from_str(m).map_err(HarnessError::from))?,
            None => vec![Method::Nflmm2],
        };
        let betas = match self.get("beta") {
            Some(s) => list(s, |b| FractionalOrder::new(number(b, "beta")?).map_err(HarnessError::from))?,
            None => vec![FractionalOrder::new(0.5)?],
        };
        if matches!(kind, Kind::Weights | Kind::Solve) && (methods.len() != 1 || betas.len() != 1) {
            return Err(HarnessError::validation(format!("{kind} takes exactly one method and one beta")));
        }
        let newton = NewtonConfig::new(
            self.num("newton_tol")?.unwrap_or(NewtonConfig::default().tol()),
            self.count("newton_max_iters")?
                .map(|n| u32::try_from(n).map_err(|_| HarnessError::validation("newton_max_iters too large")))
                .transpose()?
                .unwrap_or(NewtonConfig::default().max_iters()),
        )?;
        let format = match self.get("format") {
            Some(f) => f.parse()?,
            None if kind == Kind::Solve => Format::Json,
            None => Format::Csv,
        };
        let defaults = ZetaWindow::default();
        let window = ZetaWindow {
            re_min: self.num("re_min")?.unwrap_or(defaults.re_min),
            re_max: self.num("re_max")?.unwrap_or(defaults.re_max),
            im_min: self.num("im_min")?.unwrap_or(defaults.im_min),
            im_max: self.num("im_max")?.unwrap_or(defaults.im_max),
            points: self.count("points")?.unwrap_or(defaults.points),
        };
        if window.points < 2 || window.re_max <= window.re_min || window.im_max <= window.im_min {
            return Err(HarnessError::validation("zeta window needs min < max and at least 2 points"));
        }
        let oracle = match self.get("oracle") {
            None | Some("winding") => Oracle::Winding,
            Some("dynamic") => Oracle::Dynamic,
            Some(o) => return Err(HarnessError::validation(format!("unknown oracle {o:?} (winding|dynamic)"))),
        };
        let cfg = ExperimentConfig {
            kind,
            methods,
            betas,
            problem: self.get("problem").unwrap_or("paper-nonlinear").to_owned(),
            params: ProblemParams {
                y0: self.num("y0")?,
                lambda: self.num("lambda")?,
                t0: self.num("t0")?,
            },
            t_end: self.num("t_end")?.unwrap_or(1.0),
            steps: self.count("steps")?.unwrap_or(64),
            mlist: parse_mlist(self.get("mlist").unwrap_or("8..4096"))?,
            newton,
            out: self.get("out").map(PathBuf::from),
            format,
            samples: self.count("samples")?.unwrap_or(2048),
            n: self.count("n")?.unwrap_or(64),
            window,
            oracle,
        };
        if cfg.samples < 8 {
            return Err(HarnessError::validation("samples must be at least 8"));
        }
        if cfg.n == 0 || cfg.steps == 0 {
            return Err(HarnessError::validation("n and steps must be positive"));
        }
        Ok(cfg)
    }

    fn num(&self, key: &str) -> Result<Option<f64>> {
        self.get(key).map(|v| number(v, key)).transpose()
    }

    fn count(&self, key: &str) -> Result<Option<usize>> {
        self.get(key)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| HarnessError::validation(format!("{key}: expected a non-negative integer, got {v:?}")))
            })
            .transpose()
    }
}

fn number(v: &str, key: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| HarnessError::validation(format!("{key}: expected a finite number, got {v:?}")))
}

fn list<T>(s: &str, f: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    s.split(',').map(|p| f(p.trim())).collect()
}
