//! Flat TOML run configuration.
//!
//! ```toml
//! kernel = { family = "exponential", a = 2.0, b = 1.0 }
//! alpha = 1.5
//! L = 64
//! T = 12.0
//! mu = "constant:1"
//! replicas = 300
//! times = [6.0, 12.0]
//! target = "supercritical_law"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::experiments::{ExperimentPlan, Target};
use crate::kernel::{KernelFamily, Regime, TemporalKernel};
use crate::lattice::{LatticeKernel, Window};
use crate::simulator::{HawkesConfig, DEFAULT_EXPLOSION_GUARD};

/// Grid steps per horizon when `h` is not given.
const DEFAULT_STEPS: f64 = 2000.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    Exponential {
        a: f64,
        b: f64,
    },
    #[serde(alias = "truncated_power")]
    TruncatedPowerTime {
        c0: f64,
        beta: f64,
        t_cut: f64,
    },
    Tabulated {
        grid: Vec<f64>,
        values: Vec<f64>,
    },
    Zero,
}

impl KernelSpec {
    pub fn build(&self) -> Result<TemporalKernel> {
        match self {
            KernelSpec::Exponential { a, b } => TemporalKernel::exponential(*a, *b),
            KernelSpec::TruncatedPowerTime { c0, beta, t_cut } => {
                TemporalKernel::truncated_power(*c0, *beta, *t_cut)
            }
            KernelSpec::Tabulated { grid, values } => {
                TemporalKernel::tabulated(grid.clone(), values.clone())
            }
            KernelSpec::Zero => Ok(TemporalKernel::zero()),
        }
    }
}

impl From<&KernelFamily> for KernelSpec {
    fn from(f: &KernelFamily) -> Self {
        match f {
            KernelFamily::Exponential { a, b } => KernelSpec::Exponential { a: *a, b: *b },
            KernelFamily::TruncatedPowerTime { c0, beta, t_cut } => {
                KernelSpec::TruncatedPowerTime {
                    c0: *c0,
                    beta: *beta,
                    t_cut: *t_cut,
                }
            }
            KernelFamily::Tabulated { grid, values } => KernelSpec::Tabulated {
                grid: grid.clone(),
                values: values.clone(),
            },
        }
    }
}

/// Baseline rates over the window, indexed by site label.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MuSpec {
    Constant {
        value: f64,
    },
    /// `even` on even site labels, `odd` on odd ones.
    Alternating {
        even: f64,
        odd: f64,
    },
    /// 1 at one site label, 0 elsewhere.
    Delta {
        site: i64,
    },
    /// One value per site, left to right.
    File {
        path: PathBuf,
        values: Vec<f64>,
    },
}

impl MuSpec {
    /// Parses `constant[:v]`, `alternating[:even,odd]`, `delta[:site]` or `file:<path>`;
    /// relative paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> std::result::Result<Self, String> {
        let (kind, arg) = match text.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a.trim())),
            None => (text.trim(), None),
        };
        let number = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad number {s:?}: {e}"))
        };
        let spec = match (kind, arg) {
            ("constant", None) => MuSpec::Constant { value: 1.0 },
            ("constant", Some(v)) => MuSpec::Constant { value: number(v)? },
            ("alternating", None) => MuSpec::Alternating {
                even: 1.0,
                odd: 0.0,
            },
            ("alternating", Some(v)) => {
                let (e, o) = v.split_once(',').ok_or("alternating needs `even,odd`")?;
                MuSpec::Alternating {
                    even: number(e)?,
                    odd: number(o)?,
                }
            }
            ("delta", None) => MuSpec::Delta { site: 0 },
            ("delta", Some(v)) => MuSpec::Delta {
                site: v.parse().map_err(|e| format!("bad site {v:?}: {e}"))?,
            },
            ("file", Some(p)) if !p.is_empty() => {
                let path = base.join(p);
                let body = std::fs::read_to_string(&path)
                    .map_err(|e| format!("{}: {e}", path.display()))?;
                let values = body
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(number)
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                MuSpec::File { path, values }
            }
            _ => return Err(format!("unrecognized mu specification {text:?}")),
        };
        match &spec {
            MuSpec::Constant { value } if !(*value >= 0.0 && value.is_finite()) => {
                Err("mu must be finite and ≥ 0".into())
            }
            MuSpec::Alternating { even, odd }
                if !(*even >= 0.0 && *odd >= 0.0 && even.is_finite() && odd.is_finite()) =>
            {
                Err("mu must be finite and ≥ 0".into())
            }
            MuSpec::File { values, .. } if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) => {
                Err("mu file values must be finite and ≥ 0".into())
            }
            _ => Ok(spec),
        }
    }

    /// Rates on the window {−L, …, L}.
    pub fn values(&self, half_width: usize) -> std::result::Result<Vec<f64>, String> {
        let l = half_width as i64;
        let labels = -l..=l;
        match self {
            MuSpec::Constant { value } => Ok(labels.map(|_| *value).collect()),
            MuSpec::Alternating { even, odd } => Ok(labels
                .map(|i| if i % 2 == 0 { *even } else { *odd })
                .collect()),
            MuSpec::Delta { site } if site.abs() <= l => {
                Ok(labels.map(|i| if i == *site { 1.0 } else { 0.0 }).collect())
            }
            MuSpec::Delta { site } => Err(format!("delta site {site} outside the window ±{l}")),
            MuSpec::File { values, .. } if values.len() == 2 * half_width + 1 => Ok(values.clone()),
            MuSpec::File { values, .. } => Err(format!(
                "mu file has {} values, the window has {}",
                values.len(),
                2 * half_width + 1
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunTarget {
    SubcriticalLaw,
    SupercriticalLaw,
    MeanfieldOnly,
    StableCheck,
}

impl RunTarget {
    pub fn experiment(self) -> Option<Target> {
        match self {
            RunTarget::SubcriticalLaw => Some(Target::SubCriticalLaw),
            RunTarget::SupercriticalLaw => Some(Target::SuperCriticalLaw),
            RunTarget::MeanfieldOnly => Some(Target::MeanFieldOnly),
            RunTarget::StableCheck => None,
        }
    }
}

/// The file as written.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    kernel: Option<KernelSpec>,
    alpha: Option<f64>,
    #[serde(rename = "L")]
    half_width: Option<usize>,
    window: Option<Window>,
    #[serde(rename = "T")]
    horizon: Option<f64>,
    h: Option<f64>,
    mu: Option<String>,
    replicas: Option<u64>,
    times: Option<Vec<f64>>,
    sites: Option<Vec<i64>>,
    target: Option<RunTarget>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    explosion_guard: Option<u64>,
    powers: Option<Vec<u32>>,
    llt_steps: Option<Vec<u64>>,
    llt_window_factor: Option<f64>,
    llt_max_deficit: Option<f64>,
}

/// Validated configuration with every default applied.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub kernel: Option<KernelSpec>,
    pub alpha: Option<f64>,
    #[serde(rename = "L")]
    pub half_width: Option<usize>,
    pub window: Window,
    #[serde(rename = "T")]
    pub horizon: Option<f64>,
    pub h: Option<f64>,
    pub mu: MuSpec,
    pub replicas: u64,
    pub times: Option<Vec<f64>>,
    pub sites: Option<Vec<i64>>,
    pub target: Option<RunTarget>,
    pub seed: u64,
    /// Output location; not part of the hash.
    #[serde(skip)]
    pub out: PathBuf,
    pub explosion_guard: u64,
    pub powers: Vec<u32>,
    pub llt_steps: Vec<u64>,
    pub llt_window_factor: f64,
    pub llt_max_deficit: f64,
    /// Keys that took their default value.
    #[serde(skip)]
    pub defaulted: Vec<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            kernel: None,
            alpha: None,
            half_width: None,
            window: Window::Circulant,
            horizon: None,
            h: None,
            mu: MuSpec::Constant { value: 1.0 },
            replicas: 1,
            times: None,
            sites: None,
            target: None,
            seed: 0,
            out: PathBuf::from("out"),
            explosion_guard: DEFAULT_EXPLOSION_GUARD,
            powers: vec![1, 2, 4, 8, 16],
            llt_steps: vec![16, 64, 256],
            llt_window_factor: 16.0,
            llt_max_deficit: 0.01,
            defaulted: Vec::new(),
        }
    }
}

/// 1-based line of the first `key = …` assignment.
fn line_of(src: &str, key: &str) -> Option<usize> {
    src.lines()
        .position(|l| {
            let l = l.trim_start();
            l.strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map(|i| i + 1)
}

fn line_at(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].matches('\n').count() + 1
}

/// Key assigned on the given 1-based line, if any.
fn key_on_line(src: &str, line: usize) -> Option<String> {
    let text = src.lines().nth(line - 1)?;
    let (key, _) = text.split_once('=')?;
    let key = key.trim();
    (!key.is_empty() && !key.starts_with('#')).then(|| key.to_owned())
}

pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config_str(&src, base)
}

/// Parses and validates; relative paths resolve against `base`.
pub fn parse_config_str(src: &str, base: &Path) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(src).map_err(|e| {
        let line = e.span().map(|s| line_at(src, s.start));
        let key = line.and_then(|l| key_on_line(src, l));
        Error::config(key.as_deref(), line, e.message().trim().to_owned())
    })?;
    let bad = |key: &str, msg: String| Error::config(Some(key), line_of(src, key), msg);

    let mut cfg = RunConfig::default();
    let mut defaulted = Vec::new();
    macro_rules! take {
        ($field:ident, $key:literal) => {
            match raw.$field {
                Some(v) => cfg.$field = v,
                None => defaulted.push($key.to_owned()),
            }
        };
    }
    cfg.kernel = raw.kernel;
    cfg.alpha = raw.alpha;
    cfg.half_width = raw.half_width;
    cfg.horizon = raw.horizon;
    cfg.times = raw.times;
    cfg.sites = raw.sites;
    cfg.target = raw.target;
    take!(window, "window");
    take!(replicas, "replicas");
    take!(seed, "seed");
    take!(out, "out");
    take!(explosion_guard, "explosion_guard");
    take!(powers, "powers");
    take!(llt_steps, "llt_steps");
    take!(llt_window_factor, "llt_window_factor");
    take!(llt_max_deficit, "llt_max_deficit");
    match raw.mu {
        Some(text) => cfg.mu = MuSpec::parse(&text, base).map_err(|m| bad("mu", m))?,
        None => defaulted.push("mu".into()),
    }
    cfg.h = match (raw.h, cfg.horizon) {
        (Some(h), _) => Some(h),
        (None, Some(t)) => {
            defaulted.push("h".into());
            Some(t / DEFAULT_STEPS)
        }
        (None, None) => None,
    };

    if let Some(a) = cfg.alpha {
        if !(a > 0.0 && a < 2.0) {
            return Err(bad("alpha", format!("alpha = {a} must lie in (0, 2)")));
        }
        if a == 1.0 && cfg.target == Some(RunTarget::StableCheck) {
            return Err(bad(
                "alpha",
                "alpha = 1 is excluded from the stable local limit theorems".into(),
            ));
        }
    }
    if cfg.half_width == Some(0) {
        return Err(bad("L", "L must be at least 1".into()));
    }
    if let Some(t) = cfg.horizon {
        if !(t > 0.0 && t.is_finite()) {
            return Err(bad("T", format!("T = {t} must be positive")));
        }
    }
    if let Some(h) = cfg.h {
        if !(h > 0.0 && cfg.horizon.is_none_or(|t| h <= t)) {
            return Err(bad("h", format!("h = {h} must lie in (0, T]")));
        }
    }
    if cfg.replicas == 0 {
        return Err(bad("replicas", "replicas must be at least 1".into()));
    }
    if cfg.explosion_guard == 0 {
        return Err(bad(
            "explosion_guard",
            "explosion_guard must be at least 1".into(),
        ));
    }
    if let Some(times) = &cfg.times {
        let t_max = cfg.horizon.unwrap_or(f64::INFINITY);
        if times.is_empty()
            || times.windows(2).any(|w| !(w[1] > w[0]))
            || times.iter().any(|&t| !(t > 0.0 && t <= t_max))
        {
            return Err(bad(
                "times",
                "times must be increasing and lie in (0, T]".into(),
            ));
        }
    }
    if let (Some(sites), Some(l)) = (&cfg.sites, cfg.half_width) {
        if let Some(s) = sites.iter().find(|s| s.unsigned_abs() as usize > l) {
            return Err(bad("sites", format!("site {s} outside the window ±{l}")));
        }
    }
    if let Some(l) = cfg.half_width {
        cfg.mu.values(l).map_err(|m| bad("mu", m))?;
    }
    if cfg.powers.is_empty() || cfg.powers.contains(&0) {
        return Err(bad(
            "powers",
            "powers must be non-empty and positive".into(),
        ));
    }
    if cfg.llt_steps.is_empty() || cfg.llt_steps.contains(&0) {
        return Err(bad(
            "llt_steps",
            "llt_steps must be non-empty and positive".into(),
        ));
    }
    if !(cfg.llt_window_factor > 0.0) {
        return Err(bad(
            "llt_window_factor",
            "llt_window_factor must be positive".into(),
        ));
    }
    if !(cfg.llt_max_deficit > 0.0 && cfg.llt_max_deficit < 1.0) {
        return Err(bad(
            "llt_max_deficit",
            "llt_max_deficit must lie in (0, 1)".into(),
        ));
    }
    if let Some(spec) = &cfg.kernel {
        let kernel = spec.build().map_err(|e| bad("kernel", e.to_string()))?;
        let regime = kernel.regime();
        let mismatch = match cfg.target {
            Some(RunTarget::SubcriticalLaw) => regime != Regime::SubCritical,
            Some(RunTarget::SupercriticalLaw) => regime != Regime::SuperCritical,
            _ => false,
        };
        if mismatch {
            return Err(Error::Regime(format!(
                "kernel integral I = {} is {regime:?}, incompatible with target {:?}",
                kernel.integral(),
                cfg.target.expect("target set")
            )));
        }
    }
    cfg.defaulted = defaulted;
    Ok(cfg)
}

impl RunConfig {
    fn missing(key: &str) -> Error {
        Error::config(Some(key), None, format!("missing required key `{key}`"))
    }

    pub fn temporal_kernel(&self) -> Result<TemporalKernel> {
        self.kernel
            .as_ref()
            .ok_or_else(|| Self::missing("kernel"))?
            .build()
    }

    pub fn alpha(&self) -> Result<f64> {
        self.alpha.ok_or_else(|| Self::missing("alpha"))
    }

    pub fn half_width(&self) -> Result<usize> {
        self.half_width.ok_or_else(|| Self::missing("L"))
    }

    pub fn horizon(&self) -> Result<f64> {
        self.horizon.ok_or_else(|| Self::missing("T"))
    }

    pub fn step(&self) -> Result<f64> {
        self.h.ok_or_else(|| Self::missing("T"))
    }

    pub fn lattice(&self) -> Result<LatticeKernel> {
        LatticeKernel::new(self.alpha()?, self.half_width()?, self.window)
    }

    pub fn mu_values(&self) -> Result<Vec<f64>> {
        self.mu
            .values(self.half_width()?)
            .map_err(|m| Error::config(Some("mu"), None, m))
    }

    pub fn hawkes(&self) -> Result<HawkesConfig> {
        Ok(HawkesConfig::new(
            self.lattice()?,
            self.temporal_kernel()?,
            self.mu_values()?,
            self.horizon()?,
            self.seed,
        )?
        .with_explosion_guard(self.explosion_guard))
    }

    /// Observation times, defaulting to the horizon alone.
    pub fn observation_times(&self) -> Result<Vec<f64>> {
        Ok(self.times.clone().unwrap_or(vec![self.horizon()?]))
    }

    /// Observed window indices, defaulting to site 0 and the right edge.
    pub fn observed_sites(&self) -> Result<Vec<usize>> {
        let l = self.half_width()?;
        Ok(match &self.sites {
            Some(s) => s.iter().map(|&i| (i + l as i64) as usize).collect(),
            None => vec![l, 2 * l],
        })
    }

    pub fn plan(&self) -> Result<ExperimentPlan> {
        let target = self.target.and_then(RunTarget::experiment).ok_or_else(|| {
            Error::config(Some("target"), None, "an experiment target is required")
        })?;
        ExperimentPlan::new(
            self.hawkes()?,
            self.replicas,
            self.observation_times()?,
            Some(self.observed_sites()?),
            target,
        )
    }

    /// SHA-256 of the canonical JSON form, as 16 hex digits. Excludes `out`.
    pub fn hash(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        short_hash(value.to_string().as_bytes())
    }

    /// `key = value` lines for output metadata, marking defaults.
    pub fn echo(&self) -> Vec<String> {
        let value = serde_json::to_value(self).expect("config serializes");
        let serde_json::Value::Object(map) = value else {
            unreachable!("config serializes to an object")
        };
        map.iter()
            .filter(|(_, v)| !v.is_null())
            .map(|(k, v)| {
                let tag = if self.defaulted.iter().any(|d| d == k) {
                    " (default)"
                } else {
                    ""
                };
                format!("{k} = {v}{tag}")
            })
            .collect()
    }
}

/// First 16 hex digits of SHA-256.
pub fn short_hash(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}
