//! `key = value` experiment configuration with `#` comments.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{0}` given twice")]
    Duplicate(String),
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("bad value for `{key}`: `{value}` ({reason})")]
    BadValue { key: String, value: String, reason: String },
}

type Result<T> = std::result::Result<T, ConfigError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    KeSolve,
    GeodesicAudit,
    ConeLimit,
    Uniqueness,
    PropernessScan,
    Spectrum,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::KeSolve,
        Experiment::GeodesicAudit,
        Experiment::ConeLimit,
        Experiment::Uniqueness,
        Experiment::PropernessScan,
        Experiment::Spectrum,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::KeSolve => "ke-solve",
            Experiment::GeodesicAudit => "geodesic-audit",
            Experiment::ConeLimit => "cone-limit",
            Experiment::Uniqueness => "uniqueness",
            Experiment::PropernessScan => "properness-scan",
            Experiment::Spectrum => "spectrum",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwisterChoice {
    None,
    Background,
    SmoothedCone,
    Conical,
}

impl TwisterChoice {
    pub fn name(&self) -> &'static str {
        match self {
            TwisterChoice::None => "none",
            TwisterChoice::Background => "background",
            TwisterChoice::SmoothedCone => "smoothed-cone",
            TwisterChoice::Conical => "conical",
        }
    }
}

/// Named weights; `perturbed` and `translated` are built from the start weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightChoice {
    FubiniStudy,
    Football,
    Background,
    Perturbed,
    Translated,
}

impl WeightChoice {
    pub fn name(&self) -> &'static str {
        match self {
            WeightChoice::FubiniStudy => "fs",
            WeightChoice::Football => "football",
            WeightChoice::Background => "background",
            WeightChoice::Perturbed => "perturbed",
            WeightChoice::Translated => "translated",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Translations,
    Perturbations,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Translations => "translations",
            Family::Perturbations => "perturbations",
        }
    }
}

macro_rules! named_enum {
    ($t:ty) => {
        impl FromStr for $t {
            type Err = String;
            fn from_str(s: &str) -> std::result::Result<Self, String> {
                <$t>::choices()
                    .iter()
                    .find(|c| c.name() == s)
                    .copied()
                    .ok_or_else(|| {
                        let names: Vec<&str> = <$t>::choices().iter().map(|c| c.name()).collect();
                        format!("expected one of {}", names.join(", "))
                    })
            }
        }
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }
    };
}

impl Experiment {
    fn choices() -> &'static [Experiment] {
        &Experiment::ALL
    }
}
impl TwisterChoice {
    fn choices() -> &'static [TwisterChoice] {
        &[
            TwisterChoice::None,
            TwisterChoice::Background,
            TwisterChoice::SmoothedCone,
            TwisterChoice::Conical,
        ]
    }
}
impl WeightChoice {
    fn choices() -> &'static [WeightChoice] {
        &[
            WeightChoice::FubiniStudy,
            WeightChoice::Football,
            WeightChoice::Background,
            WeightChoice::Perturbed,
            WeightChoice::Translated,
        ]
    }
}
impl Family {
    fn choices() -> &'static [Family] {
        &[Family::Translations, Family::Perturbations]
    }
}
named_enum!(Experiment);
named_enum!(TwisterChoice);
named_enum!(WeightChoice);
named_enum!(Family);

/// Largest space-time system the ε-geodesic solve accepts, `n·(m-2)`.
pub const MAX_SPACETIME_UNKNOWNS: usize = 100_000;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub x_max: f64,
    pub n: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub max_halvings: usize,
    pub max_bisections: usize,
    pub m: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub parallel: bool,
    pub beta: f64,
    /// scale `c` of the background twister `c ψ₀`
    pub c: f64,
    /// smoothing of the smoothed cone; for geodesic-audit, the ε-geodesic parameter
    pub eps: Option<f64>,
    pub eps_list: Vec<f64>,
    pub window: f64,
    pub twister: TwisterChoice,
    pub start: WeightChoice,
    pub end: WeightChoice,
    pub shift: f64,
    pub amplitude: f64,
    pub bumps: usize,
    pub seeds: usize,
    pub members: usize,
    pub family: Family,
    pub count: usize,
    pub paths: usize,
}

pub const KEYS: [&str; 29] = [
    "experiment",
    "x_max",
    "n",
    "tol",
    "max_iter",
    "max_halvings",
    "max_bisections",
    "m",
    "seed",
    "output_dir",
    "parallel",
    "beta",
    "c",
    "eps",
    "eps_list",
    "window",
    "twister",
    "start",
    "end",
    "shift",
    "amplitude",
    "bumps",
    "seeds",
    "members",
    "family",
    "count",
    "paths",
    "grid",
    "schedule",
];

/// Raw `key -> value` pairs in file order of appearance.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = parse_assignment(line).ok_or_else(|| ConfigError::Syntax {
            line: k + 1,
            text: raw.trim().to_string(),
        })?;
        if out.insert(key.clone(), value).is_some() {
            return Err(ConfigError::Duplicate(key));
        }
    }
    Ok(out)
}

/// `key = value` (or `key=value`), both sides trimmed and non-empty.
pub fn parse_assignment(line: &str) -> Option<(String, String)> {
    let (k, v) = line.split_once('=')?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() || v.is_empty() {
        return None;
    }
    Some((k.to_string(), v.to_string()))
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    build(parse_pairs(text)?)
}

/// Config file text with `--set` overrides applied on top.
pub fn parse_with_overrides(text: &str, overrides: &[(String, String)]) -> Result<ExperimentConfig> {
    let mut pairs = parse_pairs(text)?;
    for (k, v) in overrides {
        pairs.insert(k.clone(), v.clone());
    }
    build(pairs)
}

fn bad(key: &str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.into(),
    }
}

struct Reader {
    pairs: BTreeMap<String, String>,
}

impl Reader {
    fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        match self.pairs.get(key) {
            None => Ok(default),
            Some(v) => v.parse::<T>().map_err(|e| bad(key, v, e.to_string())),
        }
    }

    fn opt<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        match self.pairs.get(key) {
            None => Ok(None),
            Some(v) => v.parse::<T>().map(Some).map_err(|e| bad(key, v, e.to_string())),
        }
    }

    fn list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.pairs.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|e| bad(key, v, e.to_string())))
                .collect(),
        }
    }

    fn check(&self, key: &str, ok: bool, reason: &str) -> Result<()> {
        if ok {
            Ok(())
        } else {
            let v = self.pairs.get(key).map(String::as_str).unwrap_or("<default>");
            Err(bad(key, v, reason))
        }
    }
}

fn build(pairs: BTreeMap<String, String>) -> Result<ExperimentConfig> {
    if let Some(k) = pairs.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(ConfigError::UnknownKey(k.clone()));
    }
    let r = Reader { pairs };
    // range errors are reported before a missing experiment
    let given: Option<Experiment> = r.opt("experiment")?;
    let experiment = given.unwrap_or(Experiment::KeSolve);
    // `grid = x_max, n` and `schedule = m` are accepted as shorthands
    let (mut x_max, mut n) = (r.get("x_max", 40.0)?, r.get("n", 4097usize)?);
    if let Some(g) = r.pairs.get("grid") {
        if r.pairs.contains_key("x_max") || r.pairs.contains_key("n") {
            return Err(bad("grid", g, "conflicts with x_max / n"));
        }
        let parts: Vec<&str> = g.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            return Err(bad("grid", g, "expected `x_max, n`"));
        }
        x_max = parts[0].parse().map_err(|e: std::num::ParseFloatError| bad("grid", g, e.to_string()))?;
        n = parts[1].parse().map_err(|e: std::num::ParseIntError| bad("grid", g, e.to_string()))?;
    }
    let mut m = r.get("m", 65usize)?;
    if let Some(s) = r.opt::<usize>("schedule")? {
        if r.pairs.contains_key("m") {
            return Err(bad("schedule", &s.to_string(), "conflicts with m"));
        }
        m = s;
    }
    let default_twister = match experiment {
        Experiment::Uniqueness => TwisterChoice::Background,
        Experiment::PropernessScan => TwisterChoice::Conical,
        _ => TwisterChoice::None,
    };
    let twister = r.get("twister", default_twister)?;
    let default_start = match twister {
        TwisterChoice::None => WeightChoice::FubiniStudy,
        TwisterChoice::Background => WeightChoice::Background,
        TwisterChoice::SmoothedCone | TwisterChoice::Conical => WeightChoice::Football,
    };
    let default_family = match twister {
        TwisterChoice::None | TwisterChoice::Conical => Family::Translations,
        _ => Family::Perturbations,
    };
    let cfg = ExperimentConfig {
        experiment,
        x_max,
        n,
        tol: r.get("tol", 1e-10)?,
        max_iter: r.get("max_iter", 60usize)?,
        max_halvings: r.get("max_halvings", 40usize)?,
        max_bisections: r.get("max_bisections", 10usize)?,
        m,
        seed: r.get("seed", 0u64)?,
        output_dir: PathBuf::from(r.get("output_dir", "lab_out".to_string())?),
        parallel: r.get("parallel", false)?,
        beta: r.get("beta", 0.5)?,
        c: r.get("c", 0.5)?,
        eps: r.opt("eps")?,
        eps_list: r.list("eps_list", &[1e-1, 1e-2, 1e-3, 1e-4, 1e-5])?,
        window: r.get("window", 10.0)?,
        twister,
        start: r.get("start", default_start)?,
        end: r.get("end", WeightChoice::Perturbed)?,
        shift: r.get("shift", 2.0)?,
        amplitude: r.get("amplitude", 0.5)?,
        bumps: r.get("bumps", 2usize)?,
        seeds: r.get("seeds", 2usize)?,
        members: r.get("members", 5usize)?,
        family: r.get("family", default_family)?,
        count: r.get("count", 3usize)?,
        paths: r.get("paths", 1usize)?,
    };
    r.check("x_max", cfg.x_max.is_finite() && cfg.x_max >= 10.0, "must be at least 10")?;
    r.check("n", cfg.n >= 129 && cfg.n % 2 == 1, "must be odd and at least 129")?;
    r.check("tol", cfg.tol > 0.0 && cfg.tol.is_finite(), "must be positive")?;
    r.check("max_iter", cfg.max_iter >= 1, "must be at least 1")?;
    r.check("m", cfg.m >= 3, "must be at least 3")?;
    r.check("beta", cfg.beta > 0.0 && cfg.beta < 1.0, "beta must lie in (0, 1)")?;
    r.check("c", cfg.c > 0.0 && cfg.c < 1.0, "c must lie in (0, 1)")?;
    r.check("eps", cfg.eps.map_or(true, |e| e > 0.0 && e.is_finite()), "must be positive")?;
    r.check(
        "eps_list",
        !cfg.eps_list.is_empty()
            && cfg.eps_list.iter().all(|e| *e > 0.0 && e.is_finite())
            && cfg.eps_list.windows(2).all(|w| w[1] < w[0]),
        "must be positive and strictly decreasing",
    )?;
    r.check("window", cfg.window > 0.0 && cfg.window <= cfg.x_max, "must lie in (0, x_max]")?;
    r.check("shift", cfg.shift.is_finite(), "must be finite")?;
    r.check("amplitude", cfg.amplitude > 0.0 && cfg.amplitude < 1.0, "must lie in (0, 1)")?;
    r.check("bumps", cfg.bumps >= 1, "must be at least 1")?;
    r.check("seeds", cfg.seeds >= 2, "must be at least 2")?;
    r.check("members", cfg.members >= 4, "must be at least 4")?;
    r.check("count", cfg.count >= 1, "must be at least 1")?;
    r.check("paths", cfg.paths >= 1, "must be at least 1")?;
    r.check(
        "start",
        !matches!(cfg.start, WeightChoice::Perturbed | WeightChoice::Translated),
        "start must be a closed-form weight (fs, football, background)",
    )?;
    if cfg.experiment == Experiment::GeodesicAudit && cfg.eps.is_some() {
        r.check(
            "n",
            cfg.n * (cfg.m - 2) <= MAX_SPACETIME_UNKNOWNS,
            "the eps-geodesic solve needs n * (m - 2) <= 100000; use e.g. x_max = 20, n = 801",
        )?;
    }
    if given.is_none() {
        return Err(ConfigError::Missing("experiment"));
    }
    Ok(cfg)
}

impl ExperimentConfig {
    /// Effective configuration, one `key = value` per line in key order.
    pub fn echo(&self) -> String {
        let eps_list: Vec<String> = self.eps_list.iter().map(|e| format!("{e:e}")).collect();
        let mut pairs: Vec<(&str, String)> = vec![
            ("experiment", self.experiment.to_string()),
            ("x_max", self.x_max.to_string()),
            ("n", self.n.to_string()),
            ("tol", format!("{:e}", self.tol)),
            ("max_iter", self.max_iter.to_string()),
            ("max_halvings", self.max_halvings.to_string()),
            ("max_bisections", self.max_bisections.to_string()),
            ("m", self.m.to_string()),
            ("seed", self.seed.to_string()),
            ("output_dir", self.output_dir.display().to_string()),
            ("parallel", self.parallel.to_string()),
            ("beta", self.beta.to_string()),
            ("c", self.c.to_string()),
            ("eps", self.eps.map_or("none".into(), |e| format!("{e:e}"))),
            ("eps_list", eps_list.join(",")),
            ("window", self.window.to_string()),
            ("twister", self.twister.to_string()),
            ("start", self.start.to_string()),
            ("end", self.end.to_string()),
            ("shift", self.shift.to_string()),
            ("amplitude", self.amplitude.to_string()),
            ("bumps", self.bumps.to_string()),
            ("seeds", self.seeds.to_string()),
            ("members", self.members.to_string()),
            ("family", self.family.to_string()),
            ("count", self.count.to_string()),
            ("paths", self.paths.to_string()),
        ];
        pairs.sort_by(|a, b| a.0.cmp(b.0));
        pairs.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cone_limit_example() {
        let cfg = parse_config("experiment = cone-limit\nbeta = 0.5\neps_list = 1e-1,1e-2,1e-3").unwrap();
        assert_eq!(cfg.experiment, Experiment::ConeLimit);
        assert_eq!(cfg.eps_list, vec![1e-1, 1e-2, 1e-3]);
        assert_eq!((cfg.x_max, cfg.n, cfg.tol, cfg.m, cfg.seed), (40.0, 4097, 1e-10, 65, 0));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            parse_config("experiment = spectrum\nbeta = 1.5"),
            Err(ConfigError::BadValue { .. })
        ));
        assert!(matches!(parse_config("beta = 1.5"), Err(ConfigError::BadValue { .. })));
        assert_eq!(parse_config(""), Err(ConfigError::Missing("experiment")));
        assert_eq!(
            parse_config("experiment = spectrum\nfoo = 1"),
            Err(ConfigError::UnknownKey("foo".into()))
        );
        assert!(matches!(parse_config("experiment = spectrum\nn = many"), Err(ConfigError::BadValue { .. })));
        assert!(matches!(parse_config("experiment spectrum"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(parse_config("experiment = nope"), Err(ConfigError::BadValue { .. })));
        assert!(matches!(
            parse_config("experiment = spectrum\nn = 4096"),
            Err(ConfigError::BadValue { .. })
        ));
        assert!(matches!(
            parse_config("experiment = geodesic-audit\neps = 1e-2"),
            Err(ConfigError::BadValue { .. })
        ));
    }

    #[test]
    fn comments_overrides_and_shorthands() {
        let text = "# header\nexperiment = spectrum # trailing\n\ngrid = 20, 801\n";
        let cfg = parse_with_overrides(text, &[("count".into(), "5".into())]).unwrap();
        assert_eq!((cfg.x_max, cfg.n, cfg.count), (20.0, 801, 5));
        assert!(cfg.echo().contains("count = 5\n"));
        assert!(matches!(
            parse_config("experiment = spectrum\nexperiment = ke-solve"),
            Err(ConfigError::Duplicate(_))
        ));
    }
}
