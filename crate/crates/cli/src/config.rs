//! Run parameters: built-in defaults, then a `key = value` file, then flags.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use crate::Cli;

/// Keys accepted in a config file; the same names as the long flags.
const KEYS: &[&str] = &[
    "lambda-p", "L", "lambda-c", "k", "a1", "a2", "b", "radius", "rel-tol", "points", "log-spacing", "k-min",
    "k-max", "l-min", "l-max", "fit-min", "fit-max", "out",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub lambda_p: f64,
    pub separation: f64,
    pub lambda_c: f64,
    pub k: f64,
    pub a1: f64,
    pub a2: f64,
    /// `None` means `sin(kb) = 1` at every wavenumber.
    pub b: Option<f64>,
    pub radius: f64,
    pub rel_tol: f64,
    pub points: Option<usize>,
    pub log_spacing: Option<bool>,
    pub k_min: Option<f64>,
    pub k_max: Option<f64>,
    pub l_min: f64,
    pub l_max: f64,
    pub fit_min: f64,
    pub fit_max: f64,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            lambda_p: 136.0,
            separation: 221.0,
            lambda_c: 1200.0,
            k: 2.0 * PI / 1200.0,
            a1: 59.0,
            a2: 8.0,
            b: None,
            radius: 1e5,
            rel_tol: 1e-4,
            points: None,
            log_spacing: None,
            k_min: None,
            k_max: None,
            l_min: 50.0,
            l_max: 1200.0,
            fit_min: 150.0,
            fit_max: 300.0,
            out: None,
        }
    }
}

pub fn parse_file(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`, got `{raw}`", n + 1))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(format!("line {}: unknown key `{key}`", n + 1));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn num<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, String> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v.parse().map(Some).map_err(|_| format!("config key `{key}`: cannot parse `{v}`")),
    }
}

fn positive(name: &str, v: f64) -> Result<f64, String> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{name} must be positive, got {v}"))
    }
}

impl RunConfig {
    pub fn resolve(cli: &Cli) -> Result<Self, String> {
        let file = match &cli.config {
            Some(path) => parse_file(&read(path)?)?,
            None => BTreeMap::new(),
        };
        let d = RunConfig::default();
        let pick = |flag: Option<f64>, key: &str| -> Result<Option<f64>, String> {
            Ok(flag.or(num(&file, key)?))
        };

        let lambda_c = pick(cli.lambda_c, "lambda-c")?;
        let k = pick(cli.k, "k")?;
        let (lambda_c, k) = match (lambda_c, k) {
            (Some(lc), Some(k)) => {
                positive("lambda-c", lc)?;
                positive("k", k)?;
                if ((k * lc) / (2.0 * PI) - 1.0).abs() > 1e-9 {
                    return Err(format!("inconsistent lambda-c = {lc} and k = {k}: k lambda_C must be 2 pi"));
                }
                (lc, k)
            }
            (Some(lc), None) => (positive("lambda-c", lc)?, 2.0 * PI / lc),
            (None, Some(k)) => (2.0 * PI / positive("k", k)?, k),
            (None, None) => (d.lambda_c, d.k),
        };

        let log_spacing = match cli.log_spacing {
            Some(v) => Some(v),
            None => match file.get("log-spacing") {
                Some(v) => Some(v.parse().map_err(|_| format!("config key `log-spacing`: cannot parse `{v}`"))?),
                None => None,
            },
        };

        let cfg = RunConfig {
            lambda_p: positive("lambda-p", pick(cli.lambda_p, "lambda-p")?.unwrap_or(d.lambda_p))?,
            separation: positive("L", pick(cli.separation, "L")?.unwrap_or(d.separation))?,
            lambda_c,
            k,
            a1: pick(cli.a1, "a1")?.unwrap_or(d.a1),
            a2: pick(cli.a2, "a2")?.unwrap_or(d.a2),
            b: pick(cli.b, "b")?,
            radius: positive("radius", pick(cli.radius, "radius")?.unwrap_or(d.radius))?,
            rel_tol: positive("rel-tol", pick(cli.rel_tol, "rel-tol")?.unwrap_or(d.rel_tol))?,
            points: match cli.points {
                Some(p) => Some(p),
                None => num(&file, "points")?,
            },
            log_spacing,
            k_min: pick(cli.k_min, "k-min")?,
            k_max: pick(cli.k_max, "k-max")?,
            l_min: positive("l-min", pick(cli.l_min, "l-min")?.unwrap_or(d.l_min))?,
            l_max: positive("l-max", pick(cli.l_max, "l-max")?.unwrap_or(d.l_max))?,
            fit_min: pick(cli.fit_min, "fit-min")?.unwrap_or(d.fit_min),
            fit_max: pick(cli.fit_max, "fit-max")?.unwrap_or(d.fit_max),
            out: cli.out.clone().or_else(|| file.get("out").map(PathBuf::from)),
        };
        for (name, v) in [("a1", cfg.a1), ("a2", cfg.a2)] {
            positive(name, v)?;
        }
        Ok(cfg)
    }
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))
}

/// `n` points from `lo` to `hi` inclusive.
pub fn spaced(lo: f64, hi: f64, n: usize, log: bool) -> Result<Vec<f64>, String> {
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() || lo < 0.0 {
        return Err(format!("invalid range [{lo}, {hi}]"));
    }
    if n < 2 {
        return Err(format!("need at least 2 points, got {n}"));
    }
    if log && lo <= 0.0 {
        return Err("log spacing needs a positive lower bound".into());
    }
    let step = |i: usize| i as f64 / (n - 1) as f64;
    Ok((0..n)
        .map(|i| match (i, log) {
            (0, _) => lo,
            (i, _) if i == n - 1 => hi,
            (i, true) => lo * (hi / lo).powf(step(i)),
            (i, false) => lo + (hi - lo) * step(i),
        })
        .collect())
}
