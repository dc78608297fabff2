//! `key = value` run configuration. Keys are the long flag names; `#` starts a comment.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;

use crate::Opts;

pub const DEFAULT_OUT: &str = "prym-out";
pub const DEFAULT_CACHE: &str = ".prym-cache";

const KEYS: &[&str] = &[
    "surface",
    "level",
    "quotient",
    "marking",
    "epi-closure",
    "library",
    "cap",
    "stabilizer-cap",
    "aut-cap",
    "epi-cap",
    "threads",
    "seed",
    "out",
    "no-cache",
    "cache-dir",
    "report",
    "vector",
    "candidates",
    "bundle",
    "cert",
];

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {}: expected `key = value`", k + 1);
        };
        let key = key.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            bail!("config line {}: unknown key `{key}`", k + 1);
        }
        if out.insert(key.clone(), value.trim().to_string()).is_some() {
            bail!("config line {}: `{key}` set twice", k + 1);
        }
    }
    Ok(out)
}

/// Fully resolved options; command-line values win over the config file.
#[derive(Clone, Debug, Serialize)]
pub struct Settings {
    pub surface: Option<String>,
    pub level: Option<usize>,
    pub quotient: Option<String>,
    pub marking: Option<String>,
    pub epi_closure: bool,
    pub library: Option<PathBuf>,
    pub cap: usize,
    pub stabilizer_cap: usize,
    pub aut_cap: usize,
    pub epi_cap: usize,
    #[serde(skip)]
    pub threads: Option<usize>,
    pub seed: u64,
    #[serde(skip)]
    pub out: PathBuf,
    #[serde(skip)]
    pub no_cache: bool,
    #[serde(skip)]
    pub cache_dir: PathBuf,
    pub report: Option<String>,
    pub vector: Option<String>,
    pub candidates: Option<String>,
    pub bundle: Option<PathBuf>,
    pub cert: Option<PathBuf>,
}

fn pick<T: std::str::FromStr>(cli: Option<T>, file: &BTreeMap<String, String>, key: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    if cli.is_some() {
        return Ok(cli);
    }
    match file.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse()
            .map(Some)
            .map_err(|e| anyhow::anyhow!("config key `{key}`: {e}")),
    }
}

fn flag(cli: bool, file: &BTreeMap<String, String>, key: &str) -> Result<bool> {
    Ok(cli || pick::<bool>(None, file, key)?.unwrap_or(false))
}

impl Settings {
    pub fn resolve(opts: &Opts) -> Result<Settings> {
        let file = match &opts.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
                parse_config(&text)?
            }
            None => BTreeMap::new(),
        };
        Ok(Settings {
            surface: pick(opts.surface.clone(), &file, "surface")?,
            level: pick(opts.level, &file, "level")?,
            quotient: pick(opts.quotient.clone(), &file, "quotient")?,
            marking: pick(opts.marking.clone(), &file, "marking")?,
            epi_closure: flag(opts.epi_closure, &file, "epi-closure")?,
            library: pick(opts.library.clone(), &file, "library")?,
            cap: pick(opts.cap, &file, "cap")?.unwrap_or(prym_core::analysis::DEFAULT_ORBIT_CAP),
            stabilizer_cap: pick(opts.stabilizer_cap, &file, "stabilizer-cap")?.unwrap_or(10_000),
            aut_cap: pick(opts.aut_cap, &file, "aut-cap")?.unwrap_or(16),
            epi_cap: pick(opts.epi_cap, &file, "epi-cap")?.unwrap_or(4096),
            threads: pick(opts.threads, &file, "threads")?,
            seed: pick(opts.seed, &file, "seed")?.unwrap_or(0),
            out: pick(opts.out.clone(), &file, "out")?.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
            no_cache: flag(opts.no_cache, &file, "no-cache")?,
            cache_dir: pick(opts.cache_dir.clone(), &file, "cache-dir")?.unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE)),
            report: pick(opts.report.clone(), &file, "report")?,
            vector: pick(opts.vector.clone(), &file, "vector")?,
            candidates: pick(opts.candidates.clone(), &file, "candidates")?,
            bundle: pick(opts.bundle.clone(), &file, "bundle")?,
            cert: pick(opts.cert.clone(), &file, "cert")?,
        })
    }

    /// Config file that reproduces this run; output location and caching are left to the caller.
    pub fn to_config(&self) -> String {
        let mut lines = Vec::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                lines.push(format!("{k} = {v}"));
            }
        };
        let path = |p: &Option<PathBuf>| p.as_deref().map(|p: &Path| p.display().to_string());
        put("surface", self.surface.clone());
        put("level", self.level.map(|x| x.to_string()));
        put("quotient", self.quotient.clone());
        put("marking", self.marking.clone());
        put("epi-closure", self.epi_closure.then(|| "true".into()));
        put("library", path(&self.library));
        put("cap", Some(self.cap.to_string()));
        put("stabilizer-cap", Some(self.stabilizer_cap.to_string()));
        put("aut-cap", Some(self.aut_cap.to_string()));
        put("epi-cap", Some(self.epi_cap.to_string()));
        put("seed", Some(self.seed.to_string()));
        put("report", self.report.clone());
        put("vector", self.vector.clone());
        put("candidates", self.candidates.clone());
        put("bundle", path(&self.bundle));
        put("cert", path(&self.cert));
        let mut s = lines.join("\n");
        s.push('\n');
        s
    }
}
