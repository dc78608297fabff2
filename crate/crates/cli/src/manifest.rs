use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use prym_core::hash::sha256_hex;
use prym_core::prym::TOOL_VERSION;
use serde::Serialize;

use crate::config::Settings;

#[derive(Serialize)]
pub struct Caps {
    pub orbit: usize,
    pub stabilizer: usize,
    pub aut: usize,
    pub epi: usize,
}

/// Record of one run. Paths and timestamps are left out so reruns compare byte for byte.
#[derive(Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub surface: Option<String>,
    pub marking_source: Option<String>,
    pub marking_hash: Option<String>,
    pub library_id: Option<String>,
    pub caps: Caps,
    pub seed: u64,
    pub candidates: Option<String>,
    pub tool_version: String,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    /// Derived quantities worth keeping next to the hashes.
    pub results: BTreeMap<String, serde_json::Value>,
}

impl RunManifest {
    pub fn new(subcommand: &str, s: &Settings) -> Self {
        RunManifest {
            subcommand: subcommand.to_string(),
            surface: s.surface.clone(),
            marking_source: None,
            marking_hash: None,
            library_id: None,
            caps: Caps {
                orbit: s.cap,
                stabilizer: s.stabilizer_cap,
                aut: s.aut_cap,
                epi: s.epi_cap,
            },
            seed: s.seed,
            candidates: s.candidates.clone(),
            tool_version: TOOL_VERSION.to_string(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            results: BTreeMap::new(),
        }
    }

    pub fn result<T: Serialize>(&mut self, key: &str, value: T) {
        self.results
            .insert(key.to_string(), serde_json::to_value(value).expect("serializable"));
    }
}

pub struct Artifacts {
    pub dir: PathBuf,
    pub manifest: RunManifest,
}

impl Artifacts {
    pub fn new(dir: &Path, manifest: RunManifest) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Artifacts {
            dir: dir.to_path_buf(),
            manifest,
        })
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        self.manifest.outputs.insert(name.to_string(), sha256_hex(text.as_bytes()));
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write_text(name, &text)
    }

    /// Writes `run.conf` and `manifest.json`.
    pub fn finish(mut self, settings: &Settings) -> Result<()> {
        self.write_text("run.conf", &settings.to_config())?;
        let mut text = serde_json::to_string_pretty(&self.manifest)?;
        text.push('\n');
        let path = self.dir.join("manifest.json");
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}
