//! Turning settings into a surface, a marking and a generator library.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use prym_core::hash::sha256_hex;
use prym_core::marking::{epi_closure_marking, level_marking, QuotientMarking};
use prym_core::{build_surface_group, standard_generators, FiniteGroupTable, GeneratorLibrary, SurfaceGroupPresentation, SurfaceType};

use crate::config::Settings;

/// Inputs read from disk, by content hash, for the manifest.
#[derive(Default)]
pub struct InputHashes(pub BTreeMap<String, String>);

impl InputHashes {
    fn record(&mut self, name: &str, bytes: &[u8]) {
        self.0.insert(name.to_string(), sha256_hex(bytes));
    }

    pub fn read(&mut self, name: &str, path: &Path) -> Result<String> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        self.record(name, text.as_bytes());
        Ok(text)
    }
}

pub fn surface(s: &Settings) -> Result<SurfaceType> {
    let text = s.surface.as_deref().ok_or_else(|| anyhow!("--surface g,n,p is required"))?;
    let t: SurfaceType = text.parse().map_err(|_| anyhow!("bad surface `{text}`, expected g,n,p"))?;
    if t.is_degenerate() {
        return Err(prym_core::Error::DegenerateSurface(t).into());
    }
    Ok(t)
}

pub fn presentation(s: &Settings) -> Result<SurfaceGroupPresentation> {
    Ok(build_surface_group(surface(s)?)?)
}

/// `Q8`, `Zn`, `Dn`, `Sk`, `Zl^r`, or a group table file.
pub fn group(spec: &str, hashes: &mut InputHashes) -> Result<FiniteGroupTable> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = hashes.read("quotient", path)?;
        return Ok(FiniteGroupTable::from_text(&text)?);
    }
    let num = |t: &str| t.parse::<usize>().map_err(|_| anyhow!("unknown group `{spec}`"));
    let g = match spec {
        "Q8" | "q8" => FiniteGroupTable::quaternion(),
        _ if spec.starts_with('Z') && spec.contains('^') => {
            let (l, r) = spec[1..].split_once('^').expect("checked");
            FiniteGroupTable::elementary_abelian(num(l)?, num(r)?)
        }
        _ if spec.starts_with('Z') => FiniteGroupTable::cyclic(num(&spec[1..])?),
        _ if spec.starts_with('D') => FiniteGroupTable::dihedral(num(&spec[1..])?),
        _ if spec.starts_with('S') => FiniteGroupTable::symmetric(num(&spec[1..])?),
        _ => bail!("unknown group `{spec}`: not a file and not a built-in name"),
    };
    Ok(g)
}

pub struct MarkingChoice {
    pub marking: QuotientMarking,
    pub source: String,
}

pub fn marking(s: &Settings, hashes: &mut InputHashes) -> Result<MarkingChoice> {
    let pres = presentation(s)?;
    match (s.level, &s.quotient) {
        (Some(_), Some(_)) => bail!("--level and --quotient are exclusive"),
        (Some(l), None) => Ok(MarkingChoice {
            marking: level_marking(&pres, l)?,
            source: format!("level {l}"),
        }),
        (None, Some(q)) => {
            let grp = group(q, hashes)?;
            if s.epi_closure {
                if s.marking.is_some() {
                    bail!("--epi-closure takes no --marking");
                }
                let e = epi_closure_marking(&pres, &grp, s.epi_cap, s.aut_cap)?;
                return Ok(MarkingChoice {
                    source: format!(
                        "epi-closure {} ({} epimorphisms, {} classes)",
                        grp.name, e.epimorphisms, e.classes
                    ),
                    marking: e.marking,
                });
            }
            let spec = s.marking.as_deref().ok_or_else(|| anyhow!("--quotient needs --marking or --epi-closure"))?;
            let path = Path::new(spec);
            let m = if path.is_file() {
                let text = hashes.read("marking", path)?;
                QuotientMarking::from_text(&pres, grp.clone(), &text)?
            } else {
                prym_core::marking::parse_assignments(&pres, grp.clone(), spec)?
            };
            if !m.is_surjective() {
                bail!(prym_core::Error::InvalidMarking("marking is not surjective".into()));
            }
            Ok(MarkingChoice {
                source: format!("quotient {}", m.describe()),
                marking: m,
            })
        }
        (None, None) => bail!("choose a marking with --level or --quotient"),
    }
}

/// Library for `surface`: the file from `--library` if given, else the built-in one.
pub fn library(s: &Settings, surface: SurfaceType, hashes: &mut InputHashes) -> Result<GeneratorLibrary> {
    match &s.library {
        Some(p) => {
            let text = hashes.read("library", p)?;
            let lib = GeneratorLibrary::from_text(&text)?;
            if lib.surface != surface {
                bail!(prym_core::Error::InvalidInput(format!(
                    "library {} is for {}, not {surface}",
                    p.display(),
                    lib.surface
                )));
            }
            Ok(lib)
        }
        None => Ok(standard_generators(surface)?),
    }
}

pub fn vector(text: &str) -> Result<Vec<i64>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<i64>().map_err(|_| anyhow!(prym_core::Error::InvalidInput(format!("bad vector entry `{t}`")))))
        .collect()
}
