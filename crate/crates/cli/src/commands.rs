use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use prym_core::analysis::{
    candidate_vectors, find_finite_orbit, Candidate, CandidateConfig, CandidateStrategy, OrbitResult, DEFAULT_STRATEGIES,
};
use prym_core::certificate::{certification_surface, point_pushing_pipeline, verify_certificate, PipelineConfig};
use prym_core::hash::sha256_hex;
use prym_core::marking::QuotientMarking;
use prym_core::prym::{cover_summary, GeneratorMatrices, PrymBundle, TOOL_VERSION};
use prym_core::stabilizer::marking_stabilizer;
use prym_core::{orbit_search, CoverData, GeneratorLibrary, McgWord, PointPushingCertificate, PrymRepresentation};
use serde::Serialize;

use crate::config::Settings;
use crate::inputs::{self, InputHashes};
use crate::manifest::{Artifacts, RunManifest};
use crate::report::Report;
use crate::VerificationFailed;

pub struct Run<'a> {
    pub settings: &'a Settings,
    pub hashes: InputHashes,
    pub artifacts: Artifacts,
    pub report: Report,
}

impl<'a> Run<'a> {
    pub fn new(cmd: &str, settings: &'a Settings) -> Result<Self> {
        if let Some(r) = &settings.report {
            if r != "md" {
                bail!(prym_core::Error::InvalidInput(format!("unknown report format `{r}`")));
            }
        }
        Ok(Run {
            settings,
            hashes: InputHashes::default(),
            artifacts: Artifacts::new(&settings.out, RunManifest::new(cmd, settings))?,
            report: Report::new(cmd),
        })
    }

    pub fn finish(mut self) -> Result<()> {
        if self.settings.report.is_some() {
            let text = self.report.markdown();
            self.artifacts.write_text("report.md", &text)?;
        }
        self.artifacts.manifest.inputs = std::mem::take(&mut self.hashes.0);
        self.artifacts.finish(self.settings)
    }

    fn marking(&mut self) -> Result<QuotientMarking> {
        let choice = inputs::marking(self.settings, &mut self.hashes)?;
        let m = &mut self.artifacts.manifest;
        m.marking_source = Some(choice.source.clone());
        m.marking_hash = Some(choice.marking.content_hash());
        self.report.row("marking", &choice.source);
        Ok(choice.marking)
    }

    fn library(&mut self, marking: &QuotientMarking) -> Result<GeneratorLibrary> {
        let lib = inputs::library(self.settings, marking.presentation.surface, &mut self.hashes)?;
        self.artifacts.manifest.library_id = Some(lib.id.clone());
        Ok(lib)
    }

    fn cover(&mut self, marking: &QuotientMarking) -> Result<CoverData> {
        let key = sha256_hex(format!("{TOOL_VERSION}\n{}", marking.content_hash()).as_bytes());
        let path = self.settings.cache_dir.join(format!("cover-{}.json", &key[..16]));
        if !self.settings.no_cache {
            if let Ok(text) = std::fs::read_to_string(&path) {
                if let Ok(c) = serde_json::from_str::<CoverData>(&text) {
                    if c.marking == *marking {
                        return Ok(c);
                    }
                }
            }
        }
        let c = CoverData::new(marking)?;
        if !self.settings.no_cache {
            std::fs::create_dir_all(&self.settings.cache_dir)
                .with_context(|| format!("creating cache {}", self.settings.cache_dir.display()))?;
            std::fs::write(&path, serde_json::to_string(&c)?)?;
        }
        Ok(c)
    }
}

#[derive(Serialize)]
struct PeripheralOut {
    kind: prym_core::PeripheralKind,
    word: String,
}

#[derive(Serialize)]
struct PresentationOut {
    surface: String,
    euler_characteristic: i64,
    generators: Vec<String>,
    relator: Option<String>,
    peripheral: Vec<PeripheralOut>,
}

pub fn present(run: &mut Run) -> Result<()> {
    let pres = inputs::presentation(run.settings)?;
    let out = PresentationOut {
        surface: pres.surface.to_string(),
        euler_characteristic: pres.surface.euler_characteristic(),
        generators: pres.names.clone(),
        relator: pres.relator.as_ref().map(|r| pres.format_word(r)),
        peripheral: pres
            .peripheral
            .iter()
            .zip(&pres.peripheral_kinds)
            .map(|(w, &kind)| PeripheralOut {
                kind,
                word: pres.format_word(w),
            })
            .collect(),
    };
    println!("surface {} (chi = {})", out.surface, out.euler_characteristic);
    println!("generators {}", out.generators.join(" "));
    if let Some(r) = &out.relator {
        println!("relator {r}");
    }
    for p in &out.peripheral {
        println!("{} {}", format!("{:?}", p.kind).to_lowercase(), p.word);
    }
    run.report.row("surface", &out.surface);
    run.report.row("generators", out.generators.join(" "));
    run.artifacts.write_json("presentation.json", &out)?;
    Ok(())
}

#[derive(Serialize)]
struct CycleOut {
    peripheral: usize,
    coset: usize,
    length: usize,
}

#[derive(Serialize)]
struct CoverOut {
    marking: String,
    summary: prym_core::prym::CoverSummary,
    cycles: Vec<CycleOut>,
}

pub fn cover(run: &mut Run) -> Result<()> {
    let marking = run.marking()?;
    let c = run.cover(&marking)?;
    let summary = cover_summary(&c)?;
    let genus = summary.cover_genus.map_or("n/a".to_string(), |g| g.to_string());
    println!(
        "index {}, r_K = {}, b = {}, d_B = {}, g' = {}, dim V_K = {}",
        summary.index, summary.r_k, summary.b, summary.d_b, genus, summary.dim_v
    );
    run.report.row("index", summary.index);
    run.report.row("r_K", summary.r_k);
    run.report.row("b", summary.b);
    run.report.row("d_B", summary.d_b);
    run.report.row("cover genus", &genus);
    run.report.row("dim V_K", summary.dim_v);
    run.artifacts.manifest.result("summary", &summary);
    let out = CoverOut {
        marking: marking.describe(),
        cycles: c
            .peripheral
            .iter()
            .map(|p| CycleOut {
                peripheral: p.peripheral,
                coset: p.coset,
                length: p.length,
            })
            .collect(),
        summary,
    };
    run.artifacts.write_json("cover.json", &out)?;
    Ok(())
}

/// Library generators when they all preserve `K`, else the stabilizer's Schreier generators.
fn acting_words(
    run: &mut Run,
    marking: &QuotientMarking,
    lib: &GeneratorLibrary,
    gens: &GeneratorMatrices,
) -> Result<Vec<(String, McgWord)>> {
    if (0..lib.generators.len()).all(|g| gens.preserves(g)) {
        run.report.row("acting group", "full library (K is preserved)");
        return Ok(lib
            .generators
            .iter()
            .enumerate()
            .map(|(i, g)| (g.name.clone(), McgWord::gen(i)))
            .collect());
    }
    let st = marking_stabilizer(marking, lib, None, run.settings.stabilizer_cap)?;
    run.report.row("acting group", format!("stabilizer of K, index {}", st.index));
    run.artifacts.manifest.result("stabilizer_index", st.index);
    Ok(st
        .words
        .iter()
        .enumerate()
        .map(|(k, w)| (format!("S{k}"), w.clone()))
        .collect())
}

fn representation(run: &mut Run) -> Result<(CoverData, GeneratorLibrary, PrymRepresentation)> {
    let marking = run.marking()?;
    let lib = run.library(&marking)?;
    let c = run.cover(&marking)?;
    let gens = GeneratorMatrices::new(&c, &lib)?;
    let named = acting_words(run, &marking, &lib, &gens)?;
    let rep = PrymRepresentation::build_with(&c, &lib, &gens, &named)?;
    run.report.row("dim V_K", rep.boundary.dim_v());
    run.report.row("generators", rep.matrices.len());
    Ok((c, lib, rep))
}

pub fn prym(run: &mut Run) -> Result<()> {
    let (c, lib, rep) = representation(run)?;
    let bundle = rep.bundle(&c, &lib);
    println!(
        "dim V_K = {}, {} generator matrices, form determinant {}",
        bundle.basis_meta.dim_v,
        bundle.generators.len(),
        bundle.form.determinant()?
    );
    run.artifacts.manifest.result("dim_v", bundle.basis_meta.dim_v);
    run.artifacts.write_json("bundle.json", &bundle)?;
    Ok(())
}

fn strategies(s: &Settings) -> Result<Vec<CandidateStrategy>> {
    match &s.candidates {
        None => Ok(DEFAULT_STRATEGIES.to_vec()),
        Some(t) => t
            .split(',')
            .map(|x| x.trim().parse().map_err(|e: prym_core::Error| anyhow!(e)))
            .collect(),
    }
}

fn candidate_config(s: &Settings) -> Result<CandidateConfig> {
    Ok(CandidateConfig {
        strategies: strategies(s)?,
        seed: s.seed,
        ..CandidateConfig::default()
    })
}

#[derive(Serialize)]
struct OrbitOut {
    candidates_tried: usize,
    candidate: Option<Candidate>,
    result: Option<OrbitResult>,
    barycenter: Option<Vec<i64>>,
}

pub fn orbit(run: &mut Run) -> Result<()> {
    let (_, _, rep) = representation(run)?;
    let dim = rep.boundary.dim_v();
    let ms = rep.v_matrices();
    let cap = run.settings.cap;
    let (tried, found) = match &run.settings.vector {
        Some(v) => {
            let v = inputs::vector(v)?;
            let r = orbit_search(&ms, &v, cap)?;
            let c = Candidate {
                vector: v,
                source: "given".into(),
            };
            (1, Some((c, r)))
        }
        None => {
            let cands = candidate_vectors(dim, &ms, &candidate_config(run.settings)?)?;
            let search = find_finite_orbit(&ms, &cands, cap)?;
            (search.tried, search.found)
        }
    };
    let finite = found.as_ref().is_some_and(|(_, r)| r.is_finite());
    let out = OrbitOut {
        candidates_tried: tried,
        barycenter: found.as_ref().and_then(|(_, r)| r.barycenter()),
        candidate: found.as_ref().map(|(c, _)| c.clone()),
        result: found.map(|(_, r)| r),
    };
    let size = out.result.as_ref().and_then(|r| r.size);
    match (&out.candidate, size) {
        (Some(c), Some(n)) if finite => println!("finite orbit of size {n} from {} ({:?})", c.source, c.vector),
        _ => println!("no finite orbit within cap {cap} ({tried} candidates)"),
    }
    run.report.row("candidates tried", tried);
    run.report.row(
        "orbit",
        size.map_or(format!("cap {cap} exceeded"), |n| format!("finite, size {n}")),
    );
    run.artifacts.manifest.result("orbit_size", size);
    run.artifacts.write_json("orbit.json", &out)?;
    if !finite {
        let e = prym_core::Error::CapExceeded { cap, found: tried };
        return Err(anyhow::Error::new(e).context(format!("no finite orbit among {tried} candidates")));
    }
    Ok(())
}

pub fn stabilizer(run: &mut Run) -> Result<()> {
    let marking = run.marking()?;
    let lib = run.library(&marking)?;
    let cap = run.settings.stabilizer_cap;
    let full = marking_stabilizer(&marking, &lib, None, cap)?;
    let split = marking_stabilizer(&marking, &lib, Some(&lib.split_copy()), cap)?;
    println!(
        "orbit of K: {} (full library), {} (split copy); {} and {} Schreier generators",
        full.index,
        split.index,
        full.words.len(),
        split.words.len()
    );
    run.report.row("index in library group", full.index);
    run.report.row("index in split copy", split.index);
    run.artifacts.manifest.result("index", full.index);
    run.artifacts.manifest.result("split_index", split.index);
    #[derive(Serialize)]
    struct Out {
        full: prym_core::StabilizerData,
        split: prym_core::StabilizerData,
    }
    run.artifacts.write_json("stabilizer.json", &Out { full, split })?;
    Ok(())
}

#[derive(Serialize)]
struct CertifyOut {
    surface: String,
    promoted_from: Option<String>,
    stabilizer_index: usize,
    split_stabilizer_index: usize,
    candidates_tried: usize,
    candidate: Candidate,
    orbit_size: Option<usize>,
    v0_orbit_size: usize,
    g_generators: usize,
    coinvariants: usize,
    verified: bool,
}

pub fn certify(run: &mut Run) -> Result<()> {
    let marking = run.marking()?;
    let target = certification_surface(marking.presentation.surface)?;
    let lib = match &run.settings.library {
        Some(_) => Some(inputs::library(run.settings, target, &mut run.hashes)?),
        None => None,
    };
    let cfg = PipelineConfig {
        orbit_cap: run.settings.cap,
        stabilizer_cap: run.settings.stabilizer_cap,
        candidates: candidate_config(run.settings)?,
        vector: run.settings.vector.as_deref().map(inputs::vector).transpose()?,
    };
    let out = point_pushing_pipeline(&marking, lib.as_ref(), &cfg)?;
    let verified = verify_certificate(&out.bundle, &out.certificate).pass;
    let summary = CertifyOut {
        surface: out.surface.to_string(),
        promoted_from: out.promoted_from.map(|s| s.to_string()),
        stabilizer_index: out.stabilizer.index,
        split_stabilizer_index: out.split_stabilizer.index,
        candidates_tried: out.candidates_tried,
        candidate: out.candidate.clone(),
        orbit_size: out.orbit.size,
        v0_orbit_size: out.v0_orbit_size,
        g_generators: out.bundle.generators.len(),
        coinvariants: out.coinvariants,
        verified,
    };
    println!(
        "v0 = {:?}: orbit {} under the stabilizer, {} under the split copy; G has {} generators; dim (H1(K;Q))_G = {}",
        out.certificate.v0,
        out.orbit.size.unwrap_or(0),
        out.v0_orbit_size,
        summary.g_generators,
        out.coinvariants
    );
    let m = &mut run.artifacts.manifest;
    m.library_id = Some(out.bundle.library_id.clone());
    m.result("stabilizer_index", out.stabilizer.index);
    m.result("orbit_size", out.orbit.size);
    m.result("v0_orbit_size", out.v0_orbit_size);
    m.result("coinvariants", out.coinvariants);
    run.report.row("certification surface", &summary.surface);
    run.report.row("stabilizer index", out.stabilizer.index);
    run.report.row("candidate", format!("{} {:?}", out.candidate.source, out.candidate.vector));
    run.report.row("orbit size", out.orbit.size.unwrap_or(0));
    run.report.row("G generators", summary.g_generators);
    run.report.row("coinvariants dimension", out.coinvariants);
    run.report.row("certificate", if verified { "pass" } else { "fail" });
    run.artifacts.write_json("certify.json", &summary)?;
    run.artifacts.write_json("certificate-bundle.json", &out.bundle)?;
    run.artifacts.write_json("certificate.json", &out.certificate)?;
    if !verified {
        return Err(VerificationFailed("emitted certificate does not verify".into()).into());
    }
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(hashes: &mut InputHashes, name: &str, path: Option<&Path>) -> Result<T> {
    let path = path.ok_or_else(|| anyhow!("--{name} FILE is required"))?;
    let text = hashes.read(name, path)?;
    serde_json::from_str(&text).map_err(|e| anyhow!(prym_core::Error::InvalidInput(format!("{}: {e}", path.display()))))
}

pub fn verify(run: &mut Run) -> Result<()> {
    let bundle: PrymBundle = read_json(&mut run.hashes, "bundle", run.settings.bundle.as_deref())?;
    let cert: PointPushingCertificate = read_json(&mut run.hashes, "cert", run.settings.cert.as_deref())?;
    let report = verify_certificate(&bundle, &cert);
    for c in report.checks.iter().filter(|c| !c.pass) {
        eprintln!("check {} failed: {}", c.name, c.detail);
    }
    println!("certificate {}", if report.pass { "pass" } else { "fail" });
    run.report.row("checks", report.checks.len());
    run.report.row("failed", report.failed().join(", "));
    run.report.row("certificate", if report.pass { "pass" } else { "fail" });
    run.artifacts.manifest.result("pass", report.pass);
    run.artifacts.write_json("verify.json", &report)?;
    if !report.pass {
        return Err(VerificationFailed(format!("failed checks: {}", report.failed().join(", "))).into());
    }
    Ok(())
}
