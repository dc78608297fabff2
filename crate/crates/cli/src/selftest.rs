//! Reduced invariant suites, one line per suite.

use std::time::Instant;

use anyhow::Result;
use prym_core::analysis::{coinvariants_both, random_matrix_group};
use prym_core::certificate::{Corruption, PipelineConfig};
use prym_core::marking::{parse_assignments, random_markings};
use prym_core::mcg::builtin_surfaces;
use prym_core::prym::{cover_summary, preserves_lattice};
use prym_core::{
    build_surface_group, is_symplectic, point_pushing_pipeline, standard_generators, validate_mcg_relations,
    verify_certificate, CoverData, FiniteGroupTable, PrymRepresentation, SurfaceType,
};
use serde::Serialize;

#[derive(Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn libraries() -> Result<String> {
    for s in builtin_surfaces() {
        let r = validate_mcg_relations(&standard_generators(s)?);
        anyhow::ensure!(r.pass, "library for {s} fails validation");
    }
    Ok(format!("{} libraries", builtin_surfaces().len()))
}

fn covers(seed: u64) -> Result<String> {
    let ms = random_markings(seed, 20, 24);
    for m in &ms {
        let c = CoverData::new(m)?;
        let s = m.presentation.surface;
        let sum = cover_summary(&c)?;
        let g = sum.cover_genus.ok_or_else(|| anyhow::anyhow!("no cover genus on {s}"))?;
        anyhow::ensure!(
            2 - 2 * g as i64 == c.index() as i64 * s.euler_characteristic() + sum.b as i64,
            "Riemann-Hurwitz fails on {s}"
        );
        anyhow::ensure!(sum.dim_v == 2 * g, "dim V_K != 2g' on {s}");
        anyhow::ensure!(
            c.schreier_rank() == c.index() * (s.rank() - 1) + 1,
            "Schreier rank wrong on {s}"
        );
    }
    Ok(format!("{} random markings", ms.len()))
}

fn prym_structure() -> Result<String> {
    let s = SurfaceType::new(1, 0, 1);
    let p = build_surface_group(s)?;
    let m = parse_assignments(&p, FiniteGroupTable::quaternion(), "a->i,b->j")?;
    let c = CoverData::new(&m)?;
    let rep = PrymRepresentation::for_library(&c, &standard_generators(s)?)?;
    for g in &rep.matrices {
        anyhow::ensure!(g.matrix.is_unimodular(), "{} not invertible", g.name);
        anyhow::ensure!(is_symplectic(&g.matrix, &rep.form.v)?, "{} not symplectic", g.name);
        anyhow::ensure!(
            preserves_lattice(&g.raw, &rep.boundary.lattice.sub_basis)?,
            "{} moves B",
            g.name
        );
    }
    Ok(format!("Q8 cover, dim V_K = {}", rep.boundary.dim_v()))
}

fn coinvariants(seed: u64) -> Result<String> {
    for k in 0..30u64 {
        let dim = 1 + (k as usize % 8);
        let ms = random_matrix_group(seed.wrapping_add(k), dim, 1 + k as usize % 3);
        let c = coinvariants_both(dim, &ms)?;
        anyhow::ensure!(c.by_duality == c.by_saturation, "routes disagree on group {k}");
    }
    Ok("30 random groups".into())
}

fn certificates(cap: usize) -> Result<String> {
    let p = build_surface_group(SurfaceType::new(1, 0, 1))?;
    let m = parse_assignments(&p, FiniteGroupTable::quaternion(), "a->i,b->j")?;
    let cfg = PipelineConfig {
        orbit_cap: cap,
        ..PipelineConfig::default()
    };
    let out = point_pushing_pipeline(&m, None, &cfg)?;
    anyhow::ensure!(verify_certificate(&out.bundle, &out.certificate).pass, "certificate fails");
    for k in Corruption::ALL {
        let (mut b, mut c) = (out.bundle.clone(), out.certificate.clone());
        k.apply(&mut b, &mut c);
        anyhow::ensure!(!verify_certificate(&b, &c).pass, "{k:?} not detected");
    }
    Ok(format!("orbit size {}, 5 corruptions detected", out.orbit.size.unwrap_or(0)))
}

type Suite = Box<dyn Fn() -> Result<String>>;

pub fn run(seed: u64, cap: usize) -> Vec<SuiteResult> {
    let suites: Vec<(&str, Suite)> = vec![
        ("libraries", Box::new(libraries)),
        ("covers", Box::new(move || covers(seed))),
        ("prym", Box::new(prym_structure)),
        ("coinvariants", Box::new(move || coinvariants(seed))),
        ("certificates", Box::new(move || certificates(cap))),
    ];
    suites
        .into_iter()
        .map(|(name, f)| {
            let t = Instant::now();
            let r = f();
            let pass = r.is_ok();
            let detail = match r {
                Ok(d) => d,
                Err(e) => format!("{e:#}"),
            };
            println!(
                "suite {name}: {} ({detail}, {:.2}s)",
                if pass { "pass" } else { "FAIL" },
                t.elapsed().as_secs_f64()
            );
            SuiteResult {
                name: name.into(),
                pass,
                detail,
            }
        })
        .collect()
}
