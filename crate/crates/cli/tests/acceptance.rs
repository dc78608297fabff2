//! One line per acceptance criterion. Run with `cargo test -p prym-cli --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use anyhow::{anyhow, ensure, Result};
use prym_core::analysis::{coinvariants_both, random_matrix_group};
use prym_core::certificate::{Corruption, PipelineConfig, PipelineOutcome};
use prym_core::linalg::{nullspace, QuotientLattice};
use prym_core::marking::{parse_assignments, random_markings};
use prym_core::mcg::builtin_surfaces;
use prym_core::prym::{cover_summary, preserves_lattice};
use prym_core::ribbon::Ribbon;
use prym_core::{
    build_surface_group, fixed_subspace, is_symplectic, level_marking, point_pushing_pipeline, standard_generators,
    validate_mcg_relations, verify_certificate, CoverData, FiniteGroupTable, PrymRepresentation, SurfaceType,
};

const BIN: &str = env!("CARGO_BIN_EXE_prym");

fn generator_validation() -> Result<String> {
    let mut checked = 0;
    for s in builtin_surfaces() {
        let lib = standard_generators(s)?;
        let rep = validate_mcg_relations(&lib);
        for r in &rep.relations {
            ensure!(r.pass, "{s}: relation {} fails", r.relation);
        }
        for g in &rep.generators {
            ensure!(g.automorphism && g.peripheral && g.symplectic, "{s}: generator {} fails", g.name);
        }
        // the intersection pairing on H1 is preserved
        let omega = Ribbon::new(&lib.presentation)?.intersection_form();
        for g in &lib.generators {
            let m = g.table.abelianized_matrix();
            ensure!(m.transpose().mul(&omega)?.mul(&m)? == omega, "{s}: {} moves the pairing", g.name);
        }
        checked += rep.generators.len();
    }
    Ok(format!("{} libraries, {checked} generators", builtin_surfaces().len()))
}

fn riemann_hurwitz() -> Result<String> {
    let ms = random_markings(2024, 60, 32);
    for m in &ms {
        let s = m.presentation.surface;
        ensure!((1..=2).contains(&s.g) && s.n + s.p <= 2, "marking outside range");
        let c = CoverData::new(m)?;
        let idx = c.index() as i64;
        ensure!(c.index() <= 32, "index {idx} over 32");
        ensure!(c.schreier_rank() as i64 == idx * (s.rank() as i64 - 1) + 1, "{s}: Schreier rank");
        let sum = cover_summary(&c)?;
        let g = sum.cover_genus.ok_or_else(|| anyhow!("{s}: non-integral cover genus"))?;
        ensure!(2 - 2 * g as i64 == idx * s.euler_characteristic() + sum.b as i64, "{s}: Riemann-Hurwitz");
        ensure!(sum.dim_v == 2 * g, "{s}: dim V_K");
        let mut total = vec![0i64; c.h1_rank()];
        for p in &c.peripheral {
            for (t, x) in total.iter_mut().zip(&p.vector) {
                *t += x;
            }
        }
        ensure!(total.iter().all(|&x| x == 0), "{s}: boundary vectors do not sum to zero");
    }
    Ok(format!("{} random markings", ms.len()))
}

fn structure(c: &CoverData, lib_surface: SurfaceType, dim_v: usize) -> Result<()> {
    let rep = PrymRepresentation::for_library(c, &standard_generators(lib_surface)?)?;
    ensure!(rep.boundary.dim_v() == dim_v, "dim V_K = {}", rep.boundary.dim_v());
    let radical = nullspace(&rep.form.raw)?;
    let from_radical = QuotientLattice::new(c.h1_rank(), &radical)?;
    ensure!(from_radical.sub_rank() == rep.boundary.d_b(), "radical has the wrong rank");
    for v in &rep.boundary.vectors {
        ensure!(from_radical.in_span(v)?, "boundary vector outside the radical");
    }
    for r in &radical {
        ensure!(rep.boundary.lattice.in_span(r)?, "radical vector outside B");
    }
    for m in &rep.matrices {
        ensure!(m.matrix.is_unimodular(), "{} not invertible", m.name);
        ensure!(preserves_lattice(&m.raw, &rep.boundary.lattice.sub_basis)?, "{} moves B", m.name);
        ensure!(is_symplectic(&m.matrix, &rep.form.v)?, "{} not symplectic", m.name);
    }
    Ok(())
}

fn prym_structure() -> Result<String> {
    let s = SurfaceType::new(2, 1, 0);
    let c = CoverData::new(&level_marking(&build_surface_group(s)?, 2)?)?;
    structure(&c, s, 34)?;
    let s = SurfaceType::new(1, 0, 1);
    let m = parse_assignments(&build_surface_group(s)?, FiniteGroupTable::quaternion(), "a->i,b->j")?;
    structure(&CoverData::new(&m)?, s, 6)?;
    Ok("level 2 on 2,1,0 (dim 34) and Q8 on 1,0,1 (dim 6)".into())
}

fn coinvariant_routes() -> Result<String> {
    let mut nonzero = 0;
    for k in 0..100u64 {
        let dim = 1 + (k as usize % 8);
        let ms = random_matrix_group(1000 + k, dim, 1 + (k as usize % 4));
        let c = coinvariants_both(dim, &ms)?;
        ensure!(c.by_duality == c.by_saturation, "group {k}: {} vs {}", c.by_duality, c.by_saturation);
        nonzero += usize::from(c.by_duality > 0);
    }
    Ok(format!("100 groups, {nonzero} with nonzero coinvariants"))
}

fn abelian_fixed_space() -> Result<String> {
    let s = SurfaceType::new(2, 1, 0);
    let c = CoverData::new(&level_marking(&build_surface_group(s)?, 2)?)?;
    let rep = PrymRepresentation::for_library(&c, &standard_generators(s)?)?;
    let fixed = fixed_subspace(rep.boundary.dim_v(), &rep.v_matrices())?;
    ensure!(fixed.is_empty(), "fixed subspace has dimension {}", fixed.len());
    Ok(format!("{} generators, fixed dimension 0", rep.matrices.len()))
}

fn q8_marking() -> Result<prym_core::QuotientMarking> {
    let p = build_surface_group(SurfaceType::new(1, 0, 1))?;
    Ok(parse_assignments(&p, FiniteGroupTable::quaternion(), "a->i,b->j")?)
}

fn quaternion_pipeline(out: &mut Option<PipelineOutcome>) -> Result<String> {
    let o = point_pushing_pipeline(&q8_marking()?, None, &PipelineConfig::default())?;
    ensure!(o.candidate.vector.iter().any(|&x| x != 0), "zero vector");
    ensure!(o.orbit.is_finite(), "orbit not finite");
    let report = verify_certificate(&o.bundle, &o.certificate);
    ensure!(report.pass, "certificate fails: {:?}", report.failed());
    ensure!(o.coinvariants > 0, "coinvariants vanish");
    let line = format!(
        "stabilizer index {}, v0 {:?}, orbit {}, dim coinvariants {}",
        o.stabilizer.index,
        o.candidate.vector,
        o.orbit.size.unwrap_or(0),
        o.coinvariants
    );
    *out = Some(o);
    Ok(line)
}

fn tamper(o: &Option<PipelineOutcome>) -> Result<String> {
    let o = o.as_ref().ok_or_else(|| anyhow!("no certificate from the pipeline"))?;
    for k in Corruption::ALL {
        let (mut b, mut c) = (o.bundle.clone(), o.certificate.clone());
        k.apply(&mut b, &mut c);
        let r = verify_certificate(&b, &c);
        ensure!(!r.pass, "{k:?} passes verification");
    }
    Ok(format!("{} corruptions rejected", Corruption::ALL.len()))
}

fn prym(dir: &Path, args: &[&str]) -> Result<()> {
    let st = Command::new(BIN).args(args).arg("--out").arg(dir).arg("--no-cache").output()?;
    ensure!(st.status.success(), "prym {args:?}: {}", String::from_utf8_lossy(&st.stderr));
    Ok(())
}

fn same_dirs(a: &Path, b: &Path) -> Result<usize> {
    let mut n = 0;
    for e in std::fs::read_dir(a)? {
        let e = e?;
        let other = b.join(e.file_name());
        ensure!(std::fs::read(e.path())? == std::fs::read(&other)?, "{} differs", e.path().display());
        n += 1;
    }
    ensure!(std::fs::read_dir(b)?.count() == n, "{} has extra files", b.display());
    Ok(n)
}

fn determinism() -> Result<String> {
    let tmp = tempfile::tempdir()?;
    let q8 = ["--surface", "1,0,1", "--quotient", "Q8", "--marking", "a->i,b->j"];
    let runs: Vec<(&str, Vec<&str>)> = vec![
        ("present", vec!["--surface", "2,0,1"]),
        ("cover", vec!["--surface", "2,1,0", "--level", "2", "--report", "md"]),
        ("prym", q8.to_vec()),
        ("stabilizer", q8.to_vec()),
        ("orbit", [&q8[..], &["--vector", "1,0,0,0,1,-1"]].concat()),
        ("certify", [&q8[..], &["--cap", "20000", "--report", "md"]].concat()),
    ];
    let mut files = 0;
    for (cmd, args) in &runs {
        let a = tmp.path().join(format!("{cmd}-a"));
        let b = tmp.path().join(format!("{cmd}-b"));
        prym(&a, &[&[*cmd][..], args].concat())?;
        let conf = a.join("run.conf");
        prym(&b, &[*cmd, "--config", conf.to_str().unwrap()])?;
        files += same_dirs(&a, &b)?;
    }
    Ok(format!("{} subcommands, {files} artifacts identical", runs.len()))
}

type Criterion<'a> = (&'static str, Duration, Box<dyn FnMut() -> Result<String> + 'a>);

fn main() {
    let mut outcome = None;
    let criteria: Vec<Criterion> = vec![
        ("generator validation", Duration::from_secs(10), Box::new(generator_validation)),
        ("Nielsen-Schreier / Riemann-Hurwitz", Duration::from_secs(120), Box::new(riemann_hurwitz)),
        ("Prym structure", Duration::from_secs(120), Box::new(prym_structure)),
        ("coinvariants by duality and saturation", Duration::from_secs(60), Box::new(coinvariant_routes)),
        ("abelian cover fixed space", Duration::from_secs(60), Box::new(abelian_fixed_space)),
        ("quaternion pipeline", Duration::from_secs(600), Box::new(|| quaternion_pipeline(&mut outcome))),
    ];
    let mut results = Vec::new();
    let mut run = |n: usize, name: &str, limit: Duration, f: &mut dyn FnMut() -> Result<String>| {
        let t = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err(anyhow!("panicked")));
        let dt = t.elapsed();
        let (pass, detail) = match r {
            Ok(d) if dt <= limit => (true, d),
            Ok(d) => (false, format!("{d}; over the {}s limit", limit.as_secs())),
            Err(e) => (false, format!("{e:#}")),
        };
        println!(
            "criterion {n}: {} {name} ({detail}) [{:.2}s]",
            if pass { "PASS" } else { "FAIL" },
            dt.as_secs_f64()
        );
        results.push(pass);
    };
    for (i, (name, limit, mut f)) in criteria.into_iter().enumerate() {
        run(i + 1, name, limit, &mut *f);
    }
    run(7, "tamper suite", Duration::from_secs(10), &mut || tamper(&outcome));
    run(8, "determinism", Duration::from_secs(600), &mut determinism);
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
