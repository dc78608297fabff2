//! Point-pushing certificates: a vector `v0` fixed by a subgroup `G` of the split copy gives the
//! nonzero `G`-invariant functional `ψ = i(v0, ·) ∘ proj` on `H_1(K; Q)`.

use serde::{Deserialize, Serialize};

use crate::analysis::{
    candidate_vectors, coinvariants_dimension, find_finite_orbit, Candidate, CandidateConfig, OrbitResult,
    DEFAULT_ORBIT_CAP,
};
use crate::cover::CoverData;
use crate::error::{Error, Result};
use crate::marking::QuotientMarking;
use crate::mcg::{standard_generators, GeneratorLibrary, McgWord};
use crate::prym::{BasisMeta, GeneratorMatrices, PrymBundle, PrymRepresentation, TOOL_VERSION};
use crate::stabilizer::{marking_stabilizer, vector_stabilizer, StabilizerData};
use crate::surface::{build_surface_group, SurfaceType};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateGenerator {
    pub name: String,
    pub word: String,
    pub raw_matrix_hash: String,
    pub invariance: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointPushingCertificate {
    pub surface: SurfaceType,
    pub marking_hash: String,
    pub library_id: String,
    pub basis_meta: BasisMeta,
    pub v0: Vec<i64>,
    /// Integral row vector on the `H_1(K)` basis.
    pub psi: Vec<i64>,
    pub generators: Vec<CertificateGenerator>,
    pub witness_index: usize,
    pub tool_version: String,
}

/// `ψ = v0ᵀ J_V P`.
pub fn functional(bundle: &PrymBundle, v0: &[i64]) -> Result<Vec<i64>> {
    let row = bundle.form.vec_mul(v0)?;
    bundle.projection.vec_mul(&row)
}

/// Certificate for the subgroup generated by `g`; every word must avoid pushes and fix `v0`.
pub fn certify_point_pushing(
    cover: &CoverData,
    lib: &GeneratorLibrary,
    gens: &GeneratorMatrices,
    v0: &[i64],
    g: &[(String, McgWord)],
) -> Result<(PrymBundle, PointPushingCertificate)> {
    let s = cover.marking.presentation.surface;
    if s.n == 0 {
        return Err(Error::UnsupportedSurface(s));
    }
    if v0.iter().all(|&x| x == 0) {
        return Err(Error::InvalidInput("v0 must be nonzero".into()));
    }
    let split = lib.split_copy();
    for (name, w) in g {
        if let Some(&(x, _)) = w.0.iter().find(|(x, _)| !split.contains(x)) {
            return Err(Error::InvalidInput(format!(
                "{name} uses {}, which is not in the split copy",
                lib.generators[x].name
            )));
        }
    }
    let rep = PrymRepresentation::build_with(cover, lib, gens, g)?;
    if v0.len() != rep.boundary.dim_v() {
        return Err(Error::DimensionMismatch(format!("v0 has length {}, dim V_K = {}", v0.len(), rep.boundary.dim_v())));
    }
    for m in &rep.matrices {
        if m.matrix.mul_vec(v0)? != v0 {
            return Err(Error::MovesVector(m.name.clone()));
        }
    }
    let bundle = rep.bundle(cover, lib);
    let psi = functional(&bundle, v0)?;
    let witness_index = psi
        .iter()
        .position(|&x| x != 0)
        .ok_or_else(|| Error::Internal("psi vanishes although the form is nondegenerate".into()))?;
    let mut generators = Vec::new();
    for b in &bundle.generators {
        if b.raw_matrix.vec_mul(&psi)? != psi {
            return Err(Error::Internal(format!("psi is not invariant under {}", b.name)));
        }
        generators.push(CertificateGenerator {
            name: b.name.clone(),
            word: b.word.clone(),
            raw_matrix_hash: PrymBundle::part_hash(&b.raw_matrix),
            invariance: "pass".into(),
        });
    }
    let cert = PointPushingCertificate {
        surface: s,
        marking_hash: bundle.marking_hash.clone(),
        library_id: bundle.library_id.clone(),
        basis_meta: bundle.basis_meta.clone(),
        v0: v0.to_vec(),
        psi,
        generators,
        witness_index,
        tool_version: TOOL_VERSION.to_string(),
    };
    Ok((bundle, cert))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn failed(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        v.dedup();
        v
    }
}

/// Re-derive everything the certificate claims from the bundle alone.
pub fn verify_certificate(bundle: &PrymBundle, cert: &PointPushingCertificate) -> VerifyReport {
    let mut checks = Vec::new();
    let mut check = |name: &str, pass: bool, detail: String| {
        checks.push(Check {
            name: name.into(),
            pass,
            detail,
        })
    };
    let same = cert.surface == bundle.surface
        && cert.marking_hash == bundle.marking_hash
        && cert.library_id == bundle.library_id
        && cert.basis_meta == bundle.basis_meta;
    check("identity", same, "surface, marking, library and basis agree with the bundle".into());
    check(
        "split",
        cert.surface.n >= 1,
        format!("surface {} has a boundary component", cert.surface),
    );
    let dim = bundle.basis_meta.dim_v;
    let v0_ok = cert.v0.len() == dim && cert.v0.iter().any(|&x| x != 0);
    check("v0", v0_ok, format!("nonzero vector of length {dim}"));
    let psi = if v0_ok { functional(bundle, &cert.v0).ok() } else { None };
    check(
        "psi",
        psi.as_ref() == Some(&cert.psi),
        "psi equals v0ᵀ J_V P recomputed from the bundle".into(),
    );
    let nonzero = cert.psi.get(cert.witness_index).is_some_and(|&x| x != 0);
    check("witness", nonzero, format!("psi[{}] is nonzero", cert.witness_index));
    check(
        "generators-listed",
        !cert.generators.is_empty() && cert.generators.len() == bundle.generators.len(),
        format!("{} generators in certificate, {} in bundle", cert.generators.len(), bundle.generators.len()),
    );
    for (k, g) in cert.generators.iter().enumerate() {
        let Some(b) = bundle.generators.get(k).filter(|b| b.name == g.name) else {
            check("generator-name", false, format!("{} missing from bundle", g.name));
            continue;
        };
        check("generator-word", b.word == g.word, format!("{}: `{}`", g.name, g.word));
        check(
            "raw-matrix-hash",
            PrymBundle::part_hash(&b.raw_matrix) == g.raw_matrix_hash,
            g.name.clone(),
        );
        let inv = b.raw_matrix.vec_mul(&cert.psi).map(|x| x == cert.psi).unwrap_or(false);
        check("invariance", inv && g.invariance == "pass", g.name.clone());
        let fixes = b.prym_matrix.mul_vec(&cert.v0).map(|x| x == cert.v0).unwrap_or(false);
        check("fixes-v0", fixes, g.name.clone());
    }
    let pass = checks.iter().all(|c| c.pass);
    VerifyReport { pass, checks }
}

/// Systematic corruptions for tamper tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Corruption {
    MatrixEntry,
    PsiEntry,
    V0,
    GeneratorWord,
    WitnessIndex,
}

impl Corruption {
    pub const ALL: [Corruption; 5] = [
        Corruption::MatrixEntry,
        Corruption::PsiEntry,
        Corruption::V0,
        Corruption::GeneratorWord,
        Corruption::WitnessIndex,
    ];

    pub fn apply(self, bundle: &mut PrymBundle, cert: &mut PointPushingCertificate) {
        match self {
            Corruption::MatrixEntry => {
                if let Some(g) = bundle.generators.first_mut() {
                    let m = &mut g.raw_matrix;
                    let c = m.cols() - 1;
                    m[(0, c)] += 1;
                }
            }
            Corruption::PsiEntry => cert.psi[0] += 1,
            Corruption::V0 => cert.v0[0] += 1,
            Corruption::GeneratorWord => {
                if let Some(g) = cert.generators.first_mut() {
                    g.word.push_str(" T_a");
                }
            }
            Corruption::WitnessIndex => {
                cert.witness_index = cert.psi.iter().position(|&x| x == 0).unwrap_or(cert.psi.len());
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub orbit_cap: usize,
    pub stabilizer_cap: usize,
    pub candidates: CandidateConfig,
    /// Skip the candidate search and start from this vector.
    pub vector: Option<Vec<i64>>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            orbit_cap: DEFAULT_ORBIT_CAP,
            stabilizer_cap: 10_000,
            candidates: CandidateConfig::default(),
            vector: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineOutcome {
    pub surface: SurfaceType,
    /// Set when a punctured surface was read with one puncture as a boundary component.
    pub promoted_from: Option<SurfaceType>,
    pub stabilizer: StabilizerData,
    pub split_stabilizer: StabilizerData,
    pub candidates_tried: usize,
    pub candidate: Candidate,
    pub orbit: OrbitResult,
    /// Index of the stabilizer of `v0` in the split-copy stabilizer of `K`.
    pub v0_orbit_size: usize,
    pub coinvariants: usize,
    pub bundle: PrymBundle,
    pub certificate: PointPushingCertificate,
}

/// The surface used for certification: one puncture becomes a boundary component when `n = 0`.
pub fn certification_surface(s: SurfaceType) -> Result<SurfaceType> {
    match (s.n, s.p) {
        (0, 0) => Err(Error::UnsupportedSurface(s)),
        (0, p) => Ok(SurfaceType::new(s.g, 1, p - 1)),
        _ => Ok(s),
    }
}

/// Stabilizer, candidate search, finite orbit, vector stabilizer in the split copy, certificate.
pub fn point_pushing_pipeline(
    marking: &QuotientMarking,
    library: Option<&GeneratorLibrary>,
    cfg: &PipelineConfig,
) -> Result<PipelineOutcome> {
    let base = marking.presentation.surface;
    let surface = certification_surface(base)?;
    let marking = marking.on_presentation(&build_surface_group(surface)?)?;
    let lib = match library {
        Some(l) if l.surface == surface => l.clone(),
        Some(l) => {
            return Err(Error::InvalidInput(format!(
                "library is for {} but certification runs on {surface}",
                l.surface
            )))
        }
        None => standard_generators(surface)?,
    };
    let cover = CoverData::new(&marking)?;
    let gens = GeneratorMatrices::new(&cover, &lib)?;

    let stabilizer = marking_stabilizer(&marking, &lib, None, cfg.stabilizer_cap)?;
    let full = PrymRepresentation::build_with(&cover, &lib, &gens, &stabilizer.named())?;
    let dim = full.boundary.dim_v();
    let matrices = full.v_matrices();
    let candidates = match &cfg.vector {
        Some(v) => vec![Candidate {
            vector: v.clone(),
            source: "given".into(),
        }],
        None => candidate_vectors(dim, &matrices, &cfg.candidates)?,
    };
    let search = find_finite_orbit(&matrices, &candidates, cfg.orbit_cap)?;
    let Some((candidate, orbit)) = search.found else {
        return Err(Error::CapExceeded {
            cap: cfg.orbit_cap,
            found: search.tried,
        });
    };
    let v0 = candidate.vector.clone();

    let split = marking_stabilizer(&marking, &lib, Some(&lib.split_copy()), cfg.stabilizer_cap)?;
    let split_rep = PrymRepresentation::build_with(&cover, &lib, &gens, &split.named())?;
    let vs = vector_stabilizer(&split_rep.v_matrices(), &v0, cfg.orbit_cap)?;
    let g: Vec<(String, McgWord)> = vs
        .words
        .iter()
        .enumerate()
        .map(|(k, w)| (format!("G{k}"), w.substitute(&split.words)))
        .collect();
    let (bundle, certificate) = certify_point_pushing(&cover, &lib, &gens, &v0, &g)?;
    let raw: Vec<_> = bundle.generators.iter().map(|b| b.raw_matrix.clone()).collect();
    let coinvariants = coinvariants_dimension(bundle.basis_meta.h1_rank, &raw)?;
    Ok(PipelineOutcome {
        surface,
        promoted_from: (surface != base).then_some(base),
        stabilizer,
        split_stabilizer: split,
        candidates_tried: search.tried,
        candidate,
        orbit,
        v0_orbit_size: vs.orbit_size,
        coinvariants,
        bundle,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroupTable;
    use crate::marking::parse_assignments;

    fn trivial_torus() -> (CoverData, GeneratorLibrary, GeneratorMatrices) {
        let s = SurfaceType::new(1, 1, 0);
        let p = build_surface_group(s).unwrap();
        let m = QuotientMarking::single(&p, FiniteGroupTable::cyclic(1), vec![0, 0]).unwrap();
        let c = CoverData::new(&m).unwrap();
        let lib = standard_generators(s).unwrap();
        let g = GeneratorMatrices::new(&c, &lib).unwrap();
        (c, lib, g)
    }

    #[test]
    fn transvection_fixing_a() {
        let (c, lib, gens) = trivial_torus();
        let ta = lib.parse_word("T_a").unwrap();
        let (bundle, cert) = certify_point_pushing(&c, &lib, &gens, &[1, 0], &[("T_a".into(), ta.clone())]).unwrap();
        // psi = i(a, ·)
        assert_eq!(cert.psi, vec![0, 1]);
        assert!(verify_certificate(&bundle, &cert).pass);
        let (b2, c2) = certify_point_pushing(&c, &lib, &gens, &[2, 0], &[("T_a".into(), ta.clone())]).unwrap();
        assert_eq!(c2.psi, vec![0, 2]);
        assert!(verify_certificate(&b2, &c2).pass);
        assert!(certify_point_pushing(&c, &lib, &gens, &[0, 0], &[("T_a".into(), ta)]).is_err());
        let tb = lib.parse_word("T_b").unwrap();
        assert!(matches!(
            certify_point_pushing(&c, &lib, &gens, &[1, 0], &[("T_b".into(), tb)]),
            Err(Error::MovesVector(_))
        ));
        let push = lib.parse_word("Push(a1)").unwrap();
        assert!(certify_point_pushing(&c, &lib, &gens, &[1, 0], &[("P".into(), push)]).is_err());
    }

    #[test]
    fn closed_and_punctured_surfaces() {
        assert!(certification_surface(SurfaceType::new(2, 0, 0)).is_err());
        assert_eq!(certification_surface(SurfaceType::new(1, 0, 1)).unwrap(), SurfaceType::new(1, 1, 0));
        let s = SurfaceType::new(1, 0, 1);
        let p = build_surface_group(s).unwrap();
        let m = QuotientMarking::single(&p, FiniteGroupTable::cyclic(1), vec![0, 0]).unwrap();
        let c = CoverData::new(&m).unwrap();
        let lib = standard_generators(s).unwrap();
        let gens = GeneratorMatrices::new(&c, &lib).unwrap();
        let ta = lib.parse_word("T_a").unwrap();
        assert!(matches!(
            certify_point_pushing(&c, &lib, &gens, &[1, 0], &[("T_a".into(), ta)]),
            Err(Error::UnsupportedSurface(_))
        ));
    }

    #[test]
    fn corruptions_are_detected() {
        let (c, lib, gens) = trivial_torus();
        let ta = lib.parse_word("T_a").unwrap();
        let (bundle, cert) = certify_point_pushing(&c, &lib, &gens, &[1, 0], &[("T_a".into(), ta)]).unwrap();
        for k in Corruption::ALL {
            let (mut b, mut ct) = (bundle.clone(), cert.clone());
            k.apply(&mut b, &mut ct);
            let r = verify_certificate(&b, &ct);
            assert!(!r.pass, "{k:?}");
        }
    }

    #[test]
    fn quaternion_pipeline() {
        let p = build_surface_group(SurfaceType::new(1, 0, 1)).unwrap();
        let m = parse_assignments(&p, FiniteGroupTable::quaternion(), "a->i,b->j").unwrap();
        let cfg = PipelineConfig {
            orbit_cap: 20_000,
            ..PipelineConfig::default()
        };
        let out = point_pushing_pipeline(&m, None, &cfg).unwrap();
        assert_eq!(out.promoted_from, Some(SurfaceType::new(1, 0, 1)));
        assert_eq!(out.stabilizer.index, 1);
        assert!(out.orbit.is_finite());
        assert!(verify_certificate(&out.bundle, &out.certificate).pass);
        assert!(out.coinvariants >= 1);
    }
}
