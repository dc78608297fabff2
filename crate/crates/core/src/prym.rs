//! The boundary subspace `B`, the quotient `V_K = H_1(K)/B`, Prym matrices and the intersection form.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cover::CoverData;
use crate::endo::EndomorphismTable;
use crate::error::{Error, Result};
use crate::hash::json_hash;
use crate::linalg::{hnf_rows, rank, to_big, IntMatrix, QuotientLattice};
use crate::mcg::{GeneratorLibrary, McgWord};
use crate::ribbon::interleaving_form;
use crate::surface::SurfaceType;

pub const TOOL_VERSION: &str = concat!("prym-core ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundarySubspace {
    /// Peripheral-cycle vectors in `H_1(K; Z)`.
    pub vectors: Vec<Vec<i64>>,
    pub lattice: QuotientLattice,
}

impl BoundarySubspace {
    pub fn d_b(&self) -> usize {
        self.lattice.sub_rank()
    }

    pub fn dim_v(&self) -> usize {
        self.lattice.quotient_rank()
    }

    pub fn projection(&self) -> &IntMatrix {
        &self.lattice.projection
    }

    pub fn complement(&self) -> &IntMatrix {
        &self.lattice.complement
    }
}

pub fn boundary_subspace(cover: &CoverData) -> Result<BoundarySubspace> {
    let vectors: Vec<Vec<i64>> = cover.peripheral.iter().map(|p| p.vector.clone()).collect();
    let lattice = QuotientLattice::new(cover.h1_rank(), &vectors)?;
    Ok(BoundarySubspace { vectors, lattice })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IntersectionForm {
    /// On `H_1(K; Z)`.
    pub raw: IntMatrix,
    /// On the `V_K` lattice.
    pub v: IntMatrix,
}

/// Form from the lifted ribbon graph; its radical must be exactly `B`.
pub fn intersection_form(cover: &CoverData, bs: &BoundarySubspace) -> Result<IntersectionForm> {
    let rot = cover.lifted_rotation()?;
    let full = interleaving_form(&rot, cover.schreier_rank());
    let section = cover.h1_section();
    let raw = section.transpose().mul(&full)?.mul(&section)?;
    if !raw.is_antisymmetric() {
        return Err(Error::Internal("lifted form is not alternating".into()));
    }
    // radical = B: B lies in the kernel and the ranks add up
    for j in 0..bs.d_b() {
        if raw.mul_vec(&bs.lattice.sub_basis.column(j))?.iter().any(|&x| x != 0) {
            return Err(Error::Internal("boundary class pairs nontrivially".into()));
        }
    }
    if rank(&raw) != bs.dim_v() {
        return Err(Error::Internal(format!(
            "radical mismatch: form rank {} but dim V_K = {}",
            rank(&raw),
            bs.dim_v()
        )));
    }
    let c = bs.complement();
    let v = c.transpose().mul(&raw)?.mul(c)?;
    Ok(IntersectionForm { raw, v })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrymMatrix {
    pub name: String,
    /// On `H_1(K; Z)`.
    pub raw: IntMatrix,
    /// On the `V_K` lattice.
    pub matrix: IntMatrix,
}

/// Raw action on `H_1(K; Z)`; fails if `e` does not carry `K` into itself.
pub fn raw_matrix(cover: &CoverData, e: &EndomorphismTable) -> Result<IntMatrix> {
    let n = cover.schreier_rank();
    let cols: Vec<Vec<i64>> = (0..n)
        .map(|s| {
            let img = e.apply(&cover.schreier_word(s));
            let q = cover.coset_of(&img);
            if q != 0 {
                return Err(Error::DoesNotPreserve {
                    generator: cover.schreier_name(s),
                    coset: q,
                });
            }
            cover.rewrite_raw(&img)
        })
        .collect::<Result<_>>()?;
    let full = IntMatrix::from_columns(n, &cols);
    match &cover.h1 {
        None => Ok(full),
        Some(q) => q.projection.mul(&full)?.mul(&q.complement),
    }
}

pub fn prym_matrix(cover: &CoverData, bs: &BoundarySubspace, e: &EndomorphismTable, name: &str) -> Result<PrymMatrix> {
    from_raw(bs, raw_matrix(cover, e)?, name)
}

/// Checks `raw` against `B` and pushes it down to `V_K`.
pub fn from_raw(bs: &BoundarySubspace, raw: IntMatrix, name: &str) -> Result<PrymMatrix> {
    if !preserves_lattice(&raw, &bs.lattice.sub_basis)? {
        return Err(Error::Internal(format!("{name} does not preserve the boundary subspace")));
    }
    let matrix = bs.projection().mul(&raw)?.mul(bs.complement())?;
    if !matrix.is_unimodular() {
        return Err(Error::Internal(format!("{name}: Prym matrix is not invertible over Z")));
    }
    Ok(PrymMatrix {
        name: name.to_string(),
        raw,
        matrix,
    })
}

/// Raw matrices of library generators that carry `K` into itself, with their inverses.
#[derive(Clone, Debug)]
pub struct GeneratorMatrices {
    pub raw: Vec<Option<(IntMatrix, IntMatrix)>>,
}

impl GeneratorMatrices {
    pub fn new(cover: &CoverData, lib: &GeneratorLibrary) -> Result<Self> {
        let raw = lib
            .generators
            .par_iter()
            .map(|g| match raw_matrix(cover, &g.table) {
                Ok(m) => {
                    let inv = m.inverse()?;
                    Ok(Some((m, inv)))
                }
                Err(Error::DoesNotPreserve { .. }) => Ok(None),
                Err(e) => Err(e),
            })
            .collect::<Result<_>>()?;
        Ok(GeneratorMatrices { raw })
    }

    pub fn preserves(&self, g: usize) -> bool {
        matches!(self.raw.get(g), Some(Some(_)))
    }

    /// Product route; `None` when some letter moves `K`.
    pub fn word(&self, w: &McgWord, dim: usize) -> Result<Option<IntMatrix>> {
        let mut out = IntMatrix::identity(dim);
        for &(g, e) in &w.0 {
            let Some(Some((m, inv))) = self.raw.get(g) else {
                return Ok(None);
            };
            let step = if e < 0 { inv } else { m };
            for _ in 0..e.unsigned_abs() {
                out = out.mul(step)?;
            }
        }
        Ok(Some(out))
    }
}

/// Raw matrix of a word; multiplies generator matrices when every letter preserves `K`,
/// otherwise evaluates the composite automorphism.
pub fn word_raw_matrix(cover: &CoverData, lib: &GeneratorLibrary, gens: &GeneratorMatrices, w: &McgWord) -> Result<IntMatrix> {
    match gens.word(w, cover.h1_rank())? {
        Some(m) => Ok(m),
        None => raw_matrix(cover, &lib.evaluate(w)?),
    }
}

/// `M · L = L` as lattices, `L` given by columns.
pub fn preserves_lattice(m: &IntMatrix, basis: &IntMatrix) -> Result<bool> {
    if basis.cols() == 0 {
        return Ok(true);
    }
    let image = m.mul(basis)?;
    Ok(hnf_rows(&to_big(&image.transpose())) == hnf_rows(&to_big(&basis.transpose())))
}

pub fn is_symplectic(m: &IntMatrix, j: &IntMatrix) -> Result<bool> {
    Ok(m.transpose().mul(j)?.mul(m)? == *j)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BundleGenerator {
    pub name: String,
    /// Word in library generator names.
    pub word: String,
    pub raw_matrix: IntMatrix,
    pub prym_matrix: IntMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisMeta {
    pub h1_rank: usize,
    pub boundary_count: usize,
    pub d_b: usize,
    pub dim_v: usize,
    pub pivot_rule: String,
}

/// Everything an independent checker needs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PrymBundle {
    pub tool_version: String,
    pub surface: SurfaceType,
    pub marking: String,
    pub marking_hash: String,
    pub library_id: String,
    pub index: usize,
    pub basis_meta: BasisMeta,
    pub boundary_vectors: Vec<Vec<i64>>,
    /// `H_1(K) → V_K`.
    pub projection: IntMatrix,
    /// `V_K → H_1(K)`.
    pub complement: IntMatrix,
    pub raw_form: IntMatrix,
    pub form: IntMatrix,
    pub generators: Vec<BundleGenerator>,
}

impl PrymBundle {
    pub fn generator(&self, name: &str) -> Option<&BundleGenerator> {
        self.generators.iter().find(|g| g.name == name)
    }

    pub fn part_hash<T: Serialize + ?Sized>(part: &T) -> String {
        json_hash(part).expect("serializable")
    }
}

/// The Prym representation of `cover` on a list of named library words.
#[derive(Clone, Debug)]
pub struct PrymRepresentation {
    pub boundary: BoundarySubspace,
    pub form: IntersectionForm,
    pub matrices: Vec<PrymMatrix>,
    pub words: Vec<McgWord>,
}

impl PrymRepresentation {
    pub fn build(cover: &CoverData, lib: &GeneratorLibrary, named: &[(String, McgWord)]) -> Result<Self> {
        let gens = GeneratorMatrices::new(cover, lib)?;
        Self::build_with(cover, lib, &gens, named)
    }

    pub fn build_with(
        cover: &CoverData,
        lib: &GeneratorLibrary,
        gens: &GeneratorMatrices,
        named: &[(String, McgWord)],
    ) -> Result<Self> {
        let boundary = boundary_subspace(cover)?;
        let form = intersection_form(cover, &boundary)?;
        let matrices: Vec<PrymMatrix> = named
            .par_iter()
            .map(|(name, w)| from_raw(&boundary, word_raw_matrix(cover, lib, gens, w)?, name))
            .collect::<Result<_>>()?;
        Ok(PrymRepresentation {
            boundary,
            form,
            matrices,
            words: named.iter().map(|(_, w)| w.clone()).collect(),
        })
    }

    /// Every library generator as its own one-letter word.
    pub fn for_library(cover: &CoverData, lib: &GeneratorLibrary) -> Result<Self> {
        let named: Vec<(String, McgWord)> = lib
            .generators
            .iter()
            .enumerate()
            .map(|(i, g)| (g.name.clone(), McgWord::gen(i)))
            .collect();
        Self::build(cover, lib, &named)
    }

    pub fn v_matrices(&self) -> Vec<IntMatrix> {
        self.matrices.iter().map(|m| m.matrix.clone()).collect()
    }

    pub fn bundle(&self, cover: &CoverData, lib: &GeneratorLibrary) -> PrymBundle {
        let bs = &self.boundary;
        PrymBundle {
            tool_version: TOOL_VERSION.to_string(),
            surface: cover.marking.presentation.surface,
            marking: cover.marking.describe(),
            marking_hash: cover.marking.content_hash(),
            library_id: lib.id.clone(),
            index: cover.index(),
            basis_meta: BasisMeta {
                h1_rank: cover.h1_rank(),
                boundary_count: cover.boundary_count(),
                d_b: bs.d_b(),
                dim_v: bs.dim_v(),
                pivot_rule: bs.lattice.pivot_rule.clone(),
            },
            boundary_vectors: bs.vectors.clone(),
            projection: bs.projection().clone(),
            complement: bs.complement().clone(),
            raw_form: self.form.raw.clone(),
            form: self.form.v.clone(),
            generators: self
                .matrices
                .iter()
                .zip(&self.words)
                .map(|(m, w)| BundleGenerator {
                    name: m.name.clone(),
                    word: lib.format_word(w),
                    raw_matrix: m.raw.clone(),
                    prym_matrix: m.matrix.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoverSummary {
    pub surface: SurfaceType,
    pub index: usize,
    pub r_k: usize,
    pub b: usize,
    pub d_b: usize,
    pub cover_genus: Option<usize>,
    pub dim_v: usize,
}

pub fn cover_summary(cover: &CoverData) -> Result<CoverSummary> {
    let bs = boundary_subspace(cover)?;
    Ok(CoverSummary {
        surface: cover.marking.presentation.surface,
        index: cover.index(),
        r_k: cover.h1_rank(),
        b: cover.boundary_count(),
        d_b: bs.d_b(),
        cover_genus: cover.cover_genus(),
        dim_v: bs.dim_v(),
    })
}
