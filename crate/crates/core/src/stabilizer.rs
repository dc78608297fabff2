//! Orbits with Schreier generators: of kernel classes under the mapping class group action,
//! and of vectors under Prym matrices.

use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::IntMatrix;
use crate::marking::QuotientMarking;
use crate::mcg::{GeneratorLibrary, McgWord};
use crate::word::Word;

/// Orbit of a point under `n` generators, with a spanning tree and the stabilizer's Schreier generators.
#[derive(Clone, Debug)]
pub struct SchreierOrbit<P> {
    pub points: Vec<P>,
    /// `tree[i]` carries the start point to `points[i]`.
    pub tree: Vec<McgWord>,
    /// Words fixing the start point, one per non-tree edge.
    pub generators: Vec<McgWord>,
}

/// Breadth-first orbit; words use generator positions `0..n` and act on the left.
pub fn schreier_orbit<P, F>(start: P, n: usize, mut act: F, cap: usize) -> Result<SchreierOrbit<P>>
where
    P: Clone + Eq + Hash,
    F: FnMut(&P, usize) -> Result<P>,
{
    let mut index: HashMap<P, usize> = HashMap::from([(start.clone(), 0)]);
    let mut points = vec![start];
    let mut tree = vec![McgWord::identity()];
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    let mut tree_edge = vec![None::<(usize, usize)>];
    let mut i = 0;
    while i < points.len() {
        for g in 0..n {
            let y = act(&points[i], g)?;
            let j = match index.get(&y) {
                Some(&j) => j,
                None => {
                    if points.len() >= cap {
                        return Err(Error::CapExceeded {
                            cap,
                            found: points.len() + 1,
                        });
                    }
                    let j = points.len();
                    index.insert(y.clone(), j);
                    points.push(y);
                    tree.push(McgWord::gen(g).mul(&tree[i]));
                    tree_edge.push(Some((i, g)));
                    j
                }
            };
            edges.push((i, g, j));
        }
        i += 1;
    }
    let generators = edges
        .into_iter()
        .filter(|&(i, g, j)| tree_edge[j] != Some((i, g)))
        .map(|(i, g, j)| tree[j].inverse().mul(&McgWord::gen(g)).mul(&tree[i]))
        .filter(|w| !w.is_identity())
        .collect();
    Ok(SchreierOrbit { points, tree, generators })
}

/// Canonical coset table of `ker ρ`: equal keys iff equal kernels.
pub fn kernel_key(marking: &QuotientMarking) -> Vec<u32> {
    let r = marking.rank();
    let id = marking.identity();
    let gens: Vec<_> = (1..=r as i32).map(|x| marking.letter_image(x)).collect();
    let mut index = HashMap::from([(id.clone(), 0u32)]);
    let mut elements = vec![id];
    let mut table = Vec::new();
    let mut q = 0;
    while q < elements.len() {
        for g in &gens {
            let y = marking.mul(&elements[q], g);
            let next = index.len() as u32;
            let k = *index.entry(y.clone()).or_insert_with(|| {
                elements.push(y);
                next
            });
            table.push(k);
        }
        q += 1;
    }
    table
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StabilizerData {
    pub library_id: String,
    pub marking_hash: String,
    /// Library generators the orbit was taken under.
    pub acting: Vec<String>,
    /// Size of the orbit of `ker ρ`, equal to the index of the stabilizer in the acting group.
    pub index: usize,
    /// Schreier generators as library words.
    pub words: Vec<McgWord>,
    pub word_text: Vec<String>,
}

impl StabilizerData {
    pub fn named(&self) -> Vec<(String, McgWord)> {
        self.word_text.iter().cloned().zip(self.words.iter().cloned()).collect()
    }
}

/// `f · ρ = ρ ∘ f⁻¹`, so the orbit of `ρ` is the orbit of `K` under `f ↦ f(K)`.
pub fn act_on_marking(marking: &QuotientMarking, inverse_images: &[Word]) -> QuotientMarking {
    marking.precompose(inverse_images)
}

/// Stabilizer of `ker ρ` inside the group generated by `acting` (all generators by default).
pub fn marking_stabilizer(
    marking: &QuotientMarking,
    lib: &GeneratorLibrary,
    acting: Option<&[usize]>,
    cap: usize,
) -> Result<StabilizerData> {
    if !marking.is_surjective() {
        return Err(Error::InvalidMarking("stabilizer needs a surjective marking".into()));
    }
    if marking.presentation.surface != lib.surface {
        return Err(Error::InvalidInput(format!(
            "marking on {} but library for {}",
            marking.presentation.surface, lib.surface
        )));
    }
    let acting: Vec<usize> = acting.map(|a| a.to_vec()).unwrap_or_else(|| (0..lib.generators.len()).collect());
    let inverses: Vec<Vec<Word>> = acting
        .iter()
        .map(|&g| lib.generators[g].table.inverse_table().map(|t| t.images))
        .collect::<Result<_>>()?;
    let mut markings: HashMap<Vec<u32>, QuotientMarking> = HashMap::new();
    let start = kernel_key(marking);
    markings.insert(start.clone(), marking.clone());
    let orbit = schreier_orbit(
        start,
        acting.len(),
        |key, g| {
            let m = act_on_marking(&markings[key], &inverses[g]);
            let k = kernel_key(&m);
            markings.entry(k.clone()).or_insert(m);
            Ok(k)
        },
        cap,
    )?;
    let lift: Vec<McgWord> = acting.iter().map(|&g| McgWord::gen(g)).collect();
    let words: Vec<McgWord> = orbit.generators.iter().map(|w| w.substitute(&lift)).collect();
    Ok(StabilizerData {
        library_id: lib.id.clone(),
        marking_hash: marking.content_hash(),
        acting: acting.iter().map(|&g| lib.generators[g].name.clone()).collect(),
        index: orbit.points.len(),
        word_text: words.iter().map(|w| lib.format_word(w)).collect(),
        words,
    })
}

/// Re-check that every stabilizer word carries `ker ρ` to itself.
pub fn verify_stabilizer(marking: &QuotientMarking, lib: &GeneratorLibrary, data: &StabilizerData) -> Result<bool> {
    let key = kernel_key(marking);
    for w in &data.words {
        let inv = lib.evaluate(&w.inverse())?;
        if kernel_key(&act_on_marking(marking, &inv.images)) != key {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VectorStabilizer {
    pub orbit_size: usize,
    /// Words in the positions of the given matrices.
    pub words: Vec<McgWord>,
}

/// Orbit of `v` under `matrices` with the Schreier generators of its stabilizer.
pub fn vector_stabilizer(matrices: &[IntMatrix], v: &[i64], cap: usize) -> Result<VectorStabilizer> {
    let orbit = schreier_orbit(v.to_vec(), matrices.len(), |u, g| matrices[g].mul_vec(u), cap)?;
    Ok(VectorStabilizer {
        orbit_size: orbit.points.len(),
        words: orbit.generators,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroupTable;
    use crate::marking::{level_marking, parse_assignments};
    use crate::mcg::standard_generators;
    use crate::surface::{build_surface_group, SurfaceType};

    #[test]
    fn characteristic_marking_has_full_stabilizer() {
        let s = SurfaceType::new(1, 0, 1);
        let lib = standard_generators(s).unwrap();
        let p = build_surface_group(s).unwrap();
        let m = parse_assignments(&p, FiniteGroupTable::quaternion(), "a->i,b->j").unwrap();
        let st = marking_stabilizer(&m, &lib, None, 100).unwrap();
        assert_eq!(st.index, 1);
        assert_eq!(st.words.len(), lib.generators.len());
        assert!(verify_stabilizer(&m, &lib, &st).unwrap());
        let lv = level_marking(&p, 3).unwrap();
        assert_eq!(marking_stabilizer(&lv, &lib, None, 100).unwrap().index, 1);
    }

    #[test]
    fn z2_marking_orbit() {
        let s = SurfaceType::new(1, 0, 1);
        let lib = standard_generators(s).unwrap();
        let p = build_surface_group(s).unwrap();
        let m = QuotientMarking::single(&p, FiniteGroupTable::cyclic(2), vec![1, 0]).unwrap();
        let st = marking_stabilizer(&m, &lib, None, 100).unwrap();
        // nonzero classes in H^1(T; Z/2), permuted transitively
        assert_eq!(st.index, 3);
        assert!(verify_stabilizer(&m, &lib, &st).unwrap());
        let ta = lib.index_of("T_a").unwrap();
        assert!(!st.words.contains(&McgWord::gen(ta)));
        assert!(marking_stabilizer(&m, &lib, None, 2).is_err());
    }

    #[test]
    fn kernel_key_ignores_automorphisms_of_target() {
        let p = build_surface_group(SurfaceType::new(1, 0, 1)).unwrap();
        let q = FiniteGroupTable::quaternion;
        let a = parse_assignments(&p, q(), "a->i,b->j").unwrap();
        let b = parse_assignments(&p, q(), "a->j,b->k").unwrap();
        assert_eq!(kernel_key(&a), kernel_key(&b));
        let c = QuotientMarking::single(&p, FiniteGroupTable::cyclic(2), vec![1, 0]).unwrap();
        let d = QuotientMarking::single(&p, FiniteGroupTable::cyclic(2), vec![0, 1]).unwrap();
        assert_ne!(kernel_key(&c), kernel_key(&d));
    }

    #[test]
    fn vector_orbit_stabilizer() {
        let swap = IntMatrix::from_rows(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]]).unwrap();
        let cyc = IntMatrix::from_rows(&[vec![0, 0, 1], vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        let ms = [swap, cyc];
        let st = vector_stabilizer(&ms, &[1, 0, 0], 10).unwrap();
        assert_eq!(st.orbit_size, 3);
        for w in &st.words {
            let mut v = vec![1, 0, 0];
            for &(g, e) in w.0.iter().rev() {
                let m = if e < 0 { ms[g].inverse().unwrap() } else { ms[g].clone() };
                for _ in 0..e.unsigned_abs() {
                    v = m.mul_vec(&v).unwrap();
                }
            }
            assert_eq!(v, vec![1, 0, 0]);
        }
    }
}
