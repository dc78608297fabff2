//! Coset action, Schreier transversal and Reidemeister–Schreier rewriting for `K = ker ρ`.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{smith, to_big, IntMatrix, QuotientLattice};
use crate::marking::{QuotientMarking, Tuple};
use crate::ribbon::Ribbon;
use crate::word::{Letter, Word};

/// One lift of a peripheral loop: a cycle of its coset permutation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeripheralCycle {
    pub peripheral: usize,
    /// Smallest coset in the cycle.
    pub coset: usize,
    pub length: usize,
    /// `t z^k t^-1`
    pub word: Word,
    /// Coordinates in `H_1(K; Z)`.
    pub vector: Vec<i64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoverData {
    pub marking: QuotientMarking,
    /// Coset `q` is identified with this element of the image.
    pub elements: Vec<Tuple>,
    /// `action[q][x]` is `q · x_{x+1}`.
    pub action: Vec<Vec<usize>>,
    pub action_inv: Vec<Vec<usize>>,
    pub transversal: Vec<Word>,
    /// Positive edges `(q, x)` not in the spanning tree, in order; these are the free generators.
    pub schreier: Vec<(usize, usize)>,
    schreier_index: Vec<Vec<Option<usize>>>,
    /// Closed surfaces: `Z^N / <lifted relators>` with its chosen basis.
    pub h1: Option<QuotientLattice>,
    pub relator_lifts: Vec<Vec<i64>>,
    pub peripheral: Vec<PeripheralCycle>,
}

impl CoverData {
    pub fn new(marking: &QuotientMarking) -> Result<Self> {
        let r = marking.rank();
        let id = marking.identity();
        let mut elements = vec![id.clone()];
        let mut index: HashMap<Tuple, usize> = HashMap::from([(id, 0)]);
        let mut parent: Vec<Option<(usize, Letter)>> = vec![None];
        let mut queue = VecDeque::from([0usize]);
        let letters: Vec<Letter> = (1..=r as Letter).flat_map(|x| [x, -x]).collect();
        let images: Vec<Tuple> = letters.iter().map(|&l| marking.letter_image(l)).collect();
        while let Some(q) = queue.pop_front() {
            for (k, &l) in letters.iter().enumerate() {
                let y = marking.mul(&elements[q], &images[k]);
                if !index.contains_key(&y) {
                    index.insert(y.clone(), elements.len());
                    elements.push(y);
                    parent.push(Some((q, l)));
                    queue.push_back(elements.len() - 1);
                }
            }
        }
        let m = elements.len();
        let mut action = vec![vec![0; r]; m];
        let mut action_inv = vec![vec![0; r]; m];
        for q in 0..m {
            for x in 0..r {
                action[q][x] = index[&marking.mul(&elements[q], &images[2 * x])];
                action_inv[q][x] = index[&marking.mul(&elements[q], &images[2 * x + 1])];
            }
        }
        let mut transversal = vec![Word::empty(); m];
        let mut tree = vec![vec![false; r]; m];
        for q in 1..m {
            let (p, l) = parent[q].expect("non-root has a parent");
            transversal[q] = transversal[p].mul(&Word::gen(l));
            let x = l.unsigned_abs() as usize - 1;
            if l > 0 {
                tree[p][x] = true;
            } else {
                tree[q][x] = true;
            }
        }
        let mut schreier = Vec::new();
        let mut schreier_index = vec![vec![None; r]; m];
        for q in 0..m {
            for x in 0..r {
                if !tree[q][x] {
                    schreier_index[q][x] = Some(schreier.len());
                    schreier.push((q, x));
                }
            }
        }
        let mut cover = CoverData {
            marking: marking.clone(),
            elements,
            action,
            action_inv,
            transversal,
            schreier,
            schreier_index,
            h1: None,
            relator_lifts: Vec::new(),
            peripheral: Vec::new(),
        };
        if let Some(rel) = marking.presentation.relator.clone() {
            let lifts: Vec<Vec<i64>> = (0..m)
                .map(|q| cover.rewrite_raw(&cover.transversal[q].conjugate(&rel)))
                .collect::<Result<_>>()?;
            let n = cover.schreier.len();
            let a = IntMatrix::from_columns(n, &lifts);
            if smith(&to_big(&a)).has_torsion() {
                return Err(Error::Internal("lifted relators leave torsion in H1(K)".into()));
            }
            cover.h1 = Some(QuotientLattice::new(n, &lifts)?);
            cover.relator_lifts = lifts;
        }
        cover.peripheral = cover.compute_peripheral()?;
        Ok(cover)
    }

    pub fn index(&self) -> usize {
        self.elements.len()
    }

    pub fn rank(&self) -> usize {
        self.marking.rank()
    }

    /// Number of Schreier generators (rank of the free group `K` in the free case).
    pub fn schreier_rank(&self) -> usize {
        self.schreier.len()
    }

    /// Rank of `H_1(K; Z)`.
    pub fn h1_rank(&self) -> usize {
        match &self.h1 {
            Some(q) => q.quotient_rank(),
            None => self.schreier.len(),
        }
    }

    pub fn act(&self, q: usize, l: Letter) -> usize {
        let x = l.unsigned_abs() as usize - 1;
        if l > 0 {
            self.action[q][x]
        } else {
            self.action_inv[q][x]
        }
    }

    pub fn coset_of(&self, w: &Word) -> usize {
        w.letters().iter().fold(0, |q, &l| self.act(q, l))
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.coset_of(w) == 0
    }

    /// `t_q x t_{qx}^-1`
    pub fn schreier_word(&self, s: usize) -> Word {
        let (q, x) = self.schreier[s];
        let l = x as Letter + 1;
        self.transversal[q].mul(&Word::gen(l)).mul(&self.transversal[self.act(q, l)].inverse())
    }

    pub fn schreier_name(&self, s: usize) -> String {
        let (q, x) = self.schreier[s];
        format!("s[{q},{}]", self.marking.presentation.names[x])
    }

    /// Abelianized coordinates on the Schreier generators.
    pub fn rewrite_raw(&self, w: &Word) -> Result<Vec<i64>> {
        let mut v = vec![0i64; self.schreier.len()];
        let mut q = 0;
        for &l in w.letters() {
            let x = l.unsigned_abs() as usize - 1;
            if l > 0 {
                if let Some(s) = self.schreier_index[q][x] {
                    v[s] += 1;
                }
                q = self.action[q][x];
            } else {
                let p = self.action_inv[q][x];
                if let Some(s) = self.schreier_index[p][x] {
                    v[s] -= 1;
                }
                q = p;
            }
        }
        if q != 0 {
            return Err(Error::NotInSubgroup {
                word: self.marking.presentation.format_word(w),
                coset: q,
            });
        }
        Ok(v)
    }

    /// Coordinates in `H_1(K; Z)`.
    pub fn rewrite(&self, w: &Word) -> Result<Vec<i64>> {
        let raw = self.rewrite_raw(w)?;
        self.to_h1(&raw)
    }

    pub fn to_h1(&self, raw: &[i64]) -> Result<Vec<i64>> {
        match &self.h1 {
            Some(q) => q.project(raw),
            None => Ok(raw.to_vec()),
        }
    }

    /// Columns: Schreier-coordinate representatives of the `H_1(K)` basis.
    pub fn h1_section(&self) -> IntMatrix {
        match &self.h1 {
            Some(q) => q.complement.clone(),
            None => IntMatrix::identity(self.schreier.len()),
        }
    }

    pub fn h1_projection(&self) -> IntMatrix {
        match &self.h1 {
            Some(q) => q.projection.clone(),
            None => IntMatrix::identity(self.schreier.len()),
        }
    }

    fn compute_peripheral(&self) -> Result<Vec<PeripheralCycle>> {
        let m = self.index();
        let mut out = Vec::new();
        for (pi, z) in self.marking.presentation.peripheral.iter().enumerate() {
            let perm: Vec<usize> = (0..m).map(|q| z.letters().iter().fold(q, |p, &l| self.act(p, l))).collect();
            let mut seen = vec![false; m];
            for q in 0..m {
                if seen[q] {
                    continue;
                }
                let mut k = 0;
                let mut p = q;
                while !seen[p] {
                    seen[p] = true;
                    p = perm[p];
                    k += 1;
                }
                let word = self.transversal[q].conjugate(&z.pow(k as i64));
                let vector = self.rewrite(&word)?;
                out.push(PeripheralCycle {
                    peripheral: pi,
                    coset: q,
                    length: k,
                    word,
                    vector,
                });
            }
        }
        Ok(out)
    }

    pub fn boundary_count(&self) -> usize {
        self.peripheral.len()
    }

    /// Genus of the filled-in cover from `2 - 2g' = m χ + b`, if integral and nonnegative.
    pub fn cover_genus(&self) -> Option<usize> {
        let chi = self.marking.presentation.surface.euler_characteristic();
        let two_minus = 2 - (self.index() as i64 * chi + self.boundary_count() as i64);
        (two_minus >= 0 && two_minus % 2 == 0).then_some((two_minus / 2) as usize)
    }

    /// Transfer `H_1(base) → H_1(K)`: column `x` sums the lifts of `x` over all cosets.
    pub fn transfer_matrix(&self) -> Result<IntMatrix> {
        let r = self.rank();
        let n = self.schreier.len();
        let mut t = IntMatrix::zeros(n, r);
        for (s, &(_, x)) in self.schreier.iter().enumerate() {
            t[(s, x)] += 1;
        }
        self.h1_projection().mul(&t)
    }

    /// Cyclic order at the single vertex left after contracting the spanning tree of the
    /// lifted ribbon graph. Entries are `±(s+1)` for Schreier generator `s`.
    pub fn lifted_rotation(&self) -> Result<Vec<Letter>> {
        let ribbon = Ribbon::new(&self.marking.presentation)?;
        let rot = &ribbon.rotation;
        let pos: HashMap<Letter, usize> = rot.iter().enumerate().map(|(i, &h)| (h, i)).collect();
        let len = rot.len();
        let mut out = Vec::with_capacity(2 * self.schreier.len());
        let (mut q, mut p) = (0usize, 0usize);
        let limit = len * self.index() + 1;
        for _ in 0..limit {
            let h = rot[p];
            let x = h.unsigned_abs() as usize - 1;
            // the edge (tail, x) this half-edge belongs to
            let tail = if h > 0 { q } else { self.action_inv[q][x] };
            match self.schreier_index[tail][x] {
                Some(s) => {
                    out.push(if h > 0 { s as Letter + 1 } else { -(s as Letter + 1) });
                    p = (p + 1) % len;
                }
                None => {
                    q = if h > 0 { self.action[q][x] } else { tail };
                    p = (pos[&-h] + 1) % len;
                }
            }
            if q == 0 && p == 0 {
                break;
            }
        }
        if out.len() != 2 * self.schreier.len() || q != 0 || p != 0 {
            return Err(Error::Internal("tree contraction did not close up".into()));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroupTable;
    use crate::marking::{level_marking, parse_assignments};
    use crate::surface::{build_surface_group, SurfaceType};
    use proptest::prelude::*;

    fn q8_cover() -> CoverData {
        let p = build_surface_group(SurfaceType::new(1, 0, 1)).unwrap();
        let m = parse_assignments(&p, FiniteGroupTable::quaternion(), "a->i,b->j").unwrap();
        CoverData::new(&m).unwrap()
    }

    #[test]
    fn q8_cover_counts() {
        let c = q8_cover();
        assert_eq!(c.index(), 8);
        assert_eq!(c.schreier_rank(), 9);
        assert_eq!(c.boundary_count(), 4);
        assert!(c.peripheral.iter().all(|p| p.length == 2));
        assert_eq!(c.cover_genus(), Some(3));
        assert!(c.transversal[0].is_empty());
    }

    #[test]
    fn transversal_is_prefix_closed() {
        let c = q8_cover();
        for t in &c.transversal {
            for k in 0..t.len() {
                let prefix = Word::new(t.letters()[..k].iter().copied());
                assert!(c.transversal.contains(&prefix));
            }
        }
        for (q, t) in c.transversal.iter().enumerate() {
            assert_eq!(c.coset_of(t), q);
        }
    }

    #[test]
    fn schreier_words_are_basis_vectors() {
        let c = q8_cover();
        for s in 0..c.schreier_rank() {
            let v = c.rewrite(&c.schreier_word(s)).unwrap();
            assert!(v.iter().enumerate().all(|(i, &x)| x == (i == s) as i64));
        }
        assert!(c.rewrite(&Word::empty()).unwrap().iter().all(|&x| x == 0));
        assert!(matches!(c.rewrite(&Word::gen(1)), Err(Error::NotInSubgroup { coset: 1.., .. })));
    }

    #[test]
    fn level_two_genus_two() {
        let p = build_surface_group(SurfaceType::new(2, 1, 0)).unwrap();
        let c = CoverData::new(&level_marking(&p, 2).unwrap()).unwrap();
        assert_eq!(c.index(), 16);
        assert_eq!(c.schreier_rank(), 49);
        assert_eq!(c.boundary_count(), 16);
        assert!(c.peripheral.iter().all(|p| p.length == 1));
        assert_eq!(c.cover_genus(), Some(17));
    }

    #[test]
    fn trivial_marking() {
        let p = build_surface_group(SurfaceType::new(1, 0, 1)).unwrap();
        let m = QuotientMarking::single(&p, FiniteGroupTable::cyclic(1), vec![0, 0]).unwrap();
        let c = CoverData::new(&m).unwrap();
        assert_eq!(c.index(), 1);
        assert_eq!(c.transversal, vec![Word::empty()]);
        assert_eq!(c.peripheral.len(), 1);
        assert_eq!(c.peripheral[0].length, 1);
    }

    #[test]
    fn closed_cover_homology() {
        let p = build_surface_group(SurfaceType::new(2, 0, 0)).unwrap();
        let c = CoverData::new(&level_marking(&p, 2).unwrap()).unwrap();
        // 2 - 2g' = 16 * (-2) so g' = 17
        assert_eq!(c.h1_rank(), 34);
        assert_eq!(c.cover_genus(), Some(17));
        for lift in &c.relator_lifts {
            assert!(c.to_h1(lift).unwrap().iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn lifted_rotation_is_complete() {
        let c = q8_cover();
        let rot = c.lifted_rotation().unwrap();
        assert_eq!(rot.len(), 18);
        let mut seen: Vec<Letter> = rot.clone();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 18);
    }

    fn letters() -> impl Strategy<Value = Vec<Letter>> {
        prop::collection::vec(prop_oneof![1i32..=2, -2i32..=-1], 0..12)
    }

    proptest! {
        #[test]
        fn rewrite_is_additive(a in letters(), b in letters()) {
            let c = q8_cover();
            // push both words into K by appending a transversal correction
            let fix = |w: Word| { let q = c.coset_of(&w); w.mul(&c.transversal[q].inverse()) };
            let u = fix(Word::new(a));
            let v = fix(Word::new(b));
            let ru = c.rewrite(&u).unwrap();
            let rv = c.rewrite(&v).unwrap();
            let ruv = c.rewrite(&u.mul(&v)).unwrap();
            for i in 0..ru.len() {
                prop_assert_eq!(ruv[i], ru[i] + rv[i]);
            }
            let ruu = c.rewrite(&u.mul(&u)).unwrap();
            prop_assert!(ruu.iter().zip(&ru).all(|(x, y)| *x == 2 * y));
        }
    }
}
