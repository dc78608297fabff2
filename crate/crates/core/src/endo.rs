use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::IntMatrix;
use crate::surface::SurfaceGroupPresentation;
use crate::word::Word;

/// Images of the free generators; `inverse` is present for verified automorphisms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EndomorphismTable {
    pub images: Vec<Word>,
    pub inverse: Option<Vec<Word>>,
}

impl EndomorphismTable {
    pub fn identity(rank: usize) -> Self {
        let images: Vec<Word> = (1..=rank as i32).map(Word::gen).collect();
        EndomorphismTable {
            inverse: Some(images.clone()),
            images,
        }
    }

    pub fn from_images(images: Vec<Word>) -> Result<Self> {
        let rank = images.len();
        for w in &images {
            w.check_rank(rank)?;
        }
        Ok(EndomorphismTable {
            images,
            inverse: None,
        })
    }

    /// Pair two tables that are claimed to be mutually inverse and check it.
    pub fn with_inverse(images: Vec<Word>, inverse: Vec<Word>) -> Result<Self> {
        let e = EndomorphismTable::from_images(images)?;
        let f = EndomorphismTable::from_images(inverse)?;
        if e.rank() != f.rank() {
            return Err(Error::PresentationMismatch {
                left: e.rank(),
                right: f.rank(),
            });
        }
        if !compose_raw(&e, &f).is_identity_images() || !compose_raw(&f, &e).is_identity_images() {
            return Err(Error::NotAutomorphism("tables are not mutually inverse".into()));
        }
        Ok(EndomorphismTable {
            images: e.images,
            inverse: Some(f.images),
        })
    }

    /// Find the inverse by Nielsen reduction of the image tuple.
    pub fn into_automorphism(self) -> Result<Self> {
        if self.inverse.is_some() {
            return Ok(self);
        }
        let inv = nielsen_inverse(&self.images)
            .ok_or_else(|| Error::NotAutomorphism("Nielsen reduction did not reach a basis".into()))?;
        EndomorphismTable::with_inverse(self.images, inv)
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn is_automorphism(&self) -> bool {
        self.inverse.is_some()
    }

    fn is_identity_images(&self) -> bool {
        self.images.iter().enumerate().all(|(i, w)| w.letters() == [i as i32 + 1])
    }

    pub fn is_identity(&self) -> bool {
        self.is_identity_images()
    }

    pub fn apply(&self, w: &Word) -> Word {
        let mut out = Word::empty();
        for &l in w.letters() {
            let img = &self.images[l.unsigned_abs() as usize - 1];
            if l > 0 {
                out.extend(img);
            } else {
                for &m in img.letters().iter().rev() {
                    out.push(-m);
                }
            }
        }
        out
    }

    pub fn checked_apply(&self, w: &Word) -> Result<Word> {
        w.check_rank(self.rank())?;
        Ok(self.apply(w))
    }

    pub fn inverse_table(&self) -> Result<EndomorphismTable> {
        match &self.inverse {
            Some(inv) => Ok(EndomorphismTable {
                images: inv.clone(),
                inverse: Some(self.images.clone()),
            }),
            None => Err(Error::NotAutomorphism("no inverse table".into())),
        }
    }

    /// Integer matrix of the induced map on the abelianization; column j is `e(x_j)`.
    pub fn abelianized_matrix(&self) -> IntMatrix {
        let r = self.rank();
        let mut m = IntMatrix::zeros(r, r);
        for (j, w) in self.images.iter().enumerate() {
            for (i, v) in w.exponent_sums(r).into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn max_image_len(&self) -> usize {
        self.images.iter().map(Word::len).max().unwrap_or(0)
    }

    pub fn format(&self, names: &[String]) -> String {
        let mut s = String::new();
        for (i, w) in self.images.iter().enumerate() {
            s.push_str(&format!("{} -> {}\n", names[i], w.format(names)));
        }
        s
    }
}

fn compose_raw(e1: &EndomorphismTable, e2: &EndomorphismTable) -> EndomorphismTable {
    EndomorphismTable {
        images: e2.images.iter().map(|w| e1.apply(w)).collect(),
        inverse: None,
    }
}

/// `e1 ∘ e2`, i.e. `x ↦ e1(e2(x))`.
pub fn compose(e1: &EndomorphismTable, e2: &EndomorphismTable) -> Result<EndomorphismTable> {
    if e1.rank() != e2.rank() {
        return Err(Error::PresentationMismatch {
            left: e1.rank(),
            right: e2.rank(),
        });
    }
    let mut out = compose_raw(e1, e2);
    if let (Some(i1), Some(i2)) = (&e1.inverse, &e2.inverse) {
        let inv1 = EndomorphismTable { images: i1.clone(), inverse: None };
        let inv2 = EndomorphismTable { images: i2.clone(), inverse: None };
        out.inverse = Some(compose_raw(&inv2, &inv1).images);
    }
    Ok(out)
}

pub fn apply_endomorphism(e: &EndomorphismTable, w: &Word) -> Result<Word> {
    e.checked_apply(w)
}

pub fn inner_automorphism(rank: usize, u: &Word) -> EndomorphismTable {
    let images = (1..=rank as i32).map(|i| u.conjugate(&Word::gen(i))).collect();
    let ui = u.inverse();
    let inverse = (1..=rank as i32).map(|i| ui.conjugate(&Word::gen(i))).collect();
    EndomorphismTable {
        images,
        inverse: Some(inverse),
    }
}

fn nielsen_inverse(images: &[Word]) -> Option<Vec<Word>> {
    let r = images.len();
    // (u_i, t_i) with e(t_i) = u_i
    let mut u: Vec<Word> = images.to_vec();
    let mut t: Vec<Word> = (1..=r as i32).map(Word::gen).collect();
    let total = |u: &[Word]| u.iter().map(Word::len).sum::<usize>();
    loop {
        if u.iter().any(Word::is_empty) {
            return None;
        }
        if u.iter().all(|w| w.len() == 1) {
            break;
        }
        let before = total(&u);
        let mut best: Option<(usize, usize, bool, bool, usize)> = None;
        for i in 0..r {
            for j in 0..r {
                if i == j {
                    continue;
                }
                for left in [false, true] {
                    for inv in [false, true] {
                        let v = if inv { u[j].inverse() } else { u[j].clone() };
                        let cand = if left { v.mul(&u[i]) } else { u[i].mul(&v) };
                        if cand.len() < u[i].len() && best.is_none_or(|b| cand.len() + before - u[i].len() < b.4) {
                            best = Some((i, j, left, inv, cand.len() + before - u[i].len()));
                        }
                    }
                }
            }
        }
        let (i, j, left, inv, _) = best?;
        let (vu, vt) = if inv {
            (u[j].inverse(), t[j].inverse())
        } else {
            (u[j].clone(), t[j].clone())
        };
        if left {
            u[i] = vu.mul(&u[i]);
            t[i] = vt.mul(&t[i]);
        } else {
            u[i] = u[i].mul(&vu);
            t[i] = t[i].mul(&vt);
        }
    }
    let mut inv = vec![None; r];
    for i in 0..r {
        let l = u[i].letters()[0];
        let k = l.unsigned_abs() as usize - 1;
        if inv[k].is_some() {
            return None;
        }
        inv[k] = Some(if l > 0 { t[i].clone() } else { t[i].inverse() });
    }
    inv.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeripheralReport {
    /// One conjugator per peripheral word, `None` where the image is not conjugate.
    pub conjugators: Vec<Option<Word>>,
    pub relator_ok: Option<bool>,
}

impl PeripheralReport {
    pub fn success(&self) -> bool {
        self.conjugators.iter().all(Option::is_some) && self.relator_ok != Some(false)
    }
}

pub fn verify_peripheral_structure(pres: &SurfaceGroupPresentation, e: &EndomorphismTable) -> PeripheralReport {
    let conjugators = pres
        .peripheral
        .iter()
        .map(|z| {
            let img = e.apply(z);
            z.conjugator_to(&img).filter(|c| c.conjugate(z) == img)
        })
        .collect();
    let relator_ok = pres.relator.as_ref().map(|r| r.conjugator_to(&e.apply(r)).is_some());
    PeripheralReport {
        conjugators,
        relator_ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{build_surface_group, SurfaceType};
    use proptest::prelude::*;

    fn torus_twist() -> EndomorphismTable {
        EndomorphismTable::from_images(vec![Word::gen(1), Word::new([2, 1])])
            .unwrap()
            .into_automorphism()
            .unwrap()
    }

    #[test]
    fn substitution() {
        let e = torus_twist();
        assert_eq!(e.apply(&Word::new([2, 2])), Word::new([2, 1, 2, 1]));
        assert_eq!(e.inverse.as_ref().unwrap()[1], Word::new([2, -1]));
        let id = EndomorphismTable::identity(2);
        assert_eq!(compose(&e, &id).unwrap().images, e.images);
        assert!(compose(&e, &e.inverse_table().unwrap()).unwrap().is_identity());
    }

    #[test]
    fn abelianization() {
        let m = torus_twist().abelianized_matrix();
        assert_eq!(m.to_rows(), vec![vec![1, 1], vec![0, 1]]);
        let inner = inner_automorphism(3, &Word::new([1, 3, -2]));
        assert!(inner.abelianized_matrix().is_identity());
    }

    #[test]
    fn peripheral_checks() {
        let pres = build_surface_group(SurfaceType::new(1, 0, 1)).unwrap();
        let rep = verify_peripheral_structure(&pres, &torus_twist());
        assert!(rep.success());
        let u = Word::new([1, 1, -2]);
        let rep = verify_peripheral_structure(&pres, &inner_automorphism(2, &u));
        assert_eq!(rep.conjugators[0].as_ref().unwrap().conjugate(&pres.peripheral[0]), u.conjugate(&pres.peripheral[0]));
        let id = verify_peripheral_structure(&pres, &EndomorphismTable::identity(2));
        assert_eq!(id.conjugators, vec![Some(Word::empty())]);
        let bad = EndomorphismTable::from_images(vec![Word::gen(2), Word::gen(1)]).unwrap();
        assert!(!verify_peripheral_structure(&pres, &bad).success());
    }

    #[test]
    fn not_automorphism() {
        let e = EndomorphismTable::from_images(vec![Word::new([1, 1]), Word::gen(2)]).unwrap();
        assert!(e.into_automorphism().is_err());
        let e = EndomorphismTable::from_images(vec![Word::gen(1), Word::gen(1)]).unwrap();
        assert!(e.into_automorphism().is_err());
    }

    /// Random products of elementary Nielsen moves on rank 3.
    fn arb_auto() -> impl Strategy<Value = EndomorphismTable> {
        prop::collection::vec((0usize..3, 0usize..3, 0u8..3), 0..8).prop_map(|moves| {
            let mut e = EndomorphismTable::identity(3);
            for (i, j, kind) in moves {
                let mut imgs: Vec<Word> = (1..=3).map(Word::gen).collect();
                match kind {
                    0 if i != j => imgs[i] = Word::new([i as i32 + 1, j as i32 + 1]),
                    1 if i != j => imgs.swap(i, j),
                    _ => imgs[i] = Word::gen(-(i as i32 + 1)),
                }
                let m = EndomorphismTable::from_images(imgs).unwrap().into_automorphism().unwrap();
                e = compose(&e, &m).unwrap();
            }
            e
        })
    }

    proptest! {
        #[test]
        fn round_trip(e in arb_auto(), ls in prop::collection::vec(prop_oneof![1i32..=3, -3i32..=-1], 0..20)) {
            let w = Word::new(ls);
            let inv = e.inverse_table().unwrap();
            prop_assert_eq!(inv.apply(&e.apply(&w)), w.clone());
            prop_assert!(compose(&e, &inv).unwrap().is_identity());
            prop_assert!(compose(&inv, &e).unwrap().is_identity());
            let fresh = EndomorphismTable::from_images(e.images.clone()).unwrap().into_automorphism();
            prop_assert!(fresh.is_ok());
        }

        #[test]
        fn abelianization_functorial(e1 in arb_auto(), e2 in arb_auto()) {
            let c = compose(&e1, &e2).unwrap();
            prop_assert_eq!(c.abelianized_matrix(), e1.abelianized_matrix().mul(&e2.abelianized_matrix()).unwrap());
        }

        #[test]
        fn apply_multiplicative(e in arb_auto(),
                                a in prop::collection::vec(prop_oneof![1i32..=3, -3i32..=-1], 0..10),
                                b in prop::collection::vec(prop_oneof![1i32..=3, -3i32..=-1], 0..10)) {
            let (u, v) = (Word::new(a), Word::new(b));
            prop_assert_eq!(e.apply(&u.mul(&v)), e.apply(&u).mul(&e.apply(&v)));
        }

        #[test]
        fn compose_associative(e1 in arb_auto(), e2 in arb_auto(), e3 in arb_auto()) {
            let l = compose(&compose(&e1, &e2).unwrap(), &e3).unwrap();
            let r = compose(&e1, &compose(&e2, &e3).unwrap()).unwrap();
            prop_assert_eq!(l.images, r.images);
        }
    }
}
