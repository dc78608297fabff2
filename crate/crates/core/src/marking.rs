//! Homomorphisms from the surface group to finite groups; their kernels are the subgroups `K`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{finite_group_aut, Elem, FiniteGroupTable};
use crate::hash::json_hash;
use crate::surface::{build_surface_group, SurfaceGroupPresentation, SurfaceType};
use crate::word::Word;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkingFactor {
    pub group: Arc<FiniteGroupTable>,
    /// Image of each free generator.
    pub images: Vec<Elem>,
}

impl MarkingFactor {
    pub fn eval(&self, w: &Word) -> Elem {
        let g = &self.group;
        w.letters().iter().fold(g.identity, |acc, &l| {
            let x = self.images[l.unsigned_abs() as usize - 1];
            g.mul(acc, if l > 0 { x } else { g.inv(x) })
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MarkingSource {
    Level(usize),
    Quotient,
    EpiClosure,
}

/// A homomorphism into a product of finite groups, one factor per entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientMarking {
    pub presentation: SurfaceGroupPresentation,
    pub factors: Vec<MarkingFactor>,
    pub source: MarkingSource,
    /// Set by constructions that are characteristic by design.
    pub characteristic_by_construction: bool,
}

pub type Tuple = Vec<Elem>;

impl QuotientMarking {
    pub fn new(presentation: &SurfaceGroupPresentation, factors: Vec<MarkingFactor>, source: MarkingSource) -> Result<Self> {
        let r = presentation.rank();
        for f in &factors {
            if f.images.len() != r {
                return Err(Error::InvalidMarking(format!("{} images for rank {r}", f.images.len())));
            }
            if f.images.iter().any(|&x| x >= f.group.order()) {
                return Err(Error::InvalidMarking("image outside the group".into()));
            }
        }
        let m = QuotientMarking {
            presentation: presentation.clone(),
            factors,
            source,
            characteristic_by_construction: false,
        };
        if let Some(rel) = &presentation.relator {
            if m.eval(rel) != m.identity() {
                return Err(Error::InvalidMarking("relator does not map to the identity".into()));
            }
        }
        Ok(m)
    }

    pub fn single(presentation: &SurfaceGroupPresentation, group: FiniteGroupTable, images: Vec<Elem>) -> Result<Self> {
        Self::new(
            presentation,
            vec![MarkingFactor {
                group: Arc::new(group),
                images,
            }],
            MarkingSource::Quotient,
        )
    }

    pub fn rank(&self) -> usize {
        self.presentation.rank()
    }

    pub fn identity(&self) -> Tuple {
        self.factors.iter().map(|f| f.group.identity).collect()
    }

    pub fn eval(&self, w: &Word) -> Tuple {
        self.factors.iter().map(|f| f.eval(w)).collect()
    }

    pub fn mul(&self, a: &[Elem], b: &[Elem]) -> Tuple {
        self.factors.iter().enumerate().map(|(i, f)| f.group.mul(a[i], b[i])).collect()
    }

    /// Image of generator `l` (signed, 1-based).
    pub fn letter_image(&self, l: i32) -> Tuple {
        self.factors
            .iter()
            .map(|f| {
                let x = f.images[l.unsigned_abs() as usize - 1];
                if l > 0 {
                    x
                } else {
                    f.group.inv(x)
                }
            })
            .collect()
    }

    pub fn target_order(&self) -> usize {
        self.factors.iter().map(|f| f.group.order()).product()
    }

    /// Surjective onto the target group (each factor, and the product when there is one factor).
    pub fn is_surjective(&self) -> bool {
        match self.factors.as_slice() {
            [f] => f.group.generates(&f.images),
            fs => fs.iter().all(|f| f.group.generates(&f.images)),
        }
    }

    /// Precompose with an endomorphism: `x ↦ ρ(e(x))`.
    pub fn precompose(&self, images: &[Word]) -> QuotientMarking {
        let factors = self
            .factors
            .iter()
            .map(|f| MarkingFactor {
                group: f.group.clone(),
                images: images.iter().map(|w| f.eval(w)).collect(),
            })
            .collect();
        QuotientMarking {
            presentation: self.presentation.clone(),
            factors,
            source: self.source,
            characteristic_by_construction: self.characteristic_by_construction,
        }
    }

    /// Same marking read on another surface type with the same fundamental group presentation.
    pub fn on_presentation(&self, presentation: &SurfaceGroupPresentation) -> Result<QuotientMarking> {
        let p = &self.presentation;
        if p.names != presentation.names || p.peripheral != presentation.peripheral || p.relator != presentation.relator {
            return Err(Error::InvalidInput(format!(
                "surfaces {} and {} have different presentations",
                p.surface, presentation.surface
            )));
        }
        Ok(QuotientMarking {
            presentation: presentation.clone(),
            ..self.clone()
        })
    }

    pub fn content_hash(&self) -> String {
        #[derive(Serialize)]
        struct Key<'a> {
            surface: String,
            factors: Vec<(String, &'a [Elem])>,
        }
        let key = Key {
            surface: self.presentation.surface.to_string(),
            factors: self.factors.iter().map(|f| (f.group.content_hash(), f.images.as_slice())).collect(),
        };
        json_hash(&key).expect("serializable")
    }

    pub fn describe(&self) -> String {
        let names = &self.presentation.names;
        self.factors
            .iter()
            .map(|f| {
                let imgs: Vec<String> = names
                    .iter()
                    .zip(&f.images)
                    .map(|(n, &x)| format!("{n}->{}", f.group.labels[x]))
                    .collect();
                format!("{}[{}]", f.group.name, imgs.join(","))
            })
            .collect::<Vec<_>>()
            .join(" x ")
    }

    pub fn to_text(&self) -> Result<String> {
        let [f] = self.factors.as_slice() else {
            return Err(Error::InvalidMarking("only single-factor markings have a text form".into()));
        };
        let mut s = format!("marking {} {}\n", self.presentation.surface, f.group.name);
        for (n, &x) in self.presentation.names.iter().zip(&f.images) {
            s.push_str(&format!("{n} -> {}\n", f.group.labels[x]));
        }
        Ok(s)
    }

    /// `marking SURFACE GROUP` followed by `gen -> element` lines (or one `;`/`,` separated line).
    pub fn from_text(presentation: &SurfaceGroupPresentation, group: FiniteGroupTable, text: &str) -> Result<Self> {
        let mut body = text.trim();
        if let Some(rest) = body.strip_prefix("marking") {
            let (header, tail) = rest.split_once(['\n', ';']).unwrap_or((rest, ""));
            let parts: Vec<&str> = header.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(Error::parse(1, "expected `marking SURFACE GROUP`"));
            }
            if parts[0] != presentation.surface.to_string() {
                return Err(Error::InvalidMarking(format!("marking is for surface {}", parts[0])));
            }
            if parts[1] != group.name {
                return Err(Error::InvalidMarking(format!("marking is for group {}", parts[1])));
            }
            body = tail;
        }
        parse_assignments(presentation, group, body)
    }
}

/// Parse `a->i, b->j` style assignments.
pub fn parse_assignments(presentation: &SurfaceGroupPresentation, group: FiniteGroupTable, text: &str) -> Result<QuotientMarking> {
    let mut images = vec![None; presentation.rank()];
    for item in text.split(['\n', ',', ';']).map(str::trim).filter(|s| !s.is_empty()) {
        let (g, x) = item
            .split_once("->")
            .ok_or_else(|| Error::InvalidMarking(format!("expected `gen -> element`, got `{item}`")))?;
        let i = presentation
            .generator_index(g.trim())
            .ok_or_else(|| Error::InvalidMarking(format!("unknown generator `{}`", g.trim())))?;
        if images[i].is_some() {
            return Err(Error::InvalidMarking(format!("`{}` assigned twice", g.trim())));
        }
        images[i] = Some(group.element(x.trim())?);
    }
    let images = images
        .into_iter()
        .enumerate()
        .map(|(i, x)| x.ok_or_else(|| Error::InvalidMarking(format!("no image for `{}`", presentation.names[i]))))
        .collect::<Result<Vec<_>>>()?;
    QuotientMarking::single(presentation, group, images)
}

/// Reduction of `H_1` mod `L`.
pub fn level_marking(pres: &SurfaceGroupPresentation, l: usize) -> Result<QuotientMarking> {
    if l < 2 {
        return Err(Error::InvalidInput("level must be at least 2".into()));
    }
    let r = pres.rank();
    let q = FiniteGroupTable::elementary_abelian(l, r);
    let images = (0..r).map(|i| l.pow(i as u32)).collect();
    let mut m = QuotientMarking::single(pres, q, images)?;
    m.source = MarkingSource::Level(l);
    m.characteristic_by_construction = true;
    Ok(m)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EpiClosure {
    pub epimorphisms: usize,
    pub classes: usize,
    pub marking: QuotientMarking,
}

/// Intersection of the kernels of all epimorphisms onto `q`, one factor per `Aut(q)` class.
pub fn epi_closure_marking(pres: &SurfaceGroupPresentation, q: &FiniteGroupTable, cap: usize, aut_cap: usize) -> Result<EpiClosure> {
    if !pres.is_free() {
        return Err(Error::InvalidInput("epimorphism closure needs a free presentation".into()));
    }
    let r = pres.rank();
    let m = q.order();
    let total = (m as u128).checked_pow(r as u32).filter(|&t| t <= cap as u128);
    let Some(total) = total else {
        return Err(Error::CapExceeded { cap, found: 0 });
    };
    let decode = |mut k: usize| {
        let mut t = vec![0; r];
        for x in t.iter_mut() {
            *x = k % m;
            k /= m;
        }
        t
    };
    let epis: Vec<Tuple> = (0..total as usize)
        .into_par_iter()
        .map(decode)
        .filter(|t| q.generates(t))
        .collect();
    let auts = finite_group_aut(q, aut_cap)?;
    let mut reps: Vec<Tuple> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for t in &epis {
        let canon = auts.iter().map(|a| t.iter().map(|&x| a[x]).collect::<Tuple>()).min().expect("identity aut");
        if seen.insert(canon) {
            reps.push(t.clone());
        }
    }
    let group = Arc::new(q.clone());
    let factors: Vec<MarkingFactor> = if reps.is_empty() {
        vec![MarkingFactor {
            group: Arc::new(FiniteGroupTable::cyclic(1)),
            images: vec![0; r],
        }]
    } else {
        reps.iter()
            .map(|t| MarkingFactor {
                group: group.clone(),
                images: t.clone(),
            })
            .collect()
    };
    let mut marking = QuotientMarking::new(pres, factors, MarkingSource::EpiClosure)?;
    marking.characteristic_by_construction = true;
    Ok(EpiClosure {
        epimorphisms: epis.len(),
        classes: reps.len(),
        marking,
    })
}

/// Seeded surjective single-factor markings on surfaces with `1 ≤ g ≤ 2`, `n + p ≤ 2`, index at most `max_index`.
pub fn random_markings(seed: u64, count: usize, max_index: usize) -> Vec<QuotientMarking> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let pool: Vec<FiniteGroupTable> = [
        FiniteGroupTable::cyclic(2),
        FiniteGroupTable::cyclic(3),
        FiniteGroupTable::cyclic(4),
        FiniteGroupTable::cyclic(6),
        FiniteGroupTable::elementary_abelian(2, 2),
        FiniteGroupTable::elementary_abelian(2, 3),
        FiniteGroupTable::elementary_abelian(3, 2),
        FiniteGroupTable::symmetric(3),
        FiniteGroupTable::dihedral(4),
        FiniteGroupTable::dihedral(5),
        FiniteGroupTable::quaternion(),
        FiniteGroupTable::symmetric(4),
    ]
    .into_iter()
    .filter(|q| q.order() <= max_index)
    .collect();
    let mut surfaces = Vec::new();
    for g in 1..=2 {
        for n in 0..=2 {
            for p in 0..=(2 - n) {
                surfaces.push(SurfaceType::new(g, n, p));
            }
        }
    }
    let mut out = Vec::new();
    if pool.is_empty() {
        return out;
    }
    while out.len() < count {
        let s = surfaces[rng.gen_range(0..surfaces.len())];
        let p = build_surface_group(s).expect("small surface");
        let q = &pool[rng.gen_range(0..pool.len())];
        let images: Vec<Elem> = (0..p.rank()).map(|_| rng.gen_range(0..q.order())).collect();
        if !q.generates(&images) {
            continue;
        }
        if let Ok(m) = QuotientMarking::single(&p, q.clone(), images) {
            out.push(m);
        }
    }
    out
}
