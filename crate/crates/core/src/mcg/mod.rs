//! Named mapping class generators acting on the surface group, with relation checks.

pub mod derive;
mod format;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::endo::{compose, inner_automorphism, verify_peripheral_structure, EndomorphismTable};
use crate::error::{Error, Result};
use crate::hash::sha256_hex;
use crate::linalg::IntMatrix;
use crate::ribbon::Ribbon;
use crate::surface::{build_surface_group, SurfaceGroupPresentation, SurfaceType};
use crate::word::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    Twist,
    Push,
    BoundaryTwist,
}

impl GeneratorKind {
    /// Twists and boundary twists come from the split copy of the smaller mapping class group.
    pub fn in_split_copy(self) -> bool {
        !matches!(self, GeneratorKind::Push)
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeneratorKind::Twist => "twist",
            GeneratorKind::Push => "push",
            GeneratorKind::BoundaryTwist => "boundary-twist",
        })
    }
}

impl std::str::FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "twist" => Ok(GeneratorKind::Twist),
            "push" => Ok(GeneratorKind::Push),
            "boundary-twist" => Ok(GeneratorKind::BoundaryTwist),
            _ => Err(Error::parse(0, format!("unknown generator kind `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedMcgGenerator {
    pub name: String,
    pub kind: GeneratorKind,
    pub table: EndomorphismTable,
    /// Core curve of a twist, used for the declared transvection.
    pub curve: Option<Word>,
    pub symplectic: IntMatrix,
}

/// A word in library generators; `(index, exponent)` pairs read left to right as composition.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct McgWord(pub Vec<(usize, i64)>);

impl McgWord {
    pub fn identity() -> Self {
        McgWord(Vec::new())
    }

    pub fn gen(i: usize) -> Self {
        McgWord(vec![(i, 1)])
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    /// Product with adjacent equal letters merged.
    pub fn mul(&self, other: &McgWord) -> McgWord {
        let mut out = self.0.clone();
        for &(g, e) in &other.0 {
            match out.last_mut() {
                Some(last) if last.0 == g => {
                    last.1 += e;
                    if last.1 == 0 {
                        out.pop();
                    }
                }
                _ => out.push((g, e)),
            }
        }
        McgWord(out)
    }

    pub fn inverse(&self) -> McgWord {
        McgWord(self.0.iter().rev().map(|&(g, e)| (g, -e)).collect())
    }

    pub fn pow(&self, k: i64) -> McgWord {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        (0..k.unsigned_abs()).fold(McgWord::identity(), |acc, _| acc.mul(&base))
    }

    /// Rewrite a word over a sub-alphabet into library generators.
    pub fn substitute(&self, words: &[McgWord]) -> McgWord {
        self.0
            .iter()
            .fold(McgWord::identity(), |acc, &(g, e)| acc.mul(&words[g].pow(e)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub lhs: McgWord,
    pub rhs: McgWord,
}

#[derive(Clone, Debug)]
pub struct GeneratorLibrary {
    pub surface: SurfaceType,
    pub presentation: SurfaceGroupPresentation,
    /// Index into the first face cycle of the wedge used to split the vertex.
    pub split: usize,
    pub generators: Vec<NamedMcgGenerator>,
    pub relations: Vec<Relation>,
    pub id: String,
}

impl GeneratorLibrary {
    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.generators
            .iter()
            .position(|g| g.name == name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn names(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.name.clone()).collect()
    }

    pub fn parse_word(&self, text: &str) -> Result<McgWord> {
        let mut w = McgWord::identity();
        for tok in text.split_whitespace() {
            let (name, exp) = match tok.rsplit_once('^') {
                Some((n, e)) => (n, e.parse::<i64>().map_err(|_| Error::parse(0, format!("bad exponent in `{tok}`")))?),
                None => (tok, 1),
            };
            w = w.mul(&McgWord(vec![(self.index_of(name)?, exp)]));
        }
        Ok(w)
    }

    pub fn format_word(&self, w: &McgWord) -> String {
        if w.is_identity() {
            return "1".into();
        }
        w.0.iter()
            .map(|&(g, e)| match e {
                1 => self.generators[g].name.clone(),
                _ => format!("{}^{}", self.generators[g].name, e),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn evaluate(&self, w: &McgWord) -> Result<EndomorphismTable> {
        let rank = self.presentation.rank();
        let mut out = EndomorphismTable::identity(rank);
        for &(g, e) in &w.0 {
            let gen = self.generators.get(g).ok_or_else(|| Error::UnknownGenerator(format!("#{g}")))?;
            let step = if e < 0 { gen.table.inverse_table()? } else { gen.table.clone() };
            for _ in 0..e.unsigned_abs() {
                out = compose(&out, &step)?;
            }
        }
        Ok(out)
    }

    pub fn split_copy(&self) -> Vec<usize> {
        (0..self.generators.len())
            .filter(|&i| self.generators[i].kind.in_split_copy())
            .collect()
    }

    pub fn to_text(&self) -> String {
        format::save(self)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        format::load(text)
    }
}

/// Declared homological image: transvection `x ↦ x + <c, x> c` for twists, identity otherwise.
pub fn declared_symplectic_image(form: &IntMatrix, kind: GeneratorKind, curve: Option<&Word>) -> Result<IntMatrix> {
    let r = form.rows();
    let mut m = IntMatrix::identity(r);
    let Some(c) = curve.filter(|_| kind == GeneratorKind::Twist) else {
        return Ok(m);
    };
    let cv = c.exponent_sums(r);
    let pair = form.vec_mul(&cv)?;
    for j in 0..r {
        for i in 0..r {
            m[(i, j)] += pair[j] * cv[i];
        }
    }
    Ok(m)
}

pub(crate) fn make_generator(
    pres: &SurfaceGroupPresentation,
    name: &str,
    kind: GeneratorKind,
    table: EndomorphismTable,
    curve: Option<Word>,
) -> Result<NamedMcgGenerator> {
    if kind == GeneratorKind::Twist && curve.is_none() {
        return Err(Error::InvalidInput(format!("twist `{name}` needs a curve line")));
    }
    let table = table.into_automorphism()?;
    let form = Ribbon::new(pres)?.intersection_form();
    let symplectic = declared_symplectic_image(&form, kind, curve.as_ref())?;
    Ok(NamedMcgGenerator {
        name: name.to_string(),
        kind,
        table,
        curve,
        symplectic,
    })
}

pub fn library_id(surface: SurfaceType, text: &str) -> String {
    format!("lib-{}-{}-{}-{}", surface.g, surface.n, surface.p, &sha256_hex(text.as_bytes())[..12])
}

const BUILTIN: &[((usize, usize, usize), &str)] = &[
    ((1, 0, 1), include_str!("../../data/s1_0_1.lib")),
    ((1, 1, 0), include_str!("../../data/s1_1_0.lib")),
    ((2, 1, 0), include_str!("../../data/s2_1_0.lib")),
    ((2, 0, 1), include_str!("../../data/s2_0_1.lib")),
    ((1, 1, 1), include_str!("../../data/s1_1_1.lib")),
];

pub fn builtin_surfaces() -> Vec<SurfaceType> {
    BUILTIN.iter().map(|((g, n, p), _)| SurfaceType::new(*g, *n, *p)).collect()
}

pub fn builtin_text(s: SurfaceType) -> Option<&'static str> {
    BUILTIN
        .iter()
        .find(|((g, n, p), _)| SurfaceType::new(*g, *n, *p) == s)
        .map(|(_, t)| *t)
}

pub fn standard_generators(s: SurfaceType) -> Result<GeneratorLibrary> {
    let text = builtin_text(s).ok_or(Error::UnsupportedSurface(s))?;
    GeneratorLibrary::from_text(text)
}

/// Conjugation `x ↦ loop x loop^-1`.
pub fn point_push(pres: &SurfaceGroupPresentation, loop_word: &Word) -> Result<EndomorphismTable> {
    loop_word.check_rank(pres.rank())?;
    Ok(inner_automorphism(pres.rank(), loop_word))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorCheck {
    pub name: String,
    pub automorphism: bool,
    pub peripheral: bool,
    pub symplectic: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RelationCheck {
    pub relation: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValidationReport {
    pub library_id: String,
    pub generators: Vec<GeneratorCheck>,
    pub relations: Vec<RelationCheck>,
    pub pass: bool,
}

pub fn validate_mcg_relations(lib: &GeneratorLibrary) -> ValidationReport {
    let pres = &lib.presentation;
    let generators: Vec<GeneratorCheck> = lib
        .generators
        .iter()
        .map(|g| {
            let automorphism = g
                .table
                .inverse_table()
                .and_then(|inv| compose(&g.table, &inv))
                .is_ok_and(|c| c.is_identity())
                && g.table.inverse_table().and_then(|inv| compose(&inv, &g.table)).is_ok_and(|c| c.is_identity());
            GeneratorCheck {
                name: g.name.clone(),
                automorphism,
                peripheral: verify_peripheral_structure(pres, &g.table).success(),
                symplectic: g.table.abelianized_matrix() == g.symplectic,
            }
        })
        .collect();
    let relations: Vec<RelationCheck> = lib
        .relations
        .iter()
        .map(|r| {
            let pass = match (lib.evaluate(&r.lhs), lib.evaluate(&r.rhs)) {
                (Ok(a), Ok(b)) => a.images == b.images,
                _ => false,
            };
            RelationCheck {
                relation: format!("{} = {}", lib.format_word(&r.lhs), lib.format_word(&r.rhs)),
                pass,
            }
        })
        .collect();
    let pass = generators.iter().all(|g| g.automorphism && g.peripheral && g.symplectic)
        && relations.iter().all(|r| r.pass);
    ValidationReport {
        library_id: lib.id.clone(),
        generators,
        relations,
        pass,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MultitwistReport {
    pub factorization: String,
    pub pass: bool,
    pub detail: String,
}

/// Check that `e` equals the given product of library generators exactly.
pub fn multitwist_check(e: &EndomorphismTable, lib: &GeneratorLibrary, factorization: &str) -> Result<MultitwistReport> {
    let w = lib.parse_word(factorization)?;
    let f = lib.evaluate(&w)?;
    let (pass, detail) = if f.images == e.images {
        (true, "exact match".to_string())
    } else if f.abelianized_matrix() != e.abelianized_matrix() {
        (false, "homology images differ".to_string())
    } else {
        let pres = &lib.presentation;
        let bad = (0..pres.rank()).find(|&i| f.images[i] != e.images[i]).unwrap_or(0);
        (false, format!("images of {} differ", pres.names[bad]))
    };
    Ok(MultitwistReport {
        factorization: factorization.to_string(),
        pass,
        detail,
    })
}

pub(crate) fn presentation_for(s: SurfaceType) -> Result<SurfaceGroupPresentation> {
    build_surface_group(s)
}
