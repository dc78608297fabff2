use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::{commutator, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SurfaceType {
    pub g: usize,
    pub n: usize,
    pub p: usize,
}

impl SurfaceType {
    pub const fn new(g: usize, n: usize, p: usize) -> Self {
        SurfaceType { g, n, p }
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.g as i64 - self.n as i64 - self.p as i64
    }

    pub fn peripheral_count(&self) -> usize {
        self.n + self.p
    }

    pub fn is_free(&self) -> bool {
        self.n + self.p >= 1
    }

    pub fn rank(&self) -> usize {
        if self.is_free() {
            2 * self.g + self.n + self.p - 1
        } else {
            2 * self.g
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.g == 0 && self.n + self.p <= 2
    }
}

impl fmt::Display for SurfaceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.g, self.n, self.p)
    }
}

impl FromStr for SurfaceType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).collect();
        if parts.len() != 3 {
            return Err(Error::parse(0, format!("surface `{s}`: expected g,n,p")));
        }
        let num = |t: &str| t.parse::<usize>().map_err(|_| Error::parse(0, format!("surface `{s}`: bad integer `{t}`")));
        Ok(SurfaceType::new(num(parts[0])?, num(parts[1])?, num(parts[2])?))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PeripheralKind {
    Puncture,
    Boundary,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceGroupPresentation {
    pub surface: SurfaceType,
    pub names: Vec<String>,
    pub peripheral: Vec<Word>,
    /// Metadata only: punctures are listed before boundary components.
    pub peripheral_kinds: Vec<PeripheralKind>,
    pub relator: Option<Word>,
}

impl SurfaceGroupPresentation {
    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn is_free(&self) -> bool {
        self.relator.is_none()
    }

    pub fn genus(&self) -> usize {
        self.surface.g
    }

    /// `prod [a_i, b_i]`
    pub fn commutator_product(&self) -> Word {
        let mut w = Word::empty();
        for i in 0..self.surface.g as i32 {
            w.extend(&commutator(&Word::gen(2 * i + 1), &Word::gen(2 * i + 2)));
        }
        w
    }

    /// Boundary cycles of the one-vertex ribbon graph, as read around each face.
    pub fn face_cycles(&self) -> Vec<Word> {
        match &self.relator {
            Some(r) => vec![r.clone()],
            None => {
                let mut w = self.commutator_product();
                let z0 = 2 * self.surface.g as i32;
                let k = self.surface.peripheral_count() as i32 - 1;
                for i in 1..=k {
                    w.push(z0 + i);
                }
                let mut cycles = vec![w];
                cycles.extend((1..=k).map(|i| Word::gen(-(z0 + i))));
                cycles
            }
        }
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        Word::parse(text, &self.names)
    }

    pub fn format_word(&self, w: &Word) -> String {
        w.format(&self.names)
    }

    /// Generator names, with `a`/`b` accepted for `a1`/`b1` in genus one.
    pub fn generator_index(&self, name: &str) -> Option<usize> {
        if let Some(i) = self.names.iter().position(|n| n == name) {
            return Some(i);
        }
        if self.surface.g == 1 {
            match name {
                "a" => return Some(0),
                "b" => return Some(1),
                _ => {}
            }
        }
        None
    }
}

pub fn build_surface_group(s: SurfaceType) -> Result<SurfaceGroupPresentation> {
    if s.is_degenerate() {
        return Err(Error::DegenerateSurface(s));
    }
    let mut names = Vec::new();
    for i in 1..=s.g {
        names.push(format!("a{i}"));
        names.push(format!("b{i}"));
    }
    let mut kinds = vec![PeripheralKind::Puncture; s.p];
    kinds.extend(std::iter::repeat_n(PeripheralKind::Boundary, s.n));
    let mut pres = SurfaceGroupPresentation {
        surface: s,
        names,
        peripheral: Vec::new(),
        peripheral_kinds: kinds,
        relator: None,
    };
    if !s.is_free() {
        pres.relator = Some(pres.commutator_product());
        return Ok(pres);
    }
    let k = s.peripheral_count();
    for i in 1..k {
        pres.names.push(format!("z{i}"));
    }
    let z0 = 2 * s.g as i32;
    let mut last = pres.commutator_product();
    for i in 1..k as i32 {
        pres.peripheral.push(Word::gen(z0 + i));
        last.push(z0 + i);
    }
    pres.peripheral.push(last.inverse());
    Ok(pres)
}
