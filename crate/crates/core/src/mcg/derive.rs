//! Built-in libraries rebuilt from the ribbon model.
//!
//! The shipped data files are checked against this in tests, so the two
//! sources must agree table for table.

use super::{library_id, make_generator, presentation_for, GeneratorKind, GeneratorLibrary, Relation};
use crate::endo::EndomorphismTable;
use crate::error::{Error, Result};
use crate::mcg::point_push;
use crate::ribbon::Ribbon;
use crate::surface::SurfaceType;
use crate::word::Word;

enum Curve {
    Petal(usize),
    Arc { i: usize, j: usize },
    Face,
}

struct Spec {
    split: usize,
    twists: Vec<(&'static str, Curve)>,
    relations: Vec<String>,
}

fn braid(x: &str, y: &str) -> String {
    format!("{x} {y} {x} = {y} {x} {y}")
}

fn commute(x: &str, y: &str) -> String {
    format!("{x} {y} = {y} {x}")
}

fn chain(names: &[&str], k: usize, rhs: &str) -> String {
    let one = names.join(" ");
    let lhs = vec![one; k].join(" ");
    format!("{lhs} = {rhs}")
}

/// The peripheral loop `z = W^-1` as a product of pushes, `W = prod [a_i, b_i]`.
fn push_of_boundary(g: usize) -> String {
    let mut parts = Vec::new();
    for i in (1..=g).rev() {
        parts.push(format!("Push(b{i}) Push(a{i}) Push(b{i})^-1 Push(a{i})^-1"));
    }
    parts.join(" ")
}

fn spec(s: SurfaceType) -> Option<Spec> {
    match (s.g, s.n, s.p) {
        (1, 0, 1) | (1, 1, 0) => Some(Spec {
            split: 0,
            twists: vec![("T_a", Curve::Petal(1)), ("T_b", Curve::Petal(2)), ("T_d", Curve::Face)],
            relations: vec![
                braid("T_a", "T_b"),
                chain(&["T_a", "T_b"], 6, "T_d"),
                commute("T_a", "T_d"),
                commute("T_b", "T_d"),
                format!("T_d = {}", push_of_boundary(1)),
                "T_a Push(b1) T_a^-1 = Push(b1) Push(a1)".into(),
                "T_b Push(a1) T_b^-1 = Push(a1) Push(b1)^-1".into(),
            ],
        }),
        (2, 1, 0) | (2, 0, 1) => {
            let c = ["T_a1", "T_b1", "T_c", "T_b2", "T_a2"];
            let mut relations = Vec::new();
            for i in 0..5 {
                for j in i + 1..5 {
                    relations.push(if j == i + 1 { braid(c[i], c[j]) } else { commute(c[i], c[j]) });
                }
            }
            relations.push(chain(&c, 6, "T_d"));
            relations.push(format!("T_d = {}", push_of_boundary(2)));
            relations.push("T_a2 Push(b2) T_a2^-1 = Push(b2) Push(a2)".into());
            Some(Spec {
                split: 0,
                twists: vec![
                    ("T_a1", Curve::Petal(1)),
                    ("T_b1", Curve::Petal(2)),
                    ("T_c", Curve::Arc { i: 1, j: 5 }),
                    ("T_b2", Curve::Petal(4)),
                    ("T_a2", Curve::Petal(3)),
                    ("T_d", Curve::Face),
                ],
                relations,
            })
        }
        (1, 1, 1) => Some(Spec {
            split: 2,
            twists: vec![
                ("T_a", Curve::Petal(1)),
                ("T_b", Curve::Petal(2)),
                ("T_a'", Curve::Arc { i: 4, j: 1 }),
            ],
            relations: vec![
                braid("T_a", "T_b"),
                braid("T_a'", "T_b"),
                commute("T_a", "T_a'"),
                "T_a Push(b1) T_a^-1 = Push(a1) Push(b1)".into(),
            ],
        }),
        _ => None,
    }
}

pub fn derived_library(s: SurfaceType) -> Result<GeneratorLibrary> {
    let spec = spec(s).ok_or(Error::UnsupportedSurface(s))?;
    let pres = presentation_for(s)?;
    let ribbon = Ribbon::new(&pres)?;
    let mut generators = Vec::new();
    for (name, curve) in &spec.twists {
        let (gamma, table, kind) = match curve {
            Curve::Petal(x) => {
                let (g, t) = ribbon.petal_twist(*x, spec.split)?;
                (g, t, GeneratorKind::Twist)
            }
            Curve::Arc { i, j } => {
                let (g, t) = ribbon.arc_twist(0, *i, *j, spec.split)?;
                (g, t, GeneratorKind::Twist)
            }
            Curve::Face => {
                let (g, t) = ribbon.arc_twist(0, 0, 0, spec.split)?;
                (g, t, GeneratorKind::BoundaryTwist)
            }
        };
        let curve = (kind == GeneratorKind::Twist).then_some(gamma);
        generators.push(make_generator(&pres, name, kind, strip(table), curve)?);
    }
    for (i, name) in pres.names.iter().enumerate() {
        let t = point_push(&pres, &Word::gen(i as i32 + 1))?;
        generators.push(make_generator(&pres, &format!("Push({name})"), GeneratorKind::Push, strip(t), None)?);
    }
    let mut lib = GeneratorLibrary {
        surface: s,
        presentation: pres,
        split: spec.split,
        generators,
        relations: Vec::new(),
        id: String::new(),
    };
    for r in &spec.relations {
        let (l, rhs) = r.split_once('=').expect("relation has =");
        let lhs = lib.parse_word(l.trim())?;
        let rhs = lib.parse_word(rhs.trim())?;
        lib.relations.push(Relation { lhs, rhs });
    }
    lib.id = library_id(s, &lib.to_text());
    Ok(lib)
}

/// Drop the inverse so loading and deriving take the same path.
fn strip(t: EndomorphismTable) -> EndomorphismTable {
    EndomorphismTable {
        images: t.images,
        inverse: None,
    }
}
