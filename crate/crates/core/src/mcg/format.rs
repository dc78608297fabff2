use super::{library_id, make_generator, presentation_for, GeneratorKind, GeneratorLibrary, Relation};
use crate::endo::EndomorphismTable;
use crate::error::{Error, Result};
use crate::surface::SurfaceType;
use crate::word::Word;

pub(super) fn save(lib: &GeneratorLibrary) -> String {
    let s = lib.surface;
    let names = &lib.presentation.names;
    let mut out = format!("surface {} {} {}\nsplit {}\n", s.g, s.n, s.p, lib.split);
    for g in &lib.generators {
        out.push_str(&format!("gen {} {}\n", g.name, g.kind));
        if let Some(c) = &g.curve {
            out.push_str(&format!("curve {}\n", c.format(names)));
        }
        out.push_str(&g.table.format(names));
    }
    for r in &lib.relations {
        out.push_str(&format!("relation {} = {}\n", lib.format_word(&r.lhs), lib.format_word(&r.rhs)));
    }
    out
}

struct Block {
    line: usize,
    name: String,
    kind: GeneratorKind,
    curve: Option<Word>,
    images: Vec<Option<Word>>,
}

pub(super) fn load(text: &str) -> Result<GeneratorLibrary> {
    let mut surface: Option<SurfaceType> = None;
    let mut pres = None;
    let mut split = 0usize;
    let mut blocks: Vec<Block> = Vec::new();
    let mut relations: Vec<(usize, String, String)> = Vec::new();

    for (k, raw) in text.lines().enumerate() {
        let ln = k + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match head {
            "surface" => {
                let s: SurfaceType = rest.parse().map_err(|_| Error::parse(ln, "bad surface line"))?;
                pres = Some(presentation_for(s)?);
                surface = Some(s);
            }
            "split" => {
                split = rest.parse().map_err(|_| Error::parse(ln, "bad split line"))?;
            }
            "gen" => {
                let p = pres.as_ref().ok_or_else(|| Error::parse(ln, "gen before surface"))?;
                let mut parts = rest.split_whitespace();
                let (Some(name), Some(kind), None) = (parts.next(), parts.next(), parts.next()) else {
                    return Err(Error::parse(ln, "expected `gen NAME KIND`"));
                };
                if blocks.iter().any(|b| b.name == name) {
                    return Err(Error::parse(ln, format!("duplicate generator `{name}`")));
                }
                blocks.push(Block {
                    line: ln,
                    name: name.to_string(),
                    kind: kind.parse().map_err(|_| Error::parse(ln, format!("unknown kind `{kind}`")))?,
                    curve: None,
                    images: vec![None; p.rank()],
                });
            }
            "curve" => {
                let p = pres.as_ref().ok_or_else(|| Error::parse(ln, "curve before surface"))?;
                let b = blocks.last_mut().ok_or_else(|| Error::parse(ln, "curve outside gen block"))?;
                b.curve = Some(Word::parse(rest, &p.names).map_err(|e| Error::parse(ln, e.to_string()))?);
            }
            "relation" => {
                let (l, r) = rest.split_once('=').ok_or_else(|| Error::parse(ln, "relation needs `=`"))?;
                relations.push((ln, l.trim().to_string(), r.trim().to_string()));
            }
            _ => {
                let p = pres.as_ref().ok_or_else(|| Error::parse(ln, "table line before surface"))?;
                let (x, img) = line.split_once("->").ok_or_else(|| Error::parse(ln, format!("unrecognised line `{line}`")))?;
                let i = p
                    .names
                    .iter()
                    .position(|n| n == x.trim())
                    .ok_or_else(|| Error::parse(ln, format!("unknown generator `{}`", x.trim())))?;
                let b = blocks.last_mut().ok_or_else(|| Error::parse(ln, "table line outside gen block"))?;
                if b.images[i].is_some() {
                    return Err(Error::parse(ln, format!("second image for `{}`", x.trim())));
                }
                b.images[i] = Some(Word::parse(img, &p.names).map_err(|e| Error::parse(ln, e.to_string()))?);
            }
        }
    }

    let surface = surface.ok_or_else(|| Error::parse(1, "missing surface line"))?;
    let pres = pres.expect("set with surface");
    let mut generators = Vec::new();
    for b in blocks {
        let images: Vec<Word> = b
            .images
            .into_iter()
            .enumerate()
            .map(|(i, w)| w.ok_or_else(|| Error::parse(b.line, format!("`{}` has no image for {}", b.name, pres.names[i]))))
            .collect::<Result<_>>()?;
        let table = EndomorphismTable::from_images(images)?;
        generators.push(make_generator(&pres, &b.name, b.kind, table, b.curve)?);
    }
    let mut lib = GeneratorLibrary {
        surface,
        presentation: pres,
        split,
        generators,
        relations: Vec::new(),
        id: String::new(),
    };
    for (ln, l, r) in relations {
        let lhs = lib.parse_word(&l).map_err(|e| Error::parse(ln, e.to_string()))?;
        let rhs = lib.parse_word(&r).map_err(|e| Error::parse(ln, e.to_string()))?;
        lib.relations.push(Relation { lhs, rhs });
    }
    lib.id = library_id(surface, &save(&lib));
    Ok(lib)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_errors_carry_lines() {
        let bad = "surface 1 0 1\ngen T_a twist\ncurve a1\na1 -> a1\nq1 -> b1\n";
        match load(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
        assert!(load("gen T twist\n").is_err());
        assert!(load("surface 1 0 1\ngen T_a twist\na1 -> a1\nb1 -> b1 a1\n").is_err());
    }

    #[test]
    fn minimal_library() {
        let text = "surface 1 0 1\nsplit 0\ngen T_a twist\ncurve a1\na1 -> a1\nb1 -> b1 a1\nrelation T_a^2 = T_a^2\n";
        let lib = load(text).unwrap();
        assert_eq!(save(&lib), text);
        assert!(lib.id.starts_with("lib-1-0-1-"));
    }
}
