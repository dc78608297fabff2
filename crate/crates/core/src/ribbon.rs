//! One-vertex ribbon graph of the standard presentation.
//!
//! Half-edge `+x` is the start of petal `x`, `-x` its end. A letter `l` leaves
//! the vertex through `l` and returns through `-l`, so a face cycle
//! `l1 l2 ... lk` satisfies `next(-l_i) = l_{i+1}` in the cyclic order.

use std::collections::{HashMap, HashSet};

use crate::endo::EndomorphismTable;
use crate::error::{Error, Result};
use crate::linalg::IntMatrix;
use crate::surface::SurfaceGroupPresentation;
use crate::word::{Letter, Word};

#[derive(Clone, Debug)]
pub struct Ribbon {
    pub rank: usize,
    /// Cyclic order of half-edges at the vertex, starting at `+1`.
    pub rotation: Vec<Letter>,
    pub faces: Vec<Word>,
    index: HashMap<Letter, usize>,
}

/// Cyclic order from face cycles; `None` if they do not close up into one vertex.
pub fn rotation_from_faces(rank: usize, faces: &[Word]) -> Option<Vec<Letter>> {
    let mut next = HashMap::new();
    for c in faces {
        let l = c.letters();
        for k in 0..l.len() {
            if next.insert(-l[k], l[(k + 1) % l.len()]).is_some() {
                return None;
            }
        }
    }
    if next.len() != 2 * rank {
        return None;
    }
    let mut rot = vec![1];
    let mut h = *next.get(&1)?;
    while h != 1 {
        rot.push(h);
        h = *next.get(&h)?;
        if rot.len() > 2 * rank {
            return None;
        }
    }
    (rot.len() == 2 * rank).then_some(rot)
}

/// Algebraic intersection of petals read from the interleaving of their ends.
///
/// Half-edges are `±(e+1)` for edge `e`; entry `(e, f)` is `+1` for the cyclic
/// pattern `e+ f- e- f+` and `-1` for `e+ f+ e- f-`.
pub fn interleaving_form(rotation: &[Letter], edges: usize) -> IntMatrix {
    let len = rotation.len();
    let mut pos = vec![[0usize; 2]; edges];
    for (i, &h) in rotation.iter().enumerate() {
        let e = h.unsigned_abs() as usize - 1;
        pos[e][(h < 0) as usize] = i;
    }
    let mut j = IntMatrix::zeros(edges, edges);
    for e in 0..edges {
        let s = pos[e][0];
        let rel = |p: usize| (p + len - s) % len;
        let em = rel(pos[e][1]);
        for f in 0..edges {
            if f == e {
                continue;
            }
            let (fp, fm) = (rel(pos[f][0]), rel(pos[f][1]));
            j[(e, f)] = match (fm < em, fp < em) {
                (true, false) => 1,
                (false, true) => -1,
                _ => 0,
            };
        }
    }
    j
}

impl Ribbon {
    pub fn new(pres: &SurfaceGroupPresentation) -> Result<Self> {
        let faces = pres.face_cycles();
        let rotation = rotation_from_faces(pres.rank(), &faces)
            .ok_or_else(|| Error::Internal("face cycles do not form a one-vertex ribbon graph".into()))?;
        let index = rotation.iter().enumerate().map(|(i, &h)| (h, i)).collect();
        Ok(Ribbon {
            rank: pres.rank(),
            rotation,
            faces,
            index,
        })
    }

    pub fn intersection_form(&self) -> IntMatrix {
        interleaving_form(&self.rotation, self.rank)
    }

    fn slots(&self) -> usize {
        2 * self.rotation.len()
    }

    fn half_edge_slot(&self, h: Letter) -> usize {
        2 * self.index[&h] + 1
    }

    fn wedge_slot(&self, h: Letter) -> usize {
        2 * self.index[&h]
    }

    /// Slots strictly between `from` and `to`, going forward.
    fn between(&self, from: usize, to: usize) -> HashSet<usize> {
        let n = self.slots();
        let mut out = HashSet::new();
        let mut s = (from + 1) % n;
        while s != to {
            out.insert(s);
            s = (s + 1) % n;
        }
        out
    }

    fn half_edges_in(&self, slots: &HashSet<usize>) -> HashSet<Letter> {
        slots.iter().filter(|s| *s % 2 == 1).map(|s| self.rotation[s / 2]).collect()
    }

    /// Wedge used to split the vertex: before the `k`-th letter of the first face.
    pub fn split_wedge(&self, k: usize) -> usize {
        let w = &self.faces[0];
        self.wedge_slot(w.letters()[k % w.len()])
    }

    fn pushoff(&self, side: &HashSet<Letter>, sigma: i32, gamma: &Word, fixed: Option<usize>) -> Vec<Word> {
        let g = if sigma > 0 { gamma.clone() } else { gamma.inverse() };
        (1..=self.rank as Letter)
            .map(|x| {
                let mut w = Word::gen(x);
                if fixed == Some(x as usize) {
                    return w;
                }
                if side.contains(&x) {
                    w = g.mul(&w);
                }
                if side.contains(&-x) {
                    w = w.mul(&g.inverse());
                }
                w
            })
            .collect()
    }

    fn twist_on_side(&self, side: &HashSet<Letter>, sigma: i32, gamma: &Word, fixed: Option<usize>) -> Result<EndomorphismTable> {
        EndomorphismTable::with_inverse(
            self.pushoff(side, sigma, gamma, fixed),
            self.pushoff(side, -sigma, gamma, fixed),
        )
    }

    /// Twist about petal `x` (1-based), pushed off to the side away from the split wedge.
    pub fn petal_twist(&self, x: usize, split: usize) -> Result<(Word, EndomorphismTable)> {
        if x == 0 || x > self.rank {
            return Err(Error::GeneratorOutOfRange { index: x, rank: self.rank });
        }
        let h = x as Letter;
        let (s, e) = (self.half_edge_slot(h), self.half_edge_slot(-h));
        let inner = self.between(s, e);
        let w = self.split_wedge(split);
        let s1 = self.half_edges_in(&inner);
        let gamma = Word::gen(h);
        let table = if inner.contains(&w) {
            let all: HashSet<Letter> = self.rotation.iter().copied().collect();
            let s2: HashSet<Letter> = all.difference(&s1).copied().filter(|l| l.unsigned_abs() as usize != x).collect();
            self.twist_on_side(&s2, 1, &gamma, Some(x))?
        } else {
            self.twist_on_side(&s1, -1, &gamma, Some(x))?
        };
        Ok((gamma, table))
    }

    /// Twist about the arc in face `face` from corner `i` to corner `j`.
    ///
    /// Corner `k` sits between letters `k` and `k+1` (1-based, cyclic), so the
    /// loop reads letters `i+1 ..= j`. With `i == j` the loop is the whole face.
    pub fn arc_twist(&self, face: usize, i: usize, j: usize, split: usize) -> Result<(Word, EndomorphismTable)> {
        let cyc = self
            .faces
            .get(face)
            .ok_or_else(|| Error::InvalidInput(format!("no face {face}")))?
            .letters();
        let len = cyc.len();
        let letter = |q: usize| cyc[(q + len - 1) % len];
        let end = if j > i { j } else { j + len };
        let gamma = Word::new((i + 1..=end).map(letter));
        if i % len == j % len {
            let all: HashSet<Letter> = self.rotation.iter().copied().collect();
            return Ok((gamma.clone(), self.twist_on_side(&all, -1, &gamma, None)?));
        }
        let ws = self.wedge_slot(letter(i + 1));
        let we = self.wedge_slot(letter(j + 1));
        let w = self.split_wedge(split);
        if w == ws || w == we {
            return Err(Error::InvalidInput("arc ends at the split wedge".into()));
        }
        let inner = self.between(ws, we);
        let s1 = self.half_edges_in(&inner);
        let table = if inner.contains(&w) {
            let all: HashSet<Letter> = self.rotation.iter().copied().collect();
            let s2: HashSet<Letter> = all.difference(&s1).copied().collect();
            self.twist_on_side(&s2, 1, &gamma, None)?
        } else {
            self.twist_on_side(&s1, -1, &gamma, None)?
        };
        Ok((gamma, table))
    }
}
