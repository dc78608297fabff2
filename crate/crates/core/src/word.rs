//! Reduced words in a free group on generators `1..=rank`.
//!
//! A letter is a signed 1-based index; `-i` is the inverse of generator `i`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Letter = i32;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut w = Word(Vec::new());
        for l in letters {
            w.push(l);
        }
        w
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn gen(i: Letter) -> Self {
        assert!(i != 0, "letter 0 is not a generator");
        Word(vec![i])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Append one letter, cancelling against the tail.
    pub fn push(&mut self, l: Letter) {
        debug_assert!(l != 0);
        if self.0.last() == Some(&-l) {
            self.0.pop();
        } else {
            self.0.push(l);
        }
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|&l| -l).collect())
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut w = self.clone();
        w.extend(other);
        w
    }

    pub fn extend(&mut self, other: &Word) {
        for &l in &other.0 {
            self.push(l);
        }
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut w = Word::empty();
        for _ in 0..k.unsigned_abs() {
            w.extend(&base);
        }
        w
    }

    /// `self * other * self^-1`
    pub fn conjugate(&self, other: &Word) -> Word {
        self.mul(other).mul(&self.inverse())
    }

    pub fn max_index(&self) -> usize {
        self.0.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0)
    }

    pub fn check_rank(&self, rank: usize) -> Result<()> {
        match self.max_index() {
            m if m > rank => Err(Error::GeneratorOutOfRange { index: m, rank }),
            _ => Ok(()),
        }
    }

    /// Exponent sum of each generator.
    pub fn exponent_sums(&self, rank: usize) -> Vec<i64> {
        let mut v = vec![0i64; rank];
        for &l in &self.0 {
            v[l.unsigned_abs() as usize - 1] += l.signum() as i64;
        }
        v
    }

    /// Split as `p * core * p^-1` with `core` cyclically reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let s = &self.0;
        let mut i = 0;
        while 2 * i + 1 < s.len() && s[i] == -s[s.len() - 1 - i] {
            i += 1;
        }
        (Word(s[..i].to_vec()), Word(s[i..s.len() - i].to_vec()))
    }

    /// If `other = s^-1 * self * s` for cyclically reduced words, return `s`.
    fn rotation_to(&self, other: &Word) -> Option<Word> {
        let n = self.len();
        if n != other.len() {
            return None;
        }
        if n == 0 {
            return Some(Word::empty());
        }
        (0..n)
            .find(|&k| (0..n).all(|i| self.0[(i + k) % n] == other.0[i]))
            .map(|k| Word::new(self.0[..k].iter().copied()))
    }

    /// A word `c` with `other = c * self * c^-1`, if the two are conjugate.
    pub fn conjugator_to(&self, other: &Word) -> Option<Word> {
        let (p, u) = self.cyclic_reduce();
        let (q, v) = other.cyclic_reduce();
        let s = u.rotation_to(&v)?;
        Some(q.mul(&s.inverse()).mul(&p.inverse()))
    }

    pub fn parse(text: &str, names: &[String]) -> Result<Word> {
        let mut w = Word::empty();
        for tok in text.split(|c: char| c.is_whitespace() || c == '*' || c == '.') {
            if tok.is_empty() || tok == "1" {
                continue;
            }
            w.push(parse_letter(tok, names)?);
        }
        Ok(w)
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> WordDisplay<'a> {
        WordDisplay { word: self, names }
    }

    pub fn format(&self, names: &[String]) -> String {
        self.display(names).to_string()
    }
}

fn parse_letter(tok: &str, names: &[String]) -> Result<Letter> {
    let (base, inv) = match tok.strip_suffix("^-1") {
        Some(b) => (b, true),
        None => (tok, false),
    };
    if let Some(i) = names.iter().position(|n| n == base) {
        let l = (i + 1) as Letter;
        return Ok(if inv { -l } else { l });
    }
    let lower = lowercase_first(base);
    if lower != base {
        if let Some(i) = names.iter().position(|n| *n == lower) {
            let l = -((i + 1) as Letter);
            return Ok(if inv { -l } else { l });
        }
    }
    Err(Error::parse(0, format!("unknown letter `{tok}`")))
}

fn lowercase_first(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_lowercase().chain(c).collect(),
        None => String::new(),
    }
}

fn uppercase_first(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    names: &'a [String],
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return f.write_str("1");
        }
        for (k, &l) in self.word.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            let name = &self.names[l.unsigned_abs() as usize - 1];
            if l > 0 {
                f.write_str(name)?;
            } else {
                f.write_str(&uppercase_first(name))?;
            }
        }
        Ok(())
    }
}

/// Freely reduce an arbitrary letter sequence.
pub fn free_reduce(letters: &[Letter]) -> Word {
    Word::new(letters.iter().copied())
}

/// `[u, v] = u v u^-1 v^-1`
pub fn commutator(u: &Word, v: &Word) -> Word {
    u.mul(v).mul(&u.inverse()).mul(&v.inverse())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn names() -> Vec<String> {
        ["a1", "b1", "z1"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(free_reduce(&[1, -1, 2]), Word::gen(2));
        assert_eq!(free_reduce(&[]), Word::empty());
        assert_eq!(free_reduce(&[1, 2, -2, -1]), Word::empty());
    }

    #[test]
    fn parse_and_print() {
        let n = names();
        let w = Word::parse("a1 b1 A1 B1", &n).unwrap();
        assert_eq!(w.letters(), &[1, 2, -1, -2]);
        assert_eq!(w.format(&n), "a1 b1 A1 B1");
        assert_eq!(Word::parse("a1^-1 z1", &n).unwrap().letters(), &[-1, 3]);
        assert_eq!(Word::empty().format(&n), "1");
        assert!(Word::parse("q", &n).is_err());
    }

    #[test]
    fn conjugator_examples() {
        let u = Word::new([1, 2, -1, -2]);
        let c = Word::new([2, 2, 1]);
        let v = c.conjugate(&u);
        let found = u.conjugator_to(&v).unwrap();
        assert_eq!(found.conjugate(&u), v);
        assert!(u.conjugator_to(&Word::new([1, 2])).is_none());
    }

    fn arb_letters() -> impl Strategy<Value = Vec<Letter>> {
        prop::collection::vec(prop_oneof![1i32..=3, -3i32..=-1], 0..40)
    }

    proptest! {
        #[test]
        fn reduce_idempotent(ls in arb_letters()) {
            let w = free_reduce(&ls);
            prop_assert!(w.len() <= ls.len());
            prop_assert_eq!(free_reduce(w.letters()), w.clone());
            for p in w.letters().windows(2) {
                prop_assert!(p[0] != -p[1]);
            }
        }

        #[test]
        fn conjugates_detected(a in arb_letters(), c in arb_letters()) {
            let u = free_reduce(&a);
            let c = free_reduce(&c);
            let v = c.conjugate(&u);
            let d = u.conjugator_to(&v).expect("conjugate");
            prop_assert_eq!(d.conjugate(&u), v);
        }

        #[test]
        fn inverse_cancels(a in arb_letters()) {
            let u = free_reduce(&a);
            prop_assert!(u.mul(&u.inverse()).is_empty());
        }
    }
}
