//! Finite groups given by multiplication tables.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hash::sha256_hex;

pub type Elem = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteGroupTable {
    pub name: String,
    pub labels: Vec<String>,
    pub identity: Elem,
    table: Vec<Vec<Elem>>,
    inverses: Vec<Elem>,
}

/// Associativity is checked by brute force only up to this order.
const ASSOC_CHECK_MAX: usize = 128;

impl FiniteGroupTable {
    pub fn new(name: &str, table: Vec<Vec<Elem>>, labels: Option<Vec<String>>) -> Result<Self> {
        let g = Self::build(name, table, labels)?;
        let m = g.order();
        if m <= ASSOC_CHECK_MAX {
            for a in 0..m {
                for b in 0..m {
                    let ab = g.mul(a, b);
                    for c in 0..m {
                        if g.mul(ab, c) != g.mul(a, g.mul(b, c)) {
                            return Err(Error::InvalidGroup(format!("not associative at ({a}, {b}, {c})")));
                        }
                    }
                }
            }
        }
        Ok(g)
    }

    fn build(name: &str, table: Vec<Vec<Elem>>, labels: Option<Vec<String>>) -> Result<Self> {
        let m = table.len();
        if m == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        if table.iter().any(|r| r.len() != m || r.iter().any(|&x| x >= m)) {
            return Err(Error::InvalidGroup("table must be m x m with entries below m".into()));
        }
        let identity = (0..m)
            .find(|&e| (0..m).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::InvalidGroup("no identity".into()))?;
        let inverses = (0..m)
            .map(|x| {
                (0..m)
                    .find(|&y| table[x][y] == identity && table[y][x] == identity)
                    .ok_or_else(|| Error::InvalidGroup(format!("element {x} has no inverse")))
            })
            .collect::<Result<Vec<_>>>()?;
        let labels = labels.unwrap_or_else(|| (0..m).map(|i| i.to_string()).collect());
        if labels.len() != m {
            return Err(Error::InvalidGroup("label count differs from order".into()));
        }
        Ok(FiniteGroupTable {
            name: name.to_string(),
            labels,
            identity,
            table,
            inverses,
        })
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.table[a][b]
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        self.inverses[a]
    }

    pub fn element_order(&self, a: Elem) -> usize {
        let mut k = 1;
        let mut x = a;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn element(&self, label: &str) -> Result<Elem> {
        if let Some(i) = self.labels.iter().position(|l| l == label) {
            return Ok(i);
        }
        match label.parse::<usize>() {
            Ok(i) if i < self.order() => Ok(i),
            _ => Err(Error::InvalidMarking(format!("`{label}` is not an element of {}", self.name))),
        }
    }

    /// Subgroup generated by `gens`, in discovery order.
    pub fn generated(&self, gens: &[Elem]) -> Vec<Elem> {
        let mut seen = vec![false; self.order()];
        let mut out = vec![self.identity];
        seen[self.identity] = true;
        let mut q = VecDeque::from([self.identity]);
        while let Some(x) = q.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                    q.push_back(y);
                }
            }
        }
        out
    }

    pub fn generates(&self, gens: &[Elem]) -> bool {
        self.generated(gens).len() == self.order()
    }

    /// Greedy generating set: repeatedly add the first element outside the span.
    pub fn generating_set(&self) -> Vec<Elem> {
        let mut gens = Vec::new();
        let mut span = self.generated(&gens);
        while span.len() < self.order() {
            let x = (0..self.order()).find(|x| !span.contains(x)).expect("span is proper");
            gens.push(x);
            span = self.generated(&gens);
        }
        gens
    }

    pub fn content_hash(&self) -> String {
        let mut s = format!("{}:", self.order());
        for r in &self.table {
            for x in r {
                s.push_str(&x.to_string());
                s.push(',');
            }
        }
        sha256_hex(s.as_bytes())
    }

    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::build(&format!("Z{n}"), table, None).expect("cyclic group")
    }

    /// `(Z/L)^r`, elements in base-`L` digit order with the first coordinate least significant.
    pub fn elementary_abelian(l: usize, r: usize) -> Self {
        let m = l.pow(r as u32);
        let digits = |mut x: usize| {
            let mut d = vec![0; r];
            for v in d.iter_mut() {
                *v = x % l;
                x /= l;
            }
            d
        };
        let table = (0..m)
            .map(|a| {
                let da = digits(a);
                (0..m)
                    .map(|b| {
                        let db = digits(b);
                        (0..r).rev().fold(0, |acc, i| acc * l + (da[i] + db[i]) % l)
                    })
                    .collect()
            })
            .collect();
        let labels = (0..m)
            .map(|x| digits(x).iter().map(|d| d.to_string()).collect::<Vec<_>>().join(""))
            .collect();
        Self::build(&format!("Z{l}^{r}"), table, Some(labels)).expect("abelian group")
    }

    /// Quaternion group with labels `1 -1 i -i j -j k -k`.
    pub fn quaternion() -> Self {
        // unit u in {1,i,j,k} with sign s: index 2u + s
        let unit_mul = |a: usize, b: usize| -> (usize, bool) {
            match (a, b) {
                (0, x) | (x, 0) => (x, false),
                (x, y) if x == y => (0, true),
                (1, 2) => (3, false),
                (2, 1) => (3, true),
                (2, 3) => (1, false),
                (3, 2) => (1, true),
                (3, 1) => (2, false),
                (1, 3) => (2, true),
                _ => unreachable!(),
            }
        };
        let table = (0..8)
            .map(|a: usize| {
                (0..8)
                    .map(|b: usize| {
                        let (u, neg) = unit_mul(a / 2, b / 2);
                        let sign = (a % 2 == 1) ^ (b % 2 == 1) ^ neg;
                        2 * u + sign as usize
                    })
                    .collect()
            })
            .collect();
        let labels = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"].iter().map(|s| s.to_string()).collect();
        Self::build("Q8", table, Some(labels)).expect("quaternion group")
    }

    /// Dihedral group of order `2n`: `r^a s^b` stored as `2a + b`.
    pub fn dihedral(n: usize) -> Self {
        let table = (0..2 * n)
            .map(|x| {
                (0..2 * n)
                    .map(|y| {
                        let (a, b, c, d) = (x / 2, x % 2, y / 2, y % 2);
                        let rot = if b == 0 { (a + c) % n } else { (a + n - c) % n };
                        2 * rot + (b ^ d)
                    })
                    .collect()
            })
            .collect();
        Self::build(&format!("D{n}"), table, None).expect("dihedral group")
    }

    /// Symmetric group on `k` points; elements are permutations in lexicographic order.
    pub fn symmetric(k: usize) -> Self {
        let out = permutations(k);
        let index = |p: &Vec<usize>| out.iter().position(|q| q == p).expect("permutation");
        let table = out
            .iter()
            .map(|p| {
                out.iter()
                    .map(|q| {
                        // first p, then q
                        let r: Vec<usize> = (0..k).map(|i| q[p[i]]).collect();
                        index(&r)
                    })
                    .collect()
            })
            .collect();
        Self::build(&format!("S{k}"), table, None).expect("symmetric group")
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("group {} order {}\nlabels {}\n", self.name, self.order(), self.labels.join(" "));
        for r in &self.table {
            s.push_str(&r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (ln, header) = lines.next().ok_or_else(|| Error::parse(1, "empty group file"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        let (name, m) = match h.as_slice() {
            ["group", name, "order", m] => (*name, m.parse::<usize>().map_err(|_| Error::parse(ln, "bad order"))?),
            _ => return Err(Error::parse(ln, "expected `group NAME order m`")),
        };
        let mut labels = None;
        let mut table = Vec::new();
        for (ln, l) in lines {
            if let Some(rest) = l.strip_prefix("labels") {
                labels = Some(rest.split_whitespace().map(str::to_string).collect());
                continue;
            }
            let row = l
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|_| Error::parse(ln, format!("bad entry `{t}`"))))
                .collect::<Result<Vec<_>>>()?;
            table.push(row);
        }
        if table.len() != m {
            return Err(Error::parse(0, format!("expected {m} rows, found {}", table.len())));
        }
        Self::new(name, table, labels)
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// All automorphisms, as element maps. Brute force over images of a generating set.
pub fn finite_group_aut(q: &FiniteGroupTable, cap: usize) -> Result<Vec<Vec<Elem>>> {
    let m = q.order();
    if m > cap {
        return Err(Error::CapExceeded { cap, found: m });
    }
    let gens = q.generating_set();
    let orders: Vec<usize> = (0..m).map(|x| q.element_order(x)).collect();
    let choices: Vec<Vec<Elem>> = gens
        .iter()
        .map(|&g| (0..m).filter(|&x| orders[x] == orders[g]).collect())
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; gens.len()];
    'outer: loop {
        let imgs: Vec<Elem> = idx.iter().enumerate().map(|(i, &k)| choices[i][k]).collect();
        if let Some(f) = extend_hom(q, &gens, &imgs) {
            out.push(f);
        }
        for i in (0..idx.len()).rev() {
            idx[i] += 1;
            if idx[i] < choices[i].len() {
                continue 'outer;
            }
            idx[i] = 0;
        }
        break;
    }
    out.sort();
    Ok(out)
}

fn extend_hom(q: &FiniteGroupTable, gens: &[Elem], imgs: &[Elem]) -> Option<Vec<Elem>> {
    let m = q.order();
    let mut f = vec![usize::MAX; m];
    f[q.identity] = q.identity;
    let mut queue = VecDeque::from([q.identity]);
    while let Some(x) = queue.pop_front() {
        for (&g, &h) in gens.iter().zip(imgs) {
            let y = q.mul(x, g);
            let fy = q.mul(f[x], h);
            if f[y] == usize::MAX {
                f[y] = fy;
                queue.push_back(y);
            } else if f[y] != fy {
                return None;
            }
        }
    }
    let mut hit = vec![false; m];
    for &y in &f {
        if y == usize::MAX || hit[y] {
            return None;
        }
        hit[y] = true;
    }
    for a in 0..m {
        for b in 0..m {
            if f[q.mul(a, b)] != q.mul(f[a], f[b]) {
                return None;
            }
        }
    }
    Some(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q8_data_file_matches_builtin() {
        let g = FiniteGroupTable::from_text(include_str!("../data/q8.grp")).unwrap();
        assert_eq!(g, FiniteGroupTable::quaternion());
    }

    #[test]
    fn aut_counts() {
        assert_eq!(finite_group_aut(&FiniteGroupTable::cyclic(2), 16).unwrap().len(), 1);
        assert_eq!(finite_group_aut(&FiniteGroupTable::elementary_abelian(2, 2), 16).unwrap().len(), 6);
        assert_eq!(finite_group_aut(&FiniteGroupTable::quaternion(), 16).unwrap().len(), 24);
        assert_eq!(finite_group_aut(&FiniteGroupTable::symmetric(3), 16).unwrap().len(), 6);
        assert_eq!(finite_group_aut(&FiniteGroupTable::dihedral(4), 16).unwrap().len(), 8);
        assert!(finite_group_aut(&FiniteGroupTable::symmetric(4), 16).is_err());
    }

    #[test]
    fn quaternion_relations() {
        let q = FiniteGroupTable::quaternion();
        let (i, j, k, m1) = (q.element("i").unwrap(), q.element("j").unwrap(), q.element("k").unwrap(), q.element("-1").unwrap());
        assert_eq!(q.mul(i, j), k);
        assert_eq!(q.mul(i, i), m1);
        assert_eq!(q.mul(q.mul(i, j), q.mul(q.inv(i), q.inv(j))), m1);
        assert!(q.generates(&[i, j]));
        assert!(FiniteGroupTable::new("Q8", q.table.clone(), None).is_ok());
    }

    #[test]
    fn text_round_trip() {
        let q = FiniteGroupTable::quaternion();
        let back = FiniteGroupTable::from_text(&q.to_text()).unwrap();
        assert_eq!(back, q);
        assert!(FiniteGroupTable::from_text("group X order 2\n0 1\n1 1\n").is_err());
    }

    #[test]
    fn non_associative_rejected() {
        // a Latin square with identity 0 that is not a group
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(FiniteGroupTable::new("L5", t, None).is_err());
    }

    #[test]
    fn group_axioms_builtin() {
        for g in [
            FiniteGroupTable::elementary_abelian(3, 2),
            FiniteGroupTable::dihedral(5),
            FiniteGroupTable::symmetric(4),
        ] {
            assert!(FiniteGroupTable::new(&g.name, g.table.clone(), None).is_ok(), "{}", g.name);
        }
    }
}
