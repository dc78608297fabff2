//! Fixed vectors, coinvariants, orbit finiteness and candidate vectors for orbit searches.

use std::fmt;

use indexmap::IndexSet;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{big_vec_to_i64, nullspace, primitive, rref, to_big, to_rational, IntMatrix};

pub const DEFAULT_ORBIT_CAP: usize = 1_000_000;

fn check_dims(dim: usize, matrices: &[IntMatrix]) -> Result<()> {
    for m in matrices {
        if m.rows() != dim || m.cols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {dim}x{dim}, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
    }
    Ok(())
}

/// Primitive integer basis of the rational span of `vectors`, in reduced echelon order.
pub fn span_basis(dim: usize, vectors: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    if vectors.is_empty() {
        return Ok(Vec::new());
    }
    let m = IntMatrix::from_rows(vectors)?;
    if m.cols() != dim {
        return Err(Error::DimensionMismatch("span vectors".into()));
    }
    let (r, _) = rref(to_rational(&to_big(&m)));
    r.iter().map(|row| big_vec_to_i64(&primitive(row))).collect()
}

/// Basis of the common fixed space `∩ ker(M − I)`.
pub fn fixed_subspace(dim: usize, matrices: &[IntMatrix]) -> Result<Vec<Vec<i64>>> {
    check_dims(dim, matrices)?;
    if dim == 0 {
        return Ok(Vec::new());
    }
    if matrices.is_empty() {
        return Ok(IntMatrix::identity(dim).to_rows());
    }
    let diffs = matrices.iter().map(|m| m.minus_identity()).collect::<Result<Vec<_>>>()?;
    nullspace(&IntMatrix::vstack(&diffs, dim)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coinvariants {
    pub by_duality: usize,
    pub by_saturation: usize,
}

/// Dimension of the coinvariants, once through fixed vectors of the transposes and once
/// by saturating `Σ (M_i − I) V` under the group.
pub fn coinvariants_both(dim: usize, matrices: &[IntMatrix]) -> Result<Coinvariants> {
    check_dims(dim, matrices)?;
    for m in matrices {
        if m.determinant()? == 0.into() {
            return Err(Error::InvalidInput("coinvariants need invertible matrices".into()));
        }
    }
    let transposes: Vec<IntMatrix> = matrices.iter().map(|m| m.transpose()).collect();
    let by_duality = fixed_subspace(dim, &transposes)?.len();

    let mut w: Vec<Vec<i64>> = Vec::new();
    for m in matrices {
        w.extend(m.minus_identity()?.columns());
    }
    let mut basis = span_basis(dim, &w)?;
    loop {
        let mut grown = basis.clone();
        for m in matrices {
            for v in &basis {
                grown.push(m.mul_vec(v)?);
            }
        }
        let next = span_basis(dim, &grown)?;
        if next.len() == basis.len() {
            break;
        }
        basis = next;
    }
    Ok(Coinvariants {
        by_duality,
        by_saturation: dim - basis.len(),
    })
}

pub fn coinvariants_dimension(dim: usize, matrices: &[IntMatrix]) -> Result<usize> {
    let c = coinvariants_both(dim, matrices)?;
    if c.by_duality != c.by_saturation {
        return Err(Error::Internal(format!(
            "coinvariant methods disagree: duality {} vs saturation {}",
            c.by_duality, c.by_saturation
        )));
    }
    Ok(c.by_duality)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitStatus {
    Finite,
    CapExceeded,
}

impl fmt::Display for OrbitStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrbitStatus::Finite => "finite",
            OrbitStatus::CapExceeded => "cap-exceeded",
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitResult {
    pub status: OrbitStatus,
    pub size: Option<usize>,
    pub cap: usize,
    pub witness: Vec<i64>,
    /// Set when the search stopped on i64 overflow rather than on the cap.
    pub overflow: bool,
    #[serde(skip)]
    pub orbit: Vec<Vec<i64>>,
}

impl OrbitResult {
    pub fn is_finite(&self) -> bool {
        self.status == OrbitStatus::Finite
    }

    /// Sum of the orbit; fixed by every generator when the orbit is finite.
    pub fn barycenter(&self) -> Option<Vec<i64>> {
        if !self.is_finite() {
            return None;
        }
        let n = self.witness.len();
        let mut out = vec![0i64; n];
        for u in &self.orbit {
            for k in 0..n {
                out[k] = out[k].checked_add(u[k])?;
            }
        }
        Some(out)
    }
}

/// Breadth-first closure of `{v}` under the matrices and their integral inverses.
pub fn orbit_search(matrices: &[IntMatrix], v: &[i64], cap: usize) -> Result<OrbitResult> {
    let dim = v.len();
    check_dims(dim, matrices)?;
    if v.iter().all(|&x| x == 0) {
        return Err(Error::InvalidInput("orbit search needs a nonzero vector".into()));
    }
    let witness = {
        let q: Vec<BigRational> = v.iter().map(|&x| BigRational::from_integer(x.into())).collect();
        big_vec_to_i64(&primitive(&q))?
    };
    let mut maps: Vec<IntMatrix> = matrices.to_vec();
    for m in matrices {
        if let Ok(inv) = m.inverse() {
            if !maps.contains(&inv) {
                maps.push(inv);
            }
        }
    }
    let mut seen: IndexSet<Vec<i64>> = IndexSet::new();
    seen.insert(v.to_vec());
    let mut frontier = 0usize;
    let done = |seen: IndexSet<Vec<i64>>, status, overflow| {
        let finite = status == OrbitStatus::Finite;
        Ok(OrbitResult {
            status,
            size: finite.then_some(seen.len()),
            cap,
            witness: witness.clone(),
            overflow,
            orbit: if finite { seen.into_iter().collect() } else { Vec::new() },
        })
    };
    while frontier < seen.len() {
        let level: Vec<Vec<i64>> = seen.get_range(frontier..).expect("in range").iter().cloned().collect();
        frontier = seen.len();
        let images: Result<Vec<Vec<Vec<i64>>>> = level
            .par_iter()
            .map(|u| maps.iter().map(|m| m.mul_vec(u)).collect())
            .collect();
        let Ok(images) = images else {
            return done(seen, OrbitStatus::CapExceeded, true);
        };
        for u in images.into_iter().flatten() {
            seen.insert(u);
            if seen.len() > cap {
                return done(seen, OrbitStatus::CapExceeded, false);
            }
        }
    }
    done(seen, OrbitStatus::Finite, false)
}

/// How candidate starting vectors are produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateStrategy {
    /// Columns of `M − I` for each generator.
    Image,
    /// Fixed vectors of random short words that turn out to have finite order.
    FiniteOrder,
    /// Coordinate vectors and `e_i ± e_j`.
    Short,
}

impl std::str::FromStr for CandidateStrategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "image" => Ok(CandidateStrategy::Image),
            "finite-order" => Ok(CandidateStrategy::FiniteOrder),
            "short" => Ok(CandidateStrategy::Short),
            _ => Err(Error::InvalidInput(format!("unknown candidate strategy `{s}`"))),
        }
    }
}

impl fmt::Display for CandidateStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CandidateStrategy::Image => "image",
            CandidateStrategy::FiniteOrder => "finite-order",
            CandidateStrategy::Short => "short",
        })
    }
}

pub const DEFAULT_STRATEGIES: [CandidateStrategy; 3] =
    [CandidateStrategy::Image, CandidateStrategy::FiniteOrder, CandidateStrategy::Short];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub vector: Vec<i64>,
    pub source: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CandidateConfig {
    pub strategies: Vec<CandidateStrategy>,
    pub seed: u64,
    pub random_words: usize,
    pub max_word_len: usize,
    pub max_order: usize,
}

impl Default for CandidateConfig {
    fn default() -> Self {
        CandidateConfig {
            strategies: DEFAULT_STRATEGIES.to_vec(),
            seed: 0,
            random_words: 64,
            max_word_len: 4,
            max_order: 12,
        }
    }
}

fn finite_order(m: &IntMatrix, max: usize) -> Option<usize> {
    let mut p = m.clone();
    for k in 1..=max {
        if p.is_identity() {
            return Some(k);
        }
        p = p.mul(m).ok()?;
    }
    None
}

/// Primitive, deduplicated, nonzero candidates in strategy order.
pub fn candidate_vectors(dim: usize, matrices: &[IntMatrix], cfg: &CandidateConfig) -> Result<Vec<Candidate>> {
    check_dims(dim, matrices)?;
    let mut seen: IndexSet<Vec<i64>> = IndexSet::new();
    let mut out = Vec::new();
    let mut push = |v: Vec<i64>, source: String, out: &mut Vec<Candidate>| -> Result<()> {
        if v.iter().all(|&x| x == 0) {
            return Ok(());
        }
        let q: Vec<BigRational> = v.iter().map(|&x| BigRational::from_integer(x.into())).collect();
        let p = big_vec_to_i64(&primitive(&q))?;
        if seen.insert(p.clone()) {
            out.push(Candidate { vector: p, source });
        }
        Ok(())
    };
    for s in &cfg.strategies {
        match s {
            CandidateStrategy::Image => {
                for (i, m) in matrices.iter().enumerate() {
                    for (j, c) in m.minus_identity()?.columns().into_iter().enumerate() {
                        push(c, format!("image:{i}:{j}"), &mut out)?;
                    }
                }
            }
            CandidateStrategy::FiniteOrder => {
                if matrices.is_empty() {
                    continue;
                }
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                let inverses: Vec<Option<IntMatrix>> = matrices.iter().map(|m| m.inverse().ok()).collect();
                for t in 0..cfg.random_words {
                    let len = rng.gen_range(1..=cfg.max_word_len.max(1));
                    let mut w = IntMatrix::identity(dim);
                    let mut label = Vec::new();
                    for _ in 0..len {
                        let g = rng.gen_range(0..matrices.len());
                        let step = match (&inverses[g], rng.gen_bool(0.5)) {
                            (Some(inv), true) => {
                                label.push(format!("{g}^-1"));
                                inv
                            }
                            _ => {
                                label.push(g.to_string());
                                &matrices[g]
                            }
                        };
                        w = match w.mul(step) {
                            Ok(x) => x,
                            Err(_) => break,
                        };
                    }
                    if w.is_identity() {
                        continue;
                    }
                    if let Some(k) = finite_order(&w, cfg.max_order) {
                        for v in fixed_subspace(dim, &[w])? {
                            push(v, format!("finite-order:{t}:[{}]:order{k}", label.join(" ")), &mut out)?;
                        }
                    }
                }
            }
            CandidateStrategy::Short => {
                for i in 0..dim {
                    let mut e = vec![0; dim];
                    e[i] = 1;
                    push(e, format!("short:e{i}"), &mut out)?;
                }
                for i in 0..dim {
                    for j in i + 1..dim {
                        for sign in [1, -1] {
                            let mut e = vec![0; dim];
                            e[i] = 1;
                            e[j] = sign;
                            push(e, format!("short:e{i}{}e{j}", if sign > 0 { "+" } else { "-" }), &mut out)?;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiniteOrbitSearch {
    pub tried: usize,
    pub found: Option<(Candidate, OrbitResult)>,
}

/// First candidate whose orbit closes within `cap`.
pub fn find_finite_orbit(matrices: &[IntMatrix], candidates: &[Candidate], cap: usize) -> Result<FiniteOrbitSearch> {
    for (k, c) in candidates.iter().enumerate() {
        let r = orbit_search(matrices, &c.vector, cap)?;
        if r.is_finite() {
            return Ok(FiniteOrbitSearch {
                tried: k + 1,
                found: Some((c.clone(), r)),
            });
        }
    }
    Ok(FiniteOrbitSearch {
        tried: candidates.len(),
        found: None,
    })
}

/// Seeded invertible integer matrices: signed permutations and short products of elementary moves.
pub fn random_matrix_group(seed: u64, dim: usize, count: usize) -> Vec<IntMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut m = IntMatrix::identity(dim);
            if dim == 0 {
                return m;
            }
            match rng.gen_range(0..3) {
                0 => {
                    let mut perm: Vec<usize> = (0..dim).collect();
                    for i in (1..dim).rev() {
                        perm.swap(i, rng.gen_range(0..=i));
                    }
                    let mut p = IntMatrix::zeros(dim, dim);
                    for (i, &j) in perm.iter().enumerate() {
                        p[(i, j)] = if rng.gen_bool(0.2) { -1 } else { 1 };
                    }
                    p
                }
                1 => m,
                _ => {
                    for _ in 0..rng.gen_range(1..=dim) {
                        let (i, j) = (rng.gen_range(0..dim), rng.gen_range(0..dim));
                        if i == j {
                            continue;
                        }
                        let c = if rng.gen_bool(0.5) { 1 } else { -1 };
                        let mut e = IntMatrix::identity(dim);
                        e[(i, j)] = c;
                        m = m.mul(&e).expect("small entries");
                    }
                    m
                }
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn swap(dim: usize, i: usize, j: usize) -> IntMatrix {
        let mut m = IntMatrix::identity(dim);
        m[(i, i)] = 0;
        m[(j, j)] = 0;
        m[(i, j)] = 1;
        m[(j, i)] = 1;
        m
    }

    #[test]
    fn fixed_spaces() {
        assert_eq!(fixed_subspace(6, &[IntMatrix::identity(6)]).unwrap().len(), 6);
        let f = fixed_subspace(3, &[swap(3, 0, 1)]).unwrap();
        assert_eq!(f.len(), 2);
        assert!(f.contains(&vec![1, 1, 0]) && f.contains(&vec![0, 0, 1]));
        assert!(fixed_subspace(0, &[]).unwrap().is_empty());
        assert!(fixed_subspace(3, &[IntMatrix::identity(2)]).is_err());
    }

    #[test]
    fn coinvariant_examples() {
        assert_eq!(coinvariants_dimension(3, &[IntMatrix::identity(3)]).unwrap(), 3);
        assert_eq!(coinvariants_dimension(2, &[swap(2, 0, 1)]).unwrap(), 1);
        let t = IntMatrix::from_rows(&[vec![1, 1], vec![0, 1]]).unwrap();
        assert_eq!(coinvariants_dimension(2, &[t]).unwrap(), 1);
    }

    #[test]
    fn orbits() {
        let r = orbit_search(&[IntMatrix::identity(3)], &[0, 2, 0], 10).unwrap();
        assert_eq!((r.status, r.size), (OrbitStatus::Finite, Some(1)));
        assert_eq!(r.witness, vec![0, 1, 0]);
        let t = IntMatrix::from_rows(&[vec![1, 1], vec![0, 1]]).unwrap();
        for cap in [2, 5, 100] {
            assert_eq!(orbit_search(std::slice::from_ref(&t), &[0, 1], cap).unwrap().status, OrbitStatus::CapExceeded);
        }
        assert!(orbit_search(&[t], &[0, 0], 10).is_err());
        let r = orbit_search(&[swap(3, 0, 1), swap(3, 1, 2)], &[1, 0, 0], 10).unwrap();
        assert_eq!(r.size, Some(3));
        assert_eq!(r.barycenter(), Some(vec![1, 1, 1]));
    }

    #[test]
    fn candidates_are_primitive_and_distinct() {
        let m = swap(3, 0, 1);
        let c = candidate_vectors(3, &[m], &CandidateConfig::default()).unwrap();
        assert_eq!(c[0].vector, vec![-1, 1, 0]);
        let set: IndexSet<_> = c.iter().map(|x| x.vector.clone()).collect();
        assert_eq!(set.len(), c.len());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn coinvariant_routes_agree(seed in any::<u64>(), dim in 1usize..6, count in 1usize..4) {
            let ms = random_matrix_group(seed, dim, count);
            let c = coinvariants_both(dim, &ms).unwrap();
            prop_assert_eq!(c.by_duality, c.by_saturation);
        }

        #[test]
        fn finite_orbits_are_closed(seed in any::<u64>(), dim in 2usize..5) {
            let ms: Vec<IntMatrix> = random_matrix_group(seed, dim, 2);
            let mut v = vec![0i64; dim];
            v[0] = 1;
            let r = orbit_search(&ms, &v, 2000).unwrap();
            if r.is_finite() {
                let set: IndexSet<_> = r.orbit.iter().cloned().collect();
                for m in &ms {
                    for u in &r.orbit {
                        prop_assert!(set.contains(&m.mul_vec(u).unwrap()));
                    }
                }
                let b = r.barycenter().unwrap();
                for m in &ms {
                    prop_assert_eq!(m.mul_vec(&b).unwrap(), b.clone());
                }
            }
        }
    }
}
