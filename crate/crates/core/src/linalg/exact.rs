#![allow(clippy::needless_range_loop)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::IntMatrix;
use crate::error::{Error, Result};

pub type BigMatrix = Vec<Vec<BigInt>>;
pub type RatMatrix = Vec<Vec<BigRational>>;

pub fn to_big(m: &IntMatrix) -> BigMatrix {
    (0..m.rows()).map(|i| m.row(i).iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn to_rational(m: &BigMatrix) -> RatMatrix {
    m.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect()
}

pub fn bareiss_det(m: &BigMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Reduced row echelon form and pivot columns.
pub fn rref(mut a: RatMatrix) -> (RatMatrix, Vec<usize>) {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..cols {
                    let d = &f * &a[r][j];
                    a[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

pub fn rank(m: &IntMatrix) -> usize {
    rref(to_rational(&to_big(m))).1.len()
}

/// Clear denominators and divide by the content.
pub fn primitive(v: &[BigRational]) -> Vec<BigInt> {
    let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from_integer(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

/// Primitive integer basis of the right kernel, one vector per free column.
pub fn nullspace(m: &IntMatrix) -> Result<Vec<Vec<i64>>> {
    let n = m.cols();
    let (r, pivots) = rref(to_rational(&to_big(m)));
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut out = Vec::new();
    for &f in &free {
        let mut v = vec![BigRational::zero(); n];
        v[f] = BigRational::one();
        for (row, &p) in pivots.iter().enumerate() {
            v[p] = -r[row][f].clone();
        }
        out.push(big_vec_to_i64(&primitive(&v))?);
    }
    Ok(out)
}

pub(crate) fn big_vec_to_i64(v: &[BigInt]) -> Result<Vec<i64>> {
    use num_traits::ToPrimitive;
    v.iter().map(|x| x.to_i64().ok_or(Error::Overflow("vector conversion"))).collect()
}

pub fn rational_inverse(m: &RatMatrix) -> Option<RatMatrix> {
    let n = m.len();
    let aug: RatMatrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    let (r, pivots) = rref(aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// `u * a * v = diag(d)` with `u`, `v` unimodular; `u_inv` is kept for sections.
#[derive(Clone, Debug)]
pub struct Smith {
    pub d: Vec<BigInt>,
    pub u: BigMatrix,
    pub u_inv: BigMatrix,
    pub v: BigMatrix,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.d.iter().take_while(|x| !x.is_zero()).count()
    }

    pub fn has_torsion(&self) -> bool {
        self.d.iter().any(|x| !x.is_zero() && !x.is_one())
    }
}

fn ident(n: usize) -> BigMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

struct SmithCalc {
    a: BigMatrix,
    u: BigMatrix,
    u_inv: BigMatrix,
    v: BigMatrix,
}

impl SmithCalc {
    // row_i += c * row_j
    fn add_row(&mut self, i: usize, j: usize, c: &BigInt) {
        for k in 0..self.a[0].len() {
            let t = c * &self.a[j][k];
            self.a[i][k] += t;
        }
        for k in 0..self.u.len() {
            let t = c * &self.u[j][k];
            self.u[i][k] += t;
        }
        for row in self.u_inv.iter_mut() {
            let t = c * &row[i];
            row[j] -= t;
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.u.swap(i, j);
        for row in self.u_inv.iter_mut() {
            row.swap(i, j);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -&*x;
        }
        for x in self.u[i].iter_mut() {
            *x = -&*x;
        }
        for row in self.u_inv.iter_mut() {
            row[i] = -&row[i];
        }
    }

    // col_i += c * col_j
    fn add_col(&mut self, i: usize, j: usize, c: &BigInt) {
        for row in self.a.iter_mut() {
            let t = c * &row[j];
            row[i] += t;
        }
        for row in self.v.iter_mut() {
            let t = c * &row[j];
            row[i] += t;
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in self.a.iter_mut() {
            row.swap(i, j);
        }
        for row in self.v.iter_mut() {
            row.swap(i, j);
        }
    }
}

pub fn smith(a: &BigMatrix) -> Smith {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut s = SmithCalc {
        a: a.clone(),
        u: ident(m),
        u_inv: ident(m),
        v: ident(n),
    };
    if m == 0 || n == 0 {
        return Smith {
            d: Vec::new(),
            u: s.u,
            u_inv: s.u_inv,
            v: s.v,
        };
    }
    let k = m.min(n);
    let mut t = 0;
    while t < k {
        // smallest nonzero entry in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !s.a[i][j].is_zero() && best.is_none_or(|(bi, bj)| s.a[i][j].abs() < s.a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        s.swap_rows(t, pi);
        s.swap_cols(t, pj);
        let mut clean = true;
        for i in t + 1..m {
            if !s.a[i][t].is_zero() {
                let q = s.a[i][t].div_floor(&s.a[t][t]);
                s.add_row(i, t, &-q);
                if !s.a[i][t].is_zero() {
                    clean = false;
                }
            }
        }
        for j in t + 1..n {
            if !s.a[t][j].is_zero() {
                let q = s.a[t][j].div_floor(&s.a[t][t]);
                s.add_col(j, t, &-q);
                if !s.a[t][j].is_zero() {
                    clean = false;
                }
            }
        }
        if !clean {
            continue;
        }
        // divisibility: pivot must divide the trailing block
        let mut bad = None;
        'outer: for i in t + 1..m {
            for j in t + 1..n {
                if !(&s.a[i][j] % &s.a[t][t]).is_zero() {
                    bad = Some(i);
                    break 'outer;
                }
            }
        }
        if let Some(i) = bad {
            s.add_row(t, i, &BigInt::one());
            continue;
        }
        if s.a[t][t].is_negative() {
            s.negate_row(t);
        }
        t += 1;
    }
    let d = (0..k).map(|i| s.a[i][i].clone()).collect();
    Smith {
        d,
        u: s.u,
        u_inv: s.u_inv,
        v: s.v,
    }
}

/// Canonical Hermite basis of the row lattice; zero rows dropped.
pub fn hnf_rows(a: &BigMatrix) -> BigMatrix {
    let mut rows: BigMatrix = a.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let n = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..n {
        if r == rows.len() {
            break;
        }
        loop {
            let nz: Vec<usize> = (r..rows.len()).filter(|&i| !rows[i][c].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| rows[i][c].abs()).unwrap();
            rows.swap(r, p);
            let mut done = true;
            for i in r + 1..rows.len() {
                if !rows[i][c].is_zero() {
                    let q = rows[i][c].div_floor(&rows[r][c]);
                    for j in c..n {
                        let t = &q * &rows[r][j];
                        rows[i][j] -= t;
                    }
                    if !rows[i][c].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if r < rows.len() && !rows[r][c].is_zero() {
            if rows[r][c].is_negative() {
                for x in rows[r].iter_mut() {
                    *x = -&*x;
                }
            }
            for i in 0..r {
                let q = rows[i][c].div_floor(&rows[r][c]);
                if !q.is_zero() {
                    for j in c..n {
                        let t = &q * &rows[r][j];
                        rows[i][j] -= t;
                    }
                }
            }
            r += 1;
        }
    }
    rows.truncate(r);
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(rows: &[Vec<i64>]) -> BigMatrix {
        to_big(&IntMatrix::from_rows(rows).unwrap())
    }

    fn mat_mul(a: &BigMatrix, b: &BigMatrix) -> BigMatrix {
        let n = b.first().map_or(0, Vec::len);
        a.iter()
            .map(|row| {
                (0..n)
                    .map(|j| row.iter().enumerate().map(|(k, x)| x * &b[k][j]).sum())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn smith_small() {
        let a = big(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = smith(&a);
        assert_eq!(s.d, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        assert!(s.has_torsion());
    }

    #[test]
    fn hnf_canonical() {
        let a = big(&[vec![2, 0], vec![0, 2], vec![1, 1]]);
        let b = big(&[vec![1, 1], vec![0, 2]]);
        assert_eq!(hnf_rows(&a), hnf_rows(&b));
        assert_eq!(hnf_rows(&b), big(&[vec![1, 1], vec![0, 2]]));
    }

    #[test]
    fn nullspace_example() {
        let m = IntMatrix::from_rows(&[vec![1, -1, 0], vec![0, 0, 0]]).unwrap();
        let k = nullspace(&m).unwrap();
        assert_eq!(k, vec![vec![1, 1, 0], vec![0, 0, 1]]);
    }

    proptest! {
        #[test]
        fn smith_decomposes(data in prop::collection::vec(-6i64..=6, 12)) {
            let a = big(&data.chunks(4).map(|c| c.to_vec()).collect::<Vec<_>>());
            let s = smith(&a);
            let d = mat_mul(&mat_mul(&s.u, &a), &s.v);
            for i in 0..3 {
                for j in 0..4 {
                    let expect = if i == j { s.d[i].clone() } else { BigInt::zero() };
                    prop_assert_eq!(&d[i][j], &expect);
                }
            }
            prop_assert_eq!(mat_mul(&s.u, &s.u_inv), ident(3));
            for i in 1..s.rank() {
                prop_assert!((&s.d[i] % &s.d[i - 1]).is_zero());
            }
            prop_assert_eq!(s.rank(), rank(&IntMatrix::from_rows(&data.chunks(4).map(|c| c.to_vec()).collect::<Vec<_>>()).unwrap()));
        }

        #[test]
        fn hnf_invariant_under_unimodular(data in prop::collection::vec(-5i64..=5, 9), c in -3i64..=3) {
            let a = big(&data.chunks(3).map(|c| c.to_vec()).collect::<Vec<_>>());
            let mut b = a.clone();
            for j in 0..3 {
                let t = &b[1][j] * BigInt::from(c);
                b[0][j] += t;
            }
            b.swap(1, 2);
            prop_assert_eq!(hnf_rows(&a), hnf_rows(&b));
        }
    }
}
