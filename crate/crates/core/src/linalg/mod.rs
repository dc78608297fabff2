//! Dense integer matrices with checked `i64` arithmetic, plus exact big-number elimination.

mod exact;
mod lattice;

pub(crate) use exact::big_vec_to_i64;

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use exact::{
    hnf_rows, nullspace, primitive, rank, rational_inverse, rref, smith, to_big, to_rational, BigMatrix, RatMatrix,
    Smith,
};
pub use lattice::QuotientLattice;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(IntMatrix {
            rows: r,
            cols: c,
            data: rows.concat(),
        })
    }

    pub fn from_columns(n: usize, cols: &[Vec<i64>]) -> Self {
        let mut m = IntMatrix::zeros(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), n);
            for i in 0..n {
                m[(i, j)] = c[i];
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<i64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..self.cols).all(|j| self[(i, j)] == (i == j) as i64))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..self.cols).all(|j| self[(i, j)] == -self[(j, i)]))
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other[(k, j)];
                    if b == 0 {
                        continue;
                    }
                    let p = a.checked_mul(b).ok_or(Error::Overflow("matrix product"))?;
                    let s = &mut out.data[i * other.cols + j];
                    *s = s.checked_add(p).ok_or(Error::Overflow("matrix product"))?;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[i64]) -> Result<Vec<i64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!("{} columns, vector of {}", self.cols, v.len())));
        }
        let mut out = vec![0i64; self.rows];
        for i in 0..self.rows {
            let mut s: i64 = 0;
            for (j, &x) in v.iter().enumerate() {
                let a = self[(i, j)];
                if a != 0 && x != 0 {
                    s = a
                        .checked_mul(x)
                        .and_then(|p| s.checked_add(p))
                        .ok_or(Error::Overflow("matrix-vector product"))?;
                }
            }
            out[i] = s;
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[i64]) -> Result<Vec<i64>> {
        self.transpose().mul_vec(v)
    }

    pub fn sub(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch("subtraction".into()));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.checked_sub(*b).ok_or(Error::Overflow("matrix difference")))
            .collect::<Result<_>>()?;
        Ok(IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn minus_identity(&self) -> Result<IntMatrix> {
        self.sub(&IntMatrix::identity(self.rows))
    }

    pub fn hstack(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch("hstack".into()));
        }
        let mut m = IntMatrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)];
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)];
            }
        }
        Ok(m)
    }

    pub fn vstack(mats: &[IntMatrix], cols: usize) -> Result<IntMatrix> {
        let mut data = Vec::new();
        let mut rows = 0;
        for m in mats {
            if m.cols != cols {
                return Err(Error::DimensionMismatch("vstack".into()));
            }
            data.extend_from_slice(&m.data);
            rows += m.rows;
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn determinant(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("determinant of non-square matrix".into()));
        }
        Ok(exact::bareiss_det(&to_big(self)))
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant().is_ok_and(|d| d == BigInt::from(1) || d == BigInt::from(-1))
    }

    /// Exact inverse, provided it is integral.
    pub fn inverse(&self) -> Result<IntMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of non-square matrix".into()));
        }
        let inv = rational_inverse(&to_rational(&to_big(self)))
            .ok_or_else(|| Error::InvalidInput("singular matrix".into()))?;
        let mut out = IntMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let q = &inv[i][j];
                if !q.is_integer() {
                    return Err(Error::InvalidInput("inverse is not integral".into()));
                }
                out[(i, j)] = q.to_integer().to_i64().ok_or(Error::Overflow("inverse"))?;
            }
        }
        Ok(out)
    }

    pub fn from_big(m: &BigMatrix) -> Result<IntMatrix> {
        let rows = m.len();
        let cols = m.first().map_or(0, Vec::len);
        let mut out = IntMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out[(i, j)] = m[i][j].to_i64().ok_or(Error::Overflow("big integer conversion"))?;
            }
        }
        Ok(out)
    }

    /// Select a sub-block by row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> IntMatrix {
        let mut m = IntMatrix::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m[(a, b)] = self[(i, j)];
            }
        }
        m
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = i64;

    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{:?}", self.to_rows())
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(|x| format!("{x:>3}")).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<i64>>::deserialize(d)?;
        IntMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basics() {
        let a = IntMatrix::from_rows(&[vec![1, 1], vec![0, 1]]).unwrap();
        let b = a.inverse().unwrap();
        assert_eq!(b.to_rows(), vec![vec![1, -1], vec![0, 1]]);
        assert!(a.mul(&b).unwrap().is_identity());
        assert_eq!(a.determinant().unwrap(), BigInt::from(1));
        let s = IntMatrix::from_rows(&[vec![2, 0], vec![0, 1]]).unwrap();
        assert!(s.inverse().is_err());
        assert!(!s.is_unimodular());
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, "[[1,1],[0,1]]");
        assert_eq!(serde_json::from_str::<IntMatrix>(&json).unwrap(), a);
    }

    #[test]
    fn overflow_detected() {
        let a = IntMatrix::from_rows(&[vec![i64::MAX, 1], vec![0, 1]]).unwrap();
        assert!(matches!(a.mul(&a), Err(Error::Overflow(_))));
    }

    proptest! {
        #[test]
        fn det_multiplicative(a in prop::collection::vec(-5i64..=5, 9), b in prop::collection::vec(-5i64..=5, 9)) {
            let a = IntMatrix { rows: 3, cols: 3, data: a };
            let b = IntMatrix { rows: 3, cols: 3, data: b };
            let ab = a.mul(&b).unwrap();
            prop_assert_eq!(ab.determinant().unwrap(), a.determinant().unwrap() * b.determinant().unwrap());
        }
    }
}
