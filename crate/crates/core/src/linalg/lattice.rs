use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::exact::{big_vec_to_i64, rref, smith, to_rational};
use super::IntMatrix;
use crate::error::Result;

/// `Z^N / sat(L)` with a chosen complement.
///
/// `projection * complement = I` and `projection` kills the saturation of `L`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientLattice {
    pub ambient: usize,
    /// Columns: a basis of the saturated sublattice.
    pub sub_basis: IntMatrix,
    /// Columns: a basis of the complement.
    pub complement: IntMatrix,
    pub projection: IntMatrix,
    /// `rref` when the echelon form was integral, `smith` otherwise.
    pub pivot_rule: String,
}

impl QuotientLattice {
    pub fn new(ambient: usize, generators: &[Vec<i64>]) -> Result<Self> {
        let rows: Vec<Vec<BigInt>> = generators
            .iter()
            .filter(|g| g.iter().any(|&x| x != 0))
            .map(|g| g.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        if rows.is_empty() {
            return Ok(QuotientLattice {
                ambient,
                sub_basis: IntMatrix::zeros(ambient, 0),
                complement: IntMatrix::identity(ambient),
                projection: IntMatrix::identity(ambient),
                pivot_rule: "rref".into(),
            });
        }
        let (r, pivots) = rref(to_rational(&rows));
        if r.iter().all(|row| row.iter().all(|q| q.is_integer())) {
            let basis: Vec<Vec<i64>> = r
                .iter()
                .map(|row| big_vec_to_i64(&row.iter().map(|q| q.to_integer()).collect::<Vec<_>>()))
                .collect::<Result<_>>()?;
            let free: Vec<usize> = (0..ambient).filter(|c| !pivots.contains(c)).collect();
            let mut complement = IntMatrix::zeros(ambient, free.len());
            let mut projection = IntMatrix::zeros(free.len(), ambient);
            for (k, &j) in free.iter().enumerate() {
                complement[(j, k)] = 1;
                projection[(k, j)] = 1;
                for (row, &p) in pivots.iter().enumerate() {
                    projection[(k, p)] = -basis[row][j];
                }
            }
            return Ok(QuotientLattice {
                ambient,
                sub_basis: IntMatrix::from_columns(ambient, &basis),
                complement,
                projection,
                pivot_rule: "rref".into(),
            });
        }
        // columns are the generators
        let a: Vec<Vec<BigInt>> = (0..ambient).map(|i| rows.iter().map(|g| g[i].clone()).collect()).collect();
        let s = smith(&a);
        let k = s.rank();
        let u = IntMatrix::from_big(&s.u)?;
        let u_inv = IntMatrix::from_big(&s.u_inv)?;
        let lo: Vec<usize> = (0..k).collect();
        let hi: Vec<usize> = (k..ambient).collect();
        let all: Vec<usize> = (0..ambient).collect();
        Ok(QuotientLattice {
            ambient,
            sub_basis: u_inv.select(&all, &lo),
            complement: u_inv.select(&all, &hi),
            projection: u.select(&hi, &all),
            pivot_rule: "smith".into(),
        })
    }

    pub fn sub_rank(&self) -> usize {
        self.sub_basis.cols()
    }

    pub fn quotient_rank(&self) -> usize {
        self.complement.cols()
    }

    pub fn project(&self, v: &[i64]) -> Result<Vec<i64>> {
        self.projection.mul_vec(v)
    }

    pub fn lift(&self, w: &[i64]) -> Result<Vec<i64>> {
        self.complement.mul_vec(w)
    }

    /// Membership in the rational span of the sublattice.
    pub fn in_span(&self, v: &[i64]) -> Result<bool> {
        Ok(self.project(v)?.iter().all(|&x| x == 0))
    }
}
