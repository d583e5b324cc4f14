//! Exact dense linear algebra over ℚ.
//!
//! Small, deterministic Gaussian elimination — enough for Gram-matrix ranks,
//! determinants and inverses, and for the incremental row spaces used by the
//! filtration computations.  Everything is exact; there is no pivot-size
//! heuristics beyond "first nonzero".

use crate::rat::{rat, Rat};
use num::Zero;

/// Dense row-major matrix of rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMat {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    /// Builds a matrix from rows; all rows must share one length.
    ///
    /// # Panics
    /// Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        RatMat {
            rows: n,
            cols: m,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMat::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = rat(1);
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Rat {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Rat {
        &mut self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Rat] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            let Some(pivot) = (rank..m.rows).find(|&r| !m.at(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(rank, pivot);
            for r in (rank + 1)..m.rows {
                if !m.at(r, col).is_zero() {
                    let factor = m.at(r, col) / m.at(rank, col);
                    for c in col..m.cols {
                        let sub = &factor * m.at(rank, c);
                        *m.at_mut(r, c) -= sub;
                    }
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        rank
    }

    /// Determinant of a square matrix.
    ///
    /// # Panics
    /// Panics if the matrix is not square.
    pub fn det(&self) -> Rat {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let mut m = self.clone();
        let mut det = rat(1);
        for col in 0..m.cols {
            let Some(pivot) = (col..m.rows).find(|&r| !m.at(r, col).is_zero()) else {
                return Rat::zero();
            };
            if pivot != col {
                m.swap_rows(col, pivot);
                det = -det;
            }
            det *= m.at(col, col).clone();
            for r in (col + 1)..m.rows {
                if !m.at(r, col).is_zero() {
                    let factor = m.at(r, col) / m.at(col, col);
                    for c in col..m.cols {
                        let sub = &factor * m.at(col, c);
                        *m.at_mut(r, c) -= sub;
                    }
                }
            }
        }
        det
    }

    /// Inverse of a square matrix, or `None` if singular.
    pub fn inverse(&self) -> Option<RatMat> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = RatMat::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !m.at(r, col).is_zero())?;
            m.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let scale = m.at(col, col).recip();
            for c in 0..n {
                *m.at_mut(col, c) *= &scale;
                *inv.at_mut(col, c) *= &scale;
            }
            for r in 0..n {
                if r != col && !m.at(r, col).is_zero() {
                    let factor = m.at(r, col).clone();
                    for c in 0..n {
                        let sub_m = &factor * m.at(col, c);
                        *m.at_mut(r, c) -= sub_m;
                        let sub_i = &factor * inv.at(col, c);
                        *inv.at_mut(r, c) -= sub_i;
                    }
                }
            }
        }
        Some(inv)
    }

    /// Basis of the right nullspace `{x : Mx = 0}`, as column vectors.
    pub fn nullspace(&self) -> Vec<Vec<Rat>> {
        let mut m = self.clone();
        // Reduced row echelon form, tracking pivot columns.
        let mut pivots: Vec<usize> = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            let Some(p) = (row..m.rows).find(|&r| !m.at(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let scale = m.at(row, col).recip();
            for c in col..m.cols {
                *m.at_mut(row, c) *= &scale;
            }
            for r in 0..m.rows {
                if r != row && !m.at(r, col).is_zero() {
                    let factor = m.at(r, col).clone();
                    for c in col..m.cols {
                        let sub = &factor * m.at(row, c);
                        *m.at_mut(r, c) -= sub;
                    }
                }
            }
            pivots.push(col);
            row += 1;
            if row == m.rows {
                break;
            }
        }
        let mut basis = Vec::new();
        for free in 0..m.cols {
            if pivots.contains(&free) {
                continue;
            }
            let mut v = vec![Rat::zero(); m.cols];
            v[free] = rat(1);
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m.at(r, free).clone();
            }
            basis.push(v);
        }
        basis
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

/// An incrementally built row space with exact membership tests.
///
/// Rows are kept in reduced echelon form, so insertion and membership are both
/// a single reduction pass.
#[derive(Debug, Clone)]
pub struct RowSpace {
    cols: usize,
    /// Reduced rows, each normalized to a leading 1; `pivots[i]` is the pivot
    /// column of `rows[i]`, strictly increasing.
    rows: Vec<Vec<Rat>>,
    pivots: Vec<usize>,
}

impl RowSpace {
    pub fn new(cols: usize) -> Self {
        RowSpace {
            cols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Reduces `v` against the current rows, returning the residual.
    pub fn reduce(&self, mut v: Vec<Rat>) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let factor = v[p].clone();
                for c in p..self.cols {
                    let sub = &factor * &row[c];
                    v[c] -= sub;
                }
            }
        }
        v
    }

    /// True iff `v` lies in the span.
    pub fn contains(&self, v: &[Rat]) -> bool {
        self.reduce(v.to_vec()).iter().all(Rat::is_zero)
    }

    /// Inserts `v`; returns `true` if it enlarged the span.
    pub fn insert(&mut self, v: Vec<Rat>) -> bool {
        let mut r = self.reduce(v);
        let Some(pivot) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let scale = r[pivot].recip();
        for c in pivot..self.cols {
            r[c] *= &scale;
        }
        // Back-substitute into existing rows to stay fully reduced.
        for (row, &p) in self.rows.iter_mut().zip(&self.pivots) {
            debug_assert_ne!(p, pivot);
            if !row[pivot].is_zero() {
                let factor = row[pivot].clone();
                for c in pivot..self.cols {
                    let sub = &factor * &r[c];
                    row[c] -= sub;
                }
            }
        }
        let pos = self.pivots.partition_point(|&p| p < pivot);
        self.pivots.insert(pos, pivot);
        self.rows.insert(pos, r);
        true
    }

    /// The reduced spanning rows.
    pub fn basis(&self) -> &[Vec<Rat>] {
        &self.rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::ratio;

    fn m(rows: &[&[i64]]) -> RatMat {
        RatMat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rat(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_and_det_of_small_matrices() {
        let a = m(&[&[1, 2], &[3, 4]]);
        assert_eq!(a.rank(), 2);
        assert_eq!(a.det(), rat(-2));
        let b = m(&[&[1, 2], &[2, 4]]);
        assert_eq!(b.rank(), 1);
        assert_eq!(b.det(), rat(0));
    }

    #[test]
    fn inverse_round_trips() {
        let a = m(&[&[2, 1], &[7, 4]]);
        let inv = a.inverse().unwrap();
        assert_eq!(inv, m(&[&[4, -1], &[-7, 2]]));
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn inverse_with_fractions() {
        let a = RatMat::from_rows(vec![
            vec![rat(1), ratio(1, 2)],
            vec![ratio(1, 2), rat(1)],
        ]);
        assert_eq!(a.det(), ratio(3, 4));
        let inv = a.inverse().unwrap();
        assert_eq!(*inv.at(0, 0), ratio(4, 3));
        assert_eq!(*inv.at(0, 1), ratio(-2, 3));
    }

    #[test]
    fn nullspace_vectors_annihilate() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 1);
        for v in &ns {
            for r in 0..a.nrows() {
                let dot: Rat = (0..a.ncols()).map(|c| a.at(r, c) * &v[c]).sum();
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn rowspace_membership_and_growth() {
        let mut rs = RowSpace::new(3);
        assert!(rs.insert(vec![rat(1), rat(2), rat(3)]));
        assert!(!rs.insert(vec![rat(2), rat(4), rat(6)]));
        assert!(rs.insert(vec![rat(0), rat(1), rat(1)]));
        assert_eq!(rs.dim(), 2);
        assert!(rs.contains(&[rat(1), rat(3), rat(4)]));
        assert!(!rs.contains(&[rat(0), rat(0), rat(1)]));
    }
}
