//! Symmetric real matrices with sparse row storage and dense-equivalent
//! semantics.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// A real symmetric matrix.
///
/// Entries are stored per row, sorted by column, with both `(i, j)` and
/// `(j, i)` present so that row operations never need a transpose. The
/// builder keeps the two mirror entries in lockstep, which makes symmetry
/// a structural guarantee rather than a numeric one.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    order: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl SymMatrix {
    pub fn zeros(order: usize) -> Self {
        SymMatrix {
            order,
            rows: vec![Vec::new(); order],
        }
    }

    /// Builds from a dense matrix, rejecting asymmetric input.
    pub fn from_dense(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSymmetric);
        }
        let n = m.nrows();
        for i in 0..n {
            for j in (i + 1)..n {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        let mut out = SymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let v = m[(i, j)];
                if v != 0.0 {
                    out.rows[i].push((j, v));
                }
            }
        }
        Ok(out)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self.rows[i].binary_search_by_key(&j, |&(c, _)| c) {
            Ok(pos) => self.rows[i][pos].1,
            Err(_) => 0.0,
        }
    }

    /// Adds `v` to entry `(i, j)` and, for off-diagonal entries, to `(j, i)`.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.add_one(i, j, v);
        if i != j {
            self.add_one(j, i, v);
        }
    }

    fn add_one(&mut self, i: usize, j: usize, v: f64) {
        match self.rows[i].binary_search_by_key(&j, |&(c, _)| c) {
            Ok(pos) => self.rows[i][pos].1 += v,
            Err(pos) => self.rows[i].insert(pos, (j, v)),
        }
    }

    /// `self += scale * other`.
    pub fn add_scaled(&mut self, other: &SymMatrix, scale: f64) {
        assert_eq!(self.order, other.order);
        for i in 0..self.order {
            for &(j, v) in &other.rows[i] {
                self.add_one(i, j, scale * v);
            }
        }
    }

    /// `out = self * x`.
    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.order);
        assert_eq!(out.len(), self.order);
        for (i, row) in self.rows.iter().enumerate() {
            let mut acc = 0.0;
            for &(j, v) in row {
                acc += v * x[j];
            }
            out[i] = acc;
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.order];
        self.matvec(x, &mut out);
        out
    }

    /// Quadratic form `x' * self * x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.apply(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.rows[i].iter().map(|&(_, v)| v).sum()
    }

    /// Infinity norm, `max_i sum_j |a_ij|`.
    pub fn inf_norm(&self) -> f64 {
        (0..self.order)
            .map(|i| self.rows[i].iter().map(|&(_, v)| v.abs()).sum())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.order, self.order);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_keeps_symmetry() {
        let mut m = SymMatrix::zeros(3);
        m.add(0, 2, -1.5);
        m.add(1, 1, 2.0);
        assert_eq!(m.get(0, 2), -1.5);
        assert_eq!(m.get(2, 0), -1.5);
        assert_eq!(m.get(1, 1), 2.0);
        assert_eq!(m.get(0, 1), 0.0);
    }

    #[test]
    fn matvec_matches_dense() {
        let mut m = SymMatrix::zeros(3);
        m.add(0, 1, -1.0);
        m.add(0, 0, 1.0);
        m.add(1, 1, 2.0);
        m.add(1, 2, -1.0);
        m.add(2, 2, 1.0);
        let x = [1.0, 2.0, 3.0];
        let d = m.to_dense();
        let y = m.apply(&x);
        let yd = d * nalgebra::DVector::from_row_slice(&x);
        for i in 0..3 {
            assert!((y[i] - yd[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn from_dense_rejects_asymmetric() {
        let mut d = DMatrix::zeros(2, 2);
        d[(0, 1)] = 1.0;
        assert!(matches!(
            SymMatrix::from_dense(&d),
            Err(Error::NotSymmetric)
        ));
    }
}
