//! Dense exact linear algebra over [`Rational`].
//!
//! Pivots are chosen as the first nonzero entry in column order, so results
//! are deterministic and no tolerance is involved anywhere.

use alloc::vec;
use alloc::vec::Vec;
use num_traits::{One, Zero};

use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix");
            data.extend(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Vec<Rational> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = Rational::zero();
                for (j, xj) in x.iter().enumerate() {
                    let a = &self[(i, j)];
                    if !a.is_zero() && !xj.is_zero() {
                        acc += a * xj;
                    }
                }
                acc
            })
            .collect()
    }

    /// Inverse by Gauss-Jordan elimination, `None` when singular.
    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[(r, col)].is_zero())?;
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let p = a[(col, col)].clone();
            if !p.is_one() {
                let scale = p.recip();
                a.scale_row(col, &scale);
                inv.scale_row(col, &scale);
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let factor = a[(r, col)].clone();
                a.sub_row_multiple(r, col, &factor);
                inv.sub_row_multiple(r, col, &factor);
            }
        }
        Some(inv)
    }

    /// Solves `self * x = b`, `None` when the matrix is singular.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(self.rows, self.cols);
        assert_eq!(b.len(), self.rows);
        let n = self.rows;
        let mut a = self.clone();
        let mut rhs = b.to_vec();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[(r, col)].is_zero())?;
            if pivot != col {
                a.swap_rows(pivot, col);
                rhs.swap(pivot, col);
            }
            let p = a[(col, col)].clone();
            for r in col + 1..n {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let factor = &a[(r, col)] / &p;
                a.sub_row_multiple(r, col, &factor);
                let delta = &rhs[col] * &factor;
                rhs[r] -= delta;
            }
        }
        let mut x = vec![Rational::zero(); n];
        for row in (0..n).rev() {
            let mut acc = rhs[row].clone();
            for c in row + 1..n {
                if !a[(row, c)].is_zero() {
                    acc -= &a[(row, c)] * &x[c];
                }
            }
            x[row] = acc / &a[(row, row)];
        }
        Some(x)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn scale_row(&mut self, i: usize, s: &Rational) {
        for c in 0..self.cols {
            let v = &mut self.data[i * self.cols + c];
            if !v.is_zero() {
                *v *= s;
            }
        }
    }

    // row[target] -= factor * row[source]
    fn sub_row_multiple(&mut self, target: usize, source: usize, factor: &Rational) {
        for c in 0..self.cols {
            let s = &self.data[source * self.cols + c];
            if s.is_zero() {
                continue;
            }
            let delta = s * factor;
            self.data[target * self.cols + c] -= delta;
        }
    }
}

impl core::ops::Index<(usize, usize)> for Matrix {
    type Output = Rational;
    fn index(&self, (r, c): (usize, usize)) -> &Rational {
        &self.data[r * self.cols + c]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rational {
        &mut self.data[r * self.cols + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn inverse_of_small_matrix() {
        let m = Matrix::from_rows(vec![vec![int(2), int(1)], vec![int(1), int(3)]]);
        let inv = m.inverse().unwrap();
        assert_eq!(inv[(0, 0)], rat(3, 5));
        assert_eq!(inv[(0, 1)], rat(-1, 5));
        assert_eq!(inv[(1, 1)], rat(2, 5));
    }

    #[test]
    fn singular_is_none() {
        let m = Matrix::from_rows(vec![vec![int(1), int(2)], vec![int(2), int(4)]]);
        assert!(m.inverse().is_none());
        assert!(m.solve(&[int(1), int(1)]).is_none());
    }

    #[test]
    fn solve_needs_row_swap() {
        let m = Matrix::from_rows(vec![
            vec![int(0), int(1), int(2)],
            vec![int(1), int(0), int(1)],
            vec![int(3), int(1), int(0)],
        ]);
        let b = [int(5), int(4), int(5)];
        let x = m.solve(&b).unwrap();
        assert_eq!(m.mul_vec(&x), b.to_vec());
        assert_eq!(m.inverse().unwrap().mul_vec(&b), x);
    }
}
