use std::fmt;

use crate::cyclo::{CycloError, CycloNum};
use crate::scalar::Scalar;
use crate::ApproxNum;

/// Dense row-major matrix. Rows index outputs, columns index inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    /// Panics if `data.len() != rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<S>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Matrix { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> S) -> Self {
        let data = (0..rows * cols).map(|i| f(i / cols, i % cols)).collect();
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::from_fn(rows, cols, |_, _| S::zero())
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |r, c| if r == c { S::one() } else { S::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &S {
        &self.data[r * self.cols + c]
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(S::is_zero)
    }

    /// `self * rhs`, or `None` on a dimension mismatch.
    pub fn mul(&self, rhs: &Matrix<S>) -> Option<Matrix<S>> {
        if self.cols != rhs.rows {
            return None;
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let x = self.get(r, k);
                if x.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let y = rhs.get(k, c);
                    if !y.is_zero() {
                        let slot: &mut S = &mut out.data[r * rhs.cols + c];
                        *slot = slot.clone() + x.clone() * y.clone();
                    }
                }
            }
        }
        Some(out)
    }

    pub fn kron(&self, rhs: &Matrix<S>) -> Matrix<S> {
        Matrix::from_fn(self.rows * rhs.rows, self.cols * rhs.cols, |r, c| {
            self.get(r / rhs.rows, c / rhs.cols).clone() * rhs.get(r % rhs.rows, c % rhs.cols).clone()
        })
    }

    pub fn conj_transpose(&self) -> Matrix<S> {
        Matrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn scale(&self, z: &S) -> Matrix<S> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.clone() * z.clone()).collect(),
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Whether `self = z * other` for a nonzero `z`; `None` on a dimension
    /// mismatch. `tol` only matters for float entries.
    pub fn proportional_to(&self, other: &Matrix<S>, tol: f64) -> Option<bool> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return None;
        }
        Some(S::proportional(&self.data, &other.data, tol))
    }
}

impl Matrix<CycloNum> {
    pub fn to_approx(&self) -> Result<Matrix<ApproxNum>, CycloError> {
        let data = self
            .data
            .iter()
            .map(CycloNum::to_approx)
            .collect::<Result<_, _>>()?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }
}

impl<S: Scalar> fmt::Display for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).render()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn m(rows: usize, cols: usize, v: &[i64]) -> Matrix<CycloNum> {
        Matrix::from_vec(rows, cols, v.iter().map(|&x| CycloNum::from_int(x)).collect())
    }

    #[test]
    fn products() {
        let a = m(2, 2, &[1, 2, 3, 4]);
        let b = m(2, 2, &[0, 1, 1, 0]);
        assert_eq!(a.mul(&b).unwrap(), m(2, 2, &[2, 1, 4, 3]));
        assert!(a.mul(&m(1, 2, &[1, 1])).is_none());
        let k = m(1, 2, &[1, 2]).kron(&m(2, 1, &[3, 4]));
        assert_eq!(k, m(2, 2, &[3, 6, 4, 8]));
    }

    #[test]
    fn conj_transpose_of_i() {
        let a = Matrix::from_vec(1, 2, vec![CycloNum::one(), CycloNum::i()]);
        let t = a.conj_transpose();
        assert_eq!((t.rows(), t.cols()), (2, 1));
        assert_eq!(t.get(1, 0), &(-CycloNum::i()));
    }

    #[test]
    fn display_is_row_major() {
        let s = m(2, 2, &[1, 0, 0, 1]).to_string();
        assert_eq!(s.lines().count(), 2);
        assert!(s.starts_with("[((1)"));
    }
}
