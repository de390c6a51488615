//! Dense exact-rational vectors and matrices.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::Rational64;

/// Row-major dense matrix of exact rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Builds a matrix from rows; all rows must share a length.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self {
            rows: n,
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[Rational]> {
        self.data.chunks(self.cols.max(1)).take(self.rows)
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        self.row_iter().map(<[Rational]>::to_vec).collect()
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for row in self.row_iter() {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "  {}", cells.join(" "))?;
        }
        write!(f, "]")
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Lifts a 0/1 vector into rationals.
pub fn from_bits(bits: &[bool]) -> Vec<Rational> {
    bits.iter()
        .map(|&b| if b { Rational::one() } else { Rational::zero() })
        .collect()
}

/// Reads a vector back as 0/1, rejecting any other entry.
pub fn to_bits(v: &[Rational]) -> Result<Vec<bool>> {
    v.iter()
        .enumerate()
        .map(|(index, x)| {
            if x.is_zero() {
                Ok(false)
            } else if x.is_one() {
                Ok(true)
            } else {
                Err(Error::NonBooleanVector {
                    index,
                    value: x.to_string(),
                })
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn identity_rows_are_unit_vectors() {
        let m = Matrix::identity(4);
        for (i, row) in m.row_iter().enumerate() {
            assert_eq!(row.iter().filter(|x| x.is_one()).count(), 1);
            assert!(row[i].is_one());
        }
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let rows = vec![vec![r(1, 1), r(0, 1)], vec![r(1, 1)]];
        assert_eq!(
            Matrix::from_rows(rows).unwrap_err(),
            Error::DimensionMismatch {
                expected: 2,
                found: 1
            }
        );
    }

    #[test]
    fn halves_sum_exactly() {
        let a = vec![r(1, 1); 3];
        let b = vec![r(1, 3); 3];
        assert!(dot(&a, &b).is_one());
    }

    #[test]
    fn bits_round_trip_and_reject_fractions() {
        let bits = vec![true, false, true];
        assert_eq!(to_bits(&from_bits(&bits)).unwrap(), bits);
        assert_eq!(
            to_bits(&[r(0, 1), r(1, 2)]).unwrap_err(),
            Error::NonBooleanVector {
                index: 1,
                value: "1/2".into()
            }
        );
    }
}
