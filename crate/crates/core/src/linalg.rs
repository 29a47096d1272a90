//! Dense matrices: exact rational rank and nullspace by fraction-free
//! (Bareiss) elimination, numerical rank by SVD.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::scalar::{rational_to_f64, Scalar};

#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type RatMatrix = Matrix<BigRational>;

impl<T: Clone> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Panics when the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend(r);
        }
        Matrix {
            rows: n,
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[T]> = self.data.chunks(self.cols.max(1)).take(self.rows).collect();
        write!(f, "Matrix{}x{}{:?}", self.rows, self.cols, rows)
    }
}

/// Matrix entries as they appear in JSON: rationals as strings.
pub trait Entry {
    fn serialize_entry<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error>;
}

impl Entry for BigRational {
    fn serialize_entry<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl Entry for f64 {
    fn serialize_entry<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(*self)
    }
}

impl Entry for Scalar {
    fn serialize_entry<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.serialize(s)
    }
}

struct AsEntry<'a, T>(&'a T);

impl<T: Entry> Serialize for AsEntry<'_, T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize_entry(s)
    }
}

impl<T: Entry + Clone> Serialize for Matrix<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            let row: Vec<AsEntry<T>> = self.row(i).iter().map(AsEntry).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::from_fn(rows, cols, |_, _| BigRational::zero())
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| {
            if i == j {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        })
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        Matrix::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(BigRational::zero(), |acc, k| {
                acc + self.get(i, k) * other.get(k, j)
            })
        })
    }

    pub fn apply(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(BigRational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(rational_to_f64)
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Columns holding a pivot in row echelon form.
    pub fn pivot_columns(&self) -> Vec<usize> {
        self.echelon().pivots
    }

    /// Gauss-Jordan inverse of a square matrix; `None` when singular.
    pub fn inverse(&self) -> Option<RatMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.extend((0..n).map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                }));
                r
            })
            .collect();
        for c in 0..n {
            let p = (c..n).find(|&i| !a[i][c].is_zero())?;
            a.swap(c, p);
            let inv = BigRational::one() / &a[c][c];
            for x in a[c].iter_mut() {
                *x *= &inv;
            }
            for i in 0..n {
                if i != c && !a[i][c].is_zero() {
                    let f = a[i][c].clone();
                    for j in 0..2 * n {
                        let v = &f * &a[c][j];
                        a[i][j] -= v;
                    }
                }
            }
        }
        Some(Matrix::from_rows(
            a.into_iter().map(|r| r[n..].to_vec()).collect(),
            n,
        ))
    }

    /// Basis of `{v : self · v = 0}`, one vector per free column, each with a
    /// 1 in its free column.
    pub fn nullspace(&self) -> Vec<Vec<BigRational>> {
        let ech = self.echelon();
        let free: Vec<usize> = (0..self.cols).filter(|c| !ech.pivots.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![BigRational::zero(); self.cols];
            v[f] = BigRational::one();
            // back substitution, last pivot row first
            for (r, &pc) in ech.pivots.iter().enumerate().rev() {
                let row = &ech.rows[r];
                let mut acc = BigRational::zero();
                for c in pc + 1..self.cols {
                    if !row[c].is_zero() {
                        acc += BigRational::from_integer(row[c].clone()) * &v[c];
                    }
                }
                v[pc] = -acc / BigRational::from_integer(row[pc].clone());
            }
            basis.push(v);
        }
        basis
    }

    // Rows are scaled to integers, then reduced with Bareiss' fraction-free
    // update, so every intermediate entry is an integer minor.
    fn echelon(&self) -> Echelon {
        let mut rows: Vec<Vec<BigInt>> = (0..self.rows).map(|i| integer_row(self.row(i))).collect();
        let mut pivots = Vec::new();
        let mut prev = BigInt::one();
        let mut r = 0;
        for c in 0..self.cols {
            if r == rows.len() {
                break;
            }
            let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
                continue;
            };
            rows.swap(r, p);
            for i in r + 1..rows.len() {
                for j in c + 1..self.cols {
                    let v = (&rows[r][c] * &rows[i][j] - &rows[i][c] * &rows[r][j]) / &prev;
                    rows[i][j] = v;
                }
                rows[i][c] = BigInt::zero();
            }
            prev = rows[r][c].clone();
            pivots.push(c);
            r += 1;
        }
        rows.truncate(r);
        Echelon { rows, pivots }
    }
}

struct Echelon {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

fn integer_row(row: &[BigRational]) -> Vec<BigInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
}

impl Matrix<f64> {
    /// Number of singular values above `rel_tol` times the largest one.
    pub fn numerical_rank(&self, rel_tol: f64) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        let m = nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.data);
        let sv = m.singular_values();
        let largest = sv.iter().cloned().fold(0.0f64, f64::max);
        if largest == 0.0 {
            return 0;
        }
        sv.iter().filter(|&&s| s > rel_tol * largest).count()
    }

    pub fn min_eigenvalue_symmetric(&self) -> Option<f64> {
        if self.rows == 0 {
            return None;
        }
        let m = nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.data);
        m.symmetric_eigenvalues().iter().cloned().reduce(f64::min)
    }
}

/// Rank of a matrix of scalars: exact when every entry is exact, otherwise
/// numerical with relative cutoff `rel_tol`.
pub fn scalar_rank(m: &Matrix<Scalar>, rel_tol: f64) -> (usize, crate::scalar::Mode) {
    let exact: Option<Vec<BigRational>> = m.data.iter().map(|s| s.as_exact().cloned()).collect();
    match exact {
        Some(data) => (
            Matrix {
                rows: m.rows,
                cols: m.cols,
                data,
            }
            .rank(),
            crate::scalar::Mode::Exact,
        ),
        None => (
            m.map(Scalar::to_f64).numerical_rank(rel_tol),
            crate::scalar::Mode::Sampled,
        ),
    }
}

pub fn is_zero_vector(v: &[BigRational]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn max_abs(v: &[BigRational]) -> BigRational {
    v.iter()
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(BigRational::zero)
}
