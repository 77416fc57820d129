//! Dense matrices over ℚ with exact Gaussian elimination.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{arg_err, Result};
use crate::polyfield::poly::{fmt_q, q_to_f64};
use crate::Q;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

/// Fraction-free (Bareiss) row echelon form over ℤ; every division is exact.
fn fraction_free_echelon(mut a: Vec<Vec<BigInt>>) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut row = 0;
    for col in 0..cols {
        if row >= rows {
            break;
        }
        let Some(p) = (row..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(p, row);
        let (top, rest) = a.split_at_mut(row + 1);
        let pr = &top[row];
        for r in rest.iter_mut() {
            let f = std::mem::take(&mut r[col]);
            for j in col + 1..cols {
                let v = &r[j] * &pr[col] - &f * &pr[j];
                r[j] = if prev.is_one() { v } else { v / &prev };
            }
        }
        prev = a[row][col].clone();
        pivots.push(col);
        row += 1;
    }
    (a, pivots)
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Q) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        QMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return arg_err("ragged rows");
        }
        Ok(QMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Elementary matrix E_{ij} (0-based).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = Q::one();
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.rows)
    }

    pub fn entries(&self) -> &[Q] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn scale(&self, c: &Q) -> Self {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * c).collect() }
    }

    pub fn checked_mul(&self, rhs: &QMatrix) -> Result<Self> {
        if self.cols != rhs.rows {
            return arg_err(format!("cannot multiply {:?} by {:?}", self.shape(), rhs.shape()));
        }
        Ok(Self::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = Q::zero();
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if !a.is_zero() {
                    acc += a * &rhs[(k, j)];
                }
            }
            acc
        }))
    }

    pub fn checked_add(&self, rhs: &QMatrix) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return arg_err(format!("cannot add {:?} and {:?}", self.shape(), rhs.shape()));
        }
        Ok(QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        })
    }

    /// ab − ba.
    pub fn commutator(&self, rhs: &QMatrix) -> Result<Self> {
        let ab = self.checked_mul(rhs)?;
        let ba = rhs.checked_mul(self)?;
        Ok(&ab - &ba)
    }

    /// Reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row >= self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self[(r, col)].is_zero()) else {
                continue;
            };
            self.swap_rows(p, row);
            let inv = self[(row, col)].recip();
            for j in col..self.cols {
                if self[(row, j)].is_zero() {
                    continue;
                }
                let v = &self[(row, j)] * &inv;
                self[(row, j)] = v;
            }
            for r in 0..self.rows {
                if r == row || self[(r, col)].is_zero() {
                    continue;
                }
                let f = self[(r, col)].clone();
                for j in col..self.cols {
                    if self[(row, j)].is_zero() {
                        continue;
                    }
                    let v = &self[(row, j)] * &f;
                    self[(r, j)] -= v;
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        let (_, piv) = fraction_free_echelon(self.integer_rows());
        piv.len()
    }

    /// Each row scaled by the lcm of its denominators.
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                let l = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
                row.iter().map(|v| v.numer() * (&l / v.denom())).collect()
            })
            .collect()
    }

    pub fn det(&self) -> Result<Q> {
        if !self.is_square() {
            return arg_err("determinant of a non-square matrix");
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Q::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !a[(r, col)].is_zero()) else {
                return Ok(Q::zero());
            };
            if p != col {
                a.swap_rows(p, col);
                det = -det;
            }
            let piv = a[(col, col)].clone();
            det *= &piv;
            for r in col + 1..n {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let f = &a[(r, col)] / &piv;
                for j in col..n {
                    let v = &a[(col, j)] * &f;
                    a[(r, j)] -= v;
                }
            }
        }
        Ok(det)
    }

    /// Exact inverse, `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else if j - n == i {
                Q::one()
            } else {
                Q::zero()
            }
        });
        let piv = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        Some(Self::from_fn(n, n, |i, j| aug[(i, n + j)].clone()))
    }

    /// One solution of `self · x = b` (free variables set to zero), or `None`
    /// when the system is inconsistent.
    pub fn solve(&self, b: &[Q]) -> Result<Option<Vec<Q>>> {
        Ok(self.solve_with_rank(b)?.0)
    }

    /// `solve` together with the rank of `self`, from a single elimination.
    pub fn solve_with_rank(&self, b: &[Q]) -> Result<(Option<Vec<Q>>, usize)> {
        if b.len() != self.rows {
            return arg_err("right-hand side length does not match row count");
        }
        let n = self.cols;
        let aug = Self::from_fn(self.rows, n + 1, |i, j| if j < n { self[(i, j)].clone() } else { b[i].clone() });
        let (e, piv) = fraction_free_echelon(aug.integer_rows());
        if piv.last() == Some(&n) {
            return Ok((None, piv.len() - 1));
        }
        let mut x = vec![Q::zero(); n];
        for (r, &c) in piv.iter().enumerate().rev() {
            let mut acc = Q::from_integer(e[r][n].clone());
            for &c2 in &piv[r + 1..] {
                if !e[r][c2].is_zero() {
                    acc -= Q::from_integer(e[r][c2].clone()) * &x[c2];
                }
            }
            x[c] = acc / Q::from_integer(e[r][c].clone());
        }
        Ok((Some(x), piv.len()))
    }

    /// Basis of the right null space.
    pub fn null_space(&self) -> Vec<Vec<Q>> {
        let mut a = self.clone();
        let piv = a.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !piv.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Q::zero(); self.cols];
                v[f] = Q::one();
                for (r, &c) in piv.iter().enumerate() {
                    v[c] = -a[(r, f)].clone();
                }
                v
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| q_to_f64(&v.abs())).fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Q;
    fn index(&self, (i, j): (usize, usize)) -> &Q {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl<'a> Add<&'a QMatrix> for &'a QMatrix {
    type Output = QMatrix;
    fn add(self, rhs: &QMatrix) -> QMatrix {
        self.checked_add(rhs).expect("shape mismatch in QMatrix addition")
    }
}

impl<'a> Sub<&'a QMatrix> for &'a QMatrix {
    type Output = QMatrix;
    fn sub(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in QMatrix subtraction");
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<'a> Mul<&'a QMatrix> for &'a QMatrix {
    type Output = QMatrix;
    fn mul(self, rhs: &QMatrix) -> QMatrix {
        self.checked_mul(rhs).expect("shape mismatch in QMatrix product")
    }
}

impl Neg for &QMatrix {
    type Output = QMatrix;
    fn neg(self) -> QMatrix {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| -v.clone()).collect() }
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = (0..self.cols).map(|j| fmt_q(&self[(i, j)])).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}
