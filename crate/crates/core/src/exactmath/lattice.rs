//! Integer matrices, Smith normal form with transforms, and saturation of
//! sublattices of `Z^N`.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::qmatrix::QMatrix;
use super::rational::{primitive_integer_vector, Rational};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &x) in row.iter().enumerate() {
                m[(i, j)] = x.into();
            }
        }
        m
    }

    /// Matrix with the given integer columns, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    /// Columns scaled to primitive integer vectors.
    pub fn from_rational_columns(rows: usize, columns: &[Vec<Rational>]) -> Self {
        let cols: Vec<Vec<BigInt>> = columns.iter().map(|c| primitive_integer_vector(c)).collect();
        Self::from_columns(rows, &cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_qmatrix(&self) -> QMatrix {
        QMatrix::new(self.rows, self.cols, self.data.iter().map(|x| Rational::from_integer(x.clone())).collect())
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += &self[(i, k)] * &other[(k, j)];
                }
            }
        }
        out
    }

    /// Columns `c0..c1`.
    pub fn columns(&self, c0: usize, c1: usize) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.rows, c1 - c0);
        for i in 0..self.rows {
            for j in c0..c1 {
                out[(i, j - c0)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Rows `r0..r1`.
    pub fn row_block(&self, r0: usize, r1: usize) -> IntMatrix {
        IntMatrix { rows: r1 - r0, cols: self.cols, data: self.data[r0 * self.cols..r1 * self.cols].to_vec() }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// `row[dst] += k * row[src]`
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        for j in 0..self.cols {
            let t = &self[(src, j)] * k;
            self[(dst, j)] += t;
        }
    }

    /// `col[dst] += k * col[src]`
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        for i in 0..self.rows {
            let t = &self[(i, src)] * k;
            self[(i, dst)] += t;
        }
    }
}

/// `left * m * right = diag(diagonal)` with `left`, `right` unimodular and
/// `left_inv = left^-1`. Nonzero diagonal entries are positive, come first,
/// and each divides the next.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub diagonal: Vec<BigInt>,
    pub left: IntMatrix,
    pub left_inv: IntMatrix,
    pub right: IntMatrix,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.diagonal.iter().take_while(|d| !d.is_zero()).count()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut left = IntMatrix::identity(rows);
    let mut left_inv = IntMatrix::identity(rows);
    let mut right = IntMatrix::identity(cols);

    // row ops are mirrored on `left` and, inverted, as column ops on `left_inv`
    let swap_rows = |a: &mut IntMatrix, l: &mut IntMatrix, li: &mut IntMatrix, i: usize, j: usize| {
        a.swap_rows(i, j);
        l.swap_rows(i, j);
        li.swap_cols(i, j);
    };
    let add_row = |a: &mut IntMatrix, l: &mut IntMatrix, li: &mut IntMatrix, dst: usize, src: usize, k: &BigInt| {
        a.add_row(dst, src, k);
        l.add_row(dst, src, k);
        li.add_col(src, dst, &-k);
    };

    let steps = rows.min(cols);
    for t in 0..steps {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !a[(i, j)].is_zero()
                        && best.is_none_or(|(bi, bj)| a[(i, j)].abs() < a[(bi, bj)].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                let diagonal = (0..steps).map(|k| a[(k, k)].clone()).collect();
                return SmithForm { diagonal, left, left_inv, right };
            };
            swap_rows(&mut a, &mut left, &mut left_inv, t, pi);
            a.swap_cols(t, pj);
            right.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = &a[(i, t)] / &a[(t, t)];
                add_row(&mut a, &mut left, &mut left_inv, i, t, &-q);
                clean &= a[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = &a[(t, j)] / &a[(t, t)];
                a.add_col(j, t, &-&q);
                right.add_col(j, t, &-q);
                clean &= a[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into row t and retry
            let p = a[(t, t)].clone();
            let offending = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&a[(i, j)] % &p).is_zero()));
            match offending {
                Some(i) => add_row(&mut a, &mut left, &mut left_inv, t, i, &BigInt::one()),
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            let minus = -BigInt::one();
            for j in 0..cols {
                a[(t, j)] = -&a[(t, j)];
            }
            for j in 0..rows {
                left[(t, j)] = -&left[(t, j)];
            }
            for i in 0..rows {
                left_inv[(i, t)] = &left_inv[(i, t)] * &minus;
            }
        }
    }
    let diagonal = (0..steps).map(|k| a[(k, k)].clone()).collect();
    SmithForm { diagonal, left, left_inv, right }
}

/// Basis of the saturation `(W (x) Q) cap Z^N` of the column span of `w`.
pub fn saturate(w: &IntMatrix) -> Result<IntMatrix> {
    let snf = smith_normal_form(w);
    if snf.rank() != w.cols {
        return Err(Error::NotSublatticeBasis);
    }
    Ok(snf.left_inv.columns(0, w.cols))
}

/// Index `[saturate(W) : W]`; columns must be independent.
pub fn saturation_index(w: &IntMatrix) -> Result<BigInt> {
    let snf = smith_normal_form(w);
    if snf.rank() != w.cols {
        return Err(Error::NotSublatticeBasis);
    }
    Ok(snf.diagonal.iter().take(w.cols).fold(BigInt::one(), |acc, d| acc * d))
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}
