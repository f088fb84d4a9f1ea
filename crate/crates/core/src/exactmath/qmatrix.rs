//! Dense rational matrices. Rank and kernels go through fraction-free
//! (Bareiss) elimination on an integer-scaled copy.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::rational::{common_denominator, format_rational, primitive_integer_vector, rat, Rational};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rational>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
        QMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
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
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        QMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vec<Rational>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
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

    pub fn data(&self) -> &[Rational] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = QMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows, "incompatible matrix product");
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).filter(|(a, _)| !a.is_zero()).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn add(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        QMatrix::new(self.rows, self.cols, self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, k: &Rational) -> QMatrix {
        QMatrix::new(self.rows, self.cols, self.data.iter().map(|a| a * k).collect())
    }

    pub fn neg(&self) -> QMatrix {
        self.scale(&-Rational::one())
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        QMatrix::new(self.rows + other.rows, self.cols, data)
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &QMatrix) -> QMatrix {
        self.transpose().vstack(&other.transpose()).transpose()
    }

    pub fn rank(&self) -> usize {
        bareiss_echelon(self).pivots.len()
    }

    /// Basis of the right kernel, as primitive integer vectors (stored as
    /// rationals). Its length is `cols - rank`.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        let ech = bareiss_echelon(self);
        let pivots = &ech.pivots;
        let mut free = vec![true; self.cols];
        for &p in pivots {
            free[p] = false;
        }
        let mut basis = Vec::new();
        for f in (0..self.cols).filter(|&j| free[j]) {
            let mut x = vec![Rational::zero(); self.cols];
            x[f] = Rational::one();
            for (k, &p) in pivots.iter().enumerate().rev() {
                let row = &ech.rows[k];
                let mut s = Rational::zero();
                for j in p + 1..self.cols {
                    if !row[j].is_zero() && !x[j].is_zero() {
                        s += Rational::from_integer(row[j].clone()) * &x[j];
                    }
                }
                x[p] = -s / Rational::from_integer(row[p].clone());
            }
            basis.push(primitive_integer_vector(&x).into_iter().map(Rational::from_integer).collect());
        }
        basis
    }

    /// Reduced row echelon form (canonical for the row space) and its pivot
    /// columns; zero rows are dropped.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut a: Vec<Vec<Rational>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
            a.swap(r, p);
            let inv = a[r][c].recip();
            for x in a[r].iter_mut() {
                *x *= &inv;
            }
            for i in 0..a.len() {
                if i != r && !a[i][c].is_zero() {
                    let f = a[i][c].clone();
                    for j in c..self.cols {
                        let delta = &f * &a[r][j];
                        a[i][j] -= delta;
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == a.len() {
                break;
            }
        }
        a.truncate(r);
        let m = if r == 0 { QMatrix::zeros(0, self.cols) } else { QMatrix::from_rows(a) };
        (m, pivots)
    }
}

struct Echelon {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

/// Fraction-free row echelon form of the integer-scaled matrix.
fn bareiss_echelon(m: &QMatrix) -> Echelon {
    let mut a: Vec<Vec<BigInt>> = (0..m.rows)
        .map(|i| {
            let row = m.row(i);
            let den = common_denominator(row);
            row.iter().map(|q| q.numer() * (&den / q.denom())).collect()
        })
        .collect();
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        let Some(p) = (r..m.rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let (top, rest) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in rest.iter_mut() {
            if row[c].is_zero() {
                for x in row[c + 1..].iter_mut() {
                    *x = &*x * &pivot_row[c] / &prev;
                }
                continue;
            }
            for j in c + 1..m.cols {
                row[j] = (&pivot_row[c] * &row[j] - &row[c] * &pivot_row[j]) / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    Echelon { rows: a, pivots }
}

/// True when the column spans of `a` and `b` coincide.
pub fn same_column_span(a: &QMatrix, b: &QMatrix) -> bool {
    let ra = a.rank();
    ra == b.rank() && a.hstack(b).rank() == ra
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(format_rational).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rank_examples() {
        assert_eq!(QMatrix::identity(3).rank(), 3);
        assert!(QMatrix::identity(3).kernel_basis().is_empty());
        let z = QMatrix::zeros(2, 3);
        assert_eq!(z.rank(), 0);
        assert_eq!(z.kernel_basis().len(), 3);
        let m = QMatrix::from_i64_rows(&[&[1, 1], &[1, 1]]);
        assert_eq!(m.rank(), 1);
        assert_eq!(m.kernel_basis(), vec![vec![rat(-1), rat(1)]]);
    }

    #[test]
    fn bareiss_handles_skipped_columns() {
        // second column is dependent on the first; pivots in columns 0 and 2
        let m = QMatrix::from_i64_rows(&[&[2, 4, 1], &[3, 6, 5], &[1, 2, 7]]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        assert!(m.mul_vec(&k[0]).iter().all(Zero::is_zero));
    }

    #[test]
    fn rref_is_canonical() {
        let a = QMatrix::from_i64_rows(&[&[1, 2, 3], &[2, 4, 7]]);
        let b = QMatrix::from_i64_rows(&[&[3, 6, 10], &[0, 0, 5]]);
        assert_eq!(a.rref(), b.rref());
    }

    fn small_matrix() -> impl Strategy<Value = QMatrix> {
        (1usize..6, 1usize..7).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-3i64..=3, r * c)
                .prop_map(move |v| QMatrix::new(r, c, v.into_iter().map(rat).collect()))
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in small_matrix()) {
            let k = m.kernel_basis();
            prop_assert_eq!(m.rank() + k.len(), m.cols());
            for v in &k {
                prop_assert!(m.mul_vec(v).iter().all(Zero::is_zero));
            }
            if !k.is_empty() {
                prop_assert_eq!(QMatrix::from_columns(m.cols(), &k).rank(), k.len());
            }
        }

        #[test]
        fn rank_matches_rref(m in small_matrix()) {
            prop_assert_eq!(m.rank(), m.rref().1.len());
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }
    }
}
