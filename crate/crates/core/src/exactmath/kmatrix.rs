//! Matrices over a real number field `K = Q(alpha)`.

use std::fmt;
use std::ops::{Index, IndexMut};
use std::sync::Arc;

use super::field::{AlgebraicReal, RealNumberField};
use super::qmatrix::QMatrix;
use super::rational::Rational;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct KMatrix {
    field: Arc<RealNumberField>,
    rows: usize,
    cols: usize,
    data: Vec<AlgebraicReal>,
}

impl KMatrix {
    pub fn zeros(field: &Arc<RealNumberField>, rows: usize, cols: usize) -> Self {
        KMatrix { field: field.clone(), rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: &Arc<RealNumberField>, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m[(i, i)] = field.one();
        }
        m
    }

    pub fn from_rows(field: &Arc<RealNumberField>, rows: Vec<Vec<AlgebraicReal>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data: Vec<AlgebraicReal> = rows.into_iter().flatten().collect();
        if data.iter().any(|x| x.field() != field) {
            return Err(Error::FieldMismatch);
        }
        Ok(KMatrix { field: field.clone(), rows: r, cols: c, data })
    }

    pub fn from_qmatrix(field: &Arc<RealNumberField>, m: &QMatrix) -> Self {
        KMatrix {
            field: field.clone(),
            rows: m.rows(),
            cols: m.cols(),
            data: m.data().iter().map(|q| field.from_rational(q.clone())).collect(),
        }
    }

    pub fn field(&self) -> &Arc<RealNumberField> {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(AlgebraicReal::is_zero)
    }

    /// The rational matrix, if every entry is rational.
    pub fn to_qmatrix(&self) -> Option<QMatrix> {
        let data: Option<Vec<Rational>> = self.data.iter().map(AlgebraicReal::as_rational).collect();
        data.map(|d| QMatrix::new(self.rows, self.cols, d))
    }

    pub fn transpose(&self) -> KMatrix {
        let mut t = KMatrix::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &KMatrix) -> Result<KMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        let mut out = KMatrix::zeros(&self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = &out[(i, j)] + &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &KMatrix) -> Result<KMatrix> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch("matrix sum".into()));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.checked_add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(KMatrix { field: self.field.clone(), rows: self.rows, cols: self.cols, data })
    }

    pub fn neg(&self) -> KMatrix {
        KMatrix { data: self.data.iter().map(|x| -x).collect(), ..self.clone() }
    }

    pub fn scale(&self, k: &Rational) -> KMatrix {
        KMatrix { data: self.data.iter().map(|x| x.scale(k)).collect(), ..self.clone() }
    }

    /// Rows `r0..r1`, columns `c0..c1`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> KMatrix {
        let mut out = KMatrix::zeros(&self.field, r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                out[(i - r0, j - c0)] = self[(i, j)].clone();
            }
        }
        out
    }

    fn principal_submatrix(&self, indices: &[usize]) -> KMatrix {
        let mut out = KMatrix::zeros(&self.field, indices.len(), indices.len());
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                out[(a, b)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// Determinant by Gaussian elimination over `K`.
    pub fn determinant(&self) -> AlgebraicReal {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = self.field.one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !a[(i, c)].is_zero()) else {
                return self.field.zero();
            };
            if p != c {
                for j in 0..n {
                    a.data.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            let pivot = a[(c, c)].clone();
            det = &det * &pivot;
            let inv = pivot.inv().expect("nonzero pivot is invertible");
            for i in c + 1..n {
                if a[(i, c)].is_zero() {
                    continue;
                }
                let f = &a[(i, c)] * &inv;
                for j in c + 1..n {
                    let t = &f * &a[(c, j)];
                    a[(i, j)] = &a[(i, j)] - &t;
                }
            }
        }
        det
    }

    /// Positive semidefiniteness of a symmetric matrix by the sign of every
    /// principal minor (all `2^n - 1` of them).
    pub fn is_psd_by_minors(&self) -> bool {
        assert!(self.is_symmetric(), "psd test needs a symmetric matrix");
        let n = self.rows;
        // smaller minors first: cheap rejections on the diagonal
        let mut masks: Vec<u32> = (1..(1u32 << n)).collect();
        masks.sort_by_key(|m| m.count_ones());
        masks.into_iter().all(|mask| {
            let idx: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            self.principal_submatrix(&idx).determinant().sign() >= 0
        })
    }

    /// Positive semidefiniteness by symmetric elimination with positive
    /// diagonal pivots: a zero diagonal entry forces its row to vanish.
    pub fn is_psd(&self) -> bool {
        assert!(self.is_symmetric(), "psd test needs a symmetric matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut active: Vec<usize> = (0..n).collect();
        loop {
            let mut pivot = None;
            for &k in &active {
                match a[(k, k)].sign() {
                    1 => {
                        pivot = Some(k);
                        break;
                    }
                    -1 => return false,
                    _ => {}
                }
            }
            let Some(k) = pivot else {
                return active.iter().all(|&i| active.iter().all(|&j| a[(i, j)].is_zero()));
            };
            active.retain(|&i| i != k);
            let inv = a[(k, k)].inv().expect("positive pivot");
            for &i in &active {
                if a[(i, k)].is_zero() {
                    continue;
                }
                let f = &a[(i, k)] * &inv;
                for &j in &active {
                    let t = &f * &a[(k, j)];
                    a[(i, j)] = &a[(i, j)] - &t;
                }
            }
        }
    }
}

/// Rational matrix whose rational kernel is `{ v in Q^cols : M v = 0 }`.
///
/// Each row of `M` contributes `d` rational rows, one per power-basis
/// coordinate; block `k` holds the `alpha^k` coefficients.
pub fn restrict_scalars(m: &KMatrix) -> QMatrix {
    let d = m.field.degree();
    let mut out = QMatrix::zeros(d * m.rows, m.cols);
    for k in 0..d {
        for i in 0..m.rows {
            for j in 0..m.cols {
                out[(k * m.rows + i, j)] = m[(i, j)].coeffs()[k].clone();
            }
        }
    }
    out
}

impl Index<(usize, usize)> for KMatrix {
    type Output = AlgebraicReal;
    fn index(&self, (i, j): (usize, usize)) -> &AlgebraicReal {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for KMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut AlgebraicReal {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for KMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "KMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}
