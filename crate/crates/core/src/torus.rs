//! Complex tori `V / Lambda` presented by the lattice `Z^2n` and the matrix
//! `J` of multiplication by `i` on `Lambda (x) R` in the lattice basis, with
//! entries in a real number field.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactmath::{
    restrict_scalars, saturate, smith_normal_form, AlgebraicReal, IntMatrix, KMatrix, QMatrix, Rational,
    RealNumberField,
};

/// One factor of a product torus, occupying lattice coordinates
/// `offset..offset + 2 * dim`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorBlock {
    pub label: String,
    pub offset: usize,
    pub dim: usize,
    /// Set for elliptic factors built by [`ComplexTorus::elliptic`].
    pub has_cm: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct ComplexTorus {
    field: Arc<RealNumberField>,
    complex_structure: KMatrix,
    blocks: Vec<FactorBlock>,
}

impl ComplexTorus {
    /// Torus with an explicit complex structure; `J^2 = -I` is checked.
    pub fn new(complex_structure: KMatrix, label: impl Into<String>) -> Result<Self> {
        let n2 = complex_structure.rows();
        if n2 == 0 || n2 % 2 != 0 || complex_structure.cols() != n2 {
            return Err(Error::DimensionMismatch(format!(
                "complex structure must be a nonempty square matrix of even size, got {}x{}",
                n2,
                complex_structure.cols()
            )));
        }
        let field = complex_structure.field().clone();
        let square = complex_structure.mul(&complex_structure)?;
        if square != KMatrix::identity(&field, n2).neg() {
            return Err(Error::InconsistentComplexStructure);
        }
        let block = FactorBlock { label: label.into(), offset: 0, dim: n2 / 2, has_cm: None };
        Ok(ComplexTorus { field, complex_structure, blocks: vec![block] })
    }

    /// The elliptic curve `C / (Z + tau Z)` with `tau = a + i beta`, lattice
    /// basis `(1, tau)`.
    pub fn elliptic(a: Rational, beta: AlgebraicReal, label: impl Into<String>) -> Result<Self> {
        if beta.sign() <= 0 {
            return Err(Error::TauNotInUpperHalfPlane);
        }
        let field = beta.field().clone();
        let inv = beta.inv()?;
        let a_k = field.from_rational(a.clone());
        let a_over_beta = inv.scale(&a);
        // i * 1 = -a/beta + (1/beta) tau,  i * tau = -(beta + a^2/beta) + (a/beta) tau
        let j = KMatrix::from_rows(
            &field,
            vec![
                vec![-&a_over_beta, -(&beta + &(&a_k * &a_over_beta))],
                vec![inv, a_over_beta],
            ],
        )?;
        let has_cm = (&beta * &beta).as_rational().is_some();
        let mut torus = ComplexTorus::new(j, label)?;
        torus.blocks[0].has_cm = Some(has_cm);
        Ok(torus)
    }

    /// Product with block-diagonal complex structure; factor blocks are kept.
    pub fn product(factors: &[ComplexTorus]) -> Result<Self> {
        let first = factors.first().ok_or_else(|| Error::Validation("empty product".into()))?;
        let field = first.field.clone();
        if factors.iter().any(|f| f.field != field) {
            return Err(Error::FieldMismatch);
        }
        let n2: usize = factors.iter().map(ComplexTorus::lattice_rank).sum();
        let mut j = KMatrix::zeros(&field, n2, n2);
        let mut blocks = Vec::new();
        let mut offset = 0;
        for f in factors {
            let r = f.lattice_rank();
            for a in 0..r {
                for b in 0..r {
                    j[(offset + a, offset + b)] = f.complex_structure[(a, b)].clone();
                }
            }
            for b in &f.blocks {
                blocks.push(FactorBlock { offset: b.offset + offset, ..b.clone() });
            }
            offset += r;
        }
        Ok(ComplexTorus { field, complex_structure: j, blocks })
    }

    pub fn dim(&self) -> usize {
        self.complex_structure.rows() / 2
    }

    pub fn lattice_rank(&self) -> usize {
        self.complex_structure.rows()
    }

    pub fn field(&self) -> &Arc<RealNumberField> {
        &self.field
    }

    pub fn complex_structure(&self) -> &KMatrix {
        &self.complex_structure
    }

    pub fn blocks(&self) -> &[FactorBlock] {
        &self.blocks
    }

    /// CM flag of a one-dimensional torus built from `tau`.
    pub fn has_cm(&self) -> Option<bool> {
        match self.blocks.as_slice() {
            [b] => b.has_cm,
            _ => None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        if let [b] = self.blocks.as_mut_slice() {
            b.label = label.into();
        }
        self
    }

    /// The factor torus of block `index`.
    pub fn block_torus(&self, index: usize) -> ComplexTorus {
        let b = &self.blocks[index];
        let (lo, hi) = (b.offset, b.offset + 2 * b.dim);
        ComplexTorus {
            field: self.field.clone(),
            complex_structure: self.complex_structure.submatrix(lo, hi, lo, hi),
            blocks: vec![FactorBlock { offset: 0, ..b.clone() }],
        }
    }

    /// Product of the blocks with indices in `range`.
    pub fn sub_product(&self, range: std::ops::Range<usize>) -> Result<ComplexTorus> {
        let parts: Vec<ComplexTorus> = range.map(|i| self.block_torus(i)).collect();
        ComplexTorus::product(&parts)
    }

    /// Whether `E(Jx, Jy) = E(x, y)`, i.e. `J^T E J = E`, holds exactly.
    pub fn is_hodge(&self, form: &AlternatingForm) -> bool {
        if form.rank() != self.lattice_rank() {
            return false;
        }
        let e = KMatrix::from_qmatrix(&self.field, form.matrix());
        let j = &self.complex_structure;
        match j.transpose().mul(&e).and_then(|m| m.mul(j)) {
            Ok(m) => m == e,
            Err(_) => false,
        }
    }
}

/// Rational alternating form on the lattice, `E[i][j] = E(e_i, e_j)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlternatingForm {
    matrix: QMatrix,
}

impl AlternatingForm {
    pub fn new(matrix: QMatrix) -> Result<Self> {
        let n = matrix.rows();
        if matrix.cols() != n {
            return Err(Error::NotAlternating);
        }
        for i in 0..n {
            for j in i..n {
                if matrix[(i, j)] != -matrix[(j, i)].clone() {
                    return Err(Error::NotAlternating);
                }
            }
        }
        Ok(AlternatingForm { matrix })
    }

    pub fn zero(rank: usize) -> Self {
        AlternatingForm { matrix: QMatrix::zeros(rank, rank) }
    }

    /// Form with `E(e_i, e_j) = coords[k]` for the `k`-th pair `i < j` in
    /// lexicographic order.
    pub fn from_upper(rank: usize, coords: &[Rational]) -> Self {
        let mut m = QMatrix::zeros(rank, rank);
        let mut k = 0;
        for i in 0..rank {
            for j in i + 1..rank {
                m[(i, j)] = coords[k].clone();
                m[(j, i)] = -coords[k].clone();
                k += 1;
            }
        }
        assert_eq!(k, coords.len(), "wrong number of upper coordinates");
        AlternatingForm { matrix: m }
    }

    pub fn upper_coords(&self) -> Vec<Rational> {
        let n = self.rank();
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| self.matrix[(i, j)].clone()).collect()
    }

    /// Lattice rank `2n` the form lives on.
    pub fn rank(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.matrix
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn scaled(&self, k: &Rational) -> Self {
        AlternatingForm { matrix: self.matrix.scale(k) }
    }

    pub fn add(&self, other: &AlternatingForm) -> Self {
        AlternatingForm { matrix: self.matrix.add(&other.matrix) }
    }

    pub fn neg(&self) -> Self {
        AlternatingForm { matrix: self.matrix.neg() }
    }

    /// Entries as integers, if integral.
    pub fn integer_rows(&self) -> Option<Vec<Vec<BigInt>>> {
        let n = self.rank();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let q = &self.matrix[(i, j)];
                        q.is_integer().then(|| q.numer().clone())
                    })
                    .collect()
            })
            .collect()
    }
}

/// Saturated, `J`-stable sublattice `W` of even rank `2m`, stored with a
/// unimodular completion: `complement`'s first `2m` columns span `W` and
/// `coordinates = complement^-1`.
#[derive(Clone, Debug)]
pub struct Sublattice {
    rank: usize,
    complement: IntMatrix,
    coordinates: IntMatrix,
}

impl Sublattice {
    /// Saturates the column span of `basis` and checks it is a complex
    /// subtorus lattice.
    pub fn new(torus: &ComplexTorus, basis: &IntMatrix) -> Result<Self> {
        let n2 = torus.lattice_rank();
        if basis.rows() != n2 {
            return Err(Error::DimensionMismatch(format!("basis vectors must have length {n2}")));
        }
        if basis.cols() % 2 != 0 {
            return Err(Error::NotComplexSubtorus(format!(
                "rank {} is odd; a complex subtorus has even lattice rank",
                basis.cols()
            )));
        }
        let saturated = if basis.cols() == 0 { basis.clone() } else { saturate(basis)? };
        let snf = smith_normal_form(&saturated);
        let w = Sublattice { rank: basis.cols(), complement: snf.left_inv, coordinates: snf.left };
        if !w.is_stable(torus)? {
            return Err(Error::NotComplexSubtorus("lattice is not J-stable".into()));
        }
        Ok(w)
    }

    /// Sublattice spanned by the coordinate vectors of the given blocks.
    pub fn of_blocks(torus: &ComplexTorus, blocks: &[usize]) -> Result<Self> {
        let n2 = torus.lattice_rank();
        let mut cols = Vec::new();
        for &b in blocks {
            let blk = torus.blocks.get(b).ok_or_else(|| Error::Validation(format!("no block {b}")))?;
            for k in blk.offset..blk.offset + 2 * blk.dim {
                let mut v = vec![BigInt::zero(); n2];
                v[k] = BigInt::one();
                cols.push(v);
            }
        }
        Sublattice::new(torus, &IntMatrix::from_columns(n2, &cols))
    }

    pub fn zero(torus: &ComplexTorus) -> Self {
        let n2 = torus.lattice_rank();
        Sublattice { rank: 0, complement: IntMatrix::identity(n2), coordinates: IntMatrix::identity(n2) }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ambient_rank(&self) -> usize {
        self.complement.rows()
    }

    pub fn corank(&self) -> usize {
        self.ambient_rank() - self.rank
    }

    /// Saturated basis of `W` as columns.
    pub fn basis(&self) -> IntMatrix {
        self.complement.columns(0, self.rank)
    }

    /// Unimodular basis of the lattice extending the basis of `W`.
    pub fn completed_basis(&self) -> &IntMatrix {
        &self.complement
    }

    /// Rows are the linear forms giving coordinates on `Lambda / W`.
    pub fn quotient_coordinates(&self) -> IntMatrix {
        self.coordinates.row_block(self.rank, self.ambient_rank())
    }

    fn conjugated_structure(&self, torus: &ComplexTorus) -> Result<KMatrix> {
        let field = torus.field();
        let p = KMatrix::from_qmatrix(field, &self.complement.to_qmatrix());
        let l = KMatrix::from_qmatrix(field, &self.coordinates.to_qmatrix());
        l.mul(torus.complex_structure())?.mul(&p)
    }

    fn is_stable(&self, torus: &ComplexTorus) -> Result<bool> {
        let c = self.conjugated_structure(torus)?;
        let n2 = self.ambient_rank();
        Ok(c.submatrix(self.rank, n2, 0, self.rank).is_zero())
    }

    /// `W` as a complex torus with the restricted complex structure.
    pub fn as_torus(&self, torus: &ComplexTorus) -> Result<ComplexTorus> {
        if self.rank == 0 {
            return Err(Error::DimensionMismatch("zero sublattice is not a torus".into()));
        }
        let c = self.conjugated_structure(torus)?;
        ComplexTorus::new(c.submatrix(0, self.rank, 0, self.rank), "W")
    }

    /// Coordinates of the rational span (reduced row echelon form of the
    /// transposed basis), usable as a canonical key.
    pub fn canonical_span(&self) -> QMatrix {
        self.basis().to_qmatrix().transpose().rref().0
    }
}

/// Checked constructor matching the quotient workflow.
pub fn subtorus(torus: &ComplexTorus, basis: &IntMatrix) -> Result<Sublattice> {
    Sublattice::new(torus, basis)
}

/// The quotient torus `A / W` with complex structure induced on the
/// complement coordinates.
pub fn quotient(torus: &ComplexTorus, w: &Sublattice) -> Result<ComplexTorus> {
    if w.ambient_rank() != torus.lattice_rank() {
        return Err(Error::DimensionMismatch("sublattice of a different torus".into()));
    }
    if w.rank() == 0 {
        return Ok(torus.clone());
    }
    if w.corank() == 0 {
        return Err(Error::DimensionMismatch("quotient by the full lattice is a point".into()));
    }
    let c = w.conjugated_structure(torus)?;
    let n2 = w.ambient_rank();
    ComplexTorus::new(c.submatrix(w.rank(), n2, w.rank(), n2), "B")
}

/// `rk Hom(A, B)`: dimension of the rational matrices `M` with
/// `J_B M = M J_A`.
pub fn hom_rank(a: &ComplexTorus, b: &ComplexTorus) -> Result<usize> {
    if a.field != b.field {
        return Err(Error::FieldMismatch);
    }
    let (na, nb) = (a.lattice_rank(), b.lattice_rank());
    let (ja, jb) = (&a.complex_structure, &b.complex_structure);
    let unknown = |r: usize, c: usize| r * na + c;
    let mut system = KMatrix::zeros(&a.field, nb * na, nb * na);
    for p in 0..nb {
        for q in 0..na {
            let row = p * na + q;
            // (J_B M)_{pq} = sum_r J_B[p][r] M[r][q]
            for r in 0..nb {
                let x = &jb[(p, r)];
                if !x.is_zero() {
                    let idx = unknown(r, q);
                    system[(row, idx)] = &system[(row, idx)] + x;
                }
            }
            // (M J_A)_{pq} = sum_c M[p][c] J_A[c][q]
            for c in 0..na {
                let x = &ja[(c, q)];
                if !x.is_zero() {
                    let idx = unknown(p, c);
                    system[(row, idx)] = &system[(row, idx)] - x;
                }
            }
        }
    }
    Ok(restrict_scalars(&system).kernel_basis().len())
}

/// Q-basis of `NS(A)_Q`: rational alternating forms with `E(Jx, Jy) = E(x, y)`.
pub fn ns_basis(a: &ComplexTorus) -> Vec<AlternatingForm> {
    let n2 = a.lattice_rank();
    let pairs: Vec<(usize, usize)> = (0..n2).flat_map(|i| (i + 1..n2).map(move |j| (i, j))).collect();
    let j = &a.complex_structure;
    let mut system = KMatrix::zeros(&a.field, pairs.len(), pairs.len());
    for (row, &(p, q)) in pairs.iter().enumerate() {
        for (col, &(i, k)) in pairs.iter().enumerate() {
            // coefficient of E_ik in (J^T E J)_pq - E_pq
            let mut x = &(&j[(i, p)] * &j[(k, q)]) - &(&j[(k, p)] * &j[(i, q)]);
            if (p, q) == (i, k) {
                x = &x - &a.field.one();
            }
            system[(row, col)] = x;
        }
    }
    restrict_scalars(&system).kernel_basis().into_iter().map(|v| AlternatingForm::from_upper(n2, &v)).collect()
}

/// Picard number `rho_A = |ns_basis(A)|`.
pub fn picard_number(a: &ComplexTorus) -> usize {
    ns_basis(a).len()
}
