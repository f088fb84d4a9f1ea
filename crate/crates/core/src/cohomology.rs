//! Exterior-algebra model of `H*(A, Q) = Lambda^* Hom(Lambda, Q)`.
//!
//! Degree-`k` classes are coordinate vectors over the `k`-subsets of the dual
//! lattice basis in lexicographic order; subsets are stored as bitmasks.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactmath::{IntMatrix, QMatrix, Rational};
use crate::torus::{ns_basis, AlternatingForm, ComplexTorus, Sublattice};

/// Lexicographically ordered `k`-subsets of `{0, .., rank-1}`.
#[derive(Clone, Debug)]
pub struct WedgeBasis {
    rank: usize,
    degree: usize,
    subsets: Vec<u32>,
    index: HashMap<u32, usize>,
}

impl WedgeBasis {
    pub fn new(rank: usize, degree: usize) -> Self {
        assert!(rank <= 32, "lattice rank above 32 is not supported");
        let mut subsets = Vec::new();
        if degree <= rank {
            let mut current = Vec::with_capacity(degree);
            lex_subsets(rank, degree, 0, &mut current, &mut subsets);
        }
        let index = subsets.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        WedgeBasis { rank, degree, subsets, index }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    pub fn mask(&self, i: usize) -> u32 {
        self.subsets[i]
    }

    /// Indices of the `i`-th subset, increasing.
    pub fn subset(&self, i: usize) -> Vec<usize> {
        bits(self.subsets[i])
    }

    pub fn index_of(&self, mask: u32) -> Option<usize> {
        self.index.get(&mask).copied()
    }
}

fn lex_subsets(rank: usize, k: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<u32>) {
    if current.len() == k {
        out.push(current.iter().fold(0u32, |m, &i| m | 1 << i));
        return;
    }
    for i in start..rank {
        if rank - i < k - current.len() {
            break;
        }
        current.push(i);
        lex_subsets(rank, k, i + 1, current, out);
        current.pop();
    }
}

fn bits(mask: u32) -> Vec<usize> {
    (0..32).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Sign of `e_a ^ e_b` relative to `e_(a|b)` for disjoint masks.
fn shuffle_sign(a: u32, b: u32) -> i32 {
    let mut inversions = 0;
    for j in bits(b) {
        inversions += (a >> (j + 1)).count_ones();
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExteriorClass {
    rank: usize,
    degree: usize,
    coords: Vec<Rational>,
}

impl ExteriorClass {
    pub fn zero(rank: usize, degree: usize) -> Self {
        let len = WedgeBasis::new(rank, degree).len();
        ExteriorClass { rank, degree, coords: vec![Rational::zero(); len] }
    }

    /// The unit `1` in degree 0.
    pub fn unit(rank: usize) -> Self {
        ExteriorClass { rank, degree: 0, coords: vec![Rational::one()] }
    }

    pub fn from_coords(rank: usize, degree: usize, coords: Vec<Rational>) -> Result<Self> {
        let len = WedgeBasis::new(rank, degree).len();
        if coords.len() != len {
            return Err(Error::DimensionMismatch(format!("degree {degree} needs {len} coordinates")));
        }
        Ok(ExteriorClass { rank, degree, coords })
    }

    /// `e*_{i1} ^ ... ^ e*_{ik}` for 0-based indices in any order.
    pub fn basis_element(rank: usize, indices: &[usize]) -> Self {
        let mut class = ExteriorClass::unit(rank);
        for &i in indices {
            let mut e = ExteriorClass::zero(rank, 1);
            e.coords[i] = Rational::one();
            class = wedge(&class, &e).expect("degree within rank");
        }
        class
    }

    /// Wedge product of degree-one forms given by integer rows.
    pub fn product_of_linear_forms(rank: usize, forms: &IntMatrix) -> Self {
        let mut class = ExteriorClass::unit(rank);
        for r in 0..forms.rows() {
            let coords = (0..rank).map(|j| Rational::from_integer(forms[(r, j)].clone())).collect();
            let e = ExteriorClass { rank, degree: 1, coords };
            class = wedge(&class, &e).expect("degree within rank");
        }
        class
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &ExteriorClass) -> Result<ExteriorClass> {
        if (self.rank, self.degree) != (other.rank, other.degree) {
            return Err(Error::DimensionMismatch("adding classes of different degree".into()));
        }
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect();
        Ok(ExteriorClass { coords, ..self.clone() })
    }

    pub fn scale(&self, k: &Rational) -> ExteriorClass {
        ExteriorClass { coords: self.coords.iter().map(|c| c * k).collect(), ..self.clone() }
    }
}

/// Cup product `u ^ v`.
pub fn wedge(u: &ExteriorClass, v: &ExteriorClass) -> Result<ExteriorClass> {
    if u.rank != v.rank {
        return Err(Error::DimensionMismatch("classes on different lattices".into()));
    }
    let degree = u.degree + v.degree;
    if degree > u.rank {
        return Err(Error::DegreeOverflow(format!(
            "degree {} + {} exceeds top degree {}",
            u.degree, v.degree, u.rank
        )));
    }
    let (bu, bv, bout) =
        (WedgeBasis::new(u.rank, u.degree), WedgeBasis::new(u.rank, v.degree), WedgeBasis::new(u.rank, degree));
    let mut coords = vec![Rational::zero(); bout.len()];
    for (i, a) in u.coords.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let ma = bu.mask(i);
        for (j, b) in v.coords.iter().enumerate() {
            let mb = bv.mask(j);
            if b.is_zero() || ma & mb != 0 {
                continue;
            }
            let k = bout.index_of(ma | mb).expect("subset present");
            let t = a * b;
            if shuffle_sign(ma, mb) > 0 {
                coords[k] += t;
            } else {
                coords[k] -= t;
            }
        }
    }
    Ok(ExteriorClass { rank: u.rank, degree, coords })
}

/// `sum_{i<j} E(e_i, e_j) e*_i ^ e*_j`.
pub fn class_of_form(form: &AlternatingForm) -> ExteriorClass {
    ExteriorClass { rank: form.rank(), degree: 2, coords: form.upper_coords() }
}

pub fn form_of_class(class: &ExteriorClass) -> Result<AlternatingForm> {
    if class.degree != 2 {
        return Err(Error::DimensionMismatch("only degree-2 classes are forms".into()));
    }
    Ok(AlternatingForm::from_upper(class.rank, &class.coords))
}

/// Matrix of `x -> x ^ e` from degree 2 to degree `2 + deg e`, on the wedge
/// bases.
pub fn cup_matrix(a: &ComplexTorus, e: &ExteriorClass) -> Result<QMatrix> {
    if a.dim() < 2 {
        return Err(Error::TrivialTopCohomology);
    }
    if e.rank != a.lattice_rank() {
        return Err(Error::DimensionMismatch("class lives on a different lattice".into()));
    }
    cup_matrix_on(a.lattice_rank(), 2, e)
}

fn cup_matrix_on(rank: usize, source_degree: usize, e: &ExteriorClass) -> Result<QMatrix> {
    let target_degree = source_degree + e.degree;
    if target_degree > rank {
        return Err(Error::DegreeOverflow(format!("target degree {target_degree} exceeds {rank}")));
    }
    let (src, dst, be) =
        (WedgeBasis::new(rank, source_degree), WedgeBasis::new(rank, target_degree), WedgeBasis::new(rank, e.degree));
    let mut m = QMatrix::zeros(dst.len(), src.len());
    for col in 0..src.len() {
        let ms = src.mask(col);
        for (k, c) in e.coords.iter().enumerate() {
            let me = be.mask(k);
            if c.is_zero() || ms & me != 0 {
                continue;
            }
            let row = dst.index_of(ms | me).unwrap();
            if shuffle_sign(ms, me) > 0 {
                m[(row, col)] += c;
            } else {
                m[(row, col)] -= c;
            }
        }
    }
    Ok(m)
}

/// Columns are the upper coordinates of the given forms.
pub(crate) fn forms_as_columns(rank: usize, forms: &[AlternatingForm]) -> QMatrix {
    let cols: Vec<Vec<Rational>> = forms.iter().map(AlternatingForm::upper_coords).collect();
    QMatrix::from_columns(rank * (rank - 1) / 2, &cols)
}

/// `delta_A(D) = dim ker(NS(A)_Q --^[D]--> H^4(A, Q))`.
pub fn defect_of_class(a: &ComplexTorus, d: &AlternatingForm) -> Result<usize> {
    if a.dim() < 2 {
        return Err(Error::TrivialTopCohomology);
    }
    if !a.is_hodge(d) {
        return Err(Error::NotHodgeClass);
    }
    let ns = ns_basis(a);
    let cup = cup_matrix(a, &class_of_form(d))?;
    let restricted = cup.mul(&forms_as_columns(a.lattice_rank(), &ns));
    Ok(ns.len() - restricted.rank())
}

/// `Lambda`-defect: kernel dimension of `^[D]` on the span of `lambda`
/// inside `NS(A)_Q`.
pub fn lambda_defect(a: &ComplexTorus, lambda: &[AlternatingForm], d: &AlternatingForm) -> Result<usize> {
    if a.dim() < 2 {
        return Err(Error::TrivialTopCohomology);
    }
    if !a.is_hodge(d) || lambda.iter().any(|l| !a.is_hodge(l)) {
        return Err(Error::NotHodgeClass);
    }
    if lambda.is_empty() {
        return Ok(0);
    }
    let span = forms_as_columns(a.lattice_rank(), lambda);
    let cup = cup_matrix(a, &class_of_form(d))?;
    Ok(span.rank() - cup.mul(&span).rank())
}

/// Pullback of degree-`k` forms along the inclusion given by the columns of
/// `basis`: `Lambda^k(Z^N)* -> Lambda^k(W)*`, entries are `k x k` minors.
pub fn pullback_matrix(basis: &IntMatrix, degree: usize) -> QMatrix {
    let (n, r) = (basis.rows(), basis.cols());
    let (src, dst) = (WedgeBasis::new(n, degree), WedgeBasis::new(r, degree));
    let b = basis.to_qmatrix();
    let mut m = QMatrix::zeros(dst.len(), src.len());
    for row in 0..dst.len() {
        let w_idx = dst.subset(row);
        for col in 0..src.len() {
            let l_idx = src.subset(col);
            let minor: Vec<Vec<Rational>> =
                l_idx.iter().map(|&i| w_idx.iter().map(|&j| b[(i, j)].clone()).collect()).collect();
            m[(row, col)] = small_det(minor);
        }
    }
    m
}

fn small_det(mut a: Vec<Vec<Rational>>) -> Rational {
    let n = a.len();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return Rational::zero() };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        for i in c + 1..n {
            let f = &a[i][c] / &a[c][c];
            for j in c..n {
                let t = &f * &a[c][j];
                a[i][j] -= t;
            }
        }
    }
    det
}

/// Restriction of 2-forms to the sublattice `W`, `Lambda^2(Lambda*) ->
/// Lambda^2(W*)`.
pub fn restriction_map(a: &ComplexTorus, w: &Sublattice) -> Result<QMatrix> {
    if w.ambient_rank() != a.lattice_rank() {
        return Err(Error::DimensionMismatch("sublattice of a different torus".into()));
    }
    if w.rank() < 2 {
        return Err(Error::DegreeOverflow("restriction to a sublattice of rank < 2".into()));
    }
    Ok(pullback_matrix(&w.basis(), 2))
}

/// Class of the subtorus with lattice `W`: the pullback of the generator of
/// the top exterior power of `(Lambda / W)*`, ordered by the completed basis.
pub fn poincare_dual(a: &ComplexTorus, w: &Sublattice) -> Result<ExteriorClass> {
    if w.ambient_rank() != a.lattice_rank() {
        return Err(Error::DimensionMismatch("sublattice of a different torus".into()));
    }
    Ok(ExteriorClass::product_of_linear_forms(a.lattice_rank(), &w.quotient_coordinates()))
}

/// Kernels on `NS(A)_Q` of restriction to `W` and of `^[W]`, as matrices
/// whose columns are NS-coordinate vectors.
pub fn voisin_kernels(a: &ComplexTorus, w: &Sublattice) -> Result<(QMatrix, QMatrix)> {
    let ns = ns_basis(a);
    let span = forms_as_columns(a.lattice_rank(), &ns);
    let restricted = restriction_map(a, w)?.mul(&span);
    let dual = poincare_dual(a, w)?;
    let cupped = cup_matrix_on(a.lattice_rank(), 2, &dual)?.mul(&span);
    let rho = ns.len();
    let k1 = QMatrix::from_columns(rho, &restricted.kernel_basis());
    let k2 = QMatrix::from_columns(rho, &cupped.kernel_basis());
    Ok((k1, k2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{rat, RealNumberField};
    use crate::torus::ComplexTorus;
    use proptest::prelude::*;

    fn e(rank: usize, idx: &[usize]) -> ExteriorClass {
        ExteriorClass::basis_element(rank, idx)
    }

    #[test]
    fn wedge_examples() {
        let e1 = e(4, &[0]);
        let e2 = e(4, &[1]);
        let e12 = wedge(&e1, &e2).unwrap();
        let mut want = ExteriorClass::zero(4, 2);
        want.coords[0] = rat(1);
        assert_eq!(e12, want);
        assert_eq!(wedge(&e2, &e1).unwrap(), want.scale(&rat(-1)));
        assert!(wedge(&e1, &e1).unwrap().is_zero());
        let top = e(4, &[0, 1, 2, 3]);
        assert!(matches!(wedge(&top, &e1), Err(Error::DegreeOverflow(_))));
    }

    #[test]
    fn basis_is_lexicographic() {
        let b = WedgeBasis::new(4, 2);
        let subsets: Vec<Vec<usize>> = (0..b.len()).map(|i| b.subset(i)).collect();
        assert_eq!(subsets, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(WedgeBasis::new(6, 4).len(), 15);
    }

    #[test]
    fn class_of_standard_symplectic_form() {
        let f = AlternatingForm::new(QMatrix::from_i64_rows(&[&[0, 1], &[-1, 0]])).unwrap();
        assert_eq!(class_of_form(&f), e(2, &[0, 1]));
        assert!(class_of_form(&AlternatingForm::zero(4)).is_zero());
    }

    fn gaussian_square() -> ComplexTorus {
        let q = RealNumberField::rationals();
        let ei = ComplexTorus::elliptic(rat(0), q.one(), "E_i").unwrap();
        ComplexTorus::product(&[ei.clone(), ei]).unwrap()
    }

    #[test]
    fn cup_matrix_examples() {
        let a = gaussian_square();
        let m = cup_matrix(&a, &e(4, &[0, 1])).unwrap();
        // image of {2,3} (index 5) is {0,1,2,3}
        assert_eq!(m[(0, 5)], rat(1));
        assert!(cup_matrix(&a, &ExteriorClass::zero(4, 2)).unwrap().is_zero());
        let h = e(4, &[0, 1]).add(&e(4, &[2, 3])).unwrap();
        assert_eq!(cup_matrix(&a, &h.scale(&rat(2))).unwrap(), cup_matrix(&a, &h).unwrap().scale(&rat(2)));
        let q = RealNumberField::rationals();
        let curve = ComplexTorus::elliptic(rat(0), q.one(), "E").unwrap();
        assert_eq!(cup_matrix(&curve, &e(2, &[0, 1])), Err(Error::TrivialTopCohomology));
    }

    #[test]
    fn restriction_examples() {
        let a = gaussian_square();
        let full = Sublattice::new(&a, &IntMatrix::identity(4)).unwrap();
        assert_eq!(restriction_map(&a, &full).unwrap(), QMatrix::identity(6));
        let first = Sublattice::of_blocks(&a, &[0]).unwrap();
        let r = restriction_map(&a, &first).unwrap();
        let f2 = e(4, &[2, 3]);
        assert!(r.mul_vec(f2.coords()).iter().all(Zero::is_zero));
        assert!(matches!(restriction_map(&a, &Sublattice::zero(&a)), Err(Error::DegreeOverflow(_))));
    }

    #[test]
    fn poincare_dual_examples() {
        let a = gaussian_square();
        let first = Sublattice::of_blocks(&a, &[0]).unwrap();
        let pd = poincare_dual(&a, &first).unwrap();
        assert!(pd == e(4, &[2, 3]) || pd == e(4, &[2, 3]).scale(&rat(-1)));
        let full = Sublattice::new(&a, &IntMatrix::identity(4)).unwrap();
        assert_eq!(poincare_dual(&a, &full).unwrap(), ExteriorClass::unit(4));
    }

    #[test]
    fn poincare_duals_intersect_transversally() {
        let q = RealNumberField::rationals();
        let ei = ComplexTorus::elliptic(rat(0), q.one(), "E").unwrap();
        let a = ComplexTorus::product(&[ei.clone(), ei.clone(), ei]).unwrap();
        let w01 = Sublattice::of_blocks(&a, &[0, 1]).unwrap();
        let w12 = Sublattice::of_blocks(&a, &[1, 2]).unwrap();
        let w1 = Sublattice::of_blocks(&a, &[1]).unwrap();
        let lhs = wedge(&poincare_dual(&a, &w01).unwrap(), &poincare_dual(&a, &w12).unwrap()).unwrap();
        let rhs = poincare_dual(&a, &w1).unwrap();
        assert!(lhs == rhs || lhs == rhs.scale(&rat(-1)));
        assert!(!lhs.is_zero());
    }

    #[test]
    fn pullback_is_multiplicative() {
        let basis = IntMatrix::from_i64_rows(&[&[1, 0], &[2, 1], &[0, 3], &[1, 1]]);
        let r1 = pullback_matrix(&basis, 1);
        let r2 = pullback_matrix(&basis, 2);
        let u = ExteriorClass::from_coords(4, 1, vec![rat(1), rat(-2), rat(0), rat(3)]).unwrap();
        let v = ExteriorClass::from_coords(4, 1, vec![rat(0), rat(1), rat(5), rat(-1)]).unwrap();
        let uv = wedge(&u, &v).unwrap();
        let ru = ExteriorClass::from_coords(2, 1, r1.mul_vec(u.coords())).unwrap();
        let rv = ExteriorClass::from_coords(2, 1, r1.mul_vec(v.coords())).unwrap();
        assert_eq!(r2.mul_vec(uv.coords()), wedge(&ru, &rv).unwrap().coords().to_vec());
    }

    fn class(rank: usize, degree: usize) -> impl Strategy<Value = ExteriorClass> {
        let len = WedgeBasis::new(rank, degree).len();
        proptest::collection::vec(-3i64..=3, len)
            .prop_map(move |v| ExteriorClass::from_coords(rank, degree, v.into_iter().map(rat).collect()).unwrap())
    }

    proptest! {
        #[test]
        fn graded_commutative(u in class(6, 1), v in class(6, 2), w in class(6, 3)) {
            prop_assert_eq!(wedge(&u, &v).unwrap(), wedge(&v, &u).unwrap());
            prop_assert_eq!(wedge(&u, &w).unwrap(), wedge(&w, &u).unwrap().scale(&rat(-1)));
            let uu = wedge(&u, &u).unwrap();
            prop_assert!(uu.is_zero());
        }

        #[test]
        fn associative(u in class(6, 1), v in class(6, 2), w in class(6, 2)) {
            let left = wedge(&wedge(&u, &v).unwrap(), &w).unwrap();
            let right = wedge(&u, &wedge(&v, &w).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }
    }
}
