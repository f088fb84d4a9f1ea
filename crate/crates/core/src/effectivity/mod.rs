//! Positivity of Néron-Severi classes, Iitaka quotients, and the global
//! defect search on explicit tori.

mod search;

pub use search::{torus_defect, torus_defect_with, DefectSearchResult, SearchAudit, SearchOptions};

use num_bigint::BigInt;

use crate::classifier::divisor_case;
use crate::error::{Error, Result};
use crate::exactmath::{IntMatrix, KMatrix};
use crate::torus::{hom_rank, picard_number, quotient, AlternatingForm, ComplexTorus, Sublattice};

/// `S(x, y) = E(Jx, y)`, i.e. `S = J^T E`.
pub fn symmetric_part(a: &ComplexTorus, e: &AlternatingForm) -> Result<KMatrix> {
    if !a.is_hodge(e) {
        return Err(Error::NotHodgeClass);
    }
    let field = a.field();
    a.complex_structure().transpose().mul(&KMatrix::from_qmatrix(field, e.matrix()))
}

/// Nonzero with positive semidefinite symmetric part, decided by the signs of
/// all principal minors. Classes outside `NS(A)` are not effective.
pub fn is_effective_class(a: &ComplexTorus, e: &AlternatingForm) -> bool {
    if e.is_zero() {
        return false;
    }
    match symmetric_part(a, e) {
        Ok(s) => s.is_psd_by_minors(),
        Err(_) => false,
    }
}

fn kernel_sublattice(a: &ComplexTorus, e: &AlternatingForm) -> Result<Sublattice> {
    let kernel = e.matrix().kernel_basis();
    if kernel.is_empty() {
        return Ok(Sublattice::zero(a));
    }
    let basis = IntMatrix::from_rational_columns(a.lattice_rank(), &kernel);
    Sublattice::new(a, &basis)
}

/// The saturated lattice `{x : E(x, .) = 0}` of an effective class.
pub fn radical(a: &ComplexTorus, e: &AlternatingForm) -> Result<Sublattice> {
    if !is_effective_class(a, e) {
        return Err(Error::NotEffective);
    }
    kernel_sublattice(a, e)
}

/// `b = n - rank(radical) / 2`, the dimension of the quotient `B`.
pub fn iitaka_dimension(a: &ComplexTorus, e: &AlternatingForm) -> Result<usize> {
    let r = radical(a, e)?;
    match a.dim() - r.rank() / 2 {
        0 => Err(Error::ImpossibleCase("b = 0 cannot occur for an effective divisor".into())),
        b => Ok(b),
    }
}

#[derive(Clone, Debug)]
pub struct EffectivityReport {
    pub class: AlternatingForm,
    pub is_effective: bool,
    pub radical_rank: usize,
    pub iitaka_dim: Option<usize>,
    pub quotient: Option<ComplexTorus>,
}

pub fn effectivity_report(a: &ComplexTorus, e: &AlternatingForm) -> Result<EffectivityReport> {
    if !a.is_hodge(e) {
        return Err(Error::NotHodgeClass);
    }
    let kernel = kernel_sublattice(a, e)?;
    let is_effective = is_effective_class(a, e);
    let (iitaka_dim, quotient) = if is_effective {
        (Some(iitaka_dimension(a, e)?), Some(quotient(a, &kernel)?))
    } else {
        (None, None)
    };
    Ok(EffectivityReport { class: e.clone(), is_effective, radical_rank: kernel.rank(), iitaka_dim, quotient })
}

/// Invariants of the Iitaka quotient `B = A / radical` that determine the
/// defect of an effective class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseAnalysis {
    pub b: usize,
    pub rho_b: usize,
    /// For `b = 1`: whether `B` has complex multiplication.
    pub cm: Option<bool>,
    /// For `b = 1`: multiplicity of `B` as an isogeny factor of `A`.
    pub k: Option<usize>,
    /// The defect predicted from `(b, rho_B, cm, k)`.
    pub predicted: usize,
    /// For `b = 1`: `1 + rk Hom(B, C)` with `C` the radical subtorus.
    pub hom_formula: Option<usize>,
}

/// Case analysis of an effective class from its radical quotient.
pub fn case_analysis(a: &ComplexTorus, e: &AlternatingForm) -> Result<CaseAnalysis> {
    let r = radical(a, e)?;
    case_analysis_of_radical(a, &r)
}

pub(crate) fn case_analysis_of_radical(a: &ComplexTorus, r: &Sublattice) -> Result<CaseAnalysis> {
    let b = a.dim() - r.rank() / 2;
    let bt = quotient(a, r)?;
    let rho_b = picard_number(&bt);
    let (mut cm, mut k, mut hom_formula) = (None, None, None);
    if b == 1 {
        let end = hom_rank(&bt, &bt)?;
        cm = Some(end == 2);
        k = Some(hom_rank(&bt, a)? / end);
        hom_formula = Some(1 + hom_rank(&bt, &r.as_torus(a)?)?);
    }
    let predicted = divisor_case(b, Some(rho_b), cm, k)?;
    Ok(CaseAnalysis { b, rho_b, cm, k, predicted, hom_formula })
}

/// Principal polarization of an elliptic block, pulled back to `A`, with
/// the sign that makes it effective.
pub fn fiber_class_of(a: &ComplexTorus, block: usize) -> Option<AlternatingForm> {
    let blk = &a.blocks()[block];
    if blk.dim != 1 {
        return None;
    }
    let n2 = a.lattice_rank();
    let mut rows = vec![vec![BigInt::from(0); n2]; n2];
    rows[blk.offset][blk.offset + 1] = BigInt::from(-1);
    rows[blk.offset + 1][blk.offset] = BigInt::from(1);
    let m = crate::exactmath::QMatrix::from_rows(
        rows.into_iter().map(|r| r.into_iter().map(crate::exactmath::Rational::from_integer).collect()).collect(),
    );
    let f = AlternatingForm::new(m).ok()?;
    if is_effective_class(a, &f) {
        Some(f)
    } else {
        Some(f.neg())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::defect_of_class;
    use crate::exactmath::{rat, QMatrix, RealNumberField};
    use crate::torus::{ns_basis, ComplexTorus};
    use proptest::prelude::*;

    fn curves() -> (ComplexTorus, ComplexTorus) {
        let q = RealNumberField::rationals();
        let e = ComplexTorus::elliptic(rat(0), q.one(), "E_i").unwrap();
        let f = ComplexTorus::elliptic(rat(0), q.from_rational(rat(2)), "E_2i").unwrap();
        (e, f)
    }

    fn form(rows: &[&[i64]]) -> AlternatingForm {
        AlternatingForm::new(QMatrix::from_i64_rows(rows)).unwrap()
    }

    #[test]
    fn symmetric_part_of_principal_polarization() {
        let (e, _) = curves();
        let s = symmetric_part(&e, &form(&[&[0, -1], &[1, 0]])).unwrap();
        assert_eq!(s, KMatrix::identity(e.field(), 2));
        let s = symmetric_part(&e, &AlternatingForm::zero(2)).unwrap();
        assert!(s.is_zero());
    }

    #[test]
    fn symmetric_part_rejects_non_hodge() {
        let (e, f) = curves();
        let a = ComplexTorus::product(&[e.clone(), f]).unwrap();
        // pairing the two non-isogenous factors is not a Hodge class
        let bad = form(&[&[0, 0, 1, 0], &[0, 0, 0, 0], &[-1, 0, 0, 0], &[0, 0, 0, 0]]);
        assert_eq!(symmetric_part(&a, &bad), Err(Error::NotHodgeClass));
        assert!(!is_effective_class(&a, &bad));
    }

    #[test]
    fn effectivity_examples() {
        let (e, f) = curves();
        let a = ComplexTorus::product(&[e, f]).unwrap();
        let f1 = fiber_class_of(&a, 0).unwrap();
        let f2 = fiber_class_of(&a, 1).unwrap();
        assert!(is_effective_class(&a, &f1.add(&f2)));
        assert!(!is_effective_class(&a, &f1.add(&f2.neg())));
        assert!(!is_effective_class(&a, &AlternatingForm::zero(4)));
    }

    #[test]
    fn radical_examples() {
        let (e, f) = curves();
        let a = ComplexTorus::product(&[e, f]).unwrap();
        let f1 = fiber_class_of(&a, 0).unwrap();
        let f2 = fiber_class_of(&a, 1).unwrap();
        assert_eq!(radical(&a, &f1.add(&f2)).unwrap().rank(), 0);
        assert_eq!(iitaka_dimension(&a, &f1.add(&f2)).unwrap(), 2);
        let r = radical(&a, &f2).unwrap();
        let first = Sublattice::of_blocks(&a, &[0]).unwrap();
        assert_eq!(r.canonical_span(), first.canonical_span());
        assert_eq!(iitaka_dimension(&a, &f2).unwrap(), 1);
        assert_eq!(radical(&a, &f2.neg()).unwrap_err(), Error::NotEffective);
    }

    #[test]
    fn report_and_case_analysis() {
        let k = crate::torus::tests::fourth_root_two();
        let e = ComplexTorus::elliptic(rat(0), k.one(), "E_i").unwrap();
        let f = ComplexTorus::elliptic(rat(0), k.generator(), "E_a").unwrap();
        let a = ComplexTorus::product(&[e.clone(), e, f]).unwrap();
        let f3 = fiber_class_of(&a, 2).unwrap();
        let rep = effectivity_report(&a, &f3).unwrap();
        assert!(rep.is_effective);
        assert_eq!((rep.radical_rank, rep.iitaka_dim), (4, Some(1)));
        assert_eq!(rep.quotient.unwrap().dim(), 1);
        let c = case_analysis(&a, &f3).unwrap();
        assert_eq!((c.cm, c.k, c.predicted, c.hom_formula), (Some(false), Some(1), 1, Some(1)));
        let f1 = fiber_class_of(&a, 0).unwrap();
        let c = case_analysis(&a, &f1).unwrap();
        assert_eq!((c.k, c.predicted, c.hom_formula), (Some(2), 3, Some(3)));
        assert_eq!(defect_of_class(&a, &f1).unwrap(), 3);
        let rep = effectivity_report(&a, &f1.neg()).unwrap();
        assert!(!rep.is_effective && rep.iitaka_dim.is_none());
    }

    proptest! {
        #[test]
        fn effective_classes_on_gaussian_square(c in proptest::collection::vec(-2i64..=2, 4)) {
            let (e, _) = curves();
            let a = ComplexTorus::product(&[e.clone(), e]).unwrap();
            let ns = ns_basis(&a);
            let mut d = AlternatingForm::zero(4);
            for (ci, f) in c.iter().zip(&ns) {
                d = d.add(&f.scaled(&rat(*ci)));
            }
            let s = symmetric_part(&a, &d).unwrap();
            prop_assert!(s.is_symmetric());
            prop_assert_eq!(s.is_psd(), s.is_psd_by_minors());
            if is_effective_class(&a, &d) {
                let r = radical(&a, &d).unwrap();
                prop_assert_eq!(r.rank() % 2, 0);
                let b = iitaka_dimension(&a, &d).unwrap();
                prop_assert!((1..=2).contains(&b));
                let defect = defect_of_class(&a, &d).unwrap();
                prop_assert_eq!(defect, defect_of_class(&a, &d.scaled(&rat(3))).unwrap());
                prop_assert!(defect < ns.len());
                let case = case_analysis(&a, &d).unwrap();
                prop_assert_eq!(case.predicted, defect);
                if let Some(h) = case.hom_formula {
                    prop_assert_eq!(h, defect);
                }
            }
        }
    }
}
