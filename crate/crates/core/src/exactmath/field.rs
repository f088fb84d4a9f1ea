//! Real number fields `Q(alpha)` given by a minimal polynomial and an
//! isolating interval for the chosen real root, and their elements in the
//! power basis `1, alpha, ..., alpha^(d-1)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::QPoly;
use super::rational::{format_rational, rat, sign_of, Rational};
use crate::error::{Error, Result};

/// Width (as a power of two) the isolating interval is refined to at
/// construction; sign queries start from this interval.
const REFINED_BITS: u32 = 96;

#[derive(Debug)]
pub struct RealNumberField {
    min_poly: Vec<BigInt>,
    poly: QPoly,
    root_interval: (Rational, Rational),
    refined: (Rational, Rational),
    /// Row `j` holds `alpha^(d + j)` in the power basis.
    reduction: Vec<Vec<Rational>>,
}

impl PartialEq for RealNumberField {
    fn eq(&self, other: &Self) -> bool {
        self.min_poly == other.min_poly && self.root_interval == other.root_interval
    }
}

impl Eq for RealNumberField {}

impl RealNumberField {
    /// Builds `Q(alpha)` from a monic integer polynomial (coefficients low to
    /// high) and an interval `(lo, hi)` containing exactly one of its real
    /// roots.
    ///
    /// The polynomial must be irreducible. Squarefreeness and the absence of
    /// rational roots are checked; for degree 2 and 3 that certifies
    /// irreducibility, for higher degree it is the caller's responsibility.
    pub fn new(min_poly: Vec<BigInt>, lo: Rational, hi: Rational) -> Result<Arc<Self>> {
        let bad = |m: &str| Error::InvalidField(m.to_string());
        let mut min_poly = min_poly;
        while min_poly.len() > 1 && min_poly.last().is_some_and(|c| c.is_zero()) {
            min_poly.pop();
        }
        if min_poly.len() < 2 {
            return Err(bad("minimal polynomial must have degree at least 1"));
        }
        if !min_poly.last().unwrap().is_one() {
            return Err(bad("minimal polynomial must be monic"));
        }
        if lo >= hi {
            return Err(bad("root interval must satisfy lo < hi"));
        }
        let poly = QPoly::new(min_poly.iter().map(|c| Rational::from_integer(c.clone())).collect());
        let degree = min_poly.len() - 1;
        if !poly.is_squarefree() {
            return Err(bad("minimal polynomial is not squarefree"));
        }
        if degree >= 2 && has_integer_root(&min_poly) {
            return Err(bad("minimal polynomial has a rational root, so it is reducible"));
        }
        let (s_lo, s_hi) = (sign_of(&poly.eval(&lo)), sign_of(&poly.eval(&hi)));
        if s_lo * s_hi >= 0 {
            return Err(bad("minimal polynomial must change sign strictly across the root interval"));
        }
        if poly.count_roots(&lo, &hi) != 1 {
            return Err(bad("root interval does not isolate exactly one root"));
        }
        let refined = refine(&poly, lo.clone(), hi.clone(), REFINED_BITS);
        let reduction = reduction_table(&min_poly);
        Ok(Arc::new(RealNumberField { min_poly, poly, root_interval: (lo, hi), refined, reduction }))
    }

    /// The field `Q`, presented as the root of `x` in `(-1, 1)`.
    pub fn rationals() -> Arc<Self> {
        Self::new(vec![BigInt::zero(), BigInt::one()], rat(-1), rat(1)).expect("x is a valid field")
    }

    pub fn degree(&self) -> usize {
        self.min_poly.len() - 1
    }

    pub fn min_poly(&self) -> &[BigInt] {
        &self.min_poly
    }

    pub fn root_interval(&self) -> (&Rational, &Rational) {
        (&self.root_interval.0, &self.root_interval.1)
    }

    pub fn generator(self: &Arc<Self>) -> AlgebraicReal {
        if self.degree() == 1 {
            // alpha is the rational root of x + c0
            let c0 = Rational::from_integer(-self.min_poly[0].clone());
            return self.from_rational(c0);
        }
        let mut coeffs = vec![Rational::zero(); self.degree()];
        coeffs[1] = Rational::one();
        AlgebraicReal { field: self.clone(), coeffs }
    }

    /// Element `c0 + c1 alpha + ...`; accepts up to `d` coefficients and
    /// reduces longer inputs modulo the minimal polynomial.
    pub fn element(self: &Arc<Self>, coeffs: Vec<Rational>) -> AlgebraicReal {
        let d = self.degree();
        if coeffs.len() <= d {
            let mut c = coeffs;
            c.resize(d, Rational::zero());
            AlgebraicReal { field: self.clone(), coeffs: c }
        } else {
            AlgebraicReal { field: self.clone(), coeffs: self.reduce(coeffs) }
        }
    }

    pub fn from_rational(self: &Arc<Self>, q: Rational) -> AlgebraicReal {
        self.element(vec![q])
    }

    pub fn zero(self: &Arc<Self>) -> AlgebraicReal {
        self.element(Vec::new())
    }

    pub fn one(self: &Arc<Self>) -> AlgebraicReal {
        self.from_rational(Rational::one())
    }

    /// Certified rational enclosure of the root of width below `2^-bits`.
    pub fn root_enclosure(&self, bits: u32) -> (Rational, Rational) {
        refine(&self.poly, self.refined.0.clone(), self.refined.1.clone(), bits)
    }

    fn reduce(&self, mut coeffs: Vec<Rational>) -> Vec<Rational> {
        let d = self.degree();
        // fold alpha^k for k >= d back onto the basis, highest power first
        while coeffs.len() > d {
            let top = coeffs.len() - 1;
            let c = coeffs.pop().unwrap();
            if c.is_zero() {
                continue;
            }
            // alpha^top = alpha^(top - d) * alpha^d, with alpha^d = -sum m_i alpha^i
            let shift = top - d;
            for (i, m) in self.min_poly[..d].iter().enumerate() {
                if !m.is_zero() {
                    coeffs[shift + i] -= &c * Rational::from_integer(m.clone());
                }
            }
        }
        coeffs.resize(d, Rational::zero());
        coeffs
    }

    fn same(a: &Arc<Self>, b: &Arc<Self>) -> bool {
        Arc::ptr_eq(a, b) || **a == **b
    }
}

fn has_integer_root(poly: &[BigInt]) -> bool {
    let c0 = poly[0].abs();
    if c0.is_zero() {
        return true;
    }
    let eval = |x: &BigInt| poly.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c);
    let Some(limit) = c0.to_u64().filter(|&v| v <= 1_000_000_000_000) else {
        // too large to enumerate divisors; the Sturm and squarefree checks still apply
        return false;
    };
    let mut d = 1u64;
    while d * d <= limit {
        if limit % d == 0 {
            for cand in [d, limit / d] {
                let x = BigInt::from(cand);
                if eval(&x).is_zero() || eval(&-x).is_zero() {
                    return true;
                }
            }
        }
        d += 1;
    }
    false
}

fn reduction_table(min_poly: &[BigInt]) -> Vec<Vec<Rational>> {
    let d = min_poly.len() - 1;
    let mut rows = Vec::with_capacity(d);
    // alpha^d = -sum_{i<d} m_i alpha^i
    let mut current: Vec<Rational> =
        min_poly[..d].iter().map(|m| Rational::from_integer(-m.clone())).collect();
    for _ in 0..d {
        rows.push(current.clone());
        // multiply by alpha
        let top = current.pop().unwrap();
        current.insert(0, Rational::zero());
        for i in 0..d {
            current[i] += &top * &rows[0][i];
        }
    }
    rows
}

fn refine(poly: &QPoly, mut lo: Rational, mut hi: Rational, bits: u32) -> (Rational, Rational) {
    let width = Rational::new(BigInt::one(), BigInt::one() << bits);
    let s_lo = sign_of(&poly.eval(&lo));
    let two = rat(2);
    while &hi - &lo >= width {
        let mid = (&lo + &hi) / &two;
        let s_mid = sign_of(&poly.eval(&mid));
        if s_mid == 0 {
            return (mid.clone(), mid);
        }
        if s_mid == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Element of a real number field in the power basis.
#[derive(Clone)]
pub struct AlgebraicReal {
    field: Arc<RealNumberField>,
    coeffs: Vec<Rational>,
}

impl PartialEq for AlgebraicReal {
    fn eq(&self, other: &Self) -> bool {
        RealNumberField::same(&self.field, &other.field) && self.coeffs == other.coeffs
    }
}

impl Eq for AlgebraicReal {}

impl AlgebraicReal {
    pub fn field(&self) -> &Arc<RealNumberField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The rational value if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn scale(&self, k: &Rational) -> AlgebraicReal {
        AlgebraicReal { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    pub fn checked_add(&self, other: &AlgebraicReal) -> Result<AlgebraicReal> {
        self.check_field(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn checked_mul(&self, other: &AlgebraicReal) -> Result<AlgebraicReal> {
        self.check_field(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn check_field(&self, other: &AlgebraicReal) -> Result<()> {
        if RealNumberField::same(&self.field, &other.field) {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    fn add_unchecked(&self, other: &AlgebraicReal) -> AlgebraicReal {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        AlgebraicReal { field: self.field.clone(), coeffs }
    }

    fn mul_unchecked(&self, other: &AlgebraicReal) -> AlgebraicReal {
        let d = self.coeffs.len();
        if d == 1 {
            return AlgebraicReal { field: self.field.clone(), coeffs: vec![&self.coeffs[0] * &other.coeffs[0]] };
        }
        let mut prod = vec![Rational::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        let (low, high) = prod.split_at(d);
        let mut coeffs = low.to_vec();
        for (j, c) in high.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (k, r) in self.field.reduction[j].iter().enumerate() {
                coeffs[k] += c * r;
            }
        }
        AlgebraicReal { field: self.field.clone(), coeffs }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm modulo the
    /// minimal polynomial.
    pub fn inv(&self) -> Result<AlgebraicReal> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.coeffs.len() == 1 {
            return Ok(self.field.from_rational(self.coeffs[0].recip()));
        }
        let x = QPoly::new(self.coeffs.clone());
        let (g, s, _) = QPoly::extended_gcd(&x, &self.field.poly);
        if g.degree() != Some(0) {
            return Err(Error::InvalidField("minimal polynomial is reducible".into()));
        }
        Ok(self.field.element(s.coeffs().to_vec()))
    }

    pub fn checked_div(&self, other: &AlgebraicReal) -> Result<AlgebraicReal> {
        self.check_field(other)?;
        Ok(self.mul_unchecked(&other.inv()?))
    }

    /// Sign of the real number this element denotes.
    pub fn sign(&self) -> i8 {
        nf_sign(self)
    }

    /// Certified rational enclosure of the value, of width at most about
    /// `2^-bits` times the size of the coefficients.
    pub fn enclosure(&self, bits: u32) -> (Rational, Rational) {
        let (lo, hi) = self.field.root_enclosure(bits);
        QPoly::new(self.coeffs.clone()).eval_interval(&lo, &hi)
    }
}

/// Exact sign of `x(alpha)` in `{-1, 0, 1}`.
///
/// Zero is decided from the coefficients and, as a shortcut for presentations
/// whose polynomial is not irreducible, from `gcd(x, min_poly)` having a root
/// in the isolating interval. Otherwise the interval is bisected until the
/// interval evaluation of `x` excludes zero, which terminates because
/// `x(alpha) != 0`.
pub fn nf_sign(x: &AlgebraicReal) -> i8 {
    if x.is_zero() {
        return 0;
    }
    let field = &x.field;
    if x.coeffs.len() == 1 {
        return sign_of(&x.coeffs[0]);
    }
    let p = QPoly::new(x.coeffs.clone());
    let (mut lo, mut hi) = field.refined.clone();
    let (a, b) = p.eval_interval(&lo, &hi);
    if a.is_positive() {
        return 1;
    }
    if b.is_negative() {
        return -1;
    }
    let g = QPoly::gcd(&p, &field.poly);
    if g.degree().unwrap_or(0) >= 1 {
        let (ilo, ihi) = &field.root_interval;
        if g.count_roots(ilo, ihi) == 1 {
            return 0;
        }
    }
    let s_lo = sign_of(&field.poly.eval(&lo));
    let two = rat(2);
    loop {
        if lo == hi {
            // the root is the rational lo itself
            return sign_of(&p.eval(&lo));
        }
        let mid = (&lo + &hi) / &two;
        let s_mid = sign_of(&field.poly.eval(&mid));
        if s_mid == 0 {
            lo = mid.clone();
            hi = mid;
        } else if s_mid == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
        let (a, b) = p.eval_interval(&lo, &hi);
        if a.is_positive() {
            return 1;
        }
        if b.is_negative() {
            return -1;
        }
    }
}

impl<'a> Add<&'a AlgebraicReal> for &'a AlgebraicReal {
    type Output = AlgebraicReal;
    fn add(self, rhs: &'a AlgebraicReal) -> AlgebraicReal {
        self.checked_add(rhs).expect("field mismatch")
    }
}

impl<'a> Sub<&'a AlgebraicReal> for &'a AlgebraicReal {
    type Output = AlgebraicReal;
    fn sub(self, rhs: &'a AlgebraicReal) -> AlgebraicReal {
        self.checked_add(&-rhs).expect("field mismatch")
    }
}

impl<'a> Mul<&'a AlgebraicReal> for &'a AlgebraicReal {
    type Output = AlgebraicReal;
    fn mul(self, rhs: &'a AlgebraicReal) -> AlgebraicReal {
        self.checked_mul(rhs).expect("field mismatch")
    }
}

impl Neg for &AlgebraicReal {
    type Output = AlgebraicReal;
    fn neg(self) -> AlgebraicReal {
        AlgebraicReal { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Neg for AlgebraicReal {
    type Output = AlgebraicReal;
    fn neg(self) -> AlgebraicReal {
        -&self
    }
}

impl fmt::Debug for AlgebraicReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for AlgebraicReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format_rational(c),
                1 => format!("{}*a", format_rational(c)),
                _ => format!("{}*a^{i}", format_rational(c)),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::ratio;

    fn sqrt2() -> Arc<RealNumberField> {
        RealNumberField::new(vec![(-2).into(), 0.into(), 1.into()], ratio(14, 10), ratio(15, 10)).unwrap()
    }

    fn fourth_root_2() -> Arc<RealNumberField> {
        RealNumberField::new(
            vec![(-2).into(), 0.into(), 0.into(), 0.into(), 1.into()],
            rat(1),
            ratio(6, 5),
        )
        .unwrap()
    }

    #[test]
    fn sign_examples() {
        let k = sqrt2();
        let a = k.generator();
        let one = k.one();
        assert_eq!(nf_sign(&(&a - &one)), 1);
        assert_eq!(nf_sign(&k.zero()), 0);
        assert_eq!(nf_sign(&(&one - &a)), -1);
    }

    #[test]
    fn sign_of_nearly_cancelling_element() {
        // 99/70 approximates sqrt(2) to about 7e-5 from above
        let k = sqrt2();
        let x = &k.generator() - &k.from_rational(ratio(99, 70));
        assert_eq!(x.sign(), -1);
        let y = &k.generator() - &k.from_rational(ratio(140, 99));
        assert_eq!(y.sign(), 1);
    }

    #[test]
    fn arithmetic_reduces_mod_min_poly() {
        let k = fourth_root_2();
        let a = k.generator();
        let a2 = &a * &a;
        let a4 = &a2 * &a2;
        assert_eq!(a4, k.from_rational(rat(2)));
        let inv = a.inv().unwrap();
        assert_eq!(&inv * &a, k.one());
        assert_eq!(inv, k.element(vec![rat(0), rat(0), rat(0), ratio(1, 2)]));
        assert!(a2.as_rational().is_none());
        assert_eq!((&a2 * &a2).as_rational(), Some(rat(2)));
    }

    #[test]
    fn rejects_bad_presentations() {
        // not isolating: both roots of x^2-2 inside
        assert!(RealNumberField::new(vec![(-2).into(), 0.into(), 1.into()], rat(-2), rat(2)).is_err());
        // reducible quadratic
        assert!(RealNumberField::new(vec![(-1).into(), 0.into(), 1.into()], ratio(1, 2), rat(2)).is_err());
        // not monic
        assert!(RealNumberField::new(vec![(-2).into(), 0.into(), 2.into()], rat(0), rat(2)).is_err());
        // no sign change
        assert!(RealNumberField::new(vec![(-2).into(), 0.into(), 1.into()], rat(2), rat(3)).is_err());
    }

    #[test]
    fn rationals_field() {
        let q = RealNumberField::rationals();
        assert_eq!(q.degree(), 1);
        assert_eq!(q.generator(), q.zero());
        let x = q.from_rational(ratio(-3, 7));
        assert_eq!(x.sign(), -1);
        assert_eq!(x.inv().unwrap(), q.from_rational(ratio(-7, 3)));
    }

    #[test]
    fn mixing_fields_is_an_error() {
        let a = sqrt2().generator();
        let b = fourth_root_2().generator();
        assert_eq!(a.checked_add(&b), Err(Error::FieldMismatch));
    }

    #[test]
    fn enclosure_contains_value() {
        let k = sqrt2();
        let (lo, hi) = k.generator().enclosure(40);
        assert!(&lo * &lo <= rat(2) && rat(2) <= &hi * &hi);
        assert!(&hi - &lo < ratio(1, 1 << 30));
    }
}
