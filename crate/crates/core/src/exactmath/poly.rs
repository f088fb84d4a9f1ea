//! Dense univariate polynomials over the rationals, with Sturm sequences for
//! real root counting.

use num_traits::{One, Signed, Zero};

use super::rational::{sign_of, Rational};

/// Polynomial with rational coefficients, lowest degree first. The
/// coefficient vector never has trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QPoly {
    coeffs: Vec<Rational>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        QPoly::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Encloses `{ p(t) : lo <= t <= hi }` by interval Horner evaluation.
    pub fn eval_interval(&self, lo: &Rational, hi: &Rational) -> (Rational, Rational) {
        let mut acc = (Rational::zero(), Rational::zero());
        for c in self.coeffs.iter().rev() {
            let products = [&acc.0 * lo, &acc.0 * hi, &acc.1 * lo, &acc.1 * hi];
            let min = products.iter().min().unwrap().clone();
            let max = products.iter().max().unwrap().clone();
            acc = (min + c, max + c);
        }
        acc
    }

    pub fn derivative(&self) -> QPoly {
        QPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(i.into()))
                .collect(),
        )
    }

    pub fn add(&self, other: &QPoly) -> QPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = Rational::zero();
        QPoly::new(
            (0..len)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + other.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn sub(&self, other: &QPoly) -> QPoly {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, k: &Rational) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, other: &QPoly) -> QPoly {
        if self.is_zero() || other.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::new(out)
    }

    /// Euclidean division. Panics if `divisor` is zero.
    pub fn div_rem(&self, divisor: &QPoly) -> (QPoly, QPoly) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rational::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let top = rem.len() - 1;
            let q = &rem[top] / &lead;
            if !q.is_zero() {
                for (k, c) in divisor.coeffs.iter().enumerate() {
                    rem[top - dd + k] -= &q * c;
                }
            }
            quot[top - dd] = q;
            rem.pop();
        }
        (QPoly::new(quot), QPoly::new(rem))
    }

    pub fn rem(&self, divisor: &QPoly) -> QPoly {
        self.div_rem(divisor).1
    }

    pub fn monic(&self) -> QPoly {
        match self.leading() {
            Some(l) => self.scale(&l.recip()),
            None => QPoly::zero(),
        }
    }

    /// Monic greatest common divisor (zero only if both inputs are zero).
    pub fn gcd(a: &QPoly, b: &QPoly) -> QPoly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let r = x.rem(&y);
            x = y;
            y = r;
        }
        x.monic()
    }

    /// Returns `(g, s, t)` with `s*a + t*b = g`, `g` the monic gcd.
    pub fn extended_gcd(a: &QPoly, b: &QPoly) -> (QPoly, QPoly, QPoly) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (QPoly::constant(Rational::one()), QPoly::zero());
        let (mut t0, mut t1) = (QPoly::zero(), QPoly::constant(Rational::one()));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s2 = s0.sub(&q.mul(&s1));
            let t2 = t0.sub(&q.mul(&t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        match r0.leading().cloned() {
            Some(l) => {
                let inv = l.recip();
                (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
            }
            None => (r0, s0, t0),
        }
    }

    /// Standard Sturm sequence p, p', -rem(p, p'), ...
    pub fn sturm_sequence(&self) -> Vec<QPoly> {
        let mut seq = vec![self.clone()];
        if self.is_zero() {
            return seq;
        }
        let mut next = self.derivative();
        while !next.is_zero() {
            let r = seq.last().unwrap().rem(&next).scale(&-Rational::one());
            seq.push(next);
            next = r;
        }
        seq
    }

    /// Number of distinct real roots in the half-open interval `(lo, hi]`.
    pub fn count_roots(&self, lo: &Rational, hi: &Rational) -> usize {
        let seq = self.sturm_sequence();
        let v_lo = sign_variations(&seq, lo);
        let v_hi = sign_variations(&seq, hi);
        v_lo.saturating_sub(v_hi)
    }

    pub fn is_squarefree(&self) -> bool {
        QPoly::gcd(self, &self.derivative()).degree() == Some(0)
    }

    /// Bound `B` with every real root in `[-B, B]` (Cauchy).
    pub fn root_bound(&self) -> Rational {
        let lead = self.leading().expect("zero polynomial").abs();
        let max = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Rational::zero);
        Rational::one() + max / lead
    }
}

fn sign_variations(seq: &[QPoly], x: &Rational) -> usize {
    let signs: Vec<i8> = seq.iter().map(|p| sign_of(&p.eval(x))).filter(|&s| s != 0).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}
