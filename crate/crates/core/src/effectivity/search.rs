//! Brute-force `delta_A = max_D delta_A(D)` over a coefficient box on the
//! Néron-Severi basis.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::{case_analysis_of_radical, fiber_class_of, kernel_sublattice};
use crate::cohomology::{class_of_form, cup_matrix, forms_as_columns};
use crate::error::{Error, Result};
use crate::exactmath::{common_denominator, primitive_integer_vector, to_i128, KMatrix, QMatrix, Rational};
use crate::torus::{ns_basis, AlternatingForm, ComplexTorus};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub box_bound: u32,
    /// Number of worker threads; the box is split by first coordinate.
    pub threads: usize,
    /// Check bounds, scaling and the case formula on every effective class.
    pub audit: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { box_bound: 2, threads: 1, audit: false }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchAudit {
    pub checked: u64,
    pub case_mismatches: u64,
    pub bound_violations: u64,
    pub scaling_violations: u64,
    pub distinct_radicals: usize,
    /// A few offending coefficient vectors, for diagnostics.
    pub examples: Vec<String>,
}

impl SearchAudit {
    pub fn is_clean(&self) -> bool {
        self.case_mismatches == 0 && self.bound_violations == 0 && self.scaling_violations == 0
    }

    fn note(&mut self, what: &str, c: &[i64]) {
        if self.examples.len() < 5 {
            self.examples.push(format!("{what} at {c:?}"));
        }
    }
}

#[derive(Clone, Debug)]
pub struct DefectSearchResult {
    pub delta: usize,
    pub witness: Option<AlternatingForm>,
    /// Coordinates of the witness on the Néron-Severi basis.
    pub witness_coords: Option<Vec<i64>>,
    pub rho: usize,
    pub classes_scanned: u64,
    pub effective_classes: u64,
    pub structured_candidates: usize,
    pub search_box: u32,
    pub audit: Option<SearchAudit>,
}

pub fn torus_defect(a: &ComplexTorus, box_bound: u32) -> Result<DefectSearchResult> {
    torus_defect_with(a, &SearchOptions { box_bound, ..SearchOptions::default() })
}

pub fn torus_defect_with(a: &ComplexTorus, options: &SearchOptions) -> Result<DefectSearchResult> {
    if a.dim() < 2 {
        return Err(Error::TrivialTopCohomology);
    }
    if options.box_bound == 0 {
        return Err(Error::Validation("search box must be at least 1".into()));
    }
    let ctx = Context::new(a)?;
    let structured = ctx.structured_candidates()?;
    let radix = 2 * options.box_bound as usize + 1;
    let per_chunk = (radix as u64).pow(ctx.rho as u32 - 1);
    let chunk_count = if ctx.rho == 0 { 0 } else { radix };

    let mut total = Partial::default();
    for (i, c) in structured.iter().enumerate() {
        total.visit(&ctx, c, i as u64, options.audit)?;
    }
    let offset = structured.len() as u64;
    let next = AtomicUsize::new(0);
    let results = Mutex::new(Vec::new());
    let worker = || -> Result<()> {
        loop {
            let chunk = next.fetch_add(1, Ordering::Relaxed);
            if chunk >= chunk_count {
                return Ok(());
            }
            let mut part = Partial::default();
            let mut c = vec![-(options.box_bound as i64); ctx.rho];
            c[0] = chunk as i64 - options.box_bound as i64;
            for j in 0..per_chunk {
                if c.iter().any(|&x| x != 0) {
                    part.visit(&ctx, &c, offset + chunk as u64 * per_chunk + j, options.audit)?;
                }
                increment(&mut c[1..], options.box_bound as i64);
            }
            results.lock().expect("no poisoned workers").push(part);
        }
    };
    let threads = options.threads.clamp(1, chunk_count.max(1));
    if threads == 1 {
        worker()?;
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..threads).map(|_| s.spawn(&worker)).collect();
            handles.into_iter().try_for_each(|h| h.join().expect("search worker panicked"))
        })?;
    }
    for part in results.into_inner().expect("no poisoned workers") {
        total.merge(part);
    }

    let (witness, witness_coords) = match &total.best {
        Some((_, _, c)) => (Some(ctx.form_of(c)), Some(c.clone())),
        None => (None, None),
    };
    let audit = options.audit.then(|| {
        let mut audit = total.audit;
        audit.distinct_radicals = total.radicals.len();
        audit
    });
    Ok(DefectSearchResult {
        delta: total.best.as_ref().map_or(0, |b| b.0),
        witness,
        witness_coords,
        rho: ctx.rho,
        classes_scanned: total.scanned,
        effective_classes: total.effective,
        structured_candidates: structured.len(),
        search_box: options.box_bound,
        audit,
    })
}

/// Odometer over `[-bound, bound]^len`, last coordinate fastest.
fn increment(c: &mut [i64], bound: i64) {
    for x in c.iter_mut().rev() {
        if *x < bound {
            *x += 1;
            return;
        }
        *x = -bound;
    }
}

#[derive(Default)]
struct Partial {
    /// (defect, enumeration index, coordinates); earliest index wins ties.
    best: Option<(usize, u64, Vec<i64>)>,
    scanned: u64,
    effective: u64,
    audit: SearchAudit,
    radicals: HashMap<Vec<BigInt>, Option<usize>>,
}

impl Partial {
    fn visit(&mut self, ctx: &Context, c: &[i64], index: u64, audit: bool) -> Result<()> {
        self.scanned += 1;
        if !ctx.is_effective(c) {
            return Ok(());
        }
        self.effective += 1;
        let defect = ctx.defect(c);
        if audit {
            self.check(ctx, c, defect)?;
        }
        let better = match &self.best {
            None => true,
            Some((d, i, _)) => defect > *d || (defect == *d && index < *i),
        };
        if better {
            self.best = Some((defect, index, c.to_vec()));
        }
        Ok(())
    }

    fn check(&mut self, ctx: &Context, c: &[i64], defect: usize) -> Result<()> {
        self.audit.checked += 1;
        if defect + 1 > ctx.rho {
            self.audit.bound_violations += 1;
            self.audit.note("bound violation", c);
        }
        let doubled: Vec<i64> = c.iter().map(|x| 2 * x).collect();
        if ctx.defect(&doubled) != defect {
            self.audit.scaling_violations += 1;
            self.audit.note("scaling violation", c);
        }
        let form = ctx.form_of(c);
        let key = radical_key(&form);
        let expected = match self.radicals.get(&key) {
            Some(v) => *v,
            None => {
                let r = kernel_sublattice(&ctx.torus, &form)?;
                let case = case_analysis_of_radical(&ctx.torus, &r)?;
                let v = match case.hom_formula {
                    Some(h) if h != case.predicted => None,
                    _ => Some(case.predicted),
                };
                self.radicals.insert(key, v);
                v
            }
        };
        if expected != Some(defect) {
            self.audit.case_mismatches += 1;
            self.audit.note("case mismatch", c);
        }
        Ok(())
    }

    fn merge(&mut self, other: Partial) {
        self.scanned += other.scanned;
        self.effective += other.effective;
        if let Some((d, i, c)) = other.best {
            let better = match &self.best {
                None => true,
                Some((bd, bi, _)) => d > *bd || (d == *bd && i < *bi),
            };
            if better {
                self.best = Some((d, i, c));
            }
        }
        let a = &mut self.audit;
        let b = other.audit;
        a.checked += b.checked;
        a.case_mismatches += b.case_mismatches;
        a.bound_violations += b.bound_violations;
        a.scaling_violations += b.scaling_violations;
        for e in b.examples {
            if a.examples.len() < 5 {
                a.examples.push(e);
            }
        }
        self.radicals.extend(other.radicals);
    }
}

/// Canonical key of the rational kernel of a form: its reduced row echelon
/// basis scaled to primitive integer rows.
fn radical_key(form: &AlternatingForm) -> Vec<BigInt> {
    let m = form.matrix();
    let kernel = m.kernel_basis();
    if kernel.is_empty() {
        return Vec::new();
    }
    let rows: Vec<Vec<Rational>> = kernel;
    let (rref, _) = QMatrix::from_rows(rows).rref();
    let mut key = Vec::with_capacity(rref.rows() * rref.cols());
    for i in 0..rref.rows() {
        key.extend(primitive_integer_vector(rref.row(i)));
    }
    key
}

enum Positivity {
    /// Integer symmetric parts scaled by a common positive denominator.
    Integer(Vec<Vec<i128>>),
    Field(Vec<KMatrix>),
}

/// Immutable data shared by the search workers.
struct Context {
    torus: ComplexTorus,
    rho: usize,
    n2: usize,
    ns: Vec<AlternatingForm>,
    positivity: Positivity,
    /// Per basis element `i`, the matrix of `x -> E_i ^ x` on the NS basis,
    /// row-major `rows x rho`.
    cup: Vec<Vec<i128>>,
    cup_rows: usize,
    cup_exact: Vec<QMatrix>,
}

impl Context {
    fn new(a: &ComplexTorus) -> Result<Self> {
        let ns = ns_basis(a);
        let rho = ns.len();
        let n2 = a.lattice_rank();
        let field = a.field().clone();
        let jt = a.complex_structure().transpose();
        let mut parts = Vec::with_capacity(rho);
        for f in &ns {
            parts.push(jt.mul(&KMatrix::from_qmatrix(&field, f.matrix()))?);
        }
        let positivity = if field.degree() == 1 {
            let rational: Vec<QMatrix> = parts.iter().map(|s| s.to_qmatrix().expect("degree one")).collect();
            let den = Rational::from_integer(common_denominator(rational.iter().flat_map(|m| m.data())));
            let ints: Option<Vec<Vec<i128>>> =
                rational.iter().map(|m| m.data().iter().map(|q| to_i128(&(q * &den))).collect()).collect();
            match ints {
                Some(v) => Positivity::Integer(v),
                None => Positivity::Field(parts),
            }
        } else {
            Positivity::Field(parts)
        };
        let span = forms_as_columns(n2, &ns);
        let mut cup_exact = Vec::with_capacity(rho);
        for f in &ns {
            cup_exact.push(cup_matrix(a, &class_of_form(f))?.mul(&span));
        }
        let cup_rows = cup_exact.first().map_or(0, QMatrix::rows);
        let cup = cup_exact
            .iter()
            .map(|m| m.data().iter().map(|q| to_i128(q).expect("integral cup products")).collect())
            .collect();
        Ok(Context { torus: a.clone(), rho, n2, ns, positivity, cup, cup_rows, cup_exact })
    }

    fn form_of(&self, c: &[i64]) -> AlternatingForm {
        let mut d = AlternatingForm::zero(self.n2);
        for (ci, f) in c.iter().zip(&self.ns) {
            if *ci != 0 {
                d = d.add(&f.scaled(&Rational::from_integer((*ci).into())));
            }
        }
        d
    }

    fn is_effective(&self, c: &[i64]) -> bool {
        if c.iter().all(|&x| x == 0) {
            return false;
        }
        match &self.positivity {
            Positivity::Integer(parts) => {
                let n = self.n2;
                let mut s = vec![0i128; n * n];
                let mut ok = true;
                'sum: for (ci, p) in c.iter().zip(parts) {
                    if *ci == 0 {
                        continue;
                    }
                    for (x, y) in s.iter_mut().zip(p) {
                        match y.checked_mul(*ci as i128).and_then(|t| x.checked_add(t)) {
                            Some(v) => *x = v,
                            None => {
                                ok = false;
                                break 'sum;
                            }
                        }
                    }
                }
                if ok {
                    if let Some(psd) = psd_i128(s, n) {
                        return psd;
                    }
                }
                self.is_effective_exact(c)
            }
            Positivity::Field(_) => self.is_effective_exact(c),
        }
    }

    fn is_effective_exact(&self, c: &[i64]) -> bool {
        let field = self.torus.field();
        let mut s = KMatrix::zeros(field, self.n2, self.n2);
        let parts: Vec<KMatrix> = match &self.positivity {
            Positivity::Field(p) => p.clone(),
            Positivity::Integer(_) => {
                let jt = self.torus.complex_structure().transpose();
                self.ns.iter().map(|f| jt.mul(&KMatrix::from_qmatrix(field, f.matrix())).expect("square")).collect()
            }
        };
        for (ci, p) in c.iter().zip(&parts) {
            if *ci != 0 {
                s = s.add(&p.scale(&Rational::from_integer((*ci).into()))).expect("same shape");
            }
        }
        s.is_psd()
    }

    /// `rho - rank(sum c_i M_i)`.
    fn defect(&self, c: &[i64]) -> usize {
        let len = self.cup_rows * self.rho;
        let mut m = vec![0i128; len];
        let mut ok = true;
        'sum: for (ci, p) in c.iter().zip(&self.cup) {
            if *ci == 0 {
                continue;
            }
            for (x, y) in m.iter_mut().zip(p) {
                match y.checked_mul(*ci as i128).and_then(|t| x.checked_add(t)) {
                    Some(v) => *x = v,
                    None => {
                        ok = false;
                        break 'sum;
                    }
                }
            }
        }
        if ok {
            if let Some(r) = rank_i128(m, self.cup_rows, self.rho) {
                return self.rho - r;
            }
        }
        let mut total = QMatrix::zeros(self.cup_rows, self.rho);
        for (ci, p) in c.iter().zip(&self.cup_exact) {
            total = total.add(&p.scale(&Rational::from_integer((*ci).into())));
        }
        self.rho - total.rank()
    }

    /// Sums of fiber classes over nonempty sets of elliptic blocks, as
    /// primitive NS coordinates.
    fn structured_candidates(&self) -> Result<Vec<Vec<i64>>> {
        let a = &self.torus;
        let fibers: Vec<AlternatingForm> = (0..a.blocks().len()).filter_map(|i| fiber_class_of(a, i)).collect();
        if fibers.len() > 16 {
            return Ok(Vec::new());
        }
        let span = forms_as_columns(self.n2, &self.ns);
        let mut out = Vec::new();
        for mask in 1u32..(1 << fibers.len()) {
            let mut d = AlternatingForm::zero(self.n2);
            for (i, f) in fibers.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    d = d.add(f);
                }
            }
            if let Some(c) = ns_coordinates(&span, &d.upper_coords()) {
                out.push(c);
            }
        }
        Ok(out)
    }
}

/// Primitive integer coordinates of `v` on the columns of `span` (positive
/// multiple), if `v` lies in the span and the coordinates fit.
fn ns_coordinates(span: &QMatrix, v: &[Rational]) -> Option<Vec<i64>> {
    let rhs = QMatrix::from_columns(v.len(), &[v.iter().map(|x| -x).collect()]);
    let kernel = span.hstack(&rhs).kernel_basis();
    let k = kernel.into_iter().find(|k| !k.last().is_some_and(Zero::is_zero))?;
    let last = k.last()?.clone();
    let scaled: Vec<Rational> = k[..k.len() - 1].iter().map(|x| x / &last).collect();
    primitive_integer_vector(&scaled).iter().map(ToPrimitive::to_i64).collect()
}

/// Positive semidefiniteness of an integer symmetric matrix by fraction-free
/// symmetric elimination; `None` on overflow.
fn psd_i128(mut a: Vec<i128>, n: usize) -> Option<bool> {
    let mut active: Vec<usize> = (0..n).collect();
    let mut prev: i128 = 1;
    loop {
        let mut pivot = None;
        let mut zero_rows = Vec::new();
        for &k in &active {
            let d = a[k * n + k];
            if d < 0 {
                return Some(false);
            }
            if d == 0 {
                if active.iter().any(|&j| a[k * n + j] != 0) {
                    return Some(false);
                }
                zero_rows.push(k);
            } else if pivot.is_none() {
                pivot = Some(k);
            }
        }
        active.retain(|i| !zero_rows.contains(i));
        let Some(k) = pivot else { return Some(true) };
        active.retain(|&i| i != k);
        let p = a[k * n + k];
        for &i in &active {
            for &j in &active {
                let v = p.checked_mul(a[i * n + j])?.checked_sub(a[i * n + k].checked_mul(a[k * n + j])?)?;
                a[i * n + j] = v / prev;
            }
        }
        prev = p;
    }
}

/// Rank by fraction-free Gaussian elimination; `None` on overflow.
fn rank_i128(mut a: Vec<i128>, rows: usize, cols: usize) -> Option<usize> {
    let mut rank = 0;
    let mut prev: i128 = 1;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&r| a[r * cols + col] != 0) else { continue };
        if p != rank {
            for j in 0..cols {
                a.swap(p * cols + j, rank * cols + j);
            }
        }
        let piv = a[rank * cols + col];
        for r in rank + 1..rows {
            let f = a[r * cols + col];
            for j in col + 1..cols {
                let v = piv.checked_mul(a[r * cols + j])?.checked_sub(f.checked_mul(a[rank * cols + j])?)?;
                a[r * cols + j] = v / prev;
            }
            a[r * cols + col] = 0;
        }
        prev = piv;
        rank += 1;
        if rank == rows {
            break;
        }
    }
    Some(rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::defect_of_class;
    use crate::effectivity::is_effective_class;
    use crate::exactmath::{rat, RealNumberField};
    use proptest::prelude::*;

    fn elliptic(beta: i64) -> ComplexTorus {
        let q = RealNumberField::rationals();
        ComplexTorus::elliptic(rat(0), q.from_rational(rat(beta)), format!("E_{beta}i")).unwrap()
    }

    #[test]
    fn gaussian_square_has_defect_three() {
        let a = ComplexTorus::product(&[elliptic(1), elliptic(1)]).unwrap();
        let r = torus_defect_with(&a, &SearchOptions { audit: true, ..Default::default() }).unwrap();
        assert_eq!(r.delta, 3);
        assert_eq!(r.rho, 4);
        let w = r.witness.unwrap();
        assert_eq!(defect_of_class(&a, &w).unwrap(), 3);
        assert!(is_effective_class(&a, &w));
        assert!(r.audit.unwrap().is_clean());
        assert_eq!(r.classes_scanned, 5u64.pow(4) - 1 + r.structured_candidates as u64);
    }

    #[test]
    fn non_isogenous_pair_has_defect_one() {
        let k = crate::torus::tests::fourth_root_two();
        let e = ComplexTorus::elliptic(rat(0), k.one(), "E_i").unwrap();
        let f = ComplexTorus::elliptic(rat(0), k.generator(), "E_a").unwrap();
        let a = ComplexTorus::product(&[e, f]).unwrap();
        assert_eq!(torus_defect(&a, 1).unwrap().delta, 1);
    }

    #[test]
    fn threads_do_not_change_the_result() {
        let a = ComplexTorus::product(&[elliptic(1), elliptic(2)]).unwrap();
        let one = torus_defect_with(&a, &SearchOptions { threads: 1, ..Default::default() }).unwrap();
        let four = torus_defect_with(&a, &SearchOptions { threads: 4, ..Default::default() }).unwrap();
        assert_eq!(one.delta, 3);
        assert_eq!(one.witness_coords, four.witness_coords);
        assert_eq!(one.classes_scanned, four.classes_scanned);
        assert_eq!(one.effective_classes, four.effective_classes);
    }

    #[test]
    fn monotone_in_box() {
        let a = ComplexTorus::product(&[elliptic(1), elliptic(3)]).unwrap();
        let d1 = torus_defect(&a, 1).unwrap().delta;
        let d2 = torus_defect(&a, 2).unwrap().delta;
        assert!(d1 <= d2 && d2 < 4);
    }

    #[test]
    fn rejects_curves_and_empty_box() {
        assert_eq!(torus_defect(&elliptic(1), 2).unwrap_err(), Error::TrivialTopCohomology);
        let a = ComplexTorus::product(&[elliptic(1), elliptic(1)]).unwrap();
        assert!(torus_defect(&a, 0).is_err());
    }

    #[test]
    fn integer_kernels() {
        assert_eq!(psd_i128(vec![2, -1, -1, 2], 2), Some(true));
        assert_eq!(psd_i128(vec![1, 1, 1, 1], 2), Some(true));
        assert_eq!(psd_i128(vec![0, 1, 1, 0], 2), Some(false));
        assert_eq!(psd_i128(vec![1, 2, 2, 1], 2), Some(false));
        assert_eq!(rank_i128(vec![1, 2, 2, 4, 0, 1], 3, 2), Some(2));
        assert_eq!(rank_i128(vec![1, 2, 2, 4], 2, 2), Some(1));
        assert_eq!(rank_i128(vec![0; 6], 3, 2), Some(0));
    }

    fn sym(n: usize) -> impl Strategy<Value = Vec<i64>> {
        proptest::collection::vec(-3i64..=3, n * n).prop_map(move |v| {
            // Gram matrices B^T B hit the semidefinite boundary often
            let mut g = vec![0i64; n * n];
            for i in 0..n {
                for j in 0..n {
                    g[i * n + j] = (0..n).map(|k| v[k * n + i] * v[k * n + j]).sum::<i64>()
                        - if (v[0] + v[1]) % 3 == 0 && i == j && i == 0 { 1 } else { 0 };
                }
            }
            g
        })
    }

    proptest! {
        #[test]
        fn integer_psd_agrees_with_minors(g in sym(4)) {
            let q = RealNumberField::rationals();
            let rows: Vec<Vec<_>> = (0..4).map(|i| (0..4).map(|j| q.from_rational(rat(g[i * 4 + j]))).collect()).collect();
            let k = KMatrix::from_rows(&q, rows).unwrap();
            let fast = psd_i128(g.iter().map(|&x| x as i128).collect(), 4).unwrap();
            prop_assert_eq!(fast, k.is_psd_by_minors());
        }

        #[test]
        fn integer_rank_agrees(v in proptest::collection::vec(-4i64..=4, 15), rank_hint in 0usize..3) {
            let mut v = v;
            // force dependencies
            for j in 0..3 {
                v[rank_hint * 3 + j] = v[((rank_hint + 1) % 5) * 3 + j] * 2;
            }
            let q = QMatrix::new(5, 3, v.iter().map(|&x| rat(x)).collect());
            prop_assert_eq!(rank_i128(v.iter().map(|&x| x as i128).collect(), 5, 3).unwrap(), q.rank());
        }

        #[test]
        fn fast_path_matches_generic_routines(c in proptest::collection::vec(-2i64..=2, 4)) {
            let a = ComplexTorus::product(&[elliptic(1), elliptic(1)]).unwrap();
            let ctx = Context::new(&a).unwrap();
            let d = ctx.form_of(&c);
            prop_assert_eq!(ctx.is_effective(&c), is_effective_class(&a, &d));
            if !d.is_zero() {
                prop_assert_eq!(ctx.defect(&c), defect_of_class(&a, &d).unwrap());
            }
        }
    }
}
