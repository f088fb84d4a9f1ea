//! Verification suites run against an explicit torus: the Voisin kernel
//! equality on divisor subtori, the Künneth rank identity, hard Lefschetz
//! injectivity, and agreement between the classifier and the box search.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::classifier::{classify, FactorKind, IsogenyFactor, IsogenySpec};
use crate::cohomology::{class_of_form, cup_matrix, voisin_kernels};
use crate::effectivity::{fiber_class_of, is_effective_class, torus_defect_with, SearchOptions};
use crate::error::Result;
use crate::exactmath::IntMatrix;
use crate::torus::{hom_rank, picard_number, AlternatingForm, ComplexTorus, Sublattice};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

impl CheckStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &'static str, ok: bool, detail: String) -> Self {
        let status = if ok { CheckStatus::Pass } else { CheckStatus::Fail };
        CheckOutcome { name, status, detail }
    }

    fn skipped(name: &'static str, reason: &str) -> Self {
        CheckOutcome { name, status: CheckStatus::Skipped, detail: reason.to_string() }
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} ({})", self.name, self.status.as_str(), self.detail)
    }
}

pub const CHECK_NAMES: [&str; 4] = ["voisin", "kunneth", "lefschetz", "oracle"];

pub fn run_check(name: &str, a: &ComplexTorus, box_bound: u32) -> Option<Result<CheckOutcome>> {
    match name {
        "voisin" => Some(voisin_check(a)),
        "kunneth" => Some(kunneth_check(a)),
        "lefschetz" => Some(lefschetz_check(a)),
        "oracle" => Some(oracle_check(a, box_bound)),
        _ => None,
    }
}

/// Corank-2 subtori of a product: all factors but one elliptic block, and
/// the diagonal of each pair of identical elliptic blocks times the rest.
pub fn divisor_subtori(a: &ComplexTorus) -> Result<Vec<(String, Sublattice)>> {
    let blocks = a.blocks();
    let n2 = a.lattice_rank();
    let mut out = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        if b.dim == 1 && blocks.len() > 1 {
            let rest: Vec<usize> = (0..blocks.len()).filter(|&j| j != i).collect();
            out.push((format!("factors without {}", b.label), Sublattice::of_blocks(a, &rest)?));
        }
    }
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            let (bi, bj) = (&blocks[i], &blocks[j]);
            if bi.dim != 1 || bj.dim != 1 || a.block_torus(i).complex_structure() != a.block_torus(j).complex_structure()
            {
                continue;
            }
            let mut cols = Vec::new();
            for k in 0..2 {
                let mut v = vec![BigInt::zero(); n2];
                v[bi.offset + k] = BigInt::one();
                v[bj.offset + k] = BigInt::one();
                cols.push(v);
            }
            for (l, b) in blocks.iter().enumerate() {
                if l != i && l != j {
                    for k in b.offset..b.offset + 2 * b.dim {
                        let mut v = vec![BigInt::zero(); n2];
                        v[k] = BigInt::one();
                        cols.push(v);
                    }
                }
            }
            let w = Sublattice::new(a, &IntMatrix::from_columns(n2, &cols))?;
            out.push((format!("diagonal of {} and {}", bi.label, bj.label), w));
        }
    }
    Ok(out)
}

/// `ker(restriction to W) = ker(cup with [W])` on `NS(A)_Q`, by equal
/// dimension and mutual containment.
pub fn voisin_check(a: &ComplexTorus) -> Result<CheckOutcome> {
    const NAME: &str = "voisin";
    if a.dim() < 2 {
        return Ok(CheckOutcome::skipped(NAME, "requires n >= 2"));
    }
    let subtori = divisor_subtori(a)?;
    if subtori.is_empty() {
        return Ok(CheckOutcome::skipped(NAME, "no divisor subtori among the factors"));
    }
    let mut dims = Vec::new();
    let mut failed = Vec::new();
    for (name, w) in &subtori {
        let (k1, k2) = voisin_kernels(a, w)?;
        let (r1, r2) = (k1.rank(), k2.rank());
        let joint = k1.hstack(&k2).rank();
        if !(r1 == r2 && joint == r1) {
            failed.push(format!("{name}: dims {r1} vs {r2}, joint {joint}"));
        }
        dims.push(r1);
    }
    let ok = failed.is_empty();
    let detail = if ok {
        format!("{} subtori, kernel dims {:?}", subtori.len(), dims)
    } else {
        failed.join("; ")
    };
    Ok(CheckOutcome::new(NAME, ok, detail))
}

/// `rho(C x T) = rho(C) + rho(T) + rk Hom(T, C)` at every split of the
/// factor list.
pub fn kunneth_check(a: &ComplexTorus) -> Result<CheckOutcome> {
    const NAME: &str = "kunneth";
    let k = a.blocks().len();
    if k < 2 {
        return Ok(CheckOutcome::skipped(NAME, "requires at least two factors"));
    }
    let rho = picard_number(a);
    let mut parts = Vec::new();
    let mut ok = true;
    for s in 1..k {
        let c = a.sub_product(0..s)?;
        let t = a.sub_product(s..k)?;
        let (rc, rt, h) = (picard_number(&c), picard_number(&t), hom_rank(&t, &c)?);
        ok &= rho == rc + rt + h;
        parts.push(format!("{rc}+{rt}+{h}"));
    }
    Ok(CheckOutcome::new(NAME, ok, format!("rho = {rho}, splits {}", parts.join(", "))))
}

/// The product polarization is effective and cup product with it is
/// injective on all of `Lambda^2`.
pub fn lefschetz_check(a: &ComplexTorus) -> Result<CheckOutcome> {
    const NAME: &str = "lefschetz";
    if a.dim() < 3 {
        return Ok(CheckOutcome::skipped(NAME, "requires n ≥ 3"));
    }
    let Some(h) = product_polarization(a) else {
        return Ok(CheckOutcome::skipped(NAME, "requires a product of elliptic curves"));
    };
    let n2 = a.lattice_rank();
    let full = n2 * (n2 - 1) / 2;
    let rank = cup_matrix(a, &class_of_form(&h))?.rank();
    let ample = is_effective_class(a, &h);
    Ok(CheckOutcome::new(NAME, ample && rank == full, format!("rank {rank} of {full}")))
}

/// Sum of the principal polarizations of the elliptic factors.
pub fn product_polarization(a: &ComplexTorus) -> Option<AlternatingForm> {
    let mut h = AlternatingForm::zero(a.lattice_rank());
    for i in 0..a.blocks().len() {
        h = h.add(&fiber_class_of(a, i)?);
    }
    Some(h)
}

/// Isogeny decomposition of a product of elliptic curves, grouping blocks
/// with nonzero `Hom`. `None` for other tori.
pub fn isogeny_spec_of_product(a: &ComplexTorus) -> Result<Option<IsogenySpec>> {
    let k = a.blocks().len();
    let mut group: Vec<Option<usize>> = vec![None; k];
    let mut factors: Vec<IsogenyFactor> = Vec::new();
    for i in 0..k {
        let b = &a.blocks()[i];
        if b.dim != 1 {
            return Ok(None);
        }
        if group[i].is_some() {
            continue;
        }
        let ei = a.block_torus(i);
        let has_cm = hom_rank(&ei, &ei)? == 2;
        group[i] = Some(factors.len());
        let mut mult = 1;
        for j in i + 1..k {
            if group[j].is_none() && hom_rank(&ei, &a.block_torus(j))? > 0 {
                group[j] = Some(factors.len());
                mult += 1;
            }
        }
        factors.push(IsogenyFactor { label: b.label.clone(), kind: FactorKind::Elliptic { has_cm }, mult });
    }
    Ok(IsogenySpec::new(factors).ok())
}

/// `classify` on the decomposition equals the box-search defect.
pub fn oracle_check(a: &ComplexTorus, box_bound: u32) -> Result<CheckOutcome> {
    const NAME: &str = "oracle";
    let Some(spec) = isogeny_spec_of_product(a)? else {
        return Ok(CheckOutcome::skipped(NAME, "requires a product of at least two elliptic curves"));
    };
    let symbolic = classify(&spec).delta;
    let search = torus_defect_with(a, &SearchOptions { box_bound, ..SearchOptions::default() })?;
    Ok(CheckOutcome::new(
        NAME,
        symbolic == search.delta,
        format!("classifier {symbolic}, search {} (box {box_bound})", search.delta),
    ))
}
