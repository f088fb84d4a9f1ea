//! Symbolic Lefschetz defect of an abelian variety from its isogeny
//! decomposition.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AlbertType {
    I,
    II,
    III,
    IV,
}

impl AlbertType {
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "I" => Some(AlbertType::I),
            "II" => Some(AlbertType::II),
            "III" => Some(AlbertType::III),
            "IV" => Some(AlbertType::IV),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AlbertType::I => "I",
            AlbertType::II => "II",
            AlbertType::III => "III",
            AlbertType::IV => "IV",
        }
    }
}

impl fmt::Display for AlbertType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorKind {
    Elliptic { has_cm: bool },
    Surface { albert_type: AlbertType, picard: u32 },
    SimpleOther { dim: usize },
}

impl FactorKind {
    pub fn dim(&self) -> usize {
        match self {
            FactorKind::Elliptic { .. } => 1,
            FactorKind::Surface { .. } => 2,
            FactorKind::SimpleOther { dim } => *dim,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            FactorKind::Elliptic { .. } => Ok(()),
            FactorKind::Surface { albert_type, picard } => {
                let allowed: &[u32] = match albert_type {
                    AlbertType::I => &[1, 2],
                    AlbertType::II => &[3],
                    AlbertType::IV => &[2],
                    AlbertType::III => {
                        return Err(Error::Validation(
                            "albert type III does not occur for simple abelian surfaces".into(),
                        ))
                    }
                };
                if allowed.contains(&picard) {
                    Ok(())
                } else {
                    Err(Error::Validation(format!(
                        "a simple surface of albert type {albert_type} has picard number {}, got {picard}",
                        allowed.iter().map(u32::to_string).collect::<Vec<_>>().join(" or ")
                    )))
                }
            }
            FactorKind::SimpleOther { dim } if dim >= 3 => Ok(()),
            FactorKind::SimpleOther { dim } => {
                Err(Error::Validation(format!("simple_other factors have dimension >= 3, got {dim}")))
            }
        }
    }

    /// `(rho(X), rk End(X))`, lower bounds for `SimpleOther`.
    fn picard_and_end_rank(&self) -> (usize, usize) {
        match *self {
            FactorKind::Elliptic { has_cm: false } => (1, 1),
            FactorKind::Elliptic { has_cm: true } => (1, 2),
            FactorKind::Surface { albert_type: AlbertType::I, picard } => (picard as usize, picard as usize),
            FactorKind::Surface { picard, .. } => (picard as usize, 4),
            FactorKind::SimpleOther { .. } => (1, 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsogenyFactor {
    pub label: String,
    pub kind: FactorKind,
    pub mult: usize,
}

impl IsogenyFactor {
    pub fn elliptic(label: impl Into<String>, has_cm: bool, mult: usize) -> Self {
        IsogenyFactor { label: label.into(), kind: FactorKind::Elliptic { has_cm }, mult }
    }

    pub fn surface(label: impl Into<String>, albert_type: AlbertType, picard: u32, mult: usize) -> Self {
        IsogenyFactor { label: label.into(), kind: FactorKind::Surface { albert_type, picard }, mult }
    }

    pub fn simple_other(label: impl Into<String>, dim: usize, mult: usize) -> Self {
        IsogenyFactor { label: label.into(), kind: FactorKind::SimpleOther { dim }, mult }
    }
}

/// Validated decomposition `A ~ prod X_i^{k_i}`. Distinct labels denote
/// pairwise non-isogenous simple factors; repeated labels are merged.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsogenySpec {
    factors: Vec<IsogenyFactor>,
}

impl IsogenySpec {
    pub fn new(factors: Vec<IsogenyFactor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Validation("an isogeny spec needs at least one factor".into()));
        }
        let mut merged: Vec<IsogenyFactor> = Vec::new();
        for f in factors {
            if f.mult == 0 {
                return Err(Error::Validation(format!("factor {:?} has multiplicity 0", f.label)));
            }
            f.kind.validate()?;
            match merged.iter_mut().find(|g| g.label == f.label) {
                Some(g) if g.kind == f.kind => g.mult += f.mult,
                Some(_) => {
                    return Err(Error::Validation(format!("label {:?} is used for different factors", f.label)))
                }
                None => merged.push(f),
            }
        }
        let spec = IsogenySpec { factors: merged };
        if spec.total_dim() < 2 {
            return Err(Error::Validation("total dimension must be at least 2".into()));
        }
        Ok(spec)
    }

    pub fn factors(&self) -> &[IsogenyFactor] {
        &self.factors
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|f| f.kind.dim() * f.mult).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DefectCase {
    Zero,
    Elliptic { k: usize, cm: bool },
    SurfaceII,
    SurfaceIOrIV,
}

impl fmt::Display for DefectCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DefectCase::Zero => f.write_str("zero"),
            DefectCase::Elliptic { k, cm } => write!(f, "elliptic(k={k}, cm={cm})"),
            DefectCase::SurfaceII => f.write_str("surface_II"),
            DefectCase::SurfaceIOrIV => f.write_str("surface_I_or_IV"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefectReport {
    pub delta: usize,
    pub case: DefectCase,
    pub witness_factor: Option<String>,
}

/// `delta_A` as the maximum of the per-factor candidates.
pub fn classify(spec: &IsogenySpec) -> DefectReport {
    // (delta, prefer elliptic, label) ordered so that the best is minimal
    let mut best: Option<(usize, u8, &str, DefectCase)> = None;
    for f in &spec.factors {
        let (delta, rank, case) = match f.kind {
            FactorKind::Elliptic { has_cm } => {
                let d = if has_cm { 2 * f.mult - 1 } else { f.mult };
                (d, 0, DefectCase::Elliptic { k: f.mult, cm: has_cm })
            }
            FactorKind::Surface { albert_type, picard } => {
                let case =
                    if albert_type == AlbertType::II { DefectCase::SurfaceII } else { DefectCase::SurfaceIOrIV };
                (picard as usize - 1, 1, case)
            }
            FactorKind::SimpleOther { .. } => continue,
        };
        if delta == 0 {
            continue;
        }
        let better = match &best {
            None => true,
            Some((bd, br, bl, _)) => (delta, std::cmp::Reverse(rank), std::cmp::Reverse(f.label.as_str()))
                > (*bd, std::cmp::Reverse(*br), std::cmp::Reverse(*bl)),
        };
        if better {
            best = Some((delta, rank, &f.label, case));
        }
    }
    match best {
        Some((delta, _, label, case)) => DefectReport { delta, case, witness_factor: Some(label.to_string()) },
        None => DefectReport { delta: 0, case: DefectCase::Zero, witness_factor: None },
    }
}

/// Picard number of `A` from the decomposition:
/// `rho(X^k) = k rho(X) + C(k, 2) rk End(X)` summed over factors. The second
/// component is false when a `simple_other` factor makes this a lower bound.
pub fn picard_number_symbolic(spec: &IsogenySpec) -> (usize, bool) {
    let mut rho = 0;
    let mut exact = true;
    for f in &spec.factors {
        let (r, e) = f.kind.picard_and_end_rank();
        rho += f.mult * r + f.mult * (f.mult - 1) / 2 * e;
        exact &= !matches!(f.kind, FactorKind::SimpleOther { .. });
    }
    (rho, exact)
}

/// Defect of an effective divisor whose Iitaka quotient `B` has dimension
/// `b`.
pub fn divisor_case(b: usize, rho_b: Option<usize>, cm: Option<bool>, k: Option<usize>) -> Result<usize> {
    match b {
        0 => Err(Error::ImpossibleCase("b = 0 cannot occur for an effective divisor".into())),
        1 => match (cm, k) {
            (Some(cm), Some(k)) if k >= 1 => Ok(if cm { 2 * k - 1 } else { k }),
            _ => Err(Error::Validation("b = 1 needs the cm flag and a multiplicity k >= 1".into())),
        },
        2 => match rho_b {
            Some(r) if (1..=4).contains(&r) => Ok(r - 1),
            _ => Err(Error::Validation("b = 2 needs rho_B in 1..=4".into())),
        },
        _ => Ok(0),
    }
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub spec: IsogenySpec,
    pub report: DefectReport,
}

/// The abelian threefold cases, ordered by decreasing defect.
pub fn threefold_catalog() -> Vec<CatalogEntry> {
    use IsogenyFactor as F;
    let rows: Vec<(&'static str, Vec<IsogenyFactor>)> = vec![
        ("E_CM^3", vec![F::elliptic("E_CM", true, 3)]),
        ("E_RM x E_CM^2", vec![F::elliptic("E_RM", false, 1), F::elliptic("E_CM", true, 2)]),
        ("S_II x E", vec![F::surface("S_II", AlbertType::II, 3, 1), F::elliptic("E", false, 1)]),
        ("E_RM^2 x E", vec![F::elliptic("E_RM", false, 2), F::elliptic("E", false, 1)]),
        ("E x E' x E''", vec![F::elliptic("E", false, 1), F::elliptic("E'", false, 1), F::elliptic("E''", false, 1)]),
        ("S x E", vec![F::surface("S", AlbertType::IV, 2, 1), F::elliptic("E", false, 1)]),
        ("A simple", vec![F::simple_other("A", 3, 1)]),
    ];
    rows.into_iter()
        .map(|(name, factors)| {
            let spec = IsogenySpec::new(factors).expect("catalog specs are valid");
            let report = classify(&spec);
            CatalogEntry { name, spec, report }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn spec(factors: Vec<IsogenyFactor>) -> IsogenySpec {
        IsogenySpec::new(factors).unwrap()
    }

    #[test]
    fn classify_examples() {
        let r = classify(&spec(vec![IsogenyFactor::elliptic("E", true, 3)]));
        assert_eq!((r.delta, r.case), (5, DefectCase::Elliptic { k: 3, cm: true }));
        let r = classify(&spec(vec![IsogenyFactor::elliptic("E", false, 1), IsogenyFactor::elliptic("F", true, 2)]));
        assert_eq!(r.delta, 3);
        assert_eq!(r.witness_factor.as_deref(), Some("F"));
        let r = classify(&spec(vec![
            IsogenyFactor::surface("S", AlbertType::II, 3, 1),
            IsogenyFactor::elliptic("E", false, 1),
        ]));
        assert_eq!((r.delta, r.case), (2, DefectCase::SurfaceII));
        let r = classify(&spec(vec![IsogenyFactor::simple_other("A", 3, 1)]));
        assert_eq!((r.delta, r.case, r.witness_factor), (0, DefectCase::Zero, None));
        for k in 2..6 {
            assert_eq!(classify(&spec(vec![IsogenyFactor::elliptic("E", false, k)])).delta, k);
            assert_eq!(classify(&spec(vec![IsogenyFactor::elliptic("E", true, k)])).delta, 2 * k - 1);
        }
    }

    #[test]
    fn ties_prefer_elliptic() {
        let r = classify(&spec(vec![
            IsogenyFactor::surface("S", AlbertType::IV, 2, 1),
            IsogenyFactor::elliptic("E", false, 1),
        ]));
        assert_eq!((r.delta, r.case), (1, DefectCase::Elliptic { k: 1, cm: false }));
        let r = classify(&spec(vec![IsogenyFactor::elliptic("B", false, 1), IsogenyFactor::elliptic("A", false, 1)]));
        assert_eq!(r.witness_factor.as_deref(), Some("A"));
    }

    #[test]
    fn validation() {
        let bad = |f| IsogenySpec::new(vec![f, IsogenyFactor::elliptic("E", false, 1)]).unwrap_err();
        assert!(bad(IsogenyFactor::surface("S", AlbertType::II, 2, 1)).to_string().contains("type II"));
        assert!(bad(IsogenyFactor::surface("S", AlbertType::IV, 3, 1)).to_string().contains("picard"));
        assert!(bad(IsogenyFactor::surface("S", AlbertType::III, 2, 1)).to_string().contains("III"));
        assert!(bad(IsogenyFactor::simple_other("X", 2, 1)).to_string().contains("dimension"));
        assert!(bad(IsogenyFactor::elliptic("F", false, 0)).to_string().contains("multiplicity"));
        assert!(IsogenySpec::new(vec![]).is_err());
        assert!(IsogenySpec::new(vec![IsogenyFactor::elliptic("E", true, 1)]).is_err());
        assert!(IsogenySpec::new(vec![IsogenyFactor::elliptic("E", true, 1), IsogenyFactor::elliptic("E", false, 1)])
            .is_err());
        assert!(IsogenySpec::new(vec![IsogenyFactor::surface("S", AlbertType::I, 1, 1)]).is_ok());
    }

    #[test]
    fn divisor_case_examples() {
        assert_eq!(divisor_case(3, None, None, None).unwrap(), 0);
        assert_eq!(divisor_case(2, Some(3), None, None).unwrap(), 2);
        assert_eq!(divisor_case(1, None, Some(true), Some(2)).unwrap(), 3);
        assert_eq!(divisor_case(1, None, Some(false), Some(2)).unwrap(), 2);
        assert!(matches!(divisor_case(0, None, None, None), Err(Error::ImpossibleCase(_))));
        assert!(divisor_case(2, Some(5), None, None).is_err());
        assert!(divisor_case(1, None, None, Some(1)).is_err());
    }

    #[test]
    fn threefold_catalog_rows() {
        let cat = threefold_catalog();
        let deltas: Vec<usize> = cat.iter().map(|e| e.report.delta).collect();
        assert_eq!(deltas, vec![5, 3, 2, 2, 1, 1, 0]);
        assert!(cat.iter().all(|e| e.spec.total_dim() == 3));
        assert_eq!(cat[2].report.case, DefectCase::SurfaceII);
    }

    #[test]
    fn no_threefold_has_defect_four() {
        let mut kinds = vec![FactorKind::SimpleOther { dim: 3 }];
        for cm in [false, true] {
            kinds.push(FactorKind::Elliptic { has_cm: cm });
        }
        for (t, p) in [(AlbertType::I, 1), (AlbertType::I, 2), (AlbertType::II, 3), (AlbertType::IV, 2)] {
            kinds.push(FactorKind::Surface { albert_type: t, picard: p });
        }
        let mut seen = std::collections::BTreeSet::new();
        // all decompositions of dimension 3 with up to three distinct factors
        let n = kinds.len();
        for a in 0..n {
            for ma in 1..=3 {
                for b in 0..=n {
                    for mb in 1..=3 {
                        for c in 0..=n {
                            let mut fs = vec![IsogenyFactor { label: "a".into(), kind: kinds[a].clone(), mult: ma }];
                            if b < n {
                                fs.push(IsogenyFactor { label: "b".into(), kind: kinds[b].clone(), mult: mb });
                            }
                            if c < n && b < n {
                                fs.push(IsogenyFactor { label: "c".into(), kind: kinds[c].clone(), mult: 1 });
                            }
                            if let Ok(s) = IsogenySpec::new(fs) {
                                if s.total_dim() == 3 {
                                    seen.insert(classify(&s).delta);
                                }
                            }
                        }
                    }
                }
            }
        }
        assert_eq!(seen.into_iter().collect::<Vec<_>>(), vec![0, 1, 2, 3, 5]);
    }

    fn factor() -> impl Strategy<Value = IsogenyFactor> {
        let kind = prop_oneof![
            any::<bool>().prop_map(|has_cm| FactorKind::Elliptic { has_cm }),
            prop_oneof![
                Just((AlbertType::I, 1)),
                Just((AlbertType::I, 2)),
                Just((AlbertType::II, 3)),
                Just((AlbertType::IV, 2))
            ]
            .prop_map(|(albert_type, picard)| FactorKind::Surface { albert_type, picard }),
            (3usize..5).prop_map(|dim| FactorKind::SimpleOther { dim }),
        ];
        (0u8..6, kind, 1usize..4).prop_map(|(l, kind, mult)| IsogenyFactor { label: format!("X{l}"), kind, mult })
    }

    fn distinct(fs: Vec<IsogenyFactor>) -> Vec<IsogenyFactor> {
        let mut seen = BTreeMap::new();
        for f in fs {
            seen.entry(f.label.clone()).or_insert(f);
        }
        seen.into_values().collect()
    }

    proptest! {
        #[test]
        fn bounded_by_picard(fs in proptest::collection::vec(factor(), 1..5)) {
            if let Ok(s) = IsogenySpec::new(distinct(fs)) {
                let (rho, _) = picard_number_symbolic(&s);
                prop_assert!(classify(&s).delta < rho);
            }
        }

        #[test]
        fn permutation_and_splitting(fs in proptest::collection::vec(factor(), 1..5), seed in any::<u64>()) {
            let fs = distinct(fs);
            if let Ok(s) = IsogenySpec::new(fs.clone()) {
                let mut rev = fs.clone();
                rev.reverse();
                let shift = (seed as usize) % rev.len();
                rev.rotate_left(shift);
                prop_assert_eq!(classify(&IsogenySpec::new(rev).unwrap()), classify(&s));
                let split: Vec<IsogenyFactor> = fs
                    .iter()
                    .flat_map(|f| std::iter::repeat(IsogenyFactor { mult: 1, ..f.clone() }).take(f.mult))
                    .collect();
                prop_assert_eq!(classify(&IsogenySpec::new(split).unwrap()), classify(&s));
            }
        }

        #[test]
        fn adding_a_factor_is_monotone(fs in proptest::collection::vec(factor(), 1..4), extra in factor()) {
            let fs = distinct(fs);
            if let Ok(s) = IsogenySpec::new(fs.clone()) {
                let mut more = fs;
                more.push(IsogenyFactor { label: "new".into(), ..extra });
                let t = IsogenySpec::new(more).unwrap();
                prop_assert!(classify(&t).delta >= classify(&s).delta);
            }
        }
    }
}
