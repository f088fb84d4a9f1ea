//! Subcommand implementations. Each returns whether every verification
//! passed; errors are split into input and internal failures.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde_json::{json, Value};

use lefschetz_core::checks::{self, CheckOutcome, CheckStatus, CHECK_NAMES};
use lefschetz_core::classifier::{self, picard_number_symbolic, threefold_catalog};
use lefschetz_core::cohomology::defect_of_class;
use lefschetz_core::document::{FactorEntry, IsogenyDocument, SpecDocument, TorusDocument};
use lefschetz_core::effectivity::{case_analysis, is_effective_class, torus_defect_with, SearchOptions};
use lefschetz_core::exactmath::{format_rational, RealNumberField};
use lefschetz_core::torus::{picard_number, AlternatingForm, ComplexTorus};
use lefschetz_core::Error;

use crate::Format;

// Like println!, but a closed pipe (e.g. `| head`) is not an error.
macro_rules! out {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

pub enum Failure {
    Input(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Internal(e.to_string())
        }
    }
}

type CmdResult = Result<bool, Failure>;

fn load(path: &Path) -> Result<SpecDocument, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    Ok(SpecDocument::parse(&text)?)
}

fn load_isogeny(path: &Path) -> Result<(SpecDocument, IsogenyDocument), Failure> {
    match load(path)? {
        SpecDocument::Isogeny(d) => Ok((SpecDocument::Isogeny(d.clone()), d)),
        other => Err(Failure::Input(format!("$.kind: expected \"isogeny\", got {:?}", other.kind()))),
    }
}

fn load_torus(path: &Path) -> Result<(SpecDocument, TorusDocument), Failure> {
    match load(path)? {
        SpecDocument::Torus(d) => Ok((SpecDocument::Torus(d.clone()), d)),
        other => Err(Failure::Input(format!("$.kind: expected \"torus\", got {:?}", other.kind()))),
    }
}

fn write_report(out: Option<&Path>, report: &Value) -> Result<(), Failure> {
    if let Some(path) = out {
        let text = serde_json::to_string_pretty(report).expect("reports serialize");
        fs::write(path, text + "\n").map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn threads() -> Result<usize, Failure> {
    match std::env::var("DEFECT_THREADS") {
        Err(_) => Ok(1),
        Ok(v) => v
            .parse::<usize>()
            .ok()
            .filter(|&t| t >= 1)
            .ok_or_else(|| Failure::Input(format!("DEFECT_THREADS must be a positive integer, got {v:?}"))),
    }
}

fn millis(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

pub fn classify(path: &Path, out: Option<&Path>) -> CmdResult {
    let start = Instant::now();
    let (doc, iso) = load_isogeny(path)?;
    let spec = iso.to_spec()?;
    let report = classifier::classify(&spec);
    out!("delta = {}", report.delta);
    out!("case: {}", report.case);
    if let Some(w) = &report.witness_factor {
        out!("witness factor: {w}");
    }
    let (rho, exact) = picard_number_symbolic(&spec);
    write_report(
        out,
        &json!({
            "command": "classify",
            "input": doc.to_json(),
            "delta": report.delta,
            "case": report.case.to_string(),
            "witness_factor": report.witness_factor,
            "rho": rho,
            "rho_exact": exact,
            "timing_ms": millis(start),
        }),
    )?;
    Ok(true)
}

struct ClassRow {
    label: String,
    effective: bool,
    b: Option<usize>,
    rho_b: Option<usize>,
    defect: usize,
}

fn analyse_class(a: &ComplexTorus, label: &str, form: &AlternatingForm) -> Result<ClassRow, Failure> {
    if !a.is_hodge(form) {
        return Err(Failure::Input(format!("class {label}: {}", Error::NotHodgeClass)));
    }
    let defect = defect_of_class(a, form)?;
    let effective = is_effective_class(a, form);
    let (b, rho_b) = if effective {
        let case = case_analysis(a, form)?;
        (Some(case.b), Some(case.rho_b))
    } else {
        (None, None)
    };
    Ok(ClassRow { label: label.to_string(), effective, b, rho_b, defect })
}

fn field_name(field: &RealNumberField) -> String {
    if field.degree() == 1 {
        return "Q".to_string();
    }
    let coeffs: Vec<String> = field.min_poly().iter().map(ToString::to_string).collect();
    let (lo, hi) = field.root_interval();
    format!("Q(a), min_poly [{}], a in ({}, {})", coeffs.join(", "), format_rational(lo), format_rational(hi))
}

fn outcome_json(o: &CheckOutcome) -> Value {
    json!({ "status": o.status.as_str(), "detail": o.detail })
}

pub fn torus(path: &Path, box_bound: u32, class: Option<&str>, out: Option<&Path>) -> CmdResult {
    let start = Instant::now();
    let (doc, td) = load_torus(path)?;
    let a = td.build_torus()?;
    if a.dim() < 2 {
        return Err(Failure::Input(Error::TrivialTopCohomology.to_string()));
    }
    let mut classes = td.build_classes()?;
    if let Some(sel) = class {
        let idx = match sel.parse::<usize>() {
            Ok(i) if (1..=classes.len()).contains(&i) => i - 1,
            _ => classes
                .iter()
                .position(|(l, _)| l == sel)
                .ok_or_else(|| Failure::Input(format!("--class {sel:?}: no such declared class")))?,
        };
        classes = vec![classes.swap_remove(idx)];
    }
    let rows = classes.iter().map(|(l, f)| analyse_class(&a, l, f)).collect::<Result<Vec<_>, _>>()?;

    let options = SearchOptions { box_bound, threads: threads()?, audit: false };
    let search = torus_defect_with(&a, &options)?;
    let voisin = checks::voisin_check(&a)?;
    let kunneth = checks::kunneth_check(&a)?;
    let oracle = match checks::isogeny_spec_of_product(&a)? {
        Some(spec) => {
            let c = classifier::classify(&spec);
            let ok = c.delta == search.delta;
            let status = if ok { CheckStatus::Pass } else { CheckStatus::Fail };
            (status, format!("classifier {}, search {}", c.delta, search.delta), Some(c))
        }
        None => (CheckStatus::Skipped, "not a product of elliptic curves".to_string(), None),
    };

    let labels: Vec<&str> = a.blocks().iter().map(|b| b.label.as_str()).collect();
    out!("torus: {} (dim {}, rho {}, field {})", labels.join(" x "), a.dim(), picard_number(&a), field_name(a.field()));
    if !rows.is_empty() {
        out!("{:<12} {:<10} {:>3} {:>6} {:>7}", "class", "effective", "b", "rho_B", "defect");
        for r in &rows {
            let opt = |x: Option<usize>| x.map_or("-".to_string(), |v| v.to_string());
            out!(
                "{:<12} {:<10} {:>3} {:>6} {:>7}",
                r.label,
                if r.effective { "yes" } else { "no" },
                opt(r.b),
                opt(r.rho_b),
                r.defect
            );
        }
    }
    out!("delta = {}", search.delta);
    if let Some(c) = &search.witness_coords {
        out!("witness (NS coordinates): {c:?}");
    }
    if let Some(c) = &oracle.2 {
        out!("case: {}", c.case);
    }
    out!("classes scanned: {} (box {}, {} effective)", search.classes_scanned, box_bound, search.effective_classes);
    out!(
        "verification: voisin {}, kunneth {}, classifier_vs_search {}",
        voisin.status.as_str(),
        kunneth.status.as_str(),
        oracle.0.as_str()
    );

    let table: Vec<Value> = rows
        .iter()
        .map(|r| json!({ "class": r.label, "effective": r.effective, "b": r.b, "rho_B": r.rho_b, "defect": r.defect }))
        .collect();
    write_report(
        out,
        &json!({
            "command": "torus",
            "input": doc.to_json(),
            "delta": search.delta,
            "case": oracle.2.as_ref().map(|c| c.case.to_string()),
            "rho": search.rho,
            "witness": search.witness_coords,
            "classes": table,
            "verification": {
                "voisin_check": outcome_json(&voisin),
                "kunneth_check": outcome_json(&kunneth),
                "classifier_vs_search": { "status": oracle.0.as_str(), "detail": oracle.1 },
            },
            "search_box": box_bound,
            "classes_scanned": search.classes_scanned,
            "effective_classes": search.effective_classes,
            "timing_ms": millis(start),
        }),
    )?;
    Ok(voisin.status != CheckStatus::Fail && kunneth.status != CheckStatus::Fail && oracle.0 != CheckStatus::Fail)
}

pub fn verify(path: &Path, names: &[String], box_bound: u32) -> CmdResult {
    if let Some(bad) = names.iter().find(|n| !CHECK_NAMES.contains(&n.as_str())) {
        return Err(Failure::Input(format!(
            "unknown check {bad:?}; expected one of {}",
            CHECK_NAMES.join(", ")
        )));
    }
    let (_, td) = load_torus(path)?;
    let a = td.build_torus()?;
    let mut ok = true;
    for name in names {
        let outcome = checks::run_check(name, &a, box_bound).expect("name validated")?;
        ok &= outcome.status != CheckStatus::Fail;
        out!("{outcome}");
    }
    Ok(ok)
}

pub fn report_threefolds(format: Format) -> CmdResult {
    let catalog = threefold_catalog();
    let mut lines = Vec::with_capacity(catalog.len() + 1);
    match format {
        Format::Table => {
            lines.push(format!("{:<6} {:<16} {:<28} {}", "delta", "A ~", "case", "witness"));
            for e in &catalog {
                lines.push(format!(
                    "{:<6} {:<16} {:<28} {}",
                    e.report.delta,
                    e.name,
                    e.report.case.to_string(),
                    e.report.witness_factor.as_deref().unwrap_or("-")
                ));
            }
        }
        Format::Machine => {
            for e in &catalog {
                let factors = e
                    .spec
                    .factors()
                    .iter()
                    .map(|f| FactorEntry { label: Some(f.label.clone()), kind: f.kind.clone(), mult: f.mult })
                    .collect();
                let record = json!({
                    "name": e.name,
                    "delta": e.report.delta,
                    "case": e.report.case.to_string(),
                    "witness_factor": e.report.witness_factor,
                    "spec": IsogenyDocument { factors }.to_json(),
                });
                lines.push(serde_json::to_string(&record).expect("records serialize"));
            }
        }
    }
    let mut stdout = std::io::stdout().lock();
    for line in lines {
        // a closed pipe (e.g. `| head`) just ends the output
        if writeln!(stdout, "{line}").is_err() {
            break;
        }
    }
    Ok(true)
}
