//! Acceptance suite: one PASS/FAIL line per criterion, with timings checked
//! against the allowed budgets. Exits nonzero if any criterion fails.

use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use lefschetz_core::checks::{divisor_subtori, isogeny_spec_of_product, lefschetz_check, CheckStatus};
use lefschetz_core::classifier::{classify, IsogenyFactor, IsogenySpec};
use lefschetz_core::cohomology::voisin_kernels;
use lefschetz_core::effectivity::{torus_defect_with, SearchAudit, SearchOptions};
use lefschetz_core::exactmath::{rat, ratio, Rational, RealNumberField};
use lefschetz_core::torus::{hom_rank, picard_number, ComplexTorus};

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Option<Duration>,
    passed: bool,
    elapsed: Duration,
    detail: String,
}

fn report(c: &Criterion) -> bool {
    let in_time = c.budget.is_none_or(|b| c.elapsed <= b);
    let ok = c.passed && in_time;
    let budget = match c.budget {
        Some(b) => format!(" (budget {:.0?})", b),
        None => String::new(),
    };
    println!(
        "criterion {}: {} - {} [{:.2?}{}] {}",
        c.id,
        if ok { "PASS" } else { "FAIL" },
        c.name,
        c.elapsed,
        budget,
        c.detail
    );
    ok
}

fn fourth_root_two() -> Arc<RealNumberField> {
    RealNumberField::new(vec![(-2).into(), 0.into(), 0.into(), 0.into(), 1.into()], rat(1), ratio(6, 5))
        .expect("x^4 - 2 has one root in (1, 6/5)")
}

fn curve(field: &Arc<RealNumberField>, a: Rational, beta: &[i64], label: &str) -> ComplexTorus {
    let beta = field.element(beta.iter().map(|&c| rat(c)).collect());
    ComplexTorus::elliptic(a, beta, label).expect("beta > 0")
}

/// The explicit tori of the oracle corpus with their isogeny specs.
fn corpus() -> Vec<(&'static str, ComplexTorus, IsogenySpec)> {
    let q = RealNumberField::rationals();
    let k = fourth_root_two();
    let ei = curve(&q, rat(0), &[1], "E_i");
    let e2i = curve(&q, rat(0), &[2], "E_2i");
    let ei_k = curve(&k, rat(0), &[1], "E_i");
    let ea = curve(&k, rat(0), &[0, 1], "E_ia");
    let ea2 = curve(&k, rat(0), &[0, 0, 1], "E_ia2");
    let e1a = curve(&k, rat(0), &[1, 1], "E_i(1+a)");
    let p = |parts: &[&ComplexTorus]| ComplexTorus::product(&parts.iter().map(|t| (*t).clone()).collect::<Vec<_>>());
    let ell = IsogenyFactor::elliptic;
    let spec = |f: Vec<IsogenyFactor>| IsogenySpec::new(f).expect("valid spec");
    vec![
        ("E_i^2", p(&[&ei, &ei]).unwrap(), spec(vec![ell("E_i", true, 2)])),
        ("E_i^3", p(&[&ei, &ei, &ei]).unwrap(), spec(vec![ell("E_i", true, 3)])),
        ("E_i x E_2i", p(&[&ei, &e2i]).unwrap(), spec(vec![ell("E_i", true, 2)])),
        ("E_ia x E_ia", p(&[&ea, &ea]).unwrap(), spec(vec![ell("E_ia", false, 2)])),
        (
            "E_ia x E_ia2 x E_i(1+a)",
            p(&[&ea, &ea2, &e1a]).unwrap(),
            spec(vec![ell("E_ia", false, 1), ell("E_ia2", true, 1), ell("E_i(1+a)", false, 1)]),
        ),
        (
            "E_i^2 x E_ia",
            p(&[&ei_k, &ei_k, &ea]).unwrap(),
            spec(vec![ell("E_i", true, 2), ell("E_ia", false, 1)]),
        ),
    ]
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn criterion_1() -> Criterion {
    let ((passed, detail), elapsed) = timed(|| {
        let out = Command::new(env!("CARGO_BIN_EXE_defect"))
            .args(["report", "threefolds", "--format", "machine"])
            .output()
            .expect("defect binary runs");
        let deltas: Vec<u64> = String::from_utf8_lossy(&out.stdout)
            .lines()
            .filter_map(|l| serde_json::from_str::<serde_json::Value>(l).ok()?["delta"].as_u64())
            .collect();
        (out.status.success() && deltas == [5, 3, 2, 2, 1, 1, 0], format!("deltas {deltas:?}"))
    });
    Criterion {
        id: 1,
        name: "threefold table",
        budget: Some(Duration::from_secs(1)),
        passed,
        elapsed,
        detail,
    }
}

fn criterion_2() -> Criterion {
    let (bad, elapsed) = timed(|| {
        let mut bad = Vec::new();
        for k in 1..=5usize {
            for cm in [false, true] {
                let factors = if k == 1 {
                    // a lone curve is not a valid spec; pad with a simple threefold
                    vec![IsogenyFactor::elliptic("E", cm, k), IsogenyFactor::simple_other("X", 3, 1)]
                } else {
                    vec![IsogenyFactor::elliptic("E", cm, k)]
                };
                let got = classify(&IsogenySpec::new(factors).unwrap()).delta;
                let want = if cm { 2 * k - 1 } else { k };
                if got != want {
                    bad.push(format!("k={k} cm={cm}: {got} != {want}"));
                }
            }
        }
        bad
    });
    Criterion {
        id: 2,
        name: "CM formula for k = 1..5",
        budget: Some(Duration::from_secs(1)),
        passed: bad.is_empty(),
        elapsed,
        detail: if bad.is_empty() { "10 cases".into() } else { bad.join("; ") },
    }
}

fn criterion_3(audits: &mut SearchAudit) -> Criterion {
    let threads = std::env::var("DEFECT_THREADS").ok().and_then(|v| v.parse().ok()).unwrap_or(1);
    let (rows, elapsed) = timed(|| {
        corpus()
            .into_iter()
            .map(|(name, torus, spec)| {
                let options = SearchOptions { box_bound: 2, threads, audit: true };
                let search = torus_defect_with(&torus, &options).expect("search runs");
                let symbolic = classify(&spec).delta;
                // the product's own grouping must agree with the hand-written spec
                let derived = isogeny_spec_of_product(&torus).unwrap().map(|s| classify(&s).delta);
                (name, search, symbolic, derived)
            })
            .collect::<Vec<_>>()
    });
    let mut passed = true;
    let mut parts = Vec::new();
    for (name, search, symbolic, derived) in rows {
        passed &= search.delta == symbolic && derived == Some(symbolic);
        parts.push(format!("{name}: {}/{symbolic} ({} classes)", search.delta, search.classes_scanned));
        let a = search.audit.expect("audit requested");
        audits.checked += a.checked;
        audits.case_mismatches += a.case_mismatches;
        audits.bound_violations += a.bound_violations;
        audits.scaling_violations += a.scaling_violations;
        audits.distinct_radicals += a.distinct_radicals;
        audits.examples.extend(a.examples);
    }
    Criterion {
        id: 3,
        name: "oracle agreement, search vs classifier",
        budget: Some(Duration::from_secs(300)),
        passed,
        elapsed,
        detail: parts.join("; "),
    }
}

fn criterion_4() -> Criterion {
    let ((passed, count), elapsed) = timed(|| {
        let mut passed = true;
        let mut count = 0;
        for (_, torus, _) in corpus() {
            for (_, w) in divisor_subtori(&torus).unwrap() {
                let (k1, k2) = voisin_kernels(&torus, &w).unwrap();
                let (r1, r2) = (k1.rank(), k2.rank());
                // equal dimension, and each kernel lies in the span of the other
                passed &= r1 == r2 && k1.hstack(&k2).rank() == r1 && k2.hstack(&k1).rank() == r2;
                count += 1;
            }
        }
        (passed, count)
    });
    Criterion {
        id: 4,
        name: "Voisin kernel equality on divisor subtori",
        budget: Some(Duration::from_secs(10)),
        passed,
        elapsed,
        detail: format!("{count} subtori"),
    }
}

fn criterion_5() -> Criterion {
    let ((passed, detail), elapsed) = timed(|| {
        let k = fourth_root_two();
        let curves = [
            curve(&k, rat(0), &[1], "E_i"),
            curve(&k, rat(0), &[2], "E_2i"),
            curve(&k, ratio(1, 2), &[1], "E_(1+2i)/2"),
            curve(&k, rat(0), &[0, 1], "E_ia"),
            curve(&k, rat(0), &[0, 0, 1], "E_ia2"),
            curve(&k, rat(0), &[1, 1], "E_i(1+a)"),
            curve(&k, ratio(1, 3), &[0, 2], "E_1/3+2ia"),
        ];
        let mut rng = StdRng::seed_from_u64(0x5eed);
        let mut bad = Vec::new();
        let mut rhos = Vec::new();
        for _ in 0..20 {
            let len = rng.gen_range(2..=4);
            let parts: Vec<ComplexTorus> = (0..len).map(|_| curves[rng.gen_range(0..curves.len())].clone()).collect();
            let split = rng.gen_range(1..len);
            let c = ComplexTorus::product(&parts[..split]).unwrap();
            let t = ComplexTorus::product(&parts[split..]).unwrap();
            let a = ComplexTorus::product(&parts).unwrap();
            let (ra, rc, rt, h) = (picard_number(&a), picard_number(&c), picard_number(&t), hom_rank(&t, &c).unwrap());
            if ra != rc + rt + h {
                bad.push(format!("{ra} != {rc} + {rt} + {h}"));
            }
            rhos.push(ra);
        }
        (bad.is_empty(), if bad.is_empty() { format!("rho values {rhos:?}") } else { bad.join("; ") })
    });
    Criterion {
        id: 5,
        name: "Künneth rank identity on 20 random products",
        budget: Some(Duration::from_secs(30)),
        passed,
        elapsed,
        detail,
    }
}

fn criterion_6() -> Criterion {
    let ((passed, detail), elapsed) = timed(|| {
        let mut passed = true;
        let mut parts = Vec::new();
        for (name, torus, _) in corpus().into_iter().filter(|(_, t, _)| t.dim() >= 3) {
            let out = lefschetz_check(&torus).unwrap();
            passed &= out.status == CheckStatus::Pass;
            parts.push(format!("{name}: {}", out.detail));
        }
        (passed && !parts.is_empty(), parts.join("; "))
    });
    Criterion {
        id: 6,
        name: "hard Lefschetz injectivity on Lambda^2",
        budget: Some(Duration::from_secs(10)),
        passed,
        elapsed,
        detail,
    }
}

fn main() -> ExitCode {
    let mut audit = SearchAudit::default();
    let mut criteria = vec![criterion_1(), criterion_2()];
    let c3 = criterion_3(&mut audit);
    let c3_elapsed = c3.elapsed;
    criteria.push(c3);
    criteria.push(criterion_4());
    criteria.push(criterion_5());
    criteria.push(criterion_6());
    let examples = if audit.examples.is_empty() { String::new() } else { format!(", e.g. {}", audit.examples.join("; ")) };
    criteria.push(Criterion {
        id: 7,
        name: "case formula on every effective class found",
        budget: None,
        passed: audit.checked > 0 && audit.case_mismatches == 0,
        elapsed: c3_elapsed,
        detail: format!(
            "{} classes, {} radicals, {} mismatches{examples}",
            audit.checked, audit.distinct_radicals, audit.case_mismatches
        ),
    });
    criteria.push(Criterion {
        id: 8,
        name: "0 <= defect <= rho - 1 and defect(2E) = defect(E)",
        budget: None,
        passed: audit.checked > 0 && audit.bound_violations == 0 && audit.scaling_violations == 0,
        elapsed: c3_elapsed,
        detail: format!(
            "{} classes, {} bound violations, {} scaling violations",
            audit.checked, audit.bound_violations, audit.scaling_violations
        ),
    });
    let mut ok = true;
    for c in &criteria {
        ok &= report(c);
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
