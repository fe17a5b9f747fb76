//! Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails. Every count, seed and tolerance is fixed below.

use std::process::ExitCode;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use trichromatic::dsl::{parse, print};
use trichromatic::functors::{check_roundtrip, to_unrestricted, translate_s, translate_t};
use trichromatic::interp::{check_dagger_functor, eval_exact, eval_float, Generator};
use trichromatic::random::{random_diagram, RandomConfig};
use trichromatic::rules::{Rule, LOAD_ARITY};
use trichromatic::verify::{run_suite, CheckRow, Suite, VerifyOptions};
use trichromatic::{corpus, iso_equal, Diagram, Flavour, Library, PhaseGroup};

/// Largest spider arity for rule families.
const MAX_ARITY: usize = 4;
/// Exact criteria compare in the cyclotomic ring; no tolerance is used.
const FLOAT_TOL: f64 = 1e-9;
const SEARCH_DEPTH: usize = 5;
const TRANSLATION_SAMPLES: usize = 200;
const TRANSLATION_MAX_NODES: usize = 5;
const DAGGER_SAMPLES: usize = 500;
const FLOAT_SAMPLES: usize = 200;
const PARSER_SAMPLES: usize = 1000;
const SEED: u64 = 20_061_025;

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        ok,
        detail: detail.into(),
    }
}

/// Summarises suite rows: all must pass and there must be some.
fn rows_verdict(rows: &[CheckRow]) -> Verdict {
    let failed: Vec<&CheckRow> = rows.iter().filter(|r| !r.ok).collect();
    let mut detail = format!("{}/{} checks", rows.len() - failed.len(), rows.len());
    if let Some(f) = failed.first() {
        detail.push_str(&format!("; first failure: {f}"));
    }
    verdict(!rows.is_empty() && failed.is_empty(), detail)
}

fn all_c4(lib: &Library) -> bool {
    lib.rules().iter().all(|r| match r {
        Rule::Concrete(c) => c.lhs.phase_group() == PhaseGroup::C4 && c.rhs.phase_group() == PhaseGroup::C4,
        Rule::Parametric(_) => true,
    })
}

fn soundness(flavour: Flavour) -> Verdict {
    let lib = Library::build(flavour);
    let report = lib.check_soundness(MAX_ARITY);
    let rows: Vec<CheckRow> = report
        .checks
        .iter()
        .map(|c| CheckRow {
            name: c.rule.clone(),
            ok: c.ok,
            detail: c.detail.clone(),
        })
        .collect();
    let mut v = rows_verdict(&rows);
    v.ok &= all_c4(&lib);
    v.detail.push_str(&format!(", {} instances, exact", report.instances()));
    v
}

fn opts() -> VerifyOptions {
    VerifyOptions {
        flavour: None,
        max_arity: MAX_ARITY,
        random_diagrams: TRANSLATION_SAMPLES,
        random_max_nodes: TRANSLATION_MAX_NODES,
        search_depth: SEARCH_DEPTH,
    }
}

fn supplementarity() -> Verdict {
    let rows = run_suite(Suite::Supplementarity, &opts());
    let picked: Vec<CheckRow> = rows.into_iter().filter(|r| !r.name.contains("search")).collect();
    rows_verdict(&picked)
}

fn non_derivability() -> Verdict {
    let rows = run_suite(Suite::Supplementarity, &opts());
    let search: Vec<CheckRow> = rows
        .iter()
        .filter(|r| r.name.contains("search") || r.name.contains("script"))
        .cloned()
        .collect();
    let mut v = rows_verdict(&search);
    v.ok &= search.len() == 2;
    if let Some(r) = search.iter().find(|r| r.name.contains("search")) {
        v.detail = format!("{}; {}: {}", v.detail, r.name, r.detail);
    }
    v
}

fn translation(rows: &[CheckRow]) -> Verdict {
    let picked: Vec<CheckRow> = rows.iter().filter(|r| r.name.starts_with("T ")).cloned().collect();
    let mut v = rows_verdict(&picked);
    let random = picked.iter().any(|r| {
        r.name.contains(&format!("{TRANSLATION_SAMPLES} random")) && r.name.contains(&format!("{TRANSLATION_MAX_NODES} nodes"))
    });
    v.ok &= random;
    v.detail.push_str(&format!(
        ", including {TRANSLATION_SAMPLES} random diagrams of at most {TRANSLATION_MAX_NODES} nodes"
    ));
    v
}

fn roundtrip() -> Verdict {
    let mut rows = Vec::new();
    for fl in [Flavour::Rgb, Flavour::RgPlus] {
        for g in Generator::all(fl) {
            let (ok, detail) = match check_roundtrip(fl, g) {
                Ok(r) => (r.ok(), r.script.err().unwrap_or_default()),
                Err(e) => (false, e.to_string()),
            };
            rows.push(CheckRow {
                name: format!("{fl} {g}"),
                ok,
                detail,
            });
        }
    }
    rows_verdict(&rows)
}

fn dagger() -> Verdict {
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut bad = Vec::new();
    for fl in [Flavour::Rg, Flavour::RgPlus, Flavour::Rgb] {
        let cfg = RandomConfig::new(fl, 5);
        for k in 0..DAGGER_SAMPLES {
            let d = random_diagram(&mut rng, &cfg);
            if check_dagger_functor(&d).ok() != Some(true) {
                bad.push(format!("{fl}#{k}"));
            }
        }
    }
    verdict(
        bad.is_empty(),
        format!("{DAGGER_SAMPLES} per flavour, exact, {} failures {bad:?}", bad.len()),
    )
}

fn float_agreement() -> Verdict {
    let mut rng = StdRng::seed_from_u64(SEED + 1);
    let (mut close, mut bitwise, mut worst) = (0, 0, 0.0f64);
    for k in 0..FLOAT_SAMPLES {
        let fl = [Flavour::Rg, Flavour::RgPlus, Flavour::Rgb][k % 3];
        let d = random_diagram(&mut rng, &RandomConfig::new(fl, 5));
        let (Ok(exact), Ok(float)) = (eval_exact(&d), eval_float(&d)) else {
            continue;
        };
        let Ok(approx) = exact.to_approx() else { continue };
        if float.proportional_to(&approx, FLOAT_TOL) == Some(true) {
            close += 1;
        }
        worst = worst.max(residual(&float, &approx));
        if eval_float(&to_unrestricted(&d)).ok().as_ref() == Some(&float) {
            bitwise += 1;
        }
    }
    verdict(
        close == FLOAT_SAMPLES && bitwise == FLOAT_SAMPLES,
        format!(
            "{close}/{FLOAT_SAMPLES} within {FLOAT_TOL:e} (worst {worst:.1e}), {bitwise}/{FLOAT_SAMPLES} bit-identical after to_unrestricted"
        ),
    )
}

/// Largest entry of `|a - z b|` for the least-squares scalar `z`.
fn residual(a: &trichromatic::FloatMatrix, b: &trichromatic::FloatMatrix) -> f64 {
    let (mut num, mut den) = (trichromatic::ApproxNum::new(0.0, 0.0), 0.0);
    for (x, y) in a.entries().iter().zip(b.entries()) {
        num += y.conj() * x;
        den += y.norm_sqr();
    }
    if den == 0.0 {
        return a.entries().iter().map(|x| x.norm()).fold(0.0, f64::max);
    }
    let z = num / den;
    a.entries()
        .iter()
        .zip(b.entries())
        .map(|(x, y)| (x - z * y).norm())
        .fold(0.0, f64::max)
}

/// Every diagram that appears in the other criteria.
fn bundled() -> Vec<Diagram> {
    let mut out = Vec::new();
    for (_, text) in corpus::DIAGRAMS {
        let d = parse(text).expect("corpus parses");
        if d.flavour() == Flavour::Rg {
            out.push(translate_t(&d).expect("T applies"));
        }
        out.push(d);
    }
    for fl in [Flavour::Rg, Flavour::RgPlus, Flavour::Rgb] {
        for r in Library::build(fl).rules() {
            if let Rule::Concrete(c) = r {
                out.push(c.lhs.clone());
                out.push(c.rhs.clone());
            }
        }
        for g in Generator::all(fl) {
            let d = g.to_diagram(fl);
            match fl {
                Flavour::Rgb => out.push(translate_t(&translate_s(&d).expect("S")).expect("T")),
                Flavour::RgPlus => out.push(translate_s(&translate_t(&d).expect("T")).expect("S")),
                Flavour::Rg => out.push(translate_t(&d).expect("T")),
            }
            out.push(d);
        }
    }
    out
}

fn stable(d: &Diagram) -> bool {
    let text = print(d);
    let Ok(back) = parse(&text) else { return false };
    let again = print(&back);
    iso_equal(d, &back) && again == text && parse(&again).map(|x| iso_equal(&x, d)).unwrap_or(false)
}

fn parser() -> Verdict {
    let corpus = bundled();
    let corpus_ok = corpus.iter().filter(|d| stable(d)).count();
    let mut rng = StdRng::seed_from_u64(SEED + 2);
    let mut random_ok = 0;
    for k in 0..PARSER_SAMPLES {
        let fl = [Flavour::Rg, Flavour::RgPlus, Flavour::Rgb][k % 3];
        let mut cfg = RandomConfig::new(fl, 5);
        cfg.unrestricted = rng.gen_bool(0.25);
        if stable(&random_diagram(&mut rng, &cfg)) {
            random_ok += 1;
        }
    }
    // Source text in the corpus, read as written.
    let text_ok = corpus::DIAGRAMS.iter().all(|(_, t)| {
        let p = print(&parse(t).expect("corpus parses"));
        parse(&p).map(|d| print(&d) == p).unwrap_or(false)
    });
    verdict(
        corpus_ok == corpus.len() && random_ok == PARSER_SAMPLES && text_ok,
        format!(
            "corpus {corpus_ok}/{}, random {random_ok}/{PARSER_SAMPLES}, source text {}",
            corpus.len(),
            if text_ok { "stable" } else { "unstable" }
        ),
    )
}

struct Report {
    run: usize,
    failed: usize,
}

impl Report {
    fn check(&mut self, name: &str, f: impl FnOnce() -> Verdict) {
        self.run += 1;
        let t = Instant::now();
        let v = f();
        let mark = if v.ok { "PASS" } else { "FAIL" };
        println!("{mark} {:>2}. {name}: {} [{:.2?}]", self.run, v.detail, t.elapsed());
        if !v.ok {
            self.failed += 1;
        }
    }
}

fn main() -> ExitCode {
    assert_eq!(MAX_ARITY, LOAD_ARITY, "the library self-check and the suite use one arity");
    let started = Instant::now();
    let mut r = Report { run: 0, failed: 0 };
    r.check("axiom soundness (rg)", || soundness(Flavour::Rg));
    r.check("axiom soundness (rgb, with derived rules)", || soundness(Flavour::Rgb));
    r.check("supplementarity", supplementarity);
    r.check("non-derivability evidence", non_derivability);
    r.check("euler decomposition", || rows_verdict(&run_suite(Suite::Euler, &opts())));
    r.check("octahedral group", || rows_verdict(&run_suite(Suite::Group, &opts())));
    r.check("translation soundness", || translation(&run_suite(Suite::Functors, &opts())));
    r.check("isomorphism roundtrip", roundtrip);
    r.check("dagger functoriality", dagger);
    r.check("float/exact agreement", float_agreement);
    r.check("parser round-trip", parser);
    println!("{} of {} criteria passed in {:.2?}", r.run - r.failed, r.run, started.elapsed());
    if r.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
