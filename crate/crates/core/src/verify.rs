//! Verification suites: deterministic checks printed as pass/fail tables by
//! the command line and reused by the acceptance tests.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::rngs::StdRng;
use rand::SeedableRng;

use crate::corpus;
use crate::diagram::{Diagram, Flavour};
use crate::dsl::parse;
use crate::functors::{check_roundtrip, translate_t};
use crate::groups::{
    check_iso_pair, check_relators, f_map, g_map, images, order_profile, rotation_group, s4_group, Named,
    Presentation, Word,
};
use crate::interp::{diagrams_equal, eval_exact, equal_up_to_scalar, Generator, Matrix, DEFAULT_TOL};
use crate::random::{random_diagram, RandomConfig};
use crate::rules::{
    bounded_search, family_instances, load_library, parse_script, run_script, DerivationScript, Library,
    Rule, RuleKind, SearchLimits, SearchOutcome, LOAD_ARITY,
};
use crate::CycloNum;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Axioms,
    Derived,
    Functors,
    Supplementarity,
    Euler,
    Group,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Axioms,
        Suite::Derived,
        Suite::Functors,
        Suite::Supplementarity,
        Suite::Euler,
        Suite::Group,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Axioms => "axioms",
            Suite::Derived => "derived",
            Suite::Functors => "functors",
            Suite::Supplementarity => "supplementarity",
            Suite::Euler => "euler",
            Suite::Group => "group",
        }
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Suite, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite '{s}'"))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Restrict rule suites to one flavour.
    pub flavour: Option<Flavour>,
    /// Largest spider arity used to instantiate rule families.
    pub max_arity: usize,
    /// Random RG diagrams checked by the functor suite.
    pub random_diagrams: usize,
    /// Node bound for those diagrams.
    pub random_max_nodes: usize,
    pub search_depth: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            flavour: None,
            max_arity: LOAD_ARITY,
            random_diagrams: 200,
            random_max_nodes: 5,
            search_depth: 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckRow {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

impl CheckRow {
    fn new(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> CheckRow {
        CheckRow {
            name: name.into(),
            ok,
            detail: detail.into(),
        }
    }

    fn from_result(name: impl Into<String>, r: Result<bool, String>) -> CheckRow {
        match r {
            Ok(ok) => CheckRow::new(name, ok, ""),
            Err(e) => CheckRow::new(name, false, e),
        }
    }
}

impl fmt::Display for CheckRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.ok { "PASS" } else { "FAIL" };
        write!(f, "{verdict}  {}", self.name)?;
        if !self.detail.is_empty() {
            write!(f, "  ({})", self.detail.lines().next().unwrap_or(""))?;
        }
        Ok(())
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Vec<CheckRow> {
    match suite {
        Suite::Axioms => rule_rows(opts, RuleKind::Axiom),
        Suite::Derived => rule_rows(opts, RuleKind::Theorem),
        Suite::Functors => functor_rows(opts),
        Suite::Supplementarity => supplementarity_rows(opts),
        Suite::Euler => euler_rows(),
        Suite::Group => group_rows(),
    }
}

fn flavours(opts: &VerifyOptions, default: &[Flavour]) -> Vec<Flavour> {
    match opts.flavour {
        Some(f) => vec![f],
        None => default.to_vec(),
    }
}

/// One row per closed rule variant and per family.
fn rule_rows(opts: &VerifyOptions, kind: RuleKind) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    for fl in flavours(opts, &[Flavour::Rg, Flavour::RgPlus, Flavour::Rgb]) {
        let lib = Library::build(fl).filter(|r| r.kind() == kind);
        for c in lib.check_soundness(opts.max_arity).checks {
            rows.push(CheckRow::new(format!("{fl} {}", c.rule), c.ok, c.detail));
        }
    }
    rows
}

fn functor_rows(opts: &VerifyOptions) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    for g in Generator::all(Flavour::Rg) {
        let d = g.to_diagram(Flavour::Rg);
        rows.push(CheckRow::from_result(format!("T preserves {g}"), t_preserves(&d)));
    }

    let mut rng = StdRng::seed_from_u64(0x7267_6221);
    let cfg = RandomConfig::new(Flavour::Rg, opts.random_max_nodes);
    let mut bad = Vec::new();
    for k in 0..opts.random_diagrams {
        let d = random_diagram(&mut rng, &cfg);
        if t_preserves(&d) != Ok(true) {
            bad.push(k);
        }
    }
    rows.push(CheckRow::new(
        format!(
            "T preserves {} random rg diagrams of at most {} nodes",
            opts.random_diagrams, opts.random_max_nodes
        ),
        bad.is_empty(),
        if bad.is_empty() { String::new() } else { format!("failing samples {bad:?}") },
    ));

    let lib = Library::build(Flavour::Rg);
    for rule in lib.rules() {
        match rule {
            Rule::Concrete(r) => {
                let res = (|| {
                    let (l, rr) = (translate_t(&r.lhs).map_err(s)?, translate_t(&r.rhs).map_err(s)?);
                    diagrams_equal(&l, &rr, DEFAULT_TOL).map_err(s)
                })();
                let tag = if r.origin.is_empty() { String::new() } else { format!(" [{}]", r.origin) };
                rows.push(CheckRow::from_result(format!("T respects {}{tag}", r.name), res));
            }
            Rule::Parametric(p) => {
                let mut n = 0;
                let mut failure = None;
                for inst in family_instances(Flavour::Rg, p.family, opts.max_arity) {
                    let res = inst.result.clone().and_then(|out| {
                        let (l, rr) = (translate_t(&inst.host).map_err(s)?, translate_t(&out).map_err(s)?);
                        diagrams_equal(&l, &rr, DEFAULT_TOL).map_err(s)
                    });
                    match res {
                        Ok(true) => n += 1,
                        Ok(false) => failure = Some(inst.label.clone()),
                        Err(e) => failure = Some(format!("{}: {e}", inst.label)),
                    }
                    if failure.is_some() {
                        break;
                    }
                }
                rows.push(match failure {
                    Some(f) => CheckRow::new(format!("T respects {}", p.name), false, f),
                    None => CheckRow::new(format!("T respects {}", p.name), n > 0, format!("{n} instances")),
                });
            }
        }
    }

    for fl in [Flavour::Rgb, Flavour::RgPlus] {
        for g in Generator::all(fl) {
            let label = match fl {
                Flavour::Rgb => format!("T(S({g})) rewrites to {g}"),
                _ => format!("S(T({g})) rewrites to {g} in rgplus"),
            };
            let row = match check_roundtrip(fl, g) {
                Ok(r) => {
                    let detail = match &r.script {
                        Err(e) => e.clone(),
                        Ok(()) if !r.semantic => "interpretation differs".into(),
                        Ok(()) => format!("{} steps", r.steps),
                    };
                    CheckRow::new(label, r.ok(), detail)
                }
                Err(e) => CheckRow::new(label, false, e.to_string()),
            };
            rows.push(row);
        }
    }
    rows
}

fn s(e: impl fmt::Display) -> String {
    e.to_string()
}

fn t_preserves(d: &Diagram) -> Result<bool, String> {
    crate::functors::check_translation_preserves_interp(d).map_err(s)
}

/// `|-><-|` up to scalar.
fn minus_projector() -> Matrix<CycloNum> {
    let (p, m) = (CycloNum::from_int(1), CycloNum::from_int(-1));
    Matrix::from_vec(2, 2, vec![p.clone(), m.clone(), m, p])
}

fn supplementarity_rows(opts: &VerifyOptions) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    let (lhs, rhs) = match (parse(corpus::SUPP_LHS), parse(corpus::SUPP_RHS)) {
        (Ok(l), Ok(r)) => (l, r),
        (l, r) => {
            let e = l.err().map(|e| e.to_string()).or(r.err().map(|e| e.to_string()));
            return vec![CheckRow::new("parse corpus", false, e.unwrap_or_default())];
        }
    };
    rows.push(CheckRow::from_result("rg sides are equal", diagrams_equal(&lhs, &rhs, DEFAULT_TOL).map_err(s)));
    for (name, d) in [("lhs", &lhs), ("rhs", &rhs)] {
        let res = eval_exact(d)
            .map_err(s)
            .and_then(|m| equal_up_to_scalar(&m, &minus_projector(), DEFAULT_TOL).map_err(s));
        rows.push(CheckRow::from_result(format!("{name} is |-><-|"), res));
    }

    let script_row = (|| {
        let lib = load_library(Flavour::Rgb).map_err(s)?;
        let start = translate_t(&lhs).map_err(s)?;
        let target = translate_t(&rhs).map_err(s)?;
        let steps = parse_script(corpus::SUPPLEMENTARITY).map_err(s)?;
        let n = steps.len();
        let script = DerivationScript::new(start, steps).with_target(target);
        let run = run_script(lib, &script, true).map_err(s)?;
        let all = run.log.iter().all(|l| l.verified == Some(true));
        Ok::<_, String>((all && run.reached_target == Some(true), n))
    })();
    rows.push(match script_row {
        Ok((ok, n)) => CheckRow::new("rgb script reaches T(rhs)", ok, format!("{n} verified steps")),
        Err(e) => CheckRow::new("rgb script reaches T(rhs)", false, e),
    });

    let search = load_library(Flavour::Rg).map(|lib| {
        bounded_search(lib, &lhs, &rhs, SearchLimits::depth(opts.search_depth))
    });
    rows.push(match search {
        Ok(SearchOutcome::NotFound { explored, truncated }) => CheckRow::new(
            format!("rg search depth {} finds no path", opts.search_depth),
            true,
            format!("{explored} states{}", if truncated { ", truncated" } else { "" }),
        ),
        Ok(SearchOutcome::Found(steps)) => CheckRow::new(
            format!("rg search depth {} finds no path", opts.search_depth),
            false,
            format!("found {} steps", steps.len()),
        ),
        Err(e) => CheckRow::new("rg search", false, e.to_string()),
    });
    rows
}

fn euler_rows() -> Vec<CheckRow> {
    let (Ok(h), Ok(e)) = (parse(corpus::EULER_LHS), parse(corpus::EULER_RHS)) else {
        return vec![CheckRow::new("parse corpus", false, "euler corpus does not parse")];
    };
    let mut rows = vec![CheckRow::from_result(
        "H equals green(1);red(1);green(1)",
        diagrams_equal(&h, &e, DEFAULT_TOL).map_err(s),
    )];
    let one_step = (|| {
        let lib = load_library(Flavour::RgPlus).map_err(s)?;
        let steps = parse_script(corpus::EULER).map_err(s)?;
        let n = steps.len();
        let run = run_script(lib, &DerivationScript::new(h.clone(), steps).with_target(e.clone()), true)
            .map_err(s)?;
        Ok::<_, String>(n == 1 && run.reached_target == Some(true))
    })();
    rows.push(CheckRow::from_result("euler-h closes the pair in one step", one_step));
    rows
}

fn group_rows() -> Vec<CheckRow> {
    let g = rotation_group();
    let s4 = s4_group();
    let rg = Named {
        group: &g,
        names: &["r", "g", "b"],
    };
    let sg = Named {
        group: &s4,
        names: &["t1", "t2", "t3"],
    };
    let profile = |p: BTreeMap<usize, usize>| format!("{p:?}");
    let mut rows = vec![CheckRow::new("order of <r1, g1, b1> is 24", g.order() == 24, format!("{}", g.order()))];
    let res = check_relators(&Presentation::rotations(), &g, &rg.assignment()).map_err(s);
    rows.push(CheckRow::from_result("rotation relators hold", res));
    let res = images(&f_map(), &rg).and_then(|a| check_relators(&Presentation::s4(), &g, &a));
    rows.push(CheckRow::from_result("S4 relators hold on f-images", res.map_err(s)));
    let res = images(&g_map(), &sg).and_then(|a| check_relators(&Presentation::rotations(), &s4, &a));
    rows.push(CheckRow::from_result("rotation relators hold on g-images", res.map_err(s)));
    let (pg, ps) = (order_profile(&g), order_profile(&s4));
    rows.push(CheckRow::new(
        "order profile matches S4",
        pg == ps && s4.order() == 24,
        profile(pg),
    ));
    rows.push(CheckRow::from_result(
        "f and g are mutually inverse",
        check_iso_pair(&rg, &sg, &f_map(), &g_map()).map_err(s),
    ));
    let mut short = g_map();
    short.insert("b".into(), Word::parse("t1 t2").expect("word"));
    rows.push(CheckRow::from_result(
        "truncated g is rejected",
        check_iso_pair(&rg, &sg, &f_map(), &short).map(|ok| !ok).map_err(s),
    ));
    rows
}

