use std::collections::BTreeSet;

use trichromatic::dsl::parse;
use trichromatic::rules::{
    bounded_search, close_under_meta, load_library, parse_script, run_script, Anchor, DerivationScript,
    MetaTag, RewriteRule, Rule, RuleKind, ScriptErrorKind, SearchLimits, SearchOutcome,
};
use trichromatic::{iso_equal, Diagram, Direction, Flavour, Library, RuleError};

fn d(text: &str) -> Diagram {
    parse(text).unwrap()
}

fn rule(flavour: Flavour, lhs: &str, rhs: &str) -> RewriteRule {
    RewriteRule {
        name: "probe".into(),
        flavour,
        lhs: d(lhs),
        rhs: d(rhs),
        closure: BTreeSet::from([MetaTag::Dagger, MetaTag::ColourPerm]),
        kind: RuleKind::Axiom,
        origin: String::new(),
    }
}

#[test]
fn libraries_contain_the_named_rules() {
    let rg = load_library(Flavour::Rg).unwrap();
    for name in ["bialgebra", "h-involution", "pi-copy", "spider-fusion"] {
        assert!(rg.contains(name), "{name}");
    }
    assert!(!rg.contains("euler-h"));
    let plus = load_library(Flavour::RgPlus).unwrap();
    assert!(plus.contains("euler-h"));
    for name in rg.names() {
        assert!(plus.contains(name), "{name}");
    }
    let rgb = load_library(Flavour::Rgb).unwrap();
    for name in ["hopf", "dual-same-annihilate", "dual-hetero-annihilate", "colour-via-others"] {
        assert!(rgb.contains(name), "{name}");
    }
}

#[test]
fn unsound_rule_is_reported() {
    // A green quarter turn is not the identity.
    let bad = rule(
        Flavour::Rg,
        "diagram rg { inputs a; outputs b; node g: green 1; wire a -> g; wire g -> b; }",
        "diagram rg { inputs a; outputs b; wire a -> b; }",
    );
    let lib = Library::from_rules(Flavour::Rg, vec![Rule::Concrete(bad)]);
    let report = lib.check_soundness(2);
    assert!(!report.all_ok());
    // Dagger and colour flip give four distinct variants, all unsound.
    assert_eq!(report.failures().count(), 4);
}

#[test]
fn closure_adds_colour_images_once() {
    let fuse = rule(
        Flavour::Rgb,
        "diagram rgb { inputs a; outputs b; node x: green 1; node y: green 1; wire a -> x; wire x -> y; wire y -> b; }",
        "diagram rgb { inputs a; outputs b; node x: green 2; wire a -> x; wire x -> b; }",
    );
    let closed = close_under_meta(vec![fuse]);
    // Three colours; the dagger of a phase-1 pair is a phase-3 pair.
    assert_eq!(closed.len(), 6);
    let reds = closed
        .iter()
        .filter(|r| r.lhs.nodes().all(|n| n.color == trichromatic::Color::Red))
        .count();
    assert_eq!(reds, 2);

    let sym = rule(
        Flavour::Rg,
        "diagram rg { inputs a; outputs b; wire a -> b; }",
        "diagram rg { inputs a; outputs b; node g: green 0; wire a -> g; wire g -> b; }",
    );
    // Dagger and flip add nothing new.
    assert_eq!(close_under_meta(vec![sym]).len(), 2);
}

#[test]
fn elision_matches_a_single_point() {
    let lib = load_library(Flavour::Rg).unwrap();
    let host = d("diagram rg { inputs a; outputs b; node g: green 0; wire a -> g; wire g -> b; }");
    let m = lib
        .find_matches("identity-elision", Direction::Forward, &host, &Anchor::new())
        .unwrap();
    assert_eq!(m.len(), 1);
}

#[test]
fn fusion_across_parallel_edges() {
    let lib = load_library(Flavour::Rg).unwrap();
    let host = d(
        "diagram rg { inputs a; outputs b; node x: green 1; node y: green 1;
         wire a -> x; wire x -> y; wire x -> y; wire y -> b; }",
    );
    let m = lib.find_matches("spider-fusion", Direction::Forward, &host, &Anchor::new()).unwrap();
    assert!(!m.is_empty());
    let out = lib.apply(&host, &m[0]).unwrap();
    assert_eq!(out.node_count(), 1);
}

#[test]
fn blue_pattern_does_not_match_an_rg_host() {
    let rgb = load_library(Flavour::Rgb).unwrap();
    let host = d("diagram rg { outputs b; node r: red 0; wire r -> b; }");
    let rule = rgb
        .get("dual-unit")
        .into_iter()
        .find_map(|r| match r {
            Rule::Concrete(c) => Some(c),
            _ => None,
        })
        .unwrap();
    assert!(rule.find_matches(&host, Direction::Forward, 0).is_empty());
}

#[test]
fn fusion_adds_phases() {
    let lib = load_library(Flavour::Rg).unwrap();
    let host = d("diagram rg { inputs a; outputs b; node x: green 1; node y: green 1; wire a -> x; wire x -> y; wire y -> b; }");
    let want = d("diagram rg { inputs a; outputs b; node z: green 2; wire a -> z; wire z -> b; }");
    let run = run_script(
        lib,
        &DerivationScript::new(host, parse_script("apply spider-fusion").unwrap()).with_target(want),
        true,
    )
    .unwrap();
    assert_eq!(run.log.len(), 1);
}

#[test]
fn dualizers_annihilate() {
    let lib = load_library(Flavour::Rgb).unwrap();
    let wire = d("diagram rgb { inputs a; outputs b; wire a -> b; }");
    for (text, rule) in [
        (
            "diagram rgb { inputs a; outputs b; node p: green 0; wire a -> p [dualY]; wire p -> b [dualY]; }",
            "dual-same-annihilate",
        ),
        (
            "diagram rgb { inputs a; outputs b; node p: green 0; node q: green 0;
             wire a -> p [dualY]; wire p -> q [dualC]; wire q -> b [dualM]; }",
            "dual-hetero-annihilate",
        ),
    ] {
        let script = parse_script(&format!("apply {rule}")).unwrap();
        let run = run_script(lib, &DerivationScript::new(d(text), script).with_target(wire.clone()), true);
        assert!(run.is_ok(), "{rule}: {:?}", run.err());
    }
}

#[test]
fn empty_script_returns_the_start() {
    let lib = load_library(Flavour::Rg).unwrap();
    let start = d("diagram rg { inputs a; outputs b; node g: green 3; wire a -> g; wire g -> b; }");
    let run = run_script(lib, &DerivationScript::new(start.clone(), Vec::new()), true).unwrap();
    assert!(iso_equal(&run.result, &start));
}

#[test]
fn corrupted_script_fails_at_its_step() {
    let lib = load_library(Flavour::Rgb).unwrap();
    let text = trichromatic::corpus::SUPPLEMENTARITY.replacen(
        "apply arrow-inversion at from=n3, to=n4",
        "apply hopf",
        1,
    );
    let lhs = trichromatic::functors::translate_t(&d(trichromatic::corpus::SUPP_LHS)).unwrap();
    let err = run_script(lib, &DerivationScript::new(lhs, parse_script(&text).unwrap()), true).unwrap_err();
    assert_eq!(err.step, 2);
    assert!(matches!(err.kind, ScriptErrorKind::Rule(RuleError::NoMatch { .. })));
}

#[test]
fn unknown_rule_is_an_error() {
    let lib = load_library(Flavour::Rg).unwrap();
    let start = d("diagram rg { inputs a; outputs b; wire a -> b; }");
    let err = run_script(lib, &DerivationScript::new(start, parse_script("apply nonsense").unwrap()), false)
        .unwrap_err();
    assert!(matches!(err.kind, ScriptErrorKind::Rule(RuleError::UnknownRule(_))));
}

#[test]
fn search_examples() {
    let lib = load_library(Flavour::Rg).unwrap();
    let one = d("diagram rg { inputs a; outputs b; node g: green 2; wire a -> g; wire g -> b; }");
    assert_eq!(bounded_search(lib, &one, &one, SearchLimits::depth(0)), SearchOutcome::Found(vec![]));
    let two = d("diagram rg { inputs a; outputs b; node x: green 1; node y: green 1; wire a -> x; wire x -> y; wire y -> b; }");
    match bounded_search(lib, &two, &one, SearchLimits::depth(1)) {
        SearchOutcome::Found(p) => assert_eq!(p.len(), 1),
        other => panic!("{other:?}"),
    }
}

#[test]
fn supplementarity_is_out_of_reach_in_rg() {
    let lib = load_library(Flavour::Rg).unwrap();
    let lhs = d(trichromatic::corpus::SUPP_LHS);
    let rhs = d(trichromatic::corpus::SUPP_RHS);
    let out = bounded_search(lib, &lhs, &rhs, SearchLimits::depth(6));
    assert!(matches!(out, SearchOutcome::NotFound { truncated: false, .. }), "{out:?}");
}
