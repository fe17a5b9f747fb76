//! The stated rules of each flavour, before meta-closure.

use std::collections::BTreeSet;

use super::{Family, MetaTag, ParametricRule, RewriteRule, Rule, RuleKind};
use crate::diagram::Flavour;
use crate::dsl;

fn concrete(name: &str, flavour: Flavour, kind: RuleKind, lhs: &str, rhs: &str) -> Rule {
    let kw = flavour.keyword();
    let side = |body: &str| {
        dsl::parse(&format!("diagram {kw} {{ {body} }}"))
            .unwrap_or_else(|e| panic!("rule {name}: {e}"))
    };
    Rule::Concrete(RewriteRule {
        name: name.to_string(),
        flavour,
        lhs: side(lhs),
        rhs: side(rhs),
        closure: BTreeSet::from([MetaTag::Dagger, MetaTag::ColourPerm]),
        kind,
        origin: String::new(),
    })
}

fn family(flavour: Flavour, family: Family, kind: RuleKind) -> Rule {
    Rule::Parametric(ParametricRule {
        name: family.name().to_string(),
        flavour,
        family,
        kind,
    })
}

const WIRE: &str = "inputs a; outputs b; wire a -> b;";

fn rg(flavour: Flavour) -> Vec<Rule> {
    use RuleKind::Axiom;
    let mut v = vec![
        concrete(
            "bialgebra",
            flavour,
            Axiom,
            "inputs a, b; outputs c, d; node g1: green 0; node g2: green 0; node r1: red 0; node r2: red 0;
             wire a -> g1; wire b -> g2; wire g1 -> r1; wire g1 -> r2; wire g2 -> r1; wire g2 -> r2;
             wire r1 -> c; wire r2 -> d;",
            "inputs a, b; outputs c, d; node r: red 0; node g: green 0;
             wire a -> r; wire b -> r; wire r -> g; wire g -> c; wire g -> d;",
        ),
        concrete(
            "copy",
            flavour,
            Axiom,
            "outputs a, b; node r: red 0; node g: green 0; wire r -> g; wire g -> a; wire g -> b;",
            "outputs a, b; node r1: red 0; node r2: red 0; wire r1 -> a; wire r2 -> b;",
        ),
        concrete(
            "cups",
            flavour,
            Axiom,
            "outputs a, b; node g: green 0; wire g -> a; wire g -> b;",
            "outputs a, b; node r: red 0; wire r -> a; wire r -> b;",
        ),
        concrete(
            "pi-copy",
            flavour,
            Axiom,
            "inputs a; outputs b, c; node r: red 2; node g: green 0; wire a -> r; wire r -> g; wire g -> b; wire g -> c;",
            "inputs a; outputs b, c; node g: green 0; node r1: red 2; node r2: red 2;
             wire a -> g; wire g -> r1; wire g -> r2; wire r1 -> b; wire r2 -> c;",
        ),
        concrete(
            "h-involution",
            flavour,
            Axiom,
            "inputs a; outputs b; node p: green 0; wire a -> p [h]; wire p -> b [h];",
            WIRE,
        ),
    ];
    for theta in 1..4 {
        v.push(concrete(
            "pi-commute",
            flavour,
            Axiom,
            &format!("inputs a; outputs b; node g: green 2; node r: red {theta}; wire a -> g; wire g -> r; wire r -> b;"),
            &format!("inputs a; outputs b; node r: red {}; node g: green 2; wire a -> r; wire r -> g; wire g -> b;", 4 - theta),
        ));
    }
    for f in [
        Family::SpiderFusion,
        Family::IdentityElision,
        Family::ColourChange,
        Family::ScalarDrop,
    ] {
        v.push(family(flavour, f, Axiom));
    }
    if flavour == Flavour::RgPlus {
        v.push(concrete(
            "euler-h",
            flavour,
            Axiom,
            "inputs a; outputs b; wire a -> b [h];",
            "inputs a; outputs b; node x: green 1; node y: red 1; node z: green 1;
             wire a -> x; wire x -> y; wire y -> z; wire z -> b;",
        ));
    }
    v
}

fn rgb() -> Vec<Rule> {
    use RuleKind::{Axiom, Theorem};
    let f = Flavour::Rgb;
    let point = |decos: &[&str]| {
        let mut s = String::from("inputs a; outputs b;");
        let mut prev = "a".to_string();
        for (k, d) in decos.iter().enumerate() {
            let next = if k + 1 == decos.len() {
                "b".to_string()
            } else {
                let p = format!("p{k}");
                s.push_str(&format!(" node {p}: green 0;"));
                p
            };
            s.push_str(&format!(" wire {prev} -> {next} [{d}];"));
            prev = next;
        }
        s
    };
    let mut v = vec![
        concrete(
            "bialgebra-copy",
            f,
            Axiom,
            "outputs a, b; node u: blue 0; node g: green 0; wire u -> g; wire g -> a; wire g -> b;",
            "outputs a, b; node u1: blue 0; node u2: blue 0; wire u1 -> a; wire u2 -> b;",
        ),
        concrete(
            "bialgebra-cocopy",
            f,
            Axiom,
            "inputs a, b; node r: red 3; node g: green 0; wire a -> r; wire b -> r; wire r -> g;",
            "inputs a, b; node g1: green 0; node g2: green 0; wire a -> g1; wire b -> g2;",
        ),
        concrete(
            "bialgebra",
            f,
            Axiom,
            "inputs a, b; outputs c, d; node g1: green 0; node g2: green 0; node r1: red 3; node r2: red 3;
             wire a -> g1; wire b -> g2; wire g1 -> r1; wire g1 -> r2; wire g2 -> r1; wire g2 -> r2;
             wire r1 -> c; wire r2 -> d;",
            "inputs a, b; outputs c, d; node r: red 3; node g: green 0;
             wire a -> r; wire b -> r; wire r -> g; wire g -> c; wire g -> d;",
        ),
        concrete(
            "rot-via-mul",
            f,
            Axiom,
            "inputs a; outputs b; node u: red 0; node g: green 0; wire a -> g; wire u -> g; wire g -> b;",
            "inputs a; outputs b; node g: green 1; wire a -> g; wire g -> b;",
        ),
        concrete(
            "cw-def",
            f,
            Axiom,
            "inputs a; outputs b; wire a -> b [cw];",
            "inputs a; outputs b; node x: green 1; node y: blue 1; wire a -> x; wire x -> y; wire y -> b;",
        ),
        concrete("ccw-def", f, Axiom, &point(&["ccw"]), &point(&["cw", "cw"])),
        concrete(
            "dual-def",
            f,
            Axiom,
            "inputs a; outputs b; wire a -> b [dualY];",
            "inputs a; outputs b; node cap: red 0; node cup: green 0; wire a -> cap; wire cup -> cap; wire cup -> b;",
        ),
        concrete(
            "dual-def",
            f,
            Axiom,
            "inputs a; outputs b; wire a -> b [dualY];",
            "inputs a; outputs b; node cap: green 0; node cup: red 0; wire a -> cap; wire cup -> cap; wire cup -> b;",
        ),
        concrete(
            "dual-pi",
            f,
            Axiom,
            "inputs a; outputs b; wire a -> b [dualY];",
            "inputs a; outputs b; node r: red 2; wire a -> r; wire r -> b;",
        ),
        concrete(
            "bialgebra-convenient",
            f,
            Theorem,
            "inputs a, b; outputs c, d; node g1: green 0; node g2: green 0; node r1: red 0; node r2: red 0;
             wire a -> g1; wire b -> g2; wire g1 -> r1; wire g1 -> r2; wire g2 -> r1; wire g2 -> r2;
             wire r1 -> c; wire r2 -> d;",
            "inputs a, b; outputs c, d; node r: red 0; node x: blue 1;
             wire a -> r; wire b -> r; wire r -> x; wire x -> c; wire x -> d;",
        ),
        concrete(
            "hopf",
            f,
            Theorem,
            "inputs a; outputs b; node g: green 0; node r: red 3; wire a -> g; wire g -> r; wire g -> r; wire r -> b;",
            "inputs a; outputs b; node g: green 0; node u: blue 0; wire a -> g; wire u -> b;",
        ),
        concrete("changer-inversion", f, Theorem, &point(&["cw", "ccw"]), WIRE),
        concrete("changer-inversion", f, Theorem, &point(&["ccw", "cw"]), WIRE),
        concrete("dual-same-annihilate", f, Theorem, &point(&["dualY", "dualY"]), WIRE),
        concrete("dual-hetero-annihilate", f, Theorem, &point(&["dualY", "dualC", "dualM"]), WIRE),
        concrete("dual-hetero-annihilate", f, Theorem, &point(&["dualM", "dualC", "dualY"]), WIRE),
        concrete(
            "dual-unit",
            f,
            Theorem,
            "outputs a; node u: green 0; wire u -> a [dualY];",
            "outputs a; node u: green 0; wire u -> a;",
        ),
        concrete(
            "dual-unit",
            f,
            Theorem,
            "outputs a; node u: red 0; wire u -> a [dualY];",
            "outputs a; node u: red 2; wire u -> a;",
        ),
        concrete(
            "dual-unit",
            f,
            Theorem,
            "outputs a; node u: blue 0; wire u -> a [dualY];",
            "outputs a; node u: blue 2; wire u -> a;",
        ),
    ];
    for (fam, kind) in [
        (Family::SpiderFusion, Axiom),
        (Family::IdentityElision, Axiom),
        (Family::ColourChange, Theorem),
        (Family::ColourViaOthers, Theorem),
        (Family::ArrowInversion, Theorem),
        (Family::DualAllLegs, Theorem),
        (Family::DualPhase, Theorem),
        (Family::StateCopy, Theorem),
        (Family::ScalarDrop, Axiom),
    ] {
        v.push(family(f, fam, kind));
    }
    v
}

pub(crate) fn stated(flavour: Flavour) -> Vec<Rule> {
    match flavour {
        Flavour::Rg | Flavour::RgPlus => rg(flavour),
        Flavour::Rgb => rgb(),
    }
}
