//! Translations between the calculi.
//!
//! `translate_t` sends RG (and RG+) diagrams to RGB, `translate_s` sends RGB
//! diagrams to RG+. Both act node by node and keep the ids of translated
//! nodes, so scripts written against a translated diagram can name them.

use thiserror::Error;

use crate::diagram::{Color, Decoration, Diagram, Edge, Endpoint, Flavour, Phase, Violation};
use crate::interp::{diagrams_equal, Generator, InterpError, DEFAULT_TOL};
use crate::rules::{load_library, parse_script, run_script, DerivationScript, RuleError, ScriptError};

#[derive(Debug, Error)]
pub enum FunctorError {
    #[error("expected a {expected} diagram, got {found}")]
    WrongFlavour { expected: &'static str, found: Flavour },
    #[error("invalid diagram: {0}")]
    Invalid(#[from] Violation),
}

/// The Euler quotient: the same diagram read in RG+.
pub fn quotient(d: &Diagram) -> Result<Diagram, FunctorError> {
    if d.flavour() != Flavour::Rg {
        return Err(FunctorError::WrongFlavour {
            expected: "rg",
            found: d.flavour(),
        });
    }
    let mut out = d.clone();
    out.set_flavour(Flavour::RgPlus);
    Ok(out)
}

/// RG or RG+ to RGB. Green is unchanged, a red spider with `m` in-legs and
/// `n` out-legs gains `n - m` quarter turns, and a Hadamard edge becomes the
/// chain green(1); red(1); green(1).
pub fn translate_t(d: &Diagram) -> Result<Diagram, FunctorError> {
    if !d.flavour().is_dichromatic() {
        return Err(FunctorError::WrongFlavour {
            expected: "rg or rgplus",
            found: d.flavour(),
        });
    }
    d.validate()?;
    let mut out = Diagram::new(Flavour::Rgb, d.n_inputs(), d.n_outputs());
    for n in d.nodes() {
        out.add_node_with_id(n.id, n.color, n.phase);
    }
    let zero = d.zero_phase();
    // Orient the boundary: inputs are sources, outputs targets. A wire
    // joining two inputs or two outputs gets a green cap or cup.
    let mut oriented: Vec<Edge> = Vec::new();
    for e in d.edges() {
        let (s, t) = (e.source, e.target);
        let flip = matches!(t, Endpoint::Input(_)) && !matches!(s, Endpoint::Input(_))
            || matches!(s, Endpoint::Output(_)) && !matches!(t, Endpoint::Output(_));
        let e = if flip { Edge::new(t, s, e.decoration) } else { *e };
        match (e.source, e.target) {
            (Endpoint::Input(_), Endpoint::Input(_)) => {
                let cap = Endpoint::Node(out.add_node(Color::Green, zero));
                oriented.push(Edge::new(e.source, cap, e.decoration));
                oriented.push(Edge::plain(e.target, cap));
            }
            (Endpoint::Output(_), Endpoint::Output(_)) => {
                let cup = Endpoint::Node(out.add_node(Color::Green, zero));
                oriented.push(Edge::new(cup, e.target, e.decoration));
                oriented.push(Edge::plain(cup, e.source));
            }
            _ => oriented.push(e),
        }
    }
    let quarter = zero.add_quarters(1);
    for e in oriented {
        if e.decoration == Decoration::Hadamard {
            let a = out.add_node(Color::Green, quarter);
            let r = out.add_node(Color::Red, quarter);
            let b = out.add_node(Color::Green, quarter);
            out.connect(e.source, a);
            out.connect(a, r);
            out.connect(r, b);
            out.connect(b, e.target);
        } else {
            out.add_edge(Edge::plain(e.source, e.target));
        }
    }
    let reds: Vec<_> = d.nodes().filter(|n| n.color == Color::Red).map(|n| n.id).collect();
    for v in reds {
        let (m, n) = out.in_out_degree(v);
        let node = out.node_mut(v).expect("translated node");
        node.phase = node.phase.add_quarters(n as i64 - m as i64);
    }
    out.validate()?;
    Ok(out)
}

/// RGB to RG+. Decorations are expanded first. A red spider loses `n - m`
/// quarter turns; a blue spider becomes a red one with green(3) on each
/// in-leg and green(1) on each out-leg, except that a phase-0 blue unit or
/// counit becomes the bare red one.
pub fn translate_s(d: &Diagram) -> Result<Diagram, FunctorError> {
    if d.flavour() != Flavour::Rgb {
        return Err(FunctorError::WrongFlavour {
            expected: "rgb",
            found: d.flavour(),
        });
    }
    d.validate()?;
    let d = d.expand_decorations();
    let mut out = Diagram::new(Flavour::RgPlus, d.n_inputs(), d.n_outputs());
    let zero = d.zero_phase();
    let mut wrapped = std::collections::BTreeSet::new();
    for n in d.nodes() {
        let (m, k) = d.in_out_degree(n.id);
        let (color, phase) = match n.color {
            Color::Green => (Color::Green, n.phase),
            Color::Red => (Color::Red, n.phase.add_quarters(m as i64 - k as i64)),
            Color::Blue => {
                if !(m + k == 1 && n.phase.is_zero()) {
                    wrapped.insert(n.id);
                }
                (Color::Red, n.phase)
            }
        };
        out.add_node_with_id(n.id, color, phase);
    }
    for e in d.edges() {
        let mut src = e.source;
        if e.source.node().is_some_and(|v| wrapped.contains(&v)) {
            let g = Endpoint::Node(out.add_node(Color::Green, zero.add_quarters(1)));
            out.add_edge(Edge::plain(src, g));
            src = g;
        }
        let mut tgt = e.target;
        if e.target.node().is_some_and(|v| wrapped.contains(&v)) {
            let g = Endpoint::Node(out.add_node(Color::Green, zero.add_quarters(3)));
            out.add_edge(Edge::plain(g, tgt));
            tgt = g;
        }
        out.add_edge(Edge::new(src, tgt, e.decoration));
    }
    out.validate()?;
    Ok(out)
}

/// Replaces every quarter-turn phase `k` by the angle `k pi / 2`.
pub fn to_unrestricted(d: &Diagram) -> Diagram {
    let mut out = d.clone();
    let ids: Vec<_> = out.node_ids().collect();
    for v in ids {
        let node = out.node_mut(v).expect("node");
        if let Phase::C4(_) = node.phase {
            node.phase = Phase::u1(node.phase.angle());
        }
    }
    out
}

/// Whether `translate_t` preserves the interpretation of `d` up to scalar.
pub fn check_translation_preserves_interp(d: &Diagram) -> Result<bool, CheckError> {
    let t = translate_t(d)?;
    Ok(diagrams_equal(d, &t, DEFAULT_TOL)?)
}

/// The shipped script taking `T(S(g))` back to `g` (RGB generators) or
/// `S(T(g))` back to `g` (RG+ generators). Empty when the two sides are
/// already the same diagram.
pub fn roundtrip_script(flavour: Flavour, g: Generator) -> &'static str {
    match (flavour, g) {
        (Flavour::Rgb, Generator::Unit(Color::Blue) | Generator::Counit(Color::Blue)) => {
            "# red(1) unit: centre blue with a green wrapper, then copy the blue state\n\
             apply colour-via-others at form=b\n\
             apply state-copy\n"
        }
        (Flavour::Rgb, Generator::Mul(Color::Blue) | Generator::Comul(Color::Blue) | Generator::Rot(Color::Blue, _)) => {
            "unapply colour-via-others at form=a\n"
        }
        (Flavour::RgPlus, Generator::Hadamard) => "unapply euler-h\n",
        _ => "",
    }
}

#[derive(Debug)]
pub struct RoundtripReport {
    pub generator: Generator,
    pub flavour: Flavour,
    /// The translated-back diagram before the script.
    pub translated: Diagram,
    pub semantic: bool,
    pub steps: usize,
    /// Script replay with per-step verification; `Ok` means it reached the
    /// generator.
    pub script: Result<(), String>,
}

impl RoundtripReport {
    pub fn ok(&self) -> bool {
        self.semantic && self.script.is_ok()
    }
}

/// Checks `T(S(g)) = g` for an RGB generator or `S(T(g)) = g` for an RG+
/// generator, semantically and by replaying the shipped script.
pub fn check_roundtrip(flavour: Flavour, g: Generator) -> Result<RoundtripReport, CheckError> {
    let target = g.to_diagram(flavour);
    let translated = match flavour {
        Flavour::Rgb => translate_t(&translate_s(&target)?)?,
        Flavour::RgPlus => translate_s(&translate_t(&target)?)?,
        Flavour::Rg => {
            return Err(FunctorError::WrongFlavour {
                expected: "rgb or rgplus",
                found: flavour,
            }
            .into())
        }
    };
    let semantic = diagrams_equal(&translated, &target, DEFAULT_TOL)?;
    let lib = load_library(flavour)?;
    let steps = parse_script(roundtrip_script(flavour, g))?;
    let n = steps.len();
    let script = DerivationScript::new(translated.clone(), steps).with_target(target);
    let script = run_script(lib, &script, true).map(|_| ()).map_err(|e| e.to_string());
    Ok(RoundtripReport {
        generator: g,
        flavour,
        translated,
        semantic,
        steps: n,
        script,
    })
}

#[derive(Debug, Error)]
pub enum CheckError {
    #[error(transparent)]
    Functor(#[from] FunctorError),
    #[error(transparent)]
    Interp(#[from] InterpError),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Script(#[from] ScriptError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    #[test]
    fn green_is_fixed_and_red_twists() {
        {
            let g = Generator::Rot(Color::Green, Phase::c4(3)).to_diagram(Flavour::Rg);
            let t = translate_t(&g).unwrap();
            assert_eq!(t.nodes().next().unwrap().phase, Phase::c4(3));
        }
        let expect = [
            (Generator::Unit(Color::Red), 1),
            (Generator::Counit(Color::Red), 3),
            (Generator::Mul(Color::Red), 3),
            (Generator::Comul(Color::Red), 1),
            (Generator::Rot(Color::Red, Phase::c4(2)), 2),
        ];
        for (g, k) in expect {
            let t = translate_t(&g.to_diagram(Flavour::Rg)).unwrap();
            assert_eq!(t.nodes().next().unwrap().phase, Phase::c4(k), "{g}");
        }
    }

    #[test]
    fn every_generator_keeps_its_meaning() {
        for g in Generator::all(Flavour::Rg) {
            assert!(check_translation_preserves_interp(&g.to_diagram(Flavour::Rg)).unwrap(), "{g}");
        }
        for g in Generator::all(Flavour::Rgb) {
            let d = g.to_diagram(Flavour::Rgb);
            let s = translate_s(&d).unwrap();
            assert!(diagrams_equal(&d, &s, DEFAULT_TOL).unwrap(), "{g}");
        }
    }

    #[test]
    fn blue_rotation_goes_to_an_euler_chain() {
        let s = translate_s(&Generator::Rot(Color::Blue, Phase::c4(1)).to_diagram(Flavour::Rgb)).unwrap();
        let want = parse(
            "diagram rgplus { inputs a; outputs b; node x: green 3; node y: red 1; node z: green 1;
             wire a -> x; wire x -> y; wire y -> z; wire z -> b; }",
        )
        .unwrap();
        assert!(crate::diagram::iso_equal(&s, &want));
        let u = translate_s(&Generator::Unit(Color::Blue).to_diagram(Flavour::Rgb)).unwrap();
        assert!(crate::diagram::iso_equal(&u, &Generator::Unit(Color::Red).to_diagram(Flavour::RgPlus)));
    }

    #[test]
    fn reversed_boundary_wires_are_oriented() {
        let d = parse("diagram rg { inputs a, b; outputs c; node r: red 0; wire r -> a; wire b -> r; wire r -> c; }").unwrap();
        let t = translate_t(&d).unwrap();
        assert!(t.validate().is_ok());
        assert!(check_translation_preserves_interp(&d).unwrap());
        let cap = parse("diagram rg { inputs a, b; wire a -> b [h]; }").unwrap();
        assert!(check_translation_preserves_interp(&cap).unwrap());
        let cup = parse("diagram rg { outputs a, b; wire b -> a; }").unwrap();
        assert!(check_translation_preserves_interp(&cup).unwrap());
    }

    #[test]
    fn quarter_turns_become_angles() {
        let d = Generator::Rot(Color::Green, Phase::c4(1)).to_diagram(Flavour::Rgb);
        let u = to_unrestricted(&d);
        assert_eq!(u.nodes().next().unwrap().phase, Phase::U1(std::f64::consts::FRAC_PI_2));
        let z = to_unrestricted(&Generator::Unit(Color::Red).to_diagram(Flavour::Rgb));
        assert_eq!(z.nodes().next().unwrap().phase, Phase::U1(0.0));
    }

    #[test]
    fn every_generator_round_trips() {
        for fl in [Flavour::Rgb, Flavour::RgPlus] {
            for g in Generator::all(fl) {
                let r = check_roundtrip(fl, g).unwrap();
                assert!(r.ok(), "{fl} {g}: {:?}\n{}", r.script, crate::dsl::print(&r.translated));
            }
        }
    }
}
