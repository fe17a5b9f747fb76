use std::collections::HashMap;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use trichromatic::dsl::{parse, print, print_canonical};
use trichromatic::functors::{check_translation_preserves_interp, to_unrestricted};
use trichromatic::groups::PhaseClassMatrix;
use trichromatic::interp::{check_dagger_functor, diagrams_equal, eval_exact, eval_float, DEFAULT_TOL};
use trichromatic::random::{random_diagram, RandomConfig};
use trichromatic::rules::{bounded_search, load_library, run_script, DerivationScript, SearchLimits, SearchOutcome};
use trichromatic::{
    canonical_form, iso_equal, Color, CycloNum, Diagram, Edge, Endpoint, Flavour, Matrix, NodeId, Phase,
};

fn cyclo() -> impl Strategy<Value = CycloNum> {
    (-20i64..20, -20i64..20, -20i64..20, -20i64..20, 0u32..4).prop_map(|(a, b, c, d, k)| CycloNum::new(a, b, c, d, k))
}

fn flavour() -> impl Strategy<Value = Flavour> {
    prop_oneof![Just(Flavour::Rg), Just(Flavour::RgPlus), Just(Flavour::Rgb)]
}

fn diagram(fl: Flavour, seed: u64) -> Diagram {
    random_diagram(&mut StdRng::seed_from_u64(seed), &RandomConfig::new(fl, 4))
}

/// The same diagram with node ids moved by an offset and reversed.
fn rename(d: &Diagram) -> Diagram {
    let ids: Vec<NodeId> = d.node_ids().collect();
    let map: HashMap<NodeId, NodeId> = ids
        .iter()
        .enumerate()
        .map(|(k, &v)| (v, NodeId((100 + ids.len() - k) as u32)))
        .collect();
    let mut out = Diagram::new(d.flavour(), d.n_inputs(), d.n_outputs());
    for n in d.nodes() {
        out.add_node_with_id(map[&n.id], n.color, n.phase);
    }
    let m = |e: Endpoint| match e {
        Endpoint::Node(v) => Endpoint::Node(map[&v]),
        p => p,
    };
    for e in d.edges().iter().rev() {
        out.add_edge(Edge::new(m(e.source), m(e.target), e.decoration));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(a in cyclo(), b in cyclo(), c in cyclo()) {
        prop_assert_eq!(a.clone() + b.clone(), b.clone() + a.clone());
        prop_assert_eq!(a.clone() * b.clone(), b.clone() * a.clone());
        prop_assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c.clone()));
        prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c.clone());
        prop_assert_eq!(a.clone() - a.clone(), CycloNum::from_int(0));
    }

    #[test]
    fn approximation_is_a_homomorphism(a in cyclo(), b in cyclo()) {
        let (x, y) = (a.to_approx().unwrap(), b.to_approx().unwrap());
        let p = (a.clone() * b.clone()).to_approx().unwrap();
        let s = (a + b).to_approx().unwrap();
        prop_assert!((p - x * y).norm() < 1e-9 * (1.0 + p.norm()));
        prop_assert!((s - (x + y)).norm() < 1e-9 * (1.0 + s.norm()));
    }

    #[test]
    fn phase_class_ignores_scalars(es in proptest::collection::vec(cyclo(), 4), z in cyclo()) {
        prop_assume!(z != CycloNum::from_int(0));
        let m = Matrix::from_vec(2, 2, es);
        let zm = m.scale(&z);
        match (PhaseClassMatrix::new(m), PhaseClassMatrix::new(zm)) {
            (Some(a), Some(b)) => prop_assert_eq!(a, b),
            (None, None) => {}
            _ => prop_assert!(false, "zero only on one side"),
        }
    }

    #[test]
    fn dagger_is_conjugate_transpose(fl in flavour(), seed in any::<u64>()) {
        let d = diagram(fl, seed);
        prop_assert!(check_dagger_functor(&d).unwrap());
    }

    #[test]
    fn printer_round_trips(fl in flavour(), seed in any::<u64>()) {
        let d = diagram(fl, seed);
        let text = print(&d);
        let back = parse(&text).unwrap();
        prop_assert!(iso_equal(&d, &back));
        prop_assert_eq!(print(&back), text);
    }

    #[test]
    fn renaming_does_not_change_canonical_text(fl in flavour(), seed in any::<u64>()) {
        let d = diagram(fl, seed);
        let r = rename(&d);
        prop_assert_eq!(canonical_form(&d), canonical_form(&r));
        prop_assert_eq!(print_canonical(&d), print_canonical(&r));
    }

    #[test]
    fn translation_keeps_meaning(seed in any::<u64>()) {
        let d = random_diagram(&mut StdRng::seed_from_u64(seed), &RandomConfig::new(Flavour::Rg, 5));
        prop_assert!(check_translation_preserves_interp(&d).unwrap());
    }

    #[test]
    fn float_agrees_with_exact(fl in flavour(), seed in any::<u64>()) {
        let d = diagram(fl, seed);
        let exact = eval_exact(&d).unwrap().to_approx().unwrap();
        let float = eval_float(&d).unwrap();
        prop_assert_eq!(float.proportional_to(&exact, DEFAULT_TOL), Some(true));
        prop_assert_eq!(eval_float(&to_unrestricted(&d)).unwrap(), float);
    }

    #[test]
    fn rotations_add(fl in flavour(), a in 0i64..4, b in 0i64..4) {
        let c = if fl == Flavour::Rgb { Color::Blue } else { Color::Red };
        let mut two = Diagram::new(fl, 1, 1);
        let x = two.add_node(c, Phase::c4(a));
        let y = two.add_node(c, Phase::c4(b));
        two.connect(Endpoint::Input(0), x);
        two.connect(x, y);
        two.connect(y, Endpoint::Output(0));
        let mut one = Diagram::new(fl, 1, 1);
        let z = one.add_node(c, Phase::c4(a + b));
        one.connect(Endpoint::Input(0), z);
        one.connect(z, Endpoint::Output(0));
        prop_assert!(diagrams_equal(&two, &one, 0.0).unwrap());
        let fused = run_script(
            load_library(fl).unwrap(),
            &DerivationScript::new(two, trichromatic::rules::parse_script("apply spider-fusion").unwrap())
                .with_target(one),
            true,
        );
        prop_assert!(fused.is_ok());
    }
}

#[test]
fn search_paths_replay() {
    let lhs = parse(
        "diagram rg { inputs a; outputs b; node x: green 1; node y: green 3; node z: red 2;
         wire a -> x; wire x -> y; wire y -> z; wire z -> b; }",
    )
    .unwrap();
    let rhs = parse("diagram rg { inputs a; outputs b; node z: red 2; wire a -> z; wire z -> b; }").unwrap();
    let lib = load_library(Flavour::Rg).unwrap();
    let SearchOutcome::Found(steps) = bounded_search(lib, &lhs, &rhs, SearchLimits::depth(3)) else {
        panic!("expected a path");
    };
    assert!(!steps.is_empty());
    let script = DerivationScript::new(lhs, steps).with_target(rhs);
    let run = run_script(lib, &script, true).unwrap();
    assert_eq!(run.reached_target, Some(true));
}
