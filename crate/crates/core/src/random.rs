//! Random small diagrams for property tests and the acceptance suite.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::diagram::{Decoration, Diagram, Edge, Endpoint, Flavour, NodeId, Phase};

#[derive(Clone, Copy, Debug)]
pub struct RandomConfig {
    pub flavour: Flavour,
    pub max_nodes: usize,
    pub max_inputs: usize,
    pub max_outputs: usize,
    /// Extra node-to-node wires beyond a spanning path.
    pub max_extra_wires: usize,
    /// Probability that a wire carries a decoration.
    pub decoration_rate: f64,
    /// Draw U(1) phases instead of quarter turns.
    pub unrestricted: bool,
}

impl RandomConfig {
    pub fn new(flavour: Flavour, max_nodes: usize) -> RandomConfig {
        RandomConfig {
            flavour,
            max_nodes,
            max_inputs: 2,
            max_outputs: 2,
            max_extra_wires: 2,
            decoration_rate: 0.3,
            unrestricted: false,
        }
    }
}

fn decorations(flavour: Flavour) -> Vec<Decoration> {
    [
        Decoration::Hadamard,
        Decoration::ColourCw,
        Decoration::ColourCcw,
        Decoration::DualY,
        Decoration::DualC,
        Decoration::DualM,
    ]
    .into_iter()
    .filter(|d| d.allowed_in(flavour))
    .collect()
}

/// A valid diagram with at least one node. Inputs are always edge sources
/// and outputs edge targets.
pub fn random_diagram<R: Rng + ?Sized>(rng: &mut R, cfg: &RandomConfig) -> Diagram {
    let n_in = rng.gen_range(0..=cfg.max_inputs);
    let n_out = rng.gen_range(0..=cfg.max_outputs);
    let n_nodes = rng.gen_range(1..=cfg.max_nodes.max(1));
    let mut d = Diagram::new(cfg.flavour, n_in, n_out);
    let colours = cfg.flavour.colours();
    let nodes: Vec<NodeId> = (0..n_nodes)
        .map(|_| {
            let c = *colours.choose(rng).unwrap();
            let p = if cfg.unrestricted {
                Phase::u1(rng.gen_range(0.0..std::f64::consts::TAU))
            } else {
                Phase::c4(rng.gen_range(0..4))
            };
            d.add_node(c, p)
        })
        .collect();
    let decos = decorations(cfg.flavour);
    let deco = |rng: &mut R| {
        if !decos.is_empty() && rng.gen_bool(cfg.decoration_rate) {
            *decos.choose(rng).unwrap()
        } else {
            Decoration::Plain
        }
    };
    let pick = |rng: &mut R| Endpoint::Node(*nodes.choose(rng).unwrap());
    for w in nodes.windows(2) {
        let (a, b) = if rng.gen_bool(0.5) { (w[0], w[1]) } else { (w[1], w[0]) };
        let dec = deco(rng);
        d.add_edge(Edge::new(Endpoint::Node(a), Endpoint::Node(b), dec));
    }
    for _ in 0..rng.gen_range(0..=cfg.max_extra_wires) {
        let (a, b) = (pick(rng), pick(rng));
        let dec = deco(rng);
        d.add_edge(Edge::new(a, b, dec));
    }
    for k in 0..n_in {
        let dec = deco(rng);
        d.add_edge(Edge::new(Endpoint::Input(k), pick(rng), dec));
    }
    for k in 0..n_out {
        let dec = deco(rng);
        d.add_edge(Edge::new(pick(rng), Endpoint::Output(k), dec));
    }
    debug_assert!(d.validate().is_ok());
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn generated_diagrams_validate() {
        let mut rng = StdRng::seed_from_u64(7);
        for fl in [Flavour::Rg, Flavour::Rgb] {
            let cfg = RandomConfig::new(fl, 4);
            for _ in 0..200 {
                let d = random_diagram(&mut rng, &cfg);
                assert!(d.validate().is_ok());
                assert!(d.node_count() >= 1);
            }
        }
    }
}
