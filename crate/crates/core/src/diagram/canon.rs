//! Canonical labelling of diagrams, used for isomorphism tests, search
//! deduplication and canonical printing.
//!
//! Colour refinement over nodes (ports are fixed labels) followed by
//! individualisation; the lexicographically smallest encoding over the
//! search tree is the canonical form.

use std::collections::BTreeMap;

use super::{Decoration, Diagram, Edge, Endpoint, Flavour, Node, NodeId};

/// Sorted neighbour labels of a vertex: (edge label, side, neighbour class).
type Signature = Vec<(u8, u8, u64)>;
/// (source, target, decoration) with endpoints as (kind, rank).
type EdgeKey = ((u64, u64), (u64, u64), u64);

/// Canonical encoding of a diagram up to node renaming.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    pub(crate) code: Vec<u64>,
}

struct Graph {
    directed: bool,
    ids: Vec<NodeId>,
    labels: Vec<(u8, u8, u64)>,
    /// Per node: (edge label, neighbour). Neighbour codes: ports are fixed
    /// negative-free tags, nodes are indices offset by `NODE_BASE`.
    adj: Vec<Vec<(u8, Nb)>>,
    edges: Vec<(Endpoint, Endpoint, Decoration)>,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Nb {
    Input(usize),
    Output(usize),
    Node(usize),
}

fn deco_code(d: Decoration) -> u8 {
    d as u8
}

impl Graph {
    fn new(d: &Diagram) -> Graph {
        let directed = d.flavour().directed();
        let ids: Vec<NodeId> = d.node_ids().collect();
        let index: BTreeMap<NodeId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let labels = d
            .nodes()
            .map(|n: &Node| {
                let (g, p) = match n.phase {
                    super::Phase::C4(k) => (0, k as u64),
                    super::Phase::U1(a) => (1, a.to_bits()),
                };
                (n.color as u8, g, p)
            })
            .collect();
        let mut adj = vec![Vec::new(); ids.len()];
        let nb = |ep: Endpoint| match ep {
            Endpoint::Input(i) => Nb::Input(i),
            Endpoint::Output(i) => Nb::Output(i),
            Endpoint::Node(v) => Nb::Node(index[&v]),
        };
        for e in d.edges() {
            let dc = deco_code(e.decoration);
            // Edge label at an end: decoration, plus direction when directed.
            let (ls, lt) = if directed {
                (dc * 4, dc * 4 + 1)
            } else {
                (dc * 4, dc * 4)
            };
            let self_loop = e.source == e.target;
            if let Endpoint::Node(v) = e.source {
                let lab = if self_loop { dc * 4 + 2 } else { ls };
                adj[index[&v]].push((lab, nb(e.target)));
            }
            if let Endpoint::Node(v) = e.target {
                if !self_loop {
                    adj[index[&v]].push((lt, nb(e.source)));
                }
            }
        }
        let edges = d
            .edges()
            .iter()
            .map(|e| (e.source, e.target, e.decoration))
            .collect();
        Graph {
            directed,
            ids,
            labels,
            adj,
            edges,
        }
    }

    fn n(&self) -> usize {
        self.ids.len()
    }

    /// Refine `colours` (ranks) to a stable partition.
    fn refine(&self, colours: &mut Vec<u32>) {
        let mut classes = count_classes(colours);
        loop {
            let keys: Vec<(u32, Signature)> = (0..self.n())
                .map(|v| {
                    let mut sig: Signature = self.adj[v]
                        .iter()
                        .map(|&(lab, nb)| match nb {
                            Nb::Input(i) => (lab, 0, i as u64),
                            Nb::Output(i) => (lab, 1, i as u64),
                            Nb::Node(w) => (lab, 2, colours[w] as u64),
                        })
                        .collect();
                    sig.sort_unstable();
                    (colours[v], sig)
                })
                .collect();
            *colours = ranks(&keys);
            let now = count_classes(colours);
            if now == classes {
                return;
            }
            classes = now;
        }
    }

    fn encode(&self, order: &[usize]) -> Vec<u64> {
        // order[v] = canonical position of node v
        let mut code = Vec::with_capacity(4 + 3 * self.n() + 5 * self.edges.len());
        code.push(self.n() as u64);
        let mut by_pos = vec![0; self.n()];
        for (v, &p) in order.iter().enumerate() {
            by_pos[p] = v;
        }
        for &v in &by_pos {
            let (c, g, p) = self.labels[v];
            code.extend([c as u64, g as u64, p]);
        }
        let idx: BTreeMap<NodeId, usize> =
            self.ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let ep = |e: Endpoint| -> (u64, u64) {
            match e {
                Endpoint::Input(i) => (0, i as u64),
                Endpoint::Output(i) => (1, i as u64),
                Endpoint::Node(v) => (2, order[idx[&v]] as u64),
            }
        };
        let mut es: Vec<EdgeKey> = self
            .edges
            .iter()
            .map(|&(s, t, d)| {
                let (a, b) = (ep(s), ep(t));
                let (a, b) = if !self.directed && b < a { (b, a) } else { (a, b) };
                (a, b, deco_code(d) as u64)
            })
            .collect();
        es.sort_unstable();
        code.push(es.len() as u64);
        for ((a0, a1), (b0, b1), d) in es {
            code.extend([a0, a1, b0, b1, d]);
        }
        code
    }

    /// Two nodes with identical labels and identical neighbourhoods, not
    /// adjacent to each other, are exchanged by an automorphism.
    fn twins(&self, u: usize, v: usize) -> bool {
        if self.labels[u] != self.labels[v] {
            return false;
        }
        let touches = |a: usize, b: usize| self.adj[a].iter().any(|&(_, nb)| nb == Nb::Node(b));
        if touches(u, v) || touches(v, u) {
            return false;
        }
        let mut a = self.adj[u].clone();
        let mut b = self.adj[v].clone();
        a.sort_unstable();
        b.sort_unstable();
        a == b
    }

    fn search(&self, mut colours: Vec<u32>, best: &mut Option<(Vec<u64>, Vec<usize>)>) {
        self.refine(&mut colours);
        let n = self.n();
        if count_classes(&colours) == n {
            let order: Vec<usize> = colours.iter().map(|&c| c as usize).collect();
            let code = self.encode(&order);
            if best.as_ref().is_none_or(|(b, _)| code < *b) {
                *best = Some((code, order));
            }
            return;
        }
        // Target cell: the smallest colour shared by several nodes.
        let mut sizes: BTreeMap<u32, usize> = BTreeMap::new();
        for &c in &colours {
            *sizes.entry(c).or_default() += 1;
        }
        let target = *sizes.iter().find(|(_, &s)| s > 1).unwrap().0;
        let cell: Vec<usize> = (0..n).filter(|&v| colours[v] == target).collect();
        let mut tried: Vec<usize> = Vec::new();
        for &v in &cell {
            if tried.iter().any(|&u| self.twins(u, v)) {
                continue;
            }
            tried.push(v);
            let keys: Vec<(u32, u8)> = (0..n)
                .map(|w| (colours[w], if w == v { 0 } else { 1 }))
                .collect();
            self.search(ranks(&keys), best);
        }
    }
}

/// Dense ranks of `keys` in sorted order; equal keys share a rank. Ranks
/// are offset so that the rank of a class is the number of elements
/// strictly smaller, which makes a discrete partition a permutation.
fn ranks<K: Ord + Clone>(keys: &[K]) -> Vec<u32> {
    let mut sorted: Vec<&K> = keys.iter().collect();
    sorted.sort();
    keys.iter()
        .map(|k| sorted.partition_point(|x| *x < k) as u32)
        .collect()
}

fn count_classes(colours: &[u32]) -> usize {
    let mut c = colours.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn canonical_order(d: &Diagram) -> (CanonicalForm, Vec<NodeId>) {
    let g = Graph::new(d);
    let keys: Vec<_> = (0..g.n())
        .map(|v| {
            let mut outs = 0usize;
            let mut deg = 0usize;
            for &(lab, _) in &g.adj[v] {
                deg += if lab % 4 == 2 { 2 } else { 1 };
                if lab % 4 == 0 || lab % 4 == 2 {
                    outs += 1;
                }
            }
            let outs = if g.directed { outs } else { 0 };
            (g.labels[v], deg, outs)
        })
        .collect();
    let mut best = None;
    g.search(ranks(&keys), &mut best);
    let (mut code, order) = best.unwrap_or_else(|| (g.encode(&[]), Vec::new()));
    let mut header = vec![
        match d.flavour() {
            Flavour::Rg => 0,
            Flavour::RgPlus => 1,
            Flavour::Rgb => 2,
        },
        d.n_inputs() as u64,
        d.n_outputs() as u64,
    ];
    header.append(&mut code);
    let mut by_pos = vec![NodeId(0); order.len()];
    for (v, &p) in order.iter().enumerate() {
        by_pos[p] = g.ids[v];
    }
    (CanonicalForm { code: header }, by_pos)
}

pub fn canonical_form(d: &Diagram) -> CanonicalForm {
    canonical_order(d).0
}

/// Label- and decoration-preserving isomorphism fixing the boundary.
pub fn iso_equal(a: &Diagram, b: &Diagram) -> bool {
    a.flavour() == b.flavour()
        && a.n_inputs() == b.n_inputs()
        && a.n_outputs() == b.n_outputs()
        && a.node_count() == b.node_count()
        && a.edges().len() == b.edges().len()
        && canonical_form(a) == canonical_form(b)
}

/// Isomorphic copy with nodes renumbered `0..n` in canonical order and edges
/// sorted; iso-equal diagrams relabel to identical values.
pub fn canonical_relabel(d: &Diagram) -> Diagram {
    let (_, order) = canonical_order(d);
    let map: BTreeMap<NodeId, NodeId> = order
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, NodeId(i as u32)))
        .collect();
    let mut out = Diagram::new(d.flavour(), d.n_inputs(), d.n_outputs());
    for (i, &v) in order.iter().enumerate() {
        let n = d.node(v).unwrap();
        out.add_node_with_id(NodeId(i as u32), n.color, n.phase);
    }
    let remap = |e: Endpoint| match e {
        Endpoint::Node(v) => Endpoint::Node(map[&v]),
        p => p,
    };
    let mut edges: Vec<Edge> = d
        .edges()
        .iter()
        .map(|e| {
            let (s, t) = (remap(e.source), remap(e.target));
            let (s, t) = if d.flavour().directed() {
                (s, t)
            } else {
                orient_undirected(s, t)
            };
            let deco = if (s, t) == (remap(e.source), remap(e.target)) {
                e.decoration
            } else {
                e.decoration.dagger()
            };
            Edge::new(s, t, deco)
        })
        .collect();
    edges.sort_by_key(|e| (e.source, e.target, e.decoration));
    for e in edges {
        out.add_edge(e);
    }
    out
}

/// Preferred orientation for printing undirected edges: inputs as sources,
/// outputs as targets, otherwise lower id first.
fn orient_undirected(s: Endpoint, t: Endpoint) -> (Endpoint, Endpoint) {
    match (s, t) {
        (Endpoint::Output(_), x) if !matches!(x, Endpoint::Output(_)) => (t, s),
        (x, Endpoint::Input(_)) if !matches!(x, Endpoint::Input(_)) => (t, s),
        (Endpoint::Node(a), Endpoint::Node(b)) if b < a => (t, s),
        _ => (s, t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{Color, Phase};

    fn chain(phases: &[u8], flavour: Flavour) -> Diagram {
        let mut d = Diagram::new(flavour, 1, 1);
        let mut cur = Endpoint::Input(0);
        for &p in phases {
            let v = d.add_node(Color::Green, Phase::C4(p));
            d.connect(cur, v);
            cur = Endpoint::Node(v);
        }
        d.connect(cur, Endpoint::Output(0));
        d
    }

    #[test]
    fn renaming_is_invisible() {
        let d = chain(&[1, 2, 3], Flavour::Rgb);
        let mut e = Diagram::new(Flavour::Rgb, 1, 1);
        e.add_node_with_id(NodeId(7), Color::Green, Phase::C4(3));
        e.add_node_with_id(NodeId(2), Color::Green, Phase::C4(1));
        e.add_node_with_id(NodeId(9), Color::Green, Phase::C4(2));
        e.connect(NodeId(9), NodeId(7));
        e.connect(Endpoint::Input(0), NodeId(2));
        e.connect(NodeId(7), Endpoint::Output(0));
        e.connect(NodeId(2), NodeId(9));
        assert!(iso_equal(&d, &e));
        assert_eq!(canonical_relabel(&d), canonical_relabel(&e));
    }

    #[test]
    fn labels_matter() {
        assert!(!iso_equal(&chain(&[1], Flavour::Rg), &chain(&[3], Flavour::Rg)));
        assert!(!iso_equal(&chain(&[1, 2], Flavour::Rg), &chain(&[2, 1], Flavour::Rg)));
    }

    #[test]
    fn direction_matters_only_in_rgb() {
        for (flavour, expect) in [(Flavour::Rg, true), (Flavour::Rgb, false)] {
            let mut a = Diagram::new(flavour, 0, 0);
            let x = a.add_node(Color::Red, Phase::ZERO);
            let y = a.add_node(Color::Green, Phase::ZERO);
            let mut b = a.clone();
            a.connect(x, y);
            b.connect(y, x);
            assert_eq!(iso_equal(&a, &b), expect, "{flavour}");
        }
    }

    #[test]
    fn symmetric_leaves() {
        // A spider with many identical leaves stays cheap thanks to twin pruning.
        let mut d = Diagram::new(Flavour::Rg, 1, 0);
        let c = d.add_node(Color::Green, Phase::ZERO);
        d.connect(Endpoint::Input(0), c);
        for _ in 0..8 {
            let l = d.add_node(Color::Red, Phase::C4(1));
            d.connect(c, l);
        }
        let mut e = d.clone();
        e.remove_node(NodeId(3));
        let l = e.add_node(Color::Red, Phase::C4(1));
        e.connect(l, c);
        assert!(iso_equal(&d, &e));
    }

    #[test]
    fn boundary_order_is_fixed() {
        let mut a = Diagram::new(Flavour::Rg, 0, 2);
        let x = a.add_node(Color::Red, Phase::ZERO);
        let y = a.add_node(Color::Green, Phase::ZERO);
        let mut b = a.clone();
        a.connect(x, Endpoint::Output(0));
        a.connect(y, Endpoint::Output(1));
        b.connect(x, Endpoint::Output(1));
        b.connect(y, Endpoint::Output(0));
        assert!(!iso_equal(&a, &b));
    }
}
