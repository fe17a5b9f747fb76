//! Pattern matching of concrete rule sides and replacement.
//!
//! A match maps every pattern node to a host node with the same colour,
//! phase and degree (in- and out-degree too when edges are directed). Edges
//! between image nodes must agree with the pattern edges as a multiset, so
//! the remaining host legs are exactly the pattern's boundary legs. A plain
//! boundary leg in the pattern matches a host leg with any decoration, which
//! is carried over as a remainder.

use std::collections::BTreeMap;

use crate::diagram::{Decoration, Diagram, Edge, End, Endpoint, NodeId};

/// How a pattern port is wired into the host.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Attachment {
    /// Host endpoint on the far side of the leg.
    pub outside: Endpoint,
    /// Host decoration not consumed by the pattern.
    pub remainder: Decoration,
    /// Whether the host edge runs from `outside` into the image.
    pub outside_is_source: bool,
}

fn port_index(d: &Diagram, p: Endpoint) -> usize {
    match p {
        Endpoint::Input(k) => k,
        Endpoint::Output(k) => d.n_inputs() + k,
        Endpoint::Node(_) => unreachable!("not a port"),
    }
}

/// Signature of an edge seen from `a` towards `b`.
fn sig(e: &Edge, a: Endpoint, directed: bool) -> (Decoration, u8) {
    if !directed {
        return (e.decoration, 0);
    }
    if e.source == a && e.target == a {
        (e.decoration, 2)
    } else if e.source == a {
        (e.decoration, 0)
    } else {
        (e.decoration, 1)
    }
}

fn between(d: &Diagram, a: NodeId, b: NodeId, directed: bool) -> Vec<(Decoration, u8)> {
    let (ea, eb) = (Endpoint::Node(a), Endpoint::Node(b));
    let mut v: Vec<_> = d
        .edges()
        .iter()
        .filter(|e| (e.source == ea && e.target == eb) || (e.source == eb && e.target == ea))
        .map(|e| sig(e, ea, directed))
        .collect();
    v.sort();
    v
}

/// Boundary legs of a pattern node: (port index, decoration, node is source).
fn pattern_legs(p: &Diagram, v: NodeId) -> Vec<(usize, Decoration, bool)> {
    let ev = Endpoint::Node(v);
    p.edges()
        .iter()
        .filter_map(|e| {
            if e.source == ev && e.target.is_port() {
                Some((port_index(p, e.target), e.decoration, true))
            } else if e.target == ev && e.source.is_port() {
                Some((port_index(p, e.source), e.decoration, false))
            } else {
                None
            }
        })
        .collect()
}

/// All matches of `pattern` in `host`, as (pattern node, host node) pairs and
/// one attachment per pattern port, in deterministic order.
/// Node map from pattern to host, with the host edges at each pattern port.
pub(crate) type Embedding = (Vec<(NodeId, NodeId)>, Vec<Attachment>);

pub(crate) fn find(pattern: &Diagram, host: &Diagram) -> Vec<Embedding> {
    if pattern.node_count() == 0 {
        return find_wire(pattern, host);
    }
    if pattern.edges().iter().any(|e| e.source.is_port() && e.target.is_port()) {
        return Vec::new();
    }
    let directed = host.flavour().directed();
    let order = search_order(pattern);
    let mut cands: Vec<Vec<NodeId>> = Vec::new();
    for &u in &order {
        let pn = pattern.node(u).unwrap();
        let (pi, po) = pattern.in_out_degree(u);
        let deg = pi + po;
        cands.push(
            host.nodes()
                .filter(|h| h.color == pn.color && h.phase == pn.phase)
                .filter(|h| {
                    let (hi, ho) = host.in_out_degree(h.id);
                    if directed {
                        (hi, ho) == (pi, po)
                    } else {
                        hi + ho == deg
                    }
                })
                .map(|h| h.id)
                .collect(),
        );
    }
    let mut results = Vec::new();
    let mut assign: Vec<NodeId> = Vec::new();
    backtrack(pattern, host, &order, &cands, directed, &mut assign, &mut results);
    let mut out: Vec<Embedding> = Vec::new();
    for images in results {
        let map: BTreeMap<NodeId, NodeId> = order.iter().copied().zip(images.iter().copied()).collect();
        for ports in boundary_bijections(pattern, host, &map, directed) {
            out.push((map.iter().map(|(&a, &b)| (a, b)).collect(), ports));
        }
    }
    out.sort_by(|a, b| {
        let mut ka: Vec<NodeId> = a.0.iter().map(|x| x.1).collect();
        let mut kb: Vec<NodeId> = b.0.iter().map(|x| x.1).collect();
        ka.sort();
        kb.sort();
        ka.cmp(&kb).then_with(|| a.cmp(b))
    });
    out
}

/// Pattern nodes in breadth-first order from the highest-degree node, so
/// each node after the first is adjacent to an earlier one when connected.
fn search_order(p: &Diagram) -> Vec<NodeId> {
    let mut order = Vec::new();
    let mut ids: Vec<NodeId> = p.node_ids().collect();
    ids.sort_by_key(|&v| (std::cmp::Reverse(p.degree(v)), v));
    for &start in &ids {
        if order.contains(&start) {
            continue;
        }
        let mut queue = std::collections::VecDeque::from([start]);
        order.push(start);
        while let Some(v) = queue.pop_front() {
            for (i, end) in p.legs(v) {
                let e = p.edge(i);
                let other = if end == End::Source { e.target } else { e.source };
                if let Endpoint::Node(w) = other {
                    if !order.contains(&w) {
                        order.push(w);
                        queue.push_back(w);
                    }
                }
            }
        }
    }
    order
}

fn backtrack(
    p: &Diagram,
    host: &Diagram,
    order: &[NodeId],
    cands: &[Vec<NodeId>],
    directed: bool,
    assign: &mut Vec<NodeId>,
    results: &mut Vec<Vec<NodeId>>,
) {
    let k = assign.len();
    if k == order.len() {
        results.push(assign.clone());
        return;
    }
    let u = order[k];
    for &h in &cands[k] {
        if assign.contains(&h) {
            continue;
        }
        let ok = (0..=k).all(|j| {
            let (w, hw) = if j == k { (u, h) } else { (order[j], assign[j]) };
            between(p, u, w, directed) == between(host, h, hw, directed)
        });
        if !ok {
            continue;
        }
        assign.push(h);
        backtrack(p, host, order, cands, directed, assign, results);
        assign.pop();
    }
}

/// Every way of pairing pattern boundary legs with the free host legs of
/// each image node.
fn boundary_bijections(
    p: &Diagram,
    host: &Diagram,
    map: &BTreeMap<NodeId, NodeId>,
    directed: bool,
) -> Vec<Vec<Attachment>> {
    let n_ports = p.n_inputs() + p.n_outputs();
    let image: Vec<NodeId> = map.values().copied().collect();
    let mut partial: Vec<Vec<Option<Attachment>>> = vec![vec![None; n_ports]];
    for (&u, &h) in map {
        let legs = pattern_legs(p, u);
        let eh = Endpoint::Node(h);
        // Host legs leading outside the image.
        let free: Vec<(Endpoint, Decoration, bool)> = host
            .edges()
            .iter()
            .filter_map(|e| {
                let inside = |x: Endpoint| x.node().is_some_and(|n| image.contains(&n));
                if e.source == eh && !inside(e.target) {
                    Some((e.target, e.decoration, true))
                } else if e.target == eh && !inside(e.source) {
                    Some((e.source, e.decoration, false))
                } else {
                    None
                }
            })
            .collect();
        if free.len() != legs.len() {
            return Vec::new();
        }
        let mut next = Vec::new();
        for perm in permutations(legs.len()) {
            let fits = legs.iter().zip(&perm).all(|(&(_, pd, psrc), &j)| {
                let (_, hd, hsrc) = free[j];
                (!directed || psrc == hsrc) && (pd == Decoration::Plain || pd == hd)
            });
            if !fits {
                continue;
            }
            for base in &partial {
                let mut b = base.clone();
                for (&(port, pd, _), &j) in legs.iter().zip(&perm) {
                    let (outside, hd, node_is_source) = free[j];
                    b[port] = Some(Attachment {
                        outside,
                        remainder: if pd == Decoration::Plain { hd } else { Decoration::Plain },
                        outside_is_source: !node_is_source,
                    });
                }
                next.push(b);
            }
        }
        partial = next;
        if partial.is_empty() {
            return Vec::new();
        }
    }
    let mut out: Vec<Vec<Attachment>> = partial
        .into_iter()
        .filter_map(|v| v.into_iter().collect::<Option<Vec<_>>>())
        .collect();
    out.sort();
    out.dedup();
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut v = rest.clone();
            v.insert(pos, n - 1);
            out.push(v);
        }
    }
    out.sort();
    out
}

/// A bare one-wire pattern matches any host edge with a compatible
/// decoration; the whole host decoration stays on the input side.
fn find_wire(pattern: &Diagram, host: &Diagram) -> Vec<Embedding> {
    if pattern.n_inputs() != 1 || pattern.n_outputs() != 1 || pattern.edges().len() != 1 {
        return Vec::new();
    }
    let pd = pattern.edge(0).decoration;
    let mut out: Vec<_> = host
        .edges()
        .iter()
        .filter(|e| pd == Decoration::Plain || e.decoration == pd)
        .map(|e| {
            let rem = if pd == Decoration::Plain { e.decoration } else { Decoration::Plain };
            (
                Vec::new(),
                vec![
                    Attachment {
                        outside: e.source,
                        remainder: rem,
                        outside_is_source: true,
                    },
                    Attachment {
                        outside: e.target,
                        remainder: Decoration::Plain,
                        outside_is_source: false,
                    },
                ],
            )
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Replaces the matched image by `rhs`. Fresh node ids start above every id
/// of the host.
pub(crate) fn replace(
    host: &Diagram,
    lhs: &Diagram,
    rhs: &Diagram,
    mapping: &[(NodeId, NodeId)],
    ports: &[Attachment],
) -> Diagram {
    let mut out = host.clone();
    let image: Vec<NodeId> = mapping.iter().map(|&(_, h)| h).collect();
    let doomed: std::collections::BTreeSet<usize> = if image.is_empty() {
        // Wire pattern: remove the one host edge between the attachments.
        let (a, b) = (ports[0], ports[1]);
        host.edges()
            .iter()
            .position(|e| e.source == a.outside && e.target == b.outside && e.decoration == combined(a, lhs))
            .into_iter()
            .collect()
    } else {
        host.edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| image.iter().any(|&v| e.touches(Endpoint::Node(v))))
            .map(|(i, _)| i)
            .collect()
    };
    out.remove_edges(&doomed);
    for &v in &image {
        out.remove_node(v);
    }

    let mut ids: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    for (fresh, n) in (host.next_node_id().0..).zip(rhs.nodes()) {
        let id = NodeId(fresh);
        out.add_node_with_id(id, n.color, n.phase);
        ids.insert(n.id, id);
    }
    let att = |p: Endpoint| ports[port_index(rhs, p)];
    for e in rhs.edges() {
        match (e.source, e.target) {
            (Endpoint::Node(a), Endpoint::Node(b)) => {
                out.add_edge(Edge::new(Endpoint::Node(ids[&a]), Endpoint::Node(ids[&b]), e.decoration));
            }
            (p, Endpoint::Node(b)) | (Endpoint::Node(b), p) if p.is_port() => {
                let a = att(p);
                let w = Endpoint::Node(ids[&b]);
                if a.outside_is_source {
                    let decos = if e.source == p { [a.remainder, e.decoration] } else { [a.remainder, e.decoration.dagger()] };
                    out.connect_chain(a.outside, w, &decos);
                } else {
                    let decos = if e.target == p { [e.decoration, a.remainder] } else { [e.decoration.dagger(), a.remainder] };
                    out.connect_chain(w, a.outside, &decos);
                }
            }
            (p, q) => {
                let (a, b) = (att(p), att(q));
                out.connect_chain(a.outside, b.outside, &[a.remainder, e.decoration, b.remainder]);
            }
        }
    }
    out
}

/// Host decoration of the edge matched by a wire pattern.
fn combined(a: Attachment, lhs: &Diagram) -> Decoration {
    let pd = lhs.edge(0).decoration;
    if pd == Decoration::Plain {
        a.remainder
    } else {
        pd
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    #[test]
    fn fusion_pattern_matches_once() {
        let pat = parse("diagram rg { inputs a; outputs b; node x: green 1; node y: green 1; wire a -> x; wire x -> y; wire y -> b; }").unwrap();
        let host = parse("diagram rg { inputs a; outputs b; node n0: green 1; node n1: green 1; wire a -> n0; wire n0 -> n1; wire n1 -> b; }").unwrap();
        let ms = find(&pat, &host);
        // Two orientations of the chain are both valid undirected matches.
        assert_eq!(ms.len(), 2);
    }

    #[test]
    fn parallel_edges_need_exact_multiplicity() {
        let pat = parse("diagram rgb { inputs a; outputs b; node x: green 0; node y: red 3; wire a -> x; wire x -> y; wire x -> y; wire y -> b; }").unwrap();
        let host1 = parse("diagram rgb { inputs a; outputs b; node n0: green 0; node n1: red 3; wire a -> n0; wire n0 -> n1; wire n0 -> n1; wire n1 -> b; }").unwrap();
        let host2 = parse("diagram rgb { inputs a; outputs b c; node n0: green 0; node n1: red 3; wire a -> n0; wire n0 -> n1; wire n0 -> c; wire n1 -> b; }").unwrap();
        assert_eq!(find(&pat, &host1).len(), 1);
        assert!(find(&pat, &host2).is_empty());
    }

    #[test]
    fn boundary_remainder_is_kept() {
        let pat = parse("diagram rgb { inputs a; outputs b; node x: green 0; wire a -> x; wire x -> b; }").unwrap();
        let rhs = parse("diagram rgb { inputs a; outputs b; wire a -> b; }").unwrap();
        let host = parse("diagram rgb { inputs a; outputs b; node n0: green 0; wire a -> n0 [dualY]; wire n0 -> b [cw]; }").unwrap();
        let ms = find(&pat, &host);
        assert_eq!(ms.len(), 1);
        let out = replace(&host, &pat, &rhs, &ms[0].0, &ms[0].1);
        out.validate().unwrap();
        assert_eq!(out.node_count(), 1);
        let decos: Vec<Decoration> = out.edges().iter().map(|e| e.decoration).collect();
        assert!(decos.contains(&Decoration::DualY) && decos.contains(&Decoration::ColourCw));
    }

    #[test]
    fn wire_pattern_matches_each_edge() {
        let pat = parse("diagram rgb { inputs a; outputs b; wire a -> b; }").unwrap();
        let host = parse("diagram rgb { inputs a; outputs b; node n0: green 1; wire a -> n0; wire n0 -> b [dualC]; }").unwrap();
        assert_eq!(find(&pat, &host).len(), 2);
    }
}
