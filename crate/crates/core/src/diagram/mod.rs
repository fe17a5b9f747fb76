//! Open digraphs: coloured phase spiders, decorated directed edges and
//! ordered boundary ports.

mod canon;

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

pub use canon::{canonical_form, canonical_relabel, iso_equal, CanonicalForm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flavour {
    Rg,
    RgPlus,
    Rgb,
}

impl Flavour {
    /// RG and RG+ share generators and semantics.
    pub fn is_dichromatic(self) -> bool {
        matches!(self, Flavour::Rg | Flavour::RgPlus)
    }

    /// Whether edge direction carries meaning.
    pub fn directed(self) -> bool {
        self == Flavour::Rgb
    }

    pub fn colours(self) -> &'static [Color] {
        if self.is_dichromatic() {
            &[Color::Red, Color::Green]
        } else {
            &[Color::Red, Color::Green, Color::Blue]
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Flavour::Rg => "rg",
            Flavour::RgPlus => "rgplus",
            Flavour::Rgb => "rgb",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Flavour> {
        match s {
            "rg" => Some(Flavour::Rg),
            "rgplus" | "rg+" => Some(Flavour::RgPlus),
            "rgb" => Some(Flavour::Rgb),
            _ => None,
        }
    }
}

impl fmt::Display for Flavour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    Red,
    Green,
    Blue,
}

impl Color {
    pub const ALL: [Color; 3] = [Color::Red, Color::Green, Color::Blue];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Successor in the even cycle R -> G -> B -> R.
    pub fn next(self) -> Color {
        Color::ALL[(self.index() + 1) % 3]
    }

    pub fn prev(self) -> Color {
        Color::ALL[(self.index() + 2) % 3]
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Color::Red => "red",
            Color::Green => "green",
            Color::Blue => "blue",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Color> {
        match s {
            "red" | "r" => Some(Color::Red),
            "green" | "g" => Some(Color::Green),
            "blue" | "b" => Some(Color::Blue),
            _ => None,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PhaseGroup {
    C4,
    U1,
}

/// Spider label: a quarter turn count or an angle in radians.
#[derive(Clone, Copy, Debug)]
pub enum Phase {
    C4(u8),
    U1(f64),
}

impl Phase {
    pub const ZERO: Phase = Phase::C4(0);

    pub fn c4(k: i64) -> Phase {
        Phase::C4(k.rem_euclid(4) as u8)
    }

    /// Angle reduced to `[0, 2 pi)`.
    pub fn u1(angle: f64) -> Phase {
        let mut a = angle.rem_euclid(TAU);
        if a >= TAU {
            a = 0.0;
        }
        Phase::U1(a + 0.0)
    }

    pub fn zero_in(group: PhaseGroup) -> Phase {
        match group {
            PhaseGroup::C4 => Phase::C4(0),
            PhaseGroup::U1 => Phase::U1(0.0),
        }
    }

    pub fn group(self) -> PhaseGroup {
        match self {
            Phase::C4(_) => PhaseGroup::C4,
            Phase::U1(_) => PhaseGroup::U1,
        }
    }

    pub fn is_zero(self) -> bool {
        match self {
            Phase::C4(k) => k == 0,
            Phase::U1(a) => a == 0.0,
        }
    }

    /// The phase as an angle; quarter turns map to `k pi / 2`.
    pub fn angle(self) -> f64 {
        match self {
            Phase::C4(k) => k as f64 * FRAC_PI_2,
            Phase::U1(a) => a,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Phase {
        match self {
            Phase::C4(k) => Phase::c4(-(k as i64)),
            Phase::U1(a) => Phase::u1(-a),
        }
    }

    /// Group sum; `None` when the groups differ.
    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: Phase) -> Option<Phase> {
        match (self, other) {
            (Phase::C4(a), Phase::C4(b)) => Some(Phase::c4(a as i64 + b as i64)),
            (Phase::U1(a), Phase::U1(b)) => Some(Phase::u1(a + b)),
            _ => None,
        }
    }

    /// Adds `k` quarter turns in whichever group the phase lives in.
    pub fn add_quarters(self, k: i64) -> Phase {
        match self {
            Phase::C4(a) => Phase::c4(a as i64 + k),
            Phase::U1(a) => Phase::u1(a + k as f64 * FRAC_PI_2),
        }
    }

    fn key(self) -> (u8, u64) {
        match self {
            Phase::C4(k) => (0, k as u64),
            Phase::U1(a) => (1, a.to_bits()),
        }
    }
}

impl PartialEq for Phase {
    fn eq(&self, other: &Phase) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Phase {}

impl Hash for Phase {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state)
    }
}

impl PartialOrd for Phase {
    fn partial_cmp(&self, other: &Phase) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Phase {
    fn cmp(&self, other: &Phase) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::C4(k) => write!(f, "{k}"),
            Phase::U1(a) => write!(f, "rad {a:?}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Decoration {
    Plain,
    Hadamard,
    ColourCw,
    ColourCcw,
    DualY,
    DualC,
    DualM,
}

impl Decoration {
    pub fn keyword(self) -> Option<&'static str> {
        match self {
            Decoration::Plain => None,
            Decoration::Hadamard => Some("h"),
            Decoration::ColourCw => Some("cw"),
            Decoration::ColourCcw => Some("ccw"),
            Decoration::DualY => Some("dualY"),
            Decoration::DualC => Some("dualC"),
            Decoration::DualM => Some("dualM"),
        }
    }

    pub fn from_keyword(s: &str) -> Option<Decoration> {
        match s {
            "h" => Some(Decoration::Hadamard),
            "cw" => Some(Decoration::ColourCw),
            "ccw" => Some(Decoration::ColourCcw),
            "dualY" => Some(Decoration::DualY),
            "dualC" => Some(Decoration::DualC),
            "dualM" => Some(Decoration::DualM),
            _ => None,
        }
    }

    pub fn allowed_in(self, flavour: Flavour) -> bool {
        match self {
            Decoration::Plain => true,
            Decoration::Hadamard => flavour.is_dichromatic(),
            _ => flavour == Flavour::Rgb,
        }
    }

    /// Decoration seen when the edge is traversed backwards.
    pub fn dagger(self) -> Decoration {
        match self {
            Decoration::ColourCw => Decoration::ColourCcw,
            Decoration::ColourCcw => Decoration::ColourCw,
            d => d,
        }
    }

    /// The dualizer between two distinct colours.
    pub fn dualizer(a: Color, b: Color) -> Option<Decoration> {
        use Color::*;
        match (a.min(b), a.max(b)) {
            (Red, Green) => Some(Decoration::DualY),
            (Green, Blue) => Some(Decoration::DualC),
            (Red, Blue) => Some(Decoration::DualM),
            _ => None,
        }
    }

    /// Colours of a dualizer's defining cup/cap pair.
    pub fn dual_colours(self) -> Option<(Color, Color)> {
        match self {
            Decoration::DualY => Some((Color::Red, Color::Green)),
            Decoration::DualC => Some((Color::Green, Color::Blue)),
            Decoration::DualM => Some((Color::Blue, Color::Red)),
            _ => None,
        }
    }

    /// The dualizer that equals the half turn of `c`.
    pub fn dual_of_colour(c: Color) -> Decoration {
        match c {
            Color::Red => Decoration::DualY,
            Color::Green => Decoration::DualC,
            Color::Blue => Decoration::DualM,
        }
    }

    pub fn is_dualizer(self) -> bool {
        self.dual_colours().is_some()
    }

    /// Colour-changer power in Z3 (plain = 0, cw = 1, ccw = 2).
    pub fn changer_power(self) -> Option<u8> {
        match self {
            Decoration::Plain => Some(0),
            Decoration::ColourCw => Some(1),
            Decoration::ColourCcw => Some(2),
            _ => None,
        }
    }

    pub fn changer(power: u8) -> Decoration {
        match power % 3 {
            0 => Decoration::Plain,
            1 => Decoration::ColourCw,
            _ => Decoration::ColourCcw,
        }
    }
}

/// Node identifier, unique within a diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoint {
    Input(usize),
    Output(usize),
    Node(NodeId),
}

impl Endpoint {
    pub fn node(self) -> Option<NodeId> {
        match self {
            Endpoint::Node(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_port(self) -> bool {
        !matches!(self, Endpoint::Node(_))
    }

    /// Port exchange performed by the dagger.
    fn swap_port(self) -> Endpoint {
        match self {
            Endpoint::Input(i) => Endpoint::Output(i),
            Endpoint::Output(i) => Endpoint::Input(i),
            n => n,
        }
    }

    /// Parses `n5`, `5`, `i0` or `o1`.
    pub fn parse_ref(s: &str) -> Option<Endpoint> {
        let s = s.trim();
        if let Ok(v) = s.parse::<u32>() {
            return Some(Endpoint::Node(NodeId(v)));
        }
        let (head, num) = s.split_at(1.min(s.len()));
        let n: u32 = num.parse().ok()?;
        match head {
            "n" => Some(Endpoint::Node(NodeId(n))),
            "i" => Some(Endpoint::Input(n as usize)),
            "o" => Some(Endpoint::Output(n as usize)),
            _ => None,
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Input(i) => write!(f, "i{i}"),
            Endpoint::Output(i) => write!(f, "o{i}"),
            Endpoint::Node(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub source: Endpoint,
    pub target: Endpoint,
    pub decoration: Decoration,
}

impl Edge {
    pub fn new(source: Endpoint, target: Endpoint, decoration: Decoration) -> Edge {
        Edge {
            source,
            target,
            decoration,
        }
    }

    pub fn plain(source: Endpoint, target: Endpoint) -> Edge {
        Edge::new(source, target, Decoration::Plain)
    }

    pub fn touches(&self, e: Endpoint) -> bool {
        self.source == e || self.target == e
    }

    pub fn is_self_loop(&self) -> bool {
        self.source == self.target
    }

    /// The endpoint opposite `e` (for a self-loop, `e` itself).
    pub fn other(&self, e: Endpoint) -> Endpoint {
        if self.source == e {
            self.target
        } else {
            self.source
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Node {
    pub id: NodeId,
    pub color: Color,
    pub phase: Phase,
}

/// Which end of an edge sits at a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum End {
    Source,
    Target,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Violation {
    #[error("colour/flavour: {node} is {color} in an {flavour} diagram")]
    ColourFlavour {
        node: NodeId,
        color: Color,
        flavour: Flavour,
    },
    #[error("decoration/flavour: edge {edge} carries {decoration:?} in an {flavour} diagram")]
    DecorationFlavour {
        edge: usize,
        decoration: Decoration,
        flavour: Flavour,
    },
    #[error("dangling edge: edge {edge} references missing {endpoint}")]
    DanglingEdge { edge: usize, endpoint: Endpoint },
    #[error("boundary port: {port} is used by {uses} edge ends, expected exactly one")]
    PortUse { port: Endpoint, uses: usize },
    #[error("port direction: {port} must be an edge {expected} in an rgb diagram")]
    PortDirection { port: Endpoint, expected: &'static str },
    #[error("phase group: {node} mixes phase groups")]
    PhaseGroup { node: NodeId },
}

impl Violation {
    /// Short invariant name.
    pub fn name(&self) -> &'static str {
        match self {
            Violation::ColourFlavour { .. } => "colour/flavour",
            Violation::DecorationFlavour { .. } => "decoration/flavour",
            Violation::DanglingEdge { .. } => "dangling edge",
            Violation::PortUse { .. } => "boundary port",
            Violation::PortDirection { .. } => "port direction",
            Violation::PhaseGroup { .. } => "phase group",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagramError {
    #[error("flavour mismatch: {0} vs {1}")]
    FlavourMismatch(Flavour, Flavour),
    #[error("arity mismatch: {0} outputs vs {1} inputs")]
    ArityMismatch(usize, usize),
    #[error("odd colour permutation is not a symmetry of rgb")]
    OddPermutation,
    #[error("permutation {0:?} is not a symmetry of the dichromatic calculus")]
    InvalidPermutation(ColourPerm),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Diagram {
    flavour: Flavour,
    nodes: BTreeMap<NodeId, Node>,
    edges: Vec<Edge>,
    n_inputs: usize,
    n_outputs: usize,
}

impl Diagram {
    pub fn new(flavour: Flavour, n_inputs: usize, n_outputs: usize) -> Diagram {
        Diagram {
            flavour,
            nodes: BTreeMap::new(),
            edges: Vec::new(),
            n_inputs,
            n_outputs,
        }
    }

    /// The identity on `n` wires.
    pub fn identity(flavour: Flavour, n: usize) -> Diagram {
        let mut d = Diagram::new(flavour, n, n);
        for i in 0..n {
            d.add_edge(Edge::plain(Endpoint::Input(i), Endpoint::Output(i)));
        }
        d
    }

    pub fn flavour(&self) -> Flavour {
        self.flavour
    }

    pub fn set_flavour(&mut self, flavour: Flavour) {
        self.flavour = flavour;
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_outputs(&self) -> usize {
        self.n_outputs
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.values()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.keys().copied()
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(&id)
    }

    pub fn node_mut(&mut self, id: NodeId) -> Option<&mut Node> {
        self.nodes.get_mut(&id)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> Edge {
        self.edges[i]
    }

    pub fn edge_mut(&mut self, i: usize) -> &mut Edge {
        &mut self.edges[i]
    }

    pub fn next_node_id(&self) -> NodeId {
        NodeId(self.nodes.keys().next_back().map_or(0, |v| v.0 + 1))
    }

    pub fn add_node(&mut self, color: Color, phase: Phase) -> NodeId {
        let id = self.next_node_id();
        self.add_node_with_id(id, color, phase);
        id
    }

    pub fn add_node_with_id(&mut self, id: NodeId, color: Color, phase: Phase) {
        self.nodes.insert(id, Node { id, color, phase });
    }

    pub fn add_edge(&mut self, e: Edge) -> usize {
        self.edges.push(e);
        self.edges.len() - 1
    }

    pub fn connect(&mut self, a: impl Into<Endpoint>, b: impl Into<Endpoint>) -> usize {
        self.add_edge(Edge::plain(a.into(), b.into()))
    }

    pub fn connect_with(
        &mut self,
        a: impl Into<Endpoint>,
        b: impl Into<Endpoint>,
        deco: Decoration,
    ) -> usize {
        self.add_edge(Edge::new(a.into(), b.into(), deco))
    }

    /// Removes a node and every edge touching it.
    pub fn remove_node(&mut self, id: NodeId) {
        self.nodes.remove(&id);
        let e = Endpoint::Node(id);
        self.edges.retain(|edge| !edge.touches(e));
    }

    /// Removes the edges at the given indices.
    pub fn remove_edges(&mut self, idx: &BTreeSet<usize>) {
        let mut i = 0;
        self.edges.retain(|_| {
            let keep = !idx.contains(&i);
            i += 1;
            keep
        });
    }

    /// Edge ends at `v`; a self-loop contributes both of its ends.
    pub fn legs(&self, v: NodeId) -> Vec<(usize, End)> {
        let e = Endpoint::Node(v);
        let mut out = Vec::new();
        for (i, edge) in self.edges.iter().enumerate() {
            if edge.source == e {
                out.push((i, End::Source));
            }
            if edge.target == e {
                out.push((i, End::Target));
            }
        }
        out
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.legs(v).len()
    }

    /// (in-degree, out-degree): edges ending at `v` and edges leaving it.
    pub fn in_out_degree(&self, v: NodeId) -> (usize, usize) {
        let legs = self.legs(v);
        let outs = legs.iter().filter(|(_, end)| *end == End::Source).count();
        (legs.len() - outs, outs)
    }

    /// Index of the edge attached to a boundary port.
    pub fn port_edge(&self, port: Endpoint) -> Option<usize> {
        self.edges.iter().position(|e| e.touches(port))
    }

    /// Phase group of the diagram (C4 when there are no nodes).
    pub fn phase_group(&self) -> PhaseGroup {
        self.nodes
            .values()
            .next()
            .map_or(PhaseGroup::C4, |n| n.phase.group())
    }

    pub fn zero_phase(&self) -> Phase {
        Phase::zero_in(self.phase_group())
    }

    /// Adds an edge from `from` to `to` carrying the given decorations in
    /// order; consecutive non-plain decorations are separated by inserted
    /// green phase-0 points.
    pub fn connect_chain(&mut self, from: Endpoint, to: Endpoint, decos: &[Decoration]) {
        let decos: Vec<Decoration> = decos
            .iter()
            .copied()
            .filter(|d| *d != Decoration::Plain)
            .collect();
        if decos.is_empty() {
            self.add_edge(Edge::plain(from, to));
            return;
        }
        let zero = self.zero_phase();
        let mut cur = from;
        for (i, d) in decos.iter().enumerate() {
            let next = if i + 1 == decos.len() {
                to
            } else {
                Endpoint::Node(self.add_node(Color::Green, zero))
            };
            self.add_edge(Edge::new(cur, next, *d));
            cur = next;
        }
    }

    pub fn validate(&self) -> Result<(), Violation> {
        let group = self.nodes.values().next().map(|n| n.phase.group());
        for node in self.nodes.values() {
            if node.color == Color::Blue && self.flavour.is_dichromatic() {
                return Err(Violation::ColourFlavour {
                    node: node.id,
                    color: node.color,
                    flavour: self.flavour,
                });
            }
            if Some(node.phase.group()) != group {
                return Err(Violation::PhaseGroup { node: node.id });
            }
        }
        let mut port_uses: BTreeMap<Endpoint, Vec<End>> = BTreeMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            if !e.decoration.allowed_in(self.flavour) {
                return Err(Violation::DecorationFlavour {
                    edge: i,
                    decoration: e.decoration,
                    flavour: self.flavour,
                });
            }
            for (ep, end) in [(e.source, End::Source), (e.target, End::Target)] {
                let exists = match ep {
                    Endpoint::Node(v) => self.nodes.contains_key(&v),
                    Endpoint::Input(k) => k < self.n_inputs,
                    Endpoint::Output(k) => k < self.n_outputs,
                };
                if !exists {
                    return Err(Violation::DanglingEdge {
                        edge: i,
                        endpoint: ep,
                    });
                }
                if ep.is_port() {
                    port_uses.entry(ep).or_default().push(end);
                }
            }
        }
        let ports = (0..self.n_inputs)
            .map(Endpoint::Input)
            .chain((0..self.n_outputs).map(Endpoint::Output));
        for port in ports {
            let uses = port_uses.get(&port).map_or(&[][..], |v| &v[..]);
            if uses.len() != 1 {
                return Err(Violation::PortUse {
                    port,
                    uses: uses.len(),
                });
            }
            if self.flavour.directed() {
                let (expected, end) = match port {
                    Endpoint::Input(_) => ("source", End::Source),
                    _ => ("target", End::Target),
                };
                if uses[0] != end {
                    return Err(Violation::PortDirection { port, expected });
                }
            }
        }
        Ok(())
    }

    /// Connected components of nodes, each tagged with whether it touches a
    /// boundary port.
    pub fn components(&self) -> Vec<(BTreeSet<NodeId>, bool)> {
        let mut adj: BTreeMap<NodeId, Vec<NodeId>> =
            self.nodes.keys().map(|&v| (v, Vec::new())).collect();
        let mut boundary = BTreeSet::new();
        for e in &self.edges {
            match (e.source, e.target) {
                (Endpoint::Node(a), Endpoint::Node(b)) => {
                    adj.get_mut(&a).unwrap().push(b);
                    adj.get_mut(&b).unwrap().push(a);
                }
                (Endpoint::Node(a), _) | (_, Endpoint::Node(a)) => {
                    boundary.insert(a);
                }
                _ => {}
            }
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in self.nodes.keys() {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                if !comp.insert(v) {
                    continue;
                }
                stack.extend(adj[&v].iter().copied().filter(|w| !comp.contains(w)));
            }
            seen.extend(comp.iter().copied());
            let open = comp.iter().any(|v| boundary.contains(v));
            out.push((comp, open));
        }
        out
    }

    /// Copy with closed components (touching no boundary port) removed.
    pub fn without_closed_components(&self) -> Diagram {
        let mut d = self.clone();
        for (comp, open) in self.components() {
            if !open {
                for v in comp {
                    d.remove_node(v);
                }
            }
        }
        d
    }

    /// Copy of `self` with node ids shifted by `offset` and ports shifted.
    fn shifted(&self, offset: u32, in_shift: usize, out_shift: usize) -> Diagram {
        let map = |ep: Endpoint| match ep {
            Endpoint::Node(v) => Endpoint::Node(NodeId(v.0 + offset)),
            Endpoint::Input(i) => Endpoint::Input(i + in_shift),
            Endpoint::Output(i) => Endpoint::Output(i + out_shift),
        };
        Diagram {
            flavour: self.flavour,
            nodes: self
                .nodes
                .values()
                .map(|n| {
                    let id = NodeId(n.id.0 + offset);
                    (id, Node { id, ..*n })
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| Edge::new(map(e.source), map(e.target), e.decoration))
                .collect(),
            n_inputs: self.n_inputs,
            n_outputs: self.n_outputs,
        }
    }

    /// Disjoint union; ports of `g` follow those of `self`.
    pub fn tensor(&self, g: &Diagram) -> Result<Diagram, DiagramError> {
        if self.flavour != g.flavour {
            return Err(DiagramError::FlavourMismatch(self.flavour, g.flavour));
        }
        let g = g.shifted(self.next_node_id().0, self.n_inputs, self.n_outputs);
        let mut d = self.clone();
        d.nodes.extend(g.nodes);
        d.edges.extend(g.edges);
        d.n_inputs += g.n_inputs;
        d.n_outputs += g.n_outputs;
        Ok(d)
    }

    /// Sequential composition: `self` first, then `g`.
    ///
    /// Output `j` of `self` is plugged into input `j` of `g`. Decorations on
    /// the two halves of a fused wire are kept as a chain.
    pub fn compose(&self, g: &Diagram) -> Result<Diagram, DiagramError> {
        if self.flavour != g.flavour {
            return Err(DiagramError::FlavourMismatch(self.flavour, g.flavour));
        }
        if self.n_outputs != g.n_inputs {
            return Err(DiagramError::ArityMismatch(self.n_outputs, g.n_inputs));
        }
        let g = g.shifted(self.next_node_id().0, 0, 0);

        // Segment ends are either terminals of the result or junctions.
        #[derive(Clone, Copy, PartialEq, Eq)]
        enum Pt {
            Term(Endpoint),
            Junction(usize),
        }
        let f_pt = |ep: Endpoint| match ep {
            Endpoint::Output(j) => Pt::Junction(j),
            other => Pt::Term(other),
        };
        let g_pt = |ep: Endpoint| match ep {
            Endpoint::Input(j) => Pt::Junction(j),
            other => Pt::Term(other),
        };
        let segs: Vec<(Pt, Pt, Decoration)> = self
            .edges
            .iter()
            .map(|e| (f_pt(e.source), f_pt(e.target), e.decoration))
            .chain(
                g.edges
                    .iter()
                    .map(|e| (g_pt(e.source), g_pt(e.target), e.decoration)),
            )
            .collect();

        let mut d = Diagram {
            flavour: self.flavour,
            nodes: self.nodes.clone(),
            edges: Vec::new(),
            n_inputs: self.n_inputs,
            n_outputs: g.n_outputs,
        };
        d.nodes.extend(g.nodes.clone());

        let mut at_junction: Vec<Vec<(usize, End)>> = vec![Vec::new(); self.n_outputs];
        for (i, (s, t, _)) in segs.iter().enumerate() {
            if let Pt::Junction(j) = s {
                at_junction[*j].push((i, End::Source));
            }
            if let Pt::Junction(j) = t {
                at_junction[*j].push((i, End::Target));
            }
        }
        let mut used = vec![false; segs.len()];
        // Start chains at terminal ends, preferring segment sources so that
        // directed chains are walked forwards.
        let mut starts: Vec<(usize, End)> = Vec::new();
        for (i, (s, t, _)) in segs.iter().enumerate() {
            if matches!(s, Pt::Term(_)) {
                starts.push((i, End::Source));
            }
            if matches!(t, Pt::Term(_)) && !matches!(s, Pt::Term(_)) {
                starts.push((i, End::Target));
            }
        }
        starts.sort_by_key(|&(i, end)| (end, i));
        for (first, end) in starts {
            if used[first] {
                continue;
            }
            let Pt::Term(from) = (if end == End::Source { segs[first].0 } else { segs[first].1 })
            else {
                unreachable!()
            };
            let mut decos = Vec::new();
            let (mut seg, mut entered) = (first, end);
            let to = loop {
                used[seg] = true;
                let (s, t, deco) = segs[seg];
                let (exit, deco) = if entered == End::Source {
                    (t, deco)
                } else {
                    (s, deco.dagger())
                };
                decos.push(deco);
                match exit {
                    Pt::Term(ep) => break ep,
                    Pt::Junction(j) => {
                        let exit_end = if entered == End::Source {
                            End::Target
                        } else {
                            End::Source
                        };
                        let &(next, next_end) = at_junction[j]
                            .iter()
                            .find(|&&(k, e)| !(k == seg && e == exit_end))
                            .expect("junction has two ends");
                        seg = next;
                        entered = next_end;
                    }
                }
            };
            d.connect_chain(from, to, &decos);
        }
        // Segments left over form closed loops through junctions only; they
        // are scalars and are dropped.
        Ok(d)
    }

    /// Reverses every edge, swaps inputs with outputs and negates phases.
    pub fn dagger(&self) -> Diagram {
        Diagram {
            flavour: self.flavour,
            nodes: self
                .nodes
                .values()
                .map(|n| {
                    (
                        n.id,
                        Node {
                            phase: n.phase.neg(),
                            ..*n
                        },
                    )
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| {
                    Edge::new(
                        e.target.swap_port(),
                        e.source.swap_port(),
                        e.decoration.dagger(),
                    )
                })
                .collect(),
            n_inputs: self.n_outputs,
            n_outputs: self.n_inputs,
        }
    }

    /// Recolours nodes and dualizers; colour changers are fixed by even
    /// permutations and Hadamard by the dichromatic swap.
    pub fn colour_permute(&self, perm: ColourPerm) -> Result<Diagram, DiagramError> {
        if self.flavour.is_dichromatic() {
            if perm.apply(Color::Blue) != Color::Blue {
                return Err(DiagramError::InvalidPermutation(perm));
            }
        } else if !perm.is_even() {
            return Err(DiagramError::OddPermutation);
        }
        let mut d = self.clone();
        for n in d.nodes.values_mut() {
            n.color = perm.apply(n.color);
        }
        for e in d.edges.iter_mut() {
            if let Some((a, b)) = e.decoration.dual_colours() {
                e.decoration = Decoration::dualizer(perm.apply(a), perm.apply(b)).unwrap();
            }
        }
        Ok(d)
    }

    /// Replaces colour-changer and dualizer decorations by their defining
    /// node composites. Hadamard decorations are left in place.
    pub fn expand_decorations(&self) -> Diagram {
        let mut d = self.clone();
        let zero = d.zero_phase();
        let quarter = zero.add_quarters(1);
        let old = std::mem::take(&mut d.edges);
        for e in old {
            match e.decoration {
                Decoration::ColourCw | Decoration::ColourCcw => {
                    let reps = if e.decoration == Decoration::ColourCw { 1 } else { 2 };
                    let mut cur = e.source;
                    for _ in 0..reps {
                        let g = d.add_node(Color::Green, quarter);
                        let b = d.add_node(Color::Blue, quarter);
                        d.connect(cur, g);
                        d.connect(g, b);
                        cur = Endpoint::Node(b);
                    }
                    d.connect(cur, e.target);
                }
                Decoration::DualY | Decoration::DualC | Decoration::DualM => {
                    // Cup of one colour feeding a cap of the other.
                    let (cap_col, cup_col) = match e.decoration {
                        Decoration::DualY => (Color::Red, Color::Green),
                        Decoration::DualC => (Color::Green, Color::Blue),
                        _ => (Color::Blue, Color::Red),
                    };
                    let cap = d.add_node(cap_col, zero);
                    let cup = d.add_node(cup_col, zero);
                    d.connect(e.source, cap);
                    d.connect(cup, cap);
                    d.connect(cup, e.target);
                }
                _ => {
                    d.edges.push(e);
                }
            }
        }
        d
    }
}

impl From<NodeId> for Endpoint {
    fn from(v: NodeId) -> Endpoint {
        Endpoint::Node(v)
    }
}

/// A permutation of the three colours, stored as images of R, G, B.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ColourPerm(pub [Color; 3]);

impl ColourPerm {
    pub const IDENTITY: ColourPerm = ColourPerm([Color::Red, Color::Green, Color::Blue]);
    /// R -> G -> B -> R.
    pub const CYCLE: ColourPerm = ColourPerm([Color::Green, Color::Blue, Color::Red]);
    pub const CYCLE2: ColourPerm = ColourPerm([Color::Blue, Color::Red, Color::Green]);
    pub const SWAP_RG: ColourPerm = ColourPerm([Color::Green, Color::Red, Color::Blue]);

    pub fn apply(self, c: Color) -> Color {
        self.0[c.index()]
    }

    pub fn is_even(self) -> bool {
        self == Self::IDENTITY || self == Self::CYCLE || self == Self::CYCLE2
    }
}
