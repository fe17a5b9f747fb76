//! Rule families with unboundedly many instances.
//!
//! Each family finds sites in a host and rewrites them in place, keeping
//! the ids of surviving nodes so that scripts can keep referring to them.

use std::collections::BTreeSet;

use super::{Anchor, Direction, RuleError};
use crate::diagram::{Color, Decoration, Diagram, Edge, End, Endpoint, Flavour, NodeId, Phase, PhaseGroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Adjacent same-colour spiders joined by plain edges merge, adding
    /// phases; plain self-loops vanish. Reversed: split a spider.
    SpiderFusion,
    /// A phase-0 spider with one leg in and one out is a wire. Reversed:
    /// insert a point on an edge.
    IdentityElision,
    /// RG: toggle H on every leg and swap colour. RGB: move to a
    /// neighbouring colour by colour changers on every leg.
    ColourChange,
    /// A spider written with a centre of one other colour and wrappers of the
    /// third on every leg.
    ColourViaOthers,
    /// Reversing an edge between distinct colours toggles their dualizer.
    ArrowInversion,
    /// Toggling a dualizer on every leg of a spider maps its phase.
    DualAllLegs,
    /// Toggling a spider's own-colour dualizer on one leg adds a half turn.
    DualPhase,
    /// A basis state of a spider is copied through it.
    StateCopy,
    /// Components touching no boundary are dropped.
    ScalarDrop,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::SpiderFusion => "spider-fusion",
            Family::IdentityElision => "identity-elision",
            Family::ColourChange => "colour-change",
            Family::ColourViaOthers => "colour-via-others",
            Family::ArrowInversion => "arrow-inversion",
            Family::DualAllLegs => "dual-all-legs",
            Family::DualPhase => "dual-phase",
            Family::StateCopy => "state-copy",
            Family::ScalarDrop => "scalar-drop",
        }
    }

    /// Whether right-to-left sites can be enumerated without parameters.
    pub(crate) fn enumerable_backward(self) -> bool {
        !matches!(
            self,
            Family::SpiderFusion | Family::IdentityElision | Family::StateCopy | Family::ScalarDrop
        )
    }
}

/// Which colour-via-others expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Form {
    /// Centre `next(c)`, wrappers `prev(c)`.
    A,
    /// Centre `prev(c)`, wrappers `next(c)`.
    B,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParamSite {
    Fuse { keep: NodeId, gone: NodeId },
    Split { node: NodeId, legs: Vec<usize>, phase: Phase, flip: bool },
    Elide { node: NodeId },
    Insert { edge: usize, colour: Color, on_target: bool },
    Recolour { node: NodeId, to: Color },
    Expand { node: NodeId, form: Form },
    Collapse { center: NodeId, form: Form },
    Invert { edge: usize },
    DualToggle { node: NodeId, dual: Decoration },
    DualPhase { node: NodeId, edge: usize },
    Copy { state: NodeId, spider: NodeId },
    Drop { node: NodeId },
}

impl ParamSite {
    pub(crate) fn nodes(&self) -> Vec<NodeId> {
        match self {
            ParamSite::Fuse { keep, gone } => vec![*keep, *gone],
            ParamSite::Split { node, .. }
            | ParamSite::Elide { node }
            | ParamSite::Recolour { node, .. }
            | ParamSite::Expand { node, .. }
            | ParamSite::DualToggle { node, .. }
            | ParamSite::DualPhase { node, .. }
            | ParamSite::Drop { node } => vec![*node],
            ParamSite::Collapse { center, .. } => vec![*center],
            ParamSite::Copy { state, spider } => vec![*state, *spider],
            ParamSite::Insert { .. } | ParamSite::Invert { .. } => Vec::new(),
        }
    }
}

pub(crate) enum FindError {
    NotReversible,
    Anchor(RuleError),
}

impl From<RuleError> for FindError {
    fn from(e: RuleError) -> Self {
        FindError::Anchor(e)
    }
}

fn far(e: &Edge, end: End) -> Endpoint {
    match end {
        End::Source => e.target,
        End::Target => e.source,
    }
}

fn colour_of(d: &Diagram, e: Endpoint) -> Option<Color> {
    e.node().and_then(|v| d.node(v)).map(|n| n.color)
}

fn parse_colour(anchor: &Anchor) -> Result<Option<Color>, RuleError> {
    anchor
        .get("colour")
        .map(|s| {
            Color::from_keyword(s).ok_or_else(|| RuleError::BadAnchor {
                key: "colour".into(),
                msg: format!("unknown colour '{s}'"),
            })
        })
        .transpose()
}

fn parse_dual(anchor: &Anchor) -> Result<Option<Decoration>, RuleError> {
    anchor
        .get("dual")
        .map(|s| {
            let d = match s {
                "Y" | "y" | "dualY" => Some(Decoration::DualY),
                "C" | "c" | "dualC" => Some(Decoration::DualC),
                "M" | "m" | "dualM" => Some(Decoration::DualM),
                _ => None,
            };
            d.ok_or_else(|| RuleError::BadAnchor {
                key: "dual".into(),
                msg: format!("unknown dualizer '{s}'"),
            })
        })
        .transpose()
}

fn parse_form(anchor: &Anchor) -> Result<Option<Form>, RuleError> {
    match anchor.get("form") {
        None => Ok(None),
        Some("a") | Some("A") => Ok(Some(Form::A)),
        Some("b") | Some("B") => Ok(Some(Form::B)),
        Some(s) => Err(RuleError::BadAnchor {
            key: "form".into(),
            msg: format!("expected a or b, got '{s}'"),
        }),
    }
}

fn parse_phase(anchor: &Anchor, group: PhaseGroup) -> Result<Option<Phase>, RuleError> {
    let Some(s) = anchor.get("phase") else {
        return Ok(None);
    };
    let bad = || RuleError::BadAnchor {
        key: "phase".into(),
        msg: format!("bad phase '{s}'"),
    };
    match group {
        PhaseGroup::C4 => s.parse::<i64>().map(|k| Some(Phase::c4(k))).map_err(|_| bad()),
        PhaseGroup::U1 => s.parse::<f64>().map(|a| Some(Phase::u1(a))).map_err(|_| bad()),
    }
}

fn node_filter(anchor: &Anchor) -> Result<Option<Vec<NodeId>>, RuleError> {
    anchor.nodes("node")
}

fn keep_node(filter: &Option<Vec<NodeId>>, v: NodeId) -> bool {
    filter.as_ref().is_none_or(|f| f.contains(&v))
}

fn has_self_loop(d: &Diagram, v: NodeId) -> bool {
    d.edges().iter().any(|e| e.source == Endpoint::Node(v) && e.target == Endpoint::Node(v))
}

/// Edges between two distinct nodes.
fn edges_between(d: &Diagram, a: NodeId, b: NodeId) -> Vec<usize> {
    let (ea, eb) = (Endpoint::Node(a), Endpoint::Node(b));
    d.edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| (e.source == ea && e.target == eb) || (e.source == eb && e.target == ea))
        .map(|(i, _)| i)
        .collect()
}

pub(crate) fn find(
    family: Family,
    host: &Diagram,
    direction: Direction,
    anchor: &Anchor,
) -> Result<Vec<ParamSite>, FindError> {
    let rgb = host.flavour() == Flavour::Rgb;
    let nf = node_filter(anchor)?;
    let mut out = Vec::new();
    match (family, direction) {
        (Family::SpiderFusion, Direction::Forward) => {
            let ids: Vec<NodeId> = host.node_ids().collect();
            for (i, &a) in ids.iter().enumerate() {
                if has_self_loop(host, a)
                    && host
                        .edges()
                        .iter()
                        .any(|e| e.is_self_loop() && e.source == Endpoint::Node(a) && e.decoration == Decoration::Plain)
                {
                    let want = nf.as_ref().is_none_or(|f| f.iter().all(|&x| x == a));
                    if want {
                        out.push(ParamSite::Fuse { keep: a, gone: a });
                    }
                }
                for &b in &ids[i + 1..] {
                    if host.node(a).unwrap().color != host.node(b).unwrap().color {
                        continue;
                    }
                    let between = edges_between(host, a, b);
                    if between.is_empty() || between.iter().any(|&k| host.edge(k).decoration != Decoration::Plain) {
                        continue;
                    }
                    let want = nf.as_ref().is_none_or(|f| f.iter().all(|&x| x == a || x == b));
                    if want {
                        out.push(ParamSite::Fuse { keep: a, gone: b });
                    }
                }
            }
        }
        (Family::SpiderFusion, Direction::Backward) => {
            let Some(nodes) = nf else {
                return Err(RuleError::BadAnchor {
                    key: "node".into(),
                    msg: "splitting needs node=<id>".into(),
                }
                .into());
            };
            let &[v] = nodes.as_slice() else {
                return Err(RuleError::BadAnchor {
                    key: "node".into(),
                    msg: "splitting takes one node".into(),
                }
                .into());
            };
            let Some(node) = host.node(v) else {
                return Ok(out);
            };
            let phase = parse_phase(anchor, node.phase.group())?.unwrap_or(Phase::zero_in(node.phase.group()));
            let wanted = anchor.endpoints("legs")?.unwrap_or_default();
            let mut legs = Vec::new();
            let mut used = BTreeSet::new();
            for x in wanted {
                let pick = host.legs(v).into_iter().find(|&(i, end)| {
                    let e = host.edge(i);
                    !e.is_self_loop() && far(&e, end) == x && !used.contains(&i)
                });
                match pick {
                    Some((i, _)) => {
                        used.insert(i);
                        legs.push(i);
                    }
                    None => return Ok(out),
                }
            }
            out.push(ParamSite::Split {
                node: v,
                legs,
                phase,
                flip: anchor.has("flip"),
            });
        }
        (Family::IdentityElision, Direction::Forward) => {
            for n in host.nodes() {
                if !n.phase.is_zero() || !keep_node(&nf, n.id) {
                    continue;
                }
                let legs = host.legs(n.id);
                if legs.len() != 2 || legs[0].0 == legs[1].0 {
                    continue;
                }
                if rgb && legs[0].1 == legs[1].1 {
                    continue;
                }
                let decorated = legs
                    .iter()
                    .filter(|(i, _)| host.edge(*i).decoration != Decoration::Plain)
                    .count();
                if decorated <= 1 {
                    out.push(ParamSite::Elide { node: n.id });
                }
            }
        }
        (Family::IdentityElision, Direction::Backward) => {
            let (Some(from), Some(to)) = (anchor.endpoint("from")?, anchor.endpoint("to")?) else {
                return Err(RuleError::BadAnchor {
                    key: "from".into(),
                    msg: "point insertion needs from=<ref>, to=<ref>".into(),
                }
                .into());
            };
            let colour = parse_colour(anchor)?.unwrap_or(Color::Green);
            for (i, e) in host.edges().iter().enumerate() {
                let forward = e.source == from && e.target == to;
                let backward = !rgb && e.source == to && e.target == from;
                if forward || backward {
                    out.push(ParamSite::Insert {
                        edge: i,
                        colour,
                        on_target: anchor.has("flip"),
                    });
                }
            }
        }
        (Family::ColourChange, dir) => {
            let want = parse_colour(anchor)?;
            for n in host.nodes() {
                if !keep_node(&nf, n.id) {
                    continue;
                }
                let to = if rgb {
                    match dir {
                        Direction::Forward => n.color.next(),
                        Direction::Backward => n.color.prev(),
                    }
                } else if n.color == Color::Red {
                    Color::Green
                } else {
                    Color::Red
                };
                let to = match want {
                    Some(c) if c != n.color && (rgb || c != Color::Blue) => c,
                    Some(_) => continue,
                    None => to,
                };
                out.push(ParamSite::Recolour { node: n.id, to });
            }
        }
        (Family::ColourViaOthers, Direction::Forward) => {
            let want = parse_form(anchor)?;
            for n in host.nodes() {
                if !keep_node(&nf, n.id) || host.degree(n.id) == 0 {
                    continue;
                }
                for form in [Form::A, Form::B] {
                    if want.is_none_or(|w| w == form) {
                        out.push(ParamSite::Expand { node: n.id, form });
                    }
                }
            }
        }
        (Family::ColourViaOthers, Direction::Backward) => {
            let want = parse_form(anchor)?;
            for n in host.nodes() {
                if !keep_node(&nf, n.id) {
                    continue;
                }
                for form in [Form::A, Form::B] {
                    if want.is_none_or(|w| w == form) && collapse_plan(host, n.id, form).is_some() {
                        out.push(ParamSite::Collapse { center: n.id, form });
                    }
                }
            }
        }
        (Family::ArrowInversion, _) => {
            let from = anchor.endpoint("from")?;
            let to = anchor.endpoint("to")?;
            for (i, e) in host.edges().iter().enumerate() {
                let (Some(cs), Some(ct)) = (colour_of(host, e.source), colour_of(host, e.target)) else {
                    continue;
                };
                let Some(dual) = Decoration::dualizer(cs, ct) else {
                    continue;
                };
                if e.decoration != Decoration::Plain && e.decoration != dual {
                    continue;
                }
                if from.is_some_and(|f| f != e.source) || to.is_some_and(|t| t != e.target) {
                    continue;
                }
                if let Some(f) = &nf {
                    if !f.iter().all(|&x| e.touches(Endpoint::Node(x))) {
                        continue;
                    }
                }
                out.push(ParamSite::Invert { edge: i });
            }
        }
        (Family::DualAllLegs, dir) => {
            let want = parse_dual(anchor)?;
            let explicit = nf.is_some() && want.is_some();
            for n in host.nodes() {
                if !keep_node(&nf, n.id) || has_self_loop(host, n.id) || host.degree(n.id) == 0 {
                    continue;
                }
                for dual in [Decoration::DualY, Decoration::DualC, Decoration::DualM] {
                    if want.is_some_and(|w| w != dual) {
                        continue;
                    }
                    let legs = host.legs(n.id);
                    let all = |d: Decoration| legs.iter().all(|(i, _)| host.edge(*i).decoration == d);
                    let ok = explicit
                        || match dir {
                            Direction::Forward => all(dual),
                            Direction::Backward => all(Decoration::Plain),
                        };
                    if ok {
                        out.push(ParamSite::DualToggle { node: n.id, dual });
                    }
                }
            }
        }
        (Family::DualPhase, _) => {
            let leg = anchor.endpoint("leg")?;
            for n in host.nodes() {
                if !keep_node(&nf, n.id) {
                    continue;
                }
                let own = Decoration::dual_of_colour(n.color);
                for (i, end) in host.legs(n.id) {
                    let e = host.edge(i);
                    if e.is_self_loop() || (e.decoration != Decoration::Plain && e.decoration != own) {
                        continue;
                    }
                    if leg.is_some_and(|x| x != far(&e, end)) {
                        continue;
                    }
                    out.push(ParamSite::DualPhase { node: n.id, edge: i });
                }
            }
        }
        (Family::StateCopy, Direction::Forward) => {
            for s in host.nodes() {
                if !s.phase.is_zero() {
                    continue;
                }
                let legs = host.legs(s.id);
                if legs.len() != 1 {
                    continue;
                }
                let e = host.edge(legs[0].0);
                if e.decoration != Decoration::Plain {
                    continue;
                }
                let Endpoint::Node(v) = far(&e, legs[0].1) else {
                    continue;
                };
                let spider = host.node(v).unwrap();
                if s.color != spider.color.next() || has_self_loop(host, v) {
                    continue;
                }
                if nf.as_ref().is_some_and(|f| !f.iter().all(|&x| x == s.id || x == v)) {
                    continue;
                }
                out.push(ParamSite::Copy { state: s.id, spider: v });
            }
        }
        (Family::ScalarDrop, Direction::Forward) => {
            for (nodes, open) in host.components() {
                if open {
                    continue;
                }
                let rep = *nodes.iter().next().unwrap();
                if nf.as_ref().is_some_and(|f| !f.iter().any(|x| nodes.contains(x))) {
                    continue;
                }
                out.push(ParamSite::Drop { node: rep });
            }
        }
        (Family::StateCopy | Family::ScalarDrop, Direction::Backward) => {
            return Err(FindError::NotReversible);
        }
    }
    Ok(out)
}

/// Phase added by toggling dualizer `dual` on all `legs` legs of a spider.
pub(crate) fn dual_all_legs_phase(colour: Color, dual: Decoration, phase: Phase, legs: usize) -> Phase {
    let (a, b) = dual.dual_colours().expect("dualizer");
    let own = Decoration::dual_of_colour(colour) == dual;
    let twist = 2 * legs as i64;
    if own {
        phase.add_quarters(twist)
    } else if colour == a || colour == b {
        phase.neg()
    } else {
        phase.neg().add_quarters(twist)
    }
}

/// Wrappers of a collapsible centre: (wrapper, inner edge, outer edge,
/// wrapper is on an in-leg).
type Plan = Vec<(NodeId, usize, usize, bool)>;

fn collapse_plan(d: &Diagram, center: NodeId, form: Form) -> Option<Plan> {
    let x = d.node(center)?.color;
    let (c, wrap_colour) = match form {
        Form::A => (x.prev(), x.prev().prev()),
        Form::B => (x.next(), x.next().next()),
    };
    let _ = c;
    let (in_phase, out_phase) = match form {
        Form::A => (3, 1),
        Form::B => (1, 3),
    };
    let legs = d.legs(center);
    if legs.is_empty() || !d.flavour().directed() {
        return None;
    }
    let mut plan = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, end) in legs {
        let e = d.edge(i);
        if e.is_self_loop() || e.decoration != Decoration::Plain {
            return None;
        }
        let Endpoint::Node(w) = far(&e, end) else {
            return None;
        };
        let wn = d.node(w)?;
        if !seen.insert(w) || wn.color != wrap_colour {
            return None;
        }
        let is_in = end == End::Target;
        let want = Phase::zero_in(wn.phase.group()).add_quarters(if is_in { in_phase } else { out_phase });
        if wn.phase != want {
            return None;
        }
        let wl = d.legs(w);
        if wl.len() != 2 {
            return None;
        }
        let (oi, oend) = if wl[0].0 == i { wl[1] } else { wl[0] };
        let o = d.edge(oi);
        if oi == i || o.touches(Endpoint::Node(center)) || o.is_self_loop() {
            return None;
        }
        // An in-wrapper sits on a wire flowing into it; an out-wrapper
        // flows out.
        if (oend == End::Target) != is_in {
            return None;
        }
        plan.push((w, i, oi, is_in));
    }
    Some(plan)
}

pub(crate) fn apply(host: &Diagram, site: &ParamSite) -> Result<Diagram, String> {
    let mut d = host.clone();
    match site {
        ParamSite::Fuse { keep, gone } => {
            let (a, b) = (*keep, *gone);
            if a == b {
                let doomed: BTreeSet<usize> = d
                    .edges()
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| e.is_self_loop() && e.source == Endpoint::Node(a) && e.decoration == Decoration::Plain)
                    .map(|(i, _)| i)
                    .collect();
                d.remove_edges(&doomed);
                return Ok(d);
            }
            let (na, nb) = (*d.node(a).ok_or("missing node")?, *d.node(b).ok_or("missing node")?);
            let phase = na.phase.add(nb.phase).ok_or("phase groups differ")?;
            let doomed: BTreeSet<usize> = edges_between(&d, a, b).into_iter().collect();
            d.remove_edges(&doomed);
            for i in 0..d.edges().len() {
                let e = d.edge_mut(i);
                if e.source == Endpoint::Node(b) {
                    e.source = Endpoint::Node(a);
                }
                if e.target == Endpoint::Node(b) {
                    e.target = Endpoint::Node(a);
                }
            }
            d.remove_node(b);
            d.node_mut(a).unwrap().phase = phase;
        }
        ParamSite::Split { node, legs, phase, flip } => {
            let v = *node;
            let n = *d.node(v).ok_or("missing node")?;
            let rest = n.phase.add(phase.neg()).ok_or("phase groups differ")?;
            let w = d.add_node(n.color, *phase);
            d.node_mut(v).unwrap().phase = rest;
            for &i in legs {
                let e = d.edge_mut(i);
                if e.source == Endpoint::Node(v) {
                    e.source = Endpoint::Node(w);
                } else {
                    e.target = Endpoint::Node(w);
                }
            }
            if *flip {
                d.connect(w, v);
            } else {
                d.connect(v, w);
            }
        }
        ParamSite::Elide { node } => {
            let legs = d.legs(*node);
            let (e1, e2) = (d.edge(legs[0].0), d.edge(legs[1].0));
            // Orient the joined wire along the in-leg when there is one.
            let (first, second, fe, se) = if legs[1].1 == End::Target && legs[0].1 == End::Source {
                (e2, e1, legs[1].1, legs[0].1)
            } else {
                (e1, e2, legs[0].1, legs[1].1)
            };
            let x = far(&first, fe);
            let y = far(&second, se);
            let deco = if first.decoration != Decoration::Plain {
                first.decoration
            } else {
                second.decoration
            };
            let doomed: BTreeSet<usize> = [legs[0].0, legs[1].0].into_iter().collect();
            d.remove_edges(&doomed);
            d.remove_node(*node);
            d.add_edge(Edge::new(x, y, deco));
        }
        ParamSite::Insert { edge, colour, on_target } => {
            let e = d.edge(*edge);
            let p = d.add_node(*colour, d.zero_phase());
            let (d1, d2) = if *on_target {
                (Decoration::Plain, e.decoration)
            } else {
                (e.decoration, Decoration::Plain)
            };
            d.remove_edges(&[*edge].into_iter().collect());
            d.add_edge(Edge::new(e.source, Endpoint::Node(p), d1));
            d.add_edge(Edge::new(Endpoint::Node(p), e.target, d2));
        }
        ParamSite::Recolour { node, to } => {
            let v = *node;
            let from = d.node(v).ok_or("missing node")?.color;
            if d.flavour().directed() {
                let (add_in, add_out) = if *to == from.next() {
                    (2u8, 1u8)
                } else if *to == from.prev() {
                    (1, 2)
                } else {
                    return Err("target colour must differ".into());
                };
                let mut doomed = BTreeSet::new();
                let mut extra = Vec::new();
                for (i, end) in d.legs(v) {
                    let e = d.edge(i);
                    if e.is_self_loop() {
                        continue;
                    }
                    let add = if end == End::Target { add_in } else { add_out };
                    match e.decoration.changer_power() {
                        Some(p) => d.edge_mut(i).decoration = Decoration::changer(p + add),
                        None => {
                            doomed.insert(i);
                            extra.push((e, end, Decoration::changer(add)));
                        }
                    }
                }
                d.remove_edges(&doomed);
                for (e, end, ch) in extra {
                    let p = Endpoint::Node(d.add_node(Color::Green, d.zero_phase()));
                    if end == End::Target {
                        d.add_edge(Edge::new(e.source, p, e.decoration));
                        d.add_edge(Edge::new(p, e.target, ch));
                    } else {
                        d.add_edge(Edge::new(e.source, p, ch));
                        d.add_edge(Edge::new(p, e.target, e.decoration));
                    }
                }
            } else {
                for (i, _) in d.legs(v) {
                    let e = d.edge_mut(i);
                    if e.source == e.target {
                        continue;
                    }
                    e.decoration = match e.decoration {
                        Decoration::Plain => Decoration::Hadamard,
                        Decoration::Hadamard => Decoration::Plain,
                        other => return Err(format!("{other:?} cannot carry a colour change")),
                    };
                }
            }
            d.node_mut(v).unwrap().color = *to;
        }
        ParamSite::Expand { node, form } => {
            let v = *node;
            let n = *d.node(v).ok_or("missing node")?;
            let (m, k) = d.in_out_degree(v);
            let (m, k) = (m as i64, k as i64);
            let (centre, wrap, theta, in_phase, out_phase) = match form {
                Form::A => (n.color.next(), n.color.prev(), n.phase.add_quarters(k - m), 3, 1),
                Form::B => (n.color.prev(), n.color.next(), n.phase.add_quarters(m - k), 1, 3),
            };
            let zero = d.zero_phase();
            let nv = d.node_mut(v).unwrap();
            nv.color = centre;
            nv.phase = theta;
            let legs = d.legs(v);
            let mut doomed = BTreeSet::new();
            let mut rewired: Vec<(usize, Endpoint, Endpoint)> = Vec::new();
            let mut wrappers = Vec::new();
            for (i, end) in legs {
                let w = d.add_node(wrap, zero.add_quarters(if end == End::Target { in_phase } else { out_phase }));
                wrappers.push((i, end, w));
            }
            for &(i, end, w) in &wrappers {
                let e = d.edge(i);
                doomed.insert(i);
                if end == End::Target {
                    d.add_edge(Edge::plain(Endpoint::Node(w), Endpoint::Node(v)));
                } else {
                    d.add_edge(Edge::plain(Endpoint::Node(v), Endpoint::Node(w)));
                }
                let _ = e;
                rewired.push((i, Endpoint::Node(w), Endpoint::Node(w)));
            }
            // Outer segments: the old edge with its node end replaced by the
            // wrapper on that side.
            let mut outer: Vec<Edge> = Vec::new();
            let mut handled = BTreeSet::new();
            for &(i, _, _) in &wrappers {
                if !handled.insert(i) {
                    continue;
                }
                let mut e = d.edge(i);
                let src_w = wrappers.iter().find(|&&(j, end, _)| j == i && end == End::Source).map(|x| x.2);
                let tgt_w = wrappers.iter().find(|&&(j, end, _)| j == i && end == End::Target).map(|x| x.2);
                if let Some(w) = src_w {
                    e.source = Endpoint::Node(w);
                }
                if let Some(w) = tgt_w {
                    e.target = Endpoint::Node(w);
                }
                outer.push(e);
            }
            d.remove_edges(&doomed);
            for e in outer {
                d.add_edge(e);
            }
        }
        ParamSite::Collapse { center, form } => {
            let plan = collapse_plan(&d, *center, *form).ok_or("not a colour-via-others pattern")?;
            let x = d.node(*center).unwrap();
            let (c, sign) = match form {
                Form::A => (x.color.prev(), 1),
                Form::B => (x.color.next(), -1),
            };
            let m = plan.iter().filter(|p| p.3).count() as i64;
            let n = plan.len() as i64 - m;
            let theta = x.phase.add_quarters(sign * (m - n));
            let wrappers: BTreeSet<NodeId> = plan.iter().map(|p| p.0).collect();
            let v = Endpoint::Node(*center);
            let mut doomed = BTreeSet::new();
            let mut outer = Vec::new();
            for &(_, inner, oe, _) in &plan {
                doomed.insert(inner);
                if doomed.insert(oe) {
                    let mut e = d.edge(oe);
                    if e.source.node().is_some_and(|w| wrappers.contains(&w)) {
                        e.source = v;
                    }
                    if e.target.node().is_some_and(|w| wrappers.contains(&w)) {
                        e.target = v;
                    }
                    outer.push(e);
                }
            }
            d.remove_edges(&doomed);
            for w in wrappers {
                d.remove_node(w);
            }
            for e in outer {
                d.add_edge(e);
            }
            let nv = d.node_mut(*center).unwrap();
            nv.color = c;
            nv.phase = theta;
        }
        ParamSite::Invert { edge } => {
            let e = d.edge(*edge);
            let (cs, ct) = (colour_of(&d, e.source).ok_or("edge must join nodes")?, colour_of(&d, e.target).ok_or("edge must join nodes")?);
            let dual = Decoration::dualizer(cs, ct).ok_or("colours must differ")?;
            let deco = if e.decoration == dual { Decoration::Plain } else { dual };
            let em = d.edge_mut(*edge);
            *em = Edge::new(e.target, e.source, deco);
        }
        ParamSite::DualToggle { node, dual } => {
            let v = *node;
            let n = *d.node(v).ok_or("missing node")?;
            let legs = d.legs(v);
            let phase = dual_all_legs_phase(n.color, *dual, n.phase, legs.len());
            toggle_legs(&mut d, v, &legs.iter().map(|l| l.0).collect::<Vec<_>>(), *dual);
            d.node_mut(v).unwrap().phase = phase;
        }
        ParamSite::DualPhase { node, edge } => {
            let v = *node;
            let n = *d.node(v).ok_or("missing node")?;
            toggle_legs(&mut d, v, &[*edge], Decoration::dual_of_colour(n.color));
            d.node_mut(v).unwrap().phase = n.phase.add_quarters(2);
        }
        ParamSite::Copy { state, spider } => {
            let s = d.node(*state).ok_or("missing node")?.color;
            let zero = d.zero_phase();
            let v = Endpoint::Node(*spider);
            let legs: Vec<(usize, End)> = d
                .legs(*spider)
                .into_iter()
                .filter(|(i, _)| !d.edge(*i).touches(Endpoint::Node(*state)))
                .collect();
            let mut doomed: BTreeSet<usize> = d.legs(*state).into_iter().map(|l| l.0).collect();
            let mut fresh = Vec::new();
            for (i, end) in legs {
                let e = d.edge(i);
                doomed.insert(i);
                fresh.push((e, end));
            }
            d.remove_edges(&doomed);
            d.remove_node(*state);
            d.remove_node(*spider);
            for (e, end) in fresh {
                let u = Endpoint::Node(d.add_node(s, zero));
                let mut e2 = e;
                if end == End::Source {
                    debug_assert_eq!(e.source, v);
                    e2.source = u;
                } else {
                    e2.target = u;
                }
                d.add_edge(e2);
            }
        }
        ParamSite::Drop { node } => {
            let comp = d
                .components()
                .into_iter()
                .find(|(nodes, _)| nodes.contains(node))
                .ok_or("missing node")?;
            if comp.1 {
                return Err("component touches the boundary".into());
            }
            for v in comp.0 {
                let doomed: BTreeSet<usize> = d.legs(v).into_iter().map(|l| l.0).collect();
                d.remove_edges(&doomed);
                d.remove_node(v);
            }
        }
    }
    Ok(d)
}

/// Toggles `dual` on the given legs of `v`; a leg carrying another
/// decoration gets a point with the dualizer next to `v`.
fn toggle_legs(d: &mut Diagram, v: NodeId, legs: &[usize], dual: Decoration) {
    let mut doomed = BTreeSet::new();
    let mut extra = Vec::new();
    for &i in legs {
        let e = d.edge(i);
        if e.decoration == dual {
            d.edge_mut(i).decoration = Decoration::Plain;
        } else if e.decoration == Decoration::Plain {
            d.edge_mut(i).decoration = dual;
        } else {
            doomed.insert(i);
            extra.push(e);
        }
    }
    d.remove_edges(&doomed);
    for e in extra {
        let p = Endpoint::Node(d.add_node(Color::Green, d.zero_phase()));
        if e.target == Endpoint::Node(v) {
            d.add_edge(Edge::new(e.source, p, e.decoration));
            d.add_edge(Edge::new(p, e.target, dual));
        } else {
            d.add_edge(Edge::new(e.source, p, dual));
            d.add_edge(Edge::new(p, e.target, e.decoration));
        }
    }
}
