//! Semantic self-check of a library: every concrete variant, and every
//! parametric site found in a deterministic sample of small hosts.

use super::{Anchor, Direction, Library, Rule};
use crate::diagram::{Color, Decoration, Diagram, Edge, Endpoint, Flavour, NodeId, Phase};
use crate::interp::{diagrams_equal, DEFAULT_TOL};

use super::parametric::{self, Family};

/// Arity bound used when a library is loaded.
pub const LOAD_ARITY: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SoundnessCheck {
    pub rule: String,
    /// Variant origin for concrete rules, instance count or the failing
    /// instance for families.
    pub detail: String,
    pub instances: usize,
    pub ok: bool,
}

#[derive(Clone, Debug, Default)]
pub struct SoundnessReport {
    pub checks: Vec<SoundnessCheck>,
}

impl SoundnessReport {
    pub fn failures(&self) -> impl Iterator<Item = &SoundnessCheck> {
        self.checks.iter().filter(|c| !c.ok)
    }

    pub fn all_ok(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn instances(&self) -> usize {
        self.checks.iter().map(|c| c.instances).sum()
    }
}

pub(crate) fn check(lib: &Library, max_arity: usize) -> SoundnessReport {
    let mut report = SoundnessReport::default();
    for rule in lib.rules() {
        match rule {
            Rule::Concrete(r) => {
                let res = diagrams_equal(&r.lhs, &r.rhs, DEFAULT_TOL);
                let origin = if r.origin.is_empty() { "stated" } else { &r.origin };
                let (ok, detail) = match res {
                    Ok(true) => (true, origin.to_string()),
                    Ok(false) => (false, format!("{origin}: sides differ")),
                    Err(e) => (false, format!("{origin}: {e}")),
                };
                report.checks.push(SoundnessCheck {
                    rule: r.name.clone(),
                    detail,
                    instances: 1,
                    ok,
                });
            }
            Rule::Parametric(p) => {
                report
                    .checks
                    .push(check_family(lib.flavour(), &p.name, p.family, max_arity));
            }
        }
    }
    report
}

/// One rewrite of a sample host by a family, in either direction.
#[derive(Clone, Debug)]
pub struct FamilyInstance {
    pub host: Diagram,
    /// The rewritten host, or why the rewrite failed.
    pub result: Result<Diagram, String>,
    /// Direction, site and anchor, for reports.
    pub label: String,
}

/// Every site the family finds on its deterministic sample hosts, rewritten.
pub fn family_instances(flavour: Flavour, family: Family, max_arity: usize) -> Vec<FamilyInstance> {
    let mut out = Vec::new();
    for (host, anchors) in samples(flavour, family, max_arity) {
        for dir in [Direction::Forward, Direction::Backward] {
            for anchor in &anchors {
                let Ok(sites) = parametric::find(family, &host, dir, anchor) else {
                    continue;
                };
                for site in sites {
                    let result = parametric::apply(&host, &site)
                        .and_then(|d| d.validate().map(|_| d).map_err(|v| v.to_string()));
                    out.push(FamilyInstance {
                        host: host.clone(),
                        result,
                        label: format!("{} {site:?} [{anchor}]", dir.verb()),
                    });
                }
            }
        }
    }
    out
}

fn check_family(flavour: Flavour, name: &str, family: Family, max_arity: usize) -> SoundnessCheck {
    let mut instances = 0;
    for inst in family_instances(flavour, family, max_arity) {
        let fail = |why: String| SoundnessCheck {
            rule: name.to_string(),
            detail: format!("{} on\n{}{why}", inst.label, crate::dsl::print(&inst.host)),
            instances,
            ok: false,
        };
        let out = match &inst.result {
            Ok(d) => d,
            Err(e) => return fail(e.clone()),
        };
        match diagrams_equal(&inst.host, out, DEFAULT_TOL) {
            Ok(true) => instances += 1,
            Ok(false) => return fail(format!("result differs:\n{}", crate::dsl::print(out))),
            Err(e) => return fail(e.to_string()),
        }
    }
    SoundnessCheck {
        rule: name.to_string(),
        detail: format!("{instances} instances"),
        instances,
        ok: instances > 0,
    }
}

/// A spider with `m` inputs and `n` outputs; `decos` are applied to its
/// legs in order (inputs first) and default to plain.
pub(crate) fn spider(flavour: Flavour, c: Color, phase: Phase, m: usize, n: usize, decos: &[Decoration]) -> (Diagram, NodeId) {
    let mut d = Diagram::new(flavour, m, n);
    let v = d.add_node(c, phase);
    let deco = |k: usize| decos.get(k).copied().unwrap_or(Decoration::Plain);
    for k in 0..m {
        d.add_edge(Edge::new(Endpoint::Input(k), Endpoint::Node(v), deco(k)));
    }
    for k in 0..n {
        d.add_edge(Edge::new(Endpoint::Node(v), Endpoint::Output(k), deco(m + k)));
    }
    (d, v)
}

fn shapes(max_arity: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for total in 1..=max_arity {
        for m in 0..=total {
            v.push((m, total - m));
        }
    }
    v
}

fn phases(flavour: Flavour) -> Vec<Phase> {
    let _ = flavour;
    vec![Phase::c4(0), Phase::c4(1), Phase::c4(2), Phase::c4(3)]
}

fn decorations(flavour: Flavour) -> Vec<Decoration> {
    [
        Decoration::Plain,
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

fn samples(flavour: Flavour, family: Family, max_arity: usize) -> Vec<(Diagram, Vec<Anchor>)> {
    let colours = flavour.colours();
    let none = vec![Anchor::new()];
    let mut out = Vec::new();
    match family {
        Family::SpiderFusion => {
            for &c in colours {
                for th in phases(flavour) {
                    for (m, n) in shapes(max_arity) {
                        // Two spiders joined by one or two edges; the split
                        // point of the boundary varies.
                        for links in 1..=2usize {
                            let mut d = Diagram::new(flavour, m, n);
                            let a = d.add_node(c, th);
                            let b = d.add_node(c, Phase::c4(1));
                            for k in 0..m {
                                let to = if k % 2 == 0 { a } else { b };
                                d.connect(Endpoint::Input(k), to);
                            }
                            for k in 0..n {
                                let from = if k % 2 == 0 { b } else { a };
                                d.connect(from, Endpoint::Output(k));
                            }
                            for _ in 0..links {
                                d.connect(a, b);
                            }
                            let legs: Vec<String> = (0..m).step_by(2).map(|k| format!("i{k}")).collect();
                            let split = Anchor::new()
                                .with("node", a.0)
                                .with("legs", legs.join("+"))
                                .with("phase", 3);
                            out.push((d, vec![Anchor::new(), split.clone(), split.with("flip", "")]));
                        }
                    }
                    let (mut d, v) = spider(flavour, c, th, 1, 1, &[]);
                    d.connect(v, v);
                    out.push((d, none.clone()));
                }
            }
        }
        Family::IdentityElision => {
            for &c in colours {
                for d1 in decorations(flavour) {
                    for d2 in [Decoration::Plain, decorations(flavour)[1]] {
                        let (d, _) = spider(flavour, c, Phase::ZERO, 1, 1, &[d1, d2]);
                        let ins = Anchor::new()
                            .with("from", "i0")
                            .with("to", d.edges()[0].target)
                            .with("colour", c);
                        out.push((d, vec![Anchor::new(), ins.clone(), ins.with("flip", "")]));
                    }
                    let mut d = Diagram::new(flavour, 1, 1);
                    d.add_edge(Edge::new(Endpoint::Input(0), Endpoint::Output(0), d1));
                    let ins = Anchor::new().with("from", "i0").with("to", "o0").with("colour", c);
                    out.push((d, vec![ins.clone(), ins.with("flip", "")]));
                }
                if !flavour.directed() {
                    let (d, _) = spider(flavour, c, Phase::ZERO, 0, 2, &[]);
                    out.push((d, none.clone()));
                }
            }
        }
        Family::ColourChange | Family::DualAllLegs | Family::DualPhase | Family::ColourViaOthers => {
            let extra = decorations(flavour);
            for &c in colours {
                for th in phases(flavour) {
                    for (m, n) in shapes(max_arity) {
                        let plain = spider(flavour, c, th, m, n, &[]).0;
                        let mut anchors = vec![Anchor::new()];
                        for &to in colours {
                            anchors.push(Anchor::new().with("colour", to));
                        }
                        if family == Family::ColourViaOthers {
                            anchors = vec![Anchor::new()];
                            out.push((plain.clone(), anchors.clone()));
                            for form in ["a", "b"] {
                                let f = Anchor::new().with("form", form);
                                if let Ok(sites) = parametric::find(family, &plain, Direction::Forward, &f) {
                                    for s in sites {
                                        if let Ok(e) = parametric::apply(&plain, &s) {
                                            out.push((e, vec![Anchor::new()]));
                                        }
                                    }
                                }
                            }
                            continue;
                        }
                        if family == Family::DualAllLegs {
                            anchors = vec![Anchor::new()];
                            for dual in ["Y", "C", "M"] {
                                anchors.push(Anchor::new().with("node", 0).with("dual", dual));
                            }
                        }
                        out.push((plain, anchors.clone()));
                        // Mixed decorations exercise the inserted points.
                        let mixed: Vec<Decoration> = (0..m + n).map(|k| extra[(k + m) % extra.len()]).collect();
                        out.push((spider(flavour, c, th, m, n, &mixed).0, anchors.clone()));
                        for &dual in &extra {
                            if dual.is_dualizer() {
                                let all = vec![dual; m + n];
                                out.push((spider(flavour, c, th, m, n, &all).0, anchors.clone()));
                            }
                        }
                    }
                }
            }
        }
        Family::ArrowInversion => {
            for &c in colours {
                for &c2 in colours {
                    if c == c2 {
                        continue;
                    }
                    for deco in [Decoration::Plain, Decoration::dualizer(c, c2).unwrap_or(Decoration::Plain)] {
                        for (m, n) in [(1, 1), (2, 0), (0, 2), (1, 2)] {
                            let mut d = Diagram::new(flavour, m, n);
                            let a = d.add_node(c, Phase::c4(1));
                            let b = d.add_node(c2, Phase::c4(2));
                            d.add_edge(Edge::new(Endpoint::Node(a), Endpoint::Node(b), deco));
                            for k in 0..m {
                                d.connect(Endpoint::Input(k), if k == 0 { a } else { b });
                            }
                            for k in 0..n {
                                d.connect(if k == 0 { b } else { a }, Endpoint::Output(k));
                            }
                            out.push((d, none.clone()));
                        }
                    }
                }
            }
        }
        Family::StateCopy => {
            for &c in colours {
                for th in phases(flavour) {
                    for (m, n) in shapes(max_arity.saturating_sub(1)) {
                        for decorated in [false, true] {
                            let decos: Vec<Decoration> = if decorated {
                                (0..m + n).map(|k| decorations(flavour)[k % decorations(flavour).len()]).collect()
                            } else {
                                Vec::new()
                            };
                            for state_in in [false, true] {
                                let (mut d, v) = spider(flavour, c, th, m, n, &decos);
                                let s = d.add_node(c.next(), Phase::ZERO);
                                if state_in {
                                    d.connect(s, v);
                                } else {
                                    d.connect(v, s);
                                }
                                out.push((d, none.clone()));
                            }
                        }
                    }
                }
            }
        }
        Family::ScalarDrop => {
            for &c in colours {
                for th in phases(flavour) {
                    let mut d = Diagram::identity(flavour, 1);
                    let a = d.add_node(c, th);
                    let b = d.add_node(colours[0], Phase::c4(1));
                    d.connect(a, b);
                    d.connect(a, b);
                    d.add_node(c, th);
                    out.push((d, none.clone()));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_stated_rule_is_sound() {
        for fl in [Flavour::Rg, Flavour::RgPlus, Flavour::Rgb] {
            let lib = Library::build(fl);
            let report = lib.check_soundness(3);
            if let Some(f) = report.failures().next() {
                panic!("{fl}: {} {}", f.rule, f.detail);
            }
            assert!(report.instances() > lib.len());
        }
    }
}
