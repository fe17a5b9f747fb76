//! Rule libraries, matching, rewriting, derivation scripts and bounded search.

mod library;
mod matcher;
mod parametric;
mod script;
mod search;
mod soundness;

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::OnceLock;

use thiserror::Error;

use crate::diagram::{
    canonical_form, ColourPerm, Diagram, Endpoint, Flavour, NodeId, Violation,
};
use crate::interp::InterpError;

pub use matcher::Attachment;
pub use parametric::{Family, ParamSite};
pub use script::{
    apply_step, parse_script, run_script, DerivationScript, ScriptError, ScriptErrorKind, ScriptRun, Step, StepLog,
};
pub use search::{bounded_search, SearchLimits, SearchOutcome};
pub use soundness::{family_instances, FamilyInstance, SoundnessCheck, SoundnessReport, LOAD_ARITY};

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("unknown rule '{0}'")]
    UnknownRule(String),
    #[error("stale match: host changed since the match was found")]
    StaleMatch,
    #[error("rule '{rule}' does not match here: {reason}")]
    NoMatch { rule: String, reason: String },
    #[error("rule '{0}' cannot be applied right to left")]
    NotReversible(String),
    #[error("bad anchor parameter '{key}': {msg}")]
    BadAnchor { key: String, msg: String },
    #[error("rewrite produced an invalid diagram: {0}")]
    Invalid(Violation),
    #[error("rule '{name}' is unsound: {detail}")]
    Unsound { name: String, detail: String },
    #[error(transparent)]
    Interp(#[from] InterpError),
}

/// Left-to-right (`apply`) or right-to-left (`unapply`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn verb(self) -> &'static str {
        match self {
            Direction::Forward => "apply",
            Direction::Backward => "unapply",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleKind {
    Axiom,
    Theorem,
}

/// Meta-rules a rule is closed under.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MetaTag {
    Dagger,
    ColourPerm,
}

#[derive(Clone, Debug)]
pub struct RewriteRule {
    pub name: String,
    pub flavour: Flavour,
    pub lhs: Diagram,
    pub rhs: Diagram,
    pub closure: BTreeSet<MetaTag>,
    pub kind: RuleKind,
    /// How this variant was obtained from the stated rule ("" when stated).
    pub origin: String,
}

impl RewriteRule {
    /// The rule read right to left.
    pub fn reversed(&self) -> RewriteRule {
        RewriteRule {
            lhs: self.rhs.clone(),
            rhs: self.lhs.clone(),
            ..self.clone()
        }
    }

    fn key(&self) -> (crate::diagram::CanonicalForm, crate::diagram::CanonicalForm) {
        (canonical_form(&self.lhs), canonical_form(&self.rhs))
    }
}

#[derive(Clone, Debug)]
pub struct ParametricRule {
    pub name: String,
    pub flavour: Flavour,
    pub family: Family,
    pub kind: RuleKind,
}

#[derive(Clone, Debug)]
pub enum Rule {
    Concrete(RewriteRule),
    Parametric(ParametricRule),
}

impl Rule {
    pub fn name(&self) -> &str {
        match self {
            Rule::Concrete(r) => &r.name,
            Rule::Parametric(r) => &r.name,
        }
    }

    pub fn kind(&self) -> RuleKind {
        match self {
            Rule::Concrete(r) => r.kind,
            Rule::Parametric(r) => r.kind,
        }
    }
}

/// Script anchor: `key=value` pairs; flags have an empty value.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Anchor {
    params: BTreeMap<String, String>,
}

impl Anchor {
    pub fn new() -> Anchor {
        Anchor::default()
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Anchor {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    pub fn has(&self, key: &str) -> bool {
        self.params.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.params.keys().map(String::as_str)
    }

    fn bad(key: &str, msg: impl Into<String>) -> RuleError {
        RuleError::BadAnchor {
            key: key.to_string(),
            msg: msg.into(),
        }
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>, RuleError> {
        self.get(key)
            .map(|v| v.parse().map_err(|_| Anchor::bad(key, "expected a number")))
            .transpose()
    }

    pub fn int(&self, key: &str) -> Result<Option<i64>, RuleError> {
        self.get(key)
            .map(|v| v.parse().map_err(|_| Anchor::bad(key, "expected an integer")))
            .transpose()
    }

    /// `+`-separated endpoint references.
    pub fn endpoints(&self, key: &str) -> Result<Option<Vec<Endpoint>>, RuleError> {
        let Some(v) = self.get(key) else {
            return Ok(None);
        };
        if v.is_empty() {
            return Ok(Some(Vec::new()));
        }
        v.split('+')
            .map(|s| Endpoint::parse_ref(s).ok_or_else(|| Anchor::bad(key, format!("bad reference '{s}'"))))
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    pub fn nodes(&self, key: &str) -> Result<Option<Vec<NodeId>>, RuleError> {
        let Some(eps) = self.endpoints(key)? else {
            return Ok(None);
        };
        eps.into_iter()
            .map(|e| e.node().ok_or_else(|| Anchor::bad(key, "expected node ids")))
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    pub fn endpoint(&self, key: &str) -> Result<Option<Endpoint>, RuleError> {
        match self.endpoints(key)? {
            None => Ok(None),
            Some(v) if v.len() == 1 => Ok(Some(v[0])),
            Some(_) => Err(Anchor::bad(key, "expected one reference")),
        }
    }
}

impl fmt::Display for Anchor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .params
            .iter()
            .map(|(k, v)| if v.is_empty() { k.clone() } else { format!("{k}={v}") })
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// Where a rule applies in a host.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Match {
    pub rule: String,
    pub direction: Direction,
    pub site: Site,
    fingerprint: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Site {
    /// Pattern nodes (pattern id, host id) and one attachment per pattern
    /// port (inputs then outputs).
    Concrete {
        variant: usize,
        mapping: Vec<(NodeId, NodeId)>,
        ports: Vec<Attachment>,
    },
    Param(ParamSite),
}

impl Match {
    /// Host nodes touched, sorted.
    pub fn host_nodes(&self) -> Vec<NodeId> {
        let mut v = match &self.site {
            Site::Concrete { mapping, .. } => mapping.iter().map(|&(_, h)| h).collect(),
            Site::Param(p) => p.nodes(),
        };
        v.sort();
        v.dedup();
        v
    }
}

pub(crate) fn fingerprint(d: &Diagram) -> u64 {
    let mut h = DefaultHasher::new();
    d.hash(&mut h);
    h.finish()
}

impl RewriteRule {
    /// All matches of the rule read in `direction`.
    pub fn find_matches(&self, host: &Diagram, direction: Direction, variant: usize) -> Vec<Match> {
        if host.flavour() != self.flavour && !(host.flavour() == Flavour::RgPlus && self.flavour == Flavour::Rg) {
            return Vec::new();
        }
        let (lhs, _) = self.sides(direction);
        let fp = fingerprint(host);
        matcher::find(lhs, host)
            .into_iter()
            .map(|(mapping, ports)| Match {
                rule: self.name.clone(),
                direction,
                site: Site::Concrete {
                    variant,
                    mapping,
                    ports,
                },
                fingerprint: fp,
            })
            .collect()
    }

    fn sides(&self, direction: Direction) -> (&Diagram, &Diagram) {
        match direction {
            Direction::Forward => (&self.lhs, &self.rhs),
            Direction::Backward => (&self.rhs, &self.lhs),
        }
    }

    pub fn apply(&self, host: &Diagram, m: &Match) -> Result<Diagram, RuleError> {
        if fingerprint(host) != m.fingerprint {
            return Err(RuleError::StaleMatch);
        }
        let Site::Concrete { mapping, ports, .. } = &m.site else {
            return Err(RuleError::NoMatch {
                rule: self.name.clone(),
                reason: "match belongs to a parametric rule".into(),
            });
        };
        let (lhs, rhs) = self.sides(m.direction);
        let out = matcher::replace(host, lhs, rhs, mapping, ports);
        out.validate().map_err(RuleError::Invalid)?;
        Ok(out)
    }
}

impl ParametricRule {
    pub fn find_matches(&self, host: &Diagram, direction: Direction, anchor: &Anchor) -> Result<Vec<Match>, RuleError> {
        if host.flavour() != self.flavour && !(host.flavour() == Flavour::RgPlus && self.flavour == Flavour::Rg) {
            return Ok(Vec::new());
        }
        let fp = fingerprint(host);
        let sites = parametric::find(self.family, host, direction, anchor).map_err(|reason| {
            match reason {
                parametric::FindError::NotReversible => RuleError::NotReversible(self.name.clone()),
                parametric::FindError::Anchor(e) => e,
            }
        })?;
        Ok(sites
            .into_iter()
            .map(|s| Match {
                rule: self.name.clone(),
                direction,
                site: Site::Param(s),
                fingerprint: fp,
            })
            .collect())
    }

    pub fn apply(&self, host: &Diagram, m: &Match) -> Result<Diagram, RuleError> {
        if fingerprint(host) != m.fingerprint {
            return Err(RuleError::StaleMatch);
        }
        let Site::Param(site) = &m.site else {
            return Err(RuleError::NoMatch {
                rule: self.name.clone(),
                reason: "match belongs to a concrete rule".into(),
            });
        };
        let out = parametric::apply(host, site).map_err(|reason| RuleError::NoMatch {
            rule: self.name.clone(),
            reason,
        })?;
        out.validate().map_err(RuleError::Invalid)?;
        Ok(out)
    }
}

/// A flavour's rules, closed under its meta-rules. Variants of one stated
/// rule share its name.
#[derive(Clone, Debug)]
pub struct Library {
    flavour: Flavour,
    rules: Vec<Rule>,
}

impl Library {
    /// Builds the library without soundness checks.
    pub fn build(flavour: Flavour) -> Library {
        Library::from_rules(flavour, library::stated(flavour))
    }

    /// Builds a library from stated rules, closing the concrete ones under
    /// their meta-rules.
    pub fn from_rules(flavour: Flavour, stated: Vec<Rule>) -> Library {
        let mut rules: Vec<Rule> = Vec::new();
        let mut concrete = Vec::new();
        for r in stated {
            match r {
                Rule::Concrete(c) => concrete.push(c),
                p => rules.push(p),
            }
        }
        let closed = close_under_meta(concrete);
        let mut all: Vec<Rule> = closed.into_iter().map(Rule::Concrete).collect();
        all.extend(rules);
        Library { flavour, rules: all }
    }

    pub fn flavour(&self) -> Flavour {
        self.flavour
    }

    /// The rules for which `keep` holds.
    pub fn filter(&self, keep: impl Fn(&Rule) -> bool) -> Library {
        Library {
            flavour: self.flavour,
            rules: self.rules.iter().filter(|r| keep(r)).cloned().collect(),
        }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Distinct rule names in library order.
    pub fn names(&self) -> Vec<&str> {
        let mut seen = BTreeSet::new();
        self.rules
            .iter()
            .map(Rule::name)
            .filter(|n| seen.insert(*n))
            .collect()
    }

    /// Every variant carrying `name`.
    pub fn get(&self, name: &str) -> Vec<&Rule> {
        self.rules.iter().filter(|r| r.name() == name).collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.rules.iter().any(|r| r.name() == name)
    }

    /// All matches of `name` read in `direction`, across variants, filtered by
    /// the anchor (except `match`, which the caller applies).
    pub fn find_matches(
        &self,
        name: &str,
        direction: Direction,
        host: &Diagram,
        anchor: &Anchor,
    ) -> Result<Vec<Match>, RuleError> {
        let variants = self.get(name);
        if variants.is_empty() {
            return Err(RuleError::UnknownRule(name.to_string()));
        }
        let want_nodes = anchor.nodes("node")?;
        let want_variant = anchor.usize("variant")?;
        let mut out = Vec::new();
        let mut concrete_index = 0usize;
        for rule in variants {
            match rule {
                Rule::Concrete(c) => {
                    let v = concrete_index;
                    concrete_index += 1;
                    if want_variant.is_some_and(|w| w != v) {
                        continue;
                    }
                    for m in c.find_matches(host, direction, v) {
                        let nodes = m.host_nodes();
                        if want_nodes.as_ref().is_some_and(|w| !w.iter().all(|n| nodes.contains(n))) {
                            continue;
                        }
                        out.push(m);
                    }
                }
                Rule::Parametric(p) => out.extend(p.find_matches(host, direction, anchor)?),
            }
        }
        Ok(out)
    }

    /// Applies a match produced by [`Library::find_matches`].
    pub fn apply(&self, host: &Diagram, m: &Match) -> Result<Diagram, RuleError> {
        let variants = self.get(&m.rule);
        match &m.site {
            Site::Concrete { variant, .. } => {
                let rule = variants
                    .iter()
                    .filter_map(|r| match r {
                        Rule::Concrete(c) => Some(c),
                        _ => None,
                    })
                    .nth(*variant)
                    .ok_or_else(|| RuleError::UnknownRule(m.rule.clone()))?;
                rule.apply(host, m)
            }
            Site::Param(_) => {
                let rule = variants
                    .iter()
                    .find_map(|r| match r {
                        Rule::Parametric(p) => Some(p),
                        _ => None,
                    })
                    .ok_or_else(|| RuleError::UnknownRule(m.rule.clone()))?;
                rule.apply(host, m)
            }
        }
    }

    /// Runs every soundness check.
    pub fn check_soundness(&self, max_arity: usize) -> SoundnessReport {
        soundness::check(self, max_arity)
    }
}

/// Adds dagger and colour-permutation images of every tagged rule, keeping
/// one representative per pair of canonical sides (in either order).
pub fn close_under_meta(rules: Vec<RewriteRule>) -> Vec<RewriteRule> {
    let mut out: Vec<RewriteRule> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut push = |r: RewriteRule, out: &mut Vec<RewriteRule>| {
        let (a, b) = r.key();
        if seen.contains(&(a.clone(), b.clone())) || seen.contains(&(b.clone(), a.clone())) {
            return;
        }
        seen.insert((a, b));
        out.push(r);
    };
    for r in rules {
        let perms: Vec<(ColourPerm, &str)> = if r.closure.contains(&MetaTag::ColourPerm) {
            if r.flavour.is_dichromatic() {
                vec![(ColourPerm::IDENTITY, ""), (ColourPerm::SWAP_RG, "flip")]
            } else {
                vec![
                    (ColourPerm::IDENTITY, ""),
                    (ColourPerm::CYCLE, "cycle"),
                    (ColourPerm::CYCLE2, "cycle2"),
                ]
            }
        } else {
            vec![(ColourPerm::IDENTITY, "")]
        };
        let daggers: &[bool] = if r.closure.contains(&MetaTag::Dagger) {
            &[false, true]
        } else {
            &[false]
        };
        for &(perm, pname) in &perms {
            for &dag in daggers {
                let (mut l, mut rr) = (r.lhs.clone(), r.rhs.clone());
                if dag {
                    l = l.dagger();
                    rr = rr.dagger();
                }
                let (Ok(l), Ok(rr)) = (l.colour_permute(perm), rr.colour_permute(perm)) else {
                    continue;
                };
                let origin = match (pname, dag) {
                    ("", false) => String::new(),
                    ("", true) => "dagger".to_string(),
                    (p, false) => p.to_string(),
                    (p, true) => format!("{p}+dagger"),
                };
                push(
                    RewriteRule {
                        lhs: l,
                        rhs: rr,
                        origin,
                        ..r.clone()
                    },
                    &mut out,
                );
            }
        }
    }
    out
}

/// The library for a flavour, soundness-checked once per process.
pub fn load_library(flavour: Flavour) -> Result<&'static Library, RuleError> {
    static RG: OnceLock<Result<Library, String>> = OnceLock::new();
    static RGPLUS: OnceLock<Result<Library, String>> = OnceLock::new();
    static RGB: OnceLock<Result<Library, String>> = OnceLock::new();
    let cell = match flavour {
        Flavour::Rg => &RG,
        Flavour::RgPlus => &RGPLUS,
        Flavour::Rgb => &RGB,
    };
    let loaded = cell.get_or_init(|| {
        let lib = Library::build(flavour);
        let report = lib.check_soundness(soundness::LOAD_ARITY);
        let failure = report.failures().next().map(|f| format!("{}\u{0}{}", f.rule, f.detail));
        match failure {
            Some(f) => Err(f),
            None => Ok(lib),
        }
    });
    match loaded {
        Ok(lib) => Ok(lib),
        Err(s) => {
            let (name, detail) = s.split_once('\u{0}').unwrap_or((s.as_str(), ""));
            Err(RuleError::Unsound {
                name: name.to_string(),
                detail: detail.to_string(),
            })
        }
    }
}
