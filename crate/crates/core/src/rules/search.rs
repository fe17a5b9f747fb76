//! Breadth-first search for a rewrite path between two diagrams.

use std::collections::{HashMap, VecDeque};

use super::{Anchor, Direction, Library, Rule, Step};
use crate::diagram::{canonical_form, CanonicalForm, Diagram};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    /// Maximum rewrite steps.
    pub depth: usize,
    /// States may have at most this many nodes more than the larger end.
    pub extra_nodes: usize,
    /// Distinct states explored before giving up.
    pub max_states: usize,
}

impl SearchLimits {
    pub fn depth(depth: usize) -> SearchLimits {
        SearchLimits {
            depth,
            extra_nodes: 2,
            max_states: 200_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Vec<Step>),
    /// `truncated` is set when the state cap stopped the search before the
    /// depth was exhausted, so the negative answer is incomplete.
    NotFound { explored: usize, truncated: bool },
}

impl SearchOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }
}

/// Moves tried from a state: every rule in both directions, except the
/// parametric ones that need free parameters (spider split, point
/// insertion). Growth is bounded by the node cap.
fn moves(lib: &Library) -> Vec<(String, Direction)> {
    let mut out = Vec::new();
    for name in lib.names() {
        for dir in [Direction::Forward, Direction::Backward] {
            let usable = lib.get(name).iter().any(|r| match r {
                Rule::Concrete(_) => true,
                Rule::Parametric(p) => dir == Direction::Forward || p.family.enumerable_backward(),
            });
            if usable {
                out.push((name.to_string(), dir));
            }
        }
    }
    out
}

pub fn bounded_search(lib: &Library, d1: &Diagram, d2: &Diagram, limits: SearchLimits) -> SearchOutcome {
    let goal = canonical_form(d2);
    let start = canonical_form(d1);
    if start == goal {
        return SearchOutcome::Found(Vec::new());
    }
    let node_cap = d1.node_count().max(d2.node_count()) + limits.extra_nodes;
    let moves = moves(lib);
    let mut parent: HashMap<CanonicalForm, Option<(CanonicalForm, Step)>> = HashMap::new();
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::from([(d1.clone(), start, 0usize)]);
    let mut truncated = false;
    while let Some((d, key, depth)) = queue.pop_front() {
        if depth == limits.depth {
            continue;
        }
        for (name, dir) in &moves {
            let Ok(found) = lib.find_matches(name, *dir, &d, &Anchor::new()) else {
                continue;
            };
            for (k, m) in found.iter().enumerate() {
                let Ok(next) = lib.apply(&d, m) else {
                    continue;
                };
                if next.node_count() > node_cap {
                    continue;
                }
                let nk = canonical_form(&next);
                if parent.contains_key(&nk) {
                    continue;
                }
                let anchor = if k == 0 { Anchor::new() } else { Anchor::new().with("match", k) };
                let step = Step::new(*dir, name, anchor);
                parent.insert(nk.clone(), Some((key.clone(), step)));
                if nk == goal {
                    return SearchOutcome::Found(path(&parent, &nk));
                }
                if parent.len() >= limits.max_states {
                    truncated = true;
                    return SearchOutcome::NotFound {
                        explored: parent.len(),
                        truncated,
                    };
                }
                queue.push_back((next, nk, depth + 1));
            }
        }
    }
    SearchOutcome::NotFound {
        explored: parent.len(),
        truncated,
    }
}

fn path(parent: &HashMap<CanonicalForm, Option<(CanonicalForm, Step)>>, end: &CanonicalForm) -> Vec<Step> {
    let mut steps = Vec::new();
    let mut at = end;
    while let Some(Some((prev, step))) = parent.get(at) {
        steps.push(step.clone());
        at = prev;
    }
    steps.reverse();
    steps
}
