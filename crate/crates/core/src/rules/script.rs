//! Derivation scripts: one rewrite step per line.
//!
//! ```text
//! # comment
//! apply spider-fusion at node=3+4
//! unapply dual-def at variant=1, match=2
//! apply colour-change at node=7, colour=blue
//! ```
//!
//! Without `match=k` the first match in deterministic order is used.

use std::fmt;

use thiserror::Error;

use super::{Anchor, Direction, Library, RuleError};
use crate::diagram::{iso_equal, Diagram};
use crate::interp::{diagrams_equal, DEFAULT_TOL};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub direction: Direction,
    pub rule: String,
    pub anchor: Anchor,
    /// 1-based source line, 0 when built in code.
    pub line: usize,
}

impl Step {
    pub fn new(direction: Direction, rule: &str, anchor: Anchor) -> Step {
        Step {
            direction,
            rule: rule.to_string(),
            anchor,
            line: 0,
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.direction.verb(), self.rule)?;
        if !self.anchor.is_empty() {
            write!(f, " at {}", self.anchor)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct DerivationScript {
    pub steps: Vec<Step>,
    pub start: Diagram,
    pub target: Option<Diagram>,
}

impl DerivationScript {
    pub fn new(start: Diagram, steps: Vec<Step>) -> DerivationScript {
        DerivationScript {
            steps,
            start,
            target: None,
        }
    }

    pub fn with_target(mut self, target: Diagram) -> DerivationScript {
        self.target = Some(target);
        self
    }

    /// Script text that parses back to the same steps.
    pub fn render_steps(&self) -> String {
        self.steps.iter().map(|s| format!("{s}\n")).collect()
    }
}

#[derive(Debug, Error)]
pub enum ScriptErrorKind {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error("only {found} matches, wanted match={wanted}")]
    MatchIndex { found: usize, wanted: usize },
    #[error("semantics changed")]
    Semantics,
    #[error("final diagram is not isomorphic to the target")]
    Target,
    #[error("start diagram is invalid: {0}")]
    Start(crate::diagram::Violation),
}

/// A failed step (1-based index; 0 for the start, steps + 1 for the target).
#[derive(Debug, Error)]
#[error("step {step}: {kind}")]
pub struct ScriptError {
    pub step: usize,
    pub kind: ScriptErrorKind,
}

#[derive(Clone, Debug)]
pub struct StepLog {
    pub step: Step,
    pub matches: usize,
    pub nodes: usize,
    /// `Some(true)` when checked and equal.
    pub verified: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct ScriptRun {
    pub result: Diagram,
    pub log: Vec<StepLog>,
    pub reached_target: Option<bool>,
}

/// Parses script text. `key=value` pairs are comma separated; a bare key is
/// a flag.
pub fn parse_script(text: &str) -> Result<Vec<Step>, ScriptError> {
    let mut steps = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let bad = |msg: String| ScriptError {
            step: steps.len() + 1,
            kind: ScriptErrorKind::Syntax { line, msg },
        };
        let (head, params) = match body.split_once(" at ") {
            Some((h, p)) => (h.trim(), Some(p.trim())),
            None => (body, None),
        };
        let mut words = head.split_whitespace();
        let direction = match words.next() {
            Some("apply") => Direction::Forward,
            Some("unapply") => Direction::Backward,
            Some(w) => return Err(bad(format!("expected 'apply' or 'unapply', got '{w}'"))),
            None => return Err(bad("empty step".into())),
        };
        let rule = words.next().ok_or_else(|| bad("missing rule name".into()))?;
        if let Some(extra) = words.next() {
            return Err(bad(format!("unexpected '{extra}'")));
        }
        let mut anchor = Anchor::new();
        for part in params.into_iter().flat_map(|p| p.split(',')) {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            anchor = match part.split_once('=') {
                Some((k, v)) if !k.trim().is_empty() => anchor.with(k.trim(), v.trim()),
                Some(_) => return Err(bad(format!("bad parameter '{part}'"))),
                None => anchor.with(part, ""),
            };
        }
        steps.push(Step {
            direction,
            rule: rule.to_string(),
            anchor,
            line,
        });
    }
    Ok(steps)
}

/// Applies one step to `d`, returning the result and the number of matches.
pub fn apply_step(lib: &Library, d: &Diagram, step: &Step) -> Result<(Diagram, usize), ScriptErrorKind> {
    let matches = lib.find_matches(&step.rule, step.direction, d, &step.anchor)?;
    let wanted = step.anchor.usize("match")?.unwrap_or(0);
    let Some(m) = matches.get(wanted) else {
        if matches.is_empty() {
            return Err(RuleError::NoMatch {
                rule: step.rule.clone(),
                reason: if step.anchor.is_empty() {
                    "no site".into()
                } else {
                    format!("no site at {}", step.anchor)
                },
            }
            .into());
        }
        return Err(ScriptErrorKind::MatchIndex {
            found: matches.len(),
            wanted,
        });
    };
    Ok((lib.apply(d, m)?, matches.len()))
}

/// Replays a script. With `verify`, every step is checked to preserve the
/// interpretation up to a nonzero scalar.
pub fn run_script(lib: &Library, script: &DerivationScript, verify: bool) -> Result<ScriptRun, ScriptError> {
    script.start.validate().map_err(|v| ScriptError {
        step: 0,
        kind: ScriptErrorKind::Start(v),
    })?;
    let mut d = script.start.clone();
    let mut log = Vec::new();
    for (k, step) in script.steps.iter().enumerate() {
        let at = |kind| ScriptError { step: k + 1, kind };
        let (next, matches) = apply_step(lib, &d, step).map_err(at)?;
        let verified = if verify {
            let ok = diagrams_equal(&d, &next, DEFAULT_TOL)
                .map_err(|e| at(ScriptErrorKind::Rule(RuleError::Interp(e))))?;
            if !ok {
                return Err(at(ScriptErrorKind::Semantics));
            }
            Some(true)
        } else {
            None
        };
        log.push(StepLog {
            step: step.clone(),
            matches,
            nodes: next.node_count(),
            verified,
        });
        d = next;
    }
    let reached_target = script.target.as_ref().map(|t| iso_equal(&d, t));
    if reached_target == Some(false) {
        return Err(ScriptError {
            step: script.steps.len() + 1,
            kind: ScriptErrorKind::Target,
        });
    }
    Ok(ScriptRun {
        result: d,
        log,
        reached_target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_steps_and_params() {
        let s = parse_script("# header\napply spider-fusion\n\nunapply dual-def at variant=1, match=2 # tail\napply x at flip").unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s[1].direction, Direction::Backward);
        assert_eq!(s[1].anchor.get("variant"), Some("1"));
        assert_eq!(s[1].line, 4);
        assert!(s[2].anchor.has("flip"));
        assert_eq!(s[1].to_string(), "unapply dual-def at match=2, variant=1");
    }

    #[test]
    fn rejects_bad_lines() {
        let e = parse_script("apply a\nfrobnicate b").unwrap_err();
        assert_eq!(e.step, 2);
        assert!(parse_script("apply").is_err());
        assert!(parse_script("apply a b").is_err());
    }
}
