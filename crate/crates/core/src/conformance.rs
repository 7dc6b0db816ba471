//! Replays the feasibility table and the example discourses against the
//! engine.
//!
//! Each table cell is checked by building the smallest discourse that
//! exercises it and looking for the relation among the constrained
//! successors. The expected values come from [`REFERENCE_TABLE`], not from
//! the table file, so an edited file shows up as failing cells.
//!
//! Example files carry their expectations in `#!` comment lines:
//!
//! ```text
//! #! top e2 precede e1; e3 just_after e1
//! #! best-count 2
//! #! enumerate-count 4
//! #! unconstrained-count 17
//! #! node e2 cause
//! #! same-thread e3 e1
//! #! new-thread e2
//! #! present e2 same_event e1
//! #! absent e2 overlap e1
//! #! fails
//! ```

use serde::Serialize;

use crate::builder::{analyze, constrained_step, AnalysisResult, Config, Destination, Mode};
use crate::constraint::{Allowance, Cell, TenseGroup};
use crate::error::{Error, Result};
use crate::format::parse_discourse;
use crate::model::{
    new_discourse, AnchorKind, ClauseAnnotation, CoreRelation, SemanticAspect, SyntacticAspect, Tense,
};
use crate::oracle;

use Allowance::{Marginal, No, Yes};
use AnchorKind::{Tf1, S1};
use CoreRelation::{JustAfter, Overlap, Precede, SameEvent};
use SemanticAspect::{Activity, Event, State};
use TenseGroup::{Past, PastPerfect};

/// Relations a simple past event may bear to the preceding clause.
pub const REFERENCE_TABLE: [(TenseGroup, SemanticAspect, AnchorKind, CoreRelation, Allowance); 32] = [
    (Past, Event, S1, JustAfter, Yes),
    (Past, Event, S1, Precede, Yes),
    (Past, Event, S1, Overlap, No),
    (Past, Event, S1, SameEvent, Yes),
    (Past, Activity, S1, JustAfter, Yes),
    (Past, Activity, S1, Precede, No),
    (Past, Activity, S1, Overlap, No),
    (Past, Activity, S1, SameEvent, No),
    (Past, State, S1, JustAfter, No),
    (Past, State, Tf1, JustAfter, Yes),
    (Past, State, S1, Precede, No),
    (Past, State, Tf1, Precede, Marginal),
    (Past, State, S1, Overlap, Yes),
    (Past, State, Tf1, Overlap, No),
    (Past, State, S1, SameEvent, No),
    (Past, State, Tf1, SameEvent, Yes),
    (PastPerfect, Event, S1, JustAfter, Yes),
    (PastPerfect, Event, S1, Precede, Yes),
    (PastPerfect, Event, S1, Overlap, No),
    (PastPerfect, Event, S1, SameEvent, Yes),
    (PastPerfect, Activity, S1, JustAfter, Yes),
    (PastPerfect, Activity, S1, Precede, No),
    (PastPerfect, Activity, S1, Overlap, No),
    (PastPerfect, Activity, S1, SameEvent, No),
    (PastPerfect, State, S1, JustAfter, No),
    (PastPerfect, State, Tf1, JustAfter, Yes),
    (PastPerfect, State, S1, Precede, No),
    (PastPerfect, State, Tf1, Precede, No),
    (PastPerfect, State, S1, Overlap, Yes),
    (PastPerfect, State, Tf1, Overlap, No),
    (PastPerfect, State, S1, SameEvent, No),
    (PastPerfect, State, Tf1, SameEvent, Yes),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConformanceReport {
    pub cells: Vec<Check>,
    pub examples: Vec<Check>,
}

impl ConformanceReport {
    pub fn failures(&self) -> usize {
        self.cells.iter().chain(&self.examples).filter(|c| !c.passed).count()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in self.cells.iter().chain(&self.examples) {
            let status = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{status} {}", c.name));
            if !c.passed && !c.detail.is_empty() {
                out.push_str(&format!(": {}", c.detail));
            }
            out.push('\n');
        }
        let cells = self.cells.iter().filter(|c| c.passed).count();
        let examples = self.examples.iter().filter(|c| c.passed).count();
        out.push_str(&format!(
            "cells {cells}/{} examples {examples}/{}\n",
            self.cells.len(),
            self.examples.len()
        ));
        out
    }
}

fn row_clause(id: &str, group: TenseGroup, sem: SemanticAspect) -> ClauseAnnotation {
    let aspect = match group {
        Past => SyntacticAspect::Simple,
        PastPerfect => SyntacticAspect::Perfect,
    };
    ClauseAnnotation::new(id, Tense::Past, aspect, sem)
}

/// Whether the engine offers `e2 relation <anchor>` for this cell.
fn engine_emits(cell: Cell, cfg: &Config) -> bool {
    let s1 = row_clause("e1", cell.group, cell.sem);
    let s2 = ClauseAnnotation::new("e2", Tense::Past, SyntacticAspect::Simple, Event);
    let lattice = cfg.lattice();
    let (state, target) = match cell.anchor {
        S1 => (new_discourse(s1, &cfg.data.cues).expect("synthesized clause"), 0),
        Tf1 => {
            // a focus event, then the stative clause on the same thread
            let focus = ClauseAnnotation::new("e0", Tense::Past, SyntacticAspect::Simple, Event);
            let s0 = new_discourse(focus, &cfg.data.cues).expect("synthesized clause");
            let step = constrained_step(&s0, &s1, cfg);
            let Some(joined) = step.successors.into_iter().find(|s| s.destination == Destination::Thread(0)) else {
                return false;
            };
            (joined.state, 0)
        }
    };
    constrained_step(&state, &s2, cfg).successors.iter().any(|s| {
        let dcu = s.state.dcus.last().expect("successor has the new clause");
        dcu.anchor.is_some_and(|a| a.index == target && a.kind == cell.anchor)
            && dcu.rhet_reln.and_then(|n| lattice.temporal_projection(n)) == Some(cell.relation)
    })
}

/// One check per cell, with and without marginal cells admitted.
pub fn check_table(cfg: &Config) -> Vec<Check> {
    REFERENCE_TABLE
        .iter()
        .map(|&(group, sem, anchor, relation, expected)| {
            let cell = Cell { group, sem, anchor, relation };
            let mut problems = Vec::new();
            for allow_marginal in [false, true] {
                let probe = Config { allow_marginal, tier_prune: false, ..cfg.clone() };
                let want = expected.admits(allow_marginal);
                let got = engine_emits(cell, &probe);
                if want != got {
                    let flag = if allow_marginal { " with marginal cells" } else { "" };
                    problems.push(format!("expected {}, engine {}{flag}", emitted(want), emitted(got)));
                }
            }
            Check::new(format!("cell {cell} allow={}", expected.as_str()), problems.is_empty(), problems.join("; "))
        })
        .collect()
}

fn emitted(yes: bool) -> &'static str {
    if yes {
        "emitted"
    } else {
        "not emitted"
    }
}

struct Runs<'a> {
    discourse: &'a [ClauseAnnotation],
    cfg: &'a Config,
    best: Option<Result<AnalysisResult>>,
    enumerate: Option<Result<AnalysisResult>>,
}

impl<'a> Runs<'a> {
    fn best(&mut self) -> &Result<AnalysisResult> {
        let (d, cfg) = (self.discourse, self.cfg);
        self.best.get_or_insert_with(|| analyze(d, cfg, Mode::Best))
    }

    fn enumerate(&mut self) -> &Result<AnalysisResult> {
        let (d, cfg) = (self.discourse, self.cfg);
        self.enumerate.get_or_insert_with(|| analyze(d, cfg, Mode::Enumerate))
    }
}

fn relations_of(result: &AnalysisResult) -> Vec<Vec<String>> {
    result.readings.iter().map(|r| r.eventuality_order().iter().map(ToString::to_string).collect()).collect()
}

fn check_directive(directive: &str, runs: &mut Runs<'_>) -> std::result::Result<(), String> {
    let (verb, rest) = directive.split_once(' ').unwrap_or((directive, ""));
    let rest = rest.trim();
    let count = |s: &str| s.parse::<usize>().map_err(|_| format!("bad count `{s}`"));
    let failed = |e: &Error| format!("analysis failed: {e}");
    match verb {
        "fails" => match runs.best() {
            Err(Error::ParseFailure { .. }) => Ok(()),
            Err(e) => Err(format!("failed for another reason: {e}")),
            Ok(_) => Err("analysis succeeded".into()),
        },
        "top" => {
            let want: Vec<String> = rest.split(';').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
            let res = runs.best().as_ref().map_err(failed)?;
            let got = relations_of(res).into_iter().next().unwrap_or_default();
            if got == want {
                Ok(())
            } else {
                Err(format!("top reading is `{}`", got.join("; ")))
            }
        }
        "best-count" | "enumerate-count" => {
            let want = count(rest)?;
            let res = if verb == "best-count" { runs.best() } else { runs.enumerate() };
            let got = res.as_ref().map_err(failed)?.readings.len();
            if got == want {
                Ok(())
            } else {
                Err(format!("{got} readings"))
            }
        }
        "unconstrained-count" => {
            let want = count(rest)?;
            let got = oracle::enumerate_unconstrained(runs.discourse).len();
            if got == want {
                Ok(())
            } else {
                Err(format!("{got} readings"))
            }
        }
        "node" => {
            let (id, node) = rest.split_once(' ').ok_or("expected `node <id> <node>`")?;
            let lattice = runs.cfg.lattice();
            let res = runs.best().as_ref().map_err(failed)?;
            let top = res.top().ok_or("no reading")?;
            let dcu = top.dcus.iter().find(|d| d.id() == id).ok_or_else(|| format!("no clause `{id}`"))?;
            let got = dcu.rhet_reln.map_or("none", |n| lattice.name(n));
            if got == node.trim() {
                Ok(())
            } else {
                Err(format!("node is {got}"))
            }
        }
        "same-thread" => {
            let (a, b) = rest.split_once(' ').ok_or("expected `same-thread <id> <id>`")?;
            let res = runs.best().as_ref().map_err(failed)?;
            let top = res.top().ok_or("no reading")?;
            let label = |id: &str| {
                top.index_of(id.trim()).and_then(|i| top.center.thread_of(i)).map(|t| t.label()).ok_or(format!("no clause `{id}`"))
            };
            let (ta, tb) = (label(a)?, label(b)?);
            if ta == tb {
                Ok(())
            } else {
                Err(format!("{a} in {ta}, {b} in {tb}"))
            }
        }
        "new-thread" => {
            let res = runs.best().as_ref().map_err(failed)?;
            let top = res.top().ok_or("no reading")?;
            let dcu = top.dcus.iter().find(|d| d.id() == rest).ok_or_else(|| format!("no clause `{rest}`"))?;
            if dcu.opened_thread {
                Ok(())
            } else {
                Err(format!("{rest} continues a thread"))
            }
        }
        "present" | "absent" => {
            let res = runs.enumerate().as_ref().map_err(failed)?;
            let found = relations_of(res).iter().flatten().any(|r| r == rest);
            match (verb, found) {
                ("present", true) | ("absent", false) => Ok(()),
                ("present", false) => Err(format!("no reading has `{rest}`")),
                _ => Err(format!("some reading has `{rest}`")),
            }
        }
        _ => Err(format!("unknown directive `{verb}`")),
    }
}

/// Runs the `#!` directives of each example.
pub fn check_examples(examples: &[(String, String)], cfg: &Config) -> Vec<Check> {
    let mut checks = Vec::new();
    for (name, text) in examples {
        let stem = name.strip_suffix(".disc").unwrap_or(name);
        let directives: Vec<&str> = text.lines().filter_map(|l| l.trim().strip_prefix("#!")).map(str::trim).collect();
        let discourse = match parse_discourse(text) {
            Ok(d) => d,
            Err(e) => {
                checks.push(Check::new(format!("{stem}: parse"), false, e.to_string()));
                continue;
            }
        };
        if directives.is_empty() {
            checks.push(Check::new(format!("{stem}: directives"), false, "no `#!` expectations"));
            continue;
        }
        let mut runs = Runs { discourse: &discourse, cfg, best: None, enumerate: None };
        for directive in directives {
            let outcome = check_directive(directive, &mut runs);
            let detail = outcome.as_ref().err().cloned().unwrap_or_default();
            checks.push(Check::new(format!("{stem}: {directive}"), outcome.is_ok(), detail));
        }
    }
    checks
}

pub fn run(cfg: &Config, examples: &[(String, String)]) -> ConformanceReport {
    ConformanceReport { cells: check_table(cfg), examples: check_examples(examples, cfg) }
}
