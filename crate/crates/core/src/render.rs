//! Text, JSON and Graphviz output for analysis results.

use std::fmt::Write;

use serde::Serialize;

use crate::builder::{AnalysisResult, Mode, UnderspecifiedStructure};
use crate::lattice::RelationLattice;
use crate::model::{Reading, Thread};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Dot,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "dot" => Ok(Format::Dot),
            _ => Err(format!("unknown format `{s}`")),
        }
    }
}

#[derive(Serialize)]
struct JsonRelation<'a> {
    from: &'a str,
    relation: &'a str,
    to: &'a str,
}

#[derive(Serialize)]
struct JsonSite<'a> {
    id: &'a str,
    node: Option<&'a str>,
    anchor: Option<&'a str>,
    anchor_kind: Option<&'a str>,
    thread: String,
    opened_thread: bool,
    tier: u8,
}

#[derive(Serialize)]
struct JsonThread {
    label: String,
    members: Vec<String>,
    open: bool,
    current: bool,
}

#[derive(Serialize)]
struct JsonReading<'a> {
    score: f64,
    tier: u8,
    relations: Vec<JsonRelation<'a>>,
    sites: Vec<JsonSite<'a>>,
    threads: Vec<JsonThread>,
    log: &'a [String],
}

#[derive(Serialize)]
struct JsonUnderspecSite<'a> {
    id: &'a str,
    node: Option<&'a str>,
    relations: Vec<&'a str>,
    anchors: Vec<(&'a str, usize)>,
    new_threads: usize,
}

#[derive(Serialize)]
struct JsonResult<'a> {
    mode: &'a str,
    readings: Vec<JsonReading<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    underspec: Option<Vec<JsonUnderspecSite<'a>>>,
    warnings: &'a [String],
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Best => "best",
        Mode::Enumerate => "enumerate",
        Mode::Underspec => "underspec",
    }
}

/// Threads of a reading in label order, with open/current flags.
fn threads(reading: &Reading) -> Vec<(&Thread, bool, bool)> {
    let center = &reading.center;
    let mut out: Vec<(&Thread, bool, bool)> = center
        .fwd_center
        .iter()
        .enumerate()
        .map(|(i, t)| (t, true, i == center.bkwd_center))
        .chain(center.closed_threads.iter().map(|t| (t, false, false)))
        .collect();
    out.sort_by_key(|(t, _, _)| t.id);
    out
}

fn thread_label(reading: &Reading, index: usize) -> String {
    reading.center.thread_of(index).map(Thread::label).unwrap_or_default()
}

pub fn text(result: &AnalysisResult, lattice: &RelationLattice) -> String {
    let mut out = String::new();
    let total = result.readings.len();
    if let Some(u) = &result.underspec {
        out.push_str(&underspec_text(u, lattice));
        let _ = writeln!(out, "# {total} reading(s) summarised");
        return out;
    }
    for (n, reading) in result.readings.iter().enumerate() {
        if n > 0 {
            out.push('\n');
        }
        let tier = if reading.tier() > 0 { ", tier-1" } else { "" };
        let _ = writeln!(out, "# reading {} of {total}, score {:.3}{tier}", n + 1, reading.score);
        for rel in reading.eventuality_order() {
            let _ = writeln!(out, "{rel}");
        }
        for dcu in reading.dcus.iter().skip(1) {
            if let (Some(node), Some(anchor)) = (dcu.rhet_reln, dcu.anchor) {
                if lattice.temporal_projection(node).map(|c| lattice.core(c)) != Some(node) {
                    let _ = writeln!(out, "rhet {} {} {}", dcu.id(), lattice.name(node), reading.clause(anchor.index).id);
                }
            }
        }
        for (thread, open, current) in threads(reading) {
            let members: Vec<&str> = thread.members.iter().map(|&i| reading.clause(i).id.as_str()).collect();
            let state = if current { "open, current" } else if open { "open" } else { "closed" };
            let _ = writeln!(out, "thread {} ({state}): {}", thread.label(), members.join(" "));
        }
    }
    out
}

pub fn underspec_text(u: &UnderspecifiedStructure, lattice: &RelationLattice) -> String {
    let mut out = String::new();
    for site in &u.sites {
        let node = site.node.map_or("none", |n| lattice.name(n));
        let relations: Vec<&str> = site.relations.iter().map(|&n| lattice.name(n)).collect();
        let anchors: Vec<String> = site.anchors.iter().map(|(id, n)| format!("{id}x{n}")).collect();
        let _ = write!(out, "{} {} {}", site.id, node, anchors.join(","));
        let _ = write!(out, " [{}]", relations.join(", "));
        if site.new_threads > 0 {
            let _ = write!(out, " new-thread x{}", site.new_threads);
        }
        out.push('\n');
    }
    out
}

pub fn json(result: &AnalysisResult, lattice: &RelationLattice) -> String {
    let readings = result
        .readings
        .iter()
        .map(|r| JsonReading {
            score: r.score,
            tier: r.tier(),
            relations: r
                .dcus
                .iter()
                .flat_map(|d| &d.temp_relns)
                .map(|t| JsonRelation { from: &t.from, relation: t.relation.as_str(), to: &t.to })
                .collect(),
            sites: r
                .dcus
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, d)| JsonSite {
                    id: d.id(),
                    node: d.rhet_reln.map(|n| lattice.name(n)),
                    anchor: d.anchor.map(|a| r.clause(a.index).id.as_str()),
                    anchor_kind: d.anchor.map(|a| a.kind.as_str()),
                    thread: thread_label(r, i),
                    opened_thread: d.opened_thread,
                    tier: d.tier,
                })
                .collect(),
            threads: threads(r)
                .into_iter()
                .map(|(t, open, current)| JsonThread {
                    label: t.label(),
                    members: t.members.iter().map(|&i| r.clause(i).id.clone()).collect(),
                    open,
                    current,
                })
                .collect(),
            log: &r.log,
        })
        .collect();
    let underspec = result.underspec.as_ref().map(|u| {
        u.sites
            .iter()
            .map(|s| JsonUnderspecSite {
                id: &s.id,
                node: s.node.map(|n| lattice.name(n)),
                relations: s.relations.iter().map(|&n| lattice.name(n)).collect(),
                anchors: s.anchors.iter().map(|(id, n)| (id.as_str(), *n)).collect(),
                new_threads: s.new_threads,
            })
            .collect()
    });
    let doc = JsonResult { mode: mode_name(result.mode), readings, underspec, warnings: &result.warnings };
    serde_json::to_string_pretty(&doc).expect("result serializes") + "\n"
}

fn dot_id(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// One digraph per reading: eventualities as nodes, relations as labelled
/// edges, threads as clusters.
pub fn dot(result: &AnalysisResult, lattice: &RelationLattice) -> String {
    let mut out = String::new();
    if let (Some(u), Some(first)) = (&result.underspec, result.readings.first()) {
        let _ = writeln!(out, "digraph underspec {{\n  rankdir=RL;");
        for dcu in &first.dcus {
            let _ = writeln!(out, "  {};", dot_id(dcu.id()));
        }
        for site in &u.sites {
            let label = site.node.map_or("none", |n| lattice.name(n));
            let style = if site.anchors.len() > 1 { ", style=dashed" } else { "" };
            for (anchor, _) in &site.anchors {
                let _ = writeln!(out, "  {} -> {} [label={}{style}];", dot_id(&site.id), dot_id(anchor), dot_id(label));
            }
        }
        out.push_str("}\n");
        return out;
    }
    for (n, reading) in result.readings.iter().enumerate() {
        let _ = writeln!(out, "digraph reading_{} {{\n  rankdir=RL;\n  label={};", n + 1, dot_id(&format!("score {:.3}", reading.score)));
        for (thread, open, _) in threads(reading) {
            let _ = writeln!(out, "  subgraph cluster_{} {{", thread.label());
            let state = if open { "" } else { " (closed)" };
            let _ = writeln!(out, "    label={};", dot_id(&format!("{}{state}", thread.label())));
            for &i in &thread.members {
                let _ = writeln!(out, "    {};", dot_id(&reading.clause(i).id));
            }
            out.push_str("  }\n");
        }
        for dcu in reading.dcus.iter().skip(1) {
            if let (Some(node), Some(anchor)) = (dcu.rhet_reln, dcu.anchor) {
                let _ = writeln!(
                    out,
                    "  {} -> {} [label={}];",
                    dot_id(dcu.id()),
                    dot_id(&reading.clause(anchor.index).id),
                    dot_id(lattice.name(node))
                );
            }
        }
        out.push_str("}\n");
    }
    out
}

pub fn render(result: &AnalysisResult, lattice: &RelationLattice, format: Format) -> String {
    match format {
        Format::Text => text(result, lattice),
        Format::Json => json(result, lattice),
        Format::Dot => dot(result, lattice),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{analyze, Config};
    use crate::data;
    use crate::format::parse_discourse;

    fn run(name: &str, mode: Mode) -> AnalysisResult {
        analyze(&parse_discourse(data::example(name).unwrap()).unwrap(), &Config::default(), mode).unwrap()
    }

    #[test]
    fn text_lists_relations_and_threads() {
        let l = data::default_lattice();
        let out = text(&run("j1", Mode::Best), &l);
        assert!(out.lines().any(|line| line == "e2 precede e1"), "{out}");
        assert!(out.lines().any(|line| line == "rhet e2 cause e1"), "{out}");
        assert!(out.contains("thread T1 (open, current): e1 e2"), "{out}");
        let out = text(&run("j2", Mode::Best), &l);
        assert!(out.contains("thread T2 (open, current): e2"), "{out}");
    }

    #[test]
    fn json_is_stable() {
        let l = data::default_lattice();
        let a = json(&run("vvg_a", Mode::Enumerate), &l);
        let b = json(&run("vvg_a", Mode::Enumerate), &l);
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["readings"].as_array().unwrap().len(), 4);
        assert_eq!(v["readings"][0]["relations"][0]["relation"], "precede");
    }

    #[test]
    fn dot_has_clusters() {
        let l = data::default_lattice();
        let out = dot(&run("vvg_b", Mode::Best), &l);
        assert!(out.contains("subgraph cluster_T2"));
        assert!(out.contains("\"e3b\" -> \"e2\" [label=\"just_after\"]"), "{out}");
        let out = dot(&run("jjk", Mode::Underspec), &l);
        assert!(out.contains("\"e2\" -> \"e1\" [label=\"any_rel\"]"), "{out}");
    }

    #[test]
    fn underspec_text_shows_join() {
        let l = data::default_lattice();
        let out = text(&run("jjk", Mode::Underspec), &l);
        assert!(out.starts_with("e2 any_rel e1x2 [just_after, same_event]"), "{out}");
    }
}
