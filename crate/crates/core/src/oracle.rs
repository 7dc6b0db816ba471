//! Brute-force reference for the builder.
//!
//! Readings are plain site lists. Every candidate site is generated and
//! tested against predicates written directly from the attachment rules,
//! replaying the thread stack as it goes. Nothing here calls into the
//! builder's option generation, so agreement between the two is evidence
//! rather than tautology.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::builder::{default_relation, Config};
use crate::constraint::{Cell, TenseGroup};
use crate::model::{AnchorKind, ClauseAnnotation, CoreRelation, Reading, SemanticAspect, SyntacticAspect, Tense, TxAnchor};

/// How one non-initial clause is attached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Site {
    /// Related to an earlier clause; `new_thread` when the clause opens a thread.
    Attach { anchor: usize, relation: CoreRelation, new_thread: bool },
    /// Opens a thread with no relation to anything before it.
    NewThread,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OracleReading {
    /// One site per clause after the first.
    pub sites: Vec<Site>,
}

impl OracleReading {
    pub fn from_reading(reading: &Reading, lattice: &crate::lattice::RelationLattice) -> Self {
        let sites = reading
            .dcus
            .iter()
            .skip(1)
            .map(|d| match (d.anchor, d.rhet_reln.and_then(|n| lattice.temporal_projection(n))) {
                (Some(a), Some(relation)) => Site::Attach { anchor: a.index, relation, new_thread: d.opened_thread },
                _ => Site::NewThread,
            })
            .collect();
        OracleReading { sites }
    }

    pub fn describe(&self, discourse: &[ClauseAnnotation]) -> String {
        let parts: Vec<String> = self
            .sites
            .iter()
            .zip(&discourse[1..])
            .map(|(site, clause)| match site {
                Site::Attach { anchor, relation, new_thread } => {
                    let new = if *new_thread { " (new thread)" } else { "" };
                    format!("{} {} {}{}", clause.id, relation, discourse[*anchor].id, new)
                }
                Site::NewThread => format!("{} (new thread)", clause.id),
            })
            .collect();
        parts.join("; ")
    }
}

fn complex(c: &ClauseAnnotation) -> bool {
    matches!(c.syn_aspect, SyntacticAspect::Perfect | SyntacticAspect::PerfectProgressive)
}

fn past_perfect(c: &ClauseAnnotation) -> bool {
    c.tense == Tense::Past && complex(c)
}

#[derive(Debug, Clone)]
struct Strand {
    members: Vec<usize>,
    focus: Option<usize>,
}

impl Strand {
    fn new(index: usize, clause: &ClauseAnnotation) -> Self {
        let focus = (clause.sem_aspect != SemanticAspect::State).then_some(index);
        Strand { members: vec![index], focus }
    }

    fn last(&self) -> usize {
        self.members[self.members.len() - 1]
    }
}

/// Thread stack as rebuilt from a site list.
#[derive(Debug, Clone)]
struct Replay {
    open: Vec<Strand>,
    current: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Dest {
    Open(usize),
    Fresh,
}

impl Replay {
    fn start(first: &ClauseAnnotation) -> Self {
        Replay { open: vec![Strand::new(0, first)], current: 0 }
    }

    fn strand_of(&self, index: usize) -> Option<usize> {
        self.open.iter().position(|s| s.members.contains(&index))
    }

    fn dest(&self, site: Site) -> Dest {
        match site {
            Site::Attach { anchor, new_thread: false, .. } => Dest::Open(self.strand_of(anchor).expect("checked anchor")),
            _ => Dest::Fresh,
        }
    }

    fn apply(&mut self, index: usize, clause: &ClauseAnnotation, site: Site) {
        match self.dest(site) {
            Dest::Open(k) => {
                self.open.truncate(k + 1);
                self.open[k].members.push(index);
                if clause.sem_aspect != SemanticAspect::State {
                    self.open[k].focus = Some(index);
                }
                self.current = k;
            }
            Dest::Fresh => {
                self.open.push(Strand::new(index, clause));
                self.current = self.open.len() - 1;
            }
        }
    }
}

/// Whether the rules license `s2 relation s1-or-focus` for this anchor kind.
fn licensed(s1: &ClauseAnnotation, s2: &ClauseAnnotation, kind: AnchorKind, relation: CoreRelation, cfg: &Config) -> bool {
    use SemanticAspect::{Activity, Event, State};
    let s2_simple_past_event = s2.tense == Tense::Past && s2.syn_aspect == SyntacticAspect::Simple && s2.sem_aspect == Event;
    if s2_simple_past_event && s1.tense == Tense::Past {
        let group = if complex(s1) { TenseGroup::PastPerfect } else { TenseGroup::Past };
        let cell = Cell { group, sem: s1.sem_aspect, anchor: kind, relation };
        return cfg.data.table.get(cell).admits(cfg.allow_marginal);
    }
    if past_perfect(s2) && s2.sem_aspect != State && !complex(s1) && relation != CoreRelation::Precede {
        return false;
    }
    let (a, b) = (s1.sem_aspect, s2.sem_aspect);
    let after = (b == Event && !complex(s2))
        || (complex(s1) && complex(s2) && b == Event)
        || (a == Event && (b == Activity || (b == State && !complex(s2))))
        || (a == State && b == Activity && !complex(s2));
    match (kind, relation) {
        (AnchorKind::S1, CoreRelation::JustAfter) => a != State && after,
        (AnchorKind::Tf1, CoreRelation::JustAfter) => a == State && after,
        (AnchorKind::S1, CoreRelation::Precede) => b == Event || (a != Activity && b == State && past_perfect(s2)),
        (AnchorKind::S1, CoreRelation::Overlap) => a == State || b == State,
        (AnchorKind::S1, CoreRelation::SameEvent) => {
            a == Event || (a == Activity && b != Event) || (a == State && b == State && (!complex(s2) || complex(s1)))
        }
        _ => false,
    }
}

fn anchor_kind(strand: &Strand, anchor: usize, d: &[ClauseAnnotation]) -> Option<AnchorKind> {
    let last = strand.last();
    if anchor == last {
        Some(AnchorKind::S1)
    } else if d[last].sem_aspect == SemanticAspect::State && strand.focus == Some(anchor) {
        Some(AnchorKind::Tf1)
    } else {
        None
    }
}

/// Licensed (anchor kind, relation) pairs on one open thread, ignoring markers.
fn licensed_on(strand: &Strand, d: &[ClauseAnnotation], i: usize, cfg: &Config) -> Vec<(AnchorKind, CoreRelation)> {
    let s1 = &d[strand.last()];
    let mut out = Vec::new();
    let tf1 = d[strand.last()].sem_aspect == SemanticAspect::State && strand.focus.is_some();
    for &relation in CoreRelation::ALL {
        if licensed(s1, &d[i], AnchorKind::S1, relation, cfg) {
            out.push((AnchorKind::S1, relation));
        }
        if tf1 && licensed(s1, &d[i], AnchorKind::Tf1, relation, cfg) {
            out.push((AnchorKind::Tf1, relation));
        }
    }
    out
}

fn site_allowed(d: &[ClauseAnnotation], i: usize, replay: &Replay, site: Site, cfg: &Config) -> bool {
    let s2 = &d[i];
    let lattice = cfg.lattice();
    let cue = s2.cue.as_deref().and_then(|t| cfg.data.cues.get(t));
    let cue_ok = |r: CoreRelation| cue.is_none_or(|c| lattice.meet(lattice.core(r), c).is_ok());
    let pinned = s2.temp_expr.is_some() || cue.is_some_and(|c| !lattice.is_top(c));
    let pp = past_perfect(s2);

    let Site::Attach { anchor, relation, new_thread } = site else {
        return !pp && !pinned && replay.open.iter().all(|s| licensed_on(s, d, i, cfg).is_empty());
    };
    let Some(k) = replay.strand_of(anchor) else {
        return false;
    };
    let strand = &replay.open[k];
    let flashback = relation == CoreRelation::Precede && pp && !complex(&d[anchor]);
    let on_current = pp && k == replay.current;

    if let Some(tx) = &s2.temp_expr {
        let target = match &tx.anchor {
            None => Some(strand.last()),
            Some(TxAnchor::TemporalFocus) => strand.focus,
            Some(TxAnchor::Id(id)) => d[..i].iter().position(|c| c.id == *id),
        };
        if relation != tx.relation || target != Some(anchor) || !cue_ok(relation) {
            return false;
        }
        return if flashback { new_thread } else { !new_thread || on_current };
    }

    let opener = on_current && new_thread && anchor == strand.last() && relation == CoreRelation::Precede && cue_ok(relation);
    let continued = anchor_kind(strand, anchor, d).is_some_and(|kind| {
        let licensed_here = licensed_on(strand, d, i, cfg);
        let tier_ok = !cfg.tier_prune || pinned || pp || {
            let floor = licensed_here.iter().map(|(_, r)| cfg.weights.tier_of(*r)).min();
            floor == Some(cfg.weights.tier_of(relation))
        };
        licensed_here.contains(&(kind, relation)) && cue_ok(relation) && new_thread == flashback && tier_ok
    });
    opener || continued
}

fn candidate_sites(i: usize) -> impl Iterator<Item = Site> {
    let attach = (0..i).flat_map(|anchor| {
        CoreRelation::ALL.iter().flat_map(move |&relation| {
            [false, true].into_iter().map(move |new_thread| Site::Attach { anchor, relation, new_thread })
        })
    });
    std::iter::once(Site::NewThread).chain(attach)
}

/// The counting convention: each later clause takes one of the four core
/// relations to the clause before it, plus one reading where the final
/// clause opens a thread (for three or more clauses).
pub fn enumerate_unconstrained(d: &[ClauseAnnotation]) -> BTreeSet<OracleReading> {
    let mut out = BTreeSet::new();
    if d.is_empty() {
        return out;
    }
    let mut partial = vec![Vec::new()];
    for i in 1..d.len() {
        partial = partial
            .into_iter()
            .flat_map(|sites: Vec<Site>| {
                CoreRelation::ALL.iter().map(move |&relation| {
                    let mut s = sites.clone();
                    s.push(Site::Attach { anchor: i - 1, relation, new_thread: false });
                    s
                })
            })
            .collect();
    }
    out.extend(partial.into_iter().map(|sites| OracleReading { sites }));
    if d.len() >= 3 {
        let mut sites: Vec<Site> = (1..d.len() - 1)
            .map(|i| Site::Attach { anchor: i - 1, relation: default_relation(&d[i]), new_thread: false })
            .collect();
        sites.push(Site::NewThread);
        out.insert(OracleReading { sites });
    }
    out
}

/// Every syntactically possible site list: any earlier anchor, any core
/// relation, continuing or opening a thread, or unattached.
pub fn enumerate_candidates(d: &[ClauseAnnotation]) -> Vec<OracleReading> {
    let mut partial = vec![OracleReading::default()];
    for i in 1..d.len() {
        partial = partial
            .into_iter()
            .flat_map(|r| {
                candidate_sites(i).map(move |site| {
                    let mut r = r.clone();
                    r.sites.push(site);
                    r
                })
            })
            .collect();
    }
    if d.is_empty() {
        partial.clear();
    }
    partial
}

/// Whether every site of `reading` passes the rules.
pub fn accepts(d: &[ClauseAnnotation], reading: &OracleReading, cfg: &Config) -> bool {
    let Some(first) = d.first() else {
        return false;
    };
    if reading.sites.len() + 1 != d.len() {
        return false;
    }
    let mut replay = Replay::start(first);
    for (offset, &site) in reading.sites.iter().enumerate() {
        let i = offset + 1;
        if !site_allowed(d, i, &replay, site, cfg) {
            return false;
        }
        replay.apply(i, &d[i], site);
    }
    true
}

pub fn filter_constrained<'a, I>(readings: I, d: &[ClauseAnnotation], cfg: &Config) -> BTreeSet<OracleReading>
where
    I: IntoIterator<Item = &'a OracleReading>,
{
    readings.into_iter().filter(|r| accepts(d, r, cfg)).cloned().collect()
}

/// Same set as filtering [`enumerate_candidates`], with dead prefixes cut early.
pub fn constrained_readings(d: &[ClauseAnnotation], cfg: &Config) -> BTreeSet<OracleReading> {
    fn walk(d: &[ClauseAnnotation], cfg: &Config, i: usize, replay: &Replay, sites: &mut Vec<Site>, out: &mut BTreeSet<OracleReading>) {
        if i == d.len() {
            out.insert(OracleReading { sites: sites.clone() });
            return;
        }
        for site in candidate_sites(i) {
            if site_allowed(d, i, replay, site, cfg) {
                let mut next = replay.clone();
                next.apply(i, &d[i], site);
                sites.push(site);
                walk(d, cfg, i + 1, &next, sites, out);
                sites.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    if let Some(first) = d.first() {
        walk(d, cfg, 1, &Replay::start(first), &mut Vec::new(), &mut out);
    }
    out
}

fn rating(d: &[ClauseAnnotation], i: usize, replay: &Replay, dest: Dest, cfg: &Config) -> f64 {
    let w = &cfg.weights;
    let Dest::Open(k) = dest else {
        return w.w_tense + w.w_cur + w.w_new;
    };
    let strand = &replay.open[k];
    let last = &d[strand.last()];
    let s2 = &d[i];
    let parallel = last.tense == s2.tense && last.syn_aspect == s2.syn_aspect;
    let mut close = 0.0f64;
    for m in &strand.members {
        for a in &d[*m].words {
            for b in &s2.words {
                close = close.max(cfg.data.lexicon.closeness(a, b));
            }
        }
    }
    let current = k == replay.current;
    w.w_tense * f64::from(u8::from(parallel)) + w.w_sem * close + w.w_cur * f64::from(u8::from(current))
}

const TIE: f64 = 1e-9;

/// Readings kept when centering chooses among destinations at every step
/// and the best cumulative rating wins.
pub fn preferred_readings(d: &[ClauseAnnotation], cfg: &Config) -> BTreeSet<OracleReading> {
    let Some(first) = d.first() else {
        return BTreeSet::new();
    };
    let mut beam = vec![(Vec::<Site>::new(), Replay::start(first), 0.0f64)];
    for i in 1..d.len() {
        let mut next = Vec::new();
        for (sites, replay, score) in &beam {
            let allowed: Vec<Site> = candidate_sites(i).filter(|s| site_allowed(d, i, replay, *s, cfg)).collect();
            let mut rated: Vec<(Dest, f64)> = Vec::new();
            for s in &allowed {
                let dest = replay.dest(*s);
                if !rated.iter().any(|(x, _)| *x == dest) {
                    rated.push((dest, rating(d, i, replay, dest, cfg)));
                }
            }
            let max = rated.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
            let current = Dest::Open(replay.current);
            let keep_current = rated.iter().any(|(x, r)| *x == current && max - r <= TIE);
            for s in allowed {
                let dest = replay.dest(s);
                let r = rated.iter().find(|(x, _)| *x == dest).map(|x| x.1).unwrap_or_default();
                let chosen = if keep_current { dest == current } else { max - r <= TIE };
                if chosen {
                    let mut replay = replay.clone();
                    replay.apply(i, &d[i], s);
                    let mut sites = sites.clone();
                    sites.push(s);
                    next.push((sites, replay, score + r));
                }
            }
        }
        beam = next;
    }
    let best = beam.iter().map(|b| b.2).fold(f64::NEG_INFINITY, f64::max);
    beam.into_iter().filter(|b| best - b.2 <= TIE).map(|(sites, _, _)| OracleReading { sites }).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportLine {
    pub reading: String,
    /// Present only because lower relation tiers were kept.
    pub tier1: bool,
}

/// Reading counts at each stage for one discourse.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub unconstrained: usize,
    pub constrained: usize,
    pub preferred: usize,
    pub tier_prune: bool,
    /// Constrained readings that tier pruning would drop.
    pub tier1: usize,
    pub readings: Vec<ReportLine>,
}

pub fn report(d: &[ClauseAnnotation], cfg: &Config) -> OracleReport {
    let constrained = constrained_readings(d, cfg);
    let pruned = if cfg.tier_prune {
        constrained.clone()
    } else {
        constrained_readings(d, &Config { tier_prune: true, ..cfg.clone() })
    };
    let readings: Vec<ReportLine> = constrained
        .iter()
        .map(|r| ReportLine { reading: r.describe(d), tier1: !pruned.contains(r) })
        .collect();
    OracleReport {
        unconstrained: enumerate_unconstrained(d).len(),
        constrained: constrained.len(),
        preferred: preferred_readings(d, cfg).len(),
        tier_prune: cfg.tier_prune,
        tier1: readings.iter().filter(|l| l.tier1).count(),
        readings,
    }
}
