//! Builds readings clause by clause.
//!
//! Each step first constrains: for every open thread it computes the
//! feasible attachments, applies explicit markers and prunes relation
//! tiers. A past perfect clause may also open a new thread. Then, in
//! `best` mode, temporal centering keeps only the preferred destinations.

use std::collections::{BTreeMap, BTreeSet};

use crate::centering::{push_thread, rate_new_thread, rate_thread, select_best, PreferenceWeights};
use crate::constraint::{apply_explicit, feasible_general, AnchorContext, AttachmentOption, CueMarker, OptionSource};
use crate::data::DataSet;
use crate::error::{Error, Result};
use crate::lattice::{RelationLattice, RelationNode};
use crate::model::{
    new_discourse, validate_discourse, Anchor, AnchorKind, AnalysisState, ClauseAnnotation, CoreRelation, Dcu, Reading,
    TempRelation, Thread, TxAnchor,
};

#[derive(Debug, Clone)]
pub struct Config {
    pub data: DataSet,
    pub weights: PreferenceWeights,
    /// Admit table cells marked marginal.
    pub allow_marginal: bool,
    /// Drop lower relation tiers when a higher one is available.
    pub tier_prune: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config { data: DataSet::default(), weights: PreferenceWeights::default(), allow_marginal: false, tier_prune: true }
    }
}

impl Config {
    pub fn lattice(&self) -> &RelationLattice {
        &self.data.lattice
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Highest-scoring readings only.
    Best,
    /// Every reading that survives the constraints.
    Enumerate,
    /// One lattice node per attachment site.
    Underspec,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "best" => Ok(Mode::Best),
            "enumerate" => Ok(Mode::Enumerate),
            "underspec" => Ok(Mode::Underspec),
            _ => Err(format!("unknown mode `{s}`")),
        }
    }
}

/// Where a successor puts the new clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Destination {
    Thread(usize),
    NewThread,
}

#[derive(Debug, Clone)]
pub struct Successor {
    pub state: AnalysisState,
    pub destination: Destination,
    pub rating: f64,
}

/// Result of one attachment step from one state.
#[derive(Debug, Clone, Default)]
pub struct Step {
    pub successors: Vec<Successor>,
    pub clashes: Vec<String>,
}

fn thread_context<'a>(state: &'a AnalysisState, thread: &Thread) -> AnchorContext<'a> {
    let s1_index = thread.last_member();
    AnchorContext { s1_index, s1: state.clause(s1_index), tempfoc: thread.tempfoc.map(|f| (f, state.clause(f))) }
}

/// The option a temporal expression dictates on one thread, if the thread
/// holds its anchor.
fn directed_option(state: &AnalysisState, thread: &Thread, s2: &ClauseAnnotation, lattice: &RelationLattice) -> Option<AttachmentOption> {
    let tx = s2.temp_expr.as_ref()?;
    let last = thread.last_member();
    let anchor = match &tx.anchor {
        None => Anchor { index: last, kind: AnchorKind::S1 },
        Some(TxAnchor::TemporalFocus) => {
            let focus = thread.tempfoc?;
            let kind = if focus == last { AnchorKind::S1 } else { AnchorKind::Tf1 };
            Anchor { index: focus, kind }
        }
        Some(TxAnchor::Id(id)) => {
            let index = state.index_of(id).filter(|i| thread.members.contains(i))?;
            Anchor { index, kind: AnchorKind::S1 }
        }
    };
    Some(AttachmentOption { anchor, relation: lattice.core(tx.relation), source: OptionSource::TempExpr })
}

/// Relation the narrative default picks: overlap for states, just-after otherwise.
pub fn default_relation(s2: &ClauseAnnotation) -> CoreRelation {
    if s2.is_state() {
        CoreRelation::Overlap
    } else {
        CoreRelation::JustAfter
    }
}

struct Pending {
    option: Option<AttachmentOption>,
    destination: Destination,
    tier: u8,
    note: String,
}

/// All successors of `state` that survive the constraints, with the rating
/// of the thread each one lands in.
pub fn constrained_step(state: &AnalysisState, s2: &ClauseAnnotation, cfg: &Config) -> Step {
    let lattice = cfg.lattice();
    let center = &state.center;
    let cue = s2
        .cue
        .as_deref()
        .and_then(|token| cfg.data.cues.get(token).map(|node| CueMarker { token, node }));
    let tx_label = s2.temp_expr.as_ref().map(|t| t.to_string());
    let pinned = s2.temp_expr.is_some() || cue.is_some_and(|c| !lattice.is_top(c.node));
    let tier_of = |o: &AttachmentOption| -> u8 {
        if pinned || s2.is_past_perfect() {
            return 0;
        }
        lattice.temporal_projection(o.relation).map_or(0, |r| cfg.weights.tier_of(r))
    };

    let mut step = Step::default();
    let mut pending = Vec::new();
    let mut feasible_any = false;

    for (slot, thread) in center.fwd_center.iter().enumerate() {
        let ctx = thread_context(state, thread);
        let base = feasible_general(&ctx, s2, &cfg.data.table, lattice, cfg.allow_marginal);
        feasible_any |= !base.is_empty();
        let directed = directed_option(state, thread, s2, lattice);
        if let (Some(label), None) = (&tx_label, directed) {
            step.clashes.push(format!("temprel={label} has no anchor on thread {}", thread.label()));
            continue;
        }
        let options = match apply_explicit(base, cue, directed.zip(tx_label.as_deref()), lattice) {
            Ok(options) => options,
            Err(clash) => {
                step.clashes.push(clash.description);
                continue;
            }
        };
        let floor = if cfg.tier_prune { options.iter().map(tier_of).min().unwrap_or(0) } else { u8::MAX };
        for option in options {
            let tier = tier_of(&option);
            if tier > floor {
                continue;
            }
            let anchor_clause = state.clause(option.anchor.index);
            let flashback = lattice.temporal_projection(option.relation) == Some(CoreRelation::Precede)
                && s2.is_past_perfect()
                && anchor_clause.is_simple_tense();
            let (destination, note) = if flashback {
                (Destination::NewThread, format!("flashback from {}", thread.label()))
            } else {
                (Destination::Thread(slot), format!("continue {}", thread.label()))
            };
            pending.push(Pending { option: Some(option), destination, tier, note });
        }
    }

    let cue_is_open = cue.is_none_or(|c| lattice.is_top(c.node));
    if s2.is_past_perfect() {
        let current = center.current();
        let ctx = thread_context(state, current);
        let opener = AttachmentOption {
            anchor: Anchor { index: ctx.s1_index, kind: AnchorKind::S1 },
            relation: lattice.core(CoreRelation::Precede),
            source: OptionSource::Bullets,
        };
        let directed = directed_option(state, current, s2, lattice);
        if tx_label.is_none() || directed.is_some() {
            match apply_explicit(vec![opener], cue, directed.zip(tx_label.as_deref()), lattice) {
                Ok(options) => pending.extend(options.into_iter().map(|option| Pending {
                    option: Some(option),
                    destination: Destination::NewThread,
                    tier: 0,
                    note: "new thread".into(),
                })),
                Err(clash) => step.clashes.push(clash.description),
            }
        }
    } else if !feasible_any && tx_label.is_none() && cue_is_open {
        pending.push(Pending { option: None, destination: Destination::NewThread, tier: 0, note: "new thread, unattached".into() });
    }

    let mut seen_new = BTreeSet::new();
    for p in pending {
        if p.destination == Destination::NewThread
            && !seen_new.insert(p.option.map(|o| (o.anchor.index, o.relation)))
        {
            continue;
        }
        step.successors.push(build_successor(state, s2, p, cfg));
    }
    step
}

fn build_successor(state: &AnalysisState, s2: &ClauseAnnotation, p: Pending, cfg: &Config) -> Successor {
    let lattice = cfg.lattice();
    let index = state.dcus.len();
    let center = &state.center;
    let (next_center, slot, rating) = match p.destination {
        Destination::Thread(slot) => {
            let rating = rate_thread(&center.fwd_center[slot], s2, &cfg.data.lexicon, slot == center.bkwd_center, &cfg.weights);
            let mut next = center.clone();
            let closed = next.fwd_center.split_off(slot + 1);
            next.closed_threads.extend(closed);
            next.fwd_center[slot].push(index, s2);
            next.bkwd_center = slot;
            (next, slot, rating)
        }
        Destination::NewThread => {
            let next = push_thread(center, index, s2);
            let slot = next.bkwd_center;
            (next, slot, rate_new_thread(&cfg.weights))
        }
    };
    let temp_relns = p
        .option
        .and_then(|o| {
            lattice.temporal_projection(o.relation).map(|relation| TempRelation {
                from: s2.id.clone(),
                relation,
                to: state.clause(o.anchor.index).id.clone(),
            })
        })
        .into_iter()
        .collect();
    let mut log = state.log.clone();
    log.push(match p.option {
        Some(o) => format!(
            "{}: {}@{}{} via {} ({})",
            s2.id,
            lattice.name(o.relation),
            state.clause(o.anchor.index).id,
            if o.anchor.kind == AnchorKind::Tf1 { "[tf1]" } else { "" },
            o.source.as_str(),
            p.note
        ),
        None => format!("{}: {}", s2.id, p.note),
    });
    let dcu = Dcu {
        annotation: s2.clone(),
        rhet_reln: p.option.map(|o| o.relation),
        anchor: p.option.map(|o| o.anchor),
        temp_relns,
        thread_slot: slot,
        opened_thread: p.destination == Destination::NewThread,
        tier: p.tier,
    };
    let mut dcus = state.dcus.clone();
    dcus.push(dcu);
    Successor {
        state: AnalysisState { dcus, center: next_center, score: state.score + rating, log },
        destination: p.destination,
        rating,
    }
}

/// Successors of `state` for the next clause. `Enumerate` and `Underspec`
/// keep every constrained successor; `Best` keeps those in the preferred
/// destinations (the current thread if it is among the top-rated).
pub fn attach(state: &AnalysisState, s2: &ClauseAnnotation, cfg: &Config, mode: Mode) -> Step {
    let mut step = constrained_step(state, s2, cfg);
    if mode == Mode::Best {
        let mut rated: Vec<(Destination, f64)> = Vec::new();
        for s in &step.successors {
            if !rated.iter().any(|(d, _)| *d == s.destination) {
                rated.push((s.destination, s.rating));
            }
        }
        let chosen = select_best(&rated, Some(Destination::Thread(state.center.bkwd_center)));
        step.successors.retain(|s| chosen.contains(&s.destination));
    }
    step
}

fn score_key(score: f64) -> i64 {
    (score * 1e9).round() as i64
}

/// Sort key: higher score first, then per site the thread slot, tier,
/// narrative-default relation first, relation name.
fn order_key(reading: &Reading, lattice: &RelationLattice) -> (i64, Vec<(usize, u8, u8, String)>) {
    let sites = reading
        .dcus
        .iter()
        .skip(1)
        .map(|d| {
            let (rank, name) = match d.rhet_reln {
                Some(node) => {
                    let core = lattice.temporal_projection(node);
                    (u8::from(core != Some(default_relation(&d.annotation))), lattice.name(node).to_string())
                }
                None => (2, String::new()),
            };
            (d.thread_slot, d.tier, rank, name)
        })
        .collect();
    (-score_key(reading.score), sites)
}

pub fn sort_readings(readings: &mut [Reading], lattice: &RelationLattice) {
    readings.sort_by_cached_key(|r| order_key(r, lattice));
}

/// Per attachment site: the least node covering every surviving relation.
#[derive(Debug, Clone, PartialEq)]
pub struct UnderspecifiedSite {
    pub id: String,
    pub node: Option<RelationNode>,
    pub relations: BTreeSet<RelationNode>,
    /// Anchor ids with the number of readings using each, in discourse order.
    pub anchors: Vec<(String, usize)>,
    /// Readings that open a new thread here.
    pub new_threads: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnderspecifiedStructure {
    pub sites: Vec<UnderspecifiedSite>,
}

pub fn underspecify(readings: &[Reading], lattice: &RelationLattice) -> UnderspecifiedStructure {
    let Some(first) = readings.first() else {
        return UnderspecifiedStructure { sites: Vec::new() };
    };
    let sites = (1..first.dcus.len())
        .map(|i| {
            let mut relations = BTreeSet::new();
            let mut anchors: BTreeMap<usize, usize> = BTreeMap::new();
            let mut new_threads = 0;
            for r in readings {
                let dcu = &r.dcus[i];
                if let Some(node) = dcu.rhet_reln {
                    relations.insert(node);
                }
                if let Some(a) = dcu.anchor {
                    *anchors.entry(a.index).or_default() += 1;
                }
                if dcu.opened_thread {
                    new_threads += 1;
                }
            }
            UnderspecifiedSite {
                id: first.dcus[i].id().to_string(),
                node: lattice.join_all(relations.iter().copied()),
                relations,
                anchors: anchors.into_iter().map(|(idx, n)| (first.dcus[idx].id().to_string(), n)).collect(),
                new_threads,
            }
        })
        .collect();
    UnderspecifiedStructure { sites }
}

#[derive(Debug, Clone)]
pub struct AnalysisResult {
    pub mode: Mode,
    /// Sorted best-first.
    pub readings: Vec<Reading>,
    pub underspec: Option<UnderspecifiedStructure>,
    pub warnings: Vec<String>,
}

impl AnalysisResult {
    pub fn top(&self) -> Option<&Reading> {
        self.readings.first()
    }
}

/// Runs the whole discourse.
pub fn analyze(discourse: &[ClauseAnnotation], cfg: &Config, mode: Mode) -> Result<AnalysisResult> {
    let (first, rest) = discourse.split_first().ok_or(Error::EmptyDiscourse)?;
    validate_discourse(discourse, &cfg.data.cues)?;
    cfg.weights.validate()?;

    let mut states = vec![new_discourse(first.clone(), &cfg.data.cues)?];
    for s2 in rest {
        let mut next = Vec::new();
        let mut clashes = BTreeSet::new();
        for state in &states {
            let step = attach(state, s2, cfg, mode);
            clashes.extend(step.clashes);
            next.extend(step.successors.into_iter().map(|s| s.state));
        }
        if next.is_empty() {
            let clashes = if clashes.is_empty() { vec!["no feasible attachment".to_string()] } else { clashes.into_iter().collect() };
            return Err(Error::ParseFailure { at: s2.id.clone(), clashes });
        }
        states = next;
    }

    if mode == Mode::Best {
        let best = states.iter().map(|s| score_key(s.score)).max().unwrap_or(0);
        states.retain(|s| score_key(s.score) == best);
    }
    sort_readings(&mut states, cfg.lattice());

    let mut warnings = cfg.data.warnings.clone();
    if let Some(top) = states.first() {
        let open: Vec<String> = top.center.fwd_center.iter().map(Thread::label).collect();
        if open.len() > 1 {
            warnings.push(format!("threads left open at end of discourse: {}", open.join(", ")));
        }
    }
    let underspec = (mode == Mode::Underspec).then(|| underspecify(&states, cfg.lattice()));
    Ok(AnalysisResult { mode, readings: states, underspec, warnings })
}
