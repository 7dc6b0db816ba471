//! Feasible attachments for a new clause.
//!
//! Two sources license a (anchor, relation) option. When the new clause is
//! a simple past event and the anchor clause is past or past perfect, the
//! feasibility table decides. Everything else goes through the tense/aspect
//! rules in [`bullet_options`]. Explicit markers (cue words and temporal
//! expressions) are applied afterwards by [`apply_explicit`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lattice::{RelationLattice, RelationNode};
use crate::model::{Anchor, AnchorKind, ClauseAnnotation, CoreRelation, SemanticAspect, SyntacticAspect, Tense};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TenseGroup {
    Past,
    PastPerfect,
}

impl TenseGroup {
    pub const ALL: [TenseGroup; 2] = [TenseGroup::Past, TenseGroup::PastPerfect];

    pub fn as_str(self) -> &'static str {
        match self {
            TenseGroup::Past => "past",
            TenseGroup::PastPerfect => "past_perfect",
        }
    }

    /// Row group of a clause in the table, if it has one.
    pub fn of(clause: &ClauseAnnotation) -> Option<TenseGroup> {
        match (clause.tense, clause.syn_aspect) {
            (Tense::Past, SyntacticAspect::Simple | SyntacticAspect::Progressive) => Some(TenseGroup::Past),
            (Tense::Past, SyntacticAspect::Perfect | SyntacticAspect::PerfectProgressive) => Some(TenseGroup::PastPerfect),
            _ => None,
        }
    }
}

impl FromStr for TenseGroup {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "past" => Ok(TenseGroup::Past),
            "past_perfect" => Ok(TenseGroup::PastPerfect),
            _ => Err(format!("unknown tense group `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Allowance {
    Yes,
    No,
    /// Questionable; admitted only when marginal cells are enabled.
    Marginal,
}

impl Allowance {
    pub fn as_str(self) -> &'static str {
        match self {
            Allowance::Yes => "yes",
            Allowance::No => "no",
            Allowance::Marginal => "marginal",
        }
    }

    pub fn admits(self, allow_marginal: bool) -> bool {
        match self {
            Allowance::Yes => true,
            Allowance::No => false,
            Allowance::Marginal => allow_marginal,
        }
    }
}

impl FromStr for Allowance {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "yes" => Ok(Allowance::Yes),
            "no" => Ok(Allowance::No),
            "marginal" => Ok(Allowance::Marginal),
            _ => Err(format!("unknown allowance `{s}`")),
        }
    }
}

/// Key of one table cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub group: TenseGroup,
    pub sem: SemanticAspect,
    pub anchor: AnchorKind,
    pub relation: CoreRelation,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "s1={},{} anchor={} rel={}",
            self.group.as_str(),
            self.sem,
            self.anchor.as_str(),
            self.relation
        )
    }
}

impl Cell {
    /// The 32 cells the table must define: every category against S1, and
    /// stative categories against TF1.
    pub fn all() -> Vec<Cell> {
        let mut cells = Vec::new();
        for group in TenseGroup::ALL {
            for &sem in SemanticAspect::ALL {
                for anchor in [AnchorKind::S1, AnchorKind::Tf1] {
                    if anchor == AnchorKind::Tf1 && sem != SemanticAspect::State {
                        continue;
                    }
                    for &relation in CoreRelation::ALL {
                        cells.push(Cell { group, sem, anchor, relation });
                    }
                }
            }
        }
        cells
    }
}

/// Which relations a simple past event may bear to a past or past perfect
/// anchor clause, by the anchor's tense group and semantic aspect.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityTable {
    cells: BTreeMap<Cell, Allowance>,
}

impl FeasibilityTable {
    /// Parses `s1=<group>,<sem> anchor=<s1|tf1> rel=<rel> allow=<yes|no|marginal>`
    /// lines; the table must define each of the 32 cells exactly once.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cells = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Syntax { line: i + 1, message };
            let mut fields: BTreeMap<&str, &str> = BTreeMap::new();
            for token in line.split_whitespace() {
                let (k, v) = token.split_once('=').ok_or_else(|| err(format!("expected key=value, got `{token}`")))?;
                if fields.insert(k, v).is_some() {
                    return Err(err(format!("repeated key `{k}`")));
                }
            }
            let get = |k: &str| fields.get(k).copied().ok_or_else(|| err(format!("missing `{k}`")));
            if let Some(extra) = fields.keys().find(|k| !["s1", "anchor", "rel", "allow"].contains(k)) {
                return Err(err(format!("unknown key `{extra}`")));
            }
            let (group, sem) = get("s1")?.split_once(',').ok_or_else(|| err("s1 must be `<group>,<sem>`".into()))?;
            let anchor = match get("anchor")? {
                "s1" => AnchorKind::S1,
                "tf1" => AnchorKind::Tf1,
                other => return Err(err(format!("unknown anchor `{other}`"))),
            };
            let cell = Cell {
                group: group.parse().map_err(err)?,
                sem: sem.parse().map_err(err)?,
                anchor,
                relation: get("rel")?.parse().map_err(err)?,
            };
            if anchor == AnchorKind::Tf1 && cell.sem != SemanticAspect::State {
                return Err(err("tf1 cells exist only for stative rows".into()));
            }
            let allow: Allowance = get("allow")?.parse().map_err(err)?;
            if cells.insert(cell, allow).is_some() {
                return Err(err(format!("cell `{cell}` defined twice")));
            }
        }
        if let Some(missing) = Cell::all().into_iter().find(|c| !cells.contains_key(c)) {
            return Err(Error::Syntax { line: 0, message: format!("table is missing cell `{missing}`") });
        }
        Ok(FeasibilityTable { cells })
    }

    pub fn get(&self, cell: Cell) -> Allowance {
        self.cells[&cell]
    }

    pub fn set(&mut self, cell: Cell, allow: Allowance) {
        self.cells.insert(cell, allow);
    }

    pub fn cells(&self) -> impl Iterator<Item = (Cell, Allowance)> + '_ {
        self.cells.iter().map(|(c, a)| (*c, *a))
    }

    pub fn to_text(&self) -> String {
        self.cells.iter().map(|(c, a)| format!("{c} allow={}\n", a.as_str())).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OptionSource {
    Table,
    Bullets,
    TempExpr,
    Cue,
}

impl OptionSource {
    pub fn as_str(self) -> &'static str {
        match self {
            OptionSource::Table => "table",
            OptionSource::Bullets => "bullets",
            OptionSource::TempExpr => "temp_expr",
            OptionSource::Cue => "cue",
        }
    }
}

/// One way to attach the new clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AttachmentOption {
    pub anchor: Anchor,
    pub relation: RelationNode,
    pub source: OptionSource,
}

/// The thread being continued, seen from the new clause.
#[derive(Debug, Clone, Copy)]
pub struct AnchorContext<'a> {
    pub s1_index: usize,
    pub s1: &'a ClauseAnnotation,
    /// The thread's temporal focus, if it has one.
    pub tempfoc: Option<(usize, &'a ClauseAnnotation)>,
}

impl<'a> AnchorContext<'a> {
    /// The focus reachable through a TF1 anchor: only when S1 is stative.
    pub fn tf1(&self) -> Option<usize> {
        if self.s1.is_state() {
            self.tempfoc.map(|(i, _)| i).filter(|&i| i != self.s1_index)
        } else {
            None
        }
    }
}

fn option(index: usize, kind: AnchorKind, rel: CoreRelation, lattice: &RelationLattice, source: OptionSource) -> AttachmentOption {
    AttachmentOption { anchor: Anchor { index, kind }, relation: lattice.core(rel), source }
}

/// Table lookup for a simple past event following `ctx.s1`. Returns nothing
/// when S1 has no table row (neither past nor past perfect).
pub fn feasible_simple_past_event(
    ctx: &AnchorContext<'_>,
    table: &FeasibilityTable,
    lattice: &RelationLattice,
    allow_marginal: bool,
) -> Vec<AttachmentOption> {
    let Some(group) = TenseGroup::of(ctx.s1) else {
        return Vec::new();
    };
    let sem = ctx.s1.sem_aspect;
    let mut out = Vec::new();
    for &relation in CoreRelation::ALL {
        let cell = Cell { group, sem, anchor: AnchorKind::S1, relation };
        if table.get(cell).admits(allow_marginal) {
            out.push(option(ctx.s1_index, AnchorKind::S1, relation, lattice, OptionSource::Table));
        }
    }
    if let Some(focus) = ctx.tf1() {
        for &relation in CoreRelation::ALL {
            let cell = Cell { group, sem, anchor: AnchorKind::Tf1, relation };
            if table.get(cell).admits(allow_marginal) {
                out.push(option(focus, AnchorKind::Tf1, relation, lattice, OptionSource::Table));
            }
        }
    }
    out
}

/// The general tense/aspect rules, for any pair of clauses.
///
/// Overlap is licensed when either clause is stative. Just-after is
/// measured from the thread's temporal focus, so a stative S1 reaches it
/// through a TF1 anchor and a stative-only thread offers none.
pub fn bullet_options(ctx: &AnchorContext<'_>, s2: &ClauseAnnotation, lattice: &RelationLattice) -> Vec<AttachmentOption> {
    let s1 = ctx.s1;
    let mut out = Vec::new();
    let push = |out: &mut Vec<AttachmentOption>, index, kind, rel| {
        out.push(option(index, kind, rel, lattice, OptionSource::Bullets));
    };

    let just_after = (s2.is_simple_tense() && s2.is_event())
        || (s1.is_complex_tense() && s2.is_complex_tense() && s2.is_event())
        || (s1.is_event() && (s2.is_activity() || (s2.is_state() && s2.is_simple_tense())))
        || (s1.is_state() && s2.is_simple_tense() && s2.is_activity());
    if just_after {
        if !s1.is_state() {
            push(&mut out, ctx.s1_index, AnchorKind::S1, CoreRelation::JustAfter);
        } else if let Some(focus) = ctx.tf1() {
            push(&mut out, focus, AnchorKind::Tf1, CoreRelation::JustAfter);
        }
    }

    let precede = s2.is_event() || (!s1.is_activity() && s2.is_past_perfect() && s2.is_state());
    if precede {
        push(&mut out, ctx.s1_index, AnchorKind::S1, CoreRelation::Precede);
    }

    if s1.is_state() || s2.is_state() {
        push(&mut out, ctx.s1_index, AnchorKind::S1, CoreRelation::Overlap);
    }

    let elaborate = s1.is_event()
        || (s1.is_activity() && s2.is_atelic())
        || (s1.is_state() && s2.is_state() && (s2.is_simple_tense() || s1.is_complex_tense()));
    if elaborate {
        push(&mut out, ctx.s1_index, AnchorKind::S1, CoreRelation::SameEvent);
    }
    out
}

/// A past perfect event or activity after a simple-tense clause moves back
/// in time: only precede survives.
pub fn perfect_shift_applies(s1: &ClauseAnnotation, s2: &ClauseAnnotation) -> bool {
    s2.is_past_perfect() && !s2.is_state() && s1.is_simple_tense()
}

/// Feasible options without explicit markers: the table when it applies,
/// otherwise the general rules narrowed by the perfect shift.
pub fn feasible_general(
    ctx: &AnchorContext<'_>,
    s2: &ClauseAnnotation,
    table: &FeasibilityTable,
    lattice: &RelationLattice,
    allow_marginal: bool,
) -> Vec<AttachmentOption> {
    if s2.is_simple_past_event() && TenseGroup::of(ctx.s1).is_some() {
        return feasible_simple_past_event(ctx, table, lattice, allow_marginal);
    }
    let mut out = bullet_options(ctx, s2, lattice);
    if perfect_shift_applies(ctx.s1, s2) {
        let precede = lattice.core(CoreRelation::Precede);
        out.retain(|o| o.relation == precede);
    }
    out
}

/// A cue word with the node it marks.
#[derive(Debug, Clone, Copy)]
pub struct CueMarker<'a> {
    pub token: &'a str,
    pub node: RelationNode,
}

/// Explicit markers that cannot be reconciled with each other or with
/// every feasible option.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clash {
    pub description: String,
}

/// Applies explicit markers to the feasible options.
///
/// A temporal-expression option replaces the feasible set outright; a cue
/// is then met against what remains, dropping options it contradicts.
/// With no markers the options pass through unchanged.
pub fn apply_explicit(
    options: Vec<AttachmentOption>,
    cue: Option<CueMarker<'_>>,
    tx: Option<(AttachmentOption, &str)>,
    lattice: &RelationLattice,
) -> std::result::Result<Vec<AttachmentOption>, Clash> {
    let (base, tx_label) = match tx {
        Some((directed, label)) => (vec![directed], Some(label)),
        None => (options, None),
    };
    let Some(cue) = cue else {
        return Ok(base);
    };
    let met: Vec<AttachmentOption> = base
        .iter()
        .filter_map(|o| {
            lattice.meet(o.relation, cue.node).ok().map(|relation| AttachmentOption {
                relation,
                source: if relation == o.relation { o.source } else { OptionSource::Cue },
                ..*o
            })
        })
        .collect();
    if !met.is_empty() {
        return Ok(met);
    }
    let description = match tx_label {
        Some(label) => format!("cue `{}` ({}) conflicts with temprel={}", cue.token, lattice.name(cue.node), label),
        None if base.is_empty() => {
            format!("cue `{}` ({}) has no feasible attachment", cue.token, lattice.name(cue.node))
        }
        None => {
            let licensed: Vec<&str> = base.iter().map(|o| lattice.name(o.relation)).collect();
            format!(
                "cue `{}` ({}) conflicts with the relations tense and aspect allow ({})",
                cue.token,
                lattice.name(cue.node),
                licensed.join(", ")
            )
        }
    };
    Err(Clash { description })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data;
    use SemanticAspect::*;

    fn clause(id: &str, aspect: SyntacticAspect, sem: SemanticAspect) -> ClauseAnnotation {
        ClauseAnnotation::new(id, Tense::Past, aspect, sem)
    }

    fn rels(options: &[AttachmentOption], l: &RelationLattice) -> Vec<(String, AnchorKind)> {
        let mut v: Vec<_> = options.iter().map(|o| (l.name(o.relation).to_string(), o.anchor.kind)).collect();
        v.sort();
        v
    }

    fn expect(pairs: &[(&str, AnchorKind)]) -> Vec<(String, AnchorKind)> {
        let mut v: Vec<_> = pairs.iter().map(|(r, k)| (r.to_string(), *k)).collect();
        v.sort();
        v
    }

    use AnchorKind::{Tf1, S1};

    #[test]
    fn table_rows_for_simple_past_s1() {
        let l = data::default_lattice();
        let t = data::default_table();
        let focus = clause("e0", SyntacticAspect::Simple, Event);

        let s1 = clause("e1", SyntacticAspect::Simple, Event);
        let ctx = AnchorContext { s1_index: 1, s1: &s1, tempfoc: Some((1, &s1)) };
        assert_eq!(
            rels(&feasible_simple_past_event(&ctx, &t, &l, false), &l),
            expect(&[("just_after", S1), ("precede", S1), ("same_event", S1)])
        );

        let s1 = clause("e1", SyntacticAspect::Simple, Activity);
        let ctx = AnchorContext { s1_index: 1, s1: &s1, tempfoc: Some((1, &s1)) };
        assert_eq!(rels(&feasible_simple_past_event(&ctx, &t, &l, false), &l), expect(&[("just_after", S1)]));

        let s1 = clause("e1", SyntacticAspect::Simple, State);
        let ctx = AnchorContext { s1_index: 1, s1: &s1, tempfoc: Some((0, &focus)) };
        assert_eq!(
            rels(&feasible_simple_past_event(&ctx, &t, &l, false), &l),
            expect(&[("just_after", Tf1), ("overlap", S1), ("same_event", Tf1)])
        );
        assert_eq!(
            rels(&feasible_simple_past_event(&ctx, &t, &l, true), &l),
            expect(&[("just_after", Tf1), ("overlap", S1), ("same_event", Tf1), ("precede", Tf1)])
        );
        // no focus, no TF1 options
        let ctx = AnchorContext { s1_index: 0, s1: &s1, tempfoc: None };
        assert_eq!(rels(&feasible_simple_past_event(&ctx, &t, &l, true), &l), expect(&[("overlap", S1)]));
    }

    #[test]
    fn perfect_event_after_simple_event_precedes() {
        let l = data::default_lattice();
        let t = data::default_table();
        let s1 = clause("e1", SyntacticAspect::Simple, Event);
        let s2 = clause("e2", SyntacticAspect::Perfect, Event);
        let ctx = AnchorContext { s1_index: 0, s1: &s1, tempfoc: Some((0, &s1)) };
        assert!(rels(&bullet_options(&ctx, &s2, &l), &l).contains(&("precede".to_string(), S1)));
        assert_eq!(rels(&feasible_general(&ctx, &s2, &t, &l, false), &l), expect(&[("precede", S1)]));
    }

    #[test]
    fn state_after_state_can_overlap_or_elaborate() {
        let l = data::default_lattice();
        let t = data::default_table();
        let s1 = clause("e1", SyntacticAspect::Simple, State);
        let s2 = clause("e2", SyntacticAspect::Simple, State);
        let ctx = AnchorContext { s1_index: 0, s1: &s1, tempfoc: None };
        assert_eq!(rels(&feasible_general(&ctx, &s2, &t, &l, false), &l), expect(&[("overlap", S1), ("same_event", S1)]));
    }

    #[test]
    fn event_cannot_elaborate_state() {
        let l = data::default_lattice();
        let t = data::default_table();
        let s1 = clause("e1", SyntacticAspect::Simple, State);
        let s2 = clause("e2", SyntacticAspect::Simple, Event);
        let ctx = AnchorContext { s1_index: 0, s1: &s1, tempfoc: None };
        let se = ("same_event".to_string(), S1);
        assert!(!rels(&bullet_options(&ctx, &s2, &l), &l).contains(&se));
        assert!(!rels(&feasible_general(&ctx, &s2, &t, &l, false), &l).contains(&se));
    }

    #[test]
    fn bullets_cover_other_tenses() {
        let l = data::default_lattice();
        let t = data::default_table();
        let s1 = ClauseAnnotation::new("e1", Tense::Present, SyntacticAspect::Simple, Event);
        let s2 = clause("e2", SyntacticAspect::Simple, Event);
        let ctx = AnchorContext { s1_index: 0, s1: &s1, tempfoc: Some((0, &s1)) };
        let got = feasible_general(&ctx, &s2, &t, &l, false);
        assert!(got.iter().all(|o| o.source == OptionSource::Bullets));
        assert_eq!(rels(&got, &l), expect(&[("just_after", S1), ("precede", S1), ("same_event", S1)]));
    }

    #[test]
    fn explicit_markers() {
        let l = data::default_lattice();
        let t = data::default_table();
        let cues = data::default_cues();
        let s1 = clause("e1", SyntacticAspect::Simple, Event);
        let ctx = AnchorContext { s1_index: 0, s1: &s1, tempfoc: Some((0, &s1)) };
        let s2 = clause("e2", SyntacticAspect::Simple, Event);
        let options = feasible_general(&ctx, &s2, &t, &l, false);

        // identity
        assert_eq!(apply_explicit(options.clone(), None, None, &l).unwrap(), options);

        let because = CueMarker { token: "because", node: cues.get("because").unwrap() };
        let got = apply_explicit(options.clone(), Some(because), None, &l).unwrap();
        assert_eq!(rels(&got, &l), expect(&[("cause", S1)]));
        assert_eq!(got[0].source, OptionSource::Cue);

        let directed = AttachmentOption {
            anchor: Anchor { index: 0, kind: S1 },
            relation: l.core(CoreRelation::Precede),
            source: OptionSource::TempExpr,
        };
        let result = CueMarker { token: "as_a_result", node: cues.get("as_a_result").unwrap() };
        let clash = apply_explicit(options.clone(), Some(result), Some((directed, "precede")), &l).unwrap_err();
        assert!(clash.description.contains("as_a_result"));
        assert!(clash.description.contains("temprel=precede"));

        let overlap = AttachmentOption { relation: l.core(CoreRelation::Overlap), ..directed };
        let meanwhile = CueMarker { token: "meanwhile", node: cues.get("meanwhile").unwrap() };
        let got = apply_explicit(options.clone(), Some(meanwhile), Some((overlap, "overlap")), &l).unwrap();
        assert_eq!(rels(&got, &l), expect(&[("background", S1)]));

        // the temporal expression wins over a stative overlap default
        let state = clause("e1", SyntacticAspect::Simple, State);
        let ctx = AnchorContext { s1_index: 0, s1: &state, tempfoc: None };
        let s2 = clause("e2", SyntacticAspect::Simple, State);
        let defaults = feasible_general(&ctx, &s2, &t, &l, false);
        let got = apply_explicit(defaults, None, Some((directed, "precede")), &l).unwrap();
        assert_eq!(rels(&got, &l), expect(&[("precede", S1)]));

        // a cue with nothing to refine is a clash
        assert!(apply_explicit(Vec::new(), Some(because), None, &l).is_err());
    }

    #[test]
    fn table_parsing_rejects_bad_files() {
        let text = data::DEFAULT_TABLE;
        let without_last: String = text.lines().take(text.lines().count() - 1).collect::<Vec<_>>().join("\n");
        assert!(FeasibilityTable::parse(&without_last).is_err());
        let doubled = format!("{text}\ns1=past,event anchor=s1 rel=precede allow=no\n");
        assert!(matches!(FeasibilityTable::parse(&doubled), Err(Error::Syntax { .. })));
        let tf_event = format!("{text}\ns1=past,event anchor=tf1 rel=precede allow=no\n");
        assert!(FeasibilityTable::parse(&tf_event).is_err());
        let extra_key = text.replacen("allow=yes", "allow=yes colour=red", 1);
        assert!(FeasibilityTable::parse(&extra_key).is_err());
        let t = data::default_table();
        assert_eq!(FeasibilityTable::parse(&t.to_text()).unwrap(), t);
    }
}
