//! Domain data carried through the analysis: clause annotations, discourse
//! constituent units, narrative threads and the temporal center.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lattice::{CueLexicon, RelationNode};

macro_rules! keyword_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s {
                    $($text => Ok($name::$variant),)+
                    other => Err(format!(
                        "unknown {} `{}` (expected one of: {})",
                        stringify!($name),
                        other,
                        [$($text),+].join(", ")
                    )),
                }
            }
        }
    };
}

keyword_enum!(Tense {
    Past => "past",
    Present => "pres",
    Future => "fut",
});

keyword_enum!(SyntacticAspect {
    Simple => "simple",
    Perfect => "perf",
    Progressive => "prog",
    PerfectProgressive => "perf_prog",
});

keyword_enum!(SemanticAspect {
    Event => "event",
    State => "state",
    Activity => "activity",
});

keyword_enum!(
    /// The four temporal relations every rhetorical relation refines.
    CoreRelation {
        JustAfter => "just_after",
        Precede => "precede",
        Overlap => "overlap",
        SameEvent => "same_event",
    }
);

impl CoreRelation {
    /// Third-person phrasing used in prose output ("e2 precedes e1").
    pub fn phrase(self) -> &'static str {
        match self {
            CoreRelation::JustAfter => "just-after",
            CoreRelation::Precede => "precedes",
            CoreRelation::Overlap => "overlaps",
            CoreRelation::SameEvent => "same-event",
        }
    }
}

/// Tense together with syntactic aspect; two clauses have "parallel tense"
/// when these are equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TenseAspect {
    pub tense: Tense,
    pub aspect: SyntacticAspect,
}

/// What a temporal expression's relation is anchored to.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TxAnchor {
    Id(String),
    /// The temporal focus of the thread being continued.
    TemporalFocus,
}

/// Interpretation of a temporal adverbial: the new eventuality stands in
/// `relation` to the anchor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TempExprDirective {
    pub relation: CoreRelation,
    pub anchor: Option<TxAnchor>,
}

impl fmt::Display for TempExprDirective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.relation)?;
        match &self.anchor {
            None => Ok(()),
            Some(TxAnchor::Id(id)) => write!(f, "@{id}"),
            Some(TxAnchor::TemporalFocus) => f.write_str("@tf"),
        }
    }
}

impl FromStr for TempExprDirective {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (rel, anchor) = match s.split_once('@') {
            Some((rel, "tf")) => (rel, Some(TxAnchor::TemporalFocus)),
            Some((_, "")) => return Err(format!("empty anchor in `{s}`")),
            Some((rel, id)) => (rel, Some(TxAnchor::Id(id.to_string()))),
            None => (s, None),
        };
        Ok(TempExprDirective { relation: rel.parse()?, anchor })
    }
}

/// Per-clause input record.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClauseAnnotation {
    pub id: String,
    pub tense: Tense,
    pub syn_aspect: SyntacticAspect,
    pub sem_aspect: SemanticAspect,
    pub cue: Option<String>,
    pub temp_expr: Option<TempExprDirective>,
    pub words: Vec<String>,
    pub text: Option<String>,
}

impl ClauseAnnotation {
    pub fn new(
        id: impl Into<String>,
        tense: Tense,
        syn_aspect: SyntacticAspect,
        sem_aspect: SemanticAspect,
    ) -> Self {
        ClauseAnnotation {
            id: id.into(),
            tense,
            syn_aspect,
            sem_aspect,
            cue: None,
            temp_expr: None,
            words: Vec::new(),
            text: None,
        }
    }

    pub fn with_cue(mut self, cue: &str) -> Self {
        self.cue = Some(cue.to_string());
        self
    }

    pub fn with_temp_expr(mut self, relation: CoreRelation, anchor: Option<TxAnchor>) -> Self {
        self.temp_expr = Some(TempExprDirective { relation, anchor });
        self
    }

    pub fn with_words<I, S>(mut self, words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.words = words.into_iter().map(Into::into).collect();
        self
    }

    pub fn tense_aspect(&self) -> TenseAspect {
        TenseAspect { tense: self.tense, aspect: self.syn_aspect }
    }

    pub fn is_event(&self) -> bool {
        self.sem_aspect == SemanticAspect::Event
    }

    pub fn is_state(&self) -> bool {
        self.sem_aspect == SemanticAspect::State
    }

    pub fn is_activity(&self) -> bool {
        self.sem_aspect == SemanticAspect::Activity
    }

    /// States and activities have no inherent endpoint.
    pub fn is_atelic(&self) -> bool {
        !self.is_event()
    }

    /// Events and activities can serve as a thread's temporal focus.
    pub fn is_focus_candidate(&self) -> bool {
        !self.is_state()
    }

    /// Perfect and perfect-progressive are complex tenses.
    pub fn is_complex_tense(&self) -> bool {
        matches!(self.syn_aspect, SyntacticAspect::Perfect | SyntacticAspect::PerfectProgressive)
    }

    pub fn is_simple_tense(&self) -> bool {
        !self.is_complex_tense()
    }

    pub fn is_past_perfect(&self) -> bool {
        self.tense == Tense::Past && self.is_complex_tense()
    }

    pub fn is_simple_past_event(&self) -> bool {
        self.tense == Tense::Past && self.syn_aspect == SyntacticAspect::Simple && self.is_event()
    }

    /// Checks this annotation against the ids that precede it and the cue lexicon.
    pub fn validate(&self, earlier: &HashSet<&str>, cues: &CueLexicon) -> Result<()> {
        let invalid = |message: String| Error::InvalidAnnotation { id: self.id.clone(), message };
        if self.id.is_empty() || self.id.chars().any(char::is_whitespace) {
            return Err(invalid("id must be a non-empty token".into()));
        }
        if earlier.contains(self.id.as_str()) {
            return Err(Error::DuplicateId(self.id.clone()));
        }
        if let Some(cue) = &self.cue {
            if cues.get(cue).is_none() {
                return Err(Error::UnknownCue(cue.clone()));
            }
        }
        if let Some(TempExprDirective { anchor: Some(TxAnchor::Id(anchor)), .. }) = &self.temp_expr {
            if !earlier.contains(anchor.as_str()) {
                return Err(invalid(format!("temporal expression anchor `{anchor}` does not name an earlier eventuality")));
            }
        }
        if let Some(w) = self.words.iter().find(|w| w.is_empty() || w.chars().any(|c| c.is_uppercase() || c == ',' || c.is_whitespace())) {
            return Err(invalid(format!("content word `{w}` must be a lowercase lemma")));
        }
        Ok(())
    }
}

/// Validates a whole discourse: unique ids in order, known cues, backward anchors.
pub fn validate_discourse(clauses: &[ClauseAnnotation], cues: &CueLexicon) -> Result<()> {
    let mut seen = HashSet::new();
    for clause in clauses {
        clause.validate(&seen, cues)?;
        seen.insert(clause.id.as_str());
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AnchorKind {
    /// The last clause of the thread being continued.
    S1,
    /// The temporal focus of that thread, when the last clause is stative.
    Tf1,
}

impl AnchorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AnchorKind::S1 => "s1",
            AnchorKind::Tf1 => "tf1",
        }
    }
}

/// Position of an earlier DCU plus how it was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Anchor {
    pub index: usize,
    pub kind: AnchorKind,
}

/// `from relation to`, e.g. `e2 precede e1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TempRelation {
    pub from: String,
    pub relation: CoreRelation,
    pub to: String,
}

impl TempRelation {
    pub fn phrase(&self) -> String {
        format!("{} {} {}", self.from, self.relation.phrase(), self.to)
    }
}

impl fmt::Display for TempRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.from, self.relation, self.to)
    }
}

/// Discourse Constituent Unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dcu {
    pub annotation: ClauseAnnotation,
    pub rhet_reln: Option<RelationNode>,
    pub anchor: Option<Anchor>,
    pub temp_relns: Vec<TempRelation>,
    /// Stack position of the thread this DCU joined, at the time it joined.
    pub thread_slot: usize,
    pub opened_thread: bool,
    /// Relation tier of the chosen option (0 unless tier pruning is off).
    pub tier: u8,
}

impl Dcu {
    pub fn id(&self) -> &str {
        &self.annotation.id
    }
}

/// A narrative thread.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Thread {
    /// Stable label, printed as `T<id>`.
    pub id: usize,
    pub members: Vec<usize>,
    pub last: TenseAspect,
    pub tempfoc: Option<usize>,
    pub content_words: BTreeSet<String>,
}

impl Thread {
    pub fn new(id: usize, index: usize, clause: &ClauseAnnotation) -> Self {
        let mut thread = Thread {
            id,
            members: Vec::new(),
            last: clause.tense_aspect(),
            tempfoc: None,
            content_words: BTreeSet::new(),
        };
        thread.push(index, clause);
        thread
    }

    pub fn push(&mut self, index: usize, clause: &ClauseAnnotation) {
        self.members.push(index);
        self.last = clause.tense_aspect();
        if clause.is_focus_candidate() {
            self.tempfoc = Some(index);
        }
        self.content_words.extend(clause.words.iter().cloned());
    }

    pub fn last_member(&self) -> usize {
        *self.members.last().expect("threads are never empty")
    }

    pub fn label(&self) -> String {
        format!("T{}", self.id)
    }
}

/// Open threads (a stack), the one currently followed, and closed threads.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TempCenter {
    pub fwd_center: Vec<Thread>,
    pub bkwd_center: usize,
    pub closed_threads: Vec<Thread>,
    pub(crate) next_id: usize,
}

impl TempCenter {
    pub fn new(first: &ClauseAnnotation) -> Self {
        TempCenter {
            fwd_center: vec![Thread::new(1, 0, first)],
            bkwd_center: 0,
            closed_threads: Vec::new(),
            next_id: 2,
        }
    }

    pub fn current(&self) -> &Thread {
        &self.fwd_center[self.bkwd_center]
    }

    /// Open or closed thread holding the DCU at `index`.
    pub fn thread_of(&self, index: usize) -> Option<&Thread> {
        self.fwd_center
            .iter()
            .chain(&self.closed_threads)
            .find(|t| t.members.contains(&index))
    }

    /// Stack slot of the open thread holding `index`.
    pub fn open_slot_of(&self, index: usize) -> Option<usize> {
        self.fwd_center.iter().position(|t| t.members.contains(&index))
    }
}

/// One partial or complete analysis. Extending a state always produces a
/// new value; the parent is never touched.
#[derive(Debug, Clone)]
pub struct AnalysisState {
    pub dcus: Vec<Dcu>,
    pub center: TempCenter,
    pub score: f64,
    pub log: Vec<String>,
}

/// Terminal states are readings.
pub type Reading = AnalysisState;

impl PartialEq for AnalysisState {
    fn eq(&self, other: &Self) -> bool {
        self.dcus == other.dcus
            && self.center == other.center
            && self.score.to_bits() == other.score.to_bits()
            && self.log == other.log
    }
}

impl Eq for AnalysisState {}

impl Hash for AnalysisState {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.dcus.hash(state);
        self.center.hash(state);
        self.score.to_bits().hash(state);
        self.log.hash(state);
    }
}

/// Starts an analysis with its first clause.
pub fn new_discourse(first: ClauseAnnotation, cues: &CueLexicon) -> Result<AnalysisState> {
    first.validate(&HashSet::new(), cues)?;
    let mut log = Vec::new();
    if first.cue.is_some() {
        log.push(format!("{}: cue ignored on initial clause", first.id));
    }
    if first.temp_expr.is_some() {
        log.push(format!("{}: temporal expression ignored on initial clause", first.id));
    }
    Ok(AnalysisState {
        center: TempCenter::new(&first),
        dcus: vec![Dcu {
            annotation: first,
            rhet_reln: None,
            anchor: None,
            temp_relns: Vec::new(),
            thread_slot: 0,
            opened_thread: true,
            tier: 0,
        }],
        score: 0.0,
        log,
    })
}

impl AnalysisState {
    /// Accumulated temporal relations in discourse order.
    pub fn eventuality_order(&self) -> Vec<TempRelation> {
        self.dcus.iter().flat_map(|d| d.temp_relns.iter().cloned()).collect()
    }

    pub fn clause(&self, index: usize) -> &ClauseAnnotation {
        &self.dcus[index].annotation
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.dcus.iter().position(|d| d.id() == id)
    }

    /// Highest relation tier used at any site.
    pub fn tier(&self) -> u8 {
        self.dcus.iter().map(|d| d.tier).max().unwrap_or(0)
    }

    /// No pair of eventualities is related both ways.
    pub fn relations_consistent(&self) -> bool {
        let rels = self.eventuality_order();
        rels.iter().all(|a| !rels.iter().any(|b| a.from == b.to && a.to == b.from))
    }

    pub fn fingerprint(&self) -> u64 {
        let mut hasher = std::collections::hash_map::DefaultHasher::new();
        self.hash(&mut hasher);
        hasher.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data;

    fn clause(id: &str, sem: SemanticAspect) -> ClauseAnnotation {
        ClauseAnnotation::new(id, Tense::Past, SyntacticAspect::Simple, sem)
    }

    #[test]
    fn keywords_round_trip() {
        for t in Tense::ALL {
            assert_eq!(t.as_str().parse::<Tense>().unwrap(), *t);
        }
        for a in SyntacticAspect::ALL {
            assert_eq!(a.as_str().parse::<SyntacticAspect>().unwrap(), *a);
        }
        for s in SemanticAspect::ALL {
            assert_eq!(s.as_str().parse::<SemanticAspect>().unwrap(), *s);
        }
        assert!("perfect".parse::<SyntacticAspect>().is_err());
    }

    #[test]
    fn directive_parsing() {
        let d: TempExprDirective = "precede@e1".parse().unwrap();
        assert_eq!(d.anchor, Some(TxAnchor::Id("e1".into())));
        let d: TempExprDirective = "overlap@tf".parse().unwrap();
        assert_eq!(d.anchor, Some(TxAnchor::TemporalFocus));
        assert_eq!(d.to_string(), "overlap@tf");
        assert!("cause".parse::<TempExprDirective>().is_err());
        assert!("precede@".parse::<TempExprDirective>().is_err());
    }

    #[test]
    fn event_clause_is_its_own_focus() {
        let cues = data::default_cues();
        let s = new_discourse(clause("e1", SemanticAspect::Event).with_words(["ring", "bell"]), &cues).unwrap();
        assert_eq!(s.center.fwd_center.len(), 1);
        assert_eq!(s.center.fwd_center[0].members, vec![0]);
        assert_eq!(s.center.fwd_center[0].tempfoc, Some(0));
        assert_eq!(s.center.bkwd_center, 0);
        assert!(s.eventuality_order().is_empty());
        assert_eq!(s.score, 0.0);
    }

    #[test]
    fn stative_clause_has_no_focus() {
        let cues = data::default_cues();
        let s = new_discourse(clause("e1", SemanticAspect::State), &cues).unwrap();
        assert_eq!(s.center.fwd_center[0].tempfoc, None);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let cues = data::default_cues();
        let d = vec![clause("e1", SemanticAspect::Event), clause("e1", SemanticAspect::State)];
        assert_eq!(validate_discourse(&d, &cues), Err(Error::DuplicateId("e1".into())));
    }

    #[test]
    fn unknown_cue_rejected() {
        let cues = data::default_cues();
        let err = new_discourse(clause("e1", SemanticAspect::Event).with_cue("nevertheless"), &cues).unwrap_err();
        assert_eq!(err, Error::UnknownCue("nevertheless".into()));
    }

    #[test]
    fn forward_anchor_rejected() {
        let cues = data::default_cues();
        let d = vec![
            clause("e1", SemanticAspect::Event),
            clause("e2", SemanticAspect::Event).with_temp_expr(CoreRelation::Precede, Some(TxAnchor::Id("e3".into()))),
            clause("e3", SemanticAspect::Event),
        ];
        assert!(matches!(validate_discourse(&d, &cues), Err(Error::InvalidAnnotation { .. })));
    }

    #[test]
    fn thread_focus_tracks_last_non_state() {
        let a = clause("a", SemanticAspect::Event);
        let b = clause("b", SemanticAspect::State);
        let c = clause("c", SemanticAspect::Activity);
        let mut t = Thread::new(1, 0, &a);
        t.push(1, &b);
        assert_eq!(t.tempfoc, Some(0));
        t.push(2, &c);
        assert_eq!(t.tempfoc, Some(2));
        assert_eq!(t.last_member(), 2);
    }
}
