//! Temporal centering: which thread a new clause continues.
//!
//! Threads are rated by parallel tense, semantic closeness and whether they
//! are the thread currently followed. The current thread wins any tie it is
//! part of; otherwise every top-rated thread is kept.

use crate::closeness::{dcu_thread_closeness, Lexicon};
use crate::error::{Error, Result};
use crate::model::{ClauseAnnotation, CoreRelation, TempCenter, Thread};

/// Ratings closer than this are ties.
pub const SCORE_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceWeights {
    pub w_tense: f64,
    pub w_sem: f64,
    pub w_cur: f64,
    /// Bonus for opening a new thread when one may be opened.
    pub w_new: f64,
    /// Relation tiers, most preferred first. Applied only to relations not
    /// pinned by an explicit marker, and not to past perfect clauses.
    pub relation_tiers: Vec<Vec<CoreRelation>>,
}

impl Default for PreferenceWeights {
    fn default() -> Self {
        PreferenceWeights {
            w_tense: 1.0,
            w_sem: 1.0,
            w_cur: 0.5,
            w_new: 0.25,
            relation_tiers: vec![
                vec![CoreRelation::JustAfter, CoreRelation::SameEvent, CoreRelation::Overlap],
                vec![CoreRelation::Precede],
            ],
        }
    }
}

impl PreferenceWeights {
    pub fn validate(&self) -> Result<()> {
        for (name, w) in [("w_tense", self.w_tense), ("w_sem", self.w_sem), ("w_cur", self.w_cur), ("w_new", self.w_new)] {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidAnnotation { id: name.into(), message: format!("weight must be finite and >= 0, got {w}") });
            }
        }
        Ok(())
    }

    /// Tier of a core relation; relations missing from every tier go last.
    pub fn tier_of(&self, rel: CoreRelation) -> u8 {
        self.relation_tiers
            .iter()
            .position(|tier| tier.contains(&rel))
            .unwrap_or(self.relation_tiers.len()) as u8
    }
}

pub fn rate_thread(thread: &Thread, s2: &ClauseAnnotation, lexicon: &Lexicon, is_current: bool, w: &PreferenceWeights) -> f64 {
    let parallel = if thread.last == s2.tense_aspect() { 1.0 } else { 0.0 };
    let current = if is_current { 1.0 } else { 0.0 };
    w.w_tense * parallel + w.w_sem * dcu_thread_closeness(lexicon, &s2.words, &thread.content_words) + w.w_cur * current
}

/// A fresh thread trivially shares the clause's tense and becomes current.
pub fn rate_new_thread(w: &PreferenceWeights) -> f64 {
    w.w_tense + w.w_cur + w.w_new
}

/// Top-rated candidates, or just `current` when it is among them.
pub fn select_best<D: Copy + PartialEq>(rated: &[(D, f64)], current: Option<D>) -> Vec<D> {
    let Some(max) = rated.iter().map(|(_, s)| *s).reduce(f64::max) else {
        return Vec::new();
    };
    let top: Vec<D> = rated.iter().filter(|(_, s)| *s >= max - SCORE_EPSILON).map(|(d, _)| *d).collect();
    match current {
        Some(c) if top.contains(&c) => vec![c],
        _ => top,
    }
}

/// Stack indices of the open threads the new clause should continue.
pub fn select_threads(center: &TempCenter, s2: &ClauseAnnotation, lexicon: &Lexicon, w: &PreferenceWeights) -> Vec<usize> {
    let rated: Vec<(usize, f64)> = center
        .fwd_center
        .iter()
        .enumerate()
        .map(|(i, t)| (i, rate_thread(t, s2, lexicon, i == center.bkwd_center, w)))
        .collect();
    select_best(&rated, Some(center.bkwd_center))
}

/// Appends the clause at `index` to open thread `slot`; threads above it on
/// the stack are closed.
pub fn attach_to_thread(center: &TempCenter, slot: usize, index: usize, s2: &ClauseAnnotation) -> Result<TempCenter> {
    if slot >= center.fwd_center.len() {
        return Err(Error::ThreadNotOpen(slot));
    }
    let mut next = center.clone();
    let closed = next.fwd_center.split_off(slot + 1);
    next.closed_threads.extend(closed);
    next.fwd_center[slot].push(index, s2);
    next.bkwd_center = slot;
    Ok(next)
}

/// Opens a thread for the clause at `index`. Allowed for past perfect
/// clauses (flashbacks) and when no attachment is feasible.
pub fn start_new_thread(center: &TempCenter, index: usize, s2: &ClauseAnnotation, feasible_empty: bool) -> Result<TempCenter> {
    if !(s2.is_past_perfect() || feasible_empty) {
        return Err(Error::NewThreadNotPermitted);
    }
    Ok(push_thread(center, index, s2))
}

pub(crate) fn push_thread(center: &TempCenter, index: usize, s2: &ClauseAnnotation) -> TempCenter {
    let mut next = center.clone();
    next.fwd_center.push(Thread::new(next.next_id, index, s2));
    next.next_id += 1;
    next.bkwd_center = next.fwd_center.len() - 1;
    next
}
