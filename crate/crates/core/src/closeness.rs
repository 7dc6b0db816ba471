//! Thesaurus-style word associations used to rate how semantically close a
//! new clause is to an existing thread.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Symmetric lemma-pair scores in `[0, 1]`. Identical lemmas score 1.0,
/// unlisted pairs 0.0.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    pairs: BTreeMap<(String, String), f64>,
}

fn key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

impl Lexicon {
    /// Parses `lemma<TAB>lemma<TAB>score` lines. Later duplicates replace
    /// earlier ones; a duplicate that disagrees with an entry given in the
    /// other orientation is reported in the returned warnings.
    pub fn parse(text: &str) -> Result<(Self, Vec<String>)> {
        let mut pairs: BTreeMap<(String, String), (f64, String, usize)> = BTreeMap::new();
        let mut warnings = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [a, b, score] = fields[..] else {
                return Err(Error::Syntax { line: i + 1, message: "expected `lemma<TAB>lemma<TAB>score`".into() });
            };
            let score: f64 = score
                .parse()
                .map_err(|_| Error::Syntax { line: i + 1, message: format!("bad score `{score}`") })?;
            if !(0.0..=1.0).contains(&score) {
                return Err(Error::Syntax { line: i + 1, message: format!("score {score} outside [0,1]") });
            }
            let k = key(a, b);
            if let Some((old, first, line_no)) = pairs.get(&k) {
                if first != a && *old != score {
                    warnings.push(format!(
                        "line {}: `{a} {b}` = {score} disagrees with line {line_no} ({old}); using {score}",
                        i + 1
                    ));
                }
            }
            pairs.insert(k, (score, a.to_string(), i + 1));
        }
        let pairs = pairs.into_iter().map(|(k, (s, _, _))| (k, s)).collect();
        Ok((Lexicon { pairs }, warnings))
    }

    pub fn insert(&mut self, a: &str, b: &str, score: f64) {
        self.pairs.insert(key(a, b), score.clamp(0.0, 1.0));
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, f64)> {
        self.pairs.iter().map(|((a, b), s)| (a.as_str(), b.as_str(), *s))
    }

    pub fn closeness(&self, a: &str, b: &str) -> f64 {
        if a == b {
            return 1.0;
        }
        self.pairs.get(&key(a, b)).copied().unwrap_or(0.0)
    }
}

/// Strongest single link between the clause's words and the thread's words.
pub fn dcu_thread_closeness<'a, I>(lexicon: &Lexicon, words: &[String], thread_words: I) -> f64
where
    I: IntoIterator<Item = &'a String>,
{
    if words.is_empty() {
        return 0.0;
    }
    thread_words
        .into_iter()
        .flat_map(|t| words.iter().map(move |w| lexicon.closeness(w, t)))
        .fold(0.0, f64::max)
}
