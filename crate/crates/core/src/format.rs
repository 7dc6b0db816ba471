//! Discourse files: one `clause key=value ...` record per line.
//!
//! ```text
//! # John fell because Mary pushed him.
//! clause id=e1 tense=past aspect=simple sem=event words=john,fall
//! clause id=e2 tense=past aspect=simple sem=event cue=because words=mary,push text="because Mary pushed him"
//! ```

use crate::error::{Error, Result};
use crate::model::ClauseAnnotation;

const KEYS: [&str; 8] = ["id", "tense", "aspect", "sem", "cue", "temprel", "words", "text"];

/// Splits a record into `key=value` tokens; `text` values may be quoted
/// with `\"` and `\\` escapes.
fn tokenize(line: &str) -> std::result::Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    let mut chars = line.chars().peekable();
    loop {
        while chars.next_if(|c| c.is_whitespace()).is_some() {}
        if chars.peek().is_none() {
            return Ok(out);
        }
        let mut key = String::new();
        while let Some(c) = chars.next_if(|c| *c != '=' && !c.is_whitespace()) {
            key.push(c);
        }
        if chars.next() != Some('=') {
            return Err(format!("expected `key=value`, found `{key}`"));
        }
        let mut value = String::new();
        if chars.next_if_eq(&'"').is_some() {
            loop {
                match chars.next() {
                    Some('"') => break,
                    Some('\\') => match chars.next() {
                        Some(c @ ('"' | '\\')) => value.push(c),
                        Some('n') => value.push('\n'),
                        other => return Err(format!("bad escape `\\{}`", other.map(String::from).unwrap_or_default())),
                    },
                    Some(c) => value.push(c),
                    None => return Err(format!("unterminated quote in `{key}`")),
                }
            }
            if chars.peek().is_some_and(|c| !c.is_whitespace()) {
                return Err(format!("junk after quoted value of `{key}`"));
            }
        } else {
            while let Some(c) = chars.next_if(|c| !c.is_whitespace()) {
                value.push(c);
            }
        }
        out.push((key, value));
    }
}

fn parse_record(rest: &str) -> std::result::Result<ClauseAnnotation, String> {
    let mut fields: [Option<String>; 8] = Default::default();
    for (key, value) in tokenize(rest)? {
        let slot = KEYS.iter().position(|k| *k == key).ok_or_else(|| format!("unknown key `{key}`"))?;
        if fields[slot].replace(value).is_some() {
            return Err(format!("repeated key `{key}`"));
        }
    }
    let [id, tense, aspect, sem, cue, temprel, words, text] = fields;
    let required = |v: Option<String>, k: &str| v.ok_or_else(|| format!("missing `{k}`"));
    let mut clause = ClauseAnnotation::new(
        required(id, "id")?,
        required(tense, "tense")?.parse()?,
        required(aspect, "aspect")?.parse()?,
        required(sem, "sem")?.parse()?,
    );
    clause.cue = cue;
    clause.temp_expr = temprel.map(|t| t.parse()).transpose()?;
    if let Some(words) = words {
        if words.split(',').any(str::is_empty) {
            return Err(format!("empty word in `words={words}`"));
        }
        clause.words = words.split(',').map(String::from).collect();
    }
    clause.text = text;
    Ok(clause)
}

/// Parses a discourse file. Lines starting with `#` are comments.
pub fn parse_discourse(text: &str) -> Result<Vec<ClauseAnnotation>> {
    let mut clauses = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let syntax = |message: String| Error::Syntax { line: i + 1, message };
        let rest = line
            .strip_prefix("clause")
            .filter(|r| r.is_empty() || r.starts_with(char::is_whitespace))
            .ok_or_else(|| syntax("records must start with `clause`".into()))?;
        clauses.push(parse_record(rest).map_err(syntax)?);
    }
    Ok(clauses)
}

fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn render_clause(c: &ClauseAnnotation) -> String {
    let mut line = format!("clause id={} tense={} aspect={} sem={}", c.id, c.tense, c.syn_aspect, c.sem_aspect);
    if let Some(cue) = &c.cue {
        line.push_str(&format!(" cue={cue}"));
    }
    if let Some(tx) = &c.temp_expr {
        line.push_str(&format!(" temprel={tx}"));
    }
    if !c.words.is_empty() {
        line.push_str(&format!(" words={}", c.words.join(",")));
    }
    if let Some(text) = &c.text {
        line.push_str(&format!(" text={}", quote(text)));
    }
    line
}

pub fn render_discourse(clauses: &[ClauseAnnotation]) -> String {
    clauses.iter().map(|c| render_clause(c) + "\n").collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data;
    use crate::model::{CoreRelation, SemanticAspect, SyntacticAspect, Tense, TxAnchor};
    use proptest::prelude::*;

    #[test]
    fn parses_full_record() {
        let d = parse_discourse(
            "# comment\n\nclause id=e2 tense=past aspect=perf_prog sem=activity cue=because temprel=precede@e1 words=a,b text=\"say \\\"hi\\\" # not a comment\"\n",
        )
        .unwrap();
        let c = &d[0];
        assert_eq!(c.id, "e2");
        assert_eq!(c.syn_aspect, SyntacticAspect::PerfectProgressive);
        assert_eq!(c.sem_aspect, SemanticAspect::Activity);
        assert_eq!(c.cue.as_deref(), Some("because"));
        let tx = c.temp_expr.as_ref().unwrap();
        assert_eq!(tx.relation, CoreRelation::Precede);
        assert_eq!(tx.anchor, Some(TxAnchor::Id("e1".into())));
        assert_eq!(c.words, ["a", "b"]);
        assert_eq!(c.text.as_deref(), Some("say \"hi\" # not a comment"));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            "clause id=e1 tense=past aspect=simple sem=event colour=red",
            "clause id=e1 tense=past aspect=simple",
            "clause id=e1 tense=then aspect=simple sem=event",
            "clause id=e1 id=e2 tense=past aspect=simple sem=event",
            "clause id=e1 tense=past aspect=simple sem=event text=\"open",
            "clause id=e1 tense=past aspect=simple sem=event words=a,,b",
            "sentence id=e1 tense=past aspect=simple sem=event",
            "clause id=e1 tense=past aspect=simple sem=event temprel=cause",
        ];
        for case in cases {
            let text = format!("# header\n{case}\n");
            match parse_discourse(&text) {
                Err(Error::Syntax { line: 2, .. }) => {}
                other => panic!("{case}: {other:?}"),
            }
        }
    }

    #[test]
    fn shipped_examples_round_trip() {
        for (name, text) in data::EXAMPLES {
            let d = parse_discourse(text).unwrap();
            assert!(!d.is_empty(), "{name}");
            assert_eq!(parse_discourse(&render_discourse(&d)).unwrap(), d, "{name}");
        }
    }

    fn clause_strategy() -> impl Strategy<Value = ClauseAnnotation> {
        let word = "[a-z]{1,6}";
        (
            "e[0-9]{1,2}",
            prop::sample::select(Tense::ALL.to_vec()),
            prop::sample::select(SyntacticAspect::ALL.to_vec()),
            prop::sample::select(SemanticAspect::ALL.to_vec()),
            prop::option::of(prop::sample::select(vec!["because", "meanwhile", "and"])),
            prop::option::of((prop::sample::select(CoreRelation::ALL.to_vec()), prop::option::of(prop::bool::ANY))),
            prop::collection::vec(word, 0..4),
            prop::option::of("[ -~]{0,20}"),
        )
            .prop_map(|(id, tense, aspect, sem, cue, tx, words, text)| {
                let mut c = ClauseAnnotation::new(id, tense, aspect, sem).with_words(words);
                c.cue = cue.map(String::from);
                c.text = text;
                if let Some((rel, anchor)) = tx {
                    let anchor = anchor.map(|tf| if tf { TxAnchor::TemporalFocus } else { TxAnchor::Id("e0".into()) });
                    c = c.with_temp_expr(rel, anchor);
                }
                c
            })
    }

    proptest! {
        #[test]
        fn render_then_parse_is_identity(d in prop::collection::vec(clause_strategy(), 0..5)) {
            prop_assert_eq!(parse_discourse(&render_discourse(&d)).unwrap(), d);
        }
    }
}
