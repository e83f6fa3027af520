//! Fills in timex values: named entities from a lexicon, adverbials from
//! a fixed table, and relative values against their anchor or the
//! corpus reference date.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{AnnotatedPair, NeType, Side, Span};
use crate::values::{
    resolve_against, resolve_relative, CalendarDate, CodedAdverbial, TemporalValue,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct NeLexiconError {
    pub line: usize,
    pub message: String,
}

/// Phrase to value table for named entities that denote a time, such as
/// well-known historical events.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NeLexicon {
    entries: BTreeMap<String, (NeType, TemporalValue)>,
}

pub(crate) fn phrase_key(s: &str) -> String {
    s.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .trim_end_matches(['.', ',', ';', ':'])
        .to_lowercase()
}

impl NeLexicon {
    /// Reads `phrase<TAB>type<TAB>value` lines; `#` starts a comment.
    pub fn parse(src: &str) -> Result<Self, NeLexiconError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in src.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim_end();
            if line.trim().is_empty() {
                continue;
            }
            let err = |message: String| NeLexiconError {
                line: i + 1,
                message,
            };
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(err(format!("expected 3 tab-separated columns, found {}", cols.len())));
            }
            let ne_type: NeType = cols[1].parse().map_err(|e| err(format!("{e}")))?;
            let value: TemporalValue = cols[2].trim().parse().map_err(|e| err(format!("{e}")))?;
            entries.insert(phrase_key(cols[0]), (ne_type, value));
        }
        Ok(NeLexicon { entries })
    }

    pub fn lookup(&self, phrase: &str) -> Option<&(NeType, TemporalValue)> {
        self.entries.get(&phrase_key(phrase))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Surface forms of temporal adverbials and their codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdverbialTable {
    entries: BTreeMap<String, CodedAdverbial>,
}

const LEADING_FUNCTION_WORDS: &[&str] = &["the", "in", "on", "at", "for", "during", "since", "of"];

impl AdverbialTable {
    pub fn standard() -> Self {
        use CodedAdverbial as C;
        let days = ["monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"];
        let mut entries: BTreeMap<String, CodedAdverbial> = days
            .iter()
            .enumerate()
            .map(|(i, d)| (d.to_string(), C::Weekday(i as u8 + 1)))
            .collect();
        let fixed = [
            ("yesterday", C::relative_days(-1)),
            ("day before yesterday", C::relative_days(-2)),
            ("two days ago", C::relative_days(-2)),
            ("everyday", C::Often),
            ("every day", C::Often),
            ("often", C::Often),
            ("someday", C::Psd),
            ("many days", C::Pmd),
            ("morning", C::Morning),
            ("evening", C::Night),
            ("afternoon", C::Afternoon),
        ];
        entries.extend(fixed.into_iter().map(|(k, v)| (k.to_string(), v)));
        AdverbialTable { entries }
    }

    pub fn surface_forms(&self) -> impl Iterator<Item = (&str, &CodedAdverbial)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Looks a phrase up after dropping leading articles and prepositions.
    pub fn lookup(&self, phrase: &str) -> Option<CodedAdverbial> {
        let key = phrase_key(phrase);
        let all: Vec<&str> = key.split(' ').collect();
        let mut words = all.as_slice();
        loop {
            if let Some(code) = self.entries.get(&words.join(" ")) {
                return Some(*code);
            }
            match words.split_first() {
                Some((first, rest)) if LEADING_FUNCTION_WORDS.contains(first) && !rest.is_empty() => {
                    words = rest
                }
                _ => return None,
            }
        }
    }
}

impl Default for AdverbialTable {
    fn default() -> Self {
        Self::standard()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalized {
    pub pair: AnnotatedPair,
    pub trace: Vec<String>,
}

fn is_relative(v: Option<&TemporalValue>) -> bool {
    matches!(v, Some(TemporalValue::Code(CodedAdverbial::Relative { .. })))
}

/// Fills missing or symbolic timex values. Spans that match nothing are
/// left alone and reported in the trace.
pub fn normalize_pair(
    pair: &AnnotatedPair,
    ne_lexicon: &NeLexicon,
    adverbials: &AdverbialTable,
    reference: &CalendarDate,
) -> Normalized {
    let mut out = pair.clone();
    let mut trace = Vec::new();

    for side in [Side::Text, Side::Hypothesis] {
        for span in &mut out.segment_mut(side).spans {
            match span {
                Span::Entity(ne) => match ne_lexicon.lookup(&ne.text) {
                    Some((ne_type, value)) => {
                        if ne.value.is_some_and(|v| v != *value) {
                            trace.push(format!("{side}: entity `{}` revalued to {value}", ne.text));
                        }
                        ne.ne_type = *ne_type;
                        ne.value = Some(*value);
                    }
                    None if ne.value.is_none() => {
                        trace.push(format!("{side}: entity `{}` not in lexicon", ne.text))
                    }
                    None => {}
                },
                Span::Timex(t) if t.value.is_none() => match adverbials.lookup(&t.text) {
                    Some(code) => t.value = Some(TemporalValue::Code(code)),
                    None => trace.push(format!("{side}: no value for timex {} `{}`", t.tid, t.text)),
                },
                _ => {}
            }
        }
    }

    // Relative values may hang off other relative values, so resolve in
    // passes until nothing moves.
    loop {
        let values: BTreeMap<String, Option<TemporalValue>> = out
            .timexes()
            .iter()
            .map(|t| (t.tid.to_string(), t.value.copied()))
            .collect();
        let mut progressed = false;
        for side in [Side::Text, Side::Hypothesis] {
            for span in &mut out.segment_mut(side).spans {
                let Span::Timex(t) = span else { continue };
                let Some(TemporalValue::Code(code @ CodedAdverbial::Relative { .. })) = t.value else {
                    continue;
                };
                let resolved = match &t.anchor {
                    Some(a) => match values.get(a).copied().flatten() {
                        Some(anchor) if !is_relative(Some(&anchor)) => resolve_against(&code, &anchor),
                        _ => continue,
                    },
                    None => resolve_relative(&code, Some(reference)),
                };
                match resolved {
                    Ok(v) if t.ttype.admits(&v) => {
                        t.value = Some(v);
                        progressed = true;
                    }
                    Ok(v) => trace.push(format!("{side}: {} resolves to {v}, not a {}", t.tid, t.ttype)),
                    Err(e) => trace.push(format!("{side}: cannot resolve {}: {e}", t.tid)),
                }
            }
        }
        if !progressed {
            break;
        }
    }
    for t in out.timexes() {
        if is_relative(t.value) {
            trace.push(format!("{}: {} left relative", t.side, t.tid));
        }
    }
    Normalized { pair: out, trace }
}
