//! Rule-based temporal entailment between a text and a hypothesis
//! annotated with events, time expressions and temporal links.

pub mod allen;
pub mod annotation;
pub mod eval;
pub mod lexicon;
pub mod resources;
pub mod rules;
pub mod values;
