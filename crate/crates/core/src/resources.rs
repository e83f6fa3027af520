//! Word lists, lexicons and corpora bundled with the crate.

use crate::annotation::{AdverbialTable, NeLexicon};
use crate::lexicon::{Lexicon, Stoplist};

pub const SEED_LEXICON: &str = include_str!("../data/seed_lexicon.tsv");
pub const STOPLIST: &str = include_str!("../data/stoplist.txt");
pub const NE_LEXICON: &str = include_str!("../data/ne_lexicon.tsv");
/// Worked pairs with their expected labels.
pub const GOLDEN_CORPUS: &str = include_str!("../data/golden.xml");
/// One FALSE variant for most golden pairs.
pub const NEGATIVE_CORPUS: &str = include_str!("../data/negatives.xml");

/// Everything the engine looks words and phrases up in.
#[derive(Debug, Clone, Default)]
pub struct Resources {
    pub lexicon: Lexicon,
    pub stoplist: Stoplist,
    pub ne_lexicon: NeLexicon,
    pub adverbials: AdverbialTable,
}

impl Resources {
    pub fn embedded() -> Self {
        Resources {
            lexicon: Lexicon::parse(SEED_LEXICON).expect("bundled lexicon parses"),
            stoplist: Stoplist::parse(STOPLIST),
            ne_lexicon: NeLexicon::parse(NE_LEXICON).expect("bundled entity lexicon parses"),
            adverbials: AdverbialTable::standard(),
        }
    }
}
