//! Canonical in-memory text representation.
//!
//! A [`Corpus`] is an ordered list of sentences, each a list of words, each a
//! list of graphemes. Graphemes are interned into an [`Alphabet`] so that the
//! n-gram machinery works on small integer [`Symbol`]s; the alphabet is shared
//! (behind an `Arc`) by every stream derived from the corpus.

use std::fmt;
use std::sync::Arc;

use indexmap::IndexSet;

/// Word separator placeholder, never allowed in input.
pub const RESERVED_WORD_SEPARATOR: char = '\u{0001}';
/// Sentence pad symbols, never allowed in input.
pub const RESERVED_PAD_START: char = '\u{0002}';
pub const RESERVED_PAD_END: char = '\u{0003}';

pub fn is_reserved(c: char) -> bool {
    matches!(
        c,
        RESERVED_WORD_SEPARATOR | RESERVED_PAD_START | RESERVED_PAD_END
    )
}

/// Interned grapheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(pub u32);

impl Symbol {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Grapheme interner. Symbols are assigned in order of first appearance, so
/// the same input always yields the same numbering.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Alphabet {
    graphemes: IndexSet<String>,
}

impl Alphabet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, grapheme: &str) -> Symbol {
        if let Some(i) = self.graphemes.get_index_of(grapheme) {
            return Symbol(i as u32);
        }
        let (i, _) = self.graphemes.insert_full(grapheme.to_owned());
        Symbol(i as u32)
    }

    pub fn lookup(&self, grapheme: &str) -> Option<Symbol> {
        self.graphemes
            .get_index_of(grapheme)
            .map(|i| Symbol(i as u32))
    }

    pub fn resolve(&self, symbol: Symbol) -> &str {
        &self.graphemes[symbol.index()]
    }

    pub fn len(&self) -> usize {
        self.graphemes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphemes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Symbol, &str)> {
        self.graphemes
            .iter()
            .enumerate()
            .map(|(i, g)| (Symbol(i as u32), g.as_str()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word {
    graphemes: Vec<Symbol>,
}

impl Word {
    /// Returns `None` for an empty grapheme list.
    pub fn new(graphemes: Vec<Symbol>) -> Option<Self> {
        (!graphemes.is_empty()).then_some(Self { graphemes })
    }

    pub fn graphemes(&self) -> &[Symbol] {
        &self.graphemes
    }

    pub fn first(&self) -> Symbol {
        self.graphemes[0]
    }

    pub fn last(&self) -> Symbol {
        self.graphemes[self.graphemes.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.graphemes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    words: Vec<Word>,
    /// 1-based line number in the source file.
    pub origin_line: usize,
}

impl Sentence {
    /// Returns `None` when `words` is empty.
    pub fn new(words: Vec<Word>, origin_line: usize) -> Option<Self> {
        (!words.is_empty()).then_some(Self { words, origin_line })
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn grapheme_count(&self) -> usize {
        self.words.iter().map(Word::len).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub id: String,
    sentences: Vec<Sentence>,
    alphabet: Arc<Alphabet>,
}

impl Corpus {
    pub fn new(id: impl Into<String>, sentences: Vec<Sentence>, alphabet: Alphabet) -> Self {
        Self {
            id: id.into(),
            sentences,
            alphabet: Arc::new(alphabet),
        }
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn word_count(&self) -> usize {
        self.sentences.iter().map(|s| s.words.len()).sum()
    }

    pub fn grapheme_count(&self) -> usize {
        self.sentences.iter().map(Sentence::grapheme_count).sum()
    }

    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.sentences.iter().flat_map(|s| s.words.iter())
    }

    /// Renders a word back to text.
    pub fn spell(&self, word: &Word) -> String {
        word.graphemes
            .iter()
            .map(|&g| self.alphabet.resolve(g))
            .collect()
    }

    /// Keeps the first `max_graphemes` worth of whole sentences.
    pub fn truncated(&self, max_graphemes: usize) -> Corpus {
        let mut total = 0;
        let sentences = self
            .sentences
            .iter()
            .take_while(|s| {
                total += s.grapheme_count();
                total <= max_graphemes
            })
            .cloned()
            .collect();
        Corpus {
            id: self.id.clone(),
            sentences,
            alphabet: Arc::clone(&self.alphabet),
        }
    }
}

/// Plain-text rendering: one sentence per line, words separated by a space.
/// Reading the output back with the plain-text reader reproduces the corpus
/// as long as its graphemes contain no whitespace, punctuation or digits.
impl fmt::Display for Corpus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for sentence in &self.sentences {
            for (i, word) in sentence.words.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                for &g in &word.graphemes {
                    f.write_str(self.alphabet.resolve(g))?;
                }
            }
            f.write_str("\n")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_first_seen_order() {
        let mut a = Alphabet::new();
        assert_eq!(a.intern("q"), Symbol(0));
        assert_eq!(a.intern("o"), Symbol(1));
        assert_eq!(a.intern("q"), Symbol(0));
        assert_eq!(a.resolve(Symbol(1)), "o");
        assert_eq!(a.lookup("x"), None);
    }

    #[test]
    fn empty_words_and_sentences_are_rejected() {
        assert!(Word::new(vec![]).is_none());
        assert!(Sentence::new(vec![], 1).is_none());
    }

    #[test]
    fn display_renders_lines() {
        let mut a = Alphabet::new();
        let w1 = Word::new(vec![a.intern("a"), a.intern("b")]).unwrap();
        let w2 = Word::new(vec![a.intern("c")]).unwrap();
        let s = Sentence::new(vec![w1, w2], 1).unwrap();
        let c = Corpus::new("t", vec![s], a);
        assert_eq!(c.to_string(), "ab c\n");
        assert_eq!(c.word_count(), 2);
        assert_eq!(c.grapheme_count(), 3);
    }
}
