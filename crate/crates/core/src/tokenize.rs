//! Flattening a corpus into per-sentence grapheme streams.
//!
//! Word boundaries never appear as tokens. They travel alongside each
//! sentence as a list of word start offsets so that boundary diagnostics can
//! still see them after tokenization and reversal.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::corpus::{Alphabet, Corpus, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenizationMode {
    /// Graphemes in source order.
    Baseline,
    /// Graphemes reversed inside each word, then word order reversed.
    Visual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReadingOrder {
    AsRead,
    Reversed,
}

impl ReadingOrder {
    pub fn toggled(self) -> Self {
        match self {
            ReadingOrder::AsRead => ReadingOrder::Reversed,
            ReadingOrder::Reversed => ReadingOrder::AsRead,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSentence {
    graphemes: Vec<Symbol>,
    /// Offsets of word starts; `None` once boundaries are no longer meaningful.
    word_starts: Option<Vec<usize>>,
    /// Position of the sentence in the originating corpus.
    pub index: usize,
}

impl TokenSentence {
    /// # Panics
    /// If `graphemes` is empty or `word_starts` is not a strictly increasing
    /// list starting at 0 and bounded by the sentence length.
    pub fn new(graphemes: Vec<Symbol>, word_starts: Option<Vec<usize>>, index: usize) -> Self {
        assert!(!graphemes.is_empty(), "token sentences are never empty");
        if let Some(starts) = &word_starts {
            assert_eq!(starts.first(), Some(&0));
            assert!(starts.windows(2).all(|w| w[0] < w[1]));
            assert!(*starts.last().unwrap() < graphemes.len());
        }
        Self {
            graphemes,
            word_starts,
            index,
        }
    }

    pub fn graphemes(&self) -> &[Symbol] {
        &self.graphemes
    }

    pub fn len(&self) -> usize {
        self.graphemes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn word_starts(&self) -> Option<&[usize]> {
        self.word_starts.as_deref()
    }

    /// Words recovered from the boundary metadata.
    pub fn words(&self) -> Option<impl Iterator<Item = &[Symbol]> + '_> {
        let starts = self.word_starts.as_ref()?;
        let ends = starts[1..]
            .iter()
            .copied()
            .chain(std::iter::once(self.len()));
        Some(
            starts
                .iter()
                .zip(ends)
                .map(move |(&s, e)| &self.graphemes[s..e]),
        )
    }

    pub fn reversed(&self) -> Self {
        let len = self.len();
        let word_starts = self.word_starts.as_ref().map(|starts| {
            starts[1..]
                .iter()
                .copied()
                .chain(std::iter::once(len))
                .rev()
                .map(|end| len - end)
                .collect()
        });
        Self {
            graphemes: self.graphemes.iter().rev().copied().collect(),
            word_starts,
            index: self.index,
        }
    }

    /// Replaces the grapheme sequence and drops the boundary metadata.
    pub(crate) fn with_graphemes(&self, graphemes: Vec<Symbol>) -> Self {
        debug_assert_eq!(graphemes.len(), self.len());
        Self {
            graphemes,
            word_starts: None,
            index: self.index,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenStream {
    sentences: Vec<TokenSentence>,
    pub order: ReadingOrder,
    pub mode: TokenizationMode,
    pub corpus_id: String,
    alphabet: Arc<Alphabet>,
}

impl TokenStream {
    pub fn new(
        sentences: Vec<TokenSentence>,
        order: ReadingOrder,
        mode: TokenizationMode,
        corpus_id: impl Into<String>,
        alphabet: Arc<Alphabet>,
    ) -> Self {
        Self {
            sentences,
            order,
            mode,
            corpus_id: corpus_id.into(),
            alphabet,
        }
    }

    /// Builds a baseline stream from literal grapheme strings, one word per
    /// sentence. Convenient for small examples.
    pub fn from_strings<S: AsRef<str>>(corpus_id: &str, sentences: &[Vec<S>]) -> Self {
        let mut alphabet = Alphabet::new();
        let sentences = sentences
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let graphemes = s.iter().map(|g| alphabet.intern(g.as_ref())).collect();
                TokenSentence::new(graphemes, Some(vec![0]), i)
            })
            .collect();
        Self::new(
            sentences,
            ReadingOrder::AsRead,
            TokenizationMode::Baseline,
            corpus_id,
            Arc::new(alphabet),
        )
    }

    pub fn sentences(&self) -> &[TokenSentence] {
        &self.sentences
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(TokenSentence::len).sum()
    }

    /// A stream over the same alphabet with different sentences.
    pub fn with_sentences(&self, sentences: Vec<TokenSentence>) -> Self {
        Self {
            sentences,
            order: self.order,
            mode: self.mode,
            corpus_id: self.corpus_id.clone(),
            alphabet: Arc::clone(&self.alphabet),
        }
    }

    /// Reverses every sentence and toggles the reading-order label.
    pub fn reversed(&self) -> Self {
        Self {
            sentences: self.sentences.iter().map(TokenSentence::reversed).collect(),
            order: self.order.toggled(),
            mode: self.mode,
            corpus_id: self.corpus_id.clone(),
            alphabet: Arc::clone(&self.alphabet),
        }
    }
}

pub fn tokenize(corpus: &Corpus, mode: TokenizationMode) -> TokenStream {
    let sentences = corpus
        .sentences()
        .iter()
        .enumerate()
        .map(|(index, sentence)| {
            let mut graphemes = Vec::with_capacity(sentence.grapheme_count());
            let mut starts = Vec::with_capacity(sentence.words().len());
            match mode {
                TokenizationMode::Baseline => {
                    for word in sentence.words() {
                        starts.push(graphemes.len());
                        graphemes.extend_from_slice(word.graphemes());
                    }
                }
                TokenizationMode::Visual => {
                    for word in sentence.words().iter().rev() {
                        starts.push(graphemes.len());
                        graphemes.extend(word.graphemes().iter().rev());
                    }
                }
            }
            TokenSentence::new(graphemes, Some(starts), index)
        })
        .collect();
    TokenStream::new(
        sentences,
        ReadingOrder::AsRead,
        mode,
        corpus.id.clone(),
        Arc::clone(corpus.alphabet()),
    )
}

pub fn reverse_stream(ts: &TokenStream) -> TokenStream {
    ts.reversed()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Sentence, Word};

    fn corpus(sentences: &[&[&str]]) -> Corpus {
        let mut alphabet = Alphabet::new();
        let sentences = sentences
            .iter()
            .enumerate()
            .map(|(i, words)| {
                let words = words
                    .iter()
                    .map(|w| {
                        Word::new(w.chars().map(|c| alphabet.intern(&c.to_string())).collect())
                            .unwrap()
                    })
                    .collect();
                Sentence::new(words, i + 1).unwrap()
            })
            .collect();
        Corpus::new("t", sentences, alphabet)
    }

    fn spell(ts: &TokenStream, i: usize) -> String {
        ts.sentences()[i]
            .graphemes()
            .iter()
            .map(|&g| ts.alphabet().resolve(g))
            .collect()
    }

    fn words(ts: &TokenStream, i: usize) -> Vec<String> {
        ts.sentences()[i]
            .words()
            .unwrap()
            .map(|w| w.iter().map(|&g| ts.alphabet().resolve(g)).collect())
            .collect()
    }

    #[test]
    fn baseline_flattens() {
        let ts = tokenize(&corpus(&[&["ab", "cd"]]), TokenizationMode::Baseline);
        assert_eq!(spell(&ts, 0), "abcd");
        assert_eq!(ts.sentences()[0].word_starts(), Some(&[0, 2][..]));
        assert_eq!(ts.order, ReadingOrder::AsRead);
    }

    #[test]
    fn visual_reverses_words_then_order() {
        let ts = tokenize(
            &corpus(&[&["ab", "cd"], &["ab", "c"]]),
            TokenizationMode::Visual,
        );
        assert_eq!(spell(&ts, 0), "dcba");
        assert_eq!(spell(&ts, 1), "cba");
        assert_eq!(words(&ts, 1), vec!["c", "ba"]);
    }

    #[test]
    fn reversal_remaps_boundaries() {
        let ts = tokenize(&corpus(&[&["abc", "d", "ef"]]), TokenizationMode::Baseline);
        let rev = reverse_stream(&ts);
        assert_eq!(spell(&rev, 0), "fedcba");
        assert_eq!(words(&rev, 0), vec!["fe", "d", "cba"]);
        assert_eq!(rev.order, ReadingOrder::Reversed);
        assert_eq!(reverse_stream(&rev), ts);
    }

    #[test]
    fn single_grapheme_is_a_fixed_point() {
        let ts = TokenStream::from_strings("t", &[vec!["q"]]);
        let rev = reverse_stream(&ts);
        assert_eq!(rev.sentences(), ts.sentences());
        assert_eq!(rev.order, ReadingOrder::Reversed);
    }
}
