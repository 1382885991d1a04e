//! Seeded synthetic corpora for null and power checks.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng as _;
use rand_distr::{Exp1, Zipf};
use serde::{Deserialize, Serialize};

use crate::corpus::{Alphabet, Corpus, Sentence, Symbol, Word};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SynthKind {
    /// Independent uniform graphemes.
    UniformIid,
    /// First-order chain whose rows lean towards a fixed random successor.
    MarkovBiased,
    /// Words from a random lexicon with frequency ∝ 1/rank.
    ZipfWords,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub kind: SynthKind,
    pub vocab_size: usize,
    pub sentences: usize,
    /// Inclusive length range, in graphemes (in words for `ZipfWords`).
    pub min_length: usize,
    pub max_length: usize,
    /// Only used by `MarkovBiased`.
    pub bias_strength: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn new(kind: SynthKind, vocab_size: usize, sentences: usize, seed: u64) -> Self {
        Self {
            kind,
            vocab_size,
            sentences,
            min_length: 5,
            max_length: 15,
            bias_strength: 0.9,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParameter(msg));
        if self.vocab_size < 2 || self.vocab_size > MAX_VOCAB {
            return fail(format!(
                "vocab_size must lie in 2..={MAX_VOCAB}, got {}",
                self.vocab_size
            ));
        }
        if self.sentences == 0 {
            return fail("sentences must be at least 1".into());
        }
        if self.min_length == 0 || self.min_length > self.max_length {
            return fail(format!(
                "sentence length range {}..={} is invalid",
                self.min_length, self.max_length
            ));
        }
        if !(0.0..=1.0).contains(&self.bias_strength) {
            return fail(format!(
                "bias_strength must lie in [0, 1], got {}",
                self.bias_strength
            ));
        }
        Ok(())
    }
}

const MAX_VOCAB: usize = 26 + 25 + 20_000;
const WORD_LENGTH: std::ops::RangeInclusive<usize> = 2..=6;
const LEXICON_SIZE: usize = 1000;

/// Letters only, so generated files survive the plain-text normalization:
/// `a`–`z`, then Greek lowercase, then CJK ideographs.
pub fn grapheme_name(i: usize) -> char {
    let code = match i {
        0..=25 => 0x61 + i,
        26..=50 => 0x3B1 + (i - 26),
        _ => 0x4E00 + (i - 51),
    };
    char::from_u32(code as u32).expect("valid scalar value")
}

fn alphabet(vocab_size: usize) -> Alphabet {
    let mut a = Alphabet::new();
    for i in 0..vocab_size {
        a.intern(&grapheme_name(i).to_string());
    }
    a
}

/// Cuts a grapheme sequence into words of 2–6 graphemes (the last may be
/// shorter).
fn into_words(graphemes: Vec<Symbol>, rng: &mut rng::Rng) -> Vec<Word> {
    let mut words = Vec::new();
    let mut rest = &graphemes[..];
    while !rest.is_empty() {
        let len = rng.random_range(WORD_LENGTH).min(rest.len());
        let (head, tail) = rest.split_at(len);
        words.push(Word::new(head.to_vec()).expect("non-empty"));
        rest = tail;
    }
    words
}

pub fn generate(spec: &SynthSpec) -> Result<Corpus> {
    spec.validate()?;
    let mut rng = rng::seeded(spec.seed);
    let v = spec.vocab_size;
    let lengths = spec.min_length..=spec.max_length;
    let symbol = |i: usize| Symbol(i as u32);

    let sentences: Vec<Vec<Word>> = match spec.kind {
        SynthKind::UniformIid => (0..spec.sentences)
            .map(|_| {
                let len = rng.random_range(lengths.clone());
                let g = (0..len).map(|_| symbol(rng.random_range(0..v))).collect();
                into_words(g, &mut rng)
            })
            .collect(),
        SynthKind::MarkovBiased => {
            // A random successor function, not a permutation: a stationary chain
            // has the same conditional entropy in both directions, so the
            // directional signal comes from many-to-one transitions seen from a
            // uniform start.
            let successor: Vec<usize> = (0..v).map(|_| rng.random_range(0..v)).collect();
            let rows: Vec<WeightedIndex<f64>> = (0..v)
                .map(|i| {
                    let draws: Vec<f64> = (0..v).map(|_| rng.sample::<f64, _>(Exp1)).collect();
                    let total: f64 = draws.iter().sum();
                    let mut row: Vec<f64> = draws
                        .iter()
                        .map(|d| (1.0 - spec.bias_strength) * d / total)
                        .collect();
                    row[successor[i]] += spec.bias_strength;
                    WeightedIndex::new(row).expect("positive row mass")
                })
                .collect();
            (0..spec.sentences)
                .map(|_| {
                    let len = rng.random_range(lengths.clone());
                    let mut state = rng.random_range(0..v);
                    let mut g = Vec::with_capacity(len);
                    g.push(symbol(state));
                    for _ in 1..len {
                        state = rows[state].sample(&mut rng);
                        g.push(symbol(state));
                    }
                    into_words(g, &mut rng)
                })
                .collect()
        }
        SynthKind::ZipfWords => {
            let lexicon: Vec<Word> = (0..LEXICON_SIZE)
                .map(|_| {
                    let len = rng.random_range(WORD_LENGTH);
                    Word::new((0..len).map(|_| symbol(rng.random_range(0..v))).collect())
                        .expect("non-empty")
                })
                .collect();
            let zipf = Zipf::new(LEXICON_SIZE as f64, 1.0).expect("valid Zipf parameters");
            (0..spec.sentences)
                .map(|_| {
                    let len = rng.random_range(lengths.clone());
                    (0..len)
                        .map(|_| lexicon[zipf.sample(&mut rng) as usize - 1].clone())
                        .collect()
                })
                .collect()
        }
    };

    let sentences = sentences
        .into_iter()
        .enumerate()
        .map(|(i, words)| Sentence::new(words, i + 1).expect("non-empty"))
        .collect();
    let id = format!(
        "synth-{}",
        serde_json::to_value(spec.kind).unwrap().as_str().unwrap()
    );
    Ok(Corpus::new(id, sentences, alphabet(v)))
}
