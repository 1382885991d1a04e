//! Grapheme n-gram count tables and smoothed conditional probabilities.
//!
//! Counting is per sentence with no padding: a sentence of length `L`
//! contributes `L - n + 1` prediction positions (none when `L < n`), and no
//! n-gram spans two sentences.

use std::collections::{BTreeMap, HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Alphabet, Symbol};
use crate::error::{Error, Result};
use crate::sum::ExactSum;
use crate::tokenize::TokenStream;

pub const DEFAULT_DISCOUNT: f64 = 0.75;
pub const DEFAULT_FLOOR_DIVISOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum Smoothing {
    /// Add-one smoothing over the training vocabulary.
    Laplace,
    /// Interpolated absolute discounting with a continuation distribution.
    /// Probabilities that would be zero are floored at
    /// `1 / (floor_divisor * distinct n-gram types)`.
    KneserNey { discount: f64, floor_divisor: f64 },
}

impl Smoothing {
    pub fn kneser_ney() -> Self {
        Smoothing::KneserNey {
            discount: DEFAULT_DISCOUNT,
            floor_divisor: DEFAULT_FLOOR_DIVISOR,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Smoothing::KneserNey {
            discount,
            floor_divisor,
        } = *self
        {
            if !(discount > 0.0 && discount < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "Kneser-Ney discount must lie in (0, 1), got {discount}"
                )));
            }
            if !(floor_divisor > 0.0 && floor_divisor.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "Kneser-Ney floor divisor must be positive, got {floor_divisor}"
                )));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            Smoothing::Laplace => "laplace",
            Smoothing::KneserNey { .. } => "kneser-ney",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct ContextStats {
    count: u64,
    /// Number of distinct tokens seen after this context.
    followers: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NGramCounts {
    order: usize,
    ngrams: HashMap<Box<[Symbol]>, u64>,
    contexts: HashMap<Box<[Symbol]>, ContextStats>,
    vocabulary: HashSet<Symbol>,
    continuation: HashMap<Symbol, u64>,
    distinct_types: u64,
    prediction_tokens: u64,
}

type RawCounts = (HashMap<Box<[Symbol]>, u64>, HashSet<Symbol>);

fn merge_raw(mut a: RawCounts, b: RawCounts) -> RawCounts {
    let (small, large) = if a.0.len() < b.0.len() {
        (a, b)
    } else {
        (b, a)
    };
    a = large;
    for (k, v) in small.0 {
        *a.0.entry(k).or_insert(0) += v;
    }
    a.1.extend(small.1);
    a
}

pub fn count_ngrams(ts: &TokenStream, n: usize) -> Result<NGramCounts> {
    if n < 2 {
        return Err(Error::InvalidOrder(n));
    }
    if ts.is_empty() {
        return Err(Error::EmptyStream);
    }
    // Integer counts merge associatively, so chunking cannot change the result.
    let (ngrams, vocabulary) = ts
        .sentences()
        .par_chunks(256)
        .map(|chunk| {
            let mut ngrams: HashMap<Box<[Symbol]>, u64> = HashMap::new();
            let mut vocab = HashSet::new();
            for sentence in chunk {
                let g = sentence.graphemes();
                vocab.extend(g.iter().copied());
                for window in g.windows(n) {
                    match ngrams.get_mut(window) {
                        Some(c) => *c += 1,
                        None => {
                            ngrams.insert(window.into(), 1);
                        }
                    }
                }
            }
            (ngrams, vocab)
        })
        .reduce(|| (HashMap::new(), HashSet::new()), merge_raw);

    let mut contexts: HashMap<Box<[Symbol]>, ContextStats> = HashMap::new();
    let mut continuation: HashMap<Symbol, u64> = HashMap::new();
    let mut prediction_tokens = 0;
    for (gram, &count) in &ngrams {
        let stats = contexts.entry(gram[..n - 1].into()).or_default();
        stats.count += count;
        stats.followers += 1;
        *continuation.entry(gram[n - 1]).or_insert(0) += 1;
        prediction_tokens += count;
    }
    Ok(NGramCounts {
        order: n,
        distinct_types: ngrams.len() as u64,
        ngrams,
        contexts,
        vocabulary,
        continuation,
        prediction_tokens,
    })
}

impl NGramCounts {
    pub fn order(&self) -> usize {
        self.order
    }

    /// count(c, w) for the n-gram `context ++ [token]`.
    pub fn count(&self, context: &[Symbol], token: Symbol) -> u64 {
        let mut gram = Vec::with_capacity(self.order);
        gram.extend_from_slice(context);
        gram.push(token);
        self.gram_count(&gram)
    }

    fn gram_count(&self, gram: &[Symbol]) -> u64 {
        self.ngrams.get(gram).copied().unwrap_or(0)
    }

    pub fn context_count(&self, context: &[Symbol]) -> u64 {
        self.contexts.get(context).map_or(0, |s| s.count)
    }

    /// |{w : count(c, w) > 0}|
    pub fn followers(&self, context: &[Symbol]) -> u64 {
        self.contexts.get(context).map_or(0, |s| s.followers)
    }

    /// |{c : count(c, w) > 0}|
    pub fn continuation_count(&self, token: Symbol) -> u64 {
        self.continuation.get(&token).copied().unwrap_or(0)
    }

    /// |{(c, w) : count(c, w) > 0}|
    pub fn distinct_types(&self) -> u64 {
        self.distinct_types
    }

    pub fn prediction_tokens(&self) -> u64 {
        self.prediction_tokens
    }

    pub fn vocabulary_size(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn in_vocabulary(&self, token: Symbol) -> bool {
        self.vocabulary.contains(&token)
    }

    /// Vocabulary in symbol order.
    pub fn vocabulary(&self) -> Vec<Symbol> {
        let mut v: Vec<_> = self.vocabulary.iter().copied().collect();
        v.sort_unstable();
        v
    }

    /// Contexts observed at least once, in symbol order.
    pub fn contexts(&self) -> Vec<&[Symbol]> {
        let mut v: Vec<&[Symbol]> = self.contexts.keys().map(|k| &k[..]).collect();
        v.sort_unstable();
        v
    }

    pub fn ngrams(&self) -> impl Iterator<Item = (&[Symbol], u64)> {
        self.ngrams.iter().map(|(k, &v)| (&k[..], v))
    }

    pub fn prob_laplace(&self, context: &[Symbol], token: Symbol) -> f64 {
        let mut gram = context.to_vec();
        gram.push(token);
        self.laplace_window(&gram)
    }

    pub fn prob_kneser_ney(
        &self,
        discount: f64,
        floor_divisor: f64,
        context: &[Symbol],
        token: Symbol,
    ) -> f64 {
        let mut gram = context.to_vec();
        gram.push(token);
        self.kneser_ney_window(discount, floor_divisor, &gram)
    }

    pub fn prob(&self, smoothing: &Smoothing, context: &[Symbol], token: Symbol) -> f64 {
        let mut gram = context.to_vec();
        gram.push(token);
        self.prob_window(smoothing, &gram)
    }

    /// Continuation probability of `token`; 0 when the table holds no n-grams.
    pub fn p_continuation(&self, token: Symbol) -> f64 {
        if self.distinct_types == 0 {
            return 0.0;
        }
        self.continuation_count(token) as f64 / self.distinct_types as f64
    }

    fn laplace_window(&self, gram: &[Symbol]) -> f64 {
        let (context, _) = gram.split_at(self.order - 1);
        let numerator = self.gram_count(gram) + 1;
        let denominator = self.context_count(context) + self.vocabulary.len() as u64;
        numerator as f64 / denominator as f64
    }

    fn kneser_ney_window(&self, discount: f64, floor_divisor: f64, gram: &[Symbol]) -> f64 {
        if self.distinct_types == 0 {
            // No n-gram at all was observed: nothing to discount or back off to.
            return 1.0 / self.vocabulary.len() as f64;
        }
        let (context, token) = gram.split_at(self.order - 1);
        let continuation = self.p_continuation(token[0]);
        let p = match self.contexts.get(context) {
            None => continuation,
            Some(stats) => {
                let total = stats.count as f64;
                let discounted = (self.gram_count(gram) as f64 - discount).max(0.0) / total;
                let lambda = discount * stats.followers as f64 / total;
                discounted + lambda * continuation
            }
        };
        if p > 0.0 {
            p
        } else {
            1.0 / (floor_divisor * self.distinct_types as f64)
        }
    }

    fn prob_window(&self, smoothing: &Smoothing, gram: &[Symbol]) -> f64 {
        match *smoothing {
            Smoothing::Laplace => self.laplace_window(gram),
            Smoothing::KneserNey {
                discount,
                floor_divisor,
            } => self.kneser_ney_window(discount, floor_divisor, gram),
        }
    }

    /// Total natural-log probability of one sentence and its number of
    /// prediction positions.
    pub fn score(&self, smoothing: &Smoothing, graphemes: &[Symbol]) -> SentenceScore {
        let mut total = ExactSum::new();
        let mut tokens = 0;
        for window in graphemes.windows(self.order) {
            total.add(self.prob_window(smoothing, window).ln());
            tokens += 1;
        }
        SentenceScore {
            index: 0,
            logprob: total.value(),
            tokens,
        }
    }

    /// Sorted, versioned dump of the table for debugging and golden tests.
    pub fn dump(&self, alphabet: &Alphabet) -> CountsDump {
        let spell = |s: &Symbol| alphabet.resolve(*s).to_owned();
        let mut vocabulary: Vec<String> = self.vocabulary.iter().map(spell).collect();
        vocabulary.sort();
        let entries: BTreeMap<(Vec<String>, String), u64> = self
            .ngrams
            .iter()
            .map(|(gram, &count)| {
                let context = gram[..self.order - 1].iter().map(spell).collect();
                ((context, spell(&gram[self.order - 1])), count)
            })
            .collect();
        CountsDump {
            format: COUNTS_DUMP_FORMAT.to_owned(),
            version: COUNTS_DUMP_VERSION,
            order: self.order,
            vocabulary,
            entries: entries
                .into_iter()
                .map(|((context, token), count)| DumpEntry {
                    context,
                    token,
                    count,
                })
                .collect(),
        }
    }
}

pub const COUNTS_DUMP_FORMAT: &str = "dirgram-ngram-counts";
pub const COUNTS_DUMP_VERSION: u32 = 1;

/// JSON model dump. Entries are sorted by (context, token) in code point
/// order; the vocabulary is sorted the same way.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountsDump {
    pub format: String,
    pub version: u32,
    pub order: usize,
    pub vocabulary: Vec<String>,
    pub entries: Vec<DumpEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DumpEntry {
    pub context: Vec<String>,
    pub token: String,
    pub count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentenceScore {
    /// Index of the sentence in the originating corpus.
    pub index: usize,
    /// Total log-probability in nats.
    pub logprob: f64,
    pub tokens: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossEntropyResult {
    /// Nats per prediction token.
    pub cross_entropy: f64,
    pub tokens: u64,
    pub perplexity: f64,
    pub per_sentence: Vec<SentenceScore>,
}

/// Average negative log-probability per prediction token of `ts` under the
/// model `counts`.
pub fn cross_entropy(
    ts: &TokenStream,
    counts: &NGramCounts,
    smoothing: &Smoothing,
) -> Result<CrossEntropyResult> {
    if ts.is_empty() {
        return Err(Error::EmptyStream);
    }
    smoothing.validate()?;
    let per_sentence: Vec<SentenceScore> = ts
        .sentences()
        .par_iter()
        .map(|s| SentenceScore {
            index: s.index,
            ..counts.score(smoothing, s.graphemes())
        })
        .collect();
    let tokens: u64 = per_sentence.iter().map(|s| s.tokens).sum();
    if tokens == 0 {
        return Err(Error::NoPredictionTokens { n: counts.order });
    }
    let total: ExactSum = per_sentence.iter().map(|s| s.logprob).collect();
    let cross_entropy = -total.value() / tokens as f64;
    Ok(CrossEntropyResult {
        cross_entropy,
        tokens,
        perplexity: cross_entropy.exp(),
        per_sentence,
    })
}
