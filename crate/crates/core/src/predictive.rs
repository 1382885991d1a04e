//! Held-out reading-direction classification.
//!
//! Directional models are fit on a random sentence split; each held-out
//! sentence is labelled LTR when the LTR model gives it strictly higher
//! log-probability than the RTL model gives its reversal, RTL otherwise.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::direction::directional_delta_between;
use crate::error::{Error, Result};
use crate::ngram::{count_ngrams, Smoothing};
use crate::rng;
use crate::tokenize::TokenStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Direction {
    #[serde(alias = "ltr")]
    Ltr,
    #[serde(alias = "rtl")]
    Rtl,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Direction::Ltr => "LTR",
            Direction::Rtl => "RTL",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.8,
            seed: 1,
        }
    }
}

pub const MIN_SPLIT_SENTENCES: usize = 5;

/// Uniform random partition by sentence. The training side receives
/// `round(train_fraction * S)` sentences, clamped so both sides are
/// non-empty; both sides keep corpus order.
pub fn split_corpus(ts: &TokenStream, spec: &SplitSpec) -> Result<(TokenStream, TokenStream)> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "train fraction must lie in (0, 1), got {}",
            spec.train_fraction
        )));
    }
    let total = ts.len();
    if total < MIN_SPLIT_SENTENCES {
        return Err(Error::TooFewSentences {
            needed: MIN_SPLIT_SENTENCES,
            got: total,
        });
    }
    let train_size = ((spec.train_fraction * total as f64).round() as usize).clamp(1, total - 1);
    let mut order: Vec<usize> = (0..total).collect();
    order.shuffle(&mut rng::seeded(spec.seed));
    let mut in_train = vec![false; total];
    for &i in &order[..train_size] {
        in_train[i] = true;
    }
    let (train, test): (Vec<_>, Vec<_>) =
        ts.sentences().iter().zip(&in_train).partition(|(_, &t)| t);
    let collect = |side: Vec<(&crate::tokenize::TokenSentence, &bool)>| {
        ts.with_sentences(side.into_iter().map(|(s, _)| s.clone()).collect())
    };
    Ok((collect(train), collect(test)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentencePrediction {
    pub index: usize,
    pub l_ltr: f64,
    pub l_rtl: f64,
    pub predicted: Direction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionOutcome {
    pub per_sentence: Vec<SentencePrediction>,
    pub accuracy: f64,
    pub gold: Direction,
    pub n: usize,
    pub test_sentence_count: usize,
    /// Test sentences shorter than `n`, left out of the accuracy.
    pub excluded_short: usize,
    /// Δ of the test set under the training-set models.
    pub delta_test: f64,
}

pub fn classify(l_ltr: f64, l_rtl: f64) -> Direction {
    if l_ltr > l_rtl {
        Direction::Ltr
    } else {
        Direction::Rtl
    }
}

pub fn predict_directions(
    train: &TokenStream,
    test: &TokenStream,
    n: usize,
    smoothing: &Smoothing,
    gold: Direction,
) -> Result<PredictionOutcome> {
    if train.is_empty() || test.is_empty() {
        return Err(Error::EmptyStream);
    }
    smoothing.validate()?;
    let train_rtl = train.reversed();
    let (ltr, rtl) = rayon::join(|| count_ngrams(train, n), || count_ngrams(&train_rtl, n));
    let (ltr, rtl) = (ltr?, rtl?);

    let per_sentence: Vec<SentencePrediction> = test
        .sentences()
        .par_iter()
        .filter(|s| s.len() >= n)
        .map(|s| {
            let l_ltr = ltr.score(smoothing, s.graphemes()).logprob;
            let l_rtl = rtl.score(smoothing, s.reversed().graphemes()).logprob;
            SentencePrediction {
                index: s.index,
                l_ltr,
                l_rtl,
                predicted: classify(l_ltr, l_rtl),
            }
        })
        .collect();
    if per_sentence.is_empty() {
        return Err(Error::NoPredictionTokens { n });
    }
    let correct = per_sentence.iter().filter(|p| p.predicted == gold).count();
    let delta_test = directional_delta_between(train, test, n, smoothing)?.delta;
    Ok(PredictionOutcome {
        accuracy: correct as f64 / per_sentence.len() as f64,
        test_sentence_count: per_sentence.len(),
        excluded_short: test.len() - per_sentence.len(),
        per_sentence,
        gold,
        n,
        delta_test,
    })
}
