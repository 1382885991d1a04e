//! Directional asymmetry Δ = X_LTR − X_RTL, paired bootstrap intervals and
//! the within-sentence shuffle control.
//!
//! Δ > 0 means the model trained on reversed sentences predicts the corpus
//! better than the one trained on sentences as read.

use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ngram::{count_ngrams, cross_entropy, Smoothing};
use crate::rng;
use crate::sum::ExactSum;
use crate::tokenize::TokenStream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            replicates: 1000,
            alpha: 0.05,
            seed: 1,
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::InvalidParameter(
                "bootstrap needs at least one replicate".into(),
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Log-probabilities of one sentence under both directional models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentencePair {
    pub index: usize,
    pub logprob_ltr: f64,
    pub logprob_rtl: f64,
    pub tokens: u64,
}

/// Δ without a confidence interval, plus the per-sentence pairs needed to
/// build one.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalDelta {
    pub corpus_id: String,
    pub n: usize,
    pub smoothing: Smoothing,
    pub x_ltr: f64,
    pub x_rtl: f64,
    pub delta: f64,
    pub perplexity_ltr: f64,
    pub perplexity_rtl: f64,
    pub tokens: u64,
    pub pairs: Vec<SentencePair>,
}

/// Report record for one (corpus, n, smoothing) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionalResult {
    pub corpus_id: String,
    pub n: usize,
    pub smoothing: Smoothing,
    pub delta: f64,
    #[serde(rename = "X_ltr")]
    pub x_ltr: f64,
    #[serde(rename = "X_rtl")]
    pub x_rtl: f64,
    pub ppl_ltr: f64,
    pub ppl_rtl: f64,
    pub ci: [f64; 2],
    #[serde(rename = "B")]
    pub replicates: usize,
    pub alpha: f64,
    pub seed: u64,
    #[serde(rename = "N_tokens")]
    pub tokens: u64,
    pub sentences: usize,
}

impl DirectionalResult {
    pub fn ci_low(&self) -> f64 {
        self.ci[0]
    }

    pub fn ci_high(&self) -> f64 {
        self.ci[1]
    }

    pub fn ci_covers(&self, value: f64) -> bool {
        self.ci[0] <= value && value <= self.ci[1]
    }
}

impl DirectionalDelta {
    pub fn with_bootstrap(&self, cfg: &BootstrapConfig) -> Result<DirectionalResult> {
        let (low, high) = paired_bootstrap_ci(&self.pairs, cfg)?;
        Ok(DirectionalResult {
            corpus_id: self.corpus_id.clone(),
            n: self.n,
            smoothing: self.smoothing,
            delta: self.delta,
            x_ltr: self.x_ltr,
            x_rtl: self.x_rtl,
            ppl_ltr: self.perplexity_ltr,
            ppl_rtl: self.perplexity_rtl,
            ci: [low, high],
            replicates: cfg.replicates,
            alpha: cfg.alpha,
            seed: cfg.seed,
            tokens: self.tokens,
            sentences: self.pairs.len(),
        })
    }
}

/// Trains both directional models on `train` and scores `eval` with them.
/// `eval` is read as-is by the LTR model and reversed for the RTL model.
pub fn directional_delta_between(
    train: &TokenStream,
    eval: &TokenStream,
    n: usize,
    smoothing: &Smoothing,
) -> Result<DirectionalDelta> {
    let train_rtl = train.reversed();
    let eval_rtl = eval.reversed();
    let (ltr_counts, rtl_counts) =
        rayon::join(|| count_ngrams(train, n), || count_ngrams(&train_rtl, n));
    let (ltr_counts, rtl_counts) = (ltr_counts?, rtl_counts?);
    let ltr = cross_entropy(eval, &ltr_counts, smoothing)?;
    let rtl = cross_entropy(&eval_rtl, &rtl_counts, smoothing)?;
    debug_assert_eq!(ltr.tokens, rtl.tokens);
    let pairs = ltr
        .per_sentence
        .iter()
        .zip(&rtl.per_sentence)
        .map(|(l, r)| SentencePair {
            index: l.index,
            logprob_ltr: l.logprob,
            logprob_rtl: r.logprob,
            tokens: l.tokens,
        })
        .collect();
    Ok(DirectionalDelta {
        corpus_id: eval.corpus_id.clone(),
        n,
        smoothing: *smoothing,
        x_ltr: ltr.cross_entropy,
        x_rtl: rtl.cross_entropy,
        delta: ltr.cross_entropy - rtl.cross_entropy,
        perplexity_ltr: ltr.perplexity,
        perplexity_rtl: rtl.perplexity,
        tokens: ltr.tokens,
        pairs,
    })
}

/// Self-scored Δ: both models are trained and evaluated on the whole stream.
pub fn directional_delta(
    ts: &TokenStream,
    n: usize,
    smoothing: &Smoothing,
) -> Result<DirectionalDelta> {
    directional_delta_between(ts, ts, n, smoothing)
}

/// Δ recomputed as a ratio of sums over a multiset of sentences.
fn delta_of<'a>(pairs: impl Iterator<Item = &'a SentencePair>) -> f64 {
    let mut ltr = ExactSum::new();
    let mut rtl = ExactSum::new();
    let mut tokens = 0u64;
    for p in pairs {
        ltr.add(p.logprob_ltr);
        rtl.add(p.logprob_rtl);
        tokens += p.tokens;
    }
    let tokens = tokens as f64;
    -ltr.value() / tokens - -rtl.value() / tokens
}

/// Bootstrap replicates of Δ in replicate order. Replicate `r` resamples
/// sentence indices with replacement from ChaCha8 stream `r` of `cfg.seed`,
/// using the same indices for both directions. Sentences without prediction
/// tokens are left out before resampling.
pub fn bootstrap_replicates(pairs: &[SentencePair], cfg: &BootstrapConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let scoreable: Vec<&SentencePair> = pairs.iter().filter(|p| p.tokens > 0).collect();
    if scoreable.len() < 2 {
        return Err(Error::TooFewSentences {
            needed: 2,
            got: scoreable.len(),
        });
    }
    let m = scoreable.len();
    Ok((0..cfg.replicates as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng::seeded_stream(cfg.seed, r);
            delta_of((0..m).map(|_| scoreable[rng.random_range(0..m)]))
        })
        .collect())
}

/// Percentile interval at level `1 - alpha`.
pub fn paired_bootstrap_ci(pairs: &[SentencePair], cfg: &BootstrapConfig) -> Result<(f64, f64)> {
    let mut replicates = bootstrap_replicates(pairs, cfg)?;
    replicates.sort_by(f64::total_cmp);
    Ok((
        percentile(&replicates, cfg.alpha / 2.0)?,
        percentile(&replicates, 1.0 - cfg.alpha / 2.0)?,
    ))
}

/// Empirical percentile of ascending `sorted` samples, interpolating linearly
/// between the closest ranks: position `q * (len - 1)`.
pub fn percentile(sorted: &[f64], q: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidParameter(format!(
            "percentile level {q} outside [0, 1]"
        )));
    }
    let h = q * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    Ok(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

/// Permutes the graphemes of every sentence uniformly at random
/// (Fisher-Yates over one ChaCha8 stream, sentences in order). Word
/// boundaries no longer apply and are dropped.
pub fn shuffle_control(ts: &TokenStream, seed: u64) -> TokenStream {
    let mut rng = rng::seeded(seed);
    let sentences = ts
        .sentences()
        .iter()
        .map(|s| {
            let mut g = s.graphemes().to_vec();
            g.shuffle(&mut rng);
            s.with_graphemes(g)
        })
        .collect();
    ts.with_sentences(sentences)
}

/// Original Δ next to Δ for several independent shuffles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShuffleComparison {
    pub original: DirectionalResult,
    pub shuffled: Vec<ShuffledRun>,
    pub mean_abs_shuffled_delta: f64,
    /// |Δ_original| / mean |Δ_shuffled|; absent when every shuffle gives Δ = 0.
    pub effect_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShuffledRun {
    pub shuffle_seed: u64,
    pub result: DirectionalResult,
}

pub fn shuffle_comparison(
    ts: &TokenStream,
    n: usize,
    smoothing: &Smoothing,
    bootstrap: &BootstrapConfig,
    shuffle_seeds: &[u64],
) -> Result<ShuffleComparison> {
    let original = directional_delta(ts, n, smoothing)?.with_bootstrap(bootstrap)?;
    let shuffled = shuffle_seeds
        .iter()
        .map(|&shuffle_seed| {
            let shuffled = shuffle_control(ts, shuffle_seed);
            let result = directional_delta(&shuffled, n, smoothing)?.with_bootstrap(bootstrap)?;
            Ok(ShuffledRun {
                shuffle_seed,
                result,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mean_abs_shuffled_delta = if shuffled.is_empty() {
        0.0
    } else {
        shuffled.iter().map(|r| r.result.delta.abs()).sum::<f64>() / shuffled.len() as f64
    };
    let effect_ratio =
        (mean_abs_shuffled_delta > 0.0).then(|| original.delta.abs() / mean_abs_shuffled_delta);
    Ok(ShuffleComparison {
        original,
        shuffled,
        mean_abs_shuffled_delta,
        effect_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenize::reverse_stream;

    fn stream(sentences: &[&str]) -> TokenStream {
        let split: Vec<Vec<String>> = sentences
            .iter()
            .map(|s| s.chars().map(|c| c.to_string()).collect())
            .collect();
        TokenStream::from_strings("t", &split)
    }

    #[test]
    fn percentile_examples() {
        assert_eq!(percentile(&[1.0, 2.0, 3.0, 4.0], 0.5).unwrap(), 2.5);
        assert_eq!(percentile(&[1.0, 2.0, 3.0, 4.0], 0.0).unwrap(), 1.0);
        assert_eq!(percentile(&[1.0, 2.0, 3.0, 4.0], 1.0).unwrap(), 4.0);
        assert_eq!(percentile(&[0.0, 10.0], 0.25).unwrap(), 2.5);
        assert_eq!(percentile(&[5.0], 0.3).unwrap(), 5.0);
        assert!(matches!(percentile(&[], 0.5), Err(Error::EmptySample)));
        assert!(percentile(&[1.0], 1.5).is_err());
    }

    #[test]
    fn reversal_closed_corpus_has_zero_delta() {
        let ts = stream(&["ab", "ba", "abc", "cba", "aab", "baa"]);
        for smoothing in [Smoothing::Laplace, Smoothing::kneser_ney()] {
            for n in 2..=3 {
                let d = directional_delta(&ts, n, &smoothing).unwrap();
                assert_eq!(d.delta, 0.0, "n={n} {smoothing:?}");
            }
        }
    }

    #[test]
    fn swapping_directions_negates_delta() {
        let ts = stream(&["abcab", "bcaab", "cabbc", "aabc"]);
        let d = directional_delta(&ts, 2, &Smoothing::Laplace).unwrap();
        let swapped = directional_delta(&reverse_stream(&ts), 2, &Smoothing::Laplace).unwrap();
        assert_ne!(d.delta, 0.0);
        assert_eq!(swapped.delta, -d.delta);
        assert_eq!(swapped.x_ltr, d.x_rtl);
    }

    #[test]
    fn identical_sentences_give_degenerate_interval() {
        let ts = stream(&["abcabd"; 12]);
        let d = directional_delta(&ts, 2, &Smoothing::Laplace).unwrap();
        let (lo, hi) = paired_bootstrap_ci(&d.pairs, &BootstrapConfig::default()).unwrap();
        assert_eq!(lo, hi);
        assert_eq!(lo, d.delta);
    }

    #[test]
    fn bootstrap_is_seed_deterministic() {
        let ts = stream(&["abcab", "bcaab", "cabbc", "aabc", "ccab", "bacb"]);
        let d = directional_delta(&ts, 2, &Smoothing::Laplace).unwrap();
        let cfg = BootstrapConfig {
            replicates: 200,
            alpha: 0.1,
            seed: 99,
        };
        let a = bootstrap_replicates(&d.pairs, &cfg).unwrap();
        let b = bootstrap_replicates(&d.pairs, &cfg).unwrap();
        assert_eq!(a, b);
        let other = bootstrap_replicates(&d.pairs, &BootstrapConfig { seed: 100, ..cfg }).unwrap();
        assert_ne!(a, other);
        let (lo, hi) = paired_bootstrap_ci(&d.pairs, &cfg).unwrap();
        assert!(lo <= hi);
    }

    #[test]
    fn bootstrap_needs_two_scoreable_sentences() {
        let ts = stream(&["abc", "a"]);
        let d = directional_delta(&ts, 2, &Smoothing::Laplace).unwrap();
        let err = paired_bootstrap_ci(&d.pairs, &BootstrapConfig::default()).unwrap_err();
        assert!(matches!(err, Error::TooFewSentences { needed: 2, got: 1 }));
    }

    #[test]
    fn bootstrap_config_is_validated() {
        let ts = stream(&["abc", "cab"]);
        let d = directional_delta(&ts, 2, &Smoothing::Laplace).unwrap();
        for cfg in [
            BootstrapConfig {
                replicates: 0,
                ..Default::default()
            },
            BootstrapConfig {
                alpha: 1.0,
                ..Default::default()
            },
        ] {
            assert!(matches!(
                paired_bootstrap_ci(&d.pairs, &cfg),
                Err(Error::InvalidParameter(_))
            ));
        }
    }

    #[test]
    fn shuffle_preserves_multisets_and_drops_boundaries() {
        let ts = stream(&["q", "abcdefg", "aabbcc"]);
        let s = shuffle_control(&ts, 5);
        assert_eq!(s.sentences()[0].graphemes(), ts.sentences()[0].graphemes());
        for (a, b) in ts.sentences().iter().zip(s.sentences()) {
            let mut x = a.graphemes().to_vec();
            let mut y = b.graphemes().to_vec();
            x.sort();
            y.sort();
            assert_eq!(x, y);
            assert_eq!(b.word_starts(), None);
        }
        assert_eq!(shuffle_control(&ts, 5), s);
        assert_ne!(shuffle_control(&ts, 6), s);
    }
}
