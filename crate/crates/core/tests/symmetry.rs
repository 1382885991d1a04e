use dirgram::boundary::{entropy, gini, stream_boundary_distributions, EntropyUnit};
use dirgram::corpus::{Alphabet, Corpus, Sentence, Word};
use dirgram::direction::{
    directional_delta, paired_bootstrap_ci, shuffle_control, BootstrapConfig,
};
use dirgram::ngram::Smoothing;
use dirgram::tokenize::{reverse_stream, tokenize, TokenStream, TokenizationMode};
use proptest::prelude::*;

/// Sentences of words of graphemes, each grapheme an index into a-f.
type Raw = Vec<Vec<Vec<u8>>>;

fn raw_corpus() -> impl Strategy<Value = Raw> {
    prop::collection::vec(
        prop::collection::vec(prop::collection::vec(0u8..6, 1..5), 1..5),
        1..10,
    )
}

fn build(raw: &Raw) -> Corpus {
    let mut alphabet = Alphabet::new();
    let sentences = raw
        .iter()
        .enumerate()
        .map(|(i, words)| {
            let words = words
                .iter()
                .map(|w| {
                    Word::new(
                        w.iter()
                            .map(|&g| alphabet.intern(&char::from(b'a' + g).to_string()))
                            .collect(),
                    )
                    .unwrap()
                })
                .collect();
            Sentence::new(words, i + 1).unwrap()
        })
        .collect();
    Corpus::new("prop", sentences, alphabet)
}

fn with_reversals(raw: &Raw) -> Raw {
    let mut out = raw.clone();
    out.extend(raw.iter().map(|words| {
        words
            .iter()
            .rev()
            .map(|w| w.iter().rev().copied().collect())
            .collect()
    }));
    out
}

fn smoothers() -> [Smoothing; 2] {
    [Smoothing::Laplace, Smoothing::kneser_ney()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn reversal_closed_corpora_have_exactly_zero_delta(raw in raw_corpus(), n in 2usize..=4) {
        let ts = tokenize(&build(&with_reversals(&raw)), TokenizationMode::Baseline);
        for s in smoothers() {
            if let Ok(d) = directional_delta(&ts, n, &s) {
                prop_assert_eq!(d.delta, 0.0);
                prop_assert_eq!(d.x_ltr, d.x_rtl);
            }
        }
    }

    #[test]
    fn reverse_stream_is_an_involution(raw in raw_corpus()) {
        let ts = tokenize(&build(&raw), TokenizationMode::Baseline);
        prop_assert_eq!(reverse_stream(&reverse_stream(&ts)), ts.clone());
        let once = reverse_stream(&ts);
        prop_assert_ne!(once.order, ts.order);
    }

    #[test]
    fn visual_mode_is_full_sentence_reversal(raw in raw_corpus()) {
        let corpus = build(&raw);
        let baseline = tokenize(&corpus, TokenizationMode::Baseline);
        let visual = tokenize(&corpus, TokenizationMode::Visual);
        prop_assert_eq!(visual.len(), baseline.len());
        for (v, b) in visual.sentences().iter().zip(baseline.sentences()) {
            let rev: Vec<_> = b.graphemes().iter().rev().copied().collect();
            prop_assert_eq!(v.graphemes(), &rev[..]);
            let flipped = b.reversed();
            prop_assert_eq!(v.word_starts(), flipped.word_starts());
        }
    }

    #[test]
    fn delta_is_antisymmetric_under_direction_swap(raw in raw_corpus(), n in 2usize..=3) {
        let ts = tokenize(&build(&raw), TokenizationMode::Baseline);
        for s in smoothers() {
            if let Ok(d) = directional_delta(&ts, n, &s) {
                let r = directional_delta(&reverse_stream(&ts), n, &s).unwrap();
                prop_assert_eq!(r.delta, -d.delta);
                prop_assert_eq!(r.x_ltr, d.x_rtl);
            }
        }
    }

    #[test]
    fn shuffle_preserves_each_sentence_multiset(raw in raw_corpus(), seed in any::<u64>()) {
        let ts = tokenize(&build(&raw), TokenizationMode::Baseline);
        let sh = shuffle_control(&ts, seed);
        prop_assert_eq!(sh.len(), ts.len());
        for (a, b) in ts.sentences().iter().zip(sh.sentences()) {
            let mut x = a.graphemes().to_vec();
            let mut y = b.graphemes().to_vec();
            x.sort();
            y.sort();
            prop_assert_eq!(x, y);
            prop_assert!(b.word_starts().is_none());
        }
        prop_assert_eq!(shuffle_control(&ts, seed), sh);
    }

    #[test]
    fn bootstrap_interval_is_ordered_and_reproducible(raw in raw_corpus(), seed in any::<u64>()) {
        let ts = tokenize(&build(&raw), TokenizationMode::Baseline);
        if let Ok(d) = directional_delta(&ts, 2, &Smoothing::Laplace) {
            if d.pairs.iter().filter(|p| p.tokens > 0).count() >= 2 {
                let cfg = BootstrapConfig { replicates: 200, alpha: 0.05, seed };
                let (lo, hi) = paired_bootstrap_ci(&d.pairs, &cfg).unwrap();
                prop_assert!(lo <= hi);
                prop_assert_eq!(paired_bootstrap_ci(&d.pairs, &cfg).unwrap(), (lo, hi));
            }
        }
    }

    #[test]
    fn visual_tokenization_swaps_boundary_tables(raw in raw_corpus()) {
        let corpus = build(&raw);
        let b = stream_boundary_distributions(&tokenize(&corpus, TokenizationMode::Baseline), EntropyUnit::Nats)
            .unwrap()
            .unwrap();
        let v = stream_boundary_distributions(&tokenize(&corpus, TokenizationMode::Visual), EntropyUnit::Nats)
            .unwrap()
            .unwrap();
        prop_assert_eq!(&b.initial_freq, &v.final_freq);
        prop_assert_eq!(&b.final_freq, &v.initial_freq);
        prop_assert_eq!(b.delta_h, -v.delta_h);
        prop_assert_eq!(b.delta_g, -v.delta_g);
    }

    #[test]
    fn boundary_totals_equal_word_count(raw in raw_corpus()) {
        let corpus = build(&raw);
        let stats = dirgram::boundary::boundary_distributions(&corpus).unwrap();
        let words = corpus.word_count() as u64;
        prop_assert_eq!(stats.initial_freq.values().sum::<u64>(), words);
        prop_assert_eq!(stats.final_freq.values().sum::<u64>(), words);
        prop_assert!(stats.h_initial >= 0.0 && stats.h_initial <= (stats.distinct_initial as f64).ln() + 1e-12);
        prop_assert!((0.0..1.0).contains(&stats.g_initial));
    }

    #[test]
    fn gini_and_entropy_ignore_scale_and_order(counts in prop::collection::vec(1u64..1000, 1..20), k in 1u64..50) {
        let scaled: Vec<u64> = counts.iter().map(|c| c * k).collect();
        let mut shuffled = counts.clone();
        shuffled.reverse();
        shuffled.rotate_left(counts.len() / 2);
        let (g, h) = (gini(&counts).unwrap(), entropy(&counts).unwrap());
        prop_assert!((gini(&scaled).unwrap() - g).abs() <= 1e-12);
        prop_assert!((entropy(&scaled).unwrap() - h).abs() <= 1e-12);
        prop_assert!((gini(&shuffled).unwrap() - g).abs() <= 1e-12);
        prop_assert!((entropy(&shuffled).unwrap() - h).abs() <= 1e-12);
    }

    #[test]
    fn concentration_raises_gini_and_lowers_entropy(
        counts in prop::collection::vec(1u64..1000, 2..20),
        pick in any::<prop::sample::Index>(),
    ) {
        // Move one unit from a smaller count to the largest one.
        let top = (0..counts.len()).max_by_key(|&i| (counts[i], std::cmp::Reverse(i))).unwrap();
        let others: Vec<usize> = (0..counts.len()).filter(|&i| i != top && counts[i] > 1).collect();
        prop_assume!(!others.is_empty());
        let from = others[pick.index(others.len())];
        let mut moved = counts.clone();
        moved[from] -= 1;
        moved[top] += 1;
        prop_assert!(gini(&moved).unwrap() >= gini(&counts).unwrap() - 1e-12);
        prop_assert!(entropy(&moved).unwrap() <= entropy(&counts).unwrap() + 1e-12);
    }

    #[test]
    fn gini_and_entropy_match_direct_formulas(counts in prop::collection::vec(0u64..30, 1..10)) {
        let nonzero: Vec<f64> = counts.iter().filter(|&&c| c > 0).map(|&c| c as f64).collect();
        prop_assume!(!nonzero.is_empty());
        let k = nonzero.len() as f64;
        let total: f64 = nonzero.iter().sum();
        let mut double = 0.0;
        for x in &nonzero {
            for y in &nonzero {
                double += (x - y).abs();
            }
        }
        let g = double / (2.0 * k * total);
        let h: f64 = -nonzero.iter().map(|c| c / total * (c / total).ln()).sum::<f64>();
        prop_assert!((gini(&counts).unwrap() - g).abs() <= 1e-12);
        prop_assert!((entropy(&counts).unwrap() - h).abs() <= 1e-12);
    }
}

#[test]
fn string_streams_hold_one_word_per_sentence() {
    let ts = TokenStream::from_strings("x", &[vec!["a", "b"], vec!["c"]]);
    let stats = stream_boundary_distributions(&ts, EntropyUnit::Nats)
        .unwrap()
        .unwrap();
    assert_eq!(stats.words, 2);
    assert_eq!(stats.final_freq.get("b"), Some(&1));
    let shuffled = shuffle_control(&ts, 0);
    assert!(stream_boundary_distributions(&shuffled, EntropyUnit::Nats)
        .unwrap()
        .is_none());
}
