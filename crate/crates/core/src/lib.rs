//! Reading-direction asymmetry of grapheme streams.
//!
//! A corpus is read into interned graphemes, tokenized in baseline or
//! visual mode, and scored by n-gram models fit in each reading order. The
//! difference of the two cross-entropies, Δ = X_LTR − X_RTL, is the
//! directional statistic; it comes with a paired bootstrap interval, a
//! shuffle control and a held-out classification check. Word-boundary
//! distributions and synthetic sources round out the diagnostics.

pub mod boundary;
pub mod corpus;
pub mod direction;
pub mod error;
pub mod ingest;
pub mod ngram;
pub mod predictive;
pub mod rng;
pub mod sum;
pub mod synth;
pub mod tokenize;

pub use boundary::{
    boundary_distributions, frequency_curve, plateau_zipf_score, BoundaryStats, FrequencyCurve,
};
pub use corpus::{Alphabet, Corpus, Sentence, Symbol, Word};
pub use direction::{
    directional_delta, shuffle_control, BootstrapConfig, DirectionalDelta, DirectionalResult,
};
pub use error::{Error, Result};
pub use ingest::{read_eva, read_plaintext, Format, RawDocument};
pub use ngram::{count_ngrams, cross_entropy, NGramCounts, Smoothing};
pub use predictive::{predict_directions, split_corpus, Direction, SplitSpec};
pub use synth::{generate, SynthKind, SynthSpec};
pub use tokenize::{reverse_stream, tokenize, ReadingOrder, TokenStream, TokenizationMode};
