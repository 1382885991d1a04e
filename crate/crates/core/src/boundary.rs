//! Word-boundary grapheme statistics: initial/final frequency tables, Shannon
//! entropy, Gini index and rank-frequency curves.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{Alphabet, Corpus, Symbol};
use crate::error::{Error, Result};
use crate::sum::ExactSum;
use crate::tokenize::TokenStream;

pub type Frequencies = BTreeMap<String, u64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntropyUnit {
    #[default]
    Nats,
    Bits,
}

impl EntropyUnit {
    pub fn name(self) -> &'static str {
        match self {
            EntropyUnit::Nats => "nats",
            EntropyUnit::Bits => "bits",
        }
    }

    fn scale(self, nats: f64) -> f64 {
        match self {
            EntropyUnit::Nats => nats,
            EntropyUnit::Bits => nats / std::f64::consts::LN_2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Position {
    Initial,
    Final,
    All,
}

impl Position {
    pub fn name(self) -> &'static str {
        match self {
            Position::Initial => "initial",
            Position::Final => "final",
            Position::All => "all",
        }
    }
}

fn nonzero(counts: &[u64]) -> Vec<u64> {
    counts.iter().copied().filter(|&c| c > 0).collect()
}

/// Population Gini index over the observed (nonzero) frequencies:
/// `Σ_i Σ_j |x_i − x_j| / (2 k Σ x)`, evaluated exactly in integers through
/// the sorted form `Σ_i (2i − k − 1) x_(i)`.
pub fn gini(counts: &[u64]) -> Result<f64> {
    let mut x = nonzero(counts);
    if x.is_empty() {
        return Err(Error::EmptySample);
    }
    x.sort_unstable();
    let k = x.len() as i128;
    let numerator: i128 = x
        .iter()
        .enumerate()
        .map(|(i, &c)| (2 * (i as i128 + 1) - k - 1) * c as i128)
        .sum();
    let total: i128 = x.iter().map(|&c| c as i128).sum();
    Ok(numerator as f64 / (k * total) as f64)
}

/// Shannon entropy in nats with `0 ln 0 = 0`.
pub fn entropy(counts: &[u64]) -> Result<f64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::EmptySample);
    }
    let total = total as f64;
    let sum: ExactSum = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.ln()
        })
        .collect();
    // Single-support tables give exactly -1 * ln 1 = -0.0.
    Ok(sum.value().max(0.0))
}

/// Entropy, Gini and support size of one frequency table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub entropy: f64,
    pub gini: f64,
    pub distinct: usize,
}

impl Spread {
    fn of(freqs: &Frequencies, unit: EntropyUnit) -> Result<Self> {
        let counts: Vec<u64> = freqs.values().copied().collect();
        Ok(Spread {
            entropy: unit.scale(entropy(&counts)?),
            gini: gini(&counts)?,
            distinct: nonzero(&counts).len(),
        })
    }
}

/// Initial and final distributions restricted to their `support` most
/// frequent graphemes, `support` being the smaller of the two inventories.
/// Balances the masses before comparing ΔH and ΔG across scripts whose
/// initial and final inventories differ in size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalancedComparison {
    pub support: usize,
    pub initial: Spread,
    pub r#final: Spread,
    pub delta_h: f64,
    pub delta_g: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryStats {
    pub corpus_id: String,
    pub unit: EntropyUnit,
    pub words: u64,
    pub initial_freq: Frequencies,
    pub final_freq: Frequencies,
    pub h_initial: f64,
    pub h_final: f64,
    pub g_initial: f64,
    pub g_final: f64,
    pub delta_h: f64,
    pub delta_g: f64,
    pub distinct_initial: usize,
    pub distinct_final: usize,
    pub balanced: BalancedComparison,
}

fn top_k(freqs: &Frequencies, k: usize) -> Frequencies {
    let mut entries: Vec<(&String, &u64)> = freqs.iter().collect();
    entries.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
    entries
        .into_iter()
        .take(k)
        .map(|(g, &c)| (g.clone(), c))
        .collect()
}

impl BoundaryStats {
    pub fn from_frequencies(
        corpus_id: &str,
        initial_freq: Frequencies,
        final_freq: Frequencies,
        unit: EntropyUnit,
    ) -> Result<Self> {
        let initial = Spread::of(&initial_freq, unit)?;
        let fin = Spread::of(&final_freq, unit)?;
        let support = initial.distinct.min(fin.distinct);
        let balanced_initial = Spread::of(&top_k(&initial_freq, support), unit)?;
        let balanced_final = Spread::of(&top_k(&final_freq, support), unit)?;
        Ok(BoundaryStats {
            corpus_id: corpus_id.to_owned(),
            unit,
            words: initial_freq.values().sum(),
            h_initial: initial.entropy,
            h_final: fin.entropy,
            g_initial: initial.gini,
            g_final: fin.gini,
            delta_h: initial.entropy - fin.entropy,
            delta_g: initial.gini - fin.gini,
            distinct_initial: initial.distinct,
            distinct_final: fin.distinct,
            balanced: BalancedComparison {
                support,
                delta_h: balanced_initial.entropy - balanced_final.entropy,
                delta_g: balanced_initial.gini - balanced_final.gini,
                initial: balanced_initial,
                r#final: balanced_final,
            },
            initial_freq,
            final_freq,
        })
    }
}

fn tally<'a>(
    alphabet: &Alphabet,
    words: impl Iterator<Item = &'a [Symbol]>,
) -> (Frequencies, Frequencies) {
    let mut first: BTreeMap<Symbol, u64> = BTreeMap::new();
    let mut last: BTreeMap<Symbol, u64> = BTreeMap::new();
    for w in words {
        *first.entry(w[0]).or_insert(0) += 1;
        *last.entry(w[w.len() - 1]).or_insert(0) += 1;
    }
    let spell = |m: BTreeMap<Symbol, u64>| {
        m.into_iter()
            .map(|(s, c)| (alphabet.resolve(s).to_owned(), c))
            .collect()
    };
    (spell(first), spell(last))
}

/// Word-initial and word-final grapheme tables. A one-grapheme word counts
/// in both.
pub fn boundary_distributions(corpus: &Corpus) -> Result<BoundaryStats> {
    boundary_distributions_in(corpus, EntropyUnit::Nats)
}

pub fn boundary_distributions_in(corpus: &Corpus, unit: EntropyUnit) -> Result<BoundaryStats> {
    let (initial, fin) = tally(corpus.alphabet(), corpus.words().map(|w| w.graphemes()));
    BoundaryStats::from_frequencies(&corpus.id, initial, fin, unit)
}

/// Same tables computed from a token stream's word-boundary metadata;
/// `Ok(None)` when the stream no longer carries boundaries.
pub fn stream_boundary_distributions(
    ts: &TokenStream,
    unit: EntropyUnit,
) -> Result<Option<BoundaryStats>> {
    let mut words = Vec::new();
    for s in ts.sentences() {
        match s.words() {
            Some(ws) => words.extend(ws),
            None => return Ok(None),
        }
    }
    let (initial, fin) = tally(ts.alphabet(), words.into_iter());
    BoundaryStats::from_frequencies(&ts.corpus_id, initial, fin, unit).map(Some)
}

/// Frequencies of every grapheme occurrence in the corpus.
pub fn grapheme_frequencies(corpus: &Corpus) -> Frequencies {
    let mut counts: BTreeMap<Symbol, u64> = BTreeMap::new();
    for w in corpus.words() {
        for &g in w.graphemes() {
            *counts.entry(g).or_insert(0) += 1;
        }
    }
    counts
        .into_iter()
        .map(|(s, c)| (corpus.alphabet().resolve(s).to_owned(), c))
        .collect()
}

/// Distinct word-initial and word-final units of each length up to
/// `max_len` graphemes (words shorter than a length do not contribute to it).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryInventory {
    pub length: usize,
    pub distinct_initial: usize,
    pub distinct_final: usize,
}

pub fn boundary_inventory(corpus: &Corpus, max_len: usize) -> Vec<BoundaryInventory> {
    (1..=max_len)
        .map(|len| {
            let mut initial = BTreeSet::new();
            let mut fin = BTreeSet::new();
            for w in corpus.words().filter(|w| w.len() >= len) {
                let g = w.graphemes();
                initial.insert(&g[..len]);
                fin.insert(&g[g.len() - len..]);
            }
            BoundaryInventory {
                length: len,
                distinct_initial: initial.len(),
                distinct_final: fin.len(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub rank: usize,
    pub grapheme: String,
    pub count: u64,
    pub log_rank: f64,
    pub log_count: f64,
}

/// Rank-frequency curve, most frequent first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyCurve {
    pub position: Position,
    pub points: Vec<CurvePoint>,
}

/// Ranks by descending count, ties broken by code point. Zero counts are
/// left out.
pub fn frequency_curve(freqs: &Frequencies, position: Position) -> Result<FrequencyCurve> {
    let mut entries: Vec<(&String, u64)> = freqs
        .iter()
        .filter(|(_, &c)| c > 0)
        .map(|(g, &c)| (g, c))
        .collect();
    if entries.is_empty() {
        return Err(Error::EmptySample);
    }
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let points = entries
        .into_iter()
        .enumerate()
        .map(|(i, (g, count))| CurvePoint {
            rank: i + 1,
            grapheme: g.clone(),
            count,
            log_rank: ((i + 1) as f64).ln(),
            log_count: (count as f64).ln(),
        })
        .collect();
    Ok(FrequencyCurve { position, points })
}

/// Least-squares slope of `y` on `x`.
fn linear_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Coefficients `[a, b, c]` of the least-squares fit `y = a + b u + c u²`.
fn quadratic_fit(u: &[f64], y: &[f64]) -> [f64; 3] {
    let mut m = [[0.0f64; 4]; 3];
    for (&ui, &yi) in u.iter().zip(y) {
        let basis = [1.0, ui, ui * ui];
        for r in 0..3 {
            for c in 0..3 {
                m[r][c] += basis[r] * basis[c];
            }
            m[r][3] += basis[r] * yi;
        }
    }
    // Gaussian elimination with partial pivoting.
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        let pivot_row = m[col];
        for row in &mut m[col + 1..3] {
            let f = row[col] / pivot_row[col];
            for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * p;
            }
        }
    }
    let mut coef = [0.0; 3];
    for r in (0..3).rev() {
        let tail: f64 = (r + 1..3).map(|c| m[r][c] * coef[c]).sum();
        coef[r] = (m[r][3] - tail) / m[r][r];
    }
    coef
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZipfFit {
    /// Least-squares slope of ln count on ln rank: about −1 for Zipf, about
    /// 0 for a plateau.
    pub slope: f64,
    /// Quadratic coefficient of the same fit; negative for a plateau that
    /// drops off.
    pub curvature: f64,
}

pub fn plateau_zipf_score(curve: &FrequencyCurve) -> Result<ZipfFit> {
    let k = curve.points.len();
    if k < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: k });
    }
    let x: Vec<f64> = curve.points.iter().map(|p| p.log_rank).collect();
    let y: Vec<f64> = curve.points.iter().map(|p| p.log_count).collect();
    let mean = x.iter().sum::<f64>() / k as f64;
    let centered: Vec<f64> = x.iter().map(|v| v - mean).collect();
    Ok(ZipfFit {
        slope: linear_slope(&x, &y),
        curvature: quadratic_fit(&centered, &y)[2],
    })
}

/// Log-log slope over the leading ranks that together hold at least `mass`
/// of the total count (at least two ranks).
pub fn head_slope(curve: &FrequencyCurve, mass: f64) -> Result<f64> {
    let total: u64 = curve.points.iter().map(|p| p.count).sum();
    let mut running = 0;
    let mut take = curve.points.len();
    for (i, p) in curve.points.iter().enumerate() {
        running += p.count;
        if running as f64 >= mass * total as f64 {
            take = i + 1;
            break;
        }
    }
    let take = take.max(2);
    if curve.points.len() < take {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: curve.points.len(),
        });
    }
    let head = &curve.points[..take];
    let x: Vec<f64> = head.iter().map(|p| p.log_rank).collect();
    let y: Vec<f64> = head.iter().map(|p| p.log_count).collect();
    Ok(linear_slope(&x, &y))
}
