use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use dirgram::boundary::{
    boundary_distributions_in, boundary_inventory, frequency_curve, grapheme_frequencies,
    head_slope, plateau_zipf_score, BoundaryInventory, BoundaryStats, EntropyUnit, Frequencies,
    Position,
};
use dirgram::direction::{
    directional_delta, shuffle_comparison, DirectionalResult, ShuffleComparison,
};
use dirgram::ngram::{count_ngrams, Smoothing};
use dirgram::predictive::{predict_directions, split_corpus, Direction};
use dirgram::rng::derive_seed;
use dirgram::synth::{generate, SynthSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{load_all, AnalysisConfig, CorpusSummary, LoadedCorpus, RunConfig};
use crate::error::{ensure_finite, CliError, CliResult};
use crate::report::{
    csv_string, fixed, provenance, read_envelope, signed, table, to_json, Envelope, Rendered,
};

struct Cell<'a> {
    corpus: &'a LoadedCorpus,
    n: usize,
    smoothing: Smoothing,
}

impl Cell<'_> {
    fn label(&self) -> String {
        format!(
            "corpus={} n={} smoothing={}",
            self.corpus.spec.id,
            self.n,
            self.smoothing.name()
        )
    }

    fn bootstrap_seed_label(&self) -> String {
        format!(
            "{}/n={}/{}/bootstrap",
            self.corpus.spec.id,
            self.n,
            self.smoothing.name()
        )
    }
}

fn cells<'a>(cfg: &AnalysisConfig, corpora: &'a [LoadedCorpus]) -> Vec<Cell<'a>> {
    let mut out = Vec::new();
    for corpus in corpora {
        for &n in &cfg.n {
            for &smoothing in &cfg.smoothing {
                out.push(Cell {
                    corpus,
                    n,
                    smoothing,
                });
            }
        }
    }
    out
}

/// Runs `f` on every cell in parallel and returns results in cell order;
/// the first failing cell (in that order) determines the error.
fn run_cells<'a, T: Send>(
    cells: &[Cell<'a>],
    f: impl Fn(&Cell<'a>) -> CliResult<T> + Sync + Send,
) -> CliResult<Vec<T>> {
    let results: Vec<CliResult<T>> = cells.par_iter().map(f).collect();
    results.into_iter().collect()
}

fn check_result(label: &str, r: &DirectionalResult) -> CliResult<()> {
    ensure_finite(
        label,
        &[
            ("delta", r.delta),
            ("X_ltr", r.x_ltr),
            ("X_rtl", r.x_rtl),
            ("ppl_ltr", r.ppl_ltr),
            ("ppl_rtl", r.ppl_rtl),
            ("ci_low", r.ci[0]),
            ("ci_high", r.ci[1]),
        ],
    )
}

fn ci_label(alpha: f64) -> String {
    format!("{}% CI", fixed(100.0 * (1.0 - alpha), 0))
}

fn lower_side(delta: f64) -> &'static str {
    if delta > 0.0 {
        "RTL lower perplexity"
    } else if delta < 0.0 {
        "LTR lower perplexity"
    } else {
        "no difference"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeResults {
    pub corpora: Vec<CorpusSummary>,
    pub cells: Vec<DirectionalResult>,
}

#[derive(Serialize)]
struct DeltaRow<'a> {
    corpus_id: &'a str,
    n: usize,
    smoothing: &'a str,
    delta: f64,
    #[serde(rename = "X_ltr")]
    x_ltr: f64,
    #[serde(rename = "X_rtl")]
    x_rtl: f64,
    ppl_ltr: f64,
    ppl_rtl: f64,
    ci_low: f64,
    ci_high: f64,
    #[serde(rename = "B")]
    replicates: usize,
    alpha: f64,
    seed: u64,
    #[serde(rename = "N_tokens")]
    tokens: u64,
    sentences: usize,
}

fn delta_row(r: &DirectionalResult) -> DeltaRow<'_> {
    DeltaRow {
        corpus_id: &r.corpus_id,
        n: r.n,
        smoothing: r.smoothing.name(),
        delta: r.delta,
        x_ltr: r.x_ltr,
        x_rtl: r.x_rtl,
        ppl_ltr: r.ppl_ltr,
        ppl_rtl: r.ppl_rtl,
        ci_low: r.ci[0],
        ci_high: r.ci[1],
        replicates: r.replicates,
        alpha: r.alpha,
        seed: r.seed,
        tokens: r.tokens,
        sentences: r.sentences,
    }
}

pub fn analyze(cfg: &RunConfig, dump_counts: bool) -> CliResult<Rendered> {
    let a = &cfg.analysis;
    let corpora = load_all(a)?;
    let cells = cells(a, &corpora);
    let mut seeds = BTreeMap::new();
    for c in &cells {
        let label = c.bootstrap_seed_label();
        seeds.insert(label.clone(), derive_seed(a.seed, &label));
    }
    let results = run_cells(&cells, |c| {
        let label = c.label();
        let seed = seeds[&c.bootstrap_seed_label()];
        let r = directional_delta(&c.corpus.stream, c.n, &c.smoothing)
            .and_then(|d| d.with_bootstrap(&a.bootstrap(seed)))
            .map_err(|e| CliError::from_core(&label, e))?;
        check_result(&label, &r)?;
        Ok(r)
    })?;

    if dump_counts {
        write_count_dumps(&cfg.output.dir, a, &corpora)?;
    }

    let env = Envelope::new(
        "analyze",
        a,
        seeds,
        AnalyzeResults {
            corpora: corpora.iter().map(LoadedCorpus::summary).collect(),
            cells: results,
        },
    );
    Ok(Rendered {
        name: "analyze",
        json: to_json(&env),
        csv: Some(csv_string(
            &env.results.cells.iter().map(delta_row).collect::<Vec<_>>(),
        )),
        extra_csv: Vec::new(),
        markdown: analyze_markdown(&env),
    })
}

fn write_count_dumps(dir: &Path, a: &AnalysisConfig, corpora: &[LoadedCorpus]) -> CliResult<()> {
    let dumps = dir.join("counts");
    fs::create_dir_all(&dumps)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", dumps.display())))?;
    for c in corpora {
        for &n in &a.n {
            for (tag, stream) in [("ltr", c.stream.clone()), ("rtl", c.stream.reversed())] {
                let label = format!("corpus={} n={n} direction={tag}", c.spec.id);
                let counts =
                    count_ngrams(&stream, n).map_err(|e| CliError::from_core(&label, e))?;
                let path = dumps.join(format!("{}-n{n}-{tag}.json", c.spec.id));
                fs::write(&path, to_json(&counts.dump(stream.alphabet())))
                    .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
            }
        }
    }
    Ok(())
}

pub fn analyze_markdown(env: &Envelope<AnalyzeResults>) -> String {
    let mut s = String::from("# Directional analysis\n\n");
    s.push_str(&provenance(env));
    for corpus in &env.results.corpora {
        s.push_str(&format!(
            "\n## {} ({:?} mode, gold {})\n\n{} sentences, {} words, {} graphemes, alphabet {}.\n\n",
            corpus.id,
            corpus.mode,
            corpus.gold,
            corpus.sentences,
            corpus.words,
            corpus.graphemes,
            corpus.alphabet
        ));
        let rows: Vec<&DirectionalResult> = env
            .results
            .cells
            .iter()
            .filter(|r| r.corpus_id == corpus.id)
            .collect();
        let ci = rows.first().map(|r| ci_label(r.alpha)).unwrap_or_default();
        s.push_str(&table(
            &[
                "n",
                "smoothing",
                "P_LTR",
                "P_RTL",
                "Δ",
                ci.as_str(),
                "tokens",
            ],
            &rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.smoothing.name().to_owned(),
                        fixed(r.ppl_ltr, 2),
                        fixed(r.ppl_rtl, 2),
                        signed(r.delta, 4),
                        format!("({}, {})", fixed(r.ci[0], 4), fixed(r.ci[1], 4)),
                        r.tokens.to_string(),
                    ]
                })
                .collect::<Vec<_>>(),
        ));
        s.push('\n');
        for r in rows {
            s.push_str(&format!(
                "- n = {}, {}: Δ ≈ {} ({})\n",
                r.n,
                r.smoothing.name(),
                signed(r.delta, 4),
                lower_side(r.delta)
            ));
        }
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShuffleResults {
    pub corpora: Vec<CorpusSummary>,
    pub cells: Vec<ShuffleComparison>,
}

#[derive(Serialize)]
struct ShuffleRow<'a> {
    condition: &'static str,
    shuffle_seed: Option<u64>,
    corpus_id: &'a str,
    n: usize,
    smoothing: &'a str,
    delta: f64,
    ppl_ltr: f64,
    ppl_rtl: f64,
    ci_low: f64,
    ci_high: f64,
    seed: u64,
}

fn shuffle_row<'a>(
    condition: &'static str,
    shuffle_seed: Option<u64>,
    r: &'a DirectionalResult,
) -> ShuffleRow<'a> {
    ShuffleRow {
        condition,
        shuffle_seed,
        corpus_id: &r.corpus_id,
        n: r.n,
        smoothing: r.smoothing.name(),
        delta: r.delta,
        ppl_ltr: r.ppl_ltr,
        ppl_rtl: r.ppl_rtl,
        ci_low: r.ci[0],
        ci_high: r.ci[1],
        seed: r.seed,
    }
}

fn shuffle_seed_label(id: &str, k: usize) -> String {
    format!("{id}/shuffle/{k}")
}

pub fn shuffle_control(cfg: &RunConfig) -> CliResult<Rendered> {
    let a = &cfg.analysis;
    let corpora = load_all(a)?;
    let cells = cells(a, &corpora);
    let mut seeds = BTreeMap::new();
    for c in &cells {
        let label = c.bootstrap_seed_label();
        seeds.insert(label.clone(), derive_seed(a.seed, &label));
    }
    for c in &corpora {
        for k in 0..a.shuffle_seeds {
            let label = shuffle_seed_label(&c.spec.id, k);
            seeds.insert(label.clone(), derive_seed(a.seed, &label));
        }
    }
    let results = run_cells(&cells, |c| {
        let label = c.label();
        let shuffle_seeds: Vec<u64> = (0..a.shuffle_seeds)
            .map(|k| seeds[&shuffle_seed_label(&c.corpus.spec.id, k)])
            .collect();
        let bootstrap = a.bootstrap(seeds[&c.bootstrap_seed_label()]);
        let cmp = shuffle_comparison(
            &c.corpus.stream,
            c.n,
            &c.smoothing,
            &bootstrap,
            &shuffle_seeds,
        )
        .map_err(|e| CliError::from_core(&label, e))?;
        check_result(&label, &cmp.original)?;
        for run in &cmp.shuffled {
            check_result(
                &format!("{label} shuffle_seed={}", run.shuffle_seed),
                &run.result,
            )?;
        }
        Ok(cmp)
    })?;

    let env = Envelope::new(
        "shuffle-control",
        a,
        seeds,
        ShuffleResults {
            corpora: corpora.iter().map(LoadedCorpus::summary).collect(),
            cells: results,
        },
    );
    let mut rows = Vec::new();
    for cmp in &env.results.cells {
        rows.push(shuffle_row("original", None, &cmp.original));
        for run in &cmp.shuffled {
            rows.push(shuffle_row("shuffled", Some(run.shuffle_seed), &run.result));
        }
    }
    Ok(Rendered {
        name: "shuffle-control",
        json: to_json(&env),
        csv: Some(csv_string(&rows)),
        extra_csv: Vec::new(),
        markdown: shuffle_markdown(&env),
    })
}

pub fn shuffle_markdown(env: &Envelope<ShuffleResults>) -> String {
    let mut s = String::from("# Shuffle control\n\n");
    s.push_str(&provenance(env));
    for corpus in &env.results.corpora {
        s.push_str(&format!("\n## {}\n\n", corpus.id));
        let mut rows = Vec::new();
        let mut ratios = Vec::new();
        let mut ci = String::new();
        for cmp in env
            .results
            .cells
            .iter()
            .filter(|c| c.original.corpus_id == corpus.id)
        {
            let o = &cmp.original;
            ci = ci_label(o.alpha);
            let row = |cond: String, r: &DirectionalResult| {
                vec![
                    cond,
                    r.n.to_string(),
                    r.smoothing.name().to_owned(),
                    fixed(r.ppl_ltr, 2),
                    fixed(r.ppl_rtl, 2),
                    signed(r.delta, 4),
                    format!("({}, {})", fixed(r.ci[0], 4), fixed(r.ci[1], 4)),
                ]
            };
            rows.push(row("Original".into(), o));
            for run in &cmp.shuffled {
                let name = if cmp.shuffled.len() == 1 {
                    "Shuffled".to_owned()
                } else {
                    format!("Shuffled (seed {})", run.shuffle_seed)
                };
                rows.push(row(name, &run.result));
            }
            ratios.push(format!(
                "- n = {}, {}: |Δ_orig| / mean |Δ_shuf| = {} (mean |Δ_shuf| = {})\n",
                o.n,
                o.smoothing.name(),
                cmp.effect_ratio.map_or("∞".to_owned(), |r| fixed(r, 1)),
                fixed(cmp.mean_abs_shuffled_delta, 5)
            ));
        }
        s.push_str(&table(
            &[
                "Condition",
                "n",
                "smoothing",
                "P_LTR",
                "P_RTL",
                "Δ",
                ci.as_str(),
            ],
            &rows,
        ));
        s.push('\n');
        s.extend(ratios);
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictRow {
    pub corpus_id: String,
    pub gold: Direction,
    pub n: usize,
    pub smoothing: String,
    pub accuracy: f64,
    pub correct: usize,
    pub test_sentences: usize,
    pub excluded_short: usize,
    pub train_sentences: usize,
    /// Δ of the held-out sentences under the training models.
    pub delta_test: f64,
    /// Self-scored Δ of the whole corpus.
    pub delta_full: f64,
    pub split_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictResults {
    pub corpora: Vec<CorpusSummary>,
    pub rows: Vec<PredictRow>,
}

fn split_seed_label(id: &str) -> String {
    format!("{id}/split")
}

pub fn predict(cfg: &RunConfig) -> CliResult<Rendered> {
    let a = &cfg.analysis;
    let corpora = load_all(a)?;
    let mut seeds = BTreeMap::new();
    let mut splits = BTreeMap::new();
    for c in &corpora {
        let label = split_seed_label(&c.spec.id);
        let seed = derive_seed(a.seed, &label);
        seeds.insert(label, seed);
        let split = split_corpus(&c.stream, &a.split(seed))
            .map_err(|e| CliError::from_core(&format!("corpus={}", c.spec.id), e))?;
        splits.insert(c.spec.id.clone(), split);
    }
    let cells = cells(a, &corpora);
    let rows = run_cells(&cells, |c| {
        let label = c.label();
        let id = &c.corpus.spec.id;
        let (train, test) = &splits[id];
        let wrap = |e| CliError::from_core(&label, e);
        let out =
            predict_directions(train, test, c.n, &c.smoothing, c.corpus.spec.gold).map_err(wrap)?;
        let full = directional_delta(&c.corpus.stream, c.n, &c.smoothing).map_err(wrap)?;
        ensure_finite(
            &label,
            &[
                ("accuracy", out.accuracy),
                ("delta_test", out.delta_test),
                ("delta_full", full.delta),
            ],
        )?;
        Ok(PredictRow {
            corpus_id: id.clone(),
            gold: out.gold,
            n: c.n,
            smoothing: c.smoothing.name().to_owned(),
            accuracy: out.accuracy,
            correct: out
                .per_sentence
                .iter()
                .filter(|p| p.predicted == out.gold)
                .count(),
            test_sentences: out.test_sentence_count,
            excluded_short: out.excluded_short,
            train_sentences: train.len(),
            delta_test: out.delta_test,
            delta_full: full.delta,
            split_seed: seeds[&split_seed_label(id)],
        })
    })?;
    let env = Envelope::new(
        "predict",
        a,
        seeds,
        PredictResults {
            corpora: corpora.iter().map(LoadedCorpus::summary).collect(),
            rows,
        },
    );
    Ok(Rendered {
        name: "predict",
        json: to_json(&env),
        csv: Some(csv_string(&env.results.rows)),
        extra_csv: Vec::new(),
        markdown: predict_markdown(&env),
    })
}

pub fn predict_markdown(env: &Envelope<PredictResults>) -> String {
    let mut s = String::from("# Predictive validation\n\n");
    s.push_str(&provenance(env));
    s.push('\n');
    s.push_str(&table(
        &[
            "Corpus",
            "Gold",
            "n",
            "smoothing",
            "Accuracy",
            "Test sentences",
            "Δ (test)",
            "Δ (full)",
        ],
        &env.results
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.corpus_id.clone(),
                    r.gold.to_string(),
                    r.n.to_string(),
                    r.smoothing.clone(),
                    fixed(r.accuracy, 3),
                    r.test_sentences.to_string(),
                    signed(r.delta_test, 4),
                    signed(r.delta_full, 4),
                ]
            })
            .collect::<Vec<_>>(),
    ));
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveFit {
    pub position: Position,
    pub points: usize,
    /// Absent below three points.
    pub slope: Option<f64>,
    pub curvature: Option<f64>,
    /// Slope over the ranks holding the top 80% of the mass.
    pub head_slope_80: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCorpus {
    pub stats: BoundaryStats,
    pub inventory: Vec<BoundaryInventory>,
    pub fits: Vec<CurveFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryResults {
    pub corpora: Vec<CorpusSummary>,
    pub boundary: Vec<BoundaryCorpus>,
}

#[derive(Serialize)]
struct CurveRow<'a> {
    rank: usize,
    count: u64,
    log_rank: f64,
    log_count: f64,
    position: &'static str,
    corpus_id: &'a str,
}

pub const HEAD_MASS: f64 = 0.8;

pub fn boundary(cfg: &RunConfig, unit: EntropyUnit) -> CliResult<Rendered> {
    let a = &cfg.analysis;
    let corpora = load_all(a)?;
    let per_corpus: Vec<CliResult<(BoundaryCorpus, String)>> = corpora
        .par_iter()
        .map(|c| {
            let id = &c.spec.id;
            let label = format!("corpus={id}");
            let wrap = |e| CliError::from_core(&label, e);
            let stats = boundary_distributions_in(&c.corpus, unit).map_err(wrap)?;
            let tables: [(Position, Frequencies); 3] = [
                (Position::Initial, stats.initial_freq.clone()),
                (Position::Final, stats.final_freq.clone()),
                (Position::All, grapheme_frequencies(&c.corpus)),
            ];
            let mut fits = Vec::new();
            let mut rows = Vec::new();
            for (position, freqs) in &tables {
                let curve = frequency_curve(freqs, *position).map_err(wrap)?;
                let fit = plateau_zipf_score(&curve).ok();
                let head = head_slope(&curve, HEAD_MASS).ok();
                let cell = format!("{label} position={}", position.name());
                for (name, v) in [
                    ("slope", fit.map(|f| f.slope)),
                    ("curvature", fit.map(|f| f.curvature)),
                    ("head_slope", head),
                ] {
                    if let Some(v) = v {
                        ensure_finite(&cell, &[(name, v)])?;
                    }
                }
                fits.push(CurveFit {
                    position: *position,
                    points: curve.points.len(),
                    slope: fit.map(|f| f.slope),
                    curvature: fit.map(|f| f.curvature),
                    head_slope_80: head,
                });
                rows.extend(curve.points.iter().map(|p| CurveRow {
                    rank: p.rank,
                    count: p.count,
                    log_rank: p.log_rank,
                    log_count: p.log_count,
                    position: position.name(),
                    corpus_id: id,
                }));
            }
            ensure_finite(
                &label,
                &[
                    ("H_initial", stats.h_initial),
                    ("H_final", stats.h_final),
                    ("G_initial", stats.g_initial),
                ],
            )?;
            Ok((
                BoundaryCorpus {
                    inventory: boundary_inventory(&c.corpus, 2),
                    stats,
                    fits,
                },
                csv_string(&rows),
            ))
        })
        .collect();
    let mut boundary = Vec::new();
    let mut curves = Vec::new();
    for (r, c) in per_corpus.into_iter().zip(&corpora) {
        let (b, csv) = r?;
        boundary.push(b);
        curves.push((format!("curves-{}.csv", c.spec.id), csv));
    }
    let env = Envelope::new(
        "boundary",
        a,
        BTreeMap::new(),
        BoundaryResults {
            corpora: corpora.iter().map(LoadedCorpus::summary).collect(),
            boundary,
        },
    );
    Ok(Rendered {
        name: "boundary",
        json: to_json(&env),
        csv: None,
        extra_csv: curves,
        markdown: boundary_markdown(&env),
    })
}

fn opt(x: Option<f64>, digits: usize) -> String {
    x.map_or("n/a".to_owned(), |v| fixed(v, digits))
}

pub fn boundary_markdown(env: &Envelope<BoundaryResults>) -> String {
    let mut s = String::from("# Word-boundary diagnostics\n\n");
    s.push_str(&provenance(env));
    s.push('\n');
    let unit = env
        .results
        .boundary
        .first()
        .map(|b| b.stats.unit.name())
        .unwrap_or("nats");
    s.push_str(&table(
        &[
            "Corpus",
            "words",
            "distinct initial",
            "distinct final",
            &format!("H initial ({unit})"),
            &format!("H final ({unit})"),
            "ΔH",
            "G initial",
            "G final",
            "ΔG",
            "balanced ΔH",
            "balanced ΔG",
        ],
        &env.results
            .boundary
            .iter()
            .map(|b| {
                let st = &b.stats;
                vec![
                    st.corpus_id.clone(),
                    st.words.to_string(),
                    st.distinct_initial.to_string(),
                    st.distinct_final.to_string(),
                    fixed(st.h_initial, 4),
                    fixed(st.h_final, 4),
                    signed(st.delta_h, 4),
                    fixed(st.g_initial, 4),
                    fixed(st.g_final, 4),
                    signed(st.delta_g, 4),
                    signed(st.balanced.delta_h, 4),
                    signed(st.balanced.delta_g, 4),
                ]
            })
            .collect::<Vec<_>>(),
    ));
    s.push_str("\n## Rank-frequency fits (ln count on ln rank)\n\n");
    let mut rows = Vec::new();
    for b in &env.results.boundary {
        for f in &b.fits {
            rows.push(vec![
                b.stats.corpus_id.clone(),
                f.position.name().to_owned(),
                f.points.to_string(),
                opt(f.slope, 3),
                opt(f.curvature, 3),
                opt(f.head_slope_80, 3),
            ]);
        }
    }
    s.push_str(&table(
        &[
            "Corpus",
            "position",
            "ranks",
            "slope",
            "curvature",
            "slope (top 80% mass)",
        ],
        &rows,
    ));
    s.push_str("\n## Boundary inventories\n\n");
    let mut rows = Vec::new();
    for b in &env.results.boundary {
        for inv in &b.inventory {
            rows.push(vec![
                b.stats.corpus_id.clone(),
                inv.length.to_string(),
                inv.distinct_initial.to_string(),
                inv.distinct_final.to_string(),
            ]);
        }
    }
    s.push_str(&table(
        &[
            "Corpus",
            "unit length",
            "distinct initial",
            "distinct final",
        ],
        &rows,
    ));
    s
}

pub fn synth(spec: &SynthSpec, out: &Path) -> CliResult<PathBuf> {
    let corpus = generate(spec).map_err(|e| CliError::from_core("synth", e))?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)
            .map_err(|e| CliError::Data(format!("cannot create {}: {e}", parent.display())))?;
    }
    fs::write(out, corpus.to_string())
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", out.display())))?;
    Ok(out.to_path_buf())
}

/// Collects the reports found in `dir` into one Markdown document.
pub fn report(dir: &Path) -> CliResult<PathBuf> {
    let mut sections = Vec::new();
    if let Some(env) = read_envelope::<AnalyzeResults>(&dir.join("analyze.json"))? {
        sections.push(analyze_markdown(&env));
    }
    if let Some(env) = read_envelope::<ShuffleResults>(&dir.join("shuffle-control.json"))? {
        sections.push(shuffle_markdown(&env));
    }
    if let Some(env) = read_envelope::<PredictResults>(&dir.join("predict.json"))? {
        sections.push(predict_markdown(&env));
    }
    if let Some(env) = read_envelope::<BoundaryResults>(&dir.join("boundary.json"))? {
        sections.push(boundary_markdown(&env));
    }
    if sections.is_empty() {
        return Err(CliError::Data(format!(
            "no analyze/shuffle-control/predict/boundary JSON reports in {}",
            dir.display()
        )));
    }
    let body = sections
        .iter()
        .map(|s| s.replacen("# ", "## ", 1).replace("\n## ", "\n### "))
        .collect::<Vec<_>>()
        .join("\n");
    let path = dir.join("report.md");
    fs::write(&path, format!("# dirgram report\n\n{body}"))
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}
