//! Run configuration: a TOML file plus command-line overrides.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use dirgram::direction::BootstrapConfig;
use dirgram::ingest::{EvaOptions, Format, IngestOptions, NormalizationProfile, RawDocument};
use dirgram::ngram::{Smoothing, DEFAULT_DISCOUNT, DEFAULT_FLOOR_DIVISOR};
use dirgram::predictive::{Direction, SplitSpec};
use dirgram::tokenize::{tokenize, TokenStream, TokenizationMode};
use dirgram::Corpus;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SmoothingName {
    Laplace,
    #[serde(alias = "kn")]
    #[value(alias = "kn")]
    KneserNey,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Markdown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSpec {
    pub id: String,
    pub path: PathBuf,
    pub format: Format,
    pub mode: TokenizationMode,
    pub gold: Direction,
    #[serde(default)]
    pub normalization: NormalizationProfile,
    #[serde(default)]
    pub eva: EvaOptions,
    /// Keep whole sentences up to this many graphemes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_graphemes: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct BootstrapSection {
    replicates: Option<usize>,
    alpha: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SplitSection {
    train_fraction: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct KneserNeySection {
    discount: Option<f64>,
    floor_divisor: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    corpus: Vec<CorpusSpec>,
    n: Option<Vec<usize>>,
    smoothing: Option<Vec<SmoothingName>>,
    seed: Option<u64>,
    #[serde(default)]
    bootstrap: BootstrapSection,
    #[serde(default)]
    split: SplitSection,
    #[serde(default)]
    kneser_ney: KneserNeySection,
    shuffle_seeds: Option<usize>,
    out: Option<PathBuf>,
    formats: Option<Vec<OutputFormat>>,
}

/// Values given on the command line; each one replaces the file's value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub n: Option<Vec<usize>>,
    pub smoothing: Option<Vec<SmoothingName>>,
    pub seed: Option<u64>,
    pub bootstrap_replicates: Option<usize>,
    pub alpha: Option<f64>,
    pub train_fraction: Option<f64>,
    pub shuffle_seeds: Option<usize>,
    pub max_graphemes: Option<usize>,
    pub out: Option<PathBuf>,
    pub formats: Option<Vec<OutputFormat>>,
}

/// Everything that can change a result. Serialized into every report and
/// hashed into its `config_hash`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub corpora: Vec<CorpusSpec>,
    pub n: Vec<usize>,
    pub smoothing: Vec<Smoothing>,
    pub seed: u64,
    pub bootstrap_replicates: usize,
    pub alpha: f64,
    pub train_fraction: f64,
    pub shuffle_seeds: usize,
}

impl AnalysisConfig {
    pub fn bootstrap(&self, seed: u64) -> BootstrapConfig {
        BootstrapConfig {
            replicates: self.bootstrap_replicates,
            alpha: self.alpha,
            seed,
        }
    }

    pub fn split(&self, seed: u64) -> SplitSpec {
        SplitSpec {
            train_fraction: self.train_fraction,
            seed,
        }
    }

    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

#[derive(Debug, Clone)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub formats: BTreeSet<OutputFormat>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub analysis: AnalysisConfig,
    pub output: OutputConfig,
}

/// Smoother list used when neither file nor flags name one.
#[derive(Debug, Clone, Copy)]
pub enum SmoothingDefault {
    Both,
    LaplaceOnly,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn load(
        path: Option<&Path>,
        overrides: &Overrides,
        default: SmoothingDefault,
    ) -> CliResult<Self> {
        let (file, base) = match path {
            Some(p) => {
                let text = fs::read_to_string(p)
                    .map_err(|e| config_err(format!("cannot read {}: {e}", p.display())))?;
                let file: ConfigFile = toml::from_str(&text)
                    .map_err(|e| config_err(format!("{}: {e}", p.display())))?;
                (file, p.parent().map(Path::to_path_buf).unwrap_or_default())
            }
            None => (ConfigFile::default(), PathBuf::new()),
        };
        Self::resolve(file, &base, overrides, default)
    }

    fn resolve(
        file: ConfigFile,
        base: &Path,
        o: &Overrides,
        default: SmoothingDefault,
    ) -> CliResult<Self> {
        let discount = file.kneser_ney.discount.unwrap_or(DEFAULT_DISCOUNT);
        let floor_divisor = file
            .kneser_ney
            .floor_divisor
            .unwrap_or(DEFAULT_FLOOR_DIVISOR);
        let names = o
            .smoothing
            .clone()
            .or(file.smoothing)
            .unwrap_or_else(|| match default {
                SmoothingDefault::Both => vec![SmoothingName::Laplace, SmoothingName::KneserNey],
                SmoothingDefault::LaplaceOnly => vec![SmoothingName::Laplace],
            });
        let mut seen = BTreeSet::new();
        let smoothing: Vec<Smoothing> = names
            .into_iter()
            .filter(|s| seen.insert(*s))
            .map(|s| match s {
                SmoothingName::Laplace => Smoothing::Laplace,
                SmoothingName::KneserNey => Smoothing::KneserNey {
                    discount,
                    floor_divisor,
                },
            })
            .collect();

        let mut corpora = file.corpus;
        for c in &mut corpora {
            if c.path.as_os_str().is_empty() {
                return Err(config_err(format!("corpus `{}` has an empty path", c.id)));
            }
            if c.path.is_relative() {
                c.path = base.join(&c.path);
            }
            if let Some(limit) = o.max_graphemes {
                c.max_graphemes = Some(limit);
            }
        }

        let mut n = o.n.clone().or(file.n).unwrap_or_else(|| vec![2, 3, 4]);
        n.dedup();
        let analysis = AnalysisConfig {
            corpora,
            n,
            smoothing,
            seed: o.seed.or(file.seed).unwrap_or(1),
            bootstrap_replicates: o
                .bootstrap_replicates
                .or(file.bootstrap.replicates)
                .unwrap_or(1000),
            alpha: o.alpha.or(file.bootstrap.alpha).unwrap_or(0.05),
            train_fraction: o
                .train_fraction
                .or(file.split.train_fraction)
                .unwrap_or(0.8),
            shuffle_seeds: o.shuffle_seeds.or(file.shuffle_seeds).unwrap_or(1),
        };
        let out = o
            .out
            .clone()
            .or_else(|| file.out.map(|p| base.join(p)))
            .unwrap_or_else(|| "reports".into());
        let formats = o.formats.clone().or(file.formats).unwrap_or_else(|| {
            vec![
                OutputFormat::Json,
                OutputFormat::Csv,
                OutputFormat::Markdown,
            ]
        });
        let cfg = RunConfig {
            analysis,
            output: OutputConfig {
                dir: out,
                formats: formats.into_iter().collect(),
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks made before any corpus is read.
    fn validate(&self) -> CliResult<()> {
        let a = &self.analysis;
        if a.corpora.is_empty() {
            return Err(config_err(
                "no corpus configured (add a [[corpus]] table to --config)",
            ));
        }
        let mut ids = BTreeSet::new();
        for c in &a.corpora {
            if c.id.is_empty()
                || !c
                    .id
                    .chars()
                    .all(|ch| ch.is_alphanumeric() || "-_.".contains(ch))
            {
                return Err(config_err(format!(
                    "corpus id `{}` must be non-empty [A-Za-z0-9._-]",
                    c.id
                )));
            }
            if !ids.insert(&c.id) {
                return Err(config_err(format!("duplicate corpus id `{}`", c.id)));
            }
            if !c.path.is_file() {
                return Err(config_err(format!(
                    "corpus `{}`: {} does not exist",
                    c.id,
                    c.path.display()
                )));
            }
        }
        if a.n.is_empty() || a.n.iter().any(|&n| n < 2) {
            return Err(config_err(format!(
                "n must be a non-empty list of orders >= 2, got {:?}",
                a.n
            )));
        }
        if a.smoothing.is_empty() {
            return Err(config_err("smoothing list is empty"));
        }
        for s in &a.smoothing {
            s.validate().map_err(|e| config_err(e.to_string()))?;
        }
        a.bootstrap(a.seed)
            .validate()
            .map_err(|e| config_err(e.to_string()))?;
        if !(a.train_fraction > 0.0 && a.train_fraction < 1.0) {
            return Err(config_err(format!(
                "train fraction must lie in (0, 1), got {}",
                a.train_fraction
            )));
        }
        if a.shuffle_seeds == 0 {
            return Err(config_err("shuffle_seeds must be at least 1"));
        }
        if self.output.formats.is_empty() {
            return Err(config_err("no output format selected"));
        }
        Ok(())
    }
}

/// A corpus read from disk, tokenized per its spec.
pub struct LoadedCorpus {
    pub spec: CorpusSpec,
    pub sha256: String,
    pub corpus: Corpus,
    pub stream: TokenStream,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub id: String,
    pub sha256: String,
    pub format: Format,
    pub mode: TokenizationMode,
    pub gold: Direction,
    pub sentences: usize,
    pub words: usize,
    pub graphemes: usize,
    pub alphabet: usize,
}

impl LoadedCorpus {
    pub fn load(spec: &CorpusSpec) -> CliResult<Self> {
        let wrap = |e| CliError::from_core(&format!("corpus={}", spec.id), e);
        let doc = RawDocument::load(&spec.path, spec.format).map_err(wrap)?;
        let sha256 = hex::encode(Sha256::digest(doc.content.as_bytes()));
        let options = IngestOptions {
            normalization: spec.normalization,
            eva: spec.eva.clone(),
        };
        let mut corpus = doc.into_corpus(&spec.id, &options).map_err(wrap)?;
        if let Some(limit) = spec.max_graphemes {
            corpus = corpus.truncated(limit);
            if corpus.sentences().is_empty() {
                return Err(CliError::Data(format!(
                    "[corpus={}] max_graphemes {limit} is smaller than the first sentence",
                    spec.id
                )));
            }
        }
        let stream = tokenize(&corpus, spec.mode);
        Ok(Self {
            spec: spec.clone(),
            sha256,
            corpus,
            stream,
        })
    }

    pub fn summary(&self) -> CorpusSummary {
        CorpusSummary {
            id: self.spec.id.clone(),
            sha256: self.sha256.clone(),
            format: self.spec.format,
            mode: self.spec.mode,
            gold: self.spec.gold,
            sentences: self.corpus.sentences().len(),
            words: self.corpus.word_count(),
            graphemes: self.corpus.grapheme_count(),
            alphabet: self.corpus.alphabet().len(),
        }
    }
}

pub fn load_all(cfg: &AnalysisConfig) -> CliResult<Vec<LoadedCorpus>> {
    use rayon::prelude::*;
    let loaded: Vec<CliResult<LoadedCorpus>> =
        cfg.corpora.par_iter().map(LoadedCorpus::load).collect();
    loaded.into_iter().collect()
}
