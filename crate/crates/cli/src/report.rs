//! Report envelope and file output.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::{AnalysisConfig, OutputConfig, OutputFormat};
use crate::error::{CliError, CliResult};

pub const TOOL: &str = "dirgram";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Wall-clock time of the run. Kept apart from everything else so the rest
/// of a report depends only on its configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timestamp {
    pub unix_seconds: u64,
}

impl Timestamp {
    /// `SOURCE_DATE_EPOCH` when set, the system clock otherwise.
    pub fn now() -> Self {
        let unix_seconds = std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or_else(|| {
                SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0)
            });
        Self { unix_seconds }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_hash: String,
    pub config: AnalysisConfig,
    pub seeds: BTreeMap<String, u64>,
    pub results: T,
    pub timestamp: Timestamp,
}

impl<T> Envelope<T> {
    pub fn new(
        command: &str,
        config: &AnalysisConfig,
        seeds: BTreeMap<String, u64>,
        results: T,
    ) -> Self {
        Envelope {
            tool: TOOL.to_owned(),
            version: VERSION.to_owned(),
            command: command.to_owned(),
            config_hash: config.hash(),
            config: config.clone(),
            seeds,
            results,
            timestamp: Timestamp::now(),
        }
    }
}

/// Rendered outputs of one command, written according to the selected
/// formats. `extra_csv` files are written whenever CSV is selected.
pub struct Rendered {
    pub name: &'static str,
    pub json: String,
    pub csv: Option<String>,
    pub extra_csv: Vec<(String, String)>,
    pub markdown: String,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn write(path: &Path, contents: &str) -> CliResult<PathBuf> {
    fs::write(path, contents)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
    Ok(path.to_path_buf())
}

pub fn emit(out: &OutputConfig, rendered: &Rendered) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(&out.dir)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", out.dir.display())))?;
    let mut written = Vec::new();
    let file = |ext: &str| out.dir.join(format!("{}.{ext}", rendered.name));
    if out.formats.contains(&OutputFormat::Json) {
        written.push(write(&file("json"), &rendered.json)?);
    }
    if out.formats.contains(&OutputFormat::Csv) {
        if let Some(csv) = &rendered.csv {
            written.push(write(&file("csv"), csv)?);
        }
        for (name, body) in &rendered.extra_csv {
            written.push(write(&out.dir.join(name), body)?);
        }
    }
    if out.formats.contains(&OutputFormat::Markdown) {
        written.push(write(&file("md"), &rendered.markdown)?);
    }
    Ok(written)
}

pub fn csv_string<R: Serialize>(rows: &[R]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("csv row serializes");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 csv")
}

pub fn read_envelope<T: DeserializeOwned>(path: &Path) -> CliResult<Option<Envelope<T>>> {
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map(Some)
        .map_err(|e| CliError::Data(format!("{} is not a dirgram report: {e}", path.display())))
}

/// Markdown table from a header and rows of cells.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = format!(
        "| {} |\n|{}\n",
        header.join(" | "),
        "---|".repeat(header.len())
    );
    for r in rows {
        s.push_str(&format!("| {} |\n", r.join(" | ")));
    }
    s
}

pub fn signed(x: f64, digits: usize) -> String {
    format!("{x:+.digits$}")
}

pub fn fixed(x: f64, digits: usize) -> String {
    format!("{x:.digits$}")
}

pub fn provenance<T>(env: &Envelope<T>) -> String {
    format!(
        "_{} {} · config {} · base seed {} ({} derived seeds listed in the JSON report)_\n",
        env.tool,
        env.version,
        &env.config_hash[..12],
        env.config.seed,
        env.seeds.len()
    )
}
