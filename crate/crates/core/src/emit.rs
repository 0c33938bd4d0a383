//! JSON and CSV emission of run summaries.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::RunSummary;

pub const CSV_HEADER: [&str; 10] =
    ["scenario", "id", "lhs", "rhs", "ratio", "pass", "constant", "provenance", "domain", "resolution"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

pub fn to_json(summaries: &[RunSummary]) -> Result<String> {
    let mut s = serde_json::to_string_pretty(summaries)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json(text: &str) -> Result<Vec<RunSummary>> {
    Ok(serde_json::from_str(text)?)
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// One row per report; report-only rows leave `pass` empty.
pub fn to_csv(summaries: &[RunSummary]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Config(format!("csv: {e}"));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for s in summaries {
        for r in &s.reports {
            w.write_record([
                s.scenario.clone(),
                r.id.clone(),
                r.lhs.to_string(),
                r.rhs.to_string(),
                opt(r.ratio()),
                opt(r.pass()),
                opt(r.constant.map(|c| c.value)),
                opt(r.constant.map(|c| c.provenance)),
                r.context.domain.clone(),
                s.resolution.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn render(summaries: &[RunSummary], format: Format) -> Result<String> {
    match format {
        Format::Json => to_json(summaries),
        Format::Csv => to_csv(summaries),
    }
}

/// Writes `report.<ext>` into `dir` (created if missing) and returns its path.
pub fn write_dir(summaries: &[RunSummary], format: Format, dir: &Path) -> Result<PathBuf> {
    let text = render(summaries, format)?;
    let path = dir.join(format!("report.{}", format.extension()));
    let wrap = |source| Error::Write { path: path.display().to_string(), source };
    fs::create_dir_all(dir).map_err(|source| Error::Write { path: dir.display().to_string(), source })?;
    fs::write(&path, text).map_err(wrap)?;
    Ok(path)
}

pub fn write_stdout(summaries: &[RunSummary], format: Format) -> Result<()> {
    let text = render(summaries, format)?;
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|source| Error::Write { path: "<stdout>".into(), source })
}
