// SPDX-License-Identifier: Apache-2.0

//! Run reports and their on-disk form.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

use nfl_core::category::digest;
use nfl_core::rational::to_decimal;
use nfl_core::{Error, Rational, Verdict};

use crate::config::ExperimentConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub name: String,
    /// `(checkpoint, value)`.
    #[serde(with = "nfl_core::rational::text")]
    pub points: Vec<(usize, Rational)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Artifact {
    pub name: String,
    pub digest: String,
    #[serde(skip)]
    pub text: String,
}

impl Artifact {
    pub fn new(name: impl Into<String>, text: String) -> Self {
        Artifact {
            name: name.into(),
            digest: digest(&text),
            text,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseError {
    pub resource: bool,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Case {
    pub key: String,
    pub verdict: Option<Verdict>,
    pub summary: Value,
    pub error: Option<CaseError>,
    pub trajectories: Vec<Trajectory>,
    pub artifacts: Vec<Artifact>,
}

impl Case {
    pub fn new(key: impl Into<String>, verdict: Verdict, summary: Value) -> Self {
        Case {
            key: key.into(),
            verdict: Some(verdict),
            summary,
            error: None,
            trajectories: vec![],
            artifacts: vec![],
        }
    }

    pub fn failed(key: impl Into<String>, e: &Error) -> Self {
        Case {
            key: key.into(),
            verdict: None,
            summary: Value::Null,
            error: Some(CaseError {
                resource: e.is_resource(),
                message: e.to_string(),
            }),
            trajectories: vec![],
            artifacts: vec![],
        }
    }

    pub fn with_trajectory(mut self, name: impl Into<String>, points: Vec<(usize, Rational)>) -> Self {
        self.trajectories.push(Trajectory {
            name: name.into(),
            points,
        });
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub version: String,
    pub command: String,
    pub config: ExperimentConfig,
    pub config_digest: String,
    pub cases: Vec<Case>,
    pub tables: Vec<Table>,
}

impl RunReport {
    pub fn new(config: ExperimentConfig, mut cases: Vec<Case>, tables: Vec<Table>) -> Self {
        cases.sort_by(|a, b| a.key.cmp(&b.key));
        let config_digest = digest(&serde_json::to_string(&config).expect("config serializes"));
        RunReport {
            version: VERSION.into(),
            command: config.command.to_string(),
            config,
            config_digest,
            cases,
            tables,
        }
    }

    pub fn any_resource_error(&self) -> bool {
        self.cases.iter().any(|c| c.error.as_ref().is_some_and(|e| e.resource))
    }

    pub fn any_other_error(&self) -> bool {
        self.cases.iter().any(|c| c.error.as_ref().is_some_and(|e| !e.resource))
    }

    /// True when some case reached the opposite of the `expect` verdict.
    /// Inconclusive cases never contradict an expectation.
    pub fn expectation_failed(&self) -> bool {
        let opposite = match self.config.expect {
            Some(Verdict::Consistent) => Verdict::Refuted,
            Some(Verdict::Refuted) => Verdict::Consistent,
            _ => return false,
        };
        self.cases.iter().any(|c| c.verdict == Some(opposite))
    }
}

fn sanitize(s: &str) -> String {
    let mut out: String = s
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect();
    out.truncate(80);
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One CSV per trajectory under `dir/trajectories`; no directory when the
/// report has none.
pub fn emit_plotdata(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = vec![];
    let mut index = 0;
    for case in &report.cases {
        for t in &case.trajectories {
            index += 1;
            let sub = dir.join("trajectories");
            fs::create_dir_all(&sub)?;
            let path = sub.join(format!("{index:03}-{}-{}.csv", sanitize(&case.key), sanitize(&t.name)));
            let mut body = String::from("checkpoint,value,num,den\n");
            for (c, v) in &t.points {
                body.push_str(&format!("{c},{},{},{}\n", to_decimal(v, 12), v.numer(), v.denom()));
            }
            fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Writes `report.json`, `verdicts.jsonl`, tables, trajectories and
/// artifacts. Returns the relative paths written, in order.
pub fn write_report(report: &RunReport, dir: &Path) -> Result<Vec<String>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let rel = |p: &Path| p.strip_prefix(dir).unwrap_or(p).to_string_lossy().replace('\\', "/");
    let mut files = vec![];

    let mut lines = String::new();
    for c in &report.cases {
        let line = serde_json::json!({
            "key": c.key,
            "verdict": c.verdict,
            "error": c.error,
            "summary": c.summary,
        });
        lines.push_str(&serde_json::to_string(&line)?);
        lines.push('\n');
    }
    fs::write(dir.join("verdicts.jsonl"), lines)?;
    files.push("verdicts.jsonl".to_string());

    for t in &report.tables {
        let sub = dir.join("tables");
        fs::create_dir_all(&sub)?;
        let path = sub.join(format!("{}.csv", sanitize(&t.name)));
        let mut body = t.header.join(",");
        body.push('\n');
        for row in &t.rows {
            let row: Vec<String> = row.iter().map(|f| csv_field(f)).collect();
            body.push_str(&row.join(","));
            body.push('\n');
        }
        fs::write(&path, body)?;
        files.push(rel(&path));
    }

    for p in emit_plotdata(report, dir)? {
        files.push(rel(&p));
    }

    for c in &report.cases {
        for a in &c.artifacts {
            let path = dir.join(&a.name);
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent)?;
            }
            fs::write(&path, &a.text)?;
            files.push(rel(&path));
        }
    }

    files.push("report.json".to_string());
    let mut doc = serde_json::to_value(report)?;
    doc["files"] = serde_json::to_value(&files)?;
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    fs::write(dir.join("report.json"), text)?;
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Command, ExperimentConfig, FileConfig, Overrides};
    use nfl_core::rational::rat;

    fn config() -> ExperimentConfig {
        ExperimentConfig::resolve(Some(Command::Duel), FileConfig::default(), Overrides::default()).unwrap()
    }

    #[test]
    fn empty_report_has_no_plot_files() {
        let dir = tempfile::tempdir().unwrap();
        let r = RunReport::new(config(), vec![], vec![]);
        assert!(emit_plotdata(&r, dir.path()).unwrap().is_empty());
        assert!(!dir.path().join("trajectories").exists());
    }

    #[test]
    fn csv_has_decimal_and_exact_columns() {
        let dir = tempfile::tempdir().unwrap();
        let case = Case::new("a|b", Verdict::Consistent, Value::Null).with_trajectory("t", vec![(3, rat(1, 3))]);
        let r = RunReport::new(config(), vec![case], vec![]);
        let files = emit_plotdata(&r, dir.path()).unwrap();
        let body = fs::read_to_string(&files[0]).unwrap();
        assert_eq!(body, "checkpoint,value,num,den\n3,0.333333333333,1,3\n");
        assert!(files[0].file_name().unwrap().to_str().unwrap().starts_with("001-a_b-t"));
    }

    #[test]
    fn cases_are_sorted_and_expect_checked() {
        let mut cfg = config();
        cfg.expect = Some(Verdict::Consistent);
        let cases = vec![
            Case::new("z", Verdict::Consistent, Value::Null),
            Case::new("a", Verdict::Refuted, Value::Null),
        ];
        let r = RunReport::new(cfg, cases, vec![]);
        assert_eq!(r.cases[0].key, "a");
        assert!(r.expectation_failed());
        assert!(!r.any_resource_error());
    }
}
