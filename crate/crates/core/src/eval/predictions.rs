use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::task::Task;

/// Version of the prediction line format this build reads.
pub const PREDICTION_SCHEMA_VERSION: u32 = 1;

/// A model, optionally pinned to the training-set size it was tuned on.
/// Off-the-shelf baselines carry no size.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SystemId {
    pub model: String,
    pub train_size: Option<u32>,
}

impl SystemId {
    pub fn new(model: impl Into<String>, train_size: Option<u32>) -> Self {
        SystemId {
            model: model.into(),
            train_size,
        }
    }

    /// Model name with a trailing `-<train_size>` removed, so that
    /// `ETLCH-100` and `ETLCH-300` share the family `ETLCH`.
    pub fn family(&self) -> &str {
        match self.train_size {
            Some(size) => self
                .model
                .strip_suffix(&format!("-{size}"))
                .unwrap_or(&self.model),
            None => &self.model,
        }
    }
}

/// Family first, then train size, so `X-300` sorts before `X-1000`.
impl Ord for SystemId {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.family(), self.train_size, &self.model).cmp(&(other.family(), other.train_size, &other.model))
    }
}

impl PartialOrd for SystemId {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.train_size {
            Some(size) => write!(f, "{}@{size}", self.model),
            None => f.write_str(&self.model),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RecordKey {
    pub task: Task,
    pub system: SystemId,
    pub example_id: String,
}

/// One model output joined with its reference.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictionRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema_version: Option<u32>,
    pub example_id: String,
    pub task: Task,
    pub model: String,
    #[serde(default)]
    pub train_size: Option<u32>,
    pub output_text: String,
    pub reference_text: String,
}

impl PredictionRecord {
    pub fn key(&self) -> RecordKey {
        RecordKey {
            task: self.task,
            system: SystemId::new(self.model.clone(), self.train_size),
            example_id: self.example_id.clone(),
        }
    }

    fn check(&self) -> std::result::Result<(), String> {
        if let Some(v) = self.schema_version {
            if v != PREDICTION_SCHEMA_VERSION {
                return Err(format!("unsupported schema_version {v}"));
            }
        }
        if self.example_id.trim().is_empty() {
            return Err("example_id is empty".into());
        }
        if self.model.trim().is_empty() {
            return Err("model is empty".into());
        }
        if self.reference_text.is_empty() {
            return Err("reference_text is empty".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rejection {
    /// 1-based.
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct LoadReport {
    pub records: Vec<PredictionRecord>,
    pub rejections: Vec<Rejection>,
    pub total_lines: usize,
}

/// Parses newline-delimited prediction records, collecting every bad line.
pub fn parse_predictions(text: &str) -> LoadReport {
    let mut report = LoadReport::default();
    let mut keys = HashSet::new();
    for (idx, line) in text.lines().enumerate() {
        report.total_lines += 1;
        let reject = |reason: String| Rejection {
            line: idx + 1,
            reason,
        };
        if line.trim().is_empty() {
            report.rejections.push(reject("blank line".into()));
            continue;
        }
        let record: PredictionRecord = match serde_json::from_str(line) {
            Ok(r) => r,
            Err(e) => {
                report.rejections.push(reject(e.to_string()));
                continue;
            }
        };
        if let Err(reason) = record.check() {
            report.rejections.push(reject(reason));
            continue;
        }
        let key = record.key();
        if !keys.insert(key.clone()) {
            report.rejections.push(reject(format!(
                "duplicate record ({}, {}, {})",
                key.example_id, key.task, key.system
            )));
            continue;
        }
        report.records.push(record);
    }
    report
}

/// Reads a prediction file. With `strict`, any rejected line is an error.
pub fn load_predictions(path: &Path, strict: bool) -> Result<LoadReport> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let report = parse_predictions(&text);
    for r in &report.rejections {
        log::warn!("{}:{}: {}", path.display(), r.line, r.reason);
    }
    if strict && !report.rejections.is_empty() {
        return Err(Error::Rejected {
            rejected: report.rejections.len(),
            total: report.total_lines,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"{"example_id":"1","task":"ner","model":"m","output_text":"a","reference_text":"a"}
{"example_id":"2","task":"kge","model":"m","train_size":100,"output_text":"","reference_text":"b"}
{"schema_version":1,"example_id":"3","task":"json-extract","model":"m","output_text":"{}","reference_text":"{}"}"#;

    #[test]
    fn well_formed_lines() {
        let r = parse_predictions(GOOD);
        assert_eq!(r.records.len(), 3);
        assert!(r.rejections.is_empty());
        assert_eq!(r.records[1].train_size, Some(100));
    }

    #[test]
    fn missing_field_and_duplicates() {
        let text = format!(
            "{GOOD}\n{}\n{}\nnot json\n\n{}",
            r#"{"example_id":"4","task":"ner","model":"m","output_text":"a"}"#,
            r#"{"example_id":"1","task":"ner","model":"m","output_text":"b","reference_text":"a"}"#,
            r#"{"example_id":"5","task":"ner","model":"m","output_text":"b","reference_text":"a","extra":1}"#,
        );
        let r = parse_predictions(&text);
        assert_eq!(r.records.len(), 3);
        assert_eq!(r.records.len() + r.rejections.len(), r.total_lines);
        let lines: Vec<usize> = r.rejections.iter().map(|x| x.line).collect();
        assert_eq!(lines, [4, 5, 6, 7, 8]);
        assert!(r.rejections[0].reason.contains("reference_text"));
        assert!(r.rejections[1].reason.starts_with("duplicate"));
    }

    #[test]
    fn empty_reference_and_bad_version() {
        let r = parse_predictions(
            r#"{"example_id":"1","task":"ner","model":"m","output_text":"a","reference_text":""}
{"schema_version":2,"example_id":"1","task":"ner","model":"m","output_text":"a","reference_text":"x"}"#,
        );
        assert!(r.records.is_empty());
        assert_eq!(r.rejections.len(), 2);
    }

    #[test]
    fn strict_loading() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.jsonl");
        std::fs::write(&path, format!("{GOOD}\nbroken")).unwrap();
        assert!(matches!(
            load_predictions(&path, true),
            Err(Error::Rejected { rejected: 1, total: 4 })
        ));
        assert_eq!(load_predictions(&path, false).unwrap().records.len(), 3);
        assert!(matches!(
            load_predictions(&dir.path().join("missing"), false),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn family_strips_size_suffix() {
        assert_eq!(SystemId::new("ETLCH-100", Some(100)).family(), "ETLCH");
        assert_eq!(SystemId::new("ETLCH", Some(100)).family(), "ETLCH");
        assert_eq!(SystemId::new("Qwen2.5-7B", None).family(), "Qwen2.5-7B");
    }
}
