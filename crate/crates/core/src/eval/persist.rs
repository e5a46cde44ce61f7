//! Run directories: `run.json` (config and digests), `scores.csv`
//! (per-record metrics) and `reports/`.

use std::fs::{self, OpenOptions};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::OverlapScore;
use crate::task::Task;

use super::predictions::{RecordKey, SystemId};
use super::score::{aggregate, Aggregate, EvalRun, MetricVector, ScoreConfig, ScoredRecord, RUN_SCHEMA_VERSION};

pub const RUN_FILE: &str = "run.json";
pub const SCORES_FILE: &str = "scores.csv";
pub const REPORTS_DIR: &str = "reports";
const LOCK_FILE: &str = ".lock";

/// Exclusive writer lock on a run directory, released on drop.
#[derive(Debug)]
pub struct RunLock {
    path: PathBuf,
}

impl RunLock {
    pub fn acquire(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(LOCK_FILE);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(_) => Ok(RunLock { path }),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(Error::Locked(dir.to_path_buf())),
            Err(e) => Err(Error::io(&path, e)),
        }
    }
}

impl Drop for RunLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct RunFile {
    schema_version: u32,
    run_id: String,
    config: ScoreConfig,
    config_digest: String,
    predictions_digest: String,
    records: usize,
    aggregates: Vec<Aggregate>,
}

const SCORE_HEADER: [&str; 15] = [
    "task", "model", "train_size", "example_id", "rouge1_precision", "rouge1_recall", "rouge1_f1",
    "rouge2_precision", "rouge2_recall", "rouge2_f1", "rouge_l_precision", "rouge_l_recall", "rouge_l_f1",
    "cosine", "parse_level",
];

fn overlap_cells(s: &OverlapScore<f64>) -> [String; 3] {
    [s.precision.to_string(), s.recall.to_string(), s.f1.to_string()]
}

pub fn scores_csv(scores: &[ScoredRecord]) -> Result<Vec<u8>> {
    let fail = |e: csv::Error| Error::Validation(format!("csv encoding: {e}"));
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(SCORE_HEADER).map_err(fail)?;
    for s in scores {
        let m = &s.metrics;
        let mut row = vec![
            s.key.task.to_string(),
            s.key.system.model.clone(),
            s.key.system.train_size.map(|v| v.to_string()).unwrap_or_default(),
            s.key.example_id.clone(),
        ];
        row.extend(overlap_cells(&m.rouge1));
        row.extend(overlap_cells(&m.rouge2));
        row.extend(overlap_cells(&m.rouge_l));
        row.push(m.cosine.to_string());
        row.push(m.parse_level.map(|l| l.to_string()).unwrap_or_default());
        w.write_record(&row).map_err(fail)?;
    }
    w.into_inner().map_err(|e| Error::Validation(format!("csv encoding: {e}")))
}

fn parse_scores(path: &Path) -> Result<Vec<ScoredRecord>> {
    let bad = |line: u64, msg: String| Error::Validation(format!("{}:{line}: {msg}", path.display()));
    let mut rdr = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Validation(format!("{}: {other:?}", path.display())),
    })?;
    let header = rdr.headers().map_err(|e| bad(1, e.to_string()))?.clone();
    if header.iter().ne(SCORE_HEADER) {
        return Err(bad(1, "unexpected header".into()));
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| bad(0, e.to_string()))?;
        let line = row.position().map_or(0, |p| p.line());
        let num = |i: usize| -> Result<f64> {
            row[i].parse::<f64>().map_err(|e| bad(line, format!("column {}: {e}", SCORE_HEADER[i])))
        };
        let overlap = |i: usize| -> Result<OverlapScore<f64>> {
            Ok(OverlapScore {
                precision: num(i)?,
                recall: num(i + 1)?,
                f1: num(i + 2)?,
            })
        };
        let task: Task = row[0].parse().map_err(|e: Error| bad(line, e.to_string()))?;
        let train_size = match &row[2] {
            "" => None,
            s => Some(s.parse::<u32>().map_err(|e| bad(line, format!("train_size: {e}")))?),
        };
        let parse_level = match &row[14] {
            "" => None,
            s => Some(s.parse::<i8>().map_err(|e| bad(line, format!("parse_level: {e}")))?),
        };
        out.push(ScoredRecord {
            key: RecordKey {
                task,
                system: SystemId::new(&row[1], train_size),
                example_id: row[3].to_string(),
            },
            metrics: MetricVector {
                rouge1: overlap(4)?,
                rouge2: overlap(7)?,
                rouge_l: overlap(10)?,
                cosine: num(13)?,
                parse_level,
            },
        });
    }
    Ok(out)
}

/// Writes `run.json` and `scores.csv` under an exclusive lock. The caller
/// holds the lock for the whole write when it passes one in.
pub fn write_run(run: &EvalRun, dir: &Path, lock: Option<&RunLock>) -> Result<()> {
    let _own;
    if lock.is_none() {
        _own = RunLock::acquire(dir)?;
    }
    let file = RunFile {
        schema_version: RUN_SCHEMA_VERSION,
        run_id: run.run_id.clone(),
        config: run.config.clone(),
        config_digest: run.config_digest.clone(),
        predictions_digest: run.predictions_digest.clone(),
        records: run.scores.len(),
        aggregates: run.aggregates.clone(),
    };
    let run_path = dir.join(RUN_FILE);
    fs::write(&run_path, crate::forge::to_json_bytes(&file, RUN_FILE)?).map_err(|e| Error::io(&run_path, e))?;
    let scores_path = dir.join(SCORES_FILE);
    fs::write(&scores_path, scores_csv(&run.scores)?).map_err(|e| Error::io(&scores_path, e))?;
    Ok(())
}

/// Reads a run back and checks that the stored aggregates are exactly what
/// the per-record scores produce.
pub fn load_run(dir: &Path) -> Result<EvalRun> {
    let run_path = dir.join(RUN_FILE);
    let text = fs::read(&run_path).map_err(|e| Error::io(&run_path, e))?;
    let file: RunFile = serde_json::from_slice(&text).map_err(|e| Error::json(run_path.display().to_string(), e))?;
    if file.schema_version != RUN_SCHEMA_VERSION {
        return Err(Error::Validation(format!(
            "{}: unsupported run schema_version {}",
            run_path.display(),
            file.schema_version
        )));
    }
    let mut scores = parse_scores(&dir.join(SCORES_FILE))?;
    scores.sort_by(|a, b| a.key.cmp(&b.key));
    if scores.len() != file.records {
        return Err(Error::Validation(format!(
            "{SCORES_FILE} holds {} records, {RUN_FILE} expects {}",
            scores.len(),
            file.records
        )));
    }
    let aggregates = aggregate(&scores);
    if aggregates != file.aggregates {
        return Err(Error::Validation(format!(
            "stored aggregates in {RUN_FILE} do not match {SCORES_FILE}"
        )));
    }
    if file.config.digest() != file.config_digest {
        return Err(Error::Validation(format!("{RUN_FILE}: config digest mismatch")));
    }
    Ok(EvalRun {
        run_id: file.run_id,
        config: file.config,
        config_digest: file.config_digest,
        predictions_digest: file.predictions_digest,
        scores,
        aggregates,
    })
}
