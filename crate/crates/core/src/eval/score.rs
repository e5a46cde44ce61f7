use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forge::sha256_hex;
use crate::metrics::{cosine_tf, cosine_vectors, rouge_l, rouge_n};
use crate::stats::{PairedOptions, TestMethod, ZTestOptions, DEFAULT_ALPHA, DEFAULT_RESAMPLES, EPSILON_COUNT, EPSILON_UNIT_METRIC};
use crate::task::Task;
use crate::tokenize::{tokenize, TokenizerMode};
use crate::validate::{validate_flat_json_with, FlatJsonOptions};
use crate::OverlapScoreF64;

use super::predictions::{PredictionRecord, RecordKey, SystemId};

pub const RUN_SCHEMA_VERSION: u32 = 1;

/// Everything that influences scores and reports. Serialized into `run.json`
/// and hashed into the config digest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreConfig {
    pub tokenizer: TokenizerMode,
    /// Parse the longest balanced `{...}` span instead of the raw output.
    pub extract_json: bool,
    pub methods: Vec<TestMethod>,
    pub alpha: f64,
    pub continuity_correction: bool,
    pub resamples: usize,
    pub seed: u64,
    pub epsilon_unit: f64,
    pub epsilon_count: f64,
    /// SHA-256 of the embedding file when cosine comes from supplied vectors.
    #[serde(default)]
    pub embeddings_digest: Option<String>,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        ScoreConfig {
            tokenizer: TokenizerMode::CjkChar,
            extract_json: false,
            methods: vec![TestMethod::PairedT],
            alpha: DEFAULT_ALPHA,
            continuity_correction: false,
            resamples: DEFAULT_RESAMPLES,
            seed: 0,
            epsilon_unit: EPSILON_UNIT_METRIC,
            epsilon_count: EPSILON_COUNT,
            embeddings_digest: None,
        }
    }
}

impl ScoreConfig {
    pub fn digest(&self) -> String {
        sha256_hex(&serde_json::to_vec(self).expect("config serializes"))
    }

    pub fn paired_options(&self) -> PairedOptions<f64> {
        PairedOptions {
            alpha: self.alpha,
            resamples: self.resamples,
            seed: self.seed,
        }
    }

    pub fn z_options(&self) -> ZTestOptions<f64> {
        ZTestOptions {
            alpha: self.alpha,
            continuity_correction: self.continuity_correction,
        }
    }
}

/// Per-record scores.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricVector {
    pub rouge1: OverlapScoreF64,
    pub rouge2: OverlapScoreF64,
    pub rouge_l: OverlapScoreF64,
    pub cosine: f64,
    /// Flat-JSON level for JSON-extraction records, −1 when unparseable.
    pub parse_level: Option<i8>,
}

impl MetricVector {
    pub fn parses(&self) -> bool {
        self.parse_level.is_some_and(|l| l >= 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredRecord {
    pub key: RecordKey,
    pub metrics: MetricVector,
}

/// Means over one (task, system) group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub task: Task,
    pub system: SystemId,
    pub n: usize,
    pub rouge1_f1: f64,
    pub rouge2_f1: f64,
    pub rouge_l_precision: f64,
    pub rouge_l_recall: f64,
    pub rouge_l_f1: f64,
    pub cosine: f64,
    /// JSON extraction only: outputs that parse at all.
    pub parse_count: Option<usize>,
    /// JSON extraction only: outputs that are fully flat.
    pub flat_count: Option<usize>,
}

impl Aggregate {
    pub fn parse_rate(&self) -> Option<f64> {
        self.parse_count.map(|k| k as f64 / self.n as f64)
    }
}

#[derive(Debug, Clone)]
pub struct EvalRun {
    pub run_id: String,
    pub config: ScoreConfig,
    pub config_digest: String,
    pub predictions_digest: String,
    /// Sorted by key.
    pub scores: Vec<ScoredRecord>,
    /// Sorted by (task, system).
    pub aggregates: Vec<Aggregate>,
}

impl EvalRun {
    pub(crate) fn new(config: ScoreConfig, predictions_digest: String, mut scores: Vec<ScoredRecord>) -> Self {
        scores.sort_by(|a, b| a.key.cmp(&b.key));
        let config_digest = config.digest();
        let run_id = format!(
            "run-{}",
            &sha256_hex(format!("{config_digest}:{predictions_digest}").as_bytes())[..12]
        );
        let aggregates = aggregate(&scores);
        EvalRun {
            run_id,
            config,
            config_digest,
            predictions_digest,
            scores,
            aggregates,
        }
    }

    pub fn aggregate_for(&self, task: Task, system: &SystemId) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.task == task && &a.system == system)
    }

    /// Distinct systems in key order.
    pub fn systems(&self) -> Vec<SystemId> {
        let mut out: Vec<SystemId> = self.aggregates.iter().map(|a| a.system.clone()).collect();
        out.sort();
        out.dedup();
        out
    }

    /// Scores of one (task, system) group, by example id.
    pub fn group(&self, task: Task, system: &SystemId) -> BTreeMap<&str, &MetricVector> {
        self.scores
            .iter()
            .filter(|s| s.key.task == task && &s.key.system == system)
            .map(|s| (s.key.example_id.as_str(), &s.metrics))
            .collect()
    }
}

/// Recomputes group means; `scores` must be sorted by key.
pub fn aggregate(scores: &[ScoredRecord]) -> Vec<Aggregate> {
    let mut groups: BTreeMap<(Task, &SystemId), Vec<&MetricVector>> = BTreeMap::new();
    for s in scores {
        groups.entry((s.key.task, &s.key.system)).or_default().push(&s.metrics);
    }
    groups
        .into_iter()
        .map(|((task, system), group)| {
            let n = group.len();
            let mean = |f: &dyn Fn(&MetricVector) -> f64| group.iter().map(|m| f(m)).sum::<f64>() / n as f64;
            let json = task == Task::JsonExtract;
            Aggregate {
                task,
                system: system.clone(),
                n,
                rouge1_f1: mean(&|m| m.rouge1.f1),
                rouge2_f1: mean(&|m| m.rouge2.f1),
                rouge_l_precision: mean(&|m| m.rouge_l.precision),
                rouge_l_recall: mean(&|m| m.rouge_l.recall),
                rouge_l_f1: mean(&|m| m.rouge_l.f1),
                cosine: mean(&|m| m.cosine),
                parse_count: json.then(|| group.iter().filter(|m| m.parses()).count()),
                flat_count: json.then(|| group.iter().filter(|m| m.parse_level == Some(3)).count()),
            }
        })
        .collect()
}

/// Externally computed embedding pairs keyed like prediction records.
#[derive(Debug, Clone, Default)]
pub struct EmbeddingTable {
    vectors: HashMap<RecordKey, (Vec<f64>, Vec<f64>)>,
    pub digest: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EmbeddingLine {
    example_id: String,
    task: Task,
    model: String,
    #[serde(default)]
    train_size: Option<u32>,
    candidate: Vec<f64>,
    reference: Vec<f64>,
}

impl EmbeddingTable {
    /// Reads lines of `{example_id, task, model, train_size?, candidate, reference}`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut vectors = HashMap::new();
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let e: EmbeddingLine = serde_json::from_str(line)
                .map_err(|err| Error::json(format!("{}:{}", path.display(), i + 1), err))?;
            let key = RecordKey {
                task: e.task,
                system: SystemId::new(e.model, e.train_size),
                example_id: e.example_id,
            };
            vectors.insert(key, (e.candidate, e.reference));
        }
        Ok(EmbeddingTable {
            vectors,
            digest: sha256_hex(text.as_bytes()),
        })
    }
}

pub fn score_record(record: &PredictionRecord, config: &ScoreConfig) -> MetricVector {
    let cand = tokenize(&record.output_text, config.tokenizer);
    let refs = tokenize(&record.reference_text, config.tokenizer);
    let parse_level = (record.task == Task::JsonExtract).then(|| {
        let opts = FlatJsonOptions {
            extract_span: config.extract_json,
        };
        validate_flat_json_with(&record.output_text, &opts).level_passed
    });
    MetricVector {
        rouge1: rouge_n(&cand, &refs, 1).expect("n >= 1"),
        rouge2: rouge_n(&cand, &refs, 2).expect("n >= 1"),
        rouge_l: rouge_l(&cand, &refs),
        cosine: cosine_tf(&cand, &refs),
        parse_level,
    }
}

/// Canonical digest of a record set, independent of line order and formatting.
pub fn predictions_digest(records: &[PredictionRecord]) -> String {
    let mut sorted: Vec<&PredictionRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.key());
    let mut buf = Vec::new();
    for r in sorted {
        buf.extend(serde_json::to_vec(r).expect("record serializes"));
        buf.push(b'\n');
    }
    sha256_hex(&buf)
}

/// Scores every record and aggregates per (task, system). Parallel over
/// records; the output does not depend on the thread count.
pub fn score_run(
    records: &[PredictionRecord],
    config: &ScoreConfig,
    embeddings: Option<&EmbeddingTable>,
) -> Result<EvalRun> {
    if records.is_empty() {
        return Err(Error::invalid("no prediction records to score"));
    }
    let mut config = config.clone();
    config.embeddings_digest = embeddings.map(|e| e.digest.clone());
    if let Some(table) = embeddings {
        let missing: Vec<String> = records
            .iter()
            .map(PredictionRecord::key)
            .filter(|k| !table.vectors.contains_key(k))
            .map(|k| format!("{}/{}/{}", k.task, k.system, k.example_id))
            .collect();
        if !missing.is_empty() {
            return Err(Error::Alignment {
                context: "embedding table".into(),
                missing,
            });
        }
    }
    let scores = records
        .par_iter()
        .map(|r| {
            let key = r.key();
            let mut metrics = score_record(r, &config);
            if let Some(table) = embeddings {
                let (c, rf) = &table.vectors[&key];
                metrics.cosine = cosine_vectors(c, rf).ok_or_else(|| {
                    Error::invalid(format!("unusable embedding pair for {}/{}", key.system, key.example_id))
                })?;
            }
            Ok(ScoredRecord { key, metrics })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalRun::new(config, predictions_digest(records), scores))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, task: Task, model: &str, out: &str, reference: &str) -> PredictionRecord {
        PredictionRecord {
            schema_version: None,
            example_id: id.into(),
            task,
            model: model.into(),
            train_size: None,
            output_text: out.into(),
            reference_text: reference.into(),
        }
    }

    #[test]
    fn identity_record() {
        let run = score_run(&[rec("1", Task::Kge, "m", "甲－是－乙", "甲－是－乙")], &ScoreConfig::default(), None).unwrap();
        let m = run.scores[0].metrics;
        assert_eq!((m.rouge_l.f1, m.cosine), (1.0, 1.0));
        assert_eq!(m.parse_level, None);
    }

    #[test]
    fn empty_output() {
        let run = score_run(&[rec("1", Task::JsonExtract, "m", "", "{\"a\":[1]}")], &ScoreConfig::default(), None).unwrap();
        let m = run.scores[0].metrics;
        assert_eq!((m.rouge1.f1, m.rouge2.f1, m.rouge_l.f1, m.cosine), (0.0, 0.0, 0.0, 0.0));
        assert_eq!(m.parse_level, Some(-1));
        assert_eq!(run.aggregates[0].parse_count, Some(0));
    }

    #[test]
    fn parse_counts_per_group() {
        let records: Vec<PredictionRecord> = (0..300)
            .map(|i| {
                let out = if i < 144 { "{\"a\":[1]}" } else { "{\"a\":[1" };
                rec(&format!("{i:03}"), Task::JsonExtract, "ETLCH-100", out, "{\"a\":[1]}")
            })
            .collect();
        let run = score_run(&records, &ScoreConfig::default(), None).unwrap();
        assert_eq!(run.aggregates.len(), 1);
        assert_eq!(run.aggregates[0].parse_count, Some(144));
        assert_eq!(run.aggregates[0].n, 300);
    }

    #[test]
    fn embedding_cosine_replaces_tf() {
        let records = [rec("1", Task::Ner, "m", "a", "b")];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.jsonl");
        std::fs::write(&path, r#"{"example_id":"1","task":"ner","model":"m","candidate":[1,1],"reference":[1,0]}"#).unwrap();
        let table = EmbeddingTable::load(&path).unwrap();
        let run = score_run(&records, &ScoreConfig::default(), Some(&table)).unwrap();
        assert!((run.scores[0].metrics.cosine - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(run.config.embeddings_digest.is_some());
        let other = [rec("2", Task::Ner, "m", "a", "b")];
        assert!(matches!(score_run(&other, &ScoreConfig::default(), Some(&table)), Err(Error::Alignment { .. })));
    }

    #[test]
    fn run_id_tracks_inputs_and_config() {
        let records = [rec("1", Task::Ner, "m", "a", "b")];
        let a = score_run(&records, &ScoreConfig::default(), None).unwrap();
        let b = score_run(&records, &ScoreConfig::default(), None).unwrap();
        assert_eq!(a.run_id, b.run_id);
        let cfg = ScoreConfig { tokenizer: TokenizerMode::Whitespace, ..ScoreConfig::default() };
        assert_ne!(score_run(&records, &cfg, None).unwrap().run_id, a.run_id);
        assert!(score_run(&[], &cfg, None).is_err());
    }
}
