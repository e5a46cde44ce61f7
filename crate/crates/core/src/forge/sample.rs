use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::task::Task;
use crate::validate::{
    parse_kge_triples, validate_flat_json, validate_ner_output, FlatJsonOptions, FlatJsonVerdict,
    TripleSet, DEFAULT_SEPARATOR,
};

use super::templates::{template_prefix, Language};

/// One annotated training example.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub id: String,
    pub task: Task,
    pub context: String,
    pub instruction: String,
    pub gold_output: String,
    #[serde(default)]
    pub topic: String,
    /// Keys the gold output must contain (JSON extraction schema).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub schema_fields: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "format", rename_all = "kebab-case")]
pub enum GoldDetail {
    FlatJson(FlatJsonVerdict),
    Triples(TripleSet),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoldVerdict {
    pub passed: bool,
    pub problems: Vec<String>,
    pub detail: GoldDetail,
}

/// Checks a sample's gold output against its task format, and the
/// instruction against the task template.
pub fn validate_gold(sample: &Sample) -> GoldVerdict {
    let mut problems = Vec::new();
    let detail = match sample.task {
        Task::Kge => {
            let set = parse_kge_triples(&sample.gold_output, &[DEFAULT_SEPARATOR]);
            if set.triples.is_empty() {
                problems.push("no triples".to_owned());
            }
            for bad in &set.malformed {
                problems.push(format!("line {}: malformed triple ({:?})", bad.line, bad.fault));
            }
            GoldDetail::Triples(set)
        }
        Task::Ner => flat_json_detail(validate_flat_json(&sample.gold_output), &mut problems),
        Task::JsonExtract => {
            if sample.schema_fields.is_empty() {
                problems.push("json-extract sample has no schema fields".to_owned());
            }
            let required: BTreeSet<String> = sample.schema_fields.iter().cloned().collect();
            let verdict =
                validate_ner_output(&sample.gold_output, Some(&required), &FlatJsonOptions::default());
            flat_json_detail(verdict, &mut problems)
        }
    };
    if matches!(sample.task, Task::Kge | Task::Ner) {
        let prefixed = [Language::Zh, Language::En]
            .iter()
            .any(|&lang| sample.instruction.starts_with(template_prefix(sample.task, lang)));
        if !prefixed {
            problems.push(format!("instruction does not start with the {} template", sample.task));
        }
    }
    GoldVerdict {
        passed: problems.is_empty(),
        problems,
        detail,
    }
}

fn flat_json_detail(verdict: FlatJsonVerdict, problems: &mut Vec<String>) -> GoldDetail {
    for v in &verdict.violations {
        problems.push(format!("{} {:?}: {}", v.path, v.rule, v.message));
    }
    GoldDetail::FlatJson(verdict)
}
