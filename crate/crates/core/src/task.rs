use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// The three extraction tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    JsonExtract,
    Kge,
    Ner,
}

impl Task {
    pub const ALL: [Task; 3] = [Task::JsonExtract, Task::Kge, Task::Ner];

    pub fn as_str(&self) -> &'static str {
        match self {
            Task::JsonExtract => "json-extract",
            Task::Kge => "kge",
            Task::Ner => "ner",
        }
    }

    /// Metrics a win-rate cell counts for this task.
    pub fn applicable_metrics(&self) -> &'static [Metric] {
        match self {
            Task::JsonExtract => &[Metric::RougeLF1, Metric::Cosine, Metric::ParseValidity],
            Task::Kge | Task::Ner => &[Metric::RougeLF1, Metric::Cosine],
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json-extract" | "json" => Ok(Task::JsonExtract),
            "kge" => Ok(Task::Kge),
            "ner" => Ok(Task::Ner),
            other => Err(Error::invalid(format!("unknown task `{other}`"))),
        }
    }
}

/// Aggregate metrics that take part in comparisons between models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    RougeLF1,
    Cosine,
    /// Fraction of outputs that parse as JSON.
    ParseValidity,
}

impl Metric {
    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::RougeLF1 => "rouge-l-f1",
            Metric::Cosine => "cosine",
            Metric::ParseValidity => "parse-validity",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rouge-l-f1" => Ok(Metric::RougeLF1),
            "cosine" => Ok(Metric::Cosine),
            "parse-validity" => Ok(Metric::ParseValidity),
            other => Err(Error::invalid(format!("unknown metric `{other}`"))),
        }
    }
}
