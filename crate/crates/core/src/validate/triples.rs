use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::metrics::OverlapScore;
use crate::scalar::Real;

/// Full-width hyphen-minus, the separator used in the annotation format.
pub const DEFAULT_SEPARATOR: &str = "\u{FF0D}";

/// Full-width dash first, then en-dash and ASCII hyphen.
pub const FALLBACK_SEPARATORS: [&str; 3] = ["\u{FF0D}", "\u{2013}", "-"];

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub subject: String,
    pub relation: String,
    pub object: String,
}

impl Triple {
    pub fn new(
        subject: impl Into<String>,
        relation: impl Into<String>,
        object: impl Into<String>,
    ) -> Self {
        Triple {
            subject: subject.into(),
            relation: relation.into(),
            object: object.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LineFault {
    NoSeparator,
    WrongArity { parts: usize },
    EmptyComponent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MalformedLine {
    /// 1-based.
    pub line: usize,
    pub raw: String,
    pub fault: LineFault,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct TripleSet {
    pub triples: Vec<Triple>,
    pub malformed: Vec<MalformedLine>,
    /// 1-based numbers of header and blank lines.
    pub skipped: Vec<usize>,
    pub total_lines: usize,
}

impl TripleSet {
    /// Renders the triples one per line with the default separator.
    pub fn to_lines(&self) -> String {
        self.triples
            .iter()
            .map(|t| [t.subject.as_str(), &t.relation, &t.object].join(DEFAULT_SEPARATOR))
            .collect::<Vec<_>>()
            .join("\n")
    }

    pub fn is_well_formed(&self) -> bool {
        !self.triples.is_empty() && self.malformed.is_empty()
    }
}

fn is_header(line: &str) -> bool {
    line.starts_with('【') && line.ends_with('】')
}

/// Parses one-triple-per-line KGE output.
///
/// Each line is split on the first separator from `separators` it contains;
/// anything other than exactly three non-empty parts is recorded as malformed.
pub fn parse_kge_triples(text: &str, separators: &[&str]) -> TripleSet {
    let separators: Vec<&str> = if separators.is_empty() {
        vec![DEFAULT_SEPARATOR]
    } else {
        separators.iter().copied().filter(|s| !s.is_empty()).collect()
    };
    let mut set = TripleSet::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        set.total_lines += 1;
        let line = raw.trim();
        if line.is_empty() || is_header(line) {
            set.skipped.push(line_no);
            continue;
        }
        let malformed = |fault| MalformedLine {
            line: line_no,
            raw: raw.to_owned(),
            fault,
        };
        let Some(sep) = separators.iter().find(|s| line.contains(**s)) else {
            set.malformed.push(malformed(LineFault::NoSeparator));
            continue;
        };
        let parts: Vec<&str> = line.split(sep).map(str::trim).collect();
        if parts.len() != 3 {
            set.malformed.push(malformed(LineFault::WrongArity { parts: parts.len() }));
        } else if parts.iter().any(|p| p.is_empty()) {
            set.malformed.push(malformed(LineFault::EmptyComponent));
        } else {
            set.triples.push(Triple::new(parts[0], parts[1], parts[2]));
        }
    }
    set
}

/// Set-level precision/recall of predicted triples against gold, by exact match.
///
/// Diagnostic only; none of the replication reports use it.
pub fn triple_prf<F: Real>(predicted: &[Triple], gold: &[Triple]) -> OverlapScore<F> {
    let pred: BTreeSet<&Triple> = predicted.iter().collect();
    let gold: BTreeSet<&Triple> = gold.iter().collect();
    match (pred.is_empty(), gold.is_empty()) {
        (true, true) => return OverlapScore::perfect(),
        (true, false) | (false, true) => return OverlapScore::zero(),
        _ => {}
    }
    let hits = F::count(pred.intersection(&gold).count());
    OverlapScore::from_pr(hits / F::count(pred.len()), hits / F::count(gold.len()))
}
