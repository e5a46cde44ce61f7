//! Parsers and validators for the three extraction output formats.

mod flat_json;
mod triples;

pub use flat_json::{
    extract_json_span, validate_flat_json, validate_flat_json_with, validate_ner_output,
    FlatJsonOptions, FlatJsonVerdict, Rule, Violation, LEVEL_UNPARSEABLE,
};
pub use triples::{
    parse_kge_triples, triple_prf, LineFault, MalformedLine, Triple, TripleSet, DEFAULT_SEPARATOR,
    FALLBACK_SEPARATORS,
};
