use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::de::{self, Deserialize, Deserializer, IgnoredAny, MapAccess, SeqAccess, Visitor};
use serde::Serialize;
use serde_json::Value;

pub const LEVEL_UNPARSEABLE: i8 = -1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Unparseable,
    RootNotObject,
    DuplicateKey,
    ValueNotArray,
    NestedStructure,
    /// Key coverage, reported beside the structural levels rather than in them.
    MissingKey,
}

impl Rule {
    fn is_structural(self) -> bool {
        self != Rule::MissingKey
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub path: String,
    pub rule: Rule,
    pub message: String,
}

/// Outcome of checking a document against the flat-list shape.
///
/// Levels are cumulative: 0 parses, 1 has an object root with unique keys,
/// 2 has only array values, 3 has only scalar array elements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlatJsonVerdict {
    pub level_passed: i8,
    pub violations: Vec<Violation>,
    /// Root keys in document order; empty unless the root is an object.
    #[serde(skip)]
    pub keys: Vec<String>,
}

impl FlatJsonVerdict {
    pub fn parses(&self) -> bool {
        self.level_passed >= 0
    }

    pub fn is_flat(&self) -> bool {
        self.level_passed == 3
    }

    /// Flat and with no coverage violations.
    pub fn is_clean(&self) -> bool {
        self.is_flat() && self.violations.is_empty()
    }

    pub fn structural_violations(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| v.rule.is_structural())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FlatJsonOptions {
    /// Parse only the longest balanced `{...}` span found in the text.
    pub extract_span: bool,
}

enum Root {
    Object(Vec<(String, Value)>),
    Other(&'static str),
}

impl<'de> Deserialize<'de> for Root {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct RootVisitor;

        impl<'de> Visitor<'de> for RootVisitor {
            type Value = Root;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a JSON document")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Root, A::Error> {
                let mut entries = Vec::new();
                while let Some((k, v)) = map.next_entry::<String, Value>()? {
                    entries.push((k, v));
                }
                Ok(Root::Object(entries))
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Root, A::Error> {
                while seq.next_element::<IgnoredAny>()?.is_some() {}
                Ok(Root::Other("array"))
            }

            fn visit_bool<E: de::Error>(self, _: bool) -> Result<Root, E> {
                Ok(Root::Other("boolean"))
            }

            fn visit_i64<E: de::Error>(self, _: i64) -> Result<Root, E> {
                Ok(Root::Other("number"))
            }

            fn visit_u64<E: de::Error>(self, _: u64) -> Result<Root, E> {
                Ok(Root::Other("number"))
            }

            fn visit_f64<E: de::Error>(self, _: f64) -> Result<Root, E> {
                Ok(Root::Other("number"))
            }

            fn visit_str<E: de::Error>(self, _: &str) -> Result<Root, E> {
                Ok(Root::Other("string"))
            }

            fn visit_unit<E: de::Error>(self) -> Result<Root, E> {
                Ok(Root::Other("null"))
            }
        }

        deserializer.deserialize_any(RootVisitor)
    }
}

fn key_path(key: &str) -> String {
    let plain = !key.is_empty()
        && !key.starts_with(|c: char| c.is_ascii_digit())
        && key.chars().all(|c| c.is_alphanumeric() || c == '_');
    if plain {
        format!("$.{key}")
    } else {
        format!("$[{}]", Value::String(key.to_owned()))
    }
}

fn type_name(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}

/// Longest balanced `{...}` span, tracking JSON string literals so braces
/// inside strings do not count. Ties go to the earliest span.
pub fn extract_json_span(text: &str) -> Option<&str> {
    let mut best: Option<(usize, usize)> = None;
    let mut depth = 0usize;
    let mut start = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    for (i, c) in text.char_indices() {
        if depth == 0 {
            if c == '{' {
                depth = 1;
                start = i;
                in_string = false;
            }
            continue;
        }
        if in_string {
            match (escaped, c) {
                (true, _) => escaped = false,
                (false, '\\') => escaped = true,
                (false, '"') => in_string = false,
                _ => {}
            }
            continue;
        }
        match c {
            '"' => in_string = true,
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth == 0 {
                    let end = i + 1;
                    if best.map_or(true, |(s, e)| end - start > e - s) {
                        best = Some((start, end));
                    }
                }
            }
            _ => {}
        }
    }
    best.map(|(s, e)| &text[s..e])
}

pub fn validate_flat_json(text: &str) -> FlatJsonVerdict {
    validate_flat_json_with(text, &FlatJsonOptions::default())
}

pub fn validate_flat_json_with(text: &str, opts: &FlatJsonOptions) -> FlatJsonVerdict {
    let text = if opts.extract_span {
        extract_json_span(text).unwrap_or(text)
    } else {
        text
    };
    let root = match serde_json::from_str::<Root>(text) {
        Ok(root) => root,
        Err(e) => {
            return FlatJsonVerdict {
                level_passed: LEVEL_UNPARSEABLE,
                violations: vec![Violation {
                    path: "$".into(),
                    rule: Rule::Unparseable,
                    message: e.to_string(),
                }],
                keys: Vec::new(),
            }
        }
    };
    let entries = match root {
        Root::Object(entries) => entries,
        Root::Other(kind) => {
            return FlatJsonVerdict {
                level_passed: 0,
                violations: vec![Violation {
                    path: "$".into(),
                    rule: Rule::RootNotObject,
                    message: format!("root is {kind}, expected object"),
                }],
                keys: Vec::new(),
            }
        }
    };

    let mut violations = Vec::new();
    let mut level = 3;
    let mut seen = HashSet::new();
    let mut keys = Vec::new();
    for (key, _) in &entries {
        if !seen.insert(key.as_str()) {
            level = 0;
            violations.push(Violation {
                path: key_path(key),
                rule: Rule::DuplicateKey,
                message: format!("key `{key}` appears more than once"),
            });
        } else {
            keys.push(key.clone());
        }
    }
    for (key, value) in &entries {
        let path = key_path(key);
        let Value::Array(items) = value else {
            level = level.min(1);
            violations.push(Violation {
                message: format!("value is {}, expected array", type_name(value)),
                path,
                rule: Rule::ValueNotArray,
            });
            continue;
        };
        for (i, item) in items.iter().enumerate() {
            if matches!(item, Value::Array(_) | Value::Object(_)) {
                level = level.min(2);
                violations.push(Violation {
                    path: format!("{path}[{i}]"),
                    rule: Rule::NestedStructure,
                    message: format!("element is {}, expected scalar", type_name(item)),
                });
            }
        }
    }
    FlatJsonVerdict {
        level_passed: level,
        violations,
        keys,
    }
}

/// Flat-JSON check plus optional label coverage. Missing keys are appended
/// as violations but never lower `level_passed`.
pub fn validate_ner_output(
    text: &str,
    required_keys: Option<&BTreeSet<String>>,
    opts: &FlatJsonOptions,
) -> FlatJsonVerdict {
    let mut verdict = validate_flat_json_with(text, opts);
    if let Some(required) = required_keys {
        if verdict.level_passed >= 1 || !verdict.keys.is_empty() {
            for key in required {
                if !verdict.keys.contains(key) {
                    verdict.violations.push(Violation {
                        path: key_path(key),
                        rule: Rule::MissingKey,
                        message: format!("required key `{key}` is missing"),
                    });
                }
            }
        }
    }
    verdict
}

#[cfg(test)]
mod tests {
    use super::*;

    fn level(text: &str) -> i8 {
        validate_flat_json(text).level_passed
    }

    #[test]
    fn five_canonical_cases() {
        assert_eq!(level(r#"{"a":["x","y"]}"#), 3);
        assert_eq!(level(r#"{"a":"x"}"#), 1);
        assert_eq!(level(r#"{"a":[["x"]]}"#), 2);
        assert_eq!(level("[1,2]"), 0);
        assert_eq!(level(r#"{"a":["#), -1);
    }

    #[test]
    fn violation_paths() {
        let v = validate_flat_json(r#"{"a":"x"}"#);
        assert_eq!(v.violations.len(), 1);
        assert_eq!(v.violations[0].path, "$.a");
        assert_eq!(v.violations[0].rule, Rule::ValueNotArray);

        let v = validate_flat_json(r#"{"a":[["x"]]}"#);
        assert_eq!(v.violations[0].path, "$.a[0]");
        assert_eq!(v.violations[0].rule, Rule::NestedStructure);

        let v = validate_flat_json(r#"{"人名":[{"x":1}], "a b":[1]}"#);
        assert_eq!(v.violations[0].path, "$.人名[0]");
        let v = validate_flat_json(r#"{"a b":1}"#);
        assert_eq!(v.violations[0].path, r#"$["a b"]"#);
    }

    #[test]
    fn duplicate_root_keys_fail_level_one() {
        let v = validate_flat_json(r#"{"a":[1],"a":[2]}"#);
        assert_eq!(v.level_passed, 0);
        assert_eq!(v.violations[0].rule, Rule::DuplicateKey);
    }

    #[test]
    fn scalars_of_every_kind_are_flat() {
        assert_eq!(level(r#"{"a":["s",1,2.5,true,null],"b":[]}"#), 3);
        assert_eq!(level("{}"), 3);
        assert_eq!(level("  {\"a\": []}\n"), 3);
    }

    #[test]
    fn non_documents() {
        assert_eq!(level(""), -1);
        assert_eq!(level("not json"), -1);
        assert_eq!(level(r#"{"a":[]} trailing"#), -1);
        assert_eq!(level("\"str\""), 0);
        assert_eq!(level("null"), 0);
    }

    #[test]
    fn span_extraction_is_opt_in() {
        let text = "Here you go:\n```json\n{\"a\": [\"}\"]}\n```";
        assert_eq!(level(text), -1);
        let v = validate_flat_json_with(text, &FlatJsonOptions { extract_span: true });
        assert_eq!(v.level_passed, 3);
        assert_eq!(extract_json_span("x {a} y {bb: {c}} z"), Some("{bb: {c}}"));
        assert_eq!(extract_json_span("no braces"), None);
    }

    #[test]
    fn ner_key_coverage() {
        let required: BTreeSet<String> = ["PERSON", "ORG"].iter().map(|s| s.to_string()).collect();
        let opts = FlatJsonOptions::default();
        let v = validate_ner_output(r#"{"PERSON":["張三"],"ORG":[]}"#, Some(&required), &opts);
        assert_eq!(v.level_passed, 3);
        assert!(v.violations.is_empty());

        let v = validate_ner_output(r#"{"PERSON":["張三"]}"#, Some(&required), &opts);
        assert_eq!(v.level_passed, 3);
        assert_eq!(v.violations.len(), 1);
        assert_eq!(v.violations[0].rule, Rule::MissingKey);
        assert_eq!(v.structural_violations().count(), 0);

        let v = validate_ner_output("not json", Some(&required), &opts);
        assert_eq!(v.level_passed, -1);
        assert_eq!(v.violations.len(), 1);
    }
}
