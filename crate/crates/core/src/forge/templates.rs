//! Instruction templates for the three tasks.
//!
//! The KGE and NER templates are the original Chinese annotation prompts,
//! reproduced byte for byte, with English renderings as an alternative.
//! The JSON-extraction template is parameterized by the field list.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::task::Task;

/// Example triple block embedded in the KGE instruction, header line first.
pub const KGE_EXEMPLAR_BLOCK: &str = "【一、三元組格式（主詞－關係－受詞）】
植物基飲食－可以降低－心臟病風險
植物基飲食－可以降低－糖尿病風險
植物基飲食－可以降低－癌症風險
植物基飲食－有助於攝取－纖維素
植物基飲食－有助於攝取－抗氧化物質
健康生活－包含－飲食
健康生活－包含－運動
健康生活－包含－心理健康
運動－能夠幫助－控制體重
運動－能夠幫助－增加肌肉健康
運動－能夠幫助－增加骨骼健康
運動－能夠釋放－內啡肽
運動－有助於改善－心理健康
冥想－能夠幫助－減少壓力
深呼吸－有助於－壓力減緩
親近自然－能夠提升－生活品質";

pub const KGE_PREFIX_ZH: &str = "請幫我為下面文章建構知識圖譜。請以這種方式輸出：「";
pub const KGE_PREFIX_EN: &str =
    "Please construct a knowledge graph for the following article. Output in the following format:\n";

const KGE_EXEMPLAR_BLOCK_EN: &str = "【1. Triple format (Subject－Relation－Object)】
Plant-based diet－can reduce－risk of heart disease
Plant-based diet－can reduce－risk of diabetes
Plant-based diet－can reduce－risk of cancer
Plant-based diet－helps intake－dietary fiber
Plant-based diet－helps intake－antioxidants
Healthy lifestyle－includes－diet
Healthy lifestyle－includes－exercise
Healthy lifestyle－includes－mental health
Exercise－can help－control weight
Exercise－can help－increase muscle
Exercise－can help－improve bone health
Exercise－can release－endorphins
Exercise－can improve－mental health
Meditation－can help－reduce stress
Deep breathing－helps－stress relief
Being close to nature－can improve－quality of life";

pub const NER_PREFIX_ZH: &str =
    "請為下文執行 NER 任務。請輸出成 JSON 且 value 必須為 list 格式，而其中不得再有巢狀結構。";
pub const NER_PREFIX_EN: &str = "Please perform a named entity recognition (NER) task for the following text. Output the results in JSON format, ensuring that every value is a list and that no lists contain nested structures.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Language {
    #[default]
    Zh,
    En,
}

impl FromStr for Language {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zh" => Ok(Language::Zh),
            "en" => Ok(Language::En),
            other => Err(Error::invalid(format!("unknown language `{other}`"))),
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Language::Zh => "zh",
            Language::En => "en",
        })
    }
}

/// One field a JSON-extraction instruction asks for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaField {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

impl SchemaField {
    pub fn named(name: impl Into<String>) -> Self {
        SchemaField {
            name: name.into(),
            description: None,
        }
    }
}

/// Task-specific inputs to [`render_instruction`].
#[derive(Debug, Clone, Default)]
pub struct InstructionParams {
    pub context: Option<String>,
    /// JSON extraction only.
    pub fields: Vec<SchemaField>,
    /// NER only: labels from the earlier annotation stage, appended after the context.
    pub labels: Option<String>,
}

/// The fixed leading text every instruction of `task` starts with.
pub fn template_prefix(task: Task, lang: Language) -> &'static str {
    match (task, lang) {
        (Task::Kge, Language::Zh) => KGE_PREFIX_ZH,
        (Task::Kge, Language::En) => KGE_PREFIX_EN,
        (Task::Ner, Language::Zh) => NER_PREFIX_ZH,
        (Task::Ner, Language::En) => NER_PREFIX_EN,
        (Task::JsonExtract, Language::Zh) => "請從下文擷取以下資訊，並輸出成 JSON：",
        (Task::JsonExtract, Language::En) => {
            "Extract the following information from the text below and output it as JSON:"
        }
    }
}

fn json_rules(lang: Language) -> &'static str {
    match lang {
        Language::Zh => "輸出規則：最外層必須是 JSON 物件，且只能包含上列欄位；每個 value 必須為 list 格式，list 中只能是字串、數字、布林值或 null，不得再有巢狀結構。",
        Language::En => "Rules: the top level must be a JSON object containing only the fields above; every value must be a list whose elements are strings, numbers, booleans or null, with no nested structures.",
    }
}

/// The instruction text without the context.
pub fn instruction_template(task: Task, fields: &[SchemaField], lang: Language) -> Result<String> {
    let prefix = template_prefix(task, lang);
    match task {
        Task::Kge => Ok(match lang {
            Language::Zh => format!("{prefix}{KGE_EXEMPLAR_BLOCK}」"),
            Language::En => format!("{prefix}{KGE_EXEMPLAR_BLOCK_EN}"),
        }),
        Task::Ner => Ok(prefix.to_owned()),
        Task::JsonExtract => {
            if fields.is_empty() {
                return Err(Error::invalid("json-extract instruction needs at least one field"));
            }
            let sep = match lang {
                Language::Zh => "：",
                Language::En => ": ",
            };
            let mut text = String::from(prefix);
            for field in fields {
                if field.name.trim().is_empty() {
                    return Err(Error::invalid("schema field names must be non-empty"));
                }
                text.push_str("\n- ");
                text.push_str(&field.name);
                if let Some(desc) = &field.description {
                    text.push_str(sep);
                    text.push_str(desc);
                }
            }
            text.push('\n');
            text.push_str(json_rules(lang));
            Ok(text)
        }
    }
}

/// Full prompt: template, then the context (and NER labels) on following lines.
pub fn render_instruction(task: Task, params: &InstructionParams, lang: Language) -> Result<String> {
    let context = params
        .context
        .as_deref()
        .ok_or_else(|| Error::invalid(format!("{task} instruction needs a context")))?;
    let mut text = instruction_template(task, &params.fields, lang)?;
    text.push('\n');
    text.push_str(context);
    if let (Task::Ner, Some(labels)) = (task, &params.labels) {
        text.push('\n');
        text.push_str(labels);
    }
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(context: &str) -> InstructionParams {
        InstructionParams {
            context: Some(context.to_owned()),
            ..InstructionParams::default()
        }
    }

    #[test]
    fn kge_template() {
        let text = render_instruction(Task::Kge, &params("文章內容"), Language::Zh).unwrap();
        assert!(text.starts_with("請幫我為下面文章建構知識圖譜"));
        assert!(text.contains(KGE_EXEMPLAR_BLOCK));
        assert!(text.ends_with("生活品質」\n文章內容"));
    }

    #[test]
    fn ner_template() {
        let mut p = params("張三在台北工作。");
        p.labels = Some("{\"PERSON\":[\"張三\"]}".into());
        let text = render_instruction(Task::Ner, &p, Language::Zh).unwrap();
        assert!(text.starts_with(NER_PREFIX_ZH));
        assert!(text.contains("value 必須為 list 格式"));
        assert!(text.ends_with("張三在台北工作。\n{\"PERSON\":[\"張三\"]}"));
    }

    #[test]
    fn json_extract_template() {
        let mut p = params("...");
        p.fields = vec![SchemaField::named("authors"), SchemaField::named("year")];
        let text = render_instruction(Task::JsonExtract, &p, Language::En).unwrap();
        assert!(text.contains("- authors") && text.contains("- year"));
        assert!(text.contains("no nested structures"));
        let zh = render_instruction(Task::JsonExtract, &p, Language::Zh).unwrap();
        assert!(zh.contains("不得再有巢狀結構"));
    }

    #[test]
    fn missing_params() {
        assert!(render_instruction(Task::Kge, &InstructionParams::default(), Language::Zh).is_err());
        assert!(render_instruction(Task::JsonExtract, &params("x"), Language::Zh).is_err());
    }

    #[test]
    fn english_exemplar_parses_to_sixteen_triples() {
        let set = crate::validate::parse_kge_triples(KGE_EXEMPLAR_BLOCK_EN, &[crate::validate::DEFAULT_SEPARATOR]);
        assert_eq!(set.triples.len(), 16);
        assert!(set.malformed.is_empty());
    }
}
