//! Sample generation through a chat-completions endpoint or offline fixtures.

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::time::Duration;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::task::Task;
use crate::tokenize::is_cjk;

use super::emit::sha256_hex;
use super::sample::{validate_gold, Sample};
use super::templates::{instruction_template, render_instruction, InstructionParams, Language, SchemaField};

pub const DEFAULT_TOKEN_CAP: usize = 1500;
pub const DEFAULT_MAX_RETRIES: usize = 3;

/// Rough token count: one per CJK character, 1.3 per run of other letters/digits.
pub fn approx_tokens(text: &str) -> usize {
    let mut cjk = 0usize;
    let mut words = 0usize;
    let mut in_word = false;
    for c in text.chars() {
        if is_cjk(c) {
            cjk += 1;
            in_word = false;
        } else if c.is_alphanumeric() {
            if !in_word {
                words += 1;
            }
            in_word = true;
        } else {
            in_word = false;
        }
    }
    cjk + (words * 13).div_ceil(10)
}

fn is_sentence_end(c: char) -> bool {
    matches!(c, '。' | '！' | '？' | '!' | '?' | '.' | '\n')
}

/// Cuts `text` at the last sentence boundary that keeps it within `cap`
/// approximate tokens; falls back to a hard cut when no boundary fits.
pub fn truncate_to_token_cap(text: &str, cap: usize) -> &str {
    if approx_tokens(text) <= cap {
        return text;
    }
    let mut last_boundary = None;
    let mut hard_end = 0;
    for (i, c) in text.char_indices() {
        let end = i + c.len_utf8();
        if approx_tokens(&text[..end]) > cap {
            break;
        }
        hard_end = end;
        if is_sentence_end(c) {
            last_boundary = Some(end);
        }
    }
    text[..last_boundary.unwrap_or(hard_end)].trim_end()
}

/// The three generation stages: article, field list (JSON extraction only),
/// and gold annotation conditioned on article and instruction.
pub trait SampleSource: Sync {
    fn article(&self, topic: &str, lang: Language, token_cap: usize) -> Result<String>;
    fn schema_fields(&self, topic: &str, context: &str, lang: Language) -> Result<Vec<SchemaField>>;
    fn gold(&self, task: Task, topic: &str, prompt: &str) -> Result<String>;
}

/// Settings for a chat-completions endpoint.
#[derive(Debug, Clone)]
pub struct EndpointConfig {
    pub base_url: String,
    pub model: String,
    pub api_key: Option<String>,
    pub timeout: Duration,
    pub temperature: f64,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        EndpointConfig {
            base_url: "https://api.openai.com/v1".into(),
            model: "gpt-4o-mini".into(),
            api_key: None,
            timeout: Duration::from_secs(120),
            temperature: 0.7,
        }
    }
}

pub struct ChatSource {
    cfg: EndpointConfig,
    client: reqwest::blocking::Client,
}

impl ChatSource {
    pub fn new(cfg: EndpointConfig) -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .timeout(cfg.timeout)
            .build()
            .map_err(|e| Error::Generation(e.to_string()))?;
        Ok(ChatSource { cfg, client })
    }

    /// Request body in the chat-completions shape.
    pub fn request_body(&self, system: &str, user: &str) -> Value {
        json!({
            "model": self.cfg.model,
            "temperature": self.cfg.temperature,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
        })
    }

    fn chat(&self, system: &str, user: &str) -> Result<String> {
        let url = format!("{}/chat/completions", self.cfg.base_url.trim_end_matches('/'));
        let mut req = self.client.post(&url).json(&self.request_body(system, user));
        if let Some(key) = &self.cfg.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| Error::Generation(e.to_string()))?;
        let status = resp.status();
        if !status.is_success() {
            let body = resp.text().unwrap_or_default();
            return Err(Error::Generation(format!("{url}: HTTP {status}: {body}")));
        }
        let body: Value = resp.json().map_err(|e| Error::Generation(e.to_string()))?;
        completion_text(&body)
    }
}

/// Pulls `choices[0].message.content` out of a chat-completions response.
pub fn completion_text(body: &Value) -> Result<String> {
    body.pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .map(|s| s.trim().to_owned())
        .ok_or_else(|| Error::Generation("response has no choices[0].message.content".into()))
}

const SYSTEM_PROMPT: &str = "You are a careful data annotator. Output only what is asked, without commentary or code fences.";

fn parse_field_list(text: &str) -> Result<Vec<SchemaField>> {
    let slice = match (text.find('['), text.rfind(']')) {
        (Some(s), Some(e)) if s < e => &text[s..=e],
        _ => text,
    };
    let value: Value = serde_json::from_str(slice).map_err(|e| Error::json("field list", e))?;
    let items = value
        .as_array()
        .ok_or_else(|| Error::Generation("field list is not an array".into()))?;
    let fields: Vec<SchemaField> = items
        .iter()
        .filter_map(|v| match v {
            Value::String(s) => Some(SchemaField::named(s.trim())),
            Value::Object(_) => serde_json::from_value(v.clone()).ok(),
            _ => None,
        })
        .filter(|f| !f.name.is_empty())
        .collect();
    if fields.is_empty() {
        return Err(Error::Generation("field list is empty".into()));
    }
    Ok(fields)
}

impl SampleSource for ChatSource {
    fn article(&self, topic: &str, lang: Language, token_cap: usize) -> Result<String> {
        let prompt = match lang {
            Language::Zh => format!(
                "請以繁體中文撰寫一篇關於「{topic}」的長篇知識性文章，內容需資訊密集、涵蓋具體的人物、組織、時間與關係，長度不超過約 {token_cap} 個 token。"
            ),
            Language::En => format!(
                "Write a long, information-dense encyclopedic article about \"{topic}\" naming concrete people, organizations, dates and relations. Stay under about {token_cap} tokens."
            ),
        };
        self.chat(SYSTEM_PROMPT, &prompt)
    }

    fn schema_fields(&self, _topic: &str, context: &str, lang: Language) -> Result<Vec<SchemaField>> {
        let prompt = match lang {
            Language::Zh => format!(
                "根據下列文章，列出 3 到 6 個適合擷取成 JSON 的欄位名稱，只輸出 JSON 字串陣列。\n{context}"
            ),
            Language::En => format!(
                "Based on the article below, list 3 to 6 field names worth extracting into JSON. Output only a JSON array of strings.\n{context}"
            ),
        };
        parse_field_list(&self.chat(SYSTEM_PROMPT, &prompt)?)
    }

    fn gold(&self, _task: Task, _topic: &str, prompt: &str) -> Result<String> {
        self.chat(SYSTEM_PROMPT, prompt)
    }
}

/// Offline source reading `<dir>/<topic>/{context.txt, fields.json, gold.<task>.txt}`.
pub struct FixtureSource {
    dir: PathBuf,
}

impl FixtureSource {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        FixtureSource { dir: dir.into() }
    }

    /// Topic directory names, sorted.
    pub fn topics(&self) -> Result<Vec<String>> {
        let entries = std::fs::read_dir(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let mut topics = Vec::new();
        for entry in entries {
            let entry = entry.map_err(|e| Error::io(&self.dir, e))?;
            if entry.path().is_dir() {
                topics.push(entry.file_name().to_string_lossy().into_owned());
            }
        }
        topics.sort();
        Ok(topics)
    }

    fn read(&self, topic: &str, file: &str) -> Result<String> {
        let path = self.dir.join(topic).join(file);
        std::fs::read_to_string(&path).map_err(|e| Error::io(path, e))
    }
}

impl SampleSource for FixtureSource {
    fn article(&self, topic: &str, _lang: Language, _token_cap: usize) -> Result<String> {
        self.read(topic, "context.txt").map(|s| s.trim_end().to_owned())
    }

    fn schema_fields(&self, topic: &str, _context: &str, _lang: Language) -> Result<Vec<SchemaField>> {
        parse_field_list(&self.read(topic, "fields.json")?)
    }

    fn gold(&self, task: Task, topic: &str, _prompt: &str) -> Result<String> {
        self.read(topic, &format!("gold.{task}.txt")).map(|s| s.trim_end().to_owned())
    }
}

#[derive(Debug, Clone)]
pub struct GenerateOptions {
    /// Extra attempts after the first failure for one sample.
    pub max_retries: usize,
    pub token_cap: usize,
    pub lang: Language,
    /// Maximum requests in flight.
    pub jobs: usize,
    pub id_prefix: String,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        GenerateOptions {
            max_retries: DEFAULT_MAX_RETRIES,
            token_cap: DEFAULT_TOKEN_CAP,
            lang: Language::Zh,
            jobs: 4,
            id_prefix: String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DroppedSample {
    pub index: usize,
    pub topic: String,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct GenerationReport {
    pub requested: usize,
    pub samples: Vec<Sample>,
    pub dropped: Vec<DroppedSample>,
}

impl GenerationReport {
    pub fn shortfall(&self) -> usize {
        self.requested - self.samples.len()
    }
}

fn with_retries<T>(budget: &mut usize, mut f: impl FnMut() -> Result<T>) -> Result<T> {
    loop {
        match f() {
            Err(e) if e.is_retryable() && *budget > 0 => {
                *budget -= 1;
                log::debug!("retrying after: {e}");
            }
            other => return other,
        }
    }
}

fn generate_one(
    source: &dyn SampleSource,
    task: Task,
    topic: &str,
    id: String,
    opts: &GenerateOptions,
) -> std::result::Result<Sample, String> {
    let mut budget = opts.max_retries;
    let context = with_retries(&mut budget, || source.article(topic, opts.lang, opts.token_cap))
        .map_err(|e| format!("article: {e}"))?;
    let context = truncate_to_token_cap(&context, opts.token_cap).to_owned();
    let fields = match task {
        Task::JsonExtract => with_retries(&mut budget, || source.schema_fields(topic, &context, opts.lang))
            .map_err(|e| format!("field list: {e}"))?,
        Task::Kge | Task::Ner => Vec::new(),
    };
    let instruction = instruction_template(task, &fields, opts.lang).map_err(|e| e.to_string())?;
    let params = InstructionParams {
        context: Some(context.clone()),
        fields: fields.clone(),
        labels: None,
    };
    let prompt = render_instruction(task, &params, opts.lang).map_err(|e| e.to_string())?;
    loop {
        let gold = with_retries(&mut budget, || source.gold(task, topic, &prompt))
            .map_err(|e| format!("gold: {e}"))?;
        let sample = Sample {
            id: id.clone(),
            task,
            context: context.clone(),
            instruction: instruction.clone(),
            gold_output: gold,
            topic: topic.to_owned(),
            schema_fields: fields.iter().map(|f| f.name.clone()).collect(),
        };
        let verdict = validate_gold(&sample);
        if verdict.passed {
            return Ok(sample);
        }
        if budget == 0 {
            return Err(format!("invalid gold: {}", verdict.problems.join("; ")));
        }
        budget -= 1;
    }
}

/// Generates `count` samples for `task`, cycling through `topics`.
///
/// Samples whose gold output never validates within the retry budget, or
/// whose context duplicates an earlier one, are dropped and reported.
pub fn generate_samples(
    source: &dyn SampleSource,
    topics: &[String],
    task: Task,
    count: usize,
    opts: &GenerateOptions,
) -> Result<GenerationReport> {
    if count > 0 && topics.is_empty() {
        return Err(Error::invalid("no topics to generate from"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .map_err(|e| Error::invalid(e.to_string()))?;
    let results: Vec<std::result::Result<Sample, String>> = pool.install(|| {
        (0..count)
            .into_par_iter()
            .map(|i| {
                let topic = &topics[i % topics.len()];
                let id = format!("{}{task}-{i:05}", opts.id_prefix);
                generate_one(source, task, topic, id, opts)
            })
            .collect()
    });

    let mut seen = HashSet::new();
    let mut report = GenerationReport {
        requested: count,
        samples: Vec::new(),
        dropped: Vec::new(),
    };
    for (index, result) in results.into_iter().enumerate() {
        let topic = topics[index % topics.len()].clone();
        let outcome = result.and_then(|s| {
            if seen.insert(sha256_hex(s.context.as_bytes())) {
                Ok(s)
            } else {
                Err("duplicate context".to_owned())
            }
        });
        match outcome {
            Ok(s) => report.samples.push(s),
            Err(reason) => {
                log::warn!("dropping sample {index} ({topic}): {reason}");
                report.dropped.push(DroppedSample { index, topic, reason });
            }
        }
    }
    Ok(report)
}

/// Reads samples from newline-delimited JSON.
pub fn read_samples(path: &Path) -> Result<Vec<Sample>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            serde_json::from_str(line).map_err(|e| Error::json(format!("{}:{}", path.display(), i + 1), e))
        })
        .collect()
}

pub fn write_samples(path: &Path, samples: &[Sample]) -> Result<()> {
    let mut out = String::new();
    for s in samples {
        out.push_str(&serde_json::to_string(s).map_err(|e| Error::json("sample", e))?);
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}
