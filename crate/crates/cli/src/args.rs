use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use siex_core::stats::TestMethod;
use siex_core::{Task, TokenizerMode};

/// Forge instruction datasets, validate structured outputs, score prediction
/// runs and build comparison reports for JSON extraction, knowledge-graph
/// extraction and NER.
#[derive(Debug, Parser)]
#[command(name = "siex", version, propagate_version = true)]
pub struct Cli {
    /// TOML file whose keys set any flag; flags given on the command line win
    #[arg(long, global = true, display_order = 900, value_name = "FILE", help = "TOML file whose keys set any flag; command-line flags win [default: none]")]
    pub config: Option<PathBuf>,

    /// Worker threads; 0 uses every core. Results do not depend on it
    #[arg(long, global = true, display_order = 901, default_value_t = 0)]
    pub jobs: usize,

    /// Log more (repeatable)
    #[arg(short, long, global = true, display_order = 902, action = clap::ArgAction::Count, help = "Log more; repeat for debug output [default: warnings only]")]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build and check instruction datasets
    #[command(subcommand)]
    Forge(ForgeCommand),
    /// Score a prediction file into a run directory
    Score(ScoreArgs),
    /// Significance tests between a subject and baselines
    Sigtest(SigtestArgs),
    /// Winning-rate table of a subject against baselines
    Winrate(WinrateArgs),
    /// Data-efficiency curves and plateaus
    Curve(CurveArgs),
    /// (Re)build the report files of a run
    Report(ReportArgs),
    /// Render a CSV series file as an SVG chart
    Plot(PlotArgs),
}

#[derive(Debug, Subcommand)]
pub enum ForgeCommand {
    /// Generate samples from a chat endpoint or a fixture directory
    Generate(GenerateArgs),
    /// Check every sample's gold output against its task validator
    Validate(ValidateArgs),
    /// Select, split and write training files plus a trainer config
    Emit(EmitArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaskArg {
    JsonExtract,
    Kge,
    Ner,
}

impl From<TaskArg> for Task {
    fn from(t: TaskArg) -> Self {
        match t {
            TaskArg::JsonExtract => Task::JsonExtract,
            TaskArg::Kge => Task::Kge,
            TaskArg::Ner => Task::Ner,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TokenizerArg {
    CjkChar,
    Whitespace,
}

impl From<TokenizerArg> for TokenizerMode {
    fn from(t: TokenizerArg) -> Self {
        match t {
            TokenizerArg::CjkChar => TokenizerMode::CjkChar,
            TokenizerArg::Whitespace => TokenizerMode::Whitespace,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    PairedT,
    Wilcoxon,
    Bootstrap,
}

impl From<MethodArg> for TestMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::PairedT => TestMethod::PairedT,
            MethodArg::Wilcoxon => TestMethod::Wilcoxon,
            MethodArg::Bootstrap => TestMethod::Bootstrap,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LangArg {
    Zh,
    En,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Bar,
    Line,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["fixtures", "endpoint"])))]
pub struct GenerateArgs {
    /// Task to generate for (repeatable)
    #[arg(long = "task", value_enum, default_values_t = [TaskArg::JsonExtract, TaskArg::Kge, TaskArg::Ner])]
    pub tasks: Vec<TaskArg>,
    /// Samples requested per task
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    /// Offline source: <DIR>/<topic>/{context.txt, fields.json, gold.<task>.txt}
    #[arg(long, value_name = "DIR", help = "Offline source directory of <topic>/{context.txt, fields.json, gold.<task>.txt} [default: none]")]
    pub fixtures: Option<PathBuf>,
    /// Chat-completions base URL
    #[arg(long, value_name = "URL", help = "Chat-completions base URL, e.g. https://api.openai.com/v1 [default: none]")]
    pub endpoint: Option<String>,
    /// Generator model name
    #[arg(long, default_value = "gpt-4o-mini")]
    pub model: String,
    /// Environment variable holding the API key
    #[arg(long, default_value = "OPENAI_API_KEY")]
    pub api_key_env: String,
    /// Per-request timeout in seconds
    #[arg(long, default_value_t = 120)]
    pub timeout_secs: u64,
    /// Sampling temperature for the endpoint
    #[arg(long, default_value_t = 0.7)]
    pub temperature: f64,
    /// File with one topic per line
    #[arg(long, value_name = "FILE", help = "File with one topic per line [default: fixture directory names]")]
    pub topics: Option<PathBuf>,
    /// Instruction language
    #[arg(long, value_enum, default_value_t = LangArg::Zh)]
    pub lang: LangArg,
    /// Extra attempts per sample after a failure
    #[arg(long, default_value_t = siex_core::forge::DEFAULT_MAX_RETRIES)]
    pub max_retries: usize,
    /// Approximate token cap for generated contexts
    #[arg(long, default_value_t = siex_core::forge::DEFAULT_TOKEN_CAP)]
    pub token_cap: usize,
    /// Output sample file (JSON lines)
    #[arg(long, default_value = "samples.jsonl")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Sample file (JSON lines)
    #[arg(long, default_value = "samples.jsonl")]
    pub samples: PathBuf,
    /// Print verdicts as JSON lines [default: off]
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("input").required(true).args(["samples", "synthetic"])))]
pub struct EmitArgs {
    /// Samples per task to select [required]
    #[arg(long)]
    pub scale: usize,
    /// Shuffle seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Train fraction of each task's selection
    #[arg(long, default_value_t = siex_core::forge::DEFAULT_SPLIT_RATIO)]
    pub split_ratio: f64,
    /// Sample file (JSON lines)
    #[arg(long, value_name = "FILE", help = "Sample file (JSON lines) [default: none]")]
    pub samples: Option<PathBuf>,
    /// Use the built-in placeholder corpus instead of a sample file [default: off]
    #[arg(long)]
    pub synthetic: bool,
    /// Output directory
    #[arg(long, default_value = "dataset")]
    pub out: PathBuf,
    #[command(flatten)]
    pub trainer: TrainerArgs,
}

#[derive(Debug, Args)]
pub struct TrainerArgs {
    /// Base model identifier
    #[arg(long, default_value = siex_core::forge::DEFAULT_BASE_MODEL)]
    pub base_model: String,
    /// LoRA rank
    #[arg(long, default_value_t = 32)]
    pub lora_rank: u32,
    /// LoRA alpha
    #[arg(long, default_value_t = 64)]
    pub lora_alpha: u32,
    /// LoRA dropout, in [0, 1]
    #[arg(long, default_value_t = 0.4)]
    pub lora_dropout: f64,
    /// Learning rate
    #[arg(long, default_value = "1e-7")]
    pub learning_rate: f64,
    /// Gradient clipping norm
    #[arg(long, default_value_t = 0.1)]
    pub max_grad_norm: f64,
    /// Training epochs
    #[arg(long, default_value_t = 100)]
    pub epochs: u32,
    /// Effective batch size
    #[arg(long, default_value_t = 2)]
    pub batch_size: u32,
}

#[derive(Debug, Args)]
pub struct RosterArgs {
    /// Subject model or family name
    #[arg(long, help = "Subject model or family name [default: every model with a train size]")]
    pub subject: Option<String>,
    /// Baseline model (repeatable)
    #[arg(long = "baseline", help = "Baseline model or family (repeatable) [default: every model without a train size]")]
    pub baselines: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Prediction file (JSON lines) [required]
    #[arg(long)]
    pub predictions: PathBuf,
    /// Run directory to create or overwrite [required]
    #[arg(long)]
    pub out: PathBuf,
    /// One token per CJK character, whitespace splitting elsewhere; or whitespace only
    #[arg(long, value_enum, default_value_t = TokenizerArg::CjkChar)]
    pub tokenizer: TokenizerArg,
    /// Validate the longest balanced {...} span instead of the raw output [default: off]
    #[arg(long)]
    pub extract_json: bool,
    /// Paired test on per-example scores (repeatable)
    #[arg(long = "method", value_enum, default_values_t = [MethodArg::PairedT])]
    pub methods: Vec<MethodArg>,
    /// Significance level
    #[arg(long, default_value_t = siex_core::stats::DEFAULT_ALPHA)]
    pub alpha: f64,
    /// Continuity correction in the parse-count z-test [default: off]
    #[arg(long)]
    pub continuity_correction: bool,
    /// Bootstrap resamples
    #[arg(long, default_value_t = siex_core::stats::DEFAULT_RESAMPLES)]
    pub resamples: usize,
    /// Bootstrap seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Plateau threshold for ROUGE and cosine curves
    #[arg(long, default_value_t = siex_core::stats::EPSILON_UNIT_METRIC)]
    pub epsilon_unit: f64,
    /// Plateau threshold for parse-count curves
    #[arg(long, default_value_t = siex_core::stats::EPSILON_COUNT)]
    pub epsilon_count: f64,
    /// Precomputed embedding pairs replacing term-frequency cosine
    #[arg(long, value_name = "FILE", help = "JSON lines of {example_id, task, model, train_size?, candidate, reference} vectors replacing term-frequency cosine [default: none]")]
    pub embeddings: Option<PathBuf>,
    /// Keep going when prediction lines are rejected [default: off]
    #[arg(long)]
    pub no_strict: bool,
    /// Skip writing reports/ [default: off]
    #[arg(long)]
    pub no_report: bool,
    #[command(flatten)]
    pub roster: RosterArgs,
}

#[derive(Debug, Args)]
pub struct SigtestArgs {
    /// Run directory
    #[arg(long, required_unless_present = "counts", help = "Run directory [default: none]")]
    pub run: Option<PathBuf>,
    /// Two-proportion z-test on K1 N1 K2 N2 without a run
    #[arg(long, num_args = 4, value_names = ["K1", "N1", "K2", "N2"], conflicts_with = "run", help = "Two-proportion z-test on counts alone [default: none]")]
    pub counts: Option<Vec<usize>>,
    #[command(flatten)]
    pub roster: RosterArgs,
    /// Paired test (repeatable)
    #[arg(long = "method", value_enum, help = "Paired test (repeatable) [default: the run's methods]")]
    pub methods: Vec<MethodArg>,
    /// Significance level
    #[arg(long, help = "Significance level [default: the run's alpha, 0.05 with --counts]")]
    pub alpha: Option<f64>,
    /// Continuity correction for --counts [default: off]
    #[arg(long)]
    pub continuity_correction: bool,
    /// Print JSON instead of a table [default: off]
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct WinrateArgs {
    /// Run directory [required]
    #[arg(long)]
    pub run: PathBuf,
    #[command(flatten)]
    pub roster: RosterArgs,
    /// Print JSON instead of a table [default: off]
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// Run directory
    #[arg(long, required_unless_present = "points", help = "Run directory [default: none]")]
    pub run: Option<PathBuf>,
    /// Only this model family
    #[arg(long, help = "Only this model family [default: all]")]
    pub family: Option<String>,
    /// Inline curve as SIZE:VALUE pairs, e.g. 100:144,300:267
    #[arg(long, value_delimiter = ',', conflicts_with = "run", help = "Inline curve as SIZE:VALUE pairs, e.g. 100:144,300:267 [default: none]")]
    pub points: Vec<String>,
    /// Plateau threshold for --points
    #[arg(long, default_value_t = siex_core::stats::EPSILON_COUNT)]
    pub epsilon: f64,
    /// Metric label for --points
    #[arg(long, default_value = "parse-count")]
    pub metric: String,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Run directory [required]
    #[arg(long)]
    pub run: PathBuf,
    /// Output directory
    #[arg(long, help = "Output directory [default: <run>/reports]")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub roster: RosterArgs,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// CSV with header series,x,y [required]
    #[arg(long)]
    pub data: PathBuf,
    /// Chart type
    #[arg(long, value_enum, default_value_t = KindArg::Bar)]
    pub kind: KindArg,
    /// Output SVG file
    #[arg(long, default_value = "plot.svg")]
    pub out: PathBuf,
    /// Chart title
    #[arg(long, default_value = "")]
    pub title: String,
    /// Y axis label
    #[arg(long, default_value = "")]
    pub y_label: String,
}
