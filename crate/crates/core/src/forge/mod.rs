//! Instruction-dataset construction: templates, gold validation, split
//! assembly, training-file emission and trainer configuration.

mod emit;
mod generate;
mod sample;
mod splits;
pub mod synthetic;
pub mod templates;
mod trainer;

pub use emit::{emit_training_files, sha256_hex, TrainingRecord, MANIFEST_FILE, TRAIN_FILE, VALIDATION_FILE};
pub use generate::{
    approx_tokens, completion_text, generate_samples, read_samples, truncate_to_token_cap,
    write_samples, ChatSource, DroppedSample, EndpointConfig, FixtureSource, GenerateOptions,
    GenerationReport, SampleSource, DEFAULT_MAX_RETRIES, DEFAULT_TOKEN_CAP,
};
pub use sample::{validate_gold, GoldDetail, GoldVerdict, Sample};
pub use splits::{assemble_splits, Assembly, DatasetManifest, TaskSplit, DEFAULT_SPLIT_RATIO};
pub use templates::{
    instruction_template, render_instruction, InstructionParams, Language, SchemaField,
};
pub use trainer::{emit_trainer_config, Quantization, TrainerConfig, DEFAULT_BASE_MODEL};

pub(crate) use emit::to_json_bytes;
