use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_BASE_MODEL: &str = "meta-llama/Llama-3.2-1B-Instruct";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantization {
    #[default]
    None,
}

/// LoRA fine-tuning hyperparameters, emitted for an external trainer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainerConfig {
    pub base_model: String,
    pub lora_rank: u32,
    pub lora_alpha: u32,
    pub lora_dropout: f64,
    pub learning_rate: f64,
    pub max_grad_norm: f64,
    pub epochs: u32,
    pub effective_batch_size: u32,
    pub quantization: Quantization,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        TrainerConfig {
            base_model: DEFAULT_BASE_MODEL.to_owned(),
            lora_rank: 32,
            lora_alpha: 64,
            lora_dropout: 0.4,
            learning_rate: 1e-7,
            max_grad_norm: 0.1,
            epochs: 100,
            effective_batch_size: 2,
            quantization: Quantization::None,
        }
    }
}

impl TrainerConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Validation(msg));
        if self.base_model.trim().is_empty() {
            return fail("base_model must be non-empty".into());
        }
        if !(0.0..=1.0).contains(&self.lora_dropout) {
            return fail(format!("lora_dropout must lie in [0, 1], got {}", self.lora_dropout));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return fail(format!("learning_rate must be positive, got {}", self.learning_rate));
        }
        if !(self.max_grad_norm > 0.0 && self.max_grad_norm.is_finite()) {
            return fail(format!("max_grad_norm must be positive, got {}", self.max_grad_norm));
        }
        if self.lora_rank == 0 || self.lora_alpha == 0 || self.epochs == 0 || self.effective_batch_size == 0 {
            return fail("rank, alpha, epochs and batch size must be positive".into());
        }
        Ok(())
    }

    /// Flat `key: value` rendering using the trainer's argument names.
    pub fn render(&self) -> Result<String> {
        self.validate()?;
        let mut out = String::new();
        let quantization = match self.quantization {
            Quantization::None => "none",
        };
        // writes to a String cannot fail
        let _ = writeln!(out, "model_name_or_path: {}", self.base_model);
        let _ = writeln!(out, "stage: sft");
        let _ = writeln!(out, "finetuning_type: lora");
        let _ = writeln!(out, "lora_rank: {}", self.lora_rank);
        let _ = writeln!(out, "lora_alpha: {}", self.lora_alpha);
        let _ = writeln!(out, "lora_dropout: {}", self.lora_dropout);
        let _ = writeln!(out, "learning_rate: {:e}", self.learning_rate);
        let _ = writeln!(out, "max_grad_norm: {}", self.max_grad_norm);
        let _ = writeln!(out, "num_train_epochs: {}", self.epochs);
        let _ = writeln!(out, "per_device_train_batch_size: {}", self.effective_batch_size);
        let _ = writeln!(out, "gradient_accumulation_steps: 1");
        let _ = writeln!(out, "quantization: {quantization}");
        Ok(out)
    }
}

pub fn emit_trainer_config(cfg: &TrainerConfig, path: &Path) -> Result<()> {
    let text = cfg.render()?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
