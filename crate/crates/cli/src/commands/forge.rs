use std::fs;
use std::time::Duration;

use anyhow::{Context, Result};
use log::{info, warn};
use siex_core::forge::{
    assemble_splits, emit_trainer_config, emit_training_files, generate_samples, read_samples,
    synthetic::synthetic_samples, validate_gold, write_samples, ChatSource, EndpointConfig, FixtureSource,
    GenerateOptions, Language, SampleSource, TrainerConfig,
};
use siex_core::Task;

use crate::args::{EmitArgs, GenerateArgs, LangArg, ValidateArgs};
use crate::exit::Failure;

pub const TRAINER_CONFIG_FILE: &str = "trainer_config.yaml";

pub fn generate(args: &GenerateArgs, jobs: usize) -> Result<()> {
    let source: Box<dyn SampleSource> = match (&args.fixtures, &args.endpoint) {
        (Some(dir), _) => Box::new(FixtureSource::new(dir)),
        (None, Some(url)) => {
            let api_key = std::env::var(&args.api_key_env).ok();
            if api_key.is_none() {
                warn!("{} is not set; sending requests without a key", args.api_key_env);
            }
            Box::new(ChatSource::new(EndpointConfig {
                base_url: url.clone(),
                model: args.model.clone(),
                api_key,
                timeout: Duration::from_secs(args.timeout_secs),
                temperature: args.temperature,
            })?)
        }
        (None, None) => unreachable!("clap requires a source"),
    };
    let topics: Vec<String> = match (&args.topics, &args.fixtures) {
        (Some(path), _) => fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(String::from)
            .collect(),
        (None, Some(dir)) => FixtureSource::new(dir).topics()?,
        (None, None) => return Err(Failure::Usage("--endpoint needs --topics".into()).into()),
    };
    let opts = GenerateOptions {
        max_retries: args.max_retries,
        token_cap: args.token_cap,
        lang: match args.lang {
            LangArg::Zh => Language::Zh,
            LangArg::En => Language::En,
        },
        jobs: if jobs == 0 { GenerateOptions::default().jobs } else { jobs },
        id_prefix: String::new(),
    };
    let mut all = Vec::new();
    let mut shortfall = 0;
    for &task in &args.tasks {
        let report = generate_samples(source.as_ref(), &topics, task.into(), args.count, &opts)?;
        for d in &report.dropped {
            warn!("{}: dropped sample {} ({}): {}", Task::from(task), d.index, d.topic, d.reason);
        }
        shortfall += report.shortfall();
        all.extend(report.samples);
    }
    write_samples(&args.out, &all)?;
    eprintln!("wrote {} samples to {}", all.len(), args.out.display());
    if shortfall > 0 {
        return Err(Failure::Validation(format!("{shortfall} requested samples were dropped")).into());
    }
    Ok(())
}

pub fn validate(args: &ValidateArgs) -> Result<()> {
    let samples = read_samples(&args.samples)?;
    let mut failed = 0;
    for s in &samples {
        let verdict = validate_gold(s);
        if args.json {
            let line = serde_json::json!({"id": s.id, "task": s.task, "passed": verdict.passed, "problems": verdict.problems});
            out!("{line}");
        } else if !verdict.passed {
            out!("{}\t{}\t{}", s.id, s.task, verdict.problems.join("; "));
        }
        failed += usize::from(!verdict.passed);
    }
    eprintln!("{} of {} samples pass", samples.len() - failed, samples.len());
    if failed > 0 {
        return Err(Failure::Validation(format!("{failed} samples fail validation")).into());
    }
    Ok(())
}

pub fn emit(args: &EmitArgs) -> Result<()> {
    let cfg = TrainerConfig {
        base_model: args.trainer.base_model.clone(),
        lora_rank: args.trainer.lora_rank,
        lora_alpha: args.trainer.lora_alpha,
        lora_dropout: args.trainer.lora_dropout,
        learning_rate: args.trainer.learning_rate,
        max_grad_norm: args.trainer.max_grad_norm,
        epochs: args.trainer.epochs,
        effective_batch_size: args.trainer.batch_size,
        ..TrainerConfig::default()
    };
    cfg.validate()?;
    let samples = match &args.samples {
        Some(path) => read_samples(path)?,
        None => synthetic_samples(args.scale),
    };
    let assembly = assemble_splits(&samples, args.scale, args.split_ratio, args.seed)?;
    let manifest = emit_training_files(&assembly, &args.out)?;
    emit_trainer_config(&cfg, &args.out.join(TRAINER_CONFIG_FILE))?;
    info!(
        "{} train + {} validation records, {} held out",
        manifest.train_count(),
        manifest.validation_count(),
        assembly.held_out.len()
    );
    eprintln!(
        "wrote {} records ({} train, {} validation) to {}",
        manifest.train_count() + manifest.validation_count(),
        manifest.train_count(),
        manifest.validation_count(),
        args.out.display()
    );
    for (file, digest) in &manifest.digests {
        out!("{digest}  {file}");
    }
    Ok(())
}
