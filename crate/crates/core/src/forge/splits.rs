use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::task::Task;

use super::sample::{validate_gold, Sample};

pub const DEFAULT_SPLIT_RATIO: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TaskSplit {
    /// Validated samples offered for this task.
    pub available: usize,
    pub train_ids: Vec<String>,
    pub validation_ids: Vec<String>,
    /// Validated but unselected; usable as test material.
    pub held_out: usize,
}

/// What was selected and written for one dataset scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub scale_n: usize,
    pub split_ratio: f64,
    pub seed: u64,
    pub tasks: BTreeMap<Task, TaskSplit>,
    /// Emitted file name to lowercase hex SHA-256.
    #[serde(default)]
    pub digests: BTreeMap<String, String>,
}

impl DatasetManifest {
    pub fn train_count(&self) -> usize {
        self.tasks.values().map(|t| t.train_ids.len()).sum()
    }

    pub fn validation_count(&self) -> usize {
        self.tasks.values().map(|t| t.validation_ids.len()).sum()
    }
}

#[derive(Debug, Clone)]
pub struct Assembly {
    pub manifest: DatasetManifest,
    pub train: Vec<Sample>,
    pub validation: Vec<Sample>,
    pub held_out: Vec<Sample>,
}

/// Deterministically selects `scale_n` validated samples per task and
/// splits each task's selection into train and validation.
pub fn assemble_splits(
    samples: &[Sample],
    scale_n: usize,
    split_ratio: f64,
    seed: u64,
) -> Result<Assembly> {
    if scale_n == 0 {
        return Err(Error::invalid("scale must be positive"));
    }
    if !(split_ratio > 0.0 && split_ratio < 1.0) {
        return Err(Error::invalid(format!("split ratio must lie in (0, 1), got {split_ratio}")));
    }
    let mut seen = HashSet::new();
    for s in samples {
        if !seen.insert(s.id.as_str()) {
            return Err(Error::invalid(format!("duplicate sample id `{}`", s.id)));
        }
    }
    let train_per_task = ((scale_n as f64) * split_ratio).round() as usize;
    let train_per_task = train_per_task.min(scale_n);

    let mut manifest = DatasetManifest {
        scale_n,
        split_ratio,
        seed,
        tasks: BTreeMap::new(),
        digests: BTreeMap::new(),
    };
    let (mut train, mut validation, mut held_out) = (Vec::new(), Vec::new(), Vec::new());
    for (stream, task) in Task::ALL.into_iter().enumerate() {
        let mut pool: Vec<&Sample> = samples
            .iter()
            .filter(|s| s.task == task && validate_gold(s).passed)
            .collect();
        if pool.len() < scale_n {
            return Err(Error::Shortfall {
                task: task.to_string(),
                needed: scale_n,
                available: pool.len(),
            });
        }
        pool.sort_by(|a, b| a.id.cmp(&b.id));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream as u64);
        pool.shuffle(&mut rng);

        let (chosen, rest) = pool.split_at(scale_n);
        let (tr, va) = chosen.split_at(train_per_task);
        manifest.tasks.insert(
            task,
            TaskSplit {
                available: pool.len(),
                train_ids: tr.iter().map(|s| s.id.clone()).collect(),
                validation_ids: va.iter().map(|s| s.id.clone()).collect(),
                held_out: rest.len(),
            },
        );
        train.extend(tr.iter().map(|&s| s.clone()));
        validation.extend(va.iter().map(|&s| s.clone()));
        held_out.extend(rest.iter().map(|&s| s.clone()));
    }
    Ok(Assembly {
        manifest,
        train,
        validation,
        held_out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forge::synthetic::synthetic_samples;

    #[test]
    fn three_times_scale() {
        let samples = synthetic_samples(120);
        let a = assemble_splits(&samples, 100, 0.9, 7).unwrap();
        assert_eq!(a.train.len() + a.validation.len(), 300);
        for split in a.manifest.tasks.values() {
            assert_eq!(split.train_ids.len(), 90);
            assert_eq!(split.validation_ids.len(), 10);
            assert_eq!(split.held_out, 20);
        }
        assert_eq!(a.held_out.len(), 60);
    }

    #[test]
    fn disjoint_and_deterministic() {
        let samples = synthetic_samples(50);
        let a = assemble_splits(&samples, 40, 0.75, 3).unwrap();
        let b = assemble_splits(&samples, 40, 0.75, 3).unwrap();
        assert_eq!(a.manifest, b.manifest);
        let ids: HashSet<&str> = a
            .train
            .iter()
            .chain(&a.validation)
            .chain(&a.held_out)
            .map(|s| s.id.as_str())
            .collect();
        assert_eq!(ids.len(), 150);
        let c = assemble_splits(&samples, 40, 0.75, 4).unwrap();
        assert_ne!(a.manifest.tasks, c.manifest.tasks);
    }

    #[test]
    fn shortfall_names_task() {
        let mut samples = synthetic_samples(1000);
        samples.retain(|s| s.task != Task::Kge || s.id < "kge-00800".to_string());
        match assemble_splits(&samples, 1000, 0.9, 1) {
            Err(Error::Shortfall { task, needed, available }) => {
                assert_eq!((task.as_str(), needed, available), ("kge", 1000, 800));
            }
            other => panic!("expected shortfall, got {other:?}"),
        }
    }

    #[test]
    fn invalid_gold_is_not_selectable() {
        let mut samples = synthetic_samples(2);
        samples[0].gold_output = "{\"a\": \"not a list\"}".into();
        assert!(matches!(
            assemble_splits(&samples, 2, 0.5, 0),
            Err(Error::Shortfall { .. })
        ));
    }

    #[test]
    fn argument_checks() {
        let samples = synthetic_samples(2);
        assert!(assemble_splits(&samples, 0, 0.5, 0).is_err());
        assert!(assemble_splits(&samples, 1, 1.0, 0).is_err());
        let mut dup = samples.clone();
        dup.push(samples[0].clone());
        assert!(assemble_splits(&dup, 1, 0.5, 0).is_err());
    }
}
