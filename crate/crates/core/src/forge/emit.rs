use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

use super::sample::{validate_gold, Sample};
use super::splits::{Assembly, DatasetManifest};

pub const TRAIN_FILE: &str = "train.json";
pub const VALIDATION_FILE: &str = "validation.json";
pub const MANIFEST_FILE: &str = "manifest.json";

/// One instruction-tuning record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct TrainingRecord {
    pub instruction: String,
    pub input: String,
    pub output: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Pretty-printed JSON with a trailing LF.
pub(crate) fn to_json_bytes<T: Serialize + ?Sized>(value: &T, what: &str) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Error::json(what, e))?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn records(samples: &[Sample]) -> Result<Vec<TrainingRecord>> {
    samples
        .iter()
        .map(|s| {
            let verdict = validate_gold(s);
            if !verdict.passed {
                return Err(Error::Validation(format!(
                    "sample {} has invalid gold output: {}",
                    s.id,
                    verdict.problems.join("; ")
                )));
            }
            Ok(TrainingRecord {
                instruction: s.instruction.clone(),
                input: s.context.clone(),
                output: s.gold_output.clone(),
            })
        })
        .collect()
}

/// Writes `train.json`, `validation.json` and `manifest.json` into `dir` and
/// returns the manifest with the two data-file digests filled in.
pub fn emit_training_files(assembly: &Assembly, dir: &Path) -> Result<DatasetManifest> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut manifest = assembly.manifest.clone();
    let train = records(&assembly.train)?;
    let validation = records(&assembly.validation)?;
    for (name, recs) in [(TRAIN_FILE, train), (VALIDATION_FILE, validation)] {
        let bytes = to_json_bytes(&recs, name)?;
        manifest.digests.insert(name.to_owned(), sha256_hex(&bytes));
        let path = dir.join(name);
        std::fs::write(&path, &bytes).map_err(|e| Error::io(path, e))?;
    }
    let path = dir.join(MANIFEST_FILE);
    std::fs::write(&path, to_json_bytes(&manifest, MANIFEST_FILE)?).map_err(|e| Error::io(path, e))?;
    Ok(manifest)
}
