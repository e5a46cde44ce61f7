//! Dataset forging and evaluation harness for multi-task structured
//! information extraction (flat JSON extraction, knowledge-graph triples and
//! named entities).
//!
//! The numeric code ([`metrics`], [`stats`]) is generic over [`Real`]; the
//! aliases below fix it to `f64`, which is what the evaluation pipeline uses.

mod error;
pub mod eval;
pub mod forge;
pub mod metrics;
mod scalar;
pub mod stats;
mod task;
pub mod tokenize;
pub mod validate;

pub use error::{Error, Result};
pub use scalar::Real;
pub use task::{Metric, Task};
pub use tokenize::{tokenize, TokenSequence, TokenizerMode};

pub type OverlapScoreF64 = metrics::OverlapScore<f64>;
pub type OverlapScoreF32 = metrics::OverlapScore<f32>;
pub type SignificanceResultF64 = stats::SignificanceResult<f64>;
pub type EfficiencyCurveF64 = stats::EfficiencyCurve<f64>;
pub type WinRate = num_rational::Ratio<u32>;
