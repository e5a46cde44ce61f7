//! Text overlap metrics: ROUGE-N, ROUGE-L and term-frequency cosine.
//!
//! Empty-input conventions are shared by every metric here: two empty
//! operands score 1 on all components, exactly one empty operand scores 0.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::tokenize::TokenSequence;

/// Precision, recall and their harmonic mean.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OverlapScore<F> {
    pub precision: F,
    pub recall: F,
    pub f1: F,
}

impl<F: Real> OverlapScore<F> {
    pub fn from_pr(precision: F, recall: F) -> Self {
        let sum = precision + recall;
        let f1 = if sum > F::zero() {
            F::c(2.0) * precision * recall / sum
        } else {
            F::zero()
        };
        OverlapScore {
            precision,
            recall,
            f1,
        }
    }

    fn from_counts(overlap: usize, candidate: usize, reference: usize) -> Self {
        match (candidate, reference) {
            (0, 0) => Self::perfect(),
            (0, _) | (_, 0) => Self::zero(),
            _ => Self::from_pr(
                F::count(overlap) / F::count(candidate),
                F::count(overlap) / F::count(reference),
            ),
        }
    }

    pub fn perfect() -> Self {
        OverlapScore {
            precision: F::one(),
            recall: F::one(),
            f1: F::one(),
        }
    }

    pub fn zero() -> Self {
        OverlapScore {
            precision: F::zero(),
            recall: F::zero(),
            f1: F::zero(),
        }
    }
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// Clipped n-gram overlap between candidate and reference.
pub fn rouge_n<F: Real>(
    candidate: &TokenSequence,
    reference: &TokenSequence,
    n: usize,
) -> Result<OverlapScore<F>> {
    if n == 0 {
        return Err(Error::invalid("rouge_n requires n >= 1"));
    }
    let cand = ngram_counts(candidate.tokens(), n);
    let refs = ngram_counts(reference.tokens(), n);
    let overlap = cand
        .iter()
        .map(|(gram, &c)| refs.get(gram).map_or(0, |&r| c.min(r)))
        .sum();
    let total = |len: usize| (len + 1).saturating_sub(n);
    Ok(OverlapScore::from_counts(
        overlap,
        total(candidate.len()),
        total(reference.len()),
    ))
}

/// Length of the longest common subsequence, O(|a|·|b|) time and O(|b|) space.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut curr = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            curr[j + 1] = if x == y {
                prev[j] + 1
            } else {
                curr[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

pub fn rouge_l<F: Real>(candidate: &TokenSequence, reference: &TokenSequence) -> OverlapScore<F> {
    let lcs = lcs_len(candidate.tokens(), reference.tokens());
    OverlapScore::from_counts(lcs, candidate.len(), reference.len())
}

/// Cosine of the term-frequency vectors of the two sequences, in `[0, 1]`.
pub fn cosine_tf<F: Real>(candidate: &TokenSequence, reference: &TokenSequence) -> F {
    match (candidate.is_empty(), reference.is_empty()) {
        (true, true) => return F::one(),
        (true, false) | (false, true) => return F::zero(),
        _ => {}
    }
    let cand = ngram_counts(candidate.tokens(), 1);
    let refs = ngram_counts(reference.tokens(), 1);
    let norm = |m: &HashMap<&[String], usize>| m.values().map(|&c| (c * c) as u128).sum::<u128>();
    let dot: u128 = cand
        .iter()
        .filter_map(|(t, &c)| refs.get(t).map(|&r| (c * r) as u128))
        .sum();
    // Integer norms keep identical inputs at exactly 1.
    let denom = F::from_u128(norm(&cand) * norm(&refs))
        .expect("norm representable")
        .sqrt();
    let num = F::from_u128(dot).expect("dot representable");
    (num / denom).min(F::one())
}

/// Cosine between externally supplied embedding vectors.
///
/// `None` when the lengths differ or either vector has zero norm.
pub fn cosine_vectors<F: Real>(a: &[F], b: &[F]) -> Option<F> {
    if a.len() != b.len() || a.is_empty() {
        return None;
    }
    let (mut dot, mut na, mut nb) = (F::zero(), F::zero(), F::zero());
    for (&x, &y) in a.iter().zip(b) {
        dot = dot + x * y;
        na = na + x * x;
        nb = nb + y * y;
    }
    if na == F::zero() || nb == F::zero() {
        return None;
    }
    Some((dot / (na.sqrt() * nb.sqrt())).max(-F::one()).min(F::one()))
}
