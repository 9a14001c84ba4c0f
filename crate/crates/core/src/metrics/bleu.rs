use std::collections::HashMap;

use super::{MetricError, TokenizedText};

pub(crate) fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

/// Smoothed sentence-level BLEU-4.
///
/// Modified (clipped) n-gram precisions for n = 1..4 are combined by a
/// geometric mean with equal weights. A precision whose clipped match count
/// is zero gets add-one smoothing for n ≥ 2; a zero unigram precision makes
/// the score 0. Orders longer than the candidate are left out of the mean.
/// The brevity penalty is `exp(min(0, 1 − |ref|/|cand|))`.
pub fn bleu4_smoothed(
    candidate: &TokenizedText,
    reference: &TokenizedText,
) -> Result<f64, MetricError> {
    if reference.is_empty() {
        return Err(MetricError::EmptyReference);
    }
    if candidate.is_empty() {
        return Ok(0.0);
    }
    let cand = &candidate.tokens;
    let refr = &reference.tokens;
    let mut log_sum = 0.0;
    let mut terms = 0;
    for n in 1..=4 {
        if cand.len() < n {
            break;
        }
        let ref_counts = ngram_counts(refr, n);
        let matches: usize = ngram_counts(cand, n)
            .iter()
            .map(|(gram, c)| (*c).min(ref_counts.get(gram).copied().unwrap_or(0)))
            .sum();
        let total = cand.len() + 1 - n;
        let precision = if matches > 0 {
            matches as f64 / total as f64
        } else if n == 1 {
            return Ok(0.0);
        } else {
            1.0 / (total as f64 + 1.0)
        };
        log_sum += precision.ln();
        terms += 1;
    }
    let bp = (1.0 - refr.len() as f64 / cand.len() as f64).min(0.0).exp();
    Ok(bp * (log_sum / terms as f64).exp())
}
