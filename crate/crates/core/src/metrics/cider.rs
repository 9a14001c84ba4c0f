use std::collections::HashMap;

use super::bleu::ngram_counts;
use super::{MetricError, TokenizedText};

/// Raw CIDEr values are the mean n-gram cosine scaled by this factor.
pub const CIDER_SCALE: f64 = 10.0;

fn weigh<'a>(
    counts: &HashMap<&'a [String], usize>,
    idf: &dyn Fn(&[String]) -> f64,
) -> HashMap<&'a [String], f64> {
    counts
        .iter()
        .map(|(g, c)| (*g, *c as f64 * idf(g)))
        .collect()
}

fn tfidf_cosine(
    cand: &HashMap<&[String], usize>,
    refr: &HashMap<&[String], usize>,
    idf: &dyn Fn(&[String]) -> f64,
) -> f64 {
    let (a, b) = (weigh(cand, idf), weigh(refr, idf));
    let dot: f64 = a.iter().filter_map(|(g, x)| b.get(g).map(|y| x * y)).sum();
    let na = a.values().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.values().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Corpus-level CIDEr with one reference per candidate.
///
/// For each pair and each n in 1..4, the cosine between TF-IDF n-gram
/// vectors is computed with `idf(g) = ln(N / max(1, df(g)))`, where `df`
/// counts the references containing `g` and `N` is the number of
/// references. The pair's score is the mean cosine times [`CIDER_SCALE`].
pub fn cider(
    candidates: &[TokenizedText],
    references: &[TokenizedText],
) -> Result<Vec<f64>, MetricError> {
    if candidates.len() != references.len() {
        return Err(MetricError::LengthMismatch {
            candidates: candidates.len(),
            references: references.len(),
        });
    }
    if references.len() < 2 {
        return Err(MetricError::CorpusTooSmall(references.len()));
    }
    let n_refs = references.len() as f64;
    let mut scores = vec![0.0; candidates.len()];
    for n in 1..=4 {
        let ref_counts: Vec<_> = references
            .iter()
            .map(|r| ngram_counts(&r.tokens, n))
            .collect();
        let mut df: HashMap<&[String], usize> = HashMap::new();
        for counts in &ref_counts {
            for gram in counts.keys() {
                *df.entry(*gram).or_insert(0) += 1;
            }
        }
        let idf = |g: &[String]| (n_refs / df.get(g).copied().unwrap_or(0).max(1) as f64).ln();
        for (i, cand) in candidates.iter().enumerate() {
            let cand_counts = ngram_counts(&cand.tokens, n);
            scores[i] += tfidf_cosine(&cand_counts, &ref_counts[i], &idf);
        }
    }
    Ok(scores.into_iter().map(|s| s / 4.0 * CIDER_SCALE).collect())
}
