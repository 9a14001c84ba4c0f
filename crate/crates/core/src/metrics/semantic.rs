use super::MetricError;
use crate::Result;
use crate::provider::{AlignmentProvider, EmbeddingProvider, cosine};

/// Cosine similarity of the provider's embeddings of the two texts.
pub fn embedding_cosine(
    provider: &dyn EmbeddingProvider,
    candidate: &str,
    reference: &str,
) -> Result<f64> {
    if candidate.trim().is_empty() || reference.trim().is_empty() {
        return Err(MetricError::EmptyText.into());
    }
    let a = provider.embed(candidate)?;
    let b = provider.embed(reference)?;
    Ok(cosine(&a, &b).ok_or(MetricError::DegenerateEmbedding)?)
}

/// Alignment score of `comment` against `code`, checked to lie in `[-1, 1]`.
pub fn side_score(provider: &dyn AlignmentProvider, code: &str, comment: &str) -> Result<f64> {
    if code.trim().is_empty() || comment.trim().is_empty() {
        return Err(MetricError::EmptyText.into());
    }
    let score = provider.align(code, comment)?;
    if !(-1.0..=1.0).contains(&score) {
        return Err(MetricError::OutOfRange {
            metric: format!("alignment score from {}", provider.name()),
            value: score,
        }
        .into());
    }
    Ok(score)
}
