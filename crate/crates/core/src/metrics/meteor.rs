use std::sync::LazyLock;

use rust_stemmers::{Algorithm, Stemmer};

use super::{MetricError, TokenizedText};

pub const METEOR_ALPHA: f64 = 0.9;
pub const METEOR_BETA: f64 = 3.0;
pub const METEOR_GAMMA: f64 = 0.5;

static STEMMER: LazyLock<Stemmer> = LazyLock::new(|| Stemmer::create(Algorithm::English));

/// Aligned `(candidate index, reference index)` pairs, sorted by candidate index.
///
/// Two stages: exact matches, then matches on stems among tokens still
/// unaligned. In each stage candidate tokens are visited left to right and
/// take the leftmost free reference token that matches.
fn align(cand: &[String], refr: &[String]) -> Vec<(usize, usize)> {
    let mut cand_to_ref: Vec<Option<usize>> = vec![None; cand.len()];
    let mut ref_used = vec![false; refr.len()];
    let stage = |key: &dyn Fn(&str) -> String,
                 cand_to_ref: &mut Vec<Option<usize>>,
                 ref_used: &mut Vec<bool>| {
        let ref_keys: Vec<String> = refr.iter().map(|t| key(t)).collect();
        for (i, tok) in cand.iter().enumerate() {
            if cand_to_ref[i].is_some() {
                continue;
            }
            let k = key(tok);
            if let Some(j) = (0..refr.len()).find(|&j| !ref_used[j] && ref_keys[j] == k) {
                cand_to_ref[i] = Some(j);
                ref_used[j] = true;
            }
        }
    };
    stage(&|t| t.to_string(), &mut cand_to_ref, &mut ref_used);
    stage(
        &|t| STEMMER.stem(t).into_owned(),
        &mut cand_to_ref,
        &mut ref_used,
    );
    cand_to_ref
        .into_iter()
        .enumerate()
        .filter_map(|(i, j)| j.map(|j| (i, j)))
        .collect()
}

/// METEOR with exact and stem matching (no synonyms).
///
/// `Fmean = P·R / (α·P + (1−α)·R)`, penalty `γ·(chunks/m)^β`,
/// score `Fmean·(1 − penalty)`, with α = 0.9, β = 3, γ = 0.5.
pub fn meteor(candidate: &TokenizedText, reference: &TokenizedText) -> Result<f64, MetricError> {
    if reference.is_empty() {
        return Err(MetricError::EmptyReference);
    }
    let pairs = align(&candidate.tokens, &reference.tokens);
    let m = pairs.len();
    if m == 0 {
        return Ok(0.0);
    }
    let chunks = 1 + pairs
        .windows(2)
        .filter(|w| !(w[1].0 == w[0].0 + 1 && w[1].1 == w[0].1 + 1))
        .count();
    let p = m as f64 / candidate.len() as f64;
    let r = m as f64 / reference.len() as f64;
    let fmean = p * r / (METEOR_ALPHA * p + (1.0 - METEOR_ALPHA) * r);
    let penalty = METEOR_GAMMA * (chunks as f64 / m as f64).powf(METEOR_BETA);
    Ok(fmean * (1.0 - penalty))
}
