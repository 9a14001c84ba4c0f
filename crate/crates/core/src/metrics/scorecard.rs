use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{MetricError, OmsWeights};
use crate::extract::MethodId;

/// Raw component scores of one generated comment.
///
/// Lexical metrics and `cider` are in `[0, 1]` (`cider` is the CIDEr value
/// divided by [`super::CIDER_SCALE`]); cosines and `side` are in `[-1, 1]`;
/// judge scores are already on the 0–100 scale.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreComponents {
    pub bleu: Option<f64>,
    pub meteor: Option<f64>,
    pub rouge_l: Option<f64>,
    pub cider: Option<f64>,
    pub sbert_cos: Option<f64>,
    pub usenc_cos: Option<f64>,
    pub side: Option<f64>,
    pub llm_scores: BTreeMap<String, f64>,
}

/// Per-comment metric vector on the 0–100 reporting scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreCard {
    pub method_id: MethodId,
    pub strategy: String,
    pub bleu: f64,
    pub meteor: f64,
    pub rouge_l: f64,
    pub cider: f64,
    pub sbert_cos: f64,
    pub usenc_cos: f64,
    pub side: f64,
    pub llm_scores: BTreeMap<String, f64>,
    pub syn_avg: f64,
    pub sem_avg: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub llm_avg: Option<f64>,
    pub oms_ss: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oms_ssl: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rubric_digest: Option<String>,
}

impl ScoreCard {
    /// Named metric columns in a fixed order, including the aggregates.
    pub fn metric_values(&self) -> Vec<(&'static str, Option<f64>)> {
        vec![
            ("bleu", Some(self.bleu)),
            ("meteor", Some(self.meteor)),
            ("rouge_l", Some(self.rouge_l)),
            ("cider", Some(self.cider)),
            ("sbert_cos", Some(self.sbert_cos)),
            ("usenc_cos", Some(self.usenc_cos)),
            ("side", Some(self.side)),
            ("syn_avg", Some(self.syn_avg)),
            ("sem_avg", Some(self.sem_avg)),
            ("llm_avg", self.llm_avg),
            ("oms_ss", Some(self.oms_ss)),
            ("oms_ssl", self.oms_ssl),
        ]
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metric_values()
            .into_iter()
            .find(|(n, _)| *n == name)
            .and_then(|(_, v)| v)
    }
}

pub const METRIC_NAMES: [&str; 12] = [
    "bleu",
    "meteor",
    "rouge_l",
    "cider",
    "sbert_cos",
    "usenc_cos",
    "side",
    "syn_avg",
    "sem_avg",
    "llm_avg",
    "oms_ss",
    "oms_ssl",
];

fn scaled(value: Option<f64>, name: &'static str, lo: f64, hi: f64) -> Result<f64, MetricError> {
    let v = value.ok_or(MetricError::MissingComponent(name))?;
    if !v.is_finite() || v < lo - 1e-9 || v > hi + 1e-9 {
        return Err(MetricError::OutOfRange {
            metric: name.to_string(),
            value: v,
        });
    }
    Ok(v * 100.0)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn build_scorecard(
    method_id: MethodId,
    strategy: impl Into<String>,
    components: &ScoreComponents,
    weights: &OmsWeights,
    rubric_digest: Option<String>,
) -> Result<ScoreCard, MetricError> {
    let bleu = scaled(components.bleu, "bleu", 0.0, 1.0)?;
    let meteor = scaled(components.meteor, "meteor", 0.0, 1.0)?;
    let rouge_l = scaled(components.rouge_l, "rouge_l", 0.0, 1.0)?;
    let cider = scaled(components.cider, "cider", 0.0, 1.0)?;
    let sbert_cos = scaled(components.sbert_cos, "sbert_cos", -1.0, 1.0)?;
    let usenc_cos = scaled(components.usenc_cos, "usenc_cos", -1.0, 1.0)?;
    let side = scaled(components.side, "side", -1.0, 1.0)?;
    for (judge, &score) in &components.llm_scores {
        if !(0.0..=100.0).contains(&score) {
            return Err(MetricError::OutOfRange {
                metric: format!("llm score from {judge}"),
                value: score,
            });
        }
    }

    let syn_avg = mean(&[bleu, meteor, rouge_l]);
    let sem_avg = mean(&[cider, sbert_cos, usenc_cos, side]);
    let llm_avg = if components.llm_scores.is_empty() {
        None
    } else {
        Some(mean(
            &components.llm_scores.values().copied().collect::<Vec<_>>(),
        ))
    };
    Ok(ScoreCard {
        method_id,
        strategy: strategy.into(),
        bleu,
        meteor,
        rouge_l,
        cider,
        sbert_cos,
        usenc_cos,
        side,
        llm_scores: components.llm_scores.clone(),
        syn_avg,
        sem_avg,
        llm_avg,
        oms_ss: weights.oms_ss(syn_avg, sem_avg),
        oms_ssl: llm_avg.map(|llm| weights.oms_ssl(syn_avg, sem_avg, llm)),
        rubric_digest,
    })
}
