//! Comment quality metrics.
//!
//! Syntactic metrics (BLEU-4, METEOR, ROUGE-L) and CIDEr compare a candidate
//! against a reference comment over a shared [`tokenize`] function and
//! return raw scores in `[0, 1]` (CIDEr: `[0, 10]`). Embedding cosines,
//! code/comment alignment and LLM judges go through provider traits.
//! [`build_scorecard`] rescales everything to the 0–100 reporting scale and
//! aggregates it with [`OmsWeights`].

mod bleu;
mod cider;
mod judge;
mod meteor;
mod oms;
mod rouge;
mod scorecard;
mod semantic;
mod tokenize;

pub use bleu::bleu4_smoothed;
pub use cider::{CIDER_SCALE, cider};
pub use judge::{llm_judge, parse_judge_score, render_judge_prompt};
pub use meteor::{METEOR_ALPHA, METEOR_BETA, METEOR_GAMMA, meteor};
pub use oms::{OmsWeights, oms_ss, oms_ssl};
pub use rouge::{lcs_len, rouge_l};
pub use scorecard::{METRIC_NAMES, ScoreCard, ScoreComponents, build_scorecard};
pub use semantic::{embedding_cosine, side_score};
pub use tokenize::{TokenizedText, tokenize};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("reference text is empty")]
    EmptyReference,
    #[error("text to embed is empty")]
    EmptyText,
    #[error("CIDEr needs at least two references, got {0}")]
    CorpusTooSmall(usize),
    #[error("{candidates} candidates but {references} references")]
    LengthMismatch {
        candidates: usize,
        references: usize,
    },
    #[error("{metric} = {value} is outside its range")]
    OutOfRange { metric: String, value: f64 },
    #[error("judge reply has no integer score: {0:?}")]
    JudgeParse(String),
    #[error("embedding has zero norm or mismatched dimensions")]
    DegenerateEmbedding,
    #[error("score component {0} is missing")]
    MissingComponent(&'static str),
}
