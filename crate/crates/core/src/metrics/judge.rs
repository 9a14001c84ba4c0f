use std::sync::LazyLock;

use regex::Regex;

use super::MetricError;
use crate::Result;
use crate::prompt::PromptTemplate;
use crate::provider::{CompletionProvider, CompletionRequest, RetryPolicy, with_retry};

static FIRST_INTEGER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"-?\d+").unwrap());

/// Rubric prompt: instruction, code under the target header, comment under
/// the helper header, then the output constraint.
pub fn render_judge_prompt(rubric: &PromptTemplate, code: &str, comment: &str) -> String {
    format!(
        "{}\n\n{}\n{}\n\n{}\n{}\n\n{}",
        rubric.instruction_text,
        rubric.target_section_header,
        code,
        rubric.helper_section_header,
        comment,
        rubric.output_constraint_text
    )
}

/// The first integer in the reply, which must lie in `[0, 100]`.
pub fn parse_judge_score(reply: &str) -> Result<f64, MetricError> {
    let m = FIRST_INTEGER
        .find(reply)
        .ok_or_else(|| MetricError::JudgeParse(reply.to_string()))?;
    let value: i64 = m
        .as_str()
        .parse()
        .map_err(|_| MetricError::JudgeParse(reply.to_string()))?;
    if !(0..=100).contains(&value) {
        return Err(MetricError::OutOfRange {
            metric: "judge score".into(),
            value: value as f64,
        });
    }
    Ok(value as f64)
}

pub fn llm_judge(
    provider: &dyn CompletionProvider,
    code: &str,
    comment: &str,
    rubric: &PromptTemplate,
    temperature: f64,
    policy: &RetryPolicy,
) -> Result<f64> {
    let request = CompletionRequest {
        model: provider.model().to_string(),
        prompt: render_judge_prompt(rubric, code, comment),
        temperature,
    };
    let (reply, _) = with_retry(policy, |_| provider.complete(&request))?;
    Ok(parse_judge_score(&reply)?)
}
