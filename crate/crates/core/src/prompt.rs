//! Prompt rendering for the baseline and helper-augmented strategies, and
//! comment generation through a [`CompletionProvider`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::digest::sha256_hex;
use crate::extract::{MethodId, MethodRecord, clean_block_comment};
use crate::graph::{HelperChain, MethodIndex};
use crate::provider::{
    CompletionProvider, CompletionRequest, ProviderError, RetryPolicy, with_retry,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "baseline")]
    Baseline,
    /// Immediate helpers only.
    #[serde(rename = "helpcom1")]
    HelpCom1,
    /// The full helper chain.
    #[serde(rename = "helpcomN")]
    HelpComN,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Baseline => "baseline",
            Strategy::HelpCom1 => "helpcom1",
            Strategy::HelpComN => "helpcomN",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baseline" => Ok(Strategy::Baseline),
            "helpcom1" => Ok(Strategy::HelpCom1),
            "helpcomN" | "helpcomn" => Ok(Strategy::HelpComN),
            other => Err(Error::Data(format!(
                "unknown strategy {other:?} (expected baseline, helpcom1 or helpcomN)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTemplate {
    pub template_id: String,
    pub instruction_text: String,
    pub target_section_header: String,
    pub helper_section_header: String,
    pub output_constraint_text: String,
}

impl PromptTemplate {
    /// Default comment-generation template.
    pub fn comment_generation() -> Self {
        PromptTemplate {
            template_id: "comment-generation-v1".into(),
            instruction_text: "You are an expert software engineer. Write a concise method-level \
                documentation comment describing what the following method does."
                .into(),
            target_section_header: "Method:".into(),
            helper_section_header:
                "The method calls the following helper methods, provided for context:".into(),
            output_constraint_text: "Respond with only the comment text, no code.".into(),
        }
    }

    /// Default rubric for LLM judges. The code goes in the target section and
    /// the comment under the helper header.
    pub fn judge_rubric() -> Self {
        PromptTemplate {
            template_id: "judge-rubric-v1".into(),
            instruction_text: "You will be given a method and a comment written for it. Rate the \
                comment's quality as a summary of the method, considering coherence, consistency, \
                fluency and relevance."
                .into(),
            target_section_header: "Code:".into(),
            helper_section_header: "Comment:".into(),
            output_constraint_text:
                "Reply with a single integer score from 0 (useless) to 100 (excellent).".into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            &self.template_id,
            &self.instruction_text,
            &self.target_section_header,
            &self.helper_section_header,
            &self.output_constraint_text,
        ];
        if fields.iter().any(|f| f.trim().is_empty()) {
            return Err(Error::Data(format!(
                "template {:?} has an empty field",
                self.template_id
            )));
        }
        Ok(())
    }

    pub fn digest(&self) -> String {
        sha256_hex(serde_json::to_string(self).unwrap_or_default())
    }
}

/// A helper method as it appears in a prompt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HelperContext {
    pub id: MethodId,
    pub name: String,
    pub body: String,
    pub depth: usize,
}

/// Looks up each chain entry's method record, keeping chain order.
pub fn helpers_from_chain(chain: &HelperChain, index: &MethodIndex) -> Result<Vec<HelperContext>> {
    chain
        .entries
        .iter()
        .map(|e| {
            let m = index.get(&e.helper_id).ok_or_else(|| {
                Error::Data(format!("chain references unknown method {}", e.helper_id))
            })?;
            Ok(HelperContext {
                id: e.helper_id.clone(),
                name: m.name.clone(),
                body: m.body_text.clone(),
                depth: e.depth,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderedPrompt {
    pub method_id: MethodId,
    pub strategy: Strategy,
    pub text: String,
    pub token_estimate: usize,
    pub included_helpers: Vec<MethodId>,
    pub dropped_helpers: Vec<MethodId>,
}

impl RenderedPrompt {
    pub fn digest(&self) -> String {
        sha256_hex(&self.text)
    }
}

/// Upper-bound token estimate: one token per three bytes, rounded up.
pub fn estimate_tokens(text: &str) -> usize {
    text.len().div_ceil(3)
}

fn compose(method: &MethodRecord, helpers: &[&HelperContext], template: &PromptTemplate) -> String {
    let mut out = format!(
        "{}\n\n{}\n{}\n",
        template.instruction_text, template.target_section_header, method.body_text
    );
    if !helpers.is_empty() {
        out.push('\n');
        out.push_str(&template.helper_section_header);
        out.push('\n');
        for h in helpers {
            out.push_str(&format!("\nHelper method `{}`:\n{}\n", h.name, h.body));
        }
    }
    out.push('\n');
    out.push_str(&template.output_constraint_text);
    out
}

/// Renders the prompt for `strategy`. If the estimate exceeds `budget`,
/// helpers are dropped deepest first (later-encountered first among equal
/// depths) until it fits; the target method itself is never dropped.
pub fn render_prompt(
    method: &MethodRecord,
    helpers: &[HelperContext],
    strategy: Strategy,
    template: &PromptTemplate,
    budget: usize,
) -> Result<RenderedPrompt> {
    template.validate()?;
    let selected: Vec<(usize, &HelperContext)> = match strategy {
        Strategy::Baseline => Vec::new(),
        Strategy::HelpCom1 => helpers
            .iter()
            .filter(|h| h.depth == 1)
            .enumerate()
            .collect(),
        Strategy::HelpComN => helpers.iter().enumerate().collect(),
    };
    if strategy != Strategy::Baseline && selected.is_empty() {
        return Err(Error::Data(format!(
            "strategy {strategy} needs a non-empty helper chain for {}",
            method.method_id
        )));
    }

    let mut drop_order: Vec<usize> = (0..selected.len()).collect();
    drop_order.sort_by_key(|&i| std::cmp::Reverse((selected[i].1.depth, i)));
    let mut keep = vec![true; selected.len()];
    let mut dropped = Vec::new();
    let mut next_drop = drop_order.into_iter();
    loop {
        let included: Vec<&HelperContext> = selected
            .iter()
            .filter(|(i, _)| keep[*i])
            .map(|(_, h)| *h)
            .collect();
        let text = compose(method, &included, template);
        let token_estimate = estimate_tokens(&text);
        if token_estimate <= budget {
            return Ok(RenderedPrompt {
                method_id: method.method_id.clone(),
                strategy,
                text,
                token_estimate,
                included_helpers: included.iter().map(|h| h.id.clone()).collect(),
                dropped_helpers: dropped,
            });
        }
        match next_drop.next() {
            Some(i) => {
                keep[i] = false;
                dropped.push(selected[i].1.id.clone());
            }
            None => {
                return Err(Error::Data(format!(
                    "prompt for {} needs {token_estimate} tokens, over the budget of {budget}",
                    method.method_id
                )));
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedComment {
    pub method_id: MethodId,
    /// Strategy label: a [`Strategy`] name or the label of an imported baseline.
    pub strategy: String,
    pub provider_model: String,
    pub text: String,
    pub prompt_digest: String,
    pub temperature: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generation {
    pub comment: GeneratedComment,
    pub attempts: u32,
}

/// Trims the reply and removes code fences and comment delimiters.
pub fn normalize_completion(raw: &str) -> String {
    let mut text = raw.trim();
    if let Some(rest) = text.strip_prefix("```") {
        let rest = rest.split_once('\n').map_or("", |(_, body)| body);
        text = rest.trim_end().strip_suffix("```").unwrap_or(rest).trim();
    }
    if text.starts_with("/*") {
        return clean_block_comment(text);
    }
    let lines: Vec<&str> = text.lines().collect();
    let prefix = ["///", "//", "#"]
        .into_iter()
        .find(|p| lines.iter().all(|l| l.trim_start().starts_with(p)));
    match prefix {
        Some(p) => lines
            .iter()
            .map(|l| l.trim_start().trim_start_matches(p).trim())
            .collect::<Vec<_>>()
            .join("\n")
            .trim()
            .to_string(),
        None => text.to_string(),
    }
}

/// Sends the prompt, retrying transient failures per `policy`.
pub fn generate_comment(
    provider: &dyn CompletionProvider,
    prompt: &RenderedPrompt,
    temperature: f64,
    policy: &RetryPolicy,
) -> Result<Generation> {
    if !(0.0..=1.0).contains(&temperature) {
        return Err(Error::Data(format!(
            "temperature {temperature} outside [0, 1]"
        )));
    }
    let request = CompletionRequest {
        model: provider.model().to_string(),
        prompt: prompt.text.clone(),
        temperature,
    };
    let (raw, attempts) = with_retry(policy, |attempt| {
        log::debug!("{}: attempt {attempt}", prompt.method_id);
        provider.complete(&request)
    })?;
    let text = normalize_completion(&raw);
    if text.is_empty() {
        return Err(ProviderError::EmptyCompletion.into());
    }
    log::info!(
        "{} [{}]: generated after {attempts} attempt(s)",
        prompt.method_id,
        prompt.strategy
    );
    Ok(Generation {
        comment: GeneratedComment {
            method_id: prompt.method_id.clone(),
            strategy: prompt.strategy.to_string(),
            provider_model: provider.model().to_string(),
            text,
            prompt_digest: prompt.digest(),
            temperature,
        },
        attempts,
    })
}
