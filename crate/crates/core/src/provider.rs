//! Completion, embedding and alignment back ends.
//!
//! Every back end sits behind a small trait so that the pipeline can run
//! against hosted models, a local server or the offline stand-ins shipped
//! here: [`MockCompletionProvider`] (canned replies keyed by prompt digest),
//! [`HashingEmbedder`] and [`EmbeddingAlignment`]. The offline stand-ins are
//! deterministic but are not equivalent to the hosted models they replace.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Value, json};
use thiserror::Error;

use crate::config::{EmbeddingConfig, EndpointConfig, GenerationConfig};
use crate::digest::sha256_hex;
use crate::metrics::tokenize;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProviderError {
    /// Worth retrying: transport failures, timeouts, 429 and 5xx replies.
    #[error("transient provider failure: {0}")]
    Transient(String),
    #[error("provider authentication failed: {0}")]
    Auth(String),
    #[error("provider error: {0}")]
    Fatal(String),
    #[error("provider unreachable after {attempts} attempts: {last}")]
    Exhausted { attempts: u32, last: String },
    #[error("provider returned an empty completion")]
    EmptyCompletion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub model: String,
    pub prompt: String,
    pub temperature: f64,
}

pub trait CompletionProvider: Send + Sync {
    fn model(&self) -> &str;

    /// One attempt; retries are handled by the caller.
    fn complete(&self, request: &CompletionRequest) -> Result<String, ProviderError>;
}

pub trait EmbeddingProvider: Send + Sync {
    fn model(&self) -> &str;
    fn embed(&self, text: &str) -> Result<Vec<f64>, ProviderError>;
}

/// Reference-free code/comment alignment in `[-1, 1]`.
pub trait AlignmentProvider: Send + Sync {
    fn name(&self) -> &str;
    fn align(&self, code: &str, comment: &str) -> Result<f64, ProviderError>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetryPolicy {
    /// Total attempts including the first.
    pub max_attempts: u32,
    pub base_delay: Duration,
}

impl RetryPolicy {
    pub fn from_config(config: &GenerationConfig) -> Self {
        RetryPolicy {
            max_attempts: config.max_attempts.max(1),
            base_delay: Duration::from_millis(config.backoff_base_ms),
        }
    }

    /// Delay before attempt `attempt + 1`: `base · 2^(attempt−1)`.
    pub fn delay_after(&self, attempt: u32) -> Duration {
        self.base_delay
            .saturating_mul(1u32 << attempt.saturating_sub(1).min(16))
    }
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy::from_config(&GenerationConfig::default())
    }
}

/// Runs `op` until it succeeds, fails permanently or the attempt budget is
/// spent. Returns the value and the number of attempts used.
pub fn with_retry<T>(
    policy: &RetryPolicy,
    mut op: impl FnMut(u32) -> Result<T, ProviderError>,
) -> Result<(T, u32), ProviderError> {
    let mut attempt = 1;
    loop {
        match op(attempt) {
            Ok(value) => return Ok((value, attempt)),
            Err(ProviderError::Transient(msg)) => {
                log::warn!("attempt {attempt}/{} failed: {msg}", policy.max_attempts);
                if attempt >= policy.max_attempts {
                    return Err(ProviderError::Exhausted {
                        attempts: attempt,
                        last: msg,
                    });
                }
                std::thread::sleep(policy.delay_after(attempt));
                attempt += 1;
            }
            Err(other) => return Err(other),
        }
    }
}

/// Enforces a minimum spacing between calls shared by all workers.
#[derive(Debug)]
pub struct RateLimiter {
    min_interval: Duration,
    next_slot: Mutex<Option<Instant>>,
}

impl RateLimiter {
    pub fn new(min_interval: Duration) -> Self {
        RateLimiter {
            min_interval,
            next_slot: Mutex::new(None),
        }
    }

    pub fn acquire(&self) {
        if self.min_interval.is_zero() {
            return;
        }
        let wait = {
            let mut slot = self.next_slot.lock().unwrap_or_else(|e| e.into_inner());
            let now = Instant::now();
            let start = slot.map_or(now, |s| s.max(now));
            *slot = Some(start + self.min_interval);
            start - now
        };
        if !wait.is_zero() {
            std::thread::sleep(wait);
        }
    }
}

/// Maps `f` over `items` on at most `concurrency` threads, preserving order.
pub fn run_bounded<T, R, F>(items: &[T], concurrency: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match rayon::ThreadPoolBuilder::new()
        .num_threads(concurrency.max(1))
        .build()
    {
        Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
        Err(_) => items.iter().map(f).collect(),
    }
}

fn api_key(env: &Option<String>) -> Result<Option<String>, ProviderError> {
    match env {
        None => Ok(None),
        Some(var) => std::env::var(var)
            .map(Some)
            .map_err(|_| ProviderError::Auth(format!("environment variable {var} is not set"))),
    }
}

fn http_client() -> Result<reqwest::blocking::Client, ProviderError> {
    reqwest::blocking::Client::builder()
        .timeout(Duration::from_secs(120))
        .build()
        .map_err(|e| ProviderError::Fatal(e.to_string()))
}

fn post_json(
    client: &reqwest::blocking::Client,
    endpoint: &str,
    key: Option<&str>,
    body: &Value,
) -> Result<Value, ProviderError> {
    let mut req = client.post(endpoint).json(body);
    if let Some(key) = key {
        req = req.bearer_auth(key);
    }
    let resp = req
        .send()
        .map_err(|e| ProviderError::Transient(e.to_string()))?;
    let status = resp.status();
    let text = resp
        .text()
        .map_err(|e| ProviderError::Transient(e.to_string()))?;
    match status.as_u16() {
        200..=299 => serde_json::from_str(&text)
            .map_err(|e| ProviderError::Fatal(format!("malformed response: {e}"))),
        401 | 403 => Err(ProviderError::Auth(format!("HTTP {status}"))),
        408 | 429 | 500..=599 => Err(ProviderError::Transient(format!("HTTP {status}: {text}"))),
        _ => Err(ProviderError::Fatal(format!("HTTP {status}: {text}"))),
    }
}

/// OpenAI-compatible chat completion endpoint (also served by Ollama and vLLM).
///
/// Request: `{"model", "messages": [{"role": "user", "content": prompt}], "temperature"}`.
/// Reply: `choices[0].message.content`, or `choices[0].text` for legacy completion models.
pub struct HttpCompletionProvider {
    endpoint: String,
    model: String,
    api_key: Option<String>,
    client: reqwest::blocking::Client,
}

impl HttpCompletionProvider {
    pub fn new(config: &EndpointConfig) -> Result<Self, ProviderError> {
        Ok(HttpCompletionProvider {
            endpoint: config.endpoint.clone(),
            model: config.model.clone(),
            api_key: api_key(&config.api_key_env)?,
            client: http_client()?,
        })
    }
}

pub fn completion_request_body(request: &CompletionRequest) -> Value {
    json!({
        "model": request.model,
        "messages": [{"role": "user", "content": request.prompt}],
        "temperature": request.temperature,
    })
}

pub fn completion_from_response(body: &Value) -> Result<String, ProviderError> {
    let choice = &body["choices"][0];
    choice["message"]["content"]
        .as_str()
        .or_else(|| choice["text"].as_str())
        .map(str::to_string)
        .ok_or_else(|| ProviderError::Fatal("response carries no completion text".into()))
}

impl CompletionProvider for HttpCompletionProvider {
    fn model(&self) -> &str {
        &self.model
    }

    fn complete(&self, request: &CompletionRequest) -> Result<String, ProviderError> {
        let body = post_json(
            &self.client,
            &self.endpoint,
            self.api_key.as_deref(),
            &completion_request_body(request),
        )?;
        completion_from_response(&body)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MockRule {
    pub contains: String,
    pub reply: String,
}

/// File format of the offline completion provider.
///
/// ```json
/// {
///   "model": "mock",
///   "responses": { "<sha256 of prompt text>": "Canned reply." },
///   "rules": [ { "contains": "Rate the comment", "reply": "80" } ],
///   "fallback": "Generated comment {digest}."
/// }
/// ```
///
/// Exact digest matches win, then the first rule whose `contains` text
/// occurs in the prompt, then `fallback`. `{digest}` expands to the first
/// 12 hex digits of the prompt digest.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MockResponses {
    pub model: Option<String>,
    pub responses: BTreeMap<String, String>,
    pub rules: Vec<MockRule>,
    pub fallback: Option<String>,
}

#[derive(Debug, Clone)]
pub struct MockCompletionProvider {
    model: String,
    table: MockResponses,
}

impl MockCompletionProvider {
    pub fn new(table: MockResponses) -> Self {
        MockCompletionProvider {
            model: table.model.clone().unwrap_or_else(|| "mock".to_string()),
            table,
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let table = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Ok(MockCompletionProvider::new(table))
    }

    /// Same canned responses under a different model label.
    pub fn with_model(mut self, model: impl Into<String>) -> Self {
        self.model = model.into();
        self
    }
}

impl CompletionProvider for MockCompletionProvider {
    fn model(&self) -> &str {
        &self.model
    }

    fn complete(&self, request: &CompletionRequest) -> Result<String, ProviderError> {
        let digest = sha256_hex(&request.prompt);
        let reply = self
            .table
            .responses
            .get(&digest)
            .or_else(|| {
                self.table
                    .rules
                    .iter()
                    .find(|r| request.prompt.contains(&r.contains))
                    .map(|r| &r.reply)
            })
            .or(self.table.fallback.as_ref())
            .ok_or_else(|| {
                ProviderError::Fatal(format!("no canned response for prompt {digest}"))
            })?;
        Ok(reply.replace("{digest}", &digest[..12]))
    }
}

/// OpenAI-compatible embedding endpoint: `{"model", "input"}` →
/// `data[0].embedding` (or a top-level `embedding` array, as Ollama returns).
pub struct HttpEmbeddingProvider {
    endpoint: String,
    model: String,
    api_key: Option<String>,
    client: reqwest::blocking::Client,
}

impl HttpEmbeddingProvider {
    pub fn new(
        endpoint: &str,
        model: &str,
        api_key_env: &Option<String>,
    ) -> Result<Self, ProviderError> {
        Ok(HttpEmbeddingProvider {
            endpoint: endpoint.to_string(),
            model: model.to_string(),
            api_key: api_key(api_key_env)?,
            client: http_client()?,
        })
    }

    /// The SBERT-role and USEnc-role providers described by `config`.
    pub fn pair(config: &EmbeddingConfig) -> Result<(Self, Self), ProviderError> {
        let usenc = config.usenc_model.as_deref().unwrap_or(&config.model);
        Ok((
            Self::new(&config.endpoint, &config.model, &config.api_key_env)?,
            Self::new(&config.endpoint, usenc, &config.api_key_env)?,
        ))
    }
}

pub fn embedding_from_response(body: &Value) -> Result<Vec<f64>, ProviderError> {
    let arr = body["data"][0]["embedding"]
        .as_array()
        .or_else(|| body["embedding"].as_array())
        .ok_or_else(|| ProviderError::Fatal("response carries no embedding".into()))?;
    arr.iter()
        .map(|v| {
            v.as_f64()
                .ok_or_else(|| ProviderError::Fatal("non-numeric embedding component".into()))
        })
        .collect()
}

impl EmbeddingProvider for HttpEmbeddingProvider {
    fn model(&self) -> &str {
        &self.model
    }

    fn embed(&self, text: &str) -> Result<Vec<f64>, ProviderError> {
        let body = json!({"model": self.model, "input": text});
        let resp = post_json(&self.client, &self.endpoint, self.api_key.as_deref(), &body)?;
        embedding_from_response(&resp)
    }
}

/// Offline bag-of-n-grams embedder using signed feature hashing.
///
/// Deterministic and dependency free, but it only captures lexical overlap;
/// it is a stand-in for sentence encoders, not an equivalent.
#[derive(Debug, Clone)]
pub struct HashingEmbedder {
    label: String,
    dim: usize,
    max_ngram: usize,
}

impl HashingEmbedder {
    pub fn new(label: impl Into<String>, dim: usize, max_ngram: usize) -> Self {
        HashingEmbedder {
            label: label.into(),
            dim: dim.max(1),
            max_ngram: max_ngram.max(1),
        }
    }

    /// Stand-in for the SBERT role: unigrams.
    pub fn sbert_role() -> Self {
        HashingEmbedder::new("hashing-unigram-512 (offline)", 512, 1)
    }

    /// Stand-in for the USEnc role: unigrams and bigrams.
    pub fn usenc_role() -> Self {
        HashingEmbedder::new("hashing-bigram-512 (offline)", 512, 2)
    }

    fn add_feature(&self, v: &mut [f64], feature: &str) {
        let h = sha256_hex(feature);
        let bucket = u64::from_str_radix(&h[..15], 16).unwrap_or(0) as usize % self.dim;
        let sign = if h.as_bytes()[15].is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        v[bucket] += sign;
    }
}

impl EmbeddingProvider for HashingEmbedder {
    fn model(&self) -> &str {
        &self.label
    }

    fn embed(&self, text: &str) -> Result<Vec<f64>, ProviderError> {
        let mut v = vec![0.0; self.dim];
        let tokens = tokenize(text).tokens;
        for n in 1..=self.max_ngram {
            for gram in tokens.windows(n) {
                self.add_feature(&mut v, &gram.join(" "));
            }
        }
        if tokens.is_empty() && !text.trim().is_empty() {
            self.add_feature(&mut v, text.trim());
        }
        Ok(v)
    }
}

pub(crate) fn cosine(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    Some((dot / (na * nb)).clamp(-1.0, 1.0))
}

/// Alignment fallback: cosine between embeddings of the code and the comment.
///
/// This is not the trained SIDE model; scores are only comparable with each
/// other, not with published SIDE numbers.
pub struct EmbeddingAlignment<E> {
    embedder: E,
    label: String,
}

impl<E: EmbeddingProvider> EmbeddingAlignment<E> {
    pub fn new(embedder: E) -> Self {
        let label = format!("embedding-cosine-fallback[{}]", embedder.model());
        EmbeddingAlignment { embedder, label }
    }
}

impl<E: EmbeddingProvider> AlignmentProvider for EmbeddingAlignment<E> {
    fn name(&self) -> &str {
        &self.label
    }

    fn align(&self, code: &str, comment: &str) -> Result<f64, ProviderError> {
        let a = self.embedder.embed(code)?;
        let b = self.embedder.embed(comment)?;
        cosine(&a, &b).ok_or_else(|| ProviderError::Fatal("zero-norm embedding".into()))
    }
}

/// Remote alignment scorer: `{"code", "comment"}` → `{"score"}`.
pub struct HttpAlignmentProvider {
    endpoint: String,
    label: String,
    api_key: Option<String>,
    client: reqwest::blocking::Client,
}

impl HttpAlignmentProvider {
    pub fn new(config: &EndpointConfig) -> Result<Self, ProviderError> {
        Ok(HttpAlignmentProvider {
            endpoint: config.endpoint.clone(),
            label: config.model.clone(),
            api_key: api_key(&config.api_key_env)?,
            client: http_client()?,
        })
    }
}

impl AlignmentProvider for HttpAlignmentProvider {
    fn name(&self) -> &str {
        &self.label
    }

    fn align(&self, code: &str, comment: &str) -> Result<f64, ProviderError> {
        let body = json!({"code": code, "comment": comment});
        let resp = post_json(&self.client, &self.endpoint, self.api_key.as_deref(), &body)?;
        resp["score"]
            .as_f64()
            .ok_or_else(|| ProviderError::Fatal("response carries no score".into()))
    }
}
