//! Pipeline configuration.
//!
//! The configuration is a single TOML file. Every key is optional; omitted
//! keys take the defaults below, which reproduce the reference
//! parameterisation (temperature 0.2, a 128K-token context budget, an
//! alignment threshold of 0.8 and OMS weights 0.46/0.54 and 0.30/0.35/0.35).
//!
//! ```toml
//! [[repos]]
//! name = "demo"
//! root = "../demo"          # relative to this file
//! branch = "main"
//! language = "java"         # java | python | php | anything else
//! extensions = [".java"]    # required for languages without a built-in profile
//! exclude = ["**/test/**"]
//!
//! [criteria]
//! min_stars = 10000
//!
//! [provider.completion]
//! endpoint = "https://api.openai.com/v1/chat/completions"
//! model = "gpt-4o"
//! api_key_env = "OPENAI_API_KEY"
//!
//! [generation]
//! temperature = 0.2
//! context_token_budget = 128000
//!
//! [eval]
//! side_threshold = 0.8
//!
//! [eval.weights]
//! syn_ss = 0.46
//! sem_ss = 0.54
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::RepoDescriptor;
use crate::digest::sha256_hex;
use crate::metrics::OmsWeights;
use crate::{Error, Result};

pub const DEFAULT_TEMPERATURE: f64 = 0.2;
pub const DEFAULT_CONTEXT_TOKEN_BUDGET: usize = 128_000;
pub const DEFAULT_SIDE_THRESHOLD: f64 = 0.8;

const WEIGHT_TOLERANCE: f64 = 1e-9;

/// Repository inclusion criteria. Recorded in run manifests, never enforced.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RepoCriteria {
    pub min_stars: u64,
    pub min_commits: u64,
    pub min_contributors: u64,
    pub require_active_prs: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndpointConfig {
    pub endpoint: String,
    pub model: String,
    /// Name of the environment variable holding the API key.
    #[serde(default)]
    pub api_key_env: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingConfig {
    pub endpoint: String,
    /// Model used for the SBERT role.
    pub model: String,
    /// Model used for the USEnc role; defaults to `model`.
    #[serde(default)]
    pub usenc_model: Option<String>,
    #[serde(default)]
    pub api_key_env: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProviderConfig {
    pub completion: Option<EndpointConfig>,
    pub embedding: Option<EmbeddingConfig>,
    /// Code/comment alignment scorer. Without one, the embedding-cosine
    /// fallback is used.
    pub alignment: Option<EndpointConfig>,
    /// LLM judges; each contributes one entry to a score card's `llm_scores`.
    pub judges: Vec<EndpointConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerationConfig {
    pub temperature: f64,
    pub context_token_budget: usize,
    /// Total attempts per provider call, including the first.
    pub max_attempts: u32,
    pub backoff_base_ms: u64,
    /// Upper bound on in-flight provider calls.
    pub concurrency: usize,
    /// Minimum spacing between provider calls, in milliseconds.
    pub min_interval_ms: u64,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            temperature: DEFAULT_TEMPERATURE,
            context_token_budget: DEFAULT_CONTEXT_TOKEN_BUDGET,
            max_attempts: 3,
            backoff_base_ms: 500,
            concurrency: 4,
            min_interval_ms: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub side_threshold: f64,
    pub weights: OmsWeights,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            side_threshold: DEFAULT_SIDE_THRESHOLD,
            weights: OmsWeights::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StoreConfig {
    pub runs_dir: PathBuf,
}

impl Default for StoreConfig {
    fn default() -> Self {
        StoreConfig {
            runs_dir: PathBuf::from("runs"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingConfig {
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub repos: Vec<RepoDescriptor>,
    pub criteria: RepoCriteria,
    pub provider: ProviderConfig,
    pub generation: GenerationConfig,
    pub eval: EvalConfig,
    pub store: StoreConfig,
    pub sampling: SamplingConfig,
    /// SHA-256 of the file the config was loaded from.
    #[serde(skip)]
    pub digest: String,
}

impl PipelineConfig {
    /// Parses a config document. Relative paths are resolved against `base_dir`.
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self> {
        let mut config: PipelineConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.digest = sha256_hex(text);
        for repo in &mut config.repos {
            if repo.root.is_relative() {
                repo.root = base_dir.join(&repo.root);
            }
        }
        if config.store.runs_dir.is_relative() {
            config.store.runs_dir = base_dir.join(&config.store.runs_dir);
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.generation;
        if !(0.0..=1.0).contains(&g.temperature) {
            return Err(Error::Config(format!(
                "generation.temperature must lie in [0, 1], got {}",
                g.temperature
            )));
        }
        if g.context_token_budget == 0 {
            return Err(Error::Config(
                "generation.context_token_budget must be positive".into(),
            ));
        }
        if g.max_attempts == 0 || g.concurrency == 0 {
            return Err(Error::Config(
                "generation.max_attempts and generation.concurrency must be positive".into(),
            ));
        }
        if !(-1.0..=1.0).contains(&self.eval.side_threshold) {
            return Err(Error::Config(format!(
                "eval.side_threshold must lie in [-1, 1], got {}",
                self.eval.side_threshold
            )));
        }
        let w = &self.eval.weights;
        let ss = w.syn_ss + w.sem_ss;
        if (ss - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(Error::Config(format!(
                "eval.weights.syn_ss + eval.weights.sem_ss must equal 1.0, got {ss}"
            )));
        }
        let ssl = w.syn_ssl + w.sem_ssl + w.llm_ssl;
        if (ssl - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(Error::Config(format!(
                "eval.weights.syn_ssl + sem_ssl + llm_ssl must equal 1.0, got {ssl}"
            )));
        }
        for repo in &self.repos {
            if repo.name.trim().is_empty() {
                return Err(Error::Config("repos[].name must be non-empty".into()));
            }
        }
        Ok(())
    }

    pub fn repo(&self, name: &str) -> Result<&RepoDescriptor> {
        self.repos
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::Config(format!("no repository named {name:?} in config")))
    }
}

/// Loads and validates a config file, filling defaults for omitted keys.
pub fn load_config(path: &Path) -> Result<PipelineConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    PipelineConfig::from_toml_str(&text, base)
}
