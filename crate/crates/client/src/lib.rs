//! HTTP client for chat-completion-style model APIs, with retries and a
//! persistent, content-addressed response cache.
//!
//! The same transport serves generation and judging: every successful call
//! is cached on disk keyed by (base_url, model, request body), so a warm
//! re-run of any pipeline is fully offline and byte-identical.

mod cache;
mod chat;

pub use cache::{CacheKey, CachedExchange, ResponseCache};
pub use chat::{ChatRequest, ChatResponse, Message};

use lenlift_core::backend::{GenerateError, Generator};
use lenlift_core::datamodel::{BenchmarkEntry, GenerationRecord};
use lenlift_core::judge::{
    parse_preference_strict, render_judge_prompt, validate_judge_template, JudgeError,
    PairwiseJudge, PairwiseResult, Preference,
};
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("HTTP {status}: {body_excerpt}")]
    Http { status: u16, body_excerpt: String },
    #[error("retries exhausted after {attempts} attempts: {last}")]
    RetriesExhausted { attempts: u32, last: String },
    #[error("transport error: {0}")]
    Transport(String),
    #[error("malformed completion response: {0}")]
    BadResponse(String),
    #[error("cache error at {path}: {message}")]
    Cache { path: String, message: String },
}

/// Connection settings for one chat-completions endpoint.
///
/// `base_url` is the full endpoint URL (e.g. ending in
/// `/v1/chat/completions`); `api_key_env` names the environment variable
/// holding the bearer token, or is None for unauthenticated endpoints.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EndpointConfig {
    pub base_url: String,
    pub model_name: String,
    #[serde(default)]
    pub api_key_env: Option<String>,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default = "default_top_p")]
    pub top_p: f64,
    #[serde(default = "default_max_tokens")]
    pub max_tokens: u32,
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: u64,
    #[serde(default = "default_max_retries")]
    pub max_retries: u32,
    /// Base backoff delay; doubles per retry. Mostly a test knob.
    #[serde(default = "default_retry_base_ms")]
    pub retry_base_ms: u64,
}

fn default_temperature() -> f64 {
    0.7
}
fn default_top_p() -> f64 {
    0.9
}
fn default_max_tokens() -> u32 {
    2048
}
fn default_timeout_secs() -> u64 {
    120
}
fn default_max_retries() -> u32 {
    3
}
fn default_retry_base_ms() -> u64 {
    250
}

impl EndpointConfig {
    pub fn new(base_url: impl Into<String>, model_name: impl Into<String>) -> Self {
        EndpointConfig {
            base_url: base_url.into(),
            model_name: model_name.into(),
            api_key_env: None,
            temperature: default_temperature(),
            top_p: default_top_p(),
            max_tokens: default_max_tokens(),
            timeout_secs: default_timeout_secs(),
            max_retries: default_max_retries(),
            retry_base_ms: default_retry_base_ms(),
        }
    }

    pub fn validate(&self) -> Result<(), ClientError> {
        if self.base_url.is_empty() {
            return Err(ClientError::Config("base_url must be non-empty".into()));
        }
        if self.model_name.is_empty() {
            return Err(ClientError::Config("model_name must be non-empty".into()));
        }
        if self.max_retries > 10 {
            return Err(ClientError::Config(format!(
                "max_retries {} above the bound of 10",
                self.max_retries
            )));
        }
        if !(self.top_p > 0.0 && self.top_p <= 1.0) {
            return Err(ClientError::Config("top_p must be in (0, 1]".into()));
        }
        if self.temperature < 0.0 {
            return Err(ClientError::Config("temperature must be >= 0".into()));
        }
        if self.max_tokens == 0 {
            return Err(ClientError::Config("max_tokens must be positive".into()));
        }
        Ok(())
    }

    fn resolve_api_key(&self) -> Result<Option<String>, ClientError> {
        match &self.api_key_env {
            None => Ok(None),
            Some(var) => match std::env::var(var) {
                Ok(value) if !value.is_empty() => Ok(Some(value)),
                _ => Err(ClientError::Config(format!(
                    "API key environment variable {var} is not set"
                ))),
            },
        }
    }
}

/// A configured endpoint plus its response cache.
pub struct HttpClient {
    cfg: EndpointConfig,
    cache: ResponseCache,
    agent: reqwest::blocking::Client,
}

impl HttpClient {
    pub fn new(cfg: EndpointConfig, cache_dir: impl AsRef<Path>) -> Result<Self, ClientError> {
        cfg.validate()?;
        let agent = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(cfg.timeout_secs))
            .build()
            .map_err(|e| ClientError::Transport(e.to_string()))?;
        Ok(HttpClient {
            cfg,
            cache: ResponseCache::new(cache_dir),
            agent,
        })
    }

    pub fn config(&self) -> &EndpointConfig {
        &self.cfg
    }

    pub fn cache(&self) -> &ResponseCache {
        &self.cache
    }

    /// Complete one message exchange, returning the first completion's text.
    ///
    /// Checks the cache first; on a miss, sends the request with retries on
    /// transient failures (timeouts, 429, 5xx) and exponential backoff, and
    /// caches the raw response body before returning.
    pub fn complete(&self, messages: &[Message]) -> Result<String, ClientError> {
        let api_key = self.cfg.resolve_api_key()?;
        let request = ChatRequest {
            model: self.cfg.model_name.clone(),
            messages: messages.to_vec(),
            temperature: self.cfg.temperature,
            top_p: self.cfg.top_p,
            max_tokens: self.cfg.max_tokens,
        };
        let body = serde_json::to_string(&request)
            .map_err(|e| ClientError::BadResponse(e.to_string()))?;
        let key = CacheKey::digest(&self.cfg.base_url, &self.cfg.model_name, &body);

        if let Some(exchange) = self.cache.get(&key)? {
            return extract_completion_text(&exchange.response);
        }

        let raw = self.send_with_retries(&body, api_key.as_deref())?;
        let text = extract_completion_text(&raw)?;
        self.cache.put(
            &key,
            &CachedExchange {
                base_url: self.cfg.base_url.clone(),
                model: self.cfg.model_name.clone(),
                request: serde_json::from_str(&body).expect("request body is valid JSON"),
                response: raw,
            },
        )?;
        Ok(text)
    }

    fn send_with_retries(&self, body: &str, api_key: Option<&str>) -> Result<String, ClientError> {
        let attempts = self.cfg.max_retries + 1;
        let mut last_error = String::new();
        for attempt in 0..attempts {
            if attempt > 0 {
                let delay = self.cfg.retry_base_ms.saturating_mul(1 << (attempt - 1).min(5));
                std::thread::sleep(Duration::from_millis(delay.min(8_000)));
            }
            let mut request = self
                .agent
                .post(&self.cfg.base_url)
                .header("Content-Type", "application/json")
                .body(body.to_string());
            if let Some(key) = api_key {
                request = request.bearer_auth(key);
            }
            match request.send() {
                Ok(response) => {
                    let status = response.status().as_u16();
                    let text = response
                        .text()
                        .map_err(|e| ClientError::Transport(e.to_string()))?;
                    if status == 200 {
                        return Ok(text);
                    }
                    if status == 429 || (500..600).contains(&status) {
                        last_error = format!("HTTP {status}");
                        continue;
                    }
                    return Err(ClientError::Http {
                        status,
                        body_excerpt: excerpt(&text),
                    });
                }
                Err(e) => {
                    last_error = e.to_string();
                    continue;
                }
            }
        }
        Err(ClientError::RetriesExhausted {
            attempts,
            last: last_error,
        })
    }
}

fn excerpt(body: &str) -> String {
    const LIMIT: usize = 300;
    if body.len() <= LIMIT {
        return body.to_string();
    }
    let mut cut = LIMIT;
    while !body.is_char_boundary(cut) {
        cut -= 1;
    }
    format!("{}…", &body[..cut])
}

fn extract_completion_text(raw: &str) -> Result<String, ClientError> {
    let parsed: ChatResponse =
        serde_json::from_str(raw).map_err(|e| ClientError::BadResponse(e.to_string()))?;
    parsed
        .choices
        .into_iter()
        .next()
        .map(|c| c.message.content)
        .ok_or_else(|| ClientError::BadResponse("response has no choices".into()))
}

// ---------------------------------------------------------------------------
// Strategy implementations over the transport.
// ---------------------------------------------------------------------------

/// [`Generator`] that answers prompts through an HTTP endpoint. Its name is
/// the configured model, which becomes the `model_label` on records.
pub struct HttpGenerator {
    client: HttpClient,
}

impl HttpGenerator {
    pub fn new(client: HttpClient) -> Self {
        HttpGenerator { client }
    }
}

impl Generator for HttpGenerator {
    fn name(&self) -> &str {
        &self.client.cfg.model_name
    }

    fn generate(&self, li_prompt: &str) -> Result<String, GenerateError> {
        self.client
            .complete(&[Message::user(li_prompt)])
            .map_err(|e| GenerateError::Failed(e.to_string()))
    }
}

/// Pairwise judge that renders a template and asks an HTTP endpoint.
/// Unparseable replies become ties and are counted in `warnings`.
pub struct HttpJudge {
    client: HttpClient,
    template: String,
    label: String,
    warnings: AtomicUsize,
}

impl HttpJudge {
    pub fn new(client: HttpClient, template: impl Into<String>) -> Result<Self, JudgeError> {
        let template = template.into();
        validate_judge_template(&template)?;
        let label = format!("http:{}", client.cfg.model_name);
        Ok(HttpJudge {
            client,
            template,
            label,
            warnings: AtomicUsize::new(0),
        })
    }

    /// Number of replies that carried no parseable verdict.
    pub fn warning_count(&self) -> usize {
        self.warnings.load(Ordering::SeqCst)
    }
}

impl PairwiseJudge for HttpJudge {
    fn name(&self) -> &str {
        &self.label
    }

    fn compare(
        &self,
        instruction: &str,
        first: &str,
        second: &str,
    ) -> Result<PairwiseResult, JudgeError> {
        let prompt = render_judge_prompt(&self.template, instruction, first, second);
        let raw_reply = self
            .client
            .complete(&[Message::user(&prompt)])
            .map_err(|e| JudgeError::Transport(e.to_string()))?;
        let preferred = match parse_preference_strict(&raw_reply) {
            Some(p) => p,
            None => {
                self.warnings.fetch_add(1, Ordering::SeqCst);
                Preference::Tie
            }
        };
        Ok(PairwiseResult { preferred, raw_reply })
    }
}

/// Run an HTTP-backed model over a benchmark with bounded concurrency.
/// Per-entry failures become explicit failure records; output is ordered
/// by entry id.
pub fn generate_over_benchmark(
    cfg: EndpointConfig,
    cache_dir: impl AsRef<Path>,
    bench: &[BenchmarkEntry],
    concurrency: usize,
) -> Result<Vec<GenerationRecord>, GenerateError> {
    let client =
        HttpClient::new(cfg, cache_dir).map_err(|e| GenerateError::Failed(e.to_string()))?;
    let generator = HttpGenerator::new(client);
    lenlift_core::backend::generate_over_benchmark(&generator, bench, concurrency)
}
