//! Layered configuration: flags > config file > environment > defaults.
//!
//! The config file is a flat JSON object whose keys mirror the long flag
//! names (`model_url`, `judge_model`, `cache_dir`, ...). Environment
//! variables use the `LENLIFT_` prefix with the key upper-cased, e.g.
//! `LENLIFT_MODEL_URL`.

use anyhow::{bail, Context, Result};
use lenlift_client::EndpointConfig;
use serde_json::{Map, Value};
use std::path::{Path, PathBuf};

pub const DEFAULT_CACHE_DIR: &str = ".lenlift-cache";
pub const DEFAULT_CONCURRENCY: usize = 4;

/// Config file contents plus lookup helpers.
pub struct Settings {
    file: Map<String, Value>,
}

impl Settings {
    pub fn load(config_path: Option<&Path>) -> Result<Self> {
        let file = match config_path {
            None => Map::new(),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config file {}", path.display()))?;
                let value: Value = serde_json::from_str(&text)
                    .with_context(|| format!("parsing config file {}", path.display()))?;
                match value {
                    Value::Object(map) => map,
                    _ => bail!("config file {} must hold a JSON object", path.display()),
                }
            }
        };
        Ok(Settings { file })
    }

    fn env_var(key: &str) -> Option<String> {
        std::env::var(format!("LENLIFT_{}", key.to_uppercase())).ok()
    }

    /// flag > config file > environment > default.
    pub fn string(&self, flag: Option<&str>, key: &str) -> Option<String> {
        if let Some(v) = flag {
            return Some(v.to_string());
        }
        if let Some(v) = self.file.get(key) {
            if let Some(s) = v.as_str() {
                return Some(s.to_string());
            }
        }
        Self::env_var(key)
    }

    pub fn f64(&self, flag: Option<f64>, key: &str, default: f64) -> Result<f64> {
        if let Some(v) = flag {
            return Ok(v);
        }
        if let Some(v) = self.file.get(key) {
            return v
                .as_f64()
                .with_context(|| format!("config key {key} must be a number"));
        }
        match Self::env_var(key) {
            Some(s) => s.parse().with_context(|| format!("LENLIFT_{} must be a number", key.to_uppercase())),
            None => Ok(default),
        }
    }

    pub fn u64(&self, flag: Option<u64>, key: &str, default: u64) -> Result<u64> {
        if let Some(v) = flag {
            return Ok(v);
        }
        if let Some(v) = self.file.get(key) {
            return v
                .as_u64()
                .with_context(|| format!("config key {key} must be a non-negative integer"));
        }
        match Self::env_var(key) {
            Some(s) => s.parse().with_context(|| format!("LENLIFT_{} must be an integer", key.to_uppercase())),
            None => Ok(default),
        }
    }

    pub fn cache_dir(&self, flag: Option<&Path>) -> PathBuf {
        match self.string(flag.and_then(Path::to_str), "cache_dir") {
            Some(s) => PathBuf::from(s),
            None => PathBuf::from(DEFAULT_CACHE_DIR),
        }
    }

    pub fn concurrency(&self, flag: Option<usize>) -> Result<usize> {
        let value = self.u64(flag.map(|v| v as u64), "concurrency", DEFAULT_CONCURRENCY as u64)?;
        if value == 0 {
            bail!("concurrency must be at least 1");
        }
        Ok(value as usize)
    }
}

/// Flags shared by every network-touching subcommand.
#[derive(Debug, clap::Args)]
pub struct CommonFlags {
    /// JSON config file mirroring flag names
    #[arg(long, global = false)]
    pub config: Option<PathBuf>,

    /// Response cache directory
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,

    /// Maximum in-flight requests
    #[arg(long)]
    pub concurrency: Option<usize>,
}

/// Endpoint flags for the model under test.
#[derive(Debug, clap::Args)]
pub struct ModelFlags {
    /// Full chat-completions URL of the model under test
    #[arg(long)]
    pub model_url: Option<String>,

    /// Model name sent in the request body (also the record label)
    #[arg(long)]
    pub model_name: Option<String>,

    /// Environment variable holding the API key (omit for unauthenticated)
    #[arg(long)]
    pub api_key_env: Option<String>,

    /// Sampling temperature
    #[arg(long)]
    pub temperature: Option<f64>,

    /// Nucleus sampling mass
    #[arg(long)]
    pub top_p: Option<f64>,

    /// Completion token cap
    #[arg(long)]
    pub max_tokens: Option<u64>,

    /// Per-request timeout in seconds
    #[arg(long)]
    pub timeout_secs: Option<u64>,

    /// Retry budget for transient failures (max 10)
    #[arg(long)]
    pub max_retries: Option<u64>,
}

/// Endpoint flags for the judge model (the judge itself is selected with
/// each subcommand's `--judge` argument).
#[derive(Debug, clap::Args)]
pub struct JudgeFlags {
    /// Full chat-completions URL of the judge
    #[arg(long)]
    pub judge_url: Option<String>,

    /// Judge model name
    #[arg(long)]
    pub judge_model: Option<String>,

    /// Environment variable holding the judge API key
    #[arg(long)]
    pub judge_api_key_env: Option<String>,

    /// File with a replacement judge template ({instruction}, {response_a}, {response_b})
    #[arg(long)]
    pub judge_template_file: Option<PathBuf>,

    /// Judge each pair once instead of in both orders
    #[arg(long)]
    pub single_order: bool,

    /// Tie handling: half_win or drop
    #[arg(long, default_value = "half_win")]
    pub tie_policy: String,
}

pub fn resolve_model_endpoint(
    settings: &Settings,
    flags: &ModelFlags,
) -> Result<Option<EndpointConfig>> {
    let url = settings.string(flags.model_url.as_deref(), "model_url");
    let Some(base_url) = url else {
        return Ok(None);
    };
    let model_name = settings
        .string(flags.model_name.as_deref(), "model_name")
        .unwrap_or_else(|| "model".to_string());
    let mut cfg = EndpointConfig::new(base_url, model_name);
    cfg.api_key_env = settings.string(flags.api_key_env.as_deref(), "api_key_env");
    cfg.temperature = settings.f64(flags.temperature, "temperature", cfg.temperature)?;
    cfg.top_p = settings.f64(flags.top_p, "top_p", cfg.top_p)?;
    cfg.max_tokens = settings.u64(flags.max_tokens, "max_tokens", u64::from(cfg.max_tokens))? as u32;
    cfg.timeout_secs = settings.u64(flags.timeout_secs, "timeout_secs", cfg.timeout_secs)?;
    cfg.max_retries = settings.u64(flags.max_retries, "max_retries", u64::from(cfg.max_retries))? as u32;
    Ok(Some(cfg))
}

pub fn resolve_judge_endpoint(
    settings: &Settings,
    flags: &JudgeFlags,
) -> Result<Option<EndpointConfig>> {
    let url = settings.string(flags.judge_url.as_deref(), "judge_url");
    let Some(base_url) = url else {
        return Ok(None);
    };
    let model_name = settings
        .string(flags.judge_model.as_deref(), "judge_model")
        .unwrap_or_else(|| "judge".to_string());
    let mut cfg = EndpointConfig::new(base_url, model_name);
    cfg.api_key_env = settings.string(flags.judge_api_key_env.as_deref(), "judge_api_key_env");
    // Judges reuse the generic knobs from file/env when present.
    cfg.temperature = settings.f64(None, "judge_temperature", 0.0)?;
    cfg.max_tokens = settings.u64(None, "judge_max_tokens", 64)? as u32;
    cfg.timeout_secs = settings.u64(None, "timeout_secs", cfg.timeout_secs)?;
    cfg.max_retries = settings.u64(None, "max_retries", u64::from(cfg.max_retries))? as u32;
    Ok(Some(cfg))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_beats_file_beats_env_beats_default() {
        let dir = std::env::temp_dir().join(format!("lenlift-settings-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("config.json");
        std::fs::write(&path, r#"{"model_url":"http://from-file","concurrency":7}"#).unwrap();
        let settings = Settings::load(Some(&path)).unwrap();

        assert_eq!(
            settings.string(Some("http://from-flag"), "model_url").as_deref(),
            Some("http://from-flag")
        );
        assert_eq!(
            settings.string(None, "model_url").as_deref(),
            Some("http://from-file")
        );
        assert_eq!(settings.concurrency(None).unwrap(), 7);
        assert_eq!(settings.concurrency(Some(2)).unwrap(), 2);

        let empty = Settings::load(None).unwrap();
        assert_eq!(empty.concurrency(None).unwrap(), DEFAULT_CONCURRENCY);
        std::env::set_var("LENLIFT_JUDGE_MODEL", "env-judge");
        assert_eq!(empty.string(None, "judge_model").as_deref(), Some("env-judge"));
        std::env::remove_var("LENLIFT_JUDGE_MODEL");
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn model_endpoint_requires_url() {
        let settings = Settings::load(None).unwrap();
        let flags = ModelFlags {
            model_url: None,
            model_name: Some("m".into()),
            api_key_env: None,
            temperature: None,
            top_p: None,
            max_tokens: None,
            timeout_secs: None,
            max_retries: None,
        };
        assert!(resolve_model_endpoint(&settings, &flags).unwrap().is_none());

        let with_url = ModelFlags {
            model_url: Some("http://x".into()),
            ..flags
        };
        let cfg = resolve_model_endpoint(&settings, &with_url).unwrap().unwrap();
        assert_eq!(cfg.base_url, "http://x");
        assert_eq!(cfg.model_name, "m");
        assert_eq!(cfg.temperature, 0.7);
    }
}
