//! Content-addressed directory of cached exchanges, human-inspectable.
//!
//! Layout: `<cache_dir>/<first 2 hex of digest>/<digest>.json`. Writers go
//! through a temp file plus rename so concurrent writers never interleave
//! bytes; equal requests always map to the same file.

use crate::ClientError;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

static TEMP_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Digest of (base_url, model, full request body); equal requests collide
/// by design, which is what makes replays offline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheKey {
    pub digest: String,
}

impl CacheKey {
    pub fn digest(base_url: &str, model: &str, request_body: &str) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(base_url.as_bytes());
        hasher.update(b"\n");
        hasher.update(model.as_bytes());
        hasher.update(b"\n");
        hasher.update(request_body.as_bytes());
        CacheKey {
            digest: hex::encode(hasher.finalize()),
        }
    }
}

/// What gets persisted per call: enough to audit and to replay.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CachedExchange {
    pub base_url: String,
    pub model: String,
    pub request: serde_json::Value,
    /// Raw response body as received, byte-preserved.
    pub response: String,
}

pub struct ResponseCache {
    dir: PathBuf,
}

impl ResponseCache {
    pub fn new(dir: impl AsRef<Path>) -> Self {
        ResponseCache {
            dir: dir.as_ref().to_path_buf(),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: &CacheKey) -> PathBuf {
        self.dir
            .join(&key.digest[..2])
            .join(format!("{}.json", key.digest))
    }

    pub fn get(&self, key: &CacheKey) -> Result<Option<CachedExchange>, ClientError> {
        let path = self.path_for(key);
        let bytes = match std::fs::read(&path) {
            Ok(bytes) => bytes,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => {
                return Err(ClientError::Cache {
                    path: path.display().to_string(),
                    message: e.to_string(),
                })
            }
        };
        let exchange = serde_json::from_slice(&bytes).map_err(|e| ClientError::Cache {
            path: path.display().to_string(),
            message: format!("corrupt cache file: {e}"),
        })?;
        Ok(Some(exchange))
    }

    pub fn put(&self, key: &CacheKey, exchange: &CachedExchange) -> Result<(), ClientError> {
        let path = self.path_for(key);
        let parent = path.parent().expect("cache paths have parents");
        let wrap = |e: std::io::Error| ClientError::Cache {
            path: path.display().to_string(),
            message: e.to_string(),
        };
        std::fs::create_dir_all(parent).map_err(wrap)?;
        let bytes = serde_json::to_vec_pretty(exchange).expect("exchange serializes");
        let temp = parent.join(format!(
            ".tmp-{}-{}",
            std::process::id(),
            TEMP_COUNTER.fetch_add(1, Ordering::SeqCst)
        ));
        std::fs::write(&temp, &bytes).map_err(wrap)?;
        std::fs::rename(&temp, &path).map_err(wrap)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_requests_equal_keys() {
        let a = CacheKey::digest("http://x", "m", r#"{"q":1}"#);
        let b = CacheKey::digest("http://x", "m", r#"{"q":1}"#);
        assert_eq!(a, b);
        assert_ne!(a, CacheKey::digest("http://y", "m", r#"{"q":1}"#));
        assert_ne!(a, CacheKey::digest("http://x", "m2", r#"{"q":1}"#));
        assert_ne!(a, CacheKey::digest("http://x", "m", r#"{"q":2}"#));
    }

    #[test]
    fn round_trip_through_layout() {
        let dir = std::env::temp_dir().join(format!("lenlift-cache-{}", std::process::id()));
        let cache = ResponseCache::new(&dir);
        let key = CacheKey::digest("http://x", "m", "body");
        assert!(cache.get(&key).unwrap().is_none());
        let exchange = CachedExchange {
            base_url: "http://x".into(),
            model: "m".into(),
            request: serde_json::json!({"body": true}),
            response: r#"{"choices":[]}"#.into(),
        };
        cache.put(&key, &exchange).unwrap();
        let path = cache.path_for(&key);
        assert!(path.starts_with(dir.join(&key.digest[..2])));
        assert!(path.exists());
        let loaded = cache.get(&key).unwrap().unwrap();
        assert_eq!(loaded.response, exchange.response);
        std::fs::remove_dir_all(&dir).ok();
    }
}
