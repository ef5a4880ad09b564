//! Service configuration from a TOML file, overridable by `GIZKP_*`
//! environment variables.

use std::path::{Path, PathBuf};

use gizkp_core::HashId;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lockout::LockoutPolicy;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parsing {path}: {source}")]
    Parse {
        path: PathBuf,
        source: toml::de::Error,
    },
    #[error("environment variable {var}: {reason}")]
    Env { var: &'static str, reason: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub bind: String,
    pub port: u16,
    /// Rounds per login, fixed server-side.
    pub rounds_total: usize,
    /// Graph size every registration must use.
    pub n: usize,
    pub hash_id: String,
    pub account_store: PathBuf,
    pub session_ttl_secs: u64,
    pub token_ttl_secs: u64,
    /// Directory of static browser-client assets served under `/app`.
    pub app_dir: Option<PathBuf>,
    pub lockout: LockoutPolicy,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            bind: "127.0.0.1".into(),
            port: 8080,
            rounds_total: gizkp_core::protocol::DEFAULT_ROUNDS,
            n: gizkp_core::kdf::DEFAULT_GRAPH_SIZE,
            hash_id: HashId::default().as_str().into(),
            account_store: PathBuf::from("accounts.jsonl"),
            session_ttl_secs: 120,
            token_ttl_secs: 3600,
            app_dir: None,
            lockout: LockoutPolicy::default(),
        }
    }
}

impl ServiceConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_owned(),
            source,
        })?;
        toml::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.to_owned(),
            source,
        })
    }

    /// File (if any), then environment, then validation.
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        let mut cfg = match path {
            Some(p) => Self::from_file(p)?,
            None => Self::default(),
        };
        cfg.apply_env(|k| std::env::var(k).ok())?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply_env(&mut self, get: impl Fn(&str) -> Option<String>) -> Result<(), ConfigError> {
        fn parse<T: std::str::FromStr>(var: &'static str, v: String) -> Result<T, ConfigError>
        where
            T::Err: std::fmt::Display,
        {
            v.parse().map_err(|e: T::Err| ConfigError::Env {
                var,
                reason: e.to_string(),
            })
        }
        macro_rules! env {
            ($var:literal => $field:expr) => {
                if let Some(v) = get($var) {
                    $field = parse($var, v)?;
                }
            };
        }
        env!("GIZKP_BIND" => self.bind);
        env!("GIZKP_PORT" => self.port);
        env!("GIZKP_ROUNDS" => self.rounds_total);
        env!("GIZKP_N" => self.n);
        env!("GIZKP_HASH_ID" => self.hash_id);
        env!("GIZKP_ACCOUNT_STORE" => self.account_store);
        env!("GIZKP_SESSION_TTL_SECS" => self.session_ttl_secs);
        env!("GIZKP_TOKEN_TTL_SECS" => self.token_ttl_secs);
        env!("GIZKP_LOCKOUT_BASE_DELAY_MS" => self.lockout.base_delay_ms);
        env!("GIZKP_LOCKOUT_MAX_DELAY_MS" => self.lockout.max_delay_ms);
        env!("GIZKP_LOCKOUT_THRESHOLD" => self.lockout.lock_threshold);
        env!("GIZKP_LOCKOUT_DURATION_SECS" => self.lockout.lock_duration_secs);
        if let Some(v) = get("GIZKP_APP_DIR") {
            self.app_dir = Some(v.into());
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if !(1..=gizkp_core::protocol::MAX_ROUNDS).contains(&self.rounds_total) {
            return bad(format!("rounds_total {} outside 1..=64", self.rounds_total));
        }
        if !(1..=gizkp_core::kdf::MAX_GRAPH_SIZE).contains(&self.n) {
            return bad(format!("n {} outside 1..=1024", self.n));
        }
        if self.hash_id.parse::<HashId>().is_err() {
            return bad(format!("unknown hash_id {:?}", self.hash_id));
        }
        if self.session_ttl_secs == 0 || self.token_ttl_secs == 0 {
            return bad("ttls must be positive".into());
        }
        Ok(())
    }
}
