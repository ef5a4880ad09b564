//! JSON bodies of the `/v1` HTTP protocol. Graphs and permutations travel as
//! lowercase hex of their binary encodings.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterRequest {
    pub login: String,
    pub n: usize,
    pub hash_id: String,
    pub g1: String,
    pub g2: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterResponse {
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StartRequest {
    pub login: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StartResponse {
    pub session_id: String,
    pub n: usize,
    pub rounds_total: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitRequest {
    pub h: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitResponse {
    pub b: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RespondRequest {
    pub chi: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RespondResponse {
    RoundPass {
        round_pass: bool,
        /// Rounds verified so far.
        round: usize,
        next: String,
    },
    Verdict {
        verdict: String,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        token: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error_code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub retry_after_ms: Option<u64>,
}

pub mod codes {
    pub const UNKNOWN_OR_FAILED: &str = "unknown_or_failed";
    pub const LOCKED: &str = "locked";
    pub const BAD_STATE: &str = "bad_state";
    pub const MALFORMED: &str = "malformed";
    pub const EXPIRED: &str = "expired";
    pub const CONFLICT: &str = "conflict";
}
