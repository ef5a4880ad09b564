//! Blocking HTTP client for the verifier's `/v1` protocol.

use std::time::Duration;

use gizkp_core::protocol::{CryptoRngCore, RoundProver};
use gizkp_core::{Challenge, Choice};
use gizkp_service::wire::{
    codes, CommitRequest, CommitResponse, ErrorBody, RegisterRequest, RespondRequest,
    RespondResponse, StartRequest, StartResponse,
};
use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("cannot reach server: {0}")]
    Network(String),
    #[error("server refused ({status}): {} {}", .body.error_code, .body.message)]
    Server { status: u16, body: ErrorBody },
    #[error("unexpected reply: {0}")]
    Protocol(String),
}

impl ClientError {
    pub fn code(&self) -> Option<&str> {
        match self {
            ClientError::Server { body, .. } => Some(&body.error_code),
            _ => None,
        }
    }
}

pub struct Client {
    agent: ureq::Agent,
    base: String,
}

impl Client {
    pub fn new(base: &str) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(60)))
            .build()
            .into();
        Self {
            agent,
            base: base.trim_end_matches('/').to_owned(),
        }
    }

    fn post<B: Serialize, T: DeserializeOwned>(&self, path: &str, body: &B) -> Result<(u16, T), ClientError> {
        let url = format!("{}{}", self.base, path);
        let payload = serde_json::to_string(body).expect("request serializes");
        let mut resp = self
            .agent
            .post(&url)
            .header("content-type", "application/json")
            .send(payload)
            .map_err(|e| ClientError::Network(e.to_string()))?;
        let status = resp.status().as_u16();
        let text = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| ClientError::Network(e.to_string()))?;
        if !(200..300).contains(&status) {
            let body = serde_json::from_str(&text)
                .map_err(|_| ClientError::Protocol(format!("HTTP {status}: {text}")))?;
            return Err(ClientError::Server { status, body });
        }
        let v = serde_json::from_str(&text).map_err(|e| ClientError::Protocol(format!("{e}: {text}")))?;
        Ok((status, v))
    }

    pub fn healthz(&self) -> Result<(), ClientError> {
        let url = format!("{}/v1/healthz", self.base);
        let resp = self
            .agent
            .get(&url)
            .call()
            .map_err(|e| ClientError::Network(e.to_string()))?;
        match resp.status().as_u16() {
            200 => Ok(()),
            s => Err(ClientError::Protocol(format!("healthz returned {s}"))),
        }
    }

    /// Returns true when the account was newly created.
    pub fn register(&self, req: &RegisterRequest) -> Result<bool, ClientError> {
        let (status, _): (u16, serde_json::Value) = self.post("/v1/register", req)?;
        Ok(status == 201)
    }

    pub fn start(&self, login: &str) -> Result<StartResponse, ClientError> {
        let req = StartRequest {
            login: login.to_owned(),
        };
        Ok(self.post("/v1/session", &req)?.1)
    }

    pub fn commit(&self, session_id: &str, h_hex: String) -> Result<Challenge, ClientError> {
        let (_, r): (_, CommitResponse) =
            self.post(&format!("/v1/session/{session_id}/commit"), &CommitRequest { h: h_hex })?;
        let b = Choice::from_u8(r.b).map_err(|e| ClientError::Protocol(e.to_string()))?;
        Ok(Challenge { b })
    }

    pub fn respond(&self, session_id: &str, chi_hex: String) -> Result<RespondResponse, ClientError> {
        Ok(self
            .post(&format!("/v1/session/{session_id}/respond"), &RespondRequest { chi: chi_hex })?
            .1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RemoteVerdict {
    Accepted { token: String },
    /// The server rejected the proof in this (1-based) round.
    Rejected { round: usize },
}

/// Plays every round of an already started session with `prover`.
pub fn run_remote_session(
    client: &Client,
    start: &StartResponse,
    prover: &mut dyn RoundProver,
    rng: &mut dyn CryptoRngCore,
    mut on_round: impl FnMut(usize, Choice, bool),
) -> Result<RemoteVerdict, ClientError> {
    let sid = &start.session_id;
    for round in 1..=start.rounds_total {
        let c = prover
            .commit(rng)
            .map_err(|e| ClientError::Protocol(e.to_string()))?;
        let challenge = client.commit(sid, c.to_hex())?;
        let r = prover
            .respond(challenge)
            .map_err(|e| ClientError::Protocol(e.to_string()))?;
        match client.respond(sid, r.chi.to_hex()) {
            Ok(RespondResponse::RoundPass { .. }) => on_round(round, challenge.b, true),
            Ok(RespondResponse::Verdict { verdict, token }) => {
                on_round(round, challenge.b, true);
                return match (verdict.as_str(), token) {
                    ("accepted", Some(token)) => Ok(RemoteVerdict::Accepted { token }),
                    (v, _) => Err(ClientError::Protocol(format!("verdict {v:?} without token"))),
                };
            }
            Err(e) if e.code() == Some(codes::UNKNOWN_OR_FAILED) => {
                on_round(round, challenge.b, false);
                return Ok(RemoteVerdict::Rejected { round });
            }
            Err(e) => return Err(e),
        }
    }
    Err(ClientError::Protocol(
        "server did not issue a verdict after the final round".into(),
    ))
}
