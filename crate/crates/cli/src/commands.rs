//! Command implementations shared by the binary and the tests.

use gizkp_core::kdf::{derive_seed, stream_bytes, GRAPH_DOMAIN};
use gizkp_core::protocol::CryptoRngCore;
use gizkp_core::{derive_identity, Credentials, HashId, HonestProver, KdfError, KdfParams};
use gizkp_service::wire::{codes, RegisterRequest};
use serde::Serialize;
use thiserror::Error;

use crate::client::{run_remote_session, Client, ClientError, RemoteVerdict};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const REJECTED: i32 = 1;
    pub const CONFLICT: i32 = 2;
    pub const NETWORK: i32 = 3;
    pub const LOCKED: i32 = 4;
    pub const REFUSED: i32 = 5;
    pub const OTHER: i32 = 6;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("authentication failed")]
    Rejected,
    #[error("login is already registered with different key material")]
    Conflict,
    #[error("{0}")]
    Network(String),
    #[error("account is locked; retry in {retry_after_ms} ms")]
    Locked { retry_after_ms: u64 },
    #[error("{0}")]
    Refused(String),
    #[error(transparent)]
    Kdf(#[from] KdfError),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Rejected => exit::REJECTED,
            CliError::Conflict => exit::CONFLICT,
            CliError::Network(_) => exit::NETWORK,
            CliError::Locked { .. } => exit::LOCKED,
            CliError::Refused(_) => exit::REFUSED,
            CliError::Kdf(_) | CliError::Other(_) => exit::OTHER,
        }
    }
}

impl From<ClientError> for CliError {
    fn from(e: ClientError) -> Self {
        match &e {
            ClientError::Network(_) => CliError::Network(e.to_string()),
            ClientError::Server { body, .. } => match body.error_code.as_str() {
                codes::UNKNOWN_OR_FAILED => CliError::Rejected,
                codes::CONFLICT => CliError::Conflict,
                codes::LOCKED => CliError::Locked {
                    retry_after_ms: body.retry_after_ms.unwrap_or(0),
                },
                _ => CliError::Other(e.to_string()),
            },
            ClientError::Protocol(_) => CliError::Other(e.to_string()),
        }
    }
}

pub const PASSWORD_ENV: &str = "GIZKP_PASSWORD";

/// `GIZKP_PASSWORD` if set, otherwise an interactive prompt without echo.
pub fn read_password() -> Result<String, CliError> {
    if let Ok(p) = std::env::var(PASSWORD_ENV) {
        return Ok(p);
    }
    rpassword::prompt_password("password: ").map_err(|e| CliError::Other(format!("reading password: {e}")))
}

/// Derives the public pair locally and uploads it. Returns true when the
/// account was created, false when it already existed with the same pair.
pub fn register(client: &Client, creds: &Credentials, params: &KdfParams) -> Result<bool, CliError> {
    let id = derive_identity(creds, params)?;
    let req = RegisterRequest {
        login: creds.login().to_owned(),
        n: params.n(),
        hash_id: params.hash().as_str().into(),
        g1: id.public().g1.to_hex(),
        g2: id.public().g2.to_hex(),
    };
    Ok(client.register(&req)?)
}

/// Runs a full login and returns the session token.
pub fn login(
    client: &Client,
    creds: &Credentials,
    hash: HashId,
    rng: &mut dyn CryptoRngCore,
    on_round: impl FnMut(usize, gizkp_core::Choice, bool),
) -> Result<String, CliError> {
    let start = client.start(creds.login())?;
    let params = KdfParams::new(start.n, hash)?;
    let id = derive_identity(creds, &params)?;
    let mut prover = HonestProver::new(&id);
    match run_remote_session(client, &start, &mut prover, rng, on_round)? {
        RemoteVerdict::Accepted { token } => Ok(token),
        RemoteVerdict::Rejected { .. } => Err(CliError::Rejected),
    }
}

/// Offline key material, including the secret permutation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeriveOutput {
    pub version: String,
    pub login: String,
    pub hash_id: String,
    pub n: usize,
    pub g1: String,
    pub g2: String,
    pub pi: String,
    /// First 64 bytes of the graph-domain stream, for cross-implementation checks.
    pub stream_graph_64: String,
}

pub fn derive(creds: &Credentials, params: &KdfParams) -> Result<DeriveOutput, CliError> {
    let id = derive_identity(creds, params)?;
    let graph_seed = derive_seed(creds, GRAPH_DOMAIN, params);
    Ok(DeriveOutput {
        version: params.version_tag().to_owned(),
        login: creds.login().to_owned(),
        hash_id: params.hash().as_str().into(),
        n: params.n(),
        g1: id.public().g1.to_hex(),
        g2: id.public().g2.to_hex(),
        pi: id.secret().to_hex(),
        stream_graph_64: hex_lower(&stream_bytes(&graph_seed, 64)),
    })
}

/// The secret may only go to a terminal when explicitly requested.
pub fn check_secret_output(stdout_is_tty: bool, insecure_show_secret: bool) -> Result<(), CliError> {
    if stdout_is_tty && !insecure_show_secret {
        return Err(CliError::Refused(
            "refusing to print the secret permutation to a terminal; \
             redirect the output or pass --insecure-show-secret"
                .into(),
        ));
    }
    Ok(())
}

fn hex_lower(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
