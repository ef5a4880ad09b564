//! Zero-knowledge password authentication built on graph isomorphism.
//!
//! A login and password deterministically yield a secret vertex permutation
//! `pi` and a public pair of graphs `(g1, g2 = pi(g1))`. The prover convinces
//! a verifier that it knows `pi` through repeated commit/challenge/response
//! rounds without revealing it.

pub mod error;
pub mod graph;
pub mod isomorphism;
pub mod kdf;
pub mod permutation;
pub mod protocol;
pub mod stats;

pub use error::{DecodeError, GraphError, KdfError, ProtocolError};
pub use graph::{apply_permutation, graphs_equal, Graph};
pub use isomorphism::{brute_force_isomorphism, OracleError};
pub use kdf::{
    derive_identity, derive_seed, Credentials, HashId, IdentityMaterial, KdfParams, PublicPair,
    Seed,
};
pub use permutation::{compose, invert, Permutation};
pub use protocol::{
    run_session, simulate_transcript, verifier_verify, Challenge, CheatingProver, Choice,
    Commitment, HonestProver, Response, RoundResult, Transcript, Verdict, Verifier,
};

/// Lowercase hex decoding used by every wire type.
pub fn decode_hex(s: &str) -> Result<Vec<u8>, DecodeError> {
    if s.bytes().any(|c| c.is_ascii_uppercase()) {
        return Err(DecodeError::Hex("uppercase digits".into()));
    }
    hex::decode(s).map_err(|e| DecodeError::Hex(e.to_string()))
}
