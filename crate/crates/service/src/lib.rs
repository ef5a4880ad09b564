//! Network verifier for graph-isomorphism logins.
//!
//! Accounts hold only the public graph pair. A login is a session of
//! commit/challenge/response rounds driven over JSON/HTTP; the first failed
//! round rejects the session. Failed sessions feed an exponential delay and a
//! temporary lock per login.

pub mod clock;
pub mod config;
pub mod http;
pub mod lockout;
pub mod service;
pub mod store;
pub mod wire;

pub use clock::{Clock, MockClock, SystemClock};
pub use config::ServiceConfig;
pub use lockout::{LockoutPolicy, LockoutState};
pub use service::{Outcome, Phase, PreSessionHook, ServiceError, VerifierService};
pub use store::{audit_isomorphism, AccountRecord, AccountStore, Audit, StoreError};
