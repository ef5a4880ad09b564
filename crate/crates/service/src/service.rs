//! Verifier state: accounts, in-flight sessions, lockouts and issued tokens.
//!
//! All mutable state sits behind one mutex, so every operation is an atomic
//! read-modify-write. Operations return an [`Outcome`] carrying the response
//! delay the HTTP layer must wait out before answering.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use gizkp_core::protocol::{check_commitment, verifier_challenge, verifier_verify};
use gizkp_core::{Challenge, Graph, Permutation, PublicPair, Response, RoundResult};
use rand::Rng;
use thiserror::Error;

use crate::clock::{Clock, SystemClock};
use crate::config::ServiceConfig;
use crate::lockout::{LockoutPolicy, LockoutState};
use crate::store::{AccountRecord, AccountStore, StoreError};
use crate::wire::{codes, ErrorBody, RegisterRequest, RespondResponse, StartResponse};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ServiceError {
    /// Unknown login or failed proof; deliberately indistinguishable.
    #[error("authentication failed")]
    UnknownOrFailed,
    #[error("account locked")]
    Locked { retry_after_ms: u64 },
    #[error("{0}")]
    BadState(&'static str),
    #[error("{0}")]
    Malformed(String),
    #[error("session expired or unknown")]
    Expired,
    #[error("login already registered with different key material")]
    Conflict,
    #[error("storage failure")]
    Storage,
}

impl ServiceError {
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::UnknownOrFailed => codes::UNKNOWN_OR_FAILED,
            ServiceError::Locked { .. } => codes::LOCKED,
            ServiceError::BadState(_) => codes::BAD_STATE,
            ServiceError::Malformed(_) => codes::MALFORMED,
            ServiceError::Expired => codes::EXPIRED,
            ServiceError::Conflict => codes::CONFLICT,
            ServiceError::Storage => "internal",
        }
    }

    pub fn status(&self) -> u16 {
        match self {
            ServiceError::UnknownOrFailed => 401,
            ServiceError::Locked { .. } => 423,
            ServiceError::BadState(_) | ServiceError::Conflict => 409,
            ServiceError::Malformed(_) => 400,
            ServiceError::Expired => 410,
            ServiceError::Storage => 500,
        }
    }

    pub fn body(&self) -> ErrorBody {
        ErrorBody {
            error_code: self.code().into(),
            message: self.to_string(),
            retry_after_ms: match self {
                ServiceError::Locked { retry_after_ms } => Some(*retry_after_ms),
                _ => None,
            },
        }
    }
}

/// Result plus the delay to apply before it is sent.
#[derive(Debug)]
pub struct Outcome<T> {
    pub result: Result<T, ServiceError>,
    pub delay: Duration,
}

impl<T> Outcome<T> {
    fn now(result: Result<T, ServiceError>) -> Self {
        Self {
            result,
            delay: Duration::ZERO,
        }
    }
}

/// Pre-session check such as a CAPTCHA. The default accepts everything.
pub trait PreSessionHook: Send + Sync {
    fn check(&self, login: &str) -> Result<(), ServiceError>;
}

#[derive(Debug, Default)]
pub struct NoCaptcha;

impl PreSessionHook for NoCaptcha {
    fn check(&self, _login: &str) -> Result<(), ServiceError> {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Phase {
    AwaitCommit,
    AwaitResponse { h: Graph, challenge: Challenge },
    Accepted,
    Rejected,
}

impl Phase {
    pub fn is_terminal(&self) -> bool {
        matches!(self, Phase::Accepted | Phase::Rejected)
    }
}

#[derive(Debug, Clone)]
pub struct SessionRecord {
    pub session_id: String,
    pub login: String,
    pub round_index: usize,
    pub rounds_total: usize,
    pub phase: Phase,
    pub expires_at_ms: u64,
    pair: Arc<PublicPair>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenRecord {
    pub login: String,
    pub expires_at_ms: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Registered {
    Created,
    AlreadyPresent,
}

#[derive(Default)]
struct State {
    sessions: HashMap<String, SessionRecord>,
    by_login: HashMap<String, String>,
    lockouts: HashMap<String, LockoutState>,
    tokens: HashMap<String, TokenRecord>,
}

pub struct VerifierService {
    config: ServiceConfig,
    clock: Arc<dyn Clock>,
    hook: Box<dyn PreSessionHook>,
    accounts: Mutex<AccountStore>,
    state: Mutex<State>,
}

impl VerifierService {
    pub fn new(config: ServiceConfig, accounts: AccountStore) -> Self {
        Self::with_clock(config, accounts, Arc::new(SystemClock))
    }

    pub fn with_clock(config: ServiceConfig, accounts: AccountStore, clock: Arc<dyn Clock>) -> Self {
        Self {
            config,
            clock,
            hook: Box::new(NoCaptcha),
            accounts: Mutex::new(accounts),
            state: Mutex::new(State::default()),
        }
    }

    /// Opens the configured account store.
    pub fn open(config: ServiceConfig) -> Result<Self, StoreError> {
        let store = AccountStore::open(&config.account_store)?;
        Ok(Self::new(config, store))
    }

    pub fn with_hook(mut self, hook: Box<dyn PreSessionHook>) -> Self {
        self.hook = hook;
        self
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.config
    }

    pub fn clock(&self) -> &Arc<dyn Clock> {
        &self.clock
    }

    fn policy(&self) -> &LockoutPolicy {
        &self.config.lockout
    }

    pub fn account(&self, login: &str) -> Option<AccountRecord> {
        self.accounts.lock().unwrap().get(login).cloned()
    }

    pub fn register(&self, req: &RegisterRequest) -> Result<Registered, ServiceError> {
        if req.login.is_empty() || req.login.len() > 256 {
            return Err(ServiceError::Malformed("login must be 1..=256 bytes".into()));
        }
        if req.n != self.config.n {
            return Err(ServiceError::Malformed(format!(
                "this service uses n = {}",
                self.config.n
            )));
        }
        if req.hash_id != self.config.hash_id {
            return Err(ServiceError::Malformed(format!(
                "this service uses hash_id {}",
                self.config.hash_id
            )));
        }
        let record = AccountRecord {
            login: req.login.clone(),
            n: req.n,
            hash_id: req.hash_id.clone(),
            g1: req.g1.clone(),
            g2: req.g2.clone(),
            created_at: self.clock.now_ms() / 1000,
        };
        let pair = record.public_pair().map_err(ServiceError::Malformed)?;

        let mut accounts = self.accounts.lock().unwrap();
        if let Some(existing) = accounts.get(&req.login) {
            return if existing.same_material(&record) {
                Ok(Registered::AlreadyPresent)
            } else {
                Err(ServiceError::Conflict)
            };
        }
        if pair.g1 == pair.g2 {
            tracing::warn!(login = %req.login, "registered pair has g1 == g2");
        }
        accounts.insert(record).map_err(|e| {
            tracing::error!(error = %e, "account store write failed");
            ServiceError::Storage
        })?;
        tracing::info!(login = %req.login, n = req.n, "account registered");
        Ok(Registered::Created)
    }

    pub fn start_session(&self, login: &str) -> Outcome<StartResponse> {
        if let Err(e) = self.hook.check(login) {
            return Outcome::now(Err(e));
        }
        let now = self.clock.now_ms();
        let account = self.account(login);
        let mut st = self.state.lock().unwrap();
        self.purge_expired(&mut st, now);

        // A new session voids the old one; an unfinished one counts as failed.
        if let Some(old) = st.by_login.remove(login) {
            if let Some(s) = st.sessions.remove(&old) {
                if !s.phase.is_terminal() {
                    self.fail(&mut st, login, now);
                }
            }
        }

        let lock = st.lockouts.entry(login.to_owned()).or_default();
        if let Some(left) = lock.locked_for(now) {
            return Outcome::now(Err(ServiceError::Locked {
                retry_after_ms: left.as_millis() as u64,
            }));
        }
        let delay = lock.next_delay(self.policy());

        let pair = match account.as_ref().map(AccountRecord::public_pair) {
            Some(Ok(pair)) => Arc::new(pair),
            _ => {
                self.fail(&mut st, login, now);
                return Outcome {
                    result: Err(ServiceError::UnknownOrFailed),
                    delay,
                };
            }
        };
        let session_id = hex::encode(rand::rng().random::<[u8; 16]>());
        let rec = SessionRecord {
            session_id: session_id.clone(),
            login: login.to_owned(),
            round_index: 0,
            rounds_total: self.config.rounds_total,
            phase: Phase::AwaitCommit,
            expires_at_ms: now + self.config.session_ttl_secs * 1000,
            pair: pair.clone(),
        };
        st.by_login.insert(login.to_owned(), session_id.clone());
        st.sessions.insert(session_id.clone(), rec);
        Outcome {
            result: Ok(StartResponse {
                session_id,
                n: pair.n(),
                rounds_total: self.config.rounds_total,
            }),
            delay,
        }
    }

    pub fn submit_commitment(&self, session_id: &str, h_hex: &str) -> Outcome<Challenge> {
        let now = self.clock.now_ms();
        let mut st = self.state.lock().unwrap();
        let session = match self.live_session(&mut st, session_id, now) {
            Ok(s) => s,
            Err(e) => return Outcome::now(Err(e)),
        };
        let login = session.login.clone();
        match session.phase {
            Phase::AwaitCommit => {}
            Phase::AwaitResponse { .. } => {
                session.phase = Phase::Rejected;
                self.fail(&mut st, &login, now);
                return Outcome::now(Err(ServiceError::BadState("commitment already pending")));
            }
            _ => return Outcome::now(Err(ServiceError::BadState("session finished"))),
        }
        let h = Graph::from_hex(h_hex)
            .map_err(|e| e.to_string())
            .and_then(|h| check_commitment(&session.pair, &h).map(|_| h).map_err(|e| e.to_string()));
        match h {
            Ok(h) => {
                let challenge = verifier_challenge(&mut rand::rng());
                session.phase = Phase::AwaitResponse { h, challenge };
                Outcome::now(Ok(challenge))
            }
            Err(reason) => {
                session.phase = Phase::Rejected;
                self.fail(&mut st, &login, now);
                Outcome::now(Err(ServiceError::Malformed(format!("commitment: {reason}"))))
            }
        }
    }

    pub fn submit_response(&self, session_id: &str, chi_hex: &str) -> Outcome<RespondResponse> {
        let now = self.clock.now_ms();
        let mut st = self.state.lock().unwrap();
        let session = match self.live_session(&mut st, session_id, now) {
            Ok(s) => s,
            Err(e) => return Outcome::now(Err(e)),
        };
        let login = session.login.clone();
        let (h, challenge) = match std::mem::replace(&mut session.phase, Phase::Rejected) {
            Phase::AwaitResponse { h, challenge } => (h, challenge),
            Phase::AwaitCommit => {
                self.fail(&mut st, &login, now);
                return Outcome::now(Err(ServiceError::BadState("no commitment pending")));
            }
            done => {
                session.phase = done;
                return Outcome::now(Err(ServiceError::BadState("session finished")));
            }
        };
        let chi = match Permutation::from_hex(chi_hex) {
            Ok(chi) => chi,
            Err(e) => {
                self.fail(&mut st, &login, now);
                return Outcome::now(Err(ServiceError::Malformed(format!("response: {e}"))));
            }
        };
        match verifier_verify(&session.pair, &h, challenge, &Response { chi }) {
            RoundResult::Accept => {
                session.round_index += 1;
                if session.round_index < session.rounds_total {
                    session.phase = Phase::AwaitCommit;
                    return Outcome::now(Ok(RespondResponse::RoundPass {
                        round_pass: true,
                        round: session.round_index,
                        next: "await_commit".into(),
                    }));
                }
                session.phase = Phase::Accepted;
                let token = hex::encode(rand::rng().random::<[u8; 16]>());
                st.tokens.insert(
                    token.clone(),
                    TokenRecord {
                        login: login.clone(),
                        expires_at_ms: now + self.config.token_ttl_secs * 1000,
                    },
                );
                st.lockouts.entry(login.clone()).or_default().reset();
                tracing::info!(login = %login, "login accepted");
                Outcome::now(Ok(RespondResponse::Verdict {
                    verdict: "accepted".into(),
                    token: Some(token),
                }))
            }
            RoundResult::Reject => {
                let delay = st
                    .lockouts
                    .get(&login)
                    .map(|l| l.next_delay(self.policy()))
                    .unwrap_or_else(|| self.policy().delay_for(0));
                self.fail(&mut st, &login, now);
                Outcome {
                    result: Err(ServiceError::UnknownOrFailed),
                    delay,
                }
            }
            RoundResult::ProtocolError(e) => {
                self.fail(&mut st, &login, now);
                Outcome::now(Err(ServiceError::Malformed(format!("response: {e}"))))
            }
        }
    }

    /// Login bound to a live token.
    pub fn validate_token(&self, token: &str) -> Option<String> {
        let now = self.clock.now_ms();
        let st = self.state.lock().unwrap();
        st.tokens
            .get(token)
            .filter(|t| t.expires_at_ms > now)
            .map(|t| t.login.clone())
    }

    pub fn lockout_state(&self, login: &str) -> LockoutState {
        self.state
            .lock()
            .unwrap()
            .lockouts
            .get(login)
            .cloned()
            .unwrap_or_default()
    }

    pub fn session(&self, session_id: &str) -> Option<SessionRecord> {
        self.state.lock().unwrap().sessions.get(session_id).cloned()
    }

    fn live_session<'s>(
        &self,
        st: &'s mut State,
        session_id: &str,
        now: u64,
    ) -> Result<&'s mut SessionRecord, ServiceError> {
        let expired = match st.sessions.get(session_id) {
            None => return Err(ServiceError::Expired),
            Some(s) => s.expires_at_ms <= now,
        };
        if expired {
            let s = st.sessions.remove(session_id).expect("present");
            if st.by_login.get(&s.login).map(String::as_str) == Some(session_id) {
                st.by_login.remove(&s.login);
            }
            if !s.phase.is_terminal() {
                self.fail(st, &s.login, now);
            }
            return Err(ServiceError::Expired);
        }
        Ok(st.sessions.get_mut(session_id).expect("present"))
    }

    /// Drops expired sessions and tokens. Abandoned sessions count as failures.
    fn purge_expired(&self, st: &mut State, now: u64) {
        let expired: Vec<String> = st
            .sessions
            .iter()
            .filter(|(_, s)| s.expires_at_ms <= now)
            .map(|(id, _)| id.clone())
            .collect();
        for id in expired {
            let s = st.sessions.remove(&id).expect("present");
            if st.by_login.get(&s.login) == Some(&id) {
                st.by_login.remove(&s.login);
            }
            if !s.phase.is_terminal() {
                self.fail(st, &s.login, now);
            }
        }
        st.tokens.retain(|_, t| t.expires_at_ms > now);
    }

    fn fail(&self, st: &mut State, login: &str, now: u64) {
        let lock = st.lockouts.entry(login.to_owned()).or_default();
        lock.record_failure(now, self.policy());
        tracing::info!(
            login = %login,
            failures = lock.consecutive_failures,
            locked = lock.locked_until_ms.is_some(),
            "authentication failure"
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::MockClock;
    use gizkp_core::protocol::prover_commit;
    use gizkp_core::{HashId, IdentityMaterial, Seed};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn identity() -> IdentityMaterial {
        IdentityMaterial::from_seeds(
            &Seed::from_bytes([1; 32], HashId::Sha256),
            &Seed::from_bytes([2; 32], HashId::Sha256),
            8,
        )
        .unwrap()
    }

    fn service(rounds: usize) -> (VerifierService, MockClock, IdentityMaterial) {
        let clock = MockClock::new(1_000_000);
        let cfg = ServiceConfig {
            n: 8,
            rounds_total: rounds,
            ..Default::default()
        };
        let svc = VerifierService::with_clock(cfg, AccountStore::in_memory(), Arc::new(clock.clone()));
        let id = identity();
        svc.register(&RegisterRequest {
            login: "alice".into(),
            n: 8,
            hash_id: "sha256".into(),
            g1: id.public().g1.to_hex(),
            g2: id.public().g2.to_hex(),
        })
        .unwrap();
        (svc, clock, id)
    }

    #[test]
    fn register_idempotent_and_conflict() {
        let (svc, _, id) = service(2);
        let mut req = RegisterRequest {
            login: "alice".into(),
            n: 8,
            hash_id: "sha256".into(),
            g1: id.public().g1.to_hex(),
            g2: id.public().g2.to_hex(),
        };
        assert_eq!(svc.register(&req), Ok(Registered::AlreadyPresent));
        req.g2 = id.public().g1.to_hex();
        assert_eq!(svc.register(&req), Err(ServiceError::Conflict));
        req.login = "bob".into();
        req.g1 = "zz".into();
        assert!(matches!(svc.register(&req), Err(ServiceError::Malformed(_))));
        req.g1 = Graph::empty(9).unwrap().to_hex();
        assert!(matches!(svc.register(&req), Err(ServiceError::Malformed(_))));
    }

    #[test]
    fn honest_session_gets_token() {
        let (svc, _, id) = service(3);
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let start = svc.start_session("alice").result.unwrap();
        assert_eq!(start.rounds_total, 3);
        for i in 0..3 {
            let (round, c) = prover_commit(&id, &mut rng);
            let ch = svc.submit_commitment(&start.session_id, &c.to_hex()).result.unwrap();
            let r = round.respond(ch);
            let out = svc.submit_response(&start.session_id, &r.chi.to_hex()).result.unwrap();
            match out {
                RespondResponse::RoundPass { round, .. } => assert_eq!(round, i + 1),
                RespondResponse::Verdict { verdict, token } => {
                    assert_eq!(i, 2);
                    assert_eq!(verdict, "accepted");
                    assert_eq!(svc.validate_token(&token.unwrap()).as_deref(), Some("alice"));
                }
            }
        }
        assert_eq!(svc.session(&start.session_id).unwrap().phase, Phase::Accepted);
    }

    #[test]
    fn double_commit_rejects_session() {
        let (svc, _, id) = service(2);
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let s = svc.start_session("alice").result.unwrap();
        let (_, c) = prover_commit(&id, &mut rng);
        svc.submit_commitment(&s.session_id, &c.to_hex()).result.unwrap();
        assert!(matches!(
            svc.submit_commitment(&s.session_id, &c.to_hex()).result,
            Err(ServiceError::BadState(_))
        ));
        assert_eq!(svc.session(&s.session_id).unwrap().phase, Phase::Rejected);
        assert_eq!(svc.lockout_state("alice").consecutive_failures, 1);
    }

    #[test]
    fn wrong_size_commitment_counts_as_failure() {
        let (svc, _, _) = service(2);
        let s = svc.start_session("alice").result.unwrap();
        let bad = Graph::empty(9).unwrap().to_hex();
        assert!(matches!(
            svc.submit_commitment(&s.session_id, &bad).result,
            Err(ServiceError::Malformed(_))
        ));
        assert_eq!(svc.lockout_state("alice").consecutive_failures, 1);
    }

    #[test]
    fn failing_round_aborts() {
        let (svc, _, id) = service(10);
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let s = svc.start_session("alice").result.unwrap();
        for _ in 0..2 {
            let (round, c) = prover_commit(&id, &mut rng);
            let ch = svc.submit_commitment(&s.session_id, &c.to_hex()).result.unwrap();
            let r = round.respond(ch);
            svc.submit_response(&s.session_id, &r.chi.to_hex()).result.unwrap();
        }
        // third round: answer for the other challenge
        let (round, c) = prover_commit(&id, &mut rng);
        let ch = svc.submit_commitment(&s.session_id, &c.to_hex()).result.unwrap();
        let r = round.respond(Challenge { b: ch.b.other() });
        let out = svc.submit_response(&s.session_id, &r.chi.to_hex());
        assert_eq!(out.result, Err(ServiceError::UnknownOrFailed));
        assert_eq!(out.delay, Duration::from_millis(100));
        let rec = svc.session(&s.session_id).unwrap();
        assert_eq!(rec.round_index, 2);
        assert_eq!(rec.phase, Phase::Rejected);
        assert!(matches!(
            svc.submit_commitment(&s.session_id, &c.to_hex()).result,
            Err(ServiceError::BadState(_))
        ));
    }

    #[test]
    fn expiry() {
        let (svc, clock, id) = service(2);
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let s = svc.start_session("alice").result.unwrap();
        clock.advance(Duration::from_secs(121));
        let (_, c) = prover_commit(&id, &mut rng);
        assert_eq!(
            svc.submit_commitment(&s.session_id, &c.to_hex()).result,
            Err(ServiceError::Expired)
        );
        assert_eq!(
            svc.submit_commitment(&s.session_id, &c.to_hex()).result,
            Err(ServiceError::Expired)
        );
        assert_eq!(svc.lockout_state("alice").consecutive_failures, 1);
        assert_eq!(svc.submit_response("nope", "00").result.unwrap_err(), ServiceError::Expired);
    }

    #[test]
    fn new_session_voids_old() {
        let (svc, _, id) = service(2);
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let old = svc.start_session("alice").result.unwrap();
        let new = svc.start_session("alice").result.unwrap();
        assert_ne!(old.session_id, new.session_id);
        let (_, c) = prover_commit(&id, &mut rng);
        assert_eq!(
            svc.submit_commitment(&old.session_id, &c.to_hex()).result,
            Err(ServiceError::Expired)
        );
        assert_eq!(svc.lockout_state("alice").consecutive_failures, 1);
    }

    #[test]
    fn unknown_login_delayed_and_counted() {
        let (svc, _, _) = service(2);
        let out = svc.start_session("mallory");
        assert_eq!(out.result.unwrap_err(), ServiceError::UnknownOrFailed);
        assert_eq!(out.delay, Duration::from_millis(100));
        assert_eq!(svc.start_session("mallory").delay, Duration::from_millis(200));
    }

    #[test]
    fn error_bodies() {
        let b = ServiceError::Locked { retry_after_ms: 5 }.body();
        assert_eq!(b.error_code, "locked");
        assert_eq!(b.retry_after_ms, Some(5));
        assert_eq!(ServiceError::UnknownOrFailed.body().retry_after_ms, None);
        assert_eq!(ServiceError::Expired.status(), 410);
    }

    struct DenyAll;
    impl PreSessionHook for DenyAll {
        fn check(&self, _login: &str) -> Result<(), ServiceError> {
            Err(ServiceError::BadState("captcha required"))
        }
    }

    #[test]
    fn pre_session_hook_runs_first() {
        let (svc, _, _) = service(2);
        let svc = svc.with_hook(Box::new(DenyAll));
        assert_eq!(
            svc.start_session("alice").result.unwrap_err(),
            ServiceError::BadState("captcha required")
        );
    }
}
