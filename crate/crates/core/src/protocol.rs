//! The interactive round protocol.
//!
//! One round: the prover picks `a` and a fresh `epsilon`, commits to
//! `H = epsilon(G_a)`; the verifier answers with a uniform challenge `b`; the
//! prover returns `chi` with `chi(H) = G_b`; the verifier checks that equality
//! label-wise. Composition is left to right ([`Permutation::then`]), so the
//! three response cases read
//!
//! * `a == b`: `chi = epsilon⁻¹`
//! * `(1, 2)`: `chi = epsilon⁻¹` then `pi`
//! * `(2, 1)`: `chi = epsilon⁻¹` then `pi⁻¹`
//!
//! Round randomness always comes from the caller's CSPRNG, never from the
//! credential stream.

use rand::{CryptoRng, Rng};

use crate::error::ProtocolError;
use crate::graph::Graph;
use crate::kdf::{IdentityMaterial, PublicPair};
use crate::permutation::Permutation;

pub const DEFAULT_ROUNDS: usize = 10;
pub const MAX_ROUNDS: usize = 64;

/// Which public graph: `G₁` or `G₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Choice {
    One,
    Two,
}

impl Choice {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        if rng.random::<bool>() {
            Choice::Two
        } else {
            Choice::One
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            Choice::One => 1,
            Choice::Two => 2,
        }
    }

    pub fn from_u8(v: u8) -> Result<Self, ProtocolError> {
        match v {
            1 => Ok(Choice::One),
            2 => Ok(Choice::Two),
            other => Err(ProtocolError::BadChallenge(other)),
        }
    }

    pub fn other(self) -> Self {
        match self {
            Choice::One => Choice::Two,
            Choice::Two => Choice::One,
        }
    }
}

/// The committed graph `H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Commitment {
    pub h: Graph,
}

impl Commitment {
    pub fn to_hex(&self) -> String {
        self.h.to_hex()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Challenge {
    pub b: Choice,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Response {
    pub chi: Permutation,
}

/// Response construction used by the honest prover. Swappable so the
/// self-test can demonstrate that a wrong composition order is caught.
pub type Composer = fn(&Permutation, &Permutation) -> Permutation;

/// Left-to-right composition: apply the first argument, then the second.
pub fn left_to_right(first: &Permutation, second: &Permutation) -> Permutation {
    first.then(second).expect("sizes checked at commit")
}

/// Prover state between commitment and response. Consumed by `respond`.
pub struct ProverRound<'id> {
    identity: &'id IdentityMaterial,
    a: Choice,
    epsilon: Permutation,
    h: Graph,
}

impl<'id> ProverRound<'id> {
    pub fn a(&self) -> Choice {
        self.a
    }

    pub fn commitment(&self) -> Commitment {
        Commitment { h: self.h.clone() }
    }

    pub fn respond(self, c: Challenge) -> Response {
        self.respond_with(c, left_to_right)
    }

    pub fn respond_with(self, c: Challenge, compose: Composer) -> Response {
        let eps_inv = self.epsilon.inverse();
        let pi = self.identity.secret();
        let chi = match (self.a, c.b) {
            (a, b) if a == b => eps_inv,
            (Choice::One, Choice::Two) => compose(&eps_inv, pi),
            (Choice::Two, Choice::One) => compose(&eps_inv, &pi.inverse()),
            _ => unreachable!(),
        };
        Response { chi }
    }
}

/// Steps 2 to 4: choose `a` and `epsilon`, commit to `H = epsilon(G_a)`.
pub fn prover_commit<'id, R: CryptoRng + ?Sized>(
    identity: &'id IdentityMaterial,
    rng: &mut R,
) -> (ProverRound<'id>, Commitment) {
    let a = Choice::random(rng);
    let epsilon = Permutation::random(identity.n(), rng);
    commit_with(identity, a, epsilon).expect("epsilon has the identity's size")
}

/// Commit with explicit `a` and `epsilon`.
pub fn commit_with(
    identity: &IdentityMaterial,
    a: Choice,
    epsilon: Permutation,
) -> Result<(ProverRound<'_>, Commitment), ProtocolError> {
    let h = identity.public().get(a).permuted(&epsilon)?;
    let round = ProverRound {
        identity,
        a,
        epsilon,
        h,
    };
    let c = round.commitment();
    Ok((round, c))
}

/// Checks that a commitment is a well-formed graph of the account's size.
pub fn check_commitment(pair: &PublicPair, h: &Graph) -> Result<(), ProtocolError> {
    if h.order() != pair.n() {
        return Err(ProtocolError::CommitmentSize {
            expected: pair.n(),
            found: h.order(),
        });
    }
    Ok(())
}

pub fn verifier_challenge<R: CryptoRng + ?Sized>(rng: &mut R) -> Challenge {
    Challenge { b: Choice::random(rng) }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RoundResult {
    Accept,
    /// Well-formed response that does not map `H` onto `G_b`.
    Reject,
    /// Malformed input; distinct from an honest mismatch.
    ProtocolError(ProtocolError),
}

impl RoundResult {
    pub fn accepted(&self) -> bool {
        matches!(self, RoundResult::Accept)
    }
}

/// Step 9: accept iff `chi(H) == G_b` label-wise.
pub fn verifier_verify(pair: &PublicPair, h: &Graph, c: Challenge, r: &Response) -> RoundResult {
    if let Err(e) = check_commitment(pair, h) {
        return RoundResult::ProtocolError(e);
    }
    if r.chi.len() != pair.n() {
        return RoundResult::ProtocolError(ProtocolError::ResponseSize {
            expected: pair.n(),
            found: r.chi.len(),
        });
    }
    match h.permuted(&r.chi) {
        Ok(mapped) if mapped == *pair.get(c.b) => RoundResult::Accept,
        Ok(_) => RoundResult::Reject,
        Err(e) => RoundResult::ProtocolError(e.into()),
    }
}

/// Anything that can play the prover side of a session.
pub trait RoundProver {
    fn commit(&mut self, rng: &mut dyn CryptoRngCore) -> Result<Commitment, ProtocolError>;
    fn respond(&mut self, c: Challenge) -> Result<Response, ProtocolError>;
}

/// Object-safe CSPRNG bound.
pub trait CryptoRngCore: rand::RngCore + CryptoRng {}
impl<T: rand::RngCore + CryptoRng> CryptoRngCore for T {}

/// Prover holding `pi`. A second `respond` for one commitment is an error.
pub struct HonestProver<'id> {
    identity: &'id IdentityMaterial,
    pending: Option<ProverRound<'id>>,
    compose: Composer,
}

impl<'id> HonestProver<'id> {
    pub fn new(identity: &'id IdentityMaterial) -> Self {
        Self::with_composer(identity, left_to_right)
    }

    pub fn with_composer(identity: &'id IdentityMaterial, compose: Composer) -> Self {
        Self {
            identity,
            pending: None,
            compose,
        }
    }
}

impl RoundProver for HonestProver<'_> {
    fn commit(&mut self, rng: &mut dyn CryptoRngCore) -> Result<Commitment, ProtocolError> {
        if self.pending.is_some() {
            return Err(ProtocolError::RoundInProgress);
        }
        let (round, c) = prover_commit(self.identity, rng);
        self.pending = Some(round);
        Ok(c)
    }

    fn respond(&mut self, c: Challenge) -> Result<Response, ProtocolError> {
        let round = self.pending.take().ok_or(ProtocolError::NoPendingRound)?;
        Ok(round.respond_with(c, self.compose))
    }
}

/// The best strategy without `pi`: guess `a`, commit to `epsilon(G_a)` and
/// always answer `epsilon⁻¹`. Wins exactly when the challenge equals the
/// guess.
pub struct CheatingProver<'p> {
    pair: &'p PublicPair,
    pending: Option<(Choice, Permutation)>,
}

impl<'p> CheatingProver<'p> {
    pub fn new(pair: &'p PublicPair) -> Self {
        Self { pair, pending: None }
    }

    pub fn guess(&self) -> Option<Choice> {
        self.pending.as_ref().map(|(a, _)| *a)
    }
}

impl RoundProver for CheatingProver<'_> {
    fn commit(&mut self, rng: &mut dyn CryptoRngCore) -> Result<Commitment, ProtocolError> {
        if self.pending.is_some() {
            return Err(ProtocolError::RoundInProgress);
        }
        let a = Choice::random(rng);
        let epsilon = Permutation::random(self.pair.n(), rng);
        let h = self.pair.get(a).permuted(&epsilon)?;
        self.pending = Some((a, epsilon));
        Ok(Commitment { h })
    }

    fn respond(&mut self, _c: Challenge) -> Result<Response, ProtocolError> {
        let (_, epsilon) = self.pending.take().ok_or(ProtocolError::NoPendingRound)?;
        Ok(Response { chi: epsilon.inverse() })
    }
}

/// Verifier side of one session: holds the outstanding commitment and
/// challenge between the two messages.
pub struct Verifier<'p> {
    pair: &'p PublicPair,
    pending: Option<(Graph, Challenge)>,
}

impl<'p> Verifier<'p> {
    pub fn new(pair: &'p PublicPair) -> Self {
        Self { pair, pending: None }
    }

    pub fn challenge(
        &mut self,
        commitment: &Commitment,
        rng: &mut dyn CryptoRngCore,
    ) -> Result<Challenge, ProtocolError> {
        if self.pending.is_some() {
            return Err(ProtocolError::RoundInProgress);
        }
        check_commitment(self.pair, &commitment.h)?;
        let c = verifier_challenge(rng);
        self.pending = Some((commitment.h.clone(), c));
        Ok(c)
    }

    pub fn verify(&mut self, r: &Response) -> Result<RoundResult, ProtocolError> {
        let (h, c) = self.pending.take().ok_or(ProtocolError::NoPendingRound)?;
        Ok(verifier_verify(self.pair, &h, c, r))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundRecord {
    pub h: Graph,
    pub b: Choice,
    pub chi: Permutation,
    pub accepted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accepted,
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub rounds: Vec<RoundRecord>,
    pub verdict: Verdict,
    /// Set when the session ended on a protocol error rather than a mismatch.
    pub cause: Option<ProtocolError>,
}

impl Transcript {
    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Accepted
    }
}

/// Runs up to `rounds` rounds, stopping at the first failure.
pub fn run_session(
    prover: &mut dyn RoundProver,
    pair: &PublicPair,
    rounds: usize,
    rng: &mut dyn CryptoRngCore,
) -> Result<Transcript, ProtocolError> {
    if !(1..=MAX_ROUNDS).contains(&rounds) {
        return Err(ProtocolError::RoundCount(rounds));
    }
    let mut verifier = Verifier::new(pair);
    let mut records = Vec::with_capacity(rounds);
    let rejected = |records, cause| Transcript {
        rounds: records,
        verdict: Verdict::Rejected,
        cause,
    };
    for _ in 0..rounds {
        let step = prover.commit(rng).and_then(|commitment| {
            let c = verifier.challenge(&commitment, rng)?;
            let r = prover.respond(c)?;
            Ok((commitment, c, r))
        });
        let (commitment, c, r) = match step {
            Ok(s) => s,
            Err(e) => return Ok(rejected(records, Some(e))),
        };
        let result = verifier.verify(&r)?;
        records.push(RoundRecord {
            h: commitment.h,
            b: c.b,
            chi: r.chi,
            accepted: result.accepted(),
        });
        match result {
            RoundResult::Accept => {}
            RoundResult::Reject => return Ok(rejected(records, None)),
            RoundResult::ProtocolError(e) => return Ok(rejected(records, Some(e))),
        }
    }
    Ok(Transcript {
        rounds: records,
        verdict: Verdict::Accepted,
        cause: None,
    })
}

/// Transcript produced from the public pair alone: pick `b`, pick a uniform
/// `sigma`, set `H = sigma⁻¹(G_b)` and answer `sigma`.
pub fn simulate_transcript(
    pair: &PublicPair,
    rounds: usize,
    rng: &mut dyn CryptoRngCore,
) -> Transcript {
    let records = (0..rounds)
        .map(|_| {
            let b = Choice::random(rng);
            let sigma = Permutation::random(pair.n(), rng);
            let h = pair
                .get(b)
                .permuted(&sigma.inverse())
                .expect("sigma sized to the pair");
            RoundRecord {
                h,
                b,
                chi: sigma,
                accepted: true,
            }
        })
        .collect();
    Transcript {
        rounds: records,
        verdict: Verdict::Accepted,
        cause: None,
    }
}
