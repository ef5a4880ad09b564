//! Deterministic derivation of the secret permutation and public graph pair
//! from a login and password.
//!
//! Everything here is a pure function of the credentials and [`KdfParams`];
//! the same inputs produce byte-identical keys on every platform.

use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha256, Sha512_256};

use crate::error::KdfError;
use crate::graph::{payload_len, Graph};
use crate::permutation::Permutation;

pub const VERSION_TAG: &str = "GIZKP-v1";
pub const DEFAULT_GRAPH_SIZE: usize = 128;
pub const MIN_GRAPH_SIZE: usize = 8;
pub const MAX_GRAPH_SIZE: usize = 1024;

/// Domain tag for the seed that drives the secret permutation.
pub const SECRET_DOMAIN: &str = "secret";
/// Domain tag for the seed that drives the public graph.
pub const GRAPH_DOMAIN: &str = "graph";

const SEPARATOR: u8 = 0x1f;
const MAX_REJECTIONS: usize = 1000;

/// 256-bit hash functions usable by the KDF.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum HashId {
    #[default]
    Sha256,
    Sha512_256,
}

impl HashId {
    pub fn as_str(self) -> &'static str {
        match self {
            HashId::Sha256 => "sha256",
            HashId::Sha512_256 => "sha512-256",
        }
    }

    pub fn digest(self, parts: &[&[u8]]) -> [u8; 32] {
        match self {
            HashId::Sha256 => digest_parts::<Sha256>(parts),
            HashId::Sha512_256 => digest_parts::<Sha512_256>(parts),
        }
    }
}

fn digest_parts<D: Digest>(parts: &[&[u8]]) -> [u8; 32] {
    let mut h = D::new();
    for p in parts {
        h.update(p);
    }
    let out = h.finalize();
    let mut buf = [0u8; 32];
    buf.copy_from_slice(&out);
    buf
}

impl fmt::Display for HashId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for HashId {
    type Err = KdfError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sha256" => Ok(HashId::Sha256),
            "sha512-256" => Ok(HashId::Sha512_256),
            other => Err(KdfError::UnknownHash(other.to_owned())),
        }
    }
}

/// Login and password as typed by the user.
#[derive(Clone)]
pub struct Credentials {
    login: String,
    password: String,
}

impl Credentials {
    pub fn new(login: impl Into<String>, password: impl Into<String>) -> Result<Self, KdfError> {
        let login = login.into();
        let password = password.into();
        if login.is_empty() || login.len() > 256 {
            return Err(KdfError::LoginLength(login.len()));
        }
        if password.is_empty() || password.len() > 1024 {
            return Err(KdfError::PasswordLength(password.len()));
        }
        Ok(Self { login, password })
    }

    pub fn login(&self) -> &str {
        &self.login
    }
}

impl fmt::Debug for Credentials {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Credentials")
            .field("login", &self.login)
            .field("password", &"<redacted>")
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KdfParams {
    n: usize,
    hash: HashId,
    version_tag: String,
}

impl KdfParams {
    pub fn new(n: usize, hash: HashId) -> Result<Self, KdfError> {
        if !(MIN_GRAPH_SIZE..=MAX_GRAPH_SIZE).contains(&n) {
            return Err(KdfError::GraphSize(n));
        }
        Ok(Self {
            n,
            hash,
            version_tag: VERSION_TAG.to_owned(),
        })
    }

    /// Overrides the version tag. Only useful for domain-separation tests.
    pub fn with_version_tag(mut self, tag: impl Into<String>) -> Self {
        self.version_tag = tag.into();
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn hash(&self) -> HashId {
        self.hash
    }

    pub fn version_tag(&self) -> &str {
        &self.version_tag
    }
}

impl Default for KdfParams {
    fn default() -> Self {
        Self::new(DEFAULT_GRAPH_SIZE, HashId::Sha256).expect("default size in range")
    }
}

/// A 32-byte hash output that keys one deterministic byte stream.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed {
    bytes: [u8; 32],
    hash: HashId,
}

impl Seed {
    pub fn from_bytes(bytes: [u8; 32], hash: HashId) -> Self {
        Self { bytes, hash }
    }

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.bytes
    }

    pub fn hash(&self) -> HashId {
        self.hash
    }

    pub fn stream(&self) -> ByteStream {
        ByteStream::new(*self)
    }
}

impl fmt::Debug for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Seed({}, {})", self.hash, hex::encode(self.bytes))
    }
}

/// `H(version ‖ 0x1f ‖ domain ‖ 0x1f ‖ login ‖ 0x1f ‖ password)`.
pub fn derive_seed(c: &Credentials, domain_tag: &str, params: &KdfParams) -> Seed {
    let sep = [SEPARATOR];
    let bytes = params.hash.digest(&[
        params.version_tag.as_bytes(),
        &sep,
        domain_tag.as_bytes(),
        &sep,
        c.login.as_bytes(),
        &sep,
        c.password.as_bytes(),
    ]);
    Seed::from_bytes(bytes, params.hash)
}

/// Counter-mode expansion of a seed: block `i` is `H(seed ‖ be64(i))`.
#[derive(Clone)]
pub struct ByteStream {
    seed: Seed,
    counter: u64,
    block: [u8; 32],
    pos: usize,
}

impl ByteStream {
    pub fn new(seed: Seed) -> Self {
        Self {
            seed,
            counter: 0,
            block: [0; 32],
            pos: 32,
        }
    }

    pub fn fill(&mut self, out: &mut [u8]) {
        let mut written = 0;
        while written < out.len() {
            if self.pos == 32 {
                self.block = self
                    .seed
                    .hash
                    .digest(&[&self.seed.bytes, &self.counter.to_be_bytes()]);
                self.counter += 1;
                self.pos = 0;
            }
            let take = (32 - self.pos).min(out.len() - written);
            out[written..written + take].copy_from_slice(&self.block[self.pos..self.pos + take]);
            self.pos += take;
            written += take;
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut buf = [0u8; 8];
        self.fill(&mut buf);
        u64::from_be_bytes(buf)
    }

    /// Unbiased draw from `[0, m)` by rejection on 64-bit big-endian chunks.
    ///
    /// Chunks at or above `floor(2^64 / m) * m` are discarded. `m` may be as
    /// large as `2^64`, in which case nothing is ever rejected.
    pub fn uniform_int(&mut self, m: u128) -> Result<u64, KdfError> {
        assert!((1..=1u128 << 64).contains(&m), "modulus out of range");
        let limit = ((1u128 << 64) / m) * m;
        for _ in 0..MAX_REJECTIONS {
            let x = self.next_u64() as u128;
            if x < limit {
                return Ok((x % m) as u64);
            }
        }
        Err(KdfError::SamplingExhausted)
    }

    /// Number of 32-byte blocks generated so far.
    pub fn blocks_used(&self) -> u64 {
        self.counter
    }
}

/// First `count` bytes of the seed's stream.
pub fn stream_bytes(seed: &Seed, count: usize) -> Vec<u8> {
    let mut out = vec![0u8; count];
    seed.stream().fill(&mut out);
    out
}

/// Fisher-Yates over `[0, n)`: for `i` from `n-1` down to 1, swap position
/// `i` with `uniform_int(i + 1)`.
pub fn derive_permutation(seed: &Seed, n: usize) -> Result<Permutation, KdfError> {
    let mut stream = seed.stream();
    let mut mapping: Vec<u32> = (0..n as u32).collect();
    for i in (1..n).rev() {
        let j = stream.uniform_int(i as u128 + 1)? as usize;
        mapping.swap(i, j);
    }
    Ok(Permutation::new(mapping).expect("shuffle of the identity"))
}

/// `G(n, 1/2)` graph whose upper-triangle bits are the stream bits, MSB first.
pub fn derive_graph(seed: &Seed, n: usize) -> Graph {
    let bytes = stream_bytes(seed, payload_len(n));
    let bits = bytes.iter().flat_map(|&b| (0..8).rev().map(move |i| b >> i & 1 == 1));
    Graph::from_upper_triangle(n, bits).expect("stream covers every pair")
}

/// Why a derived public graph makes the secret easy to recover.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weakness {
    Edgeless,
    Complete,
    DistinctDegrees,
}

/// The secret permutation and the public pair `(g1, g2)` with `g2 = pi(g1)`.
#[derive(Clone, PartialEq, Eq)]
pub struct IdentityMaterial {
    secret: Permutation,
    pair: PublicPair,
}

impl IdentityMaterial {
    pub fn new(secret: Permutation, g1: Graph) -> Result<Self, crate::GraphError> {
        let g2 = g1.permuted(&secret)?;
        Ok(Self {
            secret,
            pair: PublicPair { g1, g2 },
        })
    }

    /// Identity keyed by two explicit seeds; `n` is not range-checked here.
    pub fn from_seeds(secret_seed: &Seed, graph_seed: &Seed, n: usize) -> Result<Self, KdfError> {
        let pi = derive_permutation(secret_seed, n)?;
        let g1 = derive_graph(graph_seed, n);
        Ok(Self::new(pi, g1).expect("sizes agree"))
    }

    pub fn secret(&self) -> &Permutation {
        &self.secret
    }

    pub fn public(&self) -> &PublicPair {
        &self.pair
    }

    pub fn n(&self) -> usize {
        self.secret.len()
    }

    pub fn weakness(&self) -> Option<Weakness> {
        let g1 = &self.pair.g1;
        if g1.is_edgeless() {
            Some(Weakness::Edgeless)
        } else if g1.is_complete() {
            Some(Weakness::Complete)
        } else {
            let mut d = g1.degree_multiset();
            d.dedup();
            (d.len() == g1.order()).then_some(Weakness::DistinctDegrees)
        }
    }
}

impl fmt::Debug for IdentityMaterial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IdentityMaterial")
            .field("n", &self.n())
            .field("secret", &"<redacted>")
            .finish()
    }
}

/// The account's public key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicPair {
    pub g1: Graph,
    pub g2: Graph,
}

impl PublicPair {
    pub fn n(&self) -> usize {
        self.g1.order()
    }

    pub fn get(&self, which: crate::Choice) -> &Graph {
        match which {
            crate::Choice::One => &self.g1,
            crate::Choice::Two => &self.g2,
        }
    }
}

pub fn derive_identity(c: &Credentials, params: &KdfParams) -> Result<IdentityMaterial, KdfError> {
    let id = IdentityMaterial::from_seeds(
        &derive_seed(c, SECRET_DOMAIN, params),
        &derive_seed(c, GRAPH_DOMAIN, params),
        params.n,
    )?;
    if let Some(w) = id.weakness() {
        tracing::warn!(login = c.login(), weakness = ?w, "derived graph is a weak instance");
    }
    Ok(id)
}
