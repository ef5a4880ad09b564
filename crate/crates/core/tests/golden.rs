//! Replays the pinned KDF vectors. The vectors come from an independent
//! reference implementation (`golden/gen_kdf_vectors.py`); any byte of drift
//! fails here.

use gizkp_core::kdf::{derive_seed, stream_bytes, GRAPH_DOMAIN, SECRET_DOMAIN};
use gizkp_core::{derive_identity, Credentials, HashId, KdfParams};
use serde::Deserialize;

#[derive(Deserialize)]
struct File {
    version: String,
    vectors: Vec<Vector>,
}

#[derive(Deserialize)]
struct Vector {
    login: String,
    password: String,
    n: usize,
    hash_id: String,
    seed_secret: String,
    seed_graph: String,
    stream_graph_64: String,
    pi: String,
    g1: String,
    g2: String,
}

const VECTORS: &str = include_str!("golden/kdf_vectors.json");

#[test]
fn kdf_vectors_reproduce() {
    let file: File = serde_json::from_str(VECTORS).unwrap();
    assert_eq!(file.version, "GIZKP-v1");
    assert_eq!(file.vectors.len(), 10);
    for v in &file.vectors {
        let hash: HashId = v.hash_id.parse().unwrap();
        let params = KdfParams::new(v.n, hash).unwrap();
        let c = Credentials::new(v.login.as_str(), v.password.as_str()).unwrap();

        let s_secret = derive_seed(&c, SECRET_DOMAIN, &params);
        let s_graph = derive_seed(&c, GRAPH_DOMAIN, &params);
        assert_eq!(hex::encode(s_secret.as_bytes()), v.seed_secret, "{}", v.login);
        assert_eq!(hex::encode(s_graph.as_bytes()), v.seed_graph, "{}", v.login);
        assert_eq!(hex::encode(stream_bytes(&s_graph, 64)), v.stream_graph_64, "{}", v.login);

        let id = derive_identity(&c, &params).unwrap();
        assert_eq!(id.secret().to_hex(), v.pi, "pi for {}", v.login);
        assert_eq!(id.public().g1.to_hex(), v.g1, "g1 for {}", v.login);
        assert_eq!(id.public().g2.to_hex(), v.g2, "g2 for {}", v.login);
    }
}

#[test]
fn derivation_is_repeatable() {
    let c = Credentials::new("alice", "correct horse battery staple").unwrap();
    let p = KdfParams::default();
    let a = derive_identity(&c, &p).unwrap();
    let b = derive_identity(&c, &p).unwrap();
    assert_eq!(a.secret().to_bytes(), b.secret().to_bytes());
    assert_eq!(a.public().g1.to_bytes(), b.public().g1.to_bytes());
    assert_eq!(a.public().g2.to_bytes(), b.public().g2.to_bytes());
}
