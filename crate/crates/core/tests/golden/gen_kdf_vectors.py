#!/usr/bin/env python3
"""Independent reference implementation of the credential KDF.

Regenerates kdf_vectors.json. Shares no code with the Rust crate; the Rust
golden test and the browser parity suite both replay its output.
"""
import hashlib
import json
import sys

SEP = b"\x1f"
VERSION = b"GIZKP-v1"
HASHES = {"sha256": lambda: hashlib.sha256(), "sha512-256": lambda: hashlib.new("sha512_256")}


def H(hash_id, data):
    h = HASHES[hash_id]()
    h.update(data)
    return h.digest()


def seed(hash_id, tag, login, password):
    return H(hash_id, VERSION + SEP + tag.encode() + SEP + login.encode() + SEP + password.encode())


def stream(hash_id, s, count):
    out = b""
    i = 0
    while len(out) < count:
        out += H(hash_id, s + i.to_bytes(8, "big"))
        i += 1
    return out[:count]


def permutation(hash_id, s, n):
    # enough stream for all draws plus generous rejection headroom
    data = stream(hash_id, s, 8 * (n + 64))
    pos = 0
    m = list(range(n))
    for i in range(n - 1, 0, -1):
        mod = i + 1
        limit = (2**64 // mod) * mod
        while True:
            x = int.from_bytes(data[pos:pos + 8], "big")
            pos += 8
            if x < limit:
                break
        j = x % mod
        m[i], m[j] = m[j], m[i]
    return m


def graph_edges(hash_id, s, n):
    pairs = n * (n - 1) // 2
    data = stream(hash_id, s, (pairs + 7) // 8)
    edges = set()
    k = 0
    for u in range(n):
        for v in range(u + 1, n):
            if data[k // 8] >> (7 - k % 8) & 1:
                edges.add((u, v))
            k += 1
    return edges


def encode_graph(n, edges):
    bits = [1 if (u, v) in edges else 0 for u in range(n) for v in range(u + 1, n)]
    bits += [0] * (-len(bits) % 8)
    payload = bytes(int("".join(map(str, bits[i:i + 8])), 2) for i in range(0, len(bits), 8))
    return (n.to_bytes(4, "big") + payload).hex()


def encode_perm(m):
    return (len(m).to_bytes(4, "big") + b"".join(x.to_bytes(4, "big") for x in m)).hex()


CREDS = [
    ("alice", "correct horse battery staple", 128, "sha256"),
    ("bob", "hunter2", 128, "sha256"),
    ("carol", "p@ssw0rd!", 8, "sha256"),
    ("dave", "x", 9, "sha256"),
    ("eve@example.org", "Tr0ub4dor&3", 64, "sha256"),
    ("ab", "c", 16, "sha256"),
    ("a", "bc", 16, "sha256"),
    ("zoë", "пароль密码", 32, "sha256"),
    ("mallory", "letmein", 128, "sha512-256"),
    ("trent", "a" * 1024, 256, "sha256"),
]


def main():
    vectors = []
    for login, password, n, hash_id in CREDS:
        s_sec = seed(hash_id, "secret", login, password)
        s_gr = seed(hash_id, "graph", login, password)
        pi = permutation(hash_id, s_sec, n)
        e1 = graph_edges(hash_id, s_gr, n)
        e2 = {tuple(sorted((pi[u], pi[v]))) for (u, v) in e1}
        vectors.append({
            "login": login,
            "password": password,
            "n": n,
            "hash_id": hash_id,
            "seed_secret": s_sec.hex(),
            "seed_graph": s_gr.hex(),
            "stream_graph_64": stream(hash_id, s_gr, 64).hex(),
            "pi": encode_perm(pi),
            "g1": encode_graph(n, e1),
            "g2": encode_graph(n, e2),
        })
    json.dump({"version": "GIZKP-v1", "vectors": vectors}, sys.stdout, indent=1, ensure_ascii=False)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
