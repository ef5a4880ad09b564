//! Simple undirected graphs stored as a dense symmetric bit matrix.

use std::fmt;

use crate::error::{DecodeError, GraphError};
use crate::permutation::Permutation;

/// Largest vertex count accepted anywhere in the crate.
///
/// Decoding untrusted bytes allocates `n * n` bits, so the bound is enforced
/// before any allocation happens.
pub const MAX_VERTICES: usize = 4096;

/// A simple undirected graph on the vertices `0..n`.
///
/// Rows of the adjacency matrix are packed into `u64` words. The matrix is
/// always symmetric with an empty diagonal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::EmptyVertexSet);
        }
        if n > MAX_VERTICES {
            return Err(GraphError::TooLarge { n, max: MAX_VERTICES });
        }
        let words = n.div_ceil(64);
        Ok(Self {
            n,
            words,
            rows: vec![0; n * words],
        })
    }

    /// Complete graph on `n` vertices.
    pub fn complete(n: usize) -> Result<Self, GraphError> {
        let mut g = Self::empty(n)?;
        for u in 0..n {
            for v in (u + 1)..n {
                g.set(u, v);
            }
        }
        Ok(g)
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::empty(n)?;
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Builds a graph from the strict upper triangle, visited in wire order
    /// `(0,1), (0,2), ..., (0,n-1), (1,2), ...`.
    pub fn from_upper_triangle<I>(n: usize, bits: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = bool>,
    {
        let mut g = Self::empty(n)?;
        let mut bits = bits.into_iter();
        for u in 0..n {
            for v in (u + 1)..n {
                if bits.next().ok_or(GraphError::ShortBitSource)? {
                    g.set(u, v);
                }
            }
        }
        Ok(g)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    /// Number of vertex pairs in the strict upper triangle.
    #[inline]
    pub fn pair_count(&self) -> usize {
        pair_count(self.n)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        self.set(u, v);
        Ok(())
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        self.rows[u * self.words + v / 64] &= !(1 << (v % 64));
        self.rows[v * self.words + u / 64] &= !(1 << (u % 64));
        Ok(())
    }

    /// Adjacency test; out-of-range vertices are never adjacent.
    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.rows[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    /// Sorted degree sequence.
    pub fn degree_multiset(&self) -> Vec<usize> {
        let mut d = self.degrees();
        d.sort_unstable();
        d
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|w| w.count_ones() as usize).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, in wire order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.neighbours(u).filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// Neighbours of `u` in increasing order.
    pub fn neighbours(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(u).iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + bit)
            })
        })
    }

    /// Upper-triangle adjacency bits in wire order.
    pub fn upper_triangle(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.n).flat_map(move |u| ((u + 1)..self.n).map(move |v| self.has_edge(u, v)))
    }

    pub fn is_edgeless(&self) -> bool {
        self.rows.iter().all(|&w| w == 0)
    }

    pub fn is_complete(&self) -> bool {
        self.edge_count() == self.pair_count()
    }

    /// Relabels every vertex `v` as `p[v]`.
    ///
    /// The result has the edge `(p[u], p[v])` exactly when `self` has `(u, v)`.
    pub fn permuted(&self, p: &Permutation) -> Result<Graph, GraphError> {
        if p.len() != self.n {
            return Err(GraphError::SizeMismatch {
                expected: self.n,
                found: p.len(),
            });
        }
        let mut out = Graph {
            n: self.n,
            words: self.words,
            rows: vec![0; self.rows.len()],
        };
        let map = p.as_slice();
        for u in 0..self.n {
            let pu = map[u] as usize;
            let dst = pu * self.words;
            for v in self.neighbours(u) {
                let pv = map[v] as usize;
                out.rows[dst + pv / 64] |= 1 << (pv % 64);
            }
        }
        Ok(out)
    }

    #[inline]
    fn row(&self, u: usize) -> &[u64] {
        &self.rows[u * self.words..(u + 1) * self.words]
    }

    #[inline]
    fn set(&mut self, u: usize, v: usize) {
        self.rows[u * self.words + v / 64] |= 1 << (v % 64);
        self.rows[v * self.words + u / 64] |= 1 << (u % 64);
    }

    fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v >= self.n {
            Err(GraphError::VertexOutOfRange { vertex: v, n: self.n })
        } else {
            Ok(())
        }
    }

    /// Canonical wire encoding: `u32` big-endian vertex count followed by the
    /// strict upper triangle packed MSB-first, trailing pad bits zero.
    pub fn to_bytes(&self) -> Vec<u8> {
        let payload = payload_len(self.n);
        let mut out = Vec::with_capacity(4 + payload);
        out.extend_from_slice(&(self.n as u32).to_be_bytes());
        let mut byte = 0u8;
        let mut filled = 0;
        for bit in self.upper_triangle() {
            byte = (byte << 1) | bit as u8;
            filled += 1;
            if filled == 8 {
                out.push(byte);
                byte = 0;
                filled = 0;
            }
        }
        if filled > 0 {
            out.push(byte << (8 - filled));
        }
        debug_assert_eq!(out.len(), 4 + payload);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DecodeError> {
        let (head, payload) = bytes
            .split_first_chunk::<4>()
            .ok_or(DecodeError::Truncated { needed: 4, found: bytes.len() })?;
        let n = u32::from_be_bytes(*head) as usize;
        if n == 0 {
            return Err(DecodeError::ZeroVertices);
        }
        if n > MAX_VERTICES {
            return Err(DecodeError::TooLarge { n, max: MAX_VERTICES });
        }
        let expected = payload_len(n);
        if payload.len() != expected {
            return Err(DecodeError::Length {
                expected: 4 + expected,
                found: bytes.len(),
            });
        }
        let pairs = pair_count(n);
        let pad = expected * 8 - pairs;
        if pad > 0 && payload[expected - 1] & ((1u8 << pad) - 1) != 0 {
            return Err(DecodeError::NonZeroPadding);
        }
        let bits = payload
            .iter()
            .flat_map(|&b| (0..8).rev().map(move |i| b >> i & 1 == 1));
        Ok(Self::from_upper_triangle(n, bits).expect("payload length checked"))
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.to_bytes())
    }

    pub fn from_hex(s: &str) -> Result<Self, DecodeError> {
        Self::from_bytes(&crate::decode_hex(s)?)
    }
}

/// Label-wise equality: same vertex count and identical edge sets.
///
/// This is not an isomorphism test.
pub fn graphs_equal(a: &Graph, b: &Graph) -> bool {
    a == b
}

/// `apply_permutation(p, g)`: relabel `g` by `p`.
pub fn apply_permutation(p: &Permutation, g: &Graph) -> Result<Graph, GraphError> {
    g.permuted(p)
}

#[inline]
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Payload bytes after the 4-byte header for an `n`-vertex graph.
#[inline]
pub fn payload_len(n: usize) -> usize {
    pair_count(n).div_ceil(8)
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}
