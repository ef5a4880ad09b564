//! Permutations of vertex labels.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{DecodeError, GraphError};
use crate::graph::MAX_VERTICES;

/// A bijection on `0..n`; `mapping[i]` is the image of vertex `i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    mapping: Vec<u32>,
}

impl Permutation {
    /// Validates that `mapping` is a bijection on `0..mapping.len()`.
    pub fn new(mapping: Vec<u32>) -> Result<Self, GraphError> {
        let n = mapping.len();
        if n == 0 {
            return Err(GraphError::EmptyVertexSet);
        }
        let mut seen = vec![false; n];
        for &img in &mapping {
            let slot = seen
                .get_mut(img as usize)
                .ok_or(GraphError::NotABijection)?;
            if std::mem::replace(slot, true) {
                return Err(GraphError::NotABijection);
            }
        }
        Ok(Self { mapping })
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "permutation of an empty set");
        Self {
            mapping: (0..n as u32).collect(),
        }
    }

    /// Uniform permutation drawn with a Fisher-Yates shuffle over `rng`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut p = Self::identity(n);
        p.mapping.shuffle(rng);
        p
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    /// Always false; permutations have at least one point.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[u32] {
        &self.mapping
    }

    #[inline]
    pub fn image(&self, i: usize) -> usize {
        self.mapping[i] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(i, &m)| i as u32 == m)
    }

    /// `result[self[i]] == i`.
    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u32; self.len()];
        for (i, &m) in self.mapping.iter().enumerate() {
            inv[m as usize] = i as u32;
        }
        Self { mapping: inv }
    }

    /// Applies `self` first and then `next`: `result[i] == next[self[i]]`.
    pub fn then(&self, next: &Permutation) -> Result<Self, GraphError> {
        if self.len() != next.len() {
            return Err(GraphError::SizeMismatch {
                expected: self.len(),
                found: next.len(),
            });
        }
        Ok(Self {
            mapping: self.mapping.iter().map(|&m| next.mapping[m as usize]).collect(),
        })
    }

    /// `u32` big-endian length followed by each image as `u32` big-endian.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 * (self.len() + 1));
        out.extend_from_slice(&(self.len() as u32).to_be_bytes());
        for &m in &self.mapping {
            out.extend_from_slice(&m.to_be_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DecodeError> {
        let (head, body) = bytes
            .split_first_chunk::<4>()
            .ok_or(DecodeError::Truncated { needed: 4, found: bytes.len() })?;
        let n = u32::from_be_bytes(*head) as usize;
        if n == 0 {
            return Err(DecodeError::ZeroVertices);
        }
        if n > MAX_VERTICES {
            return Err(DecodeError::TooLarge { n, max: MAX_VERTICES });
        }
        if body.len() != 4 * n {
            return Err(DecodeError::Length {
                expected: 4 + 4 * n,
                found: bytes.len(),
            });
        }
        let mapping = body
            .chunks_exact(4)
            .map(|c| u32::from_be_bytes(c.try_into().expect("chunk of 4")))
            .collect();
        Self::new(mapping).map_err(|_| DecodeError::NotABijection)
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.to_bytes())
    }

    pub fn from_hex(s: &str) -> Result<Self, DecodeError> {
        Self::from_bytes(&crate::decode_hex(s)?)
    }
}

/// `compose(first, second)`: apply `first`, then `second`.
pub fn compose(first: &Permutation, second: &Permutation) -> Result<Permutation, GraphError> {
    first.then(second)
}

pub fn invert(p: &Permutation) -> Permutation {
    p.inverse()
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.mapping)
    }
}
