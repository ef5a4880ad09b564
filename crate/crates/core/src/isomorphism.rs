//! Exhaustive isomorphism search for small graphs.
//!
//! Used to check derived key pairs and commitments at desk scale. The search
//! backtracks over partial vertex maps, pruning on degree and on adjacency to
//! the already-mapped vertices.

use thiserror::Error;

use crate::graph::Graph;
use crate::permutation::Permutation;

/// Largest vertex count the exhaustive search will accept.
pub const ORACLE_MAX_VERTICES: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("exhaustive search refused: {n} vertices exceeds {ORACLE_MAX_VERTICES}")]
    TooLarge { n: usize },
    #[error("graphs have {a} and {b} vertices")]
    SizeMismatch { a: usize, b: usize },
}

/// Finds `p` with `a.permuted(p) == b`, if one exists.
pub fn brute_force_isomorphism(a: &Graph, b: &Graph) -> Result<Option<Permutation>, OracleError> {
    if a.order() != b.order() {
        return Err(OracleError::SizeMismatch {
            a: a.order(),
            b: b.order(),
        });
    }
    let n = a.order();
    if n > ORACLE_MAX_VERTICES {
        return Err(OracleError::TooLarge { n });
    }
    if a.edge_count() != b.edge_count() || a.degree_multiset() != b.degree_multiset() {
        return Ok(None);
    }

    let mut search = Search {
        a,
        b,
        deg_a: a.degrees(),
        deg_b: b.degrees(),
        map: vec![usize::MAX; n],
        used: vec![false; n],
    };
    if !search.extend(0) {
        return Ok(None);
    }
    let mapping = search.map.iter().map(|&v| v as u32).collect();
    Ok(Some(Permutation::new(mapping).expect("search yields a bijection")))
}

/// Counts automorphisms of `g` by exhaustive search.
pub fn automorphism_count(g: &Graph) -> Result<u64, OracleError> {
    let n = g.order();
    if n > ORACLE_MAX_VERTICES {
        return Err(OracleError::TooLarge { n });
    }
    let deg = g.degrees();
    let mut search = Search {
        a: g,
        b: g,
        deg_a: deg.clone(),
        deg_b: deg,
        map: vec![usize::MAX; n],
        used: vec![false; n],
    };
    Ok(search.count(0))
}

struct Search<'g> {
    a: &'g Graph,
    b: &'g Graph,
    deg_a: Vec<usize>,
    deg_b: Vec<usize>,
    map: Vec<usize>,
    used: Vec<bool>,
}

impl Search<'_> {
    fn candidate(&self, u: usize, t: usize) -> bool {
        !self.used[t]
            && self.deg_a[u] == self.deg_b[t]
            && (0..u).all(|w| self.a.has_edge(u, w) == self.b.has_edge(t, self.map[w]))
    }

    fn extend(&mut self, u: usize) -> bool {
        if u == self.map.len() {
            return true;
        }
        for t in 0..self.map.len() {
            if self.candidate(u, t) {
                self.map[u] = t;
                self.used[t] = true;
                if self.extend(u + 1) {
                    return true;
                }
                self.used[t] = false;
            }
        }
        self.map[u] = usize::MAX;
        false
    }

    fn count(&mut self, u: usize) -> u64 {
        if u == self.map.len() {
            return 1;
        }
        let mut total = 0;
        for t in 0..self.map.len() {
            if self.candidate(u, t) {
                self.map[u] = t;
                self.used[t] = true;
                total += self.count(u + 1);
                self.used[t] = false;
            }
        }
        total
    }
}
