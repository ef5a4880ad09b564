//! Durable account storage: one JSON object per line.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use gizkp_core::{Graph, HashId, PublicPair};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AccountRecord {
    pub login: String,
    pub n: usize,
    pub hash_id: String,
    pub g1: String,
    pub g2: String,
    /// Seconds since the Unix epoch.
    pub created_at: u64,
}

impl AccountRecord {
    /// Decodes and checks the stored graphs.
    pub fn public_pair(&self) -> Result<PublicPair, String> {
        self.hash_id
            .parse::<HashId>()
            .map_err(|e| e.to_string())?;
        let g1 = decode_sized(&self.g1, self.n).map_err(|e| format!("g1: {e}"))?;
        let g2 = decode_sized(&self.g2, self.n).map_err(|e| format!("g2: {e}"))?;
        Ok(PublicPair { g1, g2 })
    }

    /// Same login and key material; `created_at` is ignored.
    pub fn same_material(&self, other: &AccountRecord) -> bool {
        self.login == other.login
            && self.n == other.n
            && self.hash_id == other.hash_id
            && self.g1 == other.g1
            && self.g2 == other.g2
    }
}

fn decode_sized(hex: &str, n: usize) -> Result<Graph, String> {
    let g = Graph::from_hex(hex).map_err(|e| e.to_string())?;
    if g.order() != n {
        return Err(format!("has {} vertices, record says {n}", g.order()));
    }
    Ok(g)
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {reason}")]
    Corrupt {
        path: PathBuf,
        line: usize,
        reason: String,
    },
}

#[derive(Debug)]
pub struct AccountStore {
    path: Option<PathBuf>,
    records: BTreeMap<String, AccountRecord>,
}

impl AccountStore {
    /// Store that never touches disk.
    pub fn in_memory() -> Self {
        Self {
            path: None,
            records: BTreeMap::new(),
        }
    }

    /// Loads `path`, creating an empty store if the file does not exist.
    /// Any malformed or duplicate line is an error naming that line.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let path = path.into();
        let records = match File::open(&path) {
            Ok(f) => load(&path, f)?,
            Err(e) if e.kind() == io::ErrorKind::NotFound => BTreeMap::new(),
            Err(source) => return Err(StoreError::Io { path, source }),
        };
        Ok(Self {
            path: Some(path),
            records,
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn get(&self, login: &str) -> Option<&AccountRecord> {
        self.records.get(login)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> impl Iterator<Item = &AccountRecord> {
        self.records.values()
    }

    /// Appends the record and fsyncs before it becomes visible.
    pub fn insert(&mut self, record: AccountRecord) -> Result<(), StoreError> {
        if let Some(path) = &self.path {
            let io = |source| StoreError::Io {
                path: path.clone(),
                source,
            };
            let mut f = OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(io)?;
            let mut line = serde_json::to_vec(&record).expect("record serializes");
            line.push(b'\n');
            f.write_all(&line).map_err(io)?;
            f.sync_all().map_err(io)?;
        }
        self.records.insert(record.login.clone(), record);
        Ok(())
    }

    /// Rewrites the whole file through a temporary and a rename.
    pub fn save(&self) -> Result<(), StoreError> {
        let Some(path) = &self.path else { return Ok(()) };
        let io = |source| StoreError::Io {
            path: path.clone(),
            source,
        };
        let tmp = path.with_extension("tmp");
        let mut f = File::create(&tmp).map_err(io)?;
        for r in self.records.values() {
            serde_json::to_writer(&mut f, r).expect("record serializes");
            f.write_all(b"\n").map_err(io)?;
        }
        f.sync_all().map_err(io)?;
        std::fs::rename(&tmp, path).map_err(io)
    }
}

/// Result of checking one stored record offline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Audit {
    Isomorphic,
    NotIsomorphic,
    /// Too large for exhaustive search.
    Skipped,
    Invalid(String),
}

/// Confirms `g1 ≅ g2` for every record small enough for exhaustive search.
pub fn audit_isomorphism(store: &AccountStore) -> Vec<(String, Audit)> {
    store
        .records()
        .map(|r| {
            let verdict = match r.public_pair() {
                Err(e) => Audit::Invalid(e),
                Ok(pair) => match gizkp_core::brute_force_isomorphism(&pair.g1, &pair.g2) {
                    Ok(Some(_)) => Audit::Isomorphic,
                    Ok(None) => Audit::NotIsomorphic,
                    Err(_) => Audit::Skipped,
                },
            };
            (r.login.clone(), verdict)
        })
        .collect()
}

fn load(path: &Path, f: File) -> Result<BTreeMap<String, AccountRecord>, StoreError> {
    let mut records = BTreeMap::new();
    for (idx, line) in BufReader::new(f).lines().enumerate() {
        let line_no = idx + 1;
        let corrupt = |reason: String| StoreError::Corrupt {
            path: path.to_owned(),
            line: line_no,
            reason,
        };
        let line = line.map_err(|e| corrupt(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: AccountRecord =
            serde_json::from_str(&line).map_err(|e| corrupt(e.to_string()))?;
        record.public_pair().map_err(corrupt)?;
        if records.contains_key(&record.login) {
            return Err(corrupt(format!("duplicate login {:?}", record.login)));
        }
        records.insert(record.login.clone(), record);
    }
    Ok(records)
}
