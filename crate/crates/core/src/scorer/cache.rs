//! Persistent verdict cache: append-only JSON Lines, last record per key wins.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{Answer, PairInput, PairScorer, ScorerError, Verdict};

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cache {path} line {line}: corrupt record: {message}")]
    Corrupt {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    key: String,
    scorer_id: String,
    answer: Answer,
    yes_prob: Option<f64>,
    no_prob: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheOutcome {
    Hit,
    Miss,
}

#[derive(Debug)]
pub struct VerdictCache {
    path: PathBuf,
    entries: RwLock<HashMap<String, Verdict>>,
    writer: Mutex<File>,
}

impl VerdictCache {
    /// Opens or creates the cache file, loading every existing record.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, CacheError> {
        let path = path.as_ref().to_path_buf();
        let io = |source| CacheError::Io {
            path: path.clone(),
            source,
        };
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(io)?;
        }
        let mut entries = HashMap::new();
        if path.exists() {
            let reader = BufReader::new(File::open(&path).map_err(io)?);
            for (i, line) in reader.lines().enumerate() {
                let line = line.map_err(io)?;
                if line.trim().is_empty() {
                    continue;
                }
                let corrupt = |message: String| CacheError::Corrupt {
                    path: path.clone(),
                    line: i + 1,
                    message,
                };
                let rec: Record = serde_json::from_str(&line).map_err(|e| corrupt(e.to_string()))?;
                let verdict = match (rec.yes_prob, rec.no_prob) {
                    (Some(y), Some(n)) => Verdict::with_answer(rec.answer, y, n)
                        .map_err(|e| corrupt(e.to_string()))?,
                    (None, None) => Verdict::text_only(rec.answer),
                    _ => return Err(corrupt("only one probability present".into())),
                };
                entries.insert(rec.key, verdict);
            }
        }
        let writer = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(io)?;
        Ok(Self {
            path,
            entries: RwLock::new(entries),
            writer: Mutex::new(writer),
        })
    }

    /// Hex SHA-256 of `scorer_id`, a newline, and `key_material`.
    pub fn key(scorer_id: &str, key_material: &str) -> String {
        let mut h = Sha256::new();
        h.update(scorer_id.as_bytes());
        h.update(b"\n");
        h.update(key_material.as_bytes());
        hex::encode(h.finalize())
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, key: &str) -> Option<Verdict> {
        self.entries
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(key)
            .copied()
    }

    /// Appends one record and flushes it before returning.
    pub fn put(&self, key: &str, scorer_id: &str, verdict: Verdict) -> Result<(), CacheError> {
        let mut line = serde_json::to_string(&Record {
            key: key.to_owned(),
            scorer_id: scorer_id.to_owned(),
            answer: verdict.answer,
            yes_prob: verdict.yes_prob,
            no_prob: verdict.no_prob,
        })
        .expect("record serializes");
        line.push('\n');
        {
            let mut w = self.writer.lock().unwrap_or_else(|e| e.into_inner());
            w.write_all(line.as_bytes())
                .and_then(|()| w.flush())
                .map_err(|source| CacheError::Io {
                    path: self.path.clone(),
                    source,
                })?;
        }
        self.entries
            .write()
            .unwrap_or_else(|e| e.into_inner())
            .insert(key.to_owned(), verdict);
        Ok(())
    }
}

/// Returns the cached verdict for the pair, or classifies and stores it.
/// Errors from the scorer are returned without touching the cache.
pub fn cached_classify(
    cache: &VerdictCache,
    scorer: &dyn PairScorer,
    pair: &PairInput<'_>,
) -> Result<(Verdict, CacheOutcome), ScorerError> {
    let scorer_id = scorer.scorer_id();
    let key = VerdictCache::key(&scorer_id, &scorer.key_material(pair));
    if let Some(v) = cache.get(&key) {
        return Ok((v, CacheOutcome::Hit));
    }
    let verdict = scorer.classify(pair)?;
    cache.put(&key, &scorer_id, verdict)?;
    Ok((verdict, CacheOutcome::Miss))
}
