use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use super::{Command, PipelineError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ScorerChoice {
    Llm,
    Edit,
    Mock,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum LlmMode {
    /// Label probabilities from `/classify`.
    #[default]
    Classify,
    /// Free text from `/complete`.
    Complete,
}

/// Run configuration. Every field is optional so that a config file and the
/// command line can be layered; unset fields take their documented defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub src_onto: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tgt_onto: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refs: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vocab: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subset: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_matched: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_unmatched: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidates: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scorer: Option<ScorerChoice>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub endpoint: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub llm_mode: Option<LlmMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_tokens: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub concurrency: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_attempts: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backoff_ms: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub with_hierarchy: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub context_cap: Option<usize>,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($field:ident),+) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field; } )+
    };
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self, PipelineError> {
        let bytes = std::fs::read(path)
            .map_err(|e| PipelineError::Config(format!("config {}: {e}", path.display())))?;
        serde_json::from_slice(&bytes)
            .map_err(|e| PipelineError::Config(format!("config {}: {e}", path.display())))
    }

    /// Fields set in `top` replace those in `self`.
    pub fn overlay(mut self, top: RunConfig) -> Self {
        overlay!(
            self, top, src_onto, tgt_onto, refs, vocab, subset, cache_dir, out_dir, n_matched,
            n_unmatched, candidates, seed, scorer, endpoint, model, llm_mode, max_tokens, concurrency,
            max_attempts, backoff_ms, threshold, with_hierarchy, context_cap
        );
        self
    }

    fn require_file(name: &str, path: Option<&Path>) -> Result<(), PipelineError> {
        match path {
            None => Err(PipelineError::Config(format!("--{name} is required"))),
            Some(p) => Self::existing(name, Some(p)),
        }
    }

    fn existing(name: &str, path: Option<&Path>) -> Result<(), PipelineError> {
        match path {
            Some(p) if !p.is_file() => Err(PipelineError::Config(format!(
                "--{name} {} does not exist",
                p.display()
            ))),
            _ => Ok(()),
        }
    }

    pub fn validate(&self, command: Command) -> Result<(), PipelineError> {
        for (name, value) in [
            ("n-matched", self.n_matched),
            ("n-unmatched", self.n_unmatched),
            ("candidates", self.candidates),
            ("concurrency", self.concurrency),
            ("context-cap", self.context_cap),
        ] {
            if value == Some(0) {
                return Err(PipelineError::Config(format!("--{name} must be positive")));
            }
        }
        if let Some(t) = self.threshold {
            if !(0.0..=1.0).contains(&t) {
                return Err(PipelineError::Config(format!("--threshold {t} outside [0, 1]")));
            }
        }
        Self::existing("vocab", self.vocab.as_deref())?;
        Self::existing("subset", self.subset.as_deref())?;
        match command {
            Command::Ingest => {
                Self::require_file("src-onto", self.src_onto.as_deref())?;
                Self::require_file("tgt-onto", self.tgt_onto.as_deref())?;
            }
            Command::Index => {}
            Command::MakeSubset => {
                Self::require_file("refs", self.refs.as_deref())?;
                if self.seed.is_none() {
                    return Err(PipelineError::Config("make-subset requires --seed".into()));
                }
            }
            Command::Score => {
                self.scorer_spec()?;
            }
            Command::Evaluate => {}
        }
        Ok(())
    }
}
