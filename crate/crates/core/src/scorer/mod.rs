//! Yes/No classifiers for concept pairs.
//!
//! Every scorer implements [`PairScorer`]. Verdicts carry the probabilities of
//! the two answer labels when the scorer can provide them; text-only scorers
//! leave them out, which makes their verdicts ineligible for ranking.

mod cache;
mod completion;
mod edit;
mod endpoint;
mod mock;

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ontology::ConceptIri;
use crate::prompt::{render_prompt, ConceptView};

pub use cache::{cached_classify, CacheError, CacheOutcome, VerdictCache};
pub use completion::{parse_completion_answer, ParsedAnswer};
pub use edit::{
    edit_similarity, edit_similarity_classify, levenshtein, normalized_edit_similarity,
    EditSimilarityScorer,
};
pub use endpoint::{EndpointMode, LlmEndpointScorer, API_KEY_ENV, ENDPOINT_ENV};
pub use mock::{OracleScorer, RandomScorer};

/// Slack allowed on `yes + no <= 1`.
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ScorerError {
    #[error("endpoint request failed after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("endpoint protocol error: {0}")]
    Protocol(String),
    #[error("no yes/no answer found in completion {text:?}")]
    Unparseable { text: String },
    #[error("invalid verdict: {0}")]
    InvalidVerdict(String),
    #[error("empty label list for {0}")]
    EmptyLabels(&'static str),
    #[error("empty prompt")]
    EmptyPrompt,
    #[error("invalid scorer configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Cache(#[from] CacheError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Answer {
    Yes,
    No,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub answer: Answer,
    pub yes_prob: Option<f64>,
    pub no_prob: Option<f64>,
}

fn check_probability(name: &str, p: f64) -> Result<(), ScorerError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ScorerError::InvalidVerdict(format!(
            "{name} probability {p} outside [0, 1]"
        )));
    }
    Ok(())
}

impl Verdict {
    /// Answer is the larger of the two probabilities; a tie answers No.
    pub fn from_probabilities(yes: f64, no: f64) -> Result<Self, ScorerError> {
        check_probability("Yes", yes)?;
        check_probability("No", no)?;
        if yes + no > 1.0 + PROBABILITY_SUM_TOLERANCE {
            return Err(ScorerError::InvalidVerdict(format!(
                "probabilities sum to {} > 1",
                yes + no
            )));
        }
        let answer = if yes > no { Answer::Yes } else { Answer::No };
        Ok(Self {
            answer,
            yes_prob: Some(yes),
            no_prob: Some(no),
        })
    }

    /// Explicit answer with probabilities attached, for scorers whose answer
    /// is decided by a rule other than argmax.
    pub fn with_answer(answer: Answer, yes: f64, no: f64) -> Result<Self, ScorerError> {
        check_probability("Yes", yes)?;
        check_probability("No", no)?;
        Ok(Self {
            answer,
            yes_prob: Some(yes),
            no_prob: Some(no),
        })
    }

    pub fn text_only(answer: Answer) -> Self {
        Self {
            answer,
            yes_prob: None,
            no_prob: None,
        }
    }

    pub fn is_yes(&self) -> bool {
        self.answer == Answer::Yes
    }

    pub fn has_probabilities(&self) -> bool {
        self.yes_prob.is_some() && self.no_prob.is_some()
    }
}

/// Everything a scorer may look at for one (source, target) pair.
#[derive(Debug, Clone, Copy)]
pub struct PairInput<'a> {
    pub source: &'a ConceptIri,
    pub target: &'a ConceptIri,
    pub source_view: &'a ConceptView,
    pub target_view: &'a ConceptView,
    pub include_hierarchy: bool,
}

impl PairInput<'_> {
    pub fn prompt(&self) -> String {
        render_prompt(self.source_view, self.target_view, self.include_hierarchy)
    }
}

pub trait PairScorer: Send + Sync {
    /// Stable identifier; part of every cache key.
    fn scorer_id(&self) -> String;

    /// Canonical description of what the verdict depends on.
    fn key_material(&self, pair: &PairInput<'_>) -> String;

    fn classify(&self, pair: &PairInput<'_>) -> Result<Verdict, ScorerError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScorerKind {
    LlmEndpoint,
    EditSimilarity,
    Mock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub backoff_base_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 3,
            backoff_base_ms: 250,
        }
    }
}

impl RetryPolicy {
    /// Delay before retry number `retry` (1-based): base × 2^(retry−1).
    pub fn backoff(&self, retry: u32) -> Duration {
        Duration::from_millis(self.backoff_base_ms.saturating_mul(1u64 << (retry - 1).min(16)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScorerSpec {
    pub kind: ScorerKind,
    pub endpoint_url: Option<String>,
    pub model_id: Option<String>,
    pub concurrency_limit: usize,
    pub retry: RetryPolicy,
}

impl ScorerSpec {
    pub fn new(kind: ScorerKind) -> Self {
        Self {
            kind,
            endpoint_url: None,
            model_id: None,
            concurrency_limit: 4,
            retry: RetryPolicy::default(),
        }
    }

    pub fn validate(&self) -> Result<(), ScorerError> {
        if self.kind == ScorerKind::LlmEndpoint && self.endpoint_url.as_deref().is_none_or(str::is_empty) {
            return Err(ScorerError::Config("llm-endpoint scorer requires an endpoint URL".into()));
        }
        if self.concurrency_limit == 0 {
            return Err(ScorerError::Config("concurrency limit must be at least 1".into()));
        }
        if self.retry.max_attempts == 0 {
            return Err(ScorerError::Config("retry policy needs at least one attempt".into()));
        }
        Ok(())
    }
}
