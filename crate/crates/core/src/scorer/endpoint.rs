//! HTTP client for a remote Yes/No classifier.

use std::sync::{Condvar, Mutex};
use std::time::Duration;

use serde::Deserialize;
use serde_json::json;

use super::{
    parse_completion_answer, PairInput, PairScorer, ParsedAnswer, RetryPolicy, ScorerError,
    ScorerKind, ScorerSpec, Verdict,
};

pub const API_KEY_ENV: &str = "ALIGN_LLM_API_KEY";
pub const ENDPOINT_ENV: &str = "ALIGN_LLM_ENDPOINT";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndpointMode {
    /// `POST /classify`, returns probabilities for both labels.
    LabelProbabilities,
    /// `POST /complete`, returns free text to be parsed.
    Completion { max_tokens: u32 },
}

impl EndpointMode {
    fn path(&self) -> &'static str {
        match self {
            Self::LabelProbabilities => "classify",
            Self::Completion { .. } => "complete",
        }
    }
}

struct Semaphore {
    free: Mutex<usize>,
    cv: Condvar,
}

struct Permit<'a>(&'a Semaphore);

impl Semaphore {
    fn new(n: usize) -> Self {
        Self {
            free: Mutex::new(n),
            cv: Condvar::new(),
        }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut free = self.free.lock().unwrap_or_else(|e| e.into_inner());
        while *free == 0 {
            free = self.cv.wait(free).unwrap_or_else(|e| e.into_inner());
        }
        *free -= 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().unwrap_or_else(|e| e.into_inner()) += 1;
        self.0.cv.notify_one();
    }
}

#[derive(Deserialize)]
struct ClassifyResponse {
    probabilities: serde_json::Map<String, serde_json::Value>,
}

#[derive(Deserialize)]
struct CompleteResponse {
    text: String,
}

enum Attempt {
    Done(Vec<u8>),
    Retryable(String),
    Fatal(String),
}

/// Scores pairs by sending the rendered prompt to an endpoint.
pub struct LlmEndpointScorer {
    agent: ureq::Agent,
    base_url: String,
    model: String,
    api_key: Option<String>,
    mode: EndpointMode,
    retry: RetryPolicy,
    permits: Semaphore,
}

impl std::fmt::Debug for LlmEndpointScorer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LlmEndpointScorer")
            .field("base_url", &self.base_url)
            .field("model", &self.model)
            .field("mode", &self.mode)
            .finish_non_exhaustive()
    }
}

impl LlmEndpointScorer {
    /// The API key is read from `ALIGN_LLM_API_KEY` if set.
    pub fn new(spec: &ScorerSpec, mode: EndpointMode) -> Result<Self, ScorerError> {
        if spec.kind != ScorerKind::LlmEndpoint {
            return Err(ScorerError::Config(format!("spec kind is {:?}", spec.kind)));
        }
        spec.validate()?;
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(120)))
            .build()
            .into();
        Ok(Self {
            agent,
            base_url: spec
                .endpoint_url
                .clone()
                .unwrap_or_default()
                .trim_end_matches('/')
                .to_owned(),
            model: spec.model_id.clone().unwrap_or_default(),
            api_key: std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty()),
            mode,
            retry: spec.retry,
            permits: Semaphore::new(spec.concurrency_limit),
        })
    }

    pub fn with_api_key(mut self, key: Option<String>) -> Self {
        self.api_key = key;
        self
    }

    pub fn mode(&self) -> EndpointMode {
        self.mode
    }

    fn attempt(&self, url: &str, body: &serde_json::Value) -> Attempt {
        let _permit = self.permits.acquire();
        let mut request = self.agent.post(url);
        if let Some(key) = &self.api_key {
            request = request.header("Authorization", &format!("Bearer {key}"));
        }
        let mut response = match request.send_json(body) {
            Ok(r) => r,
            Err(e) => return Attempt::Retryable(e.to_string()),
        };
        let status = response.status().as_u16();
        let bytes = match response.body_mut().read_to_vec() {
            Ok(b) => b,
            Err(e) => return Attempt::Retryable(e.to_string()),
        };
        match status {
            200..=299 => Attempt::Done(bytes),
            429 | 500..=599 => Attempt::Retryable(format!("HTTP {status}")),
            _ => Attempt::Fatal(format!("HTTP {status}")),
        }
    }

    fn post(&self, body: serde_json::Value) -> Result<Vec<u8>, ScorerError> {
        let url = format!("{}/{}", self.base_url, self.mode.path());
        let mut attempts = 0;
        loop {
            attempts += 1;
            match self.attempt(&url, &body) {
                Attempt::Done(bytes) => return Ok(bytes),
                Attempt::Fatal(message) => return Err(ScorerError::Transport { attempts, message }),
                Attempt::Retryable(message) => {
                    if attempts >= self.retry.max_attempts {
                        return Err(ScorerError::Transport { attempts, message });
                    }
                    std::thread::sleep(self.retry.backoff(attempts));
                }
            }
        }
    }

    /// Classifies one rendered prompt.
    pub fn classify_prompt(&self, prompt: &str) -> Result<Verdict, ScorerError> {
        if prompt.trim().is_empty() {
            return Err(ScorerError::EmptyPrompt);
        }
        match self.mode {
            EndpointMode::LabelProbabilities => {
                let bytes = self.post(json!({
                    "model": self.model,
                    "prompt": prompt,
                    "labels": ["Yes", "No"],
                }))?;
                let response: ClassifyResponse = serde_json::from_slice(&bytes)
                    .map_err(|e| ScorerError::Protocol(format!("bad classify response: {e}")))?;
                let label = |name: &str| -> Result<f64, ScorerError> {
                    response
                        .probabilities
                        .get(name)
                        .and_then(serde_json::Value::as_f64)
                        .ok_or_else(|| ScorerError::Protocol(format!("response lacks label {name:?}")))
                };
                let (yes, no) = (label("Yes")?, label("No")?);
                Verdict::from_probabilities(yes, no).map_err(|e| ScorerError::Protocol(e.to_string()))
            }
            EndpointMode::Completion { max_tokens } => {
                let bytes = self.post(json!({
                    "model": self.model,
                    "prompt": prompt,
                    "max_tokens": max_tokens,
                }))?;
                let response: CompleteResponse = serde_json::from_slice(&bytes)
                    .map_err(|e| ScorerError::Protocol(format!("bad complete response: {e}")))?;
                match parse_completion_answer(&response.text) {
                    ParsedAnswer::Answer(a) => Ok(Verdict::text_only(a)),
                    ParsedAnswer::Unparseable => Err(ScorerError::Unparseable {
                        text: response.text,
                    }),
                }
            }
        }
    }
}

impl PairScorer for LlmEndpointScorer {
    fn scorer_id(&self) -> String {
        match self.mode {
            EndpointMode::LabelProbabilities => format!("llm-classify:{}", self.model),
            EndpointMode::Completion { max_tokens } => {
                format!("llm-complete:{}:{max_tokens}", self.model)
            }
        }
    }

    fn key_material(&self, pair: &PairInput<'_>) -> String {
        pair.prompt()
    }

    fn classify(&self, pair: &PairInput<'_>) -> Result<Verdict, ScorerError> {
        self.classify_prompt(&pair.prompt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn requires_endpoint_kind_and_url() {
        let spec = ScorerSpec::new(ScorerKind::Mock);
        assert!(LlmEndpointScorer::new(&spec, EndpointMode::LabelProbabilities).is_err());
        let spec = ScorerSpec::new(ScorerKind::LlmEndpoint);
        assert!(LlmEndpointScorer::new(&spec, EndpointMode::LabelProbabilities).is_err());
    }

    #[test]
    fn empty_prompt_rejected_without_request() {
        let mut spec = ScorerSpec::new(ScorerKind::LlmEndpoint);
        spec.endpoint_url = Some("http://127.0.0.1:9/".into());
        let s = LlmEndpointScorer::new(&spec, EndpointMode::LabelProbabilities).unwrap();
        assert!(matches!(s.classify_prompt("  "), Err(ScorerError::EmptyPrompt)));
        assert_eq!(s.base_url, "http://127.0.0.1:9");
    }

    #[test]
    fn unreachable_endpoint_is_transport_error_after_retries() {
        let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
        let port = listener.local_addr().unwrap().port();
        drop(listener);
        let mut spec = ScorerSpec::new(ScorerKind::LlmEndpoint);
        spec.endpoint_url = Some(format!("http://127.0.0.1:{port}"));
        spec.retry = RetryPolicy {
            max_attempts: 2,
            backoff_base_ms: 1,
        };
        let s = LlmEndpointScorer::new(&spec, EndpointMode::LabelProbabilities).unwrap();
        match s.classify_prompt("hello") {
            Err(ScorerError::Transport { attempts, .. }) => assert_eq!(attempts, 2),
            other => panic!("unexpected {other:?}"),
        }
    }
}
