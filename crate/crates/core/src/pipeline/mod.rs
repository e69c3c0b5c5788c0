//! End-to-end orchestration: ingest → index → make-subset → score → evaluate.
//!
//! Each command reads its inputs from explicit paths or from the output
//! directory, writes its artifacts there, and records a manifest holding the
//! resolved configuration and SHA-256 digests of every input and output.

mod cli;
mod config;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dataset::{assemble_subset, derive_seed, DatasetError, ReferenceMappings, SubsetParams, TaskSubset};
use crate::eval::{build_report, read_scored_run, write_scored_run, EvalError, EvalReport, ReportSettings, ScoredMapping};
use crate::ontology::{parse_json_dump, parse_rdfxml, serialize_json_dump, Ontology, OntologyError, RdfXmlConfig};
use crate::prompt::{gather_context, ConceptView};
use crate::retrieval::{IndexError, InvertedIndex, SubwordVocab};
use crate::scorer::{
    cached_classify, Answer, CacheOutcome, EditSimilarityScorer, EndpointMode, LlmEndpointScorer,
    OracleScorer, PairInput, PairScorer, RandomScorer, ScorerError, ScorerKind, ScorerSpec, Verdict,
    VerdictCache, ENDPOINT_ENV,
};

pub use cli::{main_with_args, Cli};
pub use config::{LlmMode, RunConfig, ScorerChoice};

pub const SOURCE_DUMP: &str = "source.onto.json";
pub const TARGET_DUMP: &str = "target.onto.json";
pub const INDEX_FILE: &str = "index.json";
pub const SUBSET_FILE: &str = "subset.jsonl";
pub const SUBSET_REFERENCE_FILE: &str = "subset_reference.tsv";
pub const SCORED_FILE: &str = "scored.jsonl";
pub const REPORT_FILE: &str = "report.json";
pub const CACHE_FILE: &str = "verdicts.jsonl";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Ingest,
    Index,
    MakeSubset,
    Score,
    Evaluate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Ingest => "ingest",
            Self::Index => "index",
            Self::MakeSubset => "make-subset",
            Self::Score => "score",
            Self::Evaluate => "evaluate",
        }
    }

    pub fn manifest_name(self) -> String {
        format!("manifest.{}.json", self.name())
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("missing artifact {name} (expected at {})", .path.display())]
    MissingArtifact { name: String, path: PathBuf },
    #[error("endpoint failure: {0}")]
    Endpoint(ScorerError),
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", .path.display())]
    Ontology {
        path: PathBuf,
        #[source]
        source: OntologyError,
    },
    #[error("{}: {source}", .path.display())]
    Index {
        path: PathBuf,
        #[source]
        source: IndexError,
    },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Scorer(ScorerError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl PipelineError {
    /// 1 for configuration and general errors, 2 for a missing artifact, 3
    /// for an endpoint that failed after retries.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::MissingArtifact { .. } => 2,
            Self::Endpoint(_) => 3,
            _ => 1,
        }
    }
}

impl From<ScorerError> for PipelineError {
    fn from(e: ScorerError) -> Self {
        match e {
            ScorerError::Transport { .. } | ScorerError::Protocol(_) => Self::Endpoint(e),
            ScorerError::Config(m) => Self::Config(m),
            other => Self::Scorer(other),
        }
    }
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Ingested { source_concepts: usize, target_concepts: usize },
    Indexed { documents: usize, tokens: usize },
    SubsetMade { matched: usize, unmatched: usize, pairs: usize },
    Scored(ScoreSummary),
    Evaluated(EvalReport),
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Ingested {
                source_concepts,
                target_concepts,
            } => write!(f, "ingested {source_concepts} source and {target_concepts} target concepts"),
            Self::Indexed { documents, tokens } => {
                write!(f, "indexed {documents} target concepts over {tokens} tokens")
            }
            Self::SubsetMade {
                matched,
                unmatched,
                pairs,
            } => write!(f, "subset: {matched} matched + {unmatched} unmatched sources, {pairs} pairs"),
            Self::Scored(s) => write!(
                f,
                "scored {} pairs: {} cache hits, {} scorer invocations, {} unparseable",
                s.pairs, s.cache_hits, s.invocations, s.unparseable
            ),
            Self::Evaluated(r) => f.write_str(r.to_json().trim_end()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScoreSummary {
    pub pairs: usize,
    pub cache_hits: usize,
    pub invocations: usize,
    pub unparseable: usize,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'static str,
    config: &'a RunConfig,
    inputs: BTreeMap<String, String>,
    outputs: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    run: Option<serde_json::Value>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    out_dir: PathBuf,
    inputs: BTreeMap<String, String>,
    outputs: BTreeMap<String, String>,
}

impl<'a> Ctx<'a> {
    fn new(cfg: &'a RunConfig) -> Result<Self, PipelineError> {
        let out_dir = cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
        std::fs::create_dir_all(&out_dir).map_err(io_err(&out_dir))?;
        Ok(Self {
            cfg,
            out_dir,
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        })
    }

    fn artifact(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    /// Reads an input and records its digest.
    fn read(&mut self, name: &str, path: &Path) -> Result<Vec<u8>, PipelineError> {
        if !path.exists() {
            return Err(PipelineError::MissingArtifact {
                name: name.to_owned(),
                path: path.to_path_buf(),
            });
        }
        let bytes = std::fs::read(path).map_err(io_err(path))?;
        self.inputs.insert(name.to_owned(), sha256_hex(&bytes));
        Ok(bytes)
    }

    fn read_artifact(&mut self, name: &str) -> Result<Vec<u8>, PipelineError> {
        let path = self.artifact(name);
        self.read(name, &path)
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), PipelineError> {
        let path = self.artifact(name);
        std::fs::write(&path, bytes).map_err(io_err(&path))?;
        self.outputs.insert(name.to_owned(), sha256_hex(bytes));
        Ok(())
    }

    fn finish(self, command: Command, run: Option<serde_json::Value>) -> Result<(), PipelineError> {
        let manifest = Manifest {
            command: command.name(),
            config: self.cfg,
            inputs: self.inputs,
            outputs: self.outputs,
            run,
        };
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        let path = self.out_dir.join(command.manifest_name());
        std::fs::write(&path, text).map_err(io_err(&path))
    }

    fn ontology_artifact(&mut self, name: &str) -> Result<Ontology, PipelineError> {
        let bytes = self.read_artifact(name)?;
        parse_json_dump(&bytes).map_err(|source| PipelineError::Ontology {
            path: self.artifact(name),
            source,
        })
    }

    fn subset(&mut self) -> Result<TaskSubset, PipelineError> {
        let bytes = match self.cfg.subset.clone() {
            Some(path) => self.read(SUBSET_FILE, &path)?,
            None => self.read_artifact(SUBSET_FILE)?,
        };
        Ok(TaskSubset::from_jsonl(&bytes, self.subset_seed())?)
    }

    /// `--seed` if given, otherwise the seed recorded by make-subset.
    fn subset_seed(&self) -> u64 {
        self.cfg.seed.unwrap_or_else(|| {
            std::fs::read(self.artifact(&Command::MakeSubset.manifest_name()))
                .ok()
                .and_then(|b| serde_json::from_slice::<serde_json::Value>(&b).ok())
                .and_then(|v| v["config"]["seed"].as_u64())
                .unwrap_or(0)
        })
    }
}

/// Parses an ontology file: a JSON dump if it starts with `{`, RDF/XML
/// otherwise.
pub fn load_ontology(bytes: &[u8]) -> Result<Ontology, OntologyError> {
    let first = bytes.iter().copied().find(|b| !b.is_ascii_whitespace());
    if first == Some(b'{') {
        parse_json_dump(bytes)
    } else {
        parse_rdfxml(bytes, &RdfXmlConfig::default())
    }
}

/// Runs one command with an already validated configuration.
pub fn run(command: Command, cfg: &RunConfig) -> Result<Outcome, PipelineError> {
    cfg.validate(command)?;
    match command {
        Command::Ingest => ingest(cfg),
        Command::Index => index(cfg),
        Command::MakeSubset => make_subset(cfg),
        Command::Score => score(cfg),
        Command::Evaluate => evaluate(cfg),
    }
}

fn ingest(cfg: &RunConfig) -> Result<Outcome, PipelineError> {
    let mut ctx = Ctx::new(cfg)?;
    let mut load = |name: &str, path: &Path, out: &str| -> Result<usize, PipelineError> {
        let bytes = ctx.read(name, path)?;
        let onto = load_ontology(&bytes).map_err(|source| PipelineError::Ontology {
            path: path.to_path_buf(),
            source,
        })?;
        ctx.write(out, &serialize_json_dump(&onto))?;
        Ok(onto.len())
    };
    let source_concepts = load("src-onto", cfg.src_onto.as_deref().expect("validated"), SOURCE_DUMP)?;
    let target_concepts = load("tgt-onto", cfg.tgt_onto.as_deref().expect("validated"), TARGET_DUMP)?;
    ctx.finish(Command::Ingest, None)?;
    Ok(Outcome::Ingested {
        source_concepts,
        target_concepts,
    })
}

fn index(cfg: &RunConfig) -> Result<Outcome, PipelineError> {
    let mut ctx = Ctx::new(cfg)?;
    let target = ctx.ontology_artifact(TARGET_DUMP)?;
    let vocab = match cfg.vocab.clone() {
        Some(path) => {
            let bytes = ctx.read("vocab", &path)?;
            SubwordVocab::from_vocab_text(&String::from_utf8_lossy(&bytes))
        }
        None => SubwordVocab::builtin(),
    };
    let ix = InvertedIndex::build(&target, &vocab);
    ctx.write(INDEX_FILE, &ix.to_json())?;
    ctx.finish(Command::Index, None)?;
    Ok(Outcome::Indexed {
        documents: ix.doc_count(),
        tokens: ix.postings().len(),
    })
}

fn make_subset(cfg: &RunConfig) -> Result<Outcome, PipelineError> {
    let mut ctx = Ctx::new(cfg)?;
    let source = ctx.ontology_artifact(SOURCE_DUMP)?;
    let target = ctx.ontology_artifact(TARGET_DUMP)?;
    let index_bytes = ctx.read_artifact(INDEX_FILE)?;
    let ix = InvertedIndex::from_json(&index_bytes).map_err(|source| PipelineError::Index {
        path: ctx.artifact(INDEX_FILE),
        source,
    })?;
    let refs_bytes = ctx.read("refs", cfg.refs.as_deref().expect("validated"))?;
    let reference = ReferenceMappings::from_tsv(&String::from_utf8_lossy(&refs_bytes))?;
    let params = cfg.subset_params();
    let (subset, alignment) = assemble_subset(&source, &target, &reference, &ix, &params)?;
    ctx.write(SUBSET_FILE, &subset.to_jsonl())?;
    let matched = ReferenceMappings::from_pairs(alignment.matched.iter().cloned());
    ctx.write(SUBSET_REFERENCE_FILE, matched.to_tsv().as_bytes())?;
    ctx.finish(Command::MakeSubset, None)?;
    Ok(Outcome::SubsetMade {
        matched: subset.matched_sets.len(),
        unmatched: subset.unmatched_sets.len(),
        pairs: subset.total_pairs(),
    })
}

/// The scorer described by `cfg`, for pairs drawn from `subset`.
pub fn build_scorer(cfg: &RunConfig, subset: &TaskSubset) -> Result<Box<dyn PairScorer>, PipelineError> {
    let spec = cfg.scorer_spec()?;
    Ok(match spec.kind {
        ScorerKind::Mock => match spec.model_id.as_deref() {
            Some("random") => Box::new(RandomScorer {
                seed: subset.seed,
            }),
            None | Some("oracle") => Box::new(OracleScorer::new(subset.reference().matched)),
            Some(other) => {
                return Err(PipelineError::Config(format!(
                    "unknown mock model {other:?} (expected oracle or random)"
                )))
            }
        },
        ScorerKind::EditSimilarity => Box::new(EditSimilarityScorer::new(
            cfg.threshold.unwrap_or(EditSimilarityScorer::DEFAULT_THRESHOLD),
        )),
        ScorerKind::LlmEndpoint => {
            let mode = match cfg.llm_mode.unwrap_or_default() {
                LlmMode::Classify => EndpointMode::LabelProbabilities,
                LlmMode::Complete => EndpointMode::Completion {
                    max_tokens: cfg.max_tokens.unwrap_or(64),
                },
            };
            Box::new(LlmEndpointScorer::new(&spec, mode)?)
        }
    })
}

fn score(cfg: &RunConfig) -> Result<Outcome, PipelineError> {
    let mut ctx = Ctx::new(cfg)?;
    let subset = ctx.subset()?;
    let source = ctx.ontology_artifact(SOURCE_DUMP)?;
    let target = ctx.ontology_artifact(TARGET_DUMP)?;
    let scorer = build_scorer(cfg, &subset)?;
    let include_hierarchy = cfg.with_hierarchy.unwrap_or(false);
    let cap = cfg.context_cap();

    let mut views: BTreeMap<(bool, &crate::ConceptIri), ConceptView> = BTreeMap::new();
    for (s, t) in subset.pairs() {
        for (is_source, onto, iri) in [(true, &source, s), (false, &target, t)] {
            if views.contains_key(&(is_source, iri)) {
                continue;
            }
            let view = gather_context(onto, iri, cap, derive_seed(subset.seed, iri.as_str())).map_err(
                |source| PipelineError::Ontology {
                    path: ctx.artifact(if is_source { SOURCE_DUMP } else { TARGET_DUMP }),
                    source,
                },
            )?;
            views.insert((is_source, iri), view);
        }
    }

    let cache_dir = cfg.cache_dir.clone().unwrap_or_else(|| ctx.out_dir.join("cache"));
    let cache = VerdictCache::open(cache_dir.join(CACHE_FILE)).map_err(ScorerError::from)?;
    let pairs: Vec<_> = subset.pairs().collect();
    let results: Vec<Mutex<Option<Verdict>>> = pairs.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let (hits, invocations, unparseable) = (AtomicUsize::new(0), AtomicUsize::new(0), AtomicUsize::new(0));
    let failed = AtomicBool::new(false);
    let first_error: Mutex<Option<ScorerError>> = Mutex::new(None);
    let workers = cfg.concurrency.unwrap_or(4).min(pairs.len()).max(1);

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                if failed.load(Ordering::SeqCst) {
                    return;
                }
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(&(s, t)) = pairs.get(i) else { return };
                let input = PairInput {
                    source: s,
                    target: t,
                    source_view: &views[&(true, s)],
                    target_view: &views[&(false, t)],
                    include_hierarchy,
                };
                let verdict = match cached_classify(&cache, scorer.as_ref(), &input) {
                    Ok((v, outcome)) => {
                        let counter = if outcome == CacheOutcome::Hit { &hits } else { &invocations };
                        counter.fetch_add(1, Ordering::SeqCst);
                        v
                    }
                    Err(ScorerError::Unparseable { .. }) => {
                        invocations.fetch_add(1, Ordering::SeqCst);
                        unparseable.fetch_add(1, Ordering::SeqCst);
                        Verdict::text_only(Answer::No)
                    }
                    Err(e) => {
                        failed.store(true, Ordering::SeqCst);
                        first_error.lock().unwrap().get_or_insert(e);
                        return;
                    }
                };
                *results[i].lock().unwrap() = Some(verdict);
            });
        }
    });
    if let Some(e) = first_error.into_inner().unwrap() {
        return Err(e.into());
    }

    let scored: Vec<ScoredMapping> = pairs
        .iter()
        .zip(results)
        .map(|(&(s, t), v)| ScoredMapping::new(s.clone(), t.clone(), v.into_inner().unwrap().expect("every pair scored")))
        .collect();
    ctx.write(SCORED_FILE, &write_scored_run(&scored))?;
    let summary = ScoreSummary {
        pairs: scored.len(),
        cache_hits: hits.into_inner(),
        invocations: invocations.into_inner(),
        unparseable: unparseable.into_inner(),
    };
    let run = serde_json::json!({
        "scorer_id": scorer.scorer_id(),
        "with_hierarchy": include_hierarchy,
        "seed": subset.seed,
        "unparseable": summary.unparseable,
    });
    ctx.finish(Command::Score, Some(run))?;
    Ok(Outcome::Scored(summary))
}

fn evaluate(cfg: &RunConfig) -> Result<Outcome, PipelineError> {
    let mut ctx = Ctx::new(cfg)?;
    let subset = ctx.subset()?;
    let scored_bytes = ctx.read_artifact(SCORED_FILE)?;
    let scored = read_scored_run(&scored_bytes)?;
    let score_manifest = ctx.read_artifact(&Command::Score.manifest_name())?;
    let run: serde_json::Value = serde_json::from_slice(&score_manifest)
        .map_err(|e| PipelineError::Config(format!("unreadable score manifest: {e}")))?;
    let settings = ReportSettings {
        threshold: cfg.threshold.unwrap_or(0.0),
        with_hierarchy: run["run"]["with_hierarchy"].as_bool().unwrap_or(false),
        scorer_id: run["run"]["scorer_id"].as_str().unwrap_or_default().to_owned(),
        seed: subset.seed,
    };
    let reference = subset.reference();
    let report = build_report(&subset, &reference, &scored, settings)?;
    ctx.write(REPORT_FILE, report.to_json().as_bytes())?;
    ctx.finish(Command::Evaluate, None)?;
    Ok(Outcome::Evaluated(report))
}

impl RunConfig {
    pub fn subset_params(&self) -> SubsetParams {
        let d = SubsetParams::default();
        SubsetParams {
            n_matched: self.n_matched.unwrap_or(d.n_matched),
            n_unmatched: self.n_unmatched.unwrap_or(d.n_unmatched),
            candidate_size: self.candidates.unwrap_or(d.candidate_size),
            seed: self.seed.unwrap_or(d.seed),
        }
    }

    pub fn context_cap(&self) -> usize {
        self.context_cap.unwrap_or(crate::prompt::DEFAULT_CONTEXT_CAP)
    }

    /// The endpoint URL falls back to `ALIGN_LLM_ENDPOINT`.
    pub fn scorer_spec(&self) -> Result<ScorerSpec, PipelineError> {
        let kind = match self.scorer.unwrap_or(ScorerChoice::Mock) {
            ScorerChoice::Llm => ScorerKind::LlmEndpoint,
            ScorerChoice::Edit => ScorerKind::EditSimilarity,
            ScorerChoice::Mock => ScorerKind::Mock,
        };
        let mut spec = ScorerSpec::new(kind);
        spec.endpoint_url = self
            .endpoint
            .clone()
            .or_else(|| std::env::var(ENDPOINT_ENV).ok().filter(|s| !s.is_empty()));
        spec.model_id = self.model.clone();
        spec.concurrency_limit = self.concurrency.unwrap_or(spec.concurrency_limit);
        if let Some(n) = self.max_attempts {
            spec.retry.max_attempts = n;
        }
        if let Some(ms) = self.backoff_ms {
            spec.retry.backoff_base_ms = ms;
        }
        spec.validate()?;
        Ok(spec)
    }
}
