use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::{run, Command, LlmMode, RunConfig, ScorerChoice};

#[derive(Debug, Parser)]
#[command(name = "ontalign", version, about = "Zero-shot ontology alignment pipeline")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Parse both ontologies into canonical JSON dumps.
    Ingest(Flags),
    /// Build the target-side subword inverted index.
    Index(Flags),
    /// Sample the evaluation subset and its candidate sets.
    MakeSubset(Flags),
    /// Classify every subset pair, resuming from the verdict cache.
    Score(Flags),
    /// Compute metrics for a scored run.
    Evaluate(Flags),
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// JSON config file; flags take precedence over its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub src_onto: Option<PathBuf>,
    #[arg(long)]
    pub tgt_onto: Option<PathBuf>,
    /// Reference mappings TSV (SrcEntity, TgtEntity, Score).
    #[arg(long)]
    pub refs: Option<PathBuf>,
    /// Subword vocabulary, one piece per line; built-in vocabulary if absent.
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// Subset JSONL; defaults to subset.jsonl in the output directory.
    #[arg(long)]
    pub subset: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub scorer: Option<ScorerChoice>,
    /// Endpoint base URL; falls back to ALIGN_LLM_ENDPOINT.
    #[arg(long)]
    pub endpoint: Option<String>,
    /// Model id sent to the endpoint; for the mock scorer, `oracle` or `random`.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long, value_enum)]
    pub llm_mode: Option<LlmMode>,
    #[arg(long)]
    pub max_tokens: Option<u32>,
    /// Maximum in-flight scorer calls.
    #[arg(long)]
    pub concurrency: Option<usize>,
    #[arg(long)]
    pub max_attempts: Option<u32>,
    #[arg(long)]
    pub backoff_ms: Option<u64>,
    /// Yes-probability threshold (0 keeps every Yes). Also the edit scorer's
    /// decision threshold when scoring.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub with_hierarchy: bool,
    #[arg(long)]
    pub context_cap: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n_matched: Option<usize>,
    #[arg(long)]
    pub n_unmatched: Option<usize>,
    #[arg(long)]
    pub candidates: Option<usize>,
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

impl Flags {
    fn into_config(self) -> RunConfig {
        RunConfig {
            src_onto: self.src_onto,
            tgt_onto: self.tgt_onto,
            refs: self.refs,
            vocab: self.vocab,
            subset: self.subset,
            cache_dir: self.cache_dir,
            out_dir: self.out_dir,
            n_matched: self.n_matched,
            n_unmatched: self.n_unmatched,
            candidates: self.candidates,
            seed: self.seed,
            scorer: self.scorer,
            endpoint: self.endpoint,
            model: self.model,
            llm_mode: self.llm_mode,
            max_tokens: self.max_tokens,
            concurrency: self.concurrency,
            max_attempts: self.max_attempts,
            backoff_ms: self.backoff_ms,
            threshold: self.threshold,
            with_hierarchy: self.with_hierarchy.then_some(true),
            context_cap: self.context_cap,
        }
    }
}

impl CliCommand {
    fn split(self) -> (Command, Flags) {
        match self {
            Self::Ingest(f) => (Command::Ingest, f),
            Self::Index(f) => (Command::Index, f),
            Self::MakeSubset(f) => (Command::MakeSubset, f),
            Self::Score(f) => (Command::Score, f),
            Self::Evaluate(f) => (Command::Evaluate, f),
        }
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (command, mut flags) = cli.command.split();
    let file = match flags.config.take() {
        Some(path) => match RunConfig::from_json_file(&path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return e.exit_code();
            }
        },
        None => RunConfig::default(),
    };
    let cfg = file.overlay(flags.into_config());
    match run(command, &cfg) {
        Ok(outcome) => {
            println!("{outcome}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
