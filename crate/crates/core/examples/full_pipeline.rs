//! Runs ingest → index → make-subset → score → evaluate on a synthetic
//! ontology pair, once with the oracle mock and once with the edit-similarity
//! baseline.
//!
//! ```bash
//! cargo run -p ontalign --example full_pipeline
//! ```

use ontalign::ontology::serialize_json_dump;
use ontalign::pipeline::{run, Command, RunConfig, ScorerChoice};
use ontalign::synthetic::synthetic_pair;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let pair = synthetic_pair(300, 80, 11);
    let src = dir.path().join("source.json");
    let tgt = dir.path().join("target.json");
    let refs = dir.path().join("refs.tsv");
    std::fs::write(&src, serialize_json_dump(&pair.source))?;
    std::fs::write(&tgt, serialize_json_dump(&pair.target))?;
    std::fs::write(&refs, pair.reference.to_tsv())?;

    let base = RunConfig {
        src_onto: Some(src),
        tgt_onto: Some(tgt),
        refs: Some(refs),
        seed: Some(42),
        n_matched: Some(5),
        n_unmatched: Some(5),
        candidates: Some(10),
        ..Default::default()
    };

    for (scorer, threshold) in [(ScorerChoice::Mock, None), (ScorerChoice::Edit, Some(0.9))] {
        let cfg = RunConfig {
            scorer: Some(scorer),
            threshold,
            with_hierarchy: Some(true),
            out_dir: Some(dir.path().join(format!("{scorer:?}").to_lowercase())),
            ..base.clone()
        };
        println!("== {scorer:?}");
        for command in [
            Command::Ingest,
            Command::Index,
            Command::MakeSubset,
            Command::Score,
            Command::Evaluate,
        ] {
            println!("[{}] {}", command.name(), run(command, &cfg)?);
        }
    }
    Ok(())
}
