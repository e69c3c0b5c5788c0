//! Scores pairs against a throwaway local HTTP endpoint speaking the
//! `/classify` protocol, with verdicts persisted in a cache.
//!
//! ```bash
//! cargo run -p ontalign --example llm_stub_client
//! ```

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;

use ontalign::prompt::ConceptView;
use ontalign::scorer::{
    cached_classify, EndpointMode, LlmEndpointScorer, PairInput, ScorerKind, ScorerSpec, VerdictCache,
};
use ontalign::ConceptIri;

/// Answers Yes with high probability when the prompt mentions "muscle" twice.
fn serve(listener: TcpListener) {
    for stream in listener.incoming() {
        let Ok(mut stream) = stream else { return };
        let mut reader = BufReader::new(stream.try_clone().expect("clone"));
        let mut length = 0;
        loop {
            let mut line = String::new();
            if reader.read_line(&mut line).unwrap_or(0) == 0 || line == "\r\n" {
                break;
            }
            if let Some((name, value)) = line.split_once(':') {
                if name.eq_ignore_ascii_case("content-length") {
                    length = value.trim().parse().unwrap_or(0);
                }
            }
        }
        let mut body = vec![0; length];
        reader.read_exact(&mut body).expect("body");
        let request: serde_json::Value = serde_json::from_slice(&body).expect("json body");
        let prompt = request["prompt"].as_str().unwrap_or_default();
        let yes = if prompt.matches("muscle").count() >= 2 { 0.93 } else { 0.12 };
        let reply = serde_json::json!({ "probabilities": { "Yes": yes, "No": 1.0 - yes } }).to_string();
        let _ = write!(
            stream,
            "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{reply}",
            reply.len()
        );
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let listener = TcpListener::bind("127.0.0.1:0")?;
    let url = format!("http://{}", listener.local_addr()?);
    std::thread::spawn(move || serve(listener));

    let mut spec = ScorerSpec::new(ScorerKind::LlmEndpoint);
    spec.endpoint_url = Some(url);
    spec.model_id = Some("stub".into());
    let scorer = LlmEndpointScorer::new(&spec, EndpointMode::LabelProbabilities)?.with_api_key(None);

    let dir = tempfile::tempdir()?;
    let cache = VerdictCache::open(dir.path().join("verdicts.jsonl"))?;
    let source = ConceptIri::new("http://example.org/src/myocardium")?;
    let source_view = ConceptView::names_only(vec!["myocardium".into(), "heart muscle".into()]);
    let targets = [
        ("http://example.org/tgt/cardiac_muscle", "cardiac muscle tissue"),
        ("http://example.org/tgt/liver", "liver"),
    ];

    for round in 1..=2 {
        for (iri, name) in targets {
            let target = ConceptIri::new(iri)?;
            let target_view = ConceptView::names_only(vec![name.into()]);
            let input = PairInput {
                source: &source,
                target: &target,
                source_view: &source_view,
                target_view: &target_view,
                include_hierarchy: false,
            };
            let (verdict, outcome) = cached_classify(&cache, &scorer, &input)?;
            println!(
                "round {round} {name:<22} {:?} yes={:.2} ({outcome:?})",
                verdict.answer,
                verdict.yes_prob.unwrap_or(f64::NAN)
            );
        }
    }
    println!("cache holds {} verdicts", cache.len());
    Ok(())
}
