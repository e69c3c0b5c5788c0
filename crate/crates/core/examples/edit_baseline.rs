//! The normalized edit-similarity baseline on a few label pairs.
//!
//! ```bash
//! cargo run -p ontalign --example edit_baseline
//! ```

use ontalign::scorer::{edit_similarity_classify, levenshtein, EditSimilarityScorer};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tau = EditSimilarityScorer::DEFAULT_THRESHOLD;
    let cases: &[(&[&str], &[&str])] = &[
        (&["haemoglobin"], &["hemoglobin"]),
        (&["Myocardium"], &["myocardium", "heart muscle"]),
        (&["renal cyst"], &["kidney cyst", "cyst of kidney"]),
        (&["abc"], &["xyz"]),
    ];
    println!("threshold {tau:.3}");
    for (s, t) in cases {
        let v = edit_similarity_classify(s, t, tau)?;
        println!("{s:?} vs {t:?}: sim={:.4} answer={:?}", v.yes_prob.unwrap(), v.answer);
    }
    println!("levenshtein(kitten, sitting) = {}", levenshtein("kitten", "sitting"));
    Ok(())
}
