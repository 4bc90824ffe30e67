//! Token-sequence and count parity against the committed golden corpus.

use lenlift_core::wordcount::{count_words, tokenize};
use serde::Deserialize;

#[derive(Deserialize)]
struct GoldenRecord {
    id: String,
    text: String,
    tokens: Vec<String>,
    count: usize,
}

fn load_corpus() -> Vec<GoldenRecord> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/wordcount_golden.jsonl");
    let data = std::fs::read_to_string(path).expect("golden corpus must be present");
    data.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).expect("golden line must parse"))
        .collect()
}

#[test]
fn corpus_is_large_enough() {
    assert!(load_corpus().len() >= 200);
}

#[test]
fn token_sequences_match_reference() {
    let mut failures = Vec::new();
    for rec in load_corpus() {
        let got = tokenize(&rec.text);
        if got != rec.tokens {
            failures.push(format!(
                "{}: text={:?}\n  expected {:?}\n  got      {:?}",
                rec.id, rec.text, rec.tokens, got
            ));
        }
    }
    assert!(
        failures.is_empty(),
        "{} / corpus token mismatches:\n{}",
        failures.len(),
        failures.join("\n")
    );
}

#[test]
fn counts_match_reference() {
    for rec in load_corpus() {
        assert_eq!(
            count_words(&rec.text),
            rec.count,
            "count mismatch for {} ({:?})",
            rec.id,
            rec.text
        );
    }
}
