//! Length-instructed benchmark construction.
//!
//! Targets come from reference-model generations: each prompt's limit is
//! the minimum reference word count, and the baseline answer is a shortest
//! reference response, so the baseline always satisfies the limit it
//! defines. Multi-constraint builds reuse the k reference lengths as k
//! separate targets per prompt. Scaling shrinks targets by a factor and
//! drops baselines that no longer comply.

use crate::datamodel::{BenchmarkEntry, JsonlRecord};
use crate::lift::render_template;
use crate::wordcount::count_words;
use regex::Regex;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};
use std::sync::LazyLock;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("prompts without reference generations: {}", .0.join(", "))]
    MissingReferences(Vec<String>),
    #[error("prompts with fewer than {needed} reference generations: {}", ids.join(", "))]
    InsufficientReferences { needed: usize, ids: Vec<String> },
    #[error("scale factor {0} outside (0, 1]")]
    BadFactor(f64),
    #[error("multi-constraint count must be at least 1")]
    ZeroConstraints,
}

/// One reference-model response used for target and baseline selection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceGeneration {
    pub prompt_id: String,
    pub model_label: String,
    pub response: String,
}

impl JsonlRecord for ReferenceGeneration {
    fn validate(&self) -> Result<(), String> {
        if self.prompt_id.is_empty() {
            return Err("field prompt_id must be non-empty".into());
        }
        if self.model_label.is_empty() {
            return Err("field model_label must be non-empty".into());
        }
        if self.response.is_empty() {
            return Err("field response must be non-empty".into());
        }
        Ok(())
    }

    fn dedup_key(&self) -> Option<String> {
        Some(format!("{}\u{1f}{}", self.prompt_id, self.model_label))
    }
}

/// Scaling factors for stress sweeps, strictly within (0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleSpec {
    pub factors: Vec<f64>,
}

impl ScaleSpec {
    pub fn new(factors: Vec<f64>) -> Result<Self, BenchError> {
        if factors.is_empty() {
            return Err(BenchError::BadFactor(f64::NAN));
        }
        let mut seen = Vec::new();
        for &f in &factors {
            if !(f > 0.0 && f <= 1.0) {
                return Err(BenchError::BadFactor(f));
            }
            if seen.contains(&f.to_bits()) {
                return Err(BenchError::BadFactor(f));
            }
            seen.push(f.to_bits());
        }
        Ok(ScaleSpec { factors })
    }
}

impl Default for ScaleSpec {
    /// 0.9 down to 0.1 in steps of 0.1.
    fn default() -> Self {
        ScaleSpec {
            factors: (1..=9).rev().map(|i| f64::from(i) / 10.0).collect(),
        }
    }
}

struct RankedRef<'a> {
    word_count: usize,
    model_label: &'a str,
    response: &'a str,
}

/// Group references by prompt id, each group sorted by (word count, label).
fn rank_references(refs: &[ReferenceGeneration]) -> BTreeMap<&str, Vec<RankedRef<'_>>> {
    let mut by_prompt: BTreeMap<&str, Vec<RankedRef<'_>>> = BTreeMap::new();
    for r in refs {
        by_prompt
            .entry(r.prompt_id.as_str())
            .or_default()
            .push(RankedRef {
                word_count: count_words(&r.response),
                model_label: &r.model_label,
                response: &r.response,
            });
    }
    for group in by_prompt.values_mut() {
        group.sort_by(|a, b| {
            a.word_count
                .cmp(&b.word_count)
                .then_with(|| a.model_label.cmp(b.model_label))
        });
    }
    by_prompt
}

fn make_entry(id: String, prompt: &str, target_len: usize, baseline: &RankedRef<'_>) -> BenchmarkEntry {
    BenchmarkEntry {
        id,
        original_prompt: prompt.to_string(),
        li_prompt: render_template(prompt, target_len),
        target_len,
        baseline_response: Some(baseline.response.to_string()),
        baseline_source: Some(baseline.model_label.to_string()),
    }
}

/// Build a benchmark from prompts and reference generations.
///
/// Per non-excluded prompt: target is the minimum reference word count
/// (floored at 1) and the baseline is a response achieving that minimum,
/// ties broken by lexicographically smallest model label. Entries are
/// ordered by prompt id. Prompts lacking references are an error.
pub fn build_benchmark(
    prompts: &[(String, String)],
    refs: &[ReferenceGeneration],
    exclusions: &HashSet<String>,
) -> Result<Vec<BenchmarkEntry>, BenchError> {
    let ranked = rank_references(refs);
    let mut kept: Vec<&(String, String)> = prompts
        .iter()
        .filter(|(id, _)| !exclusions.contains(id))
        .collect();
    kept.sort_by(|a, b| a.0.cmp(&b.0));

    let missing: Vec<String> = kept
        .iter()
        .filter(|(id, _)| !ranked.contains_key(id.as_str()))
        .map(|(id, _)| id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(BenchError::MissingReferences(missing));
    }

    Ok(kept
        .into_iter()
        .map(|(id, prompt)| {
            let best = &ranked[id.as_str()][0];
            let target_len = best.word_count.max(1);
            make_entry(id.clone(), prompt, target_len, best)
        })
        .collect())
}

/// Build a multi-constraint benchmark: the k smallest reference lengths of
/// each prompt become k targets, entries `<prompt_id>#c1` .. `#c<k>` in
/// ascending target order. Each entry's baseline is a shortest reference
/// whose count fits that entry's target.
pub fn build_multi_constraint(
    prompts: &[(String, String)],
    refs: &[ReferenceGeneration],
    k: usize,
) -> Result<Vec<BenchmarkEntry>, BenchError> {
    if k == 0 {
        return Err(BenchError::ZeroConstraints);
    }
    let ranked = rank_references(refs);
    let mut sorted: Vec<&(String, String)> = prompts.iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));

    let short: Vec<String> = sorted
        .iter()
        .filter(|(id, _)| ranked.get(id.as_str()).map_or(0, Vec::len) < k)
        .map(|(id, _)| id.clone())
        .collect();
    if !short.is_empty() {
        return Err(BenchError::InsufficientReferences { needed: k, ids: short });
    }

    let mut entries = Vec::with_capacity(sorted.len() * k);
    for (id, prompt) in sorted {
        let group = &ranked[id.as_str()];
        for (j, constraint) in group.iter().take(k).enumerate() {
            let target_len = constraint.word_count.max(1);
            // The shortest reference fits every target drawn from the group.
            let baseline = &group[0];
            entries.push(make_entry(
                format!("{id}#c{}", j + 1),
                prompt,
                target_len,
                baseline,
            ));
        }
    }
    Ok(entries)
}

/// Shrink every target by `factor` (round half up, floor 1), re-render the
/// length instruction, and keep the baseline only if it still complies.
pub fn scale_benchmark(
    bench: &[BenchmarkEntry],
    factor: f64,
) -> Result<Vec<BenchmarkEntry>, BenchError> {
    if !(factor > 0.0 && factor <= 1.0) {
        return Err(BenchError::BadFactor(factor));
    }
    Ok(bench
        .iter()
        .map(|entry| {
            let scaled = (factor * entry.target_len as f64).round() as usize;
            let target_len = scaled.max(1);
            let (baseline_response, baseline_source) = match entry.baseline() {
                Some((resp, src)) if count_words(resp) <= target_len => {
                    (Some(resp.to_string()), Some(src.to_string()))
                }
                _ => (None, None),
            };
            BenchmarkEntry {
                id: entry.id.clone(),
                original_prompt: entry.original_prompt.clone(),
                li_prompt: render_template(&entry.original_prompt, target_len),
                target_len,
                baseline_response,
                baseline_source,
            }
        })
        .collect())
}

static CONSTRAINT_PATTERNS: LazyLock<Vec<Regex>> = LazyLock::new(|| {
    const UNIT: &str = r"(?:words?|sentences?|paragraphs?|characters?)";
    let sources = [
        format!(
            r"(?i)\b(?:less than|fewer than|at most|no more than|no longer than|not more than|up to|within|under|(?:a )?maximum of|max of)\s+(?:about\s+|around\s+|approximately\s+)?\d+\s*{UNIT}\b"
        ),
        format!(r"(?i)\b\d+\s*{UNIT}\s+(?:or (?:less|fewer|shorter)|at most|max(?:imum)?|limit|tops)\b"),
        format!(r"(?i)\bin\s+(?:just\s+|only\s+|about\s+|around\s+|under\s+)?\d+\s*{UNIT}\b"),
        format!(
            r"(?i)\b(?:word|sentence|paragraph|character)\s+(?:limit|maximum|cap|count)\s*(?:of|:|is)?\s*\d+\b"
        ),
        format!(r"(?i)\blimit\s+(?:your\s+|the\s+)?(?:response|answer|reply|summary)?\s*to\s+\d+\s*{UNIT}\b"),
    ];
    sources
        .iter()
        .map(|s| Regex::new(s).expect("constraint pattern must compile"))
        .collect()
});

/// Heuristic: does the prompt already carry an explicit length constraint?
///
/// Matches a number adjacent to words/sentences/paragraphs/characters with
/// a bounding phrase ("less than", "at most", "no more than", "in N words",
/// "maximum", "limit"). Used to build the default exclusion list; callers
/// can always override with an explicit id list.
pub fn detect_preexisting_constraint(prompt: &str) -> bool {
    CONSTRAINT_PATTERNS.iter().any(|p| p.is_match(prompt))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(n: usize) -> String {
        vec!["word"; n].join(" ")
    }

    fn reference(prompt_id: &str, label: &str, n_words: usize) -> ReferenceGeneration {
        ReferenceGeneration {
            prompt_id: prompt_id.into(),
            model_label: label.into(),
            response: words(n_words),
        }
    }

    fn prompts(ids: &[&str]) -> Vec<(String, String)> {
        ids.iter()
            .map(|id| (id.to_string(), format!("Prompt text for {id}")))
            .collect()
    }

    #[test]
    fn target_is_minimum_reference_length() {
        let refs = vec![
            reference("p1", "gpt", 320),
            reference("p1", "claude", 210),
            reference("p1", "mistral", 270),
        ];
        let bench = build_benchmark(&prompts(&["p1"]), &refs, &HashSet::new()).unwrap();
        assert_eq!(bench.len(), 1);
        assert_eq!(bench[0].target_len, 210);
        assert_eq!(bench[0].baseline_source.as_deref(), Some("claude"));
        assert_eq!(bench[0].baseline_response.as_deref(), Some(words(210).as_str()));
        assert!(bench[0].li_prompt.starts_with("Answer the following instruction using 210 words or less."));
    }

    #[test]
    fn singleton_reference_and_tie_break() {
        let refs = vec![reference("p1", "only", 42)];
        let bench = build_benchmark(&prompts(&["p1"]), &refs, &HashSet::new()).unwrap();
        assert_eq!(bench[0].target_len, 42);
        assert_eq!(bench[0].baseline_source.as_deref(), Some("only"));

        let tied = vec![reference("p2", "b", 150), reference("p2", "a", 150)];
        let bench = build_benchmark(&prompts(&["p2"]), &tied, &HashSet::new()).unwrap();
        assert_eq!(bench[0].baseline_source.as_deref(), Some("a"));
    }

    #[test]
    fn exclusions_drop_prompts_and_missing_refs_error() {
        let ps = prompts(&["a", "b", "c"]);
        let refs = vec![reference("a", "m", 10), reference("c", "m", 10)];
        let exclusions: HashSet<String> = ["b".to_string()].into();
        let bench = build_benchmark(&ps, &refs, &exclusions).unwrap();
        assert_eq!(bench.len(), 2);

        let err = build_benchmark(&ps, &refs, &HashSet::new()).unwrap_err();
        match err {
            BenchError::MissingReferences(ids) => assert_eq!(ids, vec!["b".to_string()]),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn entries_are_ordered_by_prompt_id() {
        let ps = prompts(&["zeta", "alpha", "mid"]);
        let refs = vec![
            reference("zeta", "m", 10),
            reference("alpha", "m", 10),
            reference("mid", "m", 10),
        ];
        let bench = build_benchmark(&ps, &refs, &HashSet::new()).unwrap();
        let ids: Vec<_> = bench.iter().map(|e| e.id.as_str()).collect();
        assert_eq!(ids, vec!["alpha", "mid", "zeta"]);
    }

    #[test]
    fn multi_constraint_uses_each_reference_length() {
        let ps = prompts(&["p"]);
        let refs = vec![
            reference("p", "gpt", 300),
            reference("p", "claude", 100),
            reference("p", "mistral", 200),
        ];
        let bench = build_multi_constraint(&ps, &refs, 3).unwrap();
        assert_eq!(bench.len(), 3);
        assert_eq!(bench[0].id, "p#c1");
        assert_eq!(bench[0].target_len, 100);
        assert_eq!(bench[1].target_len, 200);
        assert_eq!(bench[2].target_len, 300);
        for entry in &bench {
            // Baseline is the shortest compliant reference: the 100-word one.
            assert_eq!(entry.baseline_source.as_deref(), Some("claude"));
            assert_eq!(count_words(entry.baseline_response.as_deref().unwrap()), 100);
        }
    }

    #[test]
    fn multi_constraint_k1_matches_plain_build() {
        let ps = prompts(&["p"]);
        let refs = vec![reference("p", "a", 50), reference("p", "b", 90)];
        let single = build_benchmark(&ps, &refs, &HashSet::new()).unwrap();
        let multi = build_multi_constraint(&ps, &refs, 1).unwrap();
        assert_eq!(multi.len(), 1);
        assert_eq!(multi[0].id, "p#c1");
        assert_eq!(multi[0].target_len, single[0].target_len);
        assert_eq!(multi[0].baseline_response, single[0].baseline_response);

        let err = build_multi_constraint(&ps, &refs, 3).unwrap_err();
        assert!(matches!(err, BenchError::InsufficientReferences { needed: 3, .. }));
    }

    #[test]
    fn scaling_rounds_half_up_with_floor_one() {
        let refs = vec![reference("p", "m", 200)];
        let bench = build_benchmark(&prompts(&["p"]), &refs, &HashSet::new()).unwrap();
        let scaled = scale_benchmark(&bench, 0.1).unwrap();
        assert_eq!(scaled[0].target_len, 20);

        let mut small = bench.clone();
        small[0].target_len = 15;
        small[0].li_prompt = render_template(&small[0].original_prompt, 15);
        small[0].baseline_response = Some(words(10));
        let scaled = scale_benchmark(&small, 0.1).unwrap();
        assert_eq!(scaled[0].target_len, 2, "1.5 rounds half-up to 2");

        let identity = scale_benchmark(&bench, 1.0).unwrap();
        assert_eq!(identity[0].target_len, 200);
        assert_eq!(identity[0].baseline_response, bench[0].baseline_response);

        assert!(scale_benchmark(&bench, 0.0).is_err());
        assert!(scale_benchmark(&bench, 1.5).is_err());
    }

    #[test]
    fn scaling_drops_noncompliant_baselines() {
        let refs = vec![reference("p", "m", 100)];
        let bench = build_benchmark(&prompts(&["p"]), &refs, &HashSet::new()).unwrap();
        let scaled = scale_benchmark(&bench, 0.5).unwrap();
        assert_eq!(scaled[0].target_len, 50);
        assert!(scaled[0].baseline().is_none(), "100-word baseline cannot fit 50");
        assert!(scaled[0].li_prompt.contains("using 50 words or less"));
    }

    #[test]
    fn scaling_is_monotone_in_factor() {
        let refs: Vec<_> = (0..30)
            .map(|i| reference(&format!("p{i:02}"), "m", 7 + 13 * i))
            .collect();
        let ids: Vec<(String, String)> = (0..30)
            .map(|i| (format!("p{i:02}"), "prompt".to_string()))
            .collect();
        let bench = build_benchmark(&ids, &refs, &HashSet::new()).unwrap();
        let factors = [0.1, 0.25, 0.5, 0.75, 0.9, 1.0];
        for pair in factors.windows(2) {
            let lo = scale_benchmark(&bench, pair[0]).unwrap();
            let hi = scale_benchmark(&bench, pair[1]).unwrap();
            for (a, b) in lo.iter().zip(&hi) {
                assert!(a.target_len <= b.target_len, "{} > {}", a.target_len, b.target_len);
            }
        }
    }

    #[test]
    fn scale_spec_validation() {
        assert!(ScaleSpec::new(vec![]).is_err());
        assert!(ScaleSpec::new(vec![0.0]).is_err());
        assert!(ScaleSpec::new(vec![1.1]).is_err());
        assert!(ScaleSpec::new(vec![0.5, 0.5]).is_err());
        let default = ScaleSpec::default();
        assert_eq!(default.factors.len(), 9);
        assert_eq!(default.factors[0], 0.9);
        assert_eq!(default.factors[8], 0.1);
    }

    #[test]
    fn constraint_detection_examples() {
        assert!(detect_preexisting_constraint("Summarize this in 50 words or less: the article below."));
        assert!(!detect_preexisting_constraint("Tell me about Coco Gauff"));
        assert!(detect_preexisting_constraint("Explain recursion in at most 100 words."));
        assert!(detect_preexisting_constraint("Describe the plot in 3 sentences."));
        assert!(detect_preexisting_constraint("No more than 20 words, please."));
        assert!(detect_preexisting_constraint("Keep it within 280 characters."));
        assert!(detect_preexisting_constraint("The word limit is 50."));
        assert!(detect_preexisting_constraint("Limit your answer to 10 words."));
        assert!(!detect_preexisting_constraint("I walked 50 words into the essay before giving up."));
        assert!(!detect_preexisting_constraint("Write a poem about words and their meanings."));
        assert!(!detect_preexisting_constraint("What are the 7 wonders of the world?"));
    }

    #[test]
    fn built_entries_pass_datamodel_validation() {
        let refs = vec![
            reference("p1", "gpt", 120),
            reference("p1", "claude", 80),
            reference("p2", "gpt", 60),
            reference("p2", "claude", 95),
        ];
        let bench = build_benchmark(&prompts(&["p1", "p2"]), &refs, &HashSet::new()).unwrap();
        for entry in &bench {
            entry.validate().expect("entry must validate");
            let (resp, _) = entry.baseline().unwrap();
            assert!(count_words(resp) <= entry.target_len);
        }
    }
}
