//! Pairwise judging with a hard length-constraint gate.
//!
//! A violating candidate loses before any judge is consulted. Compliant
//! candidates are compared against the baseline on the *original* prompt
//! (never the length-instructed one), optionally in both presentation
//! orders to blunt position bias: the orders must agree, otherwise the
//! comparison is a tie.

use crate::backend::parallel_map;
use crate::datamodel::{BenchmarkEntry, GenerationRecord, Outcome, Verdict};
use crate::seeded::stable_hash64;
use crate::wordcount::count_words;
use std::collections::HashMap;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use thiserror::Error;

/// Default pairwise template. `{instruction}`, `{response_a}` and
/// `{response_b}` are required placeholders in any replacement template.
pub const DEFAULT_JUDGE_TEMPLATE: &str = "\
You are comparing two responses to the same instruction. Decide which \
response answers the instruction better, weighing helpfulness, accuracy, \
and clarity. Do not let presentation order, response length, or style sway \
your judgement.

[Instruction]
{instruction}

[Response A]
{response_a}

[Response B]
{response_b}

Reply with exactly one line naming the better response:
Output: A
or
Output: B";

pub const INSTRUCTION_PLACEHOLDER: &str = "{instruction}";
pub const RESPONSE_A_PLACEHOLDER: &str = "{response_a}";
pub const RESPONSE_B_PLACEHOLDER: &str = "{response_b}";

#[derive(Debug, Error)]
pub enum JudgeError {
    #[error("judge transport failed: {0}")]
    Transport(String),
    #[error("generation record {gen} does not belong to entry {entry}")]
    EntryMismatch { entry: String, gen: String },
    #[error("entry {0} has no baseline; only violation-rate evaluation is possible")]
    NoBaseline(String),
    #[error("template is missing placeholder {0}")]
    MissingPlaceholder(&'static str),
    #[error("no generation record for entry {0}")]
    MissingGeneration(String),
}

/// Which response a judge preferred.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preference {
    First,
    Second,
    Tie,
}

/// One raw judge exchange.
#[derive(Debug, Clone)]
pub struct PairwiseResult {
    pub preferred: Preference,
    pub raw_reply: String,
}

/// How ties feed into win rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TiePolicy {
    /// A tie contributes half a win.
    HalfWin,
    /// Ties leave both numerator and denominator.
    Drop,
}

impl FromStr for TiePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "half_win" => Ok(TiePolicy::HalfWin),
            "drop" => Ok(TiePolicy::Drop),
            other => Err(format!("unknown tie policy {other:?} (half_win|drop)")),
        }
    }
}

/// Judge-side evaluation settings.
#[derive(Debug, Clone)]
pub struct JudgeConfig {
    /// Run each comparison in both presentation orders (default true).
    pub both_orders: bool,
    pub tie_policy: TiePolicy,
}

impl Default for JudgeConfig {
    fn default() -> Self {
        JudgeConfig {
            both_orders: true,
            tie_policy: TiePolicy::HalfWin,
        }
    }
}

/// A pairwise comparator over two responses to one instruction.
pub trait PairwiseJudge: Send + Sync {
    fn name(&self) -> &str;
    fn compare(
        &self,
        instruction: &str,
        first: &str,
        second: &str,
    ) -> Result<PairwiseResult, JudgeError>;
}

/// Substitute the three placeholders in one pass, so placeholder-looking
/// text inside the instruction or responses is never re-expanded.
pub fn render_judge_prompt(template: &str, instruction: &str, a: &str, b: &str) -> String {
    let mut out = String::with_capacity(template.len() + instruction.len() + a.len() + b.len());
    let mut rest = template;
    loop {
        let next = [
            (INSTRUCTION_PLACEHOLDER, instruction),
            (RESPONSE_A_PLACEHOLDER, a),
            (RESPONSE_B_PLACEHOLDER, b),
        ]
        .iter()
        .filter_map(|(ph, value)| rest.find(ph).map(|pos| (pos, *ph, *value)))
        .min_by_key(|(pos, _, _)| *pos);
        match next {
            Some((pos, placeholder, value)) => {
                out.push_str(&rest[..pos]);
                out.push_str(value);
                rest = &rest[pos + placeholder.len()..];
            }
            None => {
                out.push_str(rest);
                return out;
            }
        }
    }
}

/// Check a replacement template carries all three placeholders.
pub fn validate_judge_template(template: &str) -> Result<(), JudgeError> {
    for placeholder in [
        INSTRUCTION_PLACEHOLDER,
        RESPONSE_A_PLACEHOLDER,
        RESPONSE_B_PLACEHOLDER,
    ] {
        if !template.contains(placeholder) {
            return Err(JudgeError::MissingPlaceholder(placeholder));
        }
    }
    Ok(())
}

/// Extract a verdict from a raw judge reply; `None` when unparseable.
///
/// The first standalone token among `A`/`m` (first response), `B`/`M`
/// (second response), or `tie` decides. Tokens are maximal alphanumeric
/// runs, so "Output: B" parses as `B`.
pub fn parse_preference_strict(raw_reply: &str) -> Option<Preference> {
    for token in raw_reply.split(|c: char| !c.is_alphanumeric()) {
        match token {
            "" => continue,
            "A" | "m" => return Some(Preference::First),
            "B" | "M" => return Some(Preference::Second),
            t if t.eq_ignore_ascii_case("tie") => return Some(Preference::Tie),
            _ => continue,
        }
    }
    None
}

/// Total variant of [`parse_preference_strict`]: unparseable replies are
/// ties (callers keep their own warning counters via the strict form).
pub fn parse_preference(raw_reply: &str) -> Preference {
    parse_preference_strict(raw_reply).unwrap_or(Preference::Tie)
}

/// Gate one generation, consulting the judge only when the gate passes.
///
/// The judge sees the original prompt, the candidate response, and the
/// baseline response; with `both_orders` the comparison runs twice with the
/// responses swapped and any disagreement is a tie.
pub fn gate_and_judge(
    entry: &BenchmarkEntry,
    gen: &GenerationRecord,
    judge: &dyn PairwiseJudge,
    cfg: &JudgeConfig,
) -> Result<Verdict, JudgeError> {
    if entry.id != gen.entry_id {
        return Err(JudgeError::EntryMismatch {
            entry: entry.id.clone(),
            gen: gen.entry_id.clone(),
        });
    }
    let (baseline_response, _) = entry
        .baseline()
        .ok_or_else(|| JudgeError::NoBaseline(entry.id.clone()))?;

    if gen.violation {
        return Ok(Verdict {
            entry_id: entry.id.clone(),
            outcome: Outcome::BaselineWin,
            gated: true,
            judge_raw: Vec::new(),
            error: None,
        });
    }

    let forward = judge.compare(&entry.original_prompt, &gen.response, baseline_response)?;
    let mut judge_raw = vec![forward.raw_reply.clone()];
    let candidate_vote = |preferred: Preference, candidate_first: bool| match (preferred, candidate_first) {
        (Preference::First, true) | (Preference::Second, false) => Outcome::CandidateWin,
        (Preference::Second, true) | (Preference::First, false) => Outcome::BaselineWin,
        (Preference::Tie, _) => Outcome::Tie,
    };
    let first_vote = candidate_vote(forward.preferred, true);

    let outcome = if cfg.both_orders {
        let reverse = judge.compare(&entry.original_prompt, baseline_response, &gen.response)?;
        judge_raw.push(reverse.raw_reply.clone());
        let second_vote = candidate_vote(reverse.preferred, false);
        if first_vote == second_vote {
            first_vote
        } else {
            Outcome::Tie
        }
    } else {
        first_vote
    };

    Ok(Verdict {
        entry_id: entry.id.clone(),
        outcome,
        gated: false,
        judge_raw,
        error: None,
    })
}

/// Judge every baseline-carrying entry that has a generation record.
///
/// Entries without a baseline are skipped (violation-only). Judge failures
/// become explicit error verdicts counted as losses, never dropped.
/// Verdicts are ordered by entry id.
pub fn judge_over_benchmark(
    bench: &[BenchmarkEntry],
    gens: &[GenerationRecord],
    judge: &dyn PairwiseJudge,
    cfg: &JudgeConfig,
    concurrency: usize,
) -> Result<Vec<Verdict>, JudgeError> {
    let by_id: HashMap<&str, &GenerationRecord> =
        gens.iter().map(|g| (g.entry_id.as_str(), g)).collect();
    let mut judged: Vec<&BenchmarkEntry> =
        bench.iter().filter(|e| e.baseline().is_some()).collect();
    judged.sort_by(|a, b| a.id.cmp(&b.id));
    for entry in &judged {
        if !by_id.contains_key(entry.id.as_str()) {
            return Err(JudgeError::MissingGeneration(entry.id.clone()));
        }
    }
    let verdicts = parallel_map(&judged, concurrency, |entry| {
        let gen = by_id[entry.id.as_str()];
        gate_and_judge(entry, gen, judge, cfg).unwrap_or_else(|e| Verdict {
            entry_id: entry.id.clone(),
            outcome: Outcome::BaselineWin,
            gated: false,
            judge_raw: Vec::new(),
            error: Some(e.to_string()),
        })
    });
    Ok(verdicts)
}

// ---------------------------------------------------------------------------
// Mock judges and the judge registry.
// ---------------------------------------------------------------------------

type JudgeRule = Box<dyn Fn(&str, &str) -> Preference + Send + Sync>;

/// A judge whose preference is a pure function of the two response texts.
/// Counts its invocations so tests can assert the gate short-circuits.
pub struct MockJudge {
    label: String,
    rule: JudgeRule,
    calls: AtomicUsize,
}

impl MockJudge {
    pub fn new(
        label: impl Into<String>,
        rule: impl Fn(&str, &str) -> Preference + Send + Sync + 'static,
    ) -> Self {
        MockJudge {
            label: label.into(),
            rule: Box::new(rule),
            calls: AtomicUsize::new(0),
        }
    }

    /// Prefers the response with more words.
    pub fn prefer_longer() -> Self {
        MockJudge::new("prefer-longer", |a, b| {
            match count_words(a).cmp(&count_words(b)) {
                std::cmp::Ordering::Greater => Preference::First,
                std::cmp::Ordering::Less => Preference::Second,
                std::cmp::Ordering::Equal => Preference::Tie,
            }
        })
    }

    /// Prefers the response with fewer words.
    pub fn prefer_shorter() -> Self {
        MockJudge::new("prefer-shorter", |a, b| {
            match count_words(a).cmp(&count_words(b)) {
                std::cmp::Ordering::Less => Preference::First,
                std::cmp::Ordering::Greater => Preference::Second,
                std::cmp::Ordering::Equal => Preference::Tie,
            }
        })
    }

    /// Prefers the lexicographically smaller text; equal texts tie.
    pub fn lexicographic() -> Self {
        MockJudge::new("lexicographic", |a, b| match a.cmp(b) {
            std::cmp::Ordering::Less => Preference::First,
            std::cmp::Ordering::Greater => Preference::Second,
            std::cmp::Ordering::Equal => Preference::Tie,
        })
    }

    /// Arbitrary-but-pure preference derived from a seed and both texts.
    /// Useful for fuzzing gate dominance over judge behaviors.
    pub fn seeded(seed: u64) -> Self {
        MockJudge::new(format!("hash:{seed}"), move |a, b| {
            let key = format!("{a}\u{1f}{b}");
            match stable_hash64(seed, &key) % 3 {
                0 => Preference::First,
                1 => Preference::Second,
                _ => Preference::Tie,
            }
        })
    }

    pub fn call_count(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl PairwiseJudge for MockJudge {
    fn name(&self) -> &str {
        &self.label
    }

    fn compare(
        &self,
        _instruction: &str,
        first: &str,
        second: &str,
    ) -> Result<PairwiseResult, JudgeError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let preferred = (self.rule)(first, second);
        let raw_reply = match preferred {
            Preference::First => "Output: A".to_string(),
            Preference::Second => "Output: B".to_string(),
            Preference::Tie => "Output: tie".to_string(),
        };
        Ok(PairwiseResult { preferred, raw_reply })
    }
}

#[derive(Debug, Error)]
#[error("unknown or invalid judge spec {spec:?}: {message}")]
pub struct JudgeRegistryError {
    pub spec: String,
    pub message: String,
}

type JudgeBuildFn = Box<dyn Fn(Option<&str>) -> Result<Box<dyn PairwiseJudge>, String> + Send + Sync>;

struct JudgeEntry {
    name: &'static str,
    summary: &'static str,
    build: JudgeBuildFn,
}

/// Judges registered by name, selected at runtime from a spec string
/// (`prefer-longer`, `lexicographic`, `hash:42`, `http`, ...).
pub struct JudgeRegistry {
    entries: Vec<JudgeEntry>,
}

impl JudgeRegistry {
    pub fn builtin() -> Self {
        let mut registry = JudgeRegistry { entries: Vec::new() };
        registry.register("prefer-longer", "prefers the longer response", |_| {
            Ok(Box::new(MockJudge::prefer_longer()))
        });
        registry.register("prefer-shorter", "prefers the shorter response", |_| {
            Ok(Box::new(MockJudge::prefer_shorter()))
        });
        registry.register("lexicographic", "prefers the lexicographically smaller text", |_| {
            Ok(Box::new(MockJudge::lexicographic()))
        });
        registry.register("hash", "pure pseudo-random preference (hash:<seed>)", |arg| {
            let seed: u64 = arg
                .ok_or("hash judge needs a seed, e.g. hash:42")?
                .parse()
                .map_err(|e| format!("bad seed: {e}"))?;
            Ok(Box::new(MockJudge::seeded(seed)))
        });
        registry
    }

    pub fn register(
        &mut self,
        name: &'static str,
        summary: &'static str,
        build: impl Fn(Option<&str>) -> Result<Box<dyn PairwiseJudge>, String> + Send + Sync + 'static,
    ) {
        self.entries.push(JudgeEntry {
            name,
            summary,
            build: Box::new(build),
        });
    }

    pub fn build(&self, spec: &str) -> Result<Box<dyn PairwiseJudge>, JudgeRegistryError> {
        let (name, arg) = match spec.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (spec, None),
        };
        let entry = self
            .entries
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| JudgeRegistryError {
                spec: spec.to_string(),
                message: format!("known judges: {}", self.names().join(", ")),
            })?;
        (entry.build)(arg).map_err(|message| JudgeRegistryError {
            spec: spec.to_string(),
            message,
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name).collect()
    }

    pub fn describe(&self) -> Vec<(&'static str, &'static str)> {
        self.entries.iter().map(|e| (e.name, e.summary)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lift::render_template;

    fn entry(id: &str, target_len: usize, baseline_words: usize) -> BenchmarkEntry {
        BenchmarkEntry {
            id: id.into(),
            original_prompt: format!("Original prompt {id}"),
            li_prompt: render_template(&format!("Original prompt {id}"), target_len),
            target_len,
            baseline_response: Some(vec!["base"; baseline_words].join(" ")),
            baseline_source: Some("ref".into()),
        }
    }

    fn gen_with(entry: &BenchmarkEntry, n_words: usize) -> GenerationRecord {
        GenerationRecord::from_response(
            entry.id.clone(),
            "model",
            vec!["word"; n_words].join(" "),
            entry.target_len,
        )
    }

    #[test]
    fn violations_lose_without_judge_calls() {
        let e = entry("e1", 210, 100);
        let g = gen_with(&e, 250);
        assert!(g.violation);
        let judge = MockJudge::prefer_longer();
        let verdict = gate_and_judge(&e, &g, &judge, &JudgeConfig::default()).unwrap();
        assert_eq!(verdict.outcome, Outcome::BaselineWin);
        assert!(verdict.gated);
        assert!(verdict.judge_raw.is_empty());
        assert_eq!(judge.call_count(), 0);
    }

    #[test]
    fn agreement_across_orders_decides() {
        let e = entry("e1", 210, 100);
        let g = gen_with(&e, 150);
        // prefer-longer is order-consistent: candidate (150 words) beats the
        // 100-word baseline in both orders.
        let judge = MockJudge::prefer_longer();
        let verdict = gate_and_judge(&e, &g, &judge, &JudgeConfig::default()).unwrap();
        assert_eq!(verdict.outcome, Outcome::CandidateWin);
        assert!(!verdict.gated);
        assert_eq!(verdict.judge_raw.len(), 2);
        assert_eq!(judge.call_count(), 2);
    }

    #[test]
    fn disagreement_across_orders_is_a_tie() {
        // Always "first": each order backs its own first argument.
        let judge = MockJudge::new("first-wins", |_, _| Preference::First);
        let e = entry("e1", 210, 100);
        let g = gen_with(&e, 150);
        let verdict = gate_and_judge(&e, &g, &judge, &JudgeConfig::default()).unwrap();
        assert_eq!(verdict.outcome, Outcome::Tie);
    }

    #[test]
    fn single_order_uses_one_call() {
        let judge = MockJudge::new("first-wins", |_, _| Preference::First);
        let cfg = JudgeConfig {
            both_orders: false,
            ..JudgeConfig::default()
        };
        let e = entry("e1", 210, 100);
        let g = gen_with(&e, 150);
        let verdict = gate_and_judge(&e, &g, &judge, &cfg).unwrap();
        assert_eq!(verdict.outcome, Outcome::CandidateWin);
        assert_eq!(judge.call_count(), 1);
        assert_eq!(verdict.judge_raw.len(), 1);
    }

    #[test]
    fn baseline_less_entries_are_rejected() {
        let mut e = entry("e1", 210, 100);
        e.baseline_response = None;
        e.baseline_source = None;
        let g = gen_with(&e, 150);
        let err = gate_and_judge(&e, &g, &MockJudge::prefer_longer(), &JudgeConfig::default())
            .unwrap_err();
        assert!(matches!(err, JudgeError::NoBaseline(_)));
    }

    #[test]
    fn mismatched_entry_is_rejected() {
        let e = entry("e1", 210, 100);
        let other = entry("e2", 210, 100);
        let g = gen_with(&other, 150);
        let err = gate_and_judge(&e, &g, &MockJudge::prefer_longer(), &JudgeConfig::default())
            .unwrap_err();
        assert!(matches!(err, JudgeError::EntryMismatch { .. }));
    }

    #[test]
    fn parse_preference_extracts_markers() {
        assert_eq!(parse_preference("Output: B"), Preference::Second);
        assert_eq!(parse_preference("A"), Preference::First);
        assert_eq!(parse_preference("Output: m"), Preference::First);
        assert_eq!(parse_preference("verdict is M."), Preference::Second);
        assert_eq!(parse_preference("It's a tie"), Preference::Tie);
        assert_eq!(parse_preference("complete gibberish reply"), Preference::Tie);
        assert_eq!(parse_preference_strict("complete gibberish reply"), None);
        assert_eq!(parse_preference(""), Preference::Tie);
        // The first marker wins, later text is ignored.
        assert_eq!(parse_preference("Output: A (not B)"), Preference::First);
    }

    #[test]
    fn judge_prompt_contains_instruction_but_never_the_limit_line() {
        let e = entry("e1", 210, 100);
        let prompt = render_judge_prompt(
            DEFAULT_JUDGE_TEMPLATE,
            &e.original_prompt,
            "candidate text",
            "baseline text",
        );
        assert!(prompt.contains(&e.original_prompt));
        assert!(!prompt.contains("words or less"));
        assert!(prompt.contains("candidate text"));
        assert!(prompt.contains("baseline text"));
    }

    #[test]
    fn placeholder_text_inside_values_is_not_reexpanded() {
        let rendered = render_judge_prompt(
            "{instruction}|{response_a}|{response_b}",
            "say {response_a} aloud",
            "alpha",
            "beta",
        );
        assert_eq!(rendered, "say {response_a} aloud|alpha|beta");
    }

    #[test]
    fn template_validation_requires_all_placeholders() {
        assert!(validate_judge_template(DEFAULT_JUDGE_TEMPLATE).is_ok());
        assert!(validate_judge_template("{instruction} {response_a}").is_err());
    }

    #[test]
    fn both_orders_symmetry_under_label_swap() {
        // Swapping candidate and baseline swaps the combined outcome.
        for seed in 0..50u64 {
            let judge = MockJudge::seeded(seed);
            let e = entry("e1", 210, 100);
            let g = gen_with(&e, 150);
            let cfg = JudgeConfig::default();
            let forward = gate_and_judge(&e, &g, &judge, &cfg).unwrap();

            let mut swapped_entry = e.clone();
            swapped_entry.baseline_response = Some(g.response.clone());
            let swapped_gen = GenerationRecord::from_response(
                e.id.clone(),
                "model",
                e.baseline_response.clone().unwrap(),
                e.target_len,
            );
            let reverse = gate_and_judge(&swapped_entry, &swapped_gen, &judge, &cfg).unwrap();
            let flipped = match reverse.outcome {
                Outcome::CandidateWin => Outcome::BaselineWin,
                Outcome::BaselineWin => Outcome::CandidateWin,
                Outcome::Tie => Outcome::Tie,
            };
            assert_eq!(forward.outcome, flipped, "seed {seed}");
        }
    }

    #[test]
    fn judging_skips_baseline_less_and_orders_by_id() {
        let mut e1 = entry("b", 100, 50);
        e1.baseline_response = None;
        e1.baseline_source = None;
        let e2 = entry("a", 100, 50);
        let e3 = entry("c", 100, 50);
        let gens = vec![gen_with(&e2, 60), gen_with(&e3, 200), gen_with(&e1, 10)];
        let judge = MockJudge::prefer_shorter();
        let verdicts = judge_over_benchmark(
            &[e1, e2, e3],
            &gens,
            &judge,
            &JudgeConfig::default(),
            4,
        )
        .unwrap();
        assert_eq!(verdicts.len(), 2, "baseline-less entry is skipped");
        assert_eq!(verdicts[0].entry_id, "a");
        assert_eq!(verdicts[1].entry_id, "c");
        assert!(verdicts[1].gated, "200 words against 100 target");
    }

    #[test]
    fn registry_builds_named_judges() {
        let registry = JudgeRegistry::builtin();
        assert!(registry.build("prefer-longer").is_ok());
        assert!(registry.build("hash:7").is_ok());
        assert!(registry.build("hash").is_err());
        assert!(registry.build("unknown").is_err());
        let judge = registry.build("lexicographic").unwrap();
        let r = judge.compare("inst", "aaa", "bbb").unwrap();
        assert_eq!(r.preferred, Preference::First);
    }
}
