//! Length-instruction augmentation of preference datasets.
//!
//! Every triple whose responses differ by at least a threshold number of
//! words yields two length-instructed pairs: a slack pair whose limit both
//! responses satisfy, and a binding pair whose limit sits strictly between
//! the two lengths so the longer response violates it. When the chosen
//! response is the longer one, the binding pair flips winner and loser.

use crate::datamodel::{AugmentedPair, CaseTag, PreferenceTriple};
use crate::seeded::SeededSampler;
use crate::wordcount::count_words;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Template used to prepend a maximum-length instruction to a prompt.
pub const DEFAULT_TEMPLATE: &str =
    "Answer the following instruction using <MAX_LEN> words or less.\n\n<ORIGINAL_INSTRUCTION>";

pub const MAX_LEN_PLACEHOLDER: &str = "<MAX_LEN>";
pub const PROMPT_PLACEHOLDER: &str = "<ORIGINAL_INSTRUCTION>";

#[derive(Debug, Error)]
pub enum LiftError {
    #[error("threshold must be at least 1")]
    ZeroThreshold,
    #[error("template is missing placeholder {0}")]
    MissingPlaceholder(&'static str),
}

/// Settings for one augmentation run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LiftConfig {
    pub threshold: usize,
    pub seed: u64,
    pub template: String,
}

impl LiftConfig {
    pub fn new(threshold: usize, seed: u64) -> Self {
        LiftConfig {
            threshold,
            seed,
            template: DEFAULT_TEMPLATE.to_string(),
        }
    }

    pub fn validate(&self) -> Result<(), LiftError> {
        if self.threshold == 0 {
            return Err(LiftError::ZeroThreshold);
        }
        if !self.template.contains(MAX_LEN_PLACEHOLDER) {
            return Err(LiftError::MissingPlaceholder(MAX_LEN_PLACEHOLDER));
        }
        if !self.template.contains(PROMPT_PLACEHOLDER) {
            return Err(LiftError::MissingPlaceholder(PROMPT_PLACEHOLDER));
        }
        Ok(())
    }
}

impl Default for LiftConfig {
    fn default() -> Self {
        LiftConfig::new(10, 0)
    }
}

/// Render the default length-instruction template, byte-exact: the
/// instruction line, a blank line, then the prompt verbatim.
pub fn render_template(prompt: &str, max_len: usize) -> String {
    render_with_template(DEFAULT_TEMPLATE, prompt, max_len)
}

/// Render a custom template containing both placeholders.
///
/// The limit is substituted first so a prompt containing the literal
/// placeholder text is never rewritten.
pub fn render_with_template(template: &str, prompt: &str, max_len: usize) -> String {
    template
        .replacen(MAX_LEN_PLACEHOLDER, &max_len.to_string(), 1)
        .replacen(PROMPT_PLACEHOLDER, prompt, 1)
}

/// Counters describing one augmentation run.
///
/// `n_flipped` equals `n_chosen_longer` by construction (each chosen-longer
/// triple contributes exactly one flipped binding pair).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentationStats {
    pub n_input: usize,
    pub n_filtered_close: usize,
    pub n_chosen_longer: usize,
    pub n_chosen_shorter: usize,
    pub n_output: usize,
    pub n_flipped: usize,
}

impl AugmentationStats {
    pub fn check_invariants(&self) -> Result<(), String> {
        if self.n_output != 2 * (self.n_input - self.n_filtered_close) {
            return Err(format!(
                "n_output {} != 2 * (n_input {} - n_filtered_close {})",
                self.n_output, self.n_input, self.n_filtered_close
            ));
        }
        if self.n_flipped != self.n_chosen_longer {
            return Err(format!(
                "n_flipped {} != n_chosen_longer {}",
                self.n_flipped, self.n_chosen_longer
            ));
        }
        if self.n_input != self.n_filtered_close + self.n_chosen_longer + self.n_chosen_shorter {
            return Err("case counts do not partition the input".into());
        }
        Ok(())
    }
}

/// Augment one triple into zero or two length-instructed pairs.
///
/// The binding limit is drawn uniformly from `[shorter, longer)` (inclusive
/// lower, exclusive upper) so the longer response always strictly violates
/// it; a response of exactly the limit still satisfies "words or less".
/// The lower endpoint is clamped to 1 to keep limits positive when the
/// shorter response has no countable words.
pub fn augment_triple(
    triple: &PreferenceTriple,
    cfg: &LiftConfig,
    sampler: &mut SeededSampler,
) -> Vec<AugmentedPair> {
    let chosen_len = count_words(&triple.chosen);
    let rejected_len = count_words(&triple.rejected);
    if chosen_len.abs_diff(rejected_len) < cfg.threshold {
        return Vec::new();
    }
    let longer = chosen_len.max(rejected_len);
    let shorter = chosen_len.min(rejected_len);
    let binding_lo = shorter.max(1) as u64;
    let binding_hi = longer as u64;
    if binding_lo >= binding_hi {
        // Unreachable for threshold >= 2; with threshold 1 a 0-vs-1 word
        // triple admits no positive limit the longer response violates.
        return Vec::new();
    }

    let slack_len = longer + cfg.threshold;
    let binding_len = sampler.sample_range(binding_lo, binding_hi) as usize;
    let chosen_is_longer = chosen_len > rejected_len;

    let pair = |max_len: usize, winner: &str, loser: &str, flipped: bool, case_tag: CaseTag| {
        AugmentedPair {
            source_id: triple.id.clone(),
            li_prompt: render_with_template(&cfg.template, &triple.prompt, max_len),
            max_len,
            winner: winner.to_string(),
            loser: loser.to_string(),
            flipped,
            case_tag,
        }
    };

    if chosen_is_longer {
        vec![
            pair(
                slack_len,
                &triple.chosen,
                &triple.rejected,
                false,
                CaseTag::LongerChosenSlack,
            ),
            // The chosen response breaks the sampled limit and loses.
            pair(
                binding_len,
                &triple.rejected,
                &triple.chosen,
                true,
                CaseTag::LongerChosenBinding,
            ),
        ]
    } else {
        vec![
            pair(
                slack_len,
                &triple.chosen,
                &triple.rejected,
                false,
                CaseTag::ShorterChosenSlack,
            ),
            pair(
                binding_len,
                &triple.chosen,
                &triple.rejected,
                false,
                CaseTag::ShorterChosenBinding,
            ),
        ]
    }
}

/// Augment a dataset in input order. Deterministic for a given seed and
/// independent of dataset order: each triple's draw is keyed by its id.
pub fn augment_dataset(
    triples: &[PreferenceTriple],
    cfg: &LiftConfig,
) -> Result<(Vec<AugmentedPair>, AugmentationStats), LiftError> {
    cfg.validate()?;
    let mut pairs = Vec::with_capacity(triples.len() * 2);
    let mut stats = AugmentationStats::default();
    for triple in triples {
        let mut sampler = SeededSampler::from_key(cfg.seed, &triple.id);
        let out = augment_triple(triple, cfg, &mut sampler);
        stats.n_input += 1;
        if out.is_empty() {
            stats.n_filtered_close += 1;
            continue;
        }
        match out[1].case_tag {
            CaseTag::LongerChosenBinding => stats.n_chosen_longer += 1,
            CaseTag::ShorterChosenBinding => stats.n_chosen_shorter += 1,
            _ => unreachable!("second pair is always the binding pair"),
        }
        stats.n_flipped += out.iter().filter(|p| p.flipped).count();
        stats.n_output += out.len();
        pairs.extend(out);
    }
    debug_assert!(stats.check_invariants().is_ok());
    Ok((pairs, stats))
}

/// Concatenate the original triples and the augmented pairs into one
/// training set of preference triples. No deduplication. Augmented pairs
/// get ids `<source_id>#li<k>` with `k` counting pairs per source.
pub fn union_training_set(
    triples: &[PreferenceTriple],
    pairs: &[AugmentedPair],
) -> Vec<PreferenceTriple> {
    let mut out: Vec<PreferenceTriple> = triples.to_vec();
    let mut per_source: std::collections::HashMap<&str, usize> = std::collections::HashMap::new();
    for pair in pairs {
        let k = per_source.entry(pair.source_id.as_str()).or_insert(0);
        out.push(PreferenceTriple {
            id: format!("{}#li{k}", pair.source_id),
            prompt: pair.li_prompt.clone(),
            chosen: pair.winner.clone(),
            rejected: pair.loser.clone(),
        });
        *k += 1;
    }
    out
}
