//! Record types shared by every pipeline stage, with strict JSONL ingestion
//! and canonical (byte-deterministic) serialization.
//!
//! One JSON object per line, fixed key order, no extra whitespace, newline
//! terminated. Loading validates every record and reports the offending
//! line number; a malformed file never yields a partial dataset.

use crate::wordcount::count_words;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: line {line}: {message}")]
    Malformed {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}: line {line}: duplicate id {id:?}")]
    DuplicateId {
        path: String,
        line: usize,
        id: String,
    },
}

impl DataError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        DataError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

/// A record that can live in a JSONL dataset.
pub trait JsonlRecord: Serialize + DeserializeOwned {
    /// Structural validation beyond what serde enforces.
    fn validate(&self) -> Result<(), String>;

    /// Key that must be unique within one file, if any.
    fn dedup_key(&self) -> Option<String> {
        None
    }
}

// ---------------------------------------------------------------------------
// Core record types.
// ---------------------------------------------------------------------------

/// An original preference triple: prompt, winning response, losing response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreferenceTriple {
    pub id: String,
    pub prompt: String,
    pub chosen: String,
    pub rejected: String,
}

impl JsonlRecord for PreferenceTriple {
    fn validate(&self) -> Result<(), String> {
        require_nonempty("id", &self.id)?;
        require_nonempty("prompt", &self.prompt)?;
        require_nonempty("chosen", &self.chosen)?;
        require_nonempty("rejected", &self.rejected)
    }

    fn dedup_key(&self) -> Option<String> {
        Some(self.id.clone())
    }
}

/// Which branch of the augmentation produced a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseTag {
    #[serde(rename = "longer-chosen/slack")]
    LongerChosenSlack,
    #[serde(rename = "longer-chosen/binding")]
    LongerChosenBinding,
    #[serde(rename = "shorter-chosen/slack")]
    ShorterChosenSlack,
    #[serde(rename = "shorter-chosen/binding")]
    ShorterChosenBinding,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseTag::LongerChosenSlack => "longer-chosen/slack",
            CaseTag::LongerChosenBinding => "longer-chosen/binding",
            CaseTag::ShorterChosenSlack => "shorter-chosen/slack",
            CaseTag::ShorterChosenBinding => "shorter-chosen/binding",
        };
        f.write_str(s)
    }
}

/// A length-instructed preference pair derived from a [`PreferenceTriple`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AugmentedPair {
    pub source_id: String,
    pub li_prompt: String,
    pub max_len: usize,
    pub winner: String,
    pub loser: String,
    pub flipped: bool,
    pub case_tag: CaseTag,
}

impl JsonlRecord for AugmentedPair {
    fn validate(&self) -> Result<(), String> {
        require_nonempty("source_id", &self.source_id)?;
        require_nonempty("li_prompt", &self.li_prompt)?;
        require_nonempty("winner", &self.winner)?;
        require_nonempty("loser", &self.loser)?;
        if self.max_len == 0 {
            return Err("max_len must be positive".into());
        }
        if self.flipped != (self.case_tag == CaseTag::LongerChosenBinding) {
            return Err(format!(
                "flipped={} inconsistent with case_tag {}",
                self.flipped, self.case_tag
            ));
        }
        Ok(())
    }
}

/// One benchmark prompt with its rendered length instruction and baseline.
///
/// Entries produced by scaling can lose their baseline (no reference
/// response fits the shrunken target); both baseline fields are then null
/// and the entry is only usable for violation-rate evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkEntry {
    pub id: String,
    pub original_prompt: String,
    pub li_prompt: String,
    pub target_len: usize,
    pub baseline_response: Option<String>,
    pub baseline_source: Option<String>,
}

impl BenchmarkEntry {
    /// Baseline response and its source label, when present.
    pub fn baseline(&self) -> Option<(&str, &str)> {
        match (&self.baseline_response, &self.baseline_source) {
            (Some(r), Some(s)) => Some((r.as_str(), s.as_str())),
            _ => None,
        }
    }
}

impl JsonlRecord for BenchmarkEntry {
    fn validate(&self) -> Result<(), String> {
        require_nonempty("id", &self.id)?;
        require_nonempty("original_prompt", &self.original_prompt)?;
        require_nonempty("li_prompt", &self.li_prompt)?;
        if self.target_len == 0 {
            return Err("target_len must be positive".into());
        }
        match (&self.baseline_response, &self.baseline_source) {
            (Some(resp), Some(source)) => {
                require_nonempty("baseline_response", resp)?;
                require_nonempty("baseline_source", source)?;
                let words = count_words(resp);
                if words > self.target_len {
                    return Err(format!(
                        "baseline_response has {words} words, above target_len {}",
                        self.target_len
                    ));
                }
            }
            (None, None) => {}
            _ => {
                return Err(
                    "baseline_response and baseline_source must be both present or both null"
                        .into(),
                )
            }
        }
        let expected = crate::lift::render_template(&self.original_prompt, self.target_len);
        if self.li_prompt != expected {
            return Err("li_prompt does not match the rendered template".into());
        }
        Ok(())
    }

    fn dedup_key(&self) -> Option<String> {
        Some(self.id.clone())
    }
}

/// A model-under-test output for one benchmark entry.
///
/// `failed` marks transport failures; such records count as violations and
/// losses downstream but are tallied separately.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerationRecord {
    pub entry_id: String,
    pub model_label: String,
    pub response: String,
    pub word_count: usize,
    pub violation: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    pub failed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl GenerationRecord {
    /// Record for a successful generation, computing count and violation.
    pub fn from_response(
        entry_id: impl Into<String>,
        model_label: impl Into<String>,
        response: impl Into<String>,
        target_len: usize,
    ) -> Self {
        let response = response.into();
        let word_count = count_words(&response);
        GenerationRecord {
            entry_id: entry_id.into(),
            model_label: model_label.into(),
            response,
            word_count,
            violation: word_count > target_len,
            failed: false,
            error: None,
        }
    }

    /// Record for a failed generation; counts as a violation downstream.
    pub fn from_failure(
        entry_id: impl Into<String>,
        model_label: impl Into<String>,
        error: impl Into<String>,
    ) -> Self {
        GenerationRecord {
            entry_id: entry_id.into(),
            model_label: model_label.into(),
            response: String::new(),
            word_count: 0,
            violation: true,
            failed: true,
            error: Some(error.into()),
        }
    }
}

impl JsonlRecord for GenerationRecord {
    fn validate(&self) -> Result<(), String> {
        require_nonempty("entry_id", &self.entry_id)?;
        require_nonempty("model_label", &self.model_label)?;
        if self.failed {
            if !self.violation {
                return Err("failed record must be marked as violation".into());
            }
            return Ok(());
        }
        let recount = count_words(&self.response);
        if recount != self.word_count {
            return Err(format!(
                "word_count {} does not match recomputed count {recount}",
                self.word_count
            ));
        }
        Ok(())
    }

    fn dedup_key(&self) -> Option<String> {
        Some(format!("{}\u{1f}{}", self.entry_id, self.model_label))
    }
}

/// Outcome of one gated pairwise comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    CandidateWin,
    BaselineWin,
    Tie,
}

/// Result of evaluating one benchmark entry against the baseline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Verdict {
    pub entry_id: String,
    pub outcome: Outcome,
    pub gated: bool,
    pub judge_raw: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl JsonlRecord for Verdict {
    fn validate(&self) -> Result<(), String> {
        require_nonempty("entry_id", &self.entry_id)?;
        if self.gated {
            if self.outcome != Outcome::BaselineWin {
                return Err("gated verdict must be baseline_win".into());
            }
            if !self.judge_raw.is_empty() {
                return Err("gated verdict must have empty judge_raw".into());
            }
        }
        Ok(())
    }

    fn dedup_key(&self) -> Option<String> {
        Some(self.entry_id.clone())
    }
}

/// Aggregate metrics over one evaluation run.
///
/// Percentages and mean are rounded to one decimal at construction; `scale`
/// is 1.0 for unscaled runs; `failures` counts transport-failed records
/// already folded into the rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSummary {
    pub n: usize,
    pub violation_rate: f64,
    pub win_rate: Option<f64>,
    pub mean_words: f64,
    pub scale: f64,
    pub failures: usize,
}

impl EvalSummary {
    pub fn validate(&self) -> Result<(), String> {
        if self.n == 0 {
            return Err("n must be positive".into());
        }
        if !(0.0..=100.0).contains(&self.violation_rate) {
            return Err("violation_rate out of range".into());
        }
        if let Some(w) = self.win_rate {
            if !(0.0..=100.0).contains(&w) {
                return Err("win_rate out of range".into());
            }
        }
        if !(self.scale > 0.0 && self.scale <= 1.0) {
            return Err("scale must be in (0, 1]".into());
        }
        Ok(())
    }
}

/// A prompt as ingested from user-supplied files. Missing ids are assigned
/// `row-<zero-padded index>` so joins stay stable across stages.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PromptRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub prompt: String,
}

impl JsonlRecord for PromptRecord {
    fn validate(&self) -> Result<(), String> {
        if let Some(id) = &self.id {
            require_nonempty("id", id)?;
        }
        require_nonempty("prompt", &self.prompt)
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

fn require_nonempty(field: &str, value: &str) -> Result<(), String> {
    if value.is_empty() {
        Err(format!("field {field} must be non-empty"))
    } else {
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// JSONL ingestion and canonical serialization.
// ---------------------------------------------------------------------------

/// Load and validate a JSONL dataset. Blank lines are skipped; any
/// malformed or duplicate record aborts the load with its line number.
pub fn load_jsonl<T: JsonlRecord>(path: impl AsRef<Path>) -> Result<Vec<T>, DataError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| DataError::io(path, e))?;
    let reader = BufReader::new(file);
    let mut records = Vec::new();
    let mut seen_keys: HashSet<String> = HashSet::new();
    for (index, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| DataError::io(path, e))?;
        let line_no = index + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record: T = serde_json::from_str(&line).map_err(|e| DataError::Malformed {
            path: path.display().to_string(),
            line: line_no,
            message: strip_serde_location(&e.to_string()),
        })?;
        record.validate().map_err(|message| DataError::Malformed {
            path: path.display().to_string(),
            line: line_no,
            message,
        })?;
        if let Some(key) = record.dedup_key() {
            if !seen_keys.insert(key.clone()) {
                return Err(DataError::DuplicateId {
                    path: path.display().to_string(),
                    line: line_no,
                    id: key,
                });
            }
        }
        records.push(record);
    }
    Ok(records)
}

/// Canonical JSONL bytes: compact JSON, declaration key order, one record
/// per line, newline terminated. Equal values always produce equal bytes.
pub fn to_jsonl_bytes<T: Serialize>(records: &[T]) -> Result<Vec<u8>, serde_json::Error> {
    let mut out = Vec::new();
    for record in records {
        serde_json::to_writer(&mut out, record).expect("write to vec cannot fail on io");
        out.push(b'\n');
    }
    Ok(out)
}

/// Write records as canonical JSONL to a file.
pub fn write_jsonl<T: Serialize>(records: &[T], path: impl AsRef<Path>) -> Result<(), DataError> {
    let path = path.as_ref();
    let bytes = to_jsonl_bytes(records).map_err(|e| DataError::Malformed {
        path: path.display().to_string(),
        line: 0,
        message: e.to_string(),
    })?;
    let mut file = std::fs::File::create(path).map_err(|e| DataError::io(path, e))?;
    file.write_all(&bytes).map_err(|e| DataError::io(path, e))
}

/// Resolve optional ids to `row-<zero-padded index>` and check uniqueness.
pub fn assign_prompt_ids(prompts: Vec<PromptRecord>) -> Result<Vec<(String, String)>, DataError> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(prompts.len());
    for (index, record) in prompts.into_iter().enumerate() {
        let id = record.id.unwrap_or_else(|| format!("row-{index:05}"));
        if !seen.insert(id.clone()) {
            return Err(DataError::DuplicateId {
                path: "<prompts>".into(),
                line: index + 1,
                id,
            });
        }
        out.push((id, record.prompt));
    }
    Ok(out)
}

// serde_json appends " at line 1 column N" to its messages; the JSONL line
// number we report is the authoritative location.
fn strip_serde_location(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(pos) => message[..pos].to_string(),
        None => message.to_string(),
    }
}
