//! Generation strategies behind a common trait, selected by name.
//!
//! The built-in generators are offline mocks used for tests, dry runs, and
//! stress sweeps; the HTTP-backed generator registers itself under `http`
//! from the client layer. Specs are `name` or `name:argument`, e.g.
//! `fixed:hello world`, `words:120`, `comply`, `echo`.

use crate::datamodel::{BenchmarkEntry, GenerationRecord};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("generation failed: {0}")]
    Failed(String),
    #[error("benchmark is empty")]
    EmptyBenchmark,
    #[error("all {0} entries failed; first error: {1}")]
    AllFailed(usize, String),
}

/// A model that answers one length-instructed prompt at a time.
pub trait Generator: Send + Sync {
    fn name(&self) -> &str;
    fn generate(&self, li_prompt: &str) -> Result<String, GenerateError>;
}

/// Always returns the same text, whatever the prompt.
pub struct FixedGenerator {
    text: String,
}

impl FixedGenerator {
    pub fn new(text: impl Into<String>) -> Self {
        FixedGenerator { text: text.into() }
    }
}

impl Generator for FixedGenerator {
    fn name(&self) -> &str {
        "fixed"
    }

    fn generate(&self, _li_prompt: &str) -> Result<String, GenerateError> {
        Ok(self.text.clone())
    }
}

/// Emits exactly `n` words.
pub struct WordsGenerator {
    n: usize,
}

impl WordsGenerator {
    pub fn new(n: usize) -> Self {
        WordsGenerator { n }
    }
}

impl Generator for WordsGenerator {
    fn name(&self) -> &str {
        "words"
    }

    fn generate(&self, _li_prompt: &str) -> Result<String, GenerateError> {
        Ok(vec!["word"; self.n].join(" "))
    }
}

/// Echoes the prompt back.
pub struct EchoGenerator;

impl Generator for EchoGenerator {
    fn name(&self) -> &str {
        "echo"
    }

    fn generate(&self, li_prompt: &str) -> Result<String, GenerateError> {
        Ok(li_prompt.to_string())
    }
}

/// Reads the limit out of the length-instruction line and emits exactly
/// that many words, so it never violates.
pub struct ComplyGenerator;

impl ComplyGenerator {
    fn limit_from_prompt(li_prompt: &str) -> Option<usize> {
        let first_line = li_prompt.lines().next()?;
        first_line
            .split_whitespace()
            .find_map(|tok| tok.parse::<usize>().ok())
    }
}

impl Generator for ComplyGenerator {
    fn name(&self) -> &str {
        "comply"
    }

    fn generate(&self, li_prompt: &str) -> Result<String, GenerateError> {
        let limit = Self::limit_from_prompt(li_prompt).ok_or_else(|| {
            GenerateError::Failed("prompt carries no numeric limit to comply with".into())
        })?;
        Ok(vec!["word"; limit.max(1)].join(" "))
    }
}

/// A generator that fails every call; exercises failure-record paths.
pub struct FailingGenerator;

impl Generator for FailingGenerator {
    fn name(&self) -> &str {
        "failing"
    }

    fn generate(&self, _li_prompt: &str) -> Result<String, GenerateError> {
        Err(GenerateError::Failed("simulated failure".into()))
    }
}

// ---------------------------------------------------------------------------
// Registry.
// ---------------------------------------------------------------------------

#[derive(Debug, Error)]
#[error("unknown or invalid generator spec {spec:?}: {message}")]
pub struct RegistryError {
    pub spec: String,
    pub message: String,
}

type BuildFn = Box<dyn Fn(Option<&str>) -> Result<Box<dyn Generator>, String> + Send + Sync>;

struct RegistryEntry {
    name: &'static str,
    summary: &'static str,
    build: BuildFn,
}

/// Generators registered by name, selected at runtime from a spec string.
pub struct GeneratorRegistry {
    entries: Vec<RegistryEntry>,
}

impl GeneratorRegistry {
    /// Registry with the built-in offline generators.
    pub fn builtin() -> Self {
        let mut registry = GeneratorRegistry { entries: Vec::new() };
        registry.register("fixed", "always returns the given text (fixed:<text>)", |arg| {
            let text = arg.ok_or("fixed generator needs text, e.g. fixed:hello")?;
            Ok(Box::new(FixedGenerator::new(text)))
        });
        registry.register("words", "emits exactly N words (words:<n>)", |arg| {
            let n: usize = arg
                .ok_or("words generator needs a count, e.g. words:120")?
                .parse()
                .map_err(|e| format!("bad count: {e}"))?;
            Ok(Box::new(WordsGenerator::new(n)))
        });
        registry.register("echo", "echoes the prompt back", |_| Ok(Box::new(EchoGenerator)));
        registry.register("comply", "emits exactly the prompt's word limit", |_| {
            Ok(Box::new(ComplyGenerator))
        });
        registry.register("failing", "fails every request (testing)", |_| {
            Ok(Box::new(FailingGenerator))
        });
        registry
    }

    pub fn register(
        &mut self,
        name: &'static str,
        summary: &'static str,
        build: impl Fn(Option<&str>) -> Result<Box<dyn Generator>, String> + Send + Sync + 'static,
    ) {
        self.entries.push(RegistryEntry {
            name,
            summary,
            build: Box::new(build),
        });
    }

    /// Build from `name` or `name:argument`.
    pub fn build(&self, spec: &str) -> Result<Box<dyn Generator>, RegistryError> {
        let (name, arg) = match spec.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (spec, None),
        };
        let entry = self
            .entries
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| RegistryError {
                spec: spec.to_string(),
                message: format!("known generators: {}", self.names().join(", ")),
            })?;
        (entry.build)(arg).map_err(|message| RegistryError {
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

// ---------------------------------------------------------------------------
// Parallel orchestration.
// ---------------------------------------------------------------------------

/// Apply `f` to every item with at most `concurrency` worker threads,
/// returning results in item order.
pub(crate) fn parallel_map<T, R, F>(items: &[T], concurrency: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let workers = concurrency.max(1).min(items.len().max(1));
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::SeqCst);
                if index >= items.len() {
                    break;
                }
                let result = f(&items[index]);
                slots.lock().expect("result slots lock")[index] = Some(result);
            });
        }
    });
    slots
        .into_inner()
        .expect("result slots lock")
        .into_iter()
        .map(|slot| slot.expect("every index filled"))
        .collect()
}

/// Run a generator over every benchmark entry with bounded concurrency.
///
/// Per-entry failures become explicit failure records; output is ordered
/// by entry id regardless of completion order. Fails only if every entry
/// failed.
pub fn generate_over_benchmark(
    generator: &dyn Generator,
    bench: &[BenchmarkEntry],
    concurrency: usize,
) -> Result<Vec<GenerationRecord>, GenerateError> {
    if bench.is_empty() {
        return Err(GenerateError::EmptyBenchmark);
    }
    let mut records = parallel_map(bench, concurrency, |entry| {
        match generator.generate(&entry.li_prompt) {
            Ok(text) => GenerationRecord::from_response(
                entry.id.clone(),
                generator.name(),
                text,
                entry.target_len,
            ),
            Err(e) => GenerationRecord::from_failure(entry.id.clone(), generator.name(), e.to_string()),
        }
    });
    records.sort_by(|a, b| a.entry_id.cmp(&b.entry_id));
    if records.iter().all(|r| r.failed) {
        let first = records[0].error.clone().unwrap_or_default();
        return Err(GenerateError::AllFailed(records.len(), first));
    }
    Ok(records)
}
