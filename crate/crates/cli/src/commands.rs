//! Subcommand implementations.

use crate::manifest::ManifestBuilder;
use crate::settings::{
    resolve_judge_endpoint, resolve_model_endpoint, CommonFlags, JudgeFlags, ModelFlags, Settings,
};
use anyhow::{anyhow, bail, Context, Result};
use lenlift_client::{HttpClient, HttpGenerator, HttpJudge};
use lenlift_core::backend::{generate_over_benchmark, Generator, GeneratorRegistry};
use lenlift_core::benchbuild::{
    build_benchmark, build_multi_constraint, detect_preexisting_constraint, scale_benchmark,
    ReferenceGeneration, ScaleSpec,
};
use lenlift_core::datamodel::{
    assign_prompt_ids, load_jsonl, write_jsonl, BenchmarkEntry, GenerationRecord, PromptRecord,
    PreferenceTriple, Verdict,
};
use lenlift_core::judge::{
    judge_over_benchmark, JudgeConfig, JudgeError, JudgeRegistry, PairwiseJudge, PairwiseResult,
    TiePolicy, DEFAULT_JUDGE_TEMPLATE,
};
use lenlift_core::lift::{augment_dataset, union_training_set, LiftConfig};
use lenlift_core::metrics::{run_sweep, summarize, SweepResult};
use lenlift_core::report::{scatter_csv, scatter_data, scatter_svg, sweep_csv, sweep_svg, write_text};
use lenlift_core::wordcount::{count_words, tokenize};
use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Failures are split into configuration/validation problems (exit 1) and
/// runtime transport problems (exit 2).
#[derive(Debug)]
pub enum CliError {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(e) | CliError::Runtime(e) => write!(f, "{e:#}"),
        }
    }
}

trait IntoCli<T> {
    fn config_err(self) -> Result<T, CliError>;
    fn runtime_err(self) -> Result<T, CliError>;
}

impl<T, E: Into<anyhow::Error>> IntoCli<T> for Result<T, E> {
    fn config_err(self) -> Result<T, CliError> {
        self.map_err(|e| CliError::Config(e.into()))
    }

    fn runtime_err(self) -> Result<T, CliError> {
        self.map_err(|e| CliError::Runtime(e.into()))
    }
}

fn warn_if_empty<T>(records: &[T], path: &Path) {
    if records.is_empty() {
        eprintln!("warning: {} contains no records", path.display());
    }
}

// ---------------------------------------------------------------------------
// count
// ---------------------------------------------------------------------------

#[derive(Debug, clap::Args)]
pub struct CountArgs {
    /// Text to count
    #[arg(long, conflicts_with = "file")]
    pub text: Option<String>,

    /// File whose contents to count
    #[arg(long)]
    pub file: Option<PathBuf>,

    /// Also print the token sequence, one per line
    #[arg(long)]
    pub tokens: bool,
}

pub fn count(args: CountArgs) -> Result<(), CliError> {
    let text = match (args.text, args.file) {
        (Some(text), None) => text,
        (None, Some(path)) => std::fs::read_to_string(&path)
            .with_context(|| format!("reading {}", path.display()))
            .config_err()?,
        _ => return Err(CliError::Config(anyhow!("provide exactly one of --text or --file"))),
    };
    if args.tokens {
        for token in tokenize(&text) {
            println!("{token}");
        }
    }
    println!("{}", count_words(&text));
    Ok(())
}

// ---------------------------------------------------------------------------
// augment
// ---------------------------------------------------------------------------

#[derive(Debug, clap::Args)]
pub struct AugmentArgs {
    /// Preference triples JSONL ({"id","prompt","chosen","rejected"})
    #[arg(long = "in")]
    pub input: PathBuf,

    /// Output JSONL of augmented pairs
    #[arg(long)]
    pub out: PathBuf,

    /// Minimum word-count difference between responses
    #[arg(long, default_value_t = 10)]
    pub threshold: usize,

    /// Sampling seed (required: augmentation must be reproducible)
    #[arg(long)]
    pub seed: u64,

    /// Also write originals plus augmented pairs as one training JSONL
    #[arg(long)]
    pub emit_union: Option<PathBuf>,

    /// Replacement instruction template with <MAX_LEN> and <ORIGINAL_INSTRUCTION>
    #[arg(long)]
    pub template_file: Option<PathBuf>,
}

pub fn augment(args: AugmentArgs) -> Result<(), CliError> {
    let triples: Vec<PreferenceTriple> = load_jsonl(&args.input).config_err()?;
    warn_if_empty(&triples, &args.input);

    let mut cfg = LiftConfig::new(args.threshold, args.seed);
    if let Some(path) = &args.template_file {
        cfg.template = std::fs::read_to_string(path)
            .with_context(|| format!("reading template {}", path.display()))
            .config_err()?;
    }
    let (pairs, stats) = augment_dataset(&triples, &cfg).config_err()?;
    write_jsonl(&pairs, &args.out).config_err()?;

    let mut builder = ManifestBuilder::new("augment")
        .config(serde_json::json!({
            "threshold": args.threshold,
            "seed": args.seed,
            "template": args.template_file.as_ref().map(|p| p.display().to_string()),
        }))
        .seed(args.seed)
        .input(&args.input)
        .config_err()?
        .output(&args.out);

    if let Some(union_path) = &args.emit_union {
        let union = union_training_set(&triples, &pairs);
        write_jsonl(&union, union_path).config_err()?;
        builder = builder.output(union_path);
    }
    builder.write(&args.out).config_err()?;

    println!("{}", serde_json::to_string(&stats).expect("stats serialize"));
    Ok(())
}

// ---------------------------------------------------------------------------
// build-bench / scale-bench
// ---------------------------------------------------------------------------

#[derive(Debug, clap::Args)]
pub struct BuildBenchArgs {
    /// Prompts JSONL ({"id","prompt"}; ids optional)
    #[arg(long)]
    pub prompts: PathBuf,

    /// Reference generations JSONL ({"prompt_id","model_label","response"})
    #[arg(long)]
    pub refs: PathBuf,

    /// File of prompt ids to exclude, one per line
    #[arg(long, conflicts_with = "auto_exclude")]
    pub exclude: Option<PathBuf>,

    /// Exclude prompts that already carry a length constraint
    #[arg(long)]
    pub auto_exclude: bool,

    /// Build k constraints per prompt from the k shortest references
    #[arg(long)]
    pub multi: Option<usize>,

    /// Output benchmark JSONL
    #[arg(long)]
    pub out: PathBuf,
}

fn load_exclusion_file(path: &Path) -> Result<HashSet<String>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_owned)
        .collect())
}

pub fn build_bench(args: BuildBenchArgs) -> Result<(), CliError> {
    let prompt_records: Vec<PromptRecord> = load_jsonl(&args.prompts).config_err()?;
    warn_if_empty(&prompt_records, &args.prompts);
    let prompts = assign_prompt_ids(prompt_records).config_err()?;
    let refs: Vec<ReferenceGeneration> = load_jsonl(&args.refs).config_err()?;

    let exclusions: HashSet<String> = if args.auto_exclude {
        let detected: HashSet<String> = prompts
            .iter()
            .filter(|(_, text)| detect_preexisting_constraint(text))
            .map(|(id, _)| id.clone())
            .collect();
        if !detected.is_empty() {
            let mut ids: Vec<_> = detected.iter().cloned().collect();
            ids.sort();
            eprintln!(
                "auto-excluding {} prompts with pre-existing length constraints: {}",
                ids.len(),
                ids.join(", ")
            );
        }
        detected
    } else if let Some(path) = &args.exclude {
        load_exclusion_file(path).config_err()?
    } else {
        HashSet::new()
    };

    let bench = match args.multi {
        Some(k) => {
            let kept: Vec<(String, String)> = prompts
                .iter()
                .filter(|(id, _)| !exclusions.contains(id))
                .cloned()
                .collect();
            build_multi_constraint(&kept, &refs, k).config_err()?
        }
        None => build_benchmark(&prompts, &refs, &exclusions).config_err()?,
    };
    write_jsonl(&bench, &args.out).config_err()?;
    eprintln!("built {} benchmark entries", bench.len());

    let mut builder = ManifestBuilder::new("build-bench")
        .config(serde_json::json!({
            "auto_exclude": args.auto_exclude,
            "exclude": args.exclude.as_ref().map(|p| p.display().to_string()),
            "multi": args.multi,
            "excluded_count": exclusions.len(),
        }))
        .input(&args.prompts)
        .config_err()?
        .input(&args.refs)
        .config_err()?;
    if let Some(path) = &args.exclude {
        builder = builder.input(path).config_err()?;
    }
    builder.output(&args.out).write(&args.out).config_err()?;
    Ok(())
}

#[derive(Debug, clap::Args)]
pub struct ScaleBenchArgs {
    /// Benchmark JSONL to scale
    #[arg(long = "in")]
    pub input: PathBuf,

    /// Scale factor in (0, 1]
    #[arg(long)]
    pub factor: f64,

    /// Output benchmark JSONL
    #[arg(long)]
    pub out: PathBuf,
}

pub fn scale_bench(args: ScaleBenchArgs) -> Result<(), CliError> {
    let bench: Vec<BenchmarkEntry> = load_jsonl(&args.input).config_err()?;
    warn_if_empty(&bench, &args.input);
    let scaled = scale_benchmark(&bench, args.factor).config_err()?;
    let lost = scaled.iter().filter(|e| e.baseline().is_none()).count()
        - bench.iter().filter(|e| e.baseline().is_none()).count();
    if lost > 0 {
        eprintln!("{lost} entries lost their baseline at factor {}; they remain usable for violation rates only", args.factor);
    }
    write_jsonl(&scaled, &args.out).config_err()?;
    ManifestBuilder::new("scale-bench")
        .config(serde_json::json!({"factor": args.factor}))
        .input(&args.input)
        .config_err()?
        .output(&args.out)
        .write(&args.out)
        .config_err()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

#[derive(Debug, clap::Args)]
pub struct GenerateArgs {
    /// Benchmark JSONL
    #[arg(long)]
    pub bench: PathBuf,

    /// Output generations JSONL
    #[arg(long)]
    pub out: PathBuf,

    /// Generator: http, fixed:<text>, words:<n>, comply, echo, failing
    #[arg(long, default_value = "http")]
    pub generator: String,

    #[command(flatten)]
    pub model: ModelFlags,

    #[command(flatten)]
    pub common: CommonFlags,
}

fn build_generator(
    spec: &str,
    settings: &Settings,
    model: &ModelFlags,
    cache_dir: &Path,
) -> Result<Box<dyn Generator>> {
    let mut registry = GeneratorRegistry::builtin();
    let endpoint = resolve_model_endpoint(settings, model)?;
    let cache_dir = cache_dir.to_path_buf();
    registry.register(
        "http",
        "chat-completions endpoint (needs --model-url)",
        move |_| {
            let cfg = endpoint
                .clone()
                .ok_or("generator 'http' requires --model-url (or model_url in config/env)")?;
            let client = HttpClient::new(cfg, &cache_dir).map_err(|e| e.to_string())?;
            Ok(Box::new(HttpGenerator::new(client)))
        },
    );
    Ok(registry.build(spec)?)
}

pub fn generate(args: GenerateArgs) -> Result<(), CliError> {
    let settings = Settings::load(args.common.config.as_deref()).config_err()?;
    let bench: Vec<BenchmarkEntry> = load_jsonl(&args.bench).config_err()?;
    warn_if_empty(&bench, &args.bench);
    let cache_dir = settings.cache_dir(args.common.cache_dir.as_deref());
    let concurrency = settings.concurrency(args.common.concurrency).config_err()?;

    let generator =
        build_generator(&args.generator, &settings, &args.model, &cache_dir).config_err()?;
    let records = generate_over_benchmark(generator.as_ref(), &bench, concurrency).runtime_err()?;
    write_jsonl(&records, &args.out).config_err()?;

    let violations = records.iter().filter(|r| r.violation).count();
    let failures = records.iter().filter(|r| r.failed).count();
    eprintln!(
        "generated {} records ({} violations, {} failures)",
        records.len(),
        violations,
        failures
    );

    ManifestBuilder::new("generate")
        .config(serde_json::json!({
            "generator": args.generator,
            "concurrency": concurrency,
            "cache_dir": cache_dir.display().to_string(),
        }))
        .input(&args.bench)
        .config_err()?
        .output(&args.out)
        .write(&args.out)
        .config_err()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

#[derive(Debug, clap::Args)]
pub struct EvaluateArgs {
    /// Benchmark JSONL
    #[arg(long)]
    pub bench: PathBuf,

    /// Generations JSONL from `generate`
    #[arg(long)]
    pub gens: PathBuf,

    /// Output verdicts JSONL
    #[arg(long)]
    pub out: PathBuf,

    /// Also write the summary JSON here
    #[arg(long)]
    pub summary: Option<PathBuf>,

    /// Scale annotation for the summary (1.0 for unscaled benchmarks)
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,

    /// Judge: http, prefer-longer, prefer-shorter, lexicographic, hash:<seed>
    #[arg(long, default_value = "http")]
    pub judge: String,

    #[command(flatten)]
    pub judge_flags: JudgeFlags,

    #[command(flatten)]
    pub common: CommonFlags,
}

/// Stand-in used when no judging is needed; any invocation is a bug
/// surfaced as an error verdict rather than a silent mock judgement.
struct UnconfiguredJudge;

impl PairwiseJudge for UnconfiguredJudge {
    fn name(&self) -> &str {
        "unconfigured"
    }

    fn compare(&self, _: &str, _: &str, _: &str) -> Result<PairwiseResult, JudgeError> {
        Err(JudgeError::Transport(
            "judge invoked but no judge endpoint was configured".into(),
        ))
    }
}

fn build_judge(
    spec: &str,
    settings: &Settings,
    flags: &JudgeFlags,
    cache_dir: &Path,
    judging_needed: bool,
) -> Result<Box<dyn PairwiseJudge>> {
    if spec == "http" {
        let endpoint = resolve_judge_endpoint(settings, flags)?;
        return match endpoint {
            Some(cfg) => {
                let template = match &flags.judge_template_file {
                    Some(path) => std::fs::read_to_string(path)
                        .with_context(|| format!("reading judge template {}", path.display()))?,
                    None => DEFAULT_JUDGE_TEMPLATE.to_string(),
                };
                let client = HttpClient::new(cfg, cache_dir).map_err(|e| anyhow!("{e}"))?;
                Ok(Box::new(HttpJudge::new(client, template)?))
            }
            None if judging_needed => bail!(
                "this run needs pairwise judging but no judge is configured; \
                 pass --judge-url (or judge_url in config/env), or pick a mock \
                 with --judge <name>"
            ),
            None => Ok(Box::new(UnconfiguredJudge)),
        };
    }
    Ok(JudgeRegistry::builtin().build(spec)?)
}

fn judging_needed(bench: &[BenchmarkEntry], gens: &[GenerationRecord]) -> bool {
    let compliant: HashSet<&str> = gens
        .iter()
        .filter(|g| !g.violation)
        .map(|g| g.entry_id.as_str())
        .collect();
    bench
        .iter()
        .any(|e| e.baseline().is_some() && compliant.contains(e.id.as_str()))
}

pub fn evaluate(args: EvaluateArgs) -> Result<(), CliError> {
    let settings = Settings::load(args.common.config.as_deref()).config_err()?;
    let bench: Vec<BenchmarkEntry> = load_jsonl(&args.bench).config_err()?;
    let gens: Vec<GenerationRecord> = load_jsonl(&args.gens).config_err()?;
    warn_if_empty(&bench, &args.bench);
    warn_if_empty(&gens, &args.gens);

    let known: HashSet<&str> = bench.iter().map(|e| e.id.as_str()).collect();
    for gen in &gens {
        if !known.contains(gen.entry_id.as_str()) {
            return Err(CliError::Config(anyhow!(
                "generation references unknown benchmark entry {:?}",
                gen.entry_id
            )));
        }
    }

    let cache_dir = settings.cache_dir(args.common.cache_dir.as_deref());
    let concurrency = settings.concurrency(args.common.concurrency).config_err()?;
    let tie_policy = TiePolicy::from_str(&args.judge_flags.tie_policy)
        .map_err(|e| CliError::Config(anyhow!(e)))?;
    let judge_cfg = JudgeConfig {
        both_orders: !args.judge_flags.single_order,
        tie_policy,
    };

    let needed = judging_needed(&bench, &gens);
    let judge = build_judge(&args.judge, &settings, &args.judge_flags, &cache_dir, needed)
        .config_err()?;

    let verdicts =
        judge_over_benchmark(&bench, &gens, judge.as_ref(), &judge_cfg, concurrency)
            .runtime_err()?;
    let judge_failures = verdicts.iter().filter(|v| v.error.is_some()).count();
    if judge_failures > 0 {
        eprintln!("warning: {judge_failures} entries failed judging and count as losses");
    }

    let summary = summarize(&gens, Some(&verdicts), tie_policy, args.scale).config_err()?;
    write_jsonl(&verdicts, &args.out).config_err()?;
    let summary_json = serde_json::to_string(&summary).expect("summary serializes");
    if let Some(path) = &args.summary {
        write_text(&format!("{summary_json}\n"), path).config_err()?;
    }
    println!("{summary_json}");

    let mut builder = ManifestBuilder::new("evaluate")
        .config(serde_json::json!({
            "judge": args.judge,
            "both_orders": !args.judge_flags.single_order,
            "tie_policy": args.judge_flags.tie_policy,
            "scale": args.scale,
            "concurrency": concurrency,
            "cache_dir": cache_dir.display().to_string(),
        }))
        .input(&args.bench)
        .config_err()?
        .input(&args.gens)
        .config_err()?
        .output(&args.out);
    if let Some(path) = &args.summary {
        builder = builder.output(path);
    }
    builder.write(&args.out).config_err()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

#[derive(Debug, clap::Args)]
pub struct SweepArgs {
    /// Benchmark JSONL to stress
    #[arg(long)]
    pub bench: PathBuf,

    /// Output directory (sweep.json, sweep.csv, sweep.svg)
    #[arg(long)]
    pub out_dir: PathBuf,

    /// Comma-separated scale factors, default 0.9,0.8,...,0.1
    #[arg(long)]
    pub factors: Option<String>,

    /// Generator: http, fixed:<text>, words:<n>, comply, echo
    #[arg(long, default_value = "http")]
    pub generator: String,

    /// Judge the scaled runs too (same specs as evaluate --judge)
    #[arg(long)]
    pub judge: Option<String>,

    /// Series label in csv/svg output (default: generator name)
    #[arg(long)]
    pub series: Option<String>,

    #[command(flatten)]
    pub model: ModelFlags,

    #[command(flatten)]
    pub judge_flags: JudgeFlags,

    #[command(flatten)]
    pub common: CommonFlags,
}

fn parse_factors(arg: Option<&str>) -> Result<ScaleSpec> {
    match arg {
        None => Ok(ScaleSpec::default()),
        Some(text) => {
            let factors = text
                .split(',')
                .map(|part| {
                    part.trim()
                        .parse::<f64>()
                        .with_context(|| format!("bad scale factor {part:?}"))
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(ScaleSpec::new(factors)?)
        }
    }
}

pub fn sweep(args: SweepArgs) -> Result<(), CliError> {
    let settings = Settings::load(args.common.config.as_deref()).config_err()?;
    let bench: Vec<BenchmarkEntry> = load_jsonl(&args.bench).config_err()?;
    warn_if_empty(&bench, &args.bench);
    let spec = parse_factors(args.factors.as_deref()).config_err()?;
    let cache_dir = settings.cache_dir(args.common.cache_dir.as_deref());
    let concurrency = settings.concurrency(args.common.concurrency).config_err()?;

    let generator =
        build_generator(&args.generator, &settings, &args.model, &cache_dir).config_err()?;
    let tie_policy = TiePolicy::from_str(&args.judge_flags.tie_policy)
        .map_err(|e| CliError::Config(anyhow!(e)))?;
    let judge_cfg = JudgeConfig {
        both_orders: !args.judge_flags.single_order,
        tie_policy,
    };
    let judge = match &args.judge {
        None => None,
        Some(spec) => Some(
            build_judge(spec, &settings, &args.judge_flags, &cache_dir, true).config_err()?,
        ),
    };

    let result = run_sweep(
        &bench,
        &spec,
        generator.as_ref(),
        judge.as_deref().map(|j| (j, &judge_cfg)),
        concurrency,
    )
    .runtime_err()?;

    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))
        .config_err()?;
    let series = args.series.clone().unwrap_or_else(|| generator.name().to_string());
    let json = serde_json::to_string_pretty(&result).expect("sweep serializes");
    write_text(&format!("{json}\n"), args.out_dir.join("sweep.json")).config_err()?;
    write_text(&sweep_csv(&result, &series), args.out_dir.join("sweep.csv")).config_err()?;
    write_text(
        &sweep_svg(&result, &series).config_err()?,
        args.out_dir.join("sweep.svg"),
    )
    .config_err()?;

    ManifestBuilder::new("sweep")
        .config(serde_json::json!({
            "factors": spec.factors,
            "generator": args.generator,
            "judge": args.judge,
            "series": series,
            "concurrency": concurrency,
            "cache_dir": cache_dir.display().to_string(),
        }))
        .input(&args.bench)
        .config_err()?
        .output(&args.out_dir.join("sweep.json"))
        .output(&args.out_dir.join("sweep.csv"))
        .output(&args.out_dir.join("sweep.svg"))
        .write(&args.out_dir)
        .config_err()?;

    for point in &result.points {
        eprintln!(
            "scale {}: violation {}%, mean {} words",
            point.scale, point.violation_rate, point.mean_words
        );
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

#[derive(Debug, clap::Args)]
pub struct ReportArgs {
    /// Benchmark JSONL
    #[arg(long)]
    pub bench: PathBuf,

    /// Generations JSONL
    #[arg(long)]
    pub gens: PathBuf,

    /// Verdicts JSONL (enables win-rate in summary.json)
    #[arg(long)]
    pub verdicts: Option<PathBuf>,

    /// Sweep JSON from `sweep` (adds sweep.csv and sweep.svg)
    #[arg(long)]
    pub sweep: Option<PathBuf>,

    /// Output directory
    #[arg(long)]
    pub out_dir: PathBuf,

    /// Tie handling: half_win or drop
    #[arg(long, default_value = "half_win")]
    pub tie_policy: String,

    /// Scale annotation for summary.json
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,

    /// Series label (default: model label of the generations)
    #[arg(long)]
    pub series: Option<String>,
}

pub fn report(args: ReportArgs) -> Result<(), CliError> {
    let bench: Vec<BenchmarkEntry> = load_jsonl(&args.bench).config_err()?;
    let gens: Vec<GenerationRecord> = load_jsonl(&args.gens).config_err()?;
    warn_if_empty(&bench, &args.bench);
    warn_if_empty(&gens, &args.gens);
    let verdicts: Option<Vec<Verdict>> = match &args.verdicts {
        Some(path) => Some(load_jsonl(path).config_err()?),
        None => None,
    };
    let tie_policy =
        TiePolicy::from_str(&args.tie_policy).map_err(|e| CliError::Config(anyhow!(e)))?;

    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))
        .config_err()?;

    let points = scatter_data(&bench, &gens).config_err()?;
    write_text(&scatter_csv(&points), args.out_dir.join("scatter.csv")).config_err()?;
    if points.is_empty() {
        eprintln!("warning: no plottable generations; skipping scatter.svg");
    } else {
        write_text(
            &scatter_svg(&points).config_err()?,
            args.out_dir.join("scatter.svg"),
        )
        .config_err()?;
    }

    let summary =
        summarize(&gens, verdicts.as_deref(), tie_policy, args.scale).config_err()?;
    let summary_json = serde_json::to_string(&summary).expect("summary serializes");
    write_text(&format!("{summary_json}\n"), args.out_dir.join("summary.json")).config_err()?;

    let series = args
        .series
        .clone()
        .or_else(|| gens.first().map(|g| g.model_label.clone()))
        .unwrap_or_else(|| "model".to_string());

    if let Some(path) = &args.sweep {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))
            .config_err()?;
        let result: SweepResult = serde_json::from_str(&text)
            .with_context(|| format!("parsing {}", path.display()))
            .config_err()?;
        result
            .check_invariants()
            .map_err(|e| CliError::Config(anyhow!(e)))?;
        write_text(&sweep_csv(&result, &series), args.out_dir.join("sweep.csv")).config_err()?;
        write_text(
            &sweep_svg(&result, &series).config_err()?,
            args.out_dir.join("sweep.svg"),
        )
        .config_err()?;
    }

    let mut builder = ManifestBuilder::new("report")
        .config(serde_json::json!({
            "tie_policy": args.tie_policy,
            "scale": args.scale,
            "series": series,
        }))
        .input(&args.bench)
        .config_err()?
        .input(&args.gens)
        .config_err()?;
    if let Some(path) = &args.verdicts {
        builder = builder.input(path).config_err()?;
    }
    if let Some(path) = &args.sweep {
        builder = builder.input(path).config_err()?;
    }
    builder
        .output(&args.out_dir.join("scatter.csv"))
        .output(&args.out_dir.join("summary.json"))
        .write(&args.out_dir)
        .config_err()?;

    println!("{summary_json}");
    Ok(())
}
