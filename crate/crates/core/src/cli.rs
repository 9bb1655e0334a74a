//! Command-line surface. Each command returns an exit code:
//! 0 ok, 2 input error, 3 generation error, 4 contract violation.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::demogen::generate_dataset;
use crate::eval::{run_experiment, EvalItem, Hyper, MethodName};
use crate::io::{
    demo_to_jsonl, parse_demo, read_demo, read_manifest, read_verified, sha256_hex, to_pretty_json, write_atomic,
    Config, IoError, Manifest, ManifestEntry, TruthFile, MANIFEST_FILE,
};
use crate::recognizer::{analyze, analyze_batch, Method, RecognizeError, Trace};
use crate::render::render_svg;
use crate::segmentation::SegmentationError;

pub const SEED_ENV: &str = "MOTION_REASONING_SEED";
pub const DEMOS_PER_TASK: usize = 4;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_GEN: i32 = 3;
pub const EXIT_CONTRACT: i32 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(m: impl ToString) -> Self {
        Self {
            code: EXIT_INPUT,
            message: m.to_string(),
        }
    }

    fn generation(m: impl ToString) -> Self {
        Self {
            code: EXIT_GEN,
            message: m.to_string(),
        }
    }
}

impl From<RecognizeError> for CliError {
    fn from(e: RecognizeError) -> Self {
        let code = match &e {
            RecognizeError::Segmentation(SegmentationError::SimultaneousMotion { .. }) => EXIT_CONTRACT,
            _ => EXIT_INPUT,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "motion-reasoning", version = crate::SCHEMA_VERSION, about = "Goal recognition from tabletop demonstrations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the synthetic demonstration dataset.
    Gen {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config's master seed.
        #[arg(long, env = SEED_ENV)]
        seed: Option<u64>,
        #[arg(long, default_value_t = DEMOS_PER_TASK)]
        demos_per_task: usize,
    },
    /// Print the recognized goal of one demonstration.
    Recognize {
        demo: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// ours, final_state, task_pred or no_motion.
        #[arg(long, default_value = "ours")]
        method: String,
        /// Write the per-segment trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run the split protocol over a generated dataset.
    Eval {
        dataset: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma-separated subset of methods.
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
        /// Metrics file; defaults to metrics.json in the dataset directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a demonstration and its trace as SVG.
    Render {
        demo: PathBuf,
        trace: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

pub fn load_config(path: Option<&Path>) -> Result<Config, CliError> {
    match path {
        Some(p) => Config::load(p).map_err(CliError::input),
        None => Ok(Config::default()),
    }
}

fn method_of(name: &str, cfg: &Config) -> Result<Method, CliError> {
    let m = MethodName::parse(name).map_err(CliError::input)?;
    Ok(match m {
        MethodName::FinalState => Method::FinalState,
        MethodName::TaskPred => Method::TaskPredicates,
        MethodName::NoMotion => Method::NoMotion { tau: cfg.recognizer.tau },
        MethodName::Ours => Method::Ours,
    })
}

pub fn demo_file_name(task_index: usize, demo_index: usize) -> String {
    format!("demos/task{task_index:02}_demo{demo_index}.jsonl")
}

pub fn truth_file_name(task_index: usize, demo_index: usize) -> String {
    format!("truth/task{task_index:02}_demo{demo_index}.json")
}

/// Writes every demo and truth file, then the manifest last.
pub fn cmd_gen(cfg: &Config, out: &Path, seed: Option<u64>, demos_per_task: usize) -> Result<Manifest, CliError> {
    let master_seed = seed.unwrap_or(cfg.master_seed);
    let dataset = generate_dataset(master_seed, demos_per_task, cfg.noise, &cfg.scene)
        .map_err(|(spec, e)| CliError::generation(format!("{spec}: {e}")))?;
    for sub in ["demos", "truth"] {
        fs::create_dir_all(out.join(sub)).map_err(|e| CliError::generation(format!("{}: {e}", out.display())))?;
    }
    let mut entries = Vec::with_capacity(dataset.len());
    for (ti, di, g) in dataset {
        let demo_file = demo_file_name(ti, di);
        let truth_file = truth_file_name(ti, di);
        let demo_text = demo_to_jsonl(&g.demo);
        let truth_text = to_pretty_json(&TruthFile {
            goal: g.ground_truth.clone(),
            task: g.spec,
            seed: g.seed,
            script: g.script.clone(),
        });
        write_atomic(&out.join(&demo_file), demo_text.as_bytes()).map_err(CliError::generation)?;
        write_atomic(&out.join(&truth_file), truth_text.as_bytes()).map_err(CliError::generation)?;
        entries.push(ManifestEntry {
            task_index: ti,
            task: g.spec,
            demo_index: di,
            seed: g.seed,
            demo_sha256: sha256_hex(demo_text.as_bytes()),
            truth_sha256: sha256_hex(truth_text.as_bytes()),
            demo_file,
            truth_file,
        });
    }
    let manifest = Manifest {
        schema_version: crate::SCHEMA_VERSION.to_string(),
        master_seed,
        entries,
    };
    write_atomic(&out.join(MANIFEST_FILE), to_pretty_json(&manifest).as_bytes()).map_err(CliError::generation)?;
    Ok(manifest)
}

/// Recognizes one demonstration; returns the goal lines and the trace.
pub fn cmd_recognize(cfg: &Config, demo: &Path, method: &str) -> Result<(Vec<String>, Trace), CliError> {
    let m = method_of(method, cfg)?;
    let demo = read_demo(demo).map_err(|e| match e {
        IoError::Demo {
            source: source @ SegmentationError::SimultaneousMotion { .. },
            ..
        } => CliError::from(RecognizeError::Segmentation(source)),
        other => CliError::input(other),
    })?;
    let p = &cfg.recognizer;
    let a = analyze(&demo, p, matches!(m, Method::NoMotion { .. }))?;
    let trace = a.trace(m, p.intent.prior_task, p.intent.delta_plan)?;
    let mut lines: Vec<String> = trace.goal.iter().map(|q| q.to_string()).collect();
    lines.sort();
    Ok((lines, trace))
}

/// Loads and checksums a dataset, then analyzes every demo with every
/// hypothesis scored.
pub fn load_eval_items(cfg: &Config, dir: &Path) -> Result<Vec<EvalItem>, CliError> {
    let manifest = read_manifest(dir).map_err(CliError::input)?;
    if manifest.schema_version != crate::SCHEMA_VERSION {
        return Err(CliError::input(format!(
            "{}: schema version {} is not {}",
            dir.join(MANIFEST_FILE).display(),
            manifest.schema_version,
            crate::SCHEMA_VERSION
        )));
    }
    let mut demos = Vec::with_capacity(manifest.entries.len());
    let mut truths = Vec::with_capacity(manifest.entries.len());
    for e in &manifest.entries {
        let text = read_verified(dir, &e.demo_file, &e.demo_sha256).map_err(CliError::input)?;
        demos.push(parse_demo(&text, &dir.join(&e.demo_file)).map_err(CliError::input)?);
        let text = read_verified(dir, &e.truth_file, &e.truth_sha256).map_err(CliError::input)?;
        let t: TruthFile = serde_json::from_str(&text)
            .map_err(|err| CliError::input(format!("{}: {err}", dir.join(&e.truth_file).display())))?;
        truths.push(t);
    }
    let analyses = analyze_batch(&demos, &cfg.recognizer, true);
    manifest
        .entries
        .iter()
        .zip(truths)
        .zip(analyses)
        .map(|((e, t), a)| {
            Ok(EvalItem {
                task_index: e.task_index,
                spec: e.task,
                truth: t.goal,
                analysis: a.map_err(|err| CliError::input(format!("{}: {err}", e.demo_file)))?,
            })
        })
        .collect()
}

pub fn default_hyper(cfg: &Config) -> Hyper {
    Hyper {
        tau: cfg.recognizer.tau,
        prior_task: cfg.recognizer.intent.prior_task,
        delta_plan: cfg.recognizer.intent.delta_plan,
    }
}

/// Returns the table text and the metrics JSON.
pub fn cmd_eval(cfg: &Config, dir: &Path, methods: Option<&[String]>) -> Result<(String, String), CliError> {
    let methods: Vec<MethodName> = match methods {
        Some(ms) => ms
            .iter()
            .map(|m| MethodName::parse(m.trim()))
            .collect::<Result<_, _>>()
            .map_err(CliError::input)?,
        None => MethodName::ALL.to_vec(),
    };
    let items = load_eval_items(cfg, dir)?;
    let report = run_experiment(&items, &methods, &cfg.eval, default_hyper(cfg)).map_err(CliError::input)?;
    Ok((report.table(), to_pretty_json(&report)))
}

pub fn cmd_render(cfg: &Config, demo: &Path, trace: &Path) -> Result<String, CliError> {
    let demo = read_demo(demo).map_err(CliError::input)?;
    let text = fs::read_to_string(trace).map_err(|e| CliError::input(format!("{}: {e}", trace.display())))?;
    let trace: Trace =
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", trace.display())))?;
    render_svg(&demo, &trace, &cfg.recognizer.intent.planner).map_err(CliError::input)
}

fn write_out(path: &Path, text: &str) -> Result<(), CliError> {
    write_atomic(path, text.as_bytes()).map_err(CliError::input)
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen {
            config,
            out,
            seed,
            demos_per_task,
        } => {
            let cfg = load_config(config.as_deref())?;
            let m = cmd_gen(&cfg, &out, seed, demos_per_task)?;
            eprintln!("wrote {} demonstrations to {}", m.entries.len(), out.display());
        }
        Command::Recognize {
            demo,
            config,
            method,
            trace,
        } => {
            let cfg = load_config(config.as_deref())?;
            let (lines, t) = cmd_recognize(&cfg, &demo, &method)?;
            if let Some(path) = trace {
                write_out(&path, &to_pretty_json(&t))?;
            }
            for l in lines {
                println!("{l}");
            }
        }
        Command::Eval {
            dataset,
            config,
            methods,
            out,
        } => {
            let cfg = load_config(config.as_deref())?;
            let (table, json) = cmd_eval(&cfg, &dataset, methods.as_deref())?;
            write_out(&out.unwrap_or_else(|| dataset.join("metrics.json")), &json)?;
            print!("{table}");
        }
        Command::Render {
            demo,
            trace,
            out,
            config,
        } => {
            let cfg = load_config(config.as_deref())?;
            let svg = cmd_render(&cfg, &demo, &trace)?;
            write_out(&out, &svg)?;
        }
    }
    Ok(())
}

/// Parses the arguments and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
