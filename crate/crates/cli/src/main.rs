use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use dynacon_core::harness::{
    ablation_fixtures, find_entry, render_report, run_suite, run_trial, write_ablation, Rendered, ReportFormat,
    SuiteName, TrialResult,
};
use dynacon_core::prompting::{format_goal_command, format_list_update};
use dynacon_core::reasoning::{parse_verdict, query_llm, BackendConfig, BackendKind};
use dynacon_core::world::load_scenario;
use dynacon_core::ScenarioSpec;

#[derive(Parser)]
#[command(name = "dynacon", version, about = "Context-aware navigation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Backend {
    Oracle,
    Llm,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Pattern,
    Category,
}

#[derive(Clone, Copy, ValueEnum)]
enum Report {
    Table,
    Jsonl,
    SvgTraj,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file (or bundled scenario id) to termination.
    Run {
        #[arg(long)]
        scenario: String,
        #[arg(long, value_enum, default_value = "oracle")]
        backend: Backend,
        /// Write the per-tick JSONL trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Ticks between a reasoning request and its verdict.
        #[arg(long, default_value_t = 0)]
        latency_ticks: u64,
        /// JSON object mapping scenario ids to "success" or "failure".
        #[arg(long)]
        expect: Option<PathBuf>,
    },
    /// Run the pattern (corridor) or category (house) suite.
    Suite {
        #[arg(long = "set", value_enum)]
        set: Suite,
        #[arg(long, value_enum, default_value = "oracle")]
        backend: Backend,
        #[arg(long, value_enum, default_value = "table")]
        report: Report,
        /// Directory for svg-traj output.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        expect: Option<PathBuf>,
    },
    /// Write the prompt ablation fixtures and the oracle's verdicts.
    Ablation {
        #[arg(long)]
        out: PathBuf,
        /// Also send both prompt variants to the live endpoint.
        #[arg(long)]
        live: bool,
    },
}

fn backend_config(backend: Backend, latency_ticks: u64) -> Result<BackendConfig> {
    let mut config = match backend {
        Backend::Oracle => BackendConfig::oracle(),
        Backend::Llm => BackendConfig::llm_from_env()?,
    };
    config.latency_ticks = latency_ticks;
    Ok(config)
}

fn load(scenario: &str) -> Result<ScenarioSpec> {
    let path = Path::new(scenario);
    if path.exists() {
        return load_scenario(path).with_context(|| format!("loading {scenario}"));
    }
    match find_entry(scenario) {
        Some(entry) => Ok(entry.load()?),
        None => bail!("{scenario} is neither a file nor a bundled scenario id"),
    }
}

fn read_manifest(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let manifest: BTreeMap<String, String> =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    for (id, status) in &manifest {
        if status != "success" && status != "failure" {
            bail!(
                "{}: `{id}` expects `{status}`; use \"success\" or \"failure\"",
                path.display()
            );
        }
    }
    Ok(manifest)
}

/// True when every trial named in the manifest has the expected outcome.
fn check_expectations(manifest: &BTreeMap<String, String>, trials: &[TrialResult]) -> bool {
    let mut ok = true;
    for (id, want) in manifest {
        match trials.iter().find(|t| &t.scenario_id == id) {
            Some(t) => {
                let got = if t.status.is_success() { "success" } else { "failure" };
                if got != want {
                    eprintln!("expectation mismatch: {id} expected {want}, got {}", t.status);
                    ok = false;
                }
            }
            None => {
                eprintln!("expectation for {id}, which was not run");
                ok = false;
            }
        }
    }
    ok
}

fn cmd_run(
    scenario: &str,
    backend: Backend,
    trace: Option<&Path>,
    seed: u64,
    latency_ticks: u64,
    expect: Option<&Path>,
) -> Result<bool> {
    let spec = load(scenario)?;
    let result = run_trial(&spec, &backend_config(backend, latency_ticks)?, seed)?;
    if let Some(path) = trace {
        result.write_trace(path)?;
    }
    let verdicts: Vec<&str> = result.verdict_history.iter().map(|v| v.label()).collect();
    println!(
        "{}: {} after {} ticks, {} queries, verdicts [{}]",
        result.scenario_id,
        result.status,
        result.ticks,
        result.queries,
        verdicts.join(", ")
    );
    if let Some(err) = &result.backend_error {
        eprintln!("backend error: {err}");
    }
    match expect {
        Some(path) => Ok(check_expectations(&read_manifest(path)?, std::slice::from_ref(&result))),
        None => Ok(true),
    }
}

fn cmd_suite(set: Suite, backend: Backend, report: Report, out: &Path, expect: Option<&Path>) -> Result<bool> {
    let suite = match set {
        Suite::Pattern => SuiteName::Pattern,
        Suite::Category => SuiteName::Category,
    };
    let format = match report {
        Report::Table => ReportFormat::Table,
        Report::Jsonl => ReportFormat::Jsonl,
        Report::SvgTraj => ReportFormat::SvgTraj,
    };
    let result = run_suite(suite, &backend_config(backend, 0)?)?;
    match render_report(&result, format)? {
        Rendered::Text(text) => print!("{text}"),
        Rendered::Files(files) => {
            fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
            for (name, body) in files {
                let path = out.join(name);
                fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
                println!("{}", path.display());
            }
        }
    }
    match expect {
        Some(path) => Ok(check_expectations(&read_manifest(path)?, &result.trials)),
        None => Ok(true),
    }
}

fn cmd_ablation(out: &Path, live: bool) -> Result<bool> {
    let scenarios = ablation_fixtures()?;
    for name in write_ablation(out, &scenarios)? {
        println!("{}", out.join(name).display());
    }
    for s in &scenarios {
        println!("{} oracle: [{}]", s.name, s.expected.join(", "));
    }
    if !live {
        return Ok(true);
    }
    let config = BackendConfig::llm_from_env()?;
    for s in &scenarios {
        for (variant, system) in [
            ("structured", s.structured.clone()),
            ("unstructured", {
                let mut b = s.structured.clone();
                b.rendered = s.unstructured.clone();
                b
            }),
        ] {
            let mut history = vec![format_goal_command(&s.goal, 0)];
            let mut answers = Vec::new();
            for list in &s.lists {
                history.push(format_list_update(list));
                let raw = query_llm(&system, &history, &config)?;
                let label = match parse_verdict(&raw, list, BackendKind::Llm, list.tick) {
                    Ok(v) => v.label().to_owned(),
                    Err(e) => format!("<{e}>"),
                };
                answers.push(label);
            }
            println!("{} {variant} live: [{}]", s.name, answers.join(", "));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run {
            scenario,
            backend,
            trace,
            seed,
            latency_ticks,
            expect,
        } => cmd_run(
            scenario,
            *backend,
            trace.as_deref(),
            *seed,
            *latency_ticks,
            expect.as_deref(),
        ),
        Command::Suite {
            set,
            backend,
            report,
            out,
            expect,
        } => cmd_suite(*set, *backend, *report, out, expect.as_deref()),
        Command::Ablation { out, live } => cmd_ablation(out, *live),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
