//! `overgroup`: command-line driver. Every command writes one JSON report.
//!
//! Exit codes: 0 pass, 1 check failure, 2 usage error, 3 budget exhausted.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use overgroup_core::exec::Exec;

use commands::Context;
use config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Run(overgroup_core::Error),
}

#[derive(Parser)]
#[command(name = "overgroup", version, about = "Overgroups of subsystem subgroups in Chevalley groups")]
struct Cli {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Run samples one at a time. Reports are identical either way.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct CaseArgs {
    /// a (D_l), b (E6) or c (E7).
    #[arg(long)]
    case: Option<String>,
    /// Rank for case a, 5 to 10.
    #[arg(long)]
    l: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Roots, orbits and weights of a case.
    Info {
        #[command(flatten)]
        case: CaseArgs,
        /// Also list the weights with their components.
        #[arg(long)]
        weights: bool,
    },
    /// Combinatorial lemma checks plus the Steinberg relation suite.
    Lemmas {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long)]
        quick: bool,
    },
    /// Steinberg relations on all ordered root pairs.
    Relcheck {
        #[command(flatten)]
        case: CaseArgs,
    },
    /// Invariant bilinear and quadratic forms (second type only).
    Forms {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long)]
        quick: bool,
    },
    /// Lower-Levi-upper decomposition of a matrix with unit corner entry.
    Decompose {
        #[arg(long = "in")]
        input: Option<String>,
    },
    /// Normalizer conditions for a pair of ideals, on samples or on one matrix.
    Normcheck {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long)]
        ring: Option<String>,
        #[arg(long)]
        sigma: Option<String>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long = "in")]
        input: Option<String>,
    },
    /// Certify a target level for H generated by the subsystem subgroup and extra words.
    Level {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long)]
        ring: Option<String>,
        /// JSON array of words.
        #[arg(long)]
        extra: Option<String>,
        #[arg(long)]
        target: Option<String>,
        #[arg(long)]
        budget: Option<usize>,
        /// Sampled H-words for the normalizer check.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Find the level of H, then check sampled H-words against it.
    Experiment {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long)]
        ring: Option<String>,
        #[arg(long)]
        extra: Option<String>,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Every acceptance suite at reduced sample counts.
    Selftest,
}

fn flag(b: bool) -> Option<bool> {
    b.then_some(true)
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Info { .. } => "info",
            Command::Lemmas { .. } => "lemmas",
            Command::Relcheck { .. } => "relcheck",
            Command::Forms { .. } => "forms",
            Command::Decompose { .. } => "decompose",
            Command::Normcheck { .. } => "normcheck",
            Command::Level { .. } => "level",
            Command::Experiment { .. } => "experiment",
            Command::Selftest => "selftest",
        }
    }

    /// The fields this command sets from its flags.
    fn flags(&self) -> RunConfig {
        let with_case = |c: &CaseArgs| RunConfig { case: c.case.clone(), l: c.l, ..Default::default() };
        match self {
            Command::Info { case, weights } => RunConfig { weights: flag(*weights), ..with_case(case) },
            Command::Lemmas { case, quick } | Command::Forms { case, quick } => RunConfig { quick: flag(*quick), ..with_case(case) },
            Command::Relcheck { case } => with_case(case),
            Command::Decompose { input } => RunConfig { input: input.clone(), ..Default::default() },
            Command::Normcheck { case, ring, sigma, samples, input } => RunConfig {
                ring: ring.clone(),
                sigma: sigma.clone(),
                samples: *samples,
                input: input.clone(),
                ..with_case(case)
            },
            Command::Level { case, ring, extra, target, budget, samples } => RunConfig {
                ring: ring.clone(),
                extra: extra.clone(),
                target: target.clone(),
                budget: *budget,
                samples: *samples,
                ..with_case(case)
            },
            Command::Experiment { case, ring, extra, budget, samples } => RunConfig {
                ring: ring.clone(),
                extra: extra.clone(),
                budget: *budget,
                samples: *samples,
                ..with_case(case)
            },
            Command::Selftest => RunConfig::default(),
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let file = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let top = RunConfig { seed: cli.seed, out: cli.out.clone(), ..cli.command.flags() };
    let cfg = file.overlay(top);
    let out = cfg.out.clone();
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    let ctx = Context::new(cfg, exec);
    let report = match cli.command {
        Command::Info { .. } => commands::info(ctx),
        Command::Lemmas { .. } => commands::lemmas(ctx),
        Command::Relcheck { .. } => commands::relcheck(ctx),
        Command::Forms { .. } => commands::forms(ctx),
        Command::Decompose { .. } => commands::decompose(ctx),
        Command::Normcheck { .. } => commands::normcheck(ctx),
        Command::Level { .. } => commands::level(ctx),
        Command::Experiment { .. } => commands::experiment(ctx),
        Command::Selftest => commands::selftest(ctx),
    }?;
    let mut text = serde_json::to_string_pretty(&report.to_json()).expect("reports serialize");
    text.push('\n');
    match out {
        Some(path) => std::fs::write(&path, text).map_err(|e| CliError::Usage(format!("cannot write {path}: {e}")))?,
        None => print!("{text}"),
    }
    let failed: Vec<&str> = report.suites.iter().filter(|s| !s.pass).map(|s| s.name.as_str()).collect();
    if let Some(msg) = report.result.get("message").and_then(|m| m.as_str()) {
        eprintln!("{msg}");
    }
    eprintln!("{}: {:?} ({} suites, {} failed{})", report.command, report.outcome, report.suites.len(), failed.len(), if failed.is_empty() { String::new() } else { format!(": {}", failed.join(", ")) });
    Ok(report.outcome.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    let code = match run(cli) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("{name}: usage error: {msg}");
            2
        }
        Err(CliError::Run(e)) => {
            eprintln!("{name}: {e}");
            1
        }
    };
    ExitCode::from(code as u8)
}
