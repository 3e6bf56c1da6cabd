use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gklo_cli::report::{render_text, OptionsInfo, ReportDocument};
use gklo_cli::runner::{self, Exit, RunConfig, RunError};
use gklo_core::gklo::Perturbation;
use gklo_core::verify::{self, Suite, VerifyOptions};

#[derive(Parser)]
#[command(name = "gklo", version, about = "Exact verification of GKLO-type relations for quivers with involution")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a quiver file.
    Validate { file: String },
    /// Print y, B and H for every vertex.
    Build {
        file: String,
        /// Terms shown per operator (0 = all).
        #[arg(long, default_value_t = 0)]
        max_terms: usize,
    },
    /// Run checks and print a text summary (or a report with --format).
    Check(CheckArgs),
    /// Run checks and print the full report document.
    Report(CheckArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum PerturbArg {
    TauFixedShift,
    DropHPrefactor,
    FlipSignRule,
}

impl From<PerturbArg> for Perturbation {
    fn from(p: PerturbArg) -> Self {
        match p {
            PerturbArg::TauFixedShift => Perturbation::TauFixedShift,
            PerturbArg::DropHPrefactor => Perturbation::DropHPrefactor,
            PerturbArg::FlipSignRule => Perturbation::FlipSignRule,
        }
    }
}

#[derive(Args)]
struct CheckArgs {
    file: String,
    /// hh, hb, bb, serre0, serre1, iserre, lemmas, monopole or all; repeatable.
    #[arg(long, default_value = "all")]
    suite: Vec<String>,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    parallel: usize,
    /// Largest mode index in mode spot-checks.
    #[arg(long, default_value_t = 3)]
    max_mode: u32,
    /// Seed for the randomized sample reported next to failing residuals.
    #[arg(long)]
    seed: Option<u64>,
    /// Stop at the first failing check (in plan order).
    #[arg(long)]
    fail_fast: bool,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<String>,
    /// Include per-check timings (breaks byte-identical output).
    #[arg(long)]
    timings: bool,
    /// Residual terms shown in text output.
    #[arg(long, default_value_t = 4)]
    max_terms: usize,
    /// Negative control: mutate one constant of the construction.
    #[arg(long, value_enum)]
    perturb: Option<PerturbArg>,
}

fn emit(text: &str, output: Option<&str>) -> Result<(), RunError> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|source| RunError::Io { path: path.to_string(), source }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| RunError::Internal(e.to_string()))
        }
    }
}

fn check(args: &CheckArgs, default_format: Format) -> Result<Exit, RunError> {
    let mut suites = Vec::new();
    for s in &args.suite {
        suites.extend(Suite::parse_list(s).map_err(|e| RunError::Internal(e.to_string()))?);
    }
    suites.sort();
    suites.dedup();
    let cfg = RunConfig {
        suites: suites.clone(),
        parallel: args.parallel,
        options: VerifyOptions { max_mode: args.max_mode, seed: args.seed },
        fail_fast: args.fail_fast,
        perturbation: args.perturb.map(Into::into),
    };
    let (bytes, spec) = runner::load(&args.file)?;
    let fam = runner::family(&spec, &cfg)?;
    let kinds = verify::plan(&fam, &cfg.suites, &cfg.options);
    let checks = runner::run_checks(&fam, &kinds, &cfg)?;
    let text = match args.format.unwrap_or(default_format) {
        Format::Json => {
            let opts = OptionsInfo::new(&suites, args.max_mode, args.seed, args.fail_fast, cfg.perturbation);
            ReportDocument::new(&bytes, fam.quiver(), opts, &checks, args.timings).to_json()
        }
        Format::Text => render_text(fam.quiver(), &checks, args.max_terms, args.timings),
    };
    emit(&text, args.output.as_deref())?;
    Ok(runner::verdict(&checks))
}

fn build(file: &str, max_terms: usize) -> Result<Exit, RunError> {
    let (_, spec) = runner::load(file)?;
    let fam = runner::family(&spec, &RunConfig::default())?;
    let fq = fam.quiver();
    let show = |op: &gklo_core::diff::DiffOperator| {
        if max_terms == 0 {
            op.to_string()
        } else {
            op.to_string_truncated(max_terms)
        }
    };
    let mut out = String::new();
    for &i in fq.vertices() {
        for r in 1..=fq.v(i) {
            out.push_str(&format!("y[{i},{r}] = {}\n", show(fam.y(i, r)?)));
        }
        out.push_str(&format!("B[{i}](u) = {}\n", show(fam.b(i)?)));
        out.push_str(&format!("H[{i}](u) = {}\n", fam.h(i)?));
    }
    emit(&out, None)?;
    Ok(Exit::Ok)
}

fn validate(file: &str) -> Result<Exit, RunError> {
    let (_, spec) = runner::load(file)?;
    let n = spec.quiver.vertices.len();
    emit(&format!("ok: {n} vertices, {} edges\n", spec.quiver.edges.len()), None)?;
    Ok(Exit::Ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate { file } => validate(file),
        Command::Build { file, max_terms } => build(file, *max_terms),
        Command::Check(args) => check(args, Format::Text),
        Command::Report(args) => check(args, Format::Json),
    };
    let code = match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit()
        }
    };
    ExitCode::from(code as u8)
}
