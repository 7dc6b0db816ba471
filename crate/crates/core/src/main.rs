use std::collections::BTreeSet;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use tempora::builder::{analyze, Config, Mode};
use tempora::data::{self, DataPaths, DataSet};
use tempora::model::{validate_discourse, ClauseAnnotation};
use tempora::oracle::{self, OracleReading};
use tempora::render::{self, Format};
use tempora::{conformance, parse_discourse, Error, PreferenceWeights};

/// Temporal and rhetorical structure of annotated narrative discourse.
#[derive(Parser)]
#[command(name = "tempora", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a discourse file.
    Analyze {
        /// Discourse file, `-` for stdin.
        #[arg(short = 'i', long = "input")]
        input: PathBuf,
        #[arg(long, default_value = "best")]
        mode: Mode,
        #[arg(long, default_value = "text")]
        format: Format,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Reading counts from the brute-force reference.
    Oracle {
        #[arg(short = 'i', long = "input")]
        input: PathBuf,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Check the feasibility table and the example discourses.
    Conformance {
        /// Directory of `.disc` examples (default: the data directory's, or the shipped set).
        #[arg(long)]
        examples: Option<PathBuf>,
        #[command(flatten)]
        engine: EngineArgs,
    },
}

#[derive(Args)]
struct EngineArgs {
    /// Word-pair closeness lexicon.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Feasibility table.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Relation lattice edges.
    #[arg(long)]
    lattice: Option<PathBuf>,
    /// Cue word lexicon.
    #[arg(long)]
    cues: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    w_tense: f64,
    #[arg(long, default_value_t = 1.0)]
    w_sem: f64,
    #[arg(long, default_value_t = 0.5)]
    w_cur: f64,
    /// Bonus for opening a new thread.
    #[arg(long, default_value_t = 0.25)]
    w_new: f64,
    /// Admit table cells marked marginal.
    #[arg(long)]
    allow_marginal: bool,
    /// Keep lower relation tiers.
    #[arg(long)]
    no_tier_prune: bool,
}

impl EngineArgs {
    fn paths(&self) -> DataPaths {
        DataPaths {
            lexicon: self.lexicon.clone(),
            table: self.table.clone(),
            lattice: self.lattice.clone(),
            cues: self.cues.clone(),
            ..DataPaths::from_env()
        }
    }

    fn config(&self) -> anyhow::Result<Config> {
        let data = DataSet::load(&self.paths())?;
        let weights = PreferenceWeights {
            w_tense: self.w_tense,
            w_sem: self.w_sem,
            w_cur: self.w_cur,
            w_new: self.w_new,
            ..PreferenceWeights::default()
        };
        weights.validate()?;
        Ok(Config { data, weights, allow_marginal: self.allow_marginal, tier_prune: !self.no_tier_prune })
    }
}

/// Reads a discourse; a missing path that names a shipped example falls back to it.
fn read_discourse(path: &Path) -> anyhow::Result<Vec<ClauseAnnotation>> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
        s
    } else if !path.exists() {
        match path.file_name().and_then(|n| n.to_str()).and_then(data::example) {
            Some(text) => text.to_string(),
            None => bail!("{}: no such file", path.display()),
        }
    } else {
        data::read_file(path)?
    };
    let discourse = parse_discourse(&text).with_context(|| path.display().to_string())?;
    if discourse.is_empty() {
        bail!("{}: {}", path.display(), Error::EmptyDiscourse);
    }
    Ok(discourse)
}

fn warn(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn cmd_analyze(input: &Path, mode: Mode, format: Format, engine: &EngineArgs) -> anyhow::Result<()> {
    let cfg = engine.config()?;
    warn(&cfg.data.warnings);
    let discourse = read_discourse(input)?;
    let mut result = analyze(&discourse, &cfg, mode)?;
    print!("{}", render::render(&result, cfg.lattice(), format));
    result.warnings.drain(..cfg.data.warnings.len());
    warn(&result.warnings);
    Ok(())
}

fn cmd_oracle(input: &Path, json: bool, engine: &EngineArgs) -> anyhow::Result<()> {
    let cfg = engine.config()?;
    warn(&cfg.data.warnings);
    let discourse = read_discourse(input)?;
    validate_discourse(&discourse, &cfg.data.cues)?;
    let report = oracle::report(&discourse, &cfg);
    let builder: BTreeSet<OracleReading> = match analyze(&discourse, &cfg, Mode::Enumerate) {
        Ok(res) => res.readings.iter().map(|r| OracleReading::from_reading(r, cfg.lattice())).collect(),
        Err(Error::ParseFailure { .. }) => BTreeSet::new(),
        Err(e) => return Err(e.into()),
    };
    let agrees = builder == oracle::constrained_readings(&discourse, &cfg);
    if json {
        let mut value = serde_json::to_value(&report)?;
        value["builder_agrees"] = agrees.into();
        println!("{}", serde_json::to_string_pretty(&value)?);
        return Ok(());
    }
    println!("unconstrained: {}", report.unconstrained);
    if report.tier_prune {
        println!("constrained: {}", report.constrained);
    } else {
        println!("constrained: {} ({} tier-1, dropped by tier pruning)", report.constrained, report.tier1);
    }
    println!("preferred: {}", report.preferred);
    println!("builder agrees: {}", if agrees { "yes" } else { "no" });
    for line in &report.readings {
        let tag = if line.tier1 { "  [tier-1]" } else { "" };
        println!("  {}{tag}", line.reading);
    }
    Ok(())
}

fn cmd_conformance(examples: Option<&Path>, engine: &EngineArgs) -> anyhow::Result<bool> {
    let cfg = engine.config()?;
    warn(&cfg.data.warnings);
    let examples = match examples {
        Some(dir) => data::read_examples(dir)?,
        None => engine.paths().examples()?,
    };
    let report = conformance::run(&cfg, &examples);
    print!("{}", report.to_text());
    Ok(report.failures() == 0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are input errors; 2 is reserved for inconsistent discourses
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match &cli.command {
        Command::Analyze { input, mode, format, engine } => cmd_analyze(input, *mode, *format, engine).map(|()| true),
        Command::Oracle { input, json, engine } => cmd_oracle(input, *json, engine).map(|()| true),
        Command::Conformance { examples, engine } => cmd_conformance(examples.as_deref(), engine),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(Error::ParseFailure { .. }) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
