use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pforms::extensions::{Budget, DEFAULT_SEED};
use pforms_cli::commands::{self, Outcome};
use pforms_cli::parse::parse_field;
use pforms_cli::{CliError, Session};

/// Exact computations with quasilinear p-forms over F_p(t1,...,tm).
///
/// Exit codes: 0 success, 1 a failed `verify` trial, 2 any error (reported
/// as JSON on stderr).
#[derive(Parser, Debug)]
#[command(name = "pforms", version)]
struct Cli {
    /// Ground field, e.g. "p=2;vars=a,b,c".
    #[arg(long, global = true)]
    field: Option<String>,
    /// Print the JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized searches.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Random samples per degree level in splitting and witness searches.
    #[arg(long, global = true, default_value_t = 64)]
    budget_samples: usize,
    /// Largest degree level for sampled elements.
    #[arg(long, global = true, default_value_t = 2)]
    budget_degree: u32,
    /// Largest subset of a norm-field p-basis to adjoin.
    #[arg(long, global = true)]
    max_subset: Option<usize>,
    /// Session file with `name = form` lines; may repeat.
    #[arg(long, global = true)]
    load: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dimension, defect, norm field, similarity factors and related data.
    Invariants { form: String },
    /// Isometry, subforms, similarity and weak Vishik equivalence. Exits 0 either way.
    Compare { phi: String, psi: String },
    /// Shape of an anisotropic form for p = 2, dim <= 6.
    Classify { form: String },
    /// Splitting pattern over exponent-one extensions.
    Fsp { form: String },
    /// Defect over F(a^(1/p), ...).
    Defect {
        form: String,
        /// Comma-separated elements to adjoin p-th roots of.
        #[arg(long, allow_hyphen_values = true)]
        ext: String,
    },
    /// Run a randomized identity check; exits 1 iff a trial failed.
    Verify {
        lemma: String,
        #[arg(long, default_value_t = 500)]
        trials: usize,
    },
    /// List the names accepted by `verify`.
    Lemmas,
}

fn session(cli: &Cli) -> Result<Session, CliError> {
    let desc = cli.field.as_deref().ok_or_else(|| CliError::Usage("--field is required".into()))?;
    let mut s = Session::new(parse_field(desc)?);
    for path in &cli.load {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
        s.load(&text)?;
    }
    Ok(s)
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let budget = Budget {
        max_subset: cli.max_subset,
        samples: cli.budget_samples,
        degree: cli.budget_degree,
        seed: cli.seed,
    };
    match &cli.command {
        Command::Invariants { form } => commands::invariants(&session(cli)?, form),
        Command::Compare { phi, psi } => commands::compare(&session(cli)?, phi, psi, &budget),
        Command::Classify { form } => commands::classify(&session(cli)?, form),
        Command::Fsp { form } => commands::fsp(&session(cli)?, form, &budget),
        Command::Defect { form, ext } => commands::defect(&session(cli)?, form, ext),
        Command::Verify { lemma, trials } => commands::verify(lemma, *trials, cli.seed),
        Command::Lemmas => Ok(commands::lemmas()),
    }
}

fn fail(err: &CliError) -> ExitCode {
    let body = serde_json::to_string(&err.report()).expect("error report serializes");
    let _ = writeln!(std::io::stderr(), "{body}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::Usage(e.render().to_string().trim().to_string())),
    };
    std::panic::set_hook(Box::new(|_| {}));
    let result = std::panic::catch_unwind(|| run(&cli)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| p.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "panic".into());
        Err(CliError::Math(pforms::Error::Internal(msg)))
    });
    match result {
        Ok(out) => {
            let text = if cli.json {
                let mut s = serde_json::to_string(&out.report).expect("report serializes");
                s.push('\n');
                s
            } else {
                commands::to_text(&out.report)
            };
            let _ = std::io::stdout().write_all(text.as_bytes());
            ExitCode::from(out.exit as u8)
        }
        Err(e) => fail(&e),
    }
}
