use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use dmod_deform::report::{
    corpus_report, error_value, run_corpus, run_pipeline, Command, Format, RunConfig,
};
use dmod_deform::scalar::parse_rational;
use dmod_deform::DeformError;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CommandArg {
    Ext,
    Cohomology,
    Cup,
    Hull,
    VerifyFamily,
    CheckDeformation,
    Run,
}

impl From<CommandArg> for Command {
    fn from(c: CommandArg) -> Self {
        match c {
            CommandArg::Ext => Command::Ext,
            CommandArg::Cohomology => Command::Cohomology,
            CommandArg::Cup => Command::Cup,
            CommandArg::Hull => Command::Hull,
            CommandArg::VerifyFamily => Command::VerifyFamily,
            CommandArg::CheckDeformation => Command::CheckDeformation,
            CommandArg::Run => Command::Run,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

/// Deformations of the structure sheaf of y^2 z = x^3 + a x z^2 + b z^3 as a D-module.
#[derive(Debug, Parser)]
#[command(name = "dmod-deform", version)]
struct Cli {
    /// Stage to run.
    command: CommandArg,
    /// Coefficient a (integer or p/q).
    #[arg(long, allow_hyphen_values = true, required_unless_present = "corpus")]
    a: Option<String>,
    /// Coefficient b (integer or p/q).
    #[arg(long, allow_hyphen_values = true, required_unless_present = "corpus")]
    b: Option<String>,
    /// Hull order N: the presentation is computed modulo (t1, t2)^N.
    #[arg(long, default_value_t = 6)]
    order: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Hard cap on the truncation degree of the Ext computation.
    #[arg(long, default_value_t = 40)]
    degree_cap: usize,
    /// Number of consecutive increments over which the Ext basis must be unchanged.
    #[arg(long, default_value_t = 2)]
    stab_window: usize,
    /// Degree bound of the monomial boxes used by the deformation checker.
    #[arg(long, default_value_t = 10)]
    check_bound: usize,
    /// File with one `a b N` triple per line.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Include wall-clock timings (reports are then no longer reproducible byte for byte).
    #[arg(long)]
    timings: bool,
}

fn build_config(cli: &Cli) -> Result<RunConfig, DeformError> {
    let parse = |s: &Option<String>| s.as_deref().map(parse_rational).transpose();
    let a = parse(&cli.a)?.unwrap_or_default();
    let b = parse(&cli.b)?.unwrap_or_default();
    let mut config = RunConfig::new(a, b);
    config.order = cli.order;
    config.policy.cap = cli.degree_cap;
    config.policy.window = cli.stab_window;
    config.check_bound = cli.check_bound;
    config.command = cli.command.into();
    config.timings = cli.timings;
    config.format = match cli.format {
        FormatArg::Json => Format::Json,
        FormatArg::Text => Format::Text,
    };
    Ok(config)
}

fn fail(e: &DeformError) -> ExitCode {
    eprintln!(
        "error: {}",
        serde_json::to_string(&error_value(e)).expect("errors serialize")
    );
    ExitCode::from(e.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let config = match build_config(&cli).and_then(|c| c.validate().map(|_| c)) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    let report = match &cli.corpus {
        Some(path) => run_corpus(path, &config).map(|entries| corpus_report(&entries)),
        None => run_pipeline(&config),
    };
    match report {
        Ok(r) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(r.render(config.format).as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}
