use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use smoothbench::workbench::{run, ExperimentConfig, Format, Operation, Report};

/// Bounded experiments on smooth classes of finite relational structures.
#[derive(Parser)]
#[command(name = "workbench", version, arg_required_else_help = true)]
struct Cli {
    /// Class-definition file.
    #[arg(long, global = true)]
    classes: Option<PathBuf>,
    /// Directory for reports.jsonl, timing.jsonl and emitted structures.
    /// Without it, reports go to stdout and the summary to stderr.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    #[command(flatten)]
    Op(Operation),
    /// Runs a JSON experiment config; command-line flags override its
    /// classes, out and format.
    Run { config: PathBuf },
}

fn threads() -> Result<(), String> {
    let Ok(v) = std::env::var("WORKBENCH_THREADS") else { return Ok(()) };
    let n: usize = v.parse().ok().filter(|&n| n > 0).ok_or(format!("WORKBENCH_THREADS must be a positive integer, got {v}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn summary_line(r: &Report) -> String {
    match r.operation.strip_prefix("demo:") {
        Some(name) => format!(
            "[{}] {:>2} {:<26} {}",
            r.verdict,
            r.payload["id"].as_u64().unwrap_or_default(),
            name,
            r.payload["summary"].as_str().unwrap_or_default()
        ),
        None => r.summary(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let config = match cli.command {
        Command::Op(operation) => ExperimentConfig { classes: cli.classes, out: cli.out, format: cli.format, operation },
        Command::Run { config } => match ExperimentConfig::load(&config) {
            Ok(mut c) => {
                c.classes = cli.classes.or(c.classes);
                c.out = cli.out.or(c.out);
                if cli.format != Format::Json {
                    c.format = cli.format;
                }
                c
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
    };
    match run(&config) {
        Ok(reports) => {
            for r in &reports {
                if config.out.is_some() {
                    println!("{}", summary_line(r));
                } else {
                    eprintln!("{}", summary_line(r));
                    println!("{}", serde_json::to_string(r).expect("reports serialize"));
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
