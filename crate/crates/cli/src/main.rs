use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use varconv::catalog::{builtin, catalog_anchors, catalog_entries};
use varconv::graph::{sample_graph, Mode};
use varconv_cli::{emit_report, parse_config_file, run_analysis, CliError, Command, Format, Overrides};

#[derive(Parser)]
#[command(
    name = "varconv",
    version,
    about = "Attentive second-order analysis of prox-regular functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Criteria, oracles and cross-checks.
    Analyze(RunArgs),
    /// Point-based and neighborhood criteria and exact bounds only.
    Bounds(RunArgs),
    /// Brute-force oracles only.
    Oracle(RunArgs),
    /// Attentive and plain graphs side by side.
    Compare(RunArgs),
    /// List builtin functions and documented anchors.
    Catalog,
}

#[derive(Args)]
struct RunArgs {
    /// Analysis config (TOML).
    #[arg(value_name = "CONFIG", required_unless_present = "config_flag")]
    config: Option<PathBuf>,
    /// Analysis config, as a flag.
    #[arg(long = "config", value_name = "CONFIG", conflicts_with = "config")]
    config_flag: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Grid points per axis (odd).
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    /// Comma-separated s values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    s: Option<Vec<f64>>,
    /// Assert that the pipeline uses no randomness (it never does).
    #[arg(long)]
    seedless: bool,
    /// Write the attentive graph sample as a tab-separated table.
    #[arg(long, value_name = "PATH")]
    dump_graph: Option<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

fn run(command: Command, args: RunArgs) -> Result<bool, CliError> {
    let overrides = Overrides {
        eps: args.eps,
        resolution: args.resolution,
        s: args.s,
        out: args.out,
        format: args.format.map(|f| match f {
            FormatArg::Json => Format::Json,
            FormatArg::Text => Format::Text,
        }),
    };
    let path = args.config.or(args.config_flag).expect("clap requires a config");
    let cfg = parse_config_file(&path, &overrides)?;
    if let Some(dump) = &args.dump_graph {
        let g = sample_graph(&cfg.function, &cfg.window, &cfg.resolution, Mode::Attentive).map_err(|e| {
            CliError::Analysis {
                context: "sample_graph".into(),
                source: e,
            }
        })?;
        write(dump, &g.to_table())?;
    }
    let report = run_analysis(&cfg, command, args.seedless)?;
    let text = emit_report(&report, cfg.format);
    match &cfg.output_path {
        Some(p) => write(p, &text)?,
        None => print!("{text}"),
    }
    Ok(report.summary.pass)
}

fn write(path: &PathBuf, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io {
        path: path.clone(),
        source: e,
    })
}

fn catalog() {
    println!("builtin functions");
    for e in catalog_entries() {
        println!("  {:<20} {}", e.name, e.description);
    }
    println!("\ndocumented anchors");
    for a in catalog_anchors() {
        let dim = builtin(a.function).map_or(0, |f| f.dim());
        println!("  {:<26} R^{dim}  x = {:?}  x* = {:?}", a.label, a.x, a.xstar);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Catalog => {
            catalog();
            return ExitCode::SUCCESS;
        }
        Cmd::Analyze(a) => (Command::Analyze, a),
        Cmd::Bounds(a) => (Command::Bounds, a),
        Cmd::Oracle(a) => (Command::Oracle, a),
        Cmd::Compare(a) => (Command::Compare, a),
    };
    match run(command, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
