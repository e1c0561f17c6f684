//! `las`: run LLM-assisted algorithm search and analyze its fitness
//! landscape.
//!
//! Exit codes: 0 success, 1 I/O, 2 invalid flags or configuration,
//! 3 generator exhaustion, 4 schema error in an input file, 5 degenerate
//! statistics.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use las_core::landscape::LayoutOptions;
use las_core::tasks::TaskKind;

use crate::commands::GraphFormat;
use crate::config::{resolve, GeneratorKind, Overrides, RunConfigFile};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "las",
    version,
    about = "LLM-assisted algorithm search and fitness landscape analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a search and write its log.
    Run(RunArgs),
    /// Analyze a run log or a pair table.
    #[command(subcommand)]
    Analyze(Analyze),
    /// Write every analysis of a log into a directory.
    Report {
        log: PathBuf,
        out_dir: PathBuf,
        /// Read LOG as an external run (foreign code allowed).
        #[arg(long)]
        import: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TaskArg {
    Obp,
    Tsp,
    Symreg,
}

impl From<TaskArg> for TaskKind {
    fn from(t: TaskArg) -> TaskKind {
        match t {
            TaskArg::Obp => TaskKind::Obp,
            TaskArg::Tsp => TaskKind::Tsp,
            TaskArg::Symreg => TaskKind::Symreg,
        }
    }
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    task: Option<TaskArg>,
    #[arg(long, value_enum)]
    generator: Option<GeneratorKind>,
    #[arg(long)]
    pop_size: Option<usize>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Run log to write (newline-delimited JSON).
    #[arg(long)]
    out: PathBuf,
    /// TOML configuration; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    llm_base_url: Option<String>,
    #[arg(long)]
    llm_model: Option<String>,
}

#[derive(Debug, Args)]
struct LogInput {
    log: PathBuf,
    /// Read LOG as an external run (foreign code allowed).
    #[arg(long)]
    import: bool,
}

#[derive(Debug, Subcommand)]
enum Analyze {
    /// Export the landscape graph.
    Landscape {
        #[command(flatten)]
        input: LogInput,
        #[arg(long, value_enum, default_value = "graphml")]
        format: GraphFormat,
        /// Layout dimensions for JSON; 3 adds normalized fitness as z.
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
        dims: u8,
        #[arg(long, default_value_t = 0)]
        layout_seed: u64,
        /// Keep only edges whose weight is strictly greater.
        #[arg(long, default_value_t = 0)]
        min_edge_weight: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print density, average degree and clustering.
    Metrics {
        #[command(flatten)]
        input: LogInput,
        /// Also write the metrics as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Histogram (and KDE) of normalized fitness.
    Distribution {
        #[command(flatten)]
        input: LogInput,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        bins: u64,
        #[arg(long)]
        kde: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Directed trajectory into the best candidate, as DOT.
    Trajectory {
        #[command(flatten)]
        input: LogInput,
        #[arg(long)]
        out: PathBuf,
    },
    /// Parent/offspring similarity table.
    Similarity {
        #[command(flatten)]
        input: LogInput,
        #[arg(long)]
        out: PathBuf,
    },
    /// Correlation matrix of a pair table.
    Correlation {
        pairs: PathBuf,
        /// Use the signed performance delta instead of its magnitude.
        #[arg(long)]
        signed_delta: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-operator summaries of a pair table.
    Operators {
        pairs: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run(a) => {
            let file = match &a.config {
                Some(p) => RunConfigFile::load(p)?,
                None => RunConfigFile::default(),
            };
            let overrides = Overrides {
                task: a.task.map(TaskKind::from),
                generator: a.generator,
                pop_size: a.pop_size,
                budget: a.budget,
                seed: a.seed,
                llm_base_url: a.llm_base_url,
                llm_model: a.llm_model,
            };
            let cfg = resolve(file, &overrides)?;
            let log = commands::run(&cfg, &a.out)?;
            match log.best() {
                Some(best) => {
                    println!("best fitness {}", best.fitness.value);
                    println!("canonical id {}", best.candidate.id());
                }
                None => println!("no feasible candidate"),
            }
            println!("wrote {} events to {}", log.events.len(), a.out.display());
        }
        Command::Analyze(analysis) => analyze(analysis)?,
        Command::Report {
            log,
            out_dir,
            import,
        } => {
            let log = commands::load_log(&log, import)?;
            commands::report(&log, &out_dir)?;
            println!(
                "wrote {} files to {}",
                commands::REPORT_FILES.len(),
                out_dir.display()
            );
        }
    }
    Ok(())
}

fn analyze(analysis: Analyze) -> Result<(), CliError> {
    match analysis {
        Analyze::Landscape {
            input,
            format,
            dims,
            layout_seed,
            min_edge_weight,
            out,
        } => {
            let log = commands::load_log(&input.log, input.import)?;
            let opts = LayoutOptions {
                dims: dims as usize,
                seed: layout_seed,
                weight_threshold: min_edge_weight,
                ..LayoutOptions::default()
            };
            commands::write(&out, &commands::landscape(&log, format, &opts)?)?;
        }
        Analyze::Metrics { input, csv } => {
            let log = commands::load_log(&input.log, input.import)?;
            let g = las_core::landscape::build_graph(&log)?;
            print!("{}", commands::metrics_text(&g));
            if let Some(path) = csv {
                commands::write(&path, &commands::metrics_table(&g)?)?;
            }
        }
        Analyze::Distribution {
            input,
            bins,
            kde,
            out,
        } => {
            let log = commands::load_log(&input.log, input.import)?;
            commands::write(
                &out,
                &commands::distribution(&log, bins as usize, kde, true)?,
            )?;
        }
        Analyze::Trajectory { input, out } => {
            let log = commands::load_log(&input.log, input.import)?;
            commands::write(&out, &commands::trajectory_dot(&log)?)?;
        }
        Analyze::Similarity { input, out } => {
            let log = commands::load_log(&input.log, input.import)?;
            let (pairs, text) = commands::similarity(&log)?;
            commands::write(&out, &text)?;
            println!("{} pairs", pairs.len());
        }
        Analyze::Correlation {
            pairs,
            signed_delta,
            out,
        } => {
            let pairs = commands::read_pairs(&pairs)?;
            commands::write(&out, &commands::correlation(&pairs, signed_delta, true)?)?;
        }
        Analyze::Operators { pairs, out } => {
            let pairs = commands::read_pairs(&pairs)?;
            commands::write(&out, &commands::operators(&pairs)?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
