use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use setpool_cli::{
    compare, emit_plot, estimate_greedy_return, load_curve, run_experiment, state_space_sizes,
    ExperimentConfig, HarnessError, Result, TaskId,
};

#[derive(Parser)]
#[command(
    name = "setpool",
    about = "Train and compare set-encoded vs flat state representations on set-valued control tasks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum TaskArg {
    Scavenger1,
    Scavenger2,
    Convoy,
}

impl From<TaskArg> for TaskId {
    fn from(value: TaskArg) -> Self {
        match value {
            TaskArg::Scavenger1 => TaskId::Scavenger1,
            TaskArg::Scavenger2 => TaskId::Scavenger2,
            TaskArg::Convoy => TaskId::Convoy,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run every seed of one experiment config and write curves, plot, and report.
    Train {
        /// TOML experiment config.
        config: PathBuf,
    },
    /// Run two configs of the same task and merge their outcomes into one report.
    Compare {
        config_a: PathBuf,
        config_b: PathBuf,
    },
    /// Exact ordered/unordered state-space sizes for m of n object values.
    Combinatorics {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
    },
    /// Monte-Carlo estimate of the greedy reference policy's return.
    Greedy {
        #[arg(long, value_enum)]
        task: TaskArg,
        /// Objects per class.
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 1000)]
        episodes: usize,
        #[arg(long, default_value_t = 9001)]
        seed: u64,
    },
    /// Render one or more curve CSVs into a deterministic SVG.
    Plot {
        /// Curve CSV files, drawn in argument order.
        #[arg(required = true)]
        curves: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Greedy reference level to draw as a dashed line.
        #[arg(long)]
        greedy: Option<f64>,
        #[arg(long, default_value = "training curves")]
        title: String,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train { config } => {
            let config = ExperimentConfig::load(&config)?;
            let report = run_experiment(&config)?;
            print!("{}", report.to_summary());
        }
        Command::Compare { config_a, config_b } => {
            let a = ExperimentConfig::load(&config_a)?;
            let b = ExperimentConfig::load(&config_b)?;
            let report = compare(&a, &b)?;
            print!("{}", report.to_summary());
        }
        Command::Combinatorics { n, m } => {
            let sizes = state_space_sizes(n, m)?;
            println!("ordered (n!/(n-m)!):      {}", sizes.ordered);
            println!("unordered (n choose m):   {}", sizes.unordered);
            println!("ratio unordered/ordered:  {}", sizes.ratio);
        }
        Command::Greedy { task, m, episodes, seed } => {
            let estimate = estimate_greedy_return(task.into(), m, episodes, seed)?;
            println!(
                "greedy return over {} episodes: {:.6} ± {:.6}",
                estimate.episodes, estimate.mean, estimate.std
            );
        }
        Command::Plot { curves, out, greedy, title } => {
            let parsed: Vec<_> =
                curves.iter().map(|p| load_curve(p)).collect::<Result<_>>()?;
            let svg = emit_plot(&parsed, greedy, &title)?;
            std::fs::write(&out, svg).map_err(|e| HarnessError::io(&out, e))?;
            println!("wrote {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::json!({ "error": e.to_string(), "kind": e.kind() })
            );
            ExitCode::FAILURE
        }
    }
}
