use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use regret_planner::config::{default_jobs, jobs_from_env};
use regret_planner::{Pipeline, PipelineConfig, Stage};

#[derive(Parser)]
#[command(name = "regret-planner", version, about = "Minimax-regret planning over an energy-system LP")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Subcommand)]
enum Command {
    /// Draw the Latin-hypercube scenarios.
    Sample,
    /// Solve the unconstrained problem in every scenario.
    Explore,
    /// Cluster the optimal outputs and derive strategies.
    Identify,
    /// Solve each strategy in each scenario and compute regrets.
    Evaluate,
    /// Summary statistics, correlations, decision maps and profiles.
    Analyze,
    /// Render the SVG figures.
    Report,
    /// All stages, reusing up-to-date results.
    Run,
}

#[derive(Args)]
struct Options {
    /// Model definition (JSON).
    #[arg(long, global = true)]
    model: Option<PathBuf>,
    /// Number of scenarios.
    #[arg(short = 'N', long = "scenarios", global = true, default_value_t = 1000)]
    n: usize,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Number of clusters.
    #[arg(long, global = true, default_value_t = 5)]
    k: usize,
    #[arg(long, global = true, default_value_t = 5)]
    max_leaves: usize,
    /// Bins per axis of decision maps and profiles.
    #[arg(long, global = true, default_value_t = 7)]
    bins: usize,
    /// Worker threads; REGRET_PLANNER_JOBS takes precedence.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, default_value = "results")]
    out: PathBuf,
    /// Strategy file to replay instead of identifying strategies.
    #[arg(long, global = true)]
    strategies: Option<PathBuf>,
    /// Also write the midpoint scenario LP in MPS format.
    #[arg(long, global = true)]
    dump_lp: bool,
    /// Value-at-risk levels in percent.
    #[arg(long = "var", global = true, value_delimiter = ',', default_values_t = [50.0, 90.0])]
    var_levels: Vec<f64>,
    /// Parameters kept for decision maps and profiles.
    #[arg(long, global = true, default_value_t = 5)]
    top_params: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let o = cli.opts;
    let outcome = jobs_from_env(o.jobs.unwrap_or_else(default_jobs)).and_then(|jobs| {
        let cfg = PipelineConfig {
            model: o.model,
            n: o.n,
            seed: o.seed,
            k: o.k,
            max_leaves: o.max_leaves,
            bins: o.bins,
            var_levels: o.var_levels,
            strategies: o.strategies,
            top_params: o.top_params,
            jobs,
            out: o.out,
            dump_lp: o.dump_lp,
        };
        let pipeline = Pipeline::new(cfg)?;
        match cli.command {
            Command::Run => pipeline.run(),
            Command::Sample => pipeline.run_stage(Stage::Sample),
            Command::Explore => pipeline.run_stage(Stage::Explore),
            Command::Identify => pipeline.run_stage(Stage::Identify),
            Command::Evaluate => pipeline.run_stage(Stage::Evaluate),
            Command::Analyze => pipeline.run_stage(Stage::Analyze),
            Command::Report => pipeline.run_stage(Stage::Report),
        }
    });
    match outcome {
        Ok(manifest) => {
            eprintln!("{} files listed in manifest.json", manifest.files.len());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
