use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

#[derive(Parser, Debug)]
#[command(
    name = "rggcc",
    version,
    about = "Clustering coefficient of random geometric graphs on the circle"
)]
struct Cli {
    /// Worker threads for replication runs (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Print progress details to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Density constants and the centering/scaling constants at radius r.
    Constants(DensityArgs),
    /// sigma_1^2 over the von Mises (kappa, mu) grid against the published table.
    Table1 {
        /// Relative tolerance per cell.
        #[arg(long, default_value_t = 0.005)]
        tolerance: f64,
        /// Directory for table1.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replicated experiment from a JSON config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Override the master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the number of replications.
        #[arg(long)]
        reps: Option<usize>,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a plotting script next to the records.
        #[arg(long)]
        plot: bool,
        /// Exit 1 when the KS distance exceeds this.
        #[arg(long)]
        max_ks: Option<f64>,
    },
    /// Observed convergence orders of the small-r expansions.
    PropCheck {
        #[command(flatten)]
        density: DensityArgs,
        /// Decreasing radius grid.
        #[arg(long, value_delimiter = ',', default_values_t = [0.02, 0.01, 0.005, 0.0025])]
        grid: Vec<f64>,
    },
    /// Fast counters against the brute-force oracle on random instances.
    OracleTest {
        #[arg(long, default_value_t = 1000)]
        instances: usize,
        #[arg(long, default_value_t = 60)]
        max_n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo estimate of sigma_2n^2.
    Sigma2n {
        #[command(flatten)]
        density: DensityArgs,
        /// Monte Carlo sample count.
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Exit 1 when stderr exceeds this fraction of the estimate.
        #[arg(long, default_value_t = 0.02)]
        tolerance: f64,
    },
}

/// Density and radius, inline or from a JSON file `{"density": ..., "r": ...}`.
#[derive(Args, Debug, Clone)]
struct DensityArgs {
    /// JSON file with `density` and optional `r`.
    #[arg(long, conflicts_with = "density")]
    config: Option<PathBuf>,
    /// Inline density JSON, e.g. '{"kind":"von_mises","kappa":1,"mu":0.1}'.
    #[arg(long)]
    density: Option<String>,
    /// Radius; overrides `r` from the config file.
    #[arg(long)]
    r: Option<f64>,
    /// Directory for the JSON result.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Constants(args) => commands::constants(&args),
        Command::Table1 { tolerance, out } => commands::table1(tolerance, out.as_deref()),
        Command::Simulate {
            config,
            seed,
            reps,
            out,
            plot,
            max_ks,
        } => commands::simulate(commands::SimulateArgs {
            config,
            seed,
            reps,
            out,
            plot,
            max_ks,
            threads: cli.threads,
            verbose: cli.verbose,
        }),
        Command::PropCheck { density, grid } => commands::prop_check(&density, &grid),
        Command::OracleTest {
            instances,
            max_n,
            seed,
            out,
        } => commands::oracle_test(instances, max_n, seed, out.as_deref()),
        Command::Sigma2n {
            density,
            samples,
            seed,
            tolerance,
        } => commands::sigma2n(&density, samples, seed, tolerance),
    };
    match result {
        Ok(outcome) => outcome.into(),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
