use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use hohl_cli::config::Config;
use hohl_cli::{active, benchmark, configure_threads, consistency, inspect, rates};

/// Higher-order hypergraph learning experiments.
///
/// Settings come from defaults, then the optional TOML config file, then flags.
/// Set HOHL_THREADS to bound the worker threads.
#[derive(Parser)]
#[command(name = "hohl", version)]
struct Cli {
    /// TOML config file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Directory holding the datasets
    #[arg(long, global = true)]
    data_dir: Option<PathBuf>,
    /// Write NA instead of wall-clock seconds
    #[arg(long, global = true)]
    no_timing: bool,
    #[arg(long, global = true)]
    cg_tol: Option<f64>,
    #[arg(long, global = true)]
    eig_tol: Option<f64>,
    /// Print the resolved config and exit
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Accuracy tables over repeated random label sets
    Benchmark(BenchmarkArgs),
    /// Active-learning curves for the Laplace and HOHL priors
    Active(ActiveArgs),
    /// Eigenvalue convergence on the torus and the truncation sweep
    Consistency(ConsistencyArgs),
    /// Supervised error against sample size
    Rates(RatesArgs),
    /// Hyperedge-size histogram of a dataset or hyperedge file
    Inspect(InspectArgs),
}

#[derive(Args)]
struct BenchmarkArgs {
    /// zoo, mushroom, cora, citeseer, mnist5k or moons:<n>:<noise>
    #[arg(long)]
    dataset: Option<String>,
    /// hohl:<q>:<rc|qc>, clique, laplace-knn:<k>, hohl-knn:<ks>:<lambdas>:<powers> (repeatable)
    #[arg(long = "method")]
    methods: Vec<String>,
    /// Comma-separated label rates
    #[arg(long, value_delimiter = ',')]
    rates: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<usize>,
    /// stratified or uniform
    #[arg(long)]
    sampling: Option<String>,
    #[arg(long)]
    repetitions: Option<usize>,
}

#[derive(Args)]
struct ActiveArgs {
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    laplace_k: Option<usize>,
    /// Neighbour counts of the HOHL arm, e.g. 50,30
    #[arg(long, value_delimiter = ',')]
    ks: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    lambdas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    powers: Option<Vec<u32>>,
}

#[derive(Args)]
struct ConsistencyArgs {
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long)]
    eigenvalues: Option<usize>,
    #[arg(long)]
    trunc_n: Option<usize>,
    #[arg(long)]
    trunc_tau: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    trunc_levels: Option<Vec<usize>>,
}

#[derive(Args)]
struct RatesArgs {
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    noise: Option<f64>,
    /// sincos or constant:<value>
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    tau0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    tau_exponent: Option<f64>,
}

#[derive(Args)]
struct InspectArgs {
    #[arg(long, default_value = "zoo")]
    dataset: String,
    /// Hyperedge file to inspect instead of a dataset
    #[arg(long)]
    hyperedges: Option<PathBuf>,
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn resolve(cli: &mut Cli) -> Result<Config> {
    let mut cfg = match &cli.config {
        Some(p) => Config::from_file(p)?,
        None => Config::default(),
    };
    set(&mut cfg.seed, cli.seed);
    set(&mut cfg.output, cli.output.take());
    set(&mut cfg.data_dir, cli.data_dir.take());
    if cli.no_timing {
        cfg.timing = false;
    }
    set(&mut cfg.tolerances.cg, cli.cg_tol);
    set(&mut cfg.tolerances.eig, cli.eig_tol);
    match &mut cli.command {
        Command::Benchmark(a) => {
            let b = &mut cfg.benchmark;
            set(&mut b.dataset, a.dataset.take());
            if !a.methods.is_empty() {
                b.methods = std::mem::take(&mut a.methods);
            }
            set(&mut b.label_rates, a.rates.take());
            set(&mut b.trials, a.trials);
            set(&mut b.sampling, a.sampling.take());
            set(&mut b.repetitions, a.repetitions);
        }
        Command::Active(a) => {
            let c = &mut cfg.active;
            set(&mut c.dataset, a.dataset.take());
            set(&mut c.trials, a.trials);
            set(&mut c.budget, a.budget);
            set(&mut c.laplace_k, a.laplace_k);
            set(&mut c.ks, a.ks.take());
            set(&mut c.lambdas, a.lambdas.take());
            set(&mut c.powers, a.powers.take());
        }
        Command::Consistency(a) => {
            let c = &mut cfg.consistency;
            set(&mut c.dim, a.dim);
            set(&mut c.sizes, a.sizes.take());
            set(&mut c.seeds, a.seeds);
            set(&mut c.eigenvalues, a.eigenvalues);
            set(&mut c.trunc_n, a.trunc_n);
            set(&mut c.trunc_tau, a.trunc_tau);
            set(&mut c.trunc_levels, a.trunc_levels.take());
        }
        Command::Rates(a) => {
            let r = &mut cfg.rates;
            set(&mut r.dim, a.dim);
            set(&mut r.sizes, a.sizes.take());
            set(&mut r.trials, a.trials);
            set(&mut r.noise, a.noise);
            set(&mut r.target, a.target.take());
            set(&mut r.tau0, a.tau0);
            set(&mut r.tau_exponent, a.tau_exponent);
        }
        Command::Inspect(_) => {}
    }
    Ok(cfg)
}

fn run(mut cli: Cli) -> Result<()> {
    configure_threads()?;
    let cfg = resolve(&mut cli)?;
    if cli.print_config {
        print!("{}", cfg.to_toml());
        return Ok(());
    }
    let files = match &cli.command {
        Command::Benchmark(_) => {
            let r = benchmark::run_benchmark(&cfg)?;
            print!("{}", r.table);
            let failed = r.failures();
            if !failed.is_empty() {
                for c in &failed {
                    eprintln!(
                        "error: cell {} @ {} failed: {}",
                        c.method,
                        c.rate,
                        c.outcome.as_ref().err().unwrap()
                    );
                }
                bail!("{} of {} benchmark cells failed", failed.len(), r.cells.len());
            }
            r.files
        }
        Command::Active(_) => {
            let r = active::run_active(&cfg)?;
            print!("{}", r.table);
            r.files
        }
        Command::Consistency(_) => {
            let r = consistency::run_consistency(&cfg)?;
            print!("{}", r.table);
            r.files
        }
        Command::Rates(_) => {
            let r = rates::run_rates(&cfg)?;
            print!("{}", r.table);
            r.files
        }
        Command::Inspect(a) => {
            print!("{}", inspect::run_inspect(&cfg, &a.dataset, a.hyperedges.as_deref())?);
            Vec::new()
        }
    };
    for f in files {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
