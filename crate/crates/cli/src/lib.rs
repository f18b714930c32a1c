//! Experiment drivers behind the `hohl` command.

pub mod active;
pub mod benchmark;
pub mod config;
pub mod consistency;
pub mod datasets;
pub mod inspect;
pub mod output;
pub mod rates;

pub use config::{Config, Method};

/// Sizes the global thread pool from `HOHL_THREADS` when set.
pub fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("HOHL_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| anyhow::anyhow!("HOHL_THREADS must be a positive integer, got '{v}'"))?;
        anyhow::ensure!(n >= 1, "HOHL_THREADS must be a positive integer");
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}
