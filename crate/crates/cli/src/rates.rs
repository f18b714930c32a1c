//! Error of the fully supervised estimator against sample size.

use std::path::PathBuf;

use anyhow::{ensure, Result};
use hohl::learning::{median, rates_experiment, RatesConfig, RatesRecord};

use crate::config::{parse_target, Config};
use crate::output::{header_with, mean_std, render_table, write_text, CsvOut};

#[derive(Debug)]
pub struct RatesReport {
    pub records: Vec<RatesRecord>,
    /// `(n, median error, mean error)` in the order of the configured sizes.
    pub summary: Vec<(usize, f64, f64)>,
    pub table: String,
    pub files: Vec<PathBuf>,
}

pub fn rates_config(cfg: &Config) -> Result<RatesConfig> {
    cfg.check_common()?;
    let r = &cfg.rates;
    ensure!(r.dim >= 1, "dimension must be positive");
    ensure!(r.tau0 > 0.0, "tau0 must be positive");
    Ok(RatesConfig {
        dim: r.dim,
        sizes: r.sizes.clone(),
        trials: r.trials,
        noise_std: r.noise,
        target: parse_target(&r.target)?,
        ladder: cfg.ladder.resolve()?,
        tau0: r.tau0,
        tau_exponent: r.tau_exponent,
        cg_tol: cfg.tolerances.cg,
        seed: cfg.seed,
    })
}

pub fn run_rates(cfg: &Config) -> Result<RatesReport> {
    let rc = rates_config(cfg)?;
    let records = rates_experiment(&rc)?;
    let summary: Vec<(usize, f64, f64)> = rc
        .sizes
        .iter()
        .map(|&n| {
            let mut e: Vec<f64> = records.iter().filter(|r| r.n == n).map(|r| r.error).collect();
            let mean = mean_std(&e).0;
            (n, median(&mut e), mean)
        })
        .collect();

    let extra = [
        "ladder rule: eps_k = c_k (ln n / n)^(1/(d+4))".to_string(),
        "tau rule: tau = tau0 * n^tau_exponent".to_string(),
        "error: |u - g| in L2(mu_n)".to_string(),
    ];
    let head = header_with("rates", cfg, &extra);
    let q = rc.ladder.constants.len();
    let mut cols = vec!["n".to_string(), "trial".into(), "tau".into()];
    cols.extend((1..=q).map(|k| format!("eps_{k}")));
    cols.push("error".into());
    let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut out = CsvOut::create(&cfg.output, "rates.csv", &head, &col_refs)?;
    for r in &records {
        let mut row = vec![r.n.to_string(), r.trial.to_string(), format!("{:.6e}", r.tau)];
        row.extend(r.epsilons.iter().map(|e| format!("{e:.6}")));
        row.push(format!("{:.6e}", r.error));
        out.row(row)?;
    }
    let mut sum = CsvOut::create(&cfg.output, "rates_summary.csv", &head, &["n", "median_error", "mean_error"])?;
    for (n, m, a) in &summary {
        sum.row([n.to_string(), format!("{m:.6e}"), format!("{a:.6e}")])?;
    }
    let mut files = vec![out.finish()?, sum.finish()?];
    let rows: Vec<Vec<String>> = summary
        .iter()
        .map(|(n, m, a)| vec![n.to_string(), format!("{m:.5}"), format!("{a:.5}")])
        .collect();
    let table = format!(
        "supervised error over {} trials, d = {}\n{}",
        rc.trials,
        rc.dim,
        render_table(&["n".into(), "median".into(), "mean".into()], &rows)
    );
    files.push(write_text(&cfg.output, "rates_summary.txt", &table)?);
    Ok(RatesReport {
        records,
        summary,
        table,
        files,
    })
}
