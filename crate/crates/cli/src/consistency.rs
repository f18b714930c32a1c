//! Eigenvalue convergence against the torus spectrum and the truncation sweep.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{ensure, Result};
use hohl::consistency::{torus_eigenvalues, truncation_errors};
use hohl::data::{sample_synthetic, SyntheticSpec};
use hohl::learning::median;
use hohl::seed::rng_for;
use hohl::smallest_eigenpairs;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::config::{parse_target, Config};
use crate::output::{header_with, render_table, write_text, CsvOut};

#[derive(Clone, Debug, PartialEq)]
pub struct EigenRecord {
    pub n: usize,
    pub seed: usize,
    pub index: usize,
    pub computed: f64,
    pub limit: f64,
}

impl EigenRecord {
    pub fn abs_error(&self) -> f64 {
        (self.computed - self.limit).abs()
    }

    pub fn rel_error(&self) -> Option<f64> {
        (self.limit != 0.0).then(|| self.abs_error() / self.limit.abs())
    }
}

#[derive(Debug)]
pub struct ConsistencyReport {
    pub eigen: Vec<EigenRecord>,
    /// `(T, |v_T - v_n|)` in `L2(mu_n)`.
    pub truncation: Vec<(usize, f64)>,
    pub table: String,
    pub files: Vec<PathBuf>,
}

impl ConsistencyReport {
    /// Median relative error (absolute for zero limits) per `(n, index)`.
    pub fn median_errors(&self) -> BTreeMap<(usize, usize), f64> {
        let mut groups: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
        for r in &self.eigen {
            groups
                .entry((r.n, r.index))
                .or_default()
                .push(r.rel_error().unwrap_or(r.abs_error()));
        }
        groups.into_iter().map(|(k, mut v)| (k, median(&mut v))).collect()
    }
}

pub fn run_consistency(cfg: &Config) -> Result<ConsistencyReport> {
    cfg.check_common()?;
    let c = &cfg.consistency;
    let ladder = cfg.ladder.resolve()?;
    ensure!(c.dim >= 1 && c.trunc_dim >= 1, "dimensions must be positive");
    ensure!(c.seeds >= 1 && c.eigenvalues >= 1 && !c.sizes.is_empty(), "empty eigenvalue ladder");
    ensure!(
        c.trunc_levels.iter().all(|&t| t >= 1 && t <= c.trunc_n),
        "truncation levels must lie in 1..={}",
        c.trunc_n
    );
    ensure!(c.trunc_noise >= 0.0, "noise must be nonnegative");
    let target = parse_target(&c.target)?;
    let beta = torus_eigenvalues(c.dim, c.eigenvalues);

    let jobs: Vec<(usize, usize)> = c.sizes.iter().flat_map(|&n| (0..c.seeds).map(move |s| (n, s))).collect();
    let eigen: Vec<EigenRecord> = jobs
        .par_iter()
        .map(|&(n, s)| {
            let mut rng = rng_for(cfg.seed, &format!("consistency/eig/{n}/{s}"));
            let cloud = sample_synthetic(&SyntheticSpec::TorusUniform { n, d: c.dim }, &mut rng)?.cloud;
            let op = ladder.operator(&cloud)?;
            let basis = smallest_eigenpairs(&op, c.eigenvalues, cfg.tolerances.eig)?;
            Ok(basis
                .eigenvalues()
                .iter()
                .enumerate()
                .map(|(i, &v)| EigenRecord {
                    n,
                    seed: s,
                    index: i,
                    computed: v,
                    limit: ladder.limit_eigenvalue(beta[i]),
                })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let mut rng = rng_for(cfg.seed, "consistency/truncation");
    let cloud = sample_synthetic(
        &SyntheticSpec::TorusUniform {
            n: c.trunc_n,
            d: c.trunc_dim,
        },
        &mut rng,
    )?
    .cloud;
    let noise = Normal::new(0.0, c.trunc_noise)?;
    let y: Vec<f64> = (0..c.trunc_n)
        .map(|i| target.eval(cloud.point(i)) + noise.sample(&mut rng))
        .collect();
    let op = ladder.operator(&cloud)?;
    let truncation = truncation_errors(&op, &y, c.trunc_tau, &c.trunc_levels, cfg.tolerances.eig, c.trunc_solve_tol)?;

    let extra = [
        "ladder rule: eps_k = c_k (ln n / n)^(1/(d+4)); limit eigenvalue sum_k lambda_k beta^p_k, beta = 4 pi^2 |m|^2".into(),
    ];
    let head = header_with("consistency", cfg, &extra);
    let mut eig = CsvOut::create(
        &cfg.output,
        "consistency_eigenvalues.csv",
        &head,
        &["n", "seed", "index", "computed", "limit", "abs_error", "rel_error"],
    )?;
    for r in &eigen {
        eig.row([
            r.n.to_string(),
            r.seed.to_string(),
            r.index.to_string(),
            format!("{:.10e}", r.computed),
            format!("{:.10e}", r.limit),
            format!("{:.6e}", r.abs_error()),
            r.rel_error().map_or("NA".into(), |e| format!("{e:.6e}")),
        ])?;
    }
    let mut tr = CsvOut::create(&cfg.output, "consistency_truncation.csv", &head, &["T", "error"])?;
    for (t, e) in &truncation {
        tr.row([t.to_string(), format!("{e:.6e}")])?;
    }
    let mut files = vec![eig.finish()?, tr.finish()?];

    let mut report = ConsistencyReport {
        eigen,
        truncation,
        table: String::new(),
        files: Vec::new(),
    };
    let med = report.median_errors();
    let mut head_row = vec!["n".to_string()];
    head_row.extend((0..c.eigenvalues).map(|i| format!("#{}", i + 1)));
    let rows: Vec<Vec<String>> = c
        .sizes
        .iter()
        .map(|&n| {
            let mut row = vec![n.to_string()];
            row.extend((0..c.eigenvalues).map(|i| format!("{:.4e}", med[&(n, i)])));
            row
        })
        .collect();
    let trows: Vec<Vec<String>> = report
        .truncation
        .iter()
        .map(|(t, e)| vec![t.to_string(), format!("{e:.4e}")])
        .collect();
    let table = format!(
        "median eigenvalue error over {} seeds (relative; absolute for a zero limit), d = {}\n{}\ntruncation error, n = {}, tau = {}\n{}",
        c.seeds,
        c.dim,
        render_table(&head_row, &rows),
        c.trunc_n,
        c.trunc_tau,
        render_table(&["T".into(), "error".into()], &trows)
    );
    files.push(write_text(&cfg.output, "consistency_summary.txt", &table)?);
    report.table = table;
    report.files = files;
    Ok(report)
}
