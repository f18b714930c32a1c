//! Semi-supervised benchmark tables: accuracy over repeated random label sets.

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{ensure, Context, Result};
use hohl::learning::{sample_labels, ssl_classify, LabelSampling, LabeledDataset};
use hohl::seed::rng_for;
use hohl::{GraphLaplacian, KnnIndex};
use rayon::prelude::*;

use crate::config::{parse_sampling, Config, Method};
use crate::datasets::{load_dataset, method_laplacian, Dataset};
use crate::output::{fmt_opt, header, mean_std, render_table, write_text, CsvOut};

#[derive(Clone, Debug, PartialEq)]
pub struct TrialResult {
    pub trial: usize,
    pub labeled: usize,
    /// Percent correct on the unlabelled vertices.
    pub accuracy: f64,
    pub seconds: Option<f64>,
    /// Unlabelled vertices that got the majority class because their component has no label.
    pub fallback: usize,
    pub flag: String,
}

#[derive(Clone, Debug)]
pub struct CellReport {
    pub method: String,
    pub rate: f64,
    /// Trials in order, or the diagnostic of the failure that aborted the cell.
    pub outcome: std::result::Result<Vec<TrialResult>, String>,
}

impl CellReport {
    pub fn accuracies(&self) -> Vec<f64> {
        self.outcome.as_ref().map(|t| t.iter().map(|r| r.accuracy).collect()).unwrap_or_default()
    }

    pub fn mean_std(&self) -> (f64, f64) {
        mean_std(&self.accuracies())
    }

    pub fn mean_seconds(&self) -> Option<f64> {
        let t = self.outcome.as_ref().ok()?;
        let s: Option<Vec<f64>> = t.iter().map(|r| r.seconds).collect();
        Some(mean_std(&s?).0)
    }
}

#[derive(Debug)]
pub struct BenchmarkReport {
    pub dataset: String,
    pub cells: Vec<CellReport>,
    pub table: String,
    pub files: Vec<PathBuf>,
}

impl BenchmarkReport {
    pub fn failures(&self) -> Vec<&CellReport> {
        self.cells.iter().filter(|c| c.outcome.is_err()).collect()
    }

    pub fn cell(&self, method: &str, rate: f64) -> Option<&CellReport> {
        self.cells.iter().find(|c| c.method == method && c.rate == rate)
    }
}

struct Plan {
    methods: Vec<Method>,
    sampling: LabelSampling,
}

fn plan(cfg: &Config) -> Result<Plan> {
    cfg.check_common()?;
    let b = &cfg.benchmark;
    ensure!(b.trials >= 1, "benchmark needs at least one trial");
    ensure!(!b.methods.is_empty(), "benchmark needs at least one method");
    ensure!(!b.label_rates.is_empty(), "benchmark needs at least one label rate");
    for &r in &b.label_rates {
        ensure!(r > 0.0 && r <= 1.0, "label rate {r} outside (0, 1]");
    }
    let methods = b.methods.iter().map(|m| m.parse()).collect::<Result<Vec<Method>>>()?;
    Ok(Plan {
        methods,
        sampling: parse_sampling(&b.sampling)?,
    })
}

fn run_trial(
    cfg: &Config,
    ds: &Dataset,
    lap: &GraphLaplacian,
    method: &Method,
    rate: f64,
    sampling: LabelSampling,
    trial: usize,
) -> Result<TrialResult> {
    let mut rng = rng_for(cfg.seed, &format!("benchmark/{}/{method}/{rate}/{trial}", ds.name));
    let labeled = sample_labels(&ds.classes, ds.n_classes, rate, sampling, &mut rng)?;
    let data = LabeledDataset::from_truth(&ds.classes, ds.n_classes, &labeled)?;
    let unlabeled = data.unlabeled();
    if unlabeled.is_empty() {
        return Ok(TrialResult {
            trial,
            labeled: labeled.len(),
            accuracy: 100.0,
            seconds: cfg.timing.then_some(0.0),
            fallback: 0,
            flag: "no-unlabeled".into(),
        });
    }
    let reps = if cfg.timing { cfg.benchmark.repetitions.max(1) } else { 1 };
    let mut times = Vec::with_capacity(reps);
    let mut out = None;
    for _ in 0..reps {
        let t0 = Instant::now();
        let o = ssl_classify(lap, &data)?;
        times.push(t0.elapsed().as_secs_f64());
        out = Some(o);
    }
    let out = out.expect("at least one repetition");
    let mut flag = String::new();
    if out.ridge > 0.0 {
        flag = format!("ridge={:e}", out.ridge);
    }
    Ok(TrialResult {
        trial,
        labeled: labeled.len(),
        accuracy: 100.0 * out.accuracy(&ds.classes, &unlabeled),
        seconds: cfg.timing.then(|| hohl::learning::median(&mut times)),
        fallback: out.fallback.len(),
        flag,
    })
}

/// Runs every (method, rate) cell and writes per-trial and summary files.
/// Failed cells are reported, not raised.
pub fn run_benchmark(cfg: &Config) -> Result<BenchmarkReport> {
    let plan = plan(cfg)?;
    let b = &cfg.benchmark;
    let ds = load_dataset(&b.dataset, &cfg.data_dir, cfg.seed)?;
    log::info!("benchmark on {} ({} vertices, {} classes)", ds.name, ds.n(), ds.n_classes);

    let k_max = plan.methods.iter().map(Method::max_k).max().unwrap_or(0);
    let index = if k_max > 0 {
        Some(KnnIndex::build(ds.points()?, k_max).context("k-NN search")?)
    } else {
        None
    };

    let mut cells = Vec::new();
    for method in &plan.methods {
        // construction is outside the timed region
        let lap = method_laplacian(method, &ds, index.as_ref(), cfg.tolerances.dense_budget);
        for &rate in &b.label_rates {
            let outcome = match &lap {
                Err(e) => Err(format!("{e:#}")),
                Ok(lap) => (0..b.trials)
                    .into_par_iter()
                    .map(|t| {
                        run_trial(cfg, &ds, lap, method, rate, plan.sampling, t)
                            .with_context(|| format!("trial {t}"))
                    })
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| format!("{e:#}")),
            };
            if let Err(e) = &outcome {
                log::error!("cell {method} @ {rate} failed: {e}");
            }
            cells.push(CellReport {
                method: method.to_string(),
                rate,
                outcome,
            });
        }
    }

    let head = header("benchmark", cfg);
    let dir = &cfg.output;
    let mut res = CsvOut::create(
        dir,
        "benchmark_results.csv",
        &head,
        &["dataset", "method", "label_rate", "trial", "labeled", "accuracy", "seconds", "fallback", "flag"],
    )?;
    for c in &cells {
        if let Ok(trials) = &c.outcome {
            for t in trials {
                res.row([
                    ds.name.clone(),
                    c.method.clone(),
                    c.rate.to_string(),
                    t.trial.to_string(),
                    t.labeled.to_string(),
                    format!("{:.4}", t.accuracy),
                    fmt_opt(t.seconds, 6),
                    t.fallback.to_string(),
                    t.flag.clone(),
                ])?;
            }
        }
    }
    let mut sum = CsvOut::create(
        dir,
        "benchmark_summary.csv",
        &head,
        &["dataset", "method", "label_rate", "trials", "mean_accuracy", "std_accuracy", "mean_seconds", "status"],
    )?;
    for c in &cells {
        let (m, s) = c.mean_std();
        let status = match &c.outcome {
            Ok(t) if t.iter().any(|r| r.flag == "no-unlabeled") => "no-unlabeled: accuracy 100 by convention".into(),
            Ok(_) => "ok".to_string(),
            Err(e) => format!("failed: {e}"),
        };
        sum.row([
            ds.name.clone(),
            c.method.clone(),
            c.rate.to_string(),
            c.outcome.as_ref().map_or(0, |t| t.len()).to_string(),
            fmt_opt(Some(m), 4),
            fmt_opt(Some(s), 4),
            fmt_opt(c.mean_seconds(), 6),
            status,
        ])?;
    }
    let files = vec![res.finish()?, sum.finish()?];

    let report_cells = cells;
    let table = summary_table(&ds.name, &plan.methods, &b.label_rates, &report_cells, cfg.timing);
    let mut files = files;
    files.push(write_text(dir, "benchmark_summary.txt", &table)?);
    Ok(BenchmarkReport {
        dataset: ds.name,
        cells: report_cells,
        table,
        files,
    })
}

/// Rates as rows, methods as columns, `mean (std)` entries.
fn summary_table(dataset: &str, methods: &[Method], rates: &[f64], cells: &[CellReport], timing: bool) -> String {
    let mut head = vec!["rate".to_string()];
    head.extend(methods.iter().map(|m| m.to_string()));
    let find = |m: &Method, r: f64| cells.iter().find(|c| c.method == m.to_string() && c.rate == r);
    let rows: Vec<Vec<String>> = rates
        .iter()
        .map(|&r| {
            let mut row = vec![r.to_string()];
            for m in methods {
                row.push(match find(m, r) {
                    Some(c) if c.outcome.is_ok() => {
                        let (mean, std) = c.mean_std();
                        format!("{mean:.2} ({std:.2})")
                    }
                    _ => "failed".into(),
                });
            }
            row
        })
        .collect();
    let mut s = format!("accuracy (%) on {dataset}, mean (std) over trials\n");
    s.push_str(&render_table(&head, &rows));
    if timing {
        let rows: Vec<Vec<String>> = rates
            .iter()
            .map(|&r| {
                let mut row = vec![r.to_string()];
                row.extend(methods.iter().map(|m| fmt_opt(find(m, r).and_then(|c| c.mean_seconds()), 4)));
                row
            })
            .collect();
        s.push_str("\nsolve time (s), excluding graph construction\n");
        s.push_str(&render_table(&head, &rows));
    }
    s
}
