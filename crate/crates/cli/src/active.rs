//! Active learning with a Laplace prior and a HOHL prior on one k-NN search.

use std::path::PathBuf;

use anyhow::{bail, ensure, Result};
use hohl::learning::{active_learn, one_per_class, Acquisition};
use hohl::seed::rng_for;
use hohl::KnnIndex;
use rayon::prelude::*;

use crate::config::{Config, Method};
use crate::datasets::{load_dataset, method_operator};
use crate::output::{header, mean_std, render_table, write_text, CsvOut};

#[derive(Clone, Debug)]
pub struct ArmCurve {
    pub arm: String,
    pub method: String,
    /// `[trial][round]`, percent.
    pub trials: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl ArmCurve {
    pub fn final_mean(&self) -> f64 {
        *self.mean.last().unwrap_or(&f64::NAN)
    }
}

#[derive(Debug)]
pub struct ActiveReport {
    pub arms: Vec<ArmCurve>,
    pub initial_labels: usize,
    pub table: String,
    pub files: Vec<PathBuf>,
}

pub fn arm_methods(cfg: &Config) -> Result<[(String, Method); 2]> {
    let a = &cfg.active;
    let laplace = Method::LaplaceKnn { k: a.laplace_k };
    let hohl = Method::HohlKnn {
        ks: a.ks.clone(),
        lambdas: a.lambdas.clone(),
        powers: a.powers.clone(),
    };
    laplace.validate()?;
    hohl.validate()?;
    Ok([("laplace".into(), laplace), ("hohl".into(), hohl)])
}

pub fn run_active(cfg: &Config) -> Result<ActiveReport> {
    cfg.check_common()?;
    let a = &cfg.active;
    ensure!(a.trials >= 1, "active learning needs at least one trial");
    let acquisition = match a.acquisition.as_str() {
        "margin" => Acquisition::Margin,
        other => bail!("unknown acquisition '{other}' (expected margin)"),
    };
    let arms = arm_methods(cfg)?;
    let ds = load_dataset(&a.dataset, &cfg.data_dir, cfg.seed)?;
    let k_max = arms.iter().map(|(_, m)| m.max_k()).max().unwrap_or(1);
    let index = KnnIndex::build(ds.points()?, k_max)?;
    let mats = arms
        .iter()
        .map(|(_, m)| Ok(method_operator(m, &ds, Some(&index))?.materialize(cfg.tolerances.dense_budget)?))
        .collect::<Result<Vec<_>>>()?;
    log::info!("active learning on {} ({} vertices)", ds.name, ds.n());

    let runs: Vec<(usize, Vec<Vec<f64>>)> = (0..a.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_for(cfg.seed, &format!("active/{}/{t}", ds.name));
            let initial = one_per_class(&ds.classes, ds.n_classes, &mut rng);
            let curves = mats
                .iter()
                .map(|m| {
                    let out = active_learn(m, &ds.classes, ds.n_classes, &initial, a.budget, acquisition)?;
                    Ok(out.accuracy.iter().map(|x| 100.0 * x).collect())
                })
                .collect::<Result<Vec<Vec<f64>>>>()?;
            Ok((initial.len(), curves))
        })
        .collect::<Result<_>>()?;
    let initial_labels = runs[0].0;

    let curves: Vec<ArmCurve> = arms
        .iter()
        .enumerate()
        .map(|(i, (arm, method))| {
            let trials: Vec<Vec<f64>> = runs.iter().map(|r| r.1[i].clone()).collect();
            let rounds = trials.iter().map(Vec::len).min().unwrap_or(0);
            let (mean, std) = (0..rounds)
                .map(|r| mean_std(&trials.iter().map(|t| t[r]).collect::<Vec<_>>()))
                .unzip();
            ArmCurve {
                arm: arm.clone(),
                method: method.to_string(),
                trials,
                mean,
                std,
            }
        })
        .collect();

    let head = header("active", cfg);
    let mut per = CsvOut::create(
        &cfg.output,
        "active_trials.csv",
        &head,
        &["arm", "method", "trial", "round", "labeled", "accuracy"],
    )?;
    let mut cur = CsvOut::create(
        &cfg.output,
        "active_curves.csv",
        &head,
        &["arm", "method", "round", "labeled", "mean_accuracy", "std_accuracy"],
    )?;
    for c in &curves {
        for (t, acc) in c.trials.iter().enumerate() {
            for (r, v) in acc.iter().enumerate() {
                per.row([
                    c.arm.clone(),
                    c.method.clone(),
                    t.to_string(),
                    r.to_string(),
                    (initial_labels + r).to_string(),
                    format!("{v:.4}"),
                ])?;
            }
        }
        for r in 0..c.mean.len() {
            cur.row([
                c.arm.clone(),
                c.method.clone(),
                r.to_string(),
                (initial_labels + r).to_string(),
                format!("{:.4}", c.mean[r]),
                format!("{:.4}", c.std[r]),
            ])?;
        }
    }
    let mut files = vec![per.finish()?, cur.finish()?];

    let head_row = vec!["arm".to_string(), "method".into(), "initial".into(), "final".into()];
    let rows: Vec<Vec<String>> = curves
        .iter()
        .map(|c| {
            let first = c.mean.first().copied().unwrap_or(f64::NAN);
            let last = c.mean.len() - 1;
            vec![
                c.arm.clone(),
                c.method.clone(),
                format!("{first:.2} ({:.2})", c.std[0]),
                format!("{:.2} ({:.2})", c.mean[last], c.std[last]),
            ]
        })
        .collect();
    let table = format!(
        "active learning on {}: accuracy (%) mean (std) over {} trials, {} initial labels, budget {}\n{}",
        ds.name,
        a.trials,
        initial_labels,
        a.budget,
        render_table(&head_row, &rows)
    );
    files.push(write_text(&cfg.output, "active_summary.txt", &table)?);
    Ok(ActiveReport {
        arms: curves,
        initial_labels,
        table,
        files,
    })
}
