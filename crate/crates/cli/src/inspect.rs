//! Dataset and hypergraph summaries.

use std::path::Path;

use anyhow::Result;
use hohl::Hypergraph;

use crate::config::Config;
use crate::datasets::{load_dataset, Features};
use crate::output::{header, render_table, CsvOut};

pub fn size_table(h: &Hypergraph) -> String {
    let rows: Vec<Vec<String>> = h
        .size_histogram()
        .iter()
        .map(|(s, c)| vec![s.to_string(), c.to_string()])
        .collect();
    render_table(&["size".into(), "hyperedges".into()], &rows)
}

/// Summary of a named dataset, or of a hyperedge file when `hyperedges` is given.
/// Hypergraph histograms are also written to `inspect_sizes.csv`.
pub fn run_inspect(cfg: &Config, dataset: &str, hyperedges: Option<&Path>) -> Result<String> {
    let (name, h) = match hyperedges {
        Some(p) => (p.display().to_string(), Some(Hypergraph::read(p)?)),
        None => {
            let ds = load_dataset(dataset, &cfg.data_dir, cfg.seed)?;
            let mut counts = vec![0usize; ds.n_classes];
            for &c in &ds.classes {
                counts[c] += 1;
            }
            match &ds.features {
                Features::Table(t) => {
                    let mut s = format!(
                        "{}: {} rows, {} columns, {} classes {:?}\n",
                        ds.name,
                        t.n_rows(),
                        t.columns().len(),
                        ds.n_classes,
                        counts
                    );
                    let h = ds.hypergraph()?;
                    s.push_str(&format!("hyperedges: {}\n", h.edges().len()));
                    (s, Some(h))
                }
                Features::Points(p) => {
                    return Ok(format!(
                        "{}: {} points in dimension {} ({:?} metric), {} classes {:?}\n",
                        ds.name,
                        p.n(),
                        p.dim(),
                        p.metric(),
                        ds.n_classes,
                        counts
                    ))
                }
            }
        }
    };
    let h = h.expect("hypergraph present");
    let mut text = if hyperedges.is_some() {
        format!("{name}: {} vertices, {} hyperedges\n", h.n(), h.edges().len())
    } else {
        name
    };
    text.push_str(&size_table(&h));
    let mut out = CsvOut::create(&cfg.output, "inspect_sizes.csv", &header("inspect", cfg), &["size", "hyperedges"])?;
    for (s, c) in h.size_histogram() {
        out.row([s.to_string(), c.to_string()])?;
    }
    out.finish()?;
    Ok(text)
}
