//! Named datasets and the graphs each method builds on them.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use hohl::data::{load_citation, load_idx, load_mushroom, load_zoo, sample_synthetic, CategoricalTable, SyntheticSpec};
use hohl::seed::rng_for;
use hohl::{
    categorical_hypergraph, clique_expand, group_segments, materialize_graph, skeleton_decompose, GraphLaplacian,
    Hypergraph, KnnIndex, MultiscaleOperator, PointCloud, ScaleTerm,
};

use crate::config::Method;

pub enum Features {
    Table(CategoricalTable),
    Points(PointCloud),
}

pub struct Dataset {
    pub name: String,
    pub features: Features,
    pub classes: Vec<usize>,
    pub n_classes: usize,
}

impl Dataset {
    pub fn n(&self) -> usize {
        self.classes.len()
    }

    pub fn hypergraph(&self) -> Result<Hypergraph> {
        match &self.features {
            Features::Table(t) => Ok(categorical_hypergraph(t)),
            Features::Points(_) => bail!("dataset '{}' is a point cloud, not a categorical table", self.name),
        }
    }

    pub fn points(&self) -> Result<&PointCloud> {
        match &self.features {
            Features::Points(p) => Ok(p),
            Features::Table(_) => bail!("dataset '{}' is a categorical table, not a point cloud", self.name),
        }
    }
}

/// Files a named dataset is read from, relative to the data directory.
pub fn dataset_files(name: &str, data_dir: &Path) -> Vec<PathBuf> {
    let f = |p: &str| data_dir.join(p);
    match name {
        "zoo" => vec![f("zoo/zoo.data")],
        "mushroom" => vec![f("mushroom/agaricus-lepiota.data")],
        "cora" => vec![f("cora/cora.content"), f("cora/cora.cites")],
        "citeseer" => vec![f("citeseer/citeseer.content"), f("citeseer/citeseer.cites")],
        "mnist5k" => vec![f("mnist5k/images-idx3-ubyte"), f("mnist5k/labels-idx1-ubyte")],
        _ => Vec::new(),
    }
}

/// Loads `zoo`, `mushroom`, `cora`, `citeseer`, `mnist5k` from `data_dir`,
/// or samples `moons:<n>:<noise>`.
pub fn load_dataset(name: &str, data_dir: &Path, seed: u64) -> Result<Dataset> {
    for p in dataset_files(name, data_dir) {
        if !p.exists() {
            bail!(
                "dataset '{name}' unavailable: {} not found (see data/README.md for download instructions)",
                p.display()
            );
        }
    }
    let files = dataset_files(name, data_dir);
    let table = |t: hohl::data::LabeledTable, name: &str| Dataset {
        name: name.to_string(),
        n_classes: t.n_classes(),
        classes: t.classes,
        features: Features::Table(t.table),
    };
    let ds = match name {
        "zoo" => table(load_zoo(&files[0])?, name),
        "mushroom" => table(load_mushroom(&files[0])?, name),
        "cora" | "citeseer" => table(load_citation(&files[0], Some(&files[1]))?.labeled, name),
        "mnist5k" => {
            let (cloud, classes) = load_idx(&files[0], &files[1], None)?;
            let n_classes = classes.iter().max().map_or(0, |m| m + 1);
            Dataset {
                name: name.into(),
                features: Features::Points(cloud),
                classes,
                n_classes,
            }
        }
        other => match other.split(':').collect::<Vec<_>>().as_slice() {
            ["moons", n, noise] => {
                let n: usize = n.parse().context("moons sample size")?;
                let noise: f64 = noise.parse().context("moons noise")?;
                let mut rng = rng_for(seed, &format!("dataset/{other}"));
                let s = sample_synthetic(&SyntheticSpec::TwoMoons { n, noise }, &mut rng)?;
                Dataset {
                    name: other.into(),
                    features: Features::Points(s.cloud),
                    classes: s.labels.expect("moons are labelled"),
                    n_classes: 2,
                }
            }
            _ => bail!("unknown dataset '{other}' (expected zoo, mushroom, cora, citeseer, mnist5k or moons:<n>:<noise>)"),
        },
    };
    Ok(ds)
}

/// Multiscale operator of a method on a dataset. k-NN methods reuse `index`.
pub fn method_operator(method: &Method, ds: &Dataset, index: Option<&KnnIndex>) -> Result<MultiscaleOperator> {
    match method {
        Method::Hohl { q, rule } => {
            let h = ds.hypergraph()?;
            let sk = skeleton_decompose(&h);
            let groups = group_segments(&sk, *q, *rule)
                .with_context(|| format!("{method} on {}: {} distinct hyperedge sizes", ds.name, sk.len()))?;
            Ok(MultiscaleOperator::from_groups(groups)?)
        }
        Method::Clique => Ok(MultiscaleOperator::single(GraphLaplacian::from_adjacency(clique_expand(
            &ds.hypergraph()?,
        )))),
        Method::LaplaceKnn { k } => knn_operator(ds, index, &[*k], &[1.0], &[1]),
        Method::HohlKnn { ks, lambdas, powers } => knn_operator(ds, index, ks, lambdas, powers),
    }
}

fn knn_operator(
    ds: &Dataset,
    index: Option<&KnnIndex>,
    ks: &[usize],
    lambdas: &[f64],
    powers: &[u32],
) -> Result<MultiscaleOperator> {
    let owned;
    let index = match index {
        Some(i) => i,
        None => {
            owned = KnnIndex::build(ds.points()?, ks.iter().copied().max().unwrap_or(1))?;
            &owned
        }
    };
    let mut terms = Vec::with_capacity(ks.len());
    for ((&k, &coeff), &power) in ks.iter().zip(lambdas).zip(powers) {
        terms.push(ScaleTerm {
            laplacian: GraphLaplacian::from_adjacency(index.selftuning_graph(k)?),
            coeff,
            power,
        });
    }
    Ok(MultiscaleOperator::new(terms)?)
}

/// Graph Laplacian whose hard-constraint solve equals that of the operator.
pub fn method_laplacian(
    method: &Method,
    ds: &Dataset,
    index: Option<&KnnIndex>,
    dense_budget: usize,
) -> Result<GraphLaplacian> {
    let op = method_operator(method, ds, index)?;
    if let [t] = op.terms() {
        if t.power == 1 && t.coeff == 1.0 {
            let l = &t.laplacian;
            return Ok(GraphLaplacian::from_adjacency(l.adjacency().to_sparse()).scaled(l.scale()));
        }
    }
    Ok(materialize_graph(&op, dense_budget)?)
}
