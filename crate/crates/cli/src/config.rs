//! Experiment configuration: a TOML file with one section per command,
//! every key optional, command-line flags applied on top.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, ensure, Context, Result};
use hohl::consistency::EpsilonLadder;
use hohl::learning::{LabelSampling, TargetFunction};
use hohl::{CoefficientRule, KernelProfile};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    pub output: PathBuf,
    pub data_dir: PathBuf,
    /// Record wall-clock seconds; `false` writes `NA` so reruns are byte-identical.
    pub timing: bool,
    pub tolerances: Tolerances,
    pub ladder: LadderConfig,
    pub benchmark: BenchmarkConfig,
    pub active: ActiveConfig,
    pub consistency: ConsistencyConfig,
    pub rates: RatesSection,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 42,
            output: PathBuf::from("results"),
            data_dir: PathBuf::from("data"),
            timing: true,
            tolerances: Tolerances::default(),
            ladder: LadderConfig::default(),
            benchmark: BenchmarkConfig::default(),
            active: ActiveConfig::default(),
            consistency: ConsistencyConfig::default(),
            rates: RatesSection::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub cg: f64,
    pub eig: f64,
    /// Largest dense matrix (entries) an operator may be materialized into.
    pub dense_budget: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            cg: 1e-8,
            eig: 1e-10,
            dense_budget: hohl::laplacian::DEFAULT_DENSE_BUDGET,
        }
    }
}

/// `eps_k = c_k (ln n / n)^(1/(d+4))` with coefficient `lambda_k` and power `p_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LadderConfig {
    pub constants: Vec<f64>,
    pub coeffs: Vec<f64>,
    pub powers: Vec<u32>,
    /// `indicator` or `smooth`.
    pub kernel: String,
}

impl Default for LadderConfig {
    fn default() -> Self {
        LadderConfig {
            constants: vec![0.5, 0.4],
            coeffs: vec![1.0, 1.0],
            powers: vec![1, 2],
            kernel: "indicator".into(),
        }
    }
}

impl LadderConfig {
    pub fn resolve(&self) -> Result<EpsilonLadder> {
        let kernel = match self.kernel.as_str() {
            "indicator" => KernelProfile::Indicator,
            "smooth" => KernelProfile::Smooth,
            k => bail!("unknown kernel '{k}' (expected indicator or smooth)"),
        };
        let ladder = EpsilonLadder {
            constants: self.constants.clone(),
            coeffs: self.coeffs.clone(),
            powers: self.powers.clone(),
            kernel,
        };
        ladder.validate()?;
        ensure!(
            self.coeffs.iter().all(|&c| c > 0.0),
            "ladder coefficients must be positive"
        );
        ensure!(
            self.powers.windows(2).all(|w| w[0] <= w[1]) && self.powers[0] >= 1,
            "ladder powers must be positive and nondecreasing"
        );
        Ok(ladder)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub dataset: String,
    pub methods: Vec<String>,
    pub label_rates: Vec<f64>,
    pub trials: usize,
    /// `stratified` or `uniform`.
    pub sampling: String,
    /// Timed repetitions per trial; the median is reported.
    pub repetitions: usize,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            dataset: "zoo".into(),
            methods: [
                "hohl:1:rc",
                "hohl:2:rc",
                "hohl:2:qc",
                "hohl:3:rc",
                "hohl:3:qc",
                "hohl:4:rc",
                "hohl:4:qc",
                "clique",
            ]
            .map(String::from)
            .to_vec(),
            label_rates: vec![0.05, 0.1, 0.2, 0.3, 0.5, 0.8],
            trials: 100,
            sampling: "stratified".into(),
            repetitions: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ActiveConfig {
    pub dataset: String,
    pub trials: usize,
    pub budget: usize,
    /// Neighbour count of the Laplace-prior arm.
    pub laplace_k: usize,
    /// HOHL-prior arm: neighbour counts, coefficients and powers per scale.
    pub ks: Vec<usize>,
    pub lambdas: Vec<f64>,
    pub powers: Vec<u32>,
    pub acquisition: String,
}

impl Default for ActiveConfig {
    fn default() -> Self {
        ActiveConfig {
            dataset: "mnist5k".into(),
            trials: 20,
            budget: 100,
            laplace_k: 50,
            ks: vec![50, 30],
            lambdas: vec![1.0, 4.0],
            powers: vec![1, 2],
            acquisition: "margin".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConsistencyConfig {
    pub dim: usize,
    pub sizes: Vec<usize>,
    pub seeds: usize,
    /// Number of smallest eigenvalues compared with the torus spectrum.
    pub eigenvalues: usize,
    pub trunc_dim: usize,
    pub trunc_n: usize,
    pub trunc_tau: f64,
    pub trunc_noise: f64,
    pub trunc_levels: Vec<usize>,
    /// Tolerance of the untruncated reference solve.
    pub trunc_solve_tol: f64,
    pub target: String,
}

impl Default for ConsistencyConfig {
    fn default() -> Self {
        ConsistencyConfig {
            dim: 1,
            sizes: vec![250, 500, 1000, 2000],
            seeds: 10,
            eigenvalues: 4,
            trunc_dim: 2,
            trunc_n: 500,
            trunc_tau: 1e-2,
            trunc_noise: 0.1,
            trunc_levels: vec![5, 10, 25, 50, 100, 500],
            trunc_solve_tol: 1e-12,
            target: "sincos".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RatesSection {
    pub dim: usize,
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub noise: f64,
    pub target: String,
    /// `tau = tau0 * n^tau_exponent`.
    pub tau0: f64,
    pub tau_exponent: f64,
}

impl Default for RatesSection {
    fn default() -> Self {
        RatesSection {
            dim: 2,
            sizes: vec![500, 1000, 2000],
            trials: 10,
            noise: 0.1,
            target: "sincos".into(),
            tau0: 1e-4,
            tau_exponent: -0.25,
        }
    }
}

impl Config {
    pub fn from_file(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Config::parse(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Config> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn check_common(&self) -> Result<()> {
        let t = &self.tolerances;
        ensure!(t.cg > 0.0 && t.cg < 1.0, "cg tolerance must lie in (0, 1)");
        ensure!(t.eig > 0.0 && t.eig < 1.0, "eigen tolerance must lie in (0, 1)");
        Ok(())
    }
}

pub fn parse_target(s: &str) -> Result<TargetFunction> {
    match s.split_once(':') {
        None if s == "sincos" => Ok(TargetFunction::SinCos),
        Some(("constant", c)) => Ok(TargetFunction::Constant(c.parse().context("constant target value")?)),
        _ => bail!("unknown target '{s}' (expected sincos or constant:<value>)"),
    }
}

pub fn parse_sampling(s: &str) -> Result<LabelSampling> {
    Ok(s.parse()?)
}

/// Learning method of a benchmark cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Method {
    /// Skeletons split into `q` size segments, `lambda_l = l` (RC) or `l^2` (QC), `p_l = l`.
    Hohl { q: usize, rule: CoefficientRule },
    /// Laplacian of the clique expansion.
    Clique,
    LaplaceKnn { k: usize },
    HohlKnn { ks: Vec<usize>, lambdas: Vec<f64>, powers: Vec<u32> },
}

impl Method {
    pub fn needs_points(&self) -> bool {
        matches!(self, Method::LaplaceKnn { .. } | Method::HohlKnn { .. })
    }

    pub fn max_k(&self) -> usize {
        match self {
            Method::LaplaceKnn { k } => *k,
            Method::HohlKnn { ks, .. } => ks.iter().copied().max().unwrap_or(0),
            _ => 0,
        }
    }
}

fn list<T: FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(['/', ','])
        .map(|p| p.trim().parse::<T>().map_err(|_| anyhow!("bad list entry '{p}'")))
        .collect()
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("/")
}

impl FromStr for Method {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Method> {
        let parts: Vec<&str> = s.split(':').collect();
        let m = match parts.as_slice() {
            ["clique"] => Method::Clique,
            ["hohl", q, rule] => Method::Hohl {
                q: q.parse().with_context(|| format!("method '{s}': q"))?,
                rule: rule.parse()?,
            },
            ["laplace-knn", k] => Method::LaplaceKnn {
                k: k.parse().with_context(|| format!("method '{s}': k"))?,
            },
            ["hohl-knn", ks, lambdas, powers] => Method::HohlKnn {
                ks: list(ks)?,
                lambdas: list(lambdas)?,
                powers: list(powers)?,
            },
            _ => bail!(
                "unknown method '{s}' (expected hohl:<q>:<rc|qc>, clique, laplace-knn:<k> or hohl-knn:<ks>:<lambdas>:<powers>)"
            ),
        };
        m.validate().with_context(|| format!("method '{s}'"))?;
        Ok(m)
    }
}

impl Method {
    pub fn validate(&self) -> Result<()> {
        match self {
            Method::Hohl { q, .. } => ensure!((1..=4).contains(q), "q must lie in 1..=4, got {q}"),
            Method::Clique => {}
            Method::LaplaceKnn { k } => ensure!(*k >= 1, "k must be positive"),
            Method::HohlKnn { ks, lambdas, powers } => {
                ensure!(
                    !ks.is_empty() && ks.len() == lambdas.len() && ks.len() == powers.len(),
                    "neighbour counts, coefficients and powers need equal lengths"
                );
                ensure!(ks.iter().all(|&k| k >= 1), "neighbour counts must be positive");
                ensure!(lambdas.iter().all(|&l| l > 0.0), "coefficients must be positive");
                ensure!(
                    powers[0] >= 1 && powers.windows(2).all(|w| w[0] <= w[1]),
                    "powers must be positive and nondecreasing"
                );
            }
        }
        Ok(())
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Hohl { q, rule } => write!(f, "hohl:{q}:{}", rule.to_string().to_lowercase()),
            Method::Clique => f.write_str("clique"),
            Method::LaplaceKnn { k } => write!(f, "laplace-knn:{k}"),
            Method::HohlKnn { ks, lambdas, powers } => {
                write!(f, "hohl-knn:{}:{}:{}", join(ks), join(lambdas), join(powers))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_strings_roundtrip() {
        for s in ["hohl:4:qc", "hohl:1:rc", "clique", "laplace-knn:50", "hohl-knn:50/30:1/4:1/2"] {
            assert_eq!(s.parse::<Method>().unwrap().to_string(), s);
        }
        assert_eq!(
            "hohl-knn:50,30:1,4:1,2".parse::<Method>().unwrap().to_string(),
            "hohl-knn:50/30:1/4:1/2"
        );
        assert_eq!(
            "hohl:2:QC".parse::<Method>().unwrap(),
            Method::Hohl { q: 2, rule: CoefficientRule::QC }
        );
        for bad in ["hohl:5:qc", "hohl:0:rc", "hohl:2:xx", "knn", "hohl-knn:50/30:1:1/2", "hohl-knn:50/30:1/1:2/1"] {
            assert!(bad.parse::<Method>().is_err(), "{bad}");
        }
    }

    #[test]
    fn config_roundtrips_and_rejects_unknown_keys() {
        let c = Config::default();
        assert_eq!(Config::parse(&c.to_toml()).unwrap(), c);
        let partial = Config::parse("seed = 7\n[benchmark]\ntrials = 3\n").unwrap();
        assert_eq!((partial.seed, partial.benchmark.trials), (7, 3));
        assert_eq!(partial.benchmark.dataset, "zoo");
        assert!(Config::parse("[benchmark]\ntrails = 3\n").is_err());
    }

    #[test]
    fn targets_and_ladder() {
        assert_eq!(parse_target("sincos").unwrap(), TargetFunction::SinCos);
        assert_eq!(parse_target("constant:2.5").unwrap(), TargetFunction::Constant(2.5));
        assert!(parse_target("cos").is_err());
        assert!(LadderConfig::default().resolve().is_ok());
        let mut l = LadderConfig::default();
        l.constants = vec![0.4, 0.5];
        assert!(l.resolve().is_err());
    }
}
