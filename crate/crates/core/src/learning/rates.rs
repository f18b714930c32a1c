use rand_distr::{Distribution, Normal};

use super::cg::supervised_solve;
use crate::consistency::EpsilonLadder;
use crate::data::{sample_synthetic, SyntheticSpec};
use crate::error::{invalid, Result};
use crate::seed::rng_for;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TargetFunction {
    /// `sin(2 pi x_1) prod_{k>=2} cos(2 pi x_k)`.
    SinCos,
    Constant(f64),
}

impl TargetFunction {
    pub fn eval(self, x: &[f64]) -> f64 {
        match self {
            TargetFunction::SinCos => {
                let tp = 2.0 * std::f64::consts::PI;
                (tp * x[0]).sin() * x[1..].iter().map(|v| (tp * v).cos()).product::<f64>()
            }
            TargetFunction::Constant(c) => c,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RatesConfig {
    pub dim: usize,
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub noise_std: f64,
    pub target: TargetFunction,
    pub ladder: EpsilonLadder,
    /// `tau = tau0 * n^tau_exponent`.
    pub tau0: f64,
    pub tau_exponent: f64,
    pub cg_tol: f64,
    pub seed: u64,
}

impl RatesConfig {
    pub fn tau(&self, n: usize) -> f64 {
        self.tau0 * (n as f64).powf(self.tau_exponent)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatesRecord {
    pub n: usize,
    pub trial: usize,
    pub tau: f64,
    pub epsilons: Vec<f64>,
    /// `|u - g|` in `L2(mu_n)`.
    pub error: f64,
}

/// Fully supervised regression on uniform torus samples with noisy labels
/// `y_i = g(x_i) + xi_i`, for every sample size and trial.
pub fn rates_experiment(cfg: &RatesConfig) -> Result<Vec<RatesRecord>> {
    cfg.ladder.validate()?;
    if cfg.trials == 0 || cfg.sizes.is_empty() {
        return Err(invalid("rates experiment needs sizes and trials"));
    }
    if !(cfg.noise_std >= 0.0) {
        return Err(invalid("noise standard deviation must be nonnegative"));
    }
    let noise = Normal::new(0.0, cfg.noise_std.max(f64::MIN_POSITIVE)).expect("valid normal");
    let mut out = Vec::new();
    for &n in &cfg.sizes {
        for trial in 0..cfg.trials {
            let mut rng = rng_for(cfg.seed, &format!("rates/{n}/{trial}"));
            let cloud = sample_synthetic(&SyntheticSpec::TorusUniform { n, d: cfg.dim }, &mut rng)?.cloud;
            let g: Vec<f64> = (0..n).map(|i| cfg.target.eval(cloud.point(i))).collect();
            let y: Vec<f64> = g
                .iter()
                .map(|v| v + if cfg.noise_std > 0.0 { noise.sample(&mut rng) } else { 0.0 })
                .collect();
            let op = cfg.ladder.operator(&cloud)?;
            let tau = cfg.tau(n);
            let u = supervised_solve(&op, &y, tau, cfg.cg_tol)?;
            let error = (u.iter().zip(&g).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / n as f64).sqrt();
            out.push(RatesRecord {
                n,
                trial,
                tau,
                epsilons: cfg.ladder.epsilons(n, cfg.dim),
                error,
            });
        }
    }
    Ok(out)
}

pub fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    }
}
