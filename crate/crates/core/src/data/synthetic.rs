use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{invalid, Result};
use crate::graph::{Metric, PointCloud};

#[derive(Clone, Debug, PartialEq)]
pub enum SyntheticSpec {
    /// `n` i.i.d. uniform points on the flat torus `[0,1)^d`.
    TorusUniform { n: usize, d: usize },
    /// Two interleaved half circles in the plane with Gaussian noise.
    TwoMoons { n: usize, noise: f64 },
}

#[derive(Clone, Debug)]
pub struct Synthetic {
    pub cloud: PointCloud,
    pub labels: Option<Vec<usize>>,
}

pub fn sample_synthetic<R: Rng + ?Sized>(spec: &SyntheticSpec, rng: &mut R) -> Result<Synthetic> {
    match *spec {
        SyntheticSpec::TorusUniform { n, d } => {
            if d == 0 {
                return Err(invalid("dimension must be at least 1"));
            }
            let data: Vec<f64> = (0..n * d).map(|_| rng.random::<f64>()).collect();
            Ok(Synthetic {
                cloud: PointCloud::new(d, data, Metric::Torus)?,
                labels: None,
            })
        }
        SyntheticSpec::TwoMoons { n, noise } => {
            if !(noise >= 0.0) {
                return Err(invalid("noise must be nonnegative"));
            }
            let jitter = Normal::new(0.0, noise.max(f64::MIN_POSITIVE)).expect("valid normal");
            let mut data = Vec::with_capacity(2 * n);
            let mut labels = Vec::with_capacity(n);
            let upper = n.div_ceil(2);
            for i in 0..n {
                let t = std::f64::consts::PI * rng.random::<f64>();
                let (x, y, c) = if i < upper {
                    (t.cos(), t.sin(), 0)
                } else {
                    (1.0 - t.cos(), 0.5 - t.sin(), 1)
                };
                let (ex, ey) = if noise > 0.0 { (jitter.sample(rng), jitter.sample(rng)) } else { (0.0, 0.0) };
                data.push(x + ex);
                data.push(y + ey);
                labels.push(c);
            }
            Ok(Synthetic {
                cloud: PointCloud::new(2, data, Metric::Euclidean)?,
                labels: Some(labels),
            })
        }
    }
}
