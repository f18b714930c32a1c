use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LabelSampling {
    /// `floor(rate * |class|)` vertices drawn from every class.
    Stratified,
    /// `round(rate * n)` vertices drawn from all vertices.
    Uniform,
}

impl std::fmt::Display for LabelSampling {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LabelSampling::Stratified => "stratified",
            LabelSampling::Uniform => "uniform",
        })
    }
}

impl std::str::FromStr for LabelSampling {
    type Err = crate::HohlError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stratified" => Ok(LabelSampling::Stratified),
            "uniform" => Ok(LabelSampling::Uniform),
            _ => Err(invalid(format!("unknown label sampling '{s}'"))),
        }
    }
}

/// Sorted vertices to label. At least one vertex is always returned.
pub fn sample_labels<R: Rng + ?Sized>(
    classes: &[usize],
    n_classes: usize,
    rate: f64,
    sampling: LabelSampling,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(invalid(format!("label rate must lie in (0, 1], got {rate}")));
    }
    let n = classes.len();
    if n == 0 {
        return Err(invalid("no vertices to sample"));
    }
    let mut picked = match sampling {
        LabelSampling::Uniform => {
            let m = ((rate * n as f64).round() as usize).clamp(1, n);
            let mut all: Vec<usize> = (0..n).collect();
            all.shuffle(rng);
            all.truncate(m);
            all
        }
        LabelSampling::Stratified => {
            let mut picked = Vec::new();
            for c in 0..n_classes {
                let mut members: Vec<usize> = (0..n).filter(|&v| classes[v] == c).collect();
                let m = (rate * members.len() as f64 + 1e-9).floor() as usize;
                members.shuffle(rng);
                picked.extend_from_slice(&members[..m.min(members.len())]);
            }
            if picked.is_empty() {
                picked.push(rng.random_range(0..n));
            }
            picked
        }
    };
    picked.sort_unstable();
    Ok(picked)
}

/// One uniformly chosen vertex per nonempty class.
pub fn one_per_class<R: Rng + ?Sized>(classes: &[usize], n_classes: usize, rng: &mut R) -> Vec<usize> {
    let mut out = Vec::new();
    for c in 0..n_classes {
        let members: Vec<usize> = (0..classes.len()).filter(|&v| classes[v] == c).collect();
        if let Some(&v) = members.choose(rng) {
            out.push(v);
        }
    }
    out.sort_unstable();
    out
}
