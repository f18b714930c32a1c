//! Point clouds and the geometric graphs built on them.

use crate::adjacency::WeightedAdjacency;
use crate::error::{invalid, HohlError, Result};
use crate::laplacian::GraphLaplacian;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Metric {
    Euclidean,
    /// Flat unit torus `[0,1)^d` with coordinatewise wrap-around.
    Torus,
    /// `1 - cos(angle)`.
    Cosine,
}

#[derive(Clone, Debug)]
pub struct PointCloud {
    n: usize,
    d: usize,
    data: Vec<f64>,
    metric: Metric,
}

impl PointCloud {
    /// `data` is row-major with `d` coordinates per point.
    pub fn new(d: usize, data: Vec<f64>, metric: Metric) -> Result<Self> {
        if d == 0 {
            return Err(invalid("point dimension must be at least 1"));
        }
        if data.len() % d != 0 {
            return Err(invalid(format!("{} coordinates is not a multiple of d = {d}", data.len())));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(invalid("point coordinates must be finite"));
        }
        if metric == Metric::Torus && data.iter().any(|v| !(0.0..1.0).contains(v)) {
            return Err(invalid("torus coordinates must lie in [0, 1)"));
        }
        Ok(Self {
            n: data.len() / d,
            d,
            data,
            metric,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        distance(self.metric, self.point(i), self.point(j))
    }

    /// Reads a headerless CSV of floats, one point per line.
    pub fn read_csv(path: &std::path::Path, metric: Metric) -> Result<Self> {
        use std::io::BufRead;
        let f = std::fs::File::open(path).map_err(|e| crate::error::io_err(path, e))?;
        let mut d = None;
        let mut data = Vec::new();
        for (ln, line) in std::io::BufReader::new(f).lines().enumerate() {
            let line = line.map_err(|e| crate::error::io_err(path, e))?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let row: std::result::Result<Vec<f64>, _> = t.split(',').map(|s| s.trim().parse::<f64>()).collect();
            let row = row.map_err(|e| crate::error::parse_err(path, ln + 1, e.to_string()))?;
            match d {
                None => d = Some(row.len()),
                Some(d) if d != row.len() => {
                    return Err(crate::error::parse_err(path, ln + 1, format!("expected {d} columns")))
                }
                _ => {}
            }
            data.extend(row);
        }
        Self::new(d.unwrap_or(1), data, metric)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        for l in 0..4 {
            acc[l] += a[4 * c + l] * b[4 * c + l];
        }
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for t in 4 * chunks..a.len() {
        s += a[t] * b[t];
    }
    s
}

pub fn distance(metric: Metric, a: &[f64], b: &[f64]) -> f64 {
    match metric {
        Metric::Euclidean => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt(),
        Metric::Torus => a
            .iter()
            .zip(b)
            .map(|(x, y)| {
                let t = (x - y).abs();
                let t = t.min(1.0 - t);
                t * t
            })
            .sum::<f64>()
            .sqrt(),
        Metric::Cosine => {
            let na = dot(a, a).sqrt();
            let nb = dot(b, b).sqrt();
            let sim = if na > 0.0 && nb > 0.0 { dot(a, b) / (na * nb) } else { 0.0 };
            (1.0 - sim).max(0.0)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KernelProfile {
    /// `1[t <= 1]`.
    Indicator,
    /// `exp(-1 / (1 - t^2))` on `[0, 1)`.
    Smooth,
}

impl KernelProfile {
    pub fn eval(self, t: f64) -> f64 {
        match self {
            KernelProfile::Indicator => f64::from(u8::from((0.0..=1.0).contains(&t))),
            KernelProfile::Smooth => {
                if (0.0..1.0).contains(&t) {
                    (-1.0 / (1.0 - t * t)).exp()
                } else {
                    0.0
                }
            }
        }
    }
}

/// `Gamma(d/2)` for integer `d >= 1`.
fn gamma_half(d: usize) -> f64 {
    let (mut g, mut x) = if d % 2 == 0 { (1.0, 1.0) } else { (std::f64::consts::PI.sqrt(), 0.5) };
    let target = d as f64 / 2.0;
    while x < target {
        g *= x;
        x += 1.0;
    }
    g
}

/// Surface area of the unit sphere in `R^d`.
pub fn sphere_area(d: usize) -> f64 {
    2.0 * std::f64::consts::PI.powf(d as f64 / 2.0) / gamma_half(d)
}

fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(&f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Second moment `sigma_eta = (1/d) * int_{R^d} eta(|h|) |h|^2 dh`.
pub fn sigma_eta(profile: KernelProfile, d: usize) -> Result<f64> {
    if d == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    let area = sphere_area(d);
    let df = d as f64;
    Ok(match profile {
        KernelProfile::Indicator => area / (df * (df + 2.0)),
        KernelProfile::Smooth => {
            let radial = integrate(|r| KernelProfile::Smooth.eval(r) * r.powi(d as i32 + 1), 0.0, 1.0, 1e-15);
            area * radial / df
        }
    })
}

const BRUTE_FORCE_LIMIT: usize = 20_000;

/// `W_ij = eta(d(x_i, x_j) / eps)`.
pub fn epsilon_graph(cloud: &PointCloud, eps: f64, profile: KernelProfile) -> Result<WeightedAdjacency> {
    let use_grid = cloud.n > BRUTE_FORCE_LIMIT;
    epsilon_graph_impl(cloud, eps, profile, use_grid)
}

pub(crate) fn epsilon_graph_impl(
    cloud: &PointCloud,
    eps: f64,
    profile: KernelProfile,
    use_grid: bool,
) -> Result<WeightedAdjacency> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(invalid(format!("eps must be positive, got {eps}")));
    }
    if cloud.n == 0 {
        return Err(invalid("empty point cloud"));
    }
    let mut edges = Vec::new();
    let mut push = |i: usize, j: usize| {
        let w = profile.eval(cloud.distance(i, j) / eps);
        if w > 0.0 {
            edges.push((i, j, w));
        }
    };
    match grid_for(cloud, eps).filter(|_| use_grid) {
        Some(grid) => grid.for_each_candidate_pair(&mut push),
        None => {
            for i in 0..cloud.n {
                for j in (i + 1)..cloud.n {
                    push(i, j);
                }
            }
        }
    }
    WeightedAdjacency::from_edges(cloud.n, edges)
}

/// Uniform cell grid with cells at least `eps` wide; candidate pairs are all
/// pairs in neighbouring cells.
struct CellGrid {
    dims: Vec<usize>,
    wrap: bool,
    cells: Vec<Vec<usize>>,
}

fn grid_for(cloud: &PointCloud, eps: f64) -> Option<CellGrid> {
    let d = cloud.d;
    if d > 3 || cloud.metric == Metric::Cosine {
        return None;
    }
    let wrap = cloud.metric == Metric::Torus;
    let (lo, hi): (Vec<f64>, Vec<f64>) = if wrap {
        (vec![0.0; d], vec![1.0; d])
    } else {
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for i in 0..cloud.n {
            for (c, &x) in cloud.point(i).iter().enumerate() {
                lo[c] = lo[c].min(x);
                hi[c] = hi[c].max(x);
            }
        }
        (lo, hi)
    };
    let dims: Vec<usize> = (0..d).map(|c| (((hi[c] - lo[c]) / eps).floor() as usize).max(1)).collect();
    if wrap && dims.iter().any(|&m| m < 3) {
        return None;
    }
    let total: usize = dims.iter().product();
    if total > 16 * cloud.n.max(1) {
        return None;
    }
    let mut cells = vec![Vec::new(); total];
    for i in 0..cloud.n {
        let mut idx = 0;
        for c in (0..d).rev() {
            let width = (hi[c] - lo[c]) / dims[c] as f64;
            let k = if width > 0.0 { ((cloud.point(i)[c] - lo[c]) / width) as usize } else { 0 };
            idx = idx * dims[c] + k.min(dims[c] - 1);
        }
        cells[idx].push(i);
    }
    Some(CellGrid { dims, wrap, cells })
}

impl CellGrid {
    fn for_each_candidate_pair<F: FnMut(usize, usize)>(&self, f: &mut F) {
        let d = self.dims.len();
        let offsets: Vec<Vec<i64>> = (0..3usize.pow(d as u32))
            .map(|mut t| {
                (0..d)
                    .map(|_| {
                        let o = (t % 3) as i64 - 1;
                        t /= 3;
                        o
                    })
                    .collect()
            })
            .collect();
        let mut coord = vec![0usize; d];
        for cell in 0..self.cells.len() {
            let mut r = cell;
            for c in 0..d {
                coord[c] = r % self.dims[c];
                r /= self.dims[c];
            }
            let mut neighbours = Vec::with_capacity(offsets.len());
            'off: for off in &offsets {
                let mut idx = 0;
                for c in (0..d).rev() {
                    let m = self.dims[c] as i64;
                    let mut k = coord[c] as i64 + off[c];
                    if self.wrap {
                        k = k.rem_euclid(m);
                    } else if k < 0 || k >= m {
                        continue 'off;
                    }
                    idx = idx * self.dims[c] + k as usize;
                }
                neighbours.push(idx);
            }
            neighbours.sort_unstable();
            neighbours.dedup();
            for &i in &self.cells[cell] {
                for &nb in &neighbours {
                    for &j in &self.cells[nb] {
                        if j > i {
                            f(i, j);
                        }
                    }
                }
            }
        }
    }
}

/// `k` nearest neighbours of every point (self excluded, ties by index).
#[derive(Clone, Debug)]
pub struct KnnIndex {
    k: usize,
    neighbours: Vec<Vec<(usize, f64)>>,
}

impl KnnIndex {
    pub fn build(cloud: &PointCloud, k: usize) -> Result<Self> {
        if k == 0 || k >= cloud.n {
            return Err(invalid(format!("k = {k} must satisfy 1 <= k < n = {}", cloud.n)));
        }
        let n = cloud.n;
        let norms: Vec<f64> = (0..n).map(|i| dot(cloud.point(i), cloud.point(i)).sqrt()).collect();
        let mut neighbours = Vec::with_capacity(n);
        let mut row: Vec<(usize, f64)> = Vec::with_capacity(n);
        for i in 0..n {
            row.clear();
            let xi = cloud.point(i);
            for j in 0..n {
                if j == i {
                    continue;
                }
                let dist = match cloud.metric {
                    Metric::Cosine => {
                        let sim = if norms[i] > 0.0 && norms[j] > 0.0 {
                            dot(xi, cloud.point(j)) / (norms[i] * norms[j])
                        } else {
                            0.0
                        };
                        (1.0 - sim).max(0.0)
                    }
                    m => distance(m, xi, cloud.point(j)),
                };
                row.push((j, dist));
            }
            let cmp = |a: &(usize, f64), b: &(usize, f64)| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0));
            row.select_nth_unstable_by(k - 1, cmp);
            let mut top = row[..k].to_vec();
            top.sort_by(cmp);
            neighbours.push(top);
        }
        Ok(Self { k, neighbours })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn neighbours(&self, i: usize) -> &[(usize, f64)] {
        &self.neighbours[i]
    }

    /// Self-tuning graph on the first `k` neighbours:
    /// `w_ij = exp(-4 d(x_i, x_j)^2 / d_k(x_i)^2)`, symmetrized by maximum.
    pub fn selftuning_graph(&self, k: usize) -> Result<WeightedAdjacency> {
        if k == 0 || k > self.k {
            return Err(invalid(format!("k = {k} must satisfy 1 <= k <= {}", self.k)));
        }
        let n = self.neighbours.len();
        let mut directed: Vec<(usize, usize, f64)> = Vec::with_capacity(n * k);
        for (i, nb) in self.neighbours.iter().enumerate() {
            let dk = nb[k - 1].1;
            if dk <= 0.0 {
                return Err(HohlError::InvalidInput(format!(
                    "all {k} nearest neighbours of point {i} coincide with it"
                )));
            }
            for &(j, dist) in &nb[..k] {
                let w = (-4.0 * dist * dist / (dk * dk)).exp();
                let (a, b) = if i < j { (i, j) } else { (j, i) };
                directed.push((a, b, w));
            }
        }
        directed.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
        let mut edges: Vec<(usize, usize, f64)> = Vec::with_capacity(directed.len());
        for (a, b, w) in directed {
            match edges.last_mut() {
                Some(e) if e.0 == a && e.1 == b => e.2 = e.2.max(w),
                _ => edges.push((a, b, w)),
            }
        }
        WeightedAdjacency::from_edges(n, edges)
    }
}

pub fn knn_selftuning_graph(cloud: &PointCloud, k: usize) -> Result<WeightedAdjacency> {
    KnnIndex::build(cloud, k)?.selftuning_graph(k)
}

/// `(2 / (sigma n eps^(d+2))) (D - W)`.
pub fn rescaled_laplacian(w: WeightedAdjacency, n: usize, eps: f64, d: usize, sigma: f64) -> Result<GraphLaplacian> {
    if !(eps > 0.0 && sigma > 0.0 && n > 0) {
        return Err(invalid("rescaling needs n, eps and sigma positive"));
    }
    let c = 2.0 / (sigma * n as f64 * eps.powi(d as i32 + 2));
    Ok(GraphLaplacian::from_adjacency(w).scaled(c))
}
