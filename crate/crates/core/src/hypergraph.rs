use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::adjacency::{Clique, WeightedAdjacency};
use crate::data::CategoricalTable;
use crate::error::{invalid, io_err, parse_err, HohlError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Hyperedge {
    pub vertices: Vec<usize>,
    pub weight: f64,
}

/// Vertex set `0..n` with weighted hyperedges of size at least 2.
#[derive(Clone, Debug, PartialEq)]
pub struct Hypergraph {
    n: usize,
    edges: Vec<Hyperedge>,
}

impl Hypergraph {
    /// Vertices inside each hyperedge are sorted and deduplicated; hyperedges
    /// that end up with fewer than two vertices are dropped.
    pub fn new(n: usize, edges: Vec<Hyperedge>) -> Result<Self> {
        let mut kept = Vec::with_capacity(edges.len());
        for mut e in edges {
            e.vertices.sort_unstable();
            e.vertices.dedup();
            if let Some(&v) = e.vertices.last() {
                if v >= n {
                    return Err(invalid(format!("hyperedge vertex {v} out of range for n = {n}")));
                }
            }
            if !e.weight.is_finite() || e.weight <= 0.0 {
                return Err(invalid(format!("hyperedge weight must be positive, got {}", e.weight)));
            }
            if e.vertices.len() >= 2 {
                kept.push(e);
            }
        }
        Ok(Self { n, edges: kept })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    /// Hyperedge count per size.
    pub fn size_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for e in &self.edges {
            *h.entry(e.vertices.len()).or_insert(0) += 1;
        }
        h
    }

    /// Reads one hyperedge per line: 0-based vertex indices, optional trailing
    /// `w=<float>`. `#` starts a comment; `# n=<count>` fixes the vertex count.
    pub fn read(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| io_err(path, e))?;
        Self::parse(std::io::BufReader::new(f), path)
    }

    pub fn parse<R: BufRead>(reader: R, origin: &Path) -> Result<Self> {
        let mut edges = Vec::new();
        let mut declared_n = None;
        let mut max_v: Option<usize> = None;
        for (ln, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| io_err(origin, e))?;
            let t = line.trim();
            if let Some(c) = t.strip_prefix('#') {
                if let Some(v) = c.trim().strip_prefix("n=") {
                    declared_n = Some(
                        v.trim()
                            .parse::<usize>()
                            .map_err(|_| parse_err(origin, ln + 1, "bad vertex count"))?,
                    );
                }
                continue;
            }
            if t.is_empty() {
                continue;
            }
            let mut weight = 1.0;
            let mut vertices = Vec::new();
            for tok in t.split_whitespace() {
                if let Some(w) = tok.strip_prefix("w=") {
                    weight = w
                        .parse::<f64>()
                        .map_err(|_| parse_err(origin, ln + 1, format!("bad weight '{w}'")))?;
                } else {
                    let v = tok
                        .parse::<usize>()
                        .map_err(|_| parse_err(origin, ln + 1, format!("bad vertex index '{tok}'")))?;
                    max_v = Some(max_v.map_or(v, |m| m.max(v)));
                    vertices.push(v);
                }
            }
            edges.push(Hyperedge { vertices, weight });
        }
        let n = match (declared_n, max_v) {
            (Some(n), _) => n,
            (None, Some(m)) => m + 1,
            (None, None) => 0,
        };
        Self::new(n, edges)
    }

    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# n={}", self.n)?;
        for e in &self.edges {
            let vs: Vec<String> = e.vertices.iter().map(|v| v.to_string()).collect();
            if e.weight == 1.0 {
                writeln!(out, "{}", vs.join(" "))?;
            } else {
                writeln!(out, "{} w={}", vs.join(" "), e.weight)?;
            }
        }
        Ok(())
    }
}

/// Skeleton graph per hyperedge size: `W_ij = sum of w(e)` over hyperedges of
/// that size containing both `i` and `j`.
pub fn skeleton_decompose(h: &Hypergraph) -> BTreeMap<usize, WeightedAdjacency> {
    let mut by_size: BTreeMap<usize, Vec<Clique>> = BTreeMap::new();
    for e in &h.edges {
        by_size.entry(e.vertices.len()).or_default().push(Clique {
            vertices: e.vertices.clone(),
            weight: e.weight,
        });
    }
    by_size
        .into_iter()
        .map(|(s, cl)| (s, WeightedAdjacency::from_cliques(h.n, cl).expect("validated hyperedges")))
        .collect()
}

/// Coefficient for segment `l` (1-based): `RC` gives `l`, `QC` gives `l^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoefficientRule {
    RC,
    QC,
}

impl CoefficientRule {
    pub fn coeff(self, l: usize) -> f64 {
        match self {
            CoefficientRule::RC => l as f64,
            CoefficientRule::QC => (l * l) as f64,
        }
    }
}

impl std::fmt::Display for CoefficientRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CoefficientRule::RC => "RC",
            CoefficientRule::QC => "QC",
        })
    }
}

impl std::str::FromStr for CoefficientRule {
    type Err = HohlError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "RC" => Ok(CoefficientRule::RC),
            "QC" => Ok(CoefficientRule::QC),
            _ => Err(invalid(format!("unknown coefficient rule '{s}'"))),
        }
    }
}

/// Summed skeletons of one contiguous run of hyperedge sizes.
#[derive(Clone, Debug)]
pub struct SkeletonGroup {
    /// Sizes in the segment, descending.
    pub sizes: Vec<usize>,
    pub adjacency: WeightedAdjacency,
    pub power: u32,
    pub coeff: f64,
}

/// Splits the distinct sizes, sorted descending, into `q` contiguous segments
/// (the first `m mod q` segments get one extra size). Segment `l` (1-based)
/// gets power `l` and coefficient `rule.coeff(l)`, so the smallest hyperedges
/// carry the highest power.
pub fn group_segments(
    skeletons: &BTreeMap<usize, WeightedAdjacency>,
    q: usize,
    rule: CoefficientRule,
) -> Result<Vec<SkeletonGroup>> {
    let m = skeletons.len();
    if q == 0 {
        return Err(invalid("q must be at least 1"));
    }
    if q > m {
        return Err(invalid(format!("q = {q} exceeds the {m} distinct hyperedge sizes")));
    }
    let sizes: Vec<usize> = skeletons.keys().rev().copied().collect();
    let (base, extra) = (m / q, m % q);
    let mut out = Vec::with_capacity(q);
    let mut start = 0;
    for l in 1..=q {
        let len = base + usize::from(l <= extra);
        let seg = sizes[start..start + len].to_vec();
        start += len;
        let parts: Vec<&WeightedAdjacency> = seg.iter().map(|s| &skeletons[s]).collect();
        out.push(SkeletonGroup {
            sizes: seg,
            adjacency: WeightedAdjacency::sum(&parts)?,
            power: l as u32,
            coeff: rule.coeff(l),
        });
    }
    Ok(out)
}

/// One unit-weight hyperedge per (attribute, value) pair shared by at least
/// two rows. Missing entries do not belong to any group.
pub fn categorical_hypergraph(table: &CategoricalTable) -> Hypergraph {
    let mut edges = Vec::new();
    for col in table.columns() {
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); col.levels().len()];
        for (row, code) in col.codes().enumerate() {
            if let Some(c) = code {
                members[c as usize].push(row);
            }
        }
        for m in members {
            if m.len() >= 2 {
                edges.push(Hyperedge { vertices: m, weight: 1.0 });
            }
        }
    }
    Hypergraph::new(table.n_rows(), edges).expect("rows are in range")
}

/// Sum of all skeletons.
pub fn clique_expand(h: &Hypergraph) -> WeightedAdjacency {
    let cl = h
        .edges
        .iter()
        .map(|e| Clique {
            vertices: e.vertices.clone(),
            weight: e.weight,
        })
        .collect();
    WeightedAdjacency::from_cliques(h.n, cl).expect("validated hyperedges")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn he(v: &[usize]) -> Hyperedge {
        Hyperedge { vertices: v.to_vec(), weight: 1.0 }
    }

    #[test]
    fn skeleton_of_triangle_and_pair() {
        let h = Hypergraph::new(3, vec![he(&[0, 1, 2]), he(&[0, 1])]).unwrap();
        let s = skeleton_decompose(&h);
        assert_eq!(s.keys().copied().collect::<Vec<_>>(), vec![2, 3]);
        let w2 = &s[&2];
        assert_eq!(w2.get(0, 1), 1.0);
        assert_eq!(w2.get(0, 2), 0.0);
        let w3 = &s[&3];
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            assert_eq!(w3.get(i, j), 1.0);
        }
        let c = clique_expand(&h);
        assert_eq!(c.get(0, 1), 2.0);
        assert_eq!(c.get(1, 2), 1.0);
    }

    #[test]
    fn repeated_hyperedges_accumulate() {
        let h = Hypergraph::new(3, vec![he(&[0, 1, 2]), he(&[2, 1, 0])]).unwrap();
        assert_eq!(skeleton_decompose(&h)[&3].get(0, 2), 2.0);
    }

    #[test]
    fn singletons_dropped_and_duplicates_merged() {
        let h = Hypergraph::new(4, vec![he(&[3]), he(&[1, 1, 2])]).unwrap();
        assert_eq!(h.edges().len(), 1);
        assert_eq!(h.edges()[0].vertices, vec![1, 2]);
        assert!(Hypergraph::new(2, vec![he(&[0, 2])]).is_err());
    }

    fn sized_hypergraph(sizes: &[usize]) -> Hypergraph {
        let n = *sizes.iter().max().unwrap();
        let edges = sizes.iter().map(|&s| he(&(0..s).collect::<Vec<_>>())).collect();
        Hypergraph::new(n, edges).unwrap()
    }

    #[test]
    fn segments_split_descending_sizes() {
        let h = sized_hypergraph(&[2, 3, 4, 5, 6]);
        let g = group_segments(&skeleton_decompose(&h), 2, CoefficientRule::QC).unwrap();
        assert_eq!(g[0].sizes, vec![6, 5, 4]);
        assert_eq!(g[1].sizes, vec![3, 2]);
        assert_eq!((g[0].power, g[0].coeff), (1, 1.0));
        assert_eq!((g[1].power, g[1].coeff), (2, 4.0));
        // pair (0,1) lies in hyperedges of sizes 4, 5, 6
        assert_eq!(g[0].adjacency.get(0, 1), 3.0);
        assert_eq!(g[1].adjacency.get(0, 1), 2.0);
    }

    #[test]
    fn segments_rc_and_bounds() {
        let h = sized_hypergraph(&[2, 3, 4]);
        let sk = skeleton_decompose(&h);
        let g = group_segments(&sk, 3, CoefficientRule::RC).unwrap();
        let coeffs: Vec<f64> = g.iter().map(|s| s.coeff).collect();
        assert_eq!(coeffs, vec![1.0, 2.0, 3.0]);
        assert_eq!(g[2].sizes, vec![2]);
        assert!(group_segments(&sk, 4, CoefficientRule::RC).is_err());
        assert!(group_segments(&sk, 0, CoefficientRule::RC).is_err());
    }

    #[test]
    fn file_roundtrip() {
        let h = Hypergraph::new(
            6,
            vec![he(&[0, 4, 2]), Hyperedge { vertices: vec![1, 3], weight: 0.5 }],
        )
        .unwrap();
        let mut buf = Vec::new();
        h.write(&mut buf).unwrap();
        let back = Hypergraph::parse(&buf[..], Path::new("mem")).unwrap();
        assert_eq!(back, h);
        let text = "# comment\n0 1 2 w=2.5\n\n3 4\n";
        let p = Hypergraph::parse(text.as_bytes(), Path::new("mem")).unwrap();
        assert_eq!(p.n(), 5);
        assert_eq!(p.edges()[0].weight, 2.5);
        assert!(Hypergraph::parse("0 x\n".as_bytes(), Path::new("mem")).is_err());
    }
}
