//! Kernel-weighted radius-neighborhood graphs and their Laplacian `L = D - W`.

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::points::{sq_dist, PointCloud};
use crate::spatial::KdTree;

/// Below this many points the graph is built by the exhaustive pairwise scan.
pub const EXHAUSTIVE_CUTOFF: usize = 256;

/// Symmetric sparse weight matrix in compressed-row layout, with degrees.
///
/// Built once, never mutated. `W_ii = 0`; rows list columns in increasing order.
#[derive(Debug, Clone)]
pub struct NeighborhoodGraph {
    n: usize,
    radius: f64,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    weights: Vec<f64>,
    degrees: Vec<f64>,
    kernel: Arc<KernelSpec>,
}

impl NeighborhoodGraph {
    /// Assembles a graph from upper-triangular edges `(i, j, w)` with `i < j`.
    /// Each edge is mirrored, so `W_ij == W_ji` bit for bit.
    pub fn from_upper_edges(
        n: usize,
        radius: f64,
        kernel: Arc<KernelSpec>,
        edges: &[(usize, usize, f64)],
    ) -> Result<Self> {
        let mut counts = vec![0usize; n];
        for &(i, j, w) in edges {
            if i >= j || j >= n {
                return Err(Error::invalid(format!("bad edge ({i}, {j}) for n = {n}")));
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::invalid(format!("edge ({i}, {j}) has weight {w}")));
            }
            counts[i] += 1;
            counts[j] += 1;
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        for c in &counts {
            row_ptr.push(row_ptr.last().unwrap() + c);
        }
        let nnz = *row_ptr.last().unwrap();
        let mut cols = vec![0usize; nnz];
        let mut weights = vec![0.0; nnz];
        let mut fill = row_ptr[..n].to_vec();
        for &(i, j, w) in edges {
            cols[fill[i]] = j;
            weights[fill[i]] = w;
            fill[i] += 1;
            cols[fill[j]] = i;
            weights[fill[j]] = w;
            fill[j] += 1;
        }
        for i in 0..n {
            let range = row_ptr[i]..row_ptr[i + 1];
            let mut row: Vec<(usize, f64)> = cols[range.clone()]
                .iter()
                .copied()
                .zip(weights[range.clone()].iter().copied())
                .collect();
            row.sort_unstable_by_key(|&(c, _)| c);
            if row.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::invalid(format!("duplicate edge in row {i}")));
            }
            for (k, (c, w)) in range.zip(row) {
                cols[k] = c;
                weights[k] = w;
            }
        }
        let degrees = (0..n)
            .map(|i| weights[row_ptr[i]..row_ptr[i + 1]].iter().sum())
            .collect();
        Ok(Self {
            n,
            radius,
            row_ptr,
            cols,
            weights,
            degrees,
            kernel,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// Stored entries, i.e. twice the number of undirected edges.
    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    /// Columns and weights of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.cols[range.clone()], &self.weights[range])
    }

    /// `W_ij`, zero when absent.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let (cols, w) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |k| w[k])
    }

    /// Undirected edges `(i, j, W_ij)` with `i < j`, row-major order.
    pub fn upper_edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (cols, w) = self.row(i);
            cols.iter()
                .zip(w)
                .filter(move |(&j, _)| j > i)
                .map(move |(&j, &w)| (i, j, w))
        })
    }

    /// `f^T L f = 1/2 sum_ij W_ij (f_i - f_j)^2`, one term per edge.
    ///
    /// Terms are summed in ascending order, so relabeling the vertices
    /// (together with `f`) reproduces the value bit for bit.
    pub fn quadratic_form(&self, f: &[f64]) -> Result<f64> {
        Error::check_len(self.n, f.len())?;
        let mut terms: Vec<f64> = self
            .upper_edges()
            .map(|(i, j, w)| {
                let d = f[i] - f[j];
                w * d * d
            })
            .collect();
        terms.sort_unstable_by(f64::total_cmp);
        Ok(terms.iter().sum())
    }

    /// `(D - W) f` without forming `L`.
    pub fn apply_laplacian(&self, f: &[f64]) -> Result<Vec<f64>> {
        Error::check_len(self.n, f.len())?;
        let mut out = vec![0.0; self.n];
        self.laplacian_into(f, &mut out);
        Ok(out)
    }

    /// Unchecked matvec `out = L f`.
    pub(crate) fn laplacian_into(&self, f: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let (cols, w) = self.row(i);
            let neighbors: f64 = cols.iter().zip(w).map(|(&j, &w)| w * f[j]).sum();
            *o = self.degrees[i] * f[i] - neighbors;
        }
    }

    /// Dense row-major `L`, for spectra and test oracles.
    pub fn dense_laplacian(&self) -> Vec<f64> {
        let n = self.n;
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            l[i * n + i] = self.degrees[i];
            let (cols, w) = self.row(i);
            for (&j, &w) in cols.iter().zip(w) {
                l[i * n + j] -= w;
            }
        }
        l
    }

    pub fn max_degree(&self) -> f64 {
        self.degrees.iter().copied().fold(0.0, f64::max)
    }

    /// Debug export: `i,j,weight` with `i < j`.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "i,j,weight")?;
        for (i, j, w) in self.upper_edges() {
            writeln!(out, "{i},{j},{w}")?;
        }
        Ok(())
    }
}

/// Builds `G_{n,r}` with `W_ij = K(|X_i - X_j| / r)`.
///
/// Uses a kd-tree for `n >= 256`, the pairwise scan below that. Both paths
/// compute identical weights.
pub fn build_graph(
    points: &PointCloud,
    radius: f64,
    kernel: &KernelSpec,
) -> Result<NeighborhoodGraph> {
    check_build_args(points, radius, kernel)?;
    if points.len() < EXHAUSTIVE_CUTOFF {
        return build_graph_exhaustive(points, radius, kernel);
    }
    let tree = KdTree::build(points);
    let rows: Vec<Vec<(usize, usize, f64)>> = (0..points.len())
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::new();
            tree.for_each_within(points, points.point(i), radius, |j, _| {
                if j > i {
                    // recompute in (i, j) order so both build paths agree exactly
                    let d2 = sq_dist(points.point(i), points.point(j));
                    let w = kernel.weight_from_sq_dist(d2, radius);
                    if w > 0.0 {
                        row.push((i, j, w));
                    }
                }
            });
            row.sort_unstable_by_key(|e| e.1);
            row
        })
        .collect();
    let edges: Vec<_> = rows.into_iter().flatten().collect();
    NeighborhoodGraph::from_upper_edges(points.len(), radius, Arc::new(kernel.clone()), &edges)
}

/// `O(n^2)` pairwise construction.
pub fn build_graph_exhaustive(
    points: &PointCloud,
    radius: f64,
    kernel: &KernelSpec,
) -> Result<NeighborhoodGraph> {
    check_build_args(points, radius, kernel)?;
    let n = points.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let d2 = sq_dist(points.point(i), points.point(j));
            let w = kernel.weight_from_sq_dist(d2, radius);
            if w > 0.0 {
                edges.push((i, j, w));
            }
        }
    }
    NeighborhoodGraph::from_upper_edges(n, radius, Arc::new(kernel.clone()), &edges)
}

fn check_build_args(points: &PointCloud, radius: f64, kernel: &KernelSpec) -> Result<()> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::invalid(format!(
            "radius must be positive, got {radius}"
        )));
    }
    if kernel.dim() != points.dim() {
        return Err(Error::invalid(format!(
            "kernel is normalized for d = {} but points have d = {}",
            kernel.dim(),
            points.dim()
        )));
    }
    Ok(())
}

/// Structural summary of a graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphDiagnostics {
    pub max_degree: f64,
    pub connected: bool,
    pub components: usize,
    pub edge_count: usize,
    pub seminorm_samples: Vec<(String, f64)>,
}

impl GraphDiagnostics {
    /// Records `f^T L f` for a named test function.
    pub fn add_seminorm_sample(
        &mut self,
        g: &NeighborhoodGraph,
        id: &str,
        f: &[f64],
    ) -> Result<()> {
        let v = g.quadratic_form(f)?;
        self.seminorm_samples.push((id.to_string(), v));
        Ok(())
    }
}

pub fn graph_diagnostics(g: &NeighborhoodGraph) -> GraphDiagnostics {
    let mut uf = UnionFind::new(g.len());
    let mut edge_count = 0;
    for (i, j, w) in g.upper_edges() {
        if w > 0.0 {
            uf.union(i, j);
            edge_count += 1;
        }
    }
    let components = uf.components();
    GraphDiagnostics {
        max_degree: g.max_degree(),
        connected: components == 1,
        components,
        edge_count,
        seminorm_samples: Vec::new(),
    }
}

/// Maximum-degree envelope `2 p_max n r^d` for a design with density bounded
/// by `p_max`.
pub fn max_degree_envelope(n: usize, radius: f64, dim: usize, p_max: f64) -> f64 {
    2.0 * p_max * n as f64 * radius.powi(dim as i32)
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }

    fn components(&mut self) -> usize {
        (0..self.parent.len())
            .filter(|&i| self.find(i) == i)
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn collinear() -> NeighborhoodGraph {
        let pc = PointCloud::new(vec![0.0, 0.5, 2.0], 1).unwrap();
        build_graph(&pc, 1.0, &KernelSpec::uniform(1)).unwrap()
    }

    #[test]
    fn three_collinear_points() {
        let g = collinear();
        assert_eq!(g.weight(0, 1), 0.5);
        assert_eq!(g.weight(1, 0), 0.5);
        assert_eq!(g.weight(0, 2), 0.0);
        assert_eq!(g.weight(1, 2), 0.0);
        assert_eq!(g.weight(0, 0), 0.0);
        assert_eq!(g.degrees(), &[0.5, 0.5, 0.0]);
        let diag = graph_diagnostics(&g);
        assert_eq!(diag.max_degree, 0.5);
        assert!(!diag.connected);
        assert_eq!(diag.edge_count, 1);
        assert_eq!(diag.components, 2);
    }

    #[test]
    fn single_edge_forms() {
        let g = NeighborhoodGraph::from_upper_edges(
            2,
            1.0,
            Arc::new(KernelSpec::uniform(1)),
            &[(0, 1, 1.0)],
        )
        .unwrap();
        assert_eq!(g.quadratic_form(&[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(g.apply_laplacian(&[1.0, 0.0]).unwrap(), vec![1.0, -1.0]);
        assert_eq!(g.apply_laplacian(&[3.0, 3.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(g.quadratic_form(&[2.5, 2.5]).unwrap(), 0.0);
    }

    #[test]
    fn complete_graph_is_connected() {
        let pc = PointCloud::new(vec![0.0, 0.1, 0.3, 0.35, 0.9], 1).unwrap();
        let g = build_graph(&pc, 5.0, &KernelSpec::uniform(1)).unwrap();
        let diag = graph_diagnostics(&g);
        assert!(diag.connected);
        assert_eq!(diag.edge_count, 10);
    }

    #[test]
    fn errors() {
        let g = collinear();
        assert!(matches!(
            g.quadratic_form(&[1.0]),
            Err(Error::DimensionMismatch {
                expected: 3,
                found: 1
            })
        ));
        assert!(g.apply_laplacian(&[1.0; 4]).is_err());
        let pc = PointCloud::new(vec![0.0, 1.0], 1).unwrap();
        assert!(build_graph(&pc, 0.0, &KernelSpec::uniform(1)).is_err());
        assert!(build_graph(&pc, f64::NAN, &KernelSpec::uniform(1)).is_err());
        assert!(build_graph(&pc, 1.0, &KernelSpec::uniform(2)).is_err());
    }

    #[test]
    fn edge_list_export() {
        let mut buf = Vec::new();
        collinear().write_edge_list(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "i,j,weight\n0,1,0.5\n");
    }

    #[test]
    fn seminorm_sample_recorded() {
        let g = collinear();
        let mut diag = graph_diagnostics(&g);
        diag.add_seminorm_sample(&g, "x", &[0.0, 0.5, 2.0]).unwrap();
        assert_eq!(diag.seminorm_samples, vec![("x".to_string(), 0.125)]);
    }
}
