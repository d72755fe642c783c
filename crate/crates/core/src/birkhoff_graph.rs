//! The Birkhoff graph of a function-space model.
//!
//! Vertices are the sample points; an unordered pair `{x, y}` is an edge
//! when point evaluations fail Birkhoff orthogonality in *either* direction
//! in the dual space. Indeterminate verdicts (margin too thin to call)
//! contribute an edge marked "soft": an extra edge can only merge
//! components, and downstream eigenvalue propagation will loudly reject a
//! spurious merge rather than silently report rigidity.

use serde::{Deserialize, Serialize};

use crate::birkhoff::{birkhoff_verdict, OrthoVerdict};
use crate::error::{Error, Result};
use crate::function_space::FunctionSpaceModel;

/// Directional line-search outcomes for one unordered vertex pair.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PairMargin {
    pub x: usize,
    pub y: usize,
    /// `min_t ||x_F + t y_F|| / ||x_F||` in the dual view.
    pub ratio_xy: f64,
    /// `min_t ||y_F + t x_F|| / ||y_F||` in the dual view.
    pub ratio_yx: f64,
    pub edge: bool,
    /// The edge exists only through indeterminate verdicts.
    pub soft: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BirkhoffGraph {
    /// Point ids, in model order.
    pub vertices: Vec<String>,
    /// Unordered edges `(i, j)`, `i < j`, sorted.
    pub edges: Vec<(usize, usize)>,
    /// Component label per vertex: the smallest vertex index it can reach.
    pub components: Vec<usize>,
    /// One record per unordered pair.
    pub margins: Vec<PairMargin>,
}

impl BirkhoffGraph {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_components(&self) -> usize {
        let mut labels: Vec<usize> = self.components.clone();
        labels.sort_unstable();
        labels.dedup();
        labels.len()
    }

    pub fn is_connected(&self) -> bool {
        self.num_components() <= 1
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        if i == j {
            return false;
        }
        let key = (i.min(j), i.max(j));
        self.edges.binary_search(&key).is_ok()
    }

    /// Components as sorted vertex lists, ordered by smallest member.
    pub fn component_sets(&self) -> Vec<Vec<usize>> {
        let mut labels: Vec<usize> = self.components.clone();
        labels.sort_unstable();
        labels.dedup();
        labels
            .into_iter()
            .map(|l| {
                (0..self.components.len())
                    .filter(|v| self.components[*v] == l)
                    .collect()
            })
            .collect()
    }

    /// Margin record for an unordered pair.
    pub fn margin(&self, i: usize, j: usize) -> Option<&PairMargin> {
        let (a, b) = (i.min(j), i.max(j));
        self.margins.iter().find(|m| m.x == a && m.y == b)
    }
}

/// Union-find with path halving and union by size.
struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }
}

/// Component labels (smallest reachable vertex index) for an edge list on
/// `n` vertices.
pub fn connected_components(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut uf = UnionFind::new(n);
    for (a, b) in edges {
        uf.union(*a, *b);
    }
    // normalize labels to the smallest member of each class
    let mut smallest = vec![usize::MAX; n];
    for v in 0..n {
        let r = uf.find(v);
        smallest[r] = smallest[r].min(v);
    }
    (0..n).map(|v| smallest[uf.find(v)]).collect()
}

/// Builds the Birkhoff graph of a model at the given tolerance.
///
/// Every point evaluation must be nonzero (1-independence); models with
/// vanishing evaluations are refused — the caller decides how to restrict
/// the sample, the graph never drops points silently.
pub fn build_graph(model: &FunctionSpaceModel, tol: f64) -> Result<BirkhoffGraph> {
    let (ok, bad) = model.is_1_independent();
    if !ok {
        return Err(Error::NotOneIndependent(bad[0]));
    }
    let dual = model.dual_space_view(tol)?;
    let m = model.num_points();
    let rows: Vec<_> = (0..m).map(|i| model.point_evaluation_at(i).coeffs).collect();

    let mut edges = Vec::new();
    let mut margins = Vec::with_capacity(m * (m - 1) / 2);
    for i in 0..m {
        for j in (i + 1)..m {
            let (v_ij, r_ij) = birkhoff_verdict(&dual, &rows[i], &rows[j], tol)?;
            let (v_ji, r_ji) = birkhoff_verdict(&dual, &rows[j], &rows[i], tol)?;
            let edge = v_ij != OrthoVerdict::Orthogonal || v_ji != OrthoVerdict::Orthogonal;
            let soft = edge
                && v_ij != OrthoVerdict::NotOrthogonal
                && v_ji != OrthoVerdict::NotOrthogonal;
            if edge {
                edges.push((i, j));
            }
            margins.push(PairMargin {
                x: i,
                y: j,
                ratio_xy: r_ij.ratio,
                ratio_yx: r_ji.ratio,
                edge,
                soft,
            });
        }
    }
    edges.sort_unstable();
    let components = connected_components(m, &edges);
    Ok(BirkhoffGraph {
        vertices: model.phase.points.iter().map(|p| p.id.clone()).collect(),
        edges,
        components,
        margins,
    })
}

/// Finite probe of neighborhood openness: the points metrically within
/// `radius` of `x` and the fraction of them adjacent to `x` in the graph.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NeighborhoodReport {
    pub center: usize,
    /// Indices of points within `radius` of the center (center excluded).
    pub near_points: Vec<usize>,
    /// Fraction of `near_points` adjacent to the center; 1.0 when there are
    /// none.
    pub adjacent_fraction: f64,
}

/// Probes whether metrically-near points are graph-adjacent to `x` — the
/// finite analogue of "closed Birkhoff neighborhoods are topological
/// neighborhoods". A pass is `adjacent_fraction == 1.0`.
pub fn neighborhood_openness_probe(
    model: &FunctionSpaceModel,
    graph: &BirkhoffGraph,
    x: &str,
    radius: f64,
) -> Result<NeighborhoodReport> {
    let Some(metric) = model.phase.metric_matrix() else {
        return Err(Error::InvalidMetric(
            "phase space has no metric; the probe needs distances".into(),
        ));
    };
    let center = model.phase.index_of(x)?;
    let near_points: Vec<usize> = (0..model.num_points())
        .filter(|i| *i != center && metric[(center, *i)] <= radius)
        .collect();
    let adjacent = near_points
        .iter()
        .filter(|i| graph.adjacent(center, **i))
        .count();
    let adjacent_fraction = if near_points.is_empty() {
        1.0
    } else {
        adjacent as f64 / near_points.len() as f64
    };
    Ok(NeighborhoodReport {
        center,
        near_points,
        adjacent_fraction,
    })
}

/// Graphviz DOT rendering: vertices labeled by id, filled by component.
pub fn export_dot(graph: &BirkhoffGraph) -> String {
    const PALETTE: [&str; 8] = [
        "lightblue",
        "lightgreen",
        "lightsalmon",
        "gold",
        "plum",
        "lightgray",
        "cyan",
        "pink",
    ];
    let mut labels: Vec<usize> = graph.components.clone();
    labels.sort_unstable();
    labels.dedup();
    let color_of = |v: usize| {
        let rank = labels
            .iter()
            .position(|l| *l == graph.components[v])
            .unwrap_or(0);
        PALETTE[rank % PALETTE.len()]
    };
    let mut out = String::from("graph birkhoff {\n  node [style=filled];\n");
    for (v, id) in graph.vertices.iter().enumerate() {
        out.push_str(&format!(
            "  v{v} [label=\"{id}\", fillcolor=\"{}\"];\n",
            color_of(v)
        ));
    }
    for (a, b) in &graph.edges {
        let soft = graph
            .margin(*a, *b)
            .map(|m| m.soft)
            .unwrap_or(false);
        if soft {
            out.push_str(&format!("  v{a} -- v{b} [style=dashed];\n"));
        } else {
            out.push_str(&format!("  v{a} -- v{b};\n"));
        }
    }
    out.push_str("}\n");
    out
}
