//! Oriented weighted graphs, their cycle and cocycle bases relative to a
//! spanning tree, and the projection pair they induce on the edge space.
//!
//! Edge `i` runs from `edges[i].0` to `edges[i].1`. The incidence matrix has
//! `+1` at the target and `−1` at the origin of every edge, so the cycle space
//! is its kernel.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{self, SymMatrix};
use crate::oblique::{validate_projection_pair, MetricBlocks, MetricSpace, ProjectionPair};

/// Largest edge count for which spanning trees are enumerated by brute force.
pub const ENUMERATION_EDGE_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
}

/// On-disk graph description. Edge order is significant: it fixes the order
/// of the edge basis and the DFS tie-breaking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: usize,
    pub edges: Vec<EdgeSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    weights: Vec<f64>,
}

impl WeightedGraph {
    /// A connected graph without self-loops and with positive weights.
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>, weights: Vec<f64>) -> Result<Self> {
        if let Some(edge) = edges.iter().position(|&(a, b)| a == b) {
            return Err(Error::SelfLoop { edge });
        }
        Self::with_self_loops(vertex_count, edges, weights)
    }

    /// Like [`WeightedGraph::new`] but admits self-loops, which show up after
    /// contracting source edges of a circuit.
    pub fn with_self_loops(vertex_count: usize, edges: Vec<(usize, usize)>, weights: Vec<f64>) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::InvalidInput("graph needs at least one vertex".into()));
        }
        if edges.len() != weights.len() {
            return Err(Error::DimensionMismatch(format!("{} edges but {} weights", edges.len(), weights.len())));
        }
        if let Some(i) = edges.iter().position(|&(a, b)| a >= vertex_count || b >= vertex_count) {
            return Err(Error::InvalidInput(format!("edge {i} references a vertex outside 0..{vertex_count}")));
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidInput(format!("edge {i} has non-positive weight {}", weights[i])));
        }
        let graph = Self { vertex_count, edges, weights };
        if graph.component_count() != 1 {
            return Err(Error::Disconnected);
        }
        Ok(graph)
    }

    pub fn from_file(file: &GraphFile) -> Result<Self> {
        let edges = file.edges.iter().map(|e| (e.from, e.to)).collect();
        let weights = file.edges.iter().map(|e| e.weight).collect();
        Self::new(file.vertices, edges, weights)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(&file)
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            vertices: self.vertex_count,
            edges: self
                .edges
                .iter()
                .zip(&self.weights)
                .map(|(&(from, to), &weight)| EdgeSpec { from, to, weight })
                .collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Same topology with new weights.
    pub fn with_weights(&self, weights: &[f64]) -> Result<Self> {
        Self::with_self_loops(self.vertex_count, self.edges.clone(), weights.to_vec())
    }

    /// `|E| − |X| + 1`.
    pub fn cyclomatic_number(&self) -> usize {
        self.edges.len() + 1 - self.vertex_count
    }

    pub fn has_self_loops(&self) -> bool {
        self.edges.iter().any(|&(a, b)| a == b)
    }

    /// `diag(g)` as a metric on the edge space.
    pub fn metric(&self) -> SymMatrix {
        SymMatrix::from_diagonal(&self.weights).expect("weights are finite")
    }

    fn component_count(&self) -> usize {
        let mut uf = UnionFind::new(self.vertex_count);
        let mut count = self.vertex_count;
        for &(a, b) in &self.edges {
            if uf.union(a, b) {
                count -= 1;
            }
        }
        count
    }

    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            if a != b {
                adj[a].push((e, b));
                adj[b].push((e, a));
            }
        }
        adj
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes of `a` and `b`; false if they were already merged.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Signed incidence matrix, `|X| × |E|`.
pub fn incidence_matrix(g: &WeightedGraph) -> Result<DMatrix<i64>> {
    if let Some(edge) = g.edges.iter().position(|&(a, b)| a == b) {
        return Err(Error::SelfLoop { edge });
    }
    Ok(incidence_with_loops(g))
}

/// Incidence matrix in which self-loops give zero columns.
pub(crate) fn incidence_with_loops(g: &WeightedGraph) -> DMatrix<i64> {
    let mut m = DMatrix::zeros(g.vertex_count, g.edge_count());
    for (e, &(a, b)) in g.edges.iter().enumerate() {
        if a != b {
            m[(a, e)] = -1;
            m[(b, e)] = 1;
        }
    }
    m
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    /// Tree edge indices in increasing order.
    pub tree_edges: Vec<usize>,
}

impl SpanningTree {
    pub fn from_edges(g: &WeightedGraph, edges: &[usize]) -> Result<Self> {
        let mut tree_edges = edges.to_vec();
        tree_edges.sort_unstable();
        tree_edges.dedup();
        if tree_edges.len() != g.vertex_count - 1 {
            return Err(Error::InvalidTree(format!(
                "{} edges given, a spanning tree needs {}",
                tree_edges.len(),
                g.vertex_count - 1
            )));
        }
        let mut uf = UnionFind::new(g.vertex_count);
        for &e in &tree_edges {
            let &(a, b) = g.edges.get(e).ok_or_else(|| Error::InvalidTree(format!("no edge {e}")))?;
            if !uf.union(a, b) {
                return Err(Error::InvalidTree(format!("edge {e} closes a cycle")));
            }
        }
        Ok(Self { tree_edges })
    }

    pub fn contains(&self, edge: usize) -> bool {
        self.tree_edges.binary_search(&edge).is_ok()
    }
}

/// Depth-first spanning tree rooted at vertex 0, scanning incident edges in
/// input order.
pub fn spanning_tree(g: &WeightedGraph) -> Result<SpanningTree> {
    let adj = g.adjacency();
    let mut visited = vec![false; g.vertex_count];
    let mut tree = Vec::with_capacity(g.vertex_count - 1);
    let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
    visited[0] = true;
    while let Some(top) = stack.last_mut() {
        let (v, next) = *top;
        if next == adj[v].len() {
            stack.pop();
            continue;
        }
        top.1 += 1;
        let (e, w) = adj[v][next];
        if !visited[w] {
            visited[w] = true;
            tree.push(e);
            stack.push((w, 0));
        }
    }
    if visited.iter().any(|&x| !x) {
        return Err(Error::Disconnected);
    }
    SpanningTree::from_edges(g, &tree)
}

/// Fundamental cycles (one per chord) and cocycles (one per cochord).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleCocycleBasis {
    pub chords: Vec<usize>,
    pub cochords: Vec<usize>,
    /// `cycles[k]` is the cycle of `chords[k]`, with `+1` on its chord.
    pub cycles: Vec<Vec<i64>>,
    /// `cocycles[k]` is the cocycle of `cochords[k]`, with `+1` on its cochord.
    pub cocycles: Vec<Vec<i64>>,
    pub edge_count: usize,
}

impl CycleCocycleBasis {
    /// Columns are the cycle vectors, `|E| × |C|`.
    pub fn cycle_matrix(&self) -> DMatrix<f64> {
        columns(&self.cycles, self.edge_count)
    }

    /// Columns are the cocycle vectors, `|E| × (|X| − 1)`.
    pub fn cocycle_matrix(&self) -> DMatrix<f64> {
        columns(&self.cocycles, self.edge_count)
    }

    /// Columns are the unit vectors of the cochords.
    pub fn cochord_units(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.edge_count, self.cochords.len());
        for (k, &mu) in self.cochords.iter().enumerate() {
            m[(mu, k)] = 1.0;
        }
        m
    }

    /// Checks the integer identities: cycles lie in the kernel of the
    /// incidence matrix, cycles and cocycles pair to zero, and each vector has
    /// unit coefficient on its own edge and zero on the other chords/cochords.
    pub fn verify(&self, g: &WeightedGraph) -> Result<()> {
        let delta = incidence_with_loops(g);
        let fail = |what: String| Err(Error::InvalidTree(what));
        for (k, c) in self.cycles.iter().enumerate() {
            for x in 0..g.vertex_count {
                if (0..self.edge_count).map(|e| delta[(x, e)] * c[e]).sum::<i64>() != 0 {
                    return fail(format!("cycle {k} is not closed at vertex {x}"));
                }
            }
            for (j, &a) in self.chords.iter().enumerate() {
                if c[a] != i64::from(j == k) {
                    return fail(format!("cycle {k} has coefficient {} on chord {a}", c[a]));
                }
            }
            for (j, m) in self.cocycles.iter().enumerate() {
                if dot(m, c) != 0 {
                    return fail(format!("cocycle {j} does not annihilate cycle {k}"));
                }
            }
        }
        for (k, m) in self.cocycles.iter().enumerate() {
            for (j, &mu) in self.cochords.iter().enumerate() {
                if m[mu] != i64::from(j == k) {
                    return fail(format!("cocycle {k} has coefficient {} on cochord {mu}", m[mu]));
                }
            }
        }
        Ok(())
    }
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn columns(vectors: &[Vec<i64>], rows: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, vectors.len(), |i, j| vectors[j][i] as f64)
}

pub fn cycle_cocycle_basis(g: &WeightedGraph, tree: &SpanningTree) -> CycleCocycleBasis {
    let n = g.vertex_count;
    let m = g.edge_count();
    let chords: Vec<usize> = (0..m).filter(|e| !tree.contains(*e)).collect();
    let cochords = tree.tree_edges.clone();

    // root the tree at 0: parent edge and depth of every vertex
    let mut tree_adj = vec![Vec::new(); n];
    for &e in &cochords {
        let (a, b) = g.edges[e];
        tree_adj[a].push((e, b));
        tree_adj[b].push((e, a));
    }
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut depth = vec![0usize; n];
    let mut seen = vec![false; n];
    let mut order = vec![0];
    seen[0] = true;
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        i += 1;
        for &(e, w) in &tree_adj[v] {
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some((e, v));
                depth[w] = depth[v] + 1;
                order.push(w);
            }
        }
    }

    let cycles = chords
        .iter()
        .map(|&chord| {
            let (u, v) = g.edges[chord];
            let mut c = vec![0i64; m];
            c[chord] = 1;
            // walk v → u through the tree
            let (mut a, mut b) = (v, u);
            let mut tail = Vec::new();
            while a != b {
                if depth[a] >= depth[b] {
                    let (e, p) = parent[a].expect("non-root vertex");
                    c[e] += if g.edges[e] == (a, p) { 1 } else { -1 };
                    a = p;
                } else {
                    let (e, p) = parent[b].expect("non-root vertex");
                    tail.push((e, p, b));
                    b = p;
                }
            }
            for (e, p, child) in tail {
                c[e] += if g.edges[e] == (p, child) { 1 } else { -1 };
            }
            c
        })
        .collect();

    let cocycles = cochords
        .iter()
        .map(|&mu| {
            let (a, _) = g.edges[mu];
            let mut side = vec![false; n];
            side[a] = true;
            let mut stack = vec![a];
            while let Some(v) = stack.pop() {
                for &(e, w) in &tree_adj[v] {
                    if e != mu && !side[w] {
                        side[w] = true;
                        stack.push(w);
                    }
                }
            }
            g.edges
                .iter()
                .map(|&(x, y)| match (side[x], side[y]) {
                    (true, false) => 1,
                    (false, true) => -1,
                    _ => 0,
                })
                .collect()
        })
        .collect();

    CycleCocycleBasis { chords, cochords, cycles, cocycles, edge_count: m }
}

/// `P0 = Σ_α c_α ⊗ e_α` (projects onto the cycle space along the cochords) and
/// `P1 = Σ_μ e_μ ⊗ c_μ`.
pub fn graph_projections(basis: &CycleCocycleBasis) -> Result<ProjectionPair> {
    let m = basis.edge_count;
    let mut p0 = DMatrix::zeros(m, m);
    for (c, &alpha) in basis.cycles.iter().zip(&basis.chords) {
        for e in 0..m {
            p0[(e, alpha)] = c[e] as f64;
        }
    }
    let mut p1 = DMatrix::zeros(m, m);
    for (c, &mu) in basis.cocycles.iter().zip(&basis.cochords) {
        for e in 0..m {
            p1[(mu, e)] = c[e] as f64;
        }
    }
    validate_projection_pair(p0, p1, 0.5)
}

/// Metric space `(I, diag g)` and the blocks of the metric in the adapted
/// basis `[c_α | e_μ]`, where `L0` and `Γ1` are the cycle and cocycle Gram
/// matrices, `Γ0 = diag(1/g_α)` and `L1 = diag(g_μ)`.
pub fn graph_metric_blocks(g: &WeightedGraph, basis: &CycleCocycleBasis) -> Result<(MetricSpace, MetricBlocks)> {
    let space = MetricSpace::with_metric(g.metric())?;
    let blocks = MetricBlocks::from_adapted(&basis.cycle_matrix(), &basis.cochord_units(), &space)?;
    Ok((space, blocks))
}

/// `D_{μ,α} = √(g_μ/g_α) c_μ[e_α]`, rows indexed by cochords, columns by chords.
pub fn d_matrix(basis: &CycleCocycleBasis, weights: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(basis.cochords.len(), basis.chords.len(), |i, j| {
        let (mu, alpha) = (basis.cochords[i], basis.chords[j]);
        (weights[mu] / weights[alpha]).sqrt() * basis.cocycles[i][alpha] as f64
    })
}

/// `K0 = I + DᵀD` over the chords.
pub fn k0_from_d(d: &DMatrix<f64>) -> SymMatrix {
    SymMatrix::new(DMatrix::identity(d.ncols(), d.ncols()) + d.transpose() * d).expect("finite")
}

/// `Σ1 = I + DDᵀ` over the cochords.
pub fn sigma1_from_d(d: &DMatrix<f64>) -> SymMatrix {
    SymMatrix::new(DMatrix::identity(d.nrows(), d.nrows()) + d * d.transpose()).expect("finite")
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeEnumeration {
    pub tree_count: u64,
    /// `Σ_T Π_{e∉T} g_e`.
    pub complement_polynomial: f64,
    /// `Σ_T Π_{e∈T} 1/g_e`.
    pub inverse_polynomial: f64,
}

/// Brute-force enumeration of spanning trees over all `(|X|−1)`-subsets of edges.
pub fn enumerate_spanning_trees(g: &WeightedGraph) -> Result<TreeEnumeration> {
    let m = g.edge_count();
    if m > ENUMERATION_EDGE_LIMIT {
        return Err(Error::TooLargeForOracle { edges: m, limit: ENUMERATION_EDGE_LIMIT });
    }
    let k = g.vertex_count - 1;
    let mut out = TreeEnumeration { tree_count: 0, complement_polynomial: 0.0, inverse_polynomial: 0.0 };
    let mut subset: Vec<usize> = (0..k).collect();
    loop {
        let mut uf = UnionFind::new(g.vertex_count);
        if subset.iter().all(|&e| uf.union(g.edges[e].0, g.edges[e].1)) {
            let mut in_tree = vec![false; m];
            for &e in &subset {
                in_tree[e] = true;
            }
            out.tree_count += 1;
            out.complement_polynomial += (0..m).filter(|&e| !in_tree[e]).map(|e| g.weights[e]).product::<f64>();
            out.inverse_polynomial += subset.iter().map(|&e| 1.0 / g.weights[e]).product::<f64>();
        }
        // next k-combination in lexicographic order
        let Some(i) = (0..k).rev().find(|&i| subset[i] != i + m - k) else { break };
        subset[i] += 1;
        for j in i + 1..k {
            subset[j] = subset[j - 1] + 1;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreePolynomialReport {
    pub det_l0: f64,
    pub det_gamma1: f64,
    pub det_g: f64,
    /// `None` when the graph is too large to enumerate.
    pub tree_count: Option<u64>,
    pub oracle_l0: Option<f64>,
    pub oracle_gamma1: Option<f64>,
}

impl TreePolynomialReport {
    /// Relative deviation of `det L0 / det Γ1` from `det G`.
    pub fn duality_error(&self) -> f64 {
        (self.det_l0 / self.det_gamma1 - self.det_g).abs() / self.det_g
    }

    /// Largest relative deviation between determinants and enumeration, if enumerated.
    pub fn oracle_error(&self) -> Option<f64> {
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
        Some(rel(self.det_l0, self.oracle_l0?).max(rel(self.det_gamma1, self.oracle_gamma1?)))
    }
}

/// Cycle and cocycle Gram determinants, with the spanning-tree enumeration as
/// an independent check when the graph is small enough.
pub fn tree_polynomials(g: &WeightedGraph, basis: &CycleCocycleBasis) -> TreePolynomialReport {
    let metric = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&g.weights));
    let inverse =
        DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(g.weights.len(), g.weights.iter().map(|w| 1.0 / w)));
    let c = basis.cycle_matrix();
    let cm = basis.cocycle_matrix();
    let det_l0 = numkit::lu_det(&(c.transpose() * metric * &c));
    let det_gamma1 = numkit::lu_det(&(cm.transpose() * inverse * &cm));
    let det_g = g.weights.iter().product();
    let oracle = enumerate_spanning_trees(g).ok();
    TreePolynomialReport {
        det_l0,
        det_gamma1,
        det_g,
        tree_count: oracle.as_ref().map(|o| o.tree_count),
        oracle_l0: oracle.as_ref().map(|o| o.complement_polynomial),
        oracle_gamma1: oracle.as_ref().map(|o| o.inverse_polynomial),
    }
}

/// The five-edge example graph: the cocycles of its DFS tree, as integer vectors.
const EXAMPLE_COCYCLES: [[i64; 5]; 3] = [[1, 0, 0, 0, -1], [0, 1, 0, -1, 1], [0, 0, 1, -1, 0]];

/// `‖Σ1 v − v‖ / ‖v‖` for `v = (1/√g1, 1/√g2, −1/√g3)` on the five-edge
/// example graph, where `v` spans the unit eigenspace of `Σ1`.
pub fn eigvec_unit_check(basis: &CycleCocycleBasis, weights: &[f64]) -> Result<f64> {
    let expected = basis.edge_count == 5
        && basis.chords == [3, 4]
        && basis.cochords == [0, 1, 2]
        && basis.cocycles.iter().zip(&EXAMPLE_COCYCLES).all(|(a, b)| a.as_slice() == b.as_slice());
    if !expected || weights.len() != 5 {
        return Err(Error::WrongTopology("expected the five-edge example graph with tree {e1, e2, e3}".into()));
    }
    let sigma1 = sigma1_from_d(&d_matrix(basis, weights));
    let v =
        nalgebra::DVector::from_vec(vec![1.0 / weights[0].sqrt(), 1.0 / weights[1].sqrt(), -1.0 / weights[2].sqrt()]);
    Ok((sigma1.as_matrix() * &v - &v).norm() / v.norm())
}
