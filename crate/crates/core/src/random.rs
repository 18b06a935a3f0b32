//! Seeded generators for property suites. Everything is driven by a
//! `ChaCha8Rng`, so a seed fixes the whole instance stream.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::circuits::{CurrentSourceSpec, Netlist, ResistorSpec, VoltageSourceSpec};
use crate::graphcycles::{spanning_tree, WeightedGraph};
use crate::numkit::{self, SymMatrix};
use crate::oblique::{validate_projection_pair, MetricSpace, ProjectionPair, PROJECTION_TOL};

pub type Rng64 = ChaCha8Rng;

/// Largest condition number accepted for the change of basis of a random pair.
pub const MAX_BASIS_CONDITION: f64 = 1e3;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Log-uniform sample in `[lo, hi]`.
pub fn log_uniform(rng: &mut Rng64, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..=hi.ln()).exp()
}

pub fn gaussian_matrix(rng: &mut Rng64, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub fn random_orthogonal(rng: &mut Rng64, n: usize) -> DMatrix<f64> {
    let qr = gaussian_matrix(rng, n, n).qr();
    let (q, r) = (qr.q(), qr.r());
    // fix column signs so the distribution does not depend on QR conventions
    let signs = DVector::from_iterator(n, (0..n).map(|i| if r[(i, i)] < 0.0 { -1.0 } else { 1.0 }));
    q * DMatrix::from_diagonal(&signs)
}

/// `Q diag(λ) Qᵀ` with `ln λ` uniform in `[ln 0.1, ln 10]`.
pub fn random_spd(rng: &mut Rng64, n: usize) -> SymMatrix {
    let q = random_orthogonal(rng, n);
    let lambda = DVector::from_iterator(n, (0..n).map(|_| log_uniform(rng, 0.1, 10.0)));
    SymMatrix::new(&q * DMatrix::from_diagonal(&lambda) * q.transpose()).expect("finite")
}

/// Random symmetric matrix with standard normal entries.
pub fn random_symmetric(rng: &mut Rng64, n: usize) -> SymMatrix {
    SymMatrix::new(gaussian_matrix(rng, n, n)).expect("finite")
}

/// `S diag(I_{n0}, 0) S⁻¹` for a random well-conditioned `S`, and its complement.
pub fn random_projection_pair_with_rank(rng: &mut Rng64, n: usize, n0: usize) -> ProjectionPair {
    assert!(n >= 2 && (1..n).contains(&n0), "need 1 <= n0 < n");
    loop {
        let s = gaussian_matrix(rng, n, n);
        let sv = numkit::singular_values(&s);
        if sv[n - 1] <= 0.0 || sv[0] / sv[n - 1] > MAX_BASIS_CONDITION {
            continue;
        }
        let Ok(s_inv) = numkit::invert(&s, "S") else { continue };
        let mut d = DMatrix::zeros(n, n);
        for i in 0..n0 {
            d[(i, i)] = 1.0;
        }
        let p0 = &s * d * s_inv;
        let p1 = DMatrix::identity(n, n) - &p0;
        if let Ok(pair) = validate_projection_pair(p0, p1, PROJECTION_TOL) {
            return pair;
        }
    }
}

pub fn random_projection_pair(rng: &mut Rng64, n: usize) -> ProjectionPair {
    let n0 = rng.random_range(1..n);
    random_projection_pair_with_rank(rng, n, n0)
}

/// A projection pair and metric space of dimension `2..=max_n`; the scalar
/// product is random in half of the cases and the identity otherwise.
pub fn random_instance(rng: &mut Rng64, max_n: usize) -> (ProjectionPair, MetricSpace) {
    let n = rng.random_range(2..=max_n);
    let pair = random_projection_pair(rng, n);
    let g = random_spd(rng, n);
    let h = if rng.random_bool(0.5) { random_spd(rng, n) } else { SymMatrix::identity(n) };
    let space = MetricSpace::new(h, g).expect("random forms are positive-definite");
    (pair, space)
}

/// Connected graph with `2..=max_vertices` vertices and at most `max_edges`
/// edges (parallel edges allowed, no self-loops), weights log-uniform in
/// `[1e-2, 1e2]`, edge order shuffled.
pub fn random_connected_graph(rng: &mut Rng64, max_vertices: usize, max_edges: usize) -> WeightedGraph {
    let v = rng.random_range(2..=max_vertices.min(max_edges + 1));
    let mut edges = Vec::new();
    for i in 1..v {
        let j = rng.random_range(0..i);
        edges.push(if rng.random_bool(0.5) { (i, j) } else { (j, i) });
    }
    let extra = rng.random_range(0..=max_edges - (v - 1));
    for _ in 0..extra {
        let a = rng.random_range(0..v);
        let mut b = rng.random_range(0..v - 1);
        if b >= a {
            b += 1;
        }
        edges.push((a, b));
    }
    edges.shuffle(rng);
    let weights = (0..edges.len()).map(|_| log_uniform(rng, 1e-2, 1e2)).collect();
    WeightedGraph::new(v, edges, weights).expect("connected by construction")
}

/// Netlist over a random connected graph: each chord of the DFS tree is
/// split by a current source, and every tree resistor has a voltage source
/// across it. Resistances log-uniform in `[0.1, 10]`, source values in `[-2, 2]`.
pub fn random_netlist(rng: &mut Rng64, max_vertices: usize, max_edges: usize) -> Netlist {
    let g = random_connected_graph(rng, max_vertices, max_edges);
    let tree = spanning_tree(&g).expect("connected");
    let mut vertices = g.vertex_count();
    let mut resistors = Vec::new();
    let mut current_sources = Vec::new();
    let mut voltage_sources = Vec::new();
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        let ohms = log_uniform(rng, 0.1, 10.0);
        if tree.contains(e) {
            voltage_sources.push(VoltageSourceSpec { across_resistor: e, volts: rng.random_range(-2.0..=2.0) });
            resistors.push(ResistorSpec { from: a, to: b, ohms });
        } else {
            let w = vertices;
            vertices += 1;
            resistors.push(ResistorSpec { from: a, to: w, ohms });
            current_sources.push(CurrentSourceSpec { from: b, to: w, amps: rng.random_range(-2.0..=2.0) });
        }
    }
    Netlist { vertices, resistors, current_sources, voltage_sources }
}
