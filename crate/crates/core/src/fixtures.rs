//! Reference inputs and closed-form expressions from the worked examples.
//!
//! Vertex labels of the five-edge graph: A = 0 (top left), B = 1 (top right),
//! C = 2 (bottom left), D = 3 (bottom right). Its DFS tree is `{e1, e2, e3}`.
//!
//! The bridge network has original vertices TL = 0, TM = 1, TR = 2, BL = 3,
//! BM = 4, BR = 5 and X = 6 (between `R3` and `I3`). After contracting the
//! current sources it becomes a complete graph on four vertices with tree
//! `{R4, R5, R6}` and chords `{R1, R2, R3}`.

use nalgebra::DMatrix;

use crate::circuits::{CurrentSourceSpec, Netlist, ResistorSpec, VoltageSourceSpec};
use crate::graphcycles::WeightedGraph;
use crate::numkit::SymMatrix;

/// The 4×4 oblique pair and metric of the main example.
pub fn worked_projection_matrices() -> (DMatrix<f64>, DMatrix<f64>, SymMatrix) {
    let p0 = DMatrix::from_row_slice(
        4,
        4,
        &[1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0],
    );
    let p1 = DMatrix::from_row_slice(
        4,
        4,
        &[0.0, -1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0, 1.0, -1.0, 0.0, -1.0, 0.0, 0.0],
    );
    let g = SymMatrix::from_rows(&[
        vec![1.0, 0.0, 0.0, 0.0],
        vec![0.0, 2.0, 1.0, 0.0],
        vec![0.0, 1.0, 2.0, 0.0],
        vec![0.0, 0.0, 0.0, 1.0],
    ])
    .expect("fixture is finite");
    (p0, p1, g)
}

/// Approximate shared eigenvalues of the four partner forms, as printed (two digits).
pub const WORKED_SHARED_EIGENVALUES: [f64; 2] = [5.36, 1.31];

/// `det₊G` of the main example.
pub const WORKED_DET_PLUS_G: f64 = 3.0;

pub const WORKED_GRAPH_EDGES: [(usize, usize); 5] = [(0, 1), (2, 1), (3, 2), (1, 3), (2, 0)];

pub fn worked_graph(weights: &[f64]) -> WeightedGraph {
    WeightedGraph::new(4, WORKED_GRAPH_EDGES.to_vec(), weights.to_vec()).expect("valid example graph")
}

/// Printed `K0` of the five-edge graph; `g[0]` is `g1`.
pub fn worked_graph_k0(g: &[f64]) -> DMatrix<f64> {
    let off = -g[1] / (g[3] * g[4]).sqrt();
    DMatrix::from_row_slice(2, 2, &[1.0 + (g[1] + g[2]) / g[3], off, off, 1.0 + (g[0] + g[1]) / g[4]])
}

/// Printed `Σ1` of the five-edge graph.
pub fn worked_graph_sigma1(g: &[f64]) -> DMatrix<f64> {
    let a = -(g[0] * g[1]).sqrt() / g[4];
    let b = (g[1] * g[2]).sqrt() / g[3];
    DMatrix::from_row_slice(
        3,
        3,
        &[1.0 + g[0] / g[4], a, 0.0, a, 1.0 + g[1] / g[3] + g[1] / g[4], b, 0.0, b, 1.0 + g[2] / g[3]],
    )
}

/// The coefficients `X` and `Y` of `ζ0(λ) = λ² − (X + 2)λ + Y`.
pub fn worked_graph_x_y(g: &[f64]) -> (f64, f64) {
    let (g1, g2, g3, g4, g5) = (g[0], g[1], g[2], g[3], g[4]);
    let den = g4 * g5;
    let y = (g1 * g2 + g1 * g3 + g1 * g4 + g4 * g2 + g4 * g5 + g5 * g2 + g5 * g3 + g2 * g3) / den;
    let x = (g2 * g5 + g3 * g5 + g1 * g4 + g4 * g2) / den;
    (x, y)
}

/// The six-resistor bridge with unit current and voltage sources; `r[0]` is `R1`.
pub fn bridge_netlist(r: &[f64]) -> Netlist {
    let res = |from, to, i: usize| ResistorSpec { from, to, ohms: r[i] };
    Netlist {
        vertices: 7,
        resistors: vec![res(3, 0, 0), res(2, 5, 1), res(3, 6, 2), res(1, 4, 3), res(3, 4, 4), res(4, 5, 5)],
        current_sources: vec![
            CurrentSourceSpec { from: 1, to: 0, amps: 1.0 },
            CurrentSourceSpec { from: 2, to: 1, amps: 1.0 },
            CurrentSourceSpec { from: 6, to: 5, amps: 1.0 },
        ],
        voltage_sources: (3..6).map(|k| VoltageSourceSpec { across_resistor: k, volts: 1.0 }).collect(),
    }
}

/// Printed current-drive power form `K0` of the bridge network.
pub fn bridge_k0(r: &[f64]) -> DMatrix<f64> {
    let (r1, r2, r3, r4, r5, r6) = (r[0], r[1], r[2], r[3], r[4], r[5]);
    let a = -r4 / (r1 * r2).sqrt();
    let b = r5 / (r1 * r3).sqrt();
    let c = r6 / (r2 * r3).sqrt();
    DMatrix::from_row_slice(
        3,
        3,
        &[1.0 + r4 / r1 + r5 / r1, a, b, a, 1.0 + r4 / r2 + r6 / r2, c, b, c, 1.0 + r5 / r3 + r6 / r3],
    )
}

/// Printed voltage-drive power form `Σ1` of the bridge network.
pub fn bridge_sigma1(r: &[f64]) -> DMatrix<f64> {
    let (r1, r2, r3, r4, r5, r6) = (r[0], r[1], r[2], r[3], r[4], r[5]);
    let a = -(r4 * r5).sqrt() / r1;
    let b = (r4 * r6).sqrt() / r2;
    let c = (r5 * r6).sqrt() / r3;
    DMatrix::from_row_slice(
        3,
        3,
        &[1.0 + r4 / r1 + r4 / r2, a, b, a, 1.0 + r5 / r1 + r5 / r3, c, b, c, 1.0 + r6 / r2 + r6 / r3],
    )
}
