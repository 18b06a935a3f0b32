//! Oracles for the integration tests, written against raw matrices and
//! netlists rather than the crate's own pipelines.
#![allow(dead_code)]

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};
use oblique_kit::circuits::{DriveMode, Netlist};

/// Orthonormal basis of the column space: eigenvectors of `PPᵀ` whose
/// eigenvalue exceeds `1e-10 · λ_max`.
/// nalgebra's SVD is avoided; it mis-factors some rank-deficient 2×2 inputs.
pub fn range_basis(p: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = (p * p.transpose()).symmetric_eigen();
    let top = eig.eigenvalues.max();
    let cols: Vec<usize> = (0..eig.eigenvalues.len()).filter(|&i| eig.eigenvalues[i] > 1e-10 * top).collect();
    DMatrix::from_fn(p.nrows(), cols.len(), |r, c| eig.eigenvectors[(r, cols[c])])
}

/// Gram blocks in the basis `[range P0 | range P1]`.
pub struct Blocks {
    pub l0: DMatrix<f64>,
    pub l1: DMatrix<f64>,
    pub gamma0: DMatrix<f64>,
    pub gamma1: DMatrix<f64>,
    pub off: DMatrix<f64>,
}

pub fn gram_blocks(p0: &DMatrix<f64>, p1: &DMatrix<f64>, g: &DMatrix<f64>) -> Blocks {
    let v = range_basis(p0);
    let w = range_basis(p1);
    let (n0, n1) = (v.ncols(), w.ncols());
    let mut u = DMatrix::zeros(v.nrows(), n0 + n1);
    u.columns_mut(0, n0).copy_from(&v);
    u.columns_mut(n0, n1).copy_from(&w);
    let m = u.transpose() * g * &u;
    let inv = m.clone().try_inverse().expect("adapted basis");
    Blocks {
        l0: m.view((0, 0), (n0, n0)).into_owned(),
        l1: m.view((n0, n0), (n1, n1)).into_owned(),
        gamma0: inv.view((0, 0), (n0, n0)).into_owned(),
        gamma1: inv.view((n0, n0), (n1, n1)).into_owned(),
        off: m.view((n0, 0), (n1, n0)).into_owned(),
    }
}

/// Eigenvalues of `B⁻¹A` for symmetric `A` and positive-definite `B`,
/// through the Cholesky factor `B = CCᵀ` and the symmetric `C⁻¹AC⁻ᵀ`.
/// Sorted descending.
pub fn generalized_eigenvalues(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let c = b.clone().cholesky().expect("positive-definite").l();
    let c_inv = c.try_inverse().expect("regular factor");
    let m = &c_inv * a * c_inv.transpose();
    let mut out: Vec<f64> = ((&m + m.transpose()) * 0.5).symmetric_eigenvalues().iter().copied().collect();
    out.sort_by(|a, b| b.partial_cmp(a).unwrap());
    out
}

fn complex_eigenvalues(m: &DMatrix<f64>) -> Vec<nalgebra::Complex<f64>> {
    nalgebra::linalg::Schur::try_new(m.clone(), f64::EPSILON, 100_000)
        .expect("Schur iteration converges")
        .complex_eigenvalues()
        .iter()
        .copied()
        .collect()
}

/// Product of the eigenvalues whose modulus exceeds `1e-9 · max|λ|`.
pub fn operator_pseudodet(m: &DMatrix<f64>) -> f64 {
    let ev = complex_eigenvalues(m);
    let top = ev.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let prod = ev.iter().filter(|z| z.norm() > 1e-9 * top).fold(nalgebra::Complex::new(1.0, 0.0), |acc, z| acc * z);
    assert!(prod.im.abs() <= 1e-8 * prod.norm(), "pseudodeterminant not real: {prod}");
    prod.re
}

/// Numerical rank from the diagonal of a column-pivoted QR factor.
pub fn rank(m: &DMatrix<f64>, rel: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let r = m.clone().col_piv_qr().r();
    let d: Vec<f64> = (0..r.nrows().min(r.ncols())).map(|i| r[(i, i)].abs()).collect();
    let top = d.iter().copied().fold(0.0, f64::max);
    d.iter().filter(|&&x| x > rel * top.max(1.0)).count()
}

/// Values left after removing those within `tol` of an ignored value.
pub fn strip(values: &[f64], ignore: &[f64], tol: f64) -> Vec<f64> {
    let mut v: Vec<f64> =
        values.iter().copied().filter(|x| ignore.iter().all(|z| (x - z).abs() > tol * x.abs().max(1.0))).collect();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

/// Largest scaled difference between two sorted lists, infinite on length mismatch.
pub fn list_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(1.0)).fold(0.0, f64::max)
}

fn connected(vertices: usize, edges: &[(usize, usize)], chosen: &[usize]) -> bool {
    let mut adj = vec![Vec::new(); vertices];
    for &e in chosen {
        let (a, b) = edges[e];
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; vertices];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for &u in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Spanning trees by bitmask over all edge subsets of size `|V| − 1`, tested
/// for connectivity by breadth-first search. Returns the count and the sums
/// `Σ_T Π_{e∉T} g_e` and `Σ_T Π_{e∈T} 1/g_e`.
pub fn spanning_tree_sums(vertices: usize, edges: &[(usize, usize)], weights: &[f64]) -> (u64, f64, f64) {
    let m = edges.len();
    assert!(m < 24, "too many edges to enumerate");
    let mut out = (0, 0.0, 0.0);
    for mask in 0u32..(1 << m) {
        if mask.count_ones() as usize != vertices - 1 {
            continue;
        }
        let chosen: Vec<usize> = (0..m).filter(|&e| mask >> e & 1 == 1).collect();
        if !connected(vertices, edges, &chosen) {
            continue;
        }
        out.0 += 1;
        out.1 += (0..m).filter(|&e| mask >> e & 1 == 0).map(|e| weights[e]).product::<f64>();
        out.2 += chosen.iter().map(|&e| 1.0 / weights[e]).product::<f64>();
    }
    out
}

/// Modified nodal analysis on the unreduced netlist.
///
/// Current drive: current sources inject `amps` into `to` and draw them from
/// `from`; voltage sources are absent. Voltage drive: each voltage source
/// holds `φ_from − φ_to = volts` across its resistor and every current source
/// is replaced by a wire.
///
/// Returns per-resistor currents (current drive) or drops (voltage drive)
/// and the dissipated power.
pub fn nodal_solve(net: &Netlist, mode: DriveMode) -> (Vec<f64>, f64) {
    let n = net.vertices;
    // (a, b, value): φ_a − φ_b = value, with an unknown current a → b
    let constraints: Vec<(usize, usize, f64)> = match mode {
        DriveMode::Current => Vec::new(),
        DriveMode::Voltage => net
            .voltage_sources
            .iter()
            .map(|s| {
                let r = &net.resistors[s.across_resistor];
                (r.from, r.to, s.volts)
            })
            .chain(net.current_sources.iter().map(|s| (s.from, s.to, 0.0)))
            .collect(),
    };
    let size = n + constraints.len();
    let mut a = DMatrix::zeros(size, size);
    let mut rhs = DVector::zeros(size);
    for r in &net.resistors {
        let y = 1.0 / r.ohms;
        a[(r.from, r.from)] += y;
        a[(r.to, r.to)] += y;
        a[(r.from, r.to)] -= y;
        a[(r.to, r.from)] -= y;
    }
    if mode == DriveMode::Current {
        for s in &net.current_sources {
            rhs[s.to] += s.amps;
            rhs[s.from] -= s.amps;
        }
    }
    for (k, &(p, q, value)) in constraints.iter().enumerate() {
        let j = n + k;
        a[(p, j)] += 1.0;
        a[(q, j)] -= 1.0;
        a[(j, p)] = 1.0;
        a[(j, q)] = -1.0;
        rhs[j] = value;
    }
    // ground vertex 0
    for c in 0..size {
        a[(0, c)] = 0.0;
    }
    a[(0, 0)] = 1.0;
    rhs[0] = 0.0;
    let x = a.lu().solve(&rhs).expect("nodal system is regular");
    let mut values = Vec::with_capacity(net.resistors.len());
    let mut power = 0.0;
    for r in &net.resistors {
        let drop = x[r.from] - x[r.to];
        power += drop * drop / r.ohms;
        values.push(match mode {
            DriveMode::Current => drop / r.ohms,
            DriveMode::Voltage => drop,
        });
    }
    (values, power)
}

/// `det₊` of the operator `B⁻¹A`: product of its generalized eigenvalues
/// above `1e-9 · λ_max`.
pub fn generalized_pseudodet(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let ev = generalized_eigenvalues(a, b);
    let top = ev.first().copied().unwrap_or(0.0);
    ev.iter().filter(|&&l| l > 1e-9 * top).product()
}
