//! Resistor networks driven by current or voltage generators.
//!
//! A netlist is reduced to a weighted graph whose edges are the resistors and
//! whose weights are the resistances. Each current source sits in series with
//! exactly one resistor (its carrier) and is contracted away; the carriers
//! become the chords. Voltage sources sit in parallel with resistors, which
//! must form the complementary spanning tree.
//!
//! Currents are positive along the resistor orientation `from → to`; voltage
//! drops are positive when the potential at `from` exceeds the one at `to`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphcycles::{
    cycle_cocycle_basis, d_matrix, incidence_with_loops, k0_from_d, sigma1_from_d, spanning_tree, CycleCocycleBasis,
    SpanningTree, UnionFind, WeightedGraph,
};
use crate::numkit::{self, spectra_match, SpectrumComparison, SymMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResistorSpec {
    pub from: usize,
    pub to: usize,
    pub ohms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurrentSourceSpec {
    pub from: usize,
    pub to: usize,
    pub amps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoltageSourceSpec {
    /// Zero-based resistor index.
    pub across_resistor: usize,
    pub volts: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Netlist {
    pub vertices: usize,
    pub resistors: Vec<ResistorSpec>,
    #[serde(default)]
    pub current_sources: Vec<CurrentSourceSpec>,
    #[serde(default)]
    pub voltage_sources: Vec<VoltageSourceSpec>,
}

impl Netlist {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn resistances(&self) -> Vec<f64> {
        self.resistors.iter().map(|r| r.ohms).collect()
    }

    pub fn with_resistances(&self, ohms: &[f64]) -> Result<Self> {
        if ohms.len() != self.resistors.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} resistances for {} resistors",
                ohms.len(),
                self.resistors.len()
            )));
        }
        let mut out = self.clone();
        for (r, &v) in out.resistors.iter_mut().zip(ohms) {
            r.ohms = v;
        }
        Ok(out)
    }

    fn validate(&self) -> Result<()> {
        if self.vertices == 0 || self.resistors.is_empty() {
            return Err(Error::InvalidInput("netlist needs vertices and at least one resistor".into()));
        }
        let in_range = |v: usize| v < self.vertices;
        for (i, r) in self.resistors.iter().enumerate() {
            if !in_range(r.from) || !in_range(r.to) {
                return Err(Error::InvalidInput(format!("resistor {i} references a missing vertex")));
            }
            if r.from == r.to {
                return Err(Error::InvalidInput(format!("resistor {i} is shorted on itself")));
            }
            if !(r.ohms.is_finite() && r.ohms > 0.0) {
                return Err(Error::InvalidInput(format!("resistor {i} has resistance {}", r.ohms)));
            }
        }
        for (i, s) in self.current_sources.iter().enumerate() {
            if !in_range(s.from) || !in_range(s.to) || s.from == s.to || !s.amps.is_finite() {
                return Err(Error::InvalidInput(format!("current source {i} is malformed")));
            }
        }
        let mut seen = vec![false; self.resistors.len()];
        for (i, s) in self.voltage_sources.iter().enumerate() {
            if s.across_resistor >= self.resistors.len() || !s.volts.is_finite() {
                return Err(Error::InvalidInput(format!("voltage source {i} is malformed")));
            }
            if std::mem::replace(&mut seen[s.across_resistor], true) {
                return Err(Error::InvalidSource(format!("two voltage sources across resistor {}", s.across_resistor)));
            }
        }
        Ok(())
    }
}

/// A current source after reduction: the resistor it drives and the chord
/// current it imposes along that resistor's orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct Carrier {
    pub source: usize,
    pub resistor: usize,
    /// `+1` when the source current flows along the resistor orientation.
    pub sign: f64,
}

/// The effective resistor graph together with its tree and bases.
#[derive(Debug, Clone)]
pub struct ReducedCircuit {
    /// Edge `i` is resistor `i`; weights are resistances.
    pub graph: WeightedGraph,
    /// Original vertex → effective vertex.
    pub vertex_map: Vec<usize>,
    pub tree: SpanningTree,
    pub basis: CycleCocycleBasis,
    pub carriers: Vec<Carrier>,
    /// Chord currents imposed by the current sources, in chord order.
    pub chord_currents: Vec<f64>,
    /// Tree voltages imposed by the voltage sources, in cochord order.
    pub tree_voltages: Vec<f64>,
    pub has_current_sources: bool,
    pub has_voltage_sources: bool,
}

pub fn reduce_netlist(n: &Netlist) -> Result<ReducedCircuit> {
    n.validate()?;
    let mut degree = vec![0usize; n.vertices];
    for r in &n.resistors {
        degree[r.from] += 1;
        degree[r.to] += 1;
    }
    for s in &n.current_sources {
        degree[s.from] += 1;
        degree[s.to] += 1;
    }

    let mut carriers = Vec::with_capacity(n.current_sources.len());
    let mut carried = vec![false; n.resistors.len()];
    for (k, s) in n.current_sources.iter().enumerate() {
        let carrier = find_carrier(n, &degree, k, s)?;
        if std::mem::replace(&mut carried[carrier.resistor], true) {
            return Err(Error::InvalidSource(format!("resistor {} carries two current sources", carrier.resistor)));
        }
        carriers.push(carrier);
    }

    let mut uf = UnionFind::new(n.vertices);
    for s in &n.current_sources {
        uf.union(s.from, s.to);
    }
    let mut root_id = vec![usize::MAX; n.vertices];
    let mut count = 0;
    let vertex_map: Vec<usize> = (0..n.vertices)
        .map(|v| {
            let r = uf.find(v);
            if root_id[r] == usize::MAX {
                root_id[r] = count;
                count += 1;
            }
            root_id[r]
        })
        .collect();
    let edges = n.resistors.iter().map(|r| (vertex_map[r.from], vertex_map[r.to])).collect();
    let graph = WeightedGraph::with_self_loops(count, edges, n.resistances())?;

    let has_current_sources = !carriers.is_empty();
    let has_voltage_sources = !n.voltage_sources.is_empty();
    let tree = if has_current_sources || has_voltage_sources {
        let mut candidate = None;
        if has_current_sources {
            let cotree: Vec<usize> = (0..n.resistors.len()).filter(|&e| !carried[e]).collect();
            candidate = Some(SpanningTree::from_edges(&graph, &cotree).map_err(|e| {
                Error::ShortCircuit(format!("resistors without current sources do not form a spanning tree ({e})"))
            })?);
        }
        if has_voltage_sources {
            let edges: Vec<usize> = n.voltage_sources.iter().map(|s| s.across_resistor).collect();
            let t = SpanningTree::from_edges(&graph, &edges)
                .map_err(|e| Error::ShortCircuit(format!("voltage sources do not sit on a spanning tree ({e})")))?;
            if candidate.as_ref().is_some_and(|c| *c != t) {
                return Err(Error::ShortCircuit(
                    "voltage sources are not on the complement of the current-source cotree".into(),
                ));
            }
            candidate = Some(t);
        }
        candidate.expect("at least one source kind")
    } else {
        spanning_tree(&graph)?
    };
    let basis = cycle_cocycle_basis(&graph, &tree);

    let chord_currents = basis
        .chords
        .iter()
        .map(|&e| carriers.iter().find(|c| c.resistor == e).map_or(0.0, |c| c.sign * n.current_sources[c.source].amps))
        .collect();
    let tree_voltages = basis
        .cochords
        .iter()
        .map(|&e| n.voltage_sources.iter().find(|s| s.across_resistor == e).map_or(0.0, |s| s.volts))
        .collect();

    Ok(ReducedCircuit {
        graph,
        vertex_map,
        tree,
        basis,
        carriers,
        chord_currents,
        tree_voltages,
        has_current_sources,
        has_voltage_sources,
    })
}

/// The carrier is the only resistor at an endpoint of degree two; the `to`
/// endpoint is tried first.
fn find_carrier(n: &Netlist, degree: &[usize], k: usize, s: &CurrentSourceSpec) -> Result<Carrier> {
    for node in [s.to, s.from] {
        if degree[node] != 2 {
            continue;
        }
        let others_sources =
            n.current_sources.iter().enumerate().any(|(j, o)| j != k && (o.from == node || o.to == node));
        if others_sources {
            continue;
        }
        let Some(resistor) = n.resistors.iter().position(|r| r.from == node || r.to == node) else { continue };
        let r = &n.resistors[resistor];
        // current enters the series node from the source and leaves through the carrier, or the reverse
        let along = if node == s.to { r.from == node } else { r.to == node };
        return Ok(Carrier { source: k, resistor, sign: if along { 1.0 } else { -1.0 } });
    }
    Err(Error::InvalidSource(format!("current source {k} is not in series with a single resistor")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DriveMode {
    Current,
    Voltage,
}

impl FromStr for DriveMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "current" => Ok(Self::Current),
            "voltage" => Ok(Self::Voltage),
            other => Err(Error::Parse(format!("unknown drive mode {other:?}"))),
        }
    }
}

impl fmt::Display for DriveMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Current => "current",
            Self::Voltage => "voltage",
        })
    }
}

/// Source values on the chords (current drive, amperes) or on the tree
/// (voltage drive, volts), with the scaled values `J = √R·I = V/√R`.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveVector {
    pub mode: DriveMode,
    /// Resistor index of each entry.
    pub edges: Vec<usize>,
    pub values: Vec<f64>,
    pub scaled: Vec<f64>,
}

impl DriveVector {
    pub fn new(circuit: &ReducedCircuit, mode: DriveMode, values: Vec<f64>) -> Result<Self> {
        let edges = match mode {
            DriveMode::Current => circuit.basis.chords.clone(),
            DriveMode::Voltage => circuit.basis.cochords.clone(),
        };
        if values.len() != edges.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} drive values for {} {mode} sources",
                values.len(),
                edges.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite drive value".into()));
        }
        let r = circuit.graph.weights();
        let scaled = edges
            .iter()
            .zip(&values)
            .map(|(&e, &v)| match mode {
                DriveMode::Current => r[e].sqrt() * v,
                DriveMode::Voltage => v / r[e].sqrt(),
            })
            .collect();
        Ok(Self { mode, edges, values, scaled })
    }

    /// The drive given by the netlist's own sources.
    pub fn from_sources(circuit: &ReducedCircuit, mode: DriveMode) -> Result<Self> {
        let values = match mode {
            DriveMode::Current => circuit.chord_currents.clone(),
            DriveMode::Voltage => circuit.tree_voltages.clone(),
        };
        Self::new(circuit, mode, values)
    }

    /// Replaces the values on the given resistors.
    pub fn with_overrides(&self, circuit: &ReducedCircuit, overrides: &[(usize, f64)]) -> Result<Self> {
        let mut values = self.values.clone();
        for &(edge, v) in overrides {
            let k = self
                .edges
                .iter()
                .position(|&e| e == edge)
                .ok_or_else(|| Error::InvalidInput(format!("resistor {edge} carries no {} source", self.mode)))?;
            values[k] = v;
        }
        Self::new(circuit, self.mode, values)
    }
}

/// `K0 = I + DᵀD`, the current-drive power form on the chords.
pub fn k0_power_form(circuit: &ReducedCircuit) -> SymMatrix {
    k0_from_d(&d_matrix(&circuit.basis, circuit.graph.weights()))
}

/// `Σ1 = I + DDᵀ`, the voltage-drive power form on the tree.
pub fn sigma1_power_form(circuit: &ReducedCircuit) -> SymMatrix {
    sigma1_from_d(&d_matrix(&circuit.basis, circuit.graph.weights()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerReport {
    pub mode: DriveMode,
    /// `"K0"` or `"Sigma1"`.
    pub form_used: &'static str,
    /// `JᵀKJ` from the power form.
    pub power: f64,
    /// Joule sum over the edges of the superposed solution.
    pub direct_power: f64,
    /// Joule sum over the edges of an independent dense Kirchhoff solve.
    pub oracle_power: f64,
}

impl PowerReport {
    pub fn rel_error(&self) -> f64 {
        let scale = self.power.abs().max(1.0);
        ((self.power - self.oracle_power).abs() / scale).max((self.power - self.direct_power).abs() / scale)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitSolution {
    /// Edge currents (current drive) or edge voltage drops (voltage drive), per resistor.
    pub edge_values: Vec<f64>,
    /// The same quantity from the dense oracle solve.
    pub oracle_values: Vec<f64>,
    pub report: PowerReport,
}

fn quadratic(form: &SymMatrix, j: &[f64]) -> f64 {
    let v = DVector::from_column_slice(j);
    v.dot(&(form.as_matrix() * &v))
}

/// Superposes the chord cycles: `I = Σ_α I_α c_α`.
pub fn solve_current_driven(circuit: &ReducedCircuit, drive: &DriveVector) -> Result<CircuitSolution> {
    if drive.mode != DriveMode::Current {
        return Err(Error::InvalidInput("current-driven solve needs a current drive".into()));
    }
    let m = circuit.graph.edge_count();
    let r = circuit.graph.weights();
    let mut currents = vec![0.0; m];
    for (c, &amps) in circuit.basis.cycles.iter().zip(&drive.values) {
        for e in 0..m {
            currents[e] += c[e] as f64 * amps;
        }
    }
    let oracle_values = kcl_oracle(circuit, &drive.values)?;
    let joule = |i: &[f64]| i.iter().zip(r).map(|(i, r)| r * i * i).sum();
    let report = PowerReport {
        mode: DriveMode::Current,
        form_used: "K0",
        power: quadratic(&k0_power_form(circuit), &drive.scaled),
        direct_power: joule(&currents),
        oracle_power: joule(&oracle_values),
    };
    Ok(CircuitSolution { edge_values: currents, oracle_values, report })
}

/// Conservation at all but one vertex plus the imposed chord currents, solved densely.
fn kcl_oracle(circuit: &ReducedCircuit, chord_values: &[f64]) -> Result<Vec<f64>> {
    let m = circuit.graph.edge_count();
    let n = circuit.graph.vertex_count();
    let delta = incidence_with_loops(&circuit.graph);
    let mut a = DMatrix::zeros(m, m);
    let mut rhs = DVector::zeros(m);
    for x in 0..n - 1 {
        for e in 0..m {
            a[(x, e)] = delta[(x, e)] as f64;
        }
    }
    for (k, (&alpha, &value)) in circuit.basis.chords.iter().zip(chord_values).enumerate() {
        a[(n - 1 + k, alpha)] = 1.0;
        rhs[n - 1 + k] = value;
    }
    let sol = a.lu().solve(&rhs).ok_or_else(|| Error::Singular("Kirchhoff current system".into()))?;
    Ok(sol.iter().copied().collect())
}

/// Superposes the tree cocycles: `V = Σ_μ V_μ c_μ`.
pub fn solve_voltage_driven(circuit: &ReducedCircuit, drive: &DriveVector) -> Result<CircuitSolution> {
    if drive.mode != DriveMode::Voltage {
        return Err(Error::InvalidInput("voltage-driven solve needs a voltage drive".into()));
    }
    let m = circuit.graph.edge_count();
    let r = circuit.graph.weights();
    let mut drops = vec![0.0; m];
    for (c, &volts) in circuit.basis.cocycles.iter().zip(&drive.values) {
        for e in 0..m {
            drops[e] += c[e] as f64 * volts;
        }
    }
    let oracle_values = potential_oracle(circuit, &drive.values)?;
    let joule = |v: &[f64]| v.iter().zip(r).map(|(v, r)| v * v / r).sum();
    let report = PowerReport {
        mode: DriveMode::Voltage,
        form_used: "Sigma1",
        power: quadratic(&sigma1_power_form(circuit), &drive.scaled),
        direct_power: joule(&drops),
        oracle_power: joule(&oracle_values),
    };
    Ok(CircuitSolution { edge_values: drops, oracle_values, report })
}

/// Vertex potentials with the last one grounded, fixed by the tree drops.
fn potential_oracle(circuit: &ReducedCircuit, tree_values: &[f64]) -> Result<Vec<f64>> {
    let n = circuit.graph.vertex_count();
    let edges = circuit.graph.edges();
    let mut a = DMatrix::zeros(n, n);
    let mut rhs = DVector::zeros(n);
    for (k, (&mu, &volts)) in circuit.basis.cochords.iter().zip(tree_values).enumerate() {
        let (from, to) = edges[mu];
        a[(k, from)] += 1.0;
        a[(k, to)] -= 1.0;
        rhs[k] = volts;
    }
    a[(n - 1, n - 1)] = 1.0;
    let phi = a.lu().solve(&rhs).ok_or_else(|| Error::Singular("potential system".into()))?;
    Ok(edges.iter().map(|&(from, to)| phi[from] - phi[to]).collect())
}

/// Unsigned pattern of the tree cocycles on the chords for the bridge network:
/// rows are the tree resistors 4, 5, 6 and columns the chords 1, 2, 3.
const BRIDGE_PATTERN: [[i64; 3]; 3] = [[1, 1, 0], [1, 0, 1], [0, 1, 1]];

#[derive(Debug, Clone)]
pub struct SelfDualityReport {
    pub transformed_resistances: Vec<f64>,
    pub spectra: SpectrumComparison,
    /// `perm[i]` is the row of `K0(R')` matched with row `i` of `Σ1(R)`.
    pub permutation: [usize; 3],
    pub signs: [f64; 3],
    pub entry_max_diff: f64,
    pub pass: bool,
}

/// `R1 ↔ 1/R6`, `R2 ↔ 1/R5`, `R3 ↔ 1/R4` applied to six resistances.
pub fn dual_resistances(r: &[f64]) -> Vec<f64> {
    (0..6).map(|i| 1.0 / r[5 - i]).collect()
}

/// Compares `K0` at the dual resistances with `Σ1` at the original ones, on
/// the six-resistor bridge network with chords `R1, R2, R3`.
pub fn self_duality_check(circuit: &ReducedCircuit, tol: f64) -> Result<SelfDualityReport> {
    let basis = &circuit.basis;
    let topology_ok = circuit.graph.edge_count() == 6
        && circuit.graph.vertex_count() == 4
        && basis.chords == [0, 1, 2]
        && basis.cochords == [3, 4, 5]
        && basis.cocycles.iter().zip(&BRIDGE_PATTERN).all(|(c, p)| (0..3).all(|a| c[a].abs() == p[a]));
    if !topology_ok {
        return Err(Error::WrongTopology("expected the six-resistor bridge with chords R1, R2, R3".into()));
    }
    let r = circuit.graph.weights();
    let dual = dual_resistances(r);
    let k0_dual = k0_from_d(&d_matrix(basis, &dual));
    let sigma1 = sigma1_power_form(circuit);
    let spectra = spectra_match(&numkit::spectrum(&k0_dual), &numkit::spectrum(&sigma1), &[1.0], tol);

    let (a, b) = (k0_dual.as_matrix(), sigma1.as_matrix());
    let mut best = ([0, 1, 2], [1.0; 3], f64::INFINITY);
    for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
        for mask in 0..8 {
            let signs: [f64; 3] = std::array::from_fn(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 });
            let diff = (0..9)
                .map(|k| {
                    let (i, j) = (k / 3, k % 3);
                    (a[(perm[i], perm[j])] * signs[i] * signs[j] - b[(i, j)]).abs()
                })
                .fold(0.0, f64::max);
            if diff < best.2 {
                best = (perm, signs, diff);
            }
        }
    }
    let scale = numkit::max_abs(b).max(1.0);
    let pass = spectra.matched && best.2 <= tol * scale;
    Ok(SelfDualityReport {
        transformed_resistances: dual,
        spectra,
        permutation: best.0,
        signs: best.1,
        entry_max_diff: best.2,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn bridge_network_reduces_to_four_vertices() {
        let c = reduce_netlist(&fixtures::bridge_netlist(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0])).unwrap();
        assert_eq!(c.graph.vertex_count(), 4);
        assert_eq!(c.graph.edge_count(), 6);
        assert_eq!(c.tree.tree_edges, vec![3, 4, 5]);
        assert_eq!(c.basis.chords, vec![0, 1, 2]);
    }

    #[test]
    fn printed_entries_at_one_through_six() {
        let r = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let c = reduce_netlist(&fixtures::bridge_netlist(&r)).unwrap();
        let k0 = k0_power_form(&c);
        let s1 = sigma1_power_form(&c);
        assert!((k0.as_matrix()[(0, 1)] + r[3] / (r[0] * r[1]).sqrt()).abs() < 1e-12);
        assert!((s1.as_matrix()[(0, 1)] + (r[3] * r[4]).sqrt() / r[0]).abs() < 1e-12);
    }

    #[test]
    fn unit_drive_on_first_chord_dissipates_three_watts() {
        let c = reduce_netlist(&fixtures::bridge_netlist(&[1.0; 6])).unwrap();
        let drive = DriveVector::new(&c, DriveMode::Current, vec![1.0, 0.0, 0.0]).unwrap();
        let sol = solve_current_driven(&c, &drive).unwrap();
        assert!((sol.report.power - 3.0).abs() < 1e-12, "{:?}", sol.report);
        assert!(sol.report.rel_error() < 1e-12);
    }

    #[test]
    fn zero_drive_gives_zero_power() {
        let c = reduce_netlist(&fixtures::bridge_netlist(&[1.0; 6])).unwrap();
        for mode in [DriveMode::Current, DriveMode::Voltage] {
            let drive = DriveVector::new(&c, mode, vec![0.0; 3]).unwrap();
            let sol = match mode {
                DriveMode::Current => solve_current_driven(&c, &drive),
                DriveMode::Voltage => solve_voltage_driven(&c, &drive),
            }
            .unwrap();
            assert_eq!(sol.report.power, 0.0);
            assert!(sol.edge_values.iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn single_loop_has_one_chord_and_empty_tree() {
        let n = Netlist {
            vertices: 2,
            resistors: vec![ResistorSpec { from: 1, to: 0, ohms: 2.0 }],
            current_sources: vec![CurrentSourceSpec { from: 0, to: 1, amps: 3.0 }],
            voltage_sources: vec![],
        };
        let c = reduce_netlist(&n).unwrap();
        assert_eq!(c.basis.chords, vec![0]);
        assert!(c.tree.tree_edges.is_empty());
        assert_eq!(c.chord_currents, vec![3.0]);
        let sol = solve_current_driven(&c, &DriveVector::from_sources(&c, DriveMode::Current).unwrap()).unwrap();
        assert!((sol.report.power - 18.0).abs() < 1e-12);
        assert!(sol.report.rel_error() < 1e-12);
    }

    #[test]
    fn voltage_sources_on_a_cycle_short_circuit() {
        let n = Netlist {
            vertices: 2,
            resistors: vec![ResistorSpec { from: 0, to: 1, ohms: 1.0 }, ResistorSpec { from: 0, to: 1, ohms: 2.0 }],
            current_sources: vec![],
            voltage_sources: vec![
                VoltageSourceSpec { across_resistor: 0, volts: 1.0 },
                VoltageSourceSpec { across_resistor: 1, volts: 1.0 },
            ],
        };
        assert!(matches!(reduce_netlist(&n), Err(Error::ShortCircuit(_))));
    }

    #[test]
    fn drive_overrides_are_keyed_by_resistor() {
        let c = reduce_netlist(&fixtures::bridge_netlist(&[1.0; 6])).unwrap();
        let d = DriveVector::from_sources(&c, DriveMode::Voltage).unwrap();
        let d = d.with_overrides(&c, &[(4, 2.5)]).unwrap();
        assert_eq!(d.values[1], 2.5);
        assert!(d.with_overrides(&c, &[(0, 1.0)]).is_err());
    }

    #[test]
    fn unit_resistances_are_self_dual() {
        let c = reduce_netlist(&fixtures::bridge_netlist(&[1.0; 6])).unwrap();
        let report = self_duality_check(&c, 1e-8).unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("voltage".parse::<DriveMode>().unwrap(), DriveMode::Voltage);
        assert!("ac".parse::<DriveMode>().is_err());
    }
}
