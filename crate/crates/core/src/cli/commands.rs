use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use super::RunConfig;
use crate::circuits::{
    k0_power_form, reduce_netlist, self_duality_check, sigma1_power_form, solve_current_driven, solve_voltage_driven,
    DriveMode, DriveVector, Netlist, ReducedCircuit,
};
use crate::error::{Error, Result};
use crate::graphcycles::{
    cycle_cocycle_basis, d_matrix, eigvec_unit_check, graph_metric_blocks, k0_from_d, sigma1_from_d, spanning_tree,
    tree_polynomials, WeightedGraph,
};
use crate::numkit::{self, matrix_from_rows, matrix_to_rows, max_abs, spectra_match, Spectrum, SymMatrix};
use crate::oblique::{
    analyze_blocks, analyze_pair, validate_projection_pair, MetricSpace, PairAnalysis, PROJECTION_TOL,
};
use crate::susy::{build_susy, ground_states};

/// A finished report and whether every check in it passed.
pub struct Outcome {
    pub report: Value,
    pub pass: bool,
}

pub(crate) fn read_input(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

pub(crate) fn header(command: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), json!(super::output::SCHEMA));
    m.insert("command".into(), json!(command));
    m
}

pub(crate) fn matrix(m: &DMatrix<f64>) -> Value {
    json!(matrix_to_rows(m))
}

fn int_rows(rows: &[Vec<i64>]) -> Value {
    json!(rows)
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn spectrum_of(m: &SymMatrix, rel_tol: f64) -> Spectrum {
    numkit::sym_eig_with_tol(m, rel_tol).spectrum
}

/// Theorem sections shared by the projection and graph commands.
pub(crate) fn analysis_sections(a: &PairAnalysis, cfg: &RunConfig) -> Map<String, Value> {
    let t1 = &a.theorem1;
    let p = &t1.pseudodets;
    let oracle = match &a.oracle {
        None => Value::Null,
        Some(Err(e)) => json!({ "error": e.to_string() }),
        Some(Ok(o)) => json!({
            "det_plus": { "L0": o.l0, "L1": o.l1, "Gamma0": o.gamma0, "Gamma1": o.gamma1, "G": o.g },
            "max_rel_error": a.oracle_error().map_or(Value::Null, finite_or_null),
        }),
    };
    let t2 = &a.theorem2;
    let [k0, k1, s0, s1] = &t2.spectra;
    let shared = t2.comparisons.first().map(|(_, c)| c.kept_a.clone()).unwrap_or_default();
    let max_diff = t2.comparisons.iter().map(|(_, c)| c.max_diff).fold(0.0, f64::max);
    let comparisons: Map<String, Value> = t2
        .comparisons
        .iter()
        .map(|(name, c)| (name.clone(), json!({ "matched": c.matched, "max_diff": finite_or_null(c.max_diff) })))
        .collect();
    let multiplicities: Map<String, Value> = t2
        .multiplicities
        .iter()
        .map(|m| {
            (
                m.name.to_string(),
                json!({
                    "above_one": m.above_one,
                    "one": m.one,
                    "zero": m.zero,
                    "expected": [m.expected.0, m.expected.1, m.expected.2],
                }),
            )
        })
        .collect();

    let mut out = Map::new();
    out.insert(
        "theorem1".into(),
        json!({
            "det_plus": { "L0": p.l0, "L1": p.l1, "Gamma0": p.gamma0, "Gamma1": p.gamma1, "G": p.g },
            "L1_over_Gamma0": t1.lhs1,
            "L0_over_Gamma1": t1.lhs2,
            "det_plus_G": t1.rhs,
            "max_rel_error": finite_or_null(t1.max_rel_error()),
            "operator_oracle": oracle,
            "pass": t1.pass,
        }),
    );
    out.insert(
        "theorem2".into(),
        json!({
            "spectra": { "K0": k0.values, "K1": k1.values, "Sigma0": s0.values, "Sigma1": s1.values },
            "shared": shared,
            "max_diff": finite_or_null(max_diff),
            "comparisons": comparisons,
            "min_nonzero": t2.min_nonzero,
            "rank": t2.rank,
            "multiplicities": multiplicities,
            "multiplicity_ok": t2.multiplicity_ok,
            "pass": t2.pass,
        }),
    );
    let b = &a.bridge;
    out.insert(
        "bridge".into(),
        json!({
            "D": matrix(&b.d),
            "singular_values": b.singular_values,
            "max_residual": b.max_residual(),
        }),
    );
    out.insert("block_residuals".into(), json!(a.multi_residuals));
    let susy = match build_susy(&a.bridge, &a.forms, cfg.susy_blocks, cfg.tol) {
        Ok(pair) => {
            let gs = ground_states(&pair);
            let r = pair.residuals;
            json!({
                "blocks": cfg.susy_blocks.to_string(),
                "residuals": {
                    "H_Q": r.h_q, "H_Qt": r.h_qt, "Q_Q": r.q_q, "Qt_Qt": r.qt_qt,
                    "Q_Qt_minus_H": r.anticommutator, "Qplus2_minus_H": r.q_plus, "Qminus2_minus_H": r.q_minus,
                    "max": r.max(), "absolute": r.absolute,
                },
                "ground_state_dimension": gs.dimension,
                "ground_state_split": [gs.split.0, gs.split.1],
                "pass": true,
            })
        }
        Err(e) => json!({ "blocks": cfg.susy_blocks.to_string(), "error": e.to_string(), "pass": false }),
    };
    out.insert("susy".into(), susy);
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProjectionFile {
    #[serde(rename = "P0")]
    p0: Vec<Vec<f64>>,
    #[serde(rename = "P1")]
    p1: Vec<Vec<f64>>,
    #[serde(rename = "G")]
    g: Vec<Vec<f64>>,
    #[serde(rename = "H", default)]
    h: Option<Vec<Vec<f64>>>,
}

fn symmetric_input(rows: &[Vec<f64>], name: &str) -> Result<SymMatrix> {
    let m = matrix_from_rows(rows)?;
    if m.is_square() && max_abs(&(&m - m.transpose())) > 1e-12 * max_abs(&m).max(1.0) {
        return Err(Error::InvalidInput(format!("{name} is not symmetric")));
    }
    SymMatrix::new(m)
}

pub fn verify_projections(path: &Path, cfg: &RunConfig) -> Result<Outcome> {
    let text = read_input(path)?;
    let file: ProjectionFile = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    let pair = validate_projection_pair(matrix_from_rows(&file.p0)?, matrix_from_rows(&file.p1)?, PROJECTION_TOL)?;
    let g = symmetric_input(&file.g, "G")?;
    let space = match &file.h {
        Some(h) => MetricSpace::new(symmetric_input(h, "H")?, g)?,
        None => MetricSpace::with_metric(g)?,
    };
    let a = analyze_pair(&pair, &space, cfg.tol, cfg.zero_tol)?;
    let mut report = header("verify-projections");
    report.insert("dimension".into(), json!({ "n": pair.dim(), "n0": pair.n0(), "n1": pair.n1() }));
    report.insert("h_is_identity".into(), json!(space.h_is_identity()));
    report.extend(analysis_sections(&a, cfg));
    let pass = a.pass();
    report.insert("pass".into(), json!(pass));
    Ok(Outcome { report: Value::Object(report), pass })
}

pub fn graph_analyze(path: &Path, cfg: &RunConfig) -> Result<Outcome> {
    let g = WeightedGraph::from_json(&read_input(path)?)?;
    let tree = match cfg.tree_strategy {
        super::TreeStrategy::Dfs => spanning_tree(&g)?,
    };
    let basis = cycle_cocycle_basis(&g, &tree);
    basis.verify(&g)?;

    let mut report = header("graph analyze");
    report.insert("vertices".into(), json!(g.vertex_count()));
    report.insert("edges".into(), json!(g.edges().iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>()));
    report.insert("weights".into(), json!(g.weights()));
    report.insert("tree_strategy".into(), json!(cfg.tree_strategy.name()));
    report.insert("tree_edges".into(), json!(tree.tree_edges));
    report.insert("chords".into(), json!(basis.chords));
    report.insert("cochords".into(), json!(basis.cochords));
    report.insert("cycles".into(), int_rows(&basis.cycles));
    report.insert("cocycles".into(), int_rows(&basis.cocycles));

    let poly = tree_polynomials(&g, &basis);
    let duality_error = poly.duality_error();
    let oracle_error = poly.oracle_error();
    let poly_ok = duality_error <= cfg.tol && oracle_error.is_none_or(|e| e <= cfg.tol);
    report.insert(
        "tree_polynomials".into(),
        json!({
            "det_L0": poly.det_l0,
            "det_Gamma1": poly.det_gamma1,
            "det_G": poly.det_g,
            "duality_error": finite_or_null(duality_error),
            "tree_count": poly.tree_count,
            "oracle_L0": poly.oracle_l0,
            "oracle_Gamma1": poly.oracle_gamma1,
            "oracle_error": oracle_error.map_or(Value::Null, finite_or_null),
            "pass": poly_ok,
        }),
    );

    let mut pass = poly_ok;
    if basis.chords.is_empty() {
        report.insert("status".into(), json!("no cycles"));
    } else {
        let d = d_matrix(&basis, g.weights());
        let (k0, sigma1) = (k0_from_d(&d), sigma1_from_d(&d));
        report.insert("D".into(), matrix(&d));
        report.insert("K0".into(), matrix(k0.as_matrix()));
        report.insert("Sigma1".into(), matrix(sigma1.as_matrix()));
        let (space, blocks) = graph_metric_blocks(&g, &basis)?;
        let a = analyze_blocks(blocks, &space, cfg.tol, cfg.zero_tol)?;
        report.extend(analysis_sections(&a, cfg));
        pass &= a.pass();
        if let Ok(residual) = eigvec_unit_check(&basis, g.weights()) {
            let ok = residual <= cfg.tol;
            report.insert("unit_eigenvector".into(), json!({ "residual": residual, "pass": ok }));
            pass &= ok;
        }
    }
    report.insert("pass".into(), json!(pass));
    Ok(Outcome { report: Value::Object(report), pass })
}

fn default_mode(circuit: &ReducedCircuit) -> DriveMode {
    if !circuit.has_current_sources && circuit.has_voltage_sources {
        DriveMode::Voltage
    } else {
        DriveMode::Current
    }
}

pub fn circuit_analyze(
    path: &Path,
    drive: &[(usize, f64)],
    mode: Option<DriveMode>,
    cfg: &RunConfig,
) -> Result<Outcome> {
    let netlist = Netlist::from_json(&read_input(path)?)?;
    let circuit = reduce_netlist(&netlist)?;
    let mode = mode.unwrap_or_else(|| default_mode(&circuit));
    let drive = DriveVector::from_sources(&circuit, mode)?.with_overrides(&circuit, drive)?;
    let solution = match mode {
        DriveMode::Current => solve_current_driven(&circuit, &drive)?,
        DriveMode::Voltage => solve_voltage_driven(&circuit, &drive)?,
    };

    let mut report = header("circuit analyze");
    let g = &circuit.graph;
    report.insert(
        "reduced".into(),
        json!({
            "vertices": g.vertex_count(),
            "vertex_map": circuit.vertex_map,
            "edges": g.edges().iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>(),
            "resistances": g.weights(),
            "tree_edges": circuit.tree.tree_edges,
            "chords": circuit.basis.chords,
            "cochords": circuit.basis.cochords,
            "carriers": circuit.carriers.iter().map(|c| json!({
                "source": c.source, "resistor": c.resistor, "sign": c.sign,
            })).collect::<Vec<_>>(),
        }),
    );
    let (k0, sigma1) = (k0_power_form(&circuit), sigma1_power_form(&circuit));
    report.insert("K0".into(), matrix(k0.as_matrix()));
    report.insert("Sigma1".into(), matrix(sigma1.as_matrix()));
    let (sk, ss) = (spectrum_of(&k0, cfg.zero_tol), spectrum_of(&sigma1, cfg.zero_tol));
    let cmp = spectra_match(&sk, &ss, &[1.0], cfg.tol);
    report.insert(
        "spectra".into(),
        json!({
            "K0": sk.values,
            "Sigma1": ss.values,
            "shared": cmp.kept_a,
            "max_diff": finite_or_null(cmp.max_diff),
            "matched": cmp.matched,
        }),
    );

    let r = &solution.report;
    let power_error = r.rel_error();
    let power_ok = power_error <= cfg.tol;
    report.insert(
        "power".into(),
        json!({
            "mode": mode.to_string(),
            "form": r.form_used,
            "drive_edges": drive.edges,
            "drive_values": drive.values,
            "scaled_drive": drive.scaled,
            "quadratic_form": r.power,
            "superposition": r.direct_power,
            "kirchhoff_oracle": r.oracle_power,
            "rel_error": finite_or_null(power_error),
            "edge_values": solution.edge_values,
            "pass": power_ok,
        }),
    );

    let mut pass = cmp.matched && power_ok;
    match self_duality_check(&circuit, cfg.tol) {
        Ok(sd) => {
            report.insert(
                "self_duality".into(),
                json!({
                    "applicable": true,
                    "transformed_resistances": sd.transformed_resistances,
                    "spectra_max_diff": finite_or_null(sd.spectra.max_diff),
                    "permutation": sd.permutation,
                    "signs": sd.signs,
                    "entry_max_diff": sd.entry_max_diff,
                    "pass": sd.pass,
                }),
            );
            pass &= sd.pass;
        }
        Err(Error::WrongTopology(_)) => {
            report.insert("self_duality".into(), json!({ "applicable": false }));
        }
        Err(e) => return Err(e),
    }
    report.insert("pass".into(), json!(pass));
    Ok(Outcome { report: Value::Object(report), pass })
}
