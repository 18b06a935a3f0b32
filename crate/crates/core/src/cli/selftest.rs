//! Built-in reproduction of the worked examples plus seeded property suites.
//!
//! Every case draws from its own ChaCha stream, keyed by suite and case
//! index, so a case can be rerun in isolation and the report does not depend
//! on evaluation order.

use nalgebra::DMatrix;
use rand::Rng;
use serde_json::{json, Map, Value};

use super::commands::{header, Outcome};
use super::RunConfig;
use crate::circuits::{
    k0_power_form, reduce_netlist, self_duality_check, sigma1_power_form, solve_current_driven, solve_voltage_driven,
    DriveMode, DriveVector,
};
use crate::error::Result;
use crate::fixtures;
use crate::graphcycles::{
    cycle_cocycle_basis, d_matrix, eigvec_unit_check, k0_from_d, sigma1_from_d, spanning_tree, tree_polynomials,
};
use crate::numkit::{self, charpoly, max_abs, CharPoly};
use crate::oblique::{
    analyze_pair, singular_value_duality, validate_projection_pair, MetricSpace, PairAnalysis, PROJECTION_TOL,
};
use crate::random::{self, Rng64};
use crate::susy::{build_susy, ground_states, HamiltonianBlocks};

/// Weight tuples drawn for each parametric fixture.
const FIXTURE_SAMPLES: usize = 25;
const MAX_FAILURES_LISTED: usize = 5;

const FORM_TOL: f64 = 1e-10;
const POLY_TOL: f64 = 1e-9;
const POWER_TOL: f64 = 1e-9;
const SUSY_TOL: f64 = 1e-10;
const SVD_TOL: f64 = 1e-9;

#[derive(Clone, Copy)]
enum Stream {
    GraphWeights = 1,
    BridgeForms,
    BridgePower,
    BridgeDuality,
    Oblique,
    TreePolynomials,
    SingularValues,
    CircuitPower,
}

fn case_rng(seed: u64, stream: Stream, case: usize) -> Rng64 {
    let mut rng = random::rng(seed);
    rng.set_stream(((stream as u64) << 32) | case as u64);
    rng
}

struct Check {
    name: &'static str,
    pass: bool,
    details: Map<String, Value>,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Self { name, pass: true, details: Map::new() }
    }

    fn record(&mut self, key: &str, value: Value) {
        self.details.insert(key.into(), value);
    }

    fn require(&mut self, ok: bool, message: impl FnOnce() -> String) {
        if !ok && self.pass {
            self.pass = false;
            self.details.insert("failure".into(), json!(message()));
        }
    }

    fn into_value(self) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), json!(self.name));
        m.insert("pass".into(), json!(self.pass));
        m.extend(self.details);
        Value::Object(m)
    }
}

fn entry_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    max_abs(&(a - b))
}

fn worked_analysis(tol: f64, zero_tol: f64) -> Result<PairAnalysis> {
    let (p0, p1, g) = fixtures::worked_projection_matrices();
    let pair = validate_projection_pair(p0, p1, PROJECTION_TOL)?;
    let space = MetricSpace::with_metric(g)?;
    analyze_pair(&pair, &space, tol, zero_tol)
}

fn worked_projections(cfg: &RunConfig) -> Check {
    let mut c = Check::new("worked-projections");
    let a = match worked_analysis(cfg.tol, cfg.zero_tol) {
        Ok(a) => a,
        Err(e) => {
            c.require(false, || e.to_string());
            return c;
        }
    };
    let t1 = &a.theorem1;
    c.record("ratios", json!([t1.lhs1, t1.lhs2, t1.rhs]));
    let target = fixtures::WORKED_DET_PLUS_G;
    let worst = [t1.lhs1, t1.lhs2, t1.rhs].iter().map(|x| (x - target).abs()).fold(0.0, f64::max);
    c.require(worst <= 1e-9, || format!("ratios deviate from {target} by {worst:e}"));
    let shared = a.theorem2.comparisons[0].1.kept_a.clone();
    c.record("shared_eigenvalues", json!(shared));
    let printed = fixtures::WORKED_SHARED_EIGENVALUES;
    let close = shared.len() == printed.len() && shared.iter().zip(printed).all(|(x, p)| (x - p).abs() <= 0.01);
    c.require(close, || format!("shared eigenvalues {shared:?}, printed {printed:?}"));
    c.require(a.theorem2.pass, || "partner spectra disagree".into());
    c
}

fn worked_graph_unit() -> Check {
    let mut c = Check::new("worked-graph-unit-weights");
    let g = fixtures::worked_graph(&[1.0; 5]);
    let Ok(tree) = spanning_tree(&g) else {
        c.require(false, || "no spanning tree".into());
        return c;
    };
    let basis = cycle_cocycle_basis(&g, &tree);
    let poly = tree_polynomials(&g, &basis);
    c.record("det_L0", json!(poly.det_l0));
    c.record("tree_count", json!(poly.tree_count));
    c.require((poly.det_l0 - 8.0).abs() <= POLY_TOL && poly.tree_count == Some(8), || {
        format!("det L0 = {}, {:?} trees", poly.det_l0, poly.tree_count)
    });
    let d = d_matrix(&basis, g.weights());
    let sk = numkit::spectrum(&k0_from_d(&d)).values;
    let ss = numkit::spectrum(&sigma1_from_d(&d)).values;
    c.record("K0", json!(sk));
    c.record("Sigma1", json!(ss));
    let near = |got: &[f64], want: &[f64]| {
        got.len() == want.len() && got.iter().zip(want).all(|(x, y)| (x - y).abs() <= POLY_TOL)
    };
    c.require(near(&sk, &[4.0, 2.0]) && near(&ss, &[4.0, 2.0, 1.0]), || format!("spectra {sk:?} and {ss:?}"));
    c
}

fn worked_graph_weights(cfg: &RunConfig) -> Check {
    let mut c = Check::new("worked-graph-random-weights");
    let mut worst = [0.0_f64; 3];
    for case in 0..FIXTURE_SAMPLES {
        let mut rng = case_rng(cfg.seed, Stream::GraphWeights, case);
        let w: Vec<f64> = (0..5).map(|_| random::log_uniform(&mut rng, 0.1, 10.0)).collect();
        let g = fixtures::worked_graph(&w);
        let basis = cycle_cocycle_basis(&g, &spanning_tree(&g).expect("connected fixture"));
        let d = d_matrix(&basis, &w);
        let (k0, sigma1) = (k0_from_d(&d), sigma1_from_d(&d));
        let forms = entry_diff(k0.as_matrix(), &fixtures::worked_graph_k0(&w))
            .max(entry_diff(sigma1.as_matrix(), &fixtures::worked_graph_sigma1(&w)));
        let (x, y) = fixtures::worked_graph_x_y(&w);
        let zeta0 = CharPoly { coefficients: vec![1.0, -(x + 2.0), y] };
        let p0 = charpoly(k0.as_matrix());
        let poly = p0.max_rel_diff(&zeta0).max(charpoly(sigma1.as_matrix()).max_rel_diff(&p0.times_linear(1.0)));
        let eigvec = eigvec_unit_check(&basis, &w).unwrap_or(f64::INFINITY);
        let errs = [forms, poly, eigvec];
        for (m, e) in worst.iter_mut().zip(errs) {
            *m = m.max(e);
        }
        c.require(forms <= FORM_TOL, || format!("case {case}: printed forms off by {forms:e}"));
        c.require(poly <= POLY_TOL, || format!("case {case}: characteristic polynomials off by {poly:e}"));
        c.require(eigvec <= POLY_TOL, || format!("case {case}: unit eigenvector residual {eigvec:e}"));
    }
    c.record("samples", json!(FIXTURE_SAMPLES));
    c.record("max_form_error", json!(worst[0]));
    c.record("max_polynomial_error", json!(worst[1]));
    c.record("max_eigenvector_residual", json!(worst[2]));
    c
}

fn bridge_resistances(rng: &mut Rng64) -> Vec<f64> {
    (0..6).map(|_| random::log_uniform(rng, 0.1, 10.0)).collect()
}

fn bridge_forms(cfg: &RunConfig) -> Check {
    let mut c = Check::new("bridge-printed-forms");
    let mut worst = 0.0_f64;
    for case in 0..FIXTURE_SAMPLES {
        let r = bridge_resistances(&mut case_rng(cfg.seed, Stream::BridgeForms, case));
        let err = match reduce_netlist(&fixtures::bridge_netlist(&r)) {
            Ok(circuit) => entry_diff(k0_power_form(&circuit).as_matrix(), &fixtures::bridge_k0(&r))
                .max(entry_diff(sigma1_power_form(&circuit).as_matrix(), &fixtures::bridge_sigma1(&r))),
            Err(e) => {
                c.require(false, || format!("case {case}: {e}"));
                continue;
            }
        };
        worst = worst.max(err);
        c.require(err <= FORM_TOL, || format!("case {case}: entries off by {err:e}"));
    }
    c.record("samples", json!(FIXTURE_SAMPLES));
    c.record("max_entry_error", json!(worst));
    c
}

fn bridge_power(cfg: &RunConfig) -> Check {
    let mut c = Check::new("bridge-power");
    let zero = reduce_netlist(&fixtures::bridge_netlist(&[1.0; 6])).and_then(|circuit| {
        let drive = DriveVector::new(&circuit, DriveMode::Current, vec![0.0; 3])?;
        Ok(solve_current_driven(&circuit, &drive)?.report.power)
    });
    match zero {
        Ok(power) => {
            c.record("zero_drive_power", json!(power));
            c.require(power == 0.0, || format!("zero drive dissipates {power}"));
        }
        Err(e) => {
            c.require(false, || e.to_string());
            return c;
        }
    }
    let mut worst = 0.0_f64;
    for case in 0..FIXTURE_SAMPLES {
        let mut rng = case_rng(cfg.seed, Stream::BridgePower, case);
        let r = bridge_resistances(&mut rng);
        let result = reduce_netlist(&fixtures::bridge_netlist(&r)).and_then(|circuit| {
            let mut err = 0.0_f64;
            for mode in [DriveMode::Current, DriveMode::Voltage] {
                let values = (0..3).map(|_| rng.random_range(-2.0..=2.0)).collect();
                let drive = DriveVector::new(&circuit, mode, values)?;
                let sol = match mode {
                    DriveMode::Current => solve_current_driven(&circuit, &drive)?,
                    DriveMode::Voltage => solve_voltage_driven(&circuit, &drive)?,
                };
                err = err.max(sol.report.rel_error());
            }
            Ok(err)
        });
        match result {
            Ok(err) => {
                worst = worst.max(err);
                c.require(err <= POWER_TOL, || format!("case {case}: power off by {err:e}"));
            }
            Err(e) => c.require(false, || format!("case {case}: {e}")),
        }
    }
    c.record("samples", json!(FIXTURE_SAMPLES));
    c.record("max_rel_error", json!(worst));
    c
}

fn bridge_duality(cfg: &RunConfig) -> Check {
    let mut c = Check::new("bridge-self-duality");
    let mut worst = 0.0_f64;
    for case in 0..FIXTURE_SAMPLES {
        let r = bridge_resistances(&mut case_rng(cfg.seed, Stream::BridgeDuality, case));
        match reduce_netlist(&fixtures::bridge_netlist(&r)).and_then(|circuit| self_duality_check(&circuit, 1e-8)) {
            Ok(report) => {
                worst = worst.max(report.spectra.max_diff);
                c.require(report.pass, || format!("case {case}: {}", report.spectra.report));
            }
            Err(e) => c.require(false, || format!("case {case}: {e}")),
        }
    }
    c.record("samples", json!(FIXTURE_SAMPLES));
    c.record("max_spectrum_diff", json!(worst));
    c
}

/// The worked pair with one diagonal entry of `P0` perturbed; it must be rejected.
fn injected_fault() -> Check {
    let mut c = Check::new("injected-fault");
    let (mut p0, p1, _) = fixtures::worked_projection_matrices();
    p0[(1, 1)] += 1e-3;
    match validate_projection_pair(p0, p1, PROJECTION_TOL) {
        Ok(_) => c.require(false, || "perturbed pair was accepted".into()),
        Err(e) => c.require(false, || format!("{e:?}")),
    }
    c
}

struct Suite {
    name: &'static str,
    cases: usize,
    passed: usize,
    max_error: f64,
    failures: Vec<(usize, String)>,
}

impl Suite {
    fn run(name: &'static str, cases: usize, mut case: impl FnMut(usize) -> std::result::Result<f64, String>) -> Self {
        let mut s = Self { name, cases, passed: 0, max_error: 0.0, failures: Vec::new() };
        for i in 0..cases {
            match case(i) {
                Ok(err) => {
                    s.passed += 1;
                    s.max_error = s.max_error.max(err);
                }
                Err(msg) => s.failures.push((i, msg)),
            }
        }
        s
    }

    fn into_value(self) -> Value {
        let failed = self.failures.len();
        json!({
            "name": self.name,
            "cases": self.cases,
            "passed": self.passed,
            "failed": failed,
            "max_error": self.max_error,
            "failures": self.failures.into_iter().take(MAX_FAILURES_LISTED)
                .map(|(case, message)| json!({ "case": case, "message": message }))
                .collect::<Vec<_>>(),
        })
    }
}

fn check(err: f64, tol: f64, what: &str) -> std::result::Result<f64, String> {
    if err <= tol {
        Ok(err)
    } else {
        Err(format!("{what} error {err:e} exceeds {tol:e}"))
    }
}

fn oblique_case(cfg: &RunConfig, case: usize) -> std::result::Result<PairAnalysis, String> {
    let mut rng = case_rng(cfg.seed, Stream::Oblique, case);
    let (pair, space) = random::random_instance(&mut rng, 10);
    analyze_pair(&pair, &space, cfg.tol, cfg.zero_tol).map_err(|e| e.to_string())
}

fn suites(cfg: &RunConfig) -> Vec<Suite> {
    let n = cfg.cases;
    vec![
        Suite::run("theorem1", n, |i| {
            let a = oblique_case(cfg, i)?;
            check(a.theorem1.max_rel_error(), cfg.tol, "pseudodeterminant ratio")
        }),
        Suite::run("theorem2", n, |i| {
            let t2 = oblique_case(cfg, i)?.theorem2;
            if !t2.multiplicity_ok {
                return Err(format!("multiplicities {:?}", t2.multiplicities));
            }
            if let Some(m) = t2.min_nonzero.filter(|&m| m < 1.0 - cfg.tol) {
                return Err(format!("nonzero eigenvalue {m} below one"));
            }
            let diff = t2.comparisons.iter().map(|(_, c)| c.max_diff).fold(0.0, f64::max);
            check(diff, cfg.tol, "spectrum")
        }),
        Suite::run("susy", n, |i| {
            let a = oblique_case(cfg, i)?;
            let pair =
                build_susy(&a.bridge, &a.forms, HamiltonianBlocks::K0Sigma1, SUSY_TOL).map_err(|e| e.to_string())?;
            let r = a.bridge.rank;
            let expected = (a.blocks.n0() - r) + (a.blocks.n1() - r);
            let dim = ground_states(&pair).dimension;
            if dim != expected {
                return Err(format!("kernel dimension {dim}, expected {expected}"));
            }
            Ok(pair.residuals.max())
        }),
        Suite::run("tree-polynomials", n, |i| {
            let mut rng = case_rng(cfg.seed, Stream::TreePolynomials, i);
            let g = random::random_connected_graph(&mut rng, 8, 12);
            let basis = cycle_cocycle_basis(&g, &spanning_tree(&g).map_err(|e| e.to_string())?);
            let poly = tree_polynomials(&g, &basis);
            let oracle = poly.oracle_error().ok_or("graph too large to enumerate")?;
            check(poly.duality_error().max(oracle), POLY_TOL, "tree polynomial")
        }),
        Suite::run("singular-values", n, |i| {
            let mut rng = case_rng(cfg.seed, Stream::SingularValues, i);
            let size = rng.random_range(2..=10);
            let pair = random::random_projection_pair(&mut rng, size);
            let report = singular_value_duality(&pair, SVD_TOL);
            if !report.matched {
                return Err(report.comparison.report);
            }
            Ok(report.comparison.max_diff.max((report.norm0 - report.norm1).abs()))
        }),
        Suite::run("circuit-power", n, |i| {
            let mut rng = case_rng(cfg.seed, Stream::CircuitPower, i);
            let netlist = random::random_netlist(&mut rng, 6, 10);
            let circuit = reduce_netlist(&netlist).map_err(|e| e.to_string())?;
            let mut err = 0.0_f64;
            for mode in [DriveMode::Current, DriveMode::Voltage] {
                let drive = DriveVector::from_sources(&circuit, mode).map_err(|e| e.to_string())?;
                let sol = match mode {
                    DriveMode::Current => solve_current_driven(&circuit, &drive),
                    DriveMode::Voltage => solve_voltage_driven(&circuit, &drive),
                }
                .map_err(|e| e.to_string())?;
                err = err.max(sol.report.rel_error());
            }
            check(err, POWER_TOL, "power")
        }),
    ]
}

pub fn run(cfg: &RunConfig, inject_fault: bool) -> Outcome {
    let mut checks = vec![
        worked_projections(cfg),
        worked_graph_unit(),
        worked_graph_weights(cfg),
        bridge_forms(cfg),
        bridge_power(cfg),
        bridge_duality(cfg),
    ];
    if inject_fault {
        checks.push(injected_fault());
    }
    let suites = suites(cfg);
    let pass = checks.iter().all(|c| c.pass) && suites.iter().all(|s| s.failures.is_empty());

    let mut report = header("selftest");
    report.insert("seed".into(), json!(cfg.seed));
    report.insert("cases".into(), json!(cfg.cases));
    report.insert("fixtures".into(), Value::Array(checks.into_iter().map(Check::into_value).collect()));
    report.insert("suites".into(), Value::Array(suites.into_iter().map(Suite::into_value).collect()));
    report.insert("pass".into(), json!(pass));
    Outcome { report: Value::Object(report), pass }
}
