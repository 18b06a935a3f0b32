//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
//! Every check compares the tool against an oracle defined in this file or in
//! `common`, never against another of the tool's own code paths.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use oblique_kit::circuits::{
    k0_power_form, reduce_netlist, self_duality_check, sigma1_power_form, solve_current_driven, solve_voltage_driven,
    DriveMode, DriveVector, Netlist,
};
use oblique_kit::graphcycles::{
    cycle_cocycle_basis, d_matrix, k0_from_d, sigma1_from_d, spanning_tree, tree_polynomials, WeightedGraph,
};
use oblique_kit::oblique::{analyze_pair, singular_value_duality, ProjectionPair};
use oblique_kit::random::{self, Rng64};
use oblique_kit::susy::{build_susy, ground_states, HamiltonianBlocks};
use rand::Rng;
use serde_json::Value;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn tool(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_oblique-kit"))
        .args(args)
        .env_remove("OBLIQUE_KIT_SEED")
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn max_entry_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    (a - b).amax()
}

fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().expect("array").iter().map(|x| x.as_f64().expect("number")).collect()
}

/// The instances shared by criteria 4 and 6.
fn property_instances() -> impl Iterator<Item = (u64, ProjectionPair, oblique_kit::oblique::MetricSpace)> {
    (0..200u64).map(|seed| {
        let (pair, space) = random::random_instance(&mut random::rng(0xacce_0000 + seed), 10);
        (seed, pair, space)
    })
}

fn criterion1() -> Verdict {
    let start = Instant::now();
    let file = data("worked_projections.json");
    let (code, stdout) = tool(&["verify-projections", file.to_str().unwrap(), "--format", "json"]);
    let elapsed = start.elapsed();
    ensure(code == 0, || format!("exit code {code}"))?;
    let doc: Value = serde_json::from_slice(&stdout).map_err(|e| e.to_string())?;
    let t1 = &doc["theorem1"];
    let ratios = [&t1["L1_over_Gamma0"], &t1["L0_over_Gamma1"], &t1["det_plus_G"]].map(|v| v.as_f64().unwrap());
    ensure(ratios.iter().all(|r| (r - 3.0).abs() <= 1e-9), || format!("ratios {ratios:?}"))?;

    let spectra = &doc["theorem2"]["spectra"];
    let kept: Vec<Vec<f64>> = ["K0", "K1", "Sigma0", "Sigma1"]
        .iter()
        .map(|k| common::strip(&floats(&spectra[k]), &[0.0, 1.0], 1e-8))
        .collect();
    for k in &kept[1..] {
        ensure(common::list_diff(&kept[0], k) <= 1e-8, || format!("spectra differ: {kept:?}"))?;
    }
    let printed = [5.36, 1.31];
    ensure(kept[0].len() == 2 && kept[0].iter().zip(printed).all(|(x, p)| (x - p).abs() <= 0.01), || {
        format!("shared eigenvalues {:?}", kept[0])
    })?;

    // independent recomputation from the raw matrices
    let raw: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    let mat = |k: &str| {
        let rows: Vec<Vec<f64>> = raw[k].as_array().unwrap().iter().map(floats).collect();
        DMatrix::from_fn(rows.len(), rows.len(), |i, j| rows[i][j])
    };
    let (p0, p1, g) = (mat("P0"), mat("P1"), mat("G"));
    let id = DMatrix::identity(4, 4);
    let g_inv = g.clone().try_inverse().unwrap();
    let det = |q: &DMatrix<f64>| common::generalized_pseudodet(&(q.transpose() * &g * q), &id);
    let det_dual = |q: &DMatrix<f64>| common::generalized_pseudodet(&(q * &g_inv * q.transpose()), &id);
    let oracle = [det(&p1) / det_dual(&p0), det(&p0) / det_dual(&p1), g.determinant()];
    ensure(oracle.iter().zip(ratios).all(|(o, r)| (o - r).abs() <= 1e-9), || format!("oracle ratios {oracle:?}"))?;
    let b = common::gram_blocks(&p0, &p1, &g);
    let e0 = common::generalized_eigenvalues(&b.l0, &b.gamma0.clone().try_inverse().unwrap());
    let e0 = common::strip(&e0, &[0.0, 1.0], 1e-8);
    ensure(common::list_diff(&e0, &kept[0]) <= 1e-8, || format!("oracle eigenvalues {e0:?}"))?;

    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "ratios {:.12} {:.12} {:.12}, eigenvalues {:.4} {:.4}, {elapsed:.0?}",
        ratios[0], ratios[1], ratios[2], kept[0][0], kept[0][1]
    ))
}

fn graph_forms(g: &WeightedGraph) -> (DMatrix<f64>, DMatrix<f64>) {
    let basis = cycle_cocycle_basis(g, &spanning_tree(g).unwrap());
    let d = d_matrix(&basis, g.weights());
    (k0_from_d(&d).as_matrix().clone(), sigma1_from_d(&d).as_matrix().clone())
}

fn criterion2() -> Verdict {
    let g = WeightedGraph::from_json(&std::fs::read_to_string(data("worked_graph.json")).unwrap())
        .map_err(|e| e.to_string())?;
    ensure(g.weights().iter().all(|&w| w == 1.0), || "fixture is not unit-weighted".into())?;
    let basis = cycle_cocycle_basis(&g, &spanning_tree(&g).unwrap());
    let poly = tree_polynomials(&g, &basis);
    let (count, _, _) = common::spanning_tree_sums(g.vertex_count(), g.edges(), g.weights());
    ensure(count == 8 && poly.tree_count == Some(8), || format!("tree counts {count} and {:?}", poly.tree_count))?;
    ensure((poly.det_l0 - 8.0).abs() <= 1e-9, || format!("det L0 = {}", poly.det_l0))?;

    let (k0, sigma1) = graph_forms(&g);
    let (sk, ss) = (sym_eigenvalues(&k0), sym_eigenvalues(&sigma1));
    let near =
        |got: &[f64], want: &[f64]| got.len() == want.len() && got.iter().zip(want).all(|(x, y)| (x - y).abs() <= 1e-9);
    ensure(near(&sk, &[4.0, 2.0]), || format!("spectrum of K0 {sk:?}"))?;
    ensure(near(&ss, &[4.0, 2.0, 1.0]), || format!("spectrum of Sigma1 {ss:?}"))?;

    let mut rng = random::rng(0x6a2);
    let mut worst = 0.0_f64;
    for _ in 0..25 {
        let w: Vec<f64> = (0..5).map(|_| random::log_uniform(&mut rng, 0.1, 10.0)).collect();
        let (_, sigma1) = graph_forms(&g.with_weights(&w).unwrap());
        let v = DMatrix::from_column_slice(3, 1, &[1.0 / w[0].sqrt(), 1.0 / w[1].sqrt(), -1.0 / w[2].sqrt()]);
        worst = worst.max((&sigma1 * &v - &v).amax());
    }
    ensure(worst <= 1e-9, || format!("eigenvector residual {worst:e}"))?;
    Ok(format!("det L0 = {}, 8 trees, eigenvector residual {worst:.1e} over 25 weightings", poly.det_l0))
}

fn criterion3() -> Verdict {
    let start = Instant::now();
    let mut worst = [0.0_f64; 2];
    let mut max_edges = 0;
    for seed in 0..200u64 {
        let g = random::random_connected_graph(&mut random::rng(0x7ee0_0000 + seed), 9, 12);
        ensure(g.weights().iter().all(|w| (1e-2..=1e2).contains(w)), || format!("seed {seed}: weight out of range"))?;
        max_edges = max_edges.max(g.edge_count());
        let poly = tree_polynomials(&g, &cycle_cocycle_basis(&g, &spanning_tree(&g).unwrap()));
        let (_, comp, inv) = common::spanning_tree_sums(g.vertex_count(), g.edges(), g.weights());
        let prod: f64 = g.weights().iter().product();
        let errs = [rel(poly.det_l0, comp).max(rel(poly.det_gamma1, inv)), rel(poly.det_l0 / poly.det_gamma1, prod)];
        ensure(errs[0] <= 1e-9, || format!("seed {seed}: determinants off enumeration by {:e}", errs[0]))?;
        ensure(errs[1] <= 1e-9, || format!("seed {seed}: duality off by {:e}", errs[1]))?;
        worst = [worst[0].max(errs[0]), worst[1].max(errs[1])];
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "200 graphs up to {max_edges} edges, enumeration error {:.1e}, duality error {:.1e}, {elapsed:.1?}",
        worst[0], worst[1]
    ))
}

/// Counts eigenvalues above one in each of two cutoffs; `None` if they disagree.
fn separated_rank(values: &[f64]) -> Option<usize> {
    let top = values.first().map_or(1.0, |v| v.max(1.0));
    let count = |cut: f64| values.iter().filter(|&&v| v - 1.0 > cut * top).count();
    let (a, b) = (count(1e-12), count(1e-5));
    (a == b).then_some(a)
}

fn criterion4() -> Verdict {
    let start = Instant::now();
    let mut worst = [0.0_f64; 2];
    let mut ambiguous = 0;
    for (seed, pair, space) in property_instances() {
        let a = analyze_pair(&pair, &space, 1e-8, 1e-10).map_err(|e| format!("seed {seed}: {e}"))?;
        let t1 = &a.theorem1;
        let ratio_err = rel(t1.lhs1, t1.rhs).max(rel(t1.lhs2, t1.rhs));
        ensure(t1.pass && ratio_err <= 1e-8, || format!("seed {seed}: ratios off by {ratio_err:e}"))?;

        // pseudodeterminants of the operators H⁻¹QᵀGQ and QG⁻¹QᵀH
        let (h, g) = (space.h().as_matrix(), space.g().as_matrix());
        let (h_inv, g_inv) = (h.clone().try_inverse().unwrap(), g.clone().try_inverse().unwrap());
        let det = |q: &DMatrix<f64>| common::generalized_pseudodet(&(q.transpose() * g * q), h);
        let det_dual = |q: &DMatrix<f64>| common::generalized_pseudodet(&(q * &g_inv * q.transpose()), &h_inv);
        let det_g = common::generalized_pseudodet(g, h);
        let oracle_err =
            rel(det(pair.p1()) / det_dual(pair.p0()), det_g).max(rel(det(pair.p0()) / det_dual(pair.p1()), det_g));
        ensure(oracle_err <= 1e-8, || format!("seed {seed}: oracle ratios off by {oracle_err:e}"))?;
        ensure(rel(t1.rhs, det_g) <= 1e-8, || format!("seed {seed}: det+G {} vs {det_g}", t1.rhs))?;

        let t2 = &a.theorem2;
        ensure(t2.pass, || format!("seed {seed}: theorem 2 report fails"))?;
        let kept: Vec<Vec<f64>> = t2.spectra.iter().map(|s| common::strip(&s.values, &[0.0, 1.0], 1e-8)).collect();
        let b = common::gram_blocks(pair.p0(), pair.p1(), g);
        let inv = |m: &DMatrix<f64>| m.clone().try_inverse().unwrap();
        let e0 = common::generalized_eigenvalues(&b.l0, &inv(&b.gamma0));
        let e1 = common::generalized_eigenvalues(&b.l1, &inv(&b.gamma1));
        let (o0, o1) = (common::strip(&e0, &[1.0], 1e-8), common::strip(&e1, &[1.0], 1e-8));
        let spec_err = kept.iter().chain([&o0, &o1]).map(|k| common::list_diff(&kept[0], k)).fold(0.0, f64::max);
        ensure(spec_err <= 1e-8, || format!("seed {seed}: spectra differ by {spec_err:e}: {kept:?} {o0:?} {o1:?}"))?;
        let min = t2
            .spectra
            .iter()
            .flat_map(|s| s.nonzero())
            .chain(e0.iter().chain(&e1).copied())
            .fold(f64::INFINITY, f64::min);
        ensure(min >= 1.0 - 1e-8, || format!("seed {seed}: nonzero eigenvalue {min}"))?;

        ensure(t2.multiplicity_ok, || format!("seed {seed}: multiplicities {:?}", t2.multiplicities))?;
        let (n0, n1, r) = (pair.n0(), pair.n1(), t2.rank);
        for (m, (n_self, n_other)) in t2.multiplicities.iter().zip([(n0, n1), (n1, n0), (n0, n1), (n1, n0)]) {
            let got = (m.above_one, m.one, m.zero);
            ensure(got == (r, n_self - r, n_other), || format!("seed {seed}: {} counts {got:?}, rank {r}", m.name))?;
        }
        match (separated_rank(&e0), separated_rank(&e1)) {
            (Some(a0), Some(a1)) => {
                ensure(a0 == a1 && a0 == r, || format!("seed {seed}: rank {r}, oracle {a0} and {a1}"))?;
            }
            _ => ambiguous += 1,
        }
        worst = [worst[0].max(ratio_err.max(oracle_err)), worst[1].max(spec_err)];
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(20), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "200 instances, ratio error {:.1e}, spectrum error {:.1e}, oracle rank ambiguous in {ambiguous}, {elapsed:.1?}",
        worst[0], worst[1]
    ))
}

fn printed_k0(r: &[f64]) -> DMatrix<f64> {
    let (r1, r2, r3, r4, r5, r6) = (r[0], r[1], r[2], r[3], r[4], r[5]);
    DMatrix::from_row_slice(
        3,
        3,
        &[
            1.0 + r4 / r1 + r5 / r1,
            -r4 / (r1 * r2).sqrt(),
            r5 / (r1 * r3).sqrt(),
            -r4 / (r1 * r2).sqrt(),
            1.0 + r4 / r2 + r6 / r2,
            r6 / (r2 * r3).sqrt(),
            r5 / (r1 * r3).sqrt(),
            r6 / (r2 * r3).sqrt(),
            1.0 + r5 / r3 + r6 / r3,
        ],
    )
}

fn printed_sigma1(r: &[f64]) -> DMatrix<f64> {
    let (r1, r2, r3, r4, r5, r6) = (r[0], r[1], r[2], r[3], r[4], r[5]);
    DMatrix::from_row_slice(
        3,
        3,
        &[
            1.0 + r4 / r1 + r4 / r2,
            -(r4 * r5).sqrt() / r1,
            (r4 * r6).sqrt() / r2,
            -(r4 * r5).sqrt() / r1,
            1.0 + r5 / r1 + r5 / r3,
            (r5 * r6).sqrt() / r3,
            (r4 * r6).sqrt() / r2,
            (r5 * r6).sqrt() / r3,
            1.0 + r6 / r2 + r6 / r3,
        ],
    )
}

fn resistances(rng: &mut Rng64) -> Vec<f64> {
    (0..6).map(|_| random::log_uniform(rng, 0.1, 10.0)).collect()
}

fn criterion5() -> Verdict {
    let base = Netlist::from_json(&std::fs::read_to_string(data("bridge.json")).unwrap()).map_err(|e| e.to_string())?;
    let mut rng = random::rng(0xb41d);
    let mut worst = [0.0_f64; 3];
    for case in 0..25 {
        let r = resistances(&mut rng);
        let mut net = base.with_resistances(&r).map_err(|e| e.to_string())?;
        let circuit = reduce_netlist(&net).map_err(|e| e.to_string())?;
        let form_err = max_entry_diff(k0_power_form(&circuit).as_matrix(), &printed_k0(&r))
            .max(max_entry_diff(sigma1_power_form(&circuit).as_matrix(), &printed_sigma1(&r)));
        ensure(form_err <= 1e-10, || format!("case {case}: printed forms off by {form_err:e}"))?;

        for s in &mut net.current_sources {
            s.amps = rng.random_range(-2.0..=2.0);
        }
        for s in &mut net.voltage_sources {
            s.volts = rng.random_range(-2.0..=2.0);
        }
        let circuit = reduce_netlist(&net).map_err(|e| e.to_string())?;
        let mut power_err = 0.0_f64;
        for mode in [DriveMode::Current, DriveMode::Voltage] {
            let drive = DriveVector::from_sources(&circuit, mode).map_err(|e| e.to_string())?;
            let sol = match mode {
                DriveMode::Current => solve_current_driven(&circuit, &drive),
                DriveMode::Voltage => solve_voltage_driven(&circuit, &drive),
            }
            .map_err(|e| e.to_string())?;
            let (_, kirchhoff) = common::nodal_solve(&net, mode);
            power_err = power_err.max(rel(sol.report.power, kirchhoff));
        }
        ensure(power_err <= 1e-9, || format!("case {case}: power off by {power_err:e}"))?;

        let dual: Vec<f64> = (0..6).map(|i| 1.0 / r[5 - i]).collect();
        let dual_circuit = reduce_netlist(&base.with_resistances(&dual).unwrap()).map_err(|e| e.to_string())?;
        let a = common::strip(&sym_eigenvalues(k0_power_form(&dual_circuit).as_matrix()), &[1.0], 1e-8);
        let b = common::strip(&sym_eigenvalues(sigma1_power_form(&circuit).as_matrix()), &[1.0], 1e-8);
        let c = common::strip(&sym_eigenvalues(k0_power_form(&circuit).as_matrix()), &[1.0], 1e-8);
        let d = common::strip(&sym_eigenvalues(sigma1_power_form(&dual_circuit).as_matrix()), &[1.0], 1e-8);
        let dual_err = common::list_diff(&a, &b).max(common::list_diff(&c, &d));
        let report = self_duality_check(&circuit, 1e-8).map_err(|e| e.to_string())?;
        ensure(dual_err <= 1e-8 && report.pass, || format!("case {case}: self-duality off by {dual_err:e}"))?;
        worst = [worst[0].max(form_err), worst[1].max(power_err), worst[2].max(dual_err)];
    }
    Ok(format!(
        "25 resistance tuples, form error {:.1e}, power error {:.1e}, duality error {:.1e}",
        worst[0], worst[1], worst[2]
    ))
}

fn criterion6() -> Verdict {
    let mut worst = 0.0_f64;
    for (seed, pair, space) in property_instances() {
        let a = analyze_pair(&pair, &space, 1e-8, 1e-10).map_err(|e| format!("seed {seed}: {e}"))?;
        let susy = build_susy(&a.bridge, &a.forms, HamiltonianBlocks::K0Sigma1, 1e-10)
            .map_err(|e| format!("seed {seed}: {e}"))?;
        // residuals recomputed here, scaled by the magnitude of the products
        let (h, q) = (susy.hamiltonian.as_matrix(), &susy.supercharge);
        let qt = q.transpose();
        let (hn, qn) = (h.amax(), q.amax());
        let res = [
            (h * q - q * h).amax() / (hn * qn).max(1.0),
            (q * q * 2.0).amax() / (qn * qn).max(1.0),
            (q * &qt + &qt * q - h).amax() / hn.max(1.0),
        ];
        let m = res.iter().copied().fold(0.0, f64::max);
        ensure(m <= 1e-10, || format!("seed {seed}: residuals {res:?}"))?;
        let (n0, n1, r) = (pair.n0(), pair.n1(), a.bridge.rank);
        let kernel = ground_states(&susy).dimension;
        ensure(kernel == (n0 - r) + (n1 - r), || format!("seed {seed}: kernel {kernel}, n0 {n0}, n1 {n1}, rank {r}"))?;
        worst = worst.max(m);
    }
    Ok(format!("200 instances, scaled residual {worst:.1e}, kernel dimensions exact"))
}

/// Singular values from the eigenvalues of `PᵀP`. Rounding leaves zero
/// singular values near `√ε · s_max`; a projection's nonzero ones are at
/// least 1, so anything below `1e-6 · s_max` is set to zero.
fn gram_singular_values(p: &DMatrix<f64>) -> Vec<f64> {
    let s: Vec<f64> = sym_eigenvalues(&(p.transpose() * p)).into_iter().map(|l| l.max(0.0).sqrt()).collect();
    let top = s.first().copied().unwrap_or(0.0);
    s.into_iter().map(|x| if x < 1e-6 * top { 0.0 } else { x }).collect()
}

fn criterion7() -> Verdict {
    let mut worst = 0.0_f64;
    for seed in 0..100u64 {
        let mut rng = random::rng(0x5fd0_0000 + seed);
        let n = rng.random_range(2..=10);
        let pair = random::random_projection_pair(&mut rng, n);
        let report = singular_value_duality(&pair, 1e-9);
        ensure(report.matched, || format!("seed {seed}: {}", report.comparison.report))?;
        let a = common::strip(&gram_singular_values(pair.p0()), &[0.0, 1.0], 1e-7);
        let b = common::strip(&gram_singular_values(pair.p1()), &[0.0, 1.0], 1e-7);
        let t = common::strip(&report.singular_values0, &[0.0, 1.0], 1e-7);
        let err = common::list_diff(&a, &b).max(common::list_diff(&a, &t));
        ensure(err <= 1e-9, || format!("seed {seed}: {a:?} vs {b:?} vs {t:?}"))?;
        worst = worst.max(err);
    }
    Ok(format!("100 pairs, singular value difference {worst:.1e}"))
}

fn criterion8() -> Verdict {
    let first = tool(&["selftest", "--seed", "42", "--format", "json"]);
    let second = tool(&["selftest", "--seed", "42", "--format", "json"]);
    ensure(first.0 == 0 && second.0 == 0, || format!("exit codes {} and {}", first.0, second.0))?;
    ensure(!first.1.is_empty() && first.1 == second.1, || "outputs differ".into())?;
    Ok(format!("{} identical bytes", first.1.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("worked projection example", criterion1),
        ("worked graph example", criterion2),
        ("tree-polynomial duality", criterion3),
        ("theorem property suites", criterion4),
        ("bridge circuit", criterion5),
        ("supersymmetric algebra", criterion6),
        ("classic singular values", criterion7),
        ("selftest determinism", criterion8),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let verdict = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match verdict {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
