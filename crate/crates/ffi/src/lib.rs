//! C interface to `oblique-kit`.
//!
//! Objects are opaque handles created by `okit_*_new` / `okit_*_analyze` and
//! released with the matching `okit_*_free`. Every fallible call returns an
//! [`OkitStatus`]; on failure the thread's last error message is available
//! from [`okit_last_error`]. Matrices cross the boundary as row-major `double`
//! arrays. Variable-length results are copied into caller buffers: pass a null
//! buffer to query the length, which is always written to `*len`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nalgebra::DMatrix;
use oblique_kit::circuits::{
    k0_power_form, reduce_netlist, sigma1_power_form, solve_current_driven, solve_voltage_driven, DriveMode,
    DriveVector, Netlist, ReducedCircuit,
};
use oblique_kit::graphcycles::{
    cycle_cocycle_basis, d_matrix, k0_from_d, sigma1_from_d, spanning_tree, tree_polynomials, CycleCocycleBasis,
    TreePolynomialReport, WeightedGraph,
};
use oblique_kit::numkit::{max_abs, SymMatrix, DEFAULT_REL_TOL};
use oblique_kit::oblique::{analyze_pair, validate_projection_pair, MetricSpace, PairAnalysis, PROJECTION_TOL};
use oblique_kit::Error;

/// Result codes. Values 0 to 3 match the exit codes of the command-line tool.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OkitStatus {
    Ok = 0,
    /// The input was valid but a theorem or property check failed.
    CheckFailed = 1,
    /// Malformed input text.
    Parse = 2,
    /// Input violates a precondition (not a projection, disconnected graph, ...).
    Invalid = 3,
    NullArgument = 4,
    /// The caller's buffer is shorter than `*len`.
    BufferTooSmall = 5,
    /// Internal error; the library caught a panic.
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OkitDriveMode {
    /// Currents on the chords, power from `K0`.
    Current = 0,
    /// Voltages on the tree edges, power from `Sigma1`.
    Voltage = 1,
}

/// Pseudodeterminants and the two ratios that should equal `det_plus_g`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct OkitTheorem1 {
    pub det_plus_l0: f64,
    pub det_plus_l1: f64,
    pub det_plus_gamma0: f64,
    pub det_plus_gamma1: f64,
    pub det_plus_g: f64,
    pub l1_over_gamma0: f64,
    pub l0_over_gamma1: f64,
    pub pass: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct OkitTreePolynomials {
    pub det_l0: f64,
    pub det_gamma1: f64,
    pub det_g: f64,
    /// Number of spanning trees, or -1 when the graph is too large to enumerate.
    pub tree_count: i64,
}

/// Analysis of a projection pair.
pub struct OkitPair {
    analysis: PairAnalysis,
    n0: usize,
    n1: usize,
}

/// A weighted graph with its DFS cycle and cocycle bases.
pub struct OkitGraph {
    graph: WeightedGraph,
    basis: CycleCocycleBasis,
    polynomials: TreePolynomialReport,
}

/// A reduced resistor network.
pub struct OkitCircuit {
    circuit: ReducedCircuit,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Failure(OkitStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse(_) => OkitStatus::Parse,
            _ => OkitStatus::Invalid,
        };
        Failure(status, e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(OkitStatus::NullArgument, format!("{name} is null"))
}

/// Runs `f`, records any failure or panic, and maps it to a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> OkitStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OkitStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal error: {msg}"));
            OkitStatus::Panic
        }
    }
}

unsafe fn handle<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn write<T>(out: *mut T, value: T, name: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn square(data: *const f64, n: usize, name: &str) -> Result<DMatrix<f64>, Failure> {
    if data.is_null() {
        return Err(null(name));
    }
    let values = std::slice::from_raw_parts(data, n * n);
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Failure(OkitStatus::Invalid, format!("{name} has a non-finite entry")));
    }
    Ok(DMatrix::from_row_slice(n, n, values))
}

fn symmetric(m: DMatrix<f64>, name: &str) -> Result<SymMatrix, Failure> {
    if max_abs(&(&m - m.transpose())) > 1e-12 * max_abs(&m).max(1.0) {
        return Err(Failure(OkitStatus::Invalid, format!("{name} is not symmetric")));
    }
    Ok(SymMatrix::new(m)?)
}

/// Copies `values` to `out` if it has room; `*len` always receives the count.
unsafe fn copy_out(values: &[f64], out: *mut f64, cap: usize, len: *mut usize) -> Result<(), Failure> {
    write(len, values.len(), "len")?;
    if out.is_null() {
        return Ok(());
    }
    if cap < values.len() {
        return Err(Failure(OkitStatus::BufferTooSmall, format!("need {} values, buffer holds {cap}", values.len())));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    m.transpose().as_slice().to_vec()
}

/// Message of the last failed call on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn okit_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn okit_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Validates the complementary projections `p0`, `p1` (each `n × n`) and
/// checks both theorems under the metric `g` and scalar product `h`. `h` may
/// be null for the identity. Theorem ratios and spectra are compared with `tol`.
///
/// # Safety
/// Non-null matrix pointers must reference `n * n` readable doubles, and `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn okit_pair_analyze(
    n: usize,
    p0: *const f64,
    p1: *const f64,
    g: *const f64,
    h: *const f64,
    tol: f64,
    out: *mut *mut OkitPair,
) -> OkitStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Failure(OkitStatus::Invalid, "tol must be positive".into()));
        }
        let pair = validate_projection_pair(square(p0, n, "p0")?, square(p1, n, "p1")?, PROJECTION_TOL)?;
        let g = symmetric(square(g, n, "g")?, "g")?;
        let space = if h.is_null() {
            MetricSpace::with_metric(g)?
        } else {
            MetricSpace::new(symmetric(square(h, n, "h")?, "h")?, g)?
        };
        let analysis = analyze_pair(&pair, &space, tol, DEFAULT_REL_TOL)?;
        let handle = OkitPair { analysis, n0: pair.n0(), n1: pair.n1() };
        out.write(Box::into_raw(Box::new(handle)));
        Ok(())
    })
}

/// # Safety
/// `pair` must be null or a handle from [`okit_pair_analyze`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn okit_pair_free(pair: *mut OkitPair) {
    if !pair.is_null() {
        drop(Box::from_raw(pair));
    }
}

/// Dimensions of the two ranges.
///
/// # Safety
/// `pair` must be a live handle; `n0` and `n1` must be writable.
#[no_mangle]
pub unsafe extern "C" fn okit_pair_dims(pair: *const OkitPair, n0: *mut usize, n1: *mut usize) -> OkitStatus {
    guard(|| {
        let p = handle(pair, "pair")?;
        write(n0, p.n0, "n0")?;
        write(n1, p.n1, "n1")
    })
}

/// # Safety
/// `pair` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn okit_pair_theorem1(pair: *const OkitPair, out: *mut OkitTheorem1) -> OkitStatus {
    guard(|| {
        let t = &handle(pair, "pair")?.analysis.theorem1;
        let d = &t.pseudodets;
        let report = OkitTheorem1 {
            det_plus_l0: d.l0,
            det_plus_l1: d.l1,
            det_plus_gamma0: d.gamma0,
            det_plus_gamma1: d.gamma1,
            det_plus_g: t.rhs,
            l1_over_gamma0: t.lhs1,
            l0_over_gamma1: t.lhs2,
            pass: t.pass,
        };
        write(out, report, "out")
    })
}

/// Eigenvalues shared by `K0`, `K1`, `Sigma0`, `Sigma1` apart from 0 and 1, descending.
///
/// # Safety
/// `pair` must be a live handle; `out` null or writable for `cap` doubles; `len` writable.
#[no_mangle]
pub unsafe extern "C" fn okit_pair_shared_eigenvalues(
    pair: *const OkitPair,
    out: *mut f64,
    cap: usize,
    len: *mut usize,
) -> OkitStatus {
    guard(|| {
        let t2 = &handle(pair, "pair")?.analysis.theorem2;
        let shared = t2.comparisons.first().map(|(_, c)| c.kept_a.clone()).unwrap_or_default();
        copy_out(&shared, out, cap, len)
    })
}

/// Rank of the bridge matrix between the two subspaces.
///
/// # Safety
/// `pair` must be a live handle; `rank` must be writable.
#[no_mangle]
pub unsafe extern "C" fn okit_pair_bridge_rank(pair: *const OkitPair, rank: *mut usize) -> OkitStatus {
    guard(|| write(rank, handle(pair, "pair")?.analysis.bridge.rank, "rank"))
}

/// `OKIT_STATUS_OK` when both theorems hold, `OKIT_STATUS_CHECK_FAILED` otherwise.
///
/// # Safety
/// `pair` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn okit_pair_check(pair: *const OkitPair) -> OkitStatus {
    guard(|| {
        let a = &handle(pair, "pair")?.analysis;
        if a.pass() {
            Ok(())
        } else {
            Err(Failure(OkitStatus::CheckFailed, "theorem check failed".into()))
        }
    })
}

/// Builds a weighted graph from `edge_count` edges given as `(tail, head)`
/// pairs in `edges` (length `2 * edge_count`) with positive `weights`.
///
/// # Safety
/// `edges` and `weights` must reference `2 * edge_count` and `edge_count`
/// readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn okit_graph_new(
    vertex_count: usize,
    edges: *const usize,
    weights: *const f64,
    edge_count: usize,
    out: *mut *mut OkitGraph,
) -> OkitStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if edge_count > 0 && (edges.is_null() || weights.is_null()) {
            return Err(null("edges or weights"));
        }
        let (ends, w) = if edge_count == 0 {
            (&[][..], &[][..])
        } else {
            (std::slice::from_raw_parts(edges, 2 * edge_count), std::slice::from_raw_parts(weights, edge_count))
        };
        let pairs = ends.chunks_exact(2).map(|e| (e[0], e[1])).collect();
        let graph = WeightedGraph::new(vertex_count, pairs, w.to_vec())?;
        let basis = cycle_cocycle_basis(&graph, &spanning_tree(&graph)?);
        basis.verify(&graph)?;
        let polynomials = tree_polynomials(&graph, &basis);
        out.write(Box::into_raw(Box::new(OkitGraph { graph, basis, polynomials })));
        Ok(())
    })
}

/// # Safety
/// `graph` must be null or a handle from [`okit_graph_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn okit_graph_free(graph: *mut OkitGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Number of chords (independent cycles) of the DFS tree.
///
/// # Safety
/// `graph` must be a live handle; `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn okit_graph_chord_count(graph: *const OkitGraph, count: *mut usize) -> OkitStatus {
    guard(|| write(count, handle(graph, "graph")?.basis.chords.len(), "count"))
}

/// Cycle and cocycle Gram determinants and the spanning-tree count.
///
/// # Safety
/// `graph` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn okit_graph_tree_polynomials(
    graph: *const OkitGraph,
    out: *mut OkitTreePolynomials,
) -> OkitStatus {
    guard(|| {
        let p = &handle(graph, "graph")?.polynomials;
        let report = OkitTreePolynomials {
            det_l0: p.det_l0,
            det_gamma1: p.det_gamma1,
            det_g: p.det_g,
            tree_count: p.tree_count.map_or(-1, |c| c as i64),
        };
        write(out, report, "out")
    })
}

fn graph_forms(g: &OkitGraph) -> (SymMatrix, SymMatrix) {
    let d = d_matrix(&g.basis, g.graph.weights());
    (k0_from_d(&d), sigma1_from_d(&d))
}

/// `K0` of the graph, chords × chords, row-major.
///
/// # Safety
/// `graph` must be a live handle; `out` null or writable for `cap` doubles; `len` writable.
#[no_mangle]
pub unsafe extern "C" fn okit_graph_k0(
    graph: *const OkitGraph,
    out: *mut f64,
    cap: usize,
    len: *mut usize,
) -> OkitStatus {
    guard(|| copy_out(&row_major(graph_forms(handle(graph, "graph")?).0.as_matrix()), out, cap, len))
}

/// `Sigma1` of the graph, tree edges × tree edges, row-major.
///
/// # Safety
/// As for [`okit_graph_k0`].
#[no_mangle]
pub unsafe extern "C" fn okit_graph_sigma1(
    graph: *const OkitGraph,
    out: *mut f64,
    cap: usize,
    len: *mut usize,
) -> OkitStatus {
    guard(|| copy_out(&row_major(graph_forms(handle(graph, "graph")?).1.as_matrix()), out, cap, len))
}

/// Parses and reduces a netlist given as NUL-terminated JSON.
///
/// # Safety
/// `json` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn okit_circuit_from_json(json: *const c_char, out: *mut *mut OkitCircuit) -> OkitStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Failure(OkitStatus::Parse, format!("netlist is not UTF-8: {e}")))?;
        let circuit = reduce_netlist(&Netlist::from_json(text)?)?;
        out.write(Box::into_raw(Box::new(OkitCircuit { circuit })));
        Ok(())
    })
}

/// # Safety
/// `circuit` must be null or a handle from [`okit_circuit_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn okit_circuit_free(circuit: *mut OkitCircuit) {
    if !circuit.is_null() {
        drop(Box::from_raw(circuit));
    }
}

/// Length of a drive vector: chords for current drive, tree edges for voltage drive.
///
/// # Safety
/// `circuit` must be a live handle; `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn okit_circuit_drive_len(
    circuit: *const OkitCircuit,
    mode: OkitDriveMode,
    len: *mut usize,
) -> OkitStatus {
    guard(|| {
        let b = &handle(circuit, "circuit")?.circuit.basis;
        let n = match mode {
            OkitDriveMode::Current => b.chords.len(),
            OkitDriveMode::Voltage => b.cochords.len(),
        };
        write(len, n, "len")
    })
}

/// Dissipated power for the given drive, from the quadratic power form.
/// A null `drive` uses the netlist's own source values.
///
/// # Safety
/// `circuit` must be a live handle; `drive` null or readable for `len`
/// doubles; `power` writable.
#[no_mangle]
pub unsafe extern "C" fn okit_circuit_power(
    circuit: *const OkitCircuit,
    mode: OkitDriveMode,
    drive: *const f64,
    len: usize,
    power: *mut f64,
) -> OkitStatus {
    guard(|| {
        let c = &handle(circuit, "circuit")?.circuit;
        let mode = match mode {
            OkitDriveMode::Current => DriveMode::Current,
            OkitDriveMode::Voltage => DriveMode::Voltage,
        };
        let drive = if drive.is_null() {
            DriveVector::from_sources(c, mode)?
        } else {
            DriveVector::new(c, mode, std::slice::from_raw_parts(drive, len).to_vec())?
        };
        let sol = match mode {
            DriveMode::Current => solve_current_driven(c, &drive)?,
            DriveMode::Voltage => solve_voltage_driven(c, &drive)?,
        };
        write(power, sol.report.power, "power")
    })
}

/// Current-drive power form `K0`, row-major.
///
/// # Safety
/// `circuit` must be a live handle; `out` null or writable for `cap` doubles; `len` writable.
#[no_mangle]
pub unsafe extern "C" fn okit_circuit_k0(
    circuit: *const OkitCircuit,
    out: *mut f64,
    cap: usize,
    len: *mut usize,
) -> OkitStatus {
    guard(|| copy_out(&row_major(k0_power_form(&handle(circuit, "circuit")?.circuit).as_matrix()), out, cap, len))
}

/// Voltage-drive power form `Sigma1`, row-major.
///
/// # Safety
/// As for [`okit_circuit_k0`].
#[no_mangle]
pub unsafe extern "C" fn okit_circuit_sigma1(
    circuit: *const OkitCircuit,
    out: *mut f64,
    cap: usize,
    len: *mut usize,
) -> OkitStatus {
    guard(|| copy_out(&row_major(sigma1_power_form(&handle(circuit, "circuit")?.circuit).as_matrix()), out, cap, len))
}
