//! C ABI over `starcons`.
//!
//! Graphs and weight matrices are opaque heap handles created by `starcons_*_new`
//! style functions and released with the matching `*_free`. Every fallible call
//! returns a [`StarconsStatus`]; on failure the message is available from
//! [`starcons_last_error`] until the next failing call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use starcons::simulate::{monte_carlo_matrix, QuantizerSpec, Scheme};
use starcons::spectral::{k_max, slem, slem_closed_form};
use starcons::topology::build;
use starcons::{Error, Graph, Topology, WeightMatrix, Weighting};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarconsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidGraph = 3,
    Unsupported = 4,
    Numerical = 5,
    Panic = 6,
}

/// Topology family selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarconsFamily {
    SymmetricStar = 0,
    CcsStar = 1,
    KcsStar = 2,
}

/// Weighting scheme selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarconsWeighting {
    Optimal = 0,
    Metropolis = 1,
    MaxDegree = 2,
    BestConstant = 3,
}

/// Quantization scheme selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarconsScheme {
    Uniform = 0,
    Probabilistic = 1,
    None = 2,
}

/// Opaque graph handle.
pub struct StarconsGraph {
    topology: Option<Topology>,
    graph: Graph,
}

/// Opaque weight-matrix handle.
pub struct StarconsMatrix {
    matrix: WeightMatrix,
}

/// Monte Carlo summary. Fields undefined without consensus are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct StarconsStats {
    pub psi: f64,
    pub eta: f64,
    pub mu: f64,
    pub rho: f64,
    pub trials: u64,
    pub consensus_trials: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> StarconsStatus {
    match e {
        Error::ParameterBounds(_) | Error::DimensionMismatch { .. } | Error::IncompleteAssignment { .. } => {
            StarconsStatus::InvalidArgument
        }
        Error::InvalidGraph(_) | Error::Disconnected | Error::NotSymmetric(_) | Error::NotStochastic(_) => {
            StarconsStatus::InvalidGraph
        }
        Error::Unsupported(_) => StarconsStatus::Unsupported,
        Error::Numerical(_) => StarconsStatus::Numerical,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => StarconsStatus::InvalidArgument,
    }
}

/// Runs `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), (StarconsStatus, String)>) -> StarconsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => StarconsStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            StarconsStatus::Panic
        }
    }
}

trait Lift<T> {
    fn lift(self) -> Result<T, (StarconsStatus, String)>;
}

impl<T> Lift<T> for starcons::Result<T> {
    fn lift(self) -> Result<T, (StarconsStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(what: &str) -> (StarconsStatus, String) {
    (StarconsStatus::NullPointer, format!("{what} is null"))
}

fn count(x: u32) -> usize {
    x as usize
}

fn topology(family: StarconsFamily, m: u32, n: u32, k: u32) -> Topology {
    let (m, n, k) = (count(m), count(n), count(k));
    match family {
        StarconsFamily::SymmetricStar => Topology::SymmetricStar { m, n },
        StarconsFamily::CcsStar => Topology::CcsStar { m, n },
        StarconsFamily::KcsStar => Topology::KcsStar { m, n, k },
    }
}

fn weighting(w: StarconsWeighting) -> Weighting {
    match w {
        StarconsWeighting::Optimal => Weighting::Optimal,
        StarconsWeighting::Metropolis => Weighting::Metropolis,
        StarconsWeighting::MaxDegree => Weighting::MaxDegree,
        StarconsWeighting::BestConstant => Weighting::BestConstant,
    }
}

/// Message of the last failure on this thread, or null. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn starcons_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a star-family graph. `k` is ignored except for `KcsStar`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn starcons_graph_new(
    family: StarconsFamily,
    m: u32,
    n: u32,
    k: u32,
    out: *mut *mut StarconsGraph,
) -> StarconsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let t = topology(family, m, n, k);
        let graph = build(&t).lift()?;
        *out = Box::into_raw(Box::new(StarconsGraph { topology: Some(t), graph }));
        Ok(())
    })
}

/// Builds a connected custom graph from `edge_count` pairs stored flat in `edges` (`u0, v0, u1, v1, ...`).
///
/// # Safety
/// `edges` must point to `2 * edge_count` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn starcons_graph_from_edges(
    node_count: u32,
    edges: *const u32,
    edge_count: usize,
    out: *mut *mut StarconsGraph,
) -> StarconsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if edges.is_null() && edge_count > 0 {
            return Err(null("edges"));
        }
        let flat = if edge_count == 0 { &[][..] } else { std::slice::from_raw_parts(edges, 2 * edge_count) };
        let pairs = flat.chunks_exact(2).map(|p| (count(p[0]), count(p[1]))).collect();
        let graph = Graph::new(count(node_count), pairs).lift()?;
        if !graph.is_connected() {
            return Err((StarconsStatus::InvalidGraph, Error::Disconnected.to_string()));
        }
        *out = Box::into_raw(Box::new(StarconsGraph { topology: None, graph }));
        Ok(())
    })
}

/// Releases a graph handle. Null is accepted.
///
/// # Safety
/// `g` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn starcons_graph_free(g: *mut StarconsGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Node count of a graph, or 0 for null.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn starcons_graph_node_count(g: *const StarconsGraph) -> usize {
    g.as_ref().map_or(0, |g| g.graph.node_count())
}

/// Edge count of a graph, or 0 for null.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn starcons_graph_edge_count(g: *const StarconsGraph) -> usize {
    g.as_ref().map_or(0, |g| g.graph.edge_count())
}

/// Builds the weight matrix of `g` under `w`. Custom graphs support every scheme but `Optimal`.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn starcons_matrix_new(
    g: *const StarconsGraph,
    w: StarconsWeighting,
    out: *mut *mut StarconsMatrix,
) -> StarconsStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null("graph"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let matrix = match (&g.topology, weighting(w)) {
            (Some(t), w) => w.matrix_for_graph(&g.graph, t).lift()?,
            (None, Weighting::Metropolis) => starcons::weights::metropolis_weights(&g.graph).lift()?,
            (None, Weighting::MaxDegree) => starcons::weights::max_degree_weights(&g.graph).lift()?,
            (None, Weighting::BestConstant) => starcons::weights::best_constant_weights(&g.graph).lift()?,
            (None, Weighting::Optimal) => {
                return Err((StarconsStatus::Unsupported, "closed-form weights need a star-family graph".into()))
            }
        };
        *out = Box::into_raw(Box::new(StarconsMatrix { matrix }));
        Ok(())
    })
}

/// Releases a matrix handle. Null is accepted.
///
/// # Safety
/// `w` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn starcons_matrix_free(w: *mut StarconsMatrix) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Order of a matrix, or 0 for null.
///
/// # Safety
/// `w` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn starcons_matrix_order(w: *const StarconsMatrix) -> usize {
    w.as_ref().map_or(0, |w| w.matrix.order())
}

/// Entry `(i, j)` of a matrix.
///
/// # Safety
/// `w` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn starcons_matrix_get(
    w: *const StarconsMatrix,
    i: usize,
    j: usize,
    out: *mut f64,
) -> StarconsStatus {
    guard(|| {
        let w = w.as_ref().ok_or_else(|| null("matrix"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let n = w.matrix.order();
        if i >= n || j >= n {
            return Err((StarconsStatus::InvalidArgument, format!("index ({i}, {j}) outside order {n}")));
        }
        *out = w.matrix.get(i, j);
        Ok(())
    })
}

/// SLEM of a weight matrix by eigendecomposition.
///
/// # Safety
/// `w` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn starcons_matrix_slem(w: *const StarconsMatrix, out: *mut f64) -> StarconsStatus {
    guard(|| {
        let w = w.as_ref().ok_or_else(|| null("matrix"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = slem(&w.matrix).lift()?;
        Ok(())
    })
}

/// Closed-form optimal SLEM of a star-family topology. `guaranteed` (may be null)
/// receives 0 when a k-cored star exceeds its boundary number of centres.
///
/// # Safety
/// `out` must be writable; `guaranteed` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn starcons_slem_closed_form(
    family: StarconsFamily,
    m: u32,
    n: u32,
    k: u32,
    out: *mut f64,
    guaranteed: *mut i32,
) -> StarconsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let c = slem_closed_form(&topology(family, m, n, k)).lift()?;
        *out = c.slem;
        if !guaranteed.is_null() {
            *guaranteed = i32::from(c.optimality_guaranteed);
        }
        Ok(())
    })
}

/// Boundary number of centres for a k-cored star with `m` tail nodes per branch and `n` branches.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn starcons_k_max(m: u32, n: u32, out: *mut u64) -> StarconsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = k_max(count(m), count(n)).lift()? as u64;
        Ok(())
    })
}

/// Monte Carlo batch of quantized consensus trials on `w`. Deterministic in `seed`.
///
/// # Safety
/// `w` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn starcons_monte_carlo(
    w: *const StarconsMatrix,
    bits: u32,
    scheme: StarconsScheme,
    trials: u64,
    seed: u64,
    max_iters: u64,
    out: *mut StarconsStats,
) -> StarconsStatus {
    guard(|| {
        let w = w.as_ref().ok_or_else(|| null("matrix"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let scheme = match scheme {
            StarconsScheme::Uniform => Scheme::Uniform,
            StarconsScheme::Probabilistic => Scheme::Probabilistic,
            StarconsScheme::None => Scheme::None,
        };
        let spec = QuantizerSpec::new(bits, scheme).lift()?;
        let s = monte_carlo_matrix(&w.matrix, &spec, trials as usize, seed, max_iters as usize).lift()?;
        *out = StarconsStats {
            psi: s.psi,
            eta: s.eta.unwrap_or(f64::NAN),
            mu: s.mu.unwrap_or(f64::NAN),
            rho: s.rho.unwrap_or(f64::NAN),
            trials: s.trials as u64,
            consensus_trials: s.consensus_trials as u64,
        };
        Ok(())
    })
}
