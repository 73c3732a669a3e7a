//! C ABI over `secmatch-core`.
//!
//! Every function returns an [`SmStatus`]; results go through out-pointers.
//! On failure the message is kept per thread and can be read with
//! [`sm_last_error`]. Graphs and matchings are opaque handles that the
//! caller frees with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use secmatch_core::edge::{self, EdgeInstance};
use secmatch_core::graph::{max_weight_matching, Matching, VertexSubset, WeightedGraph};
use secmatch_core::stats::{stream_rng, Stream};
use secmatch_core::vertex::{self, ArrivalOrder, VertexInstance};
use secmatch_core::{hyper, ordinal, Error};

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmStatus {
    Ok = 0,
    /// a required pointer argument was null
    NullPointer = 1,
    /// arguments violate a precondition
    InvalidInput = 2,
    /// the exact solver would exceed its size limit
    Capacity = 3,
    /// malformed JSON or CSV
    Parse = 4,
    Io = 5,
    /// a Rust panic was caught at the boundary
    Internal = 6,
}

/// Opaque weighted graph.
pub struct SmGraph {
    inner: WeightedGraph,
}

/// Opaque matching.
pub struct SmMatching {
    inner: Matching,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SmStatus {
    match e {
        Error::Input(_) => SmStatus::InvalidInput,
        Error::Capacity { .. } => SmStatus::Capacity,
        Error::Json(_) | Error::Csv(_) => SmStatus::Parse,
        Error::Io { .. } => SmStatus::Io,
        Error::Trial { source, .. } => status_of(source),
    }
}

/// Run `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), SmStatus>) -> SmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SmStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            SmStatus::Internal
        }
    }
}

fn fail(e: Error) -> SmStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn null(what: &str) -> SmStatus {
    set_error(format!("null pointer: {what}"));
    SmStatus::NullPointer
}

fn write<T>(out: *mut T, value: T) -> Result<(), SmStatus> {
    if out.is_null() {
        return Err(null("output"));
    }
    unsafe { out.write(value) };
    Ok(())
}

fn scalar(out: *mut f64, f: impl FnOnce() -> secmatch_core::Result<f64>) -> SmStatus {
    guard(|| write(out, f().map_err(fail)?))
}

unsafe fn graph_ref<'a>(g: *const SmGraph) -> Result<&'a WeightedGraph, SmStatus> {
    g.as_ref().map(|g| &g.inner).ok_or_else(|| null("graph"))
}

fn boxed_matching(m: Matching, out: *mut *mut SmMatching) -> Result<(), SmStatus> {
    write(out, Box::into_raw(Box::new(SmMatching { inner: m })))
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Build a graph on `n` vertices from `m` edges given as parallel arrays.
///
/// # Safety
/// `us`, `vs`, `ws` must each point to `m` readable elements (or be null
/// when `m == 0`); `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_graph_new(
    n: usize,
    us: *const usize,
    vs: *const usize,
    ws: *const f64,
    m: usize,
    out: *mut *mut SmGraph,
) -> SmStatus {
    guard(|| {
        let edges: Vec<(usize, usize, f64)> = if m == 0 {
            Vec::new()
        } else {
            if us.is_null() || vs.is_null() || ws.is_null() {
                return Err(null("edge arrays"));
            }
            let (us, vs, ws) = (
                std::slice::from_raw_parts(us, m),
                std::slice::from_raw_parts(vs, m),
                std::slice::from_raw_parts(ws, m),
            );
            (0..m).map(|i| (us[i], vs[i], ws[i])).collect()
        };
        let g = WeightedGraph::new(n, edges).map_err(fail)?;
        write(out, Box::into_raw(Box::new(SmGraph { inner: g })))
    })
}

/// Parse a graph from `{"n": .., "edges": [[u, v, w], ..]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_graph_from_json(json: *const c_char, out: *mut *mut SmGraph) -> SmStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let s = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| fail(Error::Input("json is not valid UTF-8".into())))?;
        let g = WeightedGraph::from_json_str(s).map_err(fail)?;
        write(out, Box::into_raw(Box::new(SmGraph { inner: g })))
    })
}

/// # Safety
/// `g` must come from a graph constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sm_graph_free(g: *mut SmGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live graph handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_graph_vertex_count(g: *const SmGraph, out: *mut usize) -> SmStatus {
    guard(|| write(out, graph_ref(g)?.n()))
}

/// Weight of the pair `{u, v}` (0 for absent pairs).
///
/// # Safety
/// `g` must be a live graph handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_graph_weight(g: *const SmGraph, u: usize, v: usize, out: *mut f64) -> SmStatus {
    guard(|| {
        let g = graph_ref(g)?;
        if u >= g.n() || v >= g.n() {
            return Err(fail(Error::Input(format!(
                "vertex out of range for n = {}",
                g.n()
            ))));
        }
        write(out, g.weight(u, v))
    })
}

/// Maximum-weight matching on the whole vertex set.
///
/// # Safety
/// `g` must be a live graph handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_max_weight_matching(g: *const SmGraph, out: *mut *mut SmMatching) -> SmStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let m = max_weight_matching(g, &VertexSubset::all(g.n())).map_err(fail)?;
        boxed_matching(m, out)
    })
}

/// One run of the vertex-arrival algorithm with exploration length `k`.
/// Order and coin streams are derived from `seed` as in the CLI.
///
/// # Safety
/// `g` must be a live graph handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_vertex_run(
    g: *const SmGraph,
    k: usize,
    seed: u64,
    out: *mut *mut SmMatching,
) -> SmStatus {
    guard(|| {
        let inst = VertexInstance::new(graph_ref(g)?.clone());
        let mut order_rng = stream_rng(seed, 0, Stream::Order);
        let mut coins = stream_rng(seed, 0, Stream::Coins);
        let order = ArrivalOrder::random(inst.n(), &mut order_rng);
        let trace = vertex::run_vertex_algorithm(&inst, &order, k, &mut coins).map_err(fail)?;
        boxed_matching(trace.matching, out)
    })
}

/// # Safety
/// `m` must come from a matching constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sm_matching_free(m: *mut SmMatching) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be a live matching handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_matching_len(m: *const SmMatching, out: *mut usize) -> SmStatus {
    guard(|| write(out, m.as_ref().ok_or_else(|| null("matching"))?.inner.len()))
}

/// The `i`-th pair, with `u < v`, in ascending order.
///
/// # Safety
/// `m` must be a live matching handle; `u` and `v` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_matching_pair(
    m: *const SmMatching,
    i: usize,
    u: *mut usize,
    v: *mut usize,
) -> SmStatus {
    guard(|| {
        let m = &m.as_ref().ok_or_else(|| null("matching"))?.inner;
        let &(a, b) = m.edges().get(i).ok_or_else(|| {
            fail(Error::Input(format!(
                "pair index {i} out of range ({} pairs)",
                m.len()
            )))
        })?;
        write(u, a)?;
        write(v, b)
    })
}

/// Total weight of `m` in `g`.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_matching_weight(
    m: *const SmMatching,
    g: *const SmGraph,
    out: *mut f64,
) -> SmStatus {
    guard(|| {
        let m = &m.as_ref().ok_or_else(|| null("matching"))?.inner;
        write(out, m.weight(graph_ref(g)?))
    })
}

/// Exact expected weight of the edge-arrival algorithm (at most 8 positive
/// edges).
///
/// # Safety
/// `g` must be a live graph handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_edge_exact_expected_value(g: *const SmGraph, out: *mut f64) -> SmStatus {
    guard(|| {
        let inst = EdgeInstance::new(graph_ref(g)?.clone()).map_err(fail)?;
        write(out, edge::exact_expected_value(&inst).map_err(fail)?)
    })
}

/// Probability that a vertex among the first `t` arrivals is matched, by
/// recursion (`1 ≤ k ≤ t`).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_p_recursive(k: usize, t: usize, out: *mut f64) -> SmStatus {
    scalar(out, || vertex::p_recursive(k, t))
}

/// Closed form of the same probability (`3 ≤ k ≤ t`).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_p_closed(k: usize, t: usize, out: *mut f64) -> SmStatus {
    scalar(out, || vertex::p_closed(k, t))
}

/// Edge-arrival acceptance target `α_t` in closed form (`m/2 < t ≤ m`).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_alpha_closed(m: usize, t: usize, out: *mut f64) -> SmStatus {
    scalar(out, || edge::alpha_closed(m, t))
}

/// Hypergraph `α_t` in closed form.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_hyper_alpha_closed(m: usize, d: usize, t: usize, out: *mut f64) -> SmStatus {
    scalar(out, || hyper::hyper_alpha_closed(m, d, t))
}

/// Lower-bound coefficient of the hypergraph algorithm.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_hyper_coefficient(m: usize, d: usize, out: *mut f64) -> SmStatus {
    scalar(out, || hyper::hyper_coefficient(m, d))
}

/// Objective of an ordinal policy `c_1..c_n`, each in `[0, 1]`.
///
/// # Safety
/// `c` must point to `n` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_ordinal_objective(c: *const f64, n: usize, out: *mut f64) -> SmStatus {
    guard(|| {
        if c.is_null() {
            return Err(null("policy"));
        }
        let policy = ordinal::OrdinalPolicy::new(std::slice::from_raw_parts(c, n).to_vec()).map_err(fail)?;
        write(out, ordinal::objective(&policy))
    })
}

/// Value of the threshold policy with cutoff `l` on `n` vertices.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_threshold_value(n: usize, l: usize, out: *mut f64) -> SmStatus {
    scalar(out, || ordinal::threshold_value(n, l))
}

/// Best threshold for `n`; `l_star` receives the smallest maximiser.
///
/// # Safety
/// `l_star` and `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_optimal_threshold(n: usize, l_star: *mut usize, value: *mut f64) -> SmStatus {
    guard(|| {
        let o = ordinal::optimal_threshold(n).map_err(fail)?;
        write(l_star, o.l_star[0])?;
        write(value, o.value)
    })
}
