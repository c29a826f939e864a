//! C interface to `arithgraph`.
//!
//! Graphs live behind an opaque [`AgGraph`] handle. Every function returns
//! an `AG_*` status code; results come back through out-pointers. Strings
//! returned through `char **` are owned by the caller and released with
//! [`ag_string_free`]. After a failure, [`ag_last_error`] describes it
//! (per thread, valid until the next call on that thread).
//!
//! Big integers cross the boundary as decimal strings.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use arithgraph::analysis::Analysis;
use arithgraph::breaking::order_via_structure;
use arithgraph::families::FamilySpec;
use arithgraph::graph::parse_graph;
use arithgraph::neron::{psi_classify, Verdict};
use arithgraph::Error;

pub const AG_OK: i32 = 0;
pub const AG_ERR_NULL: i32 = 1;
pub const AG_ERR_UTF8: i32 = 2;
/// Syntax or axiom violation in a graph, or an unknown vertex.
pub const AG_ERR_GRAPH: i32 = 3;
/// Hypotheses of the requested result are not met.
pub const AG_ERR_PRECONDITION: i32 = 4;
pub const AG_ERR_INVALID_ARGUMENT: i32 = 5;
pub const AG_ERR_PANIC: i32 = 6;

pub const AG_VERDICT_TRIVIAL_IMAGE: i32 = 0;
pub const AG_VERDICT_IN_PSI: i32 = 1;
pub const AG_VERDICT_NOT_IN_PSI: i32 = 2;
pub const AG_VERDICT_CONJECTURAL_NOT_IN_PSI: i32 = 3;
pub const AG_VERDICT_UNKNOWN: i32 = 4;

/// Opaque handle to a validated graph and its cached analyses.
pub struct AgGraph {
    inner: Analysis,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = s);
}

fn code_of(e: &Error) -> i32 {
    match e {
        Error::Graph(_) | Error::TrivialPair(_) => AG_ERR_GRAPH,
        Error::Precondition { .. } => AG_ERR_PRECONDITION,
        Error::InvalidArgument(_) | Error::NotTorsion | Error::NotInKernel => AG_ERR_INVALID_ARGUMENT,
    }
}

type FfiResult<T> = Result<T, (i32, String)>;

fn fail(e: impl Into<Error>) -> (i32, String) {
    let e = e.into();
    (code_of(&e), e.to_string())
}

fn guard(f: impl FnOnce() -> FfiResult<()>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AG_OK,
        Ok(Err((code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            AG_ERR_PANIC
        }
    }
}

unsafe fn c_str<'a>(p: *const c_char) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err((AG_ERR_NULL, "null string argument".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (AG_ERR_UTF8, "argument is not UTF-8".into()))
}

unsafe fn graph<'a>(g: *const AgGraph) -> FfiResult<&'a Analysis> {
    g.as_ref()
        .map(|h| &h.inner)
        .ok_or((AG_ERR_NULL, "null graph handle".into()))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> FfiResult<()> {
    if out.is_null() {
        return Err((AG_ERR_NULL, "null output pointer".into()));
    }
    let c = CString::new(s).map_err(|_| (AG_ERR_INVALID_ARGUMENT, "interior NUL in output".into()))?;
    *out = c.into_raw();
    Ok(())
}

fn vertex(a: &Analysis, v: usize) -> FfiResult<usize> {
    if v < a.graph().vertex_count() {
        Ok(v)
    } else {
        Err((AG_ERR_GRAPH, format!("vertex index {v} out of range")))
    }
}

/// Message for the last failed call on this thread; never null.
#[no_mangle]
pub extern "C" fn ag_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn ag_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates a graph file's contents.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ag_graph_parse(text: *const c_char, out: *mut *mut AgGraph) -> i32 {
    guard(|| {
        let t = c_str(text)?;
        if out.is_null() {
            return Err((AG_ERR_NULL, "null output pointer".into()));
        }
        let g = parse_graph(t).map_err(fail)?;
        *out = Box::into_raw(Box::new(AgGraph { inner: Analysis::new(g) }));
        Ok(())
    })
}

/// Generates a family member, e.g. `family = "cycle"`, `args = "6"`.
/// Arguments are separated by whitespace; `seed < 0` means none.
///
/// # Safety
/// String arguments must be NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ag_graph_generate(
    family: *const c_char,
    args: *const c_char,
    seed: i64,
    out: *mut *mut AgGraph,
) -> i32 {
    guard(|| {
        let fam = c_str(family)?;
        let list: Vec<String> = c_str(args)?.split_whitespace().map(String::from).collect();
        if out.is_null() {
            return Err((AG_ERR_NULL, "null output pointer".into()));
        }
        let seed = u64::try_from(seed).ok();
        let g = FamilySpec::from_args(fam, &list, seed)
            .and_then(|s| s.generate())
            .map_err(fail)?;
        *out = Box::into_raw(Box::new(AgGraph { inner: Analysis::new(g) }));
        Ok(())
    })
}

/// # Safety
/// `g` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ag_graph_free(g: *mut AgGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ag_graph_vertex_count(g: *const AgGraph, out: *mut usize) -> i32 {
    guard(|| {
        let a = graph(g)?;
        if out.is_null() {
            return Err((AG_ERR_NULL, "null output pointer".into()));
        }
        *out = a.graph().vertex_count();
        Ok(())
    })
}

/// Index of the vertex called `name`.
///
/// # Safety
/// `g` must be a live handle, `name` NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ag_graph_vertex_index(g: *const AgGraph, name: *const c_char, out: *mut usize) -> i32 {
    guard(|| {
        let a = graph(g)?;
        let n = c_str(name)?;
        if out.is_null() {
            return Err((AG_ERR_NULL, "null output pointer".into()));
        }
        *out = a
            .graph()
            .index_of(n)
            .ok_or_else(|| (AG_ERR_GRAPH, format!("unknown vertex `{n}`")))?;
        Ok(())
    })
}

/// Serialized graph in the line format.
///
/// # Safety
/// `g` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ag_graph_to_text(g: *const AgGraph, out: *mut *mut c_char) -> i32 {
    guard(|| put_string(out, graph(g)?.graph().to_text()))
}

/// Group of components as text, e.g. `Z/2 x Z/2`.
///
/// # Safety
/// `g` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ag_phi_describe(g: *const AgGraph, out: *mut *mut c_char) -> i32 {
    guard(|| put_string(out, graph(g)?.group().describe()))
}

/// Nontrivial invariant factors, comma separated (empty for the trivial
/// group).
///
/// # Safety
/// `g` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ag_phi_invariant_factors(g: *const AgGraph, out: *mut *mut c_char) -> i32 {
    guard(|| {
        let f: Vec<String> = graph(g)?.group().invariant_factors().iter().map(|d| d.to_string()).collect();
        put_string(out, f.join(","))
    })
}

/// Order of `E(c, c2)`; with `ell > 0`, the order of its `ell`-part.
///
/// # Safety
/// `g` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ag_pair_order(g: *const AgGraph, c: usize, c2: usize, ell: u64, out: *mut *mut c_char) -> i32 {
    guard(|| {
        let a = graph(g)?;
        let (x, y) = (vertex(a, c)?, vertex(a, c2)?);
        let o = if ell == 0 {
            a.pair_order(x, y)
        } else {
            arithgraph::arith::require_prime(ell).map_err(fail)?;
            a.pair_ell_part_order(x, y, ell)
        };
        put_string(out, o.to_string())
    })
}

/// Structural order of the `ell`-part of `E(c, c2)`; fails with
/// `AG_ERR_PRECONDITION` outside its hypotheses.
///
/// # Safety
/// `g` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ag_structural_order(
    g: *const AgGraph,
    c: usize,
    c2: usize,
    ell: u64,
    out: *mut *mut c_char,
) -> i32 {
    guard(|| {
        let a = graph(g)?;
        let (x, y) = (vertex(a, c)?, vertex(a, c2)?);
        put_string(out, order_via_structure(a, x, y, ell).map_err(fail)?.to_string())
    })
}

/// `<E(c, c2), E(d, d2)>` in Q/Z as `a/b` (or `0`).
///
/// # Safety
/// `g` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ag_pairing(
    g: *const AgGraph,
    c: usize,
    c2: usize,
    d: usize,
    d2: usize,
    out: *mut *mut c_char,
) -> i32 {
    guard(|| {
        let a = graph(g)?;
        let v = [vertex(a, c)?, vertex(a, c2)?, vertex(a, d)?, vertex(a, d2)?];
        put_string(out, a.pair_pairing((v[0], v[1]), (v[2], v[3])).to_string())
    })
}

/// Membership verdict. `verdict` receives an `AG_VERDICT_*` code,
/// `order` (may be null) the order for `AG_VERDICT_IN_PSI` and an empty
/// string otherwise, `citation` (may be null) a static tag naming the
/// justifying result; do not free it.
///
/// # Safety
/// `g` must be a live handle and the out-pointers valid or null as noted.
#[no_mangle]
pub unsafe extern "C" fn ag_classify(
    g: *const AgGraph,
    c: usize,
    c2: usize,
    ell: u64,
    residue_char: u64,
    verdict: *mut i32,
    order: *mut *mut c_char,
    citation: *mut *const c_char,
) -> i32 {
    guard(|| {
        let a = graph(g)?;
        let (x, y) = (vertex(a, c)?, vertex(a, c2)?);
        if verdict.is_null() {
            return Err((AG_ERR_NULL, "null output pointer".into()));
        }
        let v = psi_classify(a, x, y, ell, residue_char).map_err(fail)?;
        *verdict = match v.verdict {
            Verdict::TrivialImage => AG_VERDICT_TRIVIAL_IMAGE,
            Verdict::InPsi(_) => AG_VERDICT_IN_PSI,
            Verdict::NotInPsi => AG_VERDICT_NOT_IN_PSI,
            Verdict::ConjecturalNotInPsi(_) => AG_VERDICT_CONJECTURAL_NOT_IN_PSI,
            Verdict::Unknown(_) => AG_VERDICT_UNKNOWN,
        };
        if !order.is_null() {
            put_string(order, v.order().map(|o| o.to_string()).unwrap_or_default())?;
        }
        if !citation.is_null() {
            *citation = citation_ptr(v.justification);
        }
        Ok(())
    })
}

fn citation_ptr(tag: &'static str) -> *const c_char {
    use std::collections::HashMap;
    use std::sync::{Mutex, OnceLock};
    // Tags are a small fixed set; each is interned once and lives forever.
    static TABLE: OnceLock<Mutex<HashMap<&'static str, &'static CStr>>> = OnceLock::new();
    let mut t = TABLE.get_or_init(Default::default).lock().unwrap_or_else(|e| e.into_inner());
    t.entry(tag)
        .or_insert_with(|| Box::leak(CString::new(tag).unwrap_or_default().into_boxed_c_str()))
        .as_ptr()
}
