//! C interface to `rhgvec`.
//!
//! Objects cross the boundary as opaque handles that the caller releases
//! with the matching `*_free` function. Every fallible call returns a status
//! code (`RHGVEC_OK` on success) and writes results through out-pointers;
//! the message of the most recent failure on the calling thread is
//! available from `rhgvec_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use ndarray::Array2;
use rhgvec::alignment::{align, apply_alignment, random_baseline, AlignmentConfig, AlignmentResult};
use rhgvec::hyperbolic::{generate_rhg, ConnectionOperator, DiskConfig, DistancePdf, Rhg, RhgParams};
use rhgvec::spectral::{embeddings_from_svd, truncated_svd, SvdOptions};
use rhgvec::{EmbeddingMatrix, Error};

pub const RHGVEC_OK: i32 = 0;
pub const RHGVEC_ERR_NULL_POINTER: i32 = 1;
pub const RHGVEC_ERR_INVALID_ARGUMENT: i32 = 2;
pub const RHGVEC_ERR_DIMENSION_MISMATCH: i32 = 3;
pub const RHGVEC_ERR_DEGENERATE: i32 = 4;
pub const RHGVEC_ERR_CONVERGENCE: i32 = 5;
pub const RHGVEC_ERR_IO: i32 = 6;
pub const RHGVEC_ERR_PARSE: i32 = 7;
pub const RHGVEC_ERR_BUFFER_TOO_SMALL: i32 = 8;
pub const RHGVEC_ERR_PANIC: i32 = 9;

/// A sampled random hyperbolic graph.
pub struct RhgvecGraph {
    inner: Rhg,
}

/// An `n × d` embedding matrix with one label per row.
pub struct RhgvecEmbedding {
    inner: EmbeddingMatrix,
}

/// Orthogonal map, permutation and loss of one alignment.
pub struct RhgvecAlignment {
    inner: AlignmentResult,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn code_of(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) | Error::Domain(_) | Error::Config(_) | Error::EmptyCorpus(_) => {
            RHGVEC_ERR_INVALID_ARGUMENT
        }
        Error::DimensionMismatch(_) => RHGVEC_ERR_DIMENSION_MISMATCH,
        Error::Degenerate(_) => RHGVEC_ERR_DEGENERATE,
        Error::Calibration(_) | Error::Convergence(_) | Error::Divergence(_) => RHGVEC_ERR_CONVERGENCE,
        Error::Io(_) | Error::MissingArtifact(_) => RHGVEC_ERR_IO,
        Error::Parse { .. } => RHGVEC_ERR_PARSE,
    }
}

struct Fail(i32, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(code_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(RHGVEC_ERR_NULL_POINTER, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RHGVEC_OK,
        Ok(Err(Fail(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            RHGVEC_ERR_PANIC
        }
    }
}

unsafe fn out<T>(ptr: *mut *mut T, value: T) -> Result<(), Fail> {
    if ptr.is_null() {
        return Err(null("output pointer"));
    }
    *ptr = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn handle<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, Fail> {
    ptr.as_ref().ok_or_else(|| null(what))
}

unsafe fn copy_out(src: &[f64], dst: *mut f64, len: usize) -> Result<(), Fail> {
    if dst.is_null() {
        return Err(null("buffer"));
    }
    if len < src.len() {
        return Err(Fail(
            RHGVEC_ERR_BUFFER_TOO_SMALL,
            format!("buffer holds {len} values, need {}", src.len()),
        ));
    }
    std::ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
    Ok(())
}

unsafe fn path_arg(p: *const c_char) -> Result<PathBuf, Fail> {
    if p.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(RHGVEC_ERR_INVALID_ARGUMENT, "path is not UTF-8".into()))?;
    Ok(PathBuf::from(s))
}

/// Message of the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rhgvec_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rhgvec_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Density of the distance between two random points of a disk of radius
/// `radius` with radial parameter `alpha`, evaluated at `x > 0`.
///
/// # Safety
/// `density` must be a valid pointer to one `double`.
#[no_mangle]
pub unsafe extern "C" fn rhgvec_distance_density(radius: f64, alpha: f64, x: f64, density: *mut f64) -> i32 {
    guard(|| {
        if density.is_null() {
            return Err(null("density"));
        }
        let pdf = DistancePdf::new(DiskConfig::new(radius, alpha)?);
        *density = pdf.density(x)?;
        Ok(())
    })
}

/// Samples a random hyperbolic graph with `n` nodes whose expected mean
/// degree is `kbar` and degree exponent is `gamma`.
///
/// # Safety
/// `graph` must be a valid pointer; on success it receives a handle to be
/// released with `rhgvec_graph_free`.
#[no_mangle]
pub unsafe extern "C" fn rhgvec_graph_generate(
    n: usize,
    kbar: f64,
    gamma: f64,
    seed: u64,
    graph: *mut *mut RhgvecGraph,
) -> i32 {
    guard(|| {
        let inner = generate_rhg(&RhgParams { n, kbar, gamma, seed })?;
        out(graph, RhgvecGraph { inner })
    })
}

/// # Safety
/// `graph` must be null or a handle from `rhgvec_graph_generate` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rhgvec_graph_free(graph: *mut RhgvecGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// # Safety
/// `graph` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rhgvec_graph_num_nodes(graph: *const RhgvecGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.inner.n())
}

/// # Safety
/// `graph` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rhgvec_graph_num_edges(graph: *const RhgvecGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.inner.edges.len())
}

/// Disk radius and radial parameter of the graph.
///
/// # Safety
/// `graph` must be a live handle; `radius` and `alpha` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn rhgvec_graph_disk(graph: *const RhgvecGraph, radius: *mut f64, alpha: *mut f64) -> i32 {
    guard(|| {
        let g = handle(graph, "graph")?;
        if radius.is_null() || alpha.is_null() {
            return Err(null("output"));
        }
        *radius = g.inner.config.radius;
        *alpha = g.inner.config.alpha;
        Ok(())
    })
}

/// Writes edges as `2 · num_edges` node ids `(i₀, j₀, i₁, j₁, …)` with
/// `i < j`.
///
/// # Safety
/// `graph` must be a live handle; `pairs` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn rhgvec_graph_edges(graph: *const RhgvecGraph, pairs: *mut u32, len: usize) -> i32 {
    guard(|| {
        let g = handle(graph, "graph")?;
        if pairs.is_null() {
            return Err(null("pairs"));
        }
        let need = 2 * g.inner.edges.len();
        if len < need {
            return Err(Fail(RHGVEC_ERR_BUFFER_TOO_SMALL, format!("buffer holds {len} ids, need {need}")));
        }
        let dst = std::slice::from_raw_parts_mut(pairs, need);
        for (k, &(i, j)) in g.inner.edges.iter().enumerate() {
            dst[2 * k] = i;
            dst[2 * k + 1] = j;
        }
        Ok(())
    })
}

/// `dim`-dimensional spectral embedding of the graph's connection
/// probabilities.
///
/// # Safety
/// `graph` must be a live handle; `embedding` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rhgvec_graph_embed(
    graph: *const RhgvecGraph,
    dim: usize,
    seed: u64,
    embedding: *mut *mut RhgvecEmbedding,
) -> i32 {
    guard(|| {
        let g = handle(graph, "graph")?;
        let op = ConnectionOperator::new(&g.inner.points, g.inner.config.radius)?;
        let svd = truncated_svd(&op, &SvdOptions::new(dim, seed))?;
        out(embedding, RhgvecEmbedding { inner: embeddings_from_svd(&svd)? })
    })
}

/// Copies a row-major `n × d` matrix; rows are labelled `0 … n−1`.
///
/// # Safety
/// `data` must point to `n · d` readable values; `embedding` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rhgvec_embedding_from_rows(
    data: *const f64,
    n: usize,
    d: usize,
    embedding: *mut *mut RhgvecEmbedding,
) -> i32 {
    guard(|| {
        if data.is_null() {
            return Err(null("data"));
        }
        let len = n
            .checked_mul(d)
            .ok_or_else(|| Fail(RHGVEC_ERR_INVALID_ARGUMENT, "n * d overflows".into()))?;
        let values = std::slice::from_raw_parts(data, len).to_vec();
        let m = Array2::from_shape_vec((n, d), values).map_err(|e| Fail(RHGVEC_ERR_INVALID_ARGUMENT, e.to_string()))?;
        out(embedding, RhgvecEmbedding { inner: EmbeddingMatrix::with_index_labels(m)? })
    })
}

/// `n × d` matrix of i.i.d. standard normal entries.
///
/// # Safety
/// `embedding` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rhgvec_embedding_random(n: usize, d: usize, seed: u64, embedding: *mut *mut RhgvecEmbedding) -> i32 {
    guard(|| out(embedding, RhgvecEmbedding { inner: random_baseline(n, d, seed)? }))
}

/// Reads the text format `n d` followed by `label v₁ … v_d` rows.
///
/// # Safety
/// `path` must be a NUL-terminated string; `embedding` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rhgvec_embedding_load(path: *const c_char, embedding: *mut *mut RhgvecEmbedding) -> i32 {
    guard(|| {
        let p = path_arg(path)?;
        let f = std::fs::File::open(&p).map_err(Error::from)?;
        let inner = EmbeddingMatrix::read_text(f, &p.display().to_string())?;
        out(embedding, RhgvecEmbedding { inner })
    })
}

/// # Safety
/// `embedding` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn rhgvec_embedding_save(embedding: *const RhgvecEmbedding, path: *const c_char) -> i32 {
    guard(|| {
        let e = handle(embedding, "embedding")?;
        let p = path_arg(path)?;
        let f = std::fs::File::create(p).map_err(Error::from)?;
        let mut w = std::io::BufWriter::new(f);
        e.inner.write_text(&mut w)?;
        std::io::Write::flush(&mut w).map_err(Error::from)?;
        Ok(())
    })
}

/// # Safety
/// `embedding` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rhgvec_embedding_rows(embedding: *const RhgvecEmbedding) -> usize {
    embedding.as_ref().map_or(0, |e| e.inner.n())
}

/// # Safety
/// `embedding` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rhgvec_embedding_dim(embedding: *const RhgvecEmbedding) -> usize {
    embedding.as_ref().map_or(0, |e| e.inner.dim())
}

/// Copies the matrix row-major into `out_values`, which holds `len` values.
///
/// # Safety
/// `embedding` must be a live handle; `out_values` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn rhgvec_embedding_values(embedding: *const RhgvecEmbedding, out_values: *mut f64, len: usize) -> i32 {
    guard(|| {
        let e = handle(embedding, "embedding")?;
        let data = e.inner.data().as_standard_layout();
        copy_out(data.as_slice().expect("standard layout"), out_values, len)
    })
}

/// # Safety
/// `embedding` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rhgvec_embedding_free(embedding: *mut RhgvecEmbedding) {
    if !embedding.is_null() {
        drop(Box::from_raw(embedding));
    }
}

/// Aligns `target` to `reference`: finds an orthogonal map and a row
/// permutation so that `reference · Q ≈ P · target`. Zero for
/// `batch_size` or `epochs` selects the default.
///
/// # Safety
/// Both embeddings must be live handles; `alignment` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rhgvec_align(
    reference: *const RhgvecEmbedding,
    target: *const RhgvecEmbedding,
    batch_size: usize,
    epochs: usize,
    seed: u64,
    alignment: *mut *mut RhgvecAlignment,
) -> i32 {
    guard(|| {
        let a = handle(reference, "reference")?;
        let b = handle(target, "target")?;
        let mut cfg = AlignmentConfig { seed, ..AlignmentConfig::default() };
        if batch_size > 0 {
            cfg.batch_size = batch_size;
        }
        if epochs > 0 {
            cfg.epochs = epochs;
        }
        out(alignment, RhgvecAlignment { inner: align(&a.inner, &b.inner, &cfg)? })
    })
}

/// Final objective value on the normalized inputs.
///
/// # Safety
/// `alignment` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rhgvec_alignment_loss(alignment: *const RhgvecAlignment) -> f64 {
    alignment.as_ref().map_or(f64::NAN, |a| a.inner.loss)
}

/// Writes the permutation: entry `i` is the target row matched to
/// reference row `i`.
///
/// # Safety
/// `alignment` must be a live handle; `perm` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn rhgvec_alignment_permutation(alignment: *const RhgvecAlignment, perm: *mut usize, len: usize) -> i32 {
    guard(|| {
        let a = handle(alignment, "alignment")?;
        if perm.is_null() {
            return Err(null("perm"));
        }
        let p = &a.inner.perm;
        if len < p.len() {
            return Err(Fail(RHGVEC_ERR_BUFFER_TOO_SMALL, format!("buffer holds {len} ids, need {}", p.len())));
        }
        std::ptr::copy_nonoverlapping(p.as_ptr(), perm, p.len());
        Ok(())
    })
}

/// Writes the `d × d` orthogonal map row-major.
///
/// # Safety
/// `alignment` must be a live handle; `q` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn rhgvec_alignment_map(alignment: *const RhgvecAlignment, q: *mut f64, len: usize) -> i32 {
    guard(|| {
        let a = handle(alignment, "alignment")?;
        let m = a.inner.q.as_standard_layout();
        copy_out(m.as_slice().expect("standard layout"), q, len)
    })
}

/// Reorders the rows of `target` by the alignment's permutation, taking
/// row labels from `reference`.
///
/// # Safety
/// All handles must be live; `aligned` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rhgvec_alignment_apply(
    alignment: *const RhgvecAlignment,
    reference: *const RhgvecEmbedding,
    target: *const RhgvecEmbedding,
    aligned: *mut *mut RhgvecEmbedding,
) -> i32 {
    guard(|| {
        let al = handle(alignment, "alignment")?;
        let a = handle(reference, "reference")?;
        let b = handle(target, "target")?;
        let inner = apply_alignment(&b.inner, &al.inner, a.inner.labels().to_vec())?;
        out(aligned, RhgvecEmbedding { inner })
    })
}

/// # Safety
/// `alignment` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rhgvec_alignment_free(alignment: *mut RhgvecAlignment) {
    if !alignment.is_null() {
        drop(Box::from_raw(alignment));
    }
}
