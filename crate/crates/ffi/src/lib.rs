//! C interface to linkclust.
//!
//! Every fallible function returns an [`LcStatus`]; on failure the message is
//! available from [`lc_last_error`] on the same thread. Handles are opaque and
//! must be released with their matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use linkclust::output::ClusterReport;
use linkclust::{ClusterParams, Corpus, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    InvalidParam = 5,
    OutOfRange = 6,
    Internal = 7,
}

/// A loaded corpus.
pub struct LcCorpus(Corpus);

/// The outcome of one clustering run.
pub struct LcResult(ClusterReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: LcStatus, msg: impl Into<String>) -> LcStatus {
    set_error(msg);
    status
}

fn status_of(err: &Error) -> LcStatus {
    match err {
        Error::Io { .. } => LcStatus::Io,
        Error::Parse { .. } | Error::DuplicateUrl { .. } | Error::Json(_) => LcStatus::Parse,
        Error::InvalidParam(_) => LcStatus::InvalidParam,
        _ => LcStatus::Internal,
    }
}

fn guard(f: impl FnOnce() -> LcStatus) -> LcStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(LcStatus::Internal, "panic inside linkclust"))
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, LcStatus> {
    if s.is_null() {
        return Err(fail(LcStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(LcStatus::InvalidUtf8, "string argument is not UTF-8"))
}

fn store<T>(out: *mut *mut T, value: T) -> LcStatus {
    // SAFETY: callers check `out` for null before calling.
    unsafe { *out = Box::into_raw(Box::new(value)) };
    LcStatus::Ok
}

fn load(out: *mut *mut LcCorpus, r: linkclust::Result<Corpus>) -> LcStatus {
    match r {
        Ok(c) => store(out, LcCorpus(c)),
        Err(e) => fail(status_of(&e), e.to_string()),
    }
}

/// Message for the last failed call on this thread, or NULL. Valid until
/// the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn lc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Load a JSONL corpus file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lc_corpus_load_path(path: *const c_char, out: *mut *mut LcCorpus) -> LcStatus {
    guard(|| {
        if out.is_null() {
            return fail(LcStatus::NullPointer, "out is null");
        }
        match read_str(path) {
            Ok(p) => load(out, linkclust::load_corpus(p)),
            Err(s) => s,
        }
    })
}

/// Parse a corpus from JSONL text held in memory.
///
/// # Safety
/// `jsonl` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lc_corpus_load_jsonl(jsonl: *const c_char, out: *mut *mut LcCorpus) -> LcStatus {
    guard(|| {
        if out.is_null() {
            return fail(LcStatus::NullPointer, "out is null");
        }
        match read_str(jsonl) {
            Ok(text) => load(out, Corpus::from_jsonl_str(text)),
            Err(s) => s,
        }
    })
}

/// Number of documents, or 0 for NULL.
///
/// # Safety
/// `corpus` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lc_corpus_len(corpus: *const LcCorpus) -> usize {
    corpus.as_ref().map_or(0, |c| c.0.len())
}

/// # Safety
/// `corpus` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lc_corpus_free(corpus: *mut LcCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

/// Seed from links, then cluster with threshold `alpha`.
///
/// # Safety
/// `corpus` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lc_cluster_linked(corpus: *const LcCorpus, alpha: f64, out: *mut *mut LcResult) -> LcStatus {
    guard(|| {
        let Some(c) = corpus.as_ref() else {
            return fail(LcStatus::NullPointer, "corpus is null");
        };
        if out.is_null() {
            return fail(LcStatus::NullPointer, "out is null");
        }
        let run = ClusterParams::with_alpha(alpha).and_then(|p| linkclust::run_linked_kmeans(&c.0, &p));
        match run {
            Ok(outcome) => store(out, LcResult(ClusterReport::from_linked(&outcome))),
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// # Safety
/// `result` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lc_result_k_seed(result: *const LcResult) -> usize {
    result.as_ref().map_or(0, |r| r.0.k_seed)
}

/// # Safety
/// `result` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lc_result_k_final(result: *const LcResult) -> usize {
    result.as_ref().map_or(0, |r| r.0.k_final)
}

/// # Safety
/// `result` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lc_result_misc_len(result: *const LcResult) -> usize {
    result.as_ref().map_or(0, |r| r.0.miscellaneous.len())
}

/// Copy the members of cluster `index` into `buf`. `*len` receives the
/// cluster size; nothing is copied when `cap` is too small, so a call with
/// `cap == 0` queries the size.
///
/// # Safety
/// `result` must be a live handle, `len` valid, and `buf` valid for `cap`
/// elements when `cap > 0`.
#[no_mangle]
pub unsafe extern "C" fn lc_result_cluster_members(
    result: *const LcResult,
    index: usize,
    buf: *mut usize,
    cap: usize,
    len: *mut usize,
) -> LcStatus {
    guard(|| {
        let Some(r) = result.as_ref() else {
            return fail(LcStatus::NullPointer, "result is null");
        };
        if len.is_null() {
            return fail(LcStatus::NullPointer, "len is null");
        }
        let Some(cluster) = r.0.clusters.get(index) else {
            return fail(
                LcStatus::OutOfRange,
                format!("cluster {index} of {}", r.0.clusters.len()),
            );
        };
        let members = &cluster.members;
        *len = members.len();
        if cap >= members.len() && !members.is_empty() {
            if buf.is_null() {
                return fail(LcStatus::NullPointer, "buf is null");
            }
            ptr::copy_nonoverlapping(members.as_ptr(), buf, members.len());
        }
        LcStatus::Ok
    })
}

/// The result as a JSON document; release with [`lc_string_free`].
///
/// # Safety
/// `result` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lc_result_to_json(result: *const LcResult, out: *mut *mut c_char) -> LcStatus {
    guard(|| {
        let Some(r) = result.as_ref() else {
            return fail(LcStatus::NullPointer, "result is null");
        };
        if out.is_null() {
            return fail(LcStatus::NullPointer, "out is null");
        }
        match serde_json::to_string(&r.0).map(CString::new) {
            Ok(Ok(s)) => {
                *out = s.into_raw();
                LcStatus::Ok
            }
            Ok(Err(e)) => fail(LcStatus::Internal, e.to_string()),
            Err(e) => fail(LcStatus::Internal, e.to_string()),
        }
    })
}

/// # Safety
/// `result` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lc_result_free(result: *mut LcResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
