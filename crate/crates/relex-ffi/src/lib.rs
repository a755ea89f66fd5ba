//! C ABI for loading and querying trained relation-extraction models.
//!
//! Models are created and trained with the `relex` library or CLI and
//! persisted to plain-text files; this crate exposes loading and scoring
//! to C callers through opaque handles. Every fallible function returns a
//! [`RelexStatus`] and writes its result through an out-pointer; on
//! failure, [`relex_last_error_message`] returns a human-readable
//! description of what went wrong on the current thread.
//!
//! The generated header lands in `include/relex.h` at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use relex::embedding::SparseVector;
use relex::error::RelexError;
use relex::ingest::triples::Triple;
use relex::kbembed::{CalibrationDirection, KBModel};
use relex::mention2rel::M2RModel;

/// Result of a C-API call. `RELEX_STATUS_OK` is zero; every other value
/// signals failure and leaves details in `relex_last_error_message`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelexStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    Utf8 = 2,
    /// An argument was outside its domain (unknown token, bad threshold…).
    InvalidArgument = 3,
    /// The operating system reported an I/O failure.
    Io = 4,
    /// A model or data file failed to parse.
    Parse = 5,
    /// Model files disagree with each other or with this library version.
    Format = 6,
    /// A numeric invariant was violated.
    Numeric = 7,
    /// An unexpected internal failure.
    Unknown = 8,
}

/// How the calibrated knowledge-base score reads the relationship ranking.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelexCalibration {
    /// Fire when fewer than `threshold` relationships strictly beat the
    /// candidate.
    TopRank = 0,
    /// Fire when the candidate strictly beats fewer than `threshold`
    /// relationships.
    Literal = 1,
}

impl From<RelexCalibration> for CalibrationDirection {
    fn from(c: RelexCalibration) -> Self {
        match c {
            RelexCalibration::TopRank => CalibrationDirection::TopRank,
            RelexCalibration::Literal => CalibrationDirection::Literal,
        }
    }
}

/// Opaque handle to a trained mention-scoring model.
pub struct RelexM2r {
    inner: M2RModel,
}

/// Opaque handle to a trained knowledge-base embedding model.
pub struct RelexKb {
    inner: KBModel,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(e: &RelexError) -> RelexStatus {
    match e {
        RelexError::InvalidArgument(_)
        | RelexError::EmptyDataset(_)
        | RelexError::EmptyGold => RelexStatus::InvalidArgument,
        RelexError::Io { .. } => RelexStatus::Io,
        RelexError::Parse { .. } => RelexStatus::Parse,
        RelexError::DimensionMismatch { .. }
        | RelexError::VersionMismatch { .. }
        | RelexError::UnknownToken { .. } => RelexStatus::Format,
        RelexError::NonFiniteLoss { .. } => RelexStatus::Numeric,
    }
}

fn fail(e: RelexError) -> RelexStatus {
    set_error(&e.to_string());
    status_of(&e)
}

/// Runs an FFI body, converting panics into `RELEX_STATUS_UNKNOWN` instead
/// of unwinding across the C boundary.
fn guard(body: impl FnOnce() -> RelexStatus) -> RelexStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            RelexStatus::Unknown
        }
    }
}

/// Reads a required C string argument.
///
/// # Safety
/// `ptr` must be null or point to a NUL-terminated string.
unsafe fn cstr<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, RelexStatus> {
    if ptr.is_null() {
        set_error(&format!("{what} is null"));
        return Err(RelexStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error(&format!("{what} is not valid UTF-8"));
        RelexStatus::Utf8
    })
}

fn require<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, RelexStatus> {
    unsafe { ptr.as_ref() }.ok_or_else(|| {
        set_error(&format!("{what} is null"));
        RelexStatus::NullArgument
    })
}

fn require_out<'a, T>(ptr: *mut T, what: &str) -> Result<&'a mut T, RelexStatus> {
    unsafe { ptr.as_mut() }.ok_or_else(|| {
        set_error(&format!("{what} is null"));
        RelexStatus::NullArgument
    })
}

/// Collects a C array of feature tokens into the model's sparse encoding.
/// Unknown tokens are dropped, duplicates collapse.
unsafe fn encode_features(
    model: &M2RModel,
    features: *const *const c_char,
    n_features: usize,
    what: &str,
) -> Result<SparseVector, RelexStatus> {
    if n_features > 0 && features.is_null() {
        set_error(&format!("{what} is null with nonzero length"));
        return Err(RelexStatus::NullArgument);
    }
    let mut indices = Vec::new();
    for i in 0..n_features {
        let token = cstr(*features.add(i), "feature token")?;
        if let Some(id) = model.feature_vocab().id(token) {
            indices.push(id);
        }
    }
    Ok(SparseVector::new(indices))
}

/// Resolves entity and relationship tokens against the KB vocabularies.
unsafe fn resolve_triple(
    model: &KBModel,
    head: *const c_char,
    relation: *const c_char,
    tail: *const c_char,
) -> Result<Triple, RelexStatus> {
    let head = cstr(head, "head")?;
    let relation = cstr(relation, "relation")?;
    let tail = cstr(tail, "tail")?;
    let lookup = |token: &str, vocab: Option<usize>, kind: &str| {
        vocab.ok_or_else(|| {
            set_error(&format!("unknown {kind} token {token:?}"));
            RelexStatus::InvalidArgument
        })
    };
    Ok(Triple {
        head: lookup(head, model.entity_vocab().id(head), "entity")?,
        relation: lookup(relation, model.relation_vocab().id(relation), "relationship")?,
        tail: lookup(tail, model.entity_vocab().id(tail), "entity")?,
    })
}

/// The library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn relex_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread. Never null;
/// empty before any failure.
#[no_mangle]
pub extern "C" fn relex_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Frees a string returned by this library (e.g. by `relex_m2r_predict`).
/// Accepts null.
///
/// # Safety
/// `s` must be null or a pointer previously returned by this library and
/// not yet freed.
#[no_mangle]
pub unsafe extern "C" fn relex_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads a mention-scoring model from `<prefix>.features` and
/// `<prefix>.relations`. On success writes a handle to `out`; free it with
/// `relex_m2r_free`.
///
/// # Safety
/// `prefix` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn relex_m2r_load(
    prefix: *const c_char,
    out: *mut *mut RelexM2r,
) -> RelexStatus {
    guard(|| {
        let out = match require_out(out, "out") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let prefix = match cstr(prefix, "prefix") {
            Ok(v) => v,
            Err(s) => return s,
        };
        match M2RModel::load(Path::new(prefix)) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(RelexM2r { inner }));
                RelexStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Frees a mention-model handle. Accepts null.
///
/// # Safety
/// `model` must be null or an unfreed handle from `relex_m2r_load`.
#[no_mangle]
pub unsafe extern "C" fn relex_m2r_free(model: *mut RelexM2r) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Embedding dimension of a loaded mention model.
///
/// # Safety
/// `model` must be a valid handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn relex_m2r_dim(
    model: *const RelexM2r,
    out: *mut usize,
) -> RelexStatus {
    guard(|| {
        match (require(model, "model"), require_out(out, "out")) {
            (Ok(m), Ok(out)) => {
                *out = m.inner.dim();
                RelexStatus::Ok
            }
            (Err(s), _) | (_, Err(s)) => s,
        }
    })
}

/// Number of relationships the model scores, the no-relation label included.
///
/// # Safety
/// `model` must be a valid handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn relex_m2r_num_relations(
    model: *const RelexM2r,
    out: *mut usize,
) -> RelexStatus {
    guard(|| {
        match (require(model, "model"), require_out(out, "out")) {
            (Ok(m), Ok(out)) => {
                *out = m.inner.n_relations();
                RelexStatus::Ok
            }
            (Err(s), _) | (_, Err(s)) => s,
        }
    })
}

/// Scores one relationship for a mention given as an array of feature
/// tokens. Tokens outside the model vocabulary are ignored; the
/// relationship token must be known.
///
/// # Safety
/// `features` must point to `n_features` NUL-terminated strings; `model`,
/// `relation` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn relex_m2r_score(
    model: *const RelexM2r,
    features: *const *const c_char,
    n_features: usize,
    relation: *const c_char,
    out: *mut f64,
) -> RelexStatus {
    guard(|| {
        let (m, out) = match (require(model, "model"), require_out(out, "out")) {
            (Ok(m), Ok(out)) => (m, out),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let mention = match encode_features(&m.inner, features, n_features, "features") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let token = match cstr(relation, "relation") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let Some(relation) = m.inner.relation_vocab().id(token) else {
            set_error(&format!("unknown relationship token {token:?}"));
            return RelexStatus::InvalidArgument;
        };
        match m.inner.score(&mention, relation) {
            Ok(score) => {
                *out = score;
                RelexStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Predicts the highest-scoring relationship for a mention. Writes the
/// relationship token to `out_relation` (free with `relex_string_free`)
/// and, if `out_score` is non-null, the winning score.
///
/// # Safety
/// `features` must point to `n_features` NUL-terminated strings; `model`
/// and `out_relation` must be valid.
#[no_mangle]
pub unsafe extern "C" fn relex_m2r_predict(
    model: *const RelexM2r,
    features: *const *const c_char,
    n_features: usize,
    out_relation: *mut *mut c_char,
    out_score: *mut f64,
) -> RelexStatus {
    guard(|| {
        let (m, out_relation) =
            match (require(model, "model"), require_out(out_relation, "out_relation")) {
                (Ok(m), Ok(o)) => (m, o),
                (Err(s), _) | (_, Err(s)) => return s,
            };
        let mention = match encode_features(&m.inner, features, n_features, "features") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let relation = match m.inner.predict(&mention) {
            Ok(r) => r,
            Err(e) => return fail(e),
        };
        if !out_score.is_null() {
            match m.inner.score(&mention, relation) {
                Ok(score) => *out_score = score,
                Err(e) => return fail(e),
            }
        }
        let token = m.inner.relation_vocab().token(relation);
        match CString::new(token) {
            Ok(s) => {
                *out_relation = s.into_raw();
                RelexStatus::Ok
            }
            Err(_) => {
                set_error("relationship token contains a NUL byte");
                RelexStatus::Unknown
            }
        }
    })
}

/// Loads a knowledge-base model from `<prefix>.entities` and
/// `<prefix>.relations`. On success writes a handle to `out`; free it with
/// `relex_kb_free`.
///
/// # Safety
/// `prefix` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn relex_kb_load(
    prefix: *const c_char,
    out: *mut *mut RelexKb,
) -> RelexStatus {
    guard(|| {
        let out = match require_out(out, "out") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let prefix = match cstr(prefix, "prefix") {
            Ok(v) => v,
            Err(s) => return s,
        };
        match KBModel::load(Path::new(prefix)) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(RelexKb { inner }));
                RelexStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Frees a knowledge-base handle. Accepts null.
///
/// # Safety
/// `model` must be null or an unfreed handle from `relex_kb_load`.
#[no_mangle]
pub unsafe extern "C" fn relex_kb_free(model: *mut RelexKb) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Plausibility of a (head, relationship, tail) fact given as tokens:
/// `−‖h + r − t‖²`, 0 for a perfect translation. All three tokens must be
/// in the model vocabularies.
///
/// # Safety
/// All pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn relex_kb_score(
    model: *const RelexKb,
    head: *const c_char,
    relation: *const c_char,
    tail: *const c_char,
    out: *mut f64,
) -> RelexStatus {
    guard(|| {
        let (m, out) = match (require(model, "model"), require_out(out, "out")) {
            (Ok(m), Ok(out)) => (m, out),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let triple = match resolve_triple(&m.inner, head, relation, tail) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match m.inner.score(&triple) {
            Ok(score) => {
                *out = score;
                RelexStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Number of relationships the candidate strictly beats for this entity
/// pair; `n_relations − 1` means it ranks first.
///
/// # Safety
/// All pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn relex_kb_rank(
    model: *const RelexKb,
    head: *const c_char,
    relation: *const c_char,
    tail: *const c_char,
    out: *mut usize,
) -> RelexStatus {
    guard(|| {
        let (m, out) = match (require(model, "model"), require_out(out, "out")) {
            (Ok(m), Ok(out)) => (m, out),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let triple = match resolve_triple(&m.inner, head, relation, tail) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match m.inner.rank_relation(&triple) {
            Ok(rank) => {
                *out = rank;
                RelexStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Binary calibrated score: 1.0 when the relationship ranks within
/// `threshold` for its pair under the chosen reading, else 0.0.
/// `threshold` must be at least 1.
///
/// # Safety
/// All pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn relex_kb_calibrated(
    model: *const RelexKb,
    head: *const c_char,
    relation: *const c_char,
    tail: *const c_char,
    threshold: usize,
    direction: RelexCalibration,
    out: *mut f64,
) -> RelexStatus {
    guard(|| {
        let (m, out) = match (require(model, "model"), require_out(out, "out")) {
            (Ok(m), Ok(out)) => (m, out),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let triple = match resolve_triple(&m.inner, head, relation, tail) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match m.inner.calibrated_score(&triple, threshold, direction.into()) {
            Ok(score) => {
                *out = score;
                RelexStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}
