//! C ABI over the `xmlkr` library.
//!
//! A knowledge base is an opaque `XmlkrKb*` created by [`xmlkr_kb_new`] or
//! [`xmlkr_kb_parse`] and released with [`xmlkr_kb_free`]. Every fallible
//! call returns an [`XmlkrStatus`]; on failure [`xmlkr_last_error`] holds a
//! message for the calling thread. Strings returned through `char**` out
//! parameters are owned by the caller and must be released with
//! [`xmlkr_string_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use xmlkr::codec::{self, ParseErrorKind};
use xmlkr::model::{validate, AttributeTree, KnowledgeBase, ObjectName, RelationKind};
use xmlkr::query::{self, QueryError};
use xmlkr::{inference, KbError};

/// Opaque knowledge base handle.
pub struct XmlkrKb {
    kb: KnowledgeBase,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XmlkrStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// The document is malformed or violates the XMLKR grammar.
    ParseError = 3,
    UnknownObject = 4,
    DuplicateObject = 5,
    DuplicateAttribute = 6,
    /// An argument failed validation.
    InvalidArgument = 7,
    QuerySyntax = 8,
    /// The requested attribute is not defined or inherited.
    NotFound = 9,
    Panic = 99,
}

#[derive(Default)]
struct LastError {
    message: Option<CString>,
    line: u32,
    column: u32,
}

thread_local! {
    static LAST_ERROR: RefCell<LastError> = RefCell::new(LastError::default());
}

fn set_error(message: impl Into<String>, line: u32, column: u32) {
    let message = CString::new(message.into().replace('\0', " ")).ok();
    LAST_ERROR.with(|e| *e.borrow_mut() = LastError { message, line, column });
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = LastError::default());
}

fn fail(status: XmlkrStatus, message: impl Into<String>) -> XmlkrStatus {
    set_error(message, 0, 0);
    status
}

fn kb_status(err: &KbError) -> XmlkrStatus {
    let status = match err {
        KbError::UnknownObject(_) | KbError::UnknownSource(_) => XmlkrStatus::UnknownObject,
        KbError::DuplicateObject(_) => XmlkrStatus::DuplicateObject,
        KbError::DuplicateAttribute(_) => XmlkrStatus::DuplicateAttribute,
        KbError::InvalidName { .. } | KbError::InvalidAttribute { .. } | KbError::InvalidLabel(_) => {
            XmlkrStatus::InvalidArgument
        }
    };
    fail(status, err.to_string())
}

/// Runs `f`, turning a panic into [`XmlkrStatus::Panic`].
fn guard(f: impl FnOnce() -> XmlkrStatus) -> XmlkrStatus {
    clear_error();
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(XmlkrStatus::Panic, "internal panic"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, XmlkrStatus> {
    if p.is_null() {
        return Err(fail(XmlkrStatus::NullArgument, format!("{what} is NULL")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(XmlkrStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn kb_ref<'a>(kb: *const XmlkrKb) -> Result<&'a KnowledgeBase, XmlkrStatus> {
    kb.as_ref().map(|h| &h.kb).ok_or_else(|| fail(XmlkrStatus::NullArgument, "knowledge base is NULL"))
}

unsafe fn kb_mut<'a>(kb: *mut XmlkrKb) -> Result<&'a mut KnowledgeBase, XmlkrStatus> {
    kb.as_mut().map(|h| &mut h.kb).ok_or_else(|| fail(XmlkrStatus::NullArgument, "knowledge base is NULL"))
}

unsafe fn put_string(out: *mut *mut c_char, text: String) -> XmlkrStatus {
    match CString::new(text) {
        Ok(s) => {
            *out = s.into_raw();
            XmlkrStatus::Ok
        }
        Err(_) => fail(XmlkrStatus::InvalidArgument, "result contains a NUL byte"),
    }
}

fn status_of(r: Result<XmlkrStatus, XmlkrStatus>) -> XmlkrStatus {
    match r {
        Ok(s) | Err(s) => s,
    }
}

/// Creates an empty knowledge base.
#[no_mangle]
pub extern "C" fn xmlkr_kb_new() -> *mut XmlkrKb {
    Box::into_raw(Box::new(XmlkrKb { kb: KnowledgeBase::new() }))
}

/// Releases a handle. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn xmlkr_kb_free(kb: *mut XmlkrKb) {
    if !kb.is_null() {
        drop(Box::from_raw(kb));
    }
}

/// Parses `len` bytes of an XMLKR document into a new handle stored in
/// `*out`. On [`XmlkrStatus::ParseError`] the error position is available
/// from [`xmlkr_last_error_line`] and [`xmlkr_last_error_column`].
#[no_mangle]
pub unsafe extern "C" fn xmlkr_kb_parse(data: *const u8, len: usize, out: *mut *mut XmlkrKb) -> XmlkrStatus {
    guard(|| {
        if out.is_null() || (data.is_null() && len > 0) {
            return fail(XmlkrStatus::NullArgument, "data or out is NULL");
        }
        let bytes = if len == 0 { &[][..] } else { std::slice::from_raw_parts(data, len) };
        match codec::parse_document_bytes(bytes) {
            Ok((kb, _)) => {
                *out = Box::into_raw(Box::new(XmlkrKb { kb }));
                XmlkrStatus::Ok
            }
            Err(e) => {
                let status = match e.kind {
                    ParseErrorKind::DuplicateObject(_) => XmlkrStatus::DuplicateObject,
                    ParseErrorKind::DuplicateAttribute(_) => XmlkrStatus::DuplicateAttribute,
                    _ => XmlkrStatus::ParseError,
                };
                set_error(e.to_string(), e.pos.line, e.pos.column);
                status
            }
        }
    })
}

/// Defines an object with `count` scalar attributes given as parallel
/// arrays of names and values. The arrays may be NULL when `count` is 0.
#[no_mangle]
pub unsafe extern "C" fn xmlkr_kb_add_object(
    kb: *mut XmlkrKb,
    name: *const c_char,
    attr_names: *const *const c_char,
    attr_values: *const *const c_char,
    count: usize,
) -> XmlkrStatus {
    guard(|| {
        status_of((|| {
            let kb = kb_mut(kb)?;
            let name = ObjectName::new(read_str(name, "name")?).map_err(|e| kb_status(&e))?;
            if count > 0 && (attr_names.is_null() || attr_values.is_null()) {
                return Err(fail(XmlkrStatus::NullArgument, "attribute arrays are NULL"));
            }
            let mut attrs = Vec::with_capacity(count);
            for i in 0..count {
                let k = read_str(*attr_names.add(i), "attribute name")?;
                let v = read_str(*attr_values.add(i), "attribute value")?;
                attrs.push(AttributeTree::leaf(k, v).map_err(|e| kb_status(&e))?);
            }
            kb.add_object(name, attrs).map_err(|e| kb_status(&e))?;
            Ok(XmlkrStatus::Ok)
        })())
    })
}

/// Adds `source -kind-> target`. `kind` is `isa`, `ako` or a relation
/// label; a missing target becomes a stub.
#[no_mangle]
pub unsafe extern "C" fn xmlkr_kb_add_relation(
    kb: *mut XmlkrKb,
    source: *const c_char,
    kind: *const c_char,
    target: *const c_char,
) -> XmlkrStatus {
    guard(|| {
        status_of((|| {
            let kb = kb_mut(kb)?;
            let source = read_str(source, "source")?;
            let kind = RelationKind::parse(read_str(kind, "kind")?).map_err(|e| kb_status(&e))?;
            let target = ObjectName::new(read_str(target, "target")?).map_err(|e| kb_status(&e))?;
            kb.add_relation(source, kind, target).map_err(|e| kb_status(&e))?;
            Ok(XmlkrStatus::Ok)
        })())
    })
}

/// Number of objects, stubs included. 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn xmlkr_kb_object_count(kb: *const XmlkrKb) -> usize {
    kb.as_ref().map_or(0, |h| h.kb.object_count())
}

#[no_mangle]
pub unsafe extern "C" fn xmlkr_kb_serialize_flat(kb: *const XmlkrKb, out: *mut *mut c_char) -> XmlkrStatus {
    guard(|| {
        status_of((|| {
            let kb = kb_ref(kb)?;
            if out.is_null() {
                return Err(fail(XmlkrStatus::NullArgument, "out is NULL"));
            }
            Ok(put_string(out, codec::serialize_flat(kb)))
        })())
    })
}

#[no_mangle]
pub unsafe extern "C" fn xmlkr_kb_serialize_nested(
    kb: *const XmlkrKb,
    root: *const c_char,
    out: *mut *mut c_char,
) -> XmlkrStatus {
    guard(|| {
        status_of((|| {
            let kb = kb_ref(kb)?;
            let root = read_str(root, "root")?;
            if out.is_null() {
                return Err(fail(XmlkrStatus::NullArgument, "out is NULL"));
            }
            let doc = codec::serialize_nested(kb, root).map_err(|e| kb_status(&e))?;
            Ok(put_string(out, doc))
        })())
    })
}

/// Runs a query; `*out` receives the rows, one per line, tab-separated.
#[no_mangle]
pub unsafe extern "C" fn xmlkr_kb_query(kb: *const XmlkrKb, text: *const c_char, out: *mut *mut c_char) -> XmlkrStatus {
    guard(|| {
        status_of((|| {
            let kb = kb_ref(kb)?;
            let text = read_str(text, "query")?;
            if out.is_null() {
                return Err(fail(XmlkrStatus::NullArgument, "out is NULL"));
            }
            match query::run(kb, text) {
                Ok(result) => Ok(put_string(out, result.to_string())),
                Err(QueryError::Syntax(e)) => {
                    set_error(e.to_string(), 1, e.column as u32);
                    Err(XmlkrStatus::QuerySyntax)
                }
                Err(QueryError::Kb(e)) => Err(kb_status(&e)),
            }
        })())
    })
}

/// Validation findings, one `LEVEL\tCODE\tmessage` line each.
#[no_mangle]
pub unsafe extern "C" fn xmlkr_kb_validate(kb: *const XmlkrKb, strict: bool, out: *mut *mut c_char) -> XmlkrStatus {
    guard(|| {
        status_of((|| {
            let kb = kb_ref(kb)?;
            if out.is_null() {
                return Err(fail(XmlkrStatus::NullArgument, "out is NULL"));
            }
            let report = validate(kb, strict);
            Ok(put_string(out, report.findings.iter().map(|f| format!("{f}\n")).collect()))
        })())
    })
}

/// Resolves a dot-separated attribute path with inheritance. On success
/// `*value` and `*provider` receive new strings and `*distance` the number
/// of inheritance hops. Returns [`XmlkrStatus::NotFound`] when no object
/// along the ISA/AKO hierarchy defines the path.
#[no_mangle]
pub unsafe extern "C" fn xmlkr_kb_resolve_attr(
    kb: *const XmlkrKb,
    object: *const c_char,
    path: *const c_char,
    value: *mut *mut c_char,
    provider: *mut *mut c_char,
    distance: *mut usize,
) -> XmlkrStatus {
    guard(|| {
        status_of((|| {
            let kb = kb_ref(kb)?;
            let object = read_str(object, "object")?;
            let path: Vec<&str> = read_str(path, "path")?.split('.').collect();
            if value.is_null() || provider.is_null() || distance.is_null() {
                return Err(fail(XmlkrStatus::NullArgument, "an out parameter is NULL"));
            }
            let Some(r) = inference::resolve_attr(kb, object, &path).map_err(|e| kb_status(&e))? else {
                return Err(fail(XmlkrStatus::NotFound, format!("{object} has no attribute {}", path.join("."))));
            };
            let v =
                CString::new(r.value.to_string()).map_err(|_| fail(XmlkrStatus::InvalidArgument, "NUL in value"))?;
            let p = CString::new(r.provider.as_str()).map_err(|_| fail(XmlkrStatus::InvalidArgument, "NUL in name"))?;
            *value = v.into_raw();
            *provider = p.into_raw();
            *distance = r.distance;
            Ok(XmlkrStatus::Ok)
        })())
    })
}

#[no_mangle]
pub unsafe extern "C" fn xmlkr_kb_is_a(
    kb: *const XmlkrKb,
    object: *const c_char,
    class: *const c_char,
    out: *mut bool,
) -> XmlkrStatus {
    guard(|| {
        status_of((|| {
            let kb = kb_ref(kb)?;
            let object = read_str(object, "object")?;
            let class = read_str(class, "class")?;
            if out.is_null() {
                return Err(fail(XmlkrStatus::NullArgument, "out is NULL"));
            }
            *out = inference::is_a(kb, object, class).map_err(|e| kb_status(&e))?;
            Ok(XmlkrStatus::Ok)
        })())
    })
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn xmlkr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().message.as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

/// Line of the last positioned error, 0 if none.
#[no_mangle]
pub extern "C" fn xmlkr_last_error_line() -> u32 {
    LAST_ERROR.with(|e| e.borrow().line)
}

/// Column of the last positioned error, 0 if none.
#[no_mangle]
pub extern "C" fn xmlkr_last_error_column() -> u32 {
    LAST_ERROR.with(|e| e.borrow().column)
}

/// Releases a string returned by this library. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn xmlkr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
