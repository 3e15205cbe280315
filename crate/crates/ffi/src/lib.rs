//! C ABI over the `diskstrip` library.
//!
//! Symbols and chains are opaque heap handles released with their `_free`
//! function. Every fallible call returns a [`DsStatus`]; on failure the
//! message is available from [`ds_last_error`] on the same thread. Strings
//! returned through out-parameters are owned by the caller and released with
//! [`ds_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use diskstrip::basis::{reduce_to_basis, z_cycle};
use diskstrip::homology::homology;
use diskstrip::morse::is_critical;
use diskstrip::{Chain, ComplexSpec, Error, Symbol, Variant};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInput = 4,
    Unsupported = 5,
    NotCritical = 6,
    NotACycle = 7,
    Internal = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsVariant {
    Full = 0,
    Desc = 1,
}

impl From<DsVariant> for Variant {
    fn from(v: DsVariant) -> Self {
        match v {
            DsVariant::Full => Variant::Full,
            DsVariant::Desc => Variant::Desc,
        }
    }
}

/// Opaque cell symbol.
pub struct DsSymbol(Symbol);

/// Opaque integer chain.
pub struct DsChain(Chain);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DsStatus {
    match e {
        Error::Parse { .. } => DsStatus::Parse,
        Error::UnsupportedSpec(_) => DsStatus::Unsupported,
        Error::NotCritical(_) => DsStatus::NotCritical,
        Error::NotACycle => DsStatus::NotACycle,
        _ => DsStatus::InvalidInput,
    }
}

/// Runs `f`, recording errors and panics.
fn guard(f: impl FnOnce() -> Result<(), (DsStatus, String)>) -> DsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DsStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal error".into());
            DsStatus::Internal
        }
    }
}

fn lib<T>(r: diskstrip::Result<T>) -> Result<T, (DsStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (DsStatus, String) {
    (DsStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (DsStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (DsStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (DsStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), (DsStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), (DsStatus, String)> {
    let c = CString::new(s).map_err(|_| (DsStatus::Internal, "string with nul byte".to_string()))?;
    write_out(out, c.into_raw())
}

fn spec(n: usize, w: usize, variant: DsVariant) -> Result<ComplexSpec, (DsStatus, String)> {
    lib(ComplexSpec::new(n, w, variant.into()))
}

/// Message of the last failed call on this thread, or null. Caller frees
/// with `ds_string_free`.
#[no_mangle]
pub extern "C" fn ds_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ds_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a symbol such as `"2|5 3|1 4"`.
///
/// # Safety
/// `text` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_symbol_parse(text: *const c_char, out: *mut *mut DsSymbol) -> DsStatus {
    guard(|| {
        let s: Symbol = lib(read_str(text, "text")?.parse())?;
        write_out(out, Box::into_raw(Box::new(DsSymbol(s))))
    })
}

/// # Safety
/// `sym` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ds_symbol_free(sym: *mut DsSymbol) {
    if !sym.is_null() {
        drop(Box::from_raw(sym));
    }
}

/// # Safety
/// `sym` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_symbol_dimension(sym: *const DsSymbol, out: *mut usize) -> DsStatus {
    guard(|| write_out(out, deref(sym, "symbol")?.0.dimension()))
}

/// # Safety
/// `sym` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_symbol_to_string(sym: *const DsSymbol, out: *mut *mut c_char) -> DsStatus {
    guard(|| write_string(out, deref(sym, "symbol")?.0.to_string()))
}

/// Boundary of a single cell.
///
/// # Safety
/// `sym` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_symbol_boundary(sym: *const DsSymbol, out: *mut *mut DsChain) -> DsStatus {
    guard(|| write_out(out, Box::into_raw(Box::new(DsChain(deref(sym, "symbol")?.0.boundary())))))
}

/// Whether `sym` is a critical cell of the complex at level `n`.
///
/// # Safety
/// `sym` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_is_critical(
    sym: *const DsSymbol,
    n: usize,
    w: usize,
    variant: DsVariant,
    out: *mut bool,
) -> DsStatus {
    guard(|| {
        let s = deref(sym, "symbol")?;
        write_out(out, lib(is_critical(&s.0, &spec(n, w, variant)?))?)
    })
}

/// The basis cycle z(e) of a critical cell.
///
/// # Safety
/// `sym` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_z_cycle(
    sym: *const DsSymbol,
    n: usize,
    w: usize,
    variant: DsVariant,
    out: *mut *mut DsChain,
) -> DsStatus {
    guard(|| {
        let s = deref(sym, "symbol")?;
        let z = lib(z_cycle(&s.0, &spec(n, w, variant)?))?;
        write_out(out, Box::into_raw(Box::new(DsChain(z))))
    })
}

/// # Safety
/// `chain` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ds_chain_free(chain: *mut DsChain) {
    if !chain.is_null() {
        drop(Box::from_raw(chain));
    }
}

/// Number of nonzero terms.
///
/// # Safety
/// `chain` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_chain_len(chain: *const DsChain, out: *mut usize) -> DsStatus {
    guard(|| write_out(out, deref(chain, "chain")?.0.len()))
}

/// Text form, greatest cell first, e.g. `"1|3 2 - 2 1|3"`.
///
/// # Safety
/// `chain` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_chain_to_string(chain: *const DsChain, out: *mut *mut c_char) -> DsStatus {
    guard(|| write_string(out, deref(chain, "chain")?.0.to_string()))
}

/// Chain file JSON (`{"n", "dimension", "terms": [{"symbol", "coeff"}]}`).
///
/// # Safety
/// `chain` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_chain_to_json(chain: *const DsChain, n: usize, out: *mut *mut c_char) -> DsStatus {
    guard(|| {
        let file = deref(chain, "chain")?.0.to_file(n);
        write_string(out, serde_json::to_string(&file).expect("chain file serializes"))
    })
}

/// Parses a chain file JSON document.
///
/// # Safety
/// `json` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_chain_from_json(json: *const c_char, out: *mut *mut DsChain) -> DsStatus {
    guard(|| {
        let file: diskstrip::symbols::ChainFile = serde_json::from_str(read_str(json, "json")?)
            .map_err(|e| (DsStatus::Parse, format!("not a chain file: {e}")))?;
        let c = lib(file.to_chain())?;
        write_out(out, Box::into_raw(Box::new(DsChain(c))))
    })
}

/// Homology summary as JSON (`{"spec", "betti", "torsion"}`).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_homology_json(
    n: usize,
    w: usize,
    variant: DsVariant,
    torsion: bool,
    out: *mut *mut c_char,
) -> DsStatus {
    guard(|| {
        let h = homology(&spec(n, w, variant)?, torsion);
        write_string(out, serde_json::to_string(&h).expect("summary serializes"))
    })
}

/// Basis coordinates of a cycle at level `n` as a JSON object mapping
/// critical cells to coefficients.
///
/// # Safety
/// `chain` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_reduce_json(
    chain: *const DsChain,
    n: usize,
    w: usize,
    variant: DsVariant,
    out: *mut *mut c_char,
) -> DsStatus {
    guard(|| {
        let c = deref(chain, "chain")?;
        let coords = lib(reduce_to_basis(&c.0, &spec(n, w, variant)?))?;
        write_string(out, coords.to_json().to_string())
    })
}
