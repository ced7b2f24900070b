//! C ABI over `lattice_scope`.
//!
//! Families are opaque handles created by [`ls_family_parse`] and released
//! with [`ls_family_free`]. Every fallible call returns an [`LsStatus`]; on
//! failure [`ls_last_error`] describes the most recent error on the calling
//! thread. Strings handed out by the library are freed with
//! [`ls_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lattice_scope::census::{self, CensusError, IeMode};
use lattice_scope::construct::{construct_visible, valuation_profile, ConstructError};
use lattice_scope::geometry::{self, GeometryError, Region};
use lattice_scope::polyfam::parse_family_normalized;
use lattice_scope::visibility;
use lattice_scope::{LatticePoint, Limits, PolyFamily};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    CapExceeded = 3,
    Internal = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsCountMode {
    Subsets = 0,
    Pruned = 1,
}

/// Opaque polynomial family.
pub struct LsFamily {
    inner: PolyFamily,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Fail(LsStatus, String);

impl From<CensusError> for Fail {
    fn from(e: CensusError) -> Self {
        let status = match e {
            CensusError::CapExceeded { .. } | CensusError::ModeCapacity(_) => LsStatus::CapExceeded,
            _ => LsStatus::InvalidInput,
        };
        Fail(status, e.to_string())
    }
}

impl From<GeometryError> for Fail {
    fn from(e: GeometryError) -> Self {
        let status = match e {
            GeometryError::CapExceeded { .. } => LsStatus::CapExceeded,
            _ => LsStatus::InvalidInput,
        };
        Fail(status, e.to_string())
    }
}

impl From<ConstructError> for Fail {
    fn from(e: ConstructError) -> Self {
        Fail(LsStatus::InvalidInput, e.to_string())
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> LsStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LsStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            LsStatus::Internal
        }
    }
}

fn null() -> Fail {
    Fail(LsStatus::NullPointer, "null pointer argument".into())
}

unsafe fn family<'a>(f: *const LsFamily) -> Result<&'a PolyFamily, Fail> {
    f.as_ref().map(|f| &f.inner).ok_or_else(null)
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null());
    }
    out.write(value);
    Ok(())
}

fn point(a: u64, b: u64) -> Result<LatticePoint, Fail> {
    LatticePoint::new(a, b).map_err(|e| Fail(LsStatus::InvalidInput, e.to_string()))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("json has no nul").into_raw()
}

/// Message for the last failed call on this thread, or NULL. Valid until
/// the next library call on the same thread.
#[no_mangle]
pub extern "C" fn ls_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses descending coefficients "a_n,...,a_1"; the content is divided out.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ls_family_parse(spec: *const c_char, out: *mut *mut LsFamily) -> LsStatus {
    guard(|| {
        if spec.is_null() || out.is_null() {
            return Err(null());
        }
        let text = CStr::from_ptr(spec)
            .to_str()
            .map_err(|_| Fail(LsStatus::InvalidInput, "family spec is not UTF-8".into()))?;
        let inner = parse_family_normalized(text).map_err(|e| Fail(LsStatus::InvalidInput, e.to_string()))?;
        out.write(Box::into_raw(Box::new(LsFamily { inner })));
        Ok(())
    })
}

/// # Safety
/// `family` must come from [`ls_family_parse`] and not be freed already.
/// NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn ls_family_free(family: *mut LsFamily) {
    if !family.is_null() {
        drop(Box::from_raw(family));
    }
}

/// Degree of the family, 0 for NULL.
///
/// # Safety
/// `family` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ls_family_degree(family: *const LsFamily) -> usize {
    family.as_ref().map_or(0, |f| f.inner.degree())
}

/// Visibility of `(a, b)`. `out_witness_t` receives the smallest witness, or
/// 0 when the point is visible; it may be NULL.
///
/// # Safety
/// `family` must be a live handle; `out_visible` writable.
#[no_mangle]
pub unsafe extern "C" fn ls_is_visible(
    family: *const LsFamily,
    a: u64,
    b: u64,
    out_visible: *mut bool,
    out_witness_t: *mut u64,
) -> LsStatus {
    guard(|| {
        let p = self::family(family)?;
        let verdict = visibility::is_visible(p, point(a, b)?);
        write(out_visible, verdict.is_visible())?;
        if !out_witness_t.is_null() {
            out_witness_t.write(verdict.witness_t().unwrap_or(0));
        }
        Ok(())
    })
}

/// Visible count over `[1, n]^2` and its density.
///
/// # Safety
/// `family` must be a live handle; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn ls_density(
    family: *const LsFamily,
    n: u64,
    out_count: *mut u64,
    out_density: *mut f64,
) -> LsStatus {
    guard(|| {
        let r = census::empirical_density(self::family(family)?, n, &Limits::from_env())?;
        write(out_count, r.visible_count)?;
        write(out_density, r.density_estimate)
    })
}

/// Inclusion-exclusion count over `[1, n]^2`.
///
/// # Safety
/// `family` must be a live handle; `out_count` writable.
#[no_mangle]
pub unsafe extern "C" fn ls_exact_count(
    family: *const LsFamily,
    n: u64,
    mode: LsCountMode,
    out_count: *mut u64,
) -> LsStatus {
    guard(|| {
        let mode = match mode {
            LsCountMode::Subsets => IeMode::SubsetEnumeration,
            LsCountMode::Pruned => IeMode::PrunedLcm,
        };
        let count = census::exact_count_ie(self::family(family)?, n, mode, &Limits::from_env())?;
        write(out_count, count)
    })
}

/// Euler product over primes up to `prime_bound`, with its tail bound.
///
/// # Safety
/// `family` must be a live handle; outputs writable (`out_tail` may be NULL).
#[no_mangle]
pub unsafe extern "C" fn ls_constant_cp(
    family: *const LsFamily,
    prime_bound: u64,
    out_value: *mut f64,
    out_tail: *mut f64,
) -> LsStatus {
    guard(|| {
        let r = census::constant_cp(self::family(family)?, prime_bound)?;
        write(out_value, r.value)?;
        if !out_tail.is_null() {
            out_tail.write(r.tail_bound);
        }
        Ok(())
    })
}

/// First all-hidden `size` x `size` block in `[1, max_x] x [1, max_y]`.
/// `out_found` is false when there is none and the corner is left untouched.
///
/// # Safety
/// `family` must be a live handle; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn ls_find_block(
    family: *const LsFamily,
    size: u64,
    max_x: u64,
    max_y: u64,
    out_found: *mut bool,
    out_x: *mut u64,
    out_y: *mut u64,
) -> LsStatus {
    guard(|| {
        let p = self::family(family)?;
        if out_found.is_null() || out_x.is_null() || out_y.is_null() {
            return Err(null());
        }
        let region = Region::square_from_origin(max_x, max_y)?;
        let hit = geometry::find_block(p, size, region, &Limits::from_env())?;
        out_found.write(hit.is_some());
        if let Some(h) = hit {
            out_x.write(h.corner.a);
            out_y.write(h.corner.b);
        }
        Ok(())
    })
}

/// Layers from `(a, b)` to the nearest visible point; -1 past `max_layers`.
///
/// # Safety
/// `family` must be a live handle; `out_distance` writable.
#[no_mangle]
pub unsafe extern "C" fn ls_radius(
    family: *const LsFamily,
    a: u64,
    b: u64,
    max_layers: u64,
    out_distance: *mut i64,
) -> LsStatus {
    guard(|| {
        let r = geometry::radius_to_visible(self::family(family)?, point(a, b)?, max_layers);
        write(out_distance, r.distance)
    })
}

/// Construction through `(a, b)` as JSON. `prime` of 0 picks the next prime
/// above `max(a, b)`. Free the result with [`ls_string_free`].
///
/// # Safety
/// `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ls_construct_json(a: u64, b: u64, prime: u64, out_json: *mut *mut c_char) -> LsStatus {
    guard(|| {
        if out_json.is_null() {
            return Err(null());
        }
        let ell = (prime != 0).then(|| prime.into());
        let c = construct_visible(point(a, b)?, ell)?;
        let mut v = serde_json::to_value(&c).map_err(|e| Fail(LsStatus::Internal, e.to_string()))?;
        v["valuation_profile"] =
            serde_json::to_value(valuation_profile(&c)).map_err(|e| Fail(LsStatus::Internal, e.to_string()))?;
        out_json.write(into_c_string(v.to_string()));
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn ls_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
