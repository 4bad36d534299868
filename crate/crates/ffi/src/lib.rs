//! C ABI for the fusewave library.
//!
//! Objects are opaque handles created by `fw_*_build`/`fw_*_new` functions and
//! released with the matching `fw_*_free`. Every fallible call returns an
//! `FwStatus`; on failure a message is available from `fw_last_error_message`
//! on the same thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fusewave::frame::{canonical_tight, frame_bounds, fuse, GeneratorSet};
use fusewave::mra::DEFAULT_DEPTH;
use fusewave::spectral::{CircleGrid, LineSpectrum, Piece};
use fusewave::wavelet::{build_wavelet, BuildParams, Tolerances, WaveletBuildResult};
use fusewave::{Complex, Error, Mra};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Io = 4,
    Precondition = 5,
    Numeric = 6,
    Panic = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn status_of(e: &Error) -> FwStatus {
    match e {
        Error::Io(_) => FwStatus::Io,
        Error::Parse(_) => FwStatus::Parse,
        Error::NonFinite { .. } | Error::NotReal { .. } => FwStatus::Numeric,
        e if e.is_precondition() => FwStatus::Precondition,
        _ => FwStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), FwStatus>) -> FwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FwStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            FwStatus::Panic
        }
    }
}

fn fail(e: Error) -> FwStatus {
    set_error(e.to_string());
    status_of(&e)
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), FwStatus> {
    if p.is_null() {
        set_error(format!("{what} is null"));
        Err(FwStatus::NullPointer)
    } else {
        Ok(())
    }
}

/// Message of the last failure on this thread, or null. Owned by the library.
#[no_mangle]
pub extern "C" fn fw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// A built wavelet.
pub struct FwWavelet {
    result: WaveletBuildResult,
    tolerances: Tolerances,
}

/// Verification summary of a built wavelet.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct FwWaveletReport {
    pub periodization_residual: f64,
    pub v0_orthogonality_residual: f64,
    pub v1_membership_residual: f64,
    pub translate_gram_residual: f64,
    pub premise_residual: f64,
    pub used_half_shift_shortcut: bool,
    pub passed: bool,
}

/// Builds the wavelet of a built-in analysis (`haar`, `db2`, `db4`,
/// `shannon`). Zero for `grid_n`, `periods` or `depth` selects the default.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fw_wavelet_build(
    name: *const c_char,
    grid_n: usize,
    periods: usize,
    depth: usize,
    out: *mut *mut FwWavelet,
) -> FwStatus {
    guard(|| {
        non_null(name, "name")?;
        non_null(out, "out")?;
        let name = CStr::from_ptr(name)
            .to_str()
            .map_err(|_| fail(Error::Parse("name is not UTF-8".into())))?;
        let depth = if depth == 0 { DEFAULT_DEPTH } else { depth };
        let mra = Mra::builtin(name, depth)
            .ok_or_else(|| fail(Error::Parse(format!("unknown filter '{name}'"))))?;
        let mut params = BuildParams::default();
        if grid_n != 0 {
            params.grid = CircleGrid::new(grid_n).map_err(fail)?;
        }
        if periods != 0 {
            params.periods = periods;
        }
        let result = build_wavelet(&mra, &params).map_err(fail)?;
        *out = Box::into_raw(Box::new(FwWavelet {
            result,
            tolerances: params.tolerances,
        }));
        Ok(())
    })
}

/// # Safety
/// `w` must come from `fw_wavelet_build` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fw_wavelet_free(w: *mut FwWavelet) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// # Safety
/// `w` must be a live handle and `report` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fw_wavelet_report(w: *const FwWavelet, report: *mut FwWaveletReport) -> FwStatus {
    guard(|| {
        non_null(w, "wavelet")?;
        non_null(report, "report")?;
        let w = &*w;
        let v = &w.result.verification;
        *report = FwWaveletReport {
            periodization_residual: v.periodization_residual,
            v0_orthogonality_residual: v.v0_orthogonality_residual,
            v1_membership_residual: v.v1_membership_residual,
            translate_gram_residual: v.translate_gram_residual,
            premise_residual: w.result.premise_residual,
            used_half_shift_shortcut: w.result.used_half_shift_shortcut,
            passed: w.result.passed(&w.tolerances),
        };
        Ok(())
    })
}

/// `ψ̂(ξ)`.
///
/// # Safety
/// `w` must be a live handle; `re` and `im` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn fw_wavelet_eval(w: *const FwWavelet, xi: f64, re: *mut f64, im: *mut f64) -> FwStatus {
    guard(|| {
        non_null(w, "wavelet")?;
        non_null(re, "re")?;
        non_null(im, "im")?;
        let v = (*w).result.psi_spectrum.try_eval(xi).map_err(fail)?;
        *re = v.re;
        *im = v.im;
        Ok(())
    })
}

/// Number of grid points of the build.
///
/// # Safety
/// `w` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn fw_wavelet_grid_len(w: *const FwWavelet) -> usize {
    if w.is_null() {
        0
    } else {
        (*w).result.e.grid().len()
    }
}

/// Set membership and multipliers at grid point `k`.
///
/// # Safety
/// `w` must be a live handle; output pointers valid.
#[no_mangle]
pub unsafe extern "C" fn fw_wavelet_sets_at(
    w: *const FwWavelet,
    k: usize,
    in_e: *mut bool,
    in_f: *mut bool,
    f: *mut f64,
    g: *mut f64,
) -> FwStatus {
    guard(|| {
        non_null(w, "wavelet")?;
        for (p, n) in [(in_e as *const u8, "in_e"), (in_f as *const u8, "in_f")] {
            non_null(p, n)?;
        }
        non_null(f, "f")?;
        non_null(g, "g")?;
        let r = &(*w).result;
        let len = r.e.grid().len();
        if k >= len {
            return Err(fail(Error::IndexOutOfRange { index: k, len }));
        }
        *in_e = r.e.contains(k);
        *in_f = r.f_set.contains(k);
        *f = r.f.value(k).re;
        *g = r.g.value(k).re;
        Ok(())
    })
}

/// An ordered set of generators on a common grid.
pub struct FwGenerators {
    grid: CircleGrid,
    periods: usize,
    generators: Vec<LineSpectrum>,
}

impl FwGenerators {
    fn to_set(&self) -> Result<GeneratorSet, FwStatus> {
        GeneratorSet::new(self.grid, self.periods, self.generators.clone()).map_err(fail)
    }

    fn from_set(set: &GeneratorSet) -> Self {
        Self {
            grid: set.grid(),
            periods: set.periods(),
            generators: set.generators().to_vec(),
        }
    }
}

/// Frame bounds and multiplicity summary.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct FwFrameBounds {
    pub lower: f64,
    pub upper: f64,
    pub is_tight: bool,
    pub is_normalized_tight: bool,
    pub max_multiplicity: usize,
}

/// An empty generator set.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fw_generators_new(grid_n: usize, periods: usize, out: *mut *mut FwGenerators) -> FwStatus {
    guard(|| {
        non_null(out, "out")?;
        let grid = CircleGrid::new(grid_n).map_err(fail)?;
        if periods == 0 {
            return Err(fail(Error::InvalidPeriods));
        }
        *out = Box::into_raw(Box::new(FwGenerators {
            grid,
            periods,
            generators: Vec::new(),
        }));
        Ok(())
    })
}

/// # Safety
/// `set` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fw_generators_free(set: *mut FwGenerators) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// # Safety
/// `set` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn fw_generators_len(set: *const FwGenerators) -> usize {
    if set.is_null() {
        0
    } else {
        (*set).generators.len()
    }
}

/// Appends a piecewise-constant spectrum. `pieces` holds `count` records of
/// four doubles `[a, b, re, im]`, each a constant on `[a, b)`.
///
/// # Safety
/// `set` must be a live handle and `pieces` must point to `4 * count` doubles.
#[no_mangle]
pub unsafe extern "C" fn fw_generators_add_piecewise(
    set: *mut FwGenerators,
    pieces: *const f64,
    count: usize,
) -> FwStatus {
    guard(|| {
        non_null(set, "set")?;
        if count > 0 {
            non_null(pieces, "pieces")?;
        }
        let raw = if count == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(pieces, 4 * count)
        };
        if raw.iter().any(|v| !v.is_finite()) {
            return Err(fail(Error::Parse("non-finite number in piece".into())));
        }
        let pieces = raw
            .chunks_exact(4)
            .map(|c| Piece {
                start: c[0],
                end: c[1],
                value: Complex::new(c[2], c[3]),
            })
            .collect();
        let set = &mut *set;
        let s = LineSpectrum::piecewise(pieces, set.periods).map_err(fail)?;
        set.generators.push(s);
        Ok(())
    })
}

/// Generator `index` evaluated at `ξ`.
///
/// # Safety
/// `set` must be a live handle; `re` and `im` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn fw_generators_eval(
    set: *const FwGenerators,
    index: usize,
    xi: f64,
    re: *mut f64,
    im: *mut f64,
) -> FwStatus {
    guard(|| {
        non_null(set, "set")?;
        non_null(re, "re")?;
        non_null(im, "im")?;
        let set = &*set;
        let g = set.generators.get(index).ok_or_else(|| {
            fail(Error::IndexOutOfRange {
                index,
                len: set.generators.len(),
            })
        })?;
        let v = g.try_eval(xi).map_err(fail)?;
        *re = v.re;
        *im = v.im;
        Ok(())
    })
}

/// # Safety
/// `set` must be a live handle and `bounds` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fw_generators_frame_bounds(
    set: *const FwGenerators,
    tol: f64,
    bounds: *mut FwFrameBounds,
) -> FwStatus {
    guard(|| {
        non_null(set, "set")?;
        non_null(bounds, "bounds")?;
        let d = frame_bounds(&(*set).to_set()?, tol).map_err(fail)?;
        let max_multiplicity = d.multiplicity_histogram().keys().copied().max().unwrap_or(0);
        *bounds = FwFrameBounds {
            lower: d.lower_bound,
            upper: d.upper_bound,
            is_tight: d.is_tight,
            is_normalized_tight: d.is_normalized_tight,
            max_multiplicity,
        };
        Ok(())
    })
}

/// Canonical normalized tight generators, as a new handle.
///
/// # Safety
/// `set` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fw_generators_tighten(set: *const FwGenerators, out: *mut *mut FwGenerators) -> FwStatus {
    guard(|| {
        non_null(set, "set")?;
        non_null(out, "out")?;
        let tight = canonical_tight(&(*set).to_set()?).map_err(fail)?;
        *out = Box::into_raw(Box::new(FwGenerators::from_set(&tight)));
        Ok(())
    })
}

/// Fuses generators `i` and `j` into a new handle; the fused generator takes
/// position `i` (shifted down by one when `j < i`).
///
/// # Safety
/// `set` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fw_generators_fuse(
    set: *const FwGenerators,
    i: usize,
    j: usize,
    out: *mut *mut FwGenerators,
) -> FwStatus {
    guard(|| {
        non_null(set, "set")?;
        non_null(out, "out")?;
        let fused = fuse(&(*set).to_set()?, i, j).map_err(fail)?;
        *out = Box::into_raw(Box::new(FwGenerators::from_set(&fused.generators)));
        Ok(())
    })
}
