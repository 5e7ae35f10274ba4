//! C interface to `scrambler-core`.
//!
//! Matrices cross the boundary as opaque `ShMatrix` handles owned by the
//! caller once returned and released with `sh_matrix_free`. Entries are
//! exchanged as row-major interleaved `(re, im)` doubles. Every fallible call
//! returns an `ShStatus`; on failure the message is kept per thread and read
//! back with `sh_last_error_message`. Panics never unwind into C.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use scrambler_core::asymptotics::{asym_p_opt_kappa, hyp2f1};
use scrambler_core::fidelity::{p_me, p_pg};
use scrambler_core::matrix_io::matrix_from_json;
use scrambler_core::optimizer::{optimize_probe, OptimizerConfig};
use scrambler_core::random::{haar_unitary, SeedSpec};
use scrambler_core::tensor::rotate_pi_half;
use scrambler_core::{ComplexMatrix, HackError, ScramblerDims, C64};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShStatus {
    Ok = 0,
    NullPointer = 1,
    Shape = 2,
    DimensionLimit = 3,
    Argument = 4,
    Numeric = 5,
    Degenerate = 6,
    InternalConsistency = 7,
    Unsupported = 8,
    Validation = 9,
    Parse = 10,
    Io = 11,
    Panic = 12,
}

impl From<&HackError> for ShStatus {
    fn from(e: &HackError) -> Self {
        match e {
            HackError::Shape(_) => Self::Shape,
            HackError::DimensionLimit { .. } => Self::DimensionLimit,
            HackError::Argument(_) => Self::Argument,
            HackError::Numeric(_) => Self::Numeric,
            HackError::Degenerate(_) => Self::Degenerate,
            HackError::InternalConsistency(_) => Self::InternalConsistency,
            HackError::Unsupported(_) => Self::Unsupported,
            HackError::Validation(_) => Self::Validation,
            HackError::Parse { .. } => Self::Parse,
            HackError::Io(_) => Self::Io,
        }
    }
}

/// Subsystem dimensions of `U: A⊗B → K⊗L`.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct ShDims {
    pub d_a: usize,
    pub d_b: usize,
    pub d_k: usize,
    pub d_l: usize,
}

/// Opaque complex matrix.
pub struct ShMatrix(ComplexMatrix);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

enum Failure {
    Null(&'static str),
    Core(HackError),
}

impl From<HackError> for Failure {
    fn from(e: HackError) -> Self {
        Self::Core(e)
    }
}

/// Runs `f`, converting errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ShStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            ShStatus::Ok
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            ShStatus::NullPointer
        }
        Ok(Err(Failure::Core(e))) => {
            let status = ShStatus::from(&e);
            set_error(e.to_string());
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            ShStatus::Panic
        }
    }
}

fn dims(d: ShDims) -> Result<ScramblerDims, Failure> {
    Ok(ScramblerDims::new(d.d_a, d.d_b, d.d_k, d.d_l)?)
}

unsafe fn matrix_ref<'a>(m: *const ShMatrix) -> Result<&'a ComplexMatrix, Failure> {
    // SAFETY: the caller passes null or a live handle from this library.
    unsafe { m.as_ref() }.map(|m| &m.0).ok_or(Failure::Null("matrix handle"))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("output pointer"));
    }
    // SAFETY: non-null and, by contract, valid for a write of `T`.
    unsafe { out.write(value) };
    Ok(())
}

fn boxed(m: ComplexMatrix) -> *mut ShMatrix {
    Box::into_raw(Box::new(ShMatrix(m)))
}

/// Creates a `rows x cols` matrix from `2·rows·cols` interleaved doubles.
///
/// # Safety
/// `entries` must point to `2·rows·cols` readable doubles and `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn sh_matrix_new(
    rows: usize,
    cols: usize,
    entries: *const f64,
    out: *mut *mut ShMatrix,
) -> ShStatus {
    guard(|| {
        if entries.is_null() {
            return Err(Failure::Null("entries"));
        }
        let n = rows
            .checked_mul(cols)
            .and_then(|n| n.checked_mul(2))
            .ok_or_else(|| HackError::Argument(format!("{rows}x{cols} overflows the address space")))?;
        // SAFETY: the caller guarantees `n` readable doubles.
        let raw = unsafe { std::slice::from_raw_parts(entries, n) };
        let data = raw.chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect();
        let m = ComplexMatrix::new(rows, cols, data)?;
        unsafe { write_out(out, boxed(m)) }
    })
}

/// Parses a JSON matrix document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sh_matrix_from_json(json: *const c_char, out: *mut *mut ShMatrix) -> ShStatus {
    guard(|| {
        if json.is_null() {
            return Err(Failure::Null("json"));
        }
        // SAFETY: NUL-terminated by contract.
        let text = unsafe { CStr::from_ptr(json) }
            .to_str()
            .map_err(|e| HackError::Argument(format!("json is not UTF-8: {e}")))?;
        let m = matrix_from_json(text)?;
        unsafe { write_out(out, boxed(m)) }
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `m` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn sh_matrix_free(m: *mut ShMatrix) {
    if !m.is_null() {
        // SAFETY: uniquely owned handle created by `Box::into_raw`.
        drop(unsafe { Box::from_raw(m) });
    }
}

/// Row count, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sh_matrix_rows(m: *const ShMatrix) -> usize {
    unsafe { m.as_ref() }.map_or(0, |m| m.0.rows())
}

/// Column count, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sh_matrix_cols(m: *const ShMatrix) -> usize {
    unsafe { m.as_ref() }.map_or(0, |m| m.0.cols())
}

/// Copies the entries into `buf` (interleaved, row-major). `len` counts
/// doubles and must be at least `2·rows·cols`.
///
/// # Safety
/// `m` must be a live handle and `buf` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn sh_matrix_get_entries(m: *const ShMatrix, buf: *mut f64, len: usize) -> ShStatus {
    guard(|| {
        let m = unsafe { matrix_ref(m) }?;
        if buf.is_null() {
            return Err(Failure::Null("buf"));
        }
        let need = 2 * m.entries().len();
        if len < need {
            return Err(HackError::Shape(format!("buffer holds {len} doubles, {need} needed")).into());
        }
        // SAFETY: `buf` is writable for `len ≥ need` doubles.
        let out = unsafe { std::slice::from_raw_parts_mut(buf, need) };
        for (pair, z) in out.chunks_exact_mut(2).zip(m.entries()) {
            pair[0] = z.re;
            pair[1] = z.im;
        }
        Ok(())
    })
}

/// Haar-random `dim x dim` unitary from `(master_seed, stream)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sh_haar_unitary(
    dim: usize,
    master_seed: u64,
    stream: u64,
    out: *mut *mut ShMatrix,
) -> ShStatus {
    guard(|| {
        let u = haar_unitary(dim, SeedSpec::new(master_seed, stream))?;
        unsafe { write_out(out, boxed(u)) }
    })
}

/// The rotated operator `U°`.
///
/// # Safety
/// `u` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sh_rotate_pi_half(u: *const ShMatrix, d: ShDims, out: *mut *mut ShMatrix) -> ShStatus {
    guard(|| {
        let uo = rotate_pi_half(unsafe { matrix_ref(u) }?, &dims(d)?)?;
        unsafe { write_out(out, boxed(uo)) }
    })
}

/// Fidelity with the maximally entangled probe.
///
/// # Safety
/// `u` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sh_p_me(u: *const ShMatrix, d: ShDims, out: *mut f64) -> ShStatus {
    guard(|| {
        let p = p_me(unsafe { matrix_ref(u) }?, &dims(d)?)?;
        unsafe { write_out(out, p) }
    })
}

/// Fidelity with the pretty-good probe.
///
/// # Safety
/// `u` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sh_p_pg(u: *const ShMatrix, d: ShDims, out: *mut f64) -> ShStatus {
    guard(|| {
        let (p, _) = p_pg(unsafe { matrix_ref(u) }?, &dims(d)?)?;
        unsafe { write_out(out, p) }
    })
}

/// Optimized fidelity (fixed-point iteration). `tol ≤ 0` or `max_iters = 0`
/// select the defaults. `iterations` may be null.
///
/// # Safety
/// `u` must be a live handle, `out` writable, `iterations` null or writable.
#[no_mangle]
pub unsafe extern "C" fn sh_p_opt(
    u: *const ShMatrix,
    d: ShDims,
    tol: f64,
    max_iters: usize,
    out: *mut f64,
    iterations: *mut usize,
) -> ShStatus {
    guard(|| {
        let defaults = OptimizerConfig::default();
        let cfg = OptimizerConfig {
            tol: if tol > 0.0 { tol } else { defaults.tol },
            max_iters: if max_iters > 0 { max_iters } else { defaults.max_iters },
            ..defaults
        };
        let r = optimize_probe(unsafe { matrix_ref(u) }?, &dims(d)?, &cfg, None)?;
        if !iterations.is_null() {
            unsafe { write_out(iterations, r.trace.iterations()) }?;
        }
        unsafe { write_out(out, r.p_opt) }
    })
}

/// Large-dimension Haar mean of the optimized fidelity.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sh_asym_p_opt(kappa: f64, d_a: usize, d_k: usize, out: *mut f64) -> ShStatus {
    guard(|| {
        let p = asym_p_opt_kappa(kappa, d_a, d_k)?;
        unsafe { write_out(out, p.p_opt_mean) }
    })
}

/// Gauss hypergeometric `₂F₁(a, b; c; z)` for `z ∈ [0, 1]`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sh_hyp2f1(a: f64, b: f64, c: f64, z: f64, out: *mut f64) -> ShStatus {
    guard(|| {
        let v = hyp2f1(a, b, c, z)?;
        unsafe { write_out(out, v) }
    })
}

/// Copies this thread's last error message into `buf` (NUL-terminated,
/// truncated to `len − 1` bytes) and returns the full message length in
/// bytes. Pass a null `buf` to query the length.
///
/// # Safety
/// `buf` must be null or writable for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn sh_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            // SAFETY: `buf` is writable for `len > n` bytes.
            unsafe {
                ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
        }
        msg.len()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_mapping_is_stable() {
        assert_eq!(ShStatus::from(&HackError::Argument(String::new())) as i32, 4);
        assert_eq!(ShStatus::Panic as i32, 12);
    }

    #[test]
    fn null_outputs_are_reported() {
        let s = unsafe { sh_hyp2f1(0.5, -0.5, 2.0, 1.0, ptr::null_mut()) };
        assert_eq!(s, ShStatus::NullPointer);
    }
}
