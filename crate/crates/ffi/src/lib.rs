//! C ABI over the `thermal-arrow` library.
//!
//! Objects cross the boundary as opaque handles returned through out-pointers
//! and released with the matching `ta_*_free`. Every fallible call
//! returns a [`TaStatus`]; on failure `ta_last_error_message` describes the
//! most recent error on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use thermal_arrow::dynamics::{sweep_grid, HeatGrid};
use thermal_arrow::quantum::DensityMatrix;
use thermal_arrow::randomwalk::{run_walk, WalkConfig};
use thermal_arrow::states::{rho_abc, MarginalVector, RhoACParams};
use thermal_arrow::thermo::{local_energies, mutual_information, product_thermal_state};
use thermal_arrow::witness::witness_from_heat;

/// Result codes. Zero means success.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TaStatus {
    Ok = 0,
    /// A parameter or state failed validation.
    InvalidArgument = 1,
    /// A required pointer was null.
    NullPointer = 2,
    /// An output buffer is shorter than required.
    BufferTooSmall = 3,
    /// Unexpected failure inside the library.
    Internal = 4,
}

/// Opaque multi-qubit density matrix.
pub struct TaState(DensityMatrix);

/// Opaque heat maps over a (t, s) grid.
pub struct TaHeatGrid(HeatGrid);

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct TaWitnessVerdict {
    pub reverse_flow_magnitude: f64,
    pub classical_bound: f64,
    /// 1 when the observed flow exceeds the separable bound.
    pub certified_entangled: i32,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: TaStatus, msg: impl Into<String>) -> TaStatus {
    set_error(msg);
    status
}

fn from_core(err: thermal_arrow::Error) -> TaStatus {
    let status = if err.is_validation() { TaStatus::InvalidArgument } else { TaStatus::Internal };
    fail(status, err.to_string())
}

fn guard(f: impl FnOnce() -> TaStatus) -> TaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(TaStatus::Internal, "panic inside thermal-arrow"),
    }
}

unsafe fn slice<'a, T>(ptr: *const T, len: usize) -> Option<&'a [T]> {
    if len == 0 {
        Some(&[])
    } else if ptr.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(ptr, len))
    }
}

unsafe fn copy_out(src: &[f64], out: *mut f64, out_len: usize) -> TaStatus {
    if out.is_null() {
        return fail(TaStatus::NullPointer, "output buffer is null");
    }
    if out_len < src.len() {
        return fail(TaStatus::BufferTooSmall, format!("need {} values, buffer holds {out_len}", src.len()));
    }
    std::ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    TaStatus::Ok
}

fn store<T>(out: *mut *mut T, value: T) -> TaStatus {
    if out.is_null() {
        return fail(TaStatus::NullPointer, "output handle pointer is null");
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    TaStatus::Ok
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ta_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version contains NUL"),
    };
    VERSION.as_ptr()
}

/// Copy the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL, or
/// 0 when there is no error.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ta_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Product of single-qubit thermal states with excited populations `lambdas`.
///
/// # Safety
/// `lambdas` must point to `n` doubles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ta_state_product(lambdas: *const f64, n: usize, out: *mut *mut TaState) -> TaStatus {
    guard(|| {
        let Some(l) = slice(lambdas, n) else { return fail(TaStatus::NullPointer, "lambdas is null") };
        match product_thermal_state(l) {
            Ok(rho) => store(out, TaState(rho)),
            Err(e) => from_core(e),
        }
    })
}

/// Correlated A–C pair with thermal marginals, tensored with a thermal B, in
/// qubit order (A, B, C).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ta_state_rho_abc(
    lambda_a: f64,
    lambda_c: f64,
    gamma: f64,
    lambda_b: f64,
    out: *mut *mut TaState,
) -> TaStatus {
    guard(|| match RhoACParams::new(lambda_a, lambda_c, gamma).and_then(|p| rho_abc(&p, lambda_b)) {
        Ok(rho) => store(out, TaState(rho)),
        Err(e) => from_core(e),
    })
}

/// # Safety
/// `state` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ta_state_free(state: *mut TaState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Number of qubits, or 0 for a null handle.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ta_state_num_qubits(state: *const TaState) -> usize {
    state.as_ref().map_or(0, |s| s.0.num_qubits())
}

/// Excited population of each qubit.
///
/// # Safety
/// `state` must be a live handle and `out` must hold `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ta_state_local_energies(state: *const TaState, out: *mut f64, out_len: usize) -> TaStatus {
    guard(|| {
        let Some(s) = state.as_ref() else { return fail(TaStatus::NullPointer, "state is null") };
        copy_out(&local_energies(&s.0), out, out_len)
    })
}

/// Mutual information I(A:B) in nats between two disjoint qubit sets.
///
/// # Safety
/// `state` must be a live handle, the index arrays must hold the given
/// counts and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ta_state_mutual_information(
    state: *const TaState,
    part_a: *const usize,
    len_a: usize,
    part_b: *const usize,
    len_b: usize,
    out: *mut f64,
) -> TaStatus {
    guard(|| {
        let (Some(s), Some(a), Some(b)) = (state.as_ref(), slice(part_a, len_a), slice(part_b, len_b)) else {
            return fail(TaStatus::NullPointer, "null argument");
        };
        if out.is_null() {
            return fail(TaStatus::NullPointer, "out is null");
        }
        match mutual_information(&s.0, a, b) {
            Ok(i) => {
                *out = i;
                TaStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Evolve a three-qubit state over a `resolution` x `resolution` grid of
/// t in [0, t_max] and s in [0, s_max], recording the heat into each qubit.
///
/// # Safety
/// `state` must be a live handle and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ta_heat_grid_sweep(
    state: *const TaState,
    t_max: f64,
    s_max: f64,
    resolution: usize,
    out: *mut *mut TaHeatGrid,
) -> TaStatus {
    guard(|| {
        let Some(s) = state.as_ref() else { return fail(TaStatus::NullPointer, "state is null") };
        match sweep_grid(&s.0, (0.0, t_max), (0.0, s_max), resolution, "ffi") {
            Ok(g) => store(out, TaHeatGrid(g)),
            Err(e) => from_core(e),
        }
    })
}

/// # Safety
/// `grid` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ta_heat_grid_free(grid: *mut TaHeatGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Number of cells (resolution squared), or 0 for a null handle.
///
/// # Safety
/// `grid` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ta_heat_grid_len(grid: *const TaHeatGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.0.len())
}

/// Copy the heat into qubit `site` (0 = A, 1 = B, 2 = C), row-major with t as
/// the slow index.
///
/// # Safety
/// `grid` must be a live handle and `out` must hold `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ta_heat_grid_heat(
    grid: *const TaHeatGrid,
    site: usize,
    out: *mut f64,
    out_len: usize,
) -> TaStatus {
    guard(|| {
        let Some(g) = grid.as_ref() else { return fail(TaStatus::NullPointer, "grid is null") };
        if site > 2 {
            return fail(TaStatus::InvalidArgument, format!("site {site} is not 0, 1 or 2"));
        }
        copy_out(g.0.heat(site), out, out_len)
    })
}

/// Entanglement witness from the heat into A of a bipartite exchange.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ta_witness_from_heat(
    q_a: f64,
    beta_a: f64,
    beta_b: f64,
    dim_small: usize,
    out: *mut TaWitnessVerdict,
) -> TaStatus {
    guard(|| {
        if out.is_null() {
            return fail(TaStatus::NullPointer, "out is null");
        }
        match witness_from_heat(q_a, beta_a, beta_b, dim_small) {
            Ok(v) => {
                *out = TaWitnessVerdict {
                    reverse_flow_magnitude: v.reverse_flow_magnitude,
                    classical_bound: v.classical_bound,
                    certified_entangled: i32::from(v.certified_entangled),
                };
                TaStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Random walk of marginal vectors. Writes `(num_steps + 1) * n` doubles,
/// point-major, to `out`.
///
/// # Safety
/// `initial` must hold `n` doubles and `out` must hold `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ta_walk_run(
    initial: *const f64,
    n: usize,
    constrained: i32,
    step_max: f64,
    num_steps: usize,
    seed: u64,
    out: *mut f64,
    out_len: usize,
) -> TaStatus {
    guard(|| {
        let Some(init) = slice(initial, n) else { return fail(TaStatus::NullPointer, "initial is null") };
        let Some(needed) = num_steps.checked_add(1).and_then(|k| k.checked_mul(n)) else {
            return fail(TaStatus::InvalidArgument, "walk too long");
        };
        if out.is_null() {
            return fail(TaStatus::NullPointer, "output buffer is null");
        }
        if out_len < needed {
            return fail(TaStatus::BufferTooSmall, format!("need {needed} values, buffer holds {out_len}"));
        }
        let config = match MarginalVector::new(init.to_vec()) {
            Ok(initial) => WalkConfig { initial, constrained: constrained != 0, step_max, num_steps, seed },
            Err(e) => return from_core(e),
        };
        match run_walk(&config) {
            Ok(traj) => {
                let flat: Vec<f64> = traj.points.iter().flat_map(|p| p.lambdas().iter().copied()).collect();
                copy_out(&flat, out, out_len)
            }
            Err(e) => from_core(e),
        }
    })
}
