//! C ABI over `catsim`.
//!
//! Models and states are opaque heap handles released with the matching
//! `*_free` function. Every fallible call returns a [`CatsimStatus`] and
//! writes its result through an out-pointer; on failure the thread's last
//! error message is set and can be read with [`catsim_last_error`].
//! Dense matrices cross the boundary column-major as [`CatsimComplex`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use catsim::fock::partial_trace;
use catsim::models::CouplingSpec;
use catsim::observables::number_and_parity;
use catsim::scenario::{run_scenario, ScenarioConfig};
use catsim::{
    build_one_mode, build_two_mode, cat_state, evolve, fidelity_pure, mutual_information,
    negativity, purity, quadrature_distribution, steady_state, von_neumann_entropy, wigner,
    CatParity, DensityMatrix, Dims, Error, EvolveOptions, FockSpace, ModeParams, Operator,
    StateVector, SteadyStateMethod, SteadyStateOptions, Subsystem, SystemModel, C64,
};
use nalgebra::{DMatrix, DVector};

/// Result code of every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CatsimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Dimension = 3,
    Numerical = 4,
    DegenerateKernel = 5,
    NonConvergence = 6,
    Io = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CatsimComplex {
    pub re: f64,
    pub im: f64,
}

impl From<CatsimComplex> for C64 {
    fn from(z: CatsimComplex) -> Self {
        C64::new(z.re, z.im)
    }
}

impl From<C64> for CatsimComplex {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

/// Parameters of one mode; see `catsim::ModeParams`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct CatsimModeParams {
    pub detuning: f64,
    pub kerr: f64,
    pub drive: CatsimComplex,
    pub gamma: f64,
    pub eta: f64,
}

impl From<&CatsimModeParams> for ModeParams {
    fn from(p: &CatsimModeParams) -> Self {
        ModeParams {
            detuning: p.detuning,
            kerr: p.kerr,
            drive: p.drive.into(),
            gamma: p.gamma,
            eta: p.eta,
        }
    }
}

pub const CATSIM_COUPLING_NONE: c_int = 0;
pub const CATSIM_COUPLING_LINEAR: c_int = 1;
pub const CATSIM_COUPLING_NONLINEAR: c_int = 2;

pub const CATSIM_PARITY_EVEN: c_int = 0;
pub const CATSIM_PARITY_ODD: c_int = 1;

pub const CATSIM_STEADY_KERNEL: c_int = 0;
pub const CATSIM_STEADY_PROPAGATE: c_int = 1;

pub const CATSIM_MODE_A: c_int = 0;
pub const CATSIM_MODE_B: c_int = 1;

/// Opaque system model.
pub struct CatsimModel(SystemModel);

/// Opaque density matrix.
pub struct CatsimState(DensityMatrix);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

enum Failure {
    Null(&'static str),
    Invalid(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn status_of(e: &Error) -> CatsimStatus {
    match e {
        Error::DimensionMismatch { .. } | Error::NotSquare { .. } | Error::BipartiteInput => {
            CatsimStatus::Dimension
        }
        Error::DegenerateKernel { .. } => CatsimStatus::DegenerateKernel,
        Error::NonConvergence { .. } => CatsimStatus::NonConvergence,
        Error::Io { .. } => CatsimStatus::Io,
        e if e.is_numerical() => CatsimStatus::Numerical,
        _ => CatsimStatus::InvalidArgument,
    }
}

/// Runs `f`, converting errors and panics to a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CatsimStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            CatsimStatus::Ok
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            CatsimStatus::NullPointer
        }
        Ok(Err(Failure::Invalid(msg))) => {
            set_error(msg);
            CatsimStatus::InvalidArgument
        }
        Ok(Err(Failure::Core(e))) => {
            let status = status_of(&e);
            set_error(e.to_string());
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            CatsimStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &'static str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn write<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn check_out<T>(out: *mut T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        Err(Failure::Null(what))
    } else {
        Ok(())
    }
}

fn parity_of(p: c_int) -> Result<CatParity, Failure> {
    match p {
        CATSIM_PARITY_EVEN => Ok(CatParity::Even),
        CATSIM_PARITY_ODD => Ok(CatParity::Odd),
        other => Err(Failure::Invalid(format!("unknown parity {other}"))),
    }
}

/// Reduced state of `mode`, or the state itself when it has a single mode.
fn reduced(rho: &DensityMatrix, mode: c_int) -> Result<DensityMatrix, Failure> {
    let keep = match mode {
        CATSIM_MODE_A => Subsystem::A,
        CATSIM_MODE_B => Subsystem::B,
        other => return Err(Failure::Invalid(format!("unknown mode {other}"))),
    };
    match (rho.dims().pair(), keep) {
        (Some(dims), _) => Ok(partial_trace(rho, dims, keep)?),
        (None, Subsystem::A) => Ok(rho.clone()),
        (None, Subsystem::B) => Err(Failure::Invalid("single-mode state has no mode b".into())),
    }
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn catsim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (truncated and
/// NUL-terminated) and returns the full message length in bytes.
#[no_mangle]
pub unsafe extern "C" fn catsim_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// One driven mode truncated at `n` Fock states.
#[no_mangle]
pub unsafe extern "C" fn catsim_model_one_mode(
    params: *const CatsimModeParams,
    n: usize,
    out: *mut *mut CatsimModel,
) -> CatsimStatus {
    guard(|| {
        check_out(out, "out")?;
        let p = ModeParams::from(as_ref(params, "params")?);
        let model = build_one_mode(&p, n)?;
        write(out, boxed(CatsimModel(model)), "out")
    })
}

/// Two coupled modes; `coupling` is one of the `CATSIM_COUPLING_*` values.
#[no_mangle]
pub unsafe extern "C" fn catsim_model_two_mode(
    params_a: *const CatsimModeParams,
    params_b: *const CatsimModeParams,
    coupling: c_int,
    strength: f64,
    n_a: usize,
    n_b: usize,
    out: *mut *mut CatsimModel,
) -> CatsimStatus {
    guard(|| {
        check_out(out, "out")?;
        let pa = ModeParams::from(as_ref(params_a, "params_a")?);
        let pb = ModeParams::from(as_ref(params_b, "params_b")?);
        let spec = match coupling {
            CATSIM_COUPLING_NONE => CouplingSpec::none(),
            CATSIM_COUPLING_LINEAR => CouplingSpec::linear(strength),
            CATSIM_COUPLING_NONLINEAR => CouplingSpec::nonlinear(strength),
            other => return Err(Failure::Invalid(format!("unknown coupling {other}"))),
        };
        let model = build_two_mode(&pa, &pb, &spec, n_a, n_b)?;
        write(out, boxed(CatsimModel(model)), "out")
    })
}

/// Hilbert-space dimension of the model, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn catsim_model_dim(model: *const CatsimModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.dim())
}

#[no_mangle]
pub unsafe extern "C" fn catsim_model_free(model: *mut CatsimModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Fock state |k⟩ of one mode truncated at `n`.
#[no_mangle]
pub unsafe extern "C" fn catsim_state_fock(n: usize, k: usize, out: *mut *mut CatsimState) -> CatsimStatus {
    guard(|| {
        check_out(out, "out")?;
        let rho = DensityMatrix::fock(FockSpace::new(n)?.dims(), k)?;
        write(out, boxed(CatsimState(rho)), "out")
    })
}

/// Coherent state |α⟩ of one mode truncated at `n`.
#[no_mangle]
pub unsafe extern "C" fn catsim_state_coherent(
    alpha: CatsimComplex,
    n: usize,
    out: *mut *mut CatsimState,
) -> CatsimStatus {
    guard(|| {
        check_out(out, "out")?;
        let psi = StateVector::coherent(alpha.into(), FockSpace::new(n)?)?;
        write(out, boxed(CatsimState(psi.to_density())), "out")
    })
}

/// Cat state (|ξ⟩ ± |−ξ⟩)/√𝒩; `parity` is `CATSIM_PARITY_EVEN` or `_ODD`.
#[no_mangle]
pub unsafe extern "C" fn catsim_state_cat(
    xi: CatsimComplex,
    parity: c_int,
    n: usize,
    out: *mut *mut CatsimState,
) -> CatsimStatus {
    guard(|| {
        check_out(out, "out")?;
        let psi = cat_state(xi.into(), parity_of(parity)?, n)?;
        write(out, boxed(CatsimState(psi.to_density())), "out")
    })
}

/// Density matrix from `dim × dim` column-major entries. Pass `n_b = 0` for a
/// single mode of truncation `n_a = dim`, otherwise `dim` must be `n_a · n_b`.
#[no_mangle]
pub unsafe extern "C" fn catsim_state_from_matrix(
    data: *const CatsimComplex,
    dim: usize,
    n_a: usize,
    n_b: usize,
    out: *mut *mut CatsimState,
) -> CatsimStatus {
    guard(|| {
        check_out(out, "out")?;
        let entries = slice(data, dim * dim, "data")?;
        let dims = if n_b == 0 { Dims::Mode(n_a) } else { Dims::Pair(n_a, n_b) };
        let m = DMatrix::from_iterator(dim, dim, entries.iter().map(|&z| C64::from(z)));
        let rho = DensityMatrix::new(Operator::new(m, dims)?)?;
        write(out, boxed(CatsimState(rho)), "out")
    })
}

/// Pure state from `len` amplitudes, normalized; `n_b` as in
/// [`catsim_state_from_matrix`].
#[no_mangle]
pub unsafe extern "C" fn catsim_state_from_amplitudes(
    amplitudes: *const CatsimComplex,
    len: usize,
    n_a: usize,
    n_b: usize,
    out: *mut *mut CatsimState,
) -> CatsimStatus {
    guard(|| {
        check_out(out, "out")?;
        let amps = slice(amplitudes, len, "amplitudes")?;
        let dims = if n_b == 0 { Dims::Mode(n_a) } else { Dims::Pair(n_a, n_b) };
        let v = DVector::from_iterator(len, amps.iter().map(|&z| C64::from(z)));
        let psi = StateVector::normalized(v, dims)?;
        write(out, boxed(CatsimState(psi.to_density())), "out")
    })
}

/// ρ_a ⊗ ρ_b of two single-mode states.
#[no_mangle]
pub unsafe extern "C" fn catsim_state_tensor(
    a: *const CatsimState,
    b: *const CatsimState,
    out: *mut *mut CatsimState,
) -> CatsimStatus {
    guard(|| {
        check_out(out, "out")?;
        let (a, b) = (&as_ref(a, "a")?.0, &as_ref(b, "b")?.0);
        if a.dims().is_bipartite() || b.dims().is_bipartite() {
            return Err(Error::BipartiteInput.into());
        }
        write(out, boxed(CatsimState(a.tensor(b))), "out")
    })
}

/// Matrix dimension of the state, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn catsim_state_dim(state: *const CatsimState) -> usize {
    state.as_ref().map_or(0, |s| s.0.dim())
}

/// Copies ρ column-major into `out`, which must hold `dim²` entries.
#[no_mangle]
pub unsafe extern "C" fn catsim_state_copy_matrix(
    state: *const CatsimState,
    out: *mut CatsimComplex,
    len: usize,
) -> CatsimStatus {
    guard(|| {
        let rho = &as_ref(state, "state")?.0;
        let m = rho.matrix();
        if len != m.len() {
            return Err(Error::DimensionMismatch {
                expected: m.len(),
                got: len,
            }
            .into());
        }
        let dst = slice_mut(out, len, "out")?;
        for (d, s) in dst.iter_mut().zip(m.iter()) {
            *d = (*s).into();
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn catsim_state_free(state: *mut CatsimState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// ρ(t) from ρ(0) = `state` under default integrator settings.
#[no_mangle]
pub unsafe extern "C" fn catsim_evolve(
    model: *const CatsimModel,
    state: *const CatsimState,
    t: f64,
    out: *mut *mut CatsimState,
) -> CatsimStatus {
    guard(|| {
        check_out(out, "out")?;
        let model = &as_ref(model, "model")?.0;
        let rho0 = &as_ref(state, "state")?.0;
        let mut traj = evolve(model, rho0, &[t], &EvolveOptions::default())?;
        let rho = traj.states.pop().ok_or_else(|| Failure::Invalid("no sample".into()))?;
        write(out, boxed(CatsimState(rho)), "out")
    })
}

/// Stationary state. `method` is `CATSIM_STEADY_KERNEL` (`initial` may be
/// null) or `CATSIM_STEADY_PROPAGATE` (`initial` required, stops once
/// max|dρ/dt| < `tol`).
#[no_mangle]
pub unsafe extern "C" fn catsim_steady_state(
    model: *const CatsimModel,
    method: c_int,
    initial: *const CatsimState,
    tol: f64,
    out: *mut *mut CatsimState,
) -> CatsimStatus {
    guard(|| {
        check_out(out, "out")?;
        let model = &as_ref(model, "model")?.0;
        let method = match method {
            CATSIM_STEADY_KERNEL => SteadyStateMethod::Kernel,
            CATSIM_STEADY_PROPAGATE => SteadyStateMethod::Propagate,
            other => return Err(Failure::Invalid(format!("unknown steady-state method {other}"))),
        };
        let rho0 = initial.as_ref().map(|s| &s.0);
        let rho = steady_state(model, method, rho0, &SteadyStateOptions::with_tol(tol))?;
        write(out, boxed(CatsimState(rho)), "out")
    })
}

/// ⟨a†a⟩ of `mode` (`CATSIM_MODE_A` / `_B`).
#[no_mangle]
pub unsafe extern "C" fn catsim_photon_number(state: *const CatsimState, mode: c_int, out: *mut f64) -> CatsimStatus {
    guard(|| {
        check_out(out, "out")?;
        let r = reduced(&as_ref(state, "state")?.0, mode)?;
        write(out, number_and_parity(&r).0, "out")
    })
}

/// ⟨(−1)^{a†a}⟩ of `mode`.
#[no_mangle]
pub unsafe extern "C" fn catsim_parity(state: *const CatsimState, mode: c_int, out: *mut f64) -> CatsimStatus {
    guard(|| {
        check_out(out, "out")?;
        let r = reduced(&as_ref(state, "state")?.0, mode)?;
        write(out, number_and_parity(&r).1, "out")
    })
}

/// Von Neumann entropy (natural log) of the whole state.
#[no_mangle]
pub unsafe extern "C" fn catsim_entropy(state: *const CatsimState, out: *mut f64) -> CatsimStatus {
    guard(|| {
        check_out(out, "out")?;
        write(out, von_neumann_entropy(&as_ref(state, "state")?.0), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn catsim_purity(state: *const CatsimState, out: *mut f64) -> CatsimStatus {
    guard(|| {
        check_out(out, "out")?;
        write(out, purity(&as_ref(state, "state")?.0), "out")
    })
}

/// Sum of |negative eigenvalues| of the partial transpose; two-mode states only.
#[no_mangle]
pub unsafe extern "C" fn catsim_negativity(state: *const CatsimState, out: *mut f64) -> CatsimStatus {
    guard(|| {
        check_out(out, "out")?;
        write(out, negativity(&as_ref(state, "state")?.0, None)?, "out")
    })
}

/// S_a + S_b − S_ab; two-mode states only.
#[no_mangle]
pub unsafe extern "C" fn catsim_mutual_information(state: *const CatsimState, out: *mut f64) -> CatsimStatus {
    guard(|| {
        check_out(out, "out")?;
        write(out, mutual_information(&as_ref(state, "state")?.0, None)?, "out")
    })
}

/// ⟨ψ|ρ|ψ⟩ for `len` amplitudes of ψ (normalized internally).
#[no_mangle]
pub unsafe extern "C" fn catsim_fidelity_pure(
    state: *const CatsimState,
    amplitudes: *const CatsimComplex,
    len: usize,
    out: *mut f64,
) -> CatsimStatus {
    guard(|| {
        check_out(out, "out")?;
        let rho = &as_ref(state, "state")?.0;
        let amps = slice(amplitudes, len, "amplitudes")?;
        let v = DVector::from_iterator(len, amps.iter().map(|&z| C64::from(z)));
        let psi = StateVector::normalized(v, rho.dims())?;
        write(out, fidelity_pure(&psi, rho)?, "out")
    })
}

/// Wigner function of `mode` on the grid `re × im`. `out` holds
/// `n_re · n_im` values, row-major with one row per `im` point.
#[no_mangle]
pub unsafe extern "C" fn catsim_wigner(
    state: *const CatsimState,
    mode: c_int,
    re: *const f64,
    n_re: usize,
    im: *const f64,
    n_im: usize,
    out: *mut f64,
) -> CatsimStatus {
    guard(|| {
        let r = reduced(&as_ref(state, "state")?.0, mode)?;
        let re = slice(re, n_re, "re")?;
        let im = slice(im, n_im, "im")?;
        let dst = slice_mut(out, n_re * n_im, "out")?;
        let grid = wigner(&r, re, im)?;
        for i in 0..n_im {
            for j in 0..n_re {
                dst[i * n_re + j] = grid.values[(i, j)];
            }
        }
        Ok(())
    })
}

/// Quadrature density 𝒫(X) of `mode` at phase `phi` for each of `n` points.
#[no_mangle]
pub unsafe extern "C" fn catsim_quadrature(
    state: *const CatsimState,
    mode: c_int,
    phi: f64,
    xs: *const f64,
    n: usize,
    out: *mut f64,
) -> CatsimStatus {
    guard(|| {
        let r = reduced(&as_ref(state, "state")?.0, mode)?;
        let xs = slice(xs, n, "xs")?;
        let dst = slice_mut(out, n, "out")?;
        let q = quadrature_distribution(&r, phi, xs)?;
        dst.copy_from_slice(&q.density);
        Ok(())
    })
}

/// Runs a scenario given as JSON text, writing its outputs under `out_dir`.
#[no_mangle]
pub unsafe extern "C" fn catsim_run_scenario_json(json: *const c_char, out_dir: *const c_char) -> CatsimStatus {
    guard(|| {
        let text = CStr::from_ptr(as_ref(json, "json")?)
            .to_str()
            .map_err(|_| Failure::Invalid("json is not UTF-8".into()))?;
        let dir = CStr::from_ptr(as_ref(out_dir, "out_dir")?)
            .to_str()
            .map_err(|_| Failure::Invalid("out_dir is not UTF-8".into()))?;
        let cfg = ScenarioConfig::from_json(text)?;
        run_scenario(&cfg, Path::new(dir))?;
        Ok(())
    })
}
