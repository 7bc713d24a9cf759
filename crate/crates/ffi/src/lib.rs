//! C ABI over `layereig`. Every call returns an [`LeStatus`]; on failure the
//! message is available from [`le_last_error`] on the same thread. Results
//! live behind opaque handles that the caller releases with the matching
//! `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use layereig::cli::CoefficientPreset;
use layereig::eigensolver::{Method, SolverConfig};
use layereig::error::{exit_code, Error};
use layereig::fe::Evaluable;
use layereig::mesh::{Mesh, MeshKind, MeshSpec};
use layereig::problem::{Problem, Solution};

/// Status codes; 0 to 8 coincide with the `layereig` binary's exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeStatus {
    Ok = 0,
    Generic = 1,
    InvalidSpec = 2,
    RegionOverlap = 3,
    NoConvergence = 4,
    AssumptionViolated = 5,
    KTooLarge = 6,
    Numerical = 7,
    Io = 8,
    NullArgument = 9,
    BufferTooSmall = 10,
    OutOfRange = 11,
    Panic = 12,
}

impl LeStatus {
    fn from_error(e: &Error) -> Self {
        match e.exit_code() {
            exit_code::INVALID_SPEC => LeStatus::InvalidSpec,
            exit_code::REGION_OVERLAP => LeStatus::RegionOverlap,
            exit_code::NO_CONVERGENCE => LeStatus::NoConvergence,
            exit_code::ASSUMPTION_VIOLATED => LeStatus::AssumptionViolated,
            exit_code::K_TOO_LARGE => LeStatus::KTooLarge,
            exit_code::NUMERICAL => LeStatus::Numerical,
            exit_code::IO => LeStatus::Io,
            _ => LeStatus::Generic,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeMeshKind {
    Exp = 0,
    Shishkin = 1,
    Uniform = 2,
}

impl From<LeMeshKind> for MeshKind {
    fn from(k: LeMeshKind) -> Self {
        match k {
            LeMeshKind::Exp => MeshKind::Exp,
            LeMeshKind::Shishkin => MeshKind::Shishkin,
            LeMeshKind::Uniform => MeshKind::Uniform,
        }
    }
}

/// Built-in coefficient choices; custom expressions go through
/// [`le_solve_expr`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LePreset {
    /// `a = exp(x)`, `b = x`.
    ExpX = 0,
    /// `a = 1`, `b = 0`.
    ConstOne = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeMethod {
    DenseReduce = 0,
    ShiftInvert = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeConfig {
    pub epsilon: f64,
    /// Layer exponent; a value `<= 0` selects `sqrt(min a)`.
    pub beta: f64,
    pub p: usize,
    pub n: usize,
    pub mesh: LeMeshKind,
    pub preset: LePreset,
    pub modes: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub shift: f64,
    pub method: LeMethod,
}

impl Default for LeConfig {
    fn default() -> Self {
        let s = SolverConfig::default();
        LeConfig {
            epsilon: 1e-6,
            beta: 0.0,
            p: 3,
            n: 32,
            mesh: LeMeshKind::Exp,
            preset: LePreset::ExpX,
            modes: s.k,
            tol: s.tol,
            max_iter: s.max_iter,
            shift: s.shift,
            method: LeMethod::DenseReduce,
        }
    }
}

impl LeConfig {
    fn solver(&self) -> SolverConfig {
        SolverConfig {
            k: self.modes,
            tol: self.tol,
            max_iter: self.max_iter,
            shift: self.shift,
            method: match self.method {
                LeMethod::DenseReduce => Method::DenseReduce,
                LeMethod::ShiftInvert => Method::ShiftInvert,
            },
        }
    }

    fn beta(&self) -> Option<f64> {
        (self.beta > 0.0).then_some(self.beta)
    }
}

/// Opaque handle to a computed spectrum and its eigenfunctions.
pub struct LeSolution {
    inner: Solution,
    modes: Vec<layereig::fe::FeFunction>,
}

/// Opaque handle to a mesh.
pub struct LeMesh {
    inner: Mesh,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Runs `f`, turning errors and panics into a status plus a stored message.
fn guard(f: impl FnOnce() -> Result<(), (LeStatus, String)>) -> LeStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LeStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            LeStatus::Panic
        }
    }
}

fn lib(e: Error) -> (LeStatus, String) {
    (LeStatus::from_error(&e), e.to_string())
}

fn null(name: &str) -> (LeStatus, String) {
    (LeStatus::NullArgument, format!("`{name}` is null"))
}

unsafe fn c_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, (LeStatus, String)> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (LeStatus::InvalidSpec, format!("`{name}` is not valid UTF-8")))
}

fn solve_with(cfg: &LeConfig, preset: CoefficientPreset) -> Result<LeSolution, (LeStatus, String)> {
    let coeffs = preset.coefficients(cfg.epsilon).map_err(lib)?;
    let problem = Problem::new(coeffs, cfg.p, cfg.beta(), cfg.mesh.into()).map_err(lib)?;
    let inner = problem.solve(cfg.n, &cfg.solver()).map_err(lib)?;
    let modes = (0..inner.spectrum.len()).map(|i| inner.mode(i)).collect::<Result<_, _>>().map_err(lib)?;
    Ok(LeSolution { inner, modes })
}

unsafe fn store<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn le_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn le_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Writes the default configuration into `out`.
///
/// # Safety
/// `out` must be null or point to writable memory for one `LeConfig`.
#[no_mangle]
pub unsafe extern "C" fn le_config_default(out: *mut LeConfig) -> LeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = LeConfig::default();
        Ok(())
    })
}

/// Solves with a built-in coefficient preset. On success `*out` receives a
/// handle to release with [`le_solution_free`].
///
/// # Safety
/// `cfg` must point to a valid `LeConfig`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn le_solve(cfg: *const LeConfig, out: *mut *mut LeSolution) -> LeStatus {
    guard(|| {
        let cfg = cfg.as_ref().ok_or_else(|| null("cfg"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let preset = match cfg.preset {
            LePreset::ExpX => CoefficientPreset::ExpX,
            LePreset::ConstOne => CoefficientPreset::ConstOne,
        };
        store(out, solve_with(cfg, preset)?);
        Ok(())
    })
}

/// Like [`le_solve`] with `a(x)` and `b(x)` given as expressions in `x`
/// (`cfg.preset` is ignored).
///
/// # Safety
/// `cfg` must point to a valid `LeConfig`, `a_expr` and `b_expr` to
/// NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn le_solve_expr(
    cfg: *const LeConfig,
    a_expr: *const c_char,
    b_expr: *const c_char,
    out: *mut *mut LeSolution,
) -> LeStatus {
    guard(|| {
        let cfg = cfg.as_ref().ok_or_else(|| null("cfg"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let preset = CoefficientPreset::Custom {
            a: c_str(a_expr, "a_expr")?.to_string(),
            b: c_str(b_expr, "b_expr")?.to_string(),
        };
        store(out, solve_with(cfg, preset)?);
        Ok(())
    })
}

/// Releases a solution; null is ignored.
///
/// # Safety
/// `sol` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn le_solution_free(sol: *mut LeSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Number of computed eigenpairs, or 0 for a null handle.
///
/// # Safety
/// `sol` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn le_solution_num_modes(sol: *const LeSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.inner.spectrum.len())
}

/// Number of free degrees of freedom, or 0 for a null handle.
///
/// # Safety
/// `sol` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn le_solution_dof(sol: *const LeSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.inner.dof)
}

unsafe fn copy_out(src: &[f64], out: *mut f64, len: usize) -> Result<(), (LeStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    if len < src.len() {
        return Err((
            LeStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} needed", src.len()),
        ));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    Ok(())
}

/// Copies the eigenvalues (ascending) into `out[0..num_modes]`.
///
/// # Safety
/// `sol` must be a live handle and `out` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn le_solution_eigenvalues(sol: *const LeSolution, out: *mut f64, len: usize) -> LeStatus {
    guard(|| {
        let sol = sol.as_ref().ok_or_else(|| null("sol"))?;
        copy_out(&sol.inner.spectrum.eigenvalues, out, len)
    })
}

/// Copies the relative residuals `||K u - lambda M u|| / ||K u||`.
///
/// # Safety
/// `sol` must be a live handle and `out` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn le_solution_residuals(sol: *const LeSolution, out: *mut f64, len: usize) -> LeStatus {
    guard(|| {
        let sol = sol.as_ref().ok_or_else(|| null("sol"))?;
        copy_out(&sol.inner.spectrum.residuals, out, len)
    })
}

/// Evaluates derivative `deriv` (0, 1 or 2) of eigenfunction `mode`
/// (0-based) at `x` in [0, 1].
///
/// # Safety
/// `sol` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn le_solution_eval(
    sol: *const LeSolution,
    mode: usize,
    x: f64,
    deriv: usize,
    out: *mut f64,
) -> LeStatus {
    guard(|| {
        let sol = sol.as_ref().ok_or_else(|| null("sol"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let f = sol
            .modes
            .get(mode)
            .ok_or_else(|| (LeStatus::OutOfRange, format!("mode {mode} not computed")))?;
        if !(0.0..=1.0).contains(&x) || deriv > 2 {
            return Err((LeStatus::OutOfRange, format!("x = {x}, deriv = {deriv} outside [0, 1] x {{0, 1, 2}}")));
        }
        *out = f.eval(x, deriv);
        Ok(())
    })
}

/// Builds a mesh; release it with [`le_mesh_free`].
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn le_mesh_build(
    kind: LeMeshKind,
    epsilon: f64,
    beta: f64,
    p: usize,
    n: usize,
    out: *mut *mut LeMesh,
) -> LeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = Mesh::build(&MeshSpec::new(kind.into(), epsilon, beta, p, n)).map_err(lib)?;
        store(out, LeMesh { inner });
        Ok(())
    })
}

/// Number of nodes (`N + 1`), or 0 for a null handle.
///
/// # Safety
/// `mesh` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn le_mesh_num_nodes(mesh: *const LeMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.inner.nodes().len())
}

/// Copies the node coordinates.
///
/// # Safety
/// `mesh` must be a live handle and `out` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn le_mesh_nodes(mesh: *const LeMesh, out: *mut f64, len: usize) -> LeStatus {
    guard(|| {
        let mesh = mesh.as_ref().ok_or_else(|| null("mesh"))?;
        copy_out(mesh.inner.nodes(), out, len)
    })
}

/// Releases a mesh; null is ignored.
///
/// # Safety
/// `mesh` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn le_mesh_free(mesh: *mut LeMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}
