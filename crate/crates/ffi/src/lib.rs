//! C ABI for the attitude observer.
//!
//! Every fallible function returns an [`AoStatus`]. On failure a message is
//! kept per thread and can be read with [`ao_last_error_message`]. Observers
//! live behind an opaque [`AoObserver`] handle that the caller frees with
//! [`ao_observer_free`]. Matrices cross the boundary as nine doubles in
//! row-major order. Panics never unwind into C; they map to `AO_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use attitude_observer::lyapunov::find_certificate;
use attitude_observer::reconstruct::reconstruct;
use attitude_observer::{
    DegenerateFlag, Error, Gains, Mat3, Measurement, Observer, ObserverMode, ObserverState, ReferenceBasis, Vec3,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AoStatus {
    Ok = 0,
    NullPointer = 1,
    NonFinite = 2,
    InvalidGain = 3,
    DegenerateReferences = 4,
    NoCertificate = 5,
    InvalidArgument = 6,
    Panic = 7,
    Internal = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AoMode {
    /// `v̂ × (ω_m − b̂)` in each vector channel.
    Filtered = 0,
    /// `v̂ × ω_m − v_m × b̂` in each vector channel.
    LinearVariant = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AoDegenerate {
    None = 0,
    AlphaZero = 1,
    Collinear = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AoVec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Scalar observer gains.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AoGains {
    pub k_alpha: f64,
    pub k_beta: f64,
    pub l_alpha: f64,
    pub l_beta: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AoState {
    pub alpha_hat: AoVec3,
    pub beta_hat: AoVec3,
    pub b_hat: AoVec3,
}

/// One sample of gyro and vector readings, all in body axes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AoMeasurement {
    pub omega_m: AoVec3,
    pub alpha_m: AoVec3,
    pub beta_m: AoVec3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AoReconstruction {
    /// Unprojected estimate, row-major.
    pub r_tilde: [f64; 9],
    /// Nearest rotation, row-major.
    pub r_hat: [f64; 9],
    pub degenerate: AoDegenerate,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AoCertificate {
    pub c_omega: f64,
    pub mu: f64,
    pub epsilon: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub mu_prime: f64,
    pub sigma_1alpha: f64,
    pub sigma_1beta: f64,
    pub sigma_2alpha: f64,
    pub sigma_2beta: f64,
    pub sigma_2alphabeta: f64,
    pub sigma_2alpha_prime: f64,
    pub sigma_2beta_prime: f64,
}

/// Opaque observer handle.
pub struct AoObserver {
    inner: Observer,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> AoStatus {
    match e {
        Error::NonFinite(_) | Error::Diverged { .. } => AoStatus::NonFinite,
        Error::InvalidGain { .. } => AoStatus::InvalidGain,
        Error::DegenerateReferences { .. } => AoStatus::DegenerateReferences,
        Error::NoCertificate(_) => AoStatus::NoCertificate,
        Error::InvalidArgument(_) | Error::Config { .. } | Error::NotARotation { .. } => AoStatus::InvalidArgument,
        Error::Io(_) => AoStatus::Internal,
    }
}

/// Runs `f`, records any error message and converts panics.
fn guard(f: impl FnOnce() -> Result<(), (AoStatus, String)>) -> AoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            AoStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside attitude-observer");
            AoStatus::Panic
        }
    }
}

fn lift(e: Error) -> (AoStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> (AoStatus, String) {
    (AoStatus::NullPointer, format!("`{name}` is null"))
}

/// Reads `*p`, reporting a null pointer under `name`.
///
/// # Safety
/// `p` is null or points to a valid `T`.
unsafe fn read<'a, T>(p: *const T, name: &str) -> Result<&'a T, (AoStatus, String)> {
    p.as_ref().ok_or_else(|| null(name))
}

impl From<AoVec3> for Vec3 {
    fn from(v: AoVec3) -> Self {
        Vec3::new(v.x, v.y, v.z)
    }
}

impl From<Vec3> for AoVec3 {
    fn from(v: Vec3) -> Self {
        AoVec3 { x: v.x, y: v.y, z: v.z }
    }
}

impl From<AoState> for ObserverState {
    fn from(s: AoState) -> Self {
        ObserverState { alpha_hat: s.alpha_hat.into(), beta_hat: s.beta_hat.into(), b_hat: s.b_hat.into() }
    }
}

impl From<ObserverState> for AoState {
    fn from(s: ObserverState) -> Self {
        AoState { alpha_hat: s.alpha_hat.into(), beta_hat: s.beta_hat.into(), b_hat: s.b_hat.into() }
    }
}

impl From<AoGains> for Gains {
    fn from(g: AoGains) -> Self {
        Gains::scalar(g.k_alpha, g.k_beta, g.l_alpha, g.l_beta)
    }
}

/// Mode codes arrive as plain integers so an out-of-range value from C is an
/// error, not undefined behavior.
fn mode_from_code(code: u32) -> Result<ObserverMode, (AoStatus, String)> {
    match code {
        c if c == AoMode::Filtered as u32 => Ok(ObserverMode::Filtered),
        c if c == AoMode::LinearVariant as u32 => Ok(ObserverMode::LinearVariant),
        c => Err((AoStatus::InvalidArgument, format!("unknown observer mode {c}"))),
    }
}

fn row_major(m: &Mat3) -> [f64; 9] {
    let mut out = [0.0; 9];
    for r in 0..3 {
        for c in 0..3 {
            out[3 * r + c] = m[(r, c)];
        }
    }
    out
}

/// Creates an observer. `mode` is an [`AoMode`] value. On success `*out` owns
/// a new handle.
///
/// # Safety
/// Pointer arguments are null or valid; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ao_observer_new(
    initial: *const AoState,
    gains: *const AoGains,
    mode: u32,
    out: *mut *mut AoObserver,
) -> AoStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let initial = *read(initial, "initial")?;
        let gains = *read(gains, "gains")?;
        let inner = Observer::new(initial.into(), gains.into(), mode_from_code(mode)?).map_err(lift)?;
        *out = Box::into_raw(Box::new(AoObserver { inner }));
        Ok(())
    })
}

/// Releases a handle. Null is accepted and ignored.
///
/// # Safety
/// `obs` is null or came from [`ao_observer_new`] and was not freed before.
#[no_mangle]
pub unsafe extern "C" fn ao_observer_free(obs: *mut AoObserver) {
    if !obs.is_null() {
        drop(Box::from_raw(obs));
    }
}

/// Replaces the estimate; gains and mode are kept.
///
/// # Safety
/// `obs` is a live handle or null; `state` is null or valid.
#[no_mangle]
pub unsafe extern "C" fn ao_observer_reset(obs: *mut AoObserver, state: *const AoState) -> AoStatus {
    guard(|| {
        let obs = obs.as_mut().ok_or_else(|| null("obs"))?;
        let state: ObserverState = (*read(state, "state")?).into();
        if !state.is_finite() {
            return Err((AoStatus::NonFinite, "reset state has a non-finite entry".into()));
        }
        obs.inner.reset(state);
        Ok(())
    })
}

/// Advances the observer by `dt` seconds with `m` held over the step. The new
/// estimate is written to `out` when it is not null. A failed step leaves the
/// handle unchanged.
///
/// # Safety
/// `obs` is a live handle or null; `m` is null or valid; `out` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn ao_observer_step(
    obs: *mut AoObserver,
    m: *const AoMeasurement,
    dt: f64,
    out: *mut AoState,
) -> AoStatus {
    guard(|| {
        let obs = obs.as_mut().ok_or_else(|| null("obs"))?;
        let m = read(m, "m")?;
        let meas = Measurement { t: 0.0, omega_m: m.omega_m.into(), alpha_m: m.alpha_m.into(), beta_m: m.beta_m.into() };
        let next = *obs.inner.step(&meas, dt).map_err(lift)?;
        if let Some(out) = out.as_mut() {
            *out = next.into();
        }
        Ok(())
    })
}

/// Copies the current estimate into `out`.
///
/// # Safety
/// `obs` is a live handle or null; `out` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn ao_observer_state(obs: *const AoObserver, out: *mut AoState) -> AoStatus {
    guard(|| {
        let obs = read(obs, "obs")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = obs.inner.state.into();
        Ok(())
    })
}

/// Rebuilds the attitude from estimated body vectors and the inertial references.
///
/// # Safety
/// Pointer arguments are null or valid; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ao_reconstruct(
    alpha_i: *const AoVec3,
    beta_i: *const AoVec3,
    alpha_hat: *const AoVec3,
    beta_hat: *const AoVec3,
    out: *mut AoReconstruction,
) -> AoStatus {
    guard(|| {
        let basis = ReferenceBasis::new((*read(alpha_i, "alpha_i")?).into(), (*read(beta_i, "beta_i")?).into()).map_err(lift)?;
        let a: Vec3 = (*read(alpha_hat, "alpha_hat")?).into();
        let b: Vec3 = (*read(beta_hat, "beta_hat")?).into();
        if !(a.iter().chain(b.iter()).all(|x| x.is_finite())) {
            return Err((AoStatus::NonFinite, "estimated vectors have a non-finite entry".into()));
        }
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let rec = reconstruct(&a, &b, &basis);
        *out = AoReconstruction {
            r_tilde: row_major(&rec.r_tilde),
            r_hat: row_major(rec.r_hat.matrix()),
            degenerate: match rec.degenerate {
                DegenerateFlag::None => AoDegenerate::None,
                DegenerateFlag::AlphaZero => AoDegenerate::AlphaZero,
                DegenerateFlag::Collinear => AoDegenerate::Collinear,
            },
        };
        Ok(())
    })
}

/// Computes the strict Lyapunov certificate for scalar gains, references and
/// a body-rate bound `c_omega`.
///
/// # Safety
/// Pointer arguments are null or valid; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ao_certify(
    gains: *const AoGains,
    alpha_i: *const AoVec3,
    beta_i: *const AoVec3,
    c_omega: f64,
    out: *mut AoCertificate,
) -> AoStatus {
    guard(|| {
        let gains: Gains = (*read(gains, "gains")?).into();
        gains.validate().map_err(lift)?;
        let a: Vec3 = (*read(alpha_i, "alpha_i")?).into();
        let b: Vec3 = (*read(beta_i, "beta_i")?).into();
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let cert = find_certificate(c_omega, &gains, &a, &b).map_err(lift)?;
        let (p, c) = (cert.params, cert.coefficients);
        *out = AoCertificate {
            c_omega: p.c_omega,
            mu: p.mu,
            epsilon: p.epsilon,
            sigma1: p.sigma1,
            sigma2: p.sigma2,
            mu_prime: c.mu_prime,
            sigma_1alpha: c.sigma_1alpha,
            sigma_1beta: c.sigma_1beta,
            sigma_2alpha: c.sigma_2alpha,
            sigma_2beta: c.sigma_2beta,
            sigma_2alphabeta: c.sigma_2alphabeta,
            sigma_2alpha_prime: c.sigma_2alpha_prime,
            sigma_2beta_prime: c.sigma_2beta_prime,
        };
        Ok(())
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn ao_status_message(status: AoStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        AoStatus::Ok => b"ok\0",
        AoStatus::NullPointer => b"null pointer argument\0",
        AoStatus::NonFinite => b"non-finite value\0",
        AoStatus::InvalidGain => b"invalid gain\0",
        AoStatus::DegenerateReferences => b"reference vectors are collinear or zero\0",
        AoStatus::NoCertificate => b"no Lyapunov certificate\0",
        AoStatus::InvalidArgument => b"invalid argument\0",
        AoStatus::Panic => b"internal panic\0",
        AoStatus::Internal => b"internal error\0",
    };
    s.as_ptr().cast()
}

/// Message of the last failed call on this thread, or "" after a success.
/// Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn ao_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, e.g. "0.1.0".
#[no_mangle]
pub extern "C" fn ao_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
