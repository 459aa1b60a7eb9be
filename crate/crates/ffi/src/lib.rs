//! C ABI over `dipne-core`.
//!
//! States cross the boundary as opaque `DipneState` handles owned by the
//! caller and released with `dipne_state_free`. Every function returns a
//! `DipneStatus`; on failure `dipne_last_error` describes the most recent
//! error on the calling thread. Panics are caught and reported as
//! `DIPNE_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dipne_core::analytics::{c_equal, interference_loss_theory};
use dipne_core::catfit::{fit_squeezed_cat, FitOptions, PhotonAccounting};
use dipne_core::circuits::{beamsplit, displace, phase_shift, squeeze_op};
use dipne_core::experiments::{run, Config, Experiment};
use dipne_core::kitten::{kitten_direct, peak_estimate, KittenSpec};
use dipne_core::states::{cat_state, coherent, squeezed_vacuum, CatSpec, Squeeze};
use dipne_core::{fidelity, tensor, Error, FockState, ModeLayout};
use num_complex::Complex64;

/// Opaque quantum state.
pub struct DipneState(FockState);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DipneStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Truncation leakage above threshold; the message suggests a cutoff.
    Leakage = 3,
    NotNormalizable = 4,
    Config = 5,
    Numerical = 6,
    /// `dipne_run_experiment` finished but a tolerance check failed.
    ToleranceBreach = 7,
    Panic = 8,
}

/// Photon bookkeeping used by `dipne_fit_squeezed_cat`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DipneAccounting {
    Component = 0,
    State = 1,
}

/// Best squeezed-cat fit of a single-mode state.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DipneCatFit {
    pub fidelity: f64,
    pub squeeze_fraction: f64,
    pub alpha: f64,
    pub r: f64,
    pub phi: f64,
    pub plain_cat_fidelity: f64,
    pub axis: f64,
    pub squeeze_theta: f64,
    pub mean_photons: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(DipneStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Leakage { .. } => DipneStatus::Leakage,
            Error::NotNormalized(_)
            | Error::ZeroVector
            | Error::NonNormalizable
            | Error::ImpossibleOutcome(_) => DipneStatus::NotNormalizable,
            Error::Config(_) => DipneStatus::Config,
            Error::Numerical(_) => DipneStatus::Numerical,
            _ => DipneStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> DipneStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            DipneStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("panic: {msg}"));
            DipneStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(DipneStatus::NullPointer, format!("{what} is null"))
}

fn state_ref<'a>(p: *const DipneState, what: &str) -> Result<&'a FockState, Failure> {
    // SAFETY: non-null handles come from this library and are live until freed
    unsafe { p.as_ref() }
        .map(|s| &s.0)
        .ok_or_else(|| null(what))
}

fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    // SAFETY: caller provides a valid, aligned destination
    unsafe { out.write(value) };
    Ok(())
}

fn emit(out: *mut *mut DipneState, state: FockState) -> Result<(), Failure> {
    write(out, Box::into_raw(Box::new(DipneState(state))), "out")
}

fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    // SAFETY: caller guarantees `len` readable elements
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

fn string<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    // SAFETY: caller passes a NUL-terminated string
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| Failure(DipneStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dipne_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn dipne_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Release a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn dipne_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Release a state. Null is ignored.
///
/// # Safety
/// `state` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn dipne_state_free(state: *mut DipneState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Vacuum on `modes` modes, each truncated at `cutoff` photons.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dipne_vacuum(
    modes: usize,
    cutoff: usize,
    out: *mut *mut DipneState,
) -> DipneStatus {
    guard(|| emit(out, FockState::vacuum(ModeLayout::uniform(modes, cutoff)?)))
}

/// Basis state `|occupation⟩` with per-mode `cutoffs`, both of length `modes`.
///
/// # Safety
/// Arrays must hold `modes` elements; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dipne_fock(
    cutoffs: *const usize,
    occupation: *const usize,
    modes: usize,
    out: *mut *mut DipneState,
) -> DipneStatus {
    guard(|| {
        let layout = ModeLayout::new(slice(cutoffs, modes, "cutoffs")?.to_vec())?;
        emit(
            out,
            FockState::basis(layout, slice(occupation, modes, "occupation")?)?,
        )
    })
}

/// Single-mode coherent state.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dipne_coherent(
    re: f64,
    im: f64,
    cutoff: usize,
    out: *mut *mut DipneState,
) -> DipneStatus {
    guard(|| emit(out, coherent(Complex64::new(re, im), cutoff)?))
}

/// Single-mode squeezed vacuum with `ξ = r e^{iθ}`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dipne_squeezed_vacuum(
    r: f64,
    theta: f64,
    cutoff: usize,
    out: *mut *mut DipneState,
) -> DipneStatus {
    guard(|| emit(out, squeezed_vacuum(Squeeze::new(r, theta)?, cutoff)?))
}

/// Normalized `(D(α) + e^{iφ}D(−α)) S(r e^{iθ})|0⟩`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dipne_cat(
    alpha_re: f64,
    alpha_im: f64,
    phi: f64,
    r: f64,
    theta: f64,
    cutoff: usize,
    out: *mut *mut DipneState,
) -> DipneStatus {
    guard(|| {
        let spec = CatSpec {
            alpha: Complex64::new(alpha_re, alpha_im),
            phi,
            squeeze: Squeeze::new(r, theta)?,
        };
        emit(out, cat_state(&spec, cutoff)?)
    })
}

/// Kitten state after counting `k` photons in the tapped arm of a beamsplitter
/// at `theta_sub`. A non-finite `squeeze_photons` selects the
/// infinite-squeezing limit. `probability` (nullable) receives the count
/// probability, or -1 in the infinite limit.
///
/// # Safety
/// `out` must be valid for writes; `probability` may be null.
#[no_mangle]
pub unsafe extern "C" fn dipne_kitten(
    squeeze_photons: f64,
    theta_sub: f64,
    k: usize,
    cutoff: usize,
    out: *mut *mut DipneState,
    probability: *mut f64,
) -> DipneStatus {
    guard(|| {
        let spec = if squeeze_photons.is_infinite() && squeeze_photons > 0.0 {
            KittenSpec::infinite(theta_sub, k, cutoff)
        } else {
            KittenSpec::finite(squeeze_photons, theta_sub, k, cutoff)
        };
        let kitten = kitten_direct(&spec)?;
        if !probability.is_null() {
            probability.write(kitten.probability.unwrap_or(-1.0));
        }
        emit(out, kitten.state)
    })
}

/// Number of modes.
///
/// # Safety
/// `state` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dipne_state_modes(
    state: *const DipneState,
    out: *mut usize,
) -> DipneStatus {
    guard(|| write(out, state_ref(state, "state")?.layout().modes(), "out"))
}

/// Number of stored amplitudes.
///
/// # Safety
/// `state` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dipne_state_dim(state: *const DipneState, out: *mut usize) -> DipneStatus {
    guard(|| write(out, state_ref(state, "state")?.layout().dim(), "out"))
}

/// Amplitude of `|occupation⟩`; `len` must equal the number of modes.
///
/// # Safety
/// `occupation` must hold `len` elements; `re` and `im` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dipne_state_amplitude(
    state: *const DipneState,
    occupation: *const usize,
    len: usize,
    re: *mut f64,
    im: *mut f64,
) -> DipneStatus {
    guard(|| {
        let a = state_ref(state, "state")?.amplitude(slice(occupation, len, "occupation")?)?;
        write(re, a.re, "re")?;
        write(im, a.im, "im")
    })
}

/// Copy all amplitudes as interleaved `(re, im)` pairs into `buf`, which must
/// hold `2 * dim` doubles; `len` is its length in doubles.
///
/// # Safety
/// `buf` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn dipne_state_amplitudes(
    state: *const DipneState,
    buf: *mut f64,
    len: usize,
) -> DipneStatus {
    guard(|| {
        let amps = state_ref(state, "state")?.amplitudes();
        if len < 2 * amps.len() {
            return Err(Failure(
                DipneStatus::InvalidArgument,
                format!("buffer holds {len} doubles, need {}", 2 * amps.len()),
            ));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        let dst = std::slice::from_raw_parts_mut(buf, 2 * amps.len());
        for (pair, a) in dst.chunks_exact_mut(2).zip(amps) {
            pair[0] = a.re;
            pair[1] = a.im;
        }
        Ok(())
    })
}

/// Mean photon number of one mode.
///
/// # Safety
/// `state` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dipne_state_mean_photons(
    state: *const DipneState,
    mode: usize,
    out: *mut f64,
) -> DipneStatus {
    guard(|| write(out, state_ref(state, "state")?.mean_photons(mode)?, "out"))
}

/// Truncation diagnostic: the larger of the recorded leakage and the mass in
/// the guard band below each cutoff.
///
/// # Safety
/// `state` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dipne_state_leakage(
    state: *const DipneState,
    out: *mut f64,
) -> DipneStatus {
    guard(|| {
        write(
            out,
            state_ref(state, "state")?.truncation_diagnostic(),
            "out",
        )
    })
}

/// `|⟨a|b⟩|²` of two states on the same layout.
///
/// # Safety
/// Handles must be live; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dipne_fidelity(
    a: *const DipneState,
    b: *const DipneState,
    out: *mut f64,
) -> DipneStatus {
    guard(|| {
        write(
            out,
            fidelity(state_ref(a, "a")?, state_ref(b, "b")?)?,
            "out",
        )
    })
}

/// Product state `a ⊗ b`, modes of `a` first.
///
/// # Safety
/// Handles must be live; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dipne_tensor(
    a: *const DipneState,
    b: *const DipneState,
    out: *mut *mut DipneState,
) -> DipneStatus {
    guard(|| emit(out, tensor(state_ref(a, "a")?, state_ref(b, "b")?)?))
}

/// Beamsplitter `exp(iθ(a†b + ab†))` on modes `mode_a`, `mode_b`.
///
/// # Safety
/// `state` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dipne_beamsplit(
    state: *const DipneState,
    mode_a: usize,
    mode_b: usize,
    theta: f64,
    out: *mut *mut DipneState,
) -> DipneStatus {
    guard(|| {
        emit(
            out,
            beamsplit(state_ref(state, "state")?, mode_a, mode_b, theta)?,
        )
    })
}

/// Displacement `D(α)` on one mode.
///
/// # Safety
/// `state` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dipne_displace(
    state: *const DipneState,
    mode: usize,
    re: f64,
    im: f64,
    out: *mut *mut DipneState,
) -> DipneStatus {
    guard(|| {
        emit(
            out,
            displace(state_ref(state, "state")?, mode, Complex64::new(re, im))?,
        )
    })
}

/// Squeezing `S(r e^{iθ})` on one mode.
///
/// # Safety
/// `state` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dipne_squeeze(
    state: *const DipneState,
    mode: usize,
    r: f64,
    theta: f64,
    out: *mut *mut DipneState,
) -> DipneStatus {
    guard(|| {
        emit(
            out,
            squeeze_op(state_ref(state, "state")?, mode, Squeeze::new(r, theta)?)?,
        )
    })
}

/// Phase shift `exp(iφ n̂)` on one mode.
///
/// # Safety
/// `state` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dipne_phase_shift(
    state: *const DipneState,
    mode: usize,
    phi: f64,
    out: *mut *mut DipneState,
) -> DipneStatus {
    guard(|| emit(out, phase_shift(state_ref(state, "state")?, mode, phi)?))
}

/// Fit a single-mode state with squeezed cats of relative phase `phi`.
///
/// # Safety
/// `state` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dipne_fit_squeezed_cat(
    state: *const DipneState,
    phi: f64,
    accounting: DipneAccounting,
    out: *mut DipneCatFit,
) -> DipneStatus {
    guard(|| {
        let opts = FitOptions {
            accounting: match accounting {
                DipneAccounting::Component => PhotonAccounting::Component,
                DipneAccounting::State => PhotonAccounting::State,
            },
            ..FitOptions::default()
        };
        let f = fit_squeezed_cat(state_ref(state, "state")?, phi, &opts)?;
        let fit = DipneCatFit {
            fidelity: f.fidelity,
            squeeze_fraction: f.squeeze_fraction,
            alpha: f.alpha,
            r: f.r,
            phi: f.phi,
            plain_cat_fidelity: f.plain_cat_fidelity,
            axis: f.axis,
            squeeze_theta: f.squeeze_theta,
            mean_photons: f.mean_photons,
        };
        write(out, fit, "out")
    })
}

/// Amplitude of `|p, p⟩` after a 50:50 beamsplitter on `|n, m⟩`.
///
/// # Safety
/// `re` and `im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dipne_c_equal(
    n: usize,
    m: usize,
    re: *mut f64,
    im: *mut f64,
) -> DipneStatus {
    guard(|| {
        let c = c_equal(n, m);
        write(re, c.re, "re")?;
        write(im, c.im, "im")
    })
}

/// Closed-form interference loss of the coupling gadget for coherent inputs.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dipne_interference_loss_theory(
    a1_re: f64,
    a1_im: f64,
    a2_re: f64,
    a2_im: f64,
    theta_split: f64,
    theta_interfere: f64,
    pi_shift: bool,
    out: *mut f64,
) -> DipneStatus {
    guard(|| {
        let l = interference_loss_theory(
            Complex64::new(a1_re, a1_im),
            Complex64::new(a2_re, a2_im),
            theta_split,
            theta_interfere,
            pi_shift,
        )?;
        write(out, l, "out")
    })
}

/// Photon-number peak estimate `−k / (2 ln cos θ_sub)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dipne_peak_estimate(
    k: usize,
    theta_sub: f64,
    out: *mut f64,
) -> DipneStatus {
    guard(|| write(out, peak_estimate(k, theta_sub)?, "out"))
}

/// Run a named experiment with `key = value` configuration text (may be
/// null for defaults). On `DIPNE_STATUS_OK` or `DIPNE_STATUS_TOLERANCE_BREACH`
/// `csv` receives the table, to be released with `dipne_string_free`.
///
/// # Safety
/// Strings must be NUL-terminated; `csv` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dipne_run_experiment(
    name: *const c_char,
    config: *const c_char,
    csv: *mut *mut c_char,
) -> DipneStatus {
    if !csv.is_null() {
        csv.write(ptr::null_mut());
    }
    let mut breach = false;
    let status = guard(|| {
        let exp = Experiment::parse(string(name, "name")?)?;
        let cfg = if config.is_null() {
            Config::new()
        } else {
            Config::parse(string(config, "config")?)?
        };
        let output = run(exp, &cfg)?;
        breach = output.tolerance_breach;
        let text = CString::new(output.table.to_csv())
            .map_err(|_| Failure(DipneStatus::Numerical, "CSV contains NUL".into()))?;
        write(csv, text.into_raw(), "csv")
    });
    if status == DipneStatus::Ok && breach {
        set_error("tolerance exceeded");
        return DipneStatus::ToleranceBreach;
    }
    status
}
