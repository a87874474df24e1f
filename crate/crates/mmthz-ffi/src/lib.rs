//! C ABI for the mmthz propagation toolkit.
//!
//! Conventions:
//!
//! - Every fallible call returns an [`MmthzStatus`]; results come back
//!   through `out` pointers that are written only on `MMTHZ_STATUS_OK`.
//! - Heap objects (spectra, registries, LOS models) are opaque handles
//!   created by `*_new`/`*_load` constructors and released by their
//!   matching `*_free`. Passing NULL to a `*_free` is a no-op.
//! - Strings returned by the library are NUL-terminated UTF-8, owned by
//!   the library, and must be released with [`mmthz_string_free`].
//! - The last error message of the current thread is available via
//!   [`mmthz_last_error_message`].
//!
//! The generated header is written to `include/mmthz.h` at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;

use mmthz::atmosphere::AbsorptionSpectrum;
use mmthz::blockage::{HumanFieldForm, LosModel};
use mmthz::channel;
use mmthz::quantity::Frequency;
use mmthz::registry::Registry;
use mmthz::Error;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmthzStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    DomainError = 3,
    ExtrapolationError = 4,
    UnsupportedRegime = 5,
    ConfigError = 6,
    NumericalError = 7,
    Unsupported = 8,
    IoError = 9,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> MmthzStatus {
    match err {
        Error::Domain(_) => MmthzStatus::DomainError,
        Error::Extrapolation(_) => MmthzStatus::ExtrapolationError,
        Error::UnsupportedRegime(_) => MmthzStatus::UnsupportedRegime,
        Error::Config(_) => MmthzStatus::ConfigError,
        Error::Numerical(_) => MmthzStatus::NumericalError,
        Error::Unsupported(_) => MmthzStatus::Unsupported,
        Error::Io(_) => MmthzStatus::IoError,
    }
}

fn fail(err: Error) -> MmthzStatus {
    set_last_error(&err.to_string());
    status_of(&err)
}

/// Copy the current thread's last error message into `buffer` (truncated,
/// always NUL-terminated). Returns the full message length in bytes.
///
/// # Safety
/// `buffer` must point to `capacity` writable bytes, or be NULL (in which
/// case only the length is returned).
#[no_mangle]
pub unsafe extern "C" fn mmthz_last_error_message(
    buffer: *mut c_char,
    capacity: usize,
) -> usize {
    LAST_ERROR.with(|slot| {
        let message = slot.borrow();
        let bytes = message.as_bytes();
        if !buffer.is_null() && capacity > 0 {
            let n = bytes.len().min(capacity - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buffer, n);
            *buffer.add(n) = 0;
        }
        bytes.len()
    })
}

/// Release a string allocated by this library. NULL is a no-op.
///
/// # Safety
/// `s` must be a pointer previously returned by an `mmthz_*` call that
/// documents string ownership, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mmthz_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn path_from_c<'a>(path: *const c_char) -> Result<&'a Path, MmthzStatus> {
    if path.is_null() {
        set_last_error("path is NULL");
        return Err(MmthzStatus::NullArgument);
    }
    match CStr::from_ptr(path).to_str() {
        Ok(s) => Ok(Path::new(s)),
        Err(_) => {
            set_last_error("path is not valid UTF-8");
            Err(MmthzStatus::InvalidUtf8)
        }
    }
}

fn write_out(out: *mut f64, value: f64) -> MmthzStatus {
    if out.is_null() {
        set_last_error("out pointer is NULL");
        return MmthzStatus::NullArgument;
    }
    unsafe { *out = value };
    MmthzStatus::Ok
}

/// Speed of light in vacuum (m/s).
#[no_mangle]
pub extern "C" fn mmthz_speed_of_light() -> f64 {
    mmthz::SPEED_OF_LIGHT
}

/// `10^(db/10)`.
#[no_mangle]
pub extern "C" fn mmthz_db_to_linear(db: f64, out_linear: *mut f64) -> MmthzStatus {
    match mmthz::quantity::db_to_linear(db) {
        Ok(v) => write_out(out_linear, v.linear()),
        Err(e) => fail(e),
    }
}

/// `10 log10(linear)`.
#[no_mangle]
pub extern "C" fn mmthz_linear_to_db(linear: f64, out_db: *mut f64) -> MmthzStatus {
    match mmthz::quantity::linear_to_db(linear) {
        Ok(v) => write_out(out_db, v),
        Err(e) => fail(e),
    }
}

/// Free-space wavelength `c / f` in meters.
#[no_mangle]
pub extern "C" fn mmthz_wavelength_m(freq_hz: f64, out_m: *mut f64) -> MmthzStatus {
    match Frequency::from_hz(freq_hz) {
        Ok(f) => write_out(out_m, f.wavelength_m()),
        Err(e) => fail(e),
    }
}

/// Doppler spread `f v / c` in Hz.
#[no_mangle]
pub extern "C" fn mmthz_doppler_spread_hz(
    freq_hz: f64,
    speed_m_s: f64,
    out_hz: *mut f64,
) -> MmthzStatus {
    let f = match Frequency::from_hz(freq_hz) {
        Ok(f) => f,
        Err(e) => return fail(e),
    };
    match channel::doppler_spread(f, speed_m_s) {
        Ok(v) => write_out(out_hz, v),
        Err(e) => fail(e),
    }
}

/// Free-space path loss `(lambda / 4 pi r)^2` as a linear gain.
#[no_mangle]
pub extern "C" fn mmthz_fspl(freq_hz: f64, dist_m: f64, out_linear: *mut f64) -> MmthzStatus {
    let f = match Frequency::from_hz(freq_hz) {
        Ok(f) => f,
        Err(e) => return fail(e),
    };
    match channel::fspl(f, dist_m) {
        Ok(v) => write_out(out_linear, v.linear()),
        Err(e) => fail(e),
    }
}

/// Opaque molecular-absorption spectrum handle.
pub struct MmthzSpectrum(AbsorptionSpectrum);

/// The built-in sparse absorption spectrum. Never NULL. Free with
/// [`mmthz_spectrum_free`].
#[no_mangle]
pub extern "C" fn mmthz_spectrum_default() -> *mut MmthzSpectrum {
    Box::into_raw(Box::new(MmthzSpectrum(AbsorptionSpectrum::builtin())))
}

/// Load the `[absorption]` section of a propagation-tables TOML file.
/// Returns NULL on failure (see [`mmthz_last_error_message`]).
///
/// # Safety
/// `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn mmthz_spectrum_load(path: *const c_char) -> *mut MmthzSpectrum {
    let path = match path_from_c(path) {
        Ok(p) => p,
        Err(_) => return std::ptr::null_mut(),
    };
    match mmthz::atmosphere::TableSet::load(path) {
        Ok(set) => match set.absorption {
            Some(spectrum) => Box::into_raw(Box::new(MmthzSpectrum(spectrum))),
            None => {
                set_last_error("table file lacks an [absorption] section");
                std::ptr::null_mut()
            }
        },
        Err(e) => {
            set_last_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// # Safety
/// `spectrum` must come from a spectrum constructor, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mmthz_spectrum_free(spectrum: *mut MmthzSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}

/// Specific attenuation in dB/km at `freq_hz`.
///
/// # Safety
/// `spectrum` must be a live spectrum handle.
#[no_mangle]
pub unsafe extern "C" fn mmthz_specific_attenuation(
    spectrum: *const MmthzSpectrum,
    freq_hz: f64,
    out_db_per_km: *mut f64,
) -> MmthzStatus {
    let Some(spectrum) = spectrum.as_ref() else {
        set_last_error("spectrum is NULL");
        return MmthzStatus::NullArgument;
    };
    let f = match Frequency::from_hz(freq_hz) {
        Ok(f) => f,
        Err(e) => return fail(e),
    };
    match spectrum.0.specific_attenuation_db_per_km(f) {
        Ok(v) => write_out(out_db_per_km, v),
        Err(e) => fail(e),
    }
}

/// Beer-Lambert transmittance over `dist_m` meters at `freq_hz`.
///
/// # Safety
/// `spectrum` must be a live spectrum handle.
#[no_mangle]
pub unsafe extern "C" fn mmthz_transmittance(
    spectrum: *const MmthzSpectrum,
    dist_m: f64,
    freq_hz: f64,
    out_linear: *mut f64,
) -> MmthzStatus {
    let Some(spectrum) = spectrum.as_ref() else {
        set_last_error("spectrum is NULL");
        return MmthzStatus::NullArgument;
    };
    let f = match Frequency::from_hz(freq_hz) {
        Ok(f) => f,
        Err(e) => return fail(e),
    };
    match mmthz::atmosphere::transmittance(dist_m, f, &spectrum.0) {
        Ok(v) => write_out(out_linear, v.linear()),
        Err(e) => fail(e),
    }
}

/// THz LOS received power `P_t l(r) g_t g_r tau(r)` in the same unit as
/// `pt`.
///
/// # Safety
/// `spectrum` must be a live spectrum handle.
#[no_mangle]
pub unsafe extern "C" fn mmthz_thz_rx_power_los(
    spectrum: *const MmthzSpectrum,
    pt: f64,
    freq_hz: f64,
    dist_m: f64,
    g_t: f64,
    g_r: f64,
    out_power: *mut f64,
) -> MmthzStatus {
    let Some(spectrum) = spectrum.as_ref() else {
        set_last_error("spectrum is NULL");
        return MmthzStatus::NullArgument;
    };
    let f = match Frequency::from_hz(freq_hz) {
        Ok(f) => f,
        Err(e) => return fail(e),
    };
    let p_t = match mmthz::PowerRatio::from_linear(pt) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    match channel::thz_rx_power_los(p_t, f, dist_m, g_t, g_r, &spectrum.0) {
        Ok(v) => write_out(out_power, v.linear()),
        Err(e) => fail(e),
    }
}

/// Opaque LOS/blockage model handle.
pub struct MmthzLosModel(LosModel);

fn model_handle(model: LosModel) -> *mut MmthzLosModel {
    match model.validate() {
        Ok(()) => Box::into_raw(Box::new(MmthzLosModel(model))),
        Err(e) => {
            set_last_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// Urban macro/micro empirical LOS model. Returns NULL on invalid
/// parameters.
#[no_mangle]
pub extern "C" fn mmthz_los_uma_umi(d1_m: f64, d2_m: f64) -> *mut MmthzLosModel {
    model_handle(LosModel::UmaUmi { d1_m, d2_m })
}

/// Squared (NYU-style) LOS model.
#[no_mangle]
pub extern "C" fn mmthz_los_nyu_squared(d1_m: f64, d2_m: f64) -> *mut MmthzLosModel {
    model_handle(LosModel::NyuSquared { d1_m, d2_m })
}

/// Boolean rectangle-field LOS model.
#[no_mangle]
pub extern "C" fn mmthz_los_boolean_rect(
    density_per_m2: f64,
    mean_length_m: f64,
    mean_width_m: f64,
) -> *mut MmthzLosModel {
    model_handle(LosModel::BooleanRect {
        density_per_m2,
        mean_length_m,
        mean_width_m,
    })
}

/// LOS-ball model.
#[no_mangle]
pub extern "C" fn mmthz_los_ball(radius_m: f64) -> *mut MmthzLosModel {
    model_handle(LosModel::LosBall { radius_m })
}

/// Human-body field model. `as_written` selects the published expression;
/// false selects its complement (the void probability).
#[no_mangle]
pub extern "C" fn mmthz_los_human_field(
    density_per_m2: f64,
    body_radius_m: f64,
    as_written: bool,
) -> *mut MmthzLosModel {
    model_handle(LosModel::HumanField {
        density_per_m2,
        body_radius_m,
        form: if as_written {
            HumanFieldForm::AsWritten
        } else {
            HumanFieldForm::VoidProbability
        },
    })
}

/// Self-blockage cone model.
#[no_mangle]
pub extern "C" fn mmthz_los_self_block_cone(cone_angle_rad: f64) -> *mut MmthzLosModel {
    model_handle(LosModel::SelfBlockCone { cone_angle_rad })
}

/// # Safety
/// `model` must come from an `mmthz_los_*` constructor, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mmthz_los_model_free(model: *mut MmthzLosModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// LOS probability of a link of length `dist_m`.
///
/// # Safety
/// `model` must be a live LOS-model handle.
#[no_mangle]
pub unsafe extern "C" fn mmthz_p_los(
    model: *const MmthzLosModel,
    dist_m: f64,
    out_probability: *mut f64,
) -> MmthzStatus {
    let Some(model) = model.as_ref() else {
        set_last_error("model is NULL");
        return MmthzStatus::NullArgument;
    };
    match mmthz::blockage::p_los(&model.0, dist_m) {
        Ok(p) => write_out(out_probability, p.value()),
        Err(e) => fail(e),
    }
}

/// Opaque band-registry handle.
pub struct MmthzRegistry(Registry);

/// The built-in band registry. Never NULL. Free with
/// [`mmthz_registry_free`].
#[no_mangle]
pub extern "C" fn mmthz_registry_default() -> *mut MmthzRegistry {
    Box::into_raw(Box::new(MmthzRegistry(Registry::builtin())))
}

/// Load a band-registry TOML file. Returns NULL on failure.
///
/// # Safety
/// `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn mmthz_registry_load(path: *const c_char) -> *mut MmthzRegistry {
    let path = match path_from_c(path) {
        Ok(p) => p,
        Err(_) => return std::ptr::null_mut(),
    };
    match Registry::load(path) {
        Ok(reg) => Box::into_raw(Box::new(MmthzRegistry(reg))),
        Err(e) => {
            set_last_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// # Safety
/// `registry` must come from a registry constructor, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mmthz_registry_free(registry: *mut MmthzRegistry) {
    if !registry.is_null() {
        drop(Box::from_raw(registry));
    }
}

/// Bands containing `freq_hz`, as a JSON array string. The caller owns the
/// string and must release it with [`mmthz_string_free`].
///
/// # Safety
/// `registry` must be a live registry handle; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mmthz_registry_lookup_json(
    registry: *const MmthzRegistry,
    freq_hz: f64,
    out_json: *mut *mut c_char,
) -> MmthzStatus {
    let Some(registry) = registry.as_ref() else {
        set_last_error("registry is NULL");
        return MmthzStatus::NullArgument;
    };
    if out_json.is_null() {
        set_last_error("out_json is NULL");
        return MmthzStatus::NullArgument;
    }
    let f = match Frequency::from_hz(freq_hz) {
        Ok(f) => f,
        Err(e) => return fail(e),
    };
    let bands = registry.0.lookup(f);
    let json = match serde_json::to_string(&bands) {
        Ok(j) => j,
        Err(e) => {
            set_last_error(&e.to_string());
            return MmthzStatus::NumericalError;
        }
    };
    match CString::new(json) {
        Ok(s) => {
            *out_json = s.into_raw();
            MmthzStatus::Ok
        }
        Err(_) => {
            set_last_error("band JSON contained an interior NUL");
            MmthzStatus::NumericalError
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_helpers_round_trip() {
        let mut v = 0.0;
        assert_eq!(mmthz_db_to_linear(10.0, &mut v), MmthzStatus::Ok);
        assert_eq!(v, 10.0);
        assert_eq!(mmthz_db_to_linear(f64::NAN, &mut v), MmthzStatus::DomainError);
        let mut lambda = 0.0;
        assert_eq!(mmthz_wavelength_m(mmthz_speed_of_light(), &mut lambda), MmthzStatus::Ok);
        assert_eq!(lambda, 1.0);
        assert_eq!(
            mmthz_db_to_linear(0.0, std::ptr::null_mut()),
            MmthzStatus::NullArgument
        );
    }

    #[test]
    fn spectrum_handle_life_cycle() {
        let spectrum = mmthz_spectrum_default();
        assert!(!spectrum.is_null());
        let mut tau = 0.0;
        let status = unsafe { mmthz_transmittance(spectrum, 1000.0, 60e9, &mut tau) };
        assert_eq!(status, MmthzStatus::Ok);
        assert!((10.0 * tau.log10() + 15.0).abs() < 1e-9);
        let status = unsafe { mmthz_transmittance(spectrum, 10.0, 5e9, &mut tau) };
        assert_eq!(status, MmthzStatus::ExtrapolationError);
        unsafe { mmthz_spectrum_free(spectrum) };
    }

    #[test]
    fn last_error_is_reported() {
        let spectrum = mmthz_spectrum_default();
        let mut tau = 0.0;
        unsafe { mmthz_transmittance(spectrum, -5.0, 60e9, &mut tau) };
        let mut buf = vec![0i8; 256];
        let len = unsafe { mmthz_last_error_message(buf.as_mut_ptr(), buf.len()) };
        assert!(len > 0);
        let msg = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap();
        assert!(msg.contains("nonnegative"), "unexpected message {msg:?}");
        unsafe { mmthz_spectrum_free(spectrum) };
    }

    #[test]
    fn los_model_handles() {
        let model = mmthz_los_uma_umi(18.0, 63.0);
        assert!(!model.is_null());
        let mut p = 0.0;
        assert_eq!(unsafe { mmthz_p_los(model, 10.0, &mut p) }, MmthzStatus::Ok);
        assert_eq!(p, 1.0);
        unsafe { mmthz_los_model_free(model) };
        // Invalid parameters surface as NULL.
        assert!(mmthz_los_uma_umi(-1.0, 63.0).is_null());
    }

    #[test]
    fn registry_lookup_json() {
        let registry = mmthz_registry_default();
        let mut json: *mut c_char = std::ptr::null_mut();
        let status = unsafe { mmthz_registry_lookup_json(registry, 60.5e9, &mut json) };
        assert_eq!(status, MmthzStatus::Ok);
        let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_string();
        assert!(text.contains("60 GHz lower band"));
        unsafe { mmthz_string_free(json) };
        unsafe { mmthz_registry_free(registry) };
    }
}
