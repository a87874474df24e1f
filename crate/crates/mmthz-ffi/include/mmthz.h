#ifndef MMTHZ_H
#define MMTHZ_H

/* Generated by cbindgen from the mmthz-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible call.
typedef enum MmthzStatus {
  MMTHZ_STATUS_OK = 0,
  MMTHZ_STATUS_NULL_ARGUMENT = 1,
  MMTHZ_STATUS_INVALID_UTF8 = 2,
  MMTHZ_STATUS_DOMAIN_ERROR = 3,
  MMTHZ_STATUS_EXTRAPOLATION_ERROR = 4,
  MMTHZ_STATUS_UNSUPPORTED_REGIME = 5,
  MMTHZ_STATUS_CONFIG_ERROR = 6,
  MMTHZ_STATUS_NUMERICAL_ERROR = 7,
  MMTHZ_STATUS_UNSUPPORTED = 8,
  MMTHZ_STATUS_IO_ERROR = 9,
} MmthzStatus;

// Opaque LOS/blockage model handle.
typedef struct MmthzLosModel MmthzLosModel;

// Opaque band-registry handle.
typedef struct MmthzRegistry MmthzRegistry;

// Opaque molecular-absorption spectrum handle.
typedef struct MmthzSpectrum MmthzSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copy the current thread's last error message into `buffer` (truncated,
// always NUL-terminated). Returns the full message length in bytes.
//
// # Safety
// `buffer` must point to `capacity` writable bytes, or be NULL (in which
// case only the length is returned).
size_t mmthz_last_error_message(char *buffer, size_t capacity);

// Release a string allocated by this library. NULL is a no-op.
//
// # Safety
// `s` must be a pointer previously returned by an `mmthz_*` call that
// documents string ownership, not yet freed.
void mmthz_string_free(char *s);

// Speed of light in vacuum (m/s).
double mmthz_speed_of_light(void);

// `10^(db/10)`.
enum MmthzStatus mmthz_db_to_linear(double db, double *out_linear);

// `10 log10(linear)`.
enum MmthzStatus mmthz_linear_to_db(double linear, double *out_db);

// Free-space wavelength `c / f` in meters.
enum MmthzStatus mmthz_wavelength_m(double freq_hz, double *out_m);

// Doppler spread `f v / c` in Hz.
enum MmthzStatus mmthz_doppler_spread_hz(double freq_hz, double speed_m_s, double *out_hz);

// Free-space path loss `(lambda / 4 pi r)^2` as a linear gain.
enum MmthzStatus mmthz_fspl(double freq_hz, double dist_m, double *out_linear);

// The built-in sparse absorption spectrum. Never NULL. Free with
// [`mmthz_spectrum_free`].
struct MmthzSpectrum *mmthz_spectrum_default(void);

// Load the `[absorption]` section of a propagation-tables TOML file.
// Returns NULL on failure (see [`mmthz_last_error_message`]).
//
// # Safety
// `path` must be a NUL-terminated string.
struct MmthzSpectrum *mmthz_spectrum_load(const char *path);

// # Safety
// `spectrum` must come from a spectrum constructor, not yet freed.
void mmthz_spectrum_free(struct MmthzSpectrum *spectrum);

// Specific attenuation in dB/km at `freq_hz`.
//
// # Safety
// `spectrum` must be a live spectrum handle.
enum MmthzStatus mmthz_specific_attenuation(const struct MmthzSpectrum *spectrum,
                                            double freq_hz,
                                            double *out_db_per_km);

// Beer-Lambert transmittance over `dist_m` meters at `freq_hz`.
//
// # Safety
// `spectrum` must be a live spectrum handle.
enum MmthzStatus mmthz_transmittance(const struct MmthzSpectrum *spectrum,
                                     double dist_m,
                                     double freq_hz,
                                     double *out_linear);

// THz LOS received power `P_t l(r) g_t g_r tau(r)` in the same unit as
// `pt`.
//
// # Safety
// `spectrum` must be a live spectrum handle.
enum MmthzStatus mmthz_thz_rx_power_los(const struct MmthzSpectrum *spectrum,
                                        double pt,
                                        double freq_hz,
                                        double dist_m,
                                        double g_t,
                                        double g_r,
                                        double *out_power);

// Urban macro/micro empirical LOS model. Returns NULL on invalid
// parameters.
struct MmthzLosModel *mmthz_los_uma_umi(double d1_m, double d2_m);

// Squared (NYU-style) LOS model.
struct MmthzLosModel *mmthz_los_nyu_squared(double d1_m, double d2_m);

// Boolean rectangle-field LOS model.
struct MmthzLosModel *mmthz_los_boolean_rect(double density_per_m2,
                                             double mean_length_m,
                                             double mean_width_m);

// LOS-ball model.
struct MmthzLosModel *mmthz_los_ball(double radius_m);

// Human-body field model. `as_written` selects the published expression;
// false selects its complement (the void probability).
struct MmthzLosModel *mmthz_los_human_field(double density_per_m2,
                                            double body_radius_m,
                                            bool as_written);

// Self-blockage cone model.
struct MmthzLosModel *mmthz_los_self_block_cone(double cone_angle_rad);

// # Safety
// `model` must come from an `mmthz_los_*` constructor, not yet freed.
void mmthz_los_model_free(struct MmthzLosModel *model);

// LOS probability of a link of length `dist_m`.
//
// # Safety
// `model` must be a live LOS-model handle.
enum MmthzStatus mmthz_p_los(const struct MmthzLosModel *model,
                             double dist_m,
                             double *out_probability);

// The built-in band registry. Never NULL. Free with
// [`mmthz_registry_free`].
struct MmthzRegistry *mmthz_registry_default(void);

// Load a band-registry TOML file. Returns NULL on failure.
//
// # Safety
// `path` must be a NUL-terminated string.
struct MmthzRegistry *mmthz_registry_load(const char *path);

// # Safety
// `registry` must come from a registry constructor, not yet freed.
void mmthz_registry_free(struct MmthzRegistry *registry);

// Bands containing `freq_hz`, as a JSON array string. The caller owns the
// string and must release it with [`mmthz_string_free`].
//
// # Safety
// `registry` must be a live registry handle; `out_json` must be writable.
enum MmthzStatus mmthz_registry_lookup_json(const struct MmthzRegistry *registry,
                                            double freq_hz,
                                            char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MMTHZ_H */
