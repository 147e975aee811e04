#ifndef CONFLUENT_SUSY_H
#define CONFLUENT_SUSY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Sampled curves of a transformation, all on the grid returned as `SUSY_CURVE_X`.
typedef enum SusyCurve {
  SUSY_CURVE_X = 0,
  SUSY_CURVE_U0 = 1,
  SUSY_CURVE_U1 = 2,
  SUSY_CURVE_WRONSKIAN = 3,
  SUSY_CURVE_Q0 = 4,
  SUSY_CURVE_Q1 = 5,
} SusyCurve;

// Status codes; 1 to 4 coincide with the exit codes of the `susy` binary.
typedef enum SusyStatus {
  SUSY_STATUS_OK = 0,
  SUSY_STATUS_OTHER = 1,
  SUSY_STATUS_CONFIG = 2,
  SUSY_STATUS_REGULARITY = 3,
  SUSY_STATUS_INVARIANT = 4,
  SUSY_STATUS_NULL_POINTER = 5,
  SUSY_STATUS_INVALID_UTF8 = 6,
  SUSY_STATUS_BUFFER_TOO_SMALL = 7,
  SUSY_STATUS_UNAVAILABLE = 8,
  SUSY_STATUS_PANIC = 9,
} SusyStatus;

// Opaque validated run configuration.
typedef struct SusyConfig SusyConfig;

// Opaque result of a transformation.
typedef struct SusyTransform SusyTransform;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *susy_last_error(void);

// Writes a handle to the default configuration into `out`.
//
// # Safety
// `out` must be null or valid for writes.
enum SusyStatus susy_config_default(struct SusyConfig **out);

// Parses a JSON configuration (the `--config` file format of `susy`).
//
// # Safety
// `json` must be null or a NUL-terminated string; `out` null or valid for writes.
enum SusyStatus susy_config_from_json(const char *json, struct SusyConfig **out);

// Serializes the configuration, defaults filled in, as JSON. Free the string
// with [`susy_string_free`].
//
// # Safety
// `cfg` must be null or a live handle; `out` null or valid for writes.
enum SusyStatus susy_config_to_json(const struct SusyConfig *cfg, char **out);

// # Safety
// `cfg` must be null or a handle not yet freed.
void susy_config_free(struct SusyConfig *cfg);

// Bound-state energies `ε_n` of the untransformed system in the configured
// window, ascending. The count goes to `len`; a null `buf` only queries it,
// and a short one fails with `SUSY_STATUS_BUFFER_TOO_SMALL`.
//
// # Safety
// `cfg` must be null or a live handle; `buf` null or valid for `cap` writes;
// `len` null or valid for writes.
enum SusyStatus susy_spectrum(const struct SusyConfig *cfg, double *buf, size_t cap, size_t *len);

// Runs the configured transformation. A singular transformation fails with
// `SUSY_STATUS_REGULARITY` unless the configuration allows it.
//
// # Safety
// `cfg` must be null or a live handle; `out` null or valid for writes.
enum SusyStatus susy_transform(const struct SusyConfig *cfg, struct SusyTransform **out);

// # Safety
// `t` must be a live handle.
double susy_transform_lambda(const struct SusyTransform *t);

// # Safety
// `t` must be a live handle.
bool susy_transform_is_regular(const struct SusyTransform *t);

// Copies one curve out of a transformation, with the buffer protocol of
// [`susy_spectrum`]. `SUSY_CURVE_Q1` is unavailable for singular
// transformations.
//
// # Safety
// `t` must be null or a live handle; `buf` null or valid for `cap` writes;
// `len` null or valid for writes.
enum SusyStatus susy_transform_curve(const struct SusyTransform *t,
                                     enum SusyCurve curve,
                                     double *buf,
                                     size_t cap,
                                     size_t *len);

// # Safety
// `t` must be null or a handle not yet freed.
void susy_transform_free(struct SusyTransform *t);

// Runs the invariant checks. The JSON report goes to `report` (free it with
// [`susy_string_free`]) whenever the checks ran, including when they fail
// with `SUSY_STATUS_REGULARITY` or `SUSY_STATUS_INVARIANT`.
//
// # Safety
// `cfg` must be null or a live handle; `report` null or valid for writes.
enum SusyStatus susy_verify(const struct SusyConfig *cfg, char **report);

// # Safety
// `s` must be null or a string returned by this library and not yet freed.
void susy_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONFLUENT_SUSY_H */
