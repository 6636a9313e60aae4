#ifndef SPREADLAB_H
#define SPREADLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of a call.
typedef enum SlStatus {
  SL_STATUS_OK = 0,
  SL_STATUS_NULL_POINTER = 1,
  SL_STATUS_INVALID_ARGUMENT = 2,
  SL_STATUS_INVALID_CONFIG = 3,
  SL_STATUS_DEGENERATE = 4,
  SL_STATUS_NO_ROOT = 5,
  SL_STATUS_NOT_A_PARTITION = 6,
  SL_STATUS_NOT_MEMBER = 7,
  SL_STATUS_NOT_O2_ADMISSIBLE = 8,
  SL_STATUS_NOT_ACENTRIC = 9,
  SL_STATUS_PANIC = 10,
} SlStatus;

// A parallelism in canonical coordinates.
typedef struct SlParallelism SlParallelism;

// A hyperbola-family profile.
typedef struct SlProfile SlProfile;

// A rotational spread.
typedef struct SlSpread SlSpread;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, a static string.
const char *sl_version(void);

// Message describing the last call on this thread if it failed, else NULL.
// Valid until the next call on the same thread.
const char *sl_last_error_message(void);

// Releases a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not be freed twice.
void sl_string_free(char *s);

// Parses a profile object such as `{"kind": "satz2", "d": 1.0}`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` writable.
enum SlStatus sl_profile_from_json(const char *json, struct SlProfile **out);

// # Safety
// `p` must come from `sl_profile_from_json` or be NULL.
void sl_profile_free(struct SlProfile *p);

// Asymptote slope `a(r)` and vertex height `b(r)`.
//
// # Safety
// `p` valid; `out_a`, `out_b` writable.
enum SlStatus sl_profile_eval(const struct SlProfile *p, double r, double *out_a, double *out_b);

// Distance from the origin to the hyperbola of radius `r`.
//
// # Safety
// `p` valid; `out` writable.
enum SlStatus sl_profile_d_of_r(const struct SlProfile *p, double r, double *out);

// Inverse of `sl_profile_d_of_r`.
//
// # Safety
// `p` valid; `out` writable.
enum SlStatus sl_profile_r_of_d(const struct SlProfile *p, double d, double *out);

// Spread of `profile` under `z ↦ s z + t`; `handedness` is 1 or -1.
//
// # Safety
// `profile` valid; `out` writable.
enum SlStatus sl_spread_new(const struct SlProfile *profile,
                            int handedness_sign,
                            double s,
                            double t,
                            struct SlSpread **out);

// # Safety
// `s` must come from `sl_spread_new` or be NULL.
void sl_spread_free(struct SlSpread *s);

// The oriented spread line through a homogeneous point.
//
// # Safety
// `s` valid; `point` holds 4 doubles; `out_line` has room for 6.
enum SlStatus sl_spread_containing_line(const struct SlSpread *s,
                                        const double *point,
                                        double *out_line);

// The regulus line at radius `r` and angle `phi`.
//
// # Safety
// `s` valid; `out_line` has room for 6 doubles.
enum SlStatus sl_spread_regulus_line(const struct SlSpread *s,
                                     double r,
                                     double phi,
                                     double *out_line);

// Parallelism from a configuration in the CLI schema (or a bare profile).
//
// # Safety
// `json` NUL-terminated; `out` writable.
enum SlStatus sl_parallelism_from_json(const char *json, struct SlParallelism **out);

// # Safety
// `p` must come from `sl_parallelism_from_json` or be NULL.
void sl_parallelism_free(struct SlParallelism *p);

// Class axis of a line and the residual of the reconstructed member. An
// unoriented parallelism whose classes do not partition the lines returns
// `NotAPartition`.
//
// # Safety
// `p` valid; `line` holds 6 doubles; `out_axis` room for 3; `out_residual`
// writable or NULL.
enum SlStatus sl_parallelism_classify(const struct SlParallelism *p,
                                      const double *line,
                                      double *out_axis,
                                      double *out_residual);

// Oriented join of two homogeneous points.
//
// # Safety
// `x`, `y` hold 4 doubles; `out_line` room for 6.
enum SlStatus sl_join(const double *x, const double *y, double *out_line);

// Bilinear meet form; zero iff the lines meet.
//
// # Safety
// `a`, `b` hold 6 doubles; `out` writable.
enum SlStatus sl_meet_pairing(const double *a, const double *b, double *out);

// Left and right Study labels of an oriented line, as unit 3-vectors.
//
// # Safety
// `line` holds 6 doubles; `out_left`, `out_right` room for 3.
enum SlStatus sl_study_map(const double *line, double *out_left, double *out_right);

// Runs the command named in a configuration (the CLI `run` schema) and
// returns its JSON or CSV output in `out_text`, to be released with
// `sl_string_free`. `out_pass` receives 1 if every check passed, else 0.
//
// # Safety
// `config_json` NUL-terminated; `out_text` and `out_pass` writable.
enum SlStatus sl_run(const char *config_json, char **out_text, int *out_pass);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPREADLAB_H */
