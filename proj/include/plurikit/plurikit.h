/* plurikit C API: Lelong mass profiles, slices, orders and verification
 * experiments for positive currents on C^n.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every function returning plk_status leaves a
 * thread-local message retrievable with plk_last_error() on failure. */
#ifndef PLURIKIT_PLURIKIT_H
#define PLURIKIT_PLURIKIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(PLK_BUILDING_LIBRARY)
#define PLK_API __attribute__((visibility("default")))
#else
#define PLK_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum plk_status {
  PLK_OK = 0,
  PLK_CONFIG_ERROR = 1,
  PLK_NUMERIC_FAILURE = 2,
  PLK_DEGENERATE_SLICE = 3,
  PLK_INVALID_ARGUMENT = 4,
  PLK_INTERNAL_ERROR = 5
} plk_status;

typedef struct plk_config plk_config;
typedef struct plk_current plk_current;
typedef struct plk_profile plk_profile;

typedef struct plk_run_options {
  int has_seed;
  uint64_t seed;
  size_t budget;    /* 0: keep the config value */
  size_t frames;    /* 0: keep the config value */
  unsigned threads; /* 0: all hardware threads */
  const char* out_dir;
} plk_run_options;

PLK_API const char* plk_version(void);
PLK_API const char* plk_last_error(void);
PLK_API const char* plk_usage(void);

/* Runs a CLI command; returns the process exit code (0 ok, 1 config error,
 * 2 numeric failure, 3 degenerate-slice saturation). */
PLK_API int plk_run(const char* command, const char* config_path, const plk_run_options* options);

PLK_API plk_status plk_config_load(const char* path, plk_config** out);
PLK_API plk_status plk_config_parse(const char* json_text, plk_config** out);
/* Normalized JSON; the string lives until the config is freed. */
PLK_API const char* plk_config_serialize(plk_config* config);
PLK_API int plk_config_equal(const plk_config* a, const plk_config* b);
PLK_API void plk_config_free(plk_config* config);

PLK_API plk_status plk_config_current(const plk_config* config, plk_current** out);
/* `current` block of the config schema, on C^ambient_dim. */
PLK_API plk_status plk_current_from_json(const char* json_text, int ambient_dim, plk_current** out);
PLK_API int plk_current_dim(const plk_current* current);
PLK_API int plk_current_bidegree(const plk_current* current);
PLK_API void plk_current_free(plk_current* current);

PLK_API plk_status plk_nu_profile(const plk_current* current, double r_min, double r_max, size_t points,
                                  size_t budget, uint64_t seed, plk_profile** out);
/* frame: n x q complex matrix, column-major, interleaved (re, im). */
PLK_API plk_status plk_slice_profile(const plk_current* current, const double* frame, int q, double r_min,
                                     double r_max, size_t points, size_t budget, uint64_t seed,
                                     plk_profile** out);
PLK_API size_t plk_profile_size(const plk_profile* profile);
PLK_API plk_status plk_profile_point(const plk_profile* profile, size_t index, double* r, double* value,
                                     double* std_error);
PLK_API const char* plk_profile_method(const plk_profile* profile);
/* CSV text (r,value,stderr,method); valid until the profile is freed. */
PLK_API const char* plk_profile_csv(plk_profile* profile);
PLK_API void plk_profile_free(plk_profile* profile);

/* empty is set to 1 for an identically zero profile (order undefined). */
PLK_API plk_status plk_estimate_order(const plk_profile* profile, double* rho, double* std_error, int* empty);
PLK_API plk_status plk_is_algebraic(const plk_profile* profile, double flatness_tol, int* algebraic);

/* Zeros of c_0 + c_1 w + ... + c_d w^d in |w| < r; coefficients
 * interleaved (re, im), d + 1 entries. */
PLK_API plk_status plk_count_zeros_polynomial(const double* coefficients, size_t degree, double r, int* count);

/* chi(r) and chi'(r) built from the constant proximate order rho0. */
PLK_API plk_status plk_chi(double rho0, double r, double* chi, double* derivative);
PLK_API plk_status plk_check_chi(double rho0, int* passed, double* final_gap, double* final_drift);

#ifdef __cplusplus
}
#endif

#endif
