/*
 * C interface to the spfim library: simultaneous-perturbation Monte Carlo
 * estimation of Fisher information matrices.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every call returns an spfim_status; on failure
 * spfim_last_error() describes the problem (per thread).
 *
 * Matrices cross the boundary as dense row-major p x p arrays.
 */
#ifndef SPFIM_SPFIM_H
#define SPFIM_SPFIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(SPFIM_BUILDING_LIBRARY)
#define SPFIM_API __attribute__((visibility("default")))
#else
#define SPFIM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum spfim_status {
  SPFIM_OK = 0,
  SPFIM_ERR_NULL_ARGUMENT = 1,
  SPFIM_ERR_CONFIG = 2,
  SPFIM_ERR_DIMENSION = 3,
  SPFIM_ERR_VALIDATION = 4,
  SPFIM_ERR_NOT_POSITIVE_DEFINITE = 5,
  SPFIM_ERR_ORACLE = 6,
  SPFIM_ERR_REPLICATE = 7,
  SPFIM_ERR_IO = 8,
  SPFIM_ERR_BUFFER_TOO_SMALL = 9,
  SPFIM_ERR_INTERNAL = 10
} spfim_status;

typedef enum spfim_method {
  SPFIM_METHOD_STANDARD = 0,
  SPFIM_METHOD_INDEPENDENT = 1
} spfim_method;

typedef enum spfim_format { SPFIM_FORMAT_CSV = 0, SPFIM_FORMAT_JSON = 1 } spfim_format;

typedef struct spfim_model spfim_model;
typedef struct spfim_experiment spfim_experiment;
typedef struct spfim_report spfim_report;

/* Estimator settings; perturbations are Bernoulli +/-1. */
typedef struct spfim_estimator_config {
  spfim_method method;
  size_t inner_m;
  size_t outer_n;
  double c;
  uint64_t seed;
  size_t workers; /* 0 = default */
} spfim_estimator_config;

SPFIM_API const char* spfim_version(void);
SPFIM_API const char* spfim_last_error(void);
SPFIM_API const char* spfim_status_string(spfim_status status);

/* ---- models ---------------------------------------------------------- */

/* Signal-plus-noise normal model with noise P_i = sqrt(i) U^T U (U seeded).
 * sigma_packed holds the upper triangle of Sigma row-major. */
SPFIM_API spfim_status spfim_model_spn(const double* mu, size_t d, const double* sigma_packed,
                                       size_t n, uint64_t noise_seed, spfim_model** out);
/* theta = [lambda, mu1, var1, mu2, var2]. */
SPFIM_API spfim_status spfim_model_mixture(const double* theta, size_t n, spfim_model** out);
SPFIM_API spfim_status spfim_model_quadratic(const double* a_packed, size_t p, size_t n,
                                             spfim_model** out);
SPFIM_API void spfim_model_free(spfim_model* model);

SPFIM_API spfim_status spfim_model_parameter_dim(const spfim_model* model, size_t* p);
SPFIM_API spfim_status spfim_model_nominal_theta(const spfim_model* model, double* theta,
                                                 size_t len);

/* ---- estimation ------------------------------------------------------ */

/* mean_out and variance_out (optional) receive p*p doubles. */
SPFIM_API spfim_status spfim_estimate_fim(const spfim_model* model, const double* theta,
                                          size_t p, const spfim_estimator_config* config,
                                          double* mean_out, double* variance_out);
SPFIM_API spfim_status spfim_mc_true_fim(const spfim_model* model, const double* theta, size_t p,
                                         size_t replicates, uint64_t seed, size_t workers,
                                         double* fim_out);
/* Analytic FIM when the model has one (signal-plus-noise, quadratic). */
SPFIM_API spfim_status spfim_analytic_fim(const spfim_model* model, const double* theta, size_t p,
                                          double* fim_out);
SPFIM_API spfim_status spfim_spectral_norm(const double* dense, size_t p, double* out);
SPFIM_API spfim_status spfim_relative_spectral_error(const double* estimate, const double* truth,
                                                     size_t p, double* out);

/* ---- experiments ----------------------------------------------------- */

SPFIM_API spfim_status spfim_experiment_load(const char* path, spfim_experiment** out);
SPFIM_API spfim_status spfim_experiment_parse(const char* text, spfim_experiment** out);
SPFIM_API void spfim_experiment_free(spfim_experiment* experiment);
SPFIM_API spfim_status spfim_experiment_set_seed(spfim_experiment* experiment, uint64_t seed);
SPFIM_API spfim_status spfim_experiment_set_workers(spfim_experiment* experiment, size_t workers);
/* Output path and format from the config file, or NULL/defaults. */
SPFIM_API spfim_status spfim_experiment_output(const spfim_experiment* experiment, const char** path,
                                               spfim_format* format);
SPFIM_API spfim_status spfim_experiment_run(const spfim_experiment* experiment,
                                            spfim_report** out);

SPFIM_API void spfim_report_free(spfim_report* report);
/* Writes the report and its auxiliary tables. */
SPFIM_API spfim_status spfim_report_write(const spfim_report* report, const char* path,
                                          spfim_format format);
/* Copies a NUL-terminated string into buf; *needed receives the full size
 * including the terminator. Returns SPFIM_ERR_BUFFER_TOO_SMALL if cap is short. */
SPFIM_API spfim_status spfim_report_summary(const spfim_report* report, char* buf, size_t cap,
                                            size_t* needed);
SPFIM_API spfim_status spfim_report_json(const spfim_report* report, char* buf, size_t cap,
                                         size_t* needed);
SPFIM_API spfim_status spfim_report_warning_count(const spfim_report* report, size_t* count);
SPFIM_API const char* spfim_report_warning(const spfim_report* report, size_t index);

#ifdef __cplusplus
}
#endif

#endif /* SPFIM_SPFIM_H */
